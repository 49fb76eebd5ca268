//! Penalty-free Nitsche coupling for two-subdomain Poisson interface problems in 2D.
//!
//! Two regimes are supported:
//!
//! * **fitted**: each subdomain carries its own structured triangulation and the
//!   two traces on the interface do not match. Interface integrals run over the
//!   common refinement of both traces ([`trace::MergedTrace`]).
//! * **unfitted**: a single background mesh is cut by a level set. Each subdomain
//!   owns a P_k space over the elements it touches, and a ghost penalty on the
//!   facets of cut elements keeps the system well conditioned for small cuts.
//!
//! The bilinear form is nonsymmetric and carries no penalty on the solution jump,
//! so for every discrete `v` the quadratic form reduces to the broken energy
//! `sum_i mu_i |grad v_i|^2` (plus the ghost penalty in the unfitted case).

pub mod assembly;
pub mod cut;
pub mod error;
pub mod fitted;
pub mod interface;
pub mod levelset;
pub mod linalg;
pub mod manufactured;
pub mod mesh;
pub mod norms;
pub mod quadrature;
pub mod report;
pub mod space;
pub mod study;
pub mod trace;
pub mod unfitted;

pub use error::{Error, Result};
pub use mesh::Point;
