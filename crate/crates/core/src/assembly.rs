//! Pieces shared by the fitted and unfitted assemblies.

use std::sync::Arc;

use crate::error::Result;
use crate::interface::InterfacePiece;
use crate::linalg::SparseSystem;
use crate::mesh::{dot, Point};
use crate::quadrature::triangle_rule;
use crate::space::FeSpace;

pub type Field = Arc<dyn Fn(Point) -> f64 + Send + Sync>;
/// `g_N(x, n)` with `n` the interface normal pointing into subdomain 2.
pub type FluxJumpField = Arc<dyn Fn(Point, Point) -> f64 + Send + Sync>;

/// Right-hand side data of the two-subdomain problem.
#[derive(Clone)]
pub struct ProblemData {
    /// Source `f_i` on each subdomain.
    pub source: [Field; 2],
    /// Values imposed on the outer boundary for each subdomain's space.
    pub boundary: [Field; 2],
    /// Flux jump `[mu grad u . n]` on the interface.
    pub flux_jump: Option<FluxJumpField>,
    /// The exact solution has a nonzero flux jump, so `flux_jump` must be supplied.
    pub declares_flux_jump: bool,
}

impl ProblemData {
    /// `f = 0`, zero boundary values, no flux jump.
    pub fn homogeneous() -> Self {
        let zero: Field = Arc::new(|_| 0.0);
        Self {
            source: [zero.clone(), zero.clone()],
            boundary: [zero.clone(), zero],
            flux_jump: None,
            declares_flux_jump: false,
        }
    }
}

impl std::fmt::Debug for ProblemData {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProblemData")
            .field("flux_jump", &self.flux_jump.is_some())
            .field("declares_flux_jump", &self.declares_flux_jump)
            .finish_non_exhaustive()
    }
}

/// Integration layout: volume regions of each subdomain and the interface pieces.
#[derive(Debug, Clone, Default)]
pub struct Layout {
    /// `(element, triangle)` pairs; the triangle is the element itself or a sub-triangle of it.
    pub regions: [Vec<(usize, [Point; 3])>; 2],
    pub pieces: Vec<InterfacePiece>,
}

/// Quadrature degrees for volume and interface integrals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadDegrees {
    pub volume: usize,
    pub interface: usize,
}

impl QuadDegrees {
    pub fn for_order(k: usize) -> Self {
        Self {
            volume: 2 * k + 2,
            interface: 2 * k + 3,
        }
    }
}

/// The discrete solution split by subdomain space.
#[derive(Debug, Clone)]
pub struct DiscreteSolution {
    pub coeffs: [Vec<f64>; 2],
    pub relative_residual: f64,
}

/// Adds `(mu grad u, grad v)` and `(f, v)` over `regions` for one space.
pub fn assemble_volume(
    system: &mut SparseSystem,
    space: &FeSpace,
    offset: usize,
    mu: f64,
    regions: &[(usize, [Point; 3])],
    source: Option<&(dyn Fn(Point) -> f64 + Sync)>,
    degree: usize,
) -> Result<()> {
    let rule = triangle_rule(degree)?;
    let nl = space.local_dofs();
    let mut local = [[0.0; 6]; 6];
    let mut load = [0.0; 6];
    for (t, tri) in regions {
        let dofs = space.element_dofs(*t)?;
        local.iter_mut().for_each(|r| r.fill(0.0));
        load.fill(0.0);
        for (x, w) in rule.mapped(tri) {
            let e = space.eval_at(*t, x)?;
            for a in 0..nl {
                for b in 0..nl {
                    local[a][b] += w * mu * dot(e.grads[a], e.grads[b]);
                }
            }
            if let Some(f) = source {
                let fx = f(x);
                for a in 0..nl {
                    load[a] += w * fx * e.values[a];
                }
            }
        }
        for a in 0..nl {
            for b in 0..nl {
                system.add(offset + dofs[a], offset + dofs[b], local[a][b]);
            }
            system.rhs[offset + dofs[a]] += load[a];
        }
    }
    Ok(())
}
