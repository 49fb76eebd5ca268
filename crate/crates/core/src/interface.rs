//! Interface weights and the nonsymmetric Nitsche coupling terms shared by both regimes.

use crate::error::{Error, Result};
use crate::linalg::SparseSystem;
use crate::mesh::{lerp, Point};
use crate::quadrature::segment_rule;
use crate::space::FeSpace;

/// Averaging weights and interface scaling.
///
/// `{w} = omega1 w1 + omega2 w2` weights the fluxes, `<w> = omega2 w1 + omega1 w2`
/// multiplies the flux jump, and `gamma` only enters the triple norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightSet {
    pub omega1: f64,
    pub omega2: f64,
    pub gamma: f64,
}

fn check_positive(values: &[(&str, f64)]) -> Result<()> {
    for (name, v) in values {
        if !(*v > 0.0) || !v.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "{name} must be positive and finite, got {v}"
            )));
        }
    }
    Ok(())
}

impl WeightSet {
    /// Weights for two independently meshed subdomains with mesh sizes `h1`, `h2`.
    pub fn fitted(mu1: f64, mu2: f64, h1: f64, h2: f64) -> Result<Self> {
        check_positive(&[("mu1", mu1), ("mu2", mu2), ("h1", h1), ("h2", h2)])?;
        let denom = h1 * mu2 + h2 * mu1;
        let omega1 = h1 * mu2 / denom;
        Ok(Self {
            omega1,
            omega2: 1.0 - omega1,
            gamma: mu1 * mu2 / denom,
        })
    }

    /// Weights for a single background mesh of size `h`.
    pub fn unfitted(mu1: f64, mu2: f64, h: f64) -> Result<Self> {
        check_positive(&[("mu1", mu1), ("mu2", mu2), ("h", h)])?;
        let omega1 = mu2 / (mu1 + mu2);
        Ok(Self {
            omega1,
            omega2: 1.0 - omega1,
            gamma: mu1 * mu2 / (h * (mu1 + mu2)),
        })
    }

    pub fn omega(&self) -> [f64; 2] {
        [self.omega1, self.omega2]
    }
}

/// A straight piece of the interface with the element of each side that contains it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfacePiece {
    pub endpoints: [Point; 2],
    /// Element of space 1 and of space 2 (the same background element when cut).
    pub elements: [usize; 2],
    /// Unit normal pointing from subdomain 1 into subdomain 2.
    pub normal: Point,
}

impl InterfacePiece {
    pub fn length(&self) -> f64 {
        crate::mesh::dist(self.endpoints[0], self.endpoints[1])
    }
}

/// Flux-jump datum `g_N(x, n)` on the interface.
pub type InterfaceField<'a> = &'a (dyn Fn(Point, Point) -> f64 + Sync);

/// Adds `-<{mu grad u . n}, [v]> + <{mu grad v . n}, [u]>` over `pieces`.
///
/// Space `i` occupies the global block starting at `offsets[i]`.
pub fn assemble_coupling(
    system: &mut SparseSystem,
    spaces: [&FeSpace; 2],
    offsets: [usize; 2],
    mu: [f64; 2],
    weights: &WeightSet,
    pieces: &[InterfacePiece],
    degree: usize,
) -> Result<()> {
    let rule = segment_rule(degree)?;
    let omega = weights.omega();
    let jump_sign = [1.0, -1.0];
    for piece in pieces {
        let len = piece.length();
        for (t, w) in rule.points.iter().zip(&rule.weights) {
            let x = lerp(piece.endpoints[0], piece.endpoints[1], *t);
            let wq = w * len;
            let evals = [
                spaces[0].eval_at(piece.elements[0], x)?,
                spaces[1].eval_at(piece.elements[1], x)?,
            ];
            let dofs = [
                spaces[0].element_dofs(piece.elements[0])?,
                spaces[1].element_dofs(piece.elements[1])?,
            ];
            // flux[s][a] = omega_s mu_s grad(phi_a) . n
            let flux: [Vec<f64>; 2] = [0, 1].map(|s| {
                (0..evals[s].n)
                    .map(|a| omega[s] * mu[s] * crate::mesh::dot(evals[s].grads[a], piece.normal))
                    .collect()
            });
            for rs in 0..2 {
                for (a, &ra) in dofs[rs].iter().enumerate() {
                    let row = offsets[rs] + ra;
                    let test_jump = jump_sign[rs] * evals[rs].values[a];
                    let test_flux = flux[rs][a];
                    for cs in 0..2 {
                        for (b, &cb) in dofs[cs].iter().enumerate() {
                            let trial_jump = jump_sign[cs] * evals[cs].values[b];
                            let trial_flux = flux[cs][b];
                            let value = -trial_flux * test_jump + test_flux * trial_jump;
                            system.add(row, offsets[cs] + cb, wq * value);
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

/// Adds `<g_N, <v>>` over `pieces` to the right-hand side.
pub fn interface_source(
    system: &mut SparseSystem,
    spaces: [&FeSpace; 2],
    offsets: [usize; 2],
    weights: &WeightSet,
    pieces: &[InterfacePiece],
    flux_jump: InterfaceField<'_>,
    degree: usize,
) -> Result<()> {
    let rule = segment_rule(degree)?;
    // <v> = omega2 v1 + omega1 v2
    let avg = [weights.omega2, weights.omega1];
    for piece in pieces {
        let len = piece.length();
        for (t, w) in rule.points.iter().zip(&rule.weights) {
            let x = lerp(piece.endpoints[0], piece.endpoints[1], *t);
            let g = flux_jump(x, piece.normal);
            if g == 0.0 {
                continue;
            }
            for s in 0..2 {
                let e = spaces[s].eval_at(piece.elements[s], x)?;
                let dofs = spaces[s].element_dofs(piece.elements[s])?;
                for (a, &d) in dofs.iter().enumerate() {
                    system.rhs[offsets[s] + d] += w * len * g * avg[s] * e.values[a];
                }
            }
        }
    }
    Ok(())
}
