//! Error norms of a discrete two-field solution against a reference field.

use crate::assembly::Layout;
use crate::error::Result;
use crate::mesh::{lerp, Point};
use crate::quadrature::{segment_rule, triangle_rule};
use crate::space::FeSpace;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ErrorNorms {
    pub l2: f64,
    /// Broken `H^1` seminorm, unweighted.
    pub h1_semi: f64,
    /// `|| gamma^{1/2} [e] ||_Γ`
    pub jump: f64,
    /// `(sum_i || mu_i^{1/2} grad e_i ||^2 + || gamma^{1/2} [e] ||^2)^{1/2}`
    pub triple: f64,
}

/// Reference value and gradient at a point.
pub type Reference<'a> = &'a (dyn Fn(Point) -> (f64, Point) + Sync);

/// Norms of `reference - u_h`, integrated over the regions and interface pieces of `layout`.
#[allow(clippy::too_many_arguments)]
pub fn error_norms(
    spaces: [&FeSpace; 2],
    layout: &Layout,
    coeffs: [&[f64]; 2],
    reference: [Reference<'_>; 2],
    mu: [f64; 2],
    gamma: f64,
    volume_degree: usize,
    interface_degree: usize,
) -> Result<ErrorNorms> {
    let tri = triangle_rule(volume_degree)?;
    let seg = segment_rule(interface_degree)?;
    let mut l2 = 0.0;
    let mut h1 = 0.0;
    let mut energy = 0.0;
    for s in 0..2 {
        let mut side_h1 = 0.0;
        for (t, corners) in &layout.regions[s] {
            for (x, w) in tri.mapped(corners) {
                let (v, g) = spaces[s].eval_field(coeffs[s], *t, x)?;
                let (rv, rg) = reference[s](x);
                l2 += w * (rv - v).powi(2);
                side_h1 += w * ((rg[0] - g[0]).powi(2) + (rg[1] - g[1]).powi(2));
            }
        }
        h1 += side_h1;
        energy += mu[s] * side_h1;
    }
    let mut jump = 0.0;
    for piece in &layout.pieces {
        let len = piece.length();
        for (t, w) in seg.points.iter().zip(&seg.weights) {
            let x = lerp(piece.endpoints[0], piece.endpoints[1], *t);
            let mut e = [0.0; 2];
            for s in 0..2 {
                let (v, _) = spaces[s].eval_field(coeffs[s], piece.elements[s], x)?;
                e[s] = reference[s](x).0 - v;
            }
            jump += w * len * gamma * (e[0] - e[1]).powi(2);
        }
    }
    Ok(ErrorNorms {
        l2: l2.sqrt(),
        h1_semi: h1.sqrt(),
        jump: jump.sqrt(),
        triple: (energy + jump).sqrt(),
    })
}

/// `sum_i mu_i || grad v_i ||^2` over the physical subdomains.
pub fn broken_energy(
    spaces: [&FeSpace; 2],
    layout: &Layout,
    coeffs: [&[f64]; 2],
    mu: [f64; 2],
    degree: usize,
) -> Result<f64> {
    let zero = |_: Point| (0.0, [0.0, 0.0]);
    let n = error_norms(spaces, layout, coeffs, [&zero, &zero], mu, 0.0, degree, 1)?;
    Ok(n.triple * n.triple)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::ProblemData;
    use crate::fitted::FittedProblem;
    use crate::mesh::{DiagonalPattern, Mesh, Rect};
    use approx::assert_relative_eq;
    use std::sync::Arc;

    fn split_square(n: usize) -> FittedProblem {
        let m1 = Mesh::structured(
            n / 2,
            n,
            Rect::new([0.0, 0.0], [0.5, 1.0]),
            DiagonalPattern::Right,
        )
        .unwrap();
        let m2 = Mesh::structured(
            n / 2,
            n,
            Rect::new([0.5, 0.0], [1.0, 1.0]),
            DiagonalPattern::Right,
        )
        .unwrap();
        FittedProblem::new(
            [1.0, 1.0],
            [Arc::new(m1), Arc::new(m2)],
            [[0.5, 0.0], [0.5, 1.0]],
            Rect::unit_square(),
            1,
            ProblemData::homogeneous(),
        )
        .unwrap()
    }

    #[test]
    fn piecewise_field_triple_norm() {
        let p = split_square(4);
        let h = p.spaces[0].mesh().h;
        let w1 = p.spaces[0].interpolate(|x| x[0]);
        let w2 = p.spaces[1].interpolate(|_| 0.0);
        let zero = |_: Point| (0.0, [0.0, 0.0]);
        let n = error_norms(
            [&p.spaces[0], &p.spaces[1]],
            p.layout(),
            [&w1, &w2],
            [&zero, &zero],
            p.mu,
            p.weights.gamma,
            4,
            5,
        )
        .unwrap();
        assert_relative_eq!(p.weights.gamma, 1.0 / (2.0 * h), max_relative = 1e-14);
        assert_relative_eq!(n.triple * n.triple, 0.5 + 0.125 / h, max_relative = 1e-13);
        assert_relative_eq!(n.jump * n.jump, 0.125 / h, max_relative = 1e-13);
    }

    #[test]
    fn unit_function_l2() {
        let p = split_square(2);
        let one = [
            p.spaces[0].interpolate(|_| 1.0),
            p.spaces[1].interpolate(|_| 1.0),
        ];
        let zero = |_: Point| (0.0, [0.0, 0.0]);
        let n = error_norms(
            [&p.spaces[0], &p.spaces[1]],
            p.layout(),
            [&one[0], &one[1]],
            [&zero, &zero],
            p.mu,
            p.weights.gamma,
            2,
            3,
        )
        .unwrap();
        assert_relative_eq!(n.l2, 1.0, max_relative = 1e-14);
        assert!(n.h1_semi < 1e-13 && n.jump < 1e-13);
    }
}
