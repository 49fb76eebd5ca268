//! Manufactured solution `u = exp(xy) sin(pi x) sin(pi y)` on the unit square.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::assembly::{Field, FluxJumpField, ProblemData};
use crate::mesh::{dot, Point};

pub fn u(p: Point) -> f64 {
    let [x, y] = p;
    (x * y).exp() * (PI * x).sin() * (PI * y).sin()
}

pub fn grad_u(p: Point) -> Point {
    let [x, y] = p;
    let e = (x * y).exp();
    let (sx, cx) = (PI * x).sin_cos();
    let (sy, cy) = (PI * y).sin_cos();
    [e * sy * (y * sx + PI * cx), e * sx * (x * sy + PI * cy)]
}

pub fn laplacian_u(p: Point) -> f64 {
    let [x, y] = p;
    let e = (x * y).exp();
    let (sx, cx) = (PI * x).sin_cos();
    let (sy, cy) = (PI * y).sin_cos();
    e * ((x * x + y * y - 2.0 * PI * PI) * sx * sy + 2.0 * PI * (y * cx * sy + x * sx * cy))
}

/// The manufactured field with diffusivities `mu` on the two subdomains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManufacturedCase {
    pub mu: [f64; 2],
}

impl ManufacturedCase {
    pub fn new(mu1: f64, mu2: f64) -> Self {
        Self { mu: [mu1, mu2] }
    }

    /// `f_i = -mu_i Δu`
    pub fn source(&self, side: usize, p: Point) -> f64 {
        -self.mu[side] * laplacian_u(p)
    }

    /// `[mu grad u . n] = (mu1 - mu2) grad u . n`
    pub fn flux_jump(&self, p: Point, n: Point) -> f64 {
        (self.mu[0] - self.mu[1]) * dot(grad_u(p), n)
    }

    pub fn has_flux_jump(&self) -> bool {
        self.mu[0] != self.mu[1]
    }

    /// Problem data with homogeneous boundary values. With `with_flux_jump == false`
    /// the interface source is dropped even when the exact flux jump is nonzero.
    pub fn problem_data(&self, with_flux_jump: bool) -> ProblemData {
        let source = [0, 1].map(|s| {
            let case = *self;
            Arc::new(move |p| case.source(s, p)) as Field
        });
        let zero: Field = Arc::new(|_| 0.0);
        let case = *self;
        let flux_jump = (with_flux_jump && self.has_flux_jump())
            .then(|| Arc::new(move |p, n| case.flux_jump(p, n)) as FluxJumpField);
        ProblemData {
            source,
            boundary: [zero.clone(), zero],
            declares_flux_jump: with_flux_jump && self.has_flux_jump(),
            flux_jump,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn centre_value() {
        assert_relative_eq!(u([0.5, 0.5]), 0.25f64.exp(), max_relative = 1e-15);
        assert_relative_eq!(u([0.5, 0.5]), 1.284025, epsilon = 1e-6);
    }

    #[test]
    fn source_at_centre() {
        let case = ManufacturedCase::new(1.0, 1.0);
        let f = case.source(0, [0.5, 0.5]);
        assert_relative_eq!(
            f,
            -2.0 * 0.25f64.exp() * (0.25 - PI * PI),
            max_relative = 1e-14
        );
        assert_relative_eq!(f, 24.70363, epsilon = 1e-5);

        // Five-point central difference, step 1e-5.
        let h = 1e-5;
        let p = [0.5, 0.5];
        let fd =
            (u([p[0] + h, p[1]]) + u([p[0] - h, p[1]]) + u([p[0], p[1] + h]) + u([p[0], p[1] - h])
                - 4.0 * u(p))
                / (h * h);
        assert!((-fd - f).abs() < 1e-3 * f.abs());
    }

    #[test]
    fn derivatives_against_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = 1e-5;
        for _ in 0..50 {
            let p = [rng.gen_range(0.05..0.95), rng.gen_range(0.05..0.95)];
            let g = grad_u(p);
            let gx = (u([p[0] + h, p[1]]) - u([p[0] - h, p[1]])) / (2.0 * h);
            let gy = (u([p[0], p[1] + h]) - u([p[0], p[1] - h])) / (2.0 * h);
            assert!((g[0] - gx).abs() < 1e-8 && (g[1] - gy).abs() < 1e-8);
            let lx = (grad_u([p[0] + h, p[1]])[0] - grad_u([p[0] - h, p[1]])[0]) / (2.0 * h);
            let ly = (grad_u([p[0], p[1] + h])[1] - grad_u([p[0], p[1] - h])[1]) / (2.0 * h);
            assert!((laplacian_u(p) - (lx + ly)).abs() < 1e-6);
        }
    }

    #[test]
    fn flux_jump_on_split_square() {
        let case = ManufacturedCase::new(1.0, 10.0);
        let g = case.flux_jump([0.5, 0.5], [1.0, 0.0]);
        assert_relative_eq!(g, -9.0 * 0.25f64.exp() * 0.5, max_relative = 1e-14);
        assert_relative_eq!(g, -5.77812, epsilon = 1e-5);
        for y in [0.1, 0.37, 0.8] {
            let expected = -9.0 * (y / 2.0f64).exp() * y * (PI * y).sin();
            assert_relative_eq!(
                case.flux_jump([0.5, y], [1.0, 0.0]),
                expected,
                max_relative = 1e-13
            );
        }
        assert!(!ManufacturedCase::new(2.0, 2.0).has_flux_jump());
    }

    #[test]
    fn vanishes_on_boundary() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for i in 0..100 {
            let s: f64 = rng.gen();
            let p = match i % 4 {
                0 => [s, 0.0],
                1 => [s, 1.0],
                2 => [0.0, s],
                _ => [1.0, s],
            };
            assert!(u(p).abs() < 1e-14);
        }
    }
}
