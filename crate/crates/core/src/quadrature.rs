//! Quadrature on the unit interval and on the reference triangle `{(xi, eta) : xi, eta >= 0, xi + eta <= 1}`.

use crate::error::{Error, Result};
use crate::mesh::Point;

pub const MAX_DEGREE: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadRule<P> {
    pub points: Vec<P>,
    pub weights: Vec<f64>,
    /// Polynomial degree integrated exactly.
    pub degree: usize,
}

pub type SegmentRule = QuadRule<f64>;
pub type TriangleRule = QuadRule<Point>;

impl TriangleRule {
    /// Barycentric coordinates `(1 - xi - eta, xi, eta)` of each point.
    pub fn barycentric(&self) -> Vec<[f64; 3]> {
        self.points
            .iter()
            .map(|p| [1.0 - p[0] - p[1], p[0], p[1]])
            .collect()
    }

    /// Points mapped onto the physical triangle `corners`, with weights scaled by
    /// the physical-to-reference area ratio.
    pub fn mapped(&self, corners: &[Point; 3]) -> impl Iterator<Item = (Point, f64)> + '_ {
        let [a, b, c] = *corners;
        let jac = crate::mesh::triangle_area(corners) * 2.0;
        self.points.iter().zip(&self.weights).map(move |(p, w)| {
            let x = [
                a[0] + p[0] * (b[0] - a[0]) + p[1] * (c[0] - a[0]),
                a[1] + p[0] * (b[1] - a[1]) + p[1] * (c[1] - a[1]),
            ];
            (x, w * jac)
        })
    }
}

fn check_degree(degree: usize) -> Result<()> {
    if (1..=MAX_DEGREE).contains(&degree) {
        Ok(())
    } else {
        Err(Error::UnsupportedDegree(degree))
    }
}

/// `n`-point Gauss-Legendre nodes and weights on `[-1, 1]`.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Chebyshev-like initial guess, refined by Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Gauss-Legendre rule on `[0, 1]` exact for polynomials of `degree`.
pub fn segment_rule(degree: usize) -> Result<SegmentRule> {
    check_degree(degree)?;
    let n = degree / 2 + 1;
    let (x, w) = gauss_legendre(n);
    Ok(QuadRule {
        points: x.iter().map(|t| 0.5 * (t + 1.0)).collect(),
        weights: w.iter().map(|w| 0.5 * w).collect(),
        degree,
    })
}

/// Rule on the reference triangle exact for polynomials of `degree`.
///
/// Degree 1 is the centroid rule; higher degrees use a collapsed (Duffy) tensor
/// product of Gauss-Legendre rules.
pub fn triangle_rule(degree: usize) -> Result<TriangleRule> {
    check_degree(degree)?;
    if degree == 1 {
        return Ok(QuadRule {
            points: vec![[1.0 / 3.0, 1.0 / 3.0]],
            weights: vec![0.5],
            degree,
        });
    }
    // The collapse Jacobian (1 - u) adds one degree in u.
    let n = degree.div_ceil(2) + 1;
    let (x, w) = gauss_legendre(n);
    let mut points = Vec::with_capacity(n * n);
    let mut weights = Vec::with_capacity(n * n);
    for (xu, wu) in x.iter().zip(&w) {
        let u = 0.5 * (xu + 1.0);
        for (xv, wv) in x.iter().zip(&w) {
            let v = 0.5 * (xv + 1.0);
            points.push([u, v * (1.0 - u)]);
            weights.push(0.25 * wu * wv * (1.0 - u));
        }
    }
    Ok(QuadRule {
        points,
        weights,
        degree,
    })
}
