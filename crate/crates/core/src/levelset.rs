//! Interface descriptions. `phi < 0` is subdomain 1, `phi > 0` is subdomain 2.

use crate::error::{Error, Result};
use crate::mesh::{dot, sub, Point};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LevelSet {
    /// `phi(x) = normal . x - offset` with a unit normal.
    Affine { normal: Point, offset: f64 },
    /// `phi(x) = |x - center| - radius`.
    Circle { center: Point, radius: f64 },
}

impl LevelSet {
    /// Affine level set; `normal` is rescaled to unit length together with `offset`.
    pub fn affine(normal: Point, offset: f64) -> Result<Self> {
        let len = normal[0].hypot(normal[1]);
        if !(len > 0.0) || !len.is_finite() {
            return Err(Error::InvalidArgument(
                "affine level set needs a nonzero normal".into(),
            ));
        }
        Ok(LevelSet::Affine {
            normal: [normal[0] / len, normal[1] / len],
            offset: offset / len,
        })
    }

    /// The vertical line `x = x0` with subdomain 1 on the left.
    pub fn vertical_line(x0: f64) -> Self {
        LevelSet::Affine {
            normal: [1.0, 0.0],
            offset: x0,
        }
    }

    pub fn circle(center: Point, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "circle radius must be positive, got {radius}"
            )));
        }
        Ok(LevelSet::Circle { center, radius })
    }

    pub fn eval(&self, x: Point) -> f64 {
        match *self {
            LevelSet::Affine { normal, offset } => dot(normal, x) - offset,
            LevelSet::Circle { center, radius } => {
                let d = sub(x, center);
                d[0].hypot(d[1]) - radius
            }
        }
    }

    /// Unit normal pointing from subdomain 1 into subdomain 2.
    pub fn normal(&self, x: Point) -> Point {
        match *self {
            LevelSet::Affine { normal, .. } => normal,
            LevelSet::Circle { center, .. } => {
                let d = sub(x, center);
                let len = d[0].hypot(d[1]);
                [d[0] / len, d[1] / len]
            }
        }
    }

    /// Parameters `t` in the open interval `(0, 1)` where `phi(a + t (b - a)) = 0`,
    /// ignoring roots within `end_tol` (in parameter units) of either endpoint.
    /// A double root is reported as `Err(t)` so the caller can flag a tangency.
    pub(crate) fn edge_roots(
        &self,
        a: Point,
        b: Point,
        end_tol: f64,
    ) -> std::result::Result<Vec<f64>, f64> {
        let keep = |t: f64| t > end_tol && t < 1.0 - end_tol;
        match *self {
            LevelSet::Affine { .. } => {
                let (fa, fb) = (self.eval(a), self.eval(b));
                if (fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0) {
                    let t = fa / (fa - fb);
                    Ok(if keep(t) { vec![t] } else { vec![] })
                } else {
                    Ok(vec![])
                }
            }
            LevelSet::Circle { center, radius } => {
                // |a - c + t d|^2 = r^2
                let d = sub(b, a);
                let e = sub(a, center);
                let qa = dot(d, d);
                let qb = 2.0 * dot(d, e);
                let qc = dot(e, e) - radius * radius;
                let disc = qb * qb - 4.0 * qa * qc;
                let scale = qb * qb + (4.0 * qa * qc).abs();
                if disc < -1e-14 * scale {
                    return Ok(vec![]);
                }
                if disc.abs() <= 1e-14 * scale {
                    let t = -qb / (2.0 * qa);
                    return if keep(t) { Err(t) } else { Ok(vec![]) };
                }
                let sq = disc.sqrt();
                // Numerically stable pair of roots.
                let q = -0.5 * (qb + qb.signum() * sq);
                let mut roots = [q / qa, qc / q];
                roots.sort_by(f64::total_cmp);
                Ok(roots.into_iter().filter(|&t| keep(t)).collect())
            }
        }
    }
}
