//! Structured triangulations of axis-aligned rectangles with full facet adjacency.

use std::collections::HashMap;
use std::io::Write;

use crate::error::{Error, Result};

pub type Point = [f64; 2];

/// Orientation of the diagonal that splits each grid cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DiagonalPattern {
    /// Every cell is split from its lower-left to its upper-right corner.
    #[default]
    Right,
    /// Checkerboard: odd cells use the lower-right to upper-left diagonal.
    Alternating,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub min: Point,
    pub max: Point,
}

impl Rect {
    pub fn new(min: Point, max: Point) -> Self {
        Self { min, max }
    }

    pub fn unit_square() -> Self {
        Self::new([0.0, 0.0], [1.0, 1.0])
    }

    pub fn width(&self) -> f64 {
        self.max[0] - self.min[0]
    }

    pub fn height(&self) -> f64 {
        self.max[1] - self.min[1]
    }

    /// True if `p` lies on the rectangle's boundary within `tol`.
    pub fn on_boundary(&self, p: Point, tol: f64) -> bool {
        let inside = p[0] >= self.min[0] - tol
            && p[0] <= self.max[0] + tol
            && p[1] >= self.min[1] - tol
            && p[1] <= self.max[1] + tol;
        inside
            && ((p[0] - self.min[0]).abs() <= tol
                || (p[0] - self.max[0]).abs() <= tol
                || (p[1] - self.min[1]).abs() <= tol
                || (p[1] - self.max[1]).abs() <= tol)
    }
}

/// An edge of the triangulation. `triangles[1]` is `None` on the mesh boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct Facet {
    pub vertices: [usize; 2],
    pub triangles: [Option<usize>; 2],
}

impl Facet {
    pub fn is_boundary(&self) -> bool {
        self.triangles[1].is_none()
    }
}

#[derive(Debug, Clone)]
pub struct Mesh {
    pub vertices: Vec<Point>,
    /// Counterclockwise vertex triples.
    pub triangles: Vec<[usize; 3]>,
    pub facets: Vec<Facet>,
    /// `triangle_facets[t][i]` is the facet joining local vertices `i` and `(i + 1) % 3`.
    pub triangle_facets: Vec<[usize; 3]>,
    pub boundary_facets: Vec<usize>,
    /// Largest triangle diameter.
    pub h: f64,
    pub pattern: DiagonalPattern,
    pub rect: Rect,
}

impl Mesh {
    /// Uniform `nx` by `ny` grid over `rect`, each cell split into two triangles.
    pub fn structured(nx: usize, ny: usize, rect: Rect, pattern: DiagonalPattern) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::InvalidArgument(format!(
                "subdivision counts must be positive, got {nx}x{ny}"
            )));
        }
        if !(rect.width() > 0.0 && rect.height() > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "degenerate rectangle {:?}..{:?}",
                rect.min, rect.max
            )));
        }

        let dx = rect.width() / nx as f64;
        let dy = rect.height() / ny as f64;
        let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
        for j in 0..=ny {
            for i in 0..=nx {
                // Snap the last row/column onto the rectangle edge exactly.
                let x = if i == nx {
                    rect.max[0]
                } else {
                    rect.min[0] + i as f64 * dx
                };
                let y = if j == ny {
                    rect.max[1]
                } else {
                    rect.min[1] + j as f64 * dy
                };
                vertices.push([x, y]);
            }
        }

        let idx = |i: usize, j: usize| j * (nx + 1) + i;
        let mut triangles = Vec::with_capacity(2 * nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                let (v00, v10, v11, v01) =
                    (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
                let flip = pattern == DiagonalPattern::Alternating && (i + j) % 2 == 1;
                if flip {
                    triangles.push([v00, v10, v01]);
                    triangles.push([v10, v11, v01]);
                } else {
                    triangles.push([v00, v10, v11]);
                    triangles.push([v00, v11, v01]);
                }
            }
        }

        Ok(Self::from_triangles(vertices, triangles, pattern, rect))
    }

    fn from_triangles(
        vertices: Vec<Point>,
        triangles: Vec<[usize; 3]>,
        pattern: DiagonalPattern,
        rect: Rect,
    ) -> Self {
        let mut lookup: HashMap<(usize, usize), usize> = HashMap::new();
        let mut facets: Vec<Facet> = Vec::new();
        let mut triangle_facets = Vec::with_capacity(triangles.len());
        for (t, tri) in triangles.iter().enumerate() {
            let mut local = [0; 3];
            for i in 0..3 {
                let (a, b) = (tri[i], tri[(i + 1) % 3]);
                let key = (a.min(b), a.max(b));
                let f = *lookup.entry(key).or_insert_with(|| {
                    facets.push(Facet {
                        vertices: [key.0, key.1],
                        triangles: [Some(t), None],
                    });
                    facets.len() - 1
                });
                if facets[f].triangles[0] != Some(t) {
                    facets[f].triangles[1] = Some(t);
                }
                local[i] = f;
            }
            triangle_facets.push(local);
        }
        let boundary_facets = (0..facets.len())
            .filter(|&f| facets[f].is_boundary())
            .collect();

        let mut mesh = Self {
            vertices,
            triangles,
            facets,
            triangle_facets,
            boundary_facets,
            h: 0.0,
            pattern,
            rect,
        };
        mesh.h = (0..mesh.num_triangles())
            .map(|t| mesh.diameter(t))
            .fold(0.0, f64::max);
        mesh
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn num_facets(&self) -> usize {
        self.facets.len()
    }

    pub fn corners(&self, t: usize) -> [Point; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn area(&self, t: usize) -> f64 {
        triangle_area(&self.corners(t))
    }

    pub fn diameter(&self, t: usize) -> f64 {
        let p = self.corners(t);
        (0..3)
            .map(|i| dist(p[i], p[(i + 1) % 3]))
            .fold(0.0, f64::max)
    }

    /// Radius of the inscribed circle.
    pub fn inradius(&self, t: usize) -> f64 {
        let p = self.corners(t);
        let perimeter: f64 = (0..3).map(|i| dist(p[i], p[(i + 1) % 3])).sum();
        2.0 * self.area(t) / perimeter
    }

    /// Shape-regularity ratio `h_K / rho_K` (diameter over inradius).
    pub fn shape_ratio(&self, t: usize) -> f64 {
        self.diameter(t) / self.inradius(t)
    }

    pub fn facet_length(&self, f: usize) -> f64 {
        let [a, b] = self.facets[f].vertices;
        dist(self.vertices[a], self.vertices[b])
    }

    pub fn facet_points(&self, f: usize) -> [Point; 2] {
        let [a, b] = self.facets[f].vertices;
        [self.vertices[a], self.vertices[b]]
    }

    pub fn centroid(&self, t: usize) -> Point {
        let p = self.corners(t);
        [
            (p[0][0] + p[1][0] + p[2][0]) / 3.0,
            (p[0][1] + p[1][1] + p[2][1]) / 3.0,
        ]
    }

    /// Unit normal of facet `f` pointing out of triangle `t`.
    pub fn outward_normal(&self, f: usize, t: usize) -> Point {
        let [a, b] = self.facet_points(f);
        let n = unit_normal(a, b);
        let c = self.centroid(t);
        let m = midpoint(a, b);
        if dot(n, sub(m, c)) >= 0.0 {
            n
        } else {
            [-n[0], -n[1]]
        }
    }

    /// Plain-text dump: a header line followed by vertex coordinates and triangles.
    pub fn write_text<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(
            out,
            "vertices {} triangles {}",
            self.num_vertices(),
            self.num_triangles()
        )?;
        for v in &self.vertices {
            writeln!(out, "{} {}", v[0], v[1])?;
        }
        for t in &self.triangles {
            writeln!(out, "{} {} {}", t[0], t[1], t[2])?;
        }
        Ok(())
    }
}

pub fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

pub fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

pub fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

pub fn midpoint(a: Point, b: Point) -> Point {
    [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]
}

pub fn lerp(a: Point, b: Point, t: f64) -> Point {
    [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
}

/// Unit vector perpendicular to `b - a` (rotated clockwise).
pub fn unit_normal(a: Point, b: Point) -> Point {
    let d = sub(b, a);
    let len = d[0].hypot(d[1]);
    [d[1] / len, -d[0] / len]
}

/// Signed area, positive for counterclockwise corners.
pub fn signed_area(p: &[Point; 3]) -> f64 {
    0.5 * ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]))
}

pub fn triangle_area(p: &[Point; 3]) -> f64 {
    signed_area(p).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn smallest_mesh() {
        let m = Mesh::structured(1, 1, Rect::unit_square(), DiagonalPattern::Right).unwrap();
        assert_eq!(m.num_triangles(), 2);
        assert_eq!(m.num_vertices(), 4);
        assert_eq!(m.num_facets(), 5);
        assert_eq!(m.boundary_facets.len(), 4);
        assert_relative_eq!(m.h, 2f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn euler_relation_2x2() {
        let m = Mesh::structured(2, 2, Rect::unit_square(), DiagonalPattern::Right).unwrap();
        assert_eq!(
            (m.num_vertices(), m.num_facets(), m.num_triangles()),
            (9, 16, 8)
        );
        let euler = m.num_vertices() as i64 - m.num_facets() as i64 + m.num_triangles() as i64;
        assert_eq!(euler, 1);
    }

    #[test]
    fn uniform_shape_ratio() {
        // Right isosceles with legs a: diameter a*sqrt(2), inradius a*(2 - sqrt(2))/2.
        let expected = 2.0 + 2.0 * 2f64.sqrt();
        for pattern in [DiagonalPattern::Right, DiagonalPattern::Alternating] {
            let m = Mesh::structured(10, 10, Rect::unit_square(), pattern).unwrap();
            for t in 0..m.num_triangles() {
                assert_relative_eq!(m.shape_ratio(t), expected, max_relative = 1e-12);
                assert!(m.shape_ratio(t) <= 5.0);
            }
        }
    }

    #[test]
    fn rejects_degenerate_rect() {
        let flat = Rect::new([0.0, 0.0], [1.0, 0.0]);
        assert!(Mesh::structured(2, 2, flat, DiagonalPattern::Right).is_err());
        assert!(Mesh::structured(0, 2, Rect::unit_square(), DiagonalPattern::Right).is_err());
    }

    #[test]
    fn positive_orientation_and_adjacency() {
        for pattern in [DiagonalPattern::Right, DiagonalPattern::Alternating] {
            let m = Mesh::structured(5, 3, Rect::new([0.5, 0.0], [1.0, 1.0]), pattern).unwrap();
            let mut visits = vec![0; m.num_facets()];
            for t in 0..m.num_triangles() {
                assert!(signed_area(&m.corners(t)) > 0.0);
                for &f in &m.triangle_facets[t] {
                    visits[f] += 1;
                }
            }
            for (f, facet) in m.facets.iter().enumerate() {
                let expected = if facet.is_boundary() { 1 } else { 2 };
                assert_eq!(visits[f], expected);
            }
            let euler = m.num_vertices() as i64 - m.num_facets() as i64 + m.num_triangles() as i64;
            assert_eq!(euler, 1);
        }
    }

    #[test]
    fn text_dump_header() {
        let m = Mesh::structured(1, 1, Rect::unit_square(), DiagonalPattern::Right).unwrap();
        let mut buf = Vec::new();
        m.write_text(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("vertices 4 triangles 2"));
        assert_eq!(text.lines().count(), 1 + 4 + 2);
        assert_eq!(text.lines().last(), Some("0 3 2"));
    }
}
