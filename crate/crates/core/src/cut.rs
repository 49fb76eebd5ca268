//! Classification of background elements against a level set and sub-triangulation
//! of the cut ones.

use crate::error::{Error, Result};
use crate::interface::InterfacePiece;
use crate::levelset::LevelSet;
use crate::mesh::{dist, dot, lerp, midpoint, unit_normal, Mesh, Point};

/// Vertices with `|phi| < SNAP_FACTOR * h` are treated as lying on the interface.
pub const SNAP_FACTOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementClass {
    Inside1,
    Inside2,
    Cut,
}

/// Outcome of cutting a single triangle.
#[derive(Debug, Clone, PartialEq)]
pub enum TriangleCut {
    /// The open triangle lies entirely in subdomain 1 (`0`) or 2 (`1`).
    Inside(usize),
    Cut(CutGeometry),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CutGeometry {
    /// Sub-triangles covering `K ∩ Ω_1` and `K ∩ Ω_2`.
    pub sub_triangles: [Vec<[Point; 3]>; 2],
    /// Straight chord approximating the interface inside the element.
    pub chord: [Point; 2],
    /// Unit normal of the chord pointing into subdomain 2.
    pub normal: Point,
}

#[derive(Debug, Clone)]
pub struct CutElement {
    pub element: usize,
    pub geometry: CutGeometry,
}

#[derive(Debug, Clone)]
pub struct CutDecomposition {
    pub classes: Vec<ElementClass>,
    /// The cut set `G_h`, in element order.
    pub cut_elements: Vec<CutElement>,
    cut_index: Vec<Option<usize>>,
    /// `active[i][t]` is true when element `t` belongs to the extended domain of subdomain `i`.
    pub active: [Vec<bool>; 2],
    /// Interior facets carrying the ghost penalty for each subdomain.
    pub ghost_facets: [Vec<usize>; 2],
    /// Interface pieces: chords of cut elements, plus mesh facets that the
    /// interface runs along after snapping.
    pub interface: Vec<InterfacePiece>,
}

impl CutDecomposition {
    pub fn cut(&self, t: usize) -> Option<&CutElement> {
        self.cut_index[t].map(|i| &self.cut_elements[i])
    }

    pub fn is_cut(&self, t: usize) -> bool {
        self.cut_index[t].is_some()
    }

    /// Quadrature regions `(element, triangle)` covering subdomain `side` (0 or 1).
    pub fn regions(&self, mesh: &Mesh, side: usize) -> Vec<(usize, [Point; 3])> {
        let inside = if side == 0 {
            ElementClass::Inside1
        } else {
            ElementClass::Inside2
        };
        let mut out = Vec::new();
        for (t, class) in self.classes.iter().enumerate() {
            if *class == inside {
                out.push((t, mesh.corners(t)));
            } else if let Some(c) = self.cut(t) {
                out.extend(c.geometry.sub_triangles[side].iter().map(|s| (t, *s)));
            }
        }
        out
    }

    /// Elements of the extended domain `Ω_i*`.
    pub fn extended_elements(&self, side: usize) -> Vec<usize> {
        (0..self.classes.len())
            .filter(|&t| self.active[side][t])
            .collect()
    }
}

fn sign(v: f64) -> i8 {
    if v < 0.0 {
        -1
    } else if v > 0.0 {
        1
    } else {
        0
    }
}

/// Cut one triangle with counterclockwise `corners`. `snap_tol` is the absolute
/// level-set tolerance below which a vertex counts as lying on the interface.
pub fn cut_triangle(
    corners: &[Point; 3],
    ls: &LevelSet,
    snap_tol: f64,
) -> std::result::Result<TriangleCut, String> {
    let mut phi = corners.map(|p| ls.eval(p));
    for v in phi.iter_mut() {
        if v.abs() < snap_tol {
            *v = 0.0;
        }
    }
    let s = phi.map(sign);

    // Boundary walk: each vertex followed by the interface crossings on its outgoing edge.
    let mut walk: Vec<(Point, i8)> = Vec::with_capacity(5);
    for i in 0..3 {
        let j = (i + 1) % 3;
        walk.push((corners[i], s[i]));
        let (a, b) = (corners[i], corners[j]);
        let len = dist(a, b);
        let roots = match ls {
            LevelSet::Affine { .. } => {
                if s[i] * s[j] < 0 {
                    vec![phi[i] / (phi[i] - phi[j])]
                } else {
                    vec![]
                }
            }
            LevelSet::Circle { .. } => ls
                .edge_roots(a, b, snap_tol / len)
                .map_err(|_| format!("interface is tangent to edge {i}"))?,
        };
        if matches!(ls, LevelSet::Circle { .. }) && roots.len() % 2 == 1 && s[i] * s[j] >= 0 {
            return Err(format!(
                "edge {i} crossing count disagrees with vertex signs"
            ));
        }
        for t in roots {
            walk.push((lerp(a, b, t), 0));
        }
    }

    let has_neg = s.contains(&-1);
    let has_pos = s.contains(&1);
    let crossings = walk.iter().filter(|(_, sg)| *sg == 0).count();
    let zero_vertices = s.iter().filter(|&&v| v == 0).count();

    if !has_neg && !has_pos {
        return Err("all vertices lie on the interface".into());
    }
    if !(has_neg && has_pos) {
        if crossings != zero_vertices {
            return Err(format!(
                "interface enters the element through an edge ({crossings} boundary hits)"
            ));
        }
        return Ok(TriangleCut::Inside(if has_neg { 0 } else { 1 }));
    }
    if crossings != 2 {
        return Err(format!(
            "interface meets the element boundary {crossings} times instead of twice"
        ));
    }

    let fan = |poly: Vec<Point>| -> Vec<[Point; 3]> {
        (1..poly.len() - 1)
            .map(|k| [poly[0], poly[k], poly[k + 1]])
            .collect()
    };
    let side1: Vec<Point> = walk
        .iter()
        .filter(|(_, sg)| *sg <= 0)
        .map(|(p, _)| *p)
        .collect();
    let side2: Vec<Point> = walk
        .iter()
        .filter(|(_, sg)| *sg >= 0)
        .map(|(p, _)| *p)
        .collect();
    let hits: Vec<Point> = walk
        .iter()
        .filter(|(_, sg)| *sg == 0)
        .map(|(p, _)| *p)
        .collect();
    let chord = [hits[0], hits[1]];

    let mut normal = unit_normal(chord[0], chord[1]);
    if let LevelSet::Affine { normal: n, .. } = ls {
        normal = *n;
    } else if dot(normal, ls.normal(midpoint(chord[0], chord[1]))) < 0.0 {
        normal = [-normal[0], -normal[1]];
    }

    Ok(TriangleCut::Cut(CutGeometry {
        sub_triangles: [fan(side1), fan(side2)],
        chord,
        normal,
    }))
}

/// Classify every element of `mesh` against `ls`, decompose cut elements and
/// collect the extended domains, interface pieces and ghost-penalty facets.
pub fn classify_and_cut(mesh: &Mesh, ls: &LevelSet) -> Result<CutDecomposition> {
    let snap_tol = SNAP_FACTOR * mesh.h;
    let nt = mesh.num_triangles();
    let mut classes = Vec::with_capacity(nt);
    let mut cut_elements = Vec::new();
    let mut cut_index = vec![None; nt];

    for t in 0..nt {
        match cut_triangle(&mesh.corners(t), ls, snap_tol) {
            Ok(TriangleCut::Inside(0)) => classes.push(ElementClass::Inside1),
            Ok(TriangleCut::Inside(_)) => classes.push(ElementClass::Inside2),
            Ok(TriangleCut::Cut(geometry)) => {
                classes.push(ElementClass::Cut);
                cut_index[t] = Some(cut_elements.len());
                cut_elements.push(CutElement {
                    element: t,
                    geometry,
                });
            }
            Err(reason) => return Err(Error::Geometry { element: t, reason }),
        }
    }

    let active = [
        classes
            .iter()
            .map(|c| *c != ElementClass::Inside2)
            .collect::<Vec<_>>(),
        classes
            .iter()
            .map(|c| *c != ElementClass::Inside1)
            .collect::<Vec<_>>(),
    ];

    let mut interface: Vec<InterfacePiece> = cut_elements
        .iter()
        .map(|c| InterfacePiece {
            endpoints: c.geometry.chord,
            elements: [c.element, c.element],
            normal: c.geometry.normal,
        })
        .collect();

    let mut ghost_facets = [Vec::new(), Vec::new()];
    for (f, facet) in mesh.facets.iter().enumerate() {
        let (Some(a), Some(b)) = (facet.triangles[0], facet.triangles[1]) else {
            continue;
        };
        // Interface running along a mesh facet.
        let pair = (classes[a], classes[b]);
        let edge_owner = match pair {
            (ElementClass::Inside1, ElementClass::Inside2) => Some((a, b)),
            (ElementClass::Inside2, ElementClass::Inside1) => Some((b, a)),
            _ => None,
        };
        if let Some((t1, t2)) = edge_owner {
            interface.push(InterfacePiece {
                endpoints: mesh.facet_points(f),
                elements: [t1, t2],
                normal: mesh.outward_normal(f, t1),
            });
        }
        if cut_index[a].is_some() || cut_index[b].is_some() {
            for side in 0..2 {
                if active[side][a] && active[side][b] {
                    ghost_facets[side].push(f);
                }
            }
        }
    }

    Ok(CutDecomposition {
        classes,
        cut_elements,
        cut_index,
        active,
        ghost_facets,
        interface,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{triangle_area, DiagonalPattern, Rect};
    use approx::assert_relative_eq;

    fn areas(g: &CutGeometry) -> [f64; 2] {
        [0, 1].map(|s| g.sub_triangles[s].iter().map(triangle_area).sum())
    }

    #[test]
    fn reference_triangle_vertical_cut() {
        let tri = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let ls = LevelSet::vertical_line(0.25);
        let TriangleCut::Cut(g) = cut_triangle(&tri, &ls, 1e-12).unwrap() else {
            panic!("expected a cut")
        };
        let [a1, a2] = areas(&g);
        assert_relative_eq!(a1, 0.21875, epsilon = 1e-15);
        assert_relative_eq!(a2, 0.28125, epsilon = 1e-15);
        assert_relative_eq!(dist(g.chord[0], g.chord[1]), 0.75, epsilon = 1e-15);
        let mut ends = g.chord;
        ends.sort_by(|p, q| p[1].total_cmp(&q[1]));
        assert_eq!(ends, [[0.25, 0.0], [0.25, 0.75]]);
        assert_eq!(g.normal, [1.0, 0.0]);
        for sub in g.sub_triangles.iter().flatten() {
            assert!(crate::mesh::signed_area(sub) > 0.0);
        }
    }

    #[test]
    fn interface_outside_domain() {
        let mesh = Mesh::structured(4, 4, Rect::unit_square(), DiagonalPattern::Right).unwrap();
        let cd = classify_and_cut(&mesh, &LevelSet::vertical_line(2.0)).unwrap();
        assert!(cd.classes.iter().all(|c| *c == ElementClass::Inside1));
        assert!(cd.cut_elements.is_empty());
        assert!(cd.interface.is_empty());
        assert!(cd.ghost_facets.iter().all(Vec::is_empty));
    }

    #[test]
    fn middle_column_cut_3x3() {
        let mesh = Mesh::structured(3, 3, Rect::unit_square(), DiagonalPattern::Right).unwrap();
        let cd = classify_and_cut(&mesh, &LevelSet::vertical_line(0.5)).unwrap();
        assert_eq!(cd.cut_elements.len(), 6);
        for c in &cd.cut_elements {
            let cx = mesh.centroid(c.element)[0];
            assert!(cx > 1.0 / 3.0 && cx < 2.0 / 3.0);
        }
        // G_h = Ω1* ∩ Ω2*
        for t in 0..mesh.num_triangles() {
            assert_eq!(cd.is_cut(t), cd.active[0][t] && cd.active[1][t]);
        }
        for side in 0..2 {
            for &f in &cd.ghost_facets[side] {
                let [a, b] = mesh.facets[f].triangles;
                let (a, b) = (a.unwrap(), b.unwrap());
                assert!(cd.is_cut(a) || cd.is_cut(b));
            }
        }
    }

    #[test]
    fn snapped_interface_on_mesh_line() {
        let mesh = Mesh::structured(4, 4, Rect::unit_square(), DiagonalPattern::Right).unwrap();
        let ls = LevelSet::vertical_line(0.5 + 1e-14);
        let cd = classify_and_cut(&mesh, &ls).unwrap();
        assert!(cd.cut_elements.is_empty());
        let total: f64 = cd
            .interface
            .iter()
            .map(|p| dist(p.endpoints[0], p.endpoints[1]))
            .sum();
        assert_relative_eq!(total, 1.0, epsilon = 1e-14);
        for p in &cd.interface {
            assert!(cd.classes[p.elements[0]] == ElementClass::Inside1);
            assert!(cd.classes[p.elements[1]] == ElementClass::Inside2);
            assert_relative_eq!(p.normal[0], 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn circle_interface() {
        let mesh =
            Mesh::structured(16, 16, Rect::unit_square(), DiagonalPattern::Alternating).unwrap();
        let ls = LevelSet::circle([0.5, 0.5], 0.3).unwrap();
        let cd = classify_and_cut(&mesh, &ls).unwrap();
        let snap = SNAP_FACTOR * mesh.h;
        let mut enclosed = 0.0;
        for t in 0..mesh.num_triangles() {
            if let Some(c) = cd.cut(t) {
                let [a1, a2] = areas(&c.geometry);
                assert_relative_eq!(a1 + a2, mesh.area(t), max_relative = 1e-12);
                for p in c.geometry.chord {
                    assert!(ls.eval(p).abs() <= snap.max(1e-15));
                }
                enclosed += a1;
            } else if cd.classes[t] == ElementClass::Inside1 {
                enclosed += mesh.area(t);
            }
        }
        // Chord polygon area is within O(h^2) of the disc area.
        let disc = std::f64::consts::PI * 0.09;
        assert!((enclosed - disc).abs() < 0.01 * disc);
    }

    #[test]
    fn tangent_circle_is_reported() {
        let mesh = Mesh::structured(2, 2, Rect::unit_square(), DiagonalPattern::Right).unwrap();
        // Touches the bottom edge y = 0 at x = 0.25 from above.
        let ls = LevelSet::circle([0.25, 0.2], 0.2).unwrap();
        match classify_and_cut(&mesh, &ls) {
            Err(Error::Geometry { .. }) => {}
            other => panic!("expected geometry violation, got {other:?}"),
        }
    }

    #[test]
    fn circle_crossing_one_edge_twice_is_reported() {
        let tri = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let ls = LevelSet::circle([0.5, -0.1], 0.2).unwrap();
        assert!(cut_triangle(&tri, &ls, 1e-12).is_err());
    }
}
