//! Common refinement of two nonmatching interface traces.

use crate::error::{Error, Result};
use crate::interface::InterfacePiece;
use crate::mesh::{dist, dot, lerp, sub, Mesh, Point};

/// Breakpoints closer than this (in units of `|Γ|`) are merged.
pub const MERGE_TOL: f64 = 1e-12;

/// A boundary edge of one mesh lying on the interface, parametrized along it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEdge {
    pub facet: usize,
    pub element: usize,
    pub t: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceSegment {
    pub t: [f64; 2],
    pub endpoints: [Point; 2],
    /// Index into `MergedTrace::traces[0]` and `traces[1]`.
    pub edges: [usize; 2],
}

#[derive(Debug, Clone)]
pub struct MergedTrace {
    pub gamma: [Point; 2],
    pub traces: [Vec<TraceEdge>; 2],
    pub segments: Vec<TraceSegment>,
}

impl MergedTrace {
    pub fn length(&self) -> f64 {
        dist(self.gamma[0], self.gamma[1])
    }

    /// Interface pieces with the owning element of each mesh and the normal
    /// pointing out of mesh 1.
    pub fn pieces(&self, mesh1: &Mesh) -> Vec<InterfacePiece> {
        self.segments
            .iter()
            .map(|s| {
                let e1 = self.traces[0][s.edges[0]];
                let e2 = self.traces[1][s.edges[1]];
                InterfacePiece {
                    endpoints: s.endpoints,
                    elements: [e1.element, e2.element],
                    normal: mesh1.outward_normal(e1.facet, e1.element),
                }
            })
            .collect()
    }
}

/// Merge two sorted breakpoint lists on `[0, 1]` into segments `(t0, t1, i1, i2)`
/// where `i1`, `i2` index the intervals of each list containing the segment.
pub fn merge_breakpoints(
    b1: &[f64],
    b2: &[f64],
    tol: f64,
) -> Result<Vec<(f64, f64, usize, usize)>> {
    for b in [b1, b2] {
        if b.len() < 2 || b.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::TraceMismatch(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        if (b[0] - b1[0]).abs() > tol || (b[b.len() - 1] - b1[b1.len() - 1]).abs() > tol {
            return Err(Error::TraceMismatch(
                "traces do not span the same interval".into(),
            ));
        }
    }
    let mut all: Vec<f64> = b1.iter().chain(b2).copied().collect();
    all.sort_by(f64::total_cmp);
    let mut merged: Vec<f64> = Vec::with_capacity(all.len());
    for t in all {
        match merged.last() {
            Some(&last) if t - last <= tol => {}
            _ => merged.push(t),
        }
    }
    let owner = |b: &[f64], m: f64| -> usize {
        b.partition_point(|&x| x <= m)
            .saturating_sub(1)
            .min(b.len() - 2)
    };
    Ok(merged
        .windows(2)
        .map(|w| {
            let m = 0.5 * (w[0] + w[1]);
            (w[0], w[1], owner(b1, m), owner(b2, m))
        })
        .collect())
}

/// Boundary edges of `mesh` lying on the segment `gamma`, sorted by parameter.
fn collect_trace(mesh: &Mesh, gamma: [Point; 2], tol: f64) -> Result<Vec<TraceEdge>> {
    let d = sub(gamma[1], gamma[0]);
    let len2 = dot(d, d);
    let len = len2.sqrt();
    let param = |p: Point| dot(sub(p, gamma[0]), d) / len2;
    let off_line =
        |p: Point| (d[0] * (p[1] - gamma[0][1]) - d[1] * (p[0] - gamma[0][0])).abs() / len;

    let mut edges = Vec::new();
    for &f in &mesh.boundary_facets {
        let [a, b] = mesh.facet_points(f);
        if off_line(a) > tol * len || off_line(b) > tol * len {
            continue;
        }
        let (ta, tb) = (param(a), param(b));
        if ta.min(tb) < -tol || ta.max(tb) > 1.0 + tol {
            continue;
        }
        edges.push(TraceEdge {
            facet: f,
            element: mesh.facets[f].triangles[0].expect("boundary facet has one triangle"),
            t: [ta.min(tb), ta.max(tb)],
        });
    }
    edges.sort_by(|p, q| p.t[0].total_cmp(&q.t[0]));

    let tiles = !edges.is_empty()
        && edges[0].t[0].abs() <= tol
        && (edges[edges.len() - 1].t[1] - 1.0).abs() <= tol
        && edges
            .windows(2)
            .all(|w| (w[1].t[0] - w[0].t[1]).abs() <= tol);
    if !tiles {
        return Err(Error::TraceMismatch(format!(
            "boundary edges do not tile the interface ({} edges found)",
            edges.len()
        )));
    }
    Ok(edges)
}

/// Common refinement of the traces of `mesh1` and `mesh2` on the straight interface `gamma`.
pub fn merge_traces(mesh1: &Mesh, mesh2: &Mesh, gamma: [Point; 2]) -> Result<MergedTrace> {
    let traces = [
        collect_trace(mesh1, gamma, MERGE_TOL)?,
        collect_trace(mesh2, gamma, MERGE_TOL)?,
    ];
    let breakpoints = |edges: &[TraceEdge]| -> Vec<f64> {
        std::iter::once(edges[0].t[0])
            .chain(edges.iter().map(|e| e.t[1]))
            .collect()
    };
    let merged = merge_breakpoints(
        &breakpoints(&traces[0]),
        &breakpoints(&traces[1]),
        MERGE_TOL,
    )?;
    let segments = merged
        .into_iter()
        .map(|(t0, t1, i1, i2)| TraceSegment {
            t: [t0, t1],
            endpoints: [lerp(gamma[0], gamma[1], t0), lerp(gamma[0], gamma[1], t1)],
            edges: [i1, i2],
        })
        .collect();
    Ok(MergedTrace {
        gamma,
        traces,
        segments,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{DiagonalPattern, Rect};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn thirds_and_halves() {
        let segs = merge_breakpoints(
            &[0.0, 0.5, 1.0],
            &[0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0],
            MERGE_TOL,
        )
        .unwrap();
        let bps: Vec<f64> = std::iter::once(0.0)
            .chain(segs.iter().map(|s| s.1))
            .collect();
        assert_eq!(bps, vec![0.0, 1.0 / 3.0, 0.5, 2.0 / 3.0, 1.0]);
        let owners: Vec<(usize, usize)> = segs.iter().map(|s| (s.2, s.3)).collect();
        assert_eq!(owners, vec![(0, 0), (0, 1), (1, 1), (1, 2)]);
    }

    #[test]
    fn conforming_traces() {
        let segs = merge_breakpoints(&[0.0, 0.5, 1.0], &[0.0, 0.5, 1.0], MERGE_TOL).unwrap();
        assert_eq!(segs, vec![(0.0, 0.5, 0, 0), (0.5, 1.0, 1, 1)]);
    }

    #[test]
    fn near_coincident_breakpoints_merge() {
        let segs =
            merge_breakpoints(&[0.0, 0.5, 1.0], &[0.0, 0.5 + 1e-13, 1.0], MERGE_TOL).unwrap();
        assert_eq!(segs.len(), 2);
    }

    #[test]
    fn meshes_on_split_square() {
        let m1 = Mesh::structured(
            2,
            5,
            Rect::new([0.0, 0.0], [0.5, 1.0]),
            DiagonalPattern::Right,
        )
        .unwrap();
        let m2 = Mesh::structured(
            2,
            3,
            Rect::new([0.5, 0.0], [1.0, 1.0]),
            DiagonalPattern::Right,
        )
        .unwrap();
        let mt = merge_traces(&m1, &m2, [[0.5, 0.0], [0.5, 1.0]]).unwrap();
        assert_eq!(mt.traces[0].len(), 5);
        assert_eq!(mt.traces[1].len(), 3);
        assert_eq!(mt.segments.len(), 7);
        let total: f64 = mt
            .segments
            .iter()
            .map(|s| dist(s.endpoints[0], s.endpoints[1]))
            .sum();
        assert_relative_eq!(total, 1.0, epsilon = 1e-13);
        for p in mt.pieces(&m1) {
            assert_eq!(p.normal, [1.0, 0.0]);
        }
    }

    #[test]
    fn untiled_interface_is_rejected() {
        let m1 = Mesh::structured(
            2,
            2,
            Rect::new([0.0, 0.0], [0.5, 0.5]),
            DiagonalPattern::Right,
        )
        .unwrap();
        let m2 = Mesh::structured(
            2,
            2,
            Rect::new([0.5, 0.0], [1.0, 1.0]),
            DiagonalPattern::Right,
        )
        .unwrap();
        assert!(matches!(
            merge_traces(&m1, &m2, [[0.5, 0.0], [0.5, 1.0]]),
            Err(Error::TraceMismatch(_))
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn merged_lengths_sum_to_interface(n1 in 1usize..=50, n2 in 1usize..=50) {
            let m1 = Mesh::structured(1, n1, Rect::new([0.0, 0.0], [0.5, 1.0]), DiagonalPattern::Right).unwrap();
            let m2 = Mesh::structured(1, n2, Rect::new([0.5, 0.0], [1.0, 1.0]), DiagonalPattern::Alternating).unwrap();
            let mt = merge_traces(&m1, &m2, [[0.5, 0.0], [0.5, 1.0]]).unwrap();
            let total: f64 = mt.segments.iter().map(|s| dist(s.endpoints[0], s.endpoints[1])).sum();
            prop_assert!((total - 1.0).abs() <= 1e-13);
            for s in &mt.segments {
                prop_assert!(s.t[1] > s.t[0]);
                for side in 0..2 {
                    let e = mt.traces[side][s.edges[side]];
                    prop_assert!(e.t[0] <= s.t[0] + MERGE_TOL && s.t[1] <= e.t[1] + MERGE_TOL);
                }
            }
        }
    }
}
