//! Continuous P1/P2 Lagrange spaces over a set of active mesh elements.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::SparseSystem;
use crate::mesh::{midpoint, Mesh, Point, Rect};

pub const MAX_LOCAL_DOFS: usize = 6;

/// Shape function values and physical derivatives at one point.
#[derive(Debug, Clone, Copy)]
pub struct ShapeEval {
    pub n: usize,
    pub values: [f64; MAX_LOCAL_DOFS],
    pub grads: [[f64; 2]; MAX_LOCAL_DOFS],
    pub hessians: [[[f64; 2]; 2]; MAX_LOCAL_DOFS],
}

impl ShapeEval {
    pub fn values(&self) -> &[f64] {
        &self.values[..self.n]
    }

    pub fn grads(&self) -> &[[f64; 2]] {
        &self.grads[..self.n]
    }
}

/// Affine map `x = origin + J xi` of one triangle, with the inverse Jacobian.
#[derive(Debug, Clone, Copy)]
struct ElementMap {
    origin: Point,
    inv: [[f64; 2]; 2],
    /// Physical gradients of the barycentric coordinates.
    dlambda: [[f64; 2]; 3],
}

impl ElementMap {
    fn new(c: &[Point; 3]) -> Self {
        let j = [
            [c[1][0] - c[0][0], c[2][0] - c[0][0]],
            [c[1][1] - c[0][1], c[2][1] - c[0][1]],
        ];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        let inv = [
            [j[1][1] / det, -j[0][1] / det],
            [-j[1][0] / det, j[0][0] / det],
        ];
        // grad(xi) and grad(eta) are the rows of J^{-1}.
        let d1 = inv[0];
        let d2 = inv[1];
        let d0 = [-d1[0] - d2[0], -d1[1] - d2[1]];
        Self {
            origin: c[0],
            inv,
            dlambda: [d0, d1, d2],
        }
    }

    fn to_reference(&self, x: Point) -> Point {
        let d = [x[0] - self.origin[0], x[1] - self.origin[1]];
        [
            self.inv[0][0] * d[0] + self.inv[0][1] * d[1],
            self.inv[1][0] * d[0] + self.inv[1][1] * d[1],
        ]
    }
}

#[derive(Debug, Clone)]
pub struct FeSpace {
    mesh: Arc<Mesh>,
    order: usize,
    active: Vec<bool>,
    maps: Vec<ElementMap>,
    /// Local-to-global dof map, `order == 1`: 3 per element, `order == 2`: 6.
    element_dofs: Vec<[usize; MAX_LOCAL_DOFS]>,
    dof_coords: Vec<Point>,
    /// Dofs on the outer boundary of the computational domain.
    dirichlet_dofs: Vec<usize>,
}

impl FeSpace {
    /// Space of order `order` over the elements flagged in `active` (all if `None`).
    /// Dofs located on the boundary of `domain` are marked as Dirichlet dofs.
    pub fn new(
        mesh: Arc<Mesh>,
        order: usize,
        active: Option<Vec<bool>>,
        domain: Rect,
    ) -> Result<Self> {
        if !(1..=2).contains(&order) {
            return Err(Error::InvalidArgument(format!(
                "polynomial order {order} not in {{1, 2}}"
            )));
        }
        let nt = mesh.num_triangles();
        let active = active.unwrap_or_else(|| vec![true; nt]);
        if active.len() != nt {
            return Err(Error::InvalidArgument(
                "active flag count differs from element count".into(),
            ));
        }

        const NONE: usize = usize::MAX;
        let mut vertex_dof = vec![NONE; mesh.num_vertices()];
        let mut facet_dof = vec![NONE; mesh.num_facets()];
        for t in (0..nt).filter(|&t| active[t]) {
            for &v in &mesh.triangles[t] {
                vertex_dof[v] = 0;
            }
            if order == 2 {
                for &f in &mesh.triangle_facets[t] {
                    facet_dof[f] = 0;
                }
            }
        }
        let mut dof_coords = Vec::new();
        for (v, d) in vertex_dof.iter_mut().enumerate() {
            if *d != NONE {
                *d = dof_coords.len();
                dof_coords.push(mesh.vertices[v]);
            }
        }
        for (f, d) in facet_dof.iter_mut().enumerate() {
            if *d != NONE {
                *d = dof_coords.len();
                let [a, b] = mesh.facet_points(f);
                dof_coords.push(midpoint(a, b));
            }
        }

        let mut element_dofs = vec![[NONE; MAX_LOCAL_DOFS]; nt];
        for t in (0..nt).filter(|&t| active[t]) {
            let tri = mesh.triangles[t];
            for i in 0..3 {
                element_dofs[t][i] = vertex_dof[tri[i]];
                if order == 2 {
                    element_dofs[t][3 + i] = facet_dof[mesh.triangle_facets[t][i]];
                }
            }
        }

        let tol = 1e-12 * domain.width().max(domain.height());
        let dirichlet_dofs = (0..dof_coords.len())
            .filter(|&d| domain.on_boundary(dof_coords[d], tol))
            .collect();
        let maps = (0..nt).map(|t| ElementMap::new(&mesh.corners(t))).collect();

        Ok(Self {
            mesh,
            order,
            active,
            maps,
            element_dofs,
            dof_coords,
            dirichlet_dofs,
        })
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn mesh_arc(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dof_coords.len()
    }

    pub fn local_dofs(&self) -> usize {
        if self.order == 1 {
            3
        } else {
            6
        }
    }

    pub fn is_active(&self, t: usize) -> bool {
        self.active[t]
    }

    pub fn active_elements(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.active.len()).filter(|&t| self.active[t])
    }

    pub fn dof_coords(&self) -> &[Point] {
        &self.dof_coords
    }

    pub fn dirichlet_dofs(&self) -> &[usize] {
        &self.dirichlet_dofs
    }

    pub fn element_dofs(&self, t: usize) -> Result<&[usize]> {
        if !self.active.get(t).copied().unwrap_or(false) {
            return Err(Error::InactiveElement(t));
        }
        Ok(&self.element_dofs[t][..self.local_dofs()])
    }

    /// Shape functions of element `t` at the reference point `xi`.
    pub fn eval_basis(&self, t: usize, xi: Point) -> Result<ShapeEval> {
        if !self.active.get(t).copied().unwrap_or(false) {
            return Err(Error::InactiveElement(t));
        }
        let lambda = [1.0 - xi[0] - xi[1], xi[0], xi[1]];
        let dl = &self.maps[t].dlambda;
        let mut e = ShapeEval {
            n: self.local_dofs(),
            values: [0.0; MAX_LOCAL_DOFS],
            grads: [[0.0; 2]; MAX_LOCAL_DOFS],
            hessians: [[[0.0; 2]; 2]; MAX_LOCAL_DOFS],
        };
        if self.order == 1 {
            for i in 0..3 {
                e.values[i] = lambda[i];
                e.grads[i] = dl[i];
            }
            return Ok(e);
        }
        let outer =
            |a: [f64; 2], b: [f64; 2]| [[a[0] * b[0], a[0] * b[1]], [a[1] * b[0], a[1] * b[1]]];
        for i in 0..3 {
            let l = lambda[i];
            e.values[i] = l * (2.0 * l - 1.0);
            e.grads[i] = [(4.0 * l - 1.0) * dl[i][0], (4.0 * l - 1.0) * dl[i][1]];
            let o = outer(dl[i], dl[i]);
            e.hessians[i] = [
                [4.0 * o[0][0], 4.0 * o[0][1]],
                [4.0 * o[1][0], 4.0 * o[1][1]],
            ];

            let j = (i + 1) % 3;
            let (li, lj) = (lambda[i], lambda[j]);
            e.values[3 + i] = 4.0 * li * lj;
            e.grads[3 + i] = [
                4.0 * (lj * dl[i][0] + li * dl[j][0]),
                4.0 * (lj * dl[i][1] + li * dl[j][1]),
            ];
            let (a, b) = (outer(dl[i], dl[j]), outer(dl[j], dl[i]));
            e.hessians[3 + i] = [
                [4.0 * (a[0][0] + b[0][0]), 4.0 * (a[0][1] + b[0][1])],
                [4.0 * (a[1][0] + b[1][0]), 4.0 * (a[1][1] + b[1][1])],
            ];
        }
        Ok(e)
    }

    /// Shape functions of element `t` at the physical point `x`.
    pub fn eval_at(&self, t: usize, x: Point) -> Result<ShapeEval> {
        let xi = self.maps[t].to_reference(x);
        self.eval_basis(t, xi)
    }

    /// Value and gradient of the field with coefficients `coeffs` at `x` in element `t`.
    pub fn eval_field(&self, coeffs: &[f64], t: usize, x: Point) -> Result<(f64, Point)> {
        let e = self.eval_at(t, x)?;
        let dofs = self.element_dofs(t)?;
        let mut value = 0.0;
        let mut grad = [0.0; 2];
        for (a, &d) in dofs.iter().enumerate() {
            value += coeffs[d] * e.values[a];
            grad[0] += coeffs[d] * e.grads[a][0];
            grad[1] += coeffs[d] * e.grads[a][1];
        }
        Ok((value, grad))
    }

    /// Nodal interpolant of `f`.
    pub fn interpolate(&self, f: impl Fn(Point) -> f64) -> Vec<f64> {
        self.dof_coords.iter().map(|&x| f(x)).collect()
    }
}

/// Replaces the rows of the Dirichlet dofs of `space` (block starting at `offset`)
/// by identity rows with right-hand side `g(x)`.
pub fn apply_dirichlet(
    system: &mut SparseSystem,
    space: &FeSpace,
    offset: usize,
    g: impl Fn(Point) -> f64,
) {
    let rows: Vec<(usize, f64)> = space
        .dirichlet_dofs()
        .iter()
        .map(|&d| (offset + d, g(space.dof_coords[d])))
        .collect();
    system.constrain_rows(&rows);
}
