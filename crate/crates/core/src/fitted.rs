//! Two independently meshed subdomains coupled across a straight interface.

use std::sync::Arc;

use crate::assembly::{assemble_volume, DiscreteSolution, Layout, ProblemData, QuadDegrees};
use crate::error::{Error, Result};
use crate::interface::{assemble_coupling, interface_source, WeightSet};
use crate::linalg::{solve, SparseSystem};
use crate::mesh::{Mesh, Point, Rect};
use crate::space::{apply_dirichlet, FeSpace};
use crate::trace::{merge_traces, MergedTrace};

#[derive(Debug, Clone)]
pub struct FittedProblem {
    pub mu: [f64; 2],
    pub spaces: [FeSpace; 2],
    pub trace: MergedTrace,
    pub weights: WeightSet,
    pub data: ProblemData,
    pub quad: QuadDegrees,
    layout: Layout,
}

impl FittedProblem {
    /// `mesh1` and `mesh2` must both have boundary edges tiling `gamma`; `domain`
    /// is the outer boundary where values are imposed strongly.
    pub fn new(
        mu: [f64; 2],
        meshes: [Arc<Mesh>; 2],
        gamma: [Point; 2],
        domain: Rect,
        order: usize,
        data: ProblemData,
    ) -> Result<Self> {
        let weights = WeightSet::fitted(mu[0], mu[1], meshes[0].h, meshes[1].h)?;
        let trace = merge_traces(&meshes[0], &meshes[1], gamma)?;
        let [m1, m2] = meshes;
        let spaces = [
            FeSpace::new(m1, order, None, domain)?,
            FeSpace::new(m2, order, None, domain)?,
        ];
        let layout = Layout {
            regions: [0, 1].map(|s| {
                let mesh = spaces[s].mesh();
                (0..mesh.num_triangles())
                    .map(|t| (t, mesh.corners(t)))
                    .collect()
            }),
            pieces: trace.pieces(spaces[0].mesh()),
        };
        Ok(Self {
            mu,
            spaces,
            trace,
            weights,
            data,
            quad: QuadDegrees::for_order(order),
            layout,
        })
    }

    /// Whether `mu2 h1 >= mu1 h2` holds for this configuration.
    pub fn assumption_holds(&self) -> bool {
        let h = [self.spaces[0].mesh().h, self.spaces[1].mesh().h];
        self.mu[1] * h[0] >= self.mu[0] * h[1]
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn offsets(&self) -> [usize; 2] {
        [0, self.spaces[0].dim()]
    }

    pub fn num_dofs(&self) -> usize {
        self.spaces[0].dim() + self.spaces[1].dim()
    }

    fn space_refs(&self) -> [&FeSpace; 2] {
        [&self.spaces[0], &self.spaces[1]]
    }

    /// Volume diffusion and source terms only.
    pub fn assemble_volume(&self) -> Result<SparseSystem> {
        let mut sys = SparseSystem::new(self.num_dofs());
        let offsets = self.offsets();
        for s in 0..2 {
            let f = self.data.source[s].clone();
            assemble_volume(
                &mut sys,
                &self.spaces[s],
                offsets[s],
                self.mu[s],
                &self.layout.regions[s],
                Some(&*f),
                self.quad.volume,
            )?;
        }
        Ok(sys)
    }

    /// The two Nitsche coupling terms over the merged trace.
    pub fn assemble_coupling(&self) -> Result<SparseSystem> {
        let mut sys = SparseSystem::new(self.num_dofs());
        assemble_coupling(
            &mut sys,
            self.space_refs(),
            self.offsets(),
            self.mu,
            &self.weights,
            &self.layout.pieces,
            self.quad.interface,
        )?;
        Ok(sys)
    }

    /// Full system before boundary conditions.
    pub fn assemble(&self) -> Result<SparseSystem> {
        if self.data.declares_flux_jump && self.data.flux_jump.is_none() {
            return Err(Error::MissingFluxJump);
        }
        let mut sys = self.assemble_volume()?;
        sys.extend(self.assemble_coupling()?);
        if let Some(g) = &self.data.flux_jump {
            interface_source(
                &mut sys,
                self.space_refs(),
                self.offsets(),
                &self.weights,
                &self.layout.pieces,
                &**g,
                self.quad.interface,
            )?;
        }
        Ok(sys)
    }

    /// Assembled system with the outer boundary values imposed.
    pub fn assemble_constrained(&self) -> Result<SparseSystem> {
        let mut sys = self.assemble()?;
        let offsets = self.offsets();
        for s in 0..2 {
            let g = self.data.boundary[s].clone();
            apply_dirichlet(&mut sys, &self.spaces[s], offsets[s], |x| g(x));
        }
        Ok(sys)
    }

    pub fn solve(&self, tol: f64) -> Result<DiscreteSolution> {
        let sys = self.assemble_constrained()?;
        let sol = solve(&sys.compress()?, &sys.rhs, tol)?;
        let n1 = self.spaces[0].dim();
        Ok(DiscreteSolution {
            coeffs: [sol.x[..n1].to_vec(), sol.x[n1..].to_vec()],
            relative_residual: sol.relative_residual,
        })
    }
}
