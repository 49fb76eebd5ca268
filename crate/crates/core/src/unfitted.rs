//! One background mesh cut by a level set, with a ghost penalty on the facets of
//! cut elements.

use std::sync::Arc;

use crate::assembly::{assemble_volume, DiscreteSolution, Layout, ProblemData, QuadDegrees};
use crate::cut::{classify_and_cut, CutDecomposition};
use crate::error::{Error, Result};
use crate::interface::{assemble_coupling, interface_source, WeightSet};
use crate::levelset::LevelSet;
use crate::linalg::{solve, SparseSystem};
use crate::mesh::{dot, lerp, Mesh, Rect};
use crate::quadrature::segment_rule;
use crate::space::{apply_dirichlet, FeSpace};

pub const DEFAULT_GHOST_PENALTY: f64 = 0.001;

/// Adds `gamma_g sum_F sum_{l=1..k} <mu h^{2l-1} [D^l_n u], [D^l_n v]>_F` for one space.
pub fn assemble_ghost_penalty(
    system: &mut SparseSystem,
    space: &FeSpace,
    offset: usize,
    facets: &[usize],
    mu: f64,
    gamma_g: f64,
    h: f64,
) -> Result<()> {
    let mesh = space.mesh();
    let k = space.order();
    let rule = segment_rule(2 * k.max(1))?;
    for &f in facets {
        let facet = &mesh.facets[f];
        let (a, b) = match facet.triangles {
            [Some(a), Some(b)] if space.is_active(a) && space.is_active(b) => (a, b),
            _ => return Err(Error::FacetNotInterior(f)),
        };
        let ends = mesh.facet_points(f);
        let len = mesh.facet_length(f);
        let n = mesh.outward_normal(f, a);
        let dofs = [space.element_dofs(a)?, space.element_dofs(b)?];
        let sign = [1.0, -1.0];
        for (t, w) in rule.points.iter().zip(&rule.weights) {
            let x = lerp(ends[0], ends[1], *t);
            let evals = [space.eval_at(a, x)?, space.eval_at(b, x)?];
            for l in 1..=k {
                let scale = gamma_g * mu * h.powi(2 * l as i32 - 1) * w * len;
                // Signed l-th normal derivative of every local shape function on each side.
                let deriv = |s: usize, i: usize| -> f64 {
                    let e = &evals[s];
                    let d = if l == 1 {
                        dot(e.grads[i], n)
                    } else {
                        let hm = e.hessians[i];
                        n[0] * (hm[0][0] * n[0] + hm[0][1] * n[1])
                            + n[1] * (hm[1][0] * n[0] + hm[1][1] * n[1])
                    };
                    sign[s] * d
                };
                for rs in 0..2 {
                    for (i, &ri) in dofs[rs].iter().enumerate() {
                        let di = deriv(rs, i);
                        if di == 0.0 {
                            continue;
                        }
                        for cs in 0..2 {
                            for (j, &cj) in dofs[cs].iter().enumerate() {
                                system.add(offset + ri, offset + cj, scale * di * deriv(cs, j));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct UnfittedProblem {
    pub mu: [f64; 2],
    pub level_set: LevelSet,
    pub decomposition: CutDecomposition,
    pub spaces: [FeSpace; 2],
    pub weights: WeightSet,
    pub gamma_g: f64,
    pub data: ProblemData,
    pub quad: QuadDegrees,
    layout: Layout,
}

impl UnfittedProblem {
    pub fn new(
        mu: [f64; 2],
        mesh: Arc<Mesh>,
        level_set: LevelSet,
        domain: Rect,
        order: usize,
        gamma_g: f64,
        data: ProblemData,
    ) -> Result<Self> {
        if !(gamma_g > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "ghost penalty must be positive, got {gamma_g}"
            )));
        }
        let weights = WeightSet::unfitted(mu[0], mu[1], mesh.h)?;
        let decomposition = classify_and_cut(&mesh, &level_set)?;
        let spaces = [
            FeSpace::new(
                mesh.clone(),
                order,
                Some(decomposition.active[0].clone()),
                domain,
            )?,
            FeSpace::new(
                mesh.clone(),
                order,
                Some(decomposition.active[1].clone()),
                domain,
            )?,
        ];
        let layout = Layout {
            regions: [
                decomposition.regions(&mesh, 0),
                decomposition.regions(&mesh, 1),
            ],
            pieces: decomposition.interface.clone(),
        };
        Ok(Self {
            mu,
            level_set,
            decomposition,
            spaces,
            weights,
            gamma_g,
            data,
            quad: QuadDegrees::for_order(order),
            layout,
        })
    }

    /// Whether the labelling satisfies `mu1 <= mu2`.
    pub fn assumption_holds(&self) -> bool {
        self.mu[0] <= self.mu[1]
    }

    pub fn mesh(&self) -> &Mesh {
        self.spaces[0].mesh()
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

    pub fn assemble_ghost(&self) -> Result<SparseSystem> {
        let mut sys = SparseSystem::new(self.num_dofs());
        let offsets = self.offsets();
        let h = self.mesh().h;
        for s in 0..2 {
            assemble_ghost_penalty(
                &mut sys,
                &self.spaces[s],
                offsets[s],
                &self.decomposition.ghost_facets[s],
                self.mu[s],
                self.gamma_g,
                h,
            )?;
        }
        Ok(sys)
    }

    /// Full system before boundary conditions.
    pub fn assemble(&self) -> Result<SparseSystem> {
        if self.data.declares_flux_jump && self.data.flux_jump.is_none() {
            return Err(Error::MissingFluxJump);
        }
        let mut sys = self.assemble_volume()?;
        sys.extend(self.assemble_coupling()?);
        sys.extend(self.assemble_ghost()?);
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
