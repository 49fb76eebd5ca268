//! Manufactured-solution convergence studies for both regimes.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fitted::FittedProblem;
use crate::levelset::LevelSet;
use crate::linalg::DEFAULT_TOL;
use crate::manufactured::{grad_u, u, ManufacturedCase};
use crate::mesh::{DiagonalPattern, Mesh, Point, Rect};
use crate::norms::{error_norms, ErrorNorms};
use crate::report::{ConvergenceReport, Regime, ReportRow};
use crate::unfitted::{UnfittedProblem, DEFAULT_GHOST_PENALTY};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "NITSCHE_DD_THREADS";

/// Subdivisions of the unit square's height on the coarsest fitted level.
pub const FITTED_BASE_N: usize = 8;
/// Background subdivisions on the coarsest unfitted level is `UNFITTED_BASE_N + 1`.
pub const UNFITTED_BASE_N: usize = 8;

/// Positive rational mesh-size ratio `h1/h2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ratio {
    pub num: u32,
    pub den: u32,
}

impl Ratio {
    pub fn new(num: u32, den: u32) -> Result<Self> {
        if num == 0 || den == 0 {
            return Err(Error::InvalidArgument(format!(
                "ratio {num}/{den} must be positive"
            )));
        }
        Ok(Self { num, den })
    }

    pub fn value(&self) -> f64 {
        f64::from(self.num) / f64::from(self.den)
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl FromStr for Ratio {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("cannot parse ratio '{s}'"));
        let (num, den) = match s.trim().split_once('/') {
            Some((a, b)) => (
                a.trim().parse().map_err(|_| bad())?,
                b.trim().parse().map_err(|_| bad())?,
            ),
            None => (s.trim().parse().map_err(|_| bad())?, 1),
        };
        Ratio::new(num, den)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub regime: Regime,
    pub k: usize,
    pub mu1: f64,
    pub mu2: Vec<f64>,
    /// Fitted only.
    pub ratios: Vec<Ratio>,
    pub levels: usize,
    /// Unfitted only.
    pub gamma_g: f64,
    /// Unfitted only: the interface is `x = 0.5 + offset`.
    pub offset: f64,
    pub flux_jump: bool,
    /// Overrides `NITSCHE_DD_THREADS` when set.
    pub threads: Option<usize>,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            regime: Regime::Fitted,
            k: 1,
            mu1: 1.0,
            mu2: vec![1.0, 10.0, 100.0, 1000.0],
            ratios: vec![Ratio { num: 1, den: 1 }],
            levels: 5,
            gamma_g: DEFAULT_GHOST_PENALTY,
            offset: 0.0,
            flux_jump: true,
            threads: None,
        }
    }
}

impl StudyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.levels < 2 {
            return Err(Error::InvalidArgument(
                "a study needs at least two levels".into(),
            ));
        }
        if !(1..=2).contains(&self.k) {
            return Err(Error::InvalidArgument(format!(
                "k = {} not in {{1, 2}}",
                self.k
            )));
        }
        if self.mu2.is_empty() || !(self.mu1 > 0.0) || self.mu2.iter().any(|m| !(*m > 0.0)) {
            return Err(Error::InvalidArgument(
                "diffusivities must be positive and mu2 nonempty".into(),
            ));
        }
        if self.regime == Regime::Fitted && self.ratios.is_empty() {
            return Err(Error::InvalidArgument(
                "fitted study needs at least one ratio".into(),
            ));
        }
        if self.regime == Regime::Unfitted && (!(self.gamma_g > 0.0) || self.offset.abs() >= 0.25) {
            return Err(Error::InvalidArgument(
                "unfitted study needs gamma_g > 0 and |offset| < 0.25".into(),
            ));
        }
        Ok(())
    }
}

/// Grid sizes `[nx, ny]` of mesh 1 and mesh 2 on refinement `level`. Level 0 uses
/// `ny1 = 8` and `ny2 = ceil(8 * ratio)`, with `nx = ceil(ny / 2)` on the half-width
/// subdomains; every level doubles all counts, so the realized `h1/h2` is the same
/// on every level.
pub fn fitted_subdivisions(level: usize, ratio: Ratio) -> [[usize; 2]; 2] {
    let ny2 = ((FITTED_BASE_N as f64 * ratio.value()).ceil() as usize).max(1);
    [FITTED_BASE_N, ny2].map(|ny| [ny.div_ceil(2) << level, ny << level])
}

/// Grid sizes for `n` subdivisions along the interface on a half-width subdomain.
pub fn half_width_grid(n: usize) -> [usize; 2] {
    [n.div_ceil(2).max(1), n.max(1)]
}

/// Meshes of `[0, 0.5] x [0, 1]` and `[0.5, 1] x [0, 1]` with grid sizes `[nx, ny]`.
pub fn fitted_meshes(grids: [[usize; 2]; 2], pattern: DiagonalPattern) -> Result<[Mesh; 2]> {
    let [[nx1, ny1], [nx2, ny2]] = grids;
    Ok([
        Mesh::structured(nx1, ny1, Rect::new([0.0, 0.0], [0.5, 1.0]), pattern)?,
        Mesh::structured(nx2, ny2, Rect::new([0.5, 0.0], [1.0, 1.0]), pattern)?,
    ])
}

pub const INTERFACE: [Point; 2] = [[0.5, 0.0], [0.5, 1.0]];

/// Fitted problem for the manufactured solution.
pub fn manufactured_fitted(
    mu: [f64; 2],
    grids: [[usize; 2]; 2],
    k: usize,
    flux_jump: bool,
) -> Result<FittedProblem> {
    let [m1, m2] = fitted_meshes(grids, DiagonalPattern::Right)?;
    let case = ManufacturedCase::new(mu[0], mu[1]);
    FittedProblem::new(
        mu,
        [Arc::new(m1), Arc::new(m2)],
        INTERFACE,
        Rect::unit_square(),
        k,
        case.problem_data(flux_jump),
    )
}

/// Unfitted problem for the manufactured solution on an `n x n` background mesh
/// with interface `x = 0.5 + offset`.
pub fn manufactured_unfitted(
    mu: [f64; 2],
    n: usize,
    offset: f64,
    k: usize,
    gamma_g: f64,
    flux_jump: bool,
) -> Result<UnfittedProblem> {
    let mesh = Mesh::structured(n, n, Rect::unit_square(), DiagonalPattern::Right)?;
    let case = ManufacturedCase::new(mu[0], mu[1]);
    UnfittedProblem::new(
        mu,
        Arc::new(mesh),
        LevelSet::vertical_line(0.5 + offset),
        Rect::unit_square(),
        k,
        gamma_g,
        case.problem_data(flux_jump),
    )
}

fn exact(p: Point) -> (f64, Point) {
    (u(p), grad_u(p))
}

/// Solves and measures the error of a fitted problem against the manufactured solution.
pub fn fitted_errors(problem: &FittedProblem) -> Result<(ErrorNorms, f64)> {
    let sol = problem.solve(DEFAULT_TOL)?;
    let q = problem.quad;
    let norms = error_norms(
        [&problem.spaces[0], &problem.spaces[1]],
        problem.layout(),
        [&sol.coeffs[0], &sol.coeffs[1]],
        [&exact, &exact],
        problem.mu,
        problem.weights.gamma,
        q.volume + 2,
        q.interface,
    )?;
    Ok((norms, sol.relative_residual))
}

pub fn unfitted_errors(problem: &UnfittedProblem) -> Result<(ErrorNorms, f64)> {
    let sol = problem.solve(DEFAULT_TOL)?;
    let q = problem.quad;
    let norms = error_norms(
        [&problem.spaces[0], &problem.spaces[1]],
        problem.layout(),
        [&sol.coeffs[0], &sol.coeffs[1]],
        [&exact, &exact],
        problem.mu,
        problem.weights.gamma,
        q.volume + 2,
        q.interface,
    )?;
    Ok((norms, sol.relative_residual))
}

#[derive(Debug, Clone, Copy)]
struct Job {
    mu2: f64,
    param: f64,
    ratio: Option<Ratio>,
    level: usize,
}

fn run_job(config: &StudyConfig, job: Job) -> ReportRow {
    let mu = [config.mu1, job.mu2];
    let mut row = ReportRow {
        regime: config.regime,
        k: config.k,
        mu1: config.mu1,
        mu2: job.mu2,
        param: job.param,
        level: job.level,
        h: f64::NAN,
        dofs: 0,
        errors: None,
        failure: None,
        assumption_holds: true,
        relative_residual: f64::NAN,
        rates: None,
    };
    let scale = 1usize << job.level;
    let outcome = match config.regime {
        Regime::Fitted => {
            let n = fitted_subdivisions(job.level, job.ratio.expect("fitted job has a ratio"));
            manufactured_fitted(mu, n, config.k, config.flux_jump).and_then(|p| {
                row.h = p.spaces[0].mesh().h.max(p.spaces[1].mesh().h);
                row.dofs = p.num_dofs();
                row.assumption_holds = p.assumption_holds();
                fitted_errors(&p)
            })
        }
        Regime::Unfitted => {
            let n = UNFITTED_BASE_N * scale + 1;
            manufactured_unfitted(
                mu,
                n,
                config.offset,
                config.k,
                config.gamma_g,
                config.flux_jump,
            )
            .and_then(|p| {
                row.h = p.mesh().h;
                row.dofs = p.num_dofs();
                row.assumption_holds = p.assumption_holds();
                unfitted_errors(&p)
            })
        }
    };
    match outcome {
        Ok((norms, residual)) => {
            row.errors = Some(norms);
            row.relative_residual = residual;
        }
        Err(e) => row.failure = Some(e.to_string()),
    }
    row
}

fn thread_count(config: &StudyConfig) -> Option<usize> {
    config.threads.or_else(|| {
        std::env::var(THREADS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&n| n > 0)
    })
}

/// Runs every `(mu2, ratio or offset, level)` combination of `config`. Rows come
/// back in configuration order; failed rows carry a failure message instead of errors.
pub fn run_study(config: &StudyConfig) -> Result<ConvergenceReport> {
    config.validate()?;
    let mut jobs = Vec::new();
    for &mu2 in &config.mu2 {
        match config.regime {
            Regime::Fitted => {
                for &ratio in &config.ratios {
                    for level in 0..config.levels {
                        jobs.push(Job {
                            mu2,
                            param: ratio.value(),
                            ratio: Some(ratio),
                            level,
                        });
                    }
                }
            }
            Regime::Unfitted => {
                for level in 0..config.levels {
                    jobs.push(Job {
                        mu2,
                        param: config.offset,
                        ratio: None,
                        level,
                    });
                }
            }
        }
    }

    let run = || {
        jobs.par_iter()
            .map(|&job| run_job(config, job))
            .collect::<Vec<_>>()
    };
    let rows = match thread_count(config) {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?
            .install(run),
        None => run(),
    };
    Ok(ConvergenceReport::from_rows(rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_parsing() {
        assert_eq!("3/5".parse::<Ratio>().unwrap(), Ratio { num: 3, den: 5 });
        assert_eq!("1".parse::<Ratio>().unwrap(), Ratio { num: 1, den: 1 });
        assert!("0/3".parse::<Ratio>().is_err());
        assert!("a/b".parse::<Ratio>().is_err());
        assert_eq!(Ratio { num: 3, den: 10 }.to_string(), "3/10");
    }

    #[test]
    fn fitted_mesh_ratio() {
        let r = Ratio { num: 3, den: 5 };
        assert_eq!(fitted_subdivisions(0, r), [[4, 8], [3, 5]]);
        assert_eq!(fitted_subdivisions(4, r), [[64, 128], [48, 80]]);
        assert_eq!(
            fitted_subdivisions(2, Ratio { num: 1, den: 5 }),
            [[16, 32], [4, 8]]
        );
        let [m1, m2] = fitted_meshes(
            [half_width_grid(40), half_width_grid(24)],
            DiagonalPattern::Right,
        )
        .unwrap();
        assert!((m1.h / m2.h - 0.6).abs() < 1e-12);
    }

    #[test]
    fn rejects_single_level() {
        let cfg = StudyConfig {
            levels: 1,
            ..StudyConfig::default()
        };
        assert!(run_study(&cfg).is_err());
    }
}
