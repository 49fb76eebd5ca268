use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use nitsche_dd::linalg::DEFAULT_TOL;
use nitsche_dd::report::Regime;
use nitsche_dd::study::{
    fitted_errors, half_width_grid, manufactured_fitted, manufactured_unfitted, run_study,
    unfitted_errors, Ratio, StudyConfig,
};
use nitsche_dd::unfitted::DEFAULT_GHOST_PENALTY;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RegimeArg {
    Fitted,
    Unfitted,
}

impl From<RegimeArg> for Regime {
    fn from(r: RegimeArg) -> Self {
        match r {
            RegimeArg::Fitted => Regime::Fitted,
            RegimeArg::Unfitted => Regime::Unfitted,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Parser)]
#[command(
    name = "nitsche-dd",
    version,
    about = "Penalty-free Nitsche interface coupling for 2D Poisson problems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convergence study on the manufactured solution, written as CSV.
    Study {
        #[arg(long, value_enum, default_value = "fitted")]
        regime: RegimeArg,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 1.0)]
        mu1: f64,
        #[arg(long, value_delimiter = ',', default_value = "1,10,100,1000")]
        mu2: Vec<f64>,
        /// Mesh-size ratios h1/h2 (fitted regime).
        #[arg(long, value_delimiter = ',', default_value = "1")]
        ratio: Vec<Ratio>,
        #[arg(long, default_value_t = 5)]
        levels: usize,
        #[arg(long = "gamma-g", default_value_t = DEFAULT_GHOST_PENALTY)]
        gamma_g: f64,
        /// Interface offset from x = 0.5 (unfitted regime).
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        offset: f64,
        #[arg(long = "flux-jump", value_enum, default_value = "on")]
        flux_jump: Switch,
        #[arg(long, default_value = "report.csv")]
        out: PathBuf,
    },
    /// Solve a single configuration and print its errors.
    Solve {
        #[arg(long, value_enum, default_value = "fitted")]
        regime: RegimeArg,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 1.0)]
        mu1: f64,
        #[arg(long, default_value_t = 1.0)]
        mu2: f64,
        /// Subdivisions along the interface of mesh 1 (fitted) or of the background mesh (unfitted).
        #[arg(long, default_value_t = 17)]
        n: usize,
        #[arg(long, default_value = "1")]
        ratio: Ratio,
        #[arg(long = "gamma-g", default_value_t = DEFAULT_GHOST_PENALTY)]
        gamma_g: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        offset: f64,
        #[arg(long = "flux-jump", value_enum, default_value = "on")]
        flux_jump: Switch,
        /// Write the (first) mesh as plain text.
        #[arg(long = "dump-mesh")]
        dump_mesh: Option<PathBuf>,
        /// Write the constrained system matrix in coordinate format.
        #[arg(long = "dump-matrix")]
        dump_matrix: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> nitsche_dd::Result<bool> {
    match cli.command {
        Command::Study {
            regime,
            k,
            mu1,
            mu2,
            ratio,
            levels,
            gamma_g,
            offset,
            flux_jump,
            out,
        } => {
            let config = StudyConfig {
                regime: regime.into(),
                k,
                mu1,
                mu2,
                ratios: ratio,
                levels,
                gamma_g,
                offset,
                flux_jump: matches!(flux_jump, Switch::On),
                threads: None,
            };
            let report = run_study(&config)?;
            report.write_csv(&out)?;
            for s in &report.sweeps {
                println!(
                    "{} k={} mu2={:<8} param={:<10.4e} rate_l2={:.3} rate_h1={:.3} rate_triple={:.3}{}",
                    s.regime,
                    s.k,
                    s.mu2,
                    s.param,
                    s.rate_l2,
                    s.rate_h1,
                    s.rate_triple,
                    if s.failed { "  FAILED" } else { "" }
                );
            }
            for r in report.rows.iter().filter(|r| !r.assumption_holds) {
                eprintln!(
                    "warning: mu2 h1 >= mu1 h2 (fitted) / mu1 <= mu2 (unfitted) does not hold for mu2={} param={} level={}",
                    r.mu2, r.param, r.level
                );
            }
            for r in report
                .rows
                .iter()
                .filter_map(|r| r.failure.as_ref().map(|f| (r, f)))
            {
                eprintln!(
                    "error: mu2={} param={} level={}: {}",
                    r.0.mu2, r.0.param, r.0.level, r.1
                );
            }
            println!("wrote {}", out.display());
            Ok(report.all_succeeded())
        }
        Command::Solve {
            regime,
            k,
            mu1,
            mu2,
            n,
            ratio,
            gamma_g,
            offset,
            flux_jump,
            dump_mesh,
            dump_matrix,
        } => {
            let mu = [mu1, mu2];
            let flux = matches!(flux_jump, Switch::On);
            let (norms, residual, dofs, system, mesh) = match Regime::from(regime) {
                Regime::Fitted => {
                    let p = manufactured_fitted(
                        mu,
                        [
                            half_width_grid(n),
                            half_width_grid(((n as f64 * ratio.value()).ceil() as usize).max(1)),
                        ],
                        k,
                        flux,
                    )?;
                    if !p.assumption_holds() {
                        eprintln!("warning: mu2 h1 >= mu1 h2 does not hold");
                    }
                    let (norms, res) = fitted_errors(&p)?;
                    let sys = dump_matrix
                        .is_some()
                        .then(|| p.assemble_constrained())
                        .transpose()?;
                    (norms, res, p.num_dofs(), sys, p.spaces[0].mesh().clone())
                }
                Regime::Unfitted => {
                    let p = manufactured_unfitted(mu, n, offset, k, gamma_g, flux)?;
                    if !p.assumption_holds() {
                        eprintln!("warning: mu1 <= mu2 does not hold");
                    }
                    let (norms, res) = unfitted_errors(&p)?;
                    let sys = dump_matrix
                        .is_some()
                        .then(|| p.assemble_constrained())
                        .transpose()?;
                    (norms, res, p.num_dofs(), sys, p.mesh().clone())
                }
            };
            println!("dofs {dofs}");
            println!("relative_residual {residual:.3e} (tolerance {DEFAULT_TOL:.0e})");
            println!("err_l2 {:.16e}", norms.l2);
            println!("err_h1 {:.16e}", norms.h1_semi);
            println!("err_jump {:.16e}", norms.jump);
            println!("err_triple {:.16e}", norms.triple);
            if let Some(path) = dump_mesh {
                mesh.write_text(BufWriter::new(File::create(path)?))?;
            }
            if let (Some(path), Some(sys)) = (dump_matrix, system) {
                sys.compress()?
                    .write_coordinate(BufWriter::new(File::create(path)?))?;
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
