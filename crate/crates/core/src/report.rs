//! Convergence tables, rate fitting and CSV output.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::norms::ErrorNorms;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    Fitted,
    Unfitted,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Regime::Fitted => "fitted",
            Regime::Unfitted => "unfitted",
        })
    }
}

impl FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fitted" => Ok(Regime::Fitted),
            "unfitted" => Ok(Regime::Unfitted),
            other => Err(Error::InvalidArgument(format!("unknown regime '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub regime: Regime,
    pub k: usize,
    pub mu1: f64,
    pub mu2: f64,
    /// Mesh-size ratio `h1/h2` (fitted) or interface offset (unfitted).
    pub param: f64,
    pub level: usize,
    pub h: f64,
    pub dofs: usize,
    /// `None` when the row failed; see `failure`.
    pub errors: Option<ErrorNorms>,
    pub failure: Option<String>,
    pub assumption_holds: bool,
    pub relative_residual: f64,
    /// Pairwise rates `(l2, h1, triple)` against the previous level of the same sweep.
    pub rates: Option<[f64; 3]>,
}

impl ReportRow {
    fn same_sweep(&self, other: &ReportRow) -> bool {
        self.regime == other.regime
            && self.k == other.k
            && self.mu1 == other.mu1
            && self.mu2 == other.mu2
            && self.param == other.param
    }
}

/// Least-squares slopes of `log e` against `log h` for one sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSummary {
    pub regime: Regime,
    pub k: usize,
    pub mu2: f64,
    pub param: f64,
    pub levels: usize,
    pub rate_l2: f64,
    pub rate_h1: f64,
    pub rate_jump: f64,
    pub rate_triple: f64,
    pub failed: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConvergenceReport {
    pub rows: Vec<ReportRow>,
    pub sweeps: Vec<SweepSummary>,
}

/// `log(e0 / e1) / log(h0 / h1)`
pub fn pairwise_rate(e0: f64, e1: f64, h0: f64, h1: f64) -> f64 {
    (e0 / e1).ln() / (h0 / h1).ln()
}

/// Slope of the least-squares line through `(log h_i, log e_i)`.
pub fn least_squares_slope(h: &[f64], e: &[f64]) -> f64 {
    let n = h.len() as f64;
    let x: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let y: Vec<f64> = e.iter().map(|v| v.ln()).collect();
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

impl ConvergenceReport {
    /// Groups consecutive rows of the same sweep and fills in pairwise and least-squares rates.
    pub fn from_rows(mut rows: Vec<ReportRow>) -> Self {
        let mut sweeps = Vec::new();
        let mut start = 0;
        while start < rows.len() {
            let mut end = start + 1;
            while end < rows.len() && rows[end].same_sweep(&rows[start]) {
                end += 1;
            }
            for i in start + 1..end {
                let (prev, cur) = (&rows[i - 1], &rows[i]);
                rows[i].rates = match (prev.errors, cur.errors) {
                    (Some(a), Some(b)) => Some([
                        pairwise_rate(a.l2, b.l2, prev.h, cur.h),
                        pairwise_rate(a.h1_semi, b.h1_semi, prev.h, cur.h),
                        pairwise_rate(a.triple, b.triple, prev.h, cur.h),
                    ]),
                    _ => None,
                };
            }
            let sweep = &rows[start..end];
            let ok: Vec<(f64, ErrorNorms)> = sweep
                .iter()
                .filter_map(|r| r.errors.map(|e| (r.h, e)))
                .collect();
            let hs: Vec<f64> = ok.iter().map(|(h, _)| *h).collect();
            let slope = |f: fn(&ErrorNorms) -> f64| {
                if ok.len() < 2 {
                    f64::NAN
                } else {
                    least_squares_slope(&hs, &ok.iter().map(|(_, e)| f(e)).collect::<Vec<_>>())
                }
            };
            sweeps.push(SweepSummary {
                regime: sweep[0].regime,
                k: sweep[0].k,
                mu2: sweep[0].mu2,
                param: sweep[0].param,
                levels: sweep.len(),
                rate_l2: slope(|e| e.l2),
                rate_h1: slope(|e| e.h1_semi),
                rate_jump: slope(|e| e.jump),
                rate_triple: slope(|e| e.triple),
                failed: ok.len() != sweep.len(),
            });
            start = end;
        }
        Self { rows, sweeps }
    }

    pub fn all_succeeded(&self) -> bool {
        self.rows.iter().all(|r| r.failure.is_none())
    }

    pub const HEADER: &'static str =
        "regime,k,mu1,mu2,ratio_or_offset,level,h,dofs,err_l2,err_h1,err_jump,err_triple,rate_l2,rate_h1,rate_triple";

    pub fn to_csv(&self) -> Result<String> {
        if self.rows.is_empty() {
            return Err(Error::EmptyReport);
        }
        let sci = |v: f64| format!("{v:.16e}");
        let mut out = String::new();
        out.push_str(Self::HEADER);
        out.push('\n');
        for r in &self.rows {
            let errs = match r.errors {
                Some(e) => [e.l2, e.h1_semi, e.jump, e.triple].map(sci).join(","),
                None => "nan,nan,nan,nan".to_string(),
            };
            let rates = match r.rates {
                Some(v) => v.map(sci).join(","),
                None => ",,".to_string(),
            };
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                r.regime,
                r.k,
                sci(r.mu1),
                sci(r.mu2),
                sci(r.param),
                r.level,
                sci(r.h),
                r.dofs,
                errs,
                rates
            )
            .expect("writing to a String cannot fail");
        }
        Ok(out)
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let csv = self.to_csv()?;
        std::fs::write(path, csv)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn row(level: usize, h: f64, e: f64) -> ReportRow {
        ReportRow {
            regime: Regime::Fitted,
            k: 1,
            mu1: 1.0,
            mu2: 10.0,
            param: 0.6,
            level,
            h,
            dofs: 10,
            errors: Some(ErrorNorms {
                l2: e,
                h1_semi: e.sqrt(),
                jump: e,
                triple: e.sqrt(),
            }),
            failure: None,
            assumption_holds: true,
            relative_residual: 0.0,
            rates: None,
        }
    }

    #[test]
    fn exact_log_ratio() {
        assert_relative_eq!(
            pairwise_rate(1e-1, 2.5e-2, 0.1, 0.05),
            2.0,
            max_relative = 1e-14
        );
    }

    #[test]
    fn least_squares_on_power_law() {
        let h = [0.1, 0.05, 0.025, 0.0125];
        let e: Vec<f64> = h.iter().map(|h| 3.0 * h * h).collect();
        assert_relative_eq!(least_squares_slope(&h, &e), 2.0, max_relative = 1e-12);
    }

    #[test]
    fn empty_report_is_an_error() {
        assert!(matches!(
            ConvergenceReport::default().to_csv(),
            Err(Error::EmptyReport)
        ));
    }

    #[test]
    fn two_level_csv() {
        let report = ConvergenceReport::from_rows(vec![row(0, 0.1, 1e-1), row(1, 0.05, 2.5e-2)]);
        let csv = report.to_csv().unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], ConvergenceReport::HEADER);
        assert!(lines[1].ends_with(",,,"));
        let cells: Vec<&str> = lines[2].split(',').collect();
        assert_eq!(cells.len(), 15);
        let rate: f64 = cells[12].parse().unwrap();
        assert_relative_eq!(rate, 2.0, max_relative = 1e-12);
        assert_eq!(report.sweeps.len(), 1);
        assert_relative_eq!(report.sweeps[0].rate_h1, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn regime_parsing() {
        assert_eq!("fitted".parse::<Regime>().unwrap(), Regime::Fitted);
        assert_eq!(Regime::Unfitted.to_string(), "unfitted");
        assert!("cut".parse::<Regime>().is_err());
    }
}
