//! Numerical verification harness. Each check computes both sides of an
//! identity independently and reports the residual.

mod checks;
pub mod four_d;

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{Grid, DEFAULT_BAND};
use crate::states::{MixedState, PureState};

pub use checks::{
    check_cauchy_schwarz, check_duality, check_husimi, check_marginal, check_offdiag, check_overlap,
    check_reproducing, check_trace, check_twisted_expansion, divergence_trend, heavy_tail_grid, plateau_decay,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// Diagnostic output that never fails the suite.
    Info,
    /// Not applicable to the inputs (non-analytic state, `n > 1` for 4-D checks).
    Skipped,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Info => "info",
            Status::Skipped => "skipped",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport {
    pub check: String,
    pub status: Status,
    pub residual: f64,
    pub tolerance: f64,
    pub samples: usize,
    pub grid: String,
    pub seed: u64,
    pub detail: String,
}

impl VerifyReport {
    /// Pass iff `residual <= tolerance`; a non-finite residual fails.
    pub fn judged(check: &str, residual: f64, tolerance: f64, samples: usize, grid: &Grid, seed: u64) -> Self {
        let status = if residual.is_finite() && residual <= tolerance {
            Status::Pass
        } else {
            Status::Fail
        };
        Self {
            check: check.to_string(),
            status,
            residual,
            tolerance,
            samples,
            grid: grid.to_string(),
            seed,
            detail: String::new(),
        }
    }

    pub fn info(check: &str, residual: f64, samples: usize, grid: &Grid, seed: u64, detail: impl Into<String>) -> Self {
        Self {
            check: check.to_string(),
            status: Status::Info,
            residual,
            tolerance: f64::NAN,
            samples,
            grid: grid.to_string(),
            seed,
            detail: detail.into(),
        }
    }

    pub fn skipped(check: &str, tolerance: f64, seed: u64, reason: impl Into<String>) -> Self {
        Self {
            check: check.to_string(),
            status: Status::Skipped,
            residual: 0.0,
            tolerance,
            samples: 0,
            grid: String::new(),
            seed,
            detail: reason.into(),
        }
    }

    /// A check that could not be evaluated at all.
    pub fn errored(check: &str, tolerance: f64, seed: u64, err: &Error) -> Self {
        Self {
            check: check.to_string(),
            status: Status::Fail,
            residual: f64::INFINITY,
            tolerance,
            samples: 0,
            grid: String::new(),
            seed,
            detail: err.to_string(),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }

    /// False only for failed checks.
    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

/// Names of the tolerance-bearing checks, in suite order, with their defaults.
pub const DEFAULT_TOLERANCES: [(&str, f64); 12] = [
    ("duality", 1e-6),
    ("trace", 1e-7),
    ("overlap", 1e-7),
    ("husimi", 1e-8),
    ("cauchy-schwarz", 1e-9),
    ("offdiag", 1e-7),
    ("reproducing", 1e-5),
    ("double-char", 2e-3),
    ("wigner-decomp", 5e-3),
    ("marginal", 1e-8),
    ("marginal-nonanalytic", 1e-2),
    ("twisted", 1e-8),
];

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyConfig {
    pub points: usize,
    pub half_extent: f64,
    pub seed: u64,
    pub band: f64,
    pub tolerances: BTreeMap<String, f64>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            points: 256,
            half_extent: 12.0,
            seed: 0,
            band: DEFAULT_BAND,
            tolerances: DEFAULT_TOLERANCES.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }
}

/// Position spacing used when a grid must be widened to hold a state.
const WIDE_SPACING: f64 = 0.35;

impl VerifyConfig {
    pub fn tol(&self, check: &str) -> f64 {
        self.tolerances.get(check).copied().unwrap_or_else(|| {
            DEFAULT_TOLERANCES
                .iter()
                .find(|(k, _)| *k == check)
                .map(|(_, v)| *v)
                .unwrap_or(f64::NAN)
        })
    }

    /// Sets a tolerance; unknown check names are rejected.
    pub fn set_tol(&mut self, check: &str, value: f64) -> Result<()> {
        if !DEFAULT_TOLERANCES.iter().any(|(k, _)| *k == check) {
            return Err(Error::Parse(format!("unknown check `{check}` in tolerance key")));
        }
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::Parse(format!("tolerance for `{check}` must be positive, got {value}")));
        }
        self.tolerances.insert(check.to_string(), value);
        Ok(())
    }

    /// The configured phase-space grid over `R^{2n}`.
    pub fn grid(&self, n: usize) -> Result<Grid> {
        Grid::phase_space(n, self.points, self.half_extent)
    }

    /// The configured grid, widened per block so the interior band holds the
    /// state's atoms with six units of margin. The spacing is kept at or below
    /// the configured one, or [`WIDE_SPACING`] when that is coarser.
    pub fn grid_for(&self, rho: &MixedState) -> Result<Grid> {
        let n = rho.dim();
        let (mut rx, mut rp) = (0.0f64, 0.0f64);
        for (_, psi) in rho.components() {
            for a in psi.atoms().unwrap_or(&[]) {
                for j in 0..n {
                    rx = rx.max(a.alpha[j].abs());
                    rp = rp.max(a.alpha[n + j].abs());
                }
            }
        }
        let need = |r: f64| ((r + 6.0) / (1.0 - 2.0 * self.band)).max(self.half_extent);
        let (lx, lp) = (need(rx), need(rp));
        if lx == self.half_extent && lp == self.half_extent {
            return self.grid(n);
        }
        let h = (2.0 * self.half_extent / self.points as f64).max(WIDE_SPACING);
        let wanted = (2.0 * lx.max(lp) / h).ceil() as usize;
        let points = wanted.next_power_of_two().max(self.points);
        Grid::phase_space_with(points, &vec![lx; n], &vec![lp; n])
    }
}

/// Every check of the suite for `rho` against the reference `chi`. Checks run
/// concurrently; the order of the returned list is fixed.
pub fn run_suite(rho: &MixedState, chi: &PureState, cfg: &VerifyConfig) -> Vec<VerifyReport> {
    type Job<'a> = Box<dyn Fn() -> Vec<VerifyReport> + Send + Sync + 'a>;
    let eta = checks::companion_state(rho.dim(), cfg.seed);
    let heavy = rho.name().starts_with("heavy-tail");
    let jobs: Vec<Job> = vec![
        Box::new(|| vec![check_duality(rho, cfg)]),
        Box::new(|| vec![check_trace(rho, chi, cfg)]),
        Box::new(|| vec![check_overlap(rho, &eta, cfg)]),
        Box::new(|| vec![check_husimi(rho, chi, cfg)]),
        Box::new(|| vec![check_cauchy_schwarz(rho, chi, cfg)]),
        Box::new(|| vec![check_offdiag(chi, cfg)]),
        Box::new(|| vec![checks::check_reproducing_seeded(rho, chi, cfg)]),
        Box::new(|| four_d::suite_checks(rho, chi, cfg)),
        Box::new(|| vec![check_marginal(rho, cfg)]),
        Box::new(|| vec![check_twisted_expansion(cfg)]),
        Box::new(move || {
            let mut v = Vec::new();
            if !rho.is_analytic() {
                v.push(plateau_decay(cfg));
            }
            if heavy {
                v.push(divergence_trend(cfg));
            }
            v
        }),
    ];
    jobs.par_iter().map(|job| job()).collect::<Vec<_>>().into_iter().flatten().collect()
}

pub fn all_passed(reports: &[VerifyReport]) -> bool {
    reports.iter().all(VerifyReport::passed)
}

pub const REPORT_HEADER: [&str; 8] = ["check", "status", "residual", "tolerance", "samples", "grid", "seed", "detail"];

/// Writes reports as CSV with a header row and 17 significant digits.
pub fn write_reports<W: Write>(out: W, reports: &[VerifyReport]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    let parse = |e: csv::Error| Error::Parse(format!("writing report CSV: {e}"));
    w.write_record(REPORT_HEADER).map_err(parse)?;
    for r in reports {
        w.write_record([
            r.check.clone(),
            r.status.to_string(),
            format!("{:.16e}", r.residual),
            format!("{:.16e}", r.tolerance),
            r.samples.to_string(),
            r.grid.clone(),
            r.seed.to_string(),
            r.detail.clone(),
        ])
        .map_err(parse)?;
    }
    w.flush().map_err(|e| Error::Parse(format!("writing report CSV: {e}")))?;
    Ok(())
}
