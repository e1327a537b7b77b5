//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when a check or computation fails, 2 for
//! usage, parse and input errors.

pub mod config;

use std::ffi::OsString;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bounds::bound_sweep;
use crate::error::{Error, Result};
use crate::export::{export_function, write_bounds, write_function};
use crate::grid::{Grid, SampledFn};
use crate::multiindex::MultiIndex;
use crate::seminorms::{joint_seminorm, kernel_seminorm, operator_seminorm, Family, SeminormEstimator, SeminormReport};
use crate::states::io::{load_pure, load_state};
use crate::states::{demo_state, MixedState, PureState};
use crate::transforms::{husimi, matel, quasichar, wigner};
use crate::verify::{self, heavy_tail_grid, plateau_decay, run_suite};
use config::{check_band, check_half_extent, check_points, RunConfig};

/// Environment variable capping the worker-thread count (0 = automatic).
pub const THREADS_ENV: &str = "PHASESPACE_THREADS";

#[derive(Parser, Debug)]
#[command(name = "phasespace", version, about = "Phase-space representations of quantum states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample the Wigner function on a grid and write it as CSV.
    Wigner(TransformArgs),
    /// Sample the Husimi function against the reference wavefunction.
    Husimi(TransformArgs),
    /// Sample the quasicharacteristic function tr[rho D_xi].
    Quasichar(TransformArgs),
    /// Evaluate the matrix element <chi_alpha|rho|chi_beta>.
    Matel(MatelArgs),
    /// Print one seminorm as a CSV line.
    Seminorm(SeminormArgs),
    /// Sweep the decay bound over all (a, b) with |a| + |b| <= max order.
    BoundCheck(BoundArgs),
    /// Run the numerical verification suite.
    Verify(VerifyArgs),
    /// Reproduce the behaviour of a built-in state.
    Demo(DemoArgs),
}

#[derive(Args, Debug, Clone)]
struct StateArgs {
    /// JSON state file.
    #[arg(long, value_name = "PATH", conflicts_with = "demo")]
    state: Option<PathBuf>,
    /// Built-in state: vacuum, fock1, plateau or heavy-tail.
    #[arg(long, value_name = "NAME")]
    demo: Option<String>,
    /// Truncation of the heavy-tail demo.
    #[arg(long = "K", value_name = "K")]
    k: Option<usize>,
    /// JSON reference wavefunction (default: the vacuum).
    #[arg(long, value_name = "PATH")]
    chi: Option<PathBuf>,
    /// Grid as `N,L`: N points per axis on [-L, L).
    #[arg(long, value_name = "N,L")]
    grid: Option<String>,
    /// `key = value` run configuration.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TransformArgs {
    #[command(flatten)]
    state: StateArgs,
    /// Output CSV (default: stdout).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct MatelArgs {
    #[command(flatten)]
    state: StateArgs,
    /// Left phase-space point `x..,p..`.
    #[arg(long, value_name = "X,P", allow_hyphen_values = true)]
    alpha: String,
    /// Right phase-space point `x..,p..`.
    #[arg(long, value_name = "X,P", allow_hyphen_values = true)]
    beta: String,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum RepArg {
    Wigner,
    Husimi,
    Quasichar,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum FamilyArg {
    Decay,
    NormSum,
    Joint,
    Kernel,
    Operator,
}

#[derive(Args, Debug)]
struct SeminormArgs {
    #[command(flatten)]
    state: StateArgs,
    /// Representation for the decay and norm-sum families.
    #[arg(long, value_enum, default_value = "wigner")]
    rep: RepArg,
    #[arg(long, value_enum, default_value = "decay")]
    family: FamilyArg,
    /// Weight multi-index.
    #[arg(long, value_name = "INDEX")]
    a: String,
    /// Derivative multi-index.
    #[arg(long, value_name = "INDEX")]
    b: String,
    /// Third index for the kernel and operator families.
    #[arg(long, value_name = "INDEX")]
    c: Option<String>,
    /// Fourth index for the kernel and operator families.
    #[arg(long, value_name = "INDEX")]
    d: Option<String>,
}

#[derive(Args, Debug)]
struct BoundArgs {
    #[command(flatten)]
    state: StateArgs,
    #[arg(long, default_value_t = 4)]
    max_order: u32,
    /// Output CSV (default: stdout).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    state: StateArgs,
    /// Seed for the sampled checks (overrides the config file).
    #[arg(long)]
    seed: Option<u64>,
    /// Report CSV; the table is always printed.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DemoArgs {
    /// vacuum, fock1, plateau or heavy-tail.
    #[arg(long)]
    name: String,
    /// Largest heavy-tail truncation to tabulate.
    #[arg(long = "K", value_name = "K")]
    k: Option<usize>,
    /// `key = value` run configuration.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
}

/// Entry point of the `phasespace` binary.
pub fn run() -> ExitCode {
    run_from(std::env::args_os())
}

pub fn run_from<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(e) = init_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match dispatch(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        // A closed downstream pipe (`| head`) is not an error.
        Err(Error::Io { source, .. }) if source.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// 2 for bad input, 1 for failures of the numerics themselves.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NonFinite { .. }
        | Error::NonRealWigner { .. }
        | Error::NegativeHusimi { .. }
        | Error::GridResolution { .. }
        | Error::GridTooCoarse { .. } => 1,
        _ => 2,
    }
}

fn init_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("{THREADS_ENV} must be a non-negative integer, got `{raw}`")))?;
    // A pool that is already initialized keeps its size.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Fully resolved inputs shared by every subcommand.
struct Inputs {
    rho: MixedState,
    chi: PureState,
    cfg: RunConfig,
    grid: Grid,
    reads: Vec<PathBuf>,
}

impl StateArgs {
    fn resolve(&self) -> Result<Inputs> {
        let mut reads = Vec::new();
        let cfg = match &self.config {
            Some(p) => {
                reads.push(p.clone());
                RunConfig::load(p)?
            }
            None => RunConfig::default(),
        };
        let rho = match (&self.state, &self.demo) {
            (Some(p), _) => {
                reads.push(p.clone());
                load_state(p)?
            }
            (None, Some(name)) => demo_state(name, self.k)?,
            (None, None) => return Err(Error::Parse("one of --state or --demo is required".into())),
        };
        let chi = match &self.chi {
            Some(p) => {
                reads.push(p.clone());
                load_pure(p)?
            }
            None => PureState::vacuum(rho.dim()),
        };
        if chi.dim() != rho.dim() {
            return Err(Error::DimensionMismatch(format!(
                "state has n = {}, reference wavefunction has n = {}",
                rho.dim(),
                chi.dim()
            )));
        }
        let (mut points, mut l) = (cfg.points.unwrap_or(256), cfg.half_extent.unwrap_or(12.0));
        if let Some(spec) = &self.grid {
            (points, l) = parse_grid(spec)?;
        }
        let grid = Grid::phase_space(rho.dim(), points, l)?;
        Ok(Inputs { rho, chi, cfg, grid, reads })
    }
}

fn parse_grid(spec: &str) -> Result<(usize, f64)> {
    let bad = || Error::Parse(format!("--grid expects `N,L`, got `{spec}`"));
    let (n, l) = spec.split_once(',').ok_or_else(bad)?;
    let n = n.trim().parse().map_err(|_| bad())?;
    let l = l.trim().parse().map_err(|_| bad())?;
    Ok((check_points(n)?, check_half_extent(l)?))
}

fn parse_point(flag: &str, s: &str, dim: usize) -> Result<Vec<f64>> {
    let v = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| Error::Parse(format!("{flag} `{s}`: {e}")))?;
    if v.len() != dim || v.iter().any(|x| !x.is_finite()) {
        return Err(Error::Parse(format!("{flag} needs {dim} finite comma-separated values, got `{s}`")));
    }
    Ok(v)
}

fn parse_index(flag: &str, s: &str, len: usize) -> Result<MultiIndex> {
    let m: MultiIndex = s.parse().map_err(|e: Error| Error::Parse(format!("{flag}: {e}")))?;
    if m.len() != len {
        return Err(Error::Parse(format!("{flag} needs {len} entries, got `{s}`")));
    }
    Ok(m)
}

/// Resolves the output path and refuses to overwrite an input.
fn output_path(flag: &Option<PathBuf>, cfg: &RunConfig, sub: &str, reads: &[PathBuf]) -> Result<Option<PathBuf>> {
    let out = flag.clone().or_else(|| cfg.outputs.get(sub).cloned());
    if let Some(o) = &out {
        let canon = |p: &Path| std::fs::canonicalize(p).ok();
        if let Some(co) = canon(o) {
            if reads.iter().any(|r| canon(r).as_ref() == Some(&co)) {
                return Err(Error::Parse(format!("refusing to overwrite input file {}", o.display())));
            }
        }
    }
    Ok(out)
}

fn emit_function(f: &SampledFn, out: Option<PathBuf>) -> Result<()> {
    match out {
        Some(p) => export_function(&p, f),
        None => write_function(io::stdout().lock(), f),
    }
}

fn stdout_err(e: io::Error) -> Error {
    Error::Io {
        path: "<stdout>".into(),
        source: e,
    }
}

fn dispatch(cmd: Command) -> Result<bool> {
    match cmd {
        Command::Wigner(t) => transform(t, "wigner", |i| wigner(&i.rho, &i.grid)),
        Command::Husimi(t) => transform(t, "husimi", |i| husimi(&i.rho, &i.chi, &i.grid)),
        Command::Quasichar(t) => transform(t, "quasichar", |i| quasichar(&i.rho, &i.grid)),
        Command::Matel(m) => {
            let i = m.state.resolve()?;
            let d = 2 * i.rho.dim();
            let alpha = parse_point("--alpha", &m.alpha, d)?;
            let beta = parse_point("--beta", &m.beta, d)?;
            let v = matel(&i.rho, &i.chi, &alpha, &beta)?;
            println!("{:.16e},{:.16e}", v.re, v.im);
            Ok(true)
        }
        Command::Seminorm(s) => seminorm_cmd(s),
        Command::BoundCheck(b) => {
            let i = b.state.resolve()?;
            let out = output_path(&b.out, &i.cfg, "bound-check", &i.reads)?;
            let reports = bound_sweep(&i.rho, &i.chi, &i.grid, b.max_order)?;
            match out {
                Some(p) => {
                    let file = std::fs::File::create(&p).map_err(|source| Error::Io {
                        path: p.display().to_string(),
                        source,
                    })?;
                    write_bounds(io::BufWriter::new(file), &reports)?;
                }
                None => write_bounds(io::stdout().lock(), &reports)?,
            }
            let failed = reports.iter().filter(|r| !r.pass).count();
            let worst = reports.iter().map(|r| r.ratio).fold(0.0, f64::max);
            eprintln!("{} pairs, {failed} violations, max ratio {worst:.6e}", reports.len());
            Ok(failed == 0)
        }
        Command::Verify(v) => verify_cmd(v),
        Command::Demo(d) => demo_cmd(d),
    }
}

fn transform(t: TransformArgs, sub: &str, f: impl Fn(&Inputs) -> Result<SampledFn>) -> Result<bool> {
    let i = t.state.resolve()?;
    let out = output_path(&t.out, &i.cfg, sub, &i.reads)?;
    emit_function(&f(&i)?, out)?;
    Ok(true)
}

fn seminorm_cmd(s: SeminormArgs) -> Result<bool> {
    let i = s.state.resolve()?;
    let n = i.rho.dim();
    let band = i.cfg.band.map(check_band).transpose()?.unwrap_or(crate::grid::DEFAULT_BAND);
    let report = match s.family {
        FamilyArg::Decay | FamilyArg::NormSum => {
            let (a, b) = (parse_index("--a", &s.a, 2 * n)?, parse_index("--b", &s.b, 2 * n)?);
            let f = match s.rep {
                RepArg::Wigner => wigner(&i.rho, &i.grid)?,
                RepArg::Husimi => husimi(&i.rho, &i.chi, &i.grid)?,
                RepArg::Quasichar => quasichar(&i.rho, &i.grid)?,
            };
            let family = if matches!(s.family, FamilyArg::Decay) { Family::Decay } else { Family::NormSum };
            SeminormEstimator::with_band(f, band).report(family, &a, &b)?
        }
        family => {
            let (a, b) = (parse_index("--a", &s.a, n)?, parse_index("--b", &s.b, n)?);
            let cgrid = Grid::configuration(n, i.grid.points(), i.grid.half_extent(0))?;
            let (fam, rep, indices, value) = match family {
                FamilyArg::Joint => (
                    Family::Joint,
                    i.rho.name(),
                    vec![a.clone(), b.clone()],
                    joint_seminorm(i.rho.components(), &a, &b, &cgrid)?,
                ),
                _ => {
                    let need = |flag: &str, v: &Option<String>| {
                        v.as_deref()
                            .ok_or_else(|| Error::Parse(format!("{flag} is required for this family")))
                            .and_then(|t| parse_index(flag, t, n))
                    };
                    let (c, d) = (need("--c", &s.c)?, need("--d", &s.d)?);
                    if matches!(family, FamilyArg::Kernel) {
                        let v = kernel_seminorm(&i.rho, &a, &c, &b, &d, &cgrid)?;
                        (Family::Kernel, i.rho.name(), vec![a, c, b, d], v)
                    } else {
                        let v = operator_seminorm(&i.rho, &a, &b, &c, &d, &cgrid)?;
                        (Family::Operator, i.rho.name(), vec![a, b, c, d], v)
                    }
                }
            };
            SeminormReport {
                family: fam,
                rep: rep.into(),
                indices,
                value,
                points: cgrid.points(),
                half_extents: cgrid.half_extents().to_vec(),
                band: crate::grid::DEFAULT_BAND,
            }
        }
    };
    println!("{}", report.csv_line());
    Ok(true)
}

fn verify_cmd(v: VerifyArgs) -> Result<bool> {
    let i = v.state.resolve()?;
    let out = output_path(&v.out, &i.cfg, "verify", &i.reads)?;
    let mut cfg = i.cfg.verify_config();
    cfg.points = i.grid.points();
    cfg.half_extent = i.grid.half_extent(0);
    if let Some(s) = v.seed {
        cfg.seed = s;
    }
    let reports = run_suite(&i.rho, &i.chi, &cfg);
    if let Some(p) = out {
        let file = std::fs::File::create(&p).map_err(|source| Error::Io {
            path: p.display().to_string(),
            source,
        })?;
        verify::write_reports(io::BufWriter::new(file), &reports)?;
    }
    let mut w = io::stdout().lock();
    let width = reports.iter().map(|r| r.check.len()).max().unwrap_or(5).max(5);
    writeln!(w, "{:<width$}  {:<7}  {:>12}  {:>10}  detail", "check", "status", "residual", "tolerance").map_err(stdout_err)?;
    for r in &reports {
        writeln!(
            w,
            "{:<width$}  {:<7}  {:>12.4e}  {:>10.1e}  {}",
            r.check, r.status.to_string(), r.residual, r.tolerance, r.detail
        )
        .map_err(stdout_err)?;
    }
    let ok = verify::all_passed(&reports);
    writeln!(w, "{}", if ok { "all checks passed" } else { "some checks FAILED" }).map_err(stdout_err)?;
    Ok(ok)
}

fn demo_cmd(d: DemoArgs) -> Result<bool> {
    let cfg = match &d.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let vcfg = cfg.verify_config();
    let mut w = io::stdout().lock();
    let mut row = |k: &str, v: String| writeln!(w, "{k},{v}").map_err(stdout_err);
    row("quantity", "value".into())?;
    match d.name.as_str() {
        "heavy-tail" | "heavy_tail" => {
            let k_max = d.k.unwrap_or(6);
            let grid = heavy_tail_grid();
            let a = MultiIndex::new(vec![1, 0])?;
            let z = MultiIndex::zeros(2);
            let mut prev = f64::NEG_INFINITY;
            let mut increasing = true;
            for k in 1..=k_max {
                let rho = demo_state("heavy-tail", Some(k))?;
                let v = SeminormEstimator::new(wigner(&rho, &grid)?).seminorm(&a, &z)?;
                increasing &= v > prev;
                prev = v;
                row(&format!("wigner-decay(1,0) K={k}"), format!("{v:.16e}"))?;
            }
            row("strictly increasing", increasing.to_string())?;
            Ok(increasing)
        }
        "plateau" => {
            let r = plateau_decay(&vcfg);
            row("fitted p-decay exponent", format!("{:.16e}", r.residual))?;
            row("status", r.status.to_string())?;
            row("detail", format!("\"{}\"", r.detail))?;
            Ok(r.passed())
        }
        name => {
            let rho = demo_state(name, d.k)?;
            let chi = PureState::vacuum(rho.dim());
            let grid = vcfg.grid(rho.dim())?;
            let w_fn = wigner(&rho, &grid)?;
            let q = husimi(&rho, &chi, &grid)?;
            let est = SeminormEstimator::with_band(w_fn, vcfg.band);
            row("grid", format!("\"{grid}\""))?;
            row("trace of W", format!("{:.16e}", est.function().quadrature().re))?;
            row("max Q", format!("{:.16e}", q.interior_max_abs(vcfg.band)))?;
            let z = MultiIndex::zeros(2);
            for a in [vec![0, 0], vec![1, 0], vec![0, 1], vec![2, 0]] {
                let a = MultiIndex::new(a)?;
                row(&format!("wigner-decay ({a})"), format!("{:.16e}", est.seminorm(&a, &z)?))?;
            }
            Ok(true)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_and_points() {
        assert_eq!(parse_grid("256,12").unwrap(), (256, 12.0));
        assert!(parse_grid("255,12").is_err());
        assert!(parse_grid("256").is_err());
        assert_eq!(parse_point("--alpha", "-1.5,2", 2).unwrap(), vec![-1.5, 2.0]);
        assert!(parse_point("--alpha", "1", 2).is_err());
        assert!(parse_index("--a", "1,0", 2).is_ok());
        assert!(parse_index("--a", "1", 2).is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Parse("x".into())), 2);
        assert_eq!(exit_code(&Error::GridTooCoarse { coarse: 1.0, refined: 2.0 }), 1);
    }

    #[test]
    fn every_subcommand_has_help() {
        use clap::CommandFactory;
        let cmd = Cli::command();
        cmd.clone().debug_assert();
        for sub in config::SUBCOMMANDS {
            assert!(cmd.find_subcommand(sub).is_some(), "{sub}");
        }
    }
}
