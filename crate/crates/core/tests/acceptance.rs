//! Acceptance criteria at desk scale (n = 1, N = 256, L = 12 unless noted).
//! Prints one PASS/FAIL line per criterion and exits nonzero on any failure.

use std::f64::consts::PI;
use std::process::{Command, ExitCode};
use std::time::Instant;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use phasespace::bounds::{self, TheoremBounds, Variant};
use phasespace::grid::{Grid, DEFAULT_BAND};
use phasespace::seminorms::{self, SeminormEstimator};
use phasespace::states::{self, random, MixedState, PureState};
use phasespace::transforms;
use phasespace::verify::{self, four_d};
use phasespace::MultiIndex;

const SEED: u64 = 0;

fn ensemble() -> Vec<MixedState> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    (0..20).map(|_| random::random_mixture(&mut rng, 1, 3, 3)).collect()
}

fn mi(e: &[u32]) -> MultiIndex {
    MultiIndex::new(e.to_vec()).unwrap()
}

/// All pairs `(a, b)` of 2-component indices with `|a| + |b| <= max`.
fn index_pairs(max: u32) -> Vec<(MultiIndex, MultiIndex)> {
    MultiIndex::all_up_to(4, max)
        .into_iter()
        .map(|ab| {
            let e = ab.entries();
            (mi(&e[..2]), mi(&e[2..]))
        })
        .collect()
}

fn rand_point(rng: &mut ChaCha8Rng, r: f64) -> Vec<f64> {
    vec![rng.gen_range(-r..r), rng.gen_range(-r..r)]
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

type Criterion = fn() -> Outcome;

fn gaussian_suite() -> Outcome {
    let start = Instant::now();
    let grid = Grid::desk();
    let vac = MixedState::vacuum(1);
    let chi = PureState::vacuum(1);
    let w = transforms::wigner(&vac, &grid).unwrap();
    let x = transforms::quasichar(&vac, &grid).unwrap();
    let q = transforms::husimi(&vac, &chi, &grid).unwrap();
    let ew = w.interior_error(DEFAULT_BAND, |a| C64::new((-a[0] * a[0] - a[1] * a[1]).exp() / PI, 0.0));
    let ex = x.interior_error(DEFAULT_BAND, |a| C64::new((-(a[0] * a[0] + a[1] * a[1]) / 4.0).exp(), 0.0));
    let eq = q.interior_error(DEFAULT_BAND, |a| C64::new((-(a[0] * a[0] + a[1] * a[1]) / 2.0).exp(), 0.0));
    let secs = start.elapsed().as_secs_f64();
    let worst = ew.max(ex).max(eq);
    outcome(
        worst <= 1e-8 && secs < 5.0,
        format!("max err W {ew:.2e}, X {ex:.2e}, Q {eq:.2e} (tol 1e-8); {secs:.2} s (limit 5 s)"),
    )
}

fn duality() -> Outcome {
    let start = Instant::now();
    let cfg = verify::VerifyConfig::default();
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for rho in ensemble() {
        let r = verify::check_duality(&rho, &cfg);
        ok &= r.residual <= 1e-6 && r.passed();
        worst = worst.max(r.residual);
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        ok && secs < 30.0,
        format!("worst residual {worst:.2e} over 20 mixtures (tol 1e-6); {secs:.1} s (limit 30 s)"),
    )
}

fn trace_and_overlap() -> Outcome {
    let cfg = verify::VerifyConfig::default();
    let chi = PureState::vacuum(1);
    let ens = ensemble();
    let (mut wt, mut wo) = (0.0f64, 0.0f64);
    for (i, rho) in ens.iter().enumerate() {
        wt = wt.max(verify::check_trace(rho, &chi, &cfg).residual);
        let eta = &ens[(i + 1) % ens.len()];
        wo = wo.max(verify::check_overlap(rho, eta, &cfg).residual);
    }
    outcome(
        wt <= 1e-7 && wo <= 1e-7,
        format!("worst trace residual {wt:.2e}, overlap residual {wo:.2e} (tol 1e-7)"),
    )
}

fn cauchy_schwarz() -> Outcome {
    let chi = PureState::vacuum(1);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let (mut max_ratio, mut eq_err) = (0.0f64, 0.0f64);
    for rho in ensemble() {
        let pairs: Vec<(Vec<f64>, Vec<f64>)> = (0..1000)
            .map(|_| (rand_point(&mut rng, 3.0), rand_point(&mut rng, 3.0)))
            .collect();
        for r in bounds::cauchy_schwarz_report(&rho, &chi, &pairs).unwrap() {
            max_ratio = max_ratio.max(r.ratio);
        }
        let diag: Vec<(Vec<f64>, Vec<f64>)> = pairs.iter().take(50).map(|(a, _)| (a.clone(), a.clone())).collect();
        for r in bounds::cauchy_schwarz_report(&rho, &chi, &diag).unwrap() {
            eq_err = eq_err.max((r.ratio - 1.0).abs());
        }
    }
    outcome(
        max_ratio <= 1.0 + 1e-9 && eq_err <= 1e-9,
        format!("max ratio {max_ratio:.12} (limit 1+1e-9); |ratio-1| at alpha=beta {eq_err:.2e}"),
    )
}

fn offdiag_closed_form() -> Outcome {
    let chi = PureState::vacuum(1);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let a = rand_point(&mut rng, 2.0);
        let b = rand_point(&mut rng, 2.0);
        let g = rand_point(&mut rng, 2.0);
        let closed = transforms::offdiag_wigner(&chi, &a, &b, &g).unwrap();
        let ca = chi.displaced(&a).unwrap();
        let cb = chi.displaced(&b).unwrap();
        let direct = transforms::wigner_kernel_at(1, |x, y| ca.eval(x) * cb.eval(y).conj(), &g, 20.0);
        worst = worst.max((closed - direct).norm());
    }
    outcome(worst <= 1e-7, format!("worst |closed - direct| {worst:.2e} over 50 triples (tol 1e-7)"))
}

fn offdiag_bounds() -> Outcome {
    let grid = Grid::desk();
    let chi = PureState::vacuum(1);
    let wchi = SeminormEstimator::new(transforms::wigner(&MixedState::pure(chi.clone()), &grid).unwrap());
    let pairs = index_pairs(4);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 3);
    let (mut violations, mut worst_lhs, mut worst_tight) = (0usize, 0.0f64, 0.0f64);
    for _ in 0..50 {
        let alpha = rand_point(&mut rng, 2.0);
        let beta = rand_point(&mut rng, 2.0);
        let field = SeminormEstimator::new(bounds::offdiag_field(&chi, &alpha, &beta, &grid).unwrap());
        for (a, b) in &pairs {
            let lhs = field.seminorm(a, b).unwrap();
            let tight = bounds::offdiag_bound_rhs(&wchi, a, b, &alpha, &beta, Variant::Tight).unwrap();
            let loose = bounds::offdiag_bound_rhs(&wchi, a, b, &alpha, &beta, Variant::Loose).unwrap();
            worst_lhs = worst_lhs.max(lhs / tight);
            worst_tight = worst_tight.max(tight / loose);
            if lhs > tight * (1.0 + 1e-6) || tight > loose * (1.0 + 1e-12) {
                violations += 1;
            }
        }
    }
    outcome(
        violations == 0,
        format!(
            "{violations} violations over {} cases; max lhs/tight {worst_lhs:.4}, max tight/loose {worst_tight:.4}",
            50 * pairs.len()
        ),
    )
}

fn theorem_bound() -> Outcome {
    let start = Instant::now();
    let grid = Grid::desk();
    let chi = PureState::vacuum(1);
    let mut states = ensemble();
    states.push(MixedState::vacuum(1));
    let pairs = index_pairs(4);
    let (mut worst_thm, mut worst_hus, mut fails) = (0.0f64, 0.0f64, 0usize);
    for rho in &states {
        let tb = TheoremBounds::new(rho, &chi, &grid).unwrap();
        for (a, b) in &pairs {
            let t = tb.theorem(a, b).unwrap();
            let h = tb.husimi_intermediate(a, b).unwrap();
            worst_thm = worst_thm.max(t.ratio);
            worst_hus = worst_hus.max(h.ratio);
            if t.ratio > 1.0 || h.ratio > 1.0 {
                fails += 1;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        fails == 0 && secs < 600.0,
        format!("max ratio theorem {worst_thm:.3e}, Husimi-intermediate {worst_hus:.3e}; {fails} violations; {secs:.1} s (limit 600 s)"),
    )
}

fn reproducing() -> Outcome {
    let cfg = verify::VerifyConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 4);
    let gauss = PureState::vacuum(1);
    let non_gauss = PureState::from_atoms(vec![
        states::Atom::new(vec![0], vec![0.0, 0.0], C64::new(0.8, 0.0)).unwrap(),
        states::Atom::new(vec![2], vec![0.0, 0.0], C64::new(0.6, 0.0)).unwrap(),
    ])
    .unwrap()
    .normalized()
    .unwrap();
    let ens = ensemble();
    let cases: Vec<(&MixedState, &PureState)> = vec![
        (&ens[0], &gauss),
        (&ens[1], &gauss),
        (&ens[2], &gauss),
        (&ens[3], &gauss),
        (&ens[4], &non_gauss),
    ];
    let mut worst: f64 = 0.0;
    for (rho, chi) in cases {
        let samples: Vec<(Vec<f64>, Vec<f64>)> = (0..10)
            .map(|_| (rand_point(&mut rng, 2.0), rand_point(&mut rng, 2.0)))
            .collect();
        worst = worst.max(verify::check_reproducing(rho, chi, &samples, &cfg).residual);
    }
    outcome(worst <= 1e-5, format!("worst residual {worst:.2e} over 10 samples x 5 states (tol 1e-5)"))
}

fn four_dimensional() -> Outcome {
    let chi = PureState::vacuum(1);
    let fock1 = MixedState::pure(PureState::fock(vec![1]));
    let points: Vec<Vec<f64>> = vec![
        vec![0.0, 0.0],
        vec![1.0, 1.0],
        vec![1.0, 0.0],
        vec![-0.5, 0.7],
        vec![0.3, -1.2],
        vec![-1.1, -0.4],
        vec![0.8, 0.2],
        vec![-0.2, 1.5],
    ];
    let mut detail = Vec::new();
    let mut ok = true;
    for (name, rho) in [("vacuum", MixedState::vacuum(1)), ("fock1", fock1)] {
        let dc48 = four_d::check_wigner_from_matel(&rho, &chi, &points, 48);
        let dc64 = four_d::check_wigner_from_matel(&rho, &chi, &points, 64);
        let wd48 = four_d::check_wigner_decomp(&rho, &chi, &points, 48);
        let wd64 = four_d::check_wigner_decomp(&rho, &chi, &points, 64);
        let reduces = |coarse: f64, fine: f64| fine <= coarse / 2.0 || fine <= four_d::FLOOR;
        ok &= dc64.residual <= 2e-3 && wd64.residual <= 5e-3;
        ok &= dc48.residual <= 2e-3 && wd48.residual <= 5e-3;
        ok &= reduces(dc48.residual, dc64.residual) && reduces(wd48.residual, wd64.residual);
        detail.push(format!(
            "{name}: double-char {:.2e}->{:.2e}, decomp {:.2e}->{:.2e}",
            dc48.residual, dc64.residual, wd48.residual, wd64.residual
        ));
    }
    outcome(ok, detail.join("; "))
}

fn momentum_marginal() -> Outcome {
    let grid = Grid::desk();
    let mut worst: f64 = 0.0;
    for psi in [PureState::vacuum(1), PureState::fock(vec![1])] {
        let w = transforms::wigner(&MixedState::pure(psi.clone()), &grid).unwrap();
        let marg = transforms::momentum_marginal(&w).unwrap();
        let err = marg.interior_error(DEFAULT_BAND, |p| {
            C64::new(transforms::momentum_density(&psi, p).unwrap(), 0.0)
        });
        // Independent closed forms.
        let err2 = marg.interior_error(DEFAULT_BAND, |p| {
            let g = (-p[0] * p[0]).exp() / PI.sqrt();
            let want = if psi == PureState::vacuum(1) { g } else { 2.0 * p[0] * p[0] * g };
            C64::new(want, 0.0)
        });
        worst = worst.max(err).max(err2);
    }
    outcome(worst <= 1e-8, format!("worst marginal error {worst:.2e} (tol 1e-8)"))
}

fn counterexamples() -> Outcome {
    let wide = Grid::phase_space_with(2048, &[320.0], &[8.0]).unwrap();
    let a = mi(&[1, 0]);
    let zero = mi(&[0, 0]);
    let mut values = Vec::new();
    for k in 1..=6 {
        let rho = states::heavy_tail(k).unwrap();
        let w = transforms::wigner(&rho, &wide).unwrap();
        values.push(seminorms::seminorm(&w, &a, &zero).unwrap());
    }
    let increasing = values.windows(2).all(|v| v[1] > v[0]);
    let plateau = verify::plateau_decay(&verify::VerifyConfig::default());
    let exponent = plateau.residual;
    let in_range = (0.5..=2.0).contains(&exponent);
    let shown: Vec<String> = values.iter().map(|v| format!("{v:.3}")).collect();
    outcome(
        increasing && in_range,
        format!(
            "heavy-tail |W|_(1,0),0 for K=1..6: [{}] ({}); plateau decay exponent {exponent:.3} (want [0.5, 2])",
            shown.join(", "),
            if increasing { "strictly increasing" } else { "NOT increasing" }
        ),
    )
}

fn joint_schwartz() -> Outcome {
    let cgrid = Grid::configuration(1, 256, 12.0).unwrap();
    let mut worst: f64 = 0.0;
    let mut violations = 0;
    for rho in ensemble() {
        let mut joint = std::collections::HashMap::new();
        for a in 0..=2u32 {
            for b in 0..=2u32 {
                let v = seminorms::joint_seminorm(rho.components(), &mi(&[a]), &mi(&[b]), &cgrid).unwrap();
                joint.insert((a, b), v);
            }
        }
        for a in 0..=2u32 {
            for c in 0..=2u32 {
                for b in 0..=2u32 {
                    for d in 0..=2u32 {
                        let k = seminorms::kernel_seminorm(&rho, &mi(&[a]), &mi(&[c]), &mi(&[b]), &mi(&[d]), &cgrid)
                            .unwrap();
                        let rhs = joint[&(a, b)] * joint[&(c, d)];
                        worst = worst.max(k / rhs);
                        if k > rhs {
                            violations += 1;
                        }
                    }
                }
            }
        }
    }
    outcome(
        violations == 0,
        format!("{violations} violations over 20 x 81 cases; max |K|/(joint*joint) {worst:.4}"),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "grid.N = 128\ngrid.L = 10\nseed = 7\n").unwrap();
    let run = |out: &str| {
        let path = dir.path().join(out);
        let status = Command::new(env!("CARGO_BIN_EXE_phasespace"))
            .args(["verify", "--demo", "vacuum", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&path)
            .output()
            .unwrap();
        (status.status.code(), std::fs::read(&path).unwrap_or_default())
    };
    let (c1, a) = run("a.csv");
    let (c2, b) = run("b.csv");
    outcome(
        c1 == Some(0) && c2 == Some(0) && !a.is_empty() && a == b,
        format!("exit codes {c1:?}/{c2:?}; {} bytes; identical: {}", a.len(), a == b),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 13] = [
        ("closed-form Gaussian suite", gaussian_suite),
        ("Wigner/quasicharacteristic duality", duality),
        ("trace and overlap formulas", trace_and_overlap),
        ("Cauchy-Schwarz matrix-element bound", cauchy_schwarz),
        ("off-diagonal Wigner closed form", offdiag_closed_form),
        ("off-diagonal seminorm bounds", offdiag_bounds),
        ("main seminorm bound and Husimi intermediate bound", theorem_bound),
        ("reproducing formula", reproducing),
        ("4-D identities with lattice refinement", four_dimensional),
        ("momentum marginal", momentum_marginal),
        ("counterexample behaviour", counterexamples),
        ("jointly-Schwartz kernel inequality", joint_schwartz),
        ("verify determinism", determinism),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let id = i + 1;
        if !filter.is_empty() && !filter.iter().any(|f| *f == id.to_string()) {
            continue;
        }
        let start = Instant::now();
        let o = run();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {id:>2} [{tag}] {name}: {} [{:.1} s]",
            o.detail,
            start.elapsed().as_secs_f64()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
