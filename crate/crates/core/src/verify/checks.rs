//! The individual identity checks run by the suite.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{VerifyConfig, VerifyReport};
use crate::error::Result;
use crate::grid::{Direction, Grid, Label, Rep, SampledFn};
use crate::multiindex::MultiIndex;
use crate::seminorms::seminorm;
use crate::states::{demo_state, heavy_tail, random, MixedState, PureState};
use crate::transforms::{
    husimi, husimi_direct, momentum_density, momentum_marginal, offdiag_wigner, quasichar_direct, standard_form,
    twisted_convolution_with, wigner, wigner_kernel_at, MatelSampler,
};

// Per-check seed offsets, so every check draws an independent stream.
const SEED_COMPANION: u64 = 0x11;
const SEED_HUSIMI: u64 = 0x22;
const SEED_CS: u64 = 0x33;
const SEED_OFFDIAG: u64 = 0x44;
const SEED_REPRO: u64 = 0x55;

fn rng(cfg: &VerifyConfig, offset: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(offset))
}

fn point(rng: &mut ChaCha8Rng, d: usize, r: f64) -> Vec<f64> {
    (0..d).map(|_| rng.gen_range(-r..r)).collect()
}

/// Independent second state for the overlap formula.
pub(crate) fn companion_state(n: usize, seed: u64) -> MixedState {
    let mut r = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(SEED_COMPANION));
    random::random_mixture(&mut r, n, 3, 3).with_name("companion")
}

fn grid_or_fail(check: &str, cfg: &VerifyConfig, rho: &MixedState) -> std::result::Result<Grid, VerifyReport> {
    cfg.grid_for(rho)
        .map_err(|e| VerifyReport::errored(check, cfg.tol(check), cfg.seed, &e))
}

fn non_analytic(check: &str, cfg: &VerifyConfig) -> VerifyReport {
    VerifyReport::skipped(
        check,
        cfg.tol(check),
        cfg.seed,
        "grid transforms do not resolve a discontinuous state",
    )
}

fn finish(check: &str, cfg: &VerifyConfig, r: Result<VerifyReport>) -> VerifyReport {
    r.unwrap_or_else(|e| VerifyReport::errored(check, cfg.tol(check), cfg.seed, &e))
}

/// `W_rho` against the forward symplectic Fourier transform of the
/// quasicharacteristic function sampled on the dual grid.
pub fn check_duality(rho: &MixedState, cfg: &VerifyConfig) -> VerifyReport {
    const CHECK: &str = "duality";
    if !rho.is_analytic() {
        return non_analytic(CHECK, cfg);
    }
    let grid = match grid_or_fail(CHECK, cfg, rho) {
        Ok(g) => g,
        Err(r) => return r,
    };
    finish(CHECK, cfg, (|| {
        let w = wigner(rho, &grid)?;
        let x = quasichar_direct(rho, &grid.symplectic_dual())?;
        let wx = x.symplectic_fourier(Direction::Forward)?;
        let residual = w.interior_max_diff(&wx, cfg.band)?;
        let samples = grid.interior_indices(cfg.band).len();
        Ok(VerifyReport::judged(CHECK, residual, cfg.tol(CHECK), samples, &grid, cfg.seed)
            .with_detail("W vs symplectic Fourier transform of X"))
    })())
}

/// `tr rho = int W = (2pi)^{-n} int Q`.
pub fn check_trace(rho: &MixedState, chi: &PureState, cfg: &VerifyConfig) -> VerifyReport {
    const CHECK: &str = "trace";
    if !rho.is_analytic() {
        return non_analytic(CHECK, cfg);
    }
    let grid = match grid_or_fail(CHECK, cfg, rho) {
        Ok(g) => g,
        Err(r) => return r,
    };
    finish(CHECK, cfg, (|| {
        let tr = rho.trace();
        let iw = wigner(rho, &grid)?.quadrature().re;
        let iq = husimi(rho, chi, &grid)?.quadrature().re / (2.0 * PI).powi(rho.dim() as i32);
        let residual = (iw - tr).abs().max((iq - tr).abs());
        Ok(VerifyReport::judged(CHECK, residual, cfg.tol(CHECK), grid.len(), &grid, cfg.seed)
            .with_detail(format!("tr = {tr:.12}, int W = {iw:.12}, int Q/(2pi)^n = {iq:.12}")))
    })())
}

/// `tr[rho eta] = (2pi)^n int W_rho W_eta` against the spectral sum.
pub fn check_overlap(rho: &MixedState, eta: &MixedState, cfg: &VerifyConfig) -> VerifyReport {
    const CHECK: &str = "overlap";
    if !rho.is_analytic() || !eta.is_analytic() {
        return non_analytic(CHECK, cfg);
    }
    let grid = match grid_or_fail(CHECK, cfg, rho) {
        Ok(g) => g,
        Err(r) => return r,
    };
    finish(CHECK, cfg, (|| {
        let wr = wigner(rho, &grid)?;
        let we = wigner(eta, &grid)?;
        let dot: f64 = wr.values().iter().zip(we.values()).map(|(a, b)| a.re * b.re).sum();
        let phase_space = (2.0 * PI).powi(rho.dim() as i32) * grid.cell_volume() * dot;
        let mut exact = 0.0;
        for (l, psi) in rho.components() {
            for (m, phi) in eta.components() {
                exact += l * m * psi.inner(phi)?.norm_sqr();
            }
        }
        let residual = (phase_space - exact).abs();
        Ok(VerifyReport::judged(CHECK, residual, cfg.tol(CHECK), grid.len(), &grid, cfg.seed)
            .with_detail(format!("against `{}`; exact {exact:.12}", eta.name())))
    })())
}

/// FFT-convolution Husimi function against `<chi_a|rho|chi_a>` at seeded nodes.
pub fn check_husimi(rho: &MixedState, chi: &PureState, cfg: &VerifyConfig) -> VerifyReport {
    const CHECK: &str = "husimi";
    const NODES: usize = 16;
    if !rho.is_analytic() {
        return non_analytic(CHECK, cfg);
    }
    let grid = match grid_or_fail(CHECK, cfg, rho) {
        Ok(g) => g,
        Err(r) => return r,
    };
    finish(CHECK, cfg, (|| {
        let q = husimi(rho, chi, &grid)?;
        let mut r = rng(cfg, SEED_HUSIMI);
        let d = grid.dim();
        let mut residual: f64 = 0.0;
        for _ in 0..NODES {
            let idx: Vec<usize> = (0..d)
                .map(|j| {
                    let t = r.gen_range(-4.0..4.0);
                    ((t + grid.half_extent(j)) / grid.spacing(j)).round() as usize
                })
                .collect();
            let flat = grid.ravel(&idx);
            let direct = husimi_direct(rho, chi, &grid.point(flat))?;
            residual = residual.max((q.values()[flat].re - direct).abs());
        }
        Ok(VerifyReport::judged(CHECK, residual, cfg.tol(CHECK), NODES, &grid, cfg.seed)
            .with_detail("convolution vs direct matrix element"))
    })())
}

/// `|M(a,b)|^2 <= Q(a) Q(b)` over seeded pairs, with equality on the diagonal.
/// The residual is the larger of the worst excess ratio and the worst diagonal
/// departure from 1.
pub fn check_cauchy_schwarz(rho: &MixedState, chi: &PureState, cfg: &VerifyConfig) -> VerifyReport {
    const CHECK: &str = "cauchy-schwarz";
    const PAIRS: usize = 1000;
    const DIAGONAL: usize = 50;
    finish(CHECK, cfg, (|| {
        let s = MatelSampler::new(rho, chi)?;
        let d = 2 * rho.dim();
        let mut r = rng(cfg, SEED_CS);
        let (mut excess, mut diag, mut worst_ratio) = (0.0f64, 0.0f64, 0.0f64);
        for i in 0..PAIRS {
            let a = point(&mut r, d, 3.0);
            let b = point(&mut r, d, 3.0);
            let (oa, ob) = (s.overlaps(&a)?, s.overlaps(&b)?);
            let m = MatelSampler::combine(rho, &oa, &ob).norm_sqr();
            let qa = MatelSampler::combine(rho, &oa, &oa).re;
            let qb = MatelSampler::combine(rho, &ob, &ob).re;
            let ratio = if m == 0.0 { 0.0 } else { m / (qa * qb) };
            worst_ratio = worst_ratio.max(ratio);
            excess = excess.max(ratio - 1.0);
            if i < DIAGONAL {
                let maa = MatelSampler::combine(rho, &oa, &oa);
                if qa > 0.0 {
                    diag = diag.max((maa.norm_sqr() / (qa * qa) - 1.0).abs());
                }
            }
        }
        let residual = excess.max(0.0).max(diag);
        let grid = cfg.grid(rho.dim())?;
        Ok(VerifyReport::judged(CHECK, residual, cfg.tol(CHECK), PAIRS + DIAGONAL, &grid, cfg.seed)
            .with_detail(format!("max ratio {worst_ratio:.12}; diagonal |ratio - 1| {diag:.3e}")))
    })())
}

/// Closed-form off-diagonal Wigner transform against direct kernel quadrature.
pub fn check_offdiag(chi: &PureState, cfg: &VerifyConfig) -> VerifyReport {
    const CHECK: &str = "offdiag";
    const TRIPLES: usize = 20;
    if !chi.is_analytic() {
        return non_analytic(CHECK, cfg);
    }
    finish(CHECK, cfg, (|| {
        let n = chi.dim();
        let mut r = rng(cfg, SEED_OFFDIAG);
        let mut residual: f64 = 0.0;
        for _ in 0..TRIPLES {
            let a = point(&mut r, 2 * n, 2.0);
            let b = point(&mut r, 2 * n, 2.0);
            let g = point(&mut r, 2 * n, 2.0);
            let closed = offdiag_wigner(chi, &a, &b, &g)?;
            let (ca, cb) = (chi.displaced(&a)?, chi.displaced(&b)?);
            let direct = wigner_kernel_at(n, |x, y| ca.eval(x) * cb.eval(y).conj(), &g, 20.0);
            residual = residual.max((closed - direct).norm());
        }
        let grid = cfg.grid(n)?;
        Ok(VerifyReport::judged(CHECK, residual, cfg.tol(CHECK), TRIPLES, &grid, cfg.seed)
            .with_detail("closed form vs kernel quadrature"))
    })())
}

/// The reproducing formula in its one-sided form, applied on each side:
/// `M(a,b) = (2pi)^{-n} int <chi_a|chi_c> M(c,b) dc = (2pi)^{-n} int M(a,c) <chi_c|chi_b> dc`,
/// both integrals by the rectangle rule over the configured grid.
pub fn check_reproducing(
    rho: &MixedState,
    chi: &PureState,
    samples: &[(Vec<f64>, Vec<f64>)],
    cfg: &VerifyConfig,
) -> VerifyReport {
    const CHECK: &str = "reproducing";
    if !chi.is_analytic() {
        return non_analytic(CHECK, cfg);
    }
    finish(CHECK, cfg, (|| {
        let n = rho.dim();
        let grid = cfg.grid(n)?;
        let s = MatelSampler::new(rho, chi)?;
        let nodes: Vec<Vec<f64>> = (0..grid.len()).map(|i| grid.point(i)).collect();
        let node_overlaps = nodes
            .par_iter()
            .map(|c| {
                let oc = s.overlaps(c)?;
                Ok((chi.displaced(c)?, oc))
            })
            .collect::<Result<Vec<_>>>()?;
        let scale = grid.cell_volume() / (2.0 * PI).powi(n as i32);
        let mut residual: f64 = 0.0;
        for (a, b) in samples {
            let (oa, ob) = (s.overlaps(a)?, s.overlaps(b)?);
            let (ca, cb) = (chi.displaced(a)?, chi.displaced(b)?);
            let m = MatelSampler::combine(rho, &oa, &ob);
            let terms = node_overlaps
                .par_iter()
                .map(|(cc, oc)| {
                    let left = ca.inner(cc)? * MatelSampler::combine(rho, oc, &ob);
                    let right = MatelSampler::combine(rho, &oa, oc) * cc.inner(&cb)?;
                    Ok((left, right))
                })
                .collect::<Result<Vec<_>>>()?;
            let (mut left, mut right) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
            for (l, r) in terms {
                left += l;
                right += r;
            }
            residual = residual.max((left * scale - m).norm()).max((right * scale - m).norm());
        }
        Ok(VerifyReport::judged(CHECK, residual, cfg.tol(CHECK), samples.len(), &grid, cfg.seed)
            .with_detail("one-sided reproducing formula on both sides"))
    })())
}

/// [`check_reproducing`] on 10 seeded pairs in `[-2, 2]^{2n}`.
pub(crate) fn check_reproducing_seeded(rho: &MixedState, chi: &PureState, cfg: &VerifyConfig) -> VerifyReport {
    let mut r = rng(cfg, SEED_REPRO);
    let d = 2 * rho.dim();
    let samples: Vec<(Vec<f64>, Vec<f64>)> = (0..10).map(|_| (point(&mut r, d, 2.0), point(&mut r, d, 2.0))).collect();
    check_reproducing(rho, chi, &samples, cfg)
}

/// `int W dx` against `sum_j lambda_j |psi_j_hat(p)|^2` on the interior band.
pub fn check_marginal(rho: &MixedState, cfg: &VerifyConfig) -> VerifyReport {
    let check = if rho.is_analytic() { "marginal" } else { "marginal-nonanalytic" };
    let grid = match grid_or_fail(check, cfg, rho) {
        Ok(g) => g,
        Err(r) => return r,
    };
    finish(check, cfg, (|| {
        let marg = momentum_marginal(&wigner(rho, &grid)?)?;
        for (_, psi) in rho.components() {
            momentum_density(psi, &vec![0.0; rho.dim()])?;
        }
        let residual = marg.interior_error(cfg.band, |p| {
            let v: f64 = rho
                .components()
                .iter()
                .map(|(w, psi)| w * momentum_density(psi, p).expect("checked"))
                .sum();
            C64::new(v, 0.0)
        });
        Ok(VerifyReport::judged(check, residual, cfg.tol(check), marg.grid().len(), &grid, cfg.seed)
            .with_detail("momentum marginal vs |psi_hat|^2"))
    })())
}

/// Physicists' Hermite polynomial.
fn hermite_poly(k: u32, t: f64) -> f64 {
    let (mut h0, mut h1) = (1.0, 2.0 * t);
    if k == 0 {
        return h0;
    }
    for j in 1..k {
        let h2 = 2.0 * t * h1 - 2.0 * j as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    h1
}

/// `d^k exp(-c t^2) = (-1)^k c^{k/2} H_k(sqrt(c) t) exp(-c t^2)`.
fn gauss_deriv(k: u32, c: f64, t: f64) -> f64 {
    let s = c.sqrt();
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    sign * s.powi(k as i32) * hermite_poly(k, s * t) * (-c * t * t).exp()
}

/// Strength of the antisymmetric form `c J` used by the expansion check.
const TWIST: f64 = 0.8;

/// Derivative expansion of the twisted convolution of two unit Gaussians,
/// `d^a (F * G) = sum_{a' <= a} C(a,a') int e^{...} (d^{a'} F)(a - b) (i W b)^{a - a'} G(b) db`
/// with `C(a,a') = binom(a,a') 2^{-|a-a'|}`, against the closed form
/// `F * G (a) = pi exp(-(1/4 + c^2/16)|a|^2)` for the form `c J` and `n = 1`.
pub fn check_twisted_expansion(cfg: &VerifyConfig) -> VerifyReport {
    const CHECK: &str = "twisted";
    finish(CHECK, cfg, (|| {
        let grid = cfg.grid(1)?;
        let form = standard_form(1) * TWIST;
        let kappa = 0.25 + TWIST * TWIST / 16.0;
        let label = Label::new(Rep::Other("gaussian".into()), "");
        let points = [[0.0, 0.0], [0.7, -0.3], [-1.2, 0.9], [1.5, 1.1]];
        let orders = MultiIndex::all_up_to(2, 3);
        let mut residual: f64 = 0.0;
        for alpha in points {
            for a in &orders {
                let e = a.entries();
                let exact = PI * gauss_deriv(e[0], kappa, alpha[0]) * gauss_deriv(e[1], kappa, alpha[1]);
                let mut sum = C64::new(0.0, 0.0);
                for ap in a.box_below() {
                    let rest = a.checked_sub(&ap)?;
                    let coeff = a.binom(&ap)? as f64 * 0.5f64.powi(rest.order() as i32);
                    let weighted = SampledFn::from_fn(grid.clone(), label.clone(), |b| {
                        let wb = [form[(0, 0)] * b[0] + form[(0, 1)] * b[1], form[(1, 0)] * b[0] + form[(1, 1)] * b[1]];
                        let mut f = C64::new((-(b[0] * b[0] + b[1] * b[1]) / 2.0).exp(), 0.0);
                        for j in 0..2 {
                            f *= (C64::new(0.0, 1.0) * wb[j]).powu(rest.entries()[j]);
                        }
                        f
                    })?;
                    let da = ap.entries().to_vec();
                    let fder = |y: &[f64]| C64::new(gauss_deriv(da[0], 0.5, y[0]) * gauss_deriv(da[1], 0.5, y[1]), 0.0);
                    sum += twisted_convolution_with(fder, &weighted, &form, &alpha)? * coeff;
                }
                residual = residual.max((sum - exact).norm());
            }
        }
        Ok(VerifyReport::judged(CHECK, residual, cfg.tol(CHECK), points.len() * orders.len(), &grid, cfg.seed)
            .with_detail("derivative expansion vs closed form, |a| <= 3"))
    })())
}

/// Fitted `k` in `sup_x |W(x, p)| ~ p^{-k}` for the plateau state over
/// `p in [4, 10]`. The residual field carries `k`; the check passes when
/// `0.5 <= k <= 2`.
pub fn plateau_decay(cfg: &VerifyConfig) -> VerifyReport {
    const CHECK: &str = "plateau-decay";
    let r = (|| -> Result<VerifyReport> {
        let rho = demo_state("plateau", None)?;
        let grid = cfg.grid(1)?;
        let w = wigner(&rho, &grid)?;
        let band = grid.interior(cfg.band);
        let npts = grid.points();
        let (mut lx, mut ly) = (Vec::new(), Vec::new());
        for kp in band.clone() {
            let p = grid.coord(1, kp);
            if !(4.0..=10.0).contains(&p) {
                continue;
            }
            let sup = band
                .clone()
                .map(|kx| w.values()[kx * npts + kp].norm())
                .fold(0.0, f64::max);
            lx.push(p.ln());
            ly.push(sup.ln());
        }
        if lx.len() < 2 {
            return Ok(VerifyReport::skipped(CHECK, 2.0, cfg.seed, "grid interior does not reach p in [4, 10]"));
        }
        let m = lx.len() as f64;
        let (mx, my) = (lx.iter().sum::<f64>() / m, ly.iter().sum::<f64>() / m);
        let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
        let k = -sxy / sxx;
        let mut rep = VerifyReport::judged(CHECK, k, 2.0, lx.len(), &grid, cfg.seed)
            .with_detail(format!("fitted decay exponent {k:.4} over {} momenta; accepted range [0.5, 2]", lx.len()));
        if k < 0.5 {
            rep.status = super::Status::Fail;
        }
        Ok(rep)
    })();
    r.unwrap_or_else(|e| VerifyReport::errored(CHECK, 2.0, cfg.seed, &e))
}

/// Phase-space grid wide enough for the heavy-tail trend, K up to 6.
pub fn heavy_tail_grid() -> Grid {
    Grid::phase_space_with(2048, &[320.0], &[8.0]).expect("valid grid")
}

/// `|W|_{(1,0),0}` of the heavy-tail mixtures for K = 1..6 on [`heavy_tail_grid`].
/// Informational: reports the values and whether they increase.
pub fn divergence_trend(cfg: &VerifyConfig) -> VerifyReport {
    const CHECK: &str = "divergence-trend";
    let grid = heavy_tail_grid();
    let r = (|| -> Result<Vec<f64>> {
        let a = MultiIndex::new(vec![1, 0])?;
        let z = MultiIndex::zeros(2);
        (1..=6)
            .map(|k| seminorm(&wigner(&heavy_tail(k)?, &grid)?, &a, &z))
            .collect()
    })();
    match r {
        Ok(values) => {
            let increasing = values.windows(2).all(|v| v[1] > v[0]);
            let shown: Vec<String> = values.iter().map(|v| format!("{v:.4}")).collect();
            VerifyReport::info(
                CHECK,
                *values.last().expect("six values"),
                values.len(),
                &grid,
                cfg.seed,
                format!(
                    "|W|_(1,0),0 for K = 1..6: {}; {}",
                    shown.join(" "),
                    if increasing { "strictly increasing" } else { "not increasing" }
                ),
            )
        }
        Err(e) => VerifyReport::errored(CHECK, f64::NAN, cfg.seed, &e),
    }
}
