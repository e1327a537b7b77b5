//! Evaluators for the explicit inequalities: the Cauchy-Schwarz bound on
//! matrix elements, the off-diagonal Wigner seminorm bounds, and the seminorm
//! bound on `W_rho` together with its Husimi intermediate.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{norm, Grid, Label, PhaseSpaceFn, Rep, SampledFn};
use crate::multiindex::MultiIndex;
use crate::seminorms::SeminormEstimator;
use crate::states::{MixedState, PureState};
use crate::transforms::offdiag::is_standard_gaussian;
use crate::transforms::{husimi, offdiag_wigner, wigner, wigner_of_kernel, MatelSampler};

/// Slack allowed on `lhs / rhs` before a report fails.
pub const BOUND_TOL: f64 = 1e-6;
/// Largest total order of a decay-norm index the theorem evaluator accepts.
pub const DECAY_ORDER_CAP: u32 = 40;

#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub label: String,
    pub state: String,
    pub indices: Vec<MultiIndex>,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub pass: bool,
}

impl BoundReport {
    pub fn new(label: impl Into<String>, state: impl Into<String>, indices: Vec<MultiIndex>, lhs: f64, rhs: f64) -> Self {
        let ratio = if lhs == 0.0 { 0.0 } else { lhs / rhs };
        Self {
            label: label.into(),
            state: state.into(),
            indices,
            lhs,
            rhs,
            ratio,
            pass: ratio <= 1.0 + BOUND_TOL,
        }
    }
}

/// `|M(a, b)|^2 <= Q(a) Q(b)` for every pair.
pub fn cauchy_schwarz_report(
    rho: &MixedState,
    chi: &PureState,
    pairs: &[(Vec<f64>, Vec<f64>)],
) -> Result<Vec<BoundReport>> {
    let s = MatelSampler::new(rho, chi)?;
    pairs
        .iter()
        .map(|(a, b)| {
            let oa = s.overlaps(a)?;
            let ob = s.overlaps(b)?;
            let m = MatelSampler::combine(rho, &oa, &ob);
            let qa = MatelSampler::combine(rho, &oa, &oa).re;
            let qb = MatelSampler::combine(rho, &ob, &ob).re;
            Ok(BoundReport::new("cauchy-schwarz", rho.name(), Vec::new(), m.norm_sqr(), qa * qb))
        })
        .collect()
}

/// The Wigner transform of `|chi_a><chi_b|` sampled on `grid`.
pub fn offdiag_field(chi: &PureState, alpha: &[f64], beta: &[f64], grid: &Grid) -> Result<PhaseSpaceFn> {
    let label = Label::new(Rep::OffDiagonal, "");
    if grid.half_dim() != chi.dim() {
        return Err(Error::DimensionMismatch(format!(
            "reference state in {} dimensions on a grid over R^{}",
            chi.dim(),
            grid.dim()
        )));
    }
    if is_standard_gaussian(chi) {
        offdiag_wigner(chi, alpha, beta, &vec![0.0; grid.dim()])?;
        return SampledFn::from_fn(grid.clone(), label, |g| offdiag_wigner(chi, alpha, beta, g).expect("checked"));
    }
    let ca = chi.displaced(alpha)?;
    let cb = chi.displaced(beta)?;
    wigner_of_kernel(|u, v| ca.eval(u) * cb.eval(v).conj(), grid, label)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    Tight,
    Loose,
}

/// Right-hand side of the off-diagonal seminorm bound for
/// `|W_{|chi_a><chi_b|}|_{a,b}` given the seminorms of `W_chi`.
pub fn offdiag_bound_rhs(
    wchi: &SeminormEstimator,
    a: &MultiIndex,
    b: &MultiIndex,
    alpha: &[f64],
    beta: &[f64],
    variant: Variant,
) -> Result<f64> {
    match variant {
        Variant::Loose => {
            let k = (a.order() + b.order()) as i32;
            let spread = 1.0 + norm(alpha) + norm(beta);
            Ok(4f64.powi(k) * spread.powi(k) * wchi.norm_sum(a, b)?)
        }
        Variant::Tight => {
            let mut total = 0.0;
            for c in b.box_below() {
                let bc = b.binom(&c)? as f64;
                let sem_c = b.checked_sub(&c)?;
                let c_hat = c.hat()?;
                for d in a.box_below() {
                    let ad = a.binom(&d)? as f64;
                    let w = wchi.seminorm(&a.checked_sub(&d)?, &sem_c)?;
                    if w == 0.0 {
                        continue;
                    }
                    let half = 0.5f64.powi(d.order() as i32);
                    for e in c.box_below() {
                        let ce = c.binom(&e)? as f64;
                        let e_hat = e.hat()?;
                        let beta_c = c_hat.checked_sub(&e_hat)?;
                        for f in d.box_below() {
                            let df = d.binom(&f)? as f64;
                            let ea = e_hat.checked_add(&f)?;
                            let eb = beta_c.checked_add(&d.checked_sub(&f)?)?;
                            let mono = (ea.monomial(alpha) * eb.monomial(beta)).abs();
                            total += bc * ad * ce * df * half * w * mono;
                        }
                    }
                }
            }
            Ok(total)
        }
    }
}

/// Precomputed seminorm estimators for `W_rho`, `W_chi` and `Q_rho` on one grid,
/// so sweeps over `(a, b)` share every seminorm evaluation.
pub struct TheoremBounds {
    state: String,
    n: usize,
    w_rho: SeminormEstimator,
    w_chi: SeminormEstimator,
    q_rho: SeminormEstimator,
}

impl TheoremBounds {
    pub fn new(rho: &MixedState, chi: &PureState, grid: &Grid) -> Result<Self> {
        let w_rho = wigner(rho, grid)?;
        let w_chi = wigner(&MixedState::pure(chi.clone()), grid)?;
        let q_rho = husimi(rho, chi, grid)?;
        Ok(Self {
            state: rho.name().to_string(),
            n: rho.dim(),
            w_rho: SeminormEstimator::new(w_rho),
            w_chi: SeminormEstimator::new(w_chi),
            q_rho: SeminormEstimator::new(q_rho),
        })
    }

    /// `2(a + hat(b)) + k` per component; `flip = false` drops the hat.
    fn decay_index(&self, a: &MultiIndex, b: &MultiIndex, k: u32, flip: bool) -> Result<MultiIndex> {
        let bb = if flip { b.hat()? } else { b.clone() };
        let idx = a.checked_add(&bb)?.scaled(2)?.plus_scalar(k)?;
        if idx.order() > DECAY_ORDER_CAP {
            return Err(Error::InvalidIndex(format!(
                "decay index {idx} has order {} above the cap {DECAY_ORDER_CAP}",
                idx.order()
            )));
        }
        Ok(idx)
    }

    fn lhs(&self, a: &MultiIndex, b: &MultiIndex) -> Result<f64> {
        self.w_rho.seminorm(a, b)
    }

    /// `|W_rho|_{a,b} <= (2pi)^{5n} 2^{4(|a|+|b|+n)} ||W_chi||_{a,b}
    /// ||W_chi||_{2(a+hat b)+6} ||W_rho||_{2(a+hat b)+4}`.
    pub fn theorem(&self, a: &MultiIndex, b: &MultiIndex) -> Result<BoundReport> {
        self.theorem_with(a, b, true)
    }

    /// The theorem bound with the position/momentum flip of `b` optionally
    /// disabled (diagnostic only; the bound is stated with the flip).
    pub fn theorem_with(&self, a: &MultiIndex, b: &MultiIndex, flip: bool) -> Result<BoundReport> {
        let n = self.n as i32;
        let k = (a.order() + b.order()) as i32;
        let pref = (2.0 * PI).powi(5 * n) * 2f64.powi(4 * (k + n));
        let rhs = pref
            * self.w_chi.norm_sum(a, b)?
            * self.w_chi.decay_norm(&self.decay_index(a, b, 6, flip)?)?
            * self.w_rho.decay_norm(&self.decay_index(a, b, 4, flip)?)?;
        let label = if flip { "theorem" } else { "theorem-unflipped" };
        Ok(BoundReport::new(label, &self.state, vec![a.clone(), b.clone()], self.lhs(a, b)?, rhs))
    }

    /// `|W_rho|_{a,b} <= (pi/2)^{2n} 2^{2(|a|+|b|)} ||W_chi||_{a,b} ||Q_rho||_{2(a+hat b)+4}`.
    pub fn husimi_intermediate(&self, a: &MultiIndex, b: &MultiIndex) -> Result<BoundReport> {
        let n = self.n as i32;
        let k = (a.order() + b.order()) as i32;
        let pref = (PI / 2.0).powi(2 * n) * 2f64.powi(2 * k);
        let rhs = pref * self.w_chi.norm_sum(a, b)? * self.q_rho.decay_norm(&self.decay_index(a, b, 4, true)?)?;
        Ok(BoundReport::new(
            "husimi-intermediate",
            &self.state,
            vec![a.clone(), b.clone()],
            self.lhs(a, b)?,
            rhs,
        ))
    }
}

/// Every `(a, b)` with `|a| + |b| <= max_order`, in lexicographic order of the
/// concatenated index.
pub fn index_pairs(dim: usize, max_order: u32) -> Vec<(MultiIndex, MultiIndex)> {
    MultiIndex::all_up_to(2 * dim, max_order)
        .into_iter()
        .map(|ab| {
            let e = ab.entries();
            (
                MultiIndex::new(e[..dim].to_vec()).expect("fits"),
                MultiIndex::new(e[dim..].to_vec()).expect("fits"),
            )
        })
        .collect()
}

/// Theorem-bound reports for every `(a, b)` with `|a| + |b| <= max_order`.
pub fn bound_sweep(rho: &MixedState, chi: &PureState, grid: &Grid, max_order: u32) -> Result<Vec<BoundReport>> {
    let tb = TheoremBounds::new(rho, chi, grid)?;
    index_pairs(grid.dim(), max_order)
        .par_iter()
        .map(|(a, b)| tb.theorem(a, b))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::random;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn mi(e: &[u32]) -> MultiIndex {
        MultiIndex::new(e.to_vec()).unwrap()
    }

    #[test]
    fn cauchy_schwarz_examples() {
        let chi = PureState::vacuum(1);
        let vac = MixedState::vacuum(1);
        let r = cauchy_schwarz_report(&vac, &chi, &[(vec![0.0, 0.0], vec![2.0, 0.0])]).unwrap();
        assert!((r[0].lhs - (-2.0f64).exp()).abs() < 1e-12);
        assert!((r[0].ratio - 1.0).abs() < 1e-8);

        let mix = MixedState::new(vec![0.5, 0.5], vec![PureState::fock(vec![0]), PureState::fock(vec![1])]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pairs: Vec<_> = (0..100)
            .map(|_| {
                (
                    vec![rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)],
                    vec![rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)],
                )
            })
            .collect();
        let reports = cauchy_schwarz_report(&mix, &chi, &pairs).unwrap();
        assert!(reports.iter().all(|r| r.ratio <= 1.0 + 1e-9));
        assert!(reports.iter().any(|r| r.ratio < 0.99));
        let diag: Vec<_> = pairs.iter().map(|(a, _)| (a.clone(), a.clone())).collect();
        for r in cauchy_schwarz_report(&mix, &chi, &diag).unwrap() {
            assert!((r.ratio - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn offdiag_bounds_hold() {
        let grid = Grid::desk();
        let chi = PureState::vacuum(1);
        let wchi = SeminormEstimator::new(wigner(&MixedState::pure(chi.clone()), &grid).unwrap());
        let zero = mi(&[0, 0]);
        let loose = offdiag_bound_rhs(&wchi, &zero, &zero, &[1.0, 0.3], &[-0.2, 0.5], Variant::Loose).unwrap();
        assert!((loose - 1.0 / PI).abs() < 1e-6);

        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let pairs = index_pairs(2, 4);
        for _ in 0..200 {
            let a = mi(&[rng.gen_range(0..=2), rng.gen_range(0..=2)]);
            let b = mi(&[rng.gen_range(0..=2), rng.gen_range(0..=2)]);
            let al = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
            let be = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
            let t = offdiag_bound_rhs(&wchi, &a, &b, &al, &be, Variant::Tight).unwrap();
            let l = offdiag_bound_rhs(&wchi, &a, &b, &al, &be, Variant::Loose).unwrap();
            assert!(t <= l * (1.0 + 1e-12), "{a} {b}: {t} > {l}");
        }
        for _ in 0..3 {
            let al = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
            let be = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
            let field = SeminormEstimator::new(offdiag_field(&chi, &al, &be, &grid).unwrap());
            for (a, b) in &pairs {
                let lhs = field.seminorm(a, b).unwrap();
                let t = offdiag_bound_rhs(&wchi, a, b, &al, &be, Variant::Tight).unwrap();
                assert!(lhs <= t * (1.0 + 1e-6), "{a} {b}: {lhs} > {t}");
            }
        }
    }

    #[test]
    fn non_gaussian_field_matches_closed_form() {
        let grid = Grid::phase_space(1, 64, 8.0).unwrap();
        let chi = PureState::fock(vec![1]);
        let al = [0.5, -0.3];
        let be = [-0.4, 0.8];
        let f = offdiag_field(&chi, &al, &be, &grid).unwrap();
        for flat in [100usize, 2080, 3000] {
            let g = grid.point(flat);
            let want = offdiag_wigner(&chi, &al, &be, &g).unwrap();
            assert!((f.values()[flat] - want).norm() < 1e-8);
        }
    }

    #[test]
    fn theorem_vacuum_and_flip() {
        let grid = Grid::desk();
        let chi = PureState::vacuum(1);
        let tb = TheoremBounds::new(&MixedState::vacuum(1), &chi, &grid).unwrap();
        let zero = mi(&[0, 0]);
        let r = tb.theorem(&zero, &zero).unwrap();
        assert!((r.lhs - 1.0 / PI).abs() < 1e-6);
        assert!(r.ratio < 1e-3 && r.pass);
        let b = mi(&[1, 0]);
        let flipped = tb.theorem(&zero, &b).unwrap();
        let plain = tb.theorem_with(&zero, &b, false).unwrap();
        assert!(flipped.rhs != plain.rhs);
        assert!(tb.husimi_intermediate(&zero, &b).unwrap().pass);
    }

    #[test]
    fn theorem_random_mixture() {
        let grid = Grid::desk();
        let chi = PureState::vacuum(1);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let rho = random::random_mixture(&mut rng, 1, 3, 3);
        let reports = bound_sweep(&rho, &chi, &grid, 2).unwrap();
        assert_eq!(reports.len(), index_pairs(2, 2).len());
        assert!(reports.iter().all(|r| r.pass));
    }
}
