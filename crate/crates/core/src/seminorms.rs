//! Grid estimates of Schwartz-type seminorms: phase-space decay/derivative
//! seminorms and their box sums, jointly-Schwartz seminorms of wavefunction
//! families, kernel seminorms and sandwich operator seminorms.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fft;
use crate::grid::{Grid, PhaseSpaceFn, SampledFn, DEFAULT_BAND};
use crate::multiindex::MultiIndex;
use crate::states::{MixedState, PureState};

/// Local maxima refined below grid resolution.
const MAX_CANDIDATES: usize = 8;
/// Lagrange stencil width (degree 7).
const STENCIL: usize = 8;
const SWEEPS: usize = 3;
const GOLDEN_STEPS: usize = 40;
/// Largest configuration grid the operator seminorm will materialize.
const MAX_OPERATOR_POINTS: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// `|F|_{a,b}` of a phase-space function.
    Decay,
    /// `||F||_{a,b}`, the box sum of decay seminorms.
    NormSum,
    /// Jointly-Schwartz seminorm of a wavefunction family.
    Joint,
    /// `|K|_{(a,c),(b,d)}` of a kernel.
    Kernel,
    /// `|E|_{a,b,c,d}` of an operator.
    Operator,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Decay => "decay",
            Family::NormSum => "norm-sum",
            Family::Joint => "joint",
            Family::Kernel => "kernel",
            Family::Operator => "operator",
        })
    }
}

/// A seminorm value with the grid it was computed on.
#[derive(Clone, Debug, PartialEq)]
pub struct SeminormReport {
    pub family: Family,
    pub rep: String,
    pub indices: Vec<MultiIndex>,
    pub value: f64,
    pub points: usize,
    pub half_extents: Vec<f64>,
    pub band: f64,
}

impl SeminormReport {
    /// `family,"a","b",value,N,L,band` with indices quoted.
    pub fn csv_line(&self) -> String {
        let idx: Vec<String> = self.indices.iter().map(|i| format!("\"{i}\"")).collect();
        let ext: Vec<String> = self.half_extents.iter().map(|l| format!("{l}")).collect();
        format!(
            "{}-{},{},{:.16e},{},\"{}\",{}",
            self.rep,
            self.family,
            idx.join(","),
            self.value,
            self.points,
            ext.join(","),
            self.band
        )
    }
}

/// Memoized seminorm evaluation on one sampled function. Derivative fields and
/// seminorm values are cached, so box sums over overlapping index sets are cheap.
pub struct SeminormEstimator {
    f: PhaseSpaceFn,
    band: f64,
    interior: Vec<usize>,
    derivs: RwLock<HashMap<MultiIndex, Arc<SampledFn>>>,
    values: RwLock<HashMap<(MultiIndex, MultiIndex), f64>>,
}

impl SeminormEstimator {
    pub fn new(f: PhaseSpaceFn) -> Self {
        Self::with_band(f, DEFAULT_BAND)
    }

    pub fn with_band(f: PhaseSpaceFn, band: f64) -> Self {
        let interior = f.grid().interior_indices(band);
        Self {
            f,
            band,
            interior,
            derivs: RwLock::new(HashMap::new()),
            values: RwLock::new(HashMap::new()),
        }
    }

    pub fn function(&self) -> &PhaseSpaceFn {
        &self.f
    }

    pub fn band(&self) -> f64 {
        self.band
    }

    fn derivative(&self, b: &MultiIndex) -> Result<Arc<SampledFn>> {
        if let Some(d) = self.derivs.read().expect("cache lock").get(b) {
            return Ok(d.clone());
        }
        let d = Arc::new(self.f.spectral_derivative(b)?);
        self.derivs.write().expect("cache lock").insert(b.clone(), d.clone());
        Ok(d)
    }

    fn check(&self, a: &MultiIndex) -> Result<()> {
        if a.len() != self.f.grid().dim() {
            return Err(Error::DimensionMismatch(format!(
                "index of length {} on a {}-dimensional grid",
                a.len(),
                self.f.grid().dim()
            )));
        }
        Ok(())
    }

    /// `|F|_{a,b} = sup |alpha^a d^b F(alpha)|` over the interior band.
    pub fn seminorm(&self, a: &MultiIndex, b: &MultiIndex) -> Result<f64> {
        self.check(a)?;
        self.check(b)?;
        let key = (a.clone(), b.clone());
        if let Some(v) = self.values.read().expect("cache lock").get(&key) {
            return Ok(*v);
        }
        let d = self.derivative(b)?;
        let v = sup_refined(&d, a, &self.interior, self.band);
        self.values.write().expect("cache lock").insert(key, v);
        Ok(v)
    }

    /// `||F||_{a,b} = sum_{a' <= a} sum_{b' <= b} |F|_{a',b'}`.
    pub fn norm_sum(&self, a: &MultiIndex, b: &MultiIndex) -> Result<f64> {
        let mut total = 0.0;
        for bb in b.box_below() {
            for aa in a.box_below() {
                total += self.seminorm(&aa, &bb)?;
            }
        }
        Ok(total)
    }

    /// Decay norm `||F||_c = ||F||_{c,0}`.
    pub fn decay_norm(&self, c: &MultiIndex) -> Result<f64> {
        self.norm_sum(c, &MultiIndex::zeros(c.len()))
    }

    pub fn report(&self, family: Family, a: &MultiIndex, b: &MultiIndex) -> Result<SeminormReport> {
        let value = match family {
            Family::Decay => self.seminorm(a, b)?,
            Family::NormSum => self.norm_sum(a, b)?,
            other => return Err(Error::Unsupported(format!("{other} seminorm of a phase-space function"))),
        };
        Ok(SeminormReport {
            family,
            rep: self.f.label().rep.to_string(),
            indices: vec![a.clone(), b.clone()],
            value,
            points: self.f.grid().points(),
            half_extents: self.f.grid().half_extents().to_vec(),
            band: self.band,
        })
    }
}

/// `|F|_{a,b}` on the default interior band.
pub fn seminorm(f: &PhaseSpaceFn, a: &MultiIndex, b: &MultiIndex) -> Result<f64> {
    SeminormEstimator::new(f.clone()).seminorm(a, b)
}

/// `||F||_{a,b}` on the default interior band.
pub fn norm_sum(f: &PhaseSpaceFn, a: &MultiIndex, b: &MultiIndex) -> Result<f64> {
    SeminormEstimator::new(f.clone()).norm_sum(a, b)
}

/// Sup of `|monomial(a) * d|` over `interior`, refined between grid nodes by
/// degree-7 Lagrange interpolation and golden-section search around the
/// largest local maxima. Never below the discrete maximum.
fn sup_refined(d: &SampledFn, a: &MultiIndex, interior: &[usize], band: f64) -> f64 {
    let grid = d.grid();
    let dim = grid.dim();
    let vals: Vec<f64> = interior
        .par_iter()
        .map(|&i| (a.monomial(&grid.point(i)) * d.values()[i]).norm())
        .collect();
    let best = vals.iter().cloned().fold(0.0, f64::max);
    if best == 0.0 {
        return 0.0;
    }

    let range = grid.interior(band);
    let lookup = |flat: usize| -> f64 { (a.monomial(&grid.point(flat)) * d.values()[flat]).norm() };
    let mut candidates: Vec<(f64, usize)> = Vec::new();
    let mut idx = vec![0; dim];
    for (pos, &flat) in interior.iter().enumerate() {
        let v = vals[pos];
        if v < 0.5 * best {
            continue;
        }
        grid.unravel(flat, &mut idx);
        let mut is_max = true;
        'axes: for j in 0..dim {
            for step in [-1isize, 1] {
                let k = idx[j] as isize + step;
                if k < 0 || k >= grid.points() as isize {
                    continue;
                }
                let mut nb = idx.clone();
                nb[j] = k as usize;
                if lookup(grid.ravel(&nb)) > v {
                    is_max = false;
                    break 'axes;
                }
            }
        }
        if is_max {
            candidates.push((v, flat));
        }
    }
    candidates.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)));
    candidates.truncate(MAX_CANDIDATES);

    let lo: Vec<f64> = (0..dim).map(|j| grid.coord(j, range.start)).collect();
    let hi: Vec<f64> = (0..dim).map(|j| grid.coord(j, range.end - 1)).collect();
    let objective = |t: &[f64]| (a.monomial(t) * interpolate(d, t)).norm();
    let refined = candidates
        .par_iter()
        .map(|&(_, flat)| {
            let mut t = grid.point(flat);
            for _ in 0..SWEEPS {
                for j in 0..dim {
                    let h = grid.spacing(j);
                    let (l, u) = ((t[j] - h).max(lo[j]), (t[j] + h).min(hi[j]));
                    t[j] = golden_max(l, u, |s| {
                        let mut p = t.clone();
                        p[j] = s;
                        objective(&p)
                    });
                }
            }
            objective(&t)
        })
        .reduce(|| 0.0, f64::max);
    best.max(refined)
}

/// Tensor-product Lagrange interpolation on an 8-point stencil per axis.
fn interpolate(d: &SampledFn, t: &[f64]) -> C64 {
    let grid = d.grid();
    let dim = grid.dim();
    let n = grid.points();
    let mut bases = Vec::with_capacity(dim);
    let mut weights = Vec::with_capacity(dim);
    for (j, &tj) in t.iter().enumerate() {
        let u = (tj + grid.half_extent(j)) / grid.spacing(j);
        let base = (u.floor() as isize - (STENCIL as isize / 2 - 1)).clamp(0, (n - STENCIL) as isize) as usize;
        let w: Vec<f64> = (0..STENCIL)
            .map(|k| {
                let xk = (base + k) as f64;
                (0..STENCIL)
                    .filter(|&m| m != k)
                    .map(|m| {
                        let xm = (base + m) as f64;
                        (u - xm) / (xk - xm)
                    })
                    .product()
            })
            .collect();
        bases.push(base);
        weights.push(w);
    }
    let total = STENCIL.pow(dim as u32);
    let mut acc = C64::new(0.0, 0.0);
    let mut idx = vec![0; dim];
    for s in 0..total {
        let mut rest = s;
        let mut w = 1.0;
        for j in (0..dim).rev() {
            let k = rest % STENCIL;
            rest /= STENCIL;
            idx[j] = bases[j] + k;
            w *= weights[j][k];
        }
        acc += d.values()[grid.ravel(&idx)] * w;
    }
    acc
}

fn golden_max(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..GOLDEN_STEPS {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        }
    }
    if f1 > f2 {
        x1
    } else {
        x2
    }
}

fn config_grid_check(grid: &Grid, n: usize) -> Result<()> {
    if grid.dim() != n {
        return Err(Error::DimensionMismatch(format!(
            "configuration grid has dimension {}, states have {n}",
            grid.dim()
        )));
    }
    Ok(())
}

/// `x^a d^b psi(x)` sampled on the interior of a configuration grid.
fn weighted_samples(psi: &PureState, a: &MultiIndex, b: &MultiIndex, pts: &[Vec<f64>]) -> Result<Vec<C64>> {
    pts.iter()
        .map(|x| Ok(psi.eval_deriv(x, b.entries())? * a.monomial(x)))
        .collect()
}

/// Jointly-Schwartz seminorm `sqrt(sup_x sum_j lambda_j |x^a d^b psi_j(x)|^2)`
/// of the family `{sqrt(lambda_j) psi_j}`, over the interior of `grid` and
/// refined by golden-section search on the exact derivatives.
pub fn joint_seminorm(
    components: &[(f64, PureState)],
    a: &MultiIndex,
    b: &MultiIndex,
    grid: &Grid,
) -> Result<f64> {
    if components.is_empty() {
        return Ok(0.0);
    }
    let n = components[0].1.dim();
    config_grid_check(grid, n)?;
    if a.len() != n || b.len() != n {
        return Err(Error::DimensionMismatch("joint seminorm indices must have length n".into()));
    }
    if components.iter().any(|(_, s)| !s.is_analytic()) {
        return Err(Error::NotAnalytic("jointly-Schwartz seminorm"));
    }
    let f = |x: &[f64]| -> f64 {
        let m = a.monomial(x);
        components
            .iter()
            .map(|(w, s)| w * (s.eval_deriv(x, b.entries()).expect("analytic") * m).norm_sqr())
            .sum()
    };
    let interior = grid.interior_indices(DEFAULT_BAND);
    let vals: Vec<f64> = interior.par_iter().map(|&i| f(&grid.point(i))).collect();
    let (pos, best) = vals
        .iter()
        .enumerate()
        .fold((0, 0.0), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
    if best == 0.0 {
        return Ok(0.0);
    }
    let mut t = grid.point(interior[pos]);
    for _ in 0..SWEEPS {
        for j in 0..n {
            let h = grid.spacing(j);
            t[j] = golden_max(t[j] - h, t[j] + h, |s| {
                let mut p = t.clone();
                p[j] = s;
                f(&p)
            });
        }
    }
    Ok(best.max(f(&t)).sqrt())
}

/// `|K|_{(a,c),(b,d)} = sup_{x,y} |x^a y^c d_x^b d_y^d K(x, y)|` at grid nodes.
pub fn kernel_seminorm(
    rho: &MixedState,
    a: &MultiIndex,
    c: &MultiIndex,
    b: &MultiIndex,
    d: &MultiIndex,
    grid: &Grid,
) -> Result<f64> {
    config_grid_check(grid, rho.dim())?;
    let pts: Vec<Vec<f64>> = grid
        .interior_indices(DEFAULT_BAND)
        .into_iter()
        .map(|i| grid.point(i))
        .collect();
    let mut u = Vec::new();
    let mut v = Vec::new();
    for (w, psi) in rho.components() {
        let su = weighted_samples(psi, a, b, &pts)?;
        let sv = weighted_samples(psi, c, d, &pts)?;
        u.push(su.into_iter().map(|z| z * *w).collect::<Vec<_>>());
        v.push(sv);
    }
    let best = (0..pts.len())
        .into_par_iter()
        .map(|i| {
            let mut m: f64 = 0.0;
            for j in 0..pts.len() {
                let s: C64 = u.iter().zip(&v).map(|(ui, vi)| ui[i] * vi[j].conj()).sum();
                m = m.max(s.norm());
            }
            m
        })
        .reduce(|| 0.0, f64::max);
    Ok(best)
}

/// Relative change under `N -> 2N` beyond which the operator seminorm is rejected.
pub const OPERATOR_REFINE_TOL: f64 = 0.01;

/// `|E|_{a,b,c,d} = ||X^a P^b rho P^c X^d||`, the largest singular value of the
/// discretized sandwich, checked against the same quantity on a grid with
/// twice the points.
pub fn operator_seminorm(
    rho: &MixedState,
    a: &MultiIndex,
    b: &MultiIndex,
    c: &MultiIndex,
    d: &MultiIndex,
    grid: &Grid,
) -> Result<f64> {
    config_grid_check(grid, rho.dim())?;
    if b.order() + c.order() > 8 {
        return Err(Error::DerivativeOrder {
            order: b.order() + c.order(),
            max: 8,
        });
    }
    let coarse = operator_norm_on(rho, a, b, c, d, grid)?;
    let fine_grid = Grid::new(2 * grid.points(), grid.half_extents().to_vec(), (0..grid.dim()).map(|j| grid.role(j)).collect())?;
    let fine = operator_norm_on(rho, a, b, c, d, &fine_grid)?;
    if (fine - coarse).abs() > OPERATOR_REFINE_TOL * fine.abs().max(f64::MIN_POSITIVE) {
        return Err(Error::GridTooCoarse { coarse, refined: fine });
    }
    Ok(fine)
}

fn operator_norm_on(
    rho: &MixedState,
    a: &MultiIndex,
    b: &MultiIndex,
    c: &MultiIndex,
    d: &MultiIndex,
    grid: &Grid,
) -> Result<f64> {
    let m = grid.len();
    if m > MAX_OPERATOR_POINTS {
        return Err(Error::Unsupported(format!(
            "operator seminorm on {m} grid points (limit {MAX_OPERATOR_POINTS})"
        )));
    }
    let pts: Vec<Vec<f64>> = (0..m).map(|i| grid.point(i)).collect();
    let vol = grid.cell_volume();
    let mut mat = DMatrix::<C64>::from_fn(m, m, |i, j| rho.eval_kernel(&pts[i], &pts[j]) * vol);
    // E X^d
    for j in 0..m {
        let s = d.monomial(&pts[j]);
        mat.column_mut(j).scale_mut(s);
    }
    // (E X^d) P^c = (P^c (E X^d)^dag)^dag, P being self-adjoint.
    if !c.is_zero() {
        let mut t = mat.adjoint();
        apply_momentum(&mut t, c, grid);
        mat = t.adjoint();
    }
    apply_momentum(&mut mat, b, grid);
    for i in 0..m {
        let s = a.monomial(&pts[i]);
        mat.row_mut(i).scale_mut(s);
    }
    let sv = mat.singular_values();
    Ok(sv.iter().cloned().fold(0.0, f64::max))
}

/// Applies `P^b = (-i d)^b` spectrally to every column.
fn apply_momentum(mat: &mut DMatrix<C64>, b: &MultiIndex, grid: &Grid) {
    if b.is_zero() {
        return;
    }
    let shape = grid.shape();
    let n = grid.points();
    let mult: Vec<C64> = (0..grid.len())
        .map(|flat| {
            let mut idx = vec![0; grid.dim()];
            grid.unravel(flat, &mut idx);
            let mut f = C64::new(1.0 / grid.len() as f64, 0.0);
            for (j, &order) in b.entries().iter().enumerate() {
                if order == 0 {
                    continue;
                }
                if idx[j] == n / 2 && order % 2 == 1 {
                    f = C64::new(0.0, 0.0);
                }
                f *= fft::wavenumber(idx[j], n, grid.spacing(j)).powi(order as i32);
            }
            f
        })
        .collect();
    let cols: Vec<Vec<C64>> = (0..mat.ncols())
        .into_par_iter()
        .map(|j| {
            let mut col: Vec<C64> = mat.column(j).iter().cloned().collect();
            for axis in 0..grid.dim() {
                fft::fft_axis(&mut col, &shape, axis, false);
            }
            for (v, f) in col.iter_mut().zip(&mult) {
                *v *= f;
            }
            for axis in 0..grid.dim() {
                fft::fft_axis(&mut col, &shape, axis, true);
            }
            col
        })
        .collect();
    for (j, col) in cols.into_iter().enumerate() {
        for (i, v) in col.into_iter().enumerate() {
            mat[(i, j)] = v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Label, Rep};
    use crate::states::random;
    use crate::transforms::wigner;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{E, PI};

    fn mi(e: &[u32]) -> MultiIndex {
        MultiIndex::new(e.to_vec()).unwrap()
    }

    fn vacuum_w() -> PhaseSpaceFn {
        wigner(&MixedState::vacuum(1), &Grid::desk()).unwrap()
    }

    #[test]
    fn vacuum_oracles() {
        let est = SeminormEstimator::new(vacuum_w());
        let s00 = est.seminorm(&mi(&[0, 0]), &mi(&[0, 0])).unwrap();
        assert!((s00 - 1.0 / PI).abs() < 1e-6, "{s00}");
        let s10 = est.seminorm(&mi(&[1, 0]), &mi(&[0, 0])).unwrap();
        let want = (2.0 * E).powf(-0.5) / PI;
        assert!((s10 - want).abs() < 1e-5, "{s10} vs {want}");
        let ns = est.norm_sum(&mi(&[1, 0]), &mi(&[0, 0])).unwrap();
        assert!((ns - (1.0 / PI + want)).abs() < 1e-5);
        assert_eq!(est.norm_sum(&mi(&[0, 0]), &mi(&[0, 0])).unwrap(), s00);
    }

    #[test]
    fn refinement_is_accurate_off_grid() {
        // |x p e^{-x^2-p^2}| / pi peaks at x = p = 2^{-1/2}, between nodes.
        let est = SeminormEstimator::new(vacuum_w());
        let got = est.seminorm(&mi(&[1, 1]), &mi(&[0, 0])).unwrap();
        let want = 1.0 / (2.0 * E * PI);
        assert!((got - want).abs() < 1e-8, "{got} vs {want}");
        // First derivative: sup |2x e^{-x^2}| / pi = 2 (2e)^{-1/2} / pi.
        let d = est.seminorm(&mi(&[0, 0]), &mi(&[1, 0])).unwrap();
        assert!((d - 2.0 * (2.0 * E).powf(-0.5) / PI).abs() < 1e-7);
    }

    #[test]
    fn zero_function() {
        let z = SampledFn::zeros(Grid::phase_space(1, 32, 4.0).unwrap(), Label::new(Rep::Wigner, ""));
        assert_eq!(seminorm(&z, &mi(&[2, 1]), &mi(&[1, 1])).unwrap(), 0.0);
    }

    #[test]
    fn norm_sum_dominates_and_reflection_invariance() {
        let w = vacuum_w();
        let g = w.grid().clone();
        // W(-a): index k -> N - k, with k = 0 mapped onto itself (the value there is ~0).
        let reflected = SampledFn::from_fn(g.clone(), w.label().clone(), |a| {
            C64::new((-a[0] * a[0] - a[1] * a[1]).exp() / PI, 0.0)
        })
        .unwrap();
        let est = SeminormEstimator::new(w);
        let rest = SeminormEstimator::new(reflected);
        for (a, b) in [([1, 0], [0, 1]), ([2, 1], [1, 0]), ([0, 3], [2, 0])] {
            let s = est.seminorm(&mi(&a), &mi(&b)).unwrap();
            assert!(est.norm_sum(&mi(&a), &mi(&b)).unwrap() >= s);
            assert!((s - rest.seminorm(&mi(&a), &mi(&b)).unwrap()).abs() < 1e-8);
        }
    }

    #[test]
    fn derivative_order_propagates() {
        let est = SeminormEstimator::new(vacuum_w());
        assert!(matches!(
            est.seminorm(&mi(&[0, 0]), &mi(&[7, 6])),
            Err(Error::DerivativeOrder { .. })
        ));
    }

    #[test]
    fn joint_oracles() {
        let g = Grid::configuration(1, 256, 12.0).unwrap();
        let vac = [(1.0, PureState::vacuum(1))];
        let v = joint_seminorm(&vac, &mi(&[0]), &mi(&[0]), &g).unwrap();
        assert!((v - PI.powf(-0.25)).abs() < 1e-6);
        assert_eq!(joint_seminorm(&[], &mi(&[0]), &mi(&[0]), &g).unwrap(), 0.0);
        // Singleton equals the classical seminorm sup |x psi| = pi^{-1/4} e^{-1/2}.
        let v = joint_seminorm(&vac, &mi(&[1]), &mi(&[0]), &g).unwrap();
        assert!((v - PI.powf(-0.25) * (-0.5f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn kernel_bounded_by_joint_product() {
        let g = Grid::configuration(1, 128, 10.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let rho = random::random_mixture(&mut rng, 1, 3, 2);
        for (a, c, b, d) in [(0, 0, 0, 0), (1, 2, 0, 1), (2, 0, 2, 1)] {
            let k = kernel_seminorm(&rho, &mi(&[a]), &mi(&[c]), &mi(&[b]), &mi(&[d]), &g).unwrap();
            let ja = joint_seminorm(rho.components(), &mi(&[a]), &mi(&[b]), &g).unwrap();
            let jc = joint_seminorm(rho.components(), &mi(&[c]), &mi(&[d]), &g).unwrap();
            assert!(k <= ja * jc && k > 0.0);
        }
    }

    #[test]
    fn operator_oracles() {
        let g = Grid::configuration(1, 128, 10.0).unwrap();
        let z = mi(&[0]);
        let vac = MixedState::vacuum(1);
        let v = operator_seminorm(&vac, &z, &z, &z, &z, &g).unwrap();
        assert!((v - 1.0).abs() < 1e-6, "{v}");
        let v = operator_seminorm(&vac, &mi(&[1]), &z, &z, &z, &g).unwrap();
        assert!((v - 0.5f64.sqrt()).abs() < 1e-5, "{v}");
        let mix = MixedState::new(vec![0.5, 0.5], vec![PureState::fock(vec![0]), PureState::fock(vec![1])]).unwrap();
        let v = operator_seminorm(&mix, &z, &z, &z, &z, &g).unwrap();
        assert!((v - 0.5).abs() < 1e-6, "{v}");
        // ||P chi|| = 2^{-1/2} too, and P on both sides gives <P^2> = 1/2.
        let v = operator_seminorm(&vac, &z, &mi(&[1]), &z, &z, &g).unwrap();
        assert!((v - 0.5f64.sqrt()).abs() < 1e-5, "{v}");
        let v = operator_seminorm(&vac, &z, &mi(&[1]), &mi(&[1]), &z, &g).unwrap();
        assert!((v - 0.5).abs() < 1e-5, "{v}");
    }

    #[test]
    fn report_line() {
        let est = SeminormEstimator::new(vacuum_w());
        let r = est.report(Family::Decay, &mi(&[1, 0]), &mi(&[0, 0])).unwrap();
        let line = r.csv_line();
        assert!(line.starts_with("wigner-decay,\"1,0\",\"0,0\",1.365"), "{line}");
        assert!(line.ends_with(",256,\"12,12\",0.1"), "{line}");
    }
}
