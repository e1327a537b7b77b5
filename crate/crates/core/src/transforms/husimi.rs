//! Husimi function and matrix elements against displaced reference states.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::RwLock;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use super::wigner::wigner;
use crate::error::{Error, Result};
use crate::fft;
use crate::grid::{Grid, Label, PhaseSpaceFn, Rep, SampledFn};
use crate::states::{MixedState, PureState};

/// Negative Husimi values below this signal grid truncation.
pub const HUSIMI_NEG_TOL: f64 = 1e-7;

fn check_chi(rho: &MixedState, chi: &PureState) -> Result<()> {
    if chi.dim() != rho.dim() {
        return Err(Error::DimensionMismatch(format!(
            "reference state in {} dimensions, state in {}",
            chi.dim(),
            rho.dim()
        )));
    }
    if (chi.norm_sq() - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized { norm_sq: chi.norm_sq() });
    }
    Ok(())
}

/// `Q(a) = (2pi)^n int W_rho(b) W_chi(b - a) db`, evaluated as an FFT
/// convolution of `W_rho` with the reflected reference Wigner function.
pub fn husimi(rho: &MixedState, chi: &PureState, grid: &Grid) -> Result<PhaseSpaceFn> {
    check_chi(rho, chi)?;
    let w_rho = wigner(rho, grid)?;
    // Same spacing, twice the extent: covers every difference b - a.
    let big = grid.doubled();
    let w_chi = wigner(&MixedState::pure(chi.clone()), &big)?;

    let d = grid.dim();
    let n = grid.points();
    let m = 2 * n;
    let shape = big.shape();

    let mut a = vec![C64::new(0.0, 0.0); big.len()];
    let mut idx = vec![0; d];
    for (flat, v) in w_rho.values().iter().enumerate() {
        grid.unravel(flat, &mut idx);
        a[big.ravel(&idx)] = *v;
    }
    // r[k] = W_chi(-k h) with k taken mod 2N; W_chi(d h) sits at index d + N.
    let r: Vec<C64> = (0..big.len())
        .into_par_iter()
        .map(|flat| {
            let mut k = vec![0; d];
            big.unravel(flat, &mut k);
            for slot in k.iter_mut() {
                let off: isize = if *slot <= n { -(*slot as isize) } else { (m - *slot) as isize };
                *slot = (off + n as isize) as usize;
            }
            w_chi.values()[big.ravel(&k)]
        })
        .collect();

    let mut fa = a;
    let mut fr = r;
    for axis in 0..d {
        fft::fft_axis(&mut fa, &shape, axis, false);
        fft::fft_axis(&mut fr, &shape, axis, false);
    }
    fa.par_iter_mut().zip(fr.par_iter()).for_each(|(x, y)| *x *= y);
    for axis in 0..d {
        fft::fft_axis(&mut fa, &shape, axis, true);
    }

    let scale = (2.0 * PI).powi(grid.half_dim() as i32) * grid.cell_volume() / big.len() as f64;
    let values: Vec<C64> = (0..grid.len())
        .map(|flat| {
            let mut i = vec![0; d];
            grid.unravel(flat, &mut i);
            C64::new(fa[big.ravel(&i)].re * scale, 0.0)
        })
        .collect();

    let min = values.iter().map(|v| v.re).fold(f64::INFINITY, f64::min);
    if min < -HUSIMI_NEG_TOL {
        return Err(Error::NegativeHusimi {
            min,
            tolerance: HUSIMI_NEG_TOL,
        });
    }
    SampledFn::phase_space(grid.clone(), values, Label::new(Rep::Husimi, rho.name()))
}

/// `M(a, b) = <chi_a | rho | chi_b> = sum_j lambda_j <chi_a|psi_j><psi_j|chi_b>`.
pub fn matel(rho: &MixedState, chi: &PureState, alpha: &[f64], beta: &[f64]) -> Result<C64> {
    check_chi(rho, chi)?;
    let ca = chi.displaced(alpha)?;
    let cb = chi.displaced(beta)?;
    let mut acc = C64::new(0.0, 0.0);
    for (w, psi) in rho.components() {
        acc += ca.inner(psi)? * psi.inner(&cb)? * *w;
    }
    Ok(acc)
}

/// Direct Husimi value `<chi_a|rho|chi_a>`.
pub fn husimi_direct(rho: &MixedState, chi: &PureState, alpha: &[f64]) -> Result<f64> {
    Ok(matel(rho, chi, alpha, alpha)?.re)
}

fn key(p: &[f64]) -> Vec<u64> {
    p.iter().map(|v| v.to_bits()).collect()
}

/// Lazily evaluated matrix elements. Overlaps `<chi_a|psi_j>` are cached per
/// point, so `M` on an `m x m` sample set costs `O(m)` overlap evaluations.
pub struct MatelSampler {
    rho: MixedState,
    chi: PureState,
    overlaps: RwLock<HashMap<Vec<u64>, Vec<C64>>>,
}

impl MatelSampler {
    pub fn new(rho: &MixedState, chi: &PureState) -> Result<Self> {
        check_chi(rho, chi)?;
        chi.displaced(&vec![0.0; 2 * chi.dim()])?;
        Ok(Self {
            rho: rho.clone(),
            chi: chi.clone(),
            overlaps: RwLock::new(HashMap::new()),
        })
    }

    pub fn state(&self) -> &MixedState {
        &self.rho
    }

    pub fn reference(&self) -> &PureState {
        &self.chi
    }

    /// `<chi_a|psi_j>` for every component `j`.
    pub fn overlaps(&self, alpha: &[f64]) -> Result<Vec<C64>> {
        let k = key(alpha);
        if let Some(v) = self.overlaps.read().expect("cache lock").get(&k) {
            return Ok(v.clone());
        }
        let ca = self.chi.displaced(alpha)?;
        let v = self
            .rho
            .components()
            .iter()
            .map(|(_, psi)| ca.inner(psi))
            .collect::<Result<Vec<_>>>()?;
        self.overlaps.write().expect("cache lock").insert(k, v.clone());
        Ok(v)
    }

    pub fn get(&self, alpha: &[f64], beta: &[f64]) -> Result<C64> {
        let oa = self.overlaps(alpha)?;
        let ob = self.overlaps(beta)?;
        Ok(Self::combine(&self.rho, &oa, &ob))
    }

    /// `sum_j lambda_j oa_j conj(ob_j)` from precomputed overlaps.
    pub fn combine(rho: &MixedState, oa: &[C64], ob: &[C64]) -> C64 {
        rho.components()
            .iter()
            .zip(oa.iter().zip(ob))
            .map(|((w, _), (a, b))| a * b.conj() * *w)
            .sum()
    }

    pub fn husimi(&self, alpha: &[f64]) -> Result<f64> {
        Ok(self.get(alpha, alpha)?.re)
    }

    pub fn cached_points(&self) -> usize {
        self.overlaps.read().expect("cache lock").len()
    }
}
