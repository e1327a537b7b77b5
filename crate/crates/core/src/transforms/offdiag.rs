//! Off-diagonal Wigner transforms and the twisted convolution.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::wigner::wigner_at;
use crate::error::{Error, Result};
use crate::grid::{wedge, PhaseSpaceFn};
use crate::states::{MixedState, PureState};

/// Whether `chi` is exactly the unit Gaussian up to a global phase.
pub fn is_standard_gaussian(chi: &PureState) -> bool {
    match chi.atoms() {
        Some([a]) => {
            a.m.iter().all(|&m| m == 0)
                && a.alpha.iter().all(|&v| v == 0.0)
                && (a.coeff.norm() - 1.0).abs() < 1e-14
        }
        _ => false,
    }
}

/// `W_chi` at one point: closed form for the unit Gaussian, direct quadrature otherwise.
pub fn reference_wigner_at(chi: &PureState, point: &[f64]) -> f64 {
    if is_standard_gaussian(chi) {
        let n = chi.dim();
        let r2: f64 = point.iter().map(|v| v * v).sum();
        (-r2).exp() / PI.powi(n as i32)
    } else {
        wigner_at(&MixedState::pure(chi.clone()), point).re
    }
}

/// The closed-form phase and shift of the off-diagonal transform: returns
/// `(phase, gamma - abar)` so that `W_{|chi_a><chi_b|}(gamma) = phase * W_chi(gamma - abar)`.
pub fn offdiag_parts(alpha: &[f64], beta: &[f64], gamma: &[f64]) -> (C64, Vec<f64>) {
    let abar: Vec<f64> = alpha.iter().zip(beta).map(|(a, b)| 0.5 * (a + b)).collect();
    let delta: Vec<f64> = alpha.iter().zip(beta).map(|(a, b)| a - b).collect();
    let shifted: Vec<f64> = gamma.iter().zip(&abar).map(|(g, m)| g - m).collect();
    let half: Vec<f64> = gamma.iter().zip(&abar).map(|(g, m)| g - 0.5 * m).collect();
    (C64::from_polar(1.0, wedge(&half, &delta)), shifted)
}

/// Wigner transform of `|chi_a><chi_b|` at `gamma`:
/// `exp(i (gamma - abar/2)^da) W_chi(gamma - abar)` with `abar = (a+b)/2`, `da = a - b`.
pub fn offdiag_wigner(chi: &PureState, alpha: &[f64], beta: &[f64], gamma: &[f64]) -> Result<C64> {
    let d = 2 * chi.dim();
    if alpha.len() != d || beta.len() != d || gamma.len() != d {
        return Err(Error::DimensionMismatch(format!("points must have length {d}")));
    }
    if !chi.is_analytic() {
        return Err(Error::NotAnalytic("off-diagonal Wigner transform"));
    }
    let (phase, shifted) = offdiag_parts(alpha, beta, gamma);
    Ok(phase * reference_wigner_at(chi, &shifted))
}

/// The standard symplectic matrix `[[0, I], [-I, 0]]`, so `a.J.b = a^b`.
pub fn standard_form(n: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for j in 0..n {
        m[(j, n + j)] = 1.0;
        m[(n + j, j)] = -1.0;
    }
    m
}

/// Result of a twisted convolution at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwistedValue {
    pub value: C64,
    /// `f(a - b)` had to be read from the nearest grid node; refine `h` to
    /// control the error.
    pub nearest_grid: bool,
}

fn check_form(form: &DMatrix<f64>, d: usize) -> Result<()> {
    if form.nrows() != d || form.ncols() != d {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} form on a {d}-dimensional grid",
            form.nrows(),
            form.ncols()
        )));
    }
    if (form + form.transpose()).amax() > 1e-12 {
        return Err(Error::InvalidState("twisted-convolution form must be antisymmetric".into()));
    }
    Ok(())
}

/// `(f (*)_W g)(a) = int exp(i a.W.b / 2) f(a - b) g(b) db` by the rectangle
/// rule over `g`'s grid, with `f` evaluated pointwise.
pub fn twisted_convolution_with<F>(f: F, g: &PhaseSpaceFn, form: &DMatrix<f64>, alpha: &[f64]) -> Result<C64>
where
    F: Fn(&[f64]) -> C64,
{
    let grid = g.grid();
    let d = grid.dim();
    check_form(form, d)?;
    if alpha.len() != d {
        return Err(Error::DimensionMismatch(format!("point of length {} on a {d}-dimensional grid", alpha.len())));
    }
    let wa: Vec<f64> = (0..d).map(|j| (0..d).map(|i| alpha[i] * form[(i, j)]).sum()).collect();
    let mut acc = C64::new(0.0, 0.0);
    let mut diff = vec![0.0; d];
    for (flat, gv) in g.values().iter().enumerate() {
        if *gv == C64::new(0.0, 0.0) {
            continue;
        }
        let beta = grid.point(flat);
        let mut phase = 0.0;
        for j in 0..d {
            phase += wa[j] * beta[j];
            diff[j] = alpha[j] - beta[j];
        }
        acc += C64::from_polar(1.0, 0.5 * phase) * f(&diff) * gv;
    }
    Ok(acc * grid.cell_volume())
}

/// Twisted convolution of two sampled functions on the same grid. When `alpha`
/// is a lattice point every `a - b` is a lattice point too and `f` is read
/// exactly; otherwise the nearest node is used and flagged.
pub fn twisted_convolution(f: &PhaseSpaceFn, g: &PhaseSpaceFn, form: &DMatrix<f64>, alpha: &[f64]) -> Result<TwistedValue> {
    let grid = f.grid();
    if !grid.approx_eq(g.grid()) {
        return Err(Error::DimensionMismatch("twisted convolution needs both functions on one grid".into()));
    }
    let d = grid.dim();
    let npts = grid.points() as isize;
    let mut nearest_grid = false;
    for j in 0..d {
        let t = alpha.get(j).copied().unwrap_or(0.0) / grid.spacing(j);
        if (t - t.round()).abs() > 1e-9 {
            nearest_grid = true;
        }
    }
    let lookup = |p: &[f64]| {
        let mut idx = vec![0usize; d];
        for j in 0..d {
            // Lattice points are integer multiples of h; index N/2 is the origin.
            let k = (p[j] / grid.spacing(j)).round() as isize + npts / 2;
            if k < 0 || k >= npts {
                return C64::new(0.0, 0.0);
            }
            idx[j] = k as usize;
        }
        f.values()[grid.ravel(&idx)]
    };
    let value = twisted_convolution_with(lookup, g, form, alpha)?;
    Ok(TwistedValue { value, nearest_grid })
}
