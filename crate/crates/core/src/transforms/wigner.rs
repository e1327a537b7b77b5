//! Wigner and quasicharacteristic functions, and the momentum marginal.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fft;
use crate::grid::{Direction, Grid, Label, PhaseSpaceFn, Rep, SampledFn, DEFAULT_BAND};
use crate::states::hermite::hermite_functions;
use crate::states::{MixedState, PureState};

/// Largest imaginary part tolerated before a Wigner function is declared non-real.
pub const WIGNER_IMAG_TOL: f64 = 1e-10;

/// Tolerance on the disagreement between the two quasicharacteristic paths.
pub const QUASICHAR_TOL: f64 = 1e-6;

/// Spacing of the rectangle rule used for pointwise Wigner values.
const POINTWISE_STEP: f64 = 0.05;

fn check_phase_space(rho: &MixedState, grid: &Grid) -> Result<()> {
    if !grid.is_phase_space() {
        return Err(Error::InvalidGrid(format!("{grid} is not a phase-space grid")));
    }
    if grid.half_dim() != rho.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state in {} dimensions on a grid over R^{}",
            rho.dim(),
            grid.dim()
        )));
    }
    Ok(())
}

/// For each position-block grid point `x`, samples `row(x, t)` on an auxiliary
/// lattice in `t` and evaluates `pref * sum_t exp(i p.t) row(x, t)` for every
/// momentum-block grid point `p`.
fn row_transform<F>(grid: &Grid, pref_per_axis: f64, row: F) -> Vec<C64>
where
    F: Fn(&[f64], &[f64]) -> C64 + Sync,
{
    let n = grid.half_dim();
    let npts = grid.points();
    let row_len = npts.pow(n as u32);
    let shape = vec![npts; n];
    // Output momenta -L_p + m h_p need an auxiliary spacing 2 pi / (N h_p).
    let steps: Vec<f64> = (0..n)
        .map(|j| 2.0 * PI / (npts as f64 * grid.spacing(n + j)))
        .collect();
    let starts: Vec<f64> = steps.iter().map(|h| -0.5 * npts as f64 * h).collect();
    let pref: f64 = steps.iter().map(|h| h * pref_per_axis).product();

    let mut out = vec![C64::new(0.0, 0.0); grid.len()];
    out.par_chunks_mut(row_len).enumerate().for_each(|(xi, chunk)| {
        let mut idx = vec![0; n];
        let mut x = vec![0.0; n];
        flat_to_idx(xi, npts, &mut idx);
        for j in 0..n {
            x[j] = grid.coord(j, idx[j]);
        }
        let mut t = vec![0.0; n];
        for (k, slot) in chunk.iter_mut().enumerate() {
            flat_to_idx(k, npts, &mut idx);
            for j in 0..n {
                t[j] = starts[j] + idx[j] as f64 * steps[j];
            }
            *slot = row(&x, &t);
        }
        for j in 0..n {
            fft::centered_dft_axis(chunk, &shape, j, starts[j], steps[j], -grid.half_extent(n + j), 1.0);
        }
        for v in chunk.iter_mut() {
            *v *= pref;
        }
    });
    out
}

fn flat_to_idx(mut flat: usize, npts: usize, idx: &mut [usize]) {
    for slot in idx.iter_mut().rev() {
        *slot = flat % npts;
        flat /= npts;
    }
}

/// `W(a) = (2pi)^{-n} int exp(i a_p.y) K(a_x - y/2, a_x + y/2) dy` on `grid`,
/// keeping the imaginary part.
pub fn wigner_complex(rho: &MixedState, grid: &Grid) -> Result<PhaseSpaceFn> {
    check_phase_space(rho, grid)?;
    wigner_of_kernel(|u, v| rho.eval_kernel(u, v), grid, Label::new(Rep::Wigner, rho.name()))
}

/// Wigner transform of an arbitrary kernel `K(u, v)` on `grid`.
pub fn wigner_of_kernel<K>(kernel: K, grid: &Grid, label: Label) -> Result<PhaseSpaceFn>
where
    K: Fn(&[f64], &[f64]) -> C64 + Sync,
{
    if !grid.is_phase_space() {
        return Err(Error::InvalidGrid(format!("{grid} is not a phase-space grid")));
    }
    let n = grid.half_dim();
    let values = row_transform(grid, 1.0 / (2.0 * PI), |x, y| {
        let mut u = vec![0.0; n];
        let mut v = vec![0.0; n];
        for j in 0..n {
            u[j] = x[j] - 0.5 * y[j];
            v[j] = x[j] + 0.5 * y[j];
        }
        kernel(&u, &v)
    });
    SampledFn::phase_space(grid.clone(), values, label)
}

/// The Wigner function on `grid`. Fails if the imaginary residue exceeds
/// [`WIGNER_IMAG_TOL`].
pub fn wigner(rho: &MixedState, grid: &Grid) -> Result<PhaseSpaceFn> {
    let w = wigner_complex(rho, grid)?;
    let residue = w.values().iter().map(|v| v.im.abs()).fold(0.0, f64::max);
    if residue > WIGNER_IMAG_TOL {
        return Err(Error::NonRealWigner {
            residue,
            tolerance: WIGNER_IMAG_TOL,
        });
    }
    w.map(|v| C64::new(v.re, 0.0))
}

/// Wigner transform of an arbitrary kernel at one point, by a rectangle rule
/// over `y` in `[-reach, reach]^n`.
pub fn wigner_kernel_at<K>(n: usize, kernel: K, alpha: &[f64], reach: f64) -> C64
where
    K: Fn(&[f64], &[f64]) -> C64,
{
    let steps = (2.0 * reach / POINTWISE_STEP).ceil() as usize;
    let h = 2.0 * reach / steps as f64;
    let total = (steps + 1).pow(n as u32);
    let mut u = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut acc = C64::new(0.0, 0.0);
    for flat in 0..total {
        let mut rest = flat;
        let mut dot = 0.0;
        for j in 0..n {
            let y = -reach + (rest % (steps + 1)) as f64 * h;
            rest /= steps + 1;
            u[j] = alpha[j] - 0.5 * y;
            v[j] = alpha[j] + 0.5 * y;
            dot += alpha[n + j] * y;
        }
        acc += C64::from_polar(1.0, dot) * kernel(&u, &v);
    }
    acc * (h / (2.0 * PI)).powi(n as i32)
}

/// Integration half-width that captures the kernel of `rho` around `alpha`.
fn reach_for(rho: &MixedState, alpha: &[f64]) -> f64 {
    let n = rho.dim();
    let ax = alpha[..n].iter().map(|v| v.abs()).fold(0.0, f64::max);
    let mut spread: f64 = 1.0;
    for (_, psi) in rho.components() {
        if let Some(atoms) = psi.atoms() {
            for a in atoms {
                for j in 0..n {
                    spread = spread.max(a.alpha[j].abs() + (a.m[j] as f64).sqrt());
                }
            }
        }
    }
    2.0 * (ax + spread) + 24.0
}

/// Pointwise Wigner value by direct quadrature of the kernel formula.
pub fn wigner_at(rho: &MixedState, alpha: &[f64]) -> C64 {
    wigner_kernel_at(rho.dim(), |u, v| rho.eval_kernel(u, v), alpha, reach_for(rho, alpha))
}

/// `X(xi) = int exp(i z.xi_p) K(z - xi_x/2, z + xi_x/2) dz` by an FFT over `z`.
pub fn quasichar_direct(rho: &MixedState, grid: &Grid) -> Result<PhaseSpaceFn> {
    check_phase_space(rho, grid)?;
    let n = rho.dim();
    let values = row_transform(grid, 1.0, |xi_x, z| {
        let mut u = vec![0.0; n];
        let mut v = vec![0.0; n];
        for j in 0..n {
            u[j] = z[j] - 0.5 * xi_x[j];
            v[j] = z[j] + 0.5 * xi_x[j];
        }
        rho.eval_kernel(&u, &v)
    });
    SampledFn::phase_space(grid.clone(), values, Label::new(Rep::Quasichar, rho.name()))
}

/// The quasicharacteristic function `tr[rho D_xi]`, cross-checked against the
/// inverse symplectic Fourier transform of the Wigner function.
pub fn quasichar(rho: &MixedState, grid: &Grid) -> Result<PhaseSpaceFn> {
    let direct = quasichar_direct(rho, grid)?;
    let w = wigner(rho, &grid.symplectic_dual())?;
    let dual = w.symplectic_fourier(Direction::Inverse)?;
    let residual = direct.interior_max_diff(&dual, DEFAULT_BAND)?;
    if residual > QUASICHAR_TOL {
        return Err(Error::GridResolution {
            what: "quasicharacteristic cross-check",
            residual,
            tolerance: QUASICHAR_TOL,
        });
    }
    Ok(direct)
}

/// Closed-form `tr[rho D_xi]` for analytic states.
pub fn quasichar_exact(rho: &MixedState, xi: &[f64]) -> Result<C64> {
    let mut acc = C64::new(0.0, 0.0);
    for (w, psi) in rho.components() {
        acc += psi.expect_displacement(xi)? * *w;
    }
    Ok(acc)
}

/// `int W(x, p) dx`, sampled on the momentum axes of `w`'s grid.
pub fn momentum_marginal(w: &PhaseSpaceFn) -> Result<SampledFn> {
    let g = w.grid();
    if !g.is_phase_space() {
        return Err(Error::InvalidGrid("momentum marginal needs a phase-space grid".into()));
    }
    let n = g.half_dim();
    let row_len = g.points().pow(n as u32);
    let hx: f64 = (0..n).map(|j| g.spacing(j)).product();
    let mut values = vec![C64::new(0.0, 0.0); row_len];
    for row in w.values().chunks(row_len) {
        for (acc, v) in values.iter_mut().zip(row) {
            *acc += v;
        }
    }
    for v in &mut values {
        *v *= hx;
    }
    let pgrid = Grid::new(
        g.points(),
        g.half_extents()[n..].to_vec(),
        vec![crate::grid::AxisRole::Momentum; n],
    )?;
    SampledFn::new(pgrid, values, Label::new(Rep::Other("momentum-marginal".into()), w.label().state.clone()))
}

/// `|psi_hat(p)|^2` with the unitary transform `(2pi)^{-n/2} int exp(-i p.x) psi(x) dx`.
pub fn momentum_density(psi: &PureState, p: &[f64]) -> Result<f64> {
    let n = psi.dim();
    if p.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "momentum of length {} for a state in {n} dimensions",
            p.len()
        )));
    }
    let Some(atoms) = psi.atoms() else {
        // Plateau: each axis contributes |(1 - e^{-ip}) / (i p)|^2 / (2 pi).
        return Ok(p
            .iter()
            .map(|&q| {
                if q.abs() < 1e-8 {
                    1.0 / (2.0 * PI)
                } else {
                    (2.0 - 2.0 * q.cos()) / (2.0 * PI * q * q)
                }
            })
            .product());
    };
    // FT of c D_a phi_m is c exp(i a_x (a_p/2 - p)) (-i)^m phi_m(p - a_p).
    let mut amp = C64::new(0.0, 0.0);
    for a in atoms {
        let mut v = a.coeff;
        for j in 0..n {
            let m = a.m[j] as usize;
            let (ax, ap) = (a.alpha[j], a.alpha[n + j]);
            let phi = hermite_functions(m, p[j] - ap)[m];
            v *= C64::from_polar(1.0, ax * (0.5 * ap - p[j])) * C64::new(0.0, -1.0).powu(m as u32) * phi;
        }
        amp += v;
    }
    Ok(amp.norm_sqr())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::random;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn vacuum_w(a: &[f64]) -> f64 {
        (-a[0] * a[0] - a[1] * a[1]).exp() / PI
    }

    #[test]
    fn vacuum_wigner() {
        let w = wigner(&MixedState::vacuum(1), &Grid::desk()).unwrap();
        let err = w.interior_error(DEFAULT_BAND, |a| C64::new(vacuum_w(a), 0.0));
        assert!(err < 1e-9, "err {err}");
        assert!((w.quadrature() - 1.0).norm() < 1e-9);
    }

    #[test]
    fn fock1_wigner_against_oracles() {
        let rho = MixedState::pure(PureState::fock(vec![1]));
        let w = wigner(&rho, &Grid::desk()).unwrap();
        let closed = |a: &[f64]| {
            let r2 = a[0] * a[0] + a[1] * a[1];
            (2.0 * r2 - 1.0) * (-r2).exp() / PI
        };
        assert!(w.interior_error(DEFAULT_BAND, |a| C64::new(closed(a), 0.0)) < 1e-8);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let a = [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)];
            let direct = wigner_at(&rho, &a);
            assert!((direct.re - closed(&a)).abs() < 1e-8 && direct.im.abs() < 1e-10);
        }
    }

    #[test]
    fn grid_values_match_pointwise_quadrature() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let rho = random::random_mixture(&mut rng, 1, 2, 2);
        let grid = Grid::phase_space(1, 128, 10.0).unwrap();
        let w = wigner(&rho, &grid).unwrap();
        for flat in [0usize, 4000, 8256, 9000, 12345] {
            let a = grid.point(flat);
            assert!((w.values()[flat] - wigner_at(&rho, &a)).norm() < 1e-9);
        }
    }

    #[test]
    fn vacuum_quasichar() {
        let grid = Grid::desk();
        let x = quasichar(&MixedState::vacuum(1), &grid).unwrap();
        let err = x.interior_error(DEFAULT_BAND, |a| C64::new((-(a[0] * a[0] + a[1] * a[1]) / 4.0).exp(), 0.0));
        assert!(err < 1e-9, "err {err}");
        let origin = grid.ravel(&[128, 128]);
        assert!((x.values()[origin] - 1.0).norm() < 1e-10);
    }

    #[test]
    fn quasichar_symmetry_and_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let rho = random::random_mixture(&mut rng, 1, 3, 3);
        let grid = Grid::desk();
        let x = quasichar(&rho, &grid).unwrap();
        // xi -> -xi maps index k to N - k (k >= 1).
        let mut worst: f64 = 0.0;
        for i in 1..256 {
            for j in 1..256 {
                let a = x.values()[grid.ravel(&[i, j])];
                let b = x.values()[grid.ravel(&[256 - i, 256 - j])];
                worst = worst.max((a - b.conj()).norm());
            }
        }
        assert!(worst < 1e-12, "worst {worst}");
        for flat in [1000usize, 30000, 40000] {
            let xi = grid.point(flat);
            assert!((x.values()[flat] - quasichar_exact(&rho, &xi).unwrap()).norm() < 1e-10);
        }
    }

    #[test]
    fn marginals() {
        let grid = Grid::desk();
        for (psi, f) in [
            (PureState::vacuum(1), Box::new(|p: f64| (-p * p).exp() / PI.sqrt()) as Box<dyn Fn(f64) -> f64 + Sync>),
            (PureState::fock(vec![1]), Box::new(|p: f64| 2.0 * p * p * (-p * p).exp() / PI.sqrt())),
        ] {
            let w = wigner(&MixedState::pure(psi.clone()), &grid).unwrap();
            let m = momentum_marginal(&w).unwrap();
            assert!(m.interior_error(DEFAULT_BAND, |p| C64::new(f(p[0]), 0.0)) < 1e-9);
            assert!((m.quadrature() - 1.0).norm() < 1e-9);
            for &p in &[-1.3, 0.0, 0.7, 2.2] {
                assert!((momentum_density(&psi, &[p]).unwrap() - f(p)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn displaced_momentum_density_matches_quadrature() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let psi = random::random_pure(&mut rng, 1, 3);
        let h = 0.02;
        for &p in &[-2.0, -0.4, 0.9, 1.6] {
            let amp: C64 = (0..2000)
                .map(|k| {
                    let x = -20.0 + k as f64 * h;
                    psi.eval(&[x]) * C64::from_polar(1.0, -p * x)
                })
                .sum::<C64>()
                * (h / (2.0 * PI).sqrt());
            assert!((amp.norm_sqr() - momentum_density(&psi, &[p]).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn plateau_wigner_integrates_to_one() {
        let rho = MixedState::pure(PureState::plateau(1));
        let w = wigner(&rho, &Grid::desk()).unwrap();
        assert!((w.quadrature().re - 1.0).abs() < 0.05);
    }
}
