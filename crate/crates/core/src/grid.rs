//! Uniform tensor grids, sampled functions on them, quadrature, spectral
//! derivatives and the symplectic Fourier transform.

use std::f64::consts::PI;
use std::fmt;
use std::ops::Range;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fft;
use crate::multiindex::MultiIndex;

/// Maximum total derivative order accepted by [`SampledFn::spectral_derivative`].
pub const MAX_DERIVATIVE_ORDER: u32 = 12;

/// Fraction of points per axis (at each end) excluded from suprema and
/// pointwise comparisons.
pub const DEFAULT_BAND: f64 = 0.1;

/// Symplectic form `a^b = a_x.b_p - a_p.b_x` on points laid out as `[x.., p..]`.
pub fn wedge(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() / 2;
    (0..n).map(|j| a[j] * b[n + j] - a[n + j] * b[j]).sum()
}

/// Euclidean norm of a point.
pub fn norm(a: &[f64]) -> f64 {
    a.iter().map(|v| v * v).sum::<f64>().sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AxisRole {
    Position,
    Momentum,
}

/// A uniform grid spanning `[-L_j, L_j)` on every axis with the same number of
/// points `N`. Phase-space grids order the position axes before the momentum axes.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    points: usize,
    half_extents: Vec<f64>,
    roles: Vec<AxisRole>,
}

impl Grid {
    pub fn new(points: usize, half_extents: Vec<f64>, roles: Vec<AxisRole>) -> Result<Self> {
        if points < 8 || !points.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "points per axis must be a power of two >= 8, got {points}"
            )));
        }
        if half_extents.is_empty() || half_extents.len() != roles.len() {
            return Err(Error::InvalidGrid(format!(
                "{} extents for {} axis roles",
                half_extents.len(),
                roles.len()
            )));
        }
        if let Some(l) = half_extents.iter().find(|l| !(l.is_finite() && **l > 0.0)) {
            return Err(Error::InvalidGrid(format!("half extent {l} must be positive")));
        }
        Ok(Self {
            points,
            half_extents,
            roles,
        })
    }

    /// Configuration-space grid on R^n.
    pub fn configuration(n: usize, points: usize, half_extent: f64) -> Result<Self> {
        Self::new(points, vec![half_extent; n], vec![AxisRole::Position; n])
    }

    /// Phase-space grid on R^{2n} with the same extent on every axis.
    pub fn phase_space(n: usize, points: usize, half_extent: f64) -> Result<Self> {
        Self::phase_space_with(points, &vec![half_extent; n], &vec![half_extent; n])
    }

    /// Phase-space grid with separate position and momentum extents.
    pub fn phase_space_with(points: usize, lx: &[f64], lp: &[f64]) -> Result<Self> {
        if lx.len() != lp.len() {
            return Err(Error::InvalidGrid("position and momentum blocks differ in length".into()));
        }
        let n = lx.len();
        let mut roles = vec![AxisRole::Position; n];
        roles.extend(std::iter::repeat(AxisRole::Momentum).take(n));
        Self::new(points, [lx, lp].concat(), roles)
    }

    /// The desk-scale default: n = 1, N = 256, L = 12.
    pub fn desk() -> Self {
        Self::phase_space(1, 256, 12.0).expect("valid default grid")
    }

    pub fn dim(&self) -> usize {
        self.half_extents.len()
    }

    /// Configuration dimension n of a phase-space grid.
    pub fn half_dim(&self) -> usize {
        self.dim() / 2
    }

    pub fn is_phase_space(&self) -> bool {
        let n = self.half_dim();
        self.dim() % 2 == 0
            && self.roles[..n].iter().all(|r| *r == AxisRole::Position)
            && self.roles[n..].iter().all(|r| *r == AxisRole::Momentum)
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn half_extent(&self, axis: usize) -> f64 {
        self.half_extents[axis]
    }

    pub fn half_extents(&self) -> &[f64] {
        &self.half_extents
    }

    pub fn role(&self, axis: usize) -> AxisRole {
        self.roles[axis]
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        2.0 * self.half_extents[axis] / self.points as f64
    }

    pub fn coord(&self, axis: usize, k: usize) -> f64 {
        -self.half_extents[axis] + k as f64 * self.spacing(axis)
    }

    pub fn axis_coords(&self, axis: usize) -> Vec<f64> {
        (0..self.points).map(|k| self.coord(axis, k)).collect()
    }

    /// Angular frequencies of the FFT lattice on `axis`, in FFT bin order.
    pub fn frequencies(&self, axis: usize) -> Vec<f64> {
        let h = self.spacing(axis);
        (0..self.points)
            .map(|m| fft::wavenumber(m, self.points, h))
            .collect()
    }

    pub fn shape(&self) -> Vec<usize> {
        vec![self.points; self.dim()]
    }

    pub fn len(&self) -> usize {
        self.points.pow(self.dim() as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Product of the spacings, the rectangle-rule weight.
    pub fn cell_volume(&self) -> f64 {
        (0..self.dim()).map(|a| self.spacing(a)).product()
    }

    /// Row-major multi-index of a flat index.
    pub fn unravel(&self, mut flat: usize, idx: &mut [usize]) {
        for slot in idx.iter_mut().rev() {
            *slot = flat % self.points;
            flat /= self.points;
        }
    }

    pub fn ravel(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &k| acc * self.points + k)
    }

    pub fn point(&self, flat: usize) -> Vec<f64> {
        let mut idx = vec![0; self.dim()];
        self.unravel(flat, &mut idx);
        idx.iter().enumerate().map(|(a, &k)| self.coord(a, k)).collect()
    }

    /// Index range kept after dropping `floor(band * N)` points at each end.
    pub fn interior(&self, band: f64) -> Range<usize> {
        let cut = (band * self.points as f64).floor() as usize;
        cut.min(self.points / 2)..self.points - cut.min(self.points / 2)
    }

    /// Flat indices of the interior box.
    pub fn interior_indices(&self, band: f64) -> Vec<usize> {
        let r = self.interior(band);
        let mut out = Vec::new();
        let mut idx = vec![0; self.dim()];
        for flat in 0..self.len() {
            self.unravel(flat, &mut idx);
            if idx.iter().all(|k| r.contains(k)) {
                out.push(flat);
            }
        }
        out
    }

    /// Lattice on which the symplectic Fourier transform of a function on
    /// `self` lives: output axis j inherits its resolution from input axis
    /// j +- n, with half extent `pi N / (2 L)`.
    pub fn symplectic_dual(&self) -> Grid {
        let n = self.half_dim();
        let d = self.dim();
        let ext = (0..d)
            .map(|j| PI * self.points as f64 / (2.0 * self.half_extents[(j + n) % d]))
            .collect();
        Grid {
            points: self.points,
            half_extents: ext,
            roles: self.roles.clone(),
        }
    }

    /// Same spacing, twice the extent.
    pub fn doubled(&self) -> Grid {
        Grid {
            points: 2 * self.points,
            half_extents: self.half_extents.iter().map(|l| 2.0 * l).collect(),
            roles: self.roles.clone(),
        }
    }

    /// Refinement used in convergence studies: `N -> 2N`, `L -> 1.25 L`.
    pub fn refined(&self) -> Grid {
        Grid {
            points: 2 * self.points,
            half_extents: self.half_extents.iter().map(|l| 1.25 * l).collect(),
            roles: self.roles.clone(),
        }
    }

    /// Whether two grids agree up to rounding in their extents.
    pub fn approx_eq(&self, other: &Grid) -> bool {
        self.points == other.points
            && self.roles == other.roles
            && self
                .half_extents
                .iter()
                .zip(&other.half_extents)
                .all(|(a, b)| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()))
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ext: Vec<String> = self.half_extents.iter().map(|l| format!("{l}")).collect();
        write!(f, "N={} L=[{}]", self.points, ext.join(","))
    }
}

/// Which representation a sampled function holds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rep {
    Wigner,
    Quasichar,
    Husimi,
    OffDiagonal,
    Wavefunction,
    Other(String),
}

impl fmt::Display for Rep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rep::Wigner => f.write_str("wigner"),
            Rep::Quasichar => f.write_str("quasichar"),
            Rep::Husimi => f.write_str("husimi"),
            Rep::OffDiagonal => f.write_str("offdiag"),
            Rep::Wavefunction => f.write_str("wavefunction"),
            Rep::Other(s) => f.write_str(s),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Label {
    pub rep: Rep,
    pub state: String,
}

impl Label {
    pub fn new(rep: Rep, state: impl Into<String>) -> Self {
        Self {
            rep,
            state: state.into(),
        }
    }

    fn derived(&self, suffix: &str) -> Self {
        Self {
            rep: Rep::Other(format!("{}{}", self.rep, suffix)),
            state: self.state.clone(),
        }
    }
}

/// Complex samples of a function on a [`Grid`], stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledFn {
    grid: Grid,
    values: Vec<C64>,
    label: Label,
}

/// A sampled function whose grid is a phase-space grid.
pub type PhaseSpaceFn = SampledFn;

impl SampledFn {
    pub fn new(grid: Grid, values: Vec<C64>, label: Label) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} samples for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        if let Some(index) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { grid, values, label })
    }

    /// Like [`SampledFn::new`] but insists on a phase-space grid.
    pub fn phase_space(grid: Grid, values: Vec<C64>, label: Label) -> Result<Self> {
        if !grid.is_phase_space() {
            return Err(Error::InvalidGrid(format!(
                "phase-space function needs an even-dimensional grid, got dim {}",
                grid.dim()
            )));
        }
        Self::new(grid, values, label)
    }

    /// Samples `f` at every grid point.
    pub fn from_fn<F>(grid: Grid, label: Label, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> C64 + Sync,
    {
        let values = (0..grid.len())
            .into_par_iter()
            .map(|flat| f(&grid.point(flat)))
            .collect();
        Self::new(grid, values, label)
    }

    pub fn zeros(grid: Grid, label: Label) -> Self {
        let values = vec![C64::new(0.0, 0.0); grid.len()];
        Self { grid, values, label }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<C64> {
        self.values
    }

    pub fn label(&self) -> &Label {
        &self.label
    }

    pub fn with_label(mut self, label: Label) -> Self {
        self.label = label;
        self
    }

    /// Applies `f` to every sample.
    pub fn map(&self, f: impl Fn(C64) -> C64 + Sync) -> Result<SampledFn> {
        let values = self.values.par_iter().map(|&v| f(v)).collect();
        SampledFn::new(self.grid.clone(), values, self.label.clone())
    }

    /// Rectangle rule `h^dim * sum(values)`, summed in index order.
    pub fn quadrature(&self) -> C64 {
        let s: C64 = self.values.iter().sum();
        s * self.grid.cell_volume()
    }

    /// Spectral derivative `d^b` via FFT. Odd orders drop the Nyquist mode.
    pub fn spectral_derivative(&self, b: &MultiIndex) -> Result<SampledFn> {
        if b.len() != self.grid.dim() {
            return Err(Error::DimensionMismatch(format!(
                "derivative index of length {} on a {}-dimensional grid",
                b.len(),
                self.grid.dim()
            )));
        }
        if b.order() > MAX_DERIVATIVE_ORDER {
            return Err(Error::DerivativeOrder {
                order: b.order(),
                max: MAX_DERIVATIVE_ORDER,
            });
        }
        let mut data = self.values.clone();
        let shape = self.grid.shape();
        let n = self.grid.points();
        for (axis, &order) in b.entries().iter().enumerate() {
            if order == 0 {
                continue;
            }
            fft::fft_axis(&mut data, &shape, axis, false);
            let freqs = self.grid.frequencies(axis);
            let mult: Vec<C64> = freqs
                .iter()
                .enumerate()
                .map(|(m, &k)| {
                    if m == n / 2 && order % 2 == 1 {
                        C64::new(0.0, 0.0)
                    } else {
                        C64::new(0.0, k).powu(order) / n as f64
                    }
                })
                .collect();
            let stride = n.pow((shape.len() - axis - 1) as u32);
            data.par_chunks_mut(n * stride).for_each(|block| {
                for (m, f) in mult.iter().enumerate() {
                    for v in &mut block[m * stride..(m + 1) * stride] {
                        *v *= f;
                    }
                }
            });
            fft::fft_axis(&mut data, &shape, axis, true);
        }
        let label = if b.is_zero() {
            self.label.clone()
        } else {
            self.label.derived(&format!("_d{b}"))
        };
        SampledFn::new(self.grid.clone(), data, label)
    }

    /// Symplectic Fourier transform. Forward maps `X` to
    /// `W(a) = (2pi)^{-2n} int exp(-i a^xi) X(xi) dxi`; inverse uses
    /// `exp(+i a^xi)` with unit prefactor. The result lives on
    /// [`Grid::symplectic_dual`].
    pub fn symplectic_fourier(&self, direction: Direction) -> Result<SampledFn> {
        if !self.grid.is_phase_space() {
            return Err(Error::InvalidGrid("symplectic Fourier transform needs a phase-space grid".into()));
        }
        let g = &self.grid;
        let n = g.half_dim();
        let d = g.dim();
        let shape = g.shape();
        let dual = g.symplectic_dual();
        // Both directions carry exp(+i in_x.out_p - i in_p.out_x), since the
        // wedge is antisymmetric and input and output swap roles.
        let mut data = self.values.clone();
        for axis in 0..d {
            let out_axis = (axis + n) % d;
            let sign = if axis < n { 1.0 } else { -1.0 };
            fft::centered_dft_axis(
                &mut data,
                &shape,
                axis,
                -g.half_extent(axis),
                g.spacing(axis),
                -dual.half_extent(out_axis),
                sign,
            );
        }
        let mut pref = g.cell_volume();
        if direction == Direction::Forward {
            pref *= (2.0 * PI).powi(-(d as i32));
        }

        let out: Vec<C64> = (0..data.len())
            .into_par_iter()
            .map(|flat| {
                let mut idx = vec![0; d];
                dual.unravel(flat, &mut idx);
                // Output axis j came from input axis j+n.
                idx.rotate_left(n);
                data[dual.ravel(&idx)] * pref
            })
            .collect();
        let rep = match (direction, &self.label.rep) {
            (Direction::Forward, Rep::Quasichar) => Rep::Wigner,
            (Direction::Inverse, Rep::Wigner) => Rep::Quasichar,
            (_, r) => Rep::Other(format!("sft({r})")),
        };
        SampledFn::new(dual, out, Label::new(rep, self.label.state.clone()))
    }

    /// Largest modulus over the interior band.
    pub fn interior_max_abs(&self, band: f64) -> f64 {
        self.grid
            .interior_indices(band)
            .into_iter()
            .map(|i| self.values[i].norm())
            .fold(0.0, f64::max)
    }

    /// Interior max-abs difference against another function on a matching grid.
    pub fn interior_max_diff(&self, other: &SampledFn, band: f64) -> Result<f64> {
        if !self.grid.approx_eq(&other.grid) {
            return Err(Error::DimensionMismatch(format!(
                "grids {} and {} differ",
                self.grid, other.grid
            )));
        }
        Ok(self
            .grid
            .interior_indices(band)
            .into_iter()
            .map(|i| (self.values[i] - other.values[i]).norm())
            .fold(0.0, f64::max))
    }

    /// Interior max-abs difference against a reference function.
    pub fn interior_error(&self, band: f64, f: impl Fn(&[f64]) -> C64 + Sync) -> f64 {
        self.grid
            .interior_indices(band)
            .into_par_iter()
            .map(|i| (self.values[i] - f(&self.grid.point(i))).norm())
            .reduce(|| 0.0, f64::max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}
