//! Axis-wise FFTs on row-major tensors.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use rustfft::FftPlanner;

/// Raw FFT along one axis. `inverse = false` uses `exp(-2 pi i m k / N)`;
/// neither direction normalizes.
pub(crate) fn fft_axis(data: &mut [C64], shape: &[usize], axis: usize, inverse: bool) {
    let n = shape[axis];
    let stride: usize = shape[axis + 1..].iter().product();
    let outer: usize = shape[..axis].iter().product();
    let fft = {
        let mut planner = FftPlanner::<f64>::new();
        if inverse {
            planner.plan_fft_inverse(n)
        } else {
            planner.plan_fft_forward(n)
        }
    };

    if stride == 1 {
        data.par_chunks_mut(n).for_each(|line| fft.process(line));
        return;
    }

    // Gather lines into contiguous storage, transform, scatter back.
    let lines = outer * stride;
    let mut buf = vec![C64::new(0.0, 0.0); lines * n];
    buf.par_chunks_mut(n).enumerate().for_each(|(l, line)| {
        let (o, s) = (l / stride, l % stride);
        let base = o * n * stride + s;
        for (k, v) in line.iter_mut().enumerate() {
            *v = data[base + k * stride];
        }
        fft.process(line);
    });
    for (l, line) in buf.chunks(n).enumerate() {
        let (o, s) = (l / stride, l % stride);
        let base = o * n * stride + s;
        for (k, v) in line.iter().enumerate() {
            data[base + k * stride] = *v;
        }
    }
}

/// Evaluates `out_m = sum_k f_k exp(sign * i * w_m * t_k)` along one axis, where
/// `t_k = t0 + k h` and `w_m = w0 + m * 2 pi / (N h)`.
pub(crate) fn centered_dft_axis(
    data: &mut [C64],
    shape: &[usize],
    axis: usize,
    t0: f64,
    h: f64,
    w0: f64,
    sign: f64,
) {
    let n = shape[axis];
    let stride: usize = shape[axis + 1..].iter().product();
    let dw = 2.0 * PI / (n as f64 * h);
    let pre: Vec<C64> = (0..n)
        .map(|k| C64::from_polar(1.0, sign * w0 * k as f64 * h))
        .collect();
    let post: Vec<C64> = (0..n)
        .map(|m| C64::from_polar(1.0, sign * (w0 + m as f64 * dw) * t0))
        .collect();

    scale_axis(data, n, stride, &pre);
    fft_axis(data, shape, axis, sign > 0.0);
    scale_axis(data, n, stride, &post);
}

fn scale_axis(data: &mut [C64], n: usize, stride: usize, factors: &[C64]) {
    data.par_chunks_mut(n * stride).for_each(|block| {
        for k in 0..n {
            let f = factors[k];
            for v in &mut block[k * stride..(k + 1) * stride] {
                *v *= f;
            }
        }
    });
}

/// Angular wavenumber of FFT bin `m` for `n` samples at spacing `h`.
pub(crate) fn wavenumber(m: usize, n: usize, h: f64) -> f64 {
    let signed = if m < n / 2 { m as f64 } else { m as f64 - n as f64 };
    2.0 * PI * signed / (n as f64 * h)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive(f: &[C64], t0: f64, h: f64, w0: f64, sign: f64) -> Vec<C64> {
        let n = f.len();
        let dw = 2.0 * PI / (n as f64 * h);
        (0..n)
            .map(|m| {
                let w = w0 + m as f64 * dw;
                f.iter()
                    .enumerate()
                    .map(|(k, &v)| v * C64::from_polar(1.0, sign * w * (t0 + k as f64 * h)))
                    .sum()
            })
            .collect()
    }

    #[test]
    fn centered_dft_matches_direct_sum() {
        let n = 16;
        let f: Vec<C64> = (0..n)
            .map(|k| C64::new((k as f64 * 0.37).sin(), (k as f64 * 0.11).cos()))
            .collect();
        for &sign in &[-1.0, 1.0] {
            let mut got = f.clone();
            centered_dft_axis(&mut got, &[n], 0, -1.3, 0.21, -4.0, sign);
            let want = naive(&f, -1.3, 0.21, -4.0, sign);
            for (g, w) in got.iter().zip(&want) {
                assert!((g - w).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn axis_transform_on_2d_tensor() {
        let shape = [4, 8];
        let data: Vec<C64> = (0..32).map(|i| C64::new(i as f64, -(i as f64) * 0.5)).collect();
        let mut got = data.clone();
        centered_dft_axis(&mut got, &shape, 0, -2.0, 1.0, -0.5, 1.0);
        for col in 0..8 {
            let line: Vec<C64> = (0..4).map(|r| data[r * 8 + col]).collect();
            let want = naive(&line, -2.0, 1.0, -0.5, 1.0);
            for r in 0..4 {
                assert!((got[r * 8 + col] - want[r]).norm() < 1e-10);
            }
        }
    }
}
