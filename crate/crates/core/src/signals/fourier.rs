//! FFT plumbing: the ħ-scaled partial Fourier transform, its inverse, and
//! spectral differentiation on uniform grids.
//!
//! Conventions: `[F₂F](x) = ∫ F(u) e^{−2πiħxu} du`, with the output on the
//! centred dual grid `x_k = (k − M/2) / (ħ M Δu)`, where `M` is the padded
//! length (twice the input length).

use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use super::{Hbar, UniformGrid1D};
use crate::error::{Error, Result};

fn planner() -> &'static Mutex<FftPlanner<f64>> {
    static PLANNER: OnceLock<Mutex<FftPlanner<f64>>> = OnceLock::new();
    PLANNER.get_or_init(|| Mutex::new(FftPlanner::new()))
}

/// Cached forward plan. The planner memoises plans per length.
pub fn forward_plan(len: usize) -> Arc<dyn Fft<f64>> {
    planner().lock().expect("fft planner poisoned").plan_fft_forward(len)
}

/// Cached unnormalised inverse plan.
pub fn inverse_plan(len: usize) -> Arc<dyn Fft<f64>> {
    planner().lock().expect("fft planner poisoned").plan_fft_inverse(len)
}

/// Dual grid of the padded transform of `u_grid`.
pub fn dual_grid(u_grid: &UniformGrid1D, hbar: Hbar) -> Result<UniformGrid1D> {
    let m = 2 * u_grid.count();
    let dx = 1.0 / (hbar.get() * m as f64 * u_grid.step());
    UniformGrid1D::new(-(m as f64 / 2.0) * dx, dx, m)
}

/// Partial Fourier transform along the fast (row) axis of a row-major table
/// whose rows are sampled on `u_grid`. Rows are zero-padded to `2N`.
///
/// Returns the dual x-grid and the transformed table (`rows × 2N`).
pub fn partial_fourier(data: &[C64], u_grid: &UniformGrid1D, hbar: Hbar) -> Result<(UniformGrid1D, Vec<C64>)> {
    let n = u_grid.count();
    if n == 0 || data.len() % n != 0 {
        return Err(Error::GridMismatch(format!(
            "table of {} values is not a whole number of rows of length {n}",
            data.len()
        )));
    }
    let x_grid = dual_grid(u_grid, hbar)?;
    let m = x_grid.count();
    let plan = forward_plan(m);
    let du = u_grid.step();
    let u0 = u_grid.start();
    let h = hbar.get();
    let post: Vec<C64> = x_grid
        .points()
        .map(|x| du * C64::new(0.0, -2.0 * PI * h * x * u0).exp())
        .collect();
    let mut out = vec![C64::new(0.0, 0.0); (data.len() / n) * m];
    out.par_chunks_mut(m).zip(data.par_chunks(n)).for_each(|(row_out, row_in)| {
        // (−1)^j shifts the spectrum so that index k maps to x_k.
        for (j, (o, &v)) in row_out.iter_mut().zip(row_in).enumerate() {
            *o = if j % 2 == 0 { v } else { -v };
        }
        plan.process(row_out);
        for (o, p) in row_out.iter_mut().zip(&post) {
            *o *= p;
        }
    });
    Ok((x_grid, out))
}

/// Conjugate-kernel transform `F(u) = ħ ∫ G(x) e^{2πiħxu} dx` evaluated on
/// `u_grid`, where `x_grid` must be the dual grid of a padded `u_grid`.
pub fn partial_fourier_inverse(
    data: &[C64],
    x_grid: &UniformGrid1D,
    u_grid: &UniformGrid1D,
    hbar: Hbar,
) -> Result<Vec<C64>> {
    let m = x_grid.count();
    let n = u_grid.count();
    if m == 0 || data.len() % m != 0 {
        return Err(Error::GridMismatch("table is not a whole number of x rows".into()));
    }
    if n > m {
        return Err(Error::GridMismatch(format!("u-grid of {n} points does not fit a dual grid of {m}")));
    }
    let h = hbar.get();
    let expected_dx = 1.0 / (h * m as f64 * u_grid.step());
    if ((x_grid.step() - expected_dx) / expected_dx).abs() > 1e-9
        || ((x_grid.start() + (m as f64 / 2.0) * x_grid.step()) / x_grid.step()).abs() > 1e-6
    {
        return Err(Error::GridMismatch("x-grid is not the centred dual of the u-grid".into()));
    }
    let plan = inverse_plan(m);
    let dx = x_grid.step();
    let u0 = u_grid.start();
    let pre: Vec<C64> = x_grid
        .points()
        .map(|x| C64::new(0.0, 2.0 * PI * h * x * u0).exp())
        .collect();
    let rows = data.len() / m;
    let mut out = vec![C64::new(0.0, 0.0); rows * n];
    out.par_chunks_mut(n).zip(data.par_chunks(m)).for_each(|(row_out, row_in)| {
        let mut buf: Vec<C64> = row_in.iter().zip(&pre).map(|(v, p)| v * p).collect();
        plan.process(&mut buf);
        for (j, o) in row_out.iter_mut().enumerate() {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            *o = buf[j] * (sign * h * dx);
        }
    });
    Ok(out)
}

/// Angular wavenumbers `2πk/L` in FFT order for a periodic grid of `n`
/// points and step `step`; the Nyquist entry is returned separately.
fn wavenumbers(n: usize, step: f64) -> Vec<f64> {
    let l = n as f64 * step;
    (0..n)
        .map(|k| {
            let kk = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
            2.0 * PI * kk / l
        })
        .collect()
}

/// Spectral derivative of order 1 or 2 of a periodic sequence.
pub fn spectral_derivative(values: &[C64], step: f64, order: u32) -> Vec<C64> {
    let n = values.len();
    if n < 2 {
        return vec![C64::new(0.0, 0.0); n];
    }
    let mut buf = values.to_vec();
    forward_plan(n).process(&mut buf);
    let ks = wavenumbers(n, step);
    for (k, (v, &w)) in buf.iter_mut().zip(&ks).enumerate() {
        let nyquist = n % 2 == 0 && k == n / 2;
        *v *= match order {
            1 if nyquist => C64::new(0.0, 0.0),
            1 => C64::new(0.0, w),
            2 => C64::new(-w * w, 0.0),
            _ => panic!("unsupported derivative order {order}"),
        };
    }
    inverse_plan(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    buf.iter_mut().for_each(|v| *v *= scale);
    buf
}

/// Spectral derivative along rows of a row-major `rows × cols` table.
pub fn derivative_rows(data: &[C64], cols: usize, step: f64, order: u32) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); data.len()];
    out.par_chunks_mut(cols).zip(data.par_chunks(cols)).for_each(|(o, row)| {
        o.copy_from_slice(&spectral_derivative(row, step, order));
    });
    out
}

/// Spectral derivative along columns of a row-major `rows × cols` table.
pub fn derivative_cols(data: &[C64], cols: usize, step: f64, order: u32) -> Vec<C64> {
    let rows = data.len() / cols;
    let t = transpose(data, rows, cols);
    let dt = derivative_rows(&t, rows, step, order);
    transpose(&dt, cols, rows)
}

pub fn transpose(data: &[C64], rows: usize, cols: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); data.len()];
    for i in 0..rows {
        for j in 0..cols {
            out[j * rows + i] = data[i * cols + j];
        }
    }
    out
}

/// Trigonometric interpolant of a sampled sequence on `[a, a + N Δ)`,
/// identically zero outside that window.
#[derive(Clone, Debug)]
pub struct BandLimitedInterpolator {
    start: f64,
    step: f64,
    samples: Vec<C64>,
    coeffs: Vec<C64>,
}

impl BandLimitedInterpolator {
    /// Builds the interpolant after zero-padding the samples to twice their
    /// length so the periodic extension does not wrap around.
    pub fn new(grid: &UniformGrid1D, values: &[C64]) -> Self {
        let n = 2 * values.len();
        let mut samples = values.to_vec();
        samples.resize(n, C64::new(0.0, 0.0));
        let mut coeffs = samples.clone();
        forward_plan(n).process(&mut coeffs);
        let scale = 1.0 / n as f64;
        coeffs.iter_mut().for_each(|c| *c *= scale);
        Self { start: grid.start(), step: grid.step(), samples, coeffs }
    }

    pub fn eval(&self, t: f64) -> C64 {
        let n = self.coeffs.len();
        let pos = (t - self.start) / self.step;
        if pos < -0.5 || pos > (n / 2) as f64 - 0.5 {
            return C64::new(0.0, 0.0);
        }
        let nearest = pos.round();
        if (pos - nearest).abs() < 1e-12 && nearest >= 0.0 && (nearest as usize) < n {
            return self.samples[nearest as usize];
        }
        let theta = 2.0 * PI * pos / n as f64;
        let half = n / 2;
        let base = C64::new(0.0, theta).exp();
        // positive frequencies 0..half, negative 1..half, Nyquist split.
        let mut acc = self.coeffs[0];
        let mut rot = C64::new(1.0, 0.0);
        for k in 1..half {
            rot *= base;
            acc += self.coeffs[k] * rot + self.coeffs[n - k] * rot.conj();
        }
        let nyq = C64::new(0.0, theta * half as f64);
        acc += self.coeffs[half] * 0.5 * (nyq.exp() + (-nyq).exp());
        acc
    }
}
