use num_complex::Complex64 as C64;

use super::fourier::{spectral_derivative, BandLimitedInterpolator};
use super::UniformGrid1D;
use crate::error::{Error, Result};

/// Complex samples on a uniform grid; taken to vanish outside the window.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledSignal {
    grid: UniformGrid1D,
    values: Vec<C64>,
}

impl SampledSignal {
    pub fn new(grid: UniformGrid1D, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.count() {
            return Err(Error::GridMismatch(format!(
                "{} samples for a grid of {} points",
                values.len(),
                grid.count()
            )));
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidSignal("non-finite sample".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: UniformGrid1D) -> Self {
        let values = vec![C64::new(0.0, 0.0); grid.count()];
        Self { grid, values }
    }

    pub fn grid(&self) -> &UniformGrid1D {
        &self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<C64> {
        self.values
    }

    /// Rectangle-rule `Δ Σ f ḡ`; grids must coincide.
    pub fn inner_product(&self, other: &Self) -> Result<C64> {
        if !self.grid.same_as(&other.grid) {
            return Err(Error::GridMismatch(format!("{:?} vs {:?}", self.grid, other.grid)));
        }
        let s: C64 = self.values.iter().zip(&other.values).map(|(a, b)| a * b.conj()).sum();
        Ok(s * self.grid.step())
    }

    pub fn norm(&self) -> f64 {
        let s: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        (s * self.grid.step()).sqrt()
    }

    pub fn scale(&self, a: C64) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|v| v * a).collect() }
    }

    pub fn interpolator(&self) -> BandLimitedInterpolator {
        BandLimitedInterpolator::new(&self.grid, &self.values)
    }

    /// Spectral derivative on the zero-padded window.
    pub fn derivative(&self) -> Self {
        let n = self.values.len();
        let mut padded = self.values.clone();
        padded.resize(2 * n, C64::new(0.0, 0.0));
        let mut d = spectral_derivative(&padded, self.grid.step(), 1);
        d.truncate(n);
        Self { grid: self.grid, values: d }
    }

    /// Largest `|u − centre|` over samples above `rel · max|f|`.
    pub fn effective_radius(&self, centre: f64, rel: f64) -> f64 {
        let peak = self.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if peak == 0.0 {
            return 0.0;
        }
        self.grid
            .points()
            .zip(&self.values)
            .filter(|(_, v)| v.norm() > rel * peak)
            .map(|(u, _)| (u - centre).abs())
            .fold(0.0, f64::max)
    }

    /// Squared mass outside `[lo, hi]`, relative to the total.
    pub fn relative_mass_outside(&self, lo: f64, hi: f64) -> f64 {
        let total: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        if total == 0.0 {
            return 0.0;
        }
        let tol = 1e-9 * self.grid.step();
        let outside: f64 = self
            .grid
            .points()
            .zip(&self.values)
            .filter(|(u, _)| *u < lo - tol || *u > hi + tol)
            .map(|(_, v)| v.norm_sqr())
            .sum();
        outside / total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn gaussian_norm_by_quadrature() {
        let grid = UniformGrid1D::new(-8.0, 1.0 / 32.0, 512).unwrap();
        let v = grid.points().map(|u| C64::new(2f64.powf(0.25) * (-PI * u * u).exp(), 0.0)).collect();
        let s = SampledSignal::new(grid, v).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_length_mismatch() {
        let grid = UniformGrid1D::new(0.0, 1.0, 4).unwrap();
        assert!(SampledSignal::new(grid, vec![C64::new(0.0, 0.0); 3]).is_err());
    }

    #[test]
    fn grid_mismatch_is_an_error() {
        let a = SampledSignal::zeros(UniformGrid1D::new(0.0, 1.0, 4).unwrap());
        let b = SampledSignal::zeros(UniformGrid1D::new(0.0, 0.5, 4).unwrap());
        assert!(a.inner_product(&b).is_err());
    }
}
