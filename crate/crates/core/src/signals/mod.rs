//! Function spaces on the line and on slices of the homogeneous space:
//! exact and sampled signals, ħ-scaled inner products, the partial Fourier
//! transform, and slice inner products.

pub mod chirp;
pub mod field;
pub mod fourier;
pub mod io;
pub mod poly;
pub mod sampled;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

pub use chirp::{hermite, PolyGaussChirp};
pub use field::{slice_inner_product, ComplexField2D, MeasureKind, MeasureSpec, Normalization, WeightedSlice};
pub use fourier::{partial_fourier, partial_fourier_inverse};
pub use poly::Poly;
pub use sampled::SampledSignal;

use crate::error::{Error, Result};

/// Planck-type constant `ħ > 0` of the central character.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Hbar(f64);

impl Hbar {
    pub fn new(h: f64) -> Result<Self> {
        if h > 0.0 && h.is_finite() {
            Ok(Self(h))
        } else {
            Err(Error::NonPositiveHbar(h))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl Default for Hbar {
    fn default() -> Self {
        Self(1.0)
    }
}

impl TryFrom<f64> for Hbar {
    type Error = Error;
    fn try_from(h: f64) -> Result<Self> {
        Self::new(h)
    }
}

impl From<Hbar> for f64 {
    fn from(h: Hbar) -> f64 {
        h.0
    }
}

/// Points `start + j·step`, `j = 0..count`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniformGrid1D {
    start: f64,
    step: f64,
    count: usize,
}

impl UniformGrid1D {
    pub fn new(start: f64, step: f64, count: usize) -> Result<Self> {
        if !(step > 0.0) || !step.is_finite() || !start.is_finite() {
            return Err(Error::InvalidGrid(format!("start={start}, step={step}")));
        }
        if count == 0 {
            return Err(Error::InvalidGrid("grid must have at least one point".into()));
        }
        Ok(Self { start, step, count })
    }

    /// `count` points covering `[-half_width, half_width)`.
    pub fn symmetric(half_width: f64, count: usize) -> Result<Self> {
        if !(half_width > 0.0) {
            return Err(Error::InvalidGrid(format!("half width {half_width}")));
        }
        Self::new(-half_width, 2.0 * half_width / count as f64, count)
    }

    pub fn start(&self) -> f64 {
        self.start
    }
    pub fn step(&self) -> f64 {
        self.step
    }
    pub fn count(&self) -> usize {
        self.count
    }

    pub fn point(&self, j: usize) -> f64 {
        self.start + j as f64 * self.step
    }

    pub fn last(&self) -> f64 {
        self.point(self.count - 1)
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.count).map(move |j| self.point(j))
    }

    /// Equal up to round-off.
    pub fn same_as(&self, other: &Self) -> bool {
        let tol = 1e-12 * self.step.max(other.step);
        self.count == other.count
            && (self.step - other.step).abs() <= tol
            && (self.start - other.start).abs() <= 1e-9 * self.step.max(other.step)
    }

    /// Index of the grid point equal to `t`, if any.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        let pos = (t - self.start) / self.step;
        let j = pos.round();
        ((pos - j).abs() < 1e-9 && j >= 0.0 && (j as usize) < self.count).then_some(j as usize)
    }

    /// Every `stride`-th point starting at `offset`.
    pub fn subsample(&self, offset: usize, stride: usize) -> Result<Self> {
        if stride == 0 || offset >= self.count {
            return Err(Error::InvalidGrid("bad subsampling".into()));
        }
        Self::new(self.point(offset), self.step * stride as f64, (self.count - offset).div_ceil(stride))
    }
}

/// Default quadrature discretisation: `n` points on `[-half_width, half_width)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Discretization {
    pub n: usize,
    pub half_width: f64,
}

impl Default for Discretization {
    fn default() -> Self {
        Self { n: 512, half_width: 8.0 }
    }
}

impl Discretization {
    pub fn new(n: usize, half_width: f64) -> Result<Self> {
        if !n.is_power_of_two() || n < 2 {
            return Err(Error::InvalidGrid(format!("grid size {n} must be a power of two")));
        }
        if !(half_width > 0.0) {
            return Err(Error::InvalidGrid(format!("window half width {half_width}")));
        }
        Ok(Self { n, half_width })
    }

    pub fn grid(&self) -> UniformGrid1D {
        UniformGrid1D::symmetric(self.half_width, self.n).expect("validated discretisation")
    }

    pub fn step(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }
}

/// A signal on the line, either in the exact family or sampled.
#[derive(Clone, Debug, PartialEq)]
pub enum Signal {
    Exact(PolyGaussChirp),
    Sampled(SampledSignal),
}

impl From<PolyGaussChirp> for Signal {
    fn from(f: PolyGaussChirp) -> Self {
        Signal::Exact(f)
    }
}

impl From<SampledSignal> for Signal {
    fn from(f: SampledSignal) -> Self {
        Signal::Sampled(f)
    }
}

impl Signal {
    pub fn as_exact(&self) -> Option<&PolyGaussChirp> {
        match self {
            Signal::Exact(f) => Some(f),
            Signal::Sampled(_) => None,
        }
    }

    /// Samples on `grid`; sampled signals are band-limited-interpolated
    /// unless the grids coincide.
    pub fn sample(&self, grid: &UniformGrid1D) -> SampledSignal {
        match self {
            Signal::Exact(f) => SampledSignal::new(*grid, f.sample(grid)).expect("finite samples"),
            Signal::Sampled(s) if s.grid().same_as(grid) => s.clone(),
            Signal::Sampled(s) => {
                let it = s.interpolator();
                SampledSignal::new(*grid, grid.points().map(|u| it.eval(u)).collect())
                    .expect("finite samples")
            }
        }
    }

    /// Native grid of a sampled signal.
    pub fn grid(&self) -> Option<&UniformGrid1D> {
        match self {
            Signal::Exact(_) => None,
            Signal::Sampled(s) => Some(s.grid()),
        }
    }

    pub fn norm(&self) -> f64 {
        match self {
            Signal::Exact(f) => f.norm(),
            Signal::Sampled(s) => s.norm(),
        }
    }

    pub fn scale(&self, a: C64) -> Signal {
        match self {
            Signal::Exact(f) => Signal::Exact(f.scale(a)),
            Signal::Sampled(s) => Signal::Sampled(s.scale(a)),
        }
    }

    /// `(centre, radius)` of the region where the signal is not negligible.
    pub fn support(&self) -> (f64, f64) {
        match self {
            Signal::Exact(f) => f.effective_radius(),
            Signal::Sampled(s) => (0.0, s.effective_radius(0.0, 1e-17)),
        }
    }
}

/// `⟨f, g⟩ = ∫ f ḡ du`: exact on the closed family, rectangle rule
/// otherwise. An exact signal paired with a sampled one is sampled on the
/// other's grid; two sampled signals must share a grid.
pub fn inner_product(f: &Signal, g: &Signal) -> Result<C64> {
    match (f, g) {
        (Signal::Exact(a), Signal::Exact(b)) => Ok(a.inner_product(b)),
        (Signal::Sampled(a), Signal::Sampled(b)) => a.inner_product(b),
        (Signal::Exact(_), Signal::Sampled(b)) => f.sample(b.grid()).inner_product(b),
        (Signal::Sampled(a), Signal::Exact(_)) => a.inner_product(&g.sample(a.grid())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn h(v: f64) -> Hbar {
        Hbar::new(v).unwrap()
    }

    #[test]
    fn hbar_must_be_positive() {
        assert!(Hbar::new(0.0).is_err());
        assert!(Hbar::new(-1.0).is_err());
        assert!(serde_json::from_str::<Hbar>("-2.0").is_err());
    }

    #[test]
    fn grid_points_increase() {
        let g = UniformGrid1D::symmetric(8.0, 512).unwrap();
        assert_eq!(g.start(), -8.0);
        assert_eq!(g.step(), 1.0 / 32.0);
        assert!(g.points().zip(g.points().skip(1)).all(|(a, b)| b > a));
        assert!(UniformGrid1D::new(0.0, 0.0, 3).is_err());
        assert!(UniformGrid1D::new(0.0, 1.0, 0).is_err());
        let s = g.subsample(3, 8).unwrap();
        assert_eq!(s.count(), 64);
        assert_eq!(s.point(1), g.point(11));
    }

    #[test]
    fn inner_product_examples() {
        let g0 = Signal::from(hermite(0, h(1.0)).unwrap());
        let g1 = Signal::from(hermite(1, h(1.0)).unwrap());
        assert!((inner_product(&g0, &g0).unwrap() - C64::new(1.0, 0.0)).norm() < 1e-14);
        assert!(inner_product(&g0, &g1).unwrap().norm() < 1e-15);
        let root2 = Signal::from(PolyGaussChirp::gaussian(h(2.0), 2f64.powf(0.25)));
        let ip = inner_product(&root2, &root2).unwrap();
        assert!((ip.re - 0.5f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn inner_product_is_conjugate_symmetric() {
        let f = hermite(2, h(1.0)).unwrap().act(1.0, 0.1, 0.4, -0.3, 0.7, 1.3);
        let g = hermite(1, h(1.0)).unwrap().act(1.0, -0.2, -0.6, 0.2, -0.3, 0.8);
        let a = f.inner_product(&g);
        let b = g.inner_product(&f);
        assert!((a - b.conj()).norm() < 1e-13);
        let grid = Discretization::default().grid();
        let (fs, gs) = (Signal::from(f.clone()).sample(&grid), Signal::from(g.clone()).sample(&grid));
        assert!((fs.inner_product(&gs).unwrap() - a).norm() < 1e-12);
    }

    #[test]
    fn mixed_inner_product_samples_on_the_sampled_grid() {
        let grid = Discretization::default().grid();
        let g0 = hermite(0, h(1.0)).unwrap();
        let s = Signal::from(Signal::from(g0.clone()).sample(&grid));
        let ip = inner_product(&Signal::from(g0), &s).unwrap();
        assert!((ip.re - 1.0).abs() < 1e-13);
        let gauss = |u: f64| (-PI * u * u).exp();
        assert!(gauss(8.0) < 1e-80);
    }
}
