//! Sampled slices `F(·, ·, b, r)` of functions on the homogeneous space,
//! probability measures over slices, and the slice inner product.

use std::fmt::Write as _;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::{Hbar, UniformGrid1D};
use crate::error::{Error, Result};

/// Values on `x_grid × y_grid` at a fixed slice `(b, r)`, stored row-major
/// with `y` as the outer index.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexField2D {
    x_grid: UniformGrid1D,
    y_grid: UniformGrid1D,
    values: Vec<C64>,
    b: f64,
    r: f64,
    hbar: Hbar,
}

impl ComplexField2D {
    pub fn new(
        x_grid: UniformGrid1D,
        y_grid: UniformGrid1D,
        values: Vec<C64>,
        b: f64,
        r: f64,
        hbar: Hbar,
    ) -> Result<Self> {
        if !(r > 0.0) {
            return Err(Error::NonPositiveSqueeze(r));
        }
        if values.len() != x_grid.count() * y_grid.count() {
            return Err(Error::GridMismatch(format!(
                "{} values for a {}×{} grid",
                values.len(),
                y_grid.count(),
                x_grid.count()
            )));
        }
        Ok(Self { x_grid, y_grid, values, b, r, hbar })
    }

    pub fn zeros(x_grid: UniformGrid1D, y_grid: UniformGrid1D, b: f64, r: f64, hbar: Hbar) -> Result<Self> {
        let n = x_grid.count() * y_grid.count();
        Self::new(x_grid, y_grid, vec![C64::new(0.0, 0.0); n], b, r, hbar)
    }

    /// Tabulates `f(x, y)` on the grids.
    pub fn from_fn(
        x_grid: UniformGrid1D,
        y_grid: UniformGrid1D,
        b: f64,
        r: f64,
        hbar: Hbar,
        f: impl Fn(f64, f64) -> C64,
    ) -> Result<Self> {
        let values = y_grid
            .points()
            .flat_map(|y| x_grid.points().map(move |x| (x, y)))
            .map(|(x, y)| f(x, y))
            .collect();
        Self::new(x_grid, y_grid, values, b, r, hbar)
    }

    pub fn x_grid(&self) -> &UniformGrid1D {
        &self.x_grid
    }
    pub fn y_grid(&self) -> &UniformGrid1D {
        &self.y_grid
    }
    pub fn values(&self) -> &[C64] {
        &self.values
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn r(&self) -> f64 {
        self.r
    }
    pub fn hbar(&self) -> Hbar {
        self.hbar
    }

    pub fn value(&self, ix: usize, iy: usize) -> C64 {
        self.values[iy * self.x_grid.count() + ix]
    }

    /// Same grids and slice, new values.
    pub fn with_values(&self, values: Vec<C64>) -> Result<Self> {
        Self::new(self.x_grid, self.y_grid, values, self.b, self.r, self.hbar)
    }

    pub fn same_grids(&self, other: &Self) -> bool {
        self.x_grid.same_as(&other.x_grid) && self.y_grid.same_as(&other.y_grid)
    }

    pub fn same_slice(&self, b: f64, r: f64) -> bool {
        (self.b - b).abs() <= 1e-12 * (1.0 + b.abs()) && (self.r - r).abs() <= 1e-12 * r
    }

    /// Per-slice measure weight `ħ Δx Δy` (or divided by `√(2r)`).
    pub fn cell_weight(&self, normalization: Normalization) -> f64 {
        let base = self.hbar.get() * self.x_grid.step() * self.y_grid.step();
        match normalization {
            Normalization::Default => base,
            Normalization::Paper => base / (2.0 * self.r).sqrt(),
        }
    }

    pub fn norm(&self, normalization: Normalization) -> f64 {
        let s: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        (s * self.cell_weight(normalization)).sqrt()
    }

    /// `‖self − other‖ / ‖other‖` under the default weight; zero when both vanish.
    pub fn relative_l2_diff(&self, other: &Self) -> Result<f64> {
        if !self.same_grids(other) {
            return Err(Error::GridMismatch("fields on different grids".into()));
        }
        let num: f64 = self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm_sqr()).sum();
        let den: f64 = other.values.iter().map(|v| v.norm_sqr()).sum();
        Ok(relative(num.sqrt(), den.sqrt()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        if !self.same_grids(other) {
            return Err(Error::GridMismatch("fields on different grids".into()));
        }
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }

    /// CSV with header `x,y,re,im`, `y` outer, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.values.len() * 96 + 16);
        out.push_str("x,y,re,im\n");
        for (iy, y) in self.y_grid.points().enumerate() {
            for (ix, x) in self.x_grid.points().enumerate() {
                let v = self.value(ix, iy);
                writeln!(out, "{},{},{},{}", fmt17(x), fmt17(y), fmt17(v.re), fmt17(v.im))
                    .expect("writing to a String");
            }
        }
        out
    }

    /// Parses [`Self::to_csv`] output; slice parameters are supplied by the caller.
    pub fn from_csv(text: &str, b: f64, r: f64, hbar: Hbar) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h.trim() == "x,y,re,im" => {}
            other => return Err(Error::Parse(format!("expected header `x,y,re,im`, got {other:?}"))),
        }
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        let mut values = Vec::new();
        for (lineno, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 4 {
                return Err(Error::Parse(format!("line {}: expected 4 columns", lineno + 2)));
            }
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 2)))
            };
            xs.push(parse(cols[0])?);
            ys.push(parse(cols[1])?);
            values.push(C64::new(parse(cols[2])?, parse(cols[3])?));
        }
        if values.is_empty() {
            return Err(Error::Parse("no data rows".into()));
        }
        let nx = ys.iter().take_while(|&&y| y == ys[0]).count();
        if values.len() % nx != 0 {
            return Err(Error::Parse("rows do not form a rectangular grid".into()));
        }
        let ny = values.len() / nx;
        let x_coords = &xs[..nx];
        let y_coords: Vec<f64> = (0..ny).map(|j| ys[j * nx]).collect();
        let x_grid = infer_grid(x_coords)?;
        let y_grid = infer_grid(&y_coords)?;
        for (k, (&x, &y)) in xs.iter().zip(&ys).enumerate() {
            let (ix, iy) = (k % nx, k / nx);
            if x != x_coords[ix] || y != y_coords[iy] {
                return Err(Error::Parse(format!("row {} breaks the y-outer/x-inner ordering", k + 2)));
            }
        }
        Self::new(x_grid, y_grid, values, b, r, hbar)
    }
}

pub(crate) fn relative(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else if den == 0.0 {
        f64::INFINITY
    } else {
        num / den
    }
}

/// 17 significant digits, scientific notation.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Recovers `(start, step, count)` from written coordinates, choosing the
/// step (within a few ulps of the average spacing) that reproduces every
/// coordinate bit-for-bit when possible.
pub fn infer_grid(coords: &[f64]) -> Result<UniformGrid1D> {
    let n = coords.len();
    if n == 1 {
        return UniformGrid1D::new(coords[0], 1.0, 1);
    }
    let start = coords[0];
    let avg = (coords[n - 1] - start) / (n - 1) as f64;
    let reproduces = |step: f64| coords.iter().enumerate().all(|(j, &c)| start + j as f64 * step == c);
    for k in 0..=16i64 {
        for sign in [1i64, -1] {
            let bits = avg.to_bits() as i64 + sign * k;
            let step = f64::from_bits(bits as u64);
            if reproduces(step) {
                return UniformGrid1D::new(start, step, n);
            }
        }
    }
    // Not bit-reproducible: accept if uniform to round-off.
    let tol = 1e-9 * avg.abs();
    if coords.iter().enumerate().all(|(j, &c)| (start + j as f64 * avg - c).abs() <= tol.max(1e-12)) {
        return UniformGrid1D::new(start, avg, n);
    }
    Err(Error::Parse("coordinates are not on a uniform grid".into()))
}

/// Per-slice weight convention.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// `ħ dx dy`: the five-operator pipeline is isometric for this weight.
    #[default]
    Default,
    /// `ħ dx dy / √(2r)`.
    Paper,
}

/// A probability measure over slices `(b, r)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureKind {
    Dirac { b0: f64, r0: f64 },
    Discrete(Vec<WeightedSlice>),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedSlice {
    pub b: f64,
    pub r: f64,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureSpec {
    pub kind: MeasureKind,
    #[serde(default)]
    pub normalization: Normalization,
}

impl MeasureSpec {
    pub fn dirac(b0: f64, r0: f64) -> Result<Self> {
        if !(r0 > 0.0) {
            return Err(Error::NonPositiveSqueeze(r0));
        }
        Ok(Self { kind: MeasureKind::Dirac { b0, r0 }, normalization: Normalization::Default })
    }

    pub fn discrete(slices: Vec<WeightedSlice>) -> Result<Self> {
        let spec = Self { kind: MeasureKind::Discrete(slices), normalization: Normalization::Default };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_normalization(mut self, normalization: Normalization) -> Self {
        self.normalization = normalization;
        self
    }

    pub fn validate(&self) -> Result<()> {
        match &self.kind {
            MeasureKind::Dirac { r0, .. } if !(*r0 > 0.0) => Err(Error::NonPositiveSqueeze(*r0)),
            MeasureKind::Dirac { .. } => Ok(()),
            MeasureKind::Discrete(slices) => {
                if slices.is_empty() {
                    return Err(Error::InvalidMeasure("no slices".into()));
                }
                if let Some(s) = slices.iter().find(|s| !(s.r > 0.0)) {
                    return Err(Error::NonPositiveSqueeze(s.r));
                }
                if slices.iter().any(|s| !(s.weight >= 0.0)) {
                    return Err(Error::InvalidMeasure("negative weight".into()));
                }
                let total: f64 = slices.iter().map(|s| s.weight).sum();
                if (total - 1.0).abs() > 1e-12 {
                    return Err(Error::InvalidMeasure(format!("weights sum to {total}, not 1")));
                }
                Ok(())
            }
        }
    }

    /// The atoms `(b, r, weight)` of the measure.
    pub fn atoms(&self) -> Vec<WeightedSlice> {
        match &self.kind {
            MeasureKind::Dirac { b0, r0 } => vec![WeightedSlice { b: *b0, r: *r0, weight: 1.0 }],
            MeasureKind::Discrete(s) => s.clone(),
        }
    }
}

pub(crate) fn find_slice(fields: &[ComplexField2D], b: f64, r: f64) -> Result<&ComplexField2D> {
    fields
        .iter()
        .find(|f| f.same_slice(b, r))
        .ok_or(Error::MissingSlice { b, r })
}

/// `⟨F, G⟩_μ`: per-slice quadrature of `F Ḡ` against the slice weight,
/// combined with the measure weights.
pub fn slice_inner_product(f: &[ComplexField2D], g: &[ComplexField2D], measure: &MeasureSpec) -> Result<C64> {
    measure.validate()?;
    let mut total = C64::new(0.0, 0.0);
    for atom in measure.atoms() {
        let fs = find_slice(f, atom.b, atom.r)?;
        let gs = find_slice(g, atom.b, atom.r)?;
        if !fs.same_grids(gs) {
            return Err(Error::GridMismatch(format!("slice (b={}, r={})", atom.b, atom.r)));
        }
        if fs.hbar() != gs.hbar() {
            return Err(Error::GridMismatch("fields carry different ħ".into()));
        }
        let s: C64 = fs.values().iter().zip(gs.values()).map(|(a, b)| a * b.conj()).sum();
        total += s * fs.cell_weight(measure.normalization) * atom.weight;
    }
    Ok(total)
}
