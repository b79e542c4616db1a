use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::stack::SliceStack;
use super::transform::{contravariant, covariant_fast};
use super::TransformContext;
use crate::error::{Error, Result};
use crate::signals::field::relative;
use crate::signals::fourier::{derivative_cols, derivative_rows};
use crate::signals::{ComplexField2D, Hbar, MeasureSpec, Normalization, SampledSignal, Signal, UniformGrid1D};

fn l2(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn rel(op: &[C64], f: &[C64]) -> f64 {
    relative(l2(op), l2(f))
}

/// Spectral `(x, y)` derivatives of one slice.
struct SpatialDerivs {
    fx: Vec<C64>,
    fy: Vec<C64>,
    fxx: Vec<C64>,
    fxy: Vec<C64>,
}

impl SpatialDerivs {
    fn of(f: &ComplexField2D) -> Self {
        let nx = f.x_grid().count();
        let (dx, dy) = (f.x_grid().step(), f.y_grid().step());
        let fx = derivative_rows(f.values(), nx, dx, 1);
        let fxx = derivative_rows(f.values(), nx, dx, 2);
        let fy = derivative_cols(f.values(), nx, dy, 1);
        let fxy = derivative_cols(&fx, nx, dy, 1);
        Self { fx, fy, fxx, fxy }
    }
}

fn central_difference(plus: &ComplexField2D, minus: &ComplexField2D, h: f64) -> Vec<C64> {
    plus.values().iter().zip(minus.values()).map(|(p, m)| (p - m) / (2.0 * h)).collect()
}

/// `x` coordinate of each stored value.
fn x_of(f: &ComplexField2D) -> impl Iterator<Item = f64> + '_ {
    let xs: Vec<f64> = f.x_grid().points().collect();
    (0..f.y_grid().count()).flat_map(move |_| xs.clone())
}

fn c1_values(f: &ComplexField2D, d: &SpatialDerivs) -> Vec<C64> {
    let (b, r) = (f.b(), f.r());
    let h = f.hbar().get();
    let a = C64::new(r * r, -b);
    let i = C64::new(0.0, 1.0);
    x_of(f)
        .enumerate()
        .map(|(k, x)| (a * d.fx[k] + i * d.fy[k] + 2.0 * PI * h * x * f.values()[k]) / r)
        .collect()
}

/// Relative residuals of `C₁ = (1/r)((r² − ib)∂x + i∂y + 2πħx)` on the
/// central slice and `C₂ = 2r²∂b + ir∂r − i/2` across the stencil.
pub fn cauchy_riemann_residuals(stack: &SliceStack) -> (f64, f64) {
    let f = stack.centre();
    let d = SpatialDerivs::of(f);
    let c1 = rel(&c1_values(f, &d), f.values());
    let r = stack.r0();
    let fb = central_difference(stack.b_plus(), stack.b_minus(), stack.h_b());
    let fr = central_difference(stack.r_plus(), stack.r_minus(), stack.h_r());
    let i = C64::new(0.0, 1.0);
    let c2: Vec<C64> = f
        .values()
        .iter()
        .enumerate()
        .map(|(k, v)| 2.0 * r * r * fb[k] + i * r * fr[k] - 0.5 * i * v)
        .collect();
    (c1, rel(&c2, f.values()))
}

/// Relative residuals of `S₁ = r²(4πiħ∂b − ∂²x)` and
/// `S₂ = −4πiħr∂r − 2b∂²x + 2∂x∂y − 4πiħx∂x − 2πiħ`.
pub fn structural_residuals(stack: &SliceStack) -> (f64, f64) {
    let f = stack.centre();
    let d = SpatialDerivs::of(f);
    let (b, r) = (stack.b0(), stack.r0());
    let ih = C64::new(0.0, PI * stack.hbar().get());
    let fb = central_difference(stack.b_plus(), stack.b_minus(), stack.h_b());
    let fr = central_difference(stack.r_plus(), stack.r_minus(), stack.h_r());
    let s1: Vec<C64> = (0..fb.len()).map(|k| r * r * (4.0 * ih * fb[k] - d.fxx[k])).collect();
    let s2: Vec<C64> = x_of(f)
        .enumerate()
        .map(|(k, x)| {
            -4.0 * ih * r * fr[k] - 2.0 * b * d.fxx[k] + 2.0 * d.fxy[k] - 4.0 * ih * x * d.fx[k]
                - 2.0 * ih * f.values()[k]
        })
        .collect();
    (rel(&s1, f.values()), rel(&s2, f.values()))
}

/// `w = b + ir²`, `z = x + wy` and `f₂ = F e^{πiħx²/w} / √r`.
///
/// `e^{πiħx²/w}` grows like `e^{πħx²r²/|w|²}`, so `f₂` is stored as
/// `mantissa · e^{log_scale}` with the real growth kept per `x` column.
#[derive(Clone, Debug)]
pub struct ComplexChart {
    w: C64,
    x_grid: UniformGrid1D,
    y_grid: UniformGrid1D,
    z: Vec<C64>,
    mantissa: Vec<C64>,
    log_scale: Vec<f64>,
    r: f64,
    hbar: Hbar,
    stack: Option<SliceStack>,
}

/// `a = πiħx²/w`.
fn chart_exponent(h: f64, x: f64, w: C64) -> C64 {
    C64::new(0.0, PI * h * x * x) / w
}

impl ComplexChart {
    fn from_slice(f: &ComplexField2D, stack: Option<SliceStack>) -> Self {
        let (b, r) = (f.b(), f.r());
        let h = f.hbar().get();
        let w = C64::new(b, r * r);
        let exps: Vec<C64> = f.x_grid().points().map(|x| chart_exponent(h, x, w)).collect();
        let nx = f.x_grid().count();
        let sr = r.sqrt();
        let mut z = Vec::with_capacity(f.values().len());
        let mut mantissa = Vec::with_capacity(f.values().len());
        for (iy, y) in f.y_grid().points().enumerate() {
            for (ix, x) in f.x_grid().points().enumerate() {
                z.push(x + w * y);
                mantissa.push(f.values()[iy * nx + ix] * C64::from_polar(1.0, exps[ix].im) / sr);
            }
        }
        Self {
            w,
            x_grid: *f.x_grid(),
            y_grid: *f.y_grid(),
            z,
            mantissa,
            log_scale: exps.iter().map(|a| a.re).collect(),
            r,
            hbar: f.hbar(),
            stack,
        }
    }

    pub fn w(&self) -> C64 {
        self.w
    }
    pub fn z(&self) -> &[C64] {
        &self.z
    }
    pub fn x_grid(&self) -> &UniformGrid1D {
        &self.x_grid
    }
    pub fn y_grid(&self) -> &UniformGrid1D {
        &self.y_grid
    }

    /// `f₂` at grid index `(ix, iy)`; may overflow to infinity far out in `x`.
    pub fn f2(&self, ix: usize, iy: usize) -> C64 {
        self.mantissa[iy * self.x_grid.count() + ix] * self.log_scale[ix].exp()
    }

    /// `(mantissa, log_scale)` with `f₂ = mantissa · e^{log_scale}`.
    pub fn f2_scaled(&self, ix: usize, iy: usize) -> (C64, f64) {
        (self.mantissa[iy * self.x_grid.count() + ix], self.log_scale[ix])
    }

    /// `√r e^{−πiħx²/w} f₂`, i.e. the original slice values.
    pub fn recover_field(&self) -> Vec<C64> {
        let nx = self.x_grid.count();
        let h = self.hbar.get();
        let phase: Vec<C64> = self.x_grid.points().map(|x| C64::from_polar(1.0, -chart_exponent(h, x, self.w).im)).collect();
        self.mantissa.iter().enumerate().map(|(k, m)| m * phase[k % nx] * self.r.sqrt()).collect()
    }

    /// Adds `g(z, w)` to `f₂` on every slice of the underlying stack.
    pub fn add_holomorphic<G>(&self, g: G) -> Result<Self>
    where
        G: Fn(C64, C64) -> C64,
    {
        let stack = self.stack.as_ref().ok_or_else(|| Error::MissingStencil("chart has no slice stack".into()))?;
        let h = self.hbar.get();
        let stack = stack.map_slices(&|f: &ComplexField2D| {
            let w = C64::new(f.b(), f.r() * f.r());
            let sr = f.r().sqrt();
            let nx = f.x_grid().count();
            let values = f
                .values()
                .iter()
                .enumerate()
                .map(|(k, v)| {
                    let x = f.x_grid().point(k % nx);
                    let y = f.y_grid().point(k / nx);
                    v + g(x + w * y, w) * sr * (-chart_exponent(h, x, w)).exp()
                })
                .collect();
            f.with_values(values)
        })?;
        Ok(to_complex_chart(&stack))
    }
}

/// Chart of the central slice, keeping the stack for `∂w`.
pub fn to_complex_chart(stack: &SliceStack) -> ComplexChart {
    ComplexChart::from_slice(stack.centre(), Some(stack.clone()))
}

impl From<&ComplexField2D> for ComplexChart {
    fn from(f: &ComplexField2D) -> Self {
        ComplexChart::from_slice(f, None)
    }
}

/// Relative residual of `4πiħw∂w f₂ − w∂²z f₂ + 4πiħz∂z f₂ + 2πiħf₂`.
///
/// With `∂z = ∂x` and `∂w = ∂b − y∂x` at fixed `(x, y)` this becomes
/// `4πiħw∂b f₂ − w∂²x f₂ + 4πiħx∂x f₂ + 2πiħf₂`, evaluated after factoring
/// out `e^{πiħx²/w}/√r` so nothing overflows; the norm is taken against `F`.
pub fn parabolic_residual(chart: &ComplexChart) -> Result<f64> {
    let stack = chart.stack.as_ref().ok_or_else(|| Error::MissingStencil("∂w needs the b-neighbour slices".into()))?;
    let f = stack.centre();
    let d = SpatialDerivs::of(f);
    let fb = central_difference(stack.b_plus(), stack.b_minus(), stack.h_b());
    let w = chart.w;
    let ih = C64::new(0.0, PI * stack.hbar().get());
    let out: Vec<C64> = x_of(f)
        .enumerate()
        .map(|(k, x)| {
            let v = f.values()[k];
            let ax = 2.0 * ih * x / w;
            let gx = d.fx[k] + ax * v;
            let gxx = d.fxx[k] + 2.0 * ax * d.fx[k] + (2.0 * ih / w + ax * ax) * v;
            let gb = fb[k] - ih * x * x / (w * w) * v;
            4.0 * ih * w * gb - w * gxx + 4.0 * ih * x * gx + 2.0 * ih * v
        })
        .collect();
    Ok(rel(&out, f.values()))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    pub c1: f64,
    pub c2: f64,
    pub s1: f64,
    pub s2: f64,
    pub parabolic: f64,
}

impl Residuals {
    pub fn of(stack: &SliceStack) -> Self {
        let (c1, c2) = cauchy_riemann_residuals(stack);
        let (s1, s2) = structural_residuals(stack);
        let parabolic = parabolic_residual(&to_complex_chart(stack)).expect("stack charts carry their stencil");
        Self { c1, c2, s1, s2, parabolic }
    }
}

/// Step-halving ratios `residual(h) / residual(h/2)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Convergence {
    pub half: Residuals,
    pub c2_ratio: f64,
    pub s1_ratio: f64,
    pub s2_ratio: f64,
    pub parabolic_ratio: f64,
}

/// Residuals at or below this are round-off; their ratios carry no information.
pub const NOISE_FLOOR: f64 = 1e-11;

impl Convergence {
    fn ratio(full: f64, half: f64) -> f64 {
        if half == 0.0 {
            if full == 0.0 { 0.0 } else { f64::INFINITY }
        } else {
            full / half
        }
    }

    pub fn second_order(full: f64, ratio: f64) -> bool {
        full <= NOISE_FLOOR || (3.0..=5.0).contains(&ratio)
    }

    /// Every finite-difference residual shows the `h²` ratio.
    pub fn verified(&self, full: &Residuals) -> bool {
        Self::second_order(full.c2, self.c2_ratio)
            && Self::second_order(full.s1, self.s1_ratio)
            && Self::second_order(full.s2, self.s2_ratio)
            && Self::second_order(full.parabolic, self.parabolic_ratio)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SliceNorms {
    pub default_weight: f64,
    pub paper_weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub b0: f64,
    pub r0: f64,
    pub h_b: f64,
    pub h_r: f64,
    #[serde(flatten)]
    pub residuals: Residuals,
    pub norms: SliceNorms,
    pub convergence: Option<Convergence>,
    pub convergence_verified: Option<bool>,
}

/// All residuals, slice norms and, if the stack has a half-step companion,
/// the convergence ratios.
pub fn analyze(stack: &SliceStack) -> AnalysisReport {
    let residuals = Residuals::of(stack);
    let convergence = stack.half().map(|h| {
        let half = Residuals::of(h);
        Convergence {
            half,
            c2_ratio: Convergence::ratio(residuals.c2, half.c2),
            s1_ratio: Convergence::ratio(residuals.s1, half.s1),
            s2_ratio: Convergence::ratio(residuals.s2, half.s2),
            parabolic_ratio: Convergence::ratio(residuals.parabolic, half.parabolic),
        }
    });
    AnalysisReport {
        b0: stack.b0(),
        r0: stack.r0(),
        h_b: stack.h_b(),
        h_r: stack.h_r(),
        residuals,
        norms: SliceNorms {
            default_weight: stack.centre().norm(Normalization::Default),
            paper_weight: stack.centre().norm(Normalization::Paper),
        },
        convergence_verified: convergence.map(|c| c.verified(&residuals)),
        convergence,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub c1: f64,
    pub c2: f64,
    pub s1: f64,
    pub s2: f64,
    pub reconstruction: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { c1: 1e-6, c2: 1e-4, s1: 1e-4, s2: 1e-4, reconstruction: 1e-6 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CharacterizeConfig {
    pub b0: f64,
    pub r0: f64,
    pub h_b: f64,
    pub h_r: f64,
    pub tolerances: Tolerances,
    pub normalization: Normalization,
}

impl Default for CharacterizeConfig {
    fn default() -> Self {
        Self {
            b0: 0.0,
            r0: 1.0,
            h_b: 1e-3,
            h_r: 1e-3,
            tolerances: Tolerances::default(),
            normalization: Normalization::Default,
        }
    }
}

#[derive(Clone, Debug)]
pub enum Characterization {
    Accepted { signal: SampledSignal, residuals: Residuals, mismatch: f64 },
    Rejected { reason: String, residuals: Option<Residuals> },
}

impl Characterization {
    pub fn is_accepted(&self) -> bool {
        matches!(self, Characterization::Accepted { .. })
    }
}

/// Decides whether slices from `provider` are the transform of some signal:
/// the first-order and structural residuals must vanish, the reference slice
/// must have finite norm, and the signal reconstructed from that slice must
/// transform back onto it.
pub fn characterize<P>(
    provider: P,
    phi: &Signal,
    config: &CharacterizeConfig,
    ctx: &TransformContext,
) -> Result<Characterization>
where
    P: Fn(f64, f64) -> Result<ComplexField2D>,
{
    let stack = SliceStack::from_provider(&provider, config.b0, config.r0, config.h_b, config.h_r)?;
    let (c1, c2) = cauchy_riemann_residuals(&stack);
    let (s1, s2) = structural_residuals(&stack);
    let parabolic = parabolic_residual(&to_complex_chart(&stack))?;
    let residuals = Residuals { c1, c2, s1, s2, parabolic };
    let tol = &config.tolerances;
    let reject = |reason: String| Ok(Characterization::Rejected { reason, residuals: Some(residuals) });
    for (name, value, limit) in [("C1", c1, tol.c1), ("C2", c2, tol.c2), ("S1", s1, tol.s1)] {
        if !(value <= limit) {
            return reject(format!("{name} residual {value:.3e} exceeds {limit:.1e}"));
        }
    }
    let centre = stack.centre();
    let norm = centre.norm(config.normalization);
    if !norm.is_finite() {
        return reject(format!("slice (b={}, r={}) is not square-integrable", config.b0, config.r0));
    }
    // Reconstruction uses the weight the transform is isometric for.
    let measure = MeasureSpec::dirac(config.b0, config.r0)?;
    let raw = contravariant(std::slice::from_ref(centre), phi, &measure, ctx)?;
    let phi_norm2 = phi.norm().powi(2);
    if phi_norm2 == 0.0 {
        return Err(Error::InvalidSignal("zero fiducial".into()));
    }
    let signal = raw.scale(C64::new(1.0 / phi_norm2, 0.0));
    let again = covariant_fast(&Signal::from(signal.clone()), phi, config.b0, config.r0, ctx)?.field;
    let mismatch = again.relative_l2_diff(centre)?;
    if !(mismatch <= tol.reconstruction) {
        return reject(format!("re-transform differs from the reference slice by {mismatch:.3e}"));
    }
    Ok(Characterization::Accepted { signal, residuals, mismatch })
}
