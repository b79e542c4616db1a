//! Fiducial vectors: null solutions of
//! `(E_r u − iE_y) f′ + (πħ(E_b u² + 2iE_x u − 2E_s) + ½E_r) f = 0`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::representations::{derived_rep_apply, ComplexAlgebraVector, RepresentationContext};
use crate::signals::{Discretization, PolyGaussChirp, SampledSignal, Signal};

/// Coefficients of the annihilating combination `iE_s S + E_x X + iE_y Y + iE_b B + E_r R`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiducialSpec {
    #[serde(rename = "E_s")]
    pub e_s: f64,
    #[serde(rename = "E_x")]
    pub e_x: f64,
    #[serde(rename = "E_y")]
    pub e_y: f64,
    #[serde(rename = "E_b")]
    pub e_b: f64,
    #[serde(rename = "E_r")]
    pub e_r: f64,
}

impl FiducialSpec {
    pub fn new(e_s: f64, e_x: f64, e_y: f64, e_b: f64, e_r: f64) -> Self {
        Self { e_s, e_x, e_y, e_b, e_r }
    }

    /// Annihilates the Gaussian through the Heisenberg part.
    pub fn heisenberg_gaussian() -> Self {
        Self::new(0.0, -1.0, 1.0, 0.0, 0.0)
    }

    /// Annihilates the Gaussian through the affine part.
    pub fn affine_gaussian(ctx: &RepresentationContext) -> Self {
        Self::new(1.0 / (4.0 * PI * ctx.h()), 0.0, 0.0, 2.0, 1.0)
    }

    fn coeffs(&self) -> [f64; 5] {
        [self.e_s, self.e_x, self.e_y, self.e_b, self.e_r]
    }

    /// The combination as a complexified algebra vector.
    pub fn algebra_vector(&self) -> ComplexAlgebraVector {
        let i = C64::new(0.0, 1.0);
        ComplexAlgebraVector([i * self.e_s, C64::new(self.e_x, 0.0), i * self.e_y, i * self.e_b, C64::new(self.e_r, 0.0)])
    }

    /// Exponent `κ` of the power factor (meaningful for `E_r ≠ 0`).
    ///
    /// `κ = −½ + 2πħE_s/E_r + πħE_y(2E_xE_r + E_bE_y)/E_r³`, from dividing the
    /// quadratic coefficient by `E_r u − iE_y`. The last term's sign is what
    /// makes the power-Gaussian an actual null solution.
    pub fn kappa(&self, ctx: &RepresentationContext) -> f64 {
        let (h, er) = (ctx.h(), self.e_r);
        let k = -0.5 + 2.0 * PI * h * self.e_s / er + PI * h * self.e_y * (2.0 * self.e_x * er + self.e_b * self.e_y) / er.powi(3);
        if k.abs() < 1e-12 { 0.0 } else { k }
    }

    pub fn validate(&self, ctx: &RepresentationContext) -> Result<()> {
        if !self.coeffs().iter().all(|c| c.is_finite()) {
            return Err(Error::InvalidSpec("coefficients must be finite".into()));
        }
        if self.coeffs().iter().all(|&c| c == 0.0) {
            return Err(Error::InvalidSpec("all coefficients are zero".into()));
        }
        if self.e_r == 0.0 {
            if self.e_y == 0.0 {
                return Err(Error::InvalidSpec("E_r = 0 requires E_y ≠ 0".into()));
            }
            // Sign-flipping the whole spec leaves the null space unchanged,
            // so the condition is really E_x/E_y < 0.
            if !(self.e_x / self.e_y < 0.0) {
                return Err(Error::InvalidSpec(format!(
                    "E_x < 0 for square integrability (with E_y > 0; in general E_x/E_y < 0), got E_x={}, E_y={}",
                    self.e_x, self.e_y
                )));
            }
        } else {
            if !(ctx.h() * self.e_b / self.e_r > 0.0) {
                return Err(Error::InvalidSpec(format!(
                    "we need ħE_b/E_r > 0 for square integrability, got E_b={}, E_r={}",
                    self.e_b, self.e_r
                )));
            }
            if self.e_y == 0.0 && self.kappa(ctx) < 0.0 {
                return Err(Error::InvalidSpec(format!(
                    "with E_y = 0 the factor u^κ must be bounded at u = 0; κ = {} < 0",
                    self.kappa(ctx)
                )));
            }
        }
        Ok(())
    }
}

/// Unit-norm Gaussian `C e^{−πħu²}`; `C` is computed from the exact norm.
pub fn gaussian(ctx: &RepresentationContext) -> PolyGaussChirp {
    let g = PolyGaussChirp::gaussian(ctx.hbar, 1.0);
    let n = g.norm();
    g.scale(C64::new(1.0 / n, 0.0))
}

fn normalized(disc: &Discretization, values: Vec<C64>) -> Result<SampledSignal> {
    let s = SampledSignal::new(disc.grid(), values)
        .map_err(|_| Error::InvalidSpec("fiducial overflows on the quadrature window".into()))?;
    let n = s.norm();
    if !(n > 0.0 && n.is_finite()) {
        return Err(Error::InvalidSpec(format!("fiducial has quadrature norm {n}")));
    }
    Ok(s.scale(C64::new(1.0 / n, 0.0)))
}

/// Cubic-phase (Airy-type) family for `E_r = 0`.
pub fn airy_type(spec: &FiducialSpec, ctx: &RepresentationContext, disc: &Discretization) -> Result<SampledSignal> {
    if spec.e_r != 0.0 {
        return Err(Error::InvalidSpec("airy_type requires E_r = 0".into()));
    }
    spec.validate(ctx)?;
    let (h, ey) = (ctx.h(), spec.e_y);
    let values = disc
        .grid()
        .points()
        .map(|u| {
            let re = spec.e_x / ey * u * u;
            let im = 2.0 * spec.e_s / ey * u - spec.e_b / (3.0 * ey) * u * u * u;
            (PI * h * C64::new(re, im)).exp()
        })
        .collect();
    normalized(disc, values)
}

/// Power-Gaussian family for `E_r ≠ 0` (principal branch of the power).
pub fn generic_type(spec: &FiducialSpec, ctx: &RepresentationContext, disc: &Discretization) -> Result<SampledSignal> {
    if spec.e_r == 0.0 {
        return Err(Error::InvalidSpec("generic_type requires E_r ≠ 0".into()));
    }
    spec.validate(ctx)?;
    let (h, er) = (ctx.h(), spec.e_r);
    let kappa = C64::new(spec.kappa(ctx), 0.0);
    let lin = (2.0 * spec.e_x * er + spec.e_b * spec.e_y) / (er * er);
    let values = disc
        .grid()
        .points()
        .map(|u| {
            let base = C64::new(er * u, -spec.e_y);
            let power = if base == C64::new(0.0, 0.0) {
                if kappa.re == 0.0 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) }
            } else {
                base.powc(kappa)
            };
            power * (-PI * h * C64::new(spec.e_b / (2.0 * er) * u * u, lin * u)).exp()
        })
        .collect();
    normalized(disc, values)
}

/// Builds the fiducial selected by `spec`.
pub fn build(spec: &FiducialSpec, ctx: &RepresentationContext, disc: &Discretization) -> Result<SampledSignal> {
    if spec.e_r == 0.0 {
        airy_type(spec, ctx, disc)
    } else {
        generic_type(spec, ctx, disc)
    }
}

/// `‖(E_r u − iE_y) f′ + (πħ(E_b u² + 2iE_x u − 2E_s) + ½E_r) f‖ / ‖f‖`.
///
/// Exact on the closed family; spectral derivative for samples.
pub fn annihilation_residual(spec: &FiducialSpec, f: &Signal, ctx: &RepresentationContext) -> f64 {
    match f {
        Signal::Exact(e) => {
            let n = e.norm();
            if n == 0.0 {
                return 0.0;
            }
            derived_rep_apply(spec.algebra_vector(), e, ctx).norm() / n
        }
        Signal::Sampled(s) => {
            let n = s.norm();
            if n == 0.0 {
                return 0.0;
            }
            let d = s.derivative();
            let h = ctx.h();
            let i = C64::new(0.0, 1.0);
            let values = s
                .grid()
                .points()
                .zip(s.values().iter().zip(d.values()))
                .map(|(u, (&v, &dv))| {
                    let a = C64::new(spec.e_r * u, -spec.e_y);
                    let c = PI * h * (spec.e_b * u * u + 2.0 * i * spec.e_x * u - 2.0 * spec.e_s) + 0.5 * spec.e_r;
                    a * dv + c * v
                })
                .collect();
            SampledSignal::new(*s.grid(), values).map(|r| r.norm() / n).unwrap_or(f64::INFINITY)
        }
    }
}
