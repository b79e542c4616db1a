//! The exact signal family `p(u) · exp(−π(α u² + 2β u + γ))`.
//!
//! The family is closed under the Schrödinger-type action and under the
//! derived representation, so algebraic identities can be checked on
//! polynomial coefficients without any discretisation.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::poly::Poly;
use super::{Hbar, UniformGrid1D};
use crate::error::{Error, Result};

/// Maximum polynomial degree on the exact path.
pub const MAX_DEGREE: usize = 64;

/// `p(u) · exp(−π(α u² + 2β u + γ))` with `Re α > 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyGaussChirp {
    poly: Poly,
    alpha: C64,
    beta: C64,
    gamma: C64,
}

impl PolyGaussChirp {
    pub fn new(poly: Poly, alpha: C64, beta: C64, gamma: C64) -> Result<Self> {
        if !(alpha.re > 0.0) {
            return Err(Error::InvalidSignal(format!(
                "Re(alpha) must be positive for square integrability, got {alpha}"
            )));
        }
        let all_finite = poly.coeffs().iter().chain([&alpha, &beta, &gamma]).all(|c| c.is_finite());
        if !all_finite {
            return Err(Error::InvalidSignal("non-finite chirp parameter".into()));
        }
        let poly = if poly.coeffs().is_empty() {
            Poly::constant(C64::new(0.0, 0.0))
        } else {
            poly
        };
        if poly.degree() > MAX_DEGREE {
            return Err(Error::DegreeTooLarge(poly.degree(), MAX_DEGREE));
        }
        Ok(Self { poly, alpha, beta, gamma })
    }

    /// The unnormalised Gaussian `c · exp(−π ħ u²)`.
    pub fn gaussian(hbar: Hbar, c: f64) -> Self {
        Self {
            poly: Poly::constant(C64::new(c, 0.0)),
            alpha: C64::new(hbar.get(), 0.0),
            beta: C64::new(0.0, 0.0),
            gamma: C64::new(0.0, 0.0),
        }
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }
    pub fn alpha(&self) -> C64 {
        self.alpha
    }
    pub fn beta(&self) -> C64 {
        self.beta
    }
    pub fn gamma(&self) -> C64 {
        self.gamma
    }

    /// Same exponent, different polynomial factor.
    pub fn with_poly(&self, poly: Poly) -> Self {
        Self { poly, ..self.clone() }
    }

    pub fn evaluate(&self, u: f64) -> C64 {
        let e = -PI * (self.alpha * u * u + 2.0 * self.beta * u + self.gamma);
        self.poly.eval(u) * e.exp()
    }

    pub fn sample(&self, grid: &UniformGrid1D) -> Vec<C64> {
        grid.points().map(|u| self.evaluate(u)).collect()
    }

    /// Polynomial factor of the derivative: `(p' − 2π(α u + β) p)`.
    pub fn derivative_poly(&self) -> Poly {
        let lin = Poly(vec![-2.0 * PI * self.beta, -2.0 * PI * self.alpha]);
        self.poly.derivative().add(&lin.mul(&self.poly))
    }

    pub fn derivative(&self) -> Self {
        self.with_poly(self.derivative_poly())
    }

    pub fn scale(&self, a: C64) -> Self {
        self.with_poly(self.poly.scale(a))
    }

    /// `u ↦ √r · e^{2πiħ(s + x v − b v²/2)} · f(r v)` with `v = u − y`.
    pub(crate) fn act(&self, hbar: f64, s: f64, x: f64, y: f64, b: f64, r: f64) -> Self {
        let i = C64::new(0.0, 1.0);
        let a_v = self.alpha * r * r + i * hbar * b;
        let b_v = self.beta * r - i * hbar * x;
        let c_v = self.gamma - 2.0 * i * hbar * s;
        let poly = self.poly.compose_affine(r, -r * y).scale(C64::new(r.sqrt(), 0.0));
        Self {
            poly,
            alpha: a_v,
            beta: b_v - a_v * y,
            gamma: a_v * y * y - 2.0 * b_v * y + c_v,
        }
    }

    /// Exact `∫ f ḡ du`. Both factors are re-expanded about the envelope
    /// centre before multiplying; monomials about the origin cancel badly
    /// once the envelope has been shifted.
    pub fn inner_product(&self, other: &Self) -> C64 {
        let a = self.alpha + other.alpha.conj();
        let b = self.beta + other.beta.conj();
        let c = self.gamma + other.gamma.conj();
        let m = b / a;
        let p = self.poly.shift(-m).mul(&other.poly.conj().shift(-m));
        let mut moment = a.sqrt().inv();
        let mut sum = C64::new(0.0, 0.0);
        for (k, pk) in p.coeffs().iter().enumerate().step_by(2) {
            if k > 0 {
                moment *= (k - 1) as f64 / (2.0 * PI * a);
            }
            sum += pk * moment;
        }
        sum * (-PI * (c - b * b / a)).exp()
    }

    pub fn norm(&self) -> f64 {
        self.inner_product(self).re.max(0.0).sqrt()
    }

    /// Radius around the envelope centre beyond which `|f|` is below
    /// roughly `1e-17` of its scale.
    pub fn effective_radius(&self) -> (f64, f64) {
        let centre = -self.beta.re / self.alpha.re;
        let deg = self.poly.degree() as f64;
        let width = ((40.0 * std::f64::consts::LN_10 + 2.0 * deg * (1.0 + deg).ln())
            / (PI * self.alpha.re))
            .sqrt();
        (centre, width + deg.sqrt())
    }
}

/// Orthonormal Hermite functions `h_n` adapted to `exp(−π ħ u²)`.
pub fn hermite(n: usize, hbar: Hbar) -> Result<PolyGaussChirp> {
    if n > MAX_DEGREE {
        return Err(Error::HermiteIndexTooLarge(n, MAX_DEGREE));
    }
    let h = hbar.get();
    let zero = C64::new(0.0, 0.0);
    // Normalised recurrence in t = √(2πħ) u.
    let mut prev = Poly::constant(C64::new(1.0, 0.0));
    let mut cur = Poly(vec![zero, C64::new(2f64.sqrt(), 0.0)]);
    let p_t = match n {
        0 => prev,
        1 => cur,
        _ => {
            for k in 1..n {
                let kf = k as f64;
                let next = cur
                    .shift_up(1)
                    .scale(C64::new((2.0 / (kf + 1.0)).sqrt(), 0.0))
                    .sub(&prev.scale(C64::new((kf / (kf + 1.0)).sqrt(), 0.0)));
                prev = cur;
                cur = next;
            }
            cur
        }
    };
    let c = (2.0 * PI * h).sqrt();
    let norm = (2.0 * h).powf(0.25);
    let mut scale = norm;
    let coeffs = p_t
        .coeffs()
        .iter()
        .map(|&a| {
            let v = a * scale;
            scale *= c;
            v
        })
        .collect();
    PolyGaussChirp::new(Poly(coeffs), C64::new(h, 0.0), zero, zero)
}
