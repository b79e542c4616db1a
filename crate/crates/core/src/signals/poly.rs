//! Dense complex polynomials in one real variable.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

/// Coefficients in ascending order: `p(u) = Σ c_k u^k`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Poly(pub Vec<C64>);

impl Poly {
    pub fn constant(c: C64) -> Self {
        Self(vec![c])
    }

    pub fn monomial(k: usize, c: C64) -> Self {
        let mut v = vec![C64::new(0.0, 0.0); k + 1];
        v[k] = c;
        Self(v)
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.0
    }

    /// Degree ignoring trailing exact zeros; the zero polynomial has degree 0.
    pub fn degree(&self) -> usize {
        self.0
            .iter()
            .rposition(|c| c.re != 0.0 || c.im != 0.0)
            .unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }

    pub fn eval(&self, u: f64) -> C64 {
        self.0.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * u + c)
    }

    pub fn derivative(&self) -> Self {
        if self.0.len() <= 1 {
            return Self::constant(C64::new(0.0, 0.0));
        }
        Self(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn scale(&self, a: C64) -> Self {
        Self(self.0.iter().map(|&c| c * a).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.0.len().max(other.0.len());
        let zero = C64::new(0.0, 0.0);
        Self(
            (0..n)
                .map(|k| {
                    self.0.get(k).copied().unwrap_or(zero) + other.0.get(k).copied().unwrap_or(zero)
                })
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = vec![C64::new(0.0, 0.0); self.0.len() + other.0.len() - 1];
        for (i, &a) in self.0.iter().enumerate() {
            for (j, &b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self(out)
    }

    /// Multiplies by `u^k`.
    pub fn shift_up(&self, k: usize) -> Self {
        let mut v = vec![C64::new(0.0, 0.0); k];
        v.extend_from_slice(&self.0);
        Self(v)
    }

    /// Coefficient-wise conjugate; equals `conj(p(u))` for real `u`.
    pub fn conj(&self) -> Self {
        Self(self.0.iter().map(|c| c.conj()).collect())
    }

    /// `u ↦ p(a u + c)`, by Horner's scheme on polynomials.
    pub fn compose_affine(&self, a: f64, c: f64) -> Self {
        let lin = Self(vec![C64::new(c, 0.0), C64::new(a, 0.0)]);
        let mut acc = Self::constant(C64::new(0.0, 0.0));
        for &coef in self.0.iter().rev() {
            acc = acc.mul(&lin).add(&Self::constant(coef));
        }
        acc.truncated(self.0.len())
    }

    /// `u ↦ p(u + c)` for complex `c`.
    pub fn shift(&self, c: C64) -> Self {
        let mut q = self.0.clone();
        let n = q.len();
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                let next = q[j + 1];
                q[j] += c * next;
            }
        }
        Self(q)
    }

    fn truncated(mut self, len: usize) -> Self {
        self.0.truncate(len.max(1));
        self
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.0.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}
