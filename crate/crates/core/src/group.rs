//! The shear-squeeze-rotation group: the Heisenberg group (polarised form)
//! extended by the affine group of upper-triangular unimodular matrices.
//!
//! Elements are stored as `(s, x, y, b, r)` with `r > 0`. The central
//! coordinate is `s`, `(x, y)` are the Heisenberg coordinates, `b` is the
//! shear and `r` the squeeze.

use std::fmt;
use std::ops::Mul;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A point `(s, x, y, b, r)` of the group.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroupElement {
    s: f64,
    x: f64,
    y: f64,
    b: f64,
    r: f64,
}

impl GroupElement {
    /// Builds an element, rejecting `r <= 0` (and non-finite input).
    pub fn new(s: f64, x: f64, y: f64, b: f64, r: f64) -> Result<Self> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::NonPositiveSqueeze(r));
        }
        if ![s, x, y, b].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidSignal(format!(
                "non-finite group coordinate in ({s}, {x}, {y}, {b}, {r})"
            )));
        }
        Ok(Self { s, x, y, b, r })
    }

    pub const fn identity() -> Self {
        Self { s: 0.0, x: 0.0, y: 0.0, b: 0.0, r: 1.0 }
    }

    /// Central element `(s, 0, 0, 0, 1)`.
    pub const fn central(s: f64) -> Self {
        Self { s, x: 0.0, y: 0.0, b: 0.0, r: 1.0 }
    }

    pub fn s(&self) -> f64 {
        self.s
    }
    pub fn x(&self) -> f64 {
        self.x
    }
    pub fn y(&self) -> f64 {
        self.y
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn to_array(&self) -> [f64; 5] {
        [self.s, self.x, self.y, self.b, self.r]
    }

    pub fn from_array(a: [f64; 5]) -> Result<Self> {
        Self::new(a[0], a[1], a[2], a[3], a[4])
    }

    /// Group product.
    pub fn multiply(&self, other: &Self) -> Self {
        let (s, x, y, b, r) = (self.s, self.x, self.y, self.b, self.r);
        let (s2, x2, y2, b2, r2) = (other.s, other.x, other.y, other.b, other.r);
        let y2r = y2 / r;
        Self {
            s: s + s2 + x * y2r - 0.5 * b * y2r * y2r,
            x: x + r * x2 - b * y2r,
            y: y + y2r,
            b: b + b2 * r * r,
            r: r * r2,
        }
    }

    /// Closed-form inverse.
    pub fn inverse(&self) -> Self {
        let (s, x, y, b, r) = (self.s, self.x, self.y, self.b, self.r);
        Self {
            s: -s + x * y + 0.5 * b * y * y,
            x: -(x + b * y) / r,
            y: -r * y,
            b: -b / (r * r),
            r: 1.0 / r,
        }
    }

    /// The 4×4 upper-triangular realisation.
    pub fn to_matrix(&self) -> Matrix4 {
        let (s, x, y, b, r) = (self.s, self.x, self.y, self.b, self.r);
        Matrix4([
            [1.0, -y * r, (x + b * y) / r, 2.0 * s - y * x],
            [0.0, r, -b / r, x],
            [0.0, 0.0, 1.0 / r, y],
            [0.0, 0.0, 0.0, 1.0],
        ])
    }

    /// Haar densities and the modular function relative to `ds dx dy db dr`.
    pub fn measures(&self) -> HaarDensities {
        let r = self.r;
        HaarDensities {
            left_density: 1.0 / (r * r * r),
            right_density: 1.0 / r,
            modular: 1.0 / (r * r),
        }
    }

    /// Splits `g = section(base) · (s, 0, 0, 0, 1)` for the centre `Z`.
    pub fn center_decomposition(&self) -> (HomogeneousPoint, f64) {
        (HomogeneousPoint { x: self.x, y: self.y, b: self.b, r: self.r }, self.s)
    }

    /// `exp(t V)` for a basis vector `V`.
    pub fn exp_one_param(basis: Basis, t: f64) -> Self {
        let mut g = Self::identity();
        match basis {
            Basis::S => g.s = t,
            Basis::X => g.x = t,
            Basis::Y => g.y = t,
            Basis::B => g.b = t,
            Basis::R => g.r = t.exp(),
        }
        g
    }
}

impl Default for GroupElement {
    fn default() -> Self {
        Self::identity()
    }
}

impl Mul for GroupElement {
    type Output = GroupElement;
    fn mul(self, rhs: GroupElement) -> GroupElement {
        self.multiply(&rhs)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {}, {})", self.s, self.x, self.y, self.b, self.r)
    }
}

impl Serialize for GroupElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_array().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for GroupElement {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let a = <[f64; 5]>::deserialize(deserializer)?;
        GroupElement::from_array(a).map_err(serde::de::Error::custom)
    }
}

/// Left/right Haar densities and the modular function at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HaarDensities {
    pub left_density: f64,
    pub right_density: f64,
    pub modular: f64,
}

/// A point `(x, y, b, r)` of the homogeneous space `G / Z`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomogeneousPoint {
    pub x: f64,
    pub y: f64,
    pub b: f64,
    pub r: f64,
}

impl HomogeneousPoint {
    pub fn new(x: f64, y: f64, b: f64, r: f64) -> Result<Self> {
        if !(r > 0.0) {
            return Err(Error::NonPositiveSqueeze(r));
        }
        Ok(Self { x, y, b, r })
    }

    /// The section `(x, y, b, r) ↦ (0, x, y, b, r)`.
    pub fn section(&self) -> GroupElement {
        GroupElement { s: 0.0, x: self.x, y: self.y, b: self.b, r: self.r }
    }
}

/// Basis `{S, X, Y, B, R}` of the Lie algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    S,
    X,
    Y,
    B,
    R,
}

impl Basis {
    pub const ALL: [Basis; 5] = [Basis::S, Basis::X, Basis::Y, Basis::B, Basis::R];

    pub fn index(self) -> usize {
        match self {
            Basis::S => 0,
            Basis::X => 1,
            Basis::Y => 2,
            Basis::B => 3,
            Basis::R => 4,
        }
    }
}

/// Real coefficients over `{S, X, Y, B, R}`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AlgebraVector(pub [f64; 5]);

impl AlgebraVector {
    pub fn basis(v: Basis) -> Self {
        let mut c = [0.0; 5];
        c[v.index()] = 1.0;
        Self(c)
    }

    pub fn coeff(&self, v: Basis) -> f64 {
        self.0[v.index()]
    }

    pub fn scale(&self, a: f64) -> Self {
        Self(self.0.map(|c| a * c))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut c = self.0;
        for (ci, oi) in c.iter_mut().zip(other.0) {
            *ci += oi;
        }
        Self(c)
    }

    /// Lie bracket: bilinear extension of
    /// `[X,Y]=S, [X,R]=-X, [Y,R]=Y, [Y,B]=X, [R,B]=2B`.
    pub fn bracket(&self, other: &Self) -> Self {
        let mut out = Self::default();
        for v in Basis::ALL {
            for w in Basis::ALL {
                let a = self.coeff(v) * other.coeff(w);
                if a != 0.0 {
                    out = out.add(&basis_bracket(v, w).scale(a));
                }
            }
        }
        out
    }
}

fn basis_bracket(v: Basis, w: Basis) -> AlgebraVector {
    use Basis::*;
    let (target, sign) = match (v, w) {
        (X, Y) => (S, 1.0),
        (Y, X) => (S, -1.0),
        (X, R) => (X, -1.0),
        (R, X) => (X, 1.0),
        (Y, R) => (Y, 1.0),
        (R, Y) => (Y, -1.0),
        (Y, B) => (X, 1.0),
        (B, Y) => (X, -1.0),
        (R, B) => (B, 2.0),
        (B, R) => (B, -2.0),
        _ => return AlgebraVector::default(),
    };
    AlgebraVector::basis(target).scale(sign)
}

/// Symplectic form `ω(x, y; x', y') = x y' − x' y`.
pub fn symplectic_form(x: f64, y: f64, x2: f64, y2: f64) -> f64 {
    x * y2 - x2 * y
}

/// Row-major 4×4 real matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Matrix4(pub [[f64; 4]; 4]);

impl Matrix4 {
    pub fn identity() -> Self {
        let mut m = [[0.0; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        Self(m)
    }

    pub fn matmul(&self, other: &Self) -> Self {
        let mut m = [[0.0; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = (0..4).map(|k| self.0[i][k] * other.0[k][j]).sum();
            }
        }
        Self(m)
    }

    /// Determinant by cofactor expansion along the first column.
    pub fn determinant(&self) -> f64 {
        let m = &self.0;
        let minor = |skip_row: usize| -> f64 {
            let rows: Vec<[f64; 3]> = (0..4)
                .filter(|&i| i != skip_row)
                .map(|i| [m[i][1], m[i][2], m[i][3]])
                .collect();
            rows[0][0] * (rows[1][1] * rows[2][2] - rows[1][2] * rows[2][1])
                - rows[0][1] * (rows[1][0] * rows[2][2] - rows[1][2] * rows[2][0])
                + rows[0][2] * (rows[1][0] * rows[2][1] - rows[1][1] * rows[2][0])
        };
        (0..4)
            .map(|i| {
                let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                sign * m[i][0] * minor(i)
            })
            .sum()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut d = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                d = d.max((self.0[i][j] - other.0[i][j]).abs());
            }
        }
        d
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..4).all(|i| (0..i).all(|j| self.0[i][j] == 0.0))
    }
}
