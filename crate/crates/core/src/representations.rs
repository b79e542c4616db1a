//! Schrödinger-type representation on the line, the quasi-regular
//! representation on `G / Z`, derived representations and Lie derivatives.
//!
//! Everything with a closed form runs on [`PolyGaussChirp`]; sampled
//! variants are checked against it.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{AlgebraVector, Basis, GroupElement, HomogeneousPoint};
use crate::signals::{Discretization, Hbar, Poly, PolyGaussChirp, SampledSignal};

/// The central character `χ_ħ(s) = e^{2πiħs}` (with λ = 0).
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RepresentationContext {
    pub hbar: Hbar,
}

impl RepresentationContext {
    pub fn new(hbar: f64) -> Result<Self> {
        Ok(Self { hbar: Hbar::new(hbar)? })
    }

    pub fn h(&self) -> f64 {
        self.hbar.get()
    }

    /// `e^{2πiħ t}`
    pub fn character(&self, t: f64) -> C64 {
        C64::from_polar(1.0, 2.0 * PI * self.h() * t)
    }
}

/// `[ρ(g) f](u) = √r e^{2πiħ(s + x(u−y) − b(u−y)²/2)} f(r(u−y))`, exactly.
pub fn schrodinger_apply(g: &GroupElement, f: &PolyGaussChirp, ctx: &RepresentationContext) -> PolyGaussChirp {
    f.act(ctx.h(), g.s(), g.x(), g.y(), g.b(), g.r())
}

/// Relative squared mass the window may lose before the action is refused.
const OVERFLOW_MASS: f64 = 1e-20;

/// Sampled action on the input grid, with `f(r(u − y))` by band-limited
/// interpolation.
pub fn schrodinger_apply_sampled(
    g: &GroupElement,
    f: &SampledSignal,
    ctx: &RepresentationContext,
) -> Result<SampledSignal> {
    let grid = *f.grid();
    let (y, r) = (g.y(), g.r());
    let lo = r * (grid.start() - y);
    let hi = r * (grid.last() - y);
    let lost = f.relative_mass_outside(lo, hi);
    if lost > OVERFLOW_MASS {
        return Err(Error::WindowOverflow(format!(
            "shift y={y} with dilation r={r} moves {lost:.3e} of the mass outside the window"
        )));
    }
    let interp = f.interpolator();
    let sr = r.sqrt();
    let values = grid
        .points()
        .map(|u| {
            let v = u - y;
            sr * ctx.character(g.s() + g.x() * v - g.b() * v * v / 2.0) * interp.eval(r * v)
        })
        .collect();
    SampledSignal::new(grid, values)
}

/// `[ρ̃(g) F](p')` for the quasi-regular representation on `G / Z`.
pub fn quasi_regular_point<F>(
    g: &GroupElement,
    eval: F,
    point: &HomogeneousPoint,
    ctx: &RepresentationContext,
) -> C64
where
    F: Fn(&HomogeneousPoint) -> C64,
{
    let (s, x, y, b, r) = (g.s(), g.x(), g.y(), g.b(), g.r());
    let dy = point.y - y;
    let mapped = HomogeneousPoint {
        x: (point.x - x) / r + b * dy / r,
        y: r * dy,
        b: (point.b - b) / (r * r),
        r: point.r / r,
    };
    ctx.character(s + x * dy - b * dy * dy / 2.0) * eval(&mapped)
}

/// Complex coefficients over `{S, X, Y, B, R}` (complexified algebra).
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ComplexAlgebraVector(pub [C64; 5]);

impl ComplexAlgebraVector {
    pub fn basis(v: Basis) -> Self {
        AlgebraVector::basis(v).into()
    }

    pub fn coeff(&self, v: Basis) -> C64 {
        self.0[v.index()]
    }

    /// `Σ c_V V` from `(V, c_V)` pairs.
    pub fn combo(terms: &[(Basis, C64)]) -> Self {
        let mut c = [C64::new(0.0, 0.0); 5];
        for &(v, a) in terms {
            c[v.index()] += a;
        }
        Self(c)
    }
}

impl From<AlgebraVector> for ComplexAlgebraVector {
    fn from(a: AlgebraVector) -> Self {
        Self(a.0.map(|c| C64::new(c, 0.0)))
    }
}

/// `dρ(a) f` on the exact family:
/// `dρ^S = 2πiħ`, `dρ^X = 2πiħu`, `dρ^Y = −d/du`, `dρ^B = −πiħu²`, `dρ^R = ½ + u d/du`.
pub fn derived_rep_apply(
    a: impl Into<ComplexAlgebraVector>,
    f: &PolyGaussChirp,
    ctx: &RepresentationContext,
) -> PolyGaussChirp {
    let a = a.into();
    let ih = C64::new(0.0, PI * ctx.h());
    let p = f.poly();
    let d = f.derivative_poly();
    let mut out = Poly::constant(C64::new(0.0, 0.0));
    let mut add = |c: C64, q: Poly| {
        if c != C64::new(0.0, 0.0) {
            out = out.add(&q.scale(c));
        }
    };
    add(a.coeff(Basis::S) * 2.0 * ih, p.clone());
    add(a.coeff(Basis::X) * 2.0 * ih, p.shift_up(1));
    add(-a.coeff(Basis::B) * ih, p.shift_up(2));
    add(-a.coeff(Basis::Y), d.clone());
    add(a.coeff(Basis::R), p.scale(C64::new(0.5, 0.0)).add(&d.shift_up(1)));
    f.with_poly(out)
}

/// `(ρ(e^{tV}) f − ρ(e^{−tV}) f) / 2t` sampled on the default grid.
pub fn derived_rep_numeric(
    basis: Basis,
    f: &PolyGaussChirp,
    t_step: f64,
    ctx: &RepresentationContext,
) -> Result<SampledSignal> {
    if !(t_step > 0.0) {
        return Err(Error::InvalidGrid(format!("derivative step {t_step} must be positive")));
    }
    let grid = Discretization::default().grid();
    let plus = schrodinger_apply(&GroupElement::exp_one_param(basis, t_step), f, ctx);
    let minus = schrodinger_apply(&GroupElement::exp_one_param(basis, -t_step), f, ctx);
    let values = grid
        .points()
        .map(|u| (plus.evaluate(u) - minus.evaluate(u)) / (2.0 * t_step))
        .collect();
    SampledSignal::new(grid, values)
}

/// Central-difference steps for Lie derivatives; the `r` step is relative.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LieSteps {
    pub x: f64,
    pub y: f64,
    pub b: f64,
    pub r_rel: f64,
}

impl Default for LieSteps {
    fn default() -> Self {
        Self { x: 1e-4, y: 1e-4, b: 1e-3, r_rel: 1e-3 }
    }
}

impl LieSteps {
    pub fn halved(&self) -> Self {
        Self { x: self.x / 2.0, y: self.y / 2.0, b: self.b / 2.0, r_rel: self.r_rel / 2.0 }
    }
}

/// Lie derivative `L^V F` at `p`:
/// `L^X = r∂x`, `L^B = r²∂b`, `L^Y = (1/r)(−2πiħx − b∂x + ∂y)`, `L^R = r∂r`, `L^S = −2πiħ`.
pub fn lie_derivative_apply<F>(
    basis: Basis,
    eval: F,
    p: &HomogeneousPoint,
    steps: &LieSteps,
    ctx: &RepresentationContext,
) -> Result<C64>
where
    F: Fn(&HomogeneousPoint) -> C64,
{
    if !(p.r > 0.0) {
        return Err(Error::NonPositiveSqueeze(p.r));
    }
    if !(steps.x > 0.0 && steps.y > 0.0 && steps.b > 0.0 && steps.r_rel > 0.0) {
        return Err(Error::InvalidGrid("Lie derivative steps must be positive".into()));
    }
    let h = ctx.h();
    let at = |dx: f64, dy: f64, db: f64, dr: f64| {
        eval(&HomogeneousPoint { x: p.x + dx, y: p.y + dy, b: p.b + db, r: p.r + dr })
    };
    let dx = || (at(steps.x, 0.0, 0.0, 0.0) - at(-steps.x, 0.0, 0.0, 0.0)) / (2.0 * steps.x);
    let i2ph = C64::new(0.0, 2.0 * PI * h);
    Ok(match basis {
        Basis::S => -i2ph * eval(p),
        Basis::X => p.r * dx(),
        Basis::B => p.r * p.r * (at(0.0, 0.0, steps.b, 0.0) - at(0.0, 0.0, -steps.b, 0.0)) / (2.0 * steps.b),
        Basis::R => {
            let hr = steps.r_rel * p.r;
            p.r * (at(0.0, 0.0, 0.0, hr) - at(0.0, 0.0, 0.0, -hr)) / (2.0 * hr)
        }
        Basis::Y => {
            let dy = (at(0.0, steps.y, 0.0, 0.0) - at(0.0, -steps.y, 0.0, 0.0)) / (2.0 * steps.y);
            (-i2ph * p.x * eval(p) - p.b * dx() + dy) / p.r
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signals::{hermite, Signal};

    fn ctx(h: f64) -> RepresentationContext {
        RepresentationContext::new(h).unwrap()
    }

    fn g(s: f64, x: f64, y: f64, b: f64, r: f64) -> GroupElement {
        GroupElement::new(s, x, y, b, r).unwrap()
    }

    fn max_diff(a: &PolyGaussChirp, b: &PolyGaussChirp) -> f64 {
        (-40..=40)
            .map(|k| k as f64 * 0.1)
            .map(|u| (a.evaluate(u) - b.evaluate(u)).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn central_elements_act_by_the_character() {
        let c = ctx(0.8);
        let f = hermite(2, c.hbar).unwrap();
        let out = schrodinger_apply(&g(0.3, 0.0, 0.0, 0.0, 1.0), &f, &c);
        assert!(max_diff(&out, &f.scale(c.character(0.3))) < 1e-14);
        assert!(max_diff(&schrodinger_apply(&GroupElement::identity(), &f, &c), &f) < 1e-15);
    }

    #[test]
    fn dilation_of_the_gaussian() {
        let c = ctx(1.0);
        let r = 1.7;
        let out = schrodinger_apply(&g(0.0, 0.0, 0.0, 0.0, r), &hermite(0, c.hbar).unwrap(), &c);
        for u in [-1.0, 0.0, 0.4, 1.3] {
            let want = r.sqrt() * 2f64.powf(0.25) * (-PI * r * r * u * u).exp();
            assert!((out.evaluate(u) - C64::new(want, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn exact_action_is_a_homomorphism_and_unitary() {
        let c = ctx(1.3);
        let f = hermite(3, c.hbar).unwrap();
        let (g1, g2) = (g(0.2, -0.4, 0.7, 0.3, 1.4), g(-0.5, 0.9, -0.2, -0.6, 0.6));
        let lhs = schrodinger_apply(&g1, &schrodinger_apply(&g2, &f, &c), &c);
        let rhs = schrodinger_apply(&g1.multiply(&g2), &f, &c);
        assert!(max_diff(&lhs, &rhs) < 1e-12);
        assert!((lhs.norm() - 1.0).abs() < 1e-12);
    }

    fn sampled(f: &PolyGaussChirp) -> SampledSignal {
        Signal::from(f.clone()).sample(&Discretization::default().grid())
    }

    #[test]
    fn sampled_action_matches_exact() {
        let c = ctx(1.0);
        let f = hermite(2, c.hbar).unwrap();
        let fs = sampled(&f);
        let same = schrodinger_apply_sampled(&GroupElement::identity(), &fs, &c).unwrap();
        let err = same.values().iter().zip(fs.values()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-12);
        for el in [g(0.1, 0.5, -0.7, 0.4, 1.3), g(-0.3, -1.0, 1.2, -0.8, 0.8), g(1.0, 1.0, 1.0, 0.0, 1.0)] {
            let got = schrodinger_apply_sampled(&el, &fs, &c).unwrap();
            let want = sampled(&schrodinger_apply(&el, &f, &c));
            let err = got.values().iter().zip(want.values()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            assert!(err < 1e-8, "{el}: {err}");
        }
    }

    #[test]
    fn sampled_action_composes() {
        let c = ctx(1.0);
        let fs = sampled(&hermite(2, c.hbar).unwrap());
        let (g1, g2) = (g(0.0, 1.0, 0.0, 0.0, 1.0), g(0.0, 0.0, 1.0, 0.0, 1.0));
        assert_eq!(g1.multiply(&g2).to_array(), [1.0, 1.0, 1.0, 0.0, 1.0]);
        let lhs = schrodinger_apply_sampled(&g1, &schrodinger_apply_sampled(&g2, &fs, &c).unwrap(), &c).unwrap();
        let rhs = schrodinger_apply_sampled(&g1.multiply(&g2), &fs, &c).unwrap();
        let err = lhs.values().iter().zip(rhs.values()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-8);
    }

    #[test]
    fn sampled_action_refuses_to_lose_mass() {
        let c = ctx(1.0);
        let fs = sampled(&hermite(0, c.hbar).unwrap());
        let err = schrodinger_apply_sampled(&g(0.0, 0.0, 0.0, 0.0, 0.05), &fs, &c).unwrap_err();
        assert!(matches!(err, Error::WindowOverflow(_)));
        assert!(schrodinger_apply_sampled(&g(0.0, 0.0, 9.0, 0.0, 1.0), &fs, &c).is_err());
    }

    #[test]
    fn quasi_regular_simple_cases() {
        let c = ctx(0.9);
        let field = |p: &HomogeneousPoint| C64::new(p.x + 2.0 * p.y, p.b * p.r);
        let p = HomogeneousPoint::new(0.3, -0.2, 0.5, 1.2).unwrap();
        assert_eq!(quasi_regular_point(&GroupElement::identity(), field, &p, &c), field(&p));
        let z = quasi_regular_point(&g(0.4, 0.0, 0.0, 0.0, 1.0), field, &p, &c);
        assert!((z - c.character(0.4) * field(&p)).norm() < 1e-15);
    }

    #[test]
    fn quasi_regular_matches_coset_form() {
        // χ̄(r(g⁻¹ s(p))) F(p(g⁻¹ s(p)))
        let c = ctx(1.1);
        let field = |p: &HomogeneousPoint| C64::new(p.x * p.y - p.b, p.r.ln() + p.x);
        let el = g(0.3, -0.7, 0.4, 0.9, 1.6);
        for k in 0..100 {
            let t = k as f64 * 0.37;
            let p = HomogeneousPoint::new(t.sin() * 2.0, (1.3 * t).cos(), (0.7 * t).sin(), 0.5 + (t * 0.3).cos().abs()).unwrap();
            let (base, centre) = el.inverse().multiply(&p.section()).center_decomposition();
            let want = c.character(-centre) * field(&base);
            assert!((quasi_regular_point(&el, field, &p, &c) - want).norm() < 1e-12);
        }
    }

    #[test]
    fn derived_representation_table() {
        let c = ctx(1.0);
        let f = hermite(0, c.hbar).unwrap();
        let s = derived_rep_apply(AlgebraVector::basis(Basis::S), &f, &c);
        assert!(max_diff(&s, &f.scale(C64::new(0.0, 2.0 * PI))) < 1e-14);
        let i = C64::new(0.0, 1.0);
        let heis = ComplexAlgebraVector::combo(&[(Basis::X, C64::new(-1.0, 0.0)), (Basis::Y, i)]);
        assert!(derived_rep_apply(heis, &f, &c).poly().max_abs_coeff() < 1e-12);
        let aff = ComplexAlgebraVector::combo(&[
            (Basis::S, i / (4.0 * PI * c.h())),
            (Basis::B, 2.0 * i),
            (Basis::R, C64::new(1.0, 0.0)),
        ]);
        assert!(derived_rep_apply(aff, &f, &c).poly().max_abs_coeff() < 1e-12);
    }

    fn compose(a: Basis, b: Basis, f: &PolyGaussChirp, c: &RepresentationContext) -> PolyGaussChirp {
        derived_rep_apply(AlgebraVector::basis(a), &derived_rep_apply(AlgebraVector::basis(b), f, c), c)
    }

    #[test]
    fn derived_representation_realizes_brackets() {
        let c = ctx(0.7);
        let f = schrodinger_apply(&g(0.1, 0.3, -0.2, 0.5, 1.2), &hermite(2, c.hbar).unwrap(), &c);
        for &v in &Basis::ALL {
            for &w in &Basis::ALL {
                let br = AlgebraVector::basis(v).bracket(&AlgebraVector::basis(w));
                let lhs = derived_rep_apply(br, &f, &c);
                let rhs = compose(v, w, &f, &c).poly().sub(compose(w, v, &f, &c).poly());
                let scale = 1.0 + rhs.max_abs_coeff().max(lhs.poly().max_abs_coeff());
                assert!(lhs.poly().sub(&rhs).max_abs_coeff() / scale < 1e-12, "[{v:?},{w:?}]");
            }
        }
    }

    #[test]
    fn quadratic_identities() {
        let c = ctx(1.0);
        for n in 0..=6 {
            let f = hermite(n, c.hbar).unwrap();
            let q1 = compose(Basis::X, Basis::X, &f, &c).poly().add(&compose(Basis::S, Basis::B, &f, &c).poly().scale(C64::new(2.0, 0.0)));
            let q2 = compose(Basis::X, Basis::Y, &f, &c)
                .poly()
                .add(compose(Basis::Y, Basis::X, &f, &c).poly())
                .add(&compose(Basis::S, Basis::R, &f, &c).poly().scale(C64::new(2.0, 0.0)));
            assert!(f.with_poly(q1).norm() < 1e-12);
            assert!(f.with_poly(q2).norm() < 1e-12);
        }
    }

    fn numeric_error(basis: Basis, t: f64) -> f64 {
        let c = ctx(1.0);
        let f = hermite(0, c.hbar).unwrap();
        let num = derived_rep_numeric(basis, &f, t, &c).unwrap();
        let exact = derived_rep_apply(AlgebraVector::basis(basis), &f, &c);
        let peak = num.grid().points().map(|u| exact.evaluate(u).norm()).fold(0.0, f64::max);
        num.grid()
            .points()
            .zip(num.values())
            .map(|(u, v)| (v - exact.evaluate(u)).norm())
            .fold(0.0, f64::max)
            / peak
    }

    #[test]
    fn numeric_derived_representation() {
        assert!(numeric_error(Basis::S, 1e-4) < 1e-7);
        assert!(numeric_error(Basis::R, 1e-4) < 1e-6);
        for b in Basis::ALL {
            let ratio = numeric_error(b, 1e-2) / numeric_error(b, 5e-3);
            assert!((ratio - 4.0).abs() < 0.5, "{b:?}: {ratio}");
        }
        assert!(derived_rep_numeric(Basis::S, &hermite(0, Hbar::default()).unwrap(), 0.0, &ctx(1.0)).is_err());
    }

    #[test]
    fn lie_derivative_table() {
        let c = ctx(1.0);
        let p = HomogeneousPoint::new(0.4, -0.3, 0.2, 1.5).unwrap();
        let st = LieSteps::default();
        let field = |q: &HomogeneousPoint| C64::new(q.x * q.y, q.b);
        let ls = lie_derivative_apply(Basis::S, field, &p, &st, &c).unwrap();
        assert!((ls - C64::new(0.0, -2.0 * PI) * field(&p)).norm() < 1e-14);
        let lb = lie_derivative_apply(Basis::B, |q: &HomogeneousPoint| C64::new(q.b, 0.0), &p, &st, &c).unwrap();
        assert!((lb - C64::new(p.r * p.r, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn lie_derivatives_bracket() {
        // [L^Y, L^B] = L^X on a polynomial field
        let c = ctx(0.8);
        let st = LieSteps::default();
        let field = |q: &HomogeneousPoint| C64::new(q.x * q.x * q.b + q.y * q.b, q.x * q.y * q.r + q.b * q.b);
        let lb = |q: &HomogeneousPoint| lie_derivative_apply(Basis::B, field, q, &st, &c).unwrap();
        let ly = |q: &HomogeneousPoint| lie_derivative_apply(Basis::Y, field, q, &st, &c).unwrap();
        for p in [
            HomogeneousPoint::new(0.4, -0.3, 0.2, 1.5).unwrap(),
            HomogeneousPoint::new(-1.1, 0.6, -0.7, 0.6).unwrap(),
        ] {
            let yb = lie_derivative_apply(Basis::Y, lb, &p, &st, &c).unwrap();
            let by = lie_derivative_apply(Basis::B, ly, &p, &st, &c).unwrap();
            let lx = lie_derivative_apply(Basis::X, field, &p, &st, &c).unwrap();
            assert!((yb - by - lx).norm() < 1e-6, "{}", (yb - by - lx).norm());
        }
    }
}
