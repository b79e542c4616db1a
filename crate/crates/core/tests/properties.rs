use metamorph_core::group::{AlgebraVector, Basis, GroupElement};
use metamorph_core::metamorph::{covariant_fast, TransformContext};
use metamorph_core::signals::io::SignalDoc;
use metamorph_core::signals::{
    hermite, partial_fourier, partial_fourier_inverse, ComplexField2D, Discretization, Hbar, PolyGaussChirp,
    SampledSignal, Signal, UniformGrid1D,
};
use nalgebra::{Matrix4, Matrix5};
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn wide(rng: &mut ChaCha8Rng) -> GroupElement {
    let mut u = || rng.gen_range(-5.0..=5.0);
    let (s, x, y, b) = (u(), u(), u(), u());
    GroupElement::new(s, x, y, b, rng.gen_range(0.1..=10.0)).unwrap()
}

fn mat(g: &GroupElement) -> Matrix4<f64> {
    let m = g.to_matrix().0;
    Matrix4::from_fn(|i, j| m[i][j])
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

#[test]
fn associativity_over_wide_ranges() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..1000 {
        let (a, b, c) = (wide(&mut rng), wide(&mut rng), wide(&mut rng));
        let l = a.multiply(&b).multiply(&c).to_array();
        let r = a.multiply(&b.multiply(&c)).to_array();
        for k in 0..5 {
            assert!(close(l[k], r[k], 1e-12), "{a} {b} {c}: {l:?} vs {r:?}");
        }
    }
}

#[test]
fn matrix_is_a_homomorphism_and_inverse_matches() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..1000 {
        let (a, b) = (wide(&mut rng), wide(&mut rng));
        let prod = mat(&a.multiply(&b));
        let oracle = mat(&a) * mat(&b);
        for (p, q) in prod.iter().zip(oracle.iter()) {
            assert!(close(*p, *q, 1e-12), "{a} {b}");
        }
        let inv = mat(&a).try_inverse().unwrap();
        for (p, q) in mat(&a.inverse()).iter().zip(inv.iter()) {
            assert!(close(*p, *q, 1e-10), "{a}");
        }
    }
}

/// Generators read off the matrix form at the identity.
fn generator(v: Basis) -> Matrix4<f64> {
    let mut m = Matrix4::zeros();
    match v {
        Basis::S => m[(0, 3)] = 2.0,
        Basis::X => {
            m[(0, 2)] = 1.0;
            m[(1, 3)] = 1.0;
        }
        Basis::Y => {
            m[(0, 1)] = -1.0;
            m[(2, 3)] = 1.0;
        }
        Basis::B => m[(1, 2)] = -1.0,
        Basis::R => {
            m[(1, 1)] = 1.0;
            m[(2, 2)] = -1.0;
        }
    }
    m
}

#[test]
fn one_parameter_subgroups_match_the_matrix_exponential() {
    for v in Basis::ALL {
        for t in [-1.3, -0.2, 0.4, 2.0] {
            let oracle = (generator(v) * t).exp();
            let got = mat(&GroupElement::exp_one_param(v, t));
            assert!((oracle - got).abs().max() < 1e-12, "{v:?} {t}");
        }
    }
}

#[test]
fn brackets_match_matrix_commutators() {
    for v in Basis::ALL {
        for w in Basis::ALL {
            let br = AlgebraVector::basis(v).bracket(&AlgebraVector::basis(w));
            let mut from = Matrix4::zeros();
            for u in Basis::ALL {
                from += generator(u) * br.coeff(u);
            }
            let (a, b) = (generator(v), generator(w));
            assert_eq!(a * b - b * a, from, "[{v:?}, {w:?}]");
        }
    }
}

#[test]
fn left_density_is_left_invariant() {
    let g0 = GroupElement::new(0.3, -0.7, 0.5, 1.2, 1.7).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let h = 1e-5;
    for _ in 0..200 {
        let mut u = || rng.gen_range(-1.0..=1.0);
        let (s, x, y, b) = (u(), u(), u(), u());
        let g = GroupElement::new(s, x, y, b, rng.gen_range(0.5..=2.0)).unwrap();
        let base = g.to_array();
        let jac = Matrix5::from_fn(|i, k| {
            let (mut p, mut m) = (base, base);
            p[k] += h;
            m[k] -= h;
            let fp = g0.multiply(&GroupElement::from_array(p).unwrap()).to_array();
            let fm = g0.multiply(&GroupElement::from_array(m).unwrap()).to_array();
            (fp[i] - fm[i]) / (2.0 * h)
        });
        let want = g.measures().left_density / g0.multiply(&g).measures().left_density;
        assert!((jac.determinant().abs() - want).abs() <= 1e-10 * want, "{g}");
    }
}

#[test]
fn modular_function_is_multiplicative() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..1000 {
        let (a, b) = (wide(&mut rng), wide(&mut rng));
        let lhs = a.multiply(&b).measures().modular;
        let rhs = a.measures().modular * b.measures().modular;
        // equal up to the rounding of r₁r₂
        assert!((lhs - rhs).abs() <= 4.0 * f64::EPSILON * lhs, "{a} {b}");
    }
}

#[test]
fn exact_and_quadrature_inner_products_agree() {
    let grid = Discretization::default().grid();
    let hs: Vec<PolyGaussChirp> = (0..=6).map(|n| hermite(n, Hbar::default()).unwrap()).collect();
    for a in &hs {
        for b in &hs {
            let exact = a.inner_product(b);
            let quad = SampledSignal::new(grid, a.sample(&grid))
                .unwrap()
                .inner_product(&SampledSignal::new(grid, b.sample(&grid)).unwrap())
                .unwrap();
            assert!((exact - quad).norm() < 1e-9);
        }
    }
}

#[test]
fn quadrature_converges_spectrally() {
    // a shifted chirped pair, integrated on ever finer grids of a fixed window
    let g = PolyGaussChirp::gaussian(Hbar::default(), 1.0);
    let a = g.clone();
    let b = hermite(2, Hbar::default()).unwrap();
    let b = metamorph_core::representations::schrodinger_apply(
        &GroupElement::new(0.0, 0.4, 0.3, 0.5, 1.1).unwrap(),
        &b,
        &metamorph_core::representations::RepresentationContext::new(1.0).unwrap(),
    );
    let exact = a.inner_product(&b);
    let mut prev = f64::INFINITY;
    for n in [16, 32, 64, 128] {
        let grid = UniformGrid1D::symmetric(6.0, n).unwrap();
        let quad: C64 =
            grid.points().map(|u| a.evaluate(u) * b.evaluate(u).conj()).sum::<C64>() * grid.step();
        let err = (quad - exact).norm();
        assert!(err <= 1e-12 || err * 10.0 <= prev, "n={n}: {err} after {prev}");
        prev = err;
    }
    assert!(prev < 1e-12);
}

#[test]
fn partial_fourier_inverts_on_its_image() {
    let grid = UniformGrid1D::symmetric(8.0, 256).unwrap();
    let hbar = Hbar::new(0.7).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let rows = 3;
    let data: Vec<C64> = (0..rows * grid.count())
        .map(|k| {
            let u = grid.point(k % grid.count());
            let c = (k / grid.count()) as f64;
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * 0.01
                + C64::new((-(u - c) * (u - c)).exp(), (-(u + c) * (u + c) * 2.0).exp() * u)
        })
        .map(|v| v * (-0.1 * grid.point(0).powi(2)).exp())
        .collect();
    let (xg, fwd) = partial_fourier(&data, &grid, hbar).unwrap();
    let back = partial_fourier_inverse(&fwd, &xg, &grid, hbar).unwrap();
    let num: f64 = back.iter().zip(&data).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
    let den: f64 = data.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    assert!(num / den < 1e-8);
}

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![-1e3..1e3f64, -1e-200..1e-200f64, Just(0.0), Just(-0.0)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn group_axioms(
        a in (-5.0..5.0f64, -5.0..5.0f64, -5.0..5.0f64, -5.0..5.0f64, 0.1..10.0f64),
        b in (-5.0..5.0f64, -5.0..5.0f64, -5.0..5.0f64, -5.0..5.0f64, 0.1..10.0f64),
    ) {
        let g = GroupElement::new(a.0, a.1, a.2, a.3, a.4).unwrap();
        let h = GroupElement::new(b.0, b.1, b.2, b.3, b.4).unwrap();
        let e = GroupElement::identity().to_array();
        let gi = g.multiply(&g.inverse()).to_array();
        for k in 0..5 {
            prop_assert!(close(gi[k], e[k], 1e-10));
        }
        let l = g.multiply(&h).inverse().to_array();
        let r = h.inverse().multiply(&g.inverse()).to_array();
        for k in 0..5 {
            prop_assert!(close(l[k], r[k], 1e-9), "{:?} vs {:?}", l, r);
        }
        let json = serde_json::to_string(&g).unwrap();
        prop_assert_eq!(serde_json::from_str::<GroupElement>(&json).unwrap(), g);
    }

    #[test]
    fn sample_documents_round_trip(values in prop::collection::vec((finite(), finite()), 1..40), start in -10.0..10.0f64, step in 1e-3..1.0f64) {
        let values: Vec<C64> = values.into_iter().map(|(a, b)| C64::new(a, b)).collect();
        let s = SampledSignal::new(UniformGrid1D::new(start, step, values.len()).unwrap(), values).unwrap();
        let text = SignalDoc::from_samples(&s, Hbar::default()).to_json();
        let back = SignalDoc::from_json(&text).unwrap();
        prop_assert_eq!(back.to_json(), text);
        match back {
            SignalDoc::Samples { values, start: s0, step: h, .. } => {
                prop_assert_eq!(values, s.values().to_vec());
                prop_assert_eq!(s0, start);
                prop_assert_eq!(h, step);
            }
            other => prop_assert!(false, "wrong family {:?}", other),
        }
    }

    #[test]
    fn field_csv_round_trips(nx in 1usize..7, ny in 1usize..7, start in -3.0..3.0f64, step in 1e-3..0.7f64, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let xg = UniformGrid1D::new(start, step, nx).unwrap();
        let yg = UniformGrid1D::new(-start, step * 1.5, ny).unwrap();
        let values: Vec<C64> = (0..nx * ny).map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() * 1e-5)).collect();
        let f = ComplexField2D::new(xg, yg, values, 0.1, 0.9, Hbar::default()).unwrap();
        let text = f.to_csv();
        let back = ComplexField2D::from_csv(&text, 0.1, 0.9, Hbar::default()).unwrap();
        prop_assert_eq!(back.values(), f.values());
        prop_assert_eq!(back.to_csv(), text);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn transform_is_linear(a in (-2.0..2.0f64, -2.0..2.0f64), b in -1.0..1.0f64, r in 0.6..1.8f64) {
        let ctx = TransformContext::new(Hbar::default(), Discretization::new(128, 6.0).unwrap());
        let grid = ctx.disc.grid();
        let phi: Signal = hermite(0, ctx.hbar).unwrap().into();
        let f1 = hermite(1, ctx.hbar).unwrap().sample(&grid);
        let f2 = hermite(2, ctx.hbar).unwrap().sample(&grid);
        let a = C64::new(a.0, a.1);
        let combo: Vec<C64> = f1.iter().zip(&f2).map(|(p, q)| a * p + q).collect();
        let w = |v: Vec<C64>| covariant_fast(&SampledSignal::new(grid, v).unwrap().into(), &phi, b, r, &ctx).unwrap().field;
        let lhs = w(combo);
        let (w1, w2) = (w(f1), w(f2));
        let err = lhs.values().iter().zip(w1.values().iter().zip(w2.values()))
            .map(|(l, (p, q))| (l - (a * p + q)).norm())
            .fold(0.0, f64::max);
        prop_assert!(err < 1e-12, "{}", err);
    }
}
