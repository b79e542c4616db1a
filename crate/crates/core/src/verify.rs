//! Seeded invariant suites with a JSON-serializable report.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fiducial::{self, annihilation_residual, FiducialSpec};
use crate::group::{AlgebraVector, Basis, GroupElement, HomogeneousPoint};
use crate::metamorph::{
    analyze, characterize, contravariant, covariant_direct, covariant_fast, intertwining_residual, metamorphism,
    orthogonality_defect, CharacterizeConfig, SliceStack, Tolerances, TransformContext,
};
use crate::representations::{derived_rep_apply, derived_rep_numeric, lie_derivative_apply, schrodinger_apply, LieSteps};
use crate::signals::io::{to_json_text, SignalDoc};
use crate::signals::{
    hermite, partial_fourier, partial_fourier_inverse, ComplexField2D, Discretization, MeasureSpec, Normalization,
    PolyGaussChirp, SampledSignal, Signal,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Group,
    Signals,
    Representations,
    Fiducial,
    Metamorph,
    All,
}

impl Suite {
    pub const EACH: [Suite; 5] = [Suite::Group, Suite::Signals, Suite::Representations, Suite::Fiducial, Suite::Metamorph];

    fn members(self) -> Vec<Suite> {
        match self {
            Suite::All => Self::EACH.to_vec(),
            s => vec![s],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Suite::Group => "group",
            Suite::Signals => "signals",
            Suite::Representations => "representations",
            Suite::Fiducial => "fiducial",
            Suite::Metamorph => "metamorph",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::EACH
            .into_iter()
            .chain([Suite::All])
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown suite `{s}`")))
    }
}

/// One measured quantity against its limit; `value` is `None` when the
/// computation itself failed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: Option<f64>,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

/// A measurement or the message of the error that prevented it.
type Outcome<T> = std::result::Result<T, String>;

fn outcome<T>(r: Result<T>) -> Outcome<T> {
    r.map_err(|e| e.to_string())
}

impl Check {
    /// Passes when `value <= tolerance`.
    fn at_most(name: &str, value: Outcome<f64>, tolerance: f64) -> Self {
        match value {
            Ok(v) => Self { name: name.into(), value: Some(v), tolerance, passed: v <= tolerance, detail: None },
            Err(e) => Self::failed(name, tolerance, e),
        }
    }

    /// Passes when `value > threshold` (negative controls).
    fn above(name: &str, value: Outcome<f64>, threshold: f64) -> Self {
        match value {
            Ok(v) => Self {
                name: name.into(),
                value: Some(v),
                tolerance: threshold,
                passed: v > threshold,
                detail: Some("must exceed the tolerance".into()),
            },
            Err(e) => Self::failed(name, threshold, e),
        }
    }

    fn holds(name: &str, ok: Outcome<bool>, detail: &str) -> Self {
        match ok {
            Ok(b) => Self {
                name: name.into(),
                value: Some(if b { 0.0 } else { 1.0 }),
                tolerance: 0.0,
                passed: b,
                detail: Some(detail.into()),
            },
            Err(e) => Self::failed(name, 0.0, e),
        }
    }

    fn failed(name: &str, tolerance: f64, e: String) -> Self {
        Self { name: name.into(), value: None, tolerance, passed: false, detail: Some(e) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub passed: bool,
    pub checks: Vec<Check>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub hbar: f64,
    pub suite: Suite,
    pub passed: bool,
    pub suites: Vec<SuiteReport>,
}

impl VerifyReport {
    pub fn to_json(&self) -> String {
        to_json_text(self).expect("reports serialize")
    }
}

/// Runs `suite` with every random sweep drawn from `ChaCha8(seed)`.
pub fn run(suite: Suite, seed: u64, ctx: &TransformContext) -> VerifyReport {
    let suites: Vec<SuiteReport> = suite
        .members()
        .into_iter()
        .map(|s| {
            // each suite gets its own stream so subsets reproduce the full run
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(s as u64);
            let checks = match s {
                Suite::Group => group_suite(&mut rng),
                Suite::Signals => signals_suite(&mut rng, ctx),
                Suite::Representations => representations_suite(&mut rng, ctx),
                Suite::Fiducial => fiducial_suite(ctx),
                Suite::Metamorph => metamorph_suite(&mut rng, ctx),
                Suite::All => unreachable!(),
            };
            SuiteReport { suite: s, passed: checks.iter().all(|c| c.passed), checks }
        })
        .collect();
    VerifyReport { seed, hbar: ctx.hbar.get(), suite, passed: suites.iter().all(|s| s.passed), suites }
}

/// `s, x, y, b ∈ [−1, 1]`, `r ∈ [0.5, 2]`.
pub fn random_element(rng: &mut impl Rng) -> GroupElement {
    let mut u = || rng.gen_range(-1.0..=1.0);
    let (s, x, y, b) = (u(), u(), u(), u());
    GroupElement::new(s, x, y, b, rng.gen_range(0.5..=2.0)).expect("r is positive")
}

fn rel_diff(a: &[f64; 5], b: &[f64; 5]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q).abs() / p.abs().max(1.0)).fold(0.0, f64::max)
}

fn det(mut m: Vec<Vec<f64>>) -> f64 {
    let n = m.len();
    let mut d = 1.0;
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs())).unwrap();
        if m[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            m.swap(p, c);
            d = -d;
        }
        d *= m[c][c];
        for i in c + 1..n {
            let f = m[i][c] / m[c][c];
            for j in c..n {
                m[i][j] -= f * m[c][j];
            }
        }
    }
    d
}

/// `|det ∂(g₀g)/∂g| · ρ_L(g₀g) / ρ_L(g) − 1` by central differences.
fn haar_left_defect(g0: &GroupElement, g: &GroupElement) -> f64 {
    let base = g.to_array();
    let h = 1e-5;
    let mut jac = vec![vec![0.0; 5]; 5];
    for k in 0..5 {
        let mut p = base;
        let mut m = base;
        p[k] += h;
        m[k] -= h;
        let fp = g0.multiply(&GroupElement::from_array(p).unwrap()).to_array();
        let fm = g0.multiply(&GroupElement::from_array(m).unwrap()).to_array();
        for i in 0..5 {
            jac[i][k] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    let moved = g0.multiply(g);
    (det(jac).abs() * moved.measures().left_density / g.measures().left_density - 1.0).abs()
}

fn group_suite(rng: &mut ChaCha8Rng) -> Vec<Check> {
    let triples: Vec<[GroupElement; 3]> =
        (0..1000).map(|_| [random_element(rng), random_element(rng), random_element(rng)]).collect();
    let assoc = triples
        .iter()
        .map(|[a, b, c]| rel_diff(&a.multiply(b).multiply(c).to_array(), &a.multiply(&b.multiply(c)).to_array()))
        .fold(0.0, f64::max);
    let matrix = triples
        .iter()
        .map(|[a, b, _]| a.multiply(b).to_matrix().max_abs_diff(&a.to_matrix().matmul(&b.to_matrix())))
        .fold(0.0, f64::max);
    let inverse = triples
        .iter()
        .map(|[a, ..]| {
            let e = GroupElement::identity().to_array();
            rel_diff(&a.multiply(&a.inverse()).to_array(), &e).max(rel_diff(&a.inverse().multiply(a).to_array(), &e))
        })
        .fold(0.0, f64::max);
    let shape = triples.iter().all(|[a, ..]| {
        let m = a.to_matrix();
        m.is_upper_triangular() && (m.determinant() - 1.0).abs() < 1e-12
    });
    let haar = triples.iter().take(100).map(|[a, b, _]| haar_left_defect(a, b)).fold(0.0, f64::max);
    let mut jacobi = 0.0f64;
    for _ in 0..200 {
        let mut v = || AlgebraVector([0; 5].map(|_| rng.gen_range(-1.0..=1.0)));
        let (a, b, c) = (v(), v(), v());
        let sum = a.bracket(&b.bracket(&c)).add(&b.bracket(&c.bracket(&a))).add(&c.bracket(&a.bracket(&b)));
        jacobi = jacobi.max(sum.0.iter().map(|x| x.abs()).fold(0.0, f64::max));
    }
    vec![
        Check::at_most("associativity_1000_triples", Ok(assoc), 1e-12),
        Check::at_most("matrix_product_oracle_1000_pairs", Ok(matrix), 1e-12),
        Check::at_most("inverse_is_two_sided", Ok(inverse), 1e-12),
        Check::holds("matrix_unipotent_upper_triangular", Ok(shape), "det = 1 and upper triangular"),
        Check::at_most("left_haar_invariance", Ok(haar), 1e-8),
        Check::at_most("jacobi_identity", Ok(jacobi), 1e-12),
    ]
}

fn signals_suite(rng: &mut ChaCha8Rng, ctx: &TransformContext) -> Vec<Check> {
    let hbar = ctx.hbar;
    let herms: Vec<PolyGaussChirp> = (0..=6).map(|n| hermite(n, hbar).expect("degree in range")).collect();
    let mut ortho = 0.0f64;
    for (m, a) in herms.iter().enumerate() {
        for (n, b) in herms.iter().enumerate() {
            let want = if m == n { 1.0 } else { 0.0 };
            ortho = ortho.max((a.inner_product(b) - want).norm());
        }
    }
    let grid = ctx.disc.grid();
    let quad = herms.iter().map(|h| (SampledSignal::new(grid, h.sample(&grid)).unwrap().norm() - 1.0).abs()).fold(0.0, f64::max);
    let fourier = outcome((|| -> Result<f64> {
        let rows = 4;
        let data: Vec<C64> = (0..rows * grid.count())
            .map(|k| {
                let u = grid.point(k % grid.count());
                C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * (-PI * hbar.get() * u * u).exp()
            })
            .collect();
        let (xg, fwd) = partial_fourier(&data, &grid, hbar)?;
        let back = partial_fourier_inverse(&fwd, &xg, &grid, hbar)?;
        Ok(back.iter().zip(&data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    })());
    let json = outcome((|| -> Result<bool> {
        let values: Vec<C64> = (0..16).map(|_| C64::new(rng.gen(), rng.gen::<f64>() * 1e-300)).collect();
        let s = SampledSignal::new(crate::signals::UniformGrid1D::new(-0.3, 0.1, 16)?, values)?;
        let text = SignalDoc::from_samples(&s, hbar).to_json();
        Ok(SignalDoc::from_json(&text)?.to_json() == text)
    })());
    let csv = outcome((|| -> Result<bool> {
        let g = crate::signals::UniformGrid1D::new(-1.0, 0.1, 9)?;
        let f = ComplexField2D::from_fn(g, g, 0.2, 1.3, hbar, |x, y| C64::new((x * 3.1).sin() / 7.0, y.exp()))?;
        let text = f.to_csv();
        Ok(ComplexField2D::from_csv(&text, 0.2, 1.3, hbar)?.to_csv() == text)
    })());
    vec![
        Check::at_most("hermite_orthonormality_0_6", Ok(ortho), 1e-12),
        Check::at_most("hermite_quadrature_norm_0_6", Ok(quad), 1e-10),
        Check::at_most("partial_fourier_round_trip", fourier, 1e-12),
        Check::holds("signal_json_round_trip", json, "byte-identical"),
        Check::holds("field_csv_round_trip", csv, "byte-identical"),
    ]
}

fn representations_suite(rng: &mut ChaCha8Rng, ctx: &TransformContext) -> Vec<Check> {
    let rep = ctx.rep();
    let f = hermite(2, ctx.hbar).expect("degree in range");
    let grid = Discretization::new(256, 6.0).expect("valid").grid();
    let mut homo = 0.0f64;
    for _ in 0..20 {
        let (a, b) = (random_element(rng), random_element(rng));
        let lhs = schrodinger_apply(&a, &schrodinger_apply(&b, &f, &rep), &rep);
        let rhs = schrodinger_apply(&a.multiply(&b), &f, &rep);
        homo = homo.max(grid.points().map(|u| (lhs.evaluate(u) - rhs.evaluate(u)).norm()).fold(0.0, f64::max));
    }
    let mut unit = 0.0f64;
    for n in 0..=4 {
        let h = hermite(n, ctx.hbar).expect("degree in range");
        for _ in 0..100 {
            unit = unit.max((schrodinger_apply(&random_element(rng), &h, &rep).norm() - h.norm()).abs());
        }
    }
    let g = random_element(rng);
    let moved = schrodinger_apply(&g, &f, &rep);
    let d = |v: Basis, w: &PolyGaussChirp| derived_rep_apply(AlgebraVector::basis(v), w, &rep);
    let mut brackets = 0.0f64;
    for (i, &v) in Basis::ALL.iter().enumerate() {
        for &w in &Basis::ALL[i + 1..] {
            let lhs = derived_rep_apply(AlgebraVector::basis(v).bracket(&AlgebraVector::basis(w)), &moved, &rep);
            let rhs = d(v, &d(w, &moved)).poly().sub(d(w, &d(v, &moved)).poly());
            let scale = 1.0 + rhs.max_abs_coeff().max(lhs.poly().max_abs_coeff());
            brackets = brackets.max(lhs.poly().sub(&rhs).max_abs_coeff() / scale);
        }
    }
    let mut quadratic = 0.0f64;
    for n in 0..=6 {
        let h = hermite(n, ctx.hbar).expect("degree in range");
        let two = C64::new(2.0, 0.0);
        let q1 = d(Basis::X, &d(Basis::X, &h)).poly().add(&d(Basis::S, &d(Basis::B, &h)).poly().scale(two));
        let q2 = d(Basis::X, &d(Basis::Y, &h))
            .poly()
            .add(d(Basis::Y, &d(Basis::X, &h)).poly())
            .add(&d(Basis::S, &d(Basis::R, &h)).poly().scale(two));
        quadratic = quadratic.max(h.with_poly(q1).norm()).max(h.with_poly(q2).norm());
    }
    let numeric = outcome((|| -> Result<f64> {
        let g0 = hermite(0, ctx.hbar)?;
        let mut worst = 0.0f64;
        for b in Basis::ALL {
            let exact = d(b, &g0);
            let err = |t: f64| -> Result<f64> {
                let num = derived_rep_numeric(b, &g0, t, &rep)?;
                Ok(num.grid().points().zip(num.values()).map(|(u, v)| (v - exact.evaluate(u)).norm()).fold(0.0, f64::max))
            };
            worst = worst.max((err(1e-2)? / err(5e-3)? - 4.0).abs());
        }
        Ok(worst)
    })());
    let lie = outcome((|| -> Result<f64> {
        let st = LieSteps::default();
        let field = |q: &HomogeneousPoint| C64::new(q.x * q.x * q.b + q.y * q.b, q.x * q.y * q.r + q.b * q.b);
        let lb = |q: &HomogeneousPoint| lie_derivative_apply(Basis::B, field, q, &st, &rep).unwrap_or(C64::new(f64::NAN, 0.0));
        let ly = |q: &HomogeneousPoint| lie_derivative_apply(Basis::Y, field, q, &st, &rep).unwrap_or(C64::new(f64::NAN, 0.0));
        let mut worst = 0.0f64;
        for _ in 0..5 {
            let p = HomogeneousPoint::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(0.5..2.0))?;
            let yb = lie_derivative_apply(Basis::Y, lb, &p, &st, &rep)?;
            let by = lie_derivative_apply(Basis::B, ly, &p, &st, &rep)?;
            let lx = lie_derivative_apply(Basis::X, field, &p, &st, &rep)?;
            worst = worst.max((yb - by - lx).norm());
        }
        Ok(worst)
    })());
    vec![
        Check::at_most("schrodinger_homomorphism_20_pairs", Ok(homo), 1e-8),
        Check::at_most("schrodinger_unitarity_100_elements", Ok(unit), 1e-10),
        Check::at_most("derived_rep_commutators_10_pairs", Ok(brackets), 1e-12),
        Check::at_most("quadratic_identities_hermite_0_6", Ok(quadratic), 1e-12),
        Check::at_most("derived_rep_numeric_order_two", numeric, 0.5),
        Check::at_most("lie_derivative_bracket_yb_x", lie, 1e-6),
    ]
}

fn fiducial_suite(ctx: &TransformContext) -> Vec<Check> {
    let rep = ctx.rep();
    let disc = ctx.disc;
    let gauss = fiducial::gaussian(&rep);
    let grid = disc.grid();
    let specs = [
        ("heisenberg_gaussian", FiducialSpec::heisenberg_gaussian()),
        ("affine_gaussian", FiducialSpec::affine_gaussian(&rep)),
        ("airy", FiducialSpec::new(0.0, -1.0, 1.0, 1.0, 0.0)),
        ("generic", FiducialSpec::new(0.1, 0.3, 0.4, 2.0, 1.0)),
    ];
    let mut checks = Vec::new();
    for (name, spec) in specs {
        match fiducial::build(&spec, &rep, &disc) {
            Ok(phi) => {
                checks.push(Check::at_most(&format!("{name}_unit_norm"), Ok((phi.norm() - 1.0).abs()), 1e-10));
                let phi = Signal::from(phi);
                checks.push(Check::at_most(&format!("{name}_annihilation"), Ok(annihilation_residual(&spec, &phi, &rep)), 1e-7));
                if name.ends_with("gaussian") {
                    let s = phi.sample(&grid);
                    // the null space is one-dimensional: compare up to a unit phase
                    let want = gauss.sample(&grid);
                    let overlap: C64 = s.values().iter().zip(&want).map(|(a, b)| a * b.conj()).sum();
                    let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { C64::new(1.0, 0.0) };
                    let diff = s.values().iter().zip(&want).map(|(a, b)| (a - phase * b).norm()).fold(0.0, f64::max);
                    checks.push(Check::at_most(&format!("{name}_reproduces_gaussian"), Ok(diff), 1e-9));
                }
            }
            Err(e) => checks.push(Check::failed(&format!("{name}_build"), 0.0, e.to_string())),
        }
    }
    let bad = FiducialSpec::new(0.0, 1.0, 1.0, 0.0, 0.0);
    checks.push(Check::holds(
        "non_integrable_spec_rejected",
        Ok(fiducial::build(&bad, &rep, &disc).is_err()),
        "E_x >= 0 with E_r = 0",
    ));
    checks
}

fn herm(n: usize, ctx: &TransformContext) -> Signal {
    hermite(n, ctx.hbar).expect("degree in range").into()
}

fn metamorph_suite(rng: &mut ChaCha8Rng, ctx: &TransformContext) -> Vec<Check> {
    let slices = [(0.0, 1.0), (0.5, 0.7), (-1.0, 2.0)];
    let gauss = herm(0, ctx);
    let sweep = outcome((|| -> Result<(f64, f64)> {
        let (mut fast_direct, mut iso) = (0.0f64, 0.0f64);
        for n in 0..=4 {
            let f = herm(n, ctx);
            for &(b, r) in &slices {
                let fast = covariant_fast(&f, &gauss, b, r, ctx)?.field;
                iso = iso.max((fast.norm(Normalization::Default) - 1.0).abs());
                let xs = fast.x_grid().subsample(5, 16)?;
                let ys = fast.y_grid().subsample(3, 8)?;
                let direct = covariant_direct(&f, &gauss, &xs, &ys, b, r, ctx)?.field;
                for iy in 0..ys.count() {
                    for ix in 0..xs.count() {
                        let d = (direct.value(ix, iy) - fast.value(5 + 16 * ix, 3 + 8 * iy)).norm();
                        fast_direct = fast_direct.max(d);
                    }
                }
            }
        }
        Ok((fast_direct, iso))
    })());
    let fd = sweep.clone().map(|t| t.0);
    let iso = sweep.map(|t| t.1);
    let scaled = outcome((|| -> Result<f64> {
        let w = covariant_fast(&gauss, &gauss, 0.0, 1.0, ctx)?.field;
        Ok((w.norm(Normalization::Paper).powi(2) - 0.5f64.sqrt()).abs())
    })());
    let dirac = MeasureSpec::dirac(0.0, 1.0).expect("valid measure");
    let ortho = outcome((|| -> Result<f64> {
        let mut worst = 0.0f64;
        for m in 0..3 {
            for n in 0..3 {
                worst = worst.max(orthogonality_defect(&herm(m, ctx), &herm(n, ctx), &gauss, &gauss, &dirac, ctx)?);
            }
        }
        Ok(worst)
    })());
    let round_trip = outcome((|| -> Result<f64> {
        let mut worst = 0.0f64;
        for n in 0..=4 {
            let f = herm(n, ctx);
            let w = metamorphism(&f, 0.0, 1.0, ctx)?.field;
            let back = contravariant(&[w], &gauss, &dirac, ctx)?;
            let want = f.sample(back.grid());
            let diff: Vec<C64> = back.values().iter().zip(want.values()).map(|(a, b)| a - b).collect();
            worst = worst.max(SampledSignal::new(*back.grid(), diff)?.norm());
        }
        Ok(worst)
    })());
    let intertwining = outcome((|| -> Result<f64> {
        let f = herm(1, ctx);
        let points: Vec<HomogeneousPoint> = (0..50)
            .map(|_| {
                HomogeneousPoint::new(
                    rng.gen_range(-1.0..=1.0),
                    rng.gen_range(-1.0..=1.0),
                    rng.gen_range(-1.0..=1.0),
                    rng.gen_range(0.5..=2.0),
                )
            })
            .collect::<Result<_>>()?;
        let mut worst = 0.0f64;
        for _ in 0..20 {
            let g = random_element(rng);
            worst = worst.max(intertwining_residual(&g, &f, &gauss, &points, ctx)?);
        }
        Ok(worst)
    })());
    let tol = Tolerances::default();
    let image = outcome((|| -> Result<(f64, f64, bool, bool)> {
        let (mut c1, mut fd_worst, mut conv, mut implication) = (0.0f64, 0.0f64, true, true);
        for (n, b0, r0) in [(0, 0.0, 1.0), (3, 0.0, 1.0), (2, 0.5, 0.8)] {
            let f = herm(n, ctx);
            let stack = SliceStack::with_half(|b, r| Ok(metamorphism(&f, b, r, ctx)?.field), b0, r0, 1e-3, 1e-3)?;
            let report = analyze(&stack);
            let r = report.residuals;
            c1 = c1.max(r.c1);
            fd_worst = fd_worst.max(r.c2).max(r.s1).max(r.s2);
            conv &= report.convergence_verified == Some(true);
            if r.c1 <= tol.c1 && r.c2 <= tol.c2 && r.s1 <= tol.s1 {
                implication &= r.s2 <= tol.s2;
            }
        }
        Ok((c1, fd_worst, conv, implication))
    })());
    let negative = outcome((|| -> Result<(f64, f64)> {
        let phi: Signal = fiducial::airy_type(&FiducialSpec::new(0.0, -1.0, 1.0, 1.0, 0.0), &ctx.rep(), &ctx.disc)?.into();
        let f = herm(2, ctx);
        let stack = SliceStack::from_provider(|b, r| Ok(covariant_fast(&f, &phi, b, r, ctx)?.field), 0.0, 1.0, 1e-3, 1e-3)?;
        let r = analyze(&stack).residuals;
        Ok((r.c1, r.s1.max(r.s2)))
    })());
    let config = CharacterizeConfig::default();
    let accepts = outcome((|| -> Result<bool> {
        let f = herm(1, ctx);
        Ok(characterize(|b, r| Ok(metamorphism(&f, b, r, ctx)?.field), &gauss, &config, ctx)?.is_accepted())
    })());
    let rejects = outcome((|| -> Result<bool> {
        let times_x = |b: f64, r: f64| {
            let w = metamorphism(&gauss, b, r, ctx)?.field;
            let nx = w.x_grid().count();
            let v = w.values().iter().enumerate().map(|(k, v)| v * w.x_grid().point(k % nx)).collect();
            w.with_values(v)
        };
        Ok(!characterize(times_x, &gauss, &config, ctx)?.is_accepted())
    })());
    let split = |r: &Outcome<(f64, f64, bool, bool)>| r.clone();
    vec![
        Check::at_most("fast_vs_direct_hermite_0_4", fd, 1e-8),
        Check::at_most("isometry_default_weight", iso, 1e-7),
        Check::at_most("paper_weight_root_half_factor", scaled, 1e-10),
        Check::at_most("orthogonality_3x3", ortho, 1e-7),
        Check::at_most("reconstruction_hermite_0_4", round_trip, 1e-5),
        Check::at_most("intertwining_20_elements_50_points", intertwining, 1e-6),
        Check::at_most("image_c1", split(&image).map(|t| t.0), tol.c1),
        Check::at_most("image_c2_s1_s2", split(&image).map(|t| t.1), tol.c2),
        Check::holds("image_step_halving_ratio", split(&image).map(|t| t.2), "ratios in [3, 5] or at round-off"),
        Check::holds("image_s2_follows_from_c1_c2_s1", split(&image).map(|t| t.3), "implication over the sweep"),
        Check::above("airy_fiducial_fails_c1", negative.clone().map(|t| t.0), 1e-2),
        Check::at_most("airy_fiducial_passes_s1_s2", negative.map(|t| t.1), tol.s1),
        Check::holds("characterize_accepts_metamorphism", accepts, "hermite(1)"),
        Check::holds("characterize_rejects_x_multiple", rejects, "x times the Gaussian transform"),
    ]
}
