use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use super::{TransformContext, TransformResult};
use crate::error::{Error, Result};
use crate::fiducial::gaussian;
use crate::group::{GroupElement, HomogeneousPoint};
use crate::representations::{quasi_regular_point, schrodinger_apply, schrodinger_apply_sampled};
use crate::signals::field::find_slice;
use crate::signals::fourier::BandLimitedInterpolator;
use crate::signals::{
    inner_product, partial_fourier, partial_fourier_inverse, slice_inner_product, ComplexField2D, MeasureSpec,
    Normalization, PolyGaussChirp, Signal, UniformGrid1D,
};

/// Largest quadrature grid the window expansion may reach. The fast
/// pipeline holds an `N × 2N` table, so this bounds memory at ~512 MB.
pub const MAX_WINDOW_POINTS: usize = 4096;

/// Below this dilation the fiducial spreads enough to force a window check.
const SMALL_DILATION: f64 = 0.25;

/// Pointwise evaluation of a fiducial or signal.
enum Evaluator {
    Exact(PolyGaussChirp),
    Sampled(BandLimitedInterpolator),
}

impl Evaluator {
    fn new(s: &Signal) -> Self {
        match s {
            Signal::Exact(f) => Evaluator::Exact(f.clone()),
            Signal::Sampled(f) => Evaluator::Sampled(f.interpolator()),
        }
    }

    fn eval(&self, t: f64) -> C64 {
        match self {
            Evaluator::Exact(f) => f.evaluate(t),
            Evaluator::Sampled(i) => i.eval(t),
        }
    }
}

fn describe(s: &Signal) -> String {
    match s {
        Signal::Exact(f) => format!("poly_gauss_chirp(degree={}, alpha={})", f.poly().degree(), f.alpha()),
        Signal::Sampled(f) => format!("samples(n={}, step={})", f.grid().count(), f.grid().step()),
    }
}

/// `(centre, radius)` outside which the signal is below ~1e-16 of its scale.
fn extent(s: &Signal) -> (f64, f64) {
    match s {
        Signal::Exact(f) => {
            let a = f.alpha().re;
            let deg = f.poly().degree() as f64;
            let centre = -f.beta().re / a;
            (centre, ((37.0 + 2.0 * deg * (2.0 + deg).ln()) / (PI * a)).sqrt())
        }
        Signal::Sampled(f) => (0.0, f.effective_radius(0.0, 1e-16)),
    }
}

fn check_r(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveSqueeze(r))
    }
}

/// Quadrature grid for `W_φ f` at dilation `r` and output shifts up to
/// `y_max` in magnitude. Starts from the native grid and doubles it (same
/// step, same centre) while the fiducial dilation is small or the shift
/// leaves the window.
pub(crate) fn plan_window(f: &Signal, phi: &Signal, r: f64, y_max: f64, ctx: &TransformContext) -> Result<UniformGrid1D> {
    let base = match (f.grid(), phi.grid()) {
        (Some(gf), Some(gp)) => {
            if (gf.step() - gp.step()).abs() > 1e-12 * gf.step() {
                return Err(Error::UnequalSpacing(gf.step(), gp.step()));
            }
            *gf
        }
        (Some(gf), None) => *gf,
        (None, Some(gp)) => *gp,
        (None, None) => ctx.disc.grid(),
    };
    let step = base.step();
    let mut count = base.count();
    let mut start = base.start();
    let centre = start + count as f64 * step / 2.0;
    let mut half = count as f64 * step / 2.0;
    let y_rel = if y_max > 0.0 { y_max + centre.abs() } else { 0.0 };
    if r < SMALL_DILATION || y_rel > half {
        let (cf, rf) = extent(f);
        let (cp, rp) = extent(phi);
        let required = y_rel.max((cf - centre).abs() + rf + (cp.abs() + rp) / r);
        while half < required {
            if 2 * count > MAX_WINDOW_POINTS {
                return Err(Error::WindowOverflow(format!(
                    "covering |y| ≤ {required:.3} at step {step} needs more than {MAX_WINDOW_POINTS} points (r = {r})"
                )));
            }
            start -= count as f64 * step / 2.0;
            count *= 2;
            half *= 2.0;
        }
    }
    UniformGrid1D::new(start, step, count)
}

/// Values on `v_k = (k − (n−1))Δu`, `k = 0..2n−1`, of a function of `v`.
fn difference_table(n: usize, du: f64, g: impl Fn(f64) -> C64 + Sync) -> Vec<C64> {
    (0..2 * n - 1).into_par_iter().map(|k| g((k as f64 - (n - 1) as f64) * du)).collect()
}

/// The five-operator pipeline `M ∘ F₂ ∘ M_b ∘ T ∘ R` applied to `f(y) φ̄(u)`.
///
/// Output grids: `y` is the quadrature grid, `x` its `2N`-point dual.
pub fn covariant_fast(f: &Signal, phi: &Signal, b: f64, r: f64, ctx: &TransformContext) -> Result<TransformResult> {
    check_r(r)?;
    let grid = plan_window(f, phi, r, 0.0, ctx)?;
    let hbar = ctx.hbar;
    let h = hbar.get();
    let n = grid.count();
    let du = grid.step();
    let fs = f.sample(&grid);
    let fv = fs.values();
    let phi_eval = Evaluator::new(phi);
    let sr = r.sqrt();

    // R: √r φ̄(r v). As a function of the difference variable it is one row.
    let dilated = difference_table(n, du, |v| sr * phi_eval.eval(r * v).conj());
    // M_b: e^{πiħb v²}, again a function of v = u − y only.
    let chirp = difference_table(n, du, |v| C64::from_polar(1.0, PI * h * b * v * v));
    // T: (y, u) ↦ (u, u − y) is the index map j − i on the common grid.
    let mut table = vec![C64::new(0.0, 0.0); n * n];
    table.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
        for (j, cell) in row.iter_mut().enumerate() {
            let k = j + n - 1 - i;
            *cell = fv[j] * dilated[k] * chirp[k];
        }
    });
    // F₂ over u, zero-padded to 2N.
    let (x_grid, mut out) = partial_fourier(&table, &grid, hbar)?;
    drop(table);
    // M: e^{2πiħxy}.
    let m = x_grid.count();
    out.par_chunks_mut(m).enumerate().for_each(|(i, row)| {
        let y = grid.point(i);
        for (k, v) in row.iter_mut().enumerate() {
            *v *= C64::from_polar(1.0, 2.0 * PI * h * x_grid.point(k) * y);
        }
    });
    let field = ComplexField2D::new(x_grid, grid, out, b, r, hbar)?;
    Ok(TransformResult { field, fiducial: describe(phi), hbar })
}

/// Direct quadrature of
/// `√r ∫ f(u) e^{−2πiħ(x(u−y) − b(u−y)²/2)} φ̄(r(u−y)) du` at every output point.
pub fn covariant_direct(
    f: &Signal,
    phi: &Signal,
    x_grid: &UniformGrid1D,
    y_grid: &UniformGrid1D,
    b: f64,
    r: f64,
    ctx: &TransformContext,
) -> Result<TransformResult> {
    check_r(r)?;
    let y_max = y_grid.start().abs().max(y_grid.last().abs());
    let grid = plan_window(f, phi, r, y_max, ctx)?;
    let fs = f.sample(&grid);
    let phi_eval = Evaluator::new(phi);
    let h = ctx.hbar.get();
    let nx = x_grid.count();
    let mut values = vec![C64::new(0.0, 0.0); nx * y_grid.count()];
    values.par_chunks_mut(nx).enumerate().for_each(|(iy, row)| {
        let y = y_grid.point(iy);
        let weights = row_weights(&grid, fs.values(), &phi_eval, y, b, r, h);
        for (ix, v) in row.iter_mut().enumerate() {
            *v = fourier_sum(&grid, &weights, x_grid.point(ix), y, h);
        }
    });
    let field = ComplexField2D::new(*x_grid, *y_grid, values, b, r, ctx.hbar)?;
    Ok(TransformResult { field, fiducial: describe(phi), hbar: ctx.hbar })
}

/// `√r f(u_j) φ̄(r(u_j − y)) e^{πiħb(u_j−y)²} Δu`.
fn row_weights(grid: &UniformGrid1D, f: &[C64], phi: &Evaluator, y: f64, b: f64, r: f64, h: f64) -> Vec<C64> {
    let sr = r.sqrt() * grid.step();
    grid.points()
        .zip(f)
        .map(|(u, &fu)| {
            if fu == C64::new(0.0, 0.0) {
                return fu;
            }
            let v = u - y;
            sr * fu * phi.eval(r * v).conj() * C64::from_polar(1.0, PI * h * b * v * v)
        })
        .collect()
}

/// `Σ_j w_j e^{−2πiħx(u_j − y)}` with the phase advanced by recurrence.
fn fourier_sum(grid: &UniformGrid1D, w: &[C64], x: f64, y: f64, h: f64) -> C64 {
    let step = C64::from_polar(1.0, -2.0 * PI * h * x * grid.step());
    let mut phase = C64::from_polar(1.0, -2.0 * PI * h * x * (grid.start() - y));
    let mut acc = C64::new(0.0, 0.0);
    for (j, &wj) in w.iter().enumerate() {
        if j % 64 == 0 {
            // re-anchor to keep the recurrence drift at round-off
            phase = C64::from_polar(1.0, -2.0 * PI * h * x * (grid.point(j) - y));
        }
        acc += wj * phase;
        phase *= step;
    }
    acc
}

/// Single-point direct transform `[W_φ f](x, y, b, r)`.
pub struct PointTransform<'a> {
    f: &'a Signal,
    phi: &'a Signal,
    phi_eval: Evaluator,
    grid: UniformGrid1D,
    samples: Vec<C64>,
    ctx: TransformContext,
}

impl<'a> PointTransform<'a> {
    pub fn new(f: &'a Signal, phi: &'a Signal, ctx: &TransformContext) -> Result<Self> {
        let grid = plan_window(f, phi, 1.0, 0.0, ctx)?;
        let samples = f.sample(&grid).into_values();
        Ok(Self { f, phi, phi_eval: Evaluator::new(phi), grid, samples, ctx: *ctx })
    }

    pub fn eval(&self, p: &HomogeneousPoint) -> Result<C64> {
        check_r(p.r)?;
        let h = self.ctx.hbar.get();
        let half = self.grid.count() as f64 * self.grid.step() / 2.0;
        let centre = self.grid.start() + half;
        if p.r < SMALL_DILATION || (p.y - centre).abs() > half {
            let grid = plan_window(self.f, self.phi, p.r, p.y.abs(), &self.ctx)?;
            let samples = self.f.sample(&grid).into_values();
            let w = row_weights(&grid, &samples, &self.phi_eval, p.y, p.b, p.r, h);
            return Ok(fourier_sum(&grid, &w, p.x, p.y, h));
        }
        let w = row_weights(&self.grid, &self.samples, &self.phi_eval, p.y, p.b, p.r, h);
        Ok(fourier_sum(&self.grid, &w, p.x, p.y, h))
    }
}

/// `covariant_fast` with the unit Gaussian fiducial, on the native grids.
pub fn metamorphism(f: &Signal, b: f64, r: f64, ctx: &TransformContext) -> Result<TransformResult> {
    let phi = Signal::from(gaussian(&ctx.rep()));
    let mut out = covariant_fast(f, &phi, b, r, ctx)?;
    out.fiducial = "gaussian".into();
    Ok(out)
}

/// Adjoint transform `f(u) = Σ_μ ∫∫ F(x,y,b,r) [ρ(s(x,y,b,r)) φ](u) ħ dx dy`.
///
/// Each slice must be on a fast-pipeline layout: `y` is the reconstruction
/// grid and `x` its padded dual.
pub fn contravariant(
    fields: &[ComplexField2D],
    phi: &Signal,
    measure: &MeasureSpec,
    _ctx: &TransformContext,
) -> Result<crate::signals::SampledSignal> {
    measure.validate()?;
    let phi_eval = Evaluator::new(phi);
    let mut acc: Option<(UniformGrid1D, Vec<C64>)> = None;
    for atom in measure.atoms() {
        let slice = find_slice(fields, atom.b, atom.r)?;
        let u_grid = *slice.y_grid();
        let x_grid = *slice.x_grid();
        let hbar = slice.hbar();
        let h = hbar.get();
        let (n, m) = (u_grid.count(), x_grid.count());
        // undo M, then the conjugate Fourier kernel
        let mut rows = slice.values().to_vec();
        rows.par_chunks_mut(m).enumerate().for_each(|(i, row)| {
            let y = u_grid.point(i);
            for (k, v) in row.iter_mut().enumerate() {
                *v *= C64::from_polar(1.0, -2.0 * PI * h * x_grid.point(k) * y);
            }
        });
        let inv = partial_fourier_inverse(&rows, &x_grid, &u_grid, hbar)?;
        drop(rows);
        let (r, b) = (atom.r, atom.b);
        let mut weight = atom.weight * u_grid.step();
        if measure.normalization == Normalization::Paper {
            weight /= (2.0 * r).sqrt();
        }
        let sr = r.sqrt();
        let kernel = difference_table(n, u_grid.step(), |v| {
            weight * sr * phi_eval.eval(r * v) * C64::from_polar(1.0, -PI * h * b * v * v)
        });
        let out: Vec<C64> = (0..n)
            .into_par_iter()
            .map(|j| (0..n).map(|i| inv[i * n + j] * kernel[j + n - 1 - i]).sum())
            .collect();
        match &mut acc {
            None => acc = Some((u_grid, out)),
            Some((g, a)) => {
                if !g.same_as(&u_grid) {
                    return Err(Error::GridMismatch("slices reconstruct onto different u-grids".into()));
                }
                a.iter_mut().zip(out).for_each(|(s, v)| *s += v);
            }
        }
    }
    let (grid, values) = acc.ok_or_else(|| Error::InvalidMeasure("empty measure".into()))?;
    crate::signals::SampledSignal::new(grid, values)
}

/// `max |[W_φ(ρ(g) f)](p) − [ρ̃(g) W_φ f](p)|` over the points.
pub fn intertwining_residual(
    g: &GroupElement,
    f: &Signal,
    phi: &Signal,
    points: &[HomogeneousPoint],
    ctx: &TransformContext,
) -> Result<f64> {
    let rep = ctx.rep();
    let moved: Signal = match f {
        Signal::Exact(e) => schrodinger_apply(g, e, &rep).into(),
        Signal::Sampled(s) => schrodinger_apply_sampled(g, s, &rep)?.into(),
    };
    let lhs = PointTransform::new(&moved, phi, ctx)?;
    let rhs = PointTransform::new(f, phi, ctx)?;
    let failure = RefCell::new(None);
    let mut worst = 0.0f64;
    for p in points {
        let a = lhs.eval(p)?;
        let b = quasi_regular_point(
            g,
            |q| {
                rhs.eval(q).unwrap_or_else(|e| {
                    failure.borrow_mut().get_or_insert(e);
                    C64::new(0.0, 0.0)
                })
            },
            p,
            &rep,
        );
        if let Some(e) = failure.borrow_mut().take() {
            return Err(e);
        }
        worst = worst.max((a - b).norm());
    }
    Ok(worst)
}

/// `|⟨W_φ f, W_ψ g⟩_μ − ⟨f, g⟩ conj⟨φ, ψ⟩|`.
pub fn orthogonality_defect(
    f: &Signal,
    g: &Signal,
    phi: &Signal,
    psi: &Signal,
    measure: &MeasureSpec,
    ctx: &TransformContext,
) -> Result<f64> {
    measure.validate()?;
    let mut wf = Vec::new();
    let mut wg = Vec::new();
    for atom in measure.atoms() {
        wf.push(covariant_fast(f, phi, atom.b, atom.r, ctx)?.field);
        wg.push(covariant_fast(g, psi, atom.b, atom.r, ctx)?.field);
    }
    let lhs = slice_inner_product(&wf, &wg, measure)?;
    let rhs = inner_product(f, g)? * inner_product(phi, psi)?.conj();
    Ok((lhs - rhs).norm())
}
