//! The two-sheeted cover `X_n = {w² = g_n}`, the sheet-connecting function
//! (`f_n` below the axis, `-f_n` above, glued across the blocks), the
//! two-constant estimate driving points of the hull onto the second sheet,
//! Hausdorff distances between covers, and cluster sets of `f` at points
//! of the set.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cantor::CantorState;
use crate::domain::{Disc, SlitDiskDomain};
use crate::error::{Error, Result};
use crate::export::GridSpec;
use crate::harmonic::{default_eps, wos_estimate, MeasureEstimate};
use crate::product::{eval_f, f_difference, PROXIMITY_TOL};
use crate::witness::NEG_INF_SENTINEL;

/// Height below a block at which its boundary values are taken.
pub const BOUNDARY_OFFSET: f64 = 1e-10;
/// Limit values closer than this are merged by [`cluster_probe`].
pub const CLUSTER_TOL: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SheetSample {
    pub z: Complex64,
    pub w_plus: Complex64,
    pub w_minus: Complex64,
}

fn excluded(state: &CantorState, n: usize, z: Complex64) -> Result<()> {
    if state.excluded_discs(n)?.iter().any(|d| d.contains(z)) {
        return Err(Error::ExcludedRegion { re: z.re, im: z.im });
    }
    Ok(())
}

/// The point at which `f_n` is evaluated for the sheet function at `z`, and
/// whether the sign flips. Points within [`BOUNDARY_OFFSET`] of a block take
/// the value from below.
fn lower_point(state: &CantorState, n: usize, z: Complex64) -> Result<(Complex64, bool)> {
    if z.im.abs() < BOUNDARY_OFFSET && state.blocks(n)?.iter().any(|b| b.contains(z.re)) {
        return Ok((Complex64::new(z.re, -BOUNDARY_OFFSET), false));
    }
    if z.im == 0.0 {
        return Err(Error::ExcludedRegion { re: z.re, im: z.im });
    }
    Ok((z, z.im > 0.0))
}

/// `f_n(z)` for `Im z < 0`, `-f_n(z)` for `Im z > 0`, and the limit from below
/// on the blocks.
pub fn eval_sheet(state: &CantorState, n: usize, z: Complex64) -> Result<Complex64> {
    excluded(state, n, z)?;
    let (p, upper) = lower_point(state, n, z)?;
    let f = eval_f(state, n, p)?.value;
    Ok(if upper { -f } else { f })
}

/// `h_n = sheet_n - κ_n` with `κ_n = sheet_n(z₀) + f_N(z₀)`, `N` the depth, so
/// that `h_n(z₀) = -f_N(z₀)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SheetFunction {
    pub state: CantorState,
    pub n: usize,
    pub z0: Complex64,
    pub offset: Complex64,
}

/// `f_N - f_n` at the lower representative.
fn tail(state: &CantorState, n: usize, z: Complex64) -> Result<Complex64> {
    f_difference(state, n, state.depth(), z)
}

impl SheetFunction {
    pub fn new(state: &CantorState, n: usize, z0: Complex64) -> Result<Self> {
        excluded(state, n, z0)?;
        let (p, upper) = lower_point(state, n, z0)?;
        // κ = ∓f_n + f_N
        let offset = if upper {
            tail(state, n, p)?
        } else {
            eval_f(state, n, p)?.value + eval_f(state, state.depth(), p)?.value
        };
        Ok(SheetFunction {
            state: state.clone(),
            n,
            z0,
            offset,
        })
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        Ok(eval_sheet(&self.state, self.n, z)? - self.offset)
    }

    /// `(h_n - f_N, h_n + f_N)` at `z`, the small factor computed without
    /// cancellation.
    fn factors(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        let (s, n, k) = (&self.state, self.n, self.offset);
        excluded(s, n, z)?;
        let (p, upper) = lower_point(s, n, z)?;
        let f_n = eval_f(s, n, p)?.value;
        let d = tail(s, n, p)?;
        let f_big = f_n + d;
        Ok(if upper {
            (-f_n - k - f_big, d - k)
        } else {
            (-d - k, f_n - k + f_big)
        })
    }

    /// `log|q_N(z) h_n(z)² - p_N(z)|` with `p_N/q_N = g_N` monic products;
    /// `-∞` (the sentinel) at `z₀` and, for `n = N`, on the lower half-plane.
    pub fn log_residual(&self, z: Complex64) -> Result<f64> {
        let (a, b) = self.factors(z)?;
        let q: f64 = self
            .state
            .blocks(self.state.depth())?
            .iter()
            .map(|bl| (z - bl.right()).norm().ln())
            .sum();
        let m = a.norm() * b.norm();
        Ok(if m == 0.0 { NEG_INF_SENTINEL } else { q + m.ln() })
    }
}

/// `|∮ sheet dz|` over the circle, by the trapezoid rule.
pub fn morera_check(
    state: &CantorState,
    n: usize,
    center: Complex64,
    radius: f64,
    samples: usize,
) -> Result<f64> {
    let fail = |m: String| Err(Error::ContourContainment(m));
    if !(radius > 0.0) || center.norm() + radius >= 1.0 {
        return fail("contour leaves the unit disk".into());
    }
    let contour = Disc::new(center, radius);
    if let Some(d) = state.excluded_discs(n)?.iter().find(|d| !d.disjoint_from(&contour)) {
        return fail(format!(
            "contour meets the excluded disc at {} of radius {:e}",
            d.center.re, d.radius
        ));
    }
    if center.im.abs() <= radius {
        let half = (radius * radius - center.im * center.im).sqrt();
        let (lo, hi) = (center.re - half, center.re + half);
        if !state.blocks(n)?.iter().any(|b| b.contains(lo) && b.contains(hi)) {
            return fail(format!("contour crosses the axis on [{lo}, {hi}] outside a block"));
        }
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..samples {
        let e = Complex64::from_polar(1.0, TAU * k as f64 / samples as f64);
        acc += eval_sheet(state, n, center + e * radius)? * e;
    }
    Ok((acc * Complex64::i() * radius * (TAU / samples as f64)).norm())
}

/// Points used to estimate `sup_D u`: rings just inside the unit circle and
/// just outside every disc, plus an interior lattice.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundarySampling {
    pub outer_ring: usize,
    pub disc_ring: usize,
    /// Interior lattice spacing.
    pub spacing: f64,
    /// Relative offset of the rings from their circles.
    pub offset: f64,
}

impl Default for BoundarySampling {
    fn default() -> Self {
        BoundarySampling {
            outer_ring: 4096,
            disc_ring: 512,
            spacing: 1.0 / 32.0,
            offset: 1e-6,
        }
    }
}

impl BoundarySampling {
    pub fn points(&self, domain: &SlitDiskDomain) -> Vec<Complex64> {
        let ring = |c: Complex64, r: f64, k: usize| {
            (0..k).map(move |i| c + Complex64::from_polar(r, TAU * i as f64 / k as f64))
        };
        let mut pts: Vec<Complex64> =
            ring(Complex64::new(0.0, 0.0), 1.0 - self.offset, self.outer_ring).collect();
        for d in domain.deleted_discs.iter().chain(std::iter::once(&domain.target)) {
            let r = (d.radius * (1.0 + self.offset)).max(1e-12);
            pts.extend(ring(d.center, r, self.disc_ring));
        }
        let steps = (1.0 / self.spacing).ceil() as i64;
        for j in -steps..=steps {
            for i in -steps..=steps {
                pts.push(Complex64::new(i as f64 * self.spacing, j as f64 * self.spacing));
            }
        }
        pts.retain(|&z| domain.contains(z));
        pts
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TwoConstantReport {
    pub n: usize,
    pub z0: [f64; 2],
    pub value: f64,
    /// Sampled sup of the test function on the domain.
    pub big_m: f64,
    /// Sampled sup on the boundary of the target disc.
    pub small_m: f64,
    pub omega: MeasureEstimate,
    pub slack: f64,
    /// `M(1 - ω) + mω`.
    pub bound: f64,
    pub holds: bool,
    pub domain_samples: usize,
    pub target_samples: usize,
}

/// Two-constant check on an explicit domain.
pub fn two_constant_check_in<F>(
    domain: &SlitDiskDomain,
    n: usize,
    test_fn: F,
    z0: Complex64,
    walks: u64,
    seed: u64,
    sampling: &BoundarySampling,
) -> Result<TwoConstantReport>
where
    F: Fn(Complex64) -> Option<f64> + Sync,
{
    let omega = wos_estimate(domain, z0, walks, default_eps(domain), seed)?;
    two_constant_with_omega(domain, n, test_fn, z0, omega, sampling)
}

/// As [`two_constant_check_in`], with a precomputed estimate of the harmonic
/// measure of the target at `z0`.
pub fn two_constant_with_omega<F>(
    domain: &SlitDiskDomain,
    n: usize,
    test_fn: F,
    z0: Complex64,
    omega: MeasureEstimate,
    sampling: &BoundarySampling,
) -> Result<TwoConstantReport>
where
    F: Fn(Complex64) -> Option<f64> + Sync,
{
    let value = test_fn(z0).ok_or(Error::PointPlacement { re: z0.re, im: z0.im })?;
    let sup = |pts: &[Complex64]| {
        pts.par_iter()
            .filter_map(|&z| test_fn(z))
            .reduce(|| NEG_INF_SENTINEL, f64::max)
    };
    let domain_pts = sampling.points(domain);
    let target_pts: Vec<Complex64> = (0..sampling.outer_ring)
        .map(|i| {
            domain.target.center
                + Complex64::from_polar(domain.target.radius, TAU * i as f64 / sampling.outer_ring as f64)
        })
        .collect();
    let small_m = sup(&target_pts);
    let big_m = sup(&domain_pts).max(small_m);
    let w = omega.value;
    let (bound, slack) = if small_m <= 0.5 * NEG_INF_SENTINEL {
        (NEG_INF_SENTINEL, 0.0)
    } else {
        let tiny = 1e-12 * (1.0 + big_m.abs() + small_m.abs());
        (
            big_m * (1.0 - w) + small_m * w,
            3.0 * omega.std_error * (big_m - small_m).abs() + tiny,
        )
    };
    Ok(TwoConstantReport {
        n,
        z0: [z0.re, z0.im],
        value,
        big_m,
        small_m,
        slack,
        bound,
        holds: value <= bound + slack,
        omega,
        domain_samples: domain_pts.len(),
        target_samples: target_pts.len(),
    })
}

/// Two-constant check on `D_n` of `state` with the default sampling.
pub fn two_constant_check<F>(
    state: &CantorState,
    n: usize,
    test_fn: F,
    z0: Complex64,
    walks: u64,
    seed: u64,
) -> Result<TwoConstantReport>
where
    F: Fn(Complex64) -> Option<f64> + Sync,
{
    let domain = state.slit_domain(n)?;
    two_constant_check_in(&domain, n, test_fn, z0, walks, seed, &BoundarySampling::default())
}

fn log_abs(v: Complex64) -> f64 {
    let m = v.norm();
    if m == 0.0 {
        NEG_INF_SENTINEL
    } else {
        m.ln()
    }
}

pub type TestFunction<'a> = Box<dyn Fn(Complex64) -> Option<f64> + Sync + 'a>;

/// Ten subharmonic functions on `D_n`: a constant, a harmonic function and
/// log-moduli of functions holomorphic there.
pub fn shipped_test_functions(state: &CantorState, n: usize) -> Vec<(&'static str, TestFunction<'_>)> {
    let sheet = move |z: Complex64| eval_sheet(state, n, z).ok();
    vec![
        ("constant", Box::new(|_| Some(0.7))),
        ("re_z", Box::new(|z: Complex64| Some(z.re))),
        ("log|z-1.5|", Box::new(|z: Complex64| Some(log_abs(z - 1.5)))),
        (
            "log|z+0.3-1.2i|",
            Box::new(|z: Complex64| Some(log_abs(z - Complex64::new(-0.3, 1.2)))),
        ),
        (
            "log|z-0.2+0.5i|",
            Box::new(|z: Complex64| Some(log_abs(z - Complex64::new(0.2, -0.5)))),
        ),
        ("log|s-2|", Box::new(move |z| sheet(z).map(|s| log_abs(s - 2.0)))),
        (
            "log|s+0.5i|",
            Box::new(move |z| sheet(z).map(|s| log_abs(s + Complex64::new(0.0, 0.5)))),
        ),
        ("log|zs-1|", Box::new(move |z| sheet(z).map(|s| log_abs(z * s - 1.0)))),
        ("log|s^2-z|", Box::new(move |z| sheet(z).map(|s| log_abs(s * s - z)))),
        (
            "re_z+log|s-1|",
            Box::new(move |z: Complex64| sheet(z).map(|s| z.re + log_abs(s - 1.0))),
        ),
    ]
}

/// Evaluation points for the shipped checks, all in `D_n ∖ S`.
pub fn shipped_points() -> [Complex64; 5] {
    [
        Complex64::new(0.0, 0.75),
        Complex64::new(0.3, 0.2),
        Complex64::new(-0.5, 0.5),
        Complex64::new(0.4, -0.2),
        Complex64::new(-0.2, -0.3),
    ]
}

/// Two-constant reports for `log|q_N h_n² - p_N|` at `z₀`, `n` in `stages`.
pub fn mechanism_reports(
    state: &CantorState,
    stages: impl IntoIterator<Item = usize>,
    z0: Complex64,
    walks: u64,
    seed: u64,
) -> Result<Vec<(SheetFunction, TwoConstantReport)>> {
    stages
        .into_iter()
        .map(|n| {
            let h = SheetFunction::new(state, n, z0)?;
            let report = two_constant_check(state, n, |z| h.log_residual(z).ok(), z0, walks, seed)?;
            Ok((h, report))
        })
        .collect()
}

/// Both sheets of `X_n` over the grid; points within `margin` of a block are
/// skipped and counted.
pub fn sample_cover(
    state: &CantorState,
    n: usize,
    grid: &GridSpec,
    margin: f64,
) -> Result<(Vec<SheetSample>, usize)> {
    let blocks = state.blocks(n)?;
    let mut samples = Vec::new();
    let mut skipped = 0;
    for z in grid.points() {
        let near = blocks.iter().any(|b| b.distance_to(z) < margin.max(PROXIMITY_TOL));
        match (near, eval_f(state, n, z)) {
            (false, Ok(f)) => samples.push(SheetSample {
                z,
                w_plus: f.value,
                w_minus: -f.value,
            }),
            _ => skipped += 1,
        }
    }
    Ok((samples, skipped))
}

/// Both sheets of every sample as points of `ℂ²`.
pub fn cover_points(samples: &[SheetSample]) -> Vec<(Complex64, Complex64)> {
    samples
        .iter()
        .flat_map(|s| [(s.z, s.w_plus), (s.z, s.w_minus)])
        .collect()
}

fn directed(a: &[(Complex64, Complex64)], b: &[(Complex64, Complex64)]) -> f64 {
    a.par_iter()
        .map(|p| {
            b.iter()
                .map(|q| (p.0 - q.0).norm().max((p.1 - q.1).norm()))
                .fold(f64::INFINITY, f64::min)
        })
        .reduce(|| 0.0, f64::max)
}

/// Symmetric Hausdorff distance in the metric `max(|Δz|, |Δw|)`.
pub fn hausdorff_distance(
    a: &[(Complex64, Complex64)],
    b: &[(Complex64, Complex64)],
) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    Ok(directed(a, b).max(directed(b, a)))
}

/// Limits of `f_N(x₀ + t e^{iθ})` as `t → 0` along `approach_count`
/// directions off the axis, clustered to within [`CLUSTER_TOL`].
pub fn cluster_probe(state: &CantorState, x0: f64, approach_count: usize) -> Result<Vec<Complex64>> {
    let depth = state.depth();
    let inside = state
        .blocks(depth)?
        .iter()
        .any(|b| b.left() < x0 && x0 < b.right());
    if !inside {
        return Err(Error::InvalidParams(format!(
            "{x0} is not interior to a block at depth {depth}"
        )));
    }
    let mut reps: Vec<Complex64> = Vec::new();
    for j in 0..approach_count.max(2) {
        let theta = TAU * (j as f64 + 0.5) / approach_count.max(2) as f64;
        let dir = Complex64::from_polar(1.0, theta);
        if dir.im.abs() < 0.05 {
            continue;
        }
        let z = x0 + dir * 1e-9;
        let v = eval_f(state, depth, z)?.value;
        if !reps.iter().any(|r| (r - v).norm() < CLUSTER_TOL) {
            reps.push(v);
        }
    }
    Ok(reps)
}
