//! The rational products `g_n(z) = Π_j (z - α_jn)/(z - β_jn)` over the stage-`n`
//! blocks and their square roots `f_n`, built factor by factor from principal
//! roots: each Möbius ratio maps the complement of its block onto the
//! complement of the negative real axis, so the product of principal roots is
//! holomorphic off the blocks and equals 1 at infinity.
//!
//! Differences between stages are never formed by subtraction. The quotient
//! `g_m / g_n = Π_{n<k≤m} (1 - d_k/(z - a_k))` is accumulated as
//! `Π (1 + t_k) - 1` directly, which keeps full relative accuracy when the
//! deleted widths `d_k` are far below machine epsilon.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cantor::{CantorState, Interval};
use crate::error::{Error, Result};

/// Distance below which a point counts as sitting on a pole or a cut.
pub const PROXIMITY_TOL: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchedEvaluation {
    pub value: Complex64,
    /// +1 on the principal determination, -1 on the other sheet.
    pub sheet_parity: i8,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailBound {
    pub n: usize,
    pub delta: f64,
    pub bound: f64,
}

fn check_pole(blocks: &[Interval], z: Complex64) -> Result<()> {
    for b in blocks {
        if (z - b.right()).norm() < PROXIMITY_TOL {
            return Err(Error::PoleProximity {
                re: z.re,
                im: z.im,
                tol: PROXIMITY_TOL,
            });
        }
    }
    Ok(())
}

fn block_ratio(b: &Interval, z: Complex64) -> Complex64 {
    (z - b.left()) / (z - b.right())
}

fn product_over(blocks: &[Interval], z: Complex64) -> Complex64 {
    blocks
        .iter()
        .fold(Complex64::new(1.0, 0.0), |acc, b| acc * block_ratio(b, z))
}

/// `g_n(z)`.
pub fn eval_g(state: &CantorState, n: usize, z: Complex64) -> Result<Complex64> {
    let blocks = state.blocks(n)?;
    check_pole(&blocks, z)?;
    Ok(product_over(&blocks, z))
}

/// `f_n(z)`, the square root of `g_n` normalized by `f_n(∞) = 1`.
pub fn eval_f(state: &CantorState, n: usize, z: Complex64) -> Result<BranchedEvaluation> {
    let blocks = state.blocks(n)?;
    if blocks.iter().any(|b| b.distance_to(z) < PROXIMITY_TOL) {
        return Err(Error::BranchCut { re: z.re, im: z.im });
    }
    let value = blocks
        .iter()
        .fold(Complex64::new(1.0, 0.0), |acc, b| acc * block_ratio(b, z).sqrt());
    Ok(BranchedEvaluation {
        value,
        sheet_parity: 1,
    })
}

/// `Π_{from<k≤to} τ_k(z) - 1` with `τ_k = 1 - d_k/(z - a_k)`, or its principal
/// square root when `half` is set; `g_to/g_from - 1` and `f_to/f_from - 1`
/// respectively.
pub fn ratio_minus_one(
    state: &CantorState,
    from: usize,
    to: usize,
    z: Complex64,
    half: bool,
) -> Result<Complex64> {
    state.check_stage(to)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for d in &state.deleted()[from.min(to)..to] {
        let rel = z - d.left;
        if rel.norm() < PROXIMITY_TOL {
            return Err(Error::PoleProximity {
                re: z.re,
                im: z.im,
                tol: PROXIMITY_TOL,
            });
        }
        let x = -d.width / rel;
        let t = if half {
            x / ((Complex64::new(1.0, 0.0) + x).sqrt() + 1.0)
        } else {
            x
        };
        acc = acc + t + acc * t;
    }
    Ok(acc)
}

/// `g_m(z) - g_n(z)` without cancellation.
pub fn g_difference(state: &CantorState, n: usize, m: usize, z: Complex64) -> Result<Complex64> {
    Ok(eval_g(state, n, z)? * ratio_minus_one(state, n, m, z, false)?)
}

/// `f_m(z) - f_n(z)` without cancellation.
pub fn f_difference(state: &CantorState, n: usize, m: usize, z: Complex64) -> Result<Complex64> {
    Ok(eval_f(state, n, z)?.value * ratio_minus_one(state, n, m, z, true)?)
}

/// `sup_gn · (exp(Σ_{n<k≤m} d_k/δ) - 1)`.
pub fn tail_bound(state: &CantorState, n: usize, m: usize, delta: f64, sup_gn: f64) -> TailBound {
    let sum: f64 = state.deleted()[n.min(m)..m].iter().map(|d| d.width / delta).sum();
    TailBound {
        n,
        delta,
        bound: sup_gn * sum.exp_m1(),
    }
}

/// Evaluates `g_n(z)` for increasing `n` until the bound on the remaining
/// recorded tail drops below `tol`. Past the deepest stage no further widths
/// are known, so the deepest value carries bound 0 relative to it.
pub fn eval_g_limit(state: &CantorState, z: Complex64, tol: f64) -> Result<(Complex64, TailBound)> {
    let depth = state.depth();
    let delta = state.distance_to_blocks(depth, z)?;
    if delta < PROXIMITY_TOL {
        return Err(Error::OnSet);
    }
    for n in 0..=depth {
        let g = eval_g(state, n, z)?;
        let tb = tail_bound(state, n, depth, delta, g.norm());
        if tb.bound <= tol || n == depth {
            return Ok((g, tb));
        }
    }
    unreachable!("loop returns at n == depth")
}

fn check_window(blocks: &[Interval], window: &Interval) -> Result<()> {
    for b in blocks {
        if b.contains(window.left()) || b.contains(window.right()) {
            return Err(Error::InvalidWindow {
                left: window.left(),
                right: window.right(),
            });
        }
    }
    Ok(())
}

fn window_blocks(blocks: &[Interval], window: &Interval) -> (Vec<Interval>, Vec<Interval>) {
    blocks
        .iter()
        .partition(|b| window.left() < b.left() && b.right() < window.right())
}

/// `(g_1n(z), g_2n(z))`: the products over blocks outside and inside `window`.
pub fn window_factor(
    state: &CantorState,
    n: usize,
    window: &Interval,
    z: Complex64,
) -> Result<(Complex64, Complex64)> {
    let blocks = state.blocks(n)?;
    check_window(&blocks, window)?;
    check_pole(&blocks, z)?;
    let (inner, outer) = window_blocks(&blocks, window);
    Ok((product_over(&outer, z), product_over(&inner, z)))
}

/// The `1/z` coefficient of `g_2n` at infinity, from the trapezoid rule for
/// `(1/2πi) ∮ (g_2n(z) - 1) dz` on `|z| = radius`.
pub fn residue_at_infinity(
    state: &CantorState,
    n: usize,
    window: &Interval,
    radius: f64,
    samples: usize,
) -> Result<f64> {
    let blocks = state.blocks(n)?;
    check_window(&blocks, window)?;
    if samples < 64 {
        return Err(Error::InvalidParams(format!(
            "contour needs at least 64 samples, got {samples}"
        )));
    }
    let (inner, _) = window_blocks(&blocks, window);
    let reach = inner
        .iter()
        .map(|b| b.left().abs().max(b.right().abs()))
        .fold(0.0, f64::max);
    if radius < reach + 1.0 {
        return Err(Error::ContourContainment(format!(
            "radius {radius} must exceed the largest window endpoint {reach} by 1"
        )));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..samples {
        let z = Complex64::from_polar(radius, std::f64::consts::TAU * k as f64 / samples as f64);
        acc += (product_over(&inner, z) - 1.0) * z;
    }
    let coeff = acc / samples as f64;
    debug_assert!(coeff.im.abs() < 1e-10, "imaginary residue {}", coeff.im);
    Ok(coeff.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cantor::DeletedInterval;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn unit() -> Interval {
        Interval::new(-1.0, 1.0).unwrap()
    }

    fn depth3() -> CantorState {
        CantorState::from_intervals(unit(), &[(-0.1, 0.1), (-0.6, -0.5), (0.5, 0.55)]).unwrap()
    }

    /// §3 first display: (z - a_0)/(z - b_0) · Π (z - b_j)/(z - a_j).
    fn naive_g(outer: (f64, f64), deleted: &[(f64, f64)], z: Complex64) -> Complex64 {
        let mut g = (z - outer.0) / (z - outer.1);
        for &(a, b) in deleted {
            g *= (z - b) / (z - a);
        }
        g
    }

    #[test]
    fn g_examples() {
        let s = CantorState::default();
        assert!((eval_g(&s, 0, c(3.0, 0.0)).unwrap() - 2.0).norm() < 1e-15);
        assert!((eval_g(&s, 0, c(0.0, 1.0)).unwrap() - c(0.0, -1.0)).norm() < 1e-15);
        let s = CantorState::from_intervals(unit(), &[(-0.5, 0.5), (0.7, 0.8)]).unwrap();
        let z = c(10.0, 0.0);
        let want = naive_g((-1.0, 1.0), &[(-0.5, 0.5), (0.7, 0.8)], z);
        assert!((eval_g(&s, 2, z).unwrap() - want).norm() < 1e-14 * want.norm());
        assert!(matches!(eval_g(&s, 2, c(0.7, 0.0)), Err(Error::PoleProximity { .. })));
    }

    #[test]
    fn f_examples() {
        let s = CantorState::default();
        let v = eval_f(&s, 0, c(3.0, 0.0)).unwrap();
        assert!((v.value - 2f64.sqrt()).norm() < 1e-15);
        assert_eq!(v.sheet_parity, 1);
        let v = eval_f(&s, 0, c(0.0, 1.0)).unwrap();
        let h = 0.5f64.sqrt();
        assert!((v.value - c(h, -h)).norm() < 1e-15);
        assert!(matches!(eval_f(&s, 0, c(0.3, 0.0)), Err(Error::BranchCut { .. })));
        assert!(eval_f(&s, 0, c(1.5, 0.0)).is_ok());
    }

    #[test]
    fn square_of_f_is_g() {
        let s = depth3();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..1000 {
            let z = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            if s.distance_to_blocks(3, z).unwrap() < 1e-6 {
                continue;
            }
            let g = eval_g(&s, 3, z).unwrap();
            let f = eval_f(&s, 3, z).unwrap().value;
            assert!((f * f - g).norm() / g.norm() < 1e-10);
        }
    }

    #[test]
    fn f_is_continuous_across_deleted_intervals() {
        let s = depth3();
        for x in [0.0, -0.55, 0.52, 1.5, -3.0] {
            let up = eval_f(&s, 3, c(x, 1e-9)).unwrap().value;
            let down = eval_f(&s, 3, c(x, -1e-9)).unwrap().value;
            assert!((up - down).norm() < 1e-6);
        }
        // and flips sign across a block
        let up = eval_f(&s, 3, c(0.3, 1e-9)).unwrap().value;
        let down = eval_f(&s, 3, c(0.3, -1e-9)).unwrap().value;
        assert!((up + down).norm() < 1e-6);
    }

    #[test]
    fn ratio_matches_direct_quotient() {
        let s = depth3();
        let z = c(0.3, 0.8);
        let direct = eval_g(&s, 3, z).unwrap() / eval_g(&s, 1, z).unwrap() - 1.0;
        let r = ratio_minus_one(&s, 1, 3, z, false).unwrap();
        assert!((direct - r).norm() < 1e-14);
        let direct = eval_f(&s, 3, z).unwrap().value / eval_f(&s, 1, z).unwrap().value - 1.0;
        let r = ratio_minus_one(&s, 1, 3, z, true).unwrap();
        assert!((direct - r).norm() < 1e-14);
    }

    #[test]
    fn ratio_resolves_subepsilon_widths() {
        let mut s = CantorState::default();
        s.push(DeletedInterval::new(0.25, 1e-22).unwrap()).unwrap();
        let z = c(2.0, 0.0);
        let r = ratio_minus_one(&s, 0, 1, z, false).unwrap();
        assert!((r - c(-1e-22 / 1.75, 0.0)).norm() < 1e-36);
        let r = ratio_minus_one(&s, 0, 1, z, true).unwrap();
        assert!((r - c(-0.5e-22 / 1.75, 0.0)).norm() < 1e-36);
    }

    #[test]
    fn g_limit_examples() {
        let s = CantorState::default();
        let (g, tb) = eval_g_limit(&s, c(3.0, 0.0), 1e-12).unwrap();
        assert_eq!(g, c(2.0, 0.0));
        assert_eq!(tb.bound, 0.0);

        let s = depth3();
        let z = c(0.25, 0.5);
        let (g, tb) = eval_g_limit(&s, z, 1e-3).unwrap();
        let deepest = eval_g(&s, 3, z).unwrap();
        assert!((g - deepest).norm() <= tb.bound);
        assert!(matches!(eval_g_limit(&s, c(0.3, 0.0), 1e-3), Err(Error::OnSet)));
    }

    #[test]
    fn window_factor_examples() {
        let s = depth3();
        let z = c(5.0, 0.0);
        let g = eval_g(&s, 3, z).unwrap();
        let all = Interval::new(-2.0, 2.0).unwrap();
        let (g1, g2) = window_factor(&s, 3, &all, z).unwrap();
        assert_eq!(g1, c(1.0, 0.0));
        assert!((g2 - g).norm() < 1e-15);
        let none = Interval::new(3.0, 4.0).unwrap();
        let (_, g2) = window_factor(&s, 3, &none, z).unwrap();
        assert_eq!(g2, c(1.0, 0.0));
        // one block [0.1, 0.5]
        let one = Interval::new(0.05, 0.52).unwrap();
        let (g1, g2) = window_factor(&s, 3, &one, z).unwrap();
        assert!((g2 - (z - 0.1) / (z - 0.5)).norm() < 1e-15);
        assert!((g1 * g2 - g).norm() < 1e-12 * g.norm());
        let bad = Interval::new(0.2, 0.52).unwrap();
        assert!(matches!(window_factor(&s, 3, &bad, z), Err(Error::InvalidWindow { .. })));
    }

    #[test]
    fn residue_examples() {
        let s = CantorState::from_intervals(Interval::new(-1.0, 0.3).unwrap(), &[(-0.5, 0.0)]).unwrap();
        let w = Interval::new(-0.1, 2.0).unwrap();
        let r = residue_at_infinity(&s, 1, &w, 10.0, 256).unwrap();
        assert!((r - 0.3).abs() < 1e-12);
        let empty = Interval::new(5.0, 6.0).unwrap();
        assert_eq!(residue_at_infinity(&s, 1, &empty, 10.0, 256).unwrap(), 0.0);
        assert!(matches!(
            residue_at_infinity(&s, 1, &w, 1.0, 256),
            Err(Error::ContourContainment(_))
        ));
        let s = depth3();
        let outer = Interval::new(-1.5, 1.5).unwrap();
        let r = residue_at_infinity(&s, 3, &outer, 3.0, 256).unwrap();
        assert!((r - s.trapped_length(&unit(), 3).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn tail_bound_holds_on_circle() {
        let s = depth3();
        for n in 0..3 {
            let mut sup_gn = 0.0f64;
            let mut sup_diff = 0.0f64;
            for k in 0..512 {
                let z = Complex64::from_polar(2.0, std::f64::consts::TAU * k as f64 / 512.0);
                sup_gn = sup_gn.max(eval_g(&s, n, z).unwrap().norm());
                sup_diff = sup_diff.max(g_difference(&s, n, 3, z).unwrap().norm());
            }
            let tb = tail_bound(&s, n, 3, 1.0, sup_gn);
            assert!(sup_diff <= tb.bound * (1.0 + 1e-9));
        }
    }
}
