//! Plurisubharmonic witnesses `v(z, w) = Σ σ_n max(u_n(z, w), -δ_n)` with
//! `u_n = (1/m) log|q_n(z) w - p_n(z)|`, built from the stage products
//! `r_n = p_n/q_n = g_n`. Each `u_n` sits below `-δ_n` on the graph of the
//! deepest `g` over the reference disc `B`, so `v` is pushed to
//! `-Σ σ_n δ_n` there and stays finite off the graph.
//!
//! On the graph the difference `q_n g - p_n` cancels to the last digit, so
//! [`eval_witness_on_graph`] uses the identity `q_n g - p_n = p_n (g/g_n - 1)`
//! instead of evaluating the literal expression at a rounded `g(z)`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cantor::CantorState;
use crate::error::{Error, Result};
use crate::product::{eval_g, ratio_minus_one};

/// Stands for `-∞`; absorbing under `max` with any finite floor.
pub const NEG_INF_SENTINEL: f64 = f64::MIN;
/// Cap on the depths `δ_n`, in natural-log units.
pub const DEPTH_CAP: f64 = 700.0;
/// Boundary samples used for sup norms on `B`.
pub const SUP_SAMPLES: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferenceDisc {
    pub center: Complex64,
    pub radius: f64,
}

impl Default for ReferenceDisc {
    fn default() -> Self {
        ReferenceDisc {
            center: Complex64::new(2.0, 0.0),
            radius: 0.5,
        }
    }
}

impl ReferenceDisc {
    pub fn validate(&self, state: &CantorState, n: usize) -> Result<()> {
        if !(self.radius > 0.0) || state.distance_to_blocks(n, self.center)? <= self.radius {
            return Err(Error::Placement);
        }
        Ok(())
    }

    pub fn boundary(&self, samples: usize) -> impl Iterator<Item = Complex64> + '_ {
        (0..samples).map(move |k| {
            self.center + Complex64::from_polar(self.radius, TAU * k as f64 / samples as f64)
        })
    }

    /// `(z - c)/r`.
    pub fn normalized(&self, z: Complex64) -> Complex64 {
        (z - self.center) / self.radius
    }
}

/// Coefficients are real and ascending in degree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RationalApproximant {
    pub stage: usize,
    pub degree: usize,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    /// Sup of the unnormalized denominator on `B`; `p` and `q` are divided by it.
    pub sup_q_on_b: f64,
    /// Sup of the normalized numerator on `B`.
    pub sup_p_on_b: f64,
    /// `‖g_deepest - r_n‖_B`.
    pub error_on_b: f64,
}

fn poly_from_roots(roots: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut c = vec![1.0];
    for r in roots {
        let mut next = vec![0.0; c.len() + 1];
        for (k, a) in c.iter().enumerate() {
            next[k + 1] += a;
            next[k] -= r * a;
        }
        c = next;
    }
    c
}

fn horner(c: &[f64], z: Complex64) -> Complex64 {
    c.iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a)
}

impl RationalApproximant {
    pub fn eval_p(&self, z: Complex64) -> Complex64 {
        horner(&self.p, z)
    }

    pub fn eval_q(&self, z: Complex64) -> Complex64 {
        horner(&self.q, z)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.eval_p(z) / self.eval_q(z)
    }
}

/// `r_n = g_n` for `n = 0..=big_n`, each with `sup_B |q| = 1`.
pub fn build_approximants(
    state: &CantorState,
    disc: &ReferenceDisc,
    big_n: usize,
) -> Result<Vec<RationalApproximant>> {
    state.check_stage(big_n)?;
    disc.validate(state, state.depth())?;
    let depth = state.depth();
    let ring: Vec<Complex64> = disc.boundary(SUP_SAMPLES).collect();
    (0..=big_n)
        .map(|n| {
            let blocks = state.blocks(n)?;
            let p_raw = poly_from_roots(blocks.iter().map(|b| b.left()));
            let q_raw = poly_from_roots(blocks.iter().map(|b| b.right()));
            let sup_q = ring
                .iter()
                .map(|&z| horner(&q_raw, z).norm())
                .fold(0.0, f64::max);
            let p: Vec<f64> = p_raw.iter().map(|c| c / sup_q).collect();
            let q: Vec<f64> = q_raw.iter().map(|c| c / sup_q).collect();
            let sup_p = ring.iter().map(|&z| horner(&p, z).norm()).fold(0.0, f64::max);
            let mut error = 0.0f64;
            for &z in &ring {
                let dev = eval_g(state, n, z)? * ratio_minus_one(state, n, depth, z, false)?;
                error = error.max(dev.norm());
            }
            Ok(RationalApproximant {
                stage: n,
                degree: n + 1,
                p,
                q,
                sup_q_on_b: sup_q,
                sup_p_on_b: sup_p,
                error_on_b: error,
            })
        })
        .collect()
}

/// `(1/m) log|q(z) w - p(z)|`, or the sentinel where it vanishes.
pub fn eval_u(r: &RationalApproximant, z: Complex64, w: Complex64) -> f64 {
    let v = r.eval_q(z) * w - r.eval_p(z);
    log_over(v.norm(), r.degree)
}

fn log_over(modulus: f64, m: usize) -> f64 {
    if modulus == 0.0 {
        NEG_INF_SENTINEL
    } else {
        modulus.ln() / m as f64
    }
}

/// `u_n(z, g(z))` for the deepest product `g`, via `p_n(z) (g/g_n - 1)(z)`.
pub fn eval_u_on_graph(r: &RationalApproximant, state: &CantorState, z: Complex64) -> Result<f64> {
    let dev = ratio_minus_one(state, r.stage, state.depth(), z, false)?;
    Ok(log_over(r.eval_p(z).norm() * dev.norm(), r.degree))
}

/// `δ_n = -max_B u_n(·, g(·))`, clamped to `[0, 700]`. Each `u_n(·, g(·))`
/// is the log-modulus of a holomorphic function on `B`, so the maximum is
/// taken over `samples` boundary points.
pub fn compute_depths(
    approximants: &[RationalApproximant],
    state: &CantorState,
    disc: &ReferenceDisc,
    samples: usize,
) -> Result<Vec<f64>> {
    if samples < 512 {
        return Err(Error::InvalidParams(format!(
            "depth estimation needs at least 512 samples, got {samples}"
        )));
    }
    let points: Vec<Complex64> = std::iter::once(disc.center)
        .chain(disc.boundary(samples))
        .collect();
    approximants
        .iter()
        .map(|r| {
            let mut top = NEG_INF_SENTINEL;
            for &z in &points {
                top = top.max(eval_u_on_graph(r, state, z)?);
            }
            Ok((-top).clamp(0.0, DEPTH_CAP))
        })
        .collect()
}

/// `σ_n = (6/π²)/m²` with `m = n + 1`.
pub fn default_weights(count: usize) -> Vec<f64> {
    (1..=count)
        .map(|m| 6.0 / (PI * PI) / (m * m) as f64)
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessFunction {
    pub disc: ReferenceDisc,
    pub approximants: Vec<RationalApproximant>,
    pub depths: Vec<f64>,
    pub weights: Vec<f64>,
    pub truncation: usize,
}

impl WitnessFunction {
    pub fn build(state: &CantorState, disc: ReferenceDisc, big_n: usize, samples: usize) -> Result<Self> {
        let approximants = build_approximants(state, &disc, big_n)?;
        let depths = compute_depths(&approximants, state, &disc, samples)?;
        Ok(WitnessFunction {
            disc,
            weights: default_weights(approximants.len()),
            approximants,
            depths,
            truncation: big_n,
        })
    }

    /// `Σ σ_n δ_n`.
    pub fn total_depth(&self) -> f64 {
        self.weights.iter().zip(&self.depths).map(|(s, d)| s * d).sum()
    }

    /// `max_n log(1 + sup_B |p_n|)`.
    pub fn growth_constant(&self) -> f64 {
        self.approximants
            .iter()
            .map(|r| r.sup_p_on_b.ln_1p())
            .fold(0.0, f64::max)
    }

    /// The same witness with the first `big_n + 1` terms.
    pub fn truncated(&self, big_n: usize) -> WitnessFunction {
        let k = (big_n + 1).min(self.approximants.len());
        WitnessFunction {
            disc: self.disc,
            approximants: self.approximants[..k].to_vec(),
            depths: self.depths[..k].to_vec(),
            weights: self.weights[..k].to_vec(),
            truncation: k - 1,
        }
    }
}

fn floored(terms: impl Iterator<Item = f64>, wf: &WitnessFunction) -> f64 {
    terms
        .zip(wf.weights.iter().zip(&wf.depths))
        .map(|(u, (s, d))| s * u.max(-d))
        .sum()
}

/// `Σ σ_n max(u_n(z, w), -δ_n)`.
pub fn eval_witness(wf: &WitnessFunction, z: Complex64, w: Complex64) -> f64 {
    floored(wf.approximants.iter().map(|r| eval_u(r, z, w)), wf)
}

/// `v(z, g(z))` for the deepest product `g` of `state`.
pub fn eval_witness_on_graph(wf: &WitnessFunction, state: &CantorState, z: Complex64) -> Result<f64> {
    let us: Vec<f64> = wf
        .approximants
        .iter()
        .map(|r| eval_u_on_graph(r, state, z))
        .collect::<Result<_>>()?;
    Ok(floored(us.into_iter(), wf))
}

/// `Σ σ_n ((1/m) log|q_n(z)| + (1/m) log|w - r_n(z)|)`, a lower bound for `v`.
pub fn off_graph_floor(wf: &WitnessFunction, z: Complex64, w: Complex64) -> f64 {
    wf.approximants
        .iter()
        .zip(&wf.weights)
        .map(|(r, s)| {
            let m = r.degree as f64;
            s * (r.eval_q(z).norm().ln() / m + (w - r.eval(z)).norm().ln() / m)
        })
        .sum()
}

/// `v(z, w²)`.
pub fn pullback_square(wf: &WitnessFunction, z: Complex64, w: Complex64) -> f64 {
    eval_witness(wf, z, w * w)
}

/// `v(center) - mean of v over the circle of radius ρ` along the complex line
/// `t ↦ (z, w) + t·dir`; nonpositive for plurisubharmonic `v` up to
/// quadrature error.
pub fn line_sub_mean_gap(
    wf: &WitnessFunction,
    base: (Complex64, Complex64),
    dir: (Complex64, Complex64),
    rho: f64,
    samples: usize,
) -> f64 {
    let center = eval_witness(wf, base.0, base.1);
    let mean = (0..samples)
        .map(|k| {
            let t = Complex64::from_polar(rho, TAU * k as f64 / samples as f64);
            eval_witness(wf, base.0 + dir.0 * t, base.1 + dir.1 * t)
        })
        .sum::<f64>()
        / samples as f64;
    center - mean
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cantor::Interval;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn state() -> CantorState {
        CantorState::from_intervals(
            Interval::new(-1.0, 1.0).unwrap(),
            &[(0.0, 1e-3), (-0.5, -0.5 + 1e-8), (0.5, 0.5 + 1e-15)],
        )
        .unwrap()
    }

    #[test]
    fn u_examples() {
        let r = RationalApproximant {
            stage: 0,
            degree: 1,
            p: vec![0.0],
            q: vec![0.0, 1.0],
            sup_q_on_b: 1.0,
            sup_p_on_b: 0.0,
            error_on_b: 0.0,
        };
        assert_eq!(eval_u(&r, c(1.0, 0.0), c(1.0, 0.0)), 0.0);
        let r = RationalApproximant {
            p: vec![3.0],
            ..r
        };
        assert_eq!(eval_u(&r, c(1.0, 0.0), c(3.0, 0.0)), NEG_INF_SENTINEL);
    }

    #[test]
    fn approximants_are_normalized() {
        let s = state();
        let d = ReferenceDisc::default();
        let rs = build_approximants(&s, &d, 3).unwrap();
        assert_eq!(rs.len(), 4);
        assert_eq!(rs[0].degree, 1);
        assert_eq!(rs[0].p.len(), 2);
        for r in &rs {
            let sup = d.boundary(SUP_SAMPLES).map(|z| r.eval_q(z).norm()).fold(0.0, f64::max);
            assert!((sup - 1.0).abs() < 1e-10);
            let z = c(2.1, 0.3);
            let g = eval_g(&s, r.stage, z).unwrap();
            assert!((r.eval(z) - g).norm() < 1e-12 * g.norm());
        }
        assert_eq!(rs[3].error_on_b, 0.0);
        assert!(rs[0].error_on_b > rs[1].error_on_b && rs[1].error_on_b > rs[2].error_on_b);
        let bad = ReferenceDisc {
            center: c(0.9, 0.0),
            radius: 0.5,
        };
        assert!(matches!(build_approximants(&s, &bad, 1), Err(Error::Placement)));
    }

    #[test]
    fn depths_and_graph_floor() {
        let s = state();
        let wf = WitnessFunction::build(&s, ReferenceDisc::default(), 3, 1024).unwrap();
        assert_eq!(wf.depths[3], DEPTH_CAP);
        assert!(wf.depths.windows(2).all(|p| p[0] <= p[1]));
        assert!(wf.depths.iter().all(|d| *d >= 0.0));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let z = wf.disc.center + Complex64::from_polar(rng.gen_range(0.0..0.45), rng.gen_range(0.0..TAU));
            let v = eval_witness_on_graph(&wf, &s, z).unwrap();
            assert!(v <= -wf.total_depth() + 1e-9);
            let g = eval_g(&s, 3, z).unwrap();
            let w = g + Complex64::from_polar(rng.gen_range(0.5..2.0), rng.gen_range(0.0..TAU));
            let off = eval_witness(&wf, z, w);
            assert!(off >= off_graph_floor(&wf, z, w) - 1e-9);
            assert!(off - v >= 1.0);
        }
    }

    #[test]
    fn zero_depths_give_zero() {
        let s = state();
        let mut wf = WitnessFunction::build(&s, ReferenceDisc::default(), 2, 512).unwrap();
        wf.depths = vec![0.0; 3];
        // w = g(z) + tiny keeps every u_n <= 0
        let z = c(2.2, 0.1);
        let w = eval_g(&s, 3, z).unwrap() + 1e-3;
        for r in &wf.approximants {
            assert!(eval_u(r, z, w) <= 0.0);
        }
        assert_eq!(eval_witness(&wf, z, w), 0.0);
    }

    #[test]
    fn growth_bound_in_normalized_coordinates() {
        let s = state();
        let wf = WitnessFunction::build(&s, ReferenceDisc::default(), 3, 512).unwrap();
        let c1 = wf.growth_constant();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..2000 {
            let zeta = Complex64::from_polar(rng.gen_range(1.0..50.0), rng.gen_range(0.0..TAU));
            let z = wf.disc.center + zeta * wf.disc.radius;
            let w = Complex64::from_polar(10f64.powf(rng.gen_range(-4.0..4.0)), rng.gen_range(0.0..TAU));
            for r in &wf.approximants {
                let bound = 2.0 * zeta.norm().ln() + w.norm().max(1.0).ln() + c1;
                assert!(eval_u(r, z, w) <= bound + 1e-12);
            }
        }
    }

    #[test]
    fn pullback_is_even() {
        let s = state();
        let wf = WitnessFunction::build(&s, ReferenceDisc::default(), 3, 512).unwrap();
        let z = c(1.8, -0.2);
        let f = crate::product::eval_f(&s, 3, z).unwrap().value;
        let a = pullback_square(&wf, z, f);
        let b = pullback_square(&wf, z, -f);
        assert_eq!(a.to_bits(), b.to_bits());
        assert_eq!(a.to_bits(), eval_witness(&wf, z, f * f).to_bits());
        let off = pullback_square(&wf, z, f + 1.0);
        assert!(off.is_finite() && off > NEG_INF_SENTINEL);
    }

    #[test]
    fn sub_mean_on_random_lines() {
        let s = state();
        let wf = WitnessFunction::build(&s, ReferenceDisc::default(), 3, 512).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut pick = |r: f64| c(rng.gen_range(-r..r), rng.gen_range(-r..r));
        for _ in 0..100 {
            let base = (c(2.0, 0.0) + pick(0.6), pick(2.0));
            let dir = (pick(1.0), pick(1.0));
            assert!(line_sub_mean_gap(&wf, base, dir, 1e-2, 256) <= 1e-7);
        }
    }

    #[test]
    fn serializes_round_trip() {
        let s = state();
        let wf = WitnessFunction::build(&s, ReferenceDisc::default(), 2, 512).unwrap();
        let text = serde_json::to_string(&wf).unwrap();
        let back: WitnessFunction = serde_json::from_str(&text).unwrap();
        assert_eq!(back, wf);
    }
}
