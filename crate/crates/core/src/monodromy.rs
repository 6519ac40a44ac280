//! Analytic continuation of square-root branches along polylines.
//!
//! At every accepted step the continued value is the root of `g` nearest the
//! previous value. A step is accepted when it moves the value by less than
//! half its modulus and stays within a quarter of the clearance to the branch
//! set, so the nearest root cannot jump sheets.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cantor::{CantorState, Interval};
use crate::error::{Error, Result};
use crate::product::{eval_f, BranchedEvaluation};

/// A two-valued function `±root(z)` with a reference determination.
pub trait SquareRootFamily {
    /// The reference (parity +1) root at `z`.
    fn root(&self, z: Complex64) -> Result<Complex64>;
    /// Distance from `z` to the set the path must avoid.
    fn clearance(&self, z: Complex64) -> f64;
    /// Distance from the segment `[p, q]` to that set.
    fn segment_clearance(&self, p: Complex64, q: Complex64) -> f64;
}

/// `f_n` of a Cantor state; paths must avoid the stage-`n` blocks.
pub struct ProductSheets<'a> {
    blocks: Vec<Interval>,
    state: &'a CantorState,
    n: usize,
}

impl<'a> ProductSheets<'a> {
    pub fn new(state: &'a CantorState, n: usize) -> Result<Self> {
        Ok(ProductSheets {
            blocks: state.blocks(n)?,
            state,
            n,
        })
    }
}

/// Distance between the segment `[p, q]` and the real segment `[a, b]`.
fn segment_to_real_segment(p: Complex64, q: Complex64, a: f64, b: f64) -> f64 {
    // The segments cross iff p and q straddle the axis at a point of [a, b].
    if (p.im <= 0.0 && q.im >= 0.0) || (p.im >= 0.0 && q.im <= 0.0) {
        let x = if p.im == q.im {
            None
        } else {
            Some(p.re + (q.re - p.re) * (p.im / (p.im - q.im)))
        };
        match x {
            Some(x) if a <= x && x <= b => return 0.0,
            None if p.im == 0.0 && p.re.max(q.re) >= a && p.re.min(q.re) <= b => return 0.0,
            _ => {}
        }
    }
    let block = |z: Complex64| {
        let x = z.re.clamp(a, b);
        (z - x).norm()
    };
    let to_segment = |x: f64| point_to_segment(Complex64::new(x, 0.0), p, q);
    block(p).min(block(q)).min(to_segment(a)).min(to_segment(b))
}

fn point_to_segment(z: Complex64, p: Complex64, q: Complex64) -> f64 {
    let d = q - p;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (z - p).norm();
    }
    let t = (((z - p).conj() * d).re / len2).clamp(0.0, 1.0);
    (z - (p + d * t)).norm()
}

impl SquareRootFamily for ProductSheets<'_> {
    fn root(&self, z: Complex64) -> Result<Complex64> {
        Ok(eval_f(self.state, self.n, z)?.value)
    }

    fn clearance(&self, z: Complex64) -> f64 {
        self.blocks
            .iter()
            .map(|b| b.distance_to(z))
            .fold(f64::INFINITY, f64::min)
    }

    fn segment_clearance(&self, p: Complex64, q: Complex64) -> f64 {
        self.blocks
            .iter()
            .map(|b| segment_to_real_segment(p, q, b.left(), b.right()))
            .fold(f64::INFINITY, f64::min)
    }
}

/// `√g_n` with the principal root of the product as reference. Only the block
/// endpoints are avoided, so paths may cross block interiors and wind around
/// a single branch point.
pub struct EndpointSheets<'a> {
    endpoints: Vec<f64>,
    state: &'a CantorState,
    n: usize,
}

impl<'a> EndpointSheets<'a> {
    pub fn new(state: &'a CantorState, n: usize) -> Result<Self> {
        let endpoints = state
            .blocks(n)?
            .iter()
            .flat_map(|b| [b.left(), b.right()])
            .collect();
        Ok(EndpointSheets {
            endpoints,
            state,
            n,
        })
    }
}

impl SquareRootFamily for EndpointSheets<'_> {
    fn root(&self, z: Complex64) -> Result<Complex64> {
        if self.clearance(z) < crate::product::PROXIMITY_TOL {
            return Err(Error::BranchCut { re: z.re, im: z.im });
        }
        Ok(crate::product::eval_g(self.state, self.n, z)?.sqrt())
    }

    fn clearance(&self, z: Complex64) -> f64 {
        self.endpoints
            .iter()
            .map(|&x| (z - x).norm())
            .fold(f64::INFINITY, f64::min)
    }

    fn segment_clearance(&self, p: Complex64, q: Complex64) -> f64 {
        self.endpoints
            .iter()
            .map(|&x| point_to_segment(Complex64::new(x, 0.0), p, q))
            .fold(f64::INFINITY, f64::min)
    }
}

/// `√z` with reference root `i·√(-z)`, whose cut is `[0, ∞)`.
#[derive(Clone, Copy, Debug, Default)]
pub struct SqrtFixture;

impl SquareRootFamily for SqrtFixture {
    fn root(&self, z: Complex64) -> Result<Complex64> {
        if z.norm() < crate::product::PROXIMITY_TOL {
            return Err(Error::BranchCut { re: z.re, im: z.im });
        }
        Ok(Complex64::i() * (-z).sqrt())
    }

    fn clearance(&self, z: Complex64) -> f64 {
        z.norm()
    }

    fn segment_clearance(&self, p: Complex64, q: Complex64) -> f64 {
        point_to_segment(Complex64::new(0.0, 0.0), p, q)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuationOptions {
    /// First trial step, in path length.
    pub initial_step: f64,
    /// Minimal distance between the path and the branch set.
    pub margin: f64,
    /// Total trial steps over the whole path.
    pub max_steps: usize,
}

impl Default for ContinuationOptions {
    fn default() -> Self {
        ContinuationOptions {
            initial_step: 0.05,
            margin: 1e-14,
            max_steps: 1_000_000,
        }
    }
}

fn nearest_root(root: Complex64, prev: Complex64) -> Complex64 {
    if (root - prev).norm() <= (root + prev).norm() {
        root
    } else {
        -root
    }
}

/// Parity of `w` against the reference root `r`.
pub fn parity_of(w: Complex64, r: Complex64) -> i8 {
    if (w - r).norm() <= (w + r).norm() {
        1
    } else {
        -1
    }
}

pub fn continue_family<F: SquareRootFamily + ?Sized>(
    family: &F,
    path: &[Complex64],
    start: BranchedEvaluation,
    opts: &ContinuationOptions,
) -> Result<BranchedEvaluation> {
    let first = *path
        .first()
        .ok_or_else(|| Error::InvalidParams("empty path".into()))?;
    let r0 = family.root(first)?;
    if ((start.value - r0).norm()).min((start.value + r0).norm()) > 1e-8 * r0.norm() {
        return Err(Error::InvalidParams(
            "start value is not a root at the path start".into(),
        ));
    }
    let mut w = nearest_root(r0, start.value);
    let mut steps = 0usize;
    for seg in path.windows(2) {
        let (p, q) = (seg[0], seg[1]);
        let clear = family.segment_clearance(p, q);
        if clear < opts.margin {
            return Err(Error::PathCollision {
                distance: clear,
                margin: opts.margin,
            });
        }
        let length = (q - p).norm();
        if length == 0.0 {
            continue;
        }
        let mut t = 0.0;
        let mut h = opts.initial_step / length;
        while t < 1.0 {
            steps += 1;
            if steps > opts.max_steps {
                return Err(Error::StepBudget {
                    budget: opts.max_steps,
                });
            }
            let here = p + (q - p) * t;
            let room = 0.25 * family.clearance(here) / length;
            let step = h.min(1.0 - t).min(room);
            let z = if t + step >= 1.0 { q } else { p + (q - p) * (t + step) };
            let cand = nearest_root(family.root(z)?, w);
            if (cand - w).norm() < 0.5 * w.norm() {
                w = cand;
                t = if z == q { 1.0 } else { t + step };
                h = step * 1.5;
            } else {
                h = step * 0.5;
            }
        }
    }
    let end = *path.last().expect("path is nonempty");
    let r = family.root(end)?;
    Ok(BranchedEvaluation {
        value: w,
        sheet_parity: parity_of(w, r),
    })
}

/// Continues `f_n` along `path` from `start`.
pub fn continue_along_path(
    state: &CantorState,
    n: usize,
    path: &[Complex64],
    start: BranchedEvaluation,
) -> Result<BranchedEvaluation> {
    continue_family(
        &ProductSheets::new(state, n)?,
        path,
        start,
        &ContinuationOptions::default(),
    )
}

/// Rectangle through the gaps on either side of a block: starts and ends at
/// `right_gap` on the real axis.
pub fn loop_around(left_gap: f64, right_gap: f64, height: f64) -> Vec<Complex64> {
    vec![
        Complex64::new(right_gap, 0.0),
        Complex64::new(right_gap, height),
        Complex64::new(left_gap, height),
        Complex64::new(left_gap, -height),
        Complex64::new(right_gap, -height),
        Complex64::new(right_gap, 0.0),
    ]
}

/// Closed polygon approximating the circle `|z - center| = radius`.
pub fn circle_path(center: Complex64, radius: f64, vertices: usize) -> Vec<Complex64> {
    (0..=vertices)
        .map(|k| {
            center
                + Complex64::from_polar(
                    radius,
                    std::f64::consts::TAU * (k % vertices) as f64 / vertices as f64,
                )
        })
        .collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ContinuationRecord {
    pub path: Vec<Complex64>,
    #[serde(rename = "final")]
    pub final_value: BranchedEvaluation,
    pub parity: i8,
}

impl ContinuationRecord {
    pub fn new(path: Vec<Complex64>, final_value: BranchedEvaluation) -> Self {
        ContinuationRecord {
            parity: final_value.sheet_parity,
            path,
            final_value,
        }
    }
}
