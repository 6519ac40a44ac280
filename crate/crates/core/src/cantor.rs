//! Cantor-type sets as interval systems.
//!
//! A [`CantorState`] is an outer interval together with the deleted open
//! intervals `I_1, I_2, ...` in insertion order. At stage `n` the first `n`
//! deletions leave `n + 1` closed blocks `[α_jn, β_jn]`, which carry the
//! branch points of the square-root sheets.
//!
//! Deleted intervals are stored as (left endpoint, width) pairs: the widths
//! produced by the certified construction shrink like `4^{-n^2}`, far below
//! the spacing of doubles near the left endpoint, and every downstream
//! computation uses the width directly.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::domain::{Disc, SlitDiskDomain};
use crate::error::{Error, Result};
use crate::harmonic::CertificationEvidence;
use crate::rng::derive_seed;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct Interval {
    left: f64,
    right: f64,
}

impl Interval {
    pub fn new(left: f64, right: f64) -> Result<Self> {
        if left.is_finite() && right.is_finite() && left < right {
            Ok(Interval { left, right })
        } else {
            Err(Error::DegenerateInterval { left, right })
        }
    }

    pub fn left(&self) -> f64 {
        self.left
    }

    pub fn right(&self) -> f64 {
        self.right
    }

    pub fn length(&self) -> f64 {
        self.right - self.left
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.left + self.right)
    }

    /// Closed containment.
    pub fn contains(&self, x: f64) -> bool {
        self.left <= x && x <= self.right
    }

    pub fn overlap(&self, other: &Interval) -> f64 {
        (self.right.min(other.right) - self.left.max(other.left)).max(0.0)
    }

    /// Distance from a complex point to the closed segment.
    pub fn distance_to(&self, z: Complex64) -> f64 {
        let dx = if z.re < self.left {
            self.left - z.re
        } else if z.re > self.right {
            z.re - self.right
        } else {
            0.0
        };
        dx.hypot(z.im)
    }
}

impl TryFrom<[f64; 2]> for Interval {
    type Error = Error;
    fn try_from(v: [f64; 2]) -> Result<Self> {
        Interval::new(v[0], v[1])
    }
}

impl From<Interval> for [f64; 2] {
    fn from(i: Interval) -> Self {
        [i.left, i.right]
    }
}

/// A deleted open interval `(a, a + d)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeletedInterval {
    pub left: f64,
    pub width: f64,
}

impl DeletedInterval {
    pub fn new(left: f64, width: f64) -> Result<Self> {
        if left.is_finite() && width.is_finite() && width > 0.0 {
            Ok(DeletedInterval { left, width })
        } else {
            Err(Error::DegenerateInterval {
                left,
                right: left + width,
            })
        }
    }

    pub fn right(&self) -> f64 {
        self.left + self.width
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CantorState {
    outer: Interval,
    deleted: Vec<DeletedInterval>,
}

#[derive(Serialize, Deserialize)]
struct StateDocument {
    outer: [f64; 2],
    deleted: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    widths: Option<Vec<f64>>,
}

impl Serialize for CantorState {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        StateDocument {
            outer: self.outer.into(),
            deleted: self.deleted.iter().map(|d| [d.left, d.right()]).collect(),
            widths: Some(self.deleted.iter().map(|d| d.width).collect()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CantorState {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = StateDocument::deserialize(d)?;
        CantorState::from_document(doc).map_err(serde::de::Error::custom)
    }
}

impl Default for CantorState {
    fn default() -> Self {
        CantorState::new(Interval { left: -1.0, right: 1.0 })
    }
}

impl CantorState {
    pub fn new(outer: Interval) -> Self {
        CantorState {
            outer,
            deleted: Vec::new(),
        }
    }

    /// Builds a state from deleted intervals given by endpoints.
    pub fn from_intervals(outer: Interval, deleted: &[(f64, f64)]) -> Result<Self> {
        let mut state = CantorState::new(outer);
        for &(a, b) in deleted {
            state.push(DeletedInterval::new(a, b - a)?)?;
        }
        Ok(state)
    }

    fn from_document(doc: StateDocument) -> Result<Self> {
        let outer = Interval::try_from(doc.outer)?;
        let mut state = CantorState::new(outer);
        if let Some(widths) = &doc.widths {
            if widths.len() != doc.deleted.len() {
                return Err(Error::InvalidState(
                    "widths and deleted lists differ in length".into(),
                ));
            }
        }
        for (k, pair) in doc.deleted.iter().enumerate() {
            let width = match &doc.widths {
                Some(w) => {
                    let right = pair[0] + w[k];
                    if right != pair[1] {
                        return Err(Error::InvalidState(format!(
                            "deleted interval {} disagrees with its recorded width",
                            k + 1
                        )));
                    }
                    w[k]
                }
                None => pair[1] - pair[0],
            };
            state.push(DeletedInterval::new(pair[0], width)?)?;
        }
        Ok(state)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("state serializes")
    }

    /// Appends a deletion after checking it sits strictly inside the outer
    /// interval with closure disjoint from every earlier deletion.
    pub fn push(&mut self, interval: DeletedInterval) -> Result<()> {
        let (a, b) = (interval.left, interval.right());
        if !(self.outer.left < a && b < self.outer.right) {
            return Err(Error::InvalidState(format!(
                "deleted interval ({a}, {b}) is not strictly inside the outer interval"
            )));
        }
        for (k, other) in self.deleted.iter().enumerate() {
            if !(other.right() < a || b < other.left) {
                return Err(Error::InvalidState(format!(
                    "deleted interval ({a}, {b}) overlaps deleted interval {} ({}, {})",
                    k + 1,
                    other.left,
                    other.right()
                )));
            }
        }
        self.deleted.push(interval);
        Ok(())
    }

    pub fn outer(&self) -> Interval {
        self.outer
    }

    pub fn deleted(&self) -> &[DeletedInterval] {
        &self.deleted
    }

    pub fn depth(&self) -> usize {
        self.deleted.len()
    }

    /// The first `n` deletions.
    pub fn truncated(&self, n: usize) -> Result<CantorState> {
        self.check_stage(n)?;
        Ok(CantorState {
            outer: self.outer,
            deleted: self.deleted[..n].to_vec(),
        })
    }

    pub fn check_stage(&self, n: usize) -> Result<()> {
        if n > self.depth() {
            Err(Error::StageIndex {
                n,
                depth: self.depth(),
            })
        } else {
            Ok(())
        }
    }

    /// The `n + 1` closed blocks left after the first `n` deletions, ascending.
    pub fn blocks(&self, n: usize) -> Result<Vec<Interval>> {
        self.check_stage(n)?;
        let mut cuts: Vec<DeletedInterval> = self.deleted[..n].to_vec();
        cuts.sort_by(|x, y| x.left.total_cmp(&y.left));
        let mut blocks = Vec::with_capacity(n + 1);
        let mut left = self.outer.left;
        for cut in &cuts {
            blocks.push(Interval {
                left,
                right: cut.left,
            });
            left = cut.right();
        }
        blocks.push(Interval {
            left,
            right: self.outer.right,
        });
        Ok(blocks)
    }

    /// Total length of the stage-`n` blocks inside `window`.
    pub fn trapped_length(&self, window: &Interval, n: usize) -> Result<f64> {
        Ok(self.blocks(n)?.iter().map(|b| b.overlap(window)).sum())
    }

    /// Midpoint of the largest block at the current depth; leftmost on ties.
    pub fn next_candidate(&self) -> f64 {
        self.largest_block().midpoint()
    }

    fn largest_block(&self) -> Interval {
        let blocks = self.blocks(self.depth()).expect("current depth is a valid stage");
        let mut best = blocks[0];
        for b in &blocks[1..] {
            if b.length() > best.length() {
                best = *b;
            }
        }
        best
    }

    /// Distance from `z` to the union of the stage-`n` blocks.
    pub fn distance_to_blocks(&self, n: usize, z: Complex64) -> Result<f64> {
        Ok(self
            .blocks(n)?
            .iter()
            .map(|b| b.distance_to(z))
            .fold(f64::INFINITY, f64::min))
    }

    /// The discs removed from the unit disk through stage `n`: centered at
    /// `a_k` with radius `2^k d_k`.
    pub fn excluded_discs(&self, n: usize) -> Result<Vec<Disc>> {
        self.check_stage(n)?;
        Ok(self.deleted[..n]
            .iter()
            .enumerate()
            .map(|(k, d)| excluded_disc(k + 1, d))
            .collect())
    }

    pub fn slit_domain(&self, n: usize) -> Result<SlitDiskDomain> {
        let mut domain = SlitDiskDomain::default();
        domain.deleted_discs = self.excluded_discs(n)?;
        Ok(domain)
    }
}

fn excluded_disc(step: usize, d: &DeletedInterval) -> Disc {
    Disc::new(
        Complex64::new(d.left, 0.0),
        d.width * 2f64.powi(step as i32),
    )
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstructionParams {
    /// The growth sequence γ_1, γ_2, ...; entry `k - 1` is γ_k.
    pub growth: Vec<f64>,
    pub target_depth: usize,
    pub certification_threshold: f64,
    #[serde(default = "default_shrink")]
    pub shrink_factor: f64,
    pub rng_seed: u64,
    #[serde(default = "default_max_halvings")]
    pub max_halvings: u32,
}

fn default_shrink() -> f64 {
    0.5
}

fn default_max_halvings() -> u32 {
    60
}

impl ConstructionParams {
    /// γ_n = n.
    pub fn linear(target_depth: usize, certification_threshold: f64, rng_seed: u64) -> Self {
        ConstructionParams {
            growth: (1..=target_depth).map(|n| n as f64).collect(),
            target_depth,
            certification_threshold,
            shrink_factor: default_shrink(),
            rng_seed,
            max_halvings: default_max_halvings(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParams(m));
        if self.growth.len() < self.target_depth {
            return bad(format!(
                "growth sequence has {} entries, need {}",
                self.growth.len(),
                self.target_depth
            ));
        }
        if self.growth.iter().any(|g| !(*g > 0.0) || !g.is_finite()) {
            return bad("growth entries must be positive".into());
        }
        if self.growth.windows(2).any(|w| w[1] < w[0]) {
            return bad("growth sequence must be nondecreasing".into());
        }
        if !(self.certification_threshold > 0.0 && self.certification_threshold < 1.0) {
            return bad("certification threshold must lie in (0, 1)".into());
        }
        if !(self.shrink_factor > 0.0 && self.shrink_factor < 1.0) {
            return bad("shrink factor must lie in (0, 1)".into());
        }
        Ok(())
    }

    /// The size bound 4^{-k γ_k} for step `k`.
    pub fn size_bound(&self, k: usize) -> f64 {
        4f64.powf(-(k as f64) * self.growth[k - 1])
    }
}

/// Harmonic-measure certification of a candidate domain.
pub trait Certifier {
    fn certify(&mut self, domain: &SlitDiskDomain, c0: f64, seed: u64) -> CertificationEvidence;
}

impl<F> Certifier for F
where
    F: FnMut(&SlitDiskDomain, f64, u64) -> CertificationEvidence,
{
    fn certify(&mut self, domain: &SlitDiskDomain, c0: f64, seed: u64) -> CertificationEvidence {
        self(domain, c0, seed)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditRecord {
    pub n: usize,
    pub a: f64,
    pub d: f64,
    pub halvings: u32,
    pub omega_lower: f64,
    pub accepted: bool,
}

#[derive(Clone, Debug)]
pub struct Construction {
    pub state: CantorState,
    pub log: Vec<AuditRecord>,
}

impl Construction {
    pub fn audit_jsonl(&self) -> String {
        audit_jsonl(&self.log)
    }
}

pub fn audit_jsonl(log: &[AuditRecord]) -> String {
    let mut out = String::new();
    for rec in log {
        out.push_str(&serde_json::to_string(rec).expect("audit record serializes"));
        out.push('\n');
    }
    out
}

/// Runs the interval-selection loop on `[-1, 1]`.
///
/// Step `k` deletes `(a_k, a_k + d_k)` where `a_k` is the midpoint of the
/// largest block; `d_k` starts at `min(4^{-kγ_k}·shrink, |host|/2)` and is
/// halved until the interval sits strictly inside its host block, the disc
/// of radius `2^k d_k` around `a_k` fits in the current domain, and the
/// certifier's lower bound on ω(·, S, D_k) over X exceeds `c_0`.
pub fn construct<C: Certifier + ?Sized>(
    params: &ConstructionParams,
    certifier: &mut C,
) -> Result<Construction> {
    params.validate()?;
    let mut state = CantorState::default();
    let mut domain = SlitDiskDomain::default();
    let mut log: Vec<AuditRecord> = Vec::new();

    for k in 1..=params.target_depth {
        let host = state.largest_block();
        let a = host.midpoint();
        let bound = params.size_bound(k);
        let mut d = (bound * params.shrink_factor).min(0.5 * host.length());
        let mut halvings = 0u32;
        let scale = 2f64.powi(k as i32);
        let mut last_lower = f64::NAN;

        loop {
            if !(d.is_normal() && (d * scale).is_normal()) {
                log.push(AuditRecord {
                    n: k,
                    a,
                    d,
                    halvings,
                    omega_lower: last_lower,
                    accepted: false,
                });
                return Err(Error::PrecisionExhausted {
                    step: k,
                    width: d,
                    log,
                });
            }
            let disc = Disc::new(Complex64::new(a, 0.0), d * scale);
            let fits = a + d < host.right() && d < bound && domain.admits(&disc);
            if fits {
                let candidate = domain.with_disc(disc);
                let seed = derive_seed(params.rng_seed, k as u64, halvings as u64);
                let evidence = certifier.certify(&candidate, params.certification_threshold, seed);
                last_lower = evidence.min_lower_bound;
                if evidence.accepted && evidence.min_lower_bound > params.certification_threshold {
                    log::debug!(
                        "step {k}: a = {a}, d = {d:e}, {halvings} halvings, omega >= {:.5}",
                        evidence.min_lower_bound
                    );
                    state.push(DeletedInterval::new(a, d)?)?;
                    domain = candidate;
                    log.push(AuditRecord {
                        n: k,
                        a,
                        d,
                        halvings,
                        omega_lower: evidence.min_lower_bound,
                        accepted: true,
                    });
                    break;
                }
            }
            if halvings >= params.max_halvings {
                log.push(AuditRecord {
                    n: k,
                    a,
                    d,
                    halvings,
                    omega_lower: last_lower,
                    accepted: false,
                });
                return Err(Error::ConstructionStall {
                    step: k,
                    halvings,
                    log,
                });
            }
            halvings += 1;
            d *= 0.5;
        }
    }
    Ok(Construction { state, log })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit() -> Interval {
        Interval::new(-1.0, 1.0).unwrap()
    }

    fn accept_all() -> impl FnMut(&SlitDiskDomain, f64, u64) -> CertificationEvidence {
        |_d: &SlitDiskDomain, _c0: f64, _s: u64| CertificationEvidence::fixed(0.5, true)
    }

    #[test]
    fn block_examples() {
        let s = CantorState::default();
        assert_eq!(s.blocks(0).unwrap(), vec![unit()]);

        let s = CantorState::from_intervals(unit(), &[(-0.5, 0.5)]).unwrap();
        let b = s.blocks(1).unwrap();
        assert_eq!(b, vec![Interval::new(-1.0, -0.5).unwrap(), Interval::new(0.5, 1.0).unwrap()]);

        let s = CantorState::from_intervals(unit(), &[(-0.5, 0.5), (0.7, 0.8)]).unwrap();
        let b: Vec<[f64; 2]> = s.blocks(2).unwrap().into_iter().map(Into::into).collect();
        assert_eq!(b, vec![[-1.0, -0.5], [0.5, 0.7], [0.8, 1.0]]);
        assert!(matches!(s.blocks(3), Err(Error::StageIndex { n: 3, depth: 2 })));
    }

    #[test]
    fn trapped_length_examples() {
        let s = CantorState::from_intervals(unit(), &[(-0.5, 0.5)]).unwrap();
        let w = Interval::new(-0.6, 0.6).unwrap();
        assert!((s.trapped_length(&w, 1).unwrap() - 0.2).abs() < 1e-15);
        let far = Interval::new(2.0, 3.0).unwrap();
        assert_eq!(s.trapped_length(&far, 1).unwrap(), 0.0);
        let gap = Interval::new(-0.4, 0.4).unwrap();
        assert_eq!(s.trapped_length(&gap, 1).unwrap(), 0.0);
    }

    /// Middle thirds of [-1, 1], level by level.
    fn middle_thirds(levels: usize) -> (CantorState, Vec<(f64, f64)>) {
        let mut segments = vec![(-1.0f64, 1.0f64)];
        let mut deleted = Vec::new();
        for _ in 0..levels {
            let mut next = Vec::new();
            for (l, r) in segments {
                let t = (r - l) / 3.0;
                deleted.push((l + t, r - t));
                next.push((l, l + t));
                next.push((r - t, r));
            }
            segments = next;
        }
        (CantorState::from_intervals(unit(), &deleted).unwrap(), segments)
    }

    #[test]
    fn middle_thirds_trapped_length() {
        let (state, segments) = middle_thirds(4);
        assert_eq!(state.depth(), 15);
        // Oracle: direct sum over the surviving segments of the recursion.
        let oracle: f64 = segments.iter().map(|(l, r)| r - l).sum();
        assert!((oracle - 2.0 * (2.0f64 / 3.0).powi(4)).abs() < 1e-14);
        let got = state.trapped_length(&unit(), 15).unwrap();
        assert!((got - oracle).abs() < 1e-14);
    }

    #[test]
    fn next_candidate_examples() {
        assert_eq!(CantorState::default().next_candidate(), 0.0);
        let s = CantorState::from_intervals(unit(), &[(-0.5, 0.5)]).unwrap();
        assert_eq!(s.next_candidate(), -0.75);
        let s = CantorState::from_intervals(unit(), &[(-0.2, 0.5)]).unwrap();
        assert!((s.next_candidate() + 0.6).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_states() {
        assert!(Interval::new(1.0, 1.0).is_err());
        assert!(CantorState::from_intervals(unit(), &[(-0.5, 0.5), (0.4, 0.6)]).is_err());
        assert!(CantorState::from_intervals(unit(), &[(-0.5, 0.5), (0.5, 0.6)]).is_err());
        assert!(CantorState::from_intervals(unit(), &[(-1.0, 0.5)]).is_err());
        let json = r#"{"outer":[-1,1],"deleted":[[-0.5,0.5],[0.2,0.7]]}"#;
        assert!(CantorState::from_json(json).is_err());
    }

    #[test]
    fn json_round_trip_keeps_subresolution_widths() {
        let mut s = CantorState::default();
        s.push(DeletedInterval::new(0.25, 1e-22).unwrap()).unwrap();
        let text = s.to_json();
        assert!(text.contains("\"widths\""));
        let back = CantorState::from_json(&text).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.deleted()[0].width, 1e-22);

        let plain = r#"{"outer":[-1.0,1.0],"deleted":[[-0.5,0.5]]}"#;
        let s = CantorState::from_json(plain).unwrap();
        assert_eq!(s.deleted()[0].width, 1.0);
    }

    #[test]
    fn construct_depth_zero() {
        let params = ConstructionParams::linear(0, 0.1, 1);
        let out = construct(&params, &mut accept_all()).unwrap();
        assert_eq!(out.state.depth(), 0);
        assert!(out.log.is_empty());
    }

    #[test]
    fn construct_first_step_obeys_size_rule() {
        let params = ConstructionParams::linear(1, 0.1, 1);
        let out = construct(&params, &mut accept_all()).unwrap();
        let first = out.state.deleted()[0];
        assert_eq!(first.left, 0.0);
        assert!(first.width < 0.25);
        assert_eq!(out.log[0].halvings, 0);
    }

    #[test]
    fn construct_invariants_with_permissive_certifier() {
        let mut params = ConstructionParams::linear(8, 0.1, 7);
        params.growth = (1..=8).map(|n| 2.0 * n as f64).collect();
        let out = construct(&params, &mut accept_all()).unwrap();
        let state = &out.state;
        for (k, d) in state.deleted().iter().enumerate() {
            assert!(d.width < params.size_bound(k + 1));
        }
        let discs = state.excluded_discs(state.depth()).unwrap();
        for i in 0..discs.len() {
            for j in 0..i {
                assert!(discs[i].disjoint_from(&discs[j]));
            }
        }
        for n in 0..=state.depth() {
            let blocks = state.blocks(n).unwrap();
            assert_eq!(blocks.len(), n + 1);
            let total: f64 = blocks.iter().map(Interval::length).sum::<f64>()
                + state.deleted()[..n].iter().map(|d| d.width).sum::<f64>();
            assert!((total - 2.0).abs() <= 2e-12);
        }
    }

    #[test]
    fn stall_and_precision_errors() {
        let params = ConstructionParams::linear(2, 0.1, 1);
        let mut reject = |_d: &SlitDiskDomain, _c0: f64, _s: u64| CertificationEvidence::fixed(0.0, false);
        match construct(&params, &mut reject) {
            Err(Error::ConstructionStall { step, halvings, log }) => {
                assert_eq!(step, 1);
                assert_eq!(halvings, 60);
                assert_eq!(log.len(), 1);
                assert!(!log[0].accepted);
            }
            other => panic!("expected stall, got {other:?}"),
        }

        let mut params = ConstructionParams::linear(1, 0.1, 1);
        params.growth = vec![600.0];
        assert!(matches!(
            construct(&params, &mut accept_all()),
            Err(Error::PrecisionExhausted { step: 1, .. })
        ));
    }

    #[test]
    fn swallowed_candidate_stalls() {
        // d_1 = 1/8 gives a radius-1/4 disc at 0 that covers a_5 = -0.249...
        let params = ConstructionParams::linear(5, 0.1, 7);
        match construct(&params, &mut accept_all()) {
            Err(Error::ConstructionStall { step: 5, log, .. }) => {
                assert!(log[..4].iter().all(|r| r.accepted));
                assert!(log[4].omega_lower.is_nan());
            }
            other => panic!("expected stall at step 5, got {other:?}"),
        }
    }

    #[test]
    fn halving_until_certifier_accepts() {
        let params = ConstructionParams::linear(1, 0.1, 3);
        let mut cert = |d: &SlitDiskDomain, _c0: f64, _s: u64| {
            let r = d.deleted_discs.last().unwrap().radius;
            CertificationEvidence::fixed(0.2, r < 1e-3)
        };
        let out = construct(&params, &mut cert).unwrap();
        let rec = &out.log[0];
        assert!(rec.accepted);
        assert!(2.0 * rec.d < 1e-3 && 4.0 * rec.d >= 1e-3);
        assert_eq!(rec.d, 0.125 / 2f64.powi(rec.halvings as i32));
    }

    proptest! {
        #[test]
        fn blocks_partition_outer(cuts in proptest::collection::vec((0.0f64..1.0, 1e-6f64..0.05), 0..12)) {
            let mut state = CantorState::default();
            for (pos, w) in cuts {
                let a = -0.95 + 1.8 * pos;
                let _ = state.push(DeletedInterval::new(a, w).unwrap());
            }
            let window = Interval::new(-0.3, 0.41).unwrap();
            let mut prev = f64::INFINITY;
            for n in 0..=state.depth() {
                let blocks = state.blocks(n).unwrap();
                prop_assert_eq!(blocks.len(), n + 1);
                for w in blocks.windows(2) {
                    prop_assert!(w[0].right() < w[1].left());
                }
                let total: f64 = blocks.iter().map(Interval::length).sum::<f64>()
                    + state.deleted()[..n].iter().map(|d| d.width).sum::<f64>();
                prop_assert!((total - 2.0).abs() < 1e-12);
                let t = state.trapped_length(&window, n).unwrap();
                prop_assert!(t <= prev + 1e-15);
                prev = t;
            }
        }
    }
}
