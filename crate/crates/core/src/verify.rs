//! The acceptance suite: thirteen criteria evaluated against a Cantor state.
//! Each criterion is a list of named checks; it passes when all of them do.
//! Tolerances are multiplied by [`VerifyConfig::tolerance_scale`], so a scale
//! of 0 forces every tolerance-bearing check to fail.

use std::f64::consts::TAU;
use std::fmt;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cantor::{construct, CantorState, Construction, ConstructionParams, Interval};
use crate::domain::{Disc, SlitDiskDomain};
use crate::error::Result;
use crate::grid::grid_solve;
use crate::harmonic::{
    certify_with, default_c0_from_field, CERTIFY_SIGMAS, default_eps, wos_estimate, ThresholdReport, WosCertifier,
    DEFAULT_PROBE_SAMPLES,
};
use crate::hull::{
    eval_sheet, mechanism_reports, morera_check, shipped_points, shipped_test_functions,
    two_constant_with_omega, BoundarySampling,
};
use crate::monodromy::{
    circle_path, continue_along_path, continue_family, loop_around, EndpointSheets,
    SquareRootFamily, SqrtFixture,
};
use crate::product::{eval_f, eval_g, g_difference, residue_at_infinity, tail_bound, BranchedEvaluation};
use crate::rng::derive_seed;
use crate::witness::{
    eval_witness, eval_witness_on_graph, off_graph_floor, pullback_square, ReferenceDisc,
    WitnessFunction, NEG_INF_SENTINEL,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Walks per harmonic-measure estimate.
    pub walks: u64,
    pub tolerance_scale: f64,
    pub grid_resolution: usize,
    /// Criteria to run; all when `None`.
    pub criteria: Option<Vec<u8>>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: 42,
            walks: 100_000,
            tolerance_scale: 1.0,
            grid_resolution: 512,
            criteria: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub seconds: f64,
}

impl CriterionResult {
    pub fn failed_checks(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "criterion {:>2} {} {} ({:.2} s)",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.seconds
        )?;
        for c in &self.checks {
            write!(
                f,
                "\n    [{}] {}: {}",
                if c.passed { "ok" } else { "!!" },
                c.name,
                c.detail
            )?;
        }
        Ok(())
    }
}

pub const NAMES: [&str; 13] = [
    "branch identity",
    "normalization at infinity",
    "per-factor domain bound",
    "tail bound",
    "convergence rate",
    "extension criterion",
    "harmonic-measure estimator",
    "certified construction",
    "monodromy",
    "sheet gluing",
    "two-constant mechanism",
    "witness separation",
    "determinism",
];

/// Wall-clock budgets in seconds, where the criterion states one.
pub fn budget(id: u8) -> Option<f64> {
    match id {
        1 | 3 | 9 => Some(1.0),
        7 => Some(30.0),
        8 => Some(300.0),
        _ => None,
    }
}

struct Checks(Vec<Check>);

impl Checks {
    fn new() -> Self {
        Checks(Vec::new())
    }

    fn push(&mut self, name: &str, passed: bool, detail: String) {
        self.0.push(Check {
            name: name.to_string(),
            passed,
            detail,
        });
    }

    fn error(&mut self, name: &str, e: crate::Error) {
        self.push(name, false, format!("error: {e}"));
    }
}

/// Runs the suite, caching the threshold, the construction and the lenient
/// oracle domains between criteria.
pub struct Verifier<'a> {
    state: &'a CantorState,
    config: VerifyConfig,
    threshold: Option<ThresholdReport>,
    construction: Option<std::result::Result<Construction, String>>,
}

impl<'a> Verifier<'a> {
    pub fn new(state: &'a CantorState, config: VerifyConfig) -> Self {
        Verifier {
            state,
            config,
            threshold: None,
            construction: None,
        }
    }

    fn tol(&self, t: f64) -> f64 {
        t * self.config.tolerance_scale
    }

    fn rng(&self, id: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(derive_seed(self.config.seed, 0xC0FFEE, id))
    }

    fn threshold(&mut self) -> Result<ThresholdReport> {
        if self.threshold.is_none() {
            let domain = SlitDiskDomain::unit_disk();
            let field = grid_solve(&domain, self.config.grid_resolution)?;
            let seed = derive_seed(self.config.seed, 0xC0, 0);
            self.threshold = Some(default_c0_from_field(&domain, &field, self.config.walks, seed)?);
        }
        Ok(self.threshold.clone().expect("threshold was just computed"))
    }

    fn construction(&mut self) -> std::result::Result<Construction, String> {
        if self.construction.is_none() {
            let run = self.threshold().map_err(|e| e.to_string()).and_then(|t| {
                let params = ConstructionParams::linear(self.state.depth(), t.c0, self.config.seed);
                construct(&params, &mut WosCertifier::default()).map_err(|e| e.to_string())
            });
            self.construction = Some(run);
        }
        self.construction.clone().expect("construction was just run")
    }

    pub fn selected(&self) -> Vec<u8> {
        match &self.config.criteria {
            Some(ids) => ids.iter().copied().filter(|i| (1..=13).contains(i)).collect(),
            None => (1..=13).collect(),
        }
    }

    pub fn run(&mut self, id: u8) -> CriterionResult {
        let start = Instant::now();
        let mut checks = match id {
            1 => self.branch_identity(),
            2 => self.normalization(),
            3 => self.per_factor(),
            4 => self.tail(),
            5 => self.rate(),
            6 => self.extension(),
            7 => self.harmonic(),
            8 => self.certified(),
            9 => self.monodromy(),
            10 => self.gluing(),
            11 => self.two_constant(),
            12 => self.witness(),
            13 => self.determinism(),
            _ => {
                let mut c = Checks::new();
                c.push("known criterion", false, format!("no criterion {id}"));
                c
            }
        };
        let seconds = start.elapsed().as_secs_f64();
        if let Some(b) = budget(id) {
            checks.push("runtime", seconds < b, format!("{seconds:.2} s against {b} s"));
        }
        CriterionResult {
            id,
            name: NAMES.get(id as usize - 1).unwrap_or(&"unknown").to_string(),
            passed: checks.0.iter().all(|c| c.passed),
            checks: checks.0,
            seconds,
        }
    }

    pub fn run_selected(&mut self) -> Vec<CriterionResult> {
        self.selected().into_iter().map(|id| self.run(id)).collect()
    }

    fn branch_identity(&mut self) -> Checks {
        let mut c = Checks::new();
        let mut rng = self.rng(1);
        let (mut worst, mut count) = (0.0f64, 0usize);
        for n in 0..=self.state.depth() {
            let mut k = 0;
            while k < 1000 {
                let z = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
                if self.state.distance_to_blocks(n, z).unwrap_or(0.0) < 1e-6 {
                    continue;
                }
                k += 1;
                match (eval_g(self.state, n, z), eval_f(self.state, n, z)) {
                    (Ok(g), Ok(f)) => worst = worst.max((f.value * f.value - g).norm() / g.norm()),
                    _ => worst = f64::INFINITY,
                }
                count += 1;
            }
        }
        c.push(
            "|f_n^2 - g_n|/|g_n| < 1e-10",
            worst < self.tol(1e-10),
            format!("max {worst:.3e} over {count} points, all stages"),
        );
        c
    }

    fn normalization(&mut self) -> Checks {
        let mut c = Checks::new();
        let z = Complex64::new(1e6, 0.0);
        let worst = (0..=self.state.depth())
            .map(|n| eval_f(self.state, n, z).map_or(f64::INFINITY, |f| (f.value - 1.0).norm()))
            .fold(0.0, f64::max);
        c.push(
            "|f_n(1e6) - 1| < 1e-5",
            worst < self.tol(1e-5),
            format!("max {worst:.3e}"),
        );
        c
    }

    fn per_factor(&mut self) -> Checks {
        let mut c = Checks::new();
        let mut rng = self.rng(3);
        let deleted = self.state.deleted();
        let (mut worst, mut points) = (0.0f64, 0usize);
        for n in 1..=self.state.depth() {
            let discs = match self.state.excluded_discs(n) {
                Ok(d) => d,
                Err(e) => {
                    c.error("excluded discs", e);
                    return c;
                }
            };
            let mut k = 0;
            while k < 1000 {
                // half uniform in the disk, half in shells around the discs
                let z = if k % 2 == 0 {
                    Complex64::from_polar(rng.gen::<f64>().sqrt(), rng.gen_range(0.0..TAU))
                } else {
                    let d = &discs[rng.gen_range(0..discs.len())];
                    d.center + Complex64::from_polar(d.radius * (1.0 + rng.gen::<f64>()), rng.gen_range(0.0..TAU))
                };
                if z.norm() >= 1.0 || discs.iter().any(|d| d.contains(z)) {
                    continue;
                }
                k += 1;
                points += 1;
                for (j, d) in deleted[..n].iter().enumerate() {
                    let dev = (-d.width / (z - d.left)).norm();
                    worst = worst.max(dev * 2f64.powi(j as i32 + 1));
                }
            }
        }
        c.push(
            "2^j |(z-b_j)/(z-a_j) - 1| < 1",
            worst < self.tol(1.0),
            format!("max normalized deviation {worst:.4} over {points} points of D_1..D_N"),
        );
        c
    }

    fn circle(samples: usize) -> Vec<Complex64> {
        (0..samples)
            .map(|k| Complex64::from_polar(2.0, TAU * k as f64 / samples as f64))
            .collect()
    }

    /// `(sup |g_N - g_n|, sup |g_n|, sup |g_N|)` on `|z| = 2`.
    fn circle_sups(&self, n: usize) -> Result<(f64, f64, f64)> {
        let big = self.state.depth();
        let (mut diff, mut gn, mut gbig) = (0.0f64, 0.0f64, 0.0f64);
        for z in Self::circle(1024) {
            diff = diff.max(g_difference(self.state, n, big, z)?.norm());
            gn = gn.max(eval_g(self.state, n, z)?.norm());
            gbig = gbig.max(eval_g(self.state, big, z)?.norm());
        }
        Ok((diff, gn, gbig))
    }

    fn circle_delta(&self) -> f64 {
        let o = self.state.outer();
        2.0 - o.left().abs().max(o.right().abs())
    }

    fn tail(&mut self) -> Checks {
        let mut c = Checks::new();
        let big = self.state.depth();
        let delta = self.circle_delta();
        for n in 0..big {
            match self.circle_sups(n) {
                Ok((diff, gn, _)) => {
                    let tb = tail_bound(self.state, n, big, delta, gn);
                    let limit = tb.bound * (1.0 + 1e-9) * self.config.tolerance_scale;
                    c.push(
                        &format!("n = {n}"),
                        diff <= limit,
                        format!("sup|g_N - g_n| = {diff:.3e} <= {:.3e}", tb.bound),
                    );
                }
                Err(e) => c.error(&format!("n = {n}"), e),
            }
        }
        c
    }

    fn rate(&mut self) -> Checks {
        let mut c = Checks::new();
        let big = self.state.depth();
        let delta = self.circle_delta();
        for n in 2..big.min(6) {
            match self.circle_sups(n) {
                Ok((diff, _, c_l)) => {
                    let measured = diff.powf(1.0 / n as f64);
                    let bound = 2.0 * (c_l / delta).powf(1.0 / n as f64) * 4f64.powi(-(n as i32));
                    c.push(
                        &format!("n = {n}"),
                        measured < bound * self.config.tolerance_scale,
                        format!("||g_N - g_n||^(1/n) = {measured:.3e} < {bound:.3e}"),
                    );
                }
                Err(e) => c.error(&format!("n = {n}"), e),
            }
        }
        if c.0.is_empty() {
            c.push("stages 2..N-1", false, "state too shallow for the rate check".into());
        }
        c
    }

    /// Window endpoints strictly inside deleted intervals, plus `±2`.
    fn window_endpoints(&self) -> Vec<f64> {
        let mut e = vec![-2.0, 2.0];
        for d in self.state.deleted() {
            let mid = d.left + 0.5 * d.width;
            if d.left < mid && mid < d.right() {
                e.push(mid);
            }
        }
        e.sort_by(f64::total_cmp);
        e
    }

    fn extension(&mut self) -> Checks {
        let mut c = Checks::new();
        let n = self.state.depth();
        let e = self.window_endpoints();
        let last = e.len() - 1;
        let mut windows = vec![(e[0], e[last])];
        for k in 1..last {
            windows.push((e[0], e[k]));
            windows.push((e[k], e[last]));
            if k + 1 < last {
                windows.push((e[k], e[k + 1]));
            }
        }
        windows.dedup();
        for (lo, hi) in windows.into_iter().take(5) {
            let name = format!("window [{lo:.6}, {hi:.6}]");
            let w = Interval::new(lo, hi).expect("sorted distinct endpoints");
            let reach = lo.abs().max(hi.abs());
            match (
                residue_at_infinity(self.state, n, &w, reach + 1.0, 256),
                self.state.trapped_length(&w, n),
            ) {
                (Ok(r), Ok(l)) => c.push(
                    &name,
                    (r - l).abs() <= self.tol(1e-8),
                    format!("residue {r:.12} vs trapped length {l:.12}"),
                ),
                (Err(e), _) | (_, Err(e)) => c.error(&name, e),
            }
        }
        let tiny = sparse_state(7, 1e-3);
        let l = tiny.trapped_length(&tiny.outer(), tiny.depth()).unwrap_or(f64::NAN);
        let sup = Self::circle(1024)
            .into_iter()
            .map(|z| eval_g(&tiny, tiny.depth(), z).map_or(f64::INFINITY, |g| (g - 1.0).norm()))
            .fold(0.0, f64::max);
        let bound = l.exp_m1();
        c.push(
            "tiny-block state: sup |g - 1| <= e^l - 1",
            sup <= bound * self.config.tolerance_scale,
            format!("{sup:.4e} <= {bound:.4e} (l = {l:.1e})"),
        );
        c
    }

    fn harmonic(&mut self) -> Checks {
        let mut c = Checks::new();
        let walks = self.config.walks;
        for (k, r) in [0.1, 0.25].into_iter().enumerate() {
            let dom = match SlitDiskDomain::new(vec![], Disc::new(Complex64::new(0.0, 0.0), r), crate::domain::default_probe()) {
                Ok(d) => d,
                Err(e) => {
                    c.error("annulus", e);
                    continue;
                }
            };
            for (j, m) in [0.4, 0.7].into_iter().enumerate() {
                let z = Complex64::from_polar(m, 0.3);
                let exact = (1.0 / m).ln() / (1.0 / r).ln();
                let name = format!("annulus r = {r}, |z| = {m}");
                match wos_estimate(&dom, z, walks, default_eps(&dom), derive_seed(self.config.seed, 7, (2 * k + j) as u64)) {
                    Ok(est) => {
                        let err = (est.value - exact).abs();
                        c.push(
                            &name,
                            err <= self.tol(3.0 * est.std_error) && err <= self.tol(0.005),
                            format!("{:.5} vs {exact:.5} (3σ = {:.5})", est.value, 3.0 * est.std_error),
                        );
                    }
                    Err(e) => c.error(&name, e),
                }
            }
        }
        let domains = match self.oracle_domains() {
            Ok(d) => d,
            Err(e) => {
                c.error("oracle domains", e);
                return c;
            }
        };
        let mut rng = self.rng(7);
        for (label, dom) in &domains {
            let field = match grid_solve(dom, self.config.grid_resolution) {
                Ok(f) => f,
                Err(e) => {
                    c.error(label, e);
                    continue;
                }
            };
            let (mut worst, mut fails) = (0.0f64, 0usize);
            for p in interior_points(dom, 20, 0.02, &mut rng) {
                let seed = rng.gen();
                match wos_estimate(dom, p, walks, default_eps(dom), seed) {
                    Ok(est) => {
                        let gap = (est.value - field.value_at(p)).abs();
                        let tol = self.tol(0.01f64.max(3.0 * est.std_error));
                        worst = worst.max(gap);
                        if gap > tol {
                            fails += 1;
                        }
                    }
                    Err(_) => fails += 1,
                }
            }
            c.push(
                &format!("oracle agreement on {label}"),
                fails == 0,
                format!("20 points, max |wos - grid| = {worst:.4}, {fails} outside max(0.01, 3σ)"),
            );
        }
        c
    }

    /// `D_0` and the first two domains of a construction run at half the
    /// default threshold, whose discs are large enough for the grid.
    pub fn oracle_domains(&mut self) -> Result<Vec<(String, SlitDiskDomain)>> {
        let t = self.threshold()?;
        let lenient = lenient_construction(t.c0, self.config.seed)?;
        let mut out = vec![("D_0".to_string(), SlitDiskDomain::unit_disk())];
        for n in 1..=2 {
            out.push((format!("lenient D_{n}"), lenient.state.slit_domain(n)?));
        }
        Ok(out)
    }

    fn certified(&mut self) -> Checks {
        let mut c = Checks::new();
        let t = match self.threshold() {
            Ok(t) => t,
            Err(e) => {
                c.error("default c0", e);
                return c;
            }
        };
        c.push(
            "default c0 oracle cross-check",
            t.oracle_agrees,
            format!(
                "c0 = {:.6}, grid min {:.6} vs walks {:.6}",
                t.c0, t.grid_min, t.wos_check.value
            ),
        );
        match self.construction() {
            Ok(run) => {
                let all = run.log.len() == self.state.depth()
                    && run.log.iter().all(|r| r.accepted && r.omega_lower > t.c0);
                let lows: Vec<String> = run.log.iter().map(|r| format!("{:.5}", r.omega_lower)).collect();
                c.push(
                    "every step accepted above c0",
                    all,
                    format!("seed {}, lower bounds [{}]", self.config.seed, lows.join(", ")),
                );
                let dom = run.state.slit_domain(run.state.depth());
                let seed = derive_seed(self.config.seed, 8, 1);
                match dom.and_then(|d| {
                    certify_with(&d, t.c0, WosCertifier::default().walks, DEFAULT_PROBE_SAMPLES, seed, false)
                }) {
                    Ok(ev) => c.push(
                        "re-certification of D_N",
                        ev.accepted,
                        format!("min lower bound {:.5} over {} points", ev.min_lower_bound, ev.evaluated),
                    ),
                    Err(e) => c.error("re-certification of D_N", e),
                }
            }
            Err(e) => c.push("construction", false, e),
        }
        c
    }

    fn monodromy(&mut self) -> Checks {
        let mut c = Checks::new();
        let s = self.state;
        let outer = s.outer();
        let (mut flips, mut kept, mut skipped, mut worst) = (0usize, 0usize, 0usize, 0.0f64);
        let (mut endpoint_flips, mut endpoint_total) = (0usize, 0usize);
        let mut all_ok = true;
        for n in 0..=s.depth() {
            let blocks = s.blocks(n).expect("stage within depth");
            let gap = |lo: f64, hi: f64| {
                let mid = lo + 0.5 * (hi - lo);
                (hi - lo >= 1e-12 && lo < mid && mid < hi).then_some(mid)
            };
            for (j, b) in blocks.iter().enumerate() {
                let left = if j == 0 { Some(outer.left() - 0.5) } else { gap(blocks[j - 1].right(), b.left()) };
                let right = if j + 1 == blocks.len() { Some(outer.right() + 0.5) } else { gap(b.right(), blocks[j + 1].left()) };
                let (Some(l), Some(r)) = (left, right) else {
                    skipped += 1;
                    continue;
                };
                let path = loop_around(l, r, 0.25);
                let start = eval_f(s, n, path[0]).expect("loop starts off the blocks");
                match continue_along_path(s, n, &path, start) {
                    Ok(out) if out.sheet_parity == -1 => {
                        flips += 1;
                        worst = worst.max((out.value + start.value).norm());
                    }
                    Ok(_) => kept += 1,
                    Err(_) => all_ok = false,
                }
                // the same block's left endpoint alone, crossing the block
                let fam = EndpointSheets::new(s, n).expect("stage within depth");
                let radius = 0.5 * (b.left() - l).abs().min(0.5 * b.length());
                let path = circle_path(Complex64::new(b.left(), 0.0), radius, 32);
                if let Ok(root) = fam.root(path[0]) {
                    endpoint_total += 1;
                    let start = BranchedEvaluation { value: root, sheet_parity: 1 };
                    if let Ok(out) = continue_family(&fam, &path, start, &Default::default()) {
                        if out.sheet_parity == -1 {
                            endpoint_flips += 1;
                        }
                    }
                }
            }
        }
        c.push(
            "single-block loops flip parity",
            all_ok && kept == 0 && flips > 0 && worst < self.tol(1e-8),
            format!(
                "{flips} flipped, {kept} kept parity +1, {skipped} blocks with unresolvable gaps skipped; \
                 f_n is holomorphic off the blocks, so a loop enclosing both endpoints of one block returns to the principal sheet"
            ),
        );
        c.push(
            "loops around one branch point flip parity (supplementary)",
            endpoint_flips == endpoint_total && endpoint_total > 0,
            format!("{endpoint_flips}/{endpoint_total} single-endpoint loops flipped"),
        );
        let mut big_ok = true;
        let mut big_err = 0.0f64;
        for n in 0..=s.depth() {
            let path = circle_path(Complex64::new(0.0, 0.0), 2.0, 64);
            let start = eval_f(s, n, path[0]).expect("circle avoids the blocks");
            match continue_along_path(s, n, &path, start) {
                Ok(out) => {
                    big_ok &= out.sheet_parity == 1;
                    big_err = big_err.max((out.value - start.value).norm());
                }
                Err(_) => big_ok = false,
            }
        }
        c.push(
            "all-blocks loops keep parity",
            big_ok && big_err < self.tol(1e-8),
            format!("all stages, max |w_end - f_n| = {big_err:.2e}"),
        );
        let path = circle_path(Complex64::new(0.0, 0.0), 1.0, 32);
        let r0 = SqrtFixture.root(path[0]).expect("off the origin");
        let out = continue_family(&SqrtFixture, &path, BranchedEvaluation { value: r0, sheet_parity: 1 }, &Default::default());
        match out {
            Ok(out) => {
                let err = (out.value + r0).norm();
                c.push(
                    "sqrt(z) loop flips parity",
                    out.sheet_parity == -1 && err < self.tol(1e-8),
                    format!("parity {}, |w_end + w_start| = {err:.2e}", out.sheet_parity),
                );
            }
            Err(e) => c.error("sqrt(z) loop flips parity", e),
        }
        c
    }

    fn gluing(&mut self) -> Checks {
        let mut c = Checks::new();
        let s = self.state;
        let (mut worst, mut contours, mut worst_jump) = (0.0f64, 0usize, 0.0f64);
        let mut errors = Vec::new();
        for n in 0..=s.depth() {
            for b in s.blocks(n).expect("stage within depth") {
                let x = b.midpoint();
                for r in [1e-3, 1e-2] {
                    if b.length() <= 4.0 * r {
                        continue;
                    }
                    match morera_check(s, n, Complex64::new(x, 0.0), r, 1024) {
                        Ok(v) => {
                            worst = worst.max(v);
                            contours += 1;
                        }
                        Err(e) => errors.push(e.to_string()),
                    }
                }
                let up = eval_sheet(s, n, Complex64::new(x, 1e-8));
                let down = eval_sheet(s, n, Complex64::new(x, -1e-8));
                match (up, down) {
                    (Ok(u), Ok(d)) => worst_jump = worst_jump.max((u - d).norm()),
                    _ => worst_jump = f64::INFINITY,
                }
            }
        }
        c.push(
            "Morera residual < 1e-8",
            errors.is_empty() && contours > 0 && worst < self.tol(1e-8),
            format!("{contours} block-crossing contours, max {worst:.2e}{}", if errors.is_empty() { String::new() } else { format!("; errors: {}", errors.join("; ")) }),
        );
        c.push(
            "two-sided continuity < 1e-6",
            worst_jump < self.tol(1e-6),
            format!("max jump {worst_jump:.2e} at block midpoints"),
        );
        c
    }

    fn two_constant(&mut self) -> Checks {
        let mut c = Checks::new();
        let s = self.state;
        let walks = self.config.walks;
        let sampling = BoundarySampling::default();
        let (mut checked, mut violations) = (0usize, Vec::new());
        for n in 0..=s.depth().min(4) {
            let dom = s.slit_domain(n).expect("stage within depth");
            let fns = shipped_test_functions(s, n);
            for (k, z0) in shipped_points().into_iter().enumerate() {
                let seed = derive_seed(self.config.seed, 11, (n * 8 + k) as u64);
                let omega = match wos_estimate(&dom, z0, walks, default_eps(&dom), seed) {
                    Ok(o) => o,
                    Err(e) => {
                        violations.push(format!("n={n} z0={z0}: {e}"));
                        continue;
                    }
                };
                for (name, f) in &fns {
                    checked += 1;
                    match two_constant_with_omega(&dom, n, f, z0, omega, &sampling) {
                        Ok(r) if r.holds && self.config.tolerance_scale > 0.0 => {}
                        Ok(r) => violations.push(format!("{name} n={n} z0={z0}: {:.4} > {:.4}", r.value, r.bound + r.slack)),
                        Err(e) => violations.push(format!("{name} n={n} z0={z0}: {e}")),
                    }
                }
            }
        }
        c.push(
            "shipped test functions",
            violations.is_empty(),
            format!("{checked} checks, {} violations{}", violations.len(),
                violations.first().map(|v| format!(" (first: {v})")).unwrap_or_default()),
        );
        let z0 = Complex64::new(0.0, 0.75);
        let big = s.depth();
        let seed = derive_seed(self.config.seed, 11, 999);
        match mechanism_reports(s, 2..=big, z0, walks, seed) {
            Ok(reports) if !reports.is_empty() => {
                let bounds: Vec<f64> = reports.iter().map(|(_, r)| r.bound).collect();
                let decreasing = bounds.windows(2).all(|w| w[1] < w[0]);
                let holds = reports.iter().all(|(_, r)| r.holds);
                let shown: Vec<String> = bounds
                    .iter()
                    .map(|b| if *b <= NEG_INF_SENTINEL { "-inf".into() } else { format!("{b:.3}") })
                    .collect();
                let offsets: Vec<String> = reports.iter().map(|(h, _)| format!("{:.2e}", h.offset.norm())).collect();
                c.push(
                    "mechanism bound decreasing over n = 2..N",
                    decreasing && holds,
                    format!("bounds [{}], |kappa_n| [{}]", shown.join(", "), offsets.join(", ")),
                );
            }
            Ok(_) => c.push("mechanism bound decreasing over n = 2..N", false, "state too shallow".into()),
            Err(e) => c.error("mechanism bound decreasing over n = 2..N", e),
        }
        c
    }

    fn witness(&mut self) -> Checks {
        let mut c = Checks::new();
        let s = self.state;
        let big = s.depth();
        let wf = match WitnessFunction::build(s, ReferenceDisc::default(), big, 4096) {
            Ok(w) => w,
            Err(e) => {
                c.error("build witness", e);
                return c;
            }
        };
        let total = wf.total_depth();
        let mut rng = self.rng(12);
        let disc = wf.disc;
        let mut on_max = f64::NEG_INFINITY;
        let mut off_min = f64::INFINITY;
        let mut floor_gap = f64::INFINITY;
        let mut even = true;
        for _ in 0..200 {
            let z = disc.center + Complex64::from_polar(0.95 * disc.radius * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..TAU));
            let on = eval_witness_on_graph(&wf, s, z).unwrap_or(f64::INFINITY);
            on_max = on_max.max(on);
            let g = eval_g(s, big, z).expect("B avoids the blocks");
            let w = g + Complex64::from_polar(rng.gen_range(0.5..2.0), rng.gen_range(0.0..TAU));
            let off = eval_witness(&wf, z, w);
            off_min = off_min.min(off);
            floor_gap = floor_gap.min(off - off_graph_floor(&wf, z, w));
            let f = eval_f(s, big, z).expect("B avoids the blocks").value;
            even &= pullback_square(&wf, z, f).to_bits() == pullback_square(&wf, z, -f).to_bits();
        }
        c.push(
            "on-graph values <= -sum sigma delta + 1e-9",
            on_max <= -total + self.tol(1e-9),
            format!("max {on_max:.6} vs -{total:.6}"),
        );
        c.push(
            "off-graph floor respected",
            floor_gap >= -self.tol(1e-9),
            format!("min (v - floor) = {floor_gap:.3e}"),
        );
        let margin = off_min - on_max;
        c.push(
            "separation margin >= 1",
            margin >= 1.0,
            format!("{margin:.4} (depths [{}])", wf.depths.iter().map(|d| format!("{d:.2}")).collect::<Vec<_>>().join(", ")),
        );
        c.push("pullback bit-identical on both sheets", even, "200 points of B".into());
        c
    }

    fn determinism(&mut self) -> Checks {
        let mut c = Checks::new();
        match self.construction() {
            Ok(run) => {
                let same = run.state.to_json() == self.state.to_json();
                c.push(
                    "construction reproduces the state byte-for-byte",
                    same,
                    format!("depth {}, seed {}", self.state.depth(), self.config.seed),
                );
            }
            Err(e) => c.push("construction reproduces the state byte-for-byte", false, e),
        }
        let dom = SlitDiskDomain::unit_disk();
        let z = Complex64::new(0.1, 0.3);
        let a = wos_estimate(&dom, z, 20_000, 1e-6, self.config.seed);
        let b = wos_estimate(&dom, z, 20_000, 1e-6, self.config.seed);
        c.push(
            "walk-on-spheres estimates repeat exactly",
            matches!((&a, &b), (Ok(x), Ok(y)) if x.value.to_bits() == y.value.to_bits()),
            format!("{:?}", a.map(|x| x.value)),
        );
        let w1 = WitnessFunction::build(self.state, ReferenceDisc::default(), self.state.depth(), 512)
            .map(|w| serde_json::to_string(&w).unwrap_or_default());
        let w2 = WitnessFunction::build(self.state, ReferenceDisc::default(), self.state.depth(), 512)
            .map(|w| serde_json::to_string(&w).unwrap_or_default());
        c.push(
            "witness serialization repeats exactly",
            matches!((&w1, &w2), (Ok(x), Ok(y)) if x == y),
            "two builds compared".into(),
        );
        c
    }
}

/// Runs the selected criteria in order.
pub fn run_suite(state: &CantorState, config: VerifyConfig) -> Vec<CriterionResult> {
    Verifier::new(state, config).run_selected()
}

/// `count` blocks of length `len` spread over `[-1, 1]`, obtained by deleting
/// the gaps left to right.
pub fn sparse_state(count: usize, len: f64) -> CantorState {
    let outer = Interval::new(-1.0, 1.0).expect("unit interval");
    let step = (2.0 - len) / (count - 1) as f64;
    let gaps: Vec<(f64, f64)> = (0..count - 1)
        .map(|j| (-1.0 + j as f64 * step + len, -1.0 + (j + 1) as f64 * step))
        .collect();
    CantorState::from_intervals(outer, &gaps).expect("gaps are disjoint and inside")
}

/// Depth-2 construction at half the default threshold with 2·10⁴ walks and
/// the bare 3σ margin.
pub fn lenient_construction(c0: f64, seed: u64) -> Result<Construction> {
    let params = ConstructionParams::linear(2, 0.5 * c0, seed);
    let mut cert = WosCertifier {
        walks: 20_000,
        sigmas: CERTIFY_SIGMAS,
        ..WosCertifier::default()
    };
    construct(&params, &mut cert)
}

/// `count` points of the domain at distance at least `clearance` from its
/// boundary.
pub fn interior_points(dom: &SlitDiskDomain, count: usize, clearance: f64, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let z = Complex64::from_polar(rng.gen::<f64>().sqrt(), rng.gen_range(0.0..TAU));
        let far = 1.0 - z.norm() >= clearance
            && dom.target.signed_distance(z) >= clearance
            && dom.deleted_discs.iter().all(|d| d.signed_distance(z) >= clearance);
        if far {
            out.push(z);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sparse_state_has_tiny_blocks() {
        let s = sparse_state(7, 1e-3);
        let blocks = s.blocks(6).unwrap();
        assert_eq!(blocks.len(), 7);
        for b in &blocks {
            assert!((b.length() - 1e-3).abs() < 1e-12);
        }
    }

    #[test]
    fn cheap_criteria_pass_on_small_state() {
        let s = CantorState::from_intervals(
            Interval::new(-1.0, 1.0).unwrap(),
            &[(0.0, 1e-3), (-0.5, -0.5 + 1e-7), (0.5, 0.5 + 1e-12)],
        )
        .unwrap();
        let mut v = Verifier::new(&s, VerifyConfig::default());
        for id in [1, 2, 3, 4, 6, 10] {
            let r = v.run(id);
            assert!(r.passed, "{r}");
        }
        let zero = VerifyConfig {
            tolerance_scale: 0.0,
            ..VerifyConfig::default()
        };
        let mut v = Verifier::new(&s, zero);
        for id in [1, 2, 4, 6] {
            assert!(!v.run(id).passed);
        }
    }
}
