//! Harmonic measure of the target disc `S` in slit-disk domains.
//!
//! [`wos_estimate`] is a walk-on-spheres Monte-Carlo estimator of
//! ω(z, S, D); [`crate::grid::grid_solve`] solves the same Dirichlet problem
//! by finite differences and serves as its oracle. [`certify`] turns a batch
//! of estimates on the probe lattice of `X` into a 3σ acceptance decision.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cantor::Certifier;
use crate::domain::{Disc, SlitDiskDomain};
use crate::error::{Error, Result};
use crate::grid::{grid_solve, GridField};
use crate::rng::derive_seed;

/// Discs smaller than this are invisible to the walks.
pub const MIN_WALK_RADIUS: f64 = 1e-9;
/// Trajectories longer than this score 0.
pub const MAX_WALK_STEPS: u32 = 100_000;
pub const DEFAULT_PROBE_SAMPLES: usize = 37;
pub const MIN_CERTIFY_WALKS: u64 = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureEstimate {
    pub value: f64,
    pub std_error: f64,
    pub walks: u64,
    pub eps: f64,
    /// Trajectories stopped by the step cap.
    pub killed: u64,
}

impl MeasureEstimate {
    fn from_hits(hits: u64, killed: u64, walks: u64, eps: f64) -> Self {
        let value = hits as f64 / walks as f64;
        MeasureEstimate {
            value,
            std_error: (value * (1.0 - value) / walks as f64).sqrt(),
            walks,
            eps,
            killed,
        }
    }

    pub fn lower_bound(&self) -> f64 {
        self.lower_bound_at(CERTIFY_SIGMAS)
    }

    pub fn lower_bound_at(&self, sigmas: f64) -> f64 {
        self.value - sigmas * self.std_error
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Component {
    Outer,
    Target,
    Hole,
}

/// The absorbing boundary as seen by the walks.
struct WalkGeometry {
    holes: Vec<Disc>,
    target: Disc,
}

impl WalkGeometry {
    fn new(domain: &SlitDiskDomain) -> Self {
        let (holes, dropped): (Vec<Disc>, Vec<Disc>) = domain
            .deleted_discs
            .iter()
            .partition(|d| d.radius >= MIN_WALK_RADIUS);
        if !dropped.is_empty() {
            log::warn!(
                "{} disc(s) below radius {MIN_WALK_RADIUS:e} dropped from the walk geometry",
                dropped.len()
            );
        }
        WalkGeometry {
            holes,
            target: domain.target,
        }
    }

    #[inline]
    fn nearest(&self, z: Complex64) -> (f64, Component) {
        // sqrt of the squared modulus; hypot dominates the step cost
        let dist_to = |d: &Disc| (z - d.center).norm_sqr().sqrt() - d.radius;
        let mut dist = 1.0 - z.norm_sqr().sqrt();
        let mut which = Component::Outer;
        let dt = dist_to(&self.target);
        if dt < dist {
            dist = dt;
            which = Component::Target;
        }
        for h in &self.holes {
            let dh = dist_to(h);
            if dh < dist {
                dist = dh;
                which = Component::Hole;
            }
        }
        (dist, which)
    }

    /// Returns (hit target, killed).
    fn walk(&self, mut z: Complex64, eps: f64, rng: &mut ChaCha8Rng) -> (bool, bool) {
        for _ in 0..MAX_WALK_STEPS {
            let (dist, which) = self.nearest(z);
            if dist < eps {
                return (which == Component::Target, false);
            }
            z += dist * unit_vector(rng);
        }
        (false, true)
    }
}

/// Uniform direction by rejection from the square.
#[inline]
fn unit_vector(rng: &mut ChaCha8Rng) -> Complex64 {
    loop {
        let v = Complex64::new(2.0 * rng.gen::<f64>() - 1.0, 2.0 * rng.gen::<f64>() - 1.0);
        let r2 = v.norm_sqr();
        if r2 > 1e-12 && r2 <= 1.0 {
            return v / r2.sqrt();
        }
    }
}

/// `min(1e-6, smallest radius / 2)` over the target and the discs the walks see.
pub fn default_eps(domain: &SlitDiskDomain) -> f64 {
    let smallest = domain
        .deleted_discs
        .iter()
        .map(|d| d.radius)
        .filter(|r| *r >= MIN_WALK_RADIUS)
        .fold(domain.target.radius, f64::min);
    (0.5 * smallest).min(1e-6)
}

/// Walk-on-spheres estimate of ω(z, S, D) from `walks` independent
/// trajectories. Walk `i` draws from ChaCha stream `i` of `seed`, so the
/// result is bit-identical under any thread schedule.
pub fn wos_estimate(
    domain: &SlitDiskDomain,
    z: Complex64,
    walks: u64,
    eps: f64,
    seed: u64,
) -> Result<MeasureEstimate> {
    if !domain.contains(z) {
        return Err(Error::PointPlacement { re: z.re, im: z.im });
    }
    if walks == 0 || !(eps > 0.0) {
        return Err(Error::InvalidParams("walks must be >= 1 and eps > 0".into()));
    }
    let geometry = WalkGeometry::new(domain);
    let base = ChaCha8Rng::seed_from_u64(seed);
    let (hits, killed) = (0..walks)
        .into_par_iter()
        .map(|i| {
            let mut rng = base.clone();
            rng.set_stream(i);
            let (hit, kill) = geometry.walk(z, eps, &mut rng);
            (hit as u64, kill as u64)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    if killed > 0 {
        log::warn!("{killed} walk(s) hit the {MAX_WALK_STEPS}-step cap");
    }
    Ok(MeasureEstimate::from_hits(hits, killed, walks, eps))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificationEvidence {
    pub min_lower_bound: f64,
    pub worst_point: [f64; 2],
    pub walks: u64,
    pub eps: f64,
    pub accepted: bool,
    /// Probe points evaluated before the decision.
    #[serde(default)]
    pub evaluated: usize,
}

impl CertificationEvidence {
    /// Evidence record with a given bound, for callers that decide by other means.
    pub fn fixed(min_lower_bound: f64, accepted: bool) -> Self {
        CertificationEvidence {
            min_lower_bound,
            worst_point: [f64::NAN, f64::NAN],
            walks: 0,
            eps: 0.0,
            accepted,
            evaluated: 0,
        }
    }
}

/// Accepts iff every probe sample has `value - 3σ > c0`.
pub fn certify(
    domain: &SlitDiskDomain,
    c0: f64,
    walks: u64,
    probe_samples: usize,
    seed: u64,
) -> Result<CertificationEvidence> {
    certify_with(domain, c0, walks, probe_samples, seed, false)
}

/// Like [`certify`]; with `early_exit` the probe points are visited from the
/// one nearest the unit circle inward and the first failing point ends the
/// run. The verdict is the same as the full run's whenever it is `true`.
pub fn certify_with(
    domain: &SlitDiskDomain,
    c0: f64,
    walks: u64,
    probe_samples: usize,
    seed: u64,
    early_exit: bool,
) -> Result<CertificationEvidence> {
    certify_at(domain, c0, walks, probe_samples, seed, early_exit, CERTIFY_SIGMAS)
}

/// [`certify_with`] with lower bounds `value - sigmas·σ`.
pub fn certify_at(
    domain: &SlitDiskDomain,
    c0: f64,
    walks: u64,
    probe_samples: usize,
    seed: u64,
    early_exit: bool,
    sigmas: f64,
) -> Result<CertificationEvidence> {
    if walks < MIN_CERTIFY_WALKS {
        return Err(Error::InvalidParams(format!(
            "certification needs at least {MIN_CERTIFY_WALKS} walks per point"
        )));
    }
    let eps = default_eps(domain);
    let lattice = domain.probe_lattice(probe_samples);
    let mut order: Vec<usize> = (0..lattice.len()).collect();
    if early_exit {
        order.sort_by(|&i, &j| lattice[j].norm().total_cmp(&lattice[i].norm()).then(i.cmp(&j)));
    }
    let mut evidence = CertificationEvidence {
        min_lower_bound: f64::INFINITY,
        worst_point: [f64::NAN, f64::NAN],
        walks,
        eps,
        accepted: true,
        evaluated: 0,
    };
    for i in order {
        let p = lattice[i];
        let est = wos_estimate(domain, p, walks, eps, derive_seed(seed, i as u64, 0))?;
        let lower = est.lower_bound_at(sigmas);
        evidence.evaluated += 1;
        if lower < evidence.min_lower_bound {
            evidence.min_lower_bound = lower;
            evidence.worst_point = [p.re, p.im];
        }
        if !(lower > c0) {
            evidence.accepted = false;
            if early_exit {
                break;
            }
        }
    }
    Ok(evidence)
}

/// Walk-on-spheres certifier for the construction loop. Its margin exceeds
/// the 3σ of [`certify`]: the halving loop retries with fresh seeds until a
/// certification passes, so a pass at the bare margin is biased toward
/// favorable noise, and the accepted domain must keep enough reserve for an
/// independent [`certify`] run to pass.
#[derive(Clone, Debug)]
pub struct WosCertifier {
    pub walks: u64,
    pub probe_samples: usize,
    pub early_exit: bool,
    pub sigmas: f64,
}

impl Default for WosCertifier {
    fn default() -> Self {
        WosCertifier {
            walks: 300_000,
            probe_samples: DEFAULT_PROBE_SAMPLES,
            early_exit: true,
            sigmas: CONSTRUCTION_SIGMAS,
        }
    }
}

impl Certifier for WosCertifier {
    fn certify(&mut self, domain: &SlitDiskDomain, c0: f64, seed: u64) -> CertificationEvidence {
        certify_at(domain, c0, self.walks, self.probe_samples, seed, self.early_exit, self.sigmas)
            .expect("probe lattice lies inside every admissible domain")
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub c0: f64,
    pub grid_min: f64,
    pub worst_point: [f64; 2],
    pub resolution: usize,
    /// Walk-on-spheres value at the worst lattice point.
    pub wos_check: MeasureEstimate,
    pub oracle_agrees: bool,
}

pub const C0_FRACTION: f64 = 0.9;

/// Standard errors subtracted by [`certify`].
pub const CERTIFY_SIGMAS: f64 = 3.0;

/// Standard errors subtracted by the default construction certifier.
pub const CONSTRUCTION_SIGMAS: f64 = 6.0;

/// `0.9 ×` the smallest grid value of ω(·, S, 𝔻) on the probe lattice.
pub fn default_c0(walks: u64, resolution: usize) -> Result<f64> {
    Ok(default_c0_report(walks, resolution, 0)?.c0)
}

/// [`default_c0`] together with a walk-on-spheres cross-check at the minimizing
/// lattice point.
pub fn default_c0_report(walks: u64, resolution: usize, seed: u64) -> Result<ThresholdReport> {
    let domain = SlitDiskDomain::unit_disk();
    let field = grid_solve(&domain, resolution)?;
    default_c0_from_field(&domain, &field, walks, seed)
}

pub fn default_c0_from_field(
    domain: &SlitDiskDomain,
    field: &GridField,
    walks: u64,
    seed: u64,
) -> Result<ThresholdReport> {
    let mut grid_min = f64::INFINITY;
    let mut worst = domain.probe.center;
    for p in domain.probe_lattice(DEFAULT_PROBE_SAMPLES) {
        let v = field.value_at(p);
        if v < grid_min {
            grid_min = v;
            worst = p;
        }
    }
    let wos_check = wos_estimate(domain, worst, walks, default_eps(domain), seed)?;
    let tol = (3.0 * wos_check.std_error).max(0.01);
    Ok(ThresholdReport {
        c0: C0_FRACTION * grid_min,
        grid_min,
        worst_point: [worst.re, worst.im],
        resolution: field.resolution,
        oracle_agrees: (wos_check.value - grid_min).abs() <= tol,
        wos_check,
    })
}
