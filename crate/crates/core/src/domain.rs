//! Disc geometry for the slit-disk domains `D_n`: the unit disk with finitely
//! many closed discs removed, a distinguished absorbing target disc `S`, and a
//! probe disc `X` on which harmonic measure is certified.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Disc {
    pub center: Complex64,
    pub radius: f64,
}

impl Disc {
    pub fn new(center: Complex64, radius: f64) -> Self {
        Disc { center, radius }
    }

    /// Signed distance from `z` to the boundary circle; negative inside.
    #[inline]
    pub fn signed_distance(&self, z: Complex64) -> f64 {
        (z - self.center).norm() - self.radius
    }

    pub fn contains(&self, z: Complex64) -> bool {
        (z - self.center).norm() <= self.radius
    }

    /// Closed discs are disjoint.
    pub fn disjoint_from(&self, other: &Disc) -> bool {
        (self.center - other.center).norm() > self.radius + other.radius
    }

    pub fn inside_unit_disk(&self) -> bool {
        self.center.norm() + self.radius < 1.0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlitDiskDomain {
    pub deleted_discs: Vec<Disc>,
    pub target: Disc,
    pub probe: Disc,
}

pub fn default_target() -> Disc {
    Disc::new(Complex64::new(0.0, -0.75), 0.125)
}

pub fn default_probe() -> Disc {
    Disc::new(Complex64::new(0.0, 0.75), 0.125)
}

impl Default for SlitDiskDomain {
    fn default() -> Self {
        SlitDiskDomain {
            deleted_discs: Vec::new(),
            target: default_target(),
            probe: default_probe(),
        }
    }
}

impl SlitDiskDomain {
    pub fn new(deleted_discs: Vec<Disc>, target: Disc, probe: Disc) -> Result<Self> {
        let domain = SlitDiskDomain {
            deleted_discs,
            target,
            probe,
        };
        domain.validate()?;
        Ok(domain)
    }

    /// The open unit disk minus the default target, probe at the default X.
    pub fn unit_disk() -> Self {
        Self::default()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParams(msg.to_string()));
        for d in self.all_discs() {
            if !(d.radius > 0.0) || !d.center.re.is_finite() || !d.center.im.is_finite() {
                return bad("disc radius must be positive and center finite");
            }
            if !d.inside_unit_disk() {
                return bad("every disc must lie strictly inside the unit disk");
            }
        }
        if !self.target.disjoint_from(&self.probe) {
            return bad("target and probe discs overlap");
        }
        for d in &self.deleted_discs {
            if !d.disjoint_from(&self.target) || !d.disjoint_from(&self.probe) {
                return bad("deleted disc meets the target or probe disc");
            }
        }
        Ok(())
    }

    fn all_discs(&self) -> impl Iterator<Item = &Disc> {
        self.deleted_discs
            .iter()
            .chain(std::iter::once(&self.target))
            .chain(std::iter::once(&self.probe))
    }

    /// Whether a new disc can be removed while keeping the domain invariants.
    pub fn admits(&self, disc: &Disc) -> bool {
        disc.radius > 0.0
            && disc.inside_unit_disk()
            && disc.disjoint_from(&self.target)
            && disc.disjoint_from(&self.probe)
            && self.deleted_discs.iter().all(|d| d.disjoint_from(disc))
    }

    pub fn with_disc(&self, disc: Disc) -> Self {
        let mut next = self.clone();
        next.deleted_discs.push(disc);
        next
    }

    /// Inside the unit disk and outside every deleted disc and the target.
    pub fn contains(&self, z: Complex64) -> bool {
        z.norm() < 1.0
            && !self.target.contains(z)
            && self.deleted_discs.iter().all(|d| !d.contains(z))
    }

    /// Probe lattice on X: the center followed by rings of 6k points at
    /// radii k·r/K, the last ring on the boundary of X. 37 points gives three
    /// full rings.
    pub fn probe_lattice(&self, samples: usize) -> Vec<Complex64> {
        lattice(&self.probe, samples)
    }
}

pub fn lattice(disc: &Disc, samples: usize) -> Vec<Complex64> {
    let samples = samples.max(1);
    let mut rings = 0usize;
    while 1 + 3 * rings * (rings + 1) < samples {
        rings += 1;
    }
    let mut points = vec![disc.center];
    for k in 1..=rings {
        let r = disc.radius * k as f64 / rings as f64;
        let count = 6 * k;
        for i in 0..count {
            if points.len() == samples {
                return points;
            }
            let theta = std::f64::consts::TAU * i as f64 / count as f64;
            points.push(disc.center + Complex64::from_polar(r, theta));
        }
    }
    points
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_lattice_has_three_rings() {
        let pts = SlitDiskDomain::default().probe_lattice(37);
        assert_eq!(pts.len(), 37);
        assert_eq!(pts[0], Complex64::new(0.0, 0.75));
        let boundary = pts
            .iter()
            .filter(|p| ((**p - pts[0]).norm() - 0.125).abs() < 1e-12)
            .count();
        assert_eq!(boundary, 18);
    }

    #[test]
    fn rejects_overlapping_disc() {
        let d = SlitDiskDomain::default();
        assert!(!d.admits(&Disc::new(Complex64::new(0.0, 0.6), 0.1)));
        assert!(d.admits(&Disc::new(Complex64::new(0.0, 0.0), 0.1)));
        assert!(!d.admits(&Disc::new(Complex64::new(0.95, 0.0), 0.1)));
        let bad = SlitDiskDomain::new(
            vec![Disc::new(Complex64::new(0.0, -0.7), 0.05)],
            default_target(),
            default_probe(),
        );
        assert!(bad.is_err());
    }
}
