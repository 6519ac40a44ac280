//! Finite-difference Dirichlet solver on `[-1, 1]²`: `u = 1` on the target
//! disc, `u = 0` on the unit circle and on deleted discs.
//!
//! Curved boundaries use the Shortley–Weller stencil: an arm that crosses a
//! boundary circle before reaching the neighbouring node is shortened to the
//! crossing and takes the boundary value there. Discs smaller than one cell
//! cannot be represented; their nearest node is pinned to 0 and a warning is
//! attached to the result. The linear system is relaxed by red-black SOR.

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::domain::{Disc, SlitDiskDomain};
use crate::error::{Error, Result};

/// First Dirichlet eigenvalue of the unit disk, j_{0,1}².
const DISK_EIGENVALUE: f64 = 5.783_185_962_946_784;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridOptions {
    pub resolution: usize,
    /// SOR factor; `None` picks the optimum for the unit disk at this spacing.
    pub relaxation: Option<f64>,
    pub tolerance: f64,
    pub max_sweeps: usize,
}

impl GridOptions {
    pub fn new(resolution: usize) -> Self {
        GridOptions {
            resolution,
            relaxation: None,
            tolerance: 1e-8,
            max_sweeps: 200_000,
        }
    }

    pub fn relaxation_factor(&self) -> f64 {
        self.relaxation.unwrap_or_else(|| {
            let h = 2.0 / self.resolution as f64;
            let rho = 1.0 - DISK_EIGENVALUE * h * h / 4.0;
            2.0 / (1.0 + (1.0 - rho * rho).sqrt())
        })
    }
}

#[derive(Clone, Debug)]
pub struct GridField {
    pub resolution: usize,
    pub h: f64,
    /// Node values, row-major with `j` (imaginary axis) as the row index.
    pub values: Vec<f64>,
    /// Nodes whose value was solved for (inside the domain).
    pub inside: Vec<bool>,
    pub warnings: Vec<String>,
    pub sweeps: usize,
    pub residual: f64,
}

#[derive(Clone, Copy)]
struct Equation {
    node: u32,
    neighbours: [u32; 4],
    weights: [f64; 4],
    rhs: f64,
}

#[derive(Clone, Copy, PartialEq)]
enum NodeKind {
    Unknown,
    Fixed(f64),
}

struct Boundary {
    circle: Disc,
    value: f64,
    /// The domain is inside this circle (the unit circle) rather than outside.
    interior: bool,
}

/// Nearest positive crossing of the ray `p + s·dir`, `0 < s <= reach`.
fn crossing(b: &Boundary, p: Complex64, dir: Complex64, reach: f64) -> Option<f64> {
    let rel = p - b.circle.center;
    let half_b = rel.re * dir.re + rel.im * dir.im;
    let c = rel.norm_sqr() - b.circle.radius * b.circle.radius;
    let disc = half_b * half_b - c;
    if disc < 0.0 {
        return None;
    }
    let root = disc.sqrt();
    let s = if b.interior { -half_b + root } else { -half_b - root };
    (s > 0.0 && s <= reach).then_some(s)
}

impl GridField {
    fn index(&self, i: usize, j: usize) -> usize {
        j * (self.resolution + 1) + i
    }

    pub fn node(&self, i: usize, j: usize) -> Complex64 {
        Complex64::new(-1.0 + i as f64 * self.h, -1.0 + j as f64 * self.h)
    }

    /// Bilinear interpolation of the node values.
    pub fn value_at(&self, z: Complex64) -> f64 {
        let n = self.resolution;
        let fx = ((z.re + 1.0) / self.h).clamp(0.0, n as f64);
        let fy = ((z.im + 1.0) / self.h).clamp(0.0, n as f64);
        let i = (fx.floor() as usize).min(n - 1);
        let j = (fy.floor() as usize).min(n - 1);
        let (tx, ty) = (fx - i as f64, fy - j as f64);
        let v = |a, b| self.values[self.index(a, b)];
        (1.0 - ty) * ((1.0 - tx) * v(i, j) + tx * v(i + 1, j))
            + ty * ((1.0 - tx) * v(i, j + 1) + tx * v(i + 1, j + 1))
    }

    /// CSV `x,y,u` over the domain nodes.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "x,y,u")?;
        for j in 0..=self.resolution {
            for i in 0..=self.resolution {
                let k = self.index(i, j);
                if self.inside[k] {
                    let z = self.node(i, j);
                    writeln!(out, "{},{},{}", z.re, z.im, self.values[k])?;
                }
            }
        }
        Ok(())
    }
}

pub fn grid_solve(domain: &SlitDiskDomain, resolution: usize) -> Result<GridField> {
    grid_solve_with(domain, &GridOptions::new(resolution))
}

pub fn grid_solve_with(domain: &SlitDiskDomain, opts: &GridOptions) -> Result<GridField> {
    let n = opts.resolution;
    if n < 128 {
        return Err(Error::InvalidParams(format!(
            "grid resolution {n} is below the minimum of 128"
        )));
    }
    let h = 2.0 / n as f64;
    let side = n + 1;
    let node = |i: usize, j: usize| Complex64::new(-1.0 + i as f64 * h, -1.0 + j as f64 * h);

    let mut warnings = Vec::new();
    let mut boundaries = vec![
        Boundary {
            circle: Disc::new(Complex64::new(0.0, 0.0), 1.0),
            value: 0.0,
            interior: true,
        },
        Boundary {
            circle: domain.target,
            value: 1.0,
            interior: false,
        },
    ];
    let mut pinned = Vec::new();
    for d in &domain.deleted_discs {
        if d.radius >= h {
            boundaries.push(Boundary {
                circle: *d,
                value: 0.0,
                interior: false,
            });
        } else {
            let i = ((d.center.re + 1.0) / h).round() as usize;
            let j = ((d.center.im + 1.0) / h).round() as usize;
            warnings.push(format!(
                "disc at {}{:+}i of radius {:e} is below the grid spacing {h:e}; pinned node ({i}, {j}) to 0",
                d.center.re, d.center.im, d.radius
            ));
            pinned.push((i.min(n), j.min(n)));
        }
    }

    let mut kind = vec![NodeKind::Unknown; side * side];
    for j in 0..side {
        for i in 0..side {
            let z = node(i, j);
            let k = j * side + i;
            if z.norm() >= 1.0 {
                kind[k] = NodeKind::Fixed(0.0);
            } else if domain.target.contains(z) {
                kind[k] = NodeKind::Fixed(1.0);
            } else if boundaries[2..].iter().any(|b| b.circle.contains(z)) {
                kind[k] = NodeKind::Fixed(0.0);
            }
        }
    }
    for &(i, j) in &pinned {
        kind[j * side + i] = NodeKind::Fixed(0.0);
    }

    let dirs = [
        (Complex64::new(1.0, 0.0), 1isize, 0isize),
        (Complex64::new(-1.0, 0.0), -1, 0),
        (Complex64::new(0.0, 1.0), 0, 1),
        (Complex64::new(0.0, -1.0), 0, -1),
    ];
    let mut values = vec![0.0; side * side];
    let mut red = Vec::new();
    let mut black = Vec::new();
    for j in 0..side {
        for i in 0..side {
            let k = j * side + i;
            match kind[k] {
                NodeKind::Fixed(v) => {
                    values[k] = v;
                    continue;
                }
                NodeKind::Unknown => {}
            }
            let p = node(i, j);
            let mut arm = [h; 4];
            let mut arm_value = [None::<f64>; 4];
            let mut nb = [k as u32; 4];
            for (a, &(dir, di, dj)) in dirs.iter().enumerate() {
                let mut best: Option<(f64, f64)> = None;
                for b in &boundaries {
                    if let Some(s) = crossing(b, p, dir, h) {
                        if best.map_or(true, |(t, _)| s < t) {
                            best = Some((s, b.value));
                        }
                    }
                }
                let ni = (i as isize + di) as usize;
                let nj = (j as isize + dj) as usize;
                let nk = nj * side + ni;
                match best {
                    Some((s, v)) if s < h || kind[nk] != NodeKind::Unknown => {
                        arm[a] = s.max(1e-12 * h);
                        arm_value[a] = Some(v);
                    }
                    _ => match kind[nk] {
                        NodeKind::Fixed(v) => arm_value[a] = Some(v),
                        NodeKind::Unknown => nb[a] = nk as u32,
                    },
                }
            }
            let (e, w, nn, s) = (arm[0], arm[1], arm[2], arm[3]);
            let c = [
                2.0 / (e * (e + w)),
                2.0 / (w * (e + w)),
                2.0 / (nn * (nn + s)),
                2.0 / (s * (nn + s)),
            ];
            let diag: f64 = c.iter().sum();
            let mut eq = Equation {
                node: k as u32,
                neighbours: nb,
                weights: [0.0; 4],
                rhs: 0.0,
            };
            for a in 0..4 {
                let wgt = c[a] / diag;
                match arm_value[a] {
                    Some(v) => eq.rhs += wgt * v,
                    None => eq.weights[a] = wgt,
                }
            }
            if (i + j) % 2 == 0 {
                red.push(eq);
            } else {
                black.push(eq);
            }
        }
    }

    let omega = opts.relaxation_factor();
    let mut sweeps = 0;
    let mut residual = f64::INFINITY;
    while sweeps < opts.max_sweeps {
        residual = 0.0;
        for eqs in [&red, &black] {
            for eq in eqs.iter() {
                let mut target = eq.rhs;
                for a in 0..4 {
                    target += eq.weights[a] * values[eq.neighbours[a] as usize];
                }
                let u = &mut values[eq.node as usize];
                let r = target - *u;
                residual = f64::max(residual, r.abs());
                *u += omega * r;
            }
        }
        sweeps += 1;
        if residual < opts.tolerance {
            break;
        }
    }
    if residual >= opts.tolerance {
        warnings.push(format!(
            "SOR stopped after {sweeps} sweeps with residual {residual:e}"
        ));
    }
    for w in &warnings {
        log::warn!("{w}");
    }

    let inside = kind.iter().map(|k| *k == NodeKind::Unknown).collect();
    Ok(GridField {
        resolution: n,
        h,
        values,
        inside,
        warnings,
        sweeps,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::default_probe;

    #[test]
    fn annulus_at_half_radius() {
        let d = SlitDiskDomain::new(vec![], Disc::new(Complex64::new(0.0, 0.0), 0.25), default_probe())
            .unwrap();
        let f = grid_solve(&d, 256).unwrap();
        assert!(f.warnings.is_empty(), "{:?}", f.warnings);
        for theta in [0.0, 0.7, 2.0, 4.0] {
            let z = Complex64::from_polar(0.5, theta);
            let exact = 2f64.ln() / 4f64.ln();
            assert!((f.value_at(z) - exact).abs() < 0.01);
        }
    }

    #[test]
    fn vanishes_near_unit_circle() {
        let f = grid_solve(&SlitDiskDomain::default(), 128).unwrap();
        let n = f.resolution;
        for j in 0..=n {
            for i in 0..=n {
                let k = j * (n + 1) + i;
                if f.inside[k] && f.node(i, j).norm() > 1.0 - f.h {
                    assert!(f.values[k] >= 0.0 && f.values[k] <= 10.0 * f.h);
                }
            }
        }
    }

    #[test]
    fn small_discs_are_pinned_with_warning() {
        let mut d = SlitDiskDomain::default();
        d.deleted_discs.push(Disc::new(Complex64::new(0.3, 0.0), 1e-6));
        let f = grid_solve(&d, 128).unwrap();
        assert_eq!(f.warnings.len(), 1);
        let i = (1.3 / f.h).round() as usize;
        let j = (1.0 / f.h).round() as usize;
        assert_eq!(f.values[j * (f.resolution + 1) + i], 0.0);
        assert!(!f.inside[j * (f.resolution + 1) + i]);
        assert!(grid_solve(&d, 64).is_err());
    }
}
