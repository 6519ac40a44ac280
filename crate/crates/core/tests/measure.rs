//! Harmonic-measure estimator: domain monotonicity, determinism, the closed
//! form on annuli and agreement with the grid oracle.

use cantorhull::domain::{default_probe, default_target};
use cantorhull::grid::grid_solve;
use cantorhull::harmonic::{certify, default_eps, wos_estimate, MeasureEstimate};
use cantorhull::{Disc, SlitDiskDomain};
use num_complex::Complex64;

fn with_discs(discs: &[(f64, f64)]) -> SlitDiskDomain {
    let discs = discs
        .iter()
        .map(|&(c, r)| Disc::new(Complex64::new(c, 0.0), r))
        .collect();
    SlitDiskDomain::new(discs, default_target(), default_probe()).unwrap()
}

fn estimate(d: &SlitDiskDomain, z: Complex64, walks: u64, seed: u64) -> MeasureEstimate {
    wos_estimate(d, z, walks, default_eps(d), seed).unwrap()
}

#[test]
fn deleting_discs_does_not_raise_measure() {
    let chain = [
        with_discs(&[]),
        with_discs(&[(0.0, 0.05)]),
        with_discs(&[(0.0, 0.05), (-0.5, 0.02)]),
        with_discs(&[(0.0, 0.05), (-0.5, 0.02), (0.5, 1e-4)]),
    ];
    let lattice = chain[0].probe_lattice(37);
    for (k, pair) in chain.windows(2).enumerate() {
        for (i, &p) in lattice.iter().enumerate() {
            let seed = (k * 100 + i) as u64;
            let wide = estimate(&pair[0], p, 20_000, seed);
            let narrow = estimate(&pair[1], p, 20_000, seed + 50);
            let slack = 3.0 * (wide.std_error.powi(2) + narrow.std_error.powi(2)).sqrt();
            assert!(
                narrow.value <= wide.value + slack,
                "step {k}, point {p}: {} > {} + {slack}",
                narrow.value,
                wide.value
            );
        }
    }
}

#[test]
fn identical_seeds_give_identical_bits() {
    let d = with_discs(&[(0.0, 0.01)]);
    let z = Complex64::new(0.1, 0.6);
    let a = estimate(&d, z, 50_000, 9);
    let b = estimate(&d, z, 50_000, 9);
    assert_eq!(a.value.to_bits(), b.value.to_bits());
    assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
    let c = estimate(&d, z, 50_000, 10);
    assert_ne!(a.value.to_bits(), c.value.to_bits());
}

#[test]
fn annulus_closed_form() {
    for r in [0.1, 0.25] {
        let d = SlitDiskDomain::new(vec![], Disc::new(Complex64::new(0.0, 0.0), r), default_probe()).unwrap();
        for m in [0.4, 0.7] {
            let z = Complex64::from_polar(m, 1.1);
            let e = estimate(&d, z, 100_000, 5);
            let exact = (1.0 / m).ln() / (1.0 / r).ln();
            assert!((e.value - exact).abs() <= 3.0 * e.std_error, "r={r} |z|={m}: {} vs {exact}", e.value);
        }
    }
}

#[test]
fn grid_oracle_agrees_with_walks() {
    let d = with_discs(&[(0.0, 0.05), (-0.5, 0.02)]);
    let field = grid_solve(&d, 256).unwrap();
    for (k, z) in [
        Complex64::new(0.0, 0.5),
        Complex64::new(-0.3, -0.3),
        Complex64::new(0.6, 0.1),
        Complex64::new(0.0, -0.5),
    ]
    .into_iter()
    .enumerate()
    {
        let e = estimate(&d, z, 40_000, k as u64);
        let tol = (3.0 * e.std_error).max(0.01);
        assert!((e.value - field.value_at(z)).abs() <= tol, "{z}: {} vs {}", e.value, field.value_at(z));
    }
}

#[test]
fn certify_extremes() {
    let d = SlitDiskDomain::unit_disk();
    assert!(certify(&d, 0.0, 10_000, 37, 1).unwrap().accepted);
    assert!(!certify(&d, 1.0, 10_000, 37, 1).unwrap().accepted);
    assert!(certify(&d, 1.0, 9_999, 37, 1).is_err());
}
