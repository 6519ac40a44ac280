//! The recorded seed-42 construction: internal consistency and the
//! construction invariants, checked without rerunning the certifier.

use cantorhull::cantor::AuditRecord;
use cantorhull::domain::Disc;
use cantorhull::{CantorState, ConstructionParams, Interval};
use num_complex::Complex64;

const DEPTH6: &str = include_str!("fixtures/depth6_seed42.json");
const DEPTH4: &str = include_str!("fixtures/depth4_seed42.json");
const AUDIT6: &str = include_str!("fixtures/depth6_seed42.audit.jsonl");

fn depth6() -> CantorState {
    CantorState::from_json(DEPTH6.trim_end()).unwrap()
}

#[test]
fn depth4_fixture_is_a_prefix_of_depth6() {
    let four = depth6().truncated(4).unwrap();
    assert_eq!(four.to_json() + "\n", DEPTH4);
}

#[test]
fn json_round_trip_is_byte_exact() {
    for text in [DEPTH6, DEPTH4] {
        let s = CantorState::from_json(text.trim_end()).unwrap();
        assert_eq!(s.to_json() + "\n", text);
        let again = CantorState::from_json(&s.to_json()).unwrap();
        for n in 0..=s.depth() {
            assert_eq!(s.blocks(n).unwrap(), again.blocks(n).unwrap());
        }
    }
}

#[test]
fn audit_log_matches_state() {
    let s = depth6();
    let log: Vec<AuditRecord> = AUDIT6
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(log.len(), s.depth());
    for (k, (r, d)) in log.iter().zip(s.deleted()).enumerate() {
        assert_eq!(r.n, k + 1);
        assert!(r.accepted);
        assert_eq!(r.a, d.left);
        assert_eq!(r.d, d.width);
    }
}

#[test]
fn blocks_partition_the_outer_interval() {
    let s = depth6();
    let outer = s.outer();
    for n in 0..=s.depth() {
        let blocks = s.blocks(n).unwrap();
        assert_eq!(blocks.len(), n + 1);
        assert_eq!(blocks[0].left(), outer.left());
        assert_eq!(blocks[n].right(), outer.right());
        let kept: f64 = blocks.iter().map(Interval::length).sum();
        let removed: f64 = s.deleted()[..n].iter().map(|d| d.width).sum();
        let rel = (kept + removed - outer.length()).abs() / outer.length();
        assert!(rel < 1e-12, "stage {n}: {rel:e}");
        for w in blocks.windows(2) {
            assert!(w[0].right() <= w[1].left());
        }
    }
}

#[test]
fn widths_respect_the_size_rule() {
    let s = depth6();
    let params = ConstructionParams::linear(6, 0.01, 42);
    for (k, d) in s.deleted().iter().enumerate() {
        let bound = params.size_bound(k + 1);
        assert!(d.width < bound, "step {}: {} >= {}", k + 1, d.width, bound);
    }
}

#[test]
fn excluded_discs_are_pairwise_disjoint() {
    let s = depth6();
    let discs: Vec<Disc> = s.excluded_discs(s.depth()).unwrap();
    for (k, d) in discs.iter().enumerate() {
        let expected = 2f64.powi(k as i32 + 1) * s.deleted()[k].width;
        assert_eq!(d.radius, expected);
        assert_eq!(d.center, Complex64::new(s.deleted()[k].left, 0.0));
        for e in &discs[..k] {
            assert!(d.disjoint_from(e));
        }
    }
}

#[test]
fn trapped_length_is_nonincreasing() {
    let s = depth6();
    let windows = [
        Interval::new(-2.0, 2.0).unwrap(),
        Interval::new(-0.6, 0.3).unwrap(),
        Interval::new(0.1, 0.9).unwrap(),
    ];
    for w in &windows {
        let lengths: Vec<f64> = (0..=s.depth())
            .map(|n| s.trapped_length(w, n).unwrap())
            .collect();
        for p in lengths.windows(2) {
            assert!(p[1] <= p[0]);
        }
    }
}
