//! Property tests over randomly generated Cantor states.

use std::f64::consts::TAU;

use cantorhull::cantor::DeletedInterval;
use cantorhull::hull::eval_sheet;
use cantorhull::monodromy::{circle_path, continue_along_path};
use cantorhull::product::{eval_f, eval_g, g_difference, residue_at_infinity, tail_bound};
use cantorhull::{CantorState, Interval};
use num_complex::Complex64;
use proptest::prelude::*;

/// Each triple picks a block, a position inside it and a relative width; the
/// deletion stays strictly inside the block.
fn state_from(steps: &[(f64, f64, f64)]) -> CantorState {
    let mut s = CantorState::default();
    for &(pick, t, w) in steps {
        let blocks = s.blocks(s.depth()).unwrap();
        let b = blocks[((pick * blocks.len() as f64) as usize).min(blocks.len() - 1)];
        let len = b.length();
        let left = b.left() + len * (0.05 + 0.9 * t * (1.0 - w));
        let width = 0.9 * len * w;
        s.push(DeletedInterval::new(left, width).unwrap()).unwrap();
    }
    s
}

fn steps() -> impl Strategy<Value = Vec<(f64, f64, f64)>> {
    prop::collection::vec((0.0..1.0f64, 0.0..1.0f64, 0.001..0.6f64), 1..7)
}

fn point() -> impl Strategy<Value = Complex64> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(re, im)| Complex64::new(re, im))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn blocks_partition_outer(st in steps()) {
        let s = state_from(&st);
        for n in 0..=s.depth() {
            let blocks = s.blocks(n).unwrap();
            let kept: f64 = blocks.iter().map(Interval::length).sum();
            let removed: f64 = s.deleted()[..n].iter().map(|d| d.width).sum();
            prop_assert!((kept + removed - 2.0).abs() < 2e-12);
        }
    }

    #[test]
    fn trapped_length_nonincreasing(st in steps(), lo in -1.5..0.5f64, span in 0.1..2.0f64) {
        let s = state_from(&st);
        let w = Interval::new(lo, lo + span).unwrap();
        let mut prev = f64::INFINITY;
        for n in 0..=s.depth() {
            let l = s.trapped_length(&w, n).unwrap();
            prop_assert!(l <= prev);
            prev = l;
        }
    }

    #[test]
    fn square_of_f_is_g(st in steps(), z in point()) {
        let s = state_from(&st);
        for n in 0..=s.depth() {
            prop_assume!(s.distance_to_blocks(n, z).unwrap() > 1e-6);
            let g = eval_g(&s, n, z).unwrap();
            let f = eval_f(&s, n, z).unwrap();
            prop_assert!((f.value * f.value - g).norm() / g.norm() < 1e-10);
        }
    }

    #[test]
    fn sheets_are_antisymmetric_and_normalized(st in steps()) {
        let s = state_from(&st);
        for n in 0..=s.depth() {
            let f = eval_f(&s, n, Complex64::new(1e6, 0.0)).unwrap();
            prop_assert!((f.value - 1.0).norm() < 1e-5);
        }
        let z = Complex64::new(0.3, 0.4);
        let w = eval_sheet(&s, s.depth(), z);
        if let Ok(w) = w {
            let f = eval_f(&s, s.depth(), z).unwrap().value;
            prop_assert!(w == f || w == -f);
        }
    }

    #[test]
    fn tail_bound_holds_on_circle(st in steps()) {
        let s = state_from(&st);
        let big = s.depth();
        for n in 0..big {
            let (mut diff, mut sup) = (0.0f64, 0.0f64);
            for k in 0..256 {
                let z = Complex64::from_polar(2.0, TAU * k as f64 / 256.0);
                diff = diff.max(g_difference(&s, n, big, z).unwrap().norm());
                sup = sup.max(eval_g(&s, n, z).unwrap().norm());
            }
            let tb = tail_bound(&s, n, big, 1.0, sup);
            prop_assert!(diff <= tb.bound * (1.0 + 1e-9), "n={} {} > {}", n, diff, tb.bound);
        }
    }

    #[test]
    fn residue_matches_trapped_length(st in steps()) {
        let s = state_from(&st);
        let n = s.depth();
        let mids: Vec<f64> = s.deleted().iter().map(|d| d.left + 0.5 * d.width).collect();
        let mut ends = vec![-2.0];
        ends.extend(mids);
        ends.push(2.0);
        ends.sort_by(f64::total_cmp);
        for w in ends.windows(2).chain(std::iter::once(&[ends[0], ends[ends.len() - 1]][..])) {
            let win = Interval::new(w[0], w[1]).unwrap();
            let r = residue_at_infinity(&s, n, &win, 3.0, 256).unwrap();
            let l = s.trapped_length(&win, n).unwrap();
            prop_assert!((r - l).abs() < 1e-8, "{} vs {}", r, l);
        }
    }

    #[test]
    fn loop_parity_ignores_orientation_and_start(
        st in steps(),
        c in -1.2..1.2f64,
        r in 0.05..0.8f64,
        shift in 1usize..31,
    ) {
        let s = state_from(&st);
        let n = s.depth();
        let path = circle_path(Complex64::new(c, 0.3), r, 32);
        let forward = eval_f(&s, n, path[0]).and_then(|w| continue_along_path(&s, n, &path, w));
        prop_assume!(forward.is_ok());
        let parity = forward.unwrap().sheet_parity;

        let mut back = path.clone();
        back.reverse();
        let reversed = continue_along_path(&s, n, &back, eval_f(&s, n, back[0]).unwrap()).unwrap();
        prop_assert_eq!(reversed.sheet_parity, parity);

        let mut rotated: Vec<Complex64> = path[..path.len() - 1].to_vec();
        rotated.rotate_left(shift);
        rotated.push(rotated[0]);
        let moved = continue_along_path(&s, n, &rotated, eval_f(&s, n, rotated[0]).unwrap()).unwrap();
        prop_assert_eq!(moved.sheet_parity, parity);
    }
}
