use std::sync::Arc;

use proptest::prelude::*;

use fqt_core::bohr::BohrSet;
use fqt_core::equations::store::{decode_record, encode_record};
use fqt_core::equations::{
    count_solutions, max_solution_free_exhaustive, max_solution_free_heuristic, EquationSpec,
};
use fqt_core::field::FieldCtx;
use fqt_core::fourier::{DualFreq, FourierPlan, GroupFn};
use fqt_core::group::{GroupN, PointSet};
use fqt_core::znz::{Convention, ZBohrSet};

const ORDERS: [u32; 8] = [2, 3, 4, 5, 7, 8, 9, 25];

fn group(q: u32, n: usize) -> GroupN {
    GroupN::new(Arc::new(FieldCtx::of_order(q).unwrap()), n).unwrap()
}

fn subset(size: usize, bits: &[bool]) -> PointSet {
    PointSet::from_mask((0..size).map(|i| bits[i % bits.len()]).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms(qi in 0usize..ORDERS.len(), a in 0u32..25, b in 0u32..25, c in 0u32..25) {
        let f = FieldCtx::of_order(ORDERS[qi]).unwrap();
        let (a, b, c) = (a % f.q(), b % f.q(), c % f.q());
        prop_assert_eq!(f.add(a, b), f.add(b, a));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        prop_assert_eq!(f.add(a, f.neg(a)), 0);
        prop_assert_eq!(f.sub(f.add(a, b), b), a);
        if a != 0 {
            prop_assert_eq!(f.mul(a, f.inv(a)), 1);
        }
        prop_assert_eq!(f.trace(f.add(a, b)), (f.trace(a) + f.trace(b)) % f.p());
        prop_assert_eq!(f.pow(a, f.q()), a);
    }

    #[test]
    fn fourier_inversion_and_parseval(
        (q, n) in prop_oneof![Just((2u32, 6usize)), Just((3, 4)), Just((4, 3)), Just((5, 2))],
        vals in prop::collection::vec(-1.0f64..1.0, 1..100),
    ) {
        let g = group(q, n);
        let vals: Vec<f64> = vals.iter().cycle().take(g.size()).copied().collect();
        let f = GroupFn::from_real(&g, &vals);
        let plan = FourierPlan::new(&g);
        let fhat = plan.forward(&f);
        prop_assert!(plan.inverse(&fhat).max_abs_diff(&f) < 1e-10);
        let lhs: f64 = fhat.values().iter().map(|v| v.norm_sqr()).sum();
        let rhs: f64 = f.values().iter().map(|v| v.norm_sqr()).sum::<f64>() / g.size() as f64;
        prop_assert!((lhs - rhs).abs() <= 1e-9 * rhs.max(1e-300));
    }

    #[test]
    fn bohr_sets_are_subspaces(
        (q, n) in prop_oneof![Just((2u32, 6usize)), Just((3, 4)), Just((4, 3))],
        freqs in prop::collection::vec(0usize..4096, 0..4),
        widths in prop::collection::vec(1usize..4, 4),
    ) {
        let g = group(q, n);
        let gamma: Vec<DualFreq> = freqs
            .iter()
            .map(|&xi| DualFreq::from_dual_index(xi % g.size(), q, n))
            .collect();
        let w = widths[..gamma.len()].to_vec();
        let b = BohrSet::build(&g, gamma, w).unwrap();
        let set = b.point_set().unwrap();
        prop_assert_eq!(set.len() as u128, b.size());
        prop_assert!(set.contains(0));
        for &x in set.members() {
            prop_assert_eq!(b.member_direct(&g.elem(x)).unwrap(), true);
            prop_assert!(set.contains(g.neg(x)));
            for lambda in g.ctx().units() {
                prop_assert!(set.contains(g.scale(lambda, x)));
            }
            for &y in set.members().iter().take(8) {
                prop_assert!(set.contains(g.add(x, y)));
            }
        }
        for x in 0..g.size() {
            if !set.contains(x) {
                prop_assert_eq!(b.member_direct(&g.elem(x)).unwrap(), false);
            }
        }
    }

    #[test]
    fn counting_invariances(
        eqi in 0usize..3,
        n in 1usize..3,
        bits in prop::collection::vec(any::<bool>(), 1..81),
        t in 0usize..81,
        unit in 1u32..3,
    ) {
        let (q, c): (u32, &[i64]) = [(3, &[1, 1, 1][..]), (2, &[1, 1, 1, 1][..]), (5, &[1, 1, 3][..])][eqi];
        let g = group(q, n);
        let eq = EquationSpec::from_ints(g.ctx_arc().clone(), c).unwrap();
        let a = subset(g.size(), &bits);
        let base = count_solutions(&a, &eq, n).unwrap();
        prop_assert!(base.raw >= base.trivial_lower);
        prop_assert!(base.fourier_agrees);
        prop_assert!((base.fourier_raw - base.raw as f64).abs() < 1e-6 * (1.0 + base.raw as f64));
        let shifted = count_solutions(&a.translate(&g, t % g.size()), &eq, n).unwrap();
        prop_assert_eq!(shifted.raw, base.raw);
        let lambda = unit % q;
        if lambda != 0 {
            let dilated = PointSet::from_members(g.size(), a.members().iter().map(|&x| g.scale(lambda, x)));
            prop_assert_eq!(count_solutions(&dilated, &eq, n).unwrap().raw, base.raw);
        }
    }

    #[test]
    fn heuristic_is_sound_and_round_trips(seed in any::<u64>(), budget in 1usize..6) {
        let g = group(3, 2);
        let eq = EquationSpec::from_ints(g.ctx_arc().clone(), &[1, 1, 1]).unwrap();
        let best = max_solution_free_exhaustive(2, &eq).unwrap();
        let h = max_solution_free_heuristic(2, &eq, budget, seed).unwrap();
        prop_assert!(h.best_size <= best.best_size);
        prop_assert!(!h.certified);
        for r in [&best, &h] {
            let back = decode_record(&encode_record(r)).unwrap();
            prop_assert_eq!(&back.best_set, &r.best_set);
            prop_assert_eq!(back.best_size, r.best_size);
            prop_assert_eq!(back.certified, r.certified);
        }
    }

    #[test]
    fn znz_bohr_sets_are_symmetric(
        n in 2u64..400,
        gamma in prop::collection::vec(0u64..400, 1..4),
        rho in 0.05f64..1.95,
        chordal in any::<bool>(),
    ) {
        let conv = if chordal { Convention::Chordal } else { Convention::Distance };
        let rho = if chordal { rho } else { rho / 4.0 };
        let b = ZBohrSet::build_with(n, gamma.iter().map(|g| g % n).collect(), rho, conv).unwrap();
        prop_assert!(b.contains(0));
        for x in 0..n {
            prop_assert_eq!(b.contains(x), b.contains((n - x) % n));
            prop_assert_eq!(b.contains(x), b.member_direct(x));
        }
    }
}
