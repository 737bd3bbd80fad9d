//! Property-based invariants: exact arithmetic, fractional joins,
//! submodularity under reparametrization, midpoint operators on random
//! trees, descent optimality, and simplex location roundtrips.

use proptest::prelude::*;

use dcgraph_core::lconvex::{
    brute_force_minimum, sda_minimize, ProductSpace, SumFn, BRUTE_FORCE_BUDGET,
    LOCAL_STEP_BUDGET,
};
use dcgraph_core::lovasz::{lovasz_evaluate, EmbeddedComplex};
use dcgraph_core::midpoint::{alternating_grid, zigzag_tree_product};
use dcgraph_core::rational::{rat, rat_int, Cone, ExtRat, Rat, Slope};
use dcgraph_core::semilattice::s_kl;
use dcgraph_core::submodular::{fractional_join, is_submodular, Valuation};

fn small_rat() -> impl Strategy<Value = Rat> {
    (-40i64..40, 1i64..8).prop_map(|(n, d)| rat(n, d))
}

fn positive_rat() -> impl Strategy<Value = Rat> {
    (1i64..20, 1i64..6).prop_map(|(n, d)| rat(n, d))
}

fn ext_value() -> impl Strategy<Value = ExtRat> {
    prop_oneof![
        8 => small_rat().prop_map(ExtRat::Finite),
        1 => Just(ExtRat::Inf),
    ]
}

/// A random tree on `n` vertices given by a parent pick for each non-root.
fn tree_edges() -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
    (2usize..8).prop_flat_map(|n| {
        proptest::collection::vec(any::<u64>(), n - 1).prop_map(move |picks| {
            let edges = picks
                .iter()
                .enumerate()
                .map(|(i, &p)| ((p as usize) % (i + 1), i + 1))
                .collect();
            (n, edges)
        })
    })
}

proptest! {
    #[test]
    fn ext_rat_display_parse_roundtrip(x in ext_value()) {
        let back: ExtRat = x.to_string().parse().unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn ext_rat_addition_is_commutative_and_absorbs_inf(a in ext_value(), b in ext_value()) {
        prop_assert_eq!(a.clone() + &b, b.clone() + &a);
        prop_assert_eq!(a.clone() + ExtRat::Inf, ExtRat::Inf);
    }

    #[test]
    fn scaling_by_zero_annihilates_even_infinity(x in ext_value()) {
        prop_assert_eq!(x.scale(&rat_int(0)), ExtRat::from_int(0));
    }

    #[test]
    fn cone_weights_are_probabilities(a in positive_rat(), b in positive_rat()) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let degenerate = lo == hi;
        let cone = Cone::new(Slope::from_rat(lo), Slope::from_rat(hi));
        prop_assert!(cone.weight() >= rat_int(0) && cone.weight() <= rat_int(1));
        // A single ray has no interior, so intersection treats it as empty.
        if degenerate {
            prop_assert_eq!(cone.weight(), rat_int(0));
            prop_assert_eq!(cone.intersect(&Cone::full()), None);
        } else {
            prop_assert_eq!(cone.intersect(&Cone::full()), Some(cone.clone()));
        }
    }

    #[test]
    fn slope_reciprocal_is_an_involution(a in positive_rat()) {
        let s = Slope::from_rat(a);
        prop_assert_eq!(s.recip().recip(), s);
        prop_assert_eq!(Slope::Inf.recip(), Slope::zero());
    }

    #[test]
    fn fractional_join_weights_sum_to_one(p in 0usize..9, q in 0usize..9) {
        let l = s_kl(2, 2);
        let fj = fractional_join(&l, p, q, &Valuation::rank(&l));
        prop_assert_eq!(fj.weight_sum(), rat_int(1));
        for t in &fj.terms {
            prop_assert!(t.weight > rat_int(0));
        }
    }

    #[test]
    fn submodularity_survives_shift_scale_and_sums(
        f in proptest::collection::vec(ext_value(), 9),
        g in proptest::collection::vec(ext_value(), 9),
        shift in small_rat(),
        scale in positive_rat(),
    ) {
        let l = s_kl(2, 2);
        let v = Valuation::rank(&l);
        let verdict = is_submodular(&l, &f, &v).is_none();
        let transformed: Vec<ExtRat> = f
            .iter()
            .map(|x| x.scale(&scale) + ExtRat::Finite(shift.clone()))
            .collect();
        prop_assert_eq!(is_submodular(&l, &transformed, &v).is_none(), verdict);
        if verdict && is_submodular(&l, &g, &v).is_none() {
            let sum: Vec<ExtRat> = f.iter().zip(&g).map(|(a, b)| a.clone() + b).collect();
            prop_assert!(is_submodular(&l, &sum, &v).is_none());
        }
    }

    #[test]
    fn tree_midpoints_are_ordered_path_middles(
        (n, edges) in tree_edges(),
        xs in any::<u64>(),
        ys in any::<u64>(),
    ) {
        let p = zigzag_tree_product(&[(n, edges)]).unwrap();
        let t = &p.factors()[0];
        let (x, y) = ((xs as usize) % n, (ys as usize) % n);
        let (floor, ceil) = p.midpoints(x, y);
        prop_assert_eq!(p.midpoints(y, x), (floor, ceil));
        prop_assert!(p.graph().sq_leq(floor, ceil));
        // Both middles sit on the x-y path, splitting it evenly.
        let d = t.hop_dist(x, y);
        prop_assert_eq!(t.hop_dist(floor, ceil), d % 2);
        prop_assert_eq!(t.hop_dist(x, floor) + t.hop_dist(floor, y), d);
        prop_assert_eq!(t.hop_dist(x, ceil) + t.hop_dist(ceil, y), d);
        let half = t.hop_dist(x, floor).min(t.hop_dist(x, ceil));
        prop_assert_eq!(half, d / 2);
    }

    #[test]
    fn descent_reaches_global_minimum_of_distance_pulls(
        anchors in proptest::collection::vec((0usize..25, 1i64..5), 1..4),
        start in (0usize..5, 0usize..5),
    ) {
        let grid = alternating_grid(2, (0, 4)).unwrap();
        let space = ProductSpace::new(grid.factors().to_vec()).unwrap();
        let graph = space.graph();
        let values: Vec<ExtRat> = (0..graph.len())
            .map(|u| {
                let mut t = rat_int(0);
                for &(a, w) in &anchors {
                    t += graph.metric_dist(u, a) * rat_int(w);
                }
                ExtRat::Finite(t)
            })
            .collect();
        let g = SumFn::dense(&space, values);
        let trace = sda_minimize(&space, &g, &[start.0, start.1], LOCAL_STEP_BUDGET).unwrap();
        let (_, best, _) = brute_force_minimum(&space, &g, BRUTE_FORCE_BUDGET).unwrap();
        prop_assert_eq!(g.eval(&space, trace.terminal()), best);
    }

    #[test]
    fn simplex_location_roundtrips_and_extension_is_linear(
        nums in proptest::collection::vec(0i64..32, 2),
        f in proptest::collection::vec(-10i64..10, 25),
        lam in 1i64..5,
    ) {
        let e = EmbeddedComplex::union_jack(2, (0, 4)).unwrap();
        let x: Vec<Rat> = nums.iter().map(|&k| rat(k, 8)).collect();
        let point = e.locate_simplex(&x).unwrap();
        // Barycentric coefficients are a convex combination.
        let total: Rat = point.coefficients.iter().cloned().sum();
        prop_assert_eq!(total, rat_int(1));
        let table: Vec<ExtRat> = f.iter().map(|&v| ExtRat::from_int(v)).collect();
        let scaled: Vec<ExtRat> = table.iter().map(|v| v.scale(&rat_int(lam))).collect();
        let base = lovasz_evaluate(e.poset(), &table, &point).unwrap();
        let lifted = lovasz_evaluate(e.poset(), &scaled, &point).unwrap();
        prop_assert_eq!(lifted, base.scale(&rat_int(lam)));
    }
}
