//! Discrete midpoint operators on products of oriented trees, the
//! midpoint-convexity test, and constructors for the four named function
//! families (L♮, UJ, strongly tree-submodular, alternating L-convex).

use once_cell::sync::OnceCell;

use crate::graph::{GraphError, OrientedGraph, path_graph};
use crate::lconvex::{LChecker, LWitness, LcError};
use crate::rational::ExtRat;

#[derive(Debug, thiserror::Error)]
pub enum MidpointError {
    #[error("invalid bounds: [{0}, {1}]")]
    BadBounds(i64, i64),
    #[error("factor is not a tree")]
    NotATree,
    #[error("factor is not oriented")]
    NotOriented,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Which named orientation a factor carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrientationKind {
    Linear,
    Alternating,
    Rooted,
    Zigzag,
    Custom,
}

/// The unique pair `(u, v)` on the `x`–`y` path of an oriented tree with
/// `d(x,u) = d(v,y)` and `d(u,v) ≤ 1`, returned as `(floor, ceil)`: when
/// `u ≠ v` the ceiling is the endpoint that is higher in the edge
/// orientation, the floor the lower one.
pub fn tree_midpoints(tree: &OrientedGraph, x: usize, y: usize) -> (usize, usize) {
    let path = tree_path(tree, x, y);
    let d = path.len() - 1;
    if d % 2 == 0 {
        let m = path[d / 2];
        return (m, m);
    }
    let u = path[d / 2];
    let v = path[d / 2 + 1];
    if tree.order().leq(u, v) {
        (u, v)
    } else {
        debug_assert!(tree.order().leq(v, u));
        (v, u)
    }
}

/// The unique path between two vertices of a tree, endpoints included.
fn tree_path(tree: &OrientedGraph, x: usize, y: usize) -> Vec<usize> {
    let mut parent = vec![usize::MAX; tree.len()];
    parent[x] = x;
    let mut queue = std::collections::VecDeque::from([x]);
    while let Some(u) = queue.pop_front() {
        if u == y {
            break;
        }
        for w in tree.neighbors(u).iter() {
            if parent[w] == usize::MAX {
                parent[w] = u;
                queue.push_back(w);
            }
        }
    }
    let mut path = vec![y];
    while *path.last().unwrap() != x {
        path.push(parent[*path.last().unwrap()]);
    }
    path.reverse();
    path
}

/// A product of finite oriented trees with componentwise midpoint
/// operators.
pub struct OrientedTreeProduct {
    factors: Vec<OrientedGraph>,
    kinds: Vec<OrientationKind>,
    sizes: Vec<usize>,
    /// Per factor: `(floor, ceil)` midpoint tables indexed by vertex pair.
    midpoints: Vec<Vec<(usize, usize)>>,
    product: OnceCell<OrientedGraph>,
    checker: OnceCell<LChecker>,
}

impl OrientedTreeProduct {
    pub fn new(
        factors: Vec<OrientedGraph>,
        kinds: Vec<OrientationKind>,
    ) -> Result<OrientedTreeProduct, MidpointError> {
        assert!(!factors.is_empty());
        assert_eq!(factors.len(), kinds.len());
        let mut midpoints = Vec::new();
        for t in &factors {
            if t.edges().len() + 1 != t.len() {
                return Err(MidpointError::NotATree);
            }
            if !t.is_oriented() {
                return Err(MidpointError::NotOriented);
            }
            let n = t.len();
            let mut table = vec![(0usize, 0usize); n * n];
            for x in 0..n {
                for y in 0..n {
                    table[x * n + y] = tree_midpoints(t, x, y);
                }
            }
            midpoints.push(table);
        }
        let sizes = factors.iter().map(|t| t.len()).collect();
        Ok(OrientedTreeProduct {
            factors,
            kinds,
            sizes,
            midpoints,
            product: OnceCell::new(),
            checker: OnceCell::new(),
        })
    }

    pub fn factors(&self) -> &[OrientedGraph] {
        &self.factors
    }

    pub fn kinds(&self) -> &[OrientationKind] {
        &self.kinds
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn dim(&self) -> usize {
        self.factors.len()
    }

    pub fn len(&self) -> usize {
        self.sizes.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The product graph with the componentwise orientation (cached).
    pub fn graph(&self) -> &OrientedGraph {
        self.product.get_or_init(|| {
            let mut g = self.factors[0].clone();
            for f in &self.factors[1..] {
                g = g.product(f);
            }
            g
        })
    }

    fn checker(&self) -> Result<&LChecker, LcError> {
        self.checker.get_or_try_init(|| LChecker::new(self.graph()))
    }

    pub fn encode(&self, tuple: &[usize]) -> usize {
        crate::semilattice::encode_product(&self.sizes, tuple)
    }

    pub fn decode(&self, id: usize) -> Vec<usize> {
        crate::semilattice::decode_product(&self.sizes, id)
    }

    /// Componentwise `(⌊(x+y)/2⌋, ⌈(x+y)/2⌉)` of two product vertices.
    pub fn midpoints(&self, x: usize, y: usize) -> (usize, usize) {
        let xs = self.decode(x);
        let ys = self.decode(y);
        let mut floor = Vec::with_capacity(self.dim());
        let mut ceil = Vec::with_capacity(self.dim());
        for i in 0..self.dim() {
            let n = self.sizes[i];
            let (f, c) = self.midpoints[i][xs[i] * n + ys[i]];
            floor.push(f);
            ceil.push(c);
        }
        (self.encode(&floor), self.encode(&ceil))
    }
}

/// A failed midpoint inequality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MidpointWitness {
    pub x: usize,
    pub y: usize,
    pub floor: usize,
    pub ceil: usize,
}

/// Checks `g(x) + g(y) ≥ g(⌊(x+y)/2⌋) + g(⌈(x+y)/2⌉)` over all pairs.
pub fn is_midpoint_convex(
    p: &OrientedTreeProduct,
    g: &[ExtRat],
) -> Option<MidpointWitness> {
    let n = p.len();
    assert_eq!(g.len(), n);
    for x in 0..n {
        for y in x..n {
            let (floor, ceil) = p.midpoints(x, y);
            let lhs = g[x].clone() + g[y].clone();
            let rhs = g[floor].clone() + g[ceil].clone();
            if lhs < rhs {
                return Some(MidpointWitness { x, y, floor, ceil });
            }
        }
    }
    None
}

/// A path on the integers of `[lo, hi]` with the given orientation rule.
fn integer_path(
    lo: i64,
    hi: i64,
    upper_of_edge: impl Fn(i64) -> i64,
) -> Result<OrientedGraph, MidpointError> {
    if lo > hi {
        return Err(MidpointError::BadBounds(lo, hi));
    }
    let k = (hi - lo + 1) as usize;
    let g = path_graph(k).with_names((lo..=hi).map(|i| i.to_string()).collect());
    let directed: Vec<(usize, usize)> = (0..k - 1)
        .map(|e| {
            let upper = upper_of_edge(lo + e as i64);
            let upper_idx = (upper - lo) as usize;
            let lower_idx = if upper_idx == e { e + 1 } else { e };
            (lower_idx, upper_idx)
        })
        .collect();
    Ok(g.with_directed_edges(&directed)?)
}

/// `⃗Z^n` restricted to a box: every factor a linearly oriented path
/// (larger integers higher). L-convex functions here are the L♮-convex
/// functions.
pub fn linear_grid(n: usize, bounds: (i64, i64)) -> Result<OrientedTreeProduct, MidpointError> {
    let factor = integer_path(bounds.0, bounds.1, |left| left + 1)?;
    OrientedTreeProduct::new(vec![factor; n], vec![OrientationKind::Linear; n])
}

/// `Ž^n` restricted to a box: the alternating orientation with odd
/// integers below their even neighbors. L-convex functions here are the
/// UJ-convex functions.
pub fn alternating_grid(
    n: usize,
    bounds: (i64, i64),
) -> Result<OrientedTreeProduct, MidpointError> {
    let factor = integer_path(bounds.0, bounds.1, |left| {
        if left.rem_euclid(2) == 0 {
            left
        } else {
            left + 1
        }
    })?;
    let p = OrientedTreeProduct::new(vec![factor; n], vec![OrientationKind::Alternating; n])?;
    // Sanity: on every edge the even integer is the upper endpoint.
    for f in p.factors() {
        for (e, &(lo, up)) in f.edges().iter().enumerate() {
            let (lower, upper) = if f.orientation().unwrap()[e] { (lo, up) } else { (up, lo) };
            let upper_val: i64 = f.name(upper).parse().unwrap();
            let lower_val: i64 = f.name(lower).parse().unwrap();
            assert_eq!(upper_val.rem_euclid(2), 0, "even vertices must be upper");
            assert_eq!(lower_val.rem_euclid(2), 1, "odd vertices must be lower");
        }
    }
    Ok(p)
}

/// A product of rooted trees oriented from the roots (each root is the top
/// of its factor). L-convex functions here are the strongly
/// tree-submodular functions, with `⌈·⌉ = ⊔` and `⌊·⌋ = ⊓`.
pub fn rooted_tree_product(
    trees: &[(usize, Vec<(usize, usize)>, usize)],
) -> Result<OrientedTreeProduct, MidpointError> {
    let mut factors = Vec::new();
    for (n, edges, root) in trees {
        let g = OrientedGraph::new(*n, edges, crate::rational::rat_int(1))?;
        // Orient every edge with the endpoint nearer the root on top.
        let directed: Vec<(usize, usize)> = g
            .edges()
            .iter()
            .map(|&(u, v)| {
                if g.hop_dist(u, *root) < g.hop_dist(v, *root) {
                    (v, u)
                } else {
                    (u, v)
                }
            })
            .collect();
        factors.push(g.with_directed_edges(&directed)?);
    }
    let kinds = vec![OrientationKind::Rooted; factors.len()];
    OrientedTreeProduct::new(factors, kinds)
}

/// A product of trees with the zigzag (bipartite) orientation: one color
/// class entirely above the other. L-convex functions here are the
/// alternating L-convex functions, with `⌈·⌉ = •` (upper color) and
/// `⌊·⌋ = ∘`.
pub fn zigzag_tree_product(
    trees: &[(usize, Vec<(usize, usize)>)],
) -> Result<OrientedTreeProduct, MidpointError> {
    let mut factors = Vec::new();
    for (n, edges) in trees {
        let g = OrientedGraph::new(*n, edges, crate::rational::rat_int(1))?;
        // Two-color from vertex 0; the class of vertex 0 is the upper one.
        let mut color = vec![usize::MAX; g.len()];
        color[0] = 0;
        let mut queue = std::collections::VecDeque::from([0usize]);
        while let Some(u) = queue.pop_front() {
            for w in g.neighbors(u).iter() {
                if color[w] == usize::MAX {
                    color[w] = 1 - color[u];
                    queue.push_back(w);
                }
            }
        }
        let directed: Vec<(usize, usize)> = g
            .edges()
            .iter()
            .map(|&(u, v)| if color[u] == 0 { (v, u) } else { (u, v) })
            .collect();
        factors.push(g.with_directed_edges(&directed)?);
    }
    let kinds = vec![OrientationKind::Zigzag; factors.len()];
    OrientedTreeProduct::new(factors, kinds)
}

/// Agreement report between the two convexity criteria.
#[derive(Clone, Debug)]
pub struct EquivalenceReport {
    pub midpoint_convex: bool,
    pub l_convex: bool,
    pub midpoint_witness: Option<MidpointWitness>,
    pub l_witness: Option<LWitness>,
}

/// Runs both the midpoint-convexity and the L-convexity tests and asserts
/// the verdicts coincide; on disagreement the report carries both
/// witnesses.
pub fn equivalence_check(
    p: &OrientedTreeProduct,
    g: &[ExtRat],
) -> Result<EquivalenceReport, LcError> {
    let midpoint_witness = is_midpoint_convex(p, g);
    let l_witness = p.checker()?.check(g);
    let report = EquivalenceReport {
        midpoint_convex: midpoint_witness.is_none(),
        l_convex: l_witness.is_none(),
        midpoint_witness,
        l_witness,
    };
    assert_eq!(
        report.midpoint_convex, report.l_convex,
        "midpoint convexity and L-convexity disagree: {report:?}"
    );
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn fin(n: i64) -> ExtRat {
        ExtRat::from_int(n)
    }

    #[test]
    fn linear_path_midpoints_round() {
        let p = linear_grid(1, (0, 5)).unwrap();
        let t = &p.factors()[0];
        assert_eq!(tree_midpoints(t, 1, 4), (2, 3));
        assert_eq!(tree_midpoints(t, 4, 1), (2, 3));
        assert_eq!(tree_midpoints(t, 2, 2), (2, 2));
        assert_eq!(tree_midpoints(t, 0, 4), (2, 2));
    }

    #[test]
    fn alternating_path_midpoints_prefer_even_ceiling() {
        let p = alternating_grid(1, (0, 5)).unwrap();
        let t = &p.factors()[0];
        // Midpoint pair of (1, 4) is {2, 3}; the even vertex 2 is the
        // ceiling under the alternating orientation.
        assert_eq!(tree_midpoints(t, 1, 4), (3, 2));
        assert_eq!(tree_midpoints(t, 0, 3), (1, 2));
    }

    #[test]
    fn midpoint_symmetry_and_adjacency() {
        for p in [
            linear_grid(2, (0, 3)).unwrap(),
            alternating_grid(2, (0, 3)).unwrap(),
        ] {
            let n = p.len();
            for x in 0..n {
                for y in 0..n {
                    let (f, c) = p.midpoints(x, y);
                    assert_eq!((f, c), p.midpoints(y, x));
                    let (fs, cs) = (p.decode(f), p.decode(c));
                    for i in 0..p.dim() {
                        assert!(
                            fs[i] == cs[i] || p.factors()[i].adjacent(fs[i], cs[i]),
                            "floor and ceiling must coincide or be adjacent per coordinate"
                        );
                    }
                    if f != c {
                        assert!(p.graph().sq_leq(f, c), "floor must sit below ceiling");
                    }
                }
            }
        }
    }

    #[test]
    fn separable_convex_is_midpoint_convex_on_linear_grid() {
        let p = linear_grid(2, (0, 4)).unwrap();
        let g: Vec<ExtRat> = (0..p.len())
            .map(|v| {
                let t = p.decode(v);
                fin((t[0] as i64 - 3).abs() + (t[1] as i64 - 1).abs())
            })
            .collect();
        assert!(is_midpoint_convex(&p, &g).is_none());
        let report = equivalence_check(&p, &g).unwrap();
        assert!(report.midpoint_convex && report.l_convex);
    }

    #[test]
    fn valley_violation_on_path() {
        let p = linear_grid(1, (0, 2)).unwrap();
        let g = vec![fin(0), fin(1), fin(0)];
        let w = is_midpoint_convex(&p, &g).unwrap();
        assert_eq!((w.x, w.y), (0, 2));
        equivalence_check(&p, &g).unwrap();
    }

    #[test]
    fn linf_ball_indicator_on_alternating_grid() {
        let p = alternating_grid(2, (0, 4)).unwrap();
        // Indicator of the ℓ∞-ball of radius 1 around (2,2).
        let g: Vec<ExtRat> = (0..p.len())
            .map(|v| {
                let t = p.decode(v);
                let d = (t[0] as i64 - 2).abs().max((t[1] as i64 - 2).abs());
                if d <= 1 {
                    ExtRat::zero()
                } else {
                    ExtRat::Inf
                }
            })
            .collect();
        assert!(is_midpoint_convex(&p, &g).is_none());
        let report = equivalence_check(&p, &g).unwrap();
        assert!(report.midpoint_convex);
    }

    #[test]
    fn rooted_star_product_distance_is_tree_submodular() {
        // Two star factors with 3 leaves each, rooted at the center.
        let star = (4usize, vec![(0, 1), (0, 2), (0, 3)], 0usize);
        let p = rooted_tree_product(&[star.clone(), star]).unwrap();
        // Distance to a fixed product vertex is L-convex, hence strongly
        // tree-submodular.
        let g: Vec<ExtRat> = (0..p.len())
            .map(|v| fin(p.graph().hop_dist(v, 5) as i64))
            .collect();
        let report = equivalence_check(&p, &g).unwrap();
        assert!(report.midpoint_convex && report.l_convex);
    }

    #[test]
    fn zigzag_tree_matches_alternating_path() {
        // A zigzag path is the alternating orientation up to which class is
        // on top.
        let p = zigzag_tree_product(&[(4, vec![(0, 1), (1, 2), (2, 3)])]).unwrap();
        let t = &p.factors()[0];
        // Vertex 0's class {0, 2} is upper.
        assert_eq!(tree_midpoints(t, 0, 3), (1, 2));
        let report = equivalence_check(
            &p,
            &[fin(2), fin(1), fin(0), fin(1)],
        )
        .unwrap();
        assert!(report.midpoint_convex);
    }

    #[test]
    fn random_equivalence_on_small_grids() {
        // Deterministic pseudo-random tables: verdicts of the two criteria
        // must agree on every sample.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for p in [
            linear_grid(2, (0, 2)).unwrap(),
            alternating_grid(2, (0, 2)).unwrap(),
        ] {
            let mut agree_true = 0;
            for _ in 0..200 {
                let g: Vec<ExtRat> = (0..p.len())
                    .map(|_| ExtRat::Finite(rat(rng.gen_range(0..6), 2)))
                    .collect();
                let report = equivalence_check(&p, &g).unwrap();
                if report.midpoint_convex {
                    agree_true += 1;
                }
            }
            // Not all random tables should be convex, and equivalence held
            // throughout (equivalence_check asserts).
            assert!(agree_true < 200);
        }
    }

    #[test]
    fn verdict_invariant_under_shift_and_scale() {
        let p = alternating_grid(1, (0, 4)).unwrap();
        let g = vec![fin(3), fin(1), fin(0), fin(2), fin(4)];
        let shifted: Vec<ExtRat> = g.iter().map(|v| v.clone() + fin(7)).collect();
        let scaled: Vec<ExtRat> = g.iter().map(|v| v.scale(&rat(3, 2))).collect();
        let base = is_midpoint_convex(&p, &g).is_none();
        assert_eq!(is_midpoint_convex(&p, &shifted).is_none(), base);
        assert_eq!(is_midpoint_convex(&p, &scaled).is_none(), base);
    }
}
