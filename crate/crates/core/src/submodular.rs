//! Submodularity on modular semilattices: valuations, the fractional join
//! built from exact convex hulls and normal-cone measures, the left/right/
//! pseudo joins, and the specialized verifiers for polar spaces, S_k^n, and
//! S_2^n with valuations.

use crate::par::{find_violation, Strategy};
use crate::poset::PosetError;
use crate::rational::{rat_int, Cone, ExtRat, Rat, Slope};
use crate::semilattice::{
    decode_product, encode_product, power, s_k, Semilattice,
};
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SubmodularError {
    #[error("semilattice is not a polar space: {0}")]
    NotPolar(String),
    #[error("invalid alpha parameters: {0}")]
    BadAlpha(String),
    #[error(transparent)]
    Poset(#[from] PosetError),
}

/// A counterexample to the valuation conditions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ValuationViolation {
    /// `p` is covered by `q` but `v(p) >= v(q)`.
    NotStrict { p: usize, q: usize },
    /// `p∨q` exists but `v(p)+v(q) != v(p∧q)+v(p∨q)`.
    NotModular { p: usize, q: usize },
}

/// A real-valued valuation of a semilattice, stored per element id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Valuation {
    pub values: Vec<Rat>,
}

impl Valuation {
    /// The rank function as a valuation.
    pub fn rank(l: &Semilattice) -> Valuation {
        Valuation { values: (0..l.len()).map(|p| rat_int(l.rank(p) as i64)).collect() }
    }

    pub fn get(&self, p: usize) -> &Rat {
        &self.values[p]
    }

    /// Checks strict monotonicity on covers and the modular equality on
    /// joinable pairs; `None` means valid.
    pub fn validate(&self, l: &Semilattice) -> Option<ValuationViolation> {
        for &(p, q) in l.poset().covers() {
            if self.values[p] >= self.values[q] {
                return Some(ValuationViolation::NotStrict { p, q });
            }
        }
        for p in 0..l.len() {
            for q in p..l.len() {
                if let Some(j) = l.join(p, q) {
                    let lhs = &self.values[p] + &self.values[q];
                    let rhs = &self.values[l.meet(p, q)] + &self.values[j];
                    if lhs != rhs {
                        return Some(ValuationViolation::NotModular { p, q });
                    }
                }
            }
        }
        None
    }
}

/// The point cloud `v(u;p,q)` over the metric interval and its exact
/// convex hull (counterclockwise vertex list).
#[derive(Clone, Debug)]
pub struct ConvInterval {
    /// `(u, x, y)` with `x = v(u∧p)−v(p∧q)`, `y = v(u∧q)−v(p∧q)`.
    pub points: Vec<(usize, Rat, Rat)>,
    pub hull: Vec<(Rat, Rat)>,
}

/// Computes the interval point cloud and its convex hull exactly.
pub fn conv_interval(l: &Semilattice, p: usize, q: usize, v: &Valuation) -> ConvInterval {
    let points = interval_points(l, p, q, v);
    let coords: Vec<(Rat, Rat)> = points.iter().map(|(_, x, y)| (x.clone(), y.clone())).collect();
    ConvInterval { hull: convex_hull(coords), points }
}

fn interval_points(l: &Semilattice, p: usize, q: usize, v: &Valuation) -> Vec<(usize, Rat, Rat)> {
    let base = v.get(l.meet(p, q));
    l.metric_interval(p, q)
        .into_iter()
        .map(|ip| (ip.u, v.get(ip.p_part) - base, v.get(ip.q_part) - base))
        .collect()
}

/// Monotone-chain convex hull; returns vertices counterclockwise, no
/// collinear points.
pub fn convex_hull(mut pts: Vec<(Rat, Rat)>) -> Vec<(Rat, Rat)> {
    pts.sort();
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let cross = |o: &(Rat, Rat), a: &(Rat, Rat), b: &(Rat, Rat)| -> Rat {
        (&a.0 - &o.0) * (&b.1 - &o.1) - (&a.1 - &o.1) * (&b.0 - &o.0)
    };
    let build = |iter: &mut dyn Iterator<Item = &(Rat, Rat)>| {
        let mut chain: Vec<(Rat, Rat)> = Vec::new();
        for pt in iter {
            while chain.len() >= 2
                && cross(&chain[chain.len() - 2], &chain[chain.len() - 1], pt) <= Rat::zero()
            {
                chain.pop();
            }
            chain.push(pt.clone());
        }
        chain
    };
    let mut lower = build(&mut pts.iter());
    let mut upper = build(&mut pts.iter().rev());
    lower.pop();
    upper.pop();
    lower.append(&mut upper);
    lower
}

/// One term of a fractional join: element, cone weight, and the normal
/// cone itself (slope range).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FracTerm {
    pub element: usize,
    pub weight: Rat,
    pub cone: Cone,
}

/// The fractional join `Σ [C(u;p,q)] u` over the maximal extreme points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FracJoin {
    pub terms: Vec<FracTerm>,
}

impl FracJoin {
    /// `Σ [C(u)] f(u)`.
    pub fn apply(&self, f: &[ExtRat]) -> ExtRat {
        let mut acc = ExtRat::zero();
        for t in &self.terms {
            acc += f[t.element].scale(&t.weight);
        }
        acc
    }

    pub fn weight_sum(&self) -> Rat {
        self.terms.iter().map(|t| t.weight.clone()).fold(Rat::zero(), |a, b| a + b)
    }

    /// Weights merged by element.
    pub fn as_map(&self) -> BTreeMap<usize, Rat> {
        let mut m = BTreeMap::new();
        for t in &self.terms {
            *m.entry(t.element).or_insert_with(Rat::zero) += &t.weight;
        }
        m
    }
}

/// Builds the fractional join of `(p,q)`: Pareto-maximal hull vertices of
/// the interval point cloud, each weighted by the measure of its normal
/// cone. Weights always sum to 1.
pub fn fractional_join(l: &Semilattice, p: usize, q: usize, v: &Valuation) -> FracJoin {
    let points = interval_points(l, p, q, v);
    // Pareto-maximal coordinates (strictly increasing x, decreasing y).
    let mut pareto: Vec<(Rat, Rat)> = Vec::new();
    for (_, x, y) in &points {
        let dominated = points
            .iter()
            .any(|(_, x2, y2)| (x2 > x && y2 >= y) || (x2 >= x && y2 > y));
        if !dominated && !pareto.iter().any(|(a, b)| a == x && b == y) {
            pareto.push((x.clone(), y.clone()));
        }
    }
    pareto.sort();
    // Keep only hull vertices: walking left to right the boundary turns
    // strictly clockwise; collinear middle points are dropped.
    let mut hull: Vec<(Rat, Rat)> = Vec::new();
    for pt in pareto {
        while hull.len() >= 2 {
            let a = &hull[hull.len() - 2];
            let b = &hull[hull.len() - 1];
            let cross = (&b.0 - &a.0) * (&pt.1 - &b.1) - (&b.1 - &a.1) * (&pt.0 - &b.0);
            if cross >= Rat::zero() {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    let k = hull.len();
    // Boundary slopes between consecutive vertices, strictly decreasing.
    let ts: Vec<Slope> = (0..k.saturating_sub(1))
        .map(|i| {
            let (x1, y1) = &hull[i];
            let (x2, y2) = &hull[i + 1];
            Slope::from_rat((x2 - x1) / (y1 - y2))
        })
        .collect();
    let mut terms = Vec::with_capacity(k);
    for (i, (x, y)) in hull.iter().enumerate() {
        let lo = if i + 1 == k { Slope::zero() } else { ts[i].clone() };
        let hi = if i == 0 { Slope::Inf } else { ts[i - 1].clone() };
        let cone = Cone::new(lo, hi);
        let matches: Vec<usize> = points
            .iter()
            .filter(|(_, a, b)| a == x && b == y)
            .map(|&(u, _, _)| u)
            .collect();
        assert_eq!(matches.len(), 1, "maximal extreme point must identify a unique element");
        terms.push(FracTerm { element: matches[0], weight: cone.weight(), cone });
    }
    let fj = FracJoin { terms };
    debug_assert_eq!(fj.weight_sum(), Rat::one());
    fj
}

/// True iff `lhs >= rhs` fails, under the convention that an infinite left
/// side satisfies the inequality.
pub fn violates(lhs: &ExtRat, rhs: &ExtRat) -> bool {
    match (lhs, rhs) {
        (ExtRat::Inf, _) => false,
        (ExtRat::Finite(_), ExtRat::Inf) => true,
        (ExtRat::Finite(l), ExtRat::Finite(r)) => r > l,
    }
}

/// Precomputed fractional joins for every pair of a fixed semilattice and
/// valuation; submodularity checks against it are table lookups.
pub struct SubmodularOracle {
    n: usize,
    meets: Vec<usize>,
    fj: Vec<FracJoin>,
}

impl SubmodularOracle {
    pub fn new(l: &Semilattice, v: &Valuation) -> SubmodularOracle {
        assert!(v.validate(l).is_none(), "invalid valuation");
        let n = l.len();
        let meets: Vec<usize> =
            (0..n * n).map(|i| l.meet(i / n, i % n)).collect();
        // Force the distance cache before fanning out.
        let _ = l.covering_distance(0, 0);
        let fj = crate::par::map_collect(Strategy::default(), n * n, |i| {
            fractional_join(l, i / n, i % n, v)
        });
        SubmodularOracle { n, meets, fj }
    }

    pub fn frac_join(&self, p: usize, q: usize) -> &FracJoin {
        &self.fj[p * self.n + q]
    }

    pub fn meet(&self, p: usize, q: usize) -> usize {
        self.meets[p * self.n + q]
    }

    /// First pair violating the submodular inequality, scanning pairs in
    /// row-major order.
    pub fn check(&self, f: &[ExtRat]) -> Option<(usize, usize)> {
        assert_eq!(f.len(), self.n);
        find_violation(Strategy::default(), self.n, |p| {
            for q in p + 1..self.n {
                let lhs = f[p].clone() + &f[q];
                let rhs = f[self.meet(p, q)].clone() + self.frac_join(p, q).apply(f);
                if violates(&lhs, &rhs) {
                    return Some((p, q));
                }
            }
            None
        })
    }
}

/// Submodularity of `f` with respect to valuation `v`; returns the first
/// violating pair if any.
pub fn is_submodular(l: &Semilattice, f: &[ExtRat], v: &Valuation) -> Option<(usize, usize)> {
    SubmodularOracle::new(l, v).check(f)
}

/// `p ∨_L q`: join of `p` with the unique maximal `u ∈ [p∧q, q]` whose
/// join with `p` exists.
pub fn left_join(l: &Semilattice, p: usize, q: usize) -> usize {
    let m = l.meet(p, q);
    let candidates: Vec<usize> = l
        .poset()
        .interval(m, q)
        .iter()
        .filter(|&u| l.join(p, u).is_some())
        .collect();
    let &u = candidates.iter().max_by_key(|&&u| l.rank(u)).expect("p∧q is a candidate");
    debug_assert!(candidates.iter().all(|&c| l.leq(c, u)), "maximal joinable element not unique");
    l.join(p, u).unwrap()
}

/// `p ∨_R q`: join of `q` with the unique maximal `v ∈ [p∧q, p]` whose
/// join with `q` exists. Coincides with `∨_L(q,p)`.
pub fn right_join(l: &Semilattice, p: usize, q: usize) -> usize {
    let m = l.meet(p, q);
    let candidates: Vec<usize> = l
        .poset()
        .interval(m, p)
        .iter()
        .filter(|&u| l.join(q, u).is_some())
        .collect();
    let &u = candidates.iter().max_by_key(|&&u| l.rank(u)).expect("p∧q is a candidate");
    let r = l.join(q, u).unwrap();
    debug_assert_eq!(r, left_join(l, q, p));
    r
}

/// `p ⊔ q = (p ∨_L q) ∧ (p ∨_R q)`.
pub fn pseudo_join(l: &Semilattice, p: usize, q: usize) -> usize {
    l.meet(left_join(l, p, q), right_join(l, p, q))
}

/// The intersected operation cone `C(θ) = ∩_{p,q} C(θ(p,q); p,q)`;
/// `None` when the intersection has no interior.
pub fn operation_cone(
    l: &Semilattice,
    v: &Valuation,
    theta: impl Fn(usize, usize) -> usize,
) -> Option<Cone> {
    let mut acc = Cone::full();
    for p in 0..l.len() {
        for q in 0..l.len() {
            let fj = fractional_join(l, p, q, v);
            let u = theta(p, q);
            let term = fj.terms.iter().find(|t| t.element == u)?;
            acc = acc.intersect(&term.cone)?;
        }
    }
    Some(acc)
}

/// Verdict of the polar three-way submodularity check.
#[derive(Clone, Debug)]
pub struct PolarVerdict {
    pub submodular: bool,
    /// First pair violating the pseudo-join inequality, when not submodular.
    pub witness: Option<(usize, usize)>,
}

/// Cached structure for submodularity checks on a polar space: frames,
/// pseudo-join tables, and the rank-valuation oracle.
pub struct PolarOps {
    l: Semilattice,
    pub frames: Vec<Vec<usize>>,
    pseudo: Vec<usize>,
    oracle: SubmodularOracle,
}

impl PolarOps {
    pub fn new(l: &Semilattice) -> Result<PolarOps, SubmodularError> {
        let report = l.is_polar_space()?;
        if !report.is_polar {
            return Err(SubmodularError::NotPolar(
                report.failure.unwrap_or_else(|| "axioms fail".into()),
            ));
        }
        let n = l.len();
        let pseudo = crate::par::map_collect(Strategy::default(), n * n, |i| {
            pseudo_join(l, i / n, i % n)
        });
        let oracle = SubmodularOracle::new(l, &Valuation::rank(l));
        Ok(PolarOps { l: l.clone(), frames: report.frames, pseudo, oracle })
    }

    pub fn pseudo_join(&self, p: usize, q: usize) -> usize {
        self.pseudo[p * self.l.len() + q]
    }

    /// Evaluates the three equivalent submodularity conditions (fractional
    /// join, pseudo join, bisubmodularity on every frame), asserts they
    /// agree, and returns the common verdict.
    pub fn check(&self, f: &[ExtRat]) -> PolarVerdict {
        let n = self.l.len();
        let by_frac = self.oracle.check(f);
        let by_pseudo = find_violation(Strategy::default(), n, |p| {
            for q in p + 1..n {
                let lhs = f[p].clone() + &f[q];
                let rhs = f[self.l.meet(p, q)].clone() + &f[self.pseudo_join(p, q)];
                if violates(&lhs, &rhs) {
                    return Some((p, q));
                }
            }
            None
        });
        let by_frames = self.frames.iter().find_map(|frame| {
            for (i, &p) in frame.iter().enumerate() {
                for &q in &frame[i + 1..] {
                    let lhs = f[p].clone() + &f[q];
                    let rhs = f[self.l.meet(p, q)].clone() + &f[self.pseudo_join(p, q)];
                    if violates(&lhs, &rhs) {
                        return Some((p, q));
                    }
                }
            }
            None
        });
        assert_eq!(
            by_frac.is_none(),
            by_pseudo.is_none(),
            "fractional-join and pseudo-join verdicts disagree"
        );
        assert_eq!(
            by_pseudo.is_none(),
            by_frames.is_none(),
            "pseudo-join and frame verdicts disagree"
        );
        PolarVerdict { submodular: by_pseudo.is_none(), witness: by_pseudo }
    }
}

/// Three-way polar submodularity check; errors when `l` is not polar.
pub fn is_polar_submodular(
    l: &Semilattice,
    f: &[ExtRat],
) -> Result<PolarVerdict, SubmodularError> {
    Ok(PolarOps::new(l)?.check(f))
}

/// k-submodularity of `f` on `S_k^n` via the `∧`/`⊔` inequality, with
/// agreement against rank-valuation submodularity asserted.
pub fn is_k_submodular(l: &Semilattice, f: &[ExtRat]) -> Option<(usize, usize)> {
    let n = l.len();
    let by_pseudo = find_violation(Strategy::default(), n, |p| {
        for q in p + 1..n {
            let lhs = f[p].clone() + &f[q];
            let rhs = f[l.meet(p, q)].clone() + &f[pseudo_join(l, p, q)];
            if violates(&lhs, &rhs) {
                return Some((p, q));
            }
        }
        None
    });
    let by_frac = is_submodular(l, f, &Valuation::rank(l));
    assert_eq!(by_pseudo.is_none(), by_frac.is_none(), "k-submodular verdicts disagree");
    by_pseudo
}

/// `S_2^n` as an iterated product; ids are base-3 with the first component
/// most significant. Digits: 0 = `0`, 1 = `+`, 2 = `-`.
pub fn s2_power(n: usize) -> Semilattice {
    power(&s_k(2), n)
}

fn s2_sqcup(x: usize, y: usize) -> usize {
    if x == y || y == 0 {
        x
    } else if x == 0 {
        y
    } else {
        0
    }
}

fn s2_sqcup_plus(x: usize, y: usize) -> usize {
    if x != y && x != 0 && y != 0 {
        1 // {+,-} maps to +
    } else {
        s2_sqcup(x, y)
    }
}

fn s2_vee_l(x: usize, y: usize) -> usize {
    if x != 0 {
        x
    } else {
        y
    }
}

/// Applies `⊔_+` to the first `i` components and `op` to the rest.
fn s2n_mixed(
    n: usize,
    i: usize,
    op: fn(usize, usize) -> usize,
    p: usize,
    q: usize,
) -> usize {
    let sizes = vec![3; n];
    let pd = decode_product(&sizes, p);
    let qd = decode_product(&sizes, q);
    let digits: Vec<usize> = (0..n)
        .map(|c| if c < i { s2_sqcup_plus(pd[c], qd[c]) } else { op(pd[c], qd[c]) })
        .collect();
    encode_product(&sizes, &digits)
}

/// The valuation `v_α` on `S_2^n`: `v_i(0)=0`, `v_i(+)=1`, `v_i(-)=α_i`.
pub fn alpha_valuation(alpha: &[Rat]) -> Result<Valuation, SubmodularError> {
    let n = alpha.len();
    if n == 0 {
        return Err(SubmodularError::BadAlpha("empty parameter vector".into()));
    }
    for i in 0..n {
        if alpha[i] <= Rat::zero() || alpha[i] > Rat::one() {
            return Err(SubmodularError::BadAlpha(format!("alpha[{i}] out of (0,1]")));
        }
        if i > 0 && alpha[i - 1] > alpha[i] {
            return Err(SubmodularError::BadAlpha("parameters must be nondecreasing".into()));
        }
    }
    let sizes = vec![3; n];
    let values = (0..3usize.pow(n as u32))
        .map(|id| {
            decode_product(&sizes, id)
                .iter()
                .enumerate()
                .map(|(i, &d)| match d {
                    0 => Rat::zero(),
                    1 => Rat::one(),
                    _ => alpha[i].clone(),
                })
                .fold(Rat::zero(), |a, b| a + b)
        })
        .collect();
    Ok(Valuation { values })
}

/// Element-weight map of the closed-form fractional join operation of
/// `S_2^n` under `v_α`, evaluated at `(p,q)`:
/// `Σ_{i<n} (1/(1+α_i) − 1/(1+α_{i+1}))(∨_L^i + ∨_R^i) + (1−α_n)/(1+α_n) ⊔^n`
/// with `α_0 = 0`.
pub fn alpha_frac_join_formula(alpha: &[Rat], p: usize, q: usize) -> BTreeMap<usize, Rat> {
    let n = alpha.len();
    let a = |i: usize| if i == 0 { Rat::zero() } else { alpha[i - 1].clone() };
    let mut map: BTreeMap<usize, Rat> = BTreeMap::new();
    let mut add = |e: usize, w: Rat| {
        if !w.is_zero() {
            *map.entry(e).or_insert_with(Rat::zero) += w;
        }
    };
    for i in 0..n {
        let w = (Rat::one() + a(i)).recip() - (Rat::one() + a(i + 1)).recip();
        add(s2n_mixed(n, i, s2_vee_l, p, q), w.clone());
        add(s2n_mixed(n, i, |x, y| s2_vee_l(y, x), p, q), w);
    }
    let w = (Rat::one() - a(n)) / (Rat::one() + a(n));
    add(s2n_mixed(n, n, s2_sqcup, p, q), w);
    map
}

/// α-bisubmodularity of `f` on `S_2^n`, verified two ways (the explicit
/// `⊔^i` inequality and submodularity under `v_α`) with agreement asserted;
/// the closed-form fractional join is also compared termwise against the
/// cone construction for every pair.
pub fn is_alpha_bisubmodular(
    f: &[ExtRat],
    alpha: &[Rat],
) -> Result<Option<(usize, usize)>, SubmodularError> {
    let n = alpha.len();
    let l = s2_power(n);
    let v = alpha_valuation(alpha)?;
    let oracle = SubmodularOracle::new(&l, &v);
    let m = l.len();
    assert_eq!(f.len(), m);
    let a = |i: usize| {
        if i == 0 {
            Rat::zero()
        } else if i == n + 1 {
            Rat::one()
        } else {
            alpha[i - 1].clone()
        }
    };
    let mut witness = None;
    for p in 0..m {
        for q in p..m {
            assert_eq!(
                oracle.frac_join(p, q).as_map(),
                alpha_frac_join_formula(alpha, p, q),
                "closed-form fractional join mismatch at ({p},{q})"
            );
            let lhs = f[p].clone() + &f[q];
            let mut rhs = f[l.meet(p, q)].clone();
            for i in 0..=n {
                let w = a(i + 1) - a(i);
                rhs += f[s2n_mixed(n, i, s2_sqcup, p, q)].scale(&w);
            }
            if violates(&lhs, &rhs) && witness.is_none() {
                witness = Some((p, q));
            }
        }
    }
    let by_valuation = oracle.check(f);
    assert_eq!(witness.is_none(), by_valuation.is_none(), "alpha-bisubmodular verdicts disagree");
    Ok(witness)
}

/// A product of semilattices with componentwise valuations, for checking
/// the cone-intersection decomposition of the fractional join.
pub struct ProductStructure {
    pub components: Vec<(Semilattice, Valuation)>,
    pub product: Semilattice,
    pub valuation: Valuation,
    pub sizes: Vec<usize>,
}

impl ProductStructure {
    pub fn new(components: Vec<(Semilattice, Valuation)>) -> ProductStructure {
        assert!(!components.is_empty());
        let sizes: Vec<usize> = components.iter().map(|(l, _)| l.len()).collect();
        let product = components[1..]
            .iter()
            .fold(components[0].0.clone(), |acc, (l, _)| acc.product(l));
        let values = (0..product.len())
            .map(|id| {
                decode_product(&sizes, id)
                    .iter()
                    .zip(&components)
                    .map(|(&d, (_, v))| v.get(d).clone())
                    .fold(Rat::zero(), |a, b| a + b)
            })
            .collect();
        ProductStructure { components, product, valuation: Valuation { values }, sizes }
    }

    /// Checks that the direct fractional join of `(p,q)` on the product
    /// equals the sum over componentwise extreme choices weighted by
    /// intersected cones.
    pub fn frac_join_decomposes(&self, p: &[usize], q: &[usize]) -> bool {
        let pid = encode_product(&self.sizes, p);
        let qid = encode_product(&self.sizes, q);
        let direct = fractional_join(&self.product, pid, qid, &self.valuation).as_map();
        let per_comp: Vec<FracJoin> = self
            .components
            .iter()
            .zip(p.iter().zip(q))
            .map(|((l, v), (&pi, &qi))| fractional_join(l, pi, qi, v))
            .collect();
        let mut composed: BTreeMap<usize, Rat> = BTreeMap::new();
        let mut stack: Vec<(usize, Vec<usize>, Cone)> = vec![(0, Vec::new(), Cone::full())];
        while let Some((i, digits, cone)) = stack.pop() {
            if i == per_comp.len() {
                let id = encode_product(&self.sizes, &digits);
                *composed.entry(id).or_insert_with(Rat::zero) += cone.weight();
                continue;
            }
            for t in &per_comp[i].terms {
                if let Some(c) = cone.intersect(&t.cone) {
                    let mut d = digits.clone();
                    d.push(t.element);
                    stack.push((i + 1, d, c));
                }
            }
        }
        composed.retain(|_, w| !w.is_zero());
        direct == composed
    }
}

/// Convenience wrapper over [`ProductStructure::frac_join_decomposes`].
pub fn product_frac_join_check(
    components: Vec<(Semilattice, Valuation)>,
    p: &[usize],
    q: &[usize],
) -> bool {
    ProductStructure::new(components).frac_join_decomposes(p, q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::semilattice::s_kl;

    fn v_alpha_s2(a: Rat) -> Valuation {
        Valuation { values: vec![Rat::zero(), Rat::one(), a] }
    }

    fn fin(n: i64) -> ExtRat {
        ExtRat::from_int(n)
    }

    #[test]
    fn rank_is_valid_valuation() {
        for l in [s_k(3), s_kl(2, 2), s2_power(2)] {
            assert_eq!(Valuation::rank(&l).validate(&l), None);
        }
    }

    #[test]
    fn v_alpha_is_valid_and_constant_is_not() {
        let l = s_k(2);
        assert_eq!(v_alpha_s2(rat(1, 2)).validate(&l), None);
        let constant = Valuation { values: vec![Rat::zero(); 3] };
        assert!(matches!(
            constant.validate(&l),
            Some(ValuationViolation::NotStrict { .. })
        ));
    }

    #[test]
    fn conv_interval_s2() {
        let l = s_k(2);
        let ci = conv_interval(&l, 1, 2, &Valuation::rank(&l));
        let mut coords: Vec<(Rat, Rat)> =
            ci.points.iter().map(|(_, x, y)| (x.clone(), y.clone())).collect();
        coords.sort();
        assert_eq!(
            coords,
            vec![
                (Rat::zero(), Rat::zero()),
                (Rat::zero(), Rat::one()),
                (Rat::one(), Rat::zero())
            ]
        );
        assert_eq!(ci.hull.len(), 3);

        let ci = conv_interval(&l, 1, 2, &v_alpha_s2(rat(1, 2)));
        let mut coords: Vec<(Rat, Rat)> =
            ci.points.iter().map(|(_, x, y)| (x.clone(), y.clone())).collect();
        coords.sort();
        assert_eq!(
            coords,
            vec![
                (Rat::zero(), Rat::zero()),
                (Rat::zero(), rat(1, 2)),
                (Rat::one(), Rat::zero())
            ]
        );

        let ci = conv_interval(&l, 1, 1, &Valuation::rank(&l));
        assert_eq!(ci.points.len(), 1);
        assert_eq!(ci.points[0].1, Rat::zero());
    }

    #[test]
    fn frac_join_s2_rank() {
        let l = s_k(2);
        let fj = fractional_join(&l, 1, 2, &Valuation::rank(&l));
        let map = fj.as_map();
        assert_eq!(map[&1], rat(1, 2));
        assert_eq!(map[&2], rat(1, 2));
    }

    #[test]
    fn frac_join_s2_half() {
        let l = s_k(2);
        let fj = fractional_join(&l, 1, 2, &v_alpha_s2(rat(1, 2)));
        let map = fj.as_map();
        assert_eq!(map[&1], rat(2, 3));
        assert_eq!(map[&2], rat(1, 3));
    }

    #[test]
    fn frac_join_comparable() {
        let l = s_k(3);
        let fj = fractional_join(&l, 0, 2, &Valuation::rank(&l));
        assert_eq!(fj.terms.len(), 1);
        assert_eq!(fj.terms[0].element, 2);
        assert_eq!(fj.terms[0].weight, Rat::one());
    }

    #[test]
    fn distance_is_submodular() {
        // d on S_3 × S_3 as a function on the product semilattice.
        let s3 = s_k(3);
        let l = s3.product(&s3);
        let f: Vec<ExtRat> = (0..l.len())
            .map(|id| ExtRat::from_int(s3.covering_distance(id / 4, id % 4) as i64))
            .collect();
        assert_eq!(is_submodular(&l, &f, &Valuation::rank(&l)), None);
    }

    #[test]
    fn constants_are_submodular_and_peak_is_not() {
        let l = s_k(2);
        let c = vec![fin(7); 3];
        assert_eq!(is_submodular(&l, &c, &Valuation::rank(&l)), None);
        let peak = vec![fin(1), fin(0), fin(0)];
        assert_eq!(is_submodular(&l, &peak, &Valuation::rank(&l)), Some((1, 2)));
    }

    #[test]
    fn submodular_closed_under_nonneg_combination() {
        let s3 = s_k(3);
        let l = s3.product(&s3);
        let v = Valuation::rank(&l);
        let d: Vec<ExtRat> = (0..l.len())
            .map(|id| ExtRat::from_int(s3.covering_distance(id / 4, id % 4) as i64))
            .collect();
        let combo: Vec<ExtRat> = d
            .iter()
            .map(|x| x.scale(&rat(3, 2)) + ExtRat::from_int(5))
            .collect();
        assert_eq!(is_submodular(&l, &combo, &v), None);
    }

    #[test]
    fn join_ops_examples() {
        let l = s2_power(2);
        // (+,0) = 3, (0,-) = 2, (+,-) = 5
        assert_eq!(left_join(&l, 3, 2), 5);
        assert_eq!(pseudo_join(&l, 3, 2), 5);
        let s2 = s_k(2);
        assert_eq!(pseudo_join(&s2, 1, 2), 0);
        // comparable pairs
        assert_eq!(left_join(&s2, 0, 1), 1);
        assert_eq!(right_join(&s2, 0, 1), 1);
        assert_eq!(pseudo_join(&s2, 0, 1), 1);
    }

    #[test]
    fn lemma_identities_and_rank_equality() {
        for l in [s2_power(2), power(&s_k(3), 2), s_kl(2, 2)] {
            let v = Valuation::rank(&l);
            assert_eq!(v.validate(&l), None);
            for p in 0..l.len() {
                for q in 0..l.len() {
                    let vl = left_join(&l, p, q);
                    let vr = right_join(&l, p, q);
                    let sq = pseudo_join(&l, p, q);
                    // rank equality in polar spaces
                    assert_eq!(l.rank(vl), l.rank(vr));
                    // ∨_L ∨_L ∨_R = ∨_L
                    assert_eq!(left_join(&l, vl, vr), vl);
                    // (p ⊔ q) ⊔ p = p ∨_L q
                    assert_eq!(pseudo_join(&l, sq, p), vl);
                    // ∧_L ∧ ∧_R = ∧
                    let ml = l.meet(p, vr);
                    let mr = l.meet(q, vl);
                    assert_eq!(l.meet(ml, mr), l.meet(p, q));
                }
            }
        }
    }

    #[test]
    fn polar_three_way_agreement() {
        let s3 = s_k(3);
        let l = s3.product(&s3);
        let d: Vec<ExtRat> = (0..l.len())
            .map(|id| ExtRat::from_int(s3.covering_distance(id / 4, id % 4) as i64))
            .collect();
        let verdict = is_polar_submodular(&l, &d).unwrap();
        assert!(verdict.submodular);

        // constructed violation of the ⊔-inequality
        let l2 = s_k(2);
        let bad = vec![fin(1), fin(0), fin(0)];
        let verdict = is_polar_submodular(&l2, &bad).unwrap();
        assert!(!verdict.submodular);
        assert_eq!(verdict.witness, Some((1, 2)));
    }

    #[test]
    fn not_polar_rejected() {
        let chain = crate::semilattice::chain(2);
        let f = vec![fin(0); 3];
        assert!(matches!(
            is_polar_submodular(&chain, &f),
            Err(SubmodularError::NotPolar(_))
        ));
    }

    #[test]
    fn k_submodular_examples() {
        let l = power(&s_k(3), 2);
        // min-cut-style pairwise cost: the S_3 covering distance between
        // the two coordinates (2 for distinct nonzero labels, 1 across 0).
        // The plain 0/1 disagreement indicator is NOT k-submodular: at
        // p=(0,1), q=(2,0) it gives 0+0 < 0+f(2,1).
        let s3 = s_k(3);
        let f: Vec<ExtRat> = (0..l.len())
            .map(|id| fin(s3.covering_distance(id / 4, id % 4) as i64))
            .collect();
        assert_eq!(is_k_submodular(&l, &f), None);
        let indicator: Vec<ExtRat> = (0..l.len())
            .map(|id| {
                let (x, y) = (id / 4, id % 4);
                fin((x != y && x != 0 && y != 0) as i64)
            })
            .collect();
        assert!(is_k_submodular(&l, &indicator).is_some());
        let constant = vec![fin(2); l.len()];
        assert_eq!(is_k_submodular(&l, &constant), None);
        // indicator of the non-⊔-closed set {(1,0),(0,1)}: pseudo join is
        // (1,1), meet is (0,0), so 0+0 >= 1·(-1)+... fails with f = -1 on
        // the set and 0 elsewhere only if not ⊔-closed; use reward form.
        let mut g = vec![fin(0); l.len()];
        g[4] = fin(-1); // (1,0)
        g[1] = fin(-1); // (0,1)
        // first violation in scan order: (0,1) vs (0,2) collapses to (0,0)
        assert_eq!(is_k_submodular(&l, &g), Some((1, 2)));
    }

    #[test]
    fn alpha_valuation_values() {
        let v = alpha_valuation(&[rat(1, 2), rat(1, 1)]).unwrap();
        // x = (-,-) has id 2*3+2 = 8; v = 1/2 + 1
        assert_eq!(v.get(8), &rat(3, 2));
        let v1 = alpha_valuation(&[rat(1, 3)]).unwrap();
        assert_eq!(v1.get(1), &Rat::one());
        // all-ones alpha reduces to rank
        let vr = alpha_valuation(&[Rat::one(), Rat::one()]).unwrap();
        assert_eq!(vr, Valuation::rank(&s2_power(2)));
        assert!(alpha_valuation(&[rat(3, 2)]).is_err());
        assert!(alpha_valuation(&[Rat::one(), rat(1, 2)]).is_err());
    }

    #[test]
    fn alpha_formula_n1() {
        // fractional join of (+,-) under α=(1/2) merges to 2/3·(+) + 1/3·(-)
        // via (1/3)∨_L + (1/3)∨_R + (1/3)⊔¹.
        let map = alpha_frac_join_formula(&[rat(1, 2)], 1, 2);
        assert_eq!(map[&1], rat(2, 3));
        assert_eq!(map[&2], rat(1, 3));
    }

    #[test]
    fn alpha_bisubmodular_checks() {
        // distance-induced function on S_2^2
        let l = s2_power(2);
        let s2 = s_k(2);
        let d: Vec<ExtRat> = (0..l.len())
            .map(|id| ExtRat::from_int(s2.covering_distance(id / 3, id % 3) as i64))
            .collect();
        // the two verdicts must agree (asserted internally) whatever the
        // common verdict is
        let _ = is_alpha_bisubmodular(&d, &[rat(1, 2), Rat::one()]).unwrap();
        // α = 1 reduces to bisubmodularity
        let verdict = is_polar_submodular(&l, &d).unwrap();
        let w = is_alpha_bisubmodular(&d, &[Rat::one(), Rat::one()]).unwrap();
        assert_eq!(verdict.submodular, w.is_none());
    }

    #[test]
    fn s2_operation_cones() {
        let l = s_k(2);
        let a = rat(1, 2);
        let v = v_alpha_s2(a.clone());
        let cl = operation_cone(&l, &v, |p, q| left_join(&l, p, q)).unwrap();
        assert_eq!(cl, Cone::new(Slope::zero(), Slope::from_rat(a.clone())));
        let cr = operation_cone(&l, &v, |p, q| right_join(&l, p, q)).unwrap();
        assert_eq!(cr, Cone::new(Slope::from_rat(a.recip()), Slope::Inf));
        let cp = operation_cone(&l, &v, |p, q| {
            s2n_mixed(1, 1, s2_sqcup, p, q) // ⊔_+ on every component
        })
        .unwrap();
        assert_eq!(cp, Cone::new(Slope::from_rat(a.clone()), Slope::from_rat(a.recip())));
    }

    #[test]
    fn product_decomposition() {
        let s2 = s_k(2);
        let s3 = s_k(3);
        let ps = ProductStructure::new(vec![
            (s2.clone(), Valuation::rank(&s2)),
            (s2.clone(), Valuation::rank(&s2)),
        ]);
        for p in 0..9 {
            for q in 0..9 {
                let pd = decode_product(&ps.sizes, p);
                let qd = decode_product(&ps.sizes, q);
                assert!(ps.frac_join_decomposes(&pd, &qd));
            }
        }
        let ps = ProductStructure::new(vec![
            (s2.clone(), Valuation::rank(&s2)),
            (s3.clone(), Valuation::rank(&s3)),
        ]);
        for p in 0..12 {
            for q in 0..12 {
                let pd = decode_product(&ps.sizes, p);
                let qd = decode_product(&ps.sizes, q);
                assert!(ps.frac_join_decomposes(&pd, &qd));
            }
        }
        // single component is trivially consistent
        assert!(product_frac_join_check(
            vec![(s3.clone(), Valuation::rank(&s3))],
            &[1],
            &[2]
        ));
    }
}
