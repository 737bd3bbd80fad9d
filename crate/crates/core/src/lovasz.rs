//! Lovász-extension evaluation on orthoscheme complexes of graded posets,
//! simplex location for the Euclidean-embeddable complexes, and exact
//! segment-convexity checking.
//!
//! Everything here is rational arithmetic: points are rational vectors,
//! breakpoints along segments are solved exactly, and piecewise linearity
//! of the extension between breakpoints is asserted rather than assumed.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};

use crate::midpoint::{
    alternating_grid, equivalence_check, linear_grid, MidpointError, OrientedTreeProduct,
};
use crate::lconvex::LcError;
use crate::poset::Poset;
use crate::rational::{rat_int, ExtRat, Rat};
use crate::semilattice::decode_product;

#[derive(Debug, thiserror::Error)]
pub enum LovaszError {
    #[error("support is not a chain")]
    NotAChain,
    #[error("point lies outside the embedded region")]
    OutOfRegion,
    #[error("complex kind does not support this operation")]
    UnsupportedComplex,
    #[error(transparent)]
    Midpoint(#[from] MidpointError),
    #[error(transparent)]
    LConvex(#[from] LcError),
}

/// A formal convex combination supported on a chain of poset elements.
#[derive(Clone, Debug)]
pub struct ChainPoint {
    pub chain: Vec<usize>,
    pub coefficients: Vec<Rat>,
}

impl ChainPoint {
    /// Validates that the support is a strictly increasing chain and the
    /// coefficients are positive rationals summing to one.
    pub fn new(
        poset: &Poset,
        chain: Vec<usize>,
        coefficients: Vec<Rat>,
    ) -> Result<ChainPoint, LovaszError> {
        if chain.len() != coefficients.len() || chain.is_empty() {
            return Err(LovaszError::NotAChain);
        }
        for w in chain.windows(2) {
            if !poset.lt(w[0], w[1]) {
                return Err(LovaszError::NotAChain);
            }
        }
        let total: Rat = coefficients.iter().sum();
        if coefficients.iter().any(|c| !c.is_positive()) || !total.is_one() {
            return Err(LovaszError::NotAChain);
        }
        Ok(ChainPoint { chain, coefficients })
    }

    pub fn vertex(p: usize) -> ChainPoint {
        ChainPoint { chain: vec![p], coefficients: vec![Rat::one()] }
    }
}

/// `f̄(x) = Σ λ_i f(p_i)` for a chain point `x`.
pub fn lovasz_evaluate(
    poset: &Poset,
    f: &[ExtRat],
    point: &ChainPoint,
) -> Result<ExtRat, LovaszError> {
    // Re-validate the chain so callers cannot feed malformed points.
    let point = ChainPoint::new(poset, point.chain.clone(), point.coefficients.clone())?;
    let mut total = ExtRat::zero();
    for (&p, c) in point.chain.iter().zip(&point.coefficients) {
        total += f[p].scale(c);
    }
    Ok(total)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ComplexKind {
    /// Chains of ideals of a base poset; embedded in the order polytope in
    /// `[0,1]^n`.
    OrderPolytope,
    /// `S_2^n`; embedded in `[-1,1]^n`.
    SignedCube,
    /// An alternating grid box; the Union-Jack division.
    UnionJack,
    /// A linear grid box; the Freudenthal division.
    Freudenthal,
}

/// A graded poset whose orthoscheme complex is isometric to a convex region
/// of rational `n`-space, with the element embedding and reverse lookup.
pub struct EmbeddedComplex {
    pub kind: ComplexKind,
    pub dim: usize,
    poset: Poset,
    coords: Vec<Vec<Rat>>,
    lookup: HashMap<Vec<Rat>, usize>,
    grid: Option<OrientedTreeProduct>,
    /// For order polytopes: the strict relations `a_i ≺ a_j` of the base.
    base_relations: Vec<(usize, usize)>,
}

impl EmbeddedComplex {
    fn build(
        kind: ComplexKind,
        dim: usize,
        poset: Poset,
        coords: Vec<Vec<Rat>>,
        grid: Option<OrientedTreeProduct>,
        base_relations: Vec<(usize, usize)>,
    ) -> EmbeddedComplex {
        let lookup = coords
            .iter()
            .enumerate()
            .map(|(i, c)| (c.clone(), i))
            .collect();
        EmbeddedComplex { kind, dim, poset, coords, lookup, grid, base_relations }
    }

    /// The distributive lattice of ideals of `base`, embedded as indicator
    /// vectors in the order polytope.
    pub fn order_polytope(base: &Poset) -> EmbeddedComplex {
        let n = base.len();
        assert!(n <= 20, "order polytope enumeration is exponential in the base");
        let mut ideals: Vec<u32> = (0u32..(1 << n))
            .filter(|&mask| {
                (0..n).all(|j| {
                    mask & (1 << j) == 0
                        || (0..n).all(|i| !base.lt(i, j) || mask & (1 << i) != 0)
                })
            })
            .collect();
        ideals.sort_by_key(|&m| (m.count_ones(), m));
        let pairs: Vec<(usize, usize)> = (0..ideals.len())
            .flat_map(|a| {
                let ideals = &ideals;
                (0..ideals.len()).filter_map(move |b| {
                    (a != b && ideals[a] & ideals[b] == ideals[a] && ideals[a] != ideals[b])
                        .then_some((a, b))
                })
            })
            .collect();
        let poset = Poset::from_pairs(ideals.len(), &pairs).expect("inclusion is acyclic");
        let coords: Vec<Vec<Rat>> = ideals
            .iter()
            .map(|&m| (0..n).map(|i| rat_int(((m >> i) & 1) as i64)).collect())
            .collect();
        let base_relations: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| i != j).map(move |j| (i, j)))
            .filter(|&(i, j)| base.lt(i, j))
            .collect();
        EmbeddedComplex::build(
            ComplexKind::OrderPolytope,
            n,
            poset,
            coords,
            None,
            base_relations,
        )
    }

    /// `S_2^n` embedded in `[-1,1]^n`. Element ids are base-3 with digits
    /// 0 = `0`, 1 = `+1`, 2 = `-1`, matching the semilattice power
    /// encoding.
    pub fn signed_cube(n: usize) -> EmbeddedComplex {
        let lattice = crate::submodular::s2_power(n);
        let sizes = vec![3usize; n];
        let coords: Vec<Vec<Rat>> = (0..lattice.len())
            .map(|id| {
                decode_product(&sizes, id)
                    .into_iter()
                    .map(|d| rat_int([0, 1, -1][d]))
                    .collect()
            })
            .collect();
        let poset = lattice.poset().clone();
        EmbeddedComplex::build(ComplexKind::SignedCube, n, poset, coords, None, Vec::new())
    }

    /// The Union-Jack division of an alternating grid box.
    pub fn union_jack(n: usize, bounds: (i64, i64)) -> Result<EmbeddedComplex, LovaszError> {
        let grid = alternating_grid(n, bounds)?;
        Ok(Self::from_grid(ComplexKind::UnionJack, grid, bounds))
    }

    /// The Freudenthal division of a linear grid box.
    pub fn freudenthal(n: usize, bounds: (i64, i64)) -> Result<EmbeddedComplex, LovaszError> {
        let grid = linear_grid(n, bounds)?;
        Ok(Self::from_grid(ComplexKind::Freudenthal, grid, bounds))
    }

    fn from_grid(
        kind: ComplexKind,
        grid: OrientedTreeProduct,
        bounds: (i64, i64),
    ) -> EmbeddedComplex {
        let n = grid.dim();
        let coords: Vec<Vec<Rat>> = (0..grid.len())
            .map(|id| {
                grid.decode(id)
                    .into_iter()
                    .map(|t| rat_int(bounds.0 + t as i64))
                    .collect()
            })
            .collect();
        let poset = grid.graph().order().clone();
        EmbeddedComplex::build(kind, n, poset, coords, Some(grid), Vec::new())
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self, p: usize) -> &[Rat] {
        &self.coords[p]
    }

    /// The backing grid for Union-Jack / Freudenthal kinds.
    pub fn grid(&self) -> Option<&OrientedTreeProduct> {
        self.grid.as_ref()
    }

    fn bounds_of(&self) -> (Rat, Rat) {
        let mut lo = self.coords[0][0].clone();
        let mut hi = lo.clone();
        for c in &self.coords {
            for v in c {
                if *v < lo {
                    lo = v.clone();
                }
                if *v > hi {
                    hi = v.clone();
                }
            }
        }
        (lo, hi)
    }

    fn check_region(&self, x: &[Rat]) -> Result<(), LovaszError> {
        if x.len() != self.dim {
            return Err(LovaszError::OutOfRegion);
        }
        match self.kind {
            ComplexKind::OrderPolytope => {
                for v in x {
                    if v.is_negative() || *v > rat_int(1) {
                        return Err(LovaszError::OutOfRegion);
                    }
                }
                for &(i, j) in &self.base_relations {
                    if x[i] < x[j] {
                        return Err(LovaszError::OutOfRegion);
                    }
                }
            }
            ComplexKind::SignedCube => {
                for v in x {
                    if v.abs() > rat_int(1) {
                        return Err(LovaszError::OutOfRegion);
                    }
                }
            }
            ComplexKind::UnionJack | ComplexKind::Freudenthal => {
                let (lo, hi) = self.bounds_of();
                for v in x {
                    if *v < lo || *v > hi {
                        return Err(LovaszError::OutOfRegion);
                    }
                }
            }
        }
        Ok(())
    }

    /// The base (integral) vertex of the cell containing `x` and the signed
    /// unit displacements toward `x`: `x = base + Σ m_i s_i e_i` with
    /// `m_i ∈ [0,1]`.
    fn cell_of(&self, x: &[Rat]) -> (Vec<Rat>, Vec<i64>, Vec<Rat>) {
        let mut base = Vec::with_capacity(self.dim);
        let mut signs = Vec::with_capacity(self.dim);
        let mut mags = Vec::with_capacity(self.dim);
        for v in x.iter() {
            let (b, s) = match self.kind {
                // Base at the origin; coordinates are already in [0,1].
                ComplexKind::OrderPolytope => (Rat::zero(), 1i64),
                // Base at the origin; sign by coordinate sign.
                ComplexKind::SignedCube => {
                    (Rat::zero(), if v.is_negative() { -1 } else { 1 })
                }
                // Base at the floor of the coordinate.
                ComplexKind::Freudenthal => (v.floor(), 1),
                // Base at the nearest even integer inside the box, ties
                // toward the smaller one.
                ComplexKind::UnionJack => {
                    let (lo, hi) = self.bounds_of();
                    let below = floor_even(v);
                    let above = below.clone() + rat_int(2);
                    let mut cands: Vec<Rat> = [below, above]
                        .into_iter()
                        .filter(|c| *c >= lo && *c <= hi && (v - c).abs() <= rat_int(1))
                        .collect();
                    cands.sort_by_key(|c| ((v - c).abs(), c.clone()));
                    let b = cands
                        .into_iter()
                        .next()
                        .expect("an in-box even base exists for every in-box point");
                    let s = if *v < b { -1 } else { 1 };
                    (b, s)
                }
            };
            let m = (v - &b).abs();
            debug_assert!(m >= Rat::zero() && m <= rat_int(1));
            base.push(b);
            signs.push(s);
            mags.push(m);
        }
        (base, signs, mags)
    }

    /// The chain point of the simplex containing `x`: magnitudes sorted
    /// decreasingly give the threshold chain, standard barycentric
    /// coefficients. Re-embedding the result reproduces `x` exactly
    /// (asserted).
    pub fn locate_simplex(&self, x: &[Rat]) -> Result<ChainPoint, LovaszError> {
        self.check_region(x)?;
        let (base, signs, mags) = self.cell_of(x);
        // Distinct positive magnitudes, decreasing.
        let mut levels: Vec<Rat> = mags.iter().filter(|m| m.is_positive()).cloned().collect();
        levels.sort();
        levels.dedup();
        levels.reverse();
        let vertex_at = |level: &Rat| -> Result<usize, LovaszError> {
            let coords: Vec<Rat> = (0..self.dim)
                .map(|i| {
                    if mags[i] >= *level && mags[i].is_positive() {
                        base[i].clone() + rat_int(signs[i])
                    } else {
                        base[i].clone()
                    }
                })
                .collect();
            self.lookup.get(&coords).copied().ok_or(LovaszError::OutOfRegion)
        };
        let mut elems: Vec<usize> = Vec::new();
        let mut coeffs: Vec<Rat> = Vec::new();
        let top = levels.first().cloned().unwrap_or_else(Rat::zero);
        if top < rat_int(1) {
            let coords: Vec<Rat> = base.clone();
            let id = self.lookup.get(&coords).copied().ok_or(LovaszError::OutOfRegion)?;
            elems.push(id);
            coeffs.push(rat_int(1) - &top);
        }
        for (j, level) in levels.iter().enumerate() {
            let next = levels.get(j + 1).cloned().unwrap_or_else(Rat::zero);
            elems.push(vertex_at(level)?);
            coeffs.push(level - &next);
        }
        // The chain currently runs from the base outward; sort it into
        // poset order so the support is increasing.
        let mut order: Vec<usize> = (0..elems.len()).collect();
        order.sort_by(|&a, &b| {
            if elems[a] == elems[b] {
                std::cmp::Ordering::Equal
            } else if self.poset.lt(elems[a], elems[b]) {
                std::cmp::Ordering::Less
            } else {
                std::cmp::Ordering::Greater
            }
        });
        let chain: Vec<usize> = order.iter().map(|&i| elems[i]).collect();
        let coefficients: Vec<Rat> = order.iter().map(|&i| coeffs[i].clone()).collect();
        let point = ChainPoint::new(&self.poset, chain, coefficients)?;
        // Exact re-embedding check.
        let mut back = vec![Rat::zero(); self.dim];
        for (&p, c) in point.chain.iter().zip(&point.coefficients) {
            for i in 0..self.dim {
                back[i] += &self.coords[p][i] * c;
            }
        }
        assert_eq!(back, x, "locate_simplex must re-embed to the input point");
        Ok(point)
    }

    /// `f̄` at a rational point of the embedded region.
    pub fn evaluate(&self, f: &[ExtRat], x: &[Rat]) -> Result<ExtRat, LovaszError> {
        let point = self.locate_simplex(x)?;
        lovasz_evaluate(&self.poset, f, &point)
    }
}

/// The largest even integer `≤ v`.
fn floor_even(v: &Rat) -> Rat {
    let half = v / rat_int(2);
    Rat::from_integer(half.floor().to_integer()) * rat_int(2)
}

/// A failed convexity inequality along a segment.
#[derive(Clone, Debug)]
pub struct SegmentWitness {
    pub x: Vec<Rat>,
    pub y: Vec<Rat>,
    pub t: Rat,
}

/// All `t ∈ (0,1)` where the segment `x → y` can cross a simplex boundary:
/// solutions of `x_i(t) ∈ Z`, `x_i(t) − x_j(t) ∈ Z`, `x_i(t) + x_j(t) ∈ Z`.
fn boundary_crossings(x: &[Rat], y: &[Rat]) -> Vec<Rat> {
    let n = x.len();
    let mut lines: Vec<(Rat, Rat)> = Vec::new(); // (c, d): value c + t d
    for i in 0..n {
        lines.push((x[i].clone(), &y[i] - &x[i]));
        for j in i + 1..n {
            lines.push((&x[i] - &x[j], (&y[i] - &y[j]) - (&x[i] - &x[j])));
            lines.push((&x[i] + &x[j], (&y[i] + &y[j]) - (&x[i] + &x[j])));
        }
    }
    let mut ts: Vec<Rat> = Vec::new();
    for (c, d) in lines {
        if d.is_zero() {
            continue;
        }
        // c + t d = k for integers k between the endpoint values.
        let v0 = c.clone();
        let v1 = &c + &d;
        let (lo, hi) = if v0 <= v1 { (v0, v1) } else { (v1, v0) };
        let mut k = lo.ceil().to_integer();
        let top = hi.floor().to_integer();
        while k <= top {
            let t = (Rat::from_integer(k.clone()) - &c) / &d;
            if t.is_positive() && t < rat_int(1) {
                ts.push(t);
            }
            k += BigInt::one();
        }
    }
    ts.sort();
    ts.dedup();
    ts
}

fn point_on_segment(x: &[Rat], y: &[Rat], t: &Rat) -> Vec<Rat> {
    x.iter()
        .zip(y)
        .map(|(a, b)| a + (b - a) * t)
        .collect()
}

/// Checks convexity of `f̄` along the segment between two rational points:
/// evaluates on the `k/8` grid plus every boundary crossing, and asserts
/// piecewise linearity between consecutive crossings.
fn segment_check(
    e: &EmbeddedComplex,
    f: &[ExtRat],
    x: &[Rat],
    y: &[Rat],
) -> Result<Option<SegmentWitness>, LovaszError> {
    let fx = e.evaluate(f, x)?;
    let fy = e.evaluate(f, y)?;
    let crossings = boundary_crossings(x, y);
    let mut ts: Vec<Rat> = (1..8).map(|k| crate::rational::rat(k, 8)).collect();
    ts.extend(crossings.iter().cloned());
    ts.sort();
    ts.dedup();
    for t in &ts {
        let chord = fx.scale(&(rat_int(1) - t)) + fy.scale(t);
        let val = e.evaluate(f, &point_on_segment(x, y, t))?;
        if chord < val {
            return Ok(Some(SegmentWitness { x: x.to_vec(), y: y.to_vec(), t: t.clone() }));
        }
    }
    // Piecewise linearity between consecutive breakpoints.
    let mut knots: Vec<Rat> = vec![Rat::zero()];
    knots.extend(crossings);
    knots.push(rat_int(1));
    for w in knots.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let va = e.evaluate(f, &point_on_segment(x, y, a))?;
        let vb = e.evaluate(f, &point_on_segment(x, y, b))?;
        if !va.is_finite() || !vb.is_finite() {
            continue;
        }
        let mid = (a + b) / rat_int(2);
        let vm = e.evaluate(f, &point_on_segment(x, y, &mid))?;
        assert_eq!(
            vm,
            (va + vb).scale(&crate::rational::rat(1, 2)),
            "the extension must be linear between simplex boundaries"
        );
    }
    Ok(None)
}

/// Convexity of the Lovász extension along sampled segments: all pairs of
/// lattice points (when at most `PAIR_CAP` elements) plus `trials` random
/// rational pairs, deterministic in `seed`.
pub fn segment_convexity_check(
    e: &EmbeddedComplex,
    f: &[ExtRat],
    trials: usize,
    seed: u64,
) -> Result<Option<SegmentWitness>, LovaszError> {
    const PAIR_CAP: usize = 60;
    assert_eq!(f.len(), e.len());
    if e.len() <= PAIR_CAP {
        for p in 0..e.len() {
            for q in p + 1..e.len() {
                if let Some(w) = segment_check(e, f, &e.coords[p].clone(), &e.coords[q].clone())? {
                    return Ok(Some(w));
                }
            }
        }
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let sample = |rng: &mut rand_chacha::ChaCha8Rng| {
            // A random point of a random simplex: mix two comparable-or-not
            // lattice points along their segment (the region is convex).
            let a = rng.gen_range(0..e.len());
            let b = rng.gen_range(0..e.len());
            let t = crate::rational::rat(rng.gen_range(0..=4), 4);
            point_on_segment(&e.coords[a], &e.coords[b], &t)
        };
        let x = sample(&mut rng);
        let y = sample(&mut rng);
        if let Some(w) = segment_check(e, f, &x, &y)? {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// Three-way agreement report for grid-backed complexes.
#[derive(Clone, Debug)]
pub struct RoundtripReport {
    pub l_convex: bool,
    pub midpoint_convex: bool,
    pub segment_convex: bool,
}

/// Asserts that L-convexity, midpoint convexity, and segment convexity of
/// the Lovász extension all agree for a function on a Union-Jack or
/// Freudenthal complex.
pub fn characterization_roundtrip(
    e: &EmbeddedComplex,
    f: &[ExtRat],
) -> Result<RoundtripReport, LovaszError> {
    let grid = e.grid().ok_or(LovaszError::UnsupportedComplex)?;
    let eq = equivalence_check(grid, f)?;
    let segment = segment_convexity_check(e, f, 10, 0x5eed)?;
    let report = RoundtripReport {
        l_convex: eq.l_convex,
        midpoint_convex: eq.midpoint_convex,
        segment_convex: segment.is_none(),
    };
    assert_eq!(
        report.l_convex, report.segment_convex,
        "L-convexity and segment convexity disagree"
    );
    Ok(report)
}
