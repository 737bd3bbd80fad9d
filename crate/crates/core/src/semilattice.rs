//! Meet-semilattices: meet/join tables, modularity and complementation
//! checks, polar-frame enumeration, and metric intervals in the covering
//! graph.

use crate::bitset::BitSet;
use crate::par::{find_violation, Strategy};
use crate::poset::{Poset, PosetError};
use once_cell::sync::OnceCell;

/// Size guard for polar-space verification: beyond this many elements the
/// exhaustive axiom checks are refused.
pub const POLAR_SIZE_BUDGET: usize = 200;
/// Rank guard for polar-space verification.
pub const POLAR_RANK_BUDGET: u32 = 3;
/// Operation guard shared by frame enumeration, chain enumeration, and the
/// isomorphism searches.
pub const POLAR_OPS_BUDGET: usize = 50_000_000;

fn charge(ops: &mut usize, what: &str) -> Result<(), PosetError> {
    if *ops == 0 {
        Err(PosetError::TooLarge(format!("{what}: operation budget exhausted")))
    } else {
        *ops -= 1;
        Ok(())
    }
}

/// A counterexample to the modular-semilattice conditions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModularityViolation {
    /// `z <= x` in a common principal ideal but `x∧(y∨z) != (x∧y)∨z`.
    ModularLaw { x: usize, y: usize, z: usize },
    /// All pairwise joins of the triple exist but the triple join does not.
    TripleJoin { x: usize, y: usize, z: usize },
}

/// Result of the polar-space axiom check.
#[derive(Clone, Debug)]
pub struct PolarReport {
    pub is_polar: bool,
    /// All frames (element sets isomorphic to `S_2^n`, `n` the rank),
    /// each sorted by id.
    pub frames: Vec<Vec<usize>>,
    /// Human-readable reason when `is_polar` is false.
    pub failure: Option<String>,
}

/// A member of a metric interval `I(p,q)` together with its canonical
/// decomposition `u = (u∧p) ∨ (u∧q)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IntervalPoint {
    pub u: usize,
    pub p_part: usize,
    pub q_part: usize,
}

/// A finite meet-semilattice: a poset with a unique minimum in which every
/// pair has a greatest lower bound. Meet and join tables are precomputed.
#[derive(Clone, Debug)]
pub struct Semilattice {
    poset: Poset,
    bottom: usize,
    meet: Vec<usize>,
    join: Vec<Option<usize>>,
    dist: OnceCell<Vec<u32>>,
}

impl Semilattice {
    pub fn new(poset: Poset) -> Result<Semilattice, PosetError> {
        let n = poset.len();
        let bottom = poset.minimum().ok_or(PosetError::NoMinimum)?;
        let mut meet = vec![0usize; n * n];
        for p in 0..n {
            for q in p..n {
                let mut clb = poset.ideal(p).clone();
                clb.intersect_with(poset.ideal(q));
                let m = clb
                    .iter()
                    .max_by_key(|&u| poset.height(u))
                    .expect("bottom is a common lower bound");
                if clb.iter().any(|u| !poset.leq(u, m)) {
                    return Err(PosetError::NoMeet(p, q));
                }
                meet[p * n + q] = m;
                meet[q * n + p] = m;
            }
        }
        // With all meets present, a nonempty upper-bound set is meet-closed,
        // so its meet is the least upper bound.
        let mut join = vec![None; n * n];
        for p in 0..n {
            for q in p..n {
                let mut cub = poset.filter(p).clone();
                cub.intersect_with(poset.filter(q));
                let j = cub.iter().reduce(|a, b| meet[a * n + b]);
                if let Some(j) = j {
                    debug_assert!(poset.leq(p, j) && poset.leq(q, j));
                    join[p * n + q] = Some(j);
                    join[q * n + p] = Some(j);
                }
            }
        }
        Ok(Semilattice { poset, bottom, meet, join, dist: OnceCell::new() })
    }

    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<Semilattice, PosetError> {
        Semilattice::new(Poset::from_pairs(n, pairs)?)
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn len(&self) -> usize {
        self.poset.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poset.is_empty()
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }

    pub fn leq(&self, p: usize, q: usize) -> bool {
        self.poset.leq(p, q)
    }

    pub fn rank(&self, p: usize) -> u32 {
        self.poset.height(p)
    }

    pub fn max_rank(&self) -> u32 {
        self.poset.max_height()
    }

    pub fn meet(&self, p: usize, q: usize) -> usize {
        self.meet[p * self.len() + q]
    }

    pub fn join(&self, p: usize, q: usize) -> Option<usize> {
        self.join[p * self.len() + q]
    }

    /// Join of a family; `None` if any intermediate join is missing.
    /// The empty family joins to the bottom.
    pub fn join_all(&self, elems: impl IntoIterator<Item = usize>) -> Option<usize> {
        elems.into_iter().try_fold(self.bottom, |acc, e| self.join(acc, e))
    }

    pub fn atoms(&self) -> Vec<usize> {
        (0..self.len()).filter(|&p| self.poset.height(p) == 1).collect()
    }

    /// All-pairs distances in the (undirected) covering graph.
    fn distances(&self) -> &[u32] {
        self.dist.get_or_init(|| {
            let n = self.len();
            let mut adj = vec![Vec::new(); n];
            for &(a, b) in self.poset.covers() {
                adj[a].push(b);
                adj[b].push(a);
            }
            let mut d = vec![u32::MAX; n * n];
            for s in 0..n {
                d[s * n + s] = 0;
                let mut queue = std::collections::VecDeque::from([s]);
                while let Some(v) = queue.pop_front() {
                    for &w in &adj[v] {
                        if d[s * n + w] == u32::MAX {
                            d[s * n + w] = d[s * n + v] + 1;
                            queue.push_back(w);
                        }
                    }
                }
            }
            d
        })
    }

    /// Distance between `p` and `q` in the covering graph.
    pub fn covering_distance(&self, p: usize, q: usize) -> u32 {
        self.distances()[p * self.len() + q]
    }

    /// The metric interval `I(p,q)` = points on covering-graph geodesics
    /// between `p` and `q`, each with its decomposition `(u∧p, u∧q)`.
    /// Asserts `u = (u∧p) ∨ (u∧q)` for every member.
    pub fn metric_interval(&self, p: usize, q: usize) -> Vec<IntervalPoint> {
        let n = self.len();
        let d = self.distances();
        let dpq = d[p * n + q];
        (0..n)
            .filter(|&u| d[p * n + u] != u32::MAX && d[p * n + u] + d[u * n + q] == dpq)
            .map(|u| {
                let a = self.meet(u, p);
                let b = self.meet(u, q);
                assert_eq!(
                    self.join(a, b),
                    Some(u),
                    "metric interval decomposition failed at u={u}"
                );
                IntervalPoint { u, p_part: a, q_part: b }
            })
            .collect()
    }

    pub fn product(&self, other: &Semilattice) -> Semilattice {
        Semilattice::new(self.poset.product(&other.poset))
            .expect("product of semilattices is a semilattice")
    }

    /// Checks the two modular-semilattice conditions; `None` means modular.
    pub fn check_modular(&self) -> Option<ModularityViolation> {
        let n = self.len();
        find_violation(Strategy::default(), n, |x| {
            for z in self.poset.ideal(x).iter() {
                for y in 0..n {
                    // x and y must share a principal ideal for the law to
                    // be in scope; then y∨z and (x∧y)∨z both exist.
                    if self.join(x, y).is_none() {
                        continue;
                    }
                    let yz = self.join(y, z).expect("bounded above by x∨y");
                    let lhs = self.meet(x, yz);
                    let rhs = self.join(self.meet(x, y), z).expect("bounded above by x");
                    if lhs != rhs {
                        return Some(ModularityViolation::ModularLaw { x, y, z });
                    }
                }
            }
            for y in x..n {
                for z in y..n {
                    if let (Some(xy), Some(_), Some(_)) =
                        (self.join(x, y), self.join(y, z), self.join(x, z))
                    {
                        if self.join(xy, z).is_none() {
                            return Some(ModularityViolation::TripleJoin { x, y, z });
                        }
                    }
                }
            }
            None
        })
    }

    pub fn is_modular_semilattice(&self) -> bool {
        self.check_modular().is_none()
    }

    /// True iff every element is the join of the atoms below it.
    pub fn is_complemented(&self) -> bool {
        (0..self.len()).all(|p| {
            let atoms = self.poset.ideal(p).iter().filter(|&a| self.poset.height(a) == 1);
            self.join_all(atoms) == Some(p)
        })
    }

    /// Exhaustive polar-space check with the default budgets.
    pub fn is_polar_space(&self) -> Result<PolarReport, PosetError> {
        self.is_polar_space_budgeted(POLAR_OPS_BUDGET)
    }

    /// Verifies the polar axioms: frames isomorphic to `S_2^n` cover the
    /// semilattice, every two maximal chains share a frame, and for frames
    /// sharing two chains a chain-fixing frame isomorphism exists.
    pub fn is_polar_space_budgeted(&self, mut ops: usize) -> Result<PolarReport, PosetError> {
        if self.len() > POLAR_SIZE_BUDGET {
            return Err(PosetError::TooLarge(format!(
                "polar check limited to {POLAR_SIZE_BUDGET} elements, got {}",
                self.len()
            )));
        }
        if self.max_rank() > POLAR_RANK_BUDGET {
            return Err(PosetError::TooLarge(format!(
                "polar check limited to rank {POLAR_RANK_BUDGET}, got {}",
                self.max_rank()
            )));
        }
        let fail = |frames, msg: String| {
            Ok(PolarReport { is_polar: false, frames, failure: Some(msg) })
        };
        if let Some(w) = self.check_modular() {
            return fail(Vec::new(), format!("not a modular semilattice: {w:?}"));
        }
        if !self.is_complemented() {
            return fail(Vec::new(), "not complemented".to_string());
        }
        let frames = self.polar_frames(&mut ops)?;
        let n = self.len();
        let mut covered = BitSet::new(n);
        let frame_sets: Vec<BitSet> = frames
            .iter()
            .map(|f| BitSet::from_iter(n, f.iter().copied()))
            .collect();
        for fs in &frame_sets {
            covered.union_with(fs);
        }
        if covered.count() != n {
            let missing = (0..n).find(|&p| !covered.contains(p)).unwrap();
            return fail(frames, format!("element {missing} lies in no frame"));
        }
        // P1 for arbitrary chains reduces to maximal chains.
        let chains = maximal_chains_of(&self.poset, &mut ops)?;
        let chain_sets: Vec<BitSet> = chains
            .iter()
            .map(|c| BitSet::from_iter(n, c.iter().copied()))
            .collect();
        for (i, ci) in chain_sets.iter().enumerate() {
            for cj in &chain_sets[i..] {
                charge(&mut ops, "polar P1")?;
                let mut u = ci.clone();
                u.union_with(cj);
                if !frame_sets.iter().any(|fs| u.is_subset(fs)) {
                    return fail(frames, "P1 fails: two chains share no frame".to_string());
                }
            }
        }
        // P2: chains in a frame intersection reduce to maximal chains of
        // the intersection.
        let induced: Vec<Poset> = frames.iter().map(|f| self.poset.induced(f, false)).collect();
        for i in 0..frames.len() {
            for j in 0..frames.len() {
                if i == j {
                    continue;
                }
                let inter: Vec<usize> = frames[i]
                    .iter()
                    .copied()
                    .filter(|&x| frame_sets[j].contains(x))
                    .collect();
                let sub = self.poset.induced(&inter, false);
                let chains = maximal_chains_of(&sub, &mut ops)?;
                let pos = |f: &Vec<usize>, x: usize| f.binary_search(&x).unwrap();
                for (a, ca) in chains.iter().enumerate() {
                    for cb in &chains[a..] {
                        let fixed: Vec<(usize, usize)> = ca
                            .iter()
                            .chain(cb.iter())
                            .map(|&k| {
                                let x = inter[k];
                                (pos(&frames[i], x), pos(&frames[j], x))
                            })
                            .collect();
                        let found =
                            induced[i].isomorphism_fixing(&induced[j], &fixed, &mut ops);
                        if ops == 0 {
                            return Err(PosetError::TooLarge(
                                "polar P2: operation budget exhausted".into(),
                            ));
                        }
                        if found.is_none() {
                            return fail(
                                frames,
                                format!("P2 fails between frames {i} and {j}"),
                            );
                        }
                    }
                }
            }
        }
        Ok(PolarReport { is_polar: true, frames, failure: None })
    }

    /// Enumerates all subsemilattices isomorphic to `S_2^n` (`n` the rank):
    /// pick `n` disjoint pairs of join-less atoms whose cross joins exist,
    /// close under joins of choices, and verify the shape.
    fn polar_frames(&self, ops: &mut usize) -> Result<Vec<Vec<usize>>, PosetError> {
        let rank = self.max_rank() as usize;
        if rank == 0 {
            return Ok(vec![vec![self.bottom]]);
        }
        let atoms = self.atoms();
        let mut pairs = Vec::new();
        for (i, &a) in atoms.iter().enumerate() {
            for &b in &atoms[i + 1..] {
                if self.join(a, b).is_none() {
                    pairs.push((a, b));
                }
            }
        }
        let mut frames = Vec::new();
        let mut sel = Vec::new();
        self.frame_rec(&pairs, 0, rank, &mut sel, &mut frames, ops)?;
        Ok(frames)
    }

    fn frame_rec(
        &self,
        pairs: &[(usize, usize)],
        start: usize,
        rank: usize,
        sel: &mut Vec<(usize, usize)>,
        frames: &mut Vec<Vec<usize>>,
        ops: &mut usize,
    ) -> Result<(), PosetError> {
        if sel.len() == rank {
            if let Some(f) = self.build_frame(sel, ops)? {
                if !frames.contains(&f) {
                    frames.push(f);
                }
            }
            return Ok(());
        }
        for idx in start..pairs.len() {
            charge(ops, "polar frame search")?;
            let (a, b) = pairs[idx];
            let compatible = sel.iter().all(|&(c, d)| {
                a != c
                    && a != d
                    && b != c
                    && b != d
                    && self.join(a, c).is_some()
                    && self.join(a, d).is_some()
                    && self.join(b, c).is_some()
                    && self.join(b, d).is_some()
            });
            if compatible {
                sel.push((a, b));
                self.frame_rec(pairs, idx + 1, rank, sel, frames, ops)?;
                sel.pop();
            }
        }
        Ok(())
    }

    /// Joins every sign choice over the selected atom pairs and checks the
    /// result is order-isomorphic to `S_2^n` and meet-closed.
    fn build_frame(
        &self,
        sel: &[(usize, usize)],
        ops: &mut usize,
    ) -> Result<Option<Vec<usize>>, PosetError> {
        let n = sel.len();
        let m = 3usize.pow(n as u32);
        let digit = |code: usize, i: usize| code / 3usize.pow(i as u32) % 3;
        let mut elems = Vec::with_capacity(m);
        for code in 0..m {
            let mut cur = self.bottom;
            for (i, &(a, b)) in sel.iter().enumerate() {
                let atom = match digit(code, i) {
                    0 => continue,
                    1 => a,
                    _ => b,
                };
                match self.join(cur, atom) {
                    Some(j) => cur = j,
                    None => return Ok(None),
                }
            }
            elems.push(cur);
        }
        let mut sorted = elems.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != m {
            return Ok(None);
        }
        for s in 0..m {
            for t in 0..m {
                charge(ops, "polar frame shape check")?;
                let leq_code = (0..n).all(|i| digit(s, i) == 0 || digit(s, i) == digit(t, i));
                if self.poset.leq(elems[s], elems[t]) != leq_code {
                    return Ok(None);
                }
                let meet_code: usize = (0..n)
                    .map(|i| {
                        let d = if digit(s, i) == digit(t, i) { digit(s, i) } else { 0 };
                        d * 3usize.pow(i as u32)
                    })
                    .sum();
                if self.meet(elems[s], elems[t]) != elems[meet_code] {
                    return Ok(None);
                }
            }
        }
        Ok(Some(sorted))
    }
}

/// Maximal chains of a finite poset: saturated paths from a minimal to a
/// maximal element along covers.
pub fn maximal_chains_of(poset: &Poset, ops: &mut usize) -> Result<Vec<Vec<usize>>, PosetError> {
    let n = poset.len();
    let mut up_adj = vec![Vec::new(); n];
    for &(a, b) in poset.covers() {
        up_adj[a].push(b);
    }
    let mut out = Vec::new();
    let mut stack: Vec<Vec<usize>> =
        poset.minimal_elements().into_iter().map(|p| vec![p]).collect();
    while let Some(chain) = stack.pop() {
        charge(ops, "maximal chain enumeration")?;
        let top = *chain.last().unwrap();
        if up_adj[top].is_empty() {
            out.push(chain);
            continue;
        }
        for &q in &up_adj[top] {
            let mut next = chain.clone();
            next.push(q);
            stack.push(next);
        }
    }
    Ok(out)
}

/// `S_k`: the (k+1)-element semilattice with bottom `0` and `k` atoms.
/// Atom ids are `1..=k`; for `S_2` read `1` as `+` and `2` as `-`.
pub fn s_k(k: usize) -> Semilattice {
    let pairs: Vec<(usize, usize)> = (1..=k).map(|a| (0, a)).collect();
    Semilattice::from_pairs(k + 1, &pairs).unwrap()
}

/// `S_{k,l}`: polar space of rank 2 on `S_k × S_l` where `(a,b)` for
/// nonzero `a,b` is an atom below both `(a,0)` and `(0,b)`.
pub fn s_kl(k: usize, l: usize) -> Semilattice {
    let id = |a: usize, b: usize| a * (l + 1) + b;
    let mut pairs = Vec::new();
    for a in 1..=k {
        for b in 1..=l {
            pairs.push((id(0, 0), id(a, b)));
            pairs.push((id(a, b), id(a, 0)));
            pairs.push((id(a, b), id(0, b)));
        }
    }
    let names = (0..=k)
        .flat_map(|a| (0..=l).map(move |b| format!("({a},{b})")))
        .collect();
    Semilattice::new(Poset::from_pairs((k + 1) * (l + 1), &pairs).unwrap().with_names(names))
        .unwrap()
}

/// Boolean lattice `2^n`; element ids are subset masks.
pub fn boolean_lattice(n: usize) -> Semilattice {
    let mut pairs = Vec::new();
    for mask in 0usize..1 << n {
        for i in 0..n {
            if mask >> i & 1 == 0 {
                pairs.push((mask, mask | 1 << i));
            }
        }
    }
    Semilattice::from_pairs(1 << n, &pairs).unwrap()
}

/// `n`-fold product of a semilattice with itself.
pub fn power(l: &Semilattice, n: usize) -> Semilattice {
    assert!(n >= 1);
    let mut acc = l.clone();
    for _ in 1..n {
        acc = acc.product(l);
    }
    acc
}

/// Encodes componentwise digits into a product-element id. Products nest
/// left-to-right, so the first component is the most significant digit.
pub fn encode_product(sizes: &[usize], digits: &[usize]) -> usize {
    debug_assert_eq!(sizes.len(), digits.len());
    sizes.iter().zip(digits).fold(0, |acc, (&s, &d)| {
        debug_assert!(d < s);
        acc * s + d
    })
}

/// Inverse of [`encode_product`].
pub fn decode_product(sizes: &[usize], mut id: usize) -> Vec<usize> {
    let mut digits = vec![0; sizes.len()];
    for (i, &s) in sizes.iter().enumerate().rev() {
        digits[i] = id % s;
        id /= s;
    }
    digits
}

/// Chain `0 < 1 < … < top`.
pub fn chain(top: usize) -> Semilattice {
    let pairs: Vec<(usize, usize)> = (0..top).map(|i| (i, i + 1)).collect();
    Semilattice::from_pairs(top + 1, &pairs).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn s2_meet_join() {
        let l = s_k(2);
        assert_eq!(l.meet(1, 2), 0);
        assert_eq!(l.join(1, 2), None);
        assert_eq!(l.join(0, 1), Some(1));
    }

    #[test]
    fn boolean_join() {
        let l = boolean_lattice(2);
        assert_eq!(l.join(0b01, 0b10), Some(0b11));
        assert_eq!(l.meet(0b01, 0b11), 0b01);
    }

    #[test]
    fn s3_squared_modular() {
        let l = s_k(3).product(&s_k(3));
        assert!(l.is_modular_semilattice());
    }

    #[test]
    fn pentagon_not_modular() {
        // N_5: 0 < x < z < 1 and 0 < y < 1.
        let l = Semilattice::from_pairs(5, &[(0, 1), (1, 2), (2, 4), (0, 3), (3, 4)]).unwrap();
        let w = l.check_modular();
        assert!(matches!(w, Some(ModularityViolation::ModularLaw { .. })), "{w:?}");
    }

    #[test]
    fn five_element_semilattice_modular() {
        // {0,a,b,c,a'} with c covering a and b, and a' an unrelated atom.
        let l = Semilattice::from_pairs(5, &[(0, 1), (0, 2), (1, 3), (2, 3), (0, 4)]).unwrap();
        assert!(l.is_modular_semilattice());
        assert!(l.is_complemented());
    }

    #[test]
    fn complemented_examples() {
        assert!(s_kl(2, 2).is_complemented());
        assert!(boolean_lattice(3).is_complemented());
        assert!(!chain(2).is_complemented());
    }

    #[test]
    fn polar_s3() {
        let rep = s_k(3).is_polar_space().unwrap();
        assert!(rep.is_polar);
        // frames {0,a,b} for distinct nonzero a,b
        assert_eq!(rep.frames.len(), 3);
        for f in &rep.frames {
            assert_eq!(f.len(), 3);
            assert!(f.contains(&0));
        }
    }

    #[test]
    fn polar_s22() {
        let rep = s_kl(2, 2).is_polar_space().unwrap();
        assert!(rep.is_polar, "{:?}", rep.failure);
        assert_eq!(rep.frames.len(), 1);
        assert_eq!(rep.frames[0].len(), 9);
    }

    #[test]
    fn polar_s23() {
        let rep = s_kl(2, 3).is_polar_space().unwrap();
        assert!(rep.is_polar, "{:?}", rep.failure);
    }

    #[test]
    fn polar_product() {
        let rep = s_k(2).product(&s_k(2)).is_polar_space().unwrap();
        assert!(rep.is_polar);
        assert_eq!(rep.frames.len(), 1);
    }

    #[test]
    fn chain_not_polar() {
        let rep = chain(2).is_polar_space().unwrap();
        assert!(!rep.is_polar);
    }

    #[test]
    fn frames_are_modular_complemented() {
        for l in [s_k(3), s_kl(2, 2)] {
            let rep = l.is_polar_space().unwrap();
            for f in &rep.frames {
                let sub = Semilattice::new(l.poset().induced(f, false)).unwrap();
                assert!(sub.is_modular_semilattice());
                assert!(sub.is_complemented());
            }
        }
    }

    #[test]
    fn interval_s2() {
        let l = s_k(2);
        let iv = l.metric_interval(1, 2);
        let members: Vec<usize> = iv.iter().map(|p| p.u).collect();
        assert_eq!(members, vec![0, 1, 2]);
        assert_eq!(l.metric_interval(1, 1).len(), 1);
    }

    #[test]
    fn interval_s2_squared() {
        // S_2^2 with ids p*3+q; p=(+,0)=3, q=(0,-)=2.
        let l = s_k(2).product(&s_k(2));
        let iv = l.metric_interval(3, 2);
        let mut members: Vec<usize> = iv.iter().map(|p| p.u).collect();
        members.sort_unstable();
        // {(0,0),(0,-),(+,0),(+,-)} = {0,2,3,5}
        assert_eq!(members, vec![0, 2, 3, 5]);
    }

    #[test]
    fn product_is_semilattice_of_expected_size() {
        let l = s_k(2).product(&s_k(2));
        assert_eq!(l.len(), 9);
        assert_eq!(l.max_rank(), 2);
    }
}
