//! Finite posets: construction from cover pairs, order queries, grading,
//! products, and induced subposets.
//!
//! Elements are dense integer ids; an optional name table lives alongside
//! for I/O. All order data is precomputed into bitset rows, so queries are
//! constant time and every structure is immutable after construction.

use crate::bitset::BitSet;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PosetError {
    #[error("cover relation contains a cycle through element {0}")]
    CycleDetected(usize),
    #[error("poset is not graded: cover ({0}, {1}) skips a rank")]
    NotGraded(usize, usize),
    #[error("cover pair ({0}, {1}) references an undeclared element")]
    BadElement(usize, usize),
    #[error("not a meet-semilattice: elements {0} and {1} have no meet")]
    NoMeet(usize, usize),
    #[error("no unique minimum element")]
    NoMinimum,
    #[error("enumeration budget exceeded ({0})")]
    TooLarge(String),
}

/// A finite poset with precomputed transitive order.
#[derive(Clone, Debug)]
pub struct Poset {
    n: usize,
    names: Vec<String>,
    /// `up[p]` is the principal filter of `p` (including `p`).
    up: Vec<BitSet>,
    /// `down[p]` is the principal ideal of `p` (including `p`).
    down: Vec<BitSet>,
    /// Cover pairs `(lower, upper)`: upper covers lower.
    covers: Vec<(usize, usize)>,
    /// Height of each element: length of a longest chain below it.
    height: Vec<u32>,
}

impl Poset {
    /// Builds a poset on `n` elements from order pairs `(child, parent)`.
    /// The pairs need not be covers; the cover relation is recomputed by
    /// transitive reduction. Rejects cyclic input.
    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<Poset, PosetError> {
        for &(a, b) in pairs {
            if a >= n || b >= n {
                return Err(PosetError::BadElement(a, b));
            }
        }
        // Transitive closure by iterated propagation over a topological order.
        let mut above: Vec<Vec<usize>> = vec![Vec::new(); n]; // direct parents
        let mut indeg = vec![0usize; n];
        for &(a, b) in pairs {
            if a == b {
                return Err(PosetError::CycleDetected(a));
            }
            above[a].push(b);
            indeg[b] += 1;
        }
        // Kahn's algorithm to detect cycles and get a topological order.
        let mut order = Vec::with_capacity(n);
        let mut queue: Vec<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        while let Some(v) = queue.pop() {
            order.push(v);
            for &p in &above[v] {
                indeg[p] -= 1;
                if indeg[p] == 0 {
                    queue.push(p);
                }
            }
        }
        if order.len() != n {
            let culprit = (0..n).find(|&i| indeg[i] > 0).unwrap();
            return Err(PosetError::CycleDetected(culprit));
        }
        let mut up = vec![BitSet::new(n); n];
        for &v in order.iter().rev() {
            up[v].insert(v);
            let parents = above[v].clone();
            for p in parents {
                let pu = up[p].clone();
                up[v].union_with(&pu);
            }
        }
        let mut down = vec![BitSet::new(n); n];
        for p in 0..n {
            for q in up[p].iter() {
                down[q].insert(p);
            }
        }
        // Cover relation: q covers p iff p < q and no u with p < u < q.
        let mut covers = Vec::new();
        for p in 0..n {
            for q in up[p].iter() {
                if q == p {
                    continue;
                }
                let strict_between = up[p]
                    .iter()
                    .any(|u| u != p && u != q && up[u].contains(q));
                if !strict_between {
                    covers.push((p, q));
                }
            }
        }
        // Longest chain below each element, along the cover DAG.
        let mut height = vec![0u32; n];
        let mut topo: Vec<usize> = (0..n).collect();
        topo.sort_by_key(|&v| down[v].count());
        for &v in &topo {
            height[v] = covers
                .iter()
                .filter(|&&(_, b)| b == v)
                .map(|&(a, _)| height[a] + 1)
                .max()
                .unwrap_or(0);
        }
        let names = (0..n).map(|i| i.to_string()).collect();
        Ok(Poset { n, names, up, down, covers, height })
    }

    pub fn with_names(mut self, names: Vec<String>) -> Self {
        assert_eq!(names.len(), self.n);
        self.names = names;
        self
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn name(&self, p: usize) -> &str {
        &self.names[p]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn leq(&self, p: usize, q: usize) -> bool {
        self.up[p].contains(q)
    }

    pub fn lt(&self, p: usize, q: usize) -> bool {
        p != q && self.leq(p, q)
    }

    pub fn comparable(&self, p: usize, q: usize) -> bool {
        self.leq(p, q) || self.leq(q, p)
    }

    /// Cover pairs `(lower, upper)`.
    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }

    pub fn filter(&self, p: usize) -> &BitSet {
        &self.up[p]
    }

    pub fn ideal(&self, p: usize) -> &BitSet {
        &self.down[p]
    }

    /// Interval `[p, q]` as a bitset; empty unless `p <= q`.
    pub fn interval(&self, p: usize, q: usize) -> BitSet {
        let mut s = self.up[p].clone();
        s.intersect_with(&self.down[q]);
        s
    }

    /// Height of `p`: length of a longest chain from a minimal element.
    pub fn height(&self, p: usize) -> u32 {
        self.height[p]
    }

    pub fn max_height(&self) -> u32 {
        self.height.iter().copied().max().unwrap_or(0)
    }

    /// The unique minimum element, if one exists.
    pub fn minimum(&self) -> Option<usize> {
        (0..self.n).find(|&p| self.down[p].count() == 1 && self.up[p].count() == self.n)
    }

    pub fn minimal_elements(&self) -> Vec<usize> {
        (0..self.n).filter(|&p| self.down[p].count() == 1).collect()
    }

    pub fn maximal_elements(&self) -> Vec<usize> {
        (0..self.n).filter(|&p| self.up[p].count() == 1).collect()
    }

    /// True iff heights behave as a rank function: every cover raises the
    /// height by exactly one.
    pub fn is_graded(&self) -> bool {
        self.covers.iter().all(|&(a, b)| self.height[b] == self.height[a] + 1)
    }

    /// Like [`Poset::from_pairs`] but additionally requires the grading
    /// invariant.
    pub fn from_pairs_graded(n: usize, pairs: &[(usize, usize)]) -> Result<Poset, PosetError> {
        let p = Poset::from_pairs(n, pairs)?;
        if let Some(&(a, b)) = p.covers.iter().find(|&&(a, b)| p.height[b] != p.height[a] + 1) {
            return Err(PosetError::NotGraded(a, b));
        }
        Ok(p)
    }

    /// Cartesian product; element `(p, q)` gets id `p * other.len() + q`.
    pub fn product(&self, other: &Poset) -> Poset {
        let n = self.n * other.n;
        let id = |p: usize, q: usize| p * other.n + q;
        let mut pairs = Vec::new();
        for &(a, b) in &self.covers {
            for q in 0..other.n {
                pairs.push((id(a, q), id(b, q)));
            }
        }
        for &(a, b) in &other.covers {
            for p in 0..self.n {
                pairs.push((id(p, a), id(p, b)));
            }
        }
        let mut poset = Poset::from_pairs(n, &pairs).expect("product of posets is acyclic");
        poset.names = (0..self.n)
            .flat_map(|p| {
                (0..other.n).map(move |q| format!("({},{})", self.names[p], other.names[q]))
            })
            .collect();
        poset
    }

    /// Induced subposet on `elems` (ids relabeled to positions in `elems`),
    /// with the order optionally reversed.
    pub fn induced(&self, elems: &[usize], reversed: bool) -> Poset {
        let mut pairs = Vec::new();
        for (i, &p) in elems.iter().enumerate() {
            for (j, &q) in elems.iter().enumerate() {
                if i != j && self.lt(p, q) {
                    if reversed {
                        pairs.push((j, i));
                    } else {
                        pairs.push((i, j));
                    }
                }
            }
        }
        let mut poset = Poset::from_pairs(elems.len(), &pairs).expect("induced order is acyclic");
        poset.names = elems.iter().map(|&p| self.names[p].clone()).collect();
        poset
    }

    /// All nonempty chains, each as a sorted id list (increasing in the
    /// order). Guarded by `budget` on the number of chains.
    pub fn chains(&self, budget: usize) -> Result<Vec<Vec<usize>>, PosetError> {
        let mut out: Vec<Vec<usize>> = Vec::new();
        let mut stack: Vec<Vec<usize>> = (0..self.n).map(|p| vec![p]).collect();
        while let Some(chain) = stack.pop() {
            if out.len() >= budget {
                return Err(PosetError::TooLarge(format!("more than {budget} chains")));
            }
            let top = *chain.last().unwrap();
            for q in self.up[top].iter() {
                if q != top {
                    let mut next = chain.clone();
                    next.push(q);
                    stack.push(next);
                }
            }
            out.push(chain);
        }
        Ok(out)
    }

    /// Searches for an order isomorphism `self -> other` extending the
    /// partial map `fixed` (pairs `(p, image)`). Returns one if it exists.
    pub fn isomorphism_fixing(
        &self,
        other: &Poset,
        fixed: &[(usize, usize)],
        ops_budget: &mut usize,
    ) -> Option<Vec<usize>> {
        if self.n != other.n {
            return None;
        }
        let mut map = vec![usize::MAX; self.n];
        let mut used = vec![false; self.n];
        for &(p, q) in fixed {
            if map[p] != usize::MAX && map[p] != q {
                return None;
            }
            if map[p] == usize::MAX {
                if used[q] {
                    return None;
                }
                map[p] = q;
                used[q] = true;
            }
        }
        // Order candidates by height so structure prunes early.
        let mut todo: Vec<usize> = (0..self.n).filter(|&p| map[p] == usize::MAX).collect();
        todo.sort_by_key(|&p| self.height[p]);
        if self.backtrack(other, &mut map, &mut used, &todo, 0, ops_budget) {
            Some(map)
        } else {
            None
        }
    }

    fn backtrack(
        &self,
        other: &Poset,
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
        todo: &[usize],
        k: usize,
        ops_budget: &mut usize,
    ) -> bool {
        if k == todo.len() {
            return true;
        }
        let p = todo[k];
        for q in 0..self.n {
            if used[q] || other.height[q] != self.height[p] {
                continue;
            }
            if *ops_budget == 0 {
                return false;
            }
            *ops_budget -= 1;
            // Consistency with everything already mapped.
            let ok = map.iter().enumerate().all(|(p2, &q2)| {
                q2 == usize::MAX
                    || (self.leq(p, p2) == other.leq(q, q2) && self.leq(p2, p) == other.leq(q2, q))
            });
            if !ok {
                continue;
            }
            map[p] = q;
            used[q] = true;
            if self.backtrack(other, map, used, todo, k + 1, ops_budget) {
                return true;
            }
            map[p] = usize::MAX;
            used[q] = false;
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_atoms_over_zero() {
        // covers {(0,a),(0,b)}: 0 is the bottom with atoms a, b.
        let p = Poset::from_pairs(3, &[(0, 1), (0, 2)]).unwrap();
        assert_eq!(p.height(1), 1);
        assert_eq!(p.height(2), 1);
        assert_eq!(p.minimum(), Some(0));
        assert!(p.is_graded());
    }

    #[test]
    fn cycle_rejected() {
        let err = Poset::from_pairs(2, &[(0, 1), (1, 0)]).unwrap_err();
        assert!(matches!(err, PosetError::CycleDetected(_)));
    }

    #[test]
    fn s2_is_graded_rank_one() {
        let p = Poset::from_pairs_graded(3, &[(0, 1), (0, 2)]).unwrap();
        assert_eq!(p.max_height(), 1);
    }

    #[test]
    fn transitive_input_reduced() {
        // chain 0 < 1 < 2 given with the redundant pair (0,2).
        let p = Poset::from_pairs(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(p.covers().len(), 2);
        assert!(p.leq(0, 2));
    }

    #[test]
    fn product_of_chains_is_grid() {
        let chain = Poset::from_pairs(3, &[(0, 1), (1, 2)]).unwrap();
        let grid = chain.product(&chain);
        assert_eq!(grid.len(), 9);
        assert_eq!(grid.max_height(), 4);
        assert!(grid.is_graded());
        assert!(grid.leq(0, 8));
        assert!(!grid.comparable(2, 6));
    }

    #[test]
    fn product_associative_up_to_relabeling() {
        let a = Poset::from_pairs(2, &[(0, 1)]).unwrap();
        let b = Poset::from_pairs(3, &[(0, 1), (0, 2)]).unwrap();
        let c = Poset::from_pairs(2, &[(0, 1)]).unwrap();
        let left = a.product(&b).product(&c);
        let right = a.product(&b.product(&c));
        let mut budget = 1_000_000;
        assert!(left.isomorphism_fixing(&right, &[], &mut budget).is_some());
    }

    #[test]
    fn chains_of_small_poset() {
        let p = Poset::from_pairs(3, &[(0, 1), (0, 2)]).unwrap();
        let chains = p.chains(100).unwrap();
        // {0},{1},{2},{0,1},{0,2}
        assert_eq!(chains.len(), 5);
    }
}
