//! Graph-side structure theory: recognition of modular, weakly modular and
//! swm graphs, admissible orientations, gated and Boolean-gated sets,
//! barycentric subdivision, thickening, Δ-gates and normal Δ-paths.

use std::collections::{HashMap, HashSet, VecDeque};

use once_cell::sync::OnceCell;

use crate::bitset::BitSet;
use crate::poset::{Poset, PosetError};
use crate::rational::{rat, Rat};
use crate::semilattice::Semilattice;

/// Hard cap on vertex counts for the subset-scanning recognizers.
pub const RECOGNITION_BUDGET: usize = 2000;

/// Budget on states explored by the normal Δ-path searches.
pub const DELTA_PATH_BUDGET: usize = 10_000_000;

#[derive(Debug, thiserror::Error)]
pub enum GraphError {
    #[error("graph is not connected")]
    NotConnected,
    #[error("bad edge {0}-{1} (loop, duplicate, or out of range)")]
    BadEdge(usize, usize),
    #[error("orientation violates the 4-cycle rule")]
    NotAdmissible,
    #[error("orientation contains a directed cycle")]
    NotAcyclic,
    #[error("graph is not modular")]
    NotModular,
    #[error("graph is not weakly modular")]
    NotWeaklyModular,
    #[error("graph is not an swm-graph")]
    NotSwm,
    #[error("graph is not oriented modular")]
    NotOrientedModular,
    #[error("vertices must be distinct")]
    SameVertex,
    #[error("search budget exceeded: {0}")]
    SearchBudgetExceeded(String),
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error(transparent)]
    Poset(#[from] PosetError),
}

/// A connected simple graph with a uniform positive rational edge length and
/// an optional admissible orientation. Distances, the `⊑` relation, the
/// Boolean-gated sets and the thickening are computed lazily and cached; the
/// graph is immutable after construction.
#[derive(Clone, Debug)]
pub struct OrientedGraph {
    n: usize,
    names: Vec<String>,
    adj: Vec<BitSet>,
    /// Canonical edge list, each pair stored as `(u, v)` with `u < v`.
    edges: Vec<(usize, usize)>,
    edge_index: HashMap<(usize, usize), usize>,
    edge_length: Rat,
    /// `dir[e] = true` means `edges[e].0 → edges[e].1`.
    dir: Option<Vec<bool>>,
    /// Partial order induced by the orientation (present iff oriented).
    order: Option<Poset>,
    dist: OnceCell<Vec<u32>>,
    weakly_modular: OnceCell<bool>,
    modular: OnceCell<bool>,
    swm: OnceCell<bool>,
    /// `sq[x]` holds `y` iff `x ⊑ y`.
    sq: OnceCell<Vec<BitSet>>,
    bgated: OnceCell<Vec<BitSet>>,
    delta_adj: OnceCell<Vec<BitSet>>,
    delta_dist: OnceCell<Vec<u32>>,
}

/// A principal substructure of an oriented modular graph extracted as a
/// semilattice; `elements[i]` is the graph vertex behind lattice element `i`.
#[derive(Clone, Debug)]
pub struct Substructure {
    pub lattice: Semilattice,
    pub elements: Vec<usize>,
}

impl OrientedGraph {
    pub fn new(n: usize, edges: &[(usize, usize)], edge_length: Rat) -> Result<Self, GraphError> {
        assert!(n > 0, "graph must have at least one vertex");
        assert!(edge_length > rat(0, 1), "edge length must be positive");
        let mut adj = vec![BitSet::new(n); n];
        let mut canon = Vec::with_capacity(edges.len());
        let mut seen = HashSet::new();
        for &(u, v) in edges {
            if u == v || u >= n || v >= n {
                return Err(GraphError::BadEdge(u, v));
            }
            let e = (u.min(v), u.max(v));
            if !seen.insert(e) {
                return Err(GraphError::BadEdge(u, v));
            }
            adj[u].insert(v);
            adj[v].insert(u);
            canon.push(e);
        }
        canon.sort_unstable();
        let edge_index = canon.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let g = OrientedGraph {
            n,
            names: (0..n).map(|v| v.to_string()).collect(),
            adj,
            edges: canon,
            edge_index,
            edge_length,
            dir: None,
            order: None,
            dist: OnceCell::new(),
            weakly_modular: OnceCell::new(),
            modular: OnceCell::new(),
            swm: OnceCell::new(),
            sq: OnceCell::new(),
            bgated: OnceCell::new(),
            delta_adj: OnceCell::new(),
            delta_dist: OnceCell::new(),
        };
        if !g.is_connected() {
            return Err(GraphError::NotConnected);
        }
        Ok(g)
    }

    pub fn with_names(mut self, names: Vec<String>) -> Self {
        assert_eq!(names.len(), self.n);
        self.names = names;
        self
    }

    /// Installs an orientation, validating the 4-cycle rule and acyclicity.
    /// `dir[e] = true` orients `edges[e].0 → edges[e].1`.
    pub fn with_orientation(mut self, dir: Vec<bool>) -> Result<Self, GraphError> {
        assert_eq!(dir.len(), self.edges.len());
        for ((e1, f1), (e2, f2)) in self.four_cycle_constraints() {
            if (dir[e1] ^ f1) != (dir[e2] ^ f2) {
                return Err(GraphError::NotAdmissible);
            }
        }
        let pairs: Vec<(usize, usize)> = self
            .edges
            .iter()
            .zip(&dir)
            .map(|(&(u, v), &d)| if d { (u, v) } else { (v, u) })
            .collect();
        let mut order = Poset::from_pairs(self.n, &pairs).map_err(|e| match e {
            PosetError::CycleDetected(_) => GraphError::NotAcyclic,
            other => GraphError::Poset(other),
        })?;
        order = order.with_names(self.names.clone());
        self.dir = Some(dir);
        self.order = Some(order);
        // Invalidate orientation-dependent caches.
        self.sq = OnceCell::new();
        self.bgated = OnceCell::new();
        self.delta_adj = OnceCell::new();
        self.delta_dist = OnceCell::new();
        Ok(self)
    }

    /// Installs an orientation given as `(lower, upper)` pairs: each pair
    /// `(p, q)` orients its edge so that `p ⪯ q` in the induced order.
    pub fn with_directed_edges(self, directed: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut dir = vec![None; self.edges.len()];
        for &(u, v) in directed {
            let e = *self
                .edge_index
                .get(&(u.min(v), u.max(v)))
                .ok_or(GraphError::BadEdge(u, v))?;
            let d = u < v;
            if dir[e].is_some_and(|old| old != d) {
                return Err(GraphError::BadEdge(u, v));
            }
            dir[e] = Some(d);
        }
        let dir = dir
            .into_iter()
            .collect::<Option<Vec<bool>>>()
            .expect("every edge must receive a direction");
        self.with_orientation(dir)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn edge_length(&self) -> &Rat {
        &self.edge_length
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(v)
    }

    pub fn neighbors(&self, v: usize) -> &BitSet {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count()
    }

    pub fn is_oriented(&self) -> bool {
        self.order.is_some()
    }

    /// The partial order `⪯` induced by the orientation.
    pub fn order(&self) -> &Poset {
        self.order.as_ref().expect("graph carries no orientation")
    }

    /// The direction flags of the current orientation.
    pub fn orientation(&self) -> Option<&[bool]> {
        self.dir.as_deref()
    }

    /// The same graph with the orientation dropped.
    pub fn unoriented(&self) -> OrientedGraph {
        let mut g = self.clone();
        g.dir = None;
        g.order = None;
        g.sq = OnceCell::new();
        g.bgated = OnceCell::new();
        g.delta_adj = OnceCell::new();
        g.delta_dist = OnceCell::new();
        g
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for v in self.adj[u].iter() {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    queue.push_back(v);
                }
            }
        }
        count == self.n
    }

    fn dists(&self) -> &[u32] {
        self.dist.get_or_init(|| {
            let mut d = vec![u32::MAX; self.n * self.n];
            for s in 0..self.n {
                bfs_into(&self.adj, s, &mut d[s * self.n..(s + 1) * self.n]);
            }
            d
        })
    }

    /// Hop distance (number of edges on a shortest path).
    pub fn hop_dist(&self, u: usize, v: usize) -> u32 {
        self.dists()[u * self.n + v]
    }

    /// Metric distance: hop distance times the edge length.
    pub fn metric_dist(&self, u: usize, v: usize) -> Rat {
        self.edge_length.clone() * rat(i64::from(self.hop_dist(u, v)), 1)
    }

    /// The metric interval `I(x,y)`.
    pub fn interval(&self, x: usize, y: usize) -> BitSet {
        let d = self.hop_dist(x, y);
        BitSet::from_iter(
            self.n,
            (0..self.n).filter(|&z| self.hop_dist(x, z) + self.hop_dist(z, y) == d),
        )
    }

    // ------------------------------------------------------------------
    // Recognition
    // ------------------------------------------------------------------

    /// A triple whose three pairwise metric intervals have empty common
    /// intersection, if one exists.
    pub fn modular_violation(&self) -> Option<(usize, usize, usize)> {
        let intervals: Vec<Vec<BitSet>> = (0..self.n)
            .map(|x| (0..self.n).map(|y| self.interval(x, y)).collect())
            .collect();
        for x in 0..self.n {
            for y in x..self.n {
                for z in y..self.n {
                    let mut common = intervals[x][y].clone();
                    common.intersect_with(&intervals[y][z]);
                    common.intersect_with(&intervals[z][x]);
                    if common.is_empty() {
                        return Some((x, y, z));
                    }
                }
            }
        }
        None
    }

    pub fn is_modular_graph(&self) -> bool {
        *self.modular.get_or_init(|| self.modular_violation().is_none())
    }

    /// A witness violating the triangle (TC) or quadrangle (QC) condition.
    pub fn weak_modularity_violation(&self) -> Option<Vec<usize>> {
        let d = |u: usize, v: usize| self.hop_dist(u, v);
        // TC: d(x,y) = 1, d(x,z) = d(y,z) => some common neighbor u of x,y
        // has d(u,z) = d(x,z) - 1.
        for &(x, y) in &self.edges {
            for z in 0..self.n {
                if d(x, z) == d(y, z) && d(x, z) > 0 {
                    let ok = self.common_neighbors(x, y).iter().any(|u| d(u, z) + 1 == d(x, z));
                    if !ok {
                        return Some(vec![x, y, z]);
                    }
                }
            }
        }
        // QC: d(x,y) = 2, d(w,x) = d(w,y) = 1, d(w,z) - 1 = d(x,z) = d(y,z)
        // => some common neighbor u of x,y has d(u,z) = d(x,z) - 1.
        for x in 0..self.n {
            for y in (x + 1)..self.n {
                if d(x, y) != 2 {
                    continue;
                }
                let cn = self.common_neighbors(x, y);
                for w in cn.iter() {
                    for z in 0..self.n {
                        if d(w, z) == d(x, z) + 1 && d(x, z) == d(y, z) && d(x, z) > 0 {
                            let ok = cn.iter().any(|u| d(u, z) + 1 == d(x, z));
                            if !ok {
                                return Some(vec![x, y, w, z]);
                            }
                        }
                    }
                }
            }
        }
        None
    }

    pub fn is_weakly_modular(&self) -> bool {
        *self
            .weakly_modular
            .get_or_init(|| self.weak_modularity_violation().is_none())
    }

    fn common_neighbors(&self, u: usize, v: usize) -> BitSet {
        let mut s = self.adj[u].clone();
        s.intersect_with(&self.adj[v]);
        s
    }

    /// Vertices of an induced `K_4^-` (two triangles sharing an edge), if any.
    pub fn induced_k4_minus(&self) -> Option<[usize; 4]> {
        for x in 0..self.n {
            for y in (x + 1)..self.n {
                if !self.adjacent(x, y) {
                    continue;
                }
                for z in (y + 1)..self.n {
                    if !(self.adjacent(x, z) && self.adjacent(y, z)) {
                        continue;
                    }
                    for w in 0..self.n {
                        if w == x || w == y || w == z {
                            continue;
                        }
                        let k = [self.adjacent(w, x), self.adjacent(w, y), self.adjacent(w, z)]
                            .iter()
                            .filter(|&&b| b)
                            .count();
                        if k == 2 {
                            return Some([x, y, z, w]);
                        }
                    }
                }
            }
        }
        None
    }

    /// Vertices of an isometric `K_{3,3}^-` (two triples `a`, `b`, all cross
    /// edges except `a1 b1`), if any.
    pub fn isometric_k33_minus(&self) -> Option<[usize; 6]> {
        let d = |u: usize, v: usize| self.hop_dist(u, v);
        for a1 in 0..self.n {
            for b1 in 0..self.n {
                if d(a1, b1) != 3 {
                    continue;
                }
                // a-side candidates: neighbors of b1 at distance 2 from a1.
                let aside: Vec<usize> =
                    self.adj[b1].iter().filter(|&a| d(a1, a) == 2).collect();
                let bside: Vec<usize> =
                    self.adj[a1].iter().filter(|&b| d(b1, b) == 2).collect();
                for (i, &a2) in aside.iter().enumerate() {
                    for &a3 in &aside[i + 1..] {
                        if d(a2, a3) != 2 {
                            continue;
                        }
                        for (j, &b2) in bside.iter().enumerate() {
                            for &b3 in &bside[j + 1..] {
                                if d(b2, b3) != 2 {
                                    continue;
                                }
                                if self.adjacent(a2, b2)
                                    && self.adjacent(a2, b3)
                                    && self.adjacent(a3, b2)
                                    && self.adjacent(a3, b3)
                                {
                                    return Some([a1, a2, a3, b1, b2, b3]);
                                }
                            }
                        }
                    }
                }
            }
        }
        None
    }

    pub fn is_swm(&self) -> Result<bool, GraphError> {
        if self.n > RECOGNITION_BUDGET {
            return Err(GraphError::TooLarge(format!(
                "swm recognition capped at {RECOGNITION_BUDGET} vertices, got {}",
                self.n
            )));
        }
        Ok(*self.swm.get_or_init(|| {
            self.is_weakly_modular()
                && self.induced_k4_minus().is_none()
                && self.isometric_k33_minus().is_none()
        }))
    }

    // ------------------------------------------------------------------
    // Admissible orientations
    // ------------------------------------------------------------------

    /// Parity couplings of opposite edges over all 4-cycles. Each constraint
    /// `((e1, f1), (e2, f2))` requires `dir[e1] ^ f1 == dir[e2] ^ f2`.
    fn four_cycle_constraints(&self) -> Vec<((usize, bool), (usize, bool))> {
        // `(dir[e] ^ flip)` is true exactly when the edge points `a → b`.
        let along = |a: usize, b: usize| -> (usize, bool) {
            let e = self.edge_index[&(a.min(b), a.max(b))];
            (e, a > b)
        };
        let mut out = Vec::new();
        for u in 0..self.n {
            for w in (u + 1)..self.n {
                let cn: Vec<usize> = self.common_neighbors(u, w).iter().collect();
                for (i, &a) in cn.iter().enumerate() {
                    for &c in &cn[i + 1..] {
                        // 4-cycle a - u - c - w: a → u forces w → c, and
                        // u → c forces a → w.
                        out.push((along(a, u), along(w, c)));
                        out.push((along(u, c), along(a, w)));
                    }
                }
            }
        }
        out
    }

    /// Searches for an admissible orientation. The result is deterministic:
    /// edges are visited in canonical order and the first edge of every
    /// parity-coupled component is directed from its smaller endpoint to its
    /// larger one, which yields the lexicographically largest direction
    /// vector under the `(lower, upper) = (u, v)` preference.
    pub fn find_admissible_orientation(&self) -> Result<Option<Vec<bool>>, GraphError> {
        if !self.is_modular_graph() {
            return Err(GraphError::NotModular);
        }
        let m = self.edges.len();
        let mut dsu = ParityDsu::new(m);
        for ((e1, f1), (e2, f2)) in self.four_cycle_constraints() {
            if !dsu.union(e1, e2, f1 ^ f2) {
                return Ok(None);
            }
        }
        let mut root_value: Vec<Option<bool>> = vec![None; m];
        let mut dir = vec![false; m];
        for e in 0..m {
            let (root, parity) = dsu.find(e);
            let rv = *root_value[root].get_or_insert(parity);
            dir[e] = rv ^ parity ^ true;
        }
        // An admissible orientation of a modular graph is acyclic; the
        // validating constructor double-checks both properties.
        let check = self
            .clone()
            .with_orientation(dir.clone())
            .expect("consistent parity assignment must be admissible and acyclic");
        drop(check);
        Ok(Some(dir))
    }

    /// Convenience: the graph endowed with the orientation found by
    /// [`Self::find_admissible_orientation`].
    pub fn orient(self) -> Result<Self, GraphError> {
        match self.find_admissible_orientation()? {
            Some(dir) => self.with_orientation(dir),
            None => Err(GraphError::NotOrientedModular),
        }
    }

    // ------------------------------------------------------------------
    // Gated sets
    // ------------------------------------------------------------------

    /// Chepoi's characterization: `X` is gated iff it induces a connected
    /// subgraph closed under common neighbors of its pairs.
    pub fn is_gated(&self, x: &BitSet) -> Result<bool, GraphError> {
        if !self.is_weakly_modular() {
            return Err(GraphError::NotWeaklyModular);
        }
        let members: Vec<usize> = x.iter().collect();
        assert!(!members.is_empty(), "gated sets are nonempty");
        if !self.induced_connected(x, &members) {
            return Ok(false);
        }
        for (i, &u) in members.iter().enumerate() {
            for &v in &members[i + 1..] {
                if !self.common_neighbors(u, v).is_subset(x) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    fn induced_connected(&self, x: &BitSet, members: &[usize]) -> bool {
        let mut seen = BitSet::new(self.n);
        let mut queue = VecDeque::from([members[0]]);
        seen.insert(members[0]);
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for v in self.adj[u].iter() {
                if x.contains(v) && !seen.contains(v) {
                    seen.insert(v);
                    count += 1;
                    queue.push_back(v);
                }
            }
        }
        count == members.len()
    }

    /// The least gated superset `⟨⟨X⟩⟩`: closure under common neighbors, with
    /// metric intervals added when the induced subgraph is disconnected
    /// (every gated set is convex, so both additions stay inside any gated
    /// superset).
    pub fn gated_hull(&self, x: &BitSet) -> Result<BitSet, GraphError> {
        if !self.is_weakly_modular() {
            return Err(GraphError::NotWeaklyModular);
        }
        let mut cur = x.clone();
        loop {
            let members: Vec<usize> = cur.iter().collect();
            let mut next = cur.clone();
            for (i, &u) in members.iter().enumerate() {
                for &v in &members[i + 1..] {
                    next.union_with(&self.common_neighbors(u, v));
                }
            }
            if next == cur {
                if self.induced_connected(&cur, &members) {
                    return Ok(cur);
                }
                for (i, &u) in members.iter().enumerate() {
                    for &v in &members[i + 1..] {
                        next.union_with(&self.interval(u, v));
                    }
                }
            }
            cur = next;
        }
    }

    /// `⟨⟨x,y⟩⟩` for a vertex pair.
    pub fn pair_hull(&self, x: usize, y: usize) -> Result<BitSet, GraphError> {
        self.gated_hull(&BitSet::from_iter(self.n, [x, y]))
    }

    // ------------------------------------------------------------------
    // Boolean-gated sets
    // ------------------------------------------------------------------

    /// Thickness of the subgraph induced by `x`: every pair at induced
    /// distance 2 has two common neighbors in `x` at induced distance 2.
    fn induced_thick(&self, x: &BitSet) -> bool {
        let members: Vec<usize> = x.iter().collect();
        let k = members.len();
        let pos: HashMap<usize, usize> = members.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut ind_adj = vec![BitSet::new(k); k];
        for (i, &u) in members.iter().enumerate() {
            for v in self.adj[u].iter() {
                if let Some(&j) = pos.get(&v) {
                    ind_adj[i].insert(j);
                }
            }
        }
        let mut dist = vec![u32::MAX; k * k];
        for s in 0..k {
            bfs_into(&ind_adj, s, &mut dist[s * k..(s + 1) * k]);
        }
        for u in 0..k {
            for v in (u + 1)..k {
                if dist[u * k + v] != 2 {
                    continue;
                }
                let mut cn = ind_adj[u].clone();
                cn.intersect_with(&ind_adj[v]);
                let cns: Vec<usize> = cn.iter().collect();
                let ok = cns.iter().enumerate().any(|(i, &z)| {
                    cns[i + 1..].iter().any(|&w| dist[z * k + w] == 2)
                });
                if !ok {
                    return false;
                }
            }
        }
        true
    }

    /// All Boolean-gated sets, canonically sorted. For oriented modular
    /// graphs these are the intervals `[x,y]` with `x ⊑ y` (authoritative);
    /// otherwise gated pair hulls and singletons are filtered by thickness
    /// and gatedness. Whenever both enumerations apply they are
    /// cross-validated against each other.
    pub fn boolean_gated_sets(&self) -> Result<&[BitSet], GraphError> {
        if !self.is_swm()? {
            return Err(GraphError::NotSwm);
        }
        if self.bgated.get().is_none() {
            let sets = if self.is_oriented() && self.is_modular_graph() {
                let from_intervals = self.bgated_from_intervals();
                let from_hulls = self.bgated_from_hulls()?;
                assert_eq!(
                    from_intervals, from_hulls,
                    "interval and hull enumerations of Boolean-gated sets disagree"
                );
                from_intervals
            } else {
                self.bgated_from_hulls()?
            };
            let _ = self.bgated.set(sets);
        }
        Ok(self.bgated.get().unwrap())
    }

    fn bgated_from_intervals(&self) -> Vec<BitSet> {
        let order = self.order();
        let mut out = Vec::new();
        for x in 0..self.n {
            for y in self.sq_matrix()[x].iter() {
                out.push(order.interval(x, y));
            }
        }
        sort_sets(&mut out);
        out
    }

    fn bgated_from_hulls(&self) -> Result<Vec<BitSet>, GraphError> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for x in 0..self.n {
            for y in x..self.n {
                let hull = self.pair_hull(x, y)?;
                if seen.contains(&hull) {
                    continue;
                }
                let keep = self.induced_thick(&hull) && self.is_gated(&hull)?;
                if keep {
                    out.push(hull.clone());
                }
                seen.insert(hull);
            }
        }
        sort_sets(&mut out);
        Ok(out)
    }

    // ------------------------------------------------------------------
    // The relation ⊑ and order-theoretic helpers
    // ------------------------------------------------------------------

    /// `x ⊑ y`: `x ⪯ y` and the interval `[x,y]` is a complemented modular
    /// lattice.
    pub fn sq_leq(&self, x: usize, y: usize) -> bool {
        self.sq_matrix()[x].contains(y)
    }

    fn sq_matrix(&self) -> &[BitSet] {
        self.sq.get_or_init(|| {
            let order = self.order();
            let mut sq = vec![BitSet::new(self.n); self.n];
            for x in 0..self.n {
                for y in order.filter(x).iter() {
                    if self.interval_is_complemented_modular(x, y) {
                        sq[x].insert(y);
                    }
                }
            }
            sq
        })
    }

    fn interval_is_complemented_modular(&self, x: usize, y: usize) -> bool {
        let order = self.order();
        let elems: Vec<usize> = order.interval(x, y).iter().collect();
        let induced = order.induced(&elems, false);
        match Semilattice::new(induced) {
            Ok(l) => {
                // A finite bounded poset with all meets is a lattice.
                l.is_modular_semilattice() && l.is_complemented()
            }
            Err(_) => false,
        }
    }

    /// The graph is well-oriented when `⪯` and `⊑` coincide.
    pub fn is_well_oriented(&self) -> bool {
        let order = self.order();
        let sq = self.sq_matrix();
        (0..self.n).all(|x| order.filter(x).iter().all(|y| sq[x].contains(y)))
    }

    /// Greatest lower bound in the orientation order, if it exists.
    pub fn order_meet(&self, x: usize, y: usize) -> Option<usize> {
        let order = self.order();
        let mut lower = order.ideal(x).clone();
        lower.intersect_with(order.ideal(y));
        unique_extreme(&lower, |a, b| order.leq(a, b))
    }

    /// Least upper bound in the orientation order, if it exists.
    pub fn order_join(&self, x: usize, y: usize) -> Option<usize> {
        let order = self.order();
        let mut upper = order.filter(x).clone();
        upper.intersect_with(order.filter(y));
        unique_extreme(&upper, |a, b| order.leq(b, a))
    }

    // ------------------------------------------------------------------
    // Thickening
    // ------------------------------------------------------------------

    fn delta_adjacency(&self) -> Result<&[BitSet], GraphError> {
        if self.delta_adj.get().is_none() {
            let sets = self.boolean_gated_sets()?;
            let mut adj = vec![BitSet::new(self.n); self.n];
            for s in sets {
                let members: Vec<usize> = s.iter().collect();
                for (i, &u) in members.iter().enumerate() {
                    for &v in &members[i + 1..] {
                        adj[u].insert(v);
                        adj[v].insert(u);
                    }
                }
            }
            if self.is_oriented() && self.is_modular_graph() {
                // Cross-check: Δ-adjacency means x∨y and x∧y exist with
                // x∧y ⊑ x∨y.
                for x in 0..self.n {
                    for y in (x + 1)..self.n {
                        let lattice_like = match (self.order_meet(x, y), self.order_join(x, y)) {
                            (Some(m), Some(j)) => self.sq_leq(m, j),
                            _ => false,
                        };
                        assert_eq!(
                            adj[x].contains(y),
                            lattice_like,
                            "Δ-adjacency mismatch at ({x},{y})"
                        );
                    }
                }
            }
            let _ = self.delta_adj.set(adj);
        }
        Ok(self.delta_adj.get().unwrap())
    }

    pub fn delta_neighbors(&self, x: usize) -> Result<&BitSet, GraphError> {
        Ok(&self.delta_adjacency()?[x])
    }

    pub fn delta_adjacent(&self, x: usize, y: usize) -> Result<bool, GraphError> {
        Ok(x != y && self.delta_adjacency()?[x].contains(y))
    }

    /// Hop distance in the thickening (`d^Δ` divided by the edge length).
    pub fn delta_dist(&self, x: usize, y: usize) -> Result<u32, GraphError> {
        if self.delta_dist.get().is_none() {
            let adj = self.delta_adjacency()?.to_vec();
            let mut d = vec![u32::MAX; self.n * self.n];
            for s in 0..self.n {
                bfs_into(&adj, s, &mut d[s * self.n..(s + 1) * self.n]);
            }
            let _ = self.delta_dist.set(d);
        }
        Ok(self.delta_dist.get().unwrap()[x * self.n + y])
    }

    /// The thickening as a plain graph (Δ-balls are verified `d`-gated).
    pub fn thickening(&self) -> Result<OrientedGraph, GraphError> {
        let adj = self.delta_adjacency()?;
        let mut edges = Vec::new();
        for x in 0..self.n {
            for y in adj[x].iter() {
                if x < y {
                    edges.push((x, y));
                }
            }
        }
        let g = OrientedGraph::new(self.n, &edges, self.edge_length.clone())?
            .with_names(self.names.clone());
        for x in 0..self.n {
            let ecc = (0..self.n)
                .map(|y| self.delta_dist(x, y).unwrap())
                .max()
                .unwrap();
            for r in 0..=ecc {
                let ball = BitSet::from_iter(
                    self.n,
                    (0..self.n).filter(|&y| self.delta_dist(x, y).unwrap() <= r),
                );
                assert!(
                    self.is_gated(&ball)?,
                    "Δ-ball of radius {r} at {x} is not d-gated"
                );
            }
        }
        Ok(g)
    }

    // ------------------------------------------------------------------
    // Δ-gates and normal Δ-paths
    // ------------------------------------------------------------------

    /// The unique Δ-neighbor of `x` one Δ-step toward `y` lying in every
    /// `⟨⟨x,v⟩⟩` over the competing Δ-neighbors `v`.
    pub fn delta_gate(&self, x: usize, y: usize) -> Result<usize, GraphError> {
        if x == y {
            return Err(GraphError::SameVertex);
        }
        let dxy = self.delta_dist(x, y)?;
        let candidates: Vec<usize> = self
            .delta_neighbors(x)?
            .iter()
            .filter(|&v| self.delta_dist(v, y).unwrap() + 1 == dxy)
            .collect();
        assert!(!candidates.is_empty());
        let hulls: Vec<BitSet> = candidates
            .iter()
            .map(|&v| self.pair_hull(x, v))
            .collect::<Result<_, _>>()?;
        let gates: Vec<usize> = candidates
            .iter()
            .copied()
            .filter(|&u| hulls.iter().all(|h| h.contains(u)))
            .collect();
        assert_eq!(gates.len(), 1, "Δ-gate of {y} at {x} is not unique");
        Ok(gates[0])
    }

    /// The unique normal Δ-path from `x` to `y`. A Δ-path `x_0, …, x_m` is
    /// normal when for each inner index `i` every Boolean-gated set
    /// containing `⟨⟨x_{i-1}, x_i⟩⟩` meets `⟨⟨x_i, x_{i+1}⟩⟩` in `{x_i}`
    /// only. The search first runs over Δ-geodesics (the normality predicate
    /// is prefix-checkable); if that does not isolate a single path, a full
    /// search over simple Δ-paths takes over.
    pub fn normal_delta_path(&self, x: usize, y: usize) -> Result<Vec<usize>, GraphError> {
        if x == y {
            return Ok(vec![x]);
        }
        let mut budget = DELTA_PATH_BUDGET;
        let geodesic = self.normal_delta_paths_bounded(x, y, self.delta_dist(x, y)?, &mut budget)?;
        if geodesic.len() == 1 {
            return Ok(geodesic.into_iter().next().unwrap());
        }
        let mut budget = DELTA_PATH_BUDGET;
        let all = self.normal_delta_paths_bounded(x, y, self.n as u32, &mut budget)?;
        assert_eq!(all.len(), 1, "normal Δ-path from {x} to {y} is not unique");
        Ok(all.into_iter().next().unwrap())
    }

    /// All normal Δ-paths from `x` to `y` of Δ-length at most `max_len`
    /// (simple paths; exhaustive).
    pub fn normal_delta_paths_bounded(
        &self,
        x: usize,
        y: usize,
        max_len: u32,
        budget: &mut usize,
    ) -> Result<Vec<Vec<usize>>, GraphError> {
        self.delta_adjacency()?;
        let mut hulls: HashMap<(usize, usize), BitSet> = HashMap::new();
        let mut out = Vec::new();
        let mut path = vec![x];
        let mut on_path = BitSet::new(self.n);
        on_path.insert(x);
        self.normal_dfs(y, max_len, &mut path, &mut on_path, &mut hulls, &mut out, budget)?;
        Ok(out)
    }

    #[allow(clippy::too_many_arguments)]
    fn normal_dfs(
        &self,
        y: usize,
        max_len: u32,
        path: &mut Vec<usize>,
        on_path: &mut BitSet,
        hulls: &mut HashMap<(usize, usize), BitSet>,
        out: &mut Vec<Vec<usize>>,
        budget: &mut usize,
    ) -> Result<(), GraphError> {
        let cur = *path.last().unwrap();
        if cur == y {
            out.push(path.clone());
            return Ok(());
        }
        if path.len() as u32 > max_len {
            return Ok(());
        }
        if *budget == 0 {
            return Err(GraphError::SearchBudgetExceeded(
                "normal Δ-path enumeration".into(),
            ));
        }
        *budget -= 1;
        let remaining = max_len + 1 - path.len() as u32;
        let nexts: Vec<usize> = self.delta_neighbors(cur)?.iter().collect();
        for next in nexts {
            if on_path.contains(next) || self.delta_dist(next, y)? >= remaining {
                continue;
            }
            if !self.step_is_normal(path, next, hulls)? {
                continue;
            }
            path.push(next);
            on_path.insert(next);
            self.normal_dfs(y, max_len, path, on_path, hulls, out, budget)?;
            on_path.remove(next);
            path.pop();
        }
        Ok(())
    }

    fn step_is_normal(
        &self,
        path: &[usize],
        next: usize,
        hulls: &mut HashMap<(usize, usize), BitSet>,
    ) -> Result<bool, GraphError> {
        if path.len() < 2 {
            return Ok(true);
        }
        let prev = path[path.len() - 2];
        let cur = path[path.len() - 1];
        let prev_hull = self.cached_hull(prev, cur, hulls)?;
        let next_hull = self.cached_hull(cur, next, hulls)?;
        for b in self.boolean_gated_sets()? {
            if !prev_hull.is_subset(b) {
                continue;
            }
            let mut meet = b.clone();
            meet.intersect_with(&next_hull);
            if meet.count() != 1 || !meet.contains(cur) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn cached_hull(
        &self,
        a: usize,
        b: usize,
        hulls: &mut HashMap<(usize, usize), BitSet>,
    ) -> Result<BitSet, GraphError> {
        let key = (a.min(b), a.max(b));
        if let Some(h) = hulls.get(&key) {
            return Ok(h.clone());
        }
        let h = self.pair_hull(a, b)?;
        hulls.insert(key, h.clone());
        Ok(h)
    }

    // ------------------------------------------------------------------
    // Principal substructures
    // ------------------------------------------------------------------

    fn require_oriented_modular(&self) -> Result<(), GraphError> {
        if !self.is_oriented() || !self.is_modular_graph() {
            return Err(GraphError::NotOrientedModular);
        }
        Ok(())
    }

    fn substructure(&self, elems: Vec<usize>, reversed: bool) -> Result<Substructure, GraphError> {
        let induced = self.order().induced(&elems, reversed);
        let lattice = Semilattice::new(induced)?;
        assert!(
            lattice.is_modular_semilattice(),
            "principal substructure is not a modular semilattice"
        );
        Ok(Substructure { lattice, elements: elems })
    }

    /// `I_x`: the principal `⪯`-ideal with the order reversed, so `x` is the
    /// bottom element.
    pub fn principal_ideal(&self, x: usize) -> Result<Substructure, GraphError> {
        self.require_oriented_modular()?;
        self.substructure(self.order().ideal(x).iter().collect(), true)
    }

    /// `F_x`: the principal `⪯`-filter.
    pub fn principal_filter(&self, x: usize) -> Result<Substructure, GraphError> {
        self.require_oriented_modular()?;
        self.substructure(self.order().filter(x).iter().collect(), false)
    }

    /// `I′_x`: the principal `⊑`-ideal, reversed.
    pub fn sq_ideal(&self, x: usize) -> Result<Substructure, GraphError> {
        self.require_oriented_modular()?;
        let elems: Vec<usize> = (0..self.n).filter(|&y| self.sq_leq(y, x)).collect();
        let s = self.substructure(elems, true)?;
        assert!(s.lattice.is_complemented());
        Ok(s)
    }

    /// `F′_x`: the principal `⊑`-filter.
    pub fn sq_filter(&self, x: usize) -> Result<Substructure, GraphError> {
        self.require_oriented_modular()?;
        let elems: Vec<usize> = self.sq_matrix()[x].iter().collect();
        let s = self.substructure(elems, false)?;
        assert!(s.lattice.is_complemented());
        Ok(s)
    }

    // ------------------------------------------------------------------
    // Products and isomorphism
    // ------------------------------------------------------------------

    /// Cartesian product; vertex `(u,v)` has id `u * other.len() + v`. The
    /// orientation (when both factors carry one) is componentwise.
    pub fn product(&self, other: &OrientedGraph) -> OrientedGraph {
        assert_eq!(self.edge_length, other.edge_length);
        let n = self.n * other.n;
        let id = |u: usize, v: usize| u * other.n + v;
        let mut edges = Vec::new();
        let mut directed = Vec::new();
        for &(u1, u2) in &self.edges {
            let e = self.edge_index[&(u1, u2)];
            for v in 0..other.n {
                edges.push((id(u1, v), id(u2, v)));
                if let Some(dir) = &self.dir {
                    let (t, h) = if dir[e] { (u1, u2) } else { (u2, u1) };
                    directed.push((id(t, v), id(h, v)));
                }
            }
        }
        for &(v1, v2) in &other.edges {
            let e = other.edge_index[&(v1, v2)];
            for u in 0..self.n {
                edges.push((id(u, v1), id(u, v2)));
                if let Some(dir) = &other.dir {
                    let (t, h) = if dir[e] { (v1, v2) } else { (v2, v1) };
                    directed.push((id(u, t), id(u, h)));
                }
            }
        }
        let names = (0..self.n)
            .flat_map(|u| {
                (0..other.n).map(move |v| format!("({},{})", self.names[u], other.names[v]))
            })
            .collect();
        let g = OrientedGraph::new(n, &edges, self.edge_length.clone())
            .expect("product of connected graphs is connected")
            .with_names(names);
        if self.is_oriented() && other.is_oriented() {
            g.with_directed_edges(&directed)
                .expect("componentwise orientation of a product is admissible")
        } else {
            g
        }
    }

    /// Strong product (unoriented): `(u,v) ~ (u',v')` when each coordinate is
    /// adjacent or equal and the pairs differ.
    pub fn strong_product(&self, other: &OrientedGraph) -> OrientedGraph {
        assert_eq!(self.edge_length, other.edge_length);
        let n = self.n * other.n;
        let id = |u: usize, v: usize| u * other.n + v;
        let mut edges = Vec::new();
        for u in 0..self.n {
            for v in 0..other.n {
                for u2 in 0..self.n {
                    for v2 in 0..other.n {
                        if id(u, v) >= id(u2, v2) {
                            continue;
                        }
                        let du = u == u2 || self.adjacent(u, u2);
                        let dv = v == v2 || other.adjacent(v, v2);
                        if du && dv {
                            edges.push((id(u, v), id(u2, v2)));
                        }
                    }
                }
            }
        }
        let names = (0..self.n)
            .flat_map(|u| {
                (0..other.n).map(move |v| format!("({},{})", self.names[u], other.names[v]))
            })
            .collect();
        OrientedGraph::new(n, &edges, self.edge_length.clone())
            .expect("strong product of connected graphs is connected")
            .with_names(names)
    }

    /// Backtracking isomorphism search; orientation is respected when both
    /// graphs carry one. Returns the vertex map `self → other`.
    pub fn find_isomorphism(&self, other: &OrientedGraph) -> Option<Vec<usize>> {
        if self.n != other.n || self.edges.len() != other.edges.len() {
            return None;
        }
        let profile = |g: &OrientedGraph, v: usize| -> Vec<u32> {
            let mut p: Vec<u32> = (0..g.n).map(|u| g.hop_dist(v, u)).collect();
            p.sort_unstable();
            p
        };
        let sp: Vec<Vec<u32>> = (0..self.n).map(|v| profile(self, v)).collect();
        let op: Vec<Vec<u32>> = (0..other.n).map(|v| profile(other, v)).collect();
        let oriented = self.is_oriented() && other.is_oriented();
        let mut map = vec![usize::MAX; self.n];
        let mut used = vec![false; self.n];
        // Map vertices in BFS order so adjacency constraints bind early.
        let mut order = Vec::with_capacity(self.n);
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for v in self.adj[u].iter() {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        fn rec(
            g: &OrientedGraph,
            h: &OrientedGraph,
            order: &[usize],
            idx: usize,
            map: &mut [usize],
            used: &mut [bool],
            sp: &[Vec<u32>],
            op: &[Vec<u32>],
            oriented: bool,
        ) -> bool {
            if idx == order.len() {
                return true;
            }
            let v = order[idx];
            'cand: for w in 0..h.n {
                if used[w] || sp[v] != op[w] {
                    continue;
                }
                for u in 0..g.n {
                    if map[u] == usize::MAX {
                        continue;
                    }
                    if g.adjacent(u, v) != h.adjacent(map[u], w) {
                        continue 'cand;
                    }
                    if oriented && g.adjacent(u, v) {
                        let guv = g.order().leq(u, v) && u != v;
                        let hw = h.order().leq(map[u], w) && map[u] != w;
                        if guv != hw {
                            continue 'cand;
                        }
                    }
                }
                map[v] = w;
                used[w] = true;
                if rec(g, h, order, idx + 1, map, used, sp, op, oriented) {
                    return true;
                }
                map[v] = usize::MAX;
                used[w] = false;
            }
            false
        }
        if rec(self, other, &order, 0, &mut map, &mut used, &sp, &op, oriented) {
            Some(map)
        } else {
            None
        }
    }
}

/// The barycentric subdivision `G*`: the covering graph of the Boolean-gated
/// sets under reverse inclusion, with half the edge length.
#[derive(Clone, Debug)]
pub struct SubdivisionMap {
    pub base: OrientedGraph,
    pub star: OrientedGraph,
    /// `sets[i]` is the Boolean-gated set behind star vertex `i`.
    pub sets: Vec<BitSet>,
    /// `embed[x]` is the star vertex of the singleton `{x}`.
    pub embed: Vec<usize>,
    /// For oriented modular bases, star vertex `i` is the interval
    /// `[interval_repr[i].0, interval_repr[i].1]`.
    pub interval_repr: Option<Vec<(usize, usize)>>,
}

impl SubdivisionMap {
    pub fn new(base: &OrientedGraph) -> Result<SubdivisionMap, GraphError> {
        let sets = base.boolean_gated_sets()?.to_vec();
        let m = sets.len();
        let index: HashMap<&BitSet, usize> = sets.iter().enumerate().map(|(i, s)| (s, i)).collect();
        // Reverse inclusion: B ⪯* B' iff B ⊇ B'. Directed cover edges run
        // from the larger set to the smaller one.
        let mut directed = Vec::new();
        for (i, a) in sets.iter().enumerate() {
            for (j, b) in sets.iter().enumerate() {
                if i == j || !b.is_subset(a) || a == b {
                    continue;
                }
                let strictly_between = sets.iter().enumerate().any(|(k, c)| {
                    k != i && k != j && c.is_subset(a) && b.is_subset(c) && c != a && c != b
                });
                if !strictly_between {
                    directed.push((i, j));
                }
            }
        }
        let edges: Vec<(usize, usize)> = directed.clone();
        let names = sets
            .iter()
            .map(|s| {
                let inner: Vec<&str> = s.iter().map(|v| base.name(v)).collect();
                format!("{{{}}}", inner.join(","))
            })
            .collect();
        let half = base.edge_length().clone() / rat(2, 1);
        let star = OrientedGraph::new(m, &edges, half)?
            .with_names(names)
            .with_directed_edges(&directed)?;
        let embed: Vec<usize> = (0..base.len())
            .map(|x| index[&BitSet::from_iter(base.len(), [x])])
            .collect();
        // The embedding x ↦ {x} is isometric (star hops are half-length).
        for x in 0..base.len() {
            for y in 0..base.len() {
                assert_eq!(
                    star.hop_dist(embed[x], embed[y]),
                    2 * base.hop_dist(x, y),
                    "subdivision embedding is not isometric at ({x},{y})"
                );
            }
        }
        let interval_repr = if base.is_oriented() && base.is_modular_graph() {
            let order = base.order();
            let repr: Vec<(usize, usize)> = sets
                .iter()
                .map(|s| {
                    let members: Vec<usize> = s.iter().collect();
                    let x = *members
                        .iter()
                        .find(|&&x| members.iter().all(|&z| order.leq(x, z)))
                        .expect("Boolean-gated set has an order minimum");
                    let y = *members
                        .iter()
                        .find(|&&y| members.iter().all(|&z| order.leq(z, y)))
                        .expect("Boolean-gated set has an order maximum");
                    assert!(base.sq_leq(x, y));
                    assert_eq!(order.interval(x, y), *s);
                    (x, y)
                })
                .collect();
            // Half-sum distance formula on interval representatives.
            for (i, &(p, q)) in repr.iter().enumerate() {
                for (j, &(p2, q2)) in repr.iter().enumerate() {
                    assert_eq!(
                        star.hop_dist(i, j),
                        base.hop_dist(p, p2) + base.hop_dist(q, q2),
                        "half-sum distance formula fails between {} and {}",
                        star.name(i),
                        star.name(j)
                    );
                }
            }
            Some(repr)
        } else {
            None
        };
        assert!(star.is_modular_graph(), "subdivision is not modular");
        assert!(star.is_well_oriented(), "subdivision is not well-oriented");
        // Every principal filter of the subdivision is a polar space.
        for v in 0..star.len() {
            let filter = star.principal_filter(v)?;
            let report = filter
                .lattice
                .is_polar_space()
                .expect("polar check within budget");
            assert!(
                report.is_polar,
                "principal filter of {} is not a polar space: {:?}",
                star.name(v),
                report.failure
            );
        }
        Ok(SubdivisionMap {
            base: base.clone(),
            star,
            sets,
            embed,
            interval_repr,
        })
    }

    /// The neighborhood semilattice `I*_x`: the principal ideal of `{x}` in
    /// the subdivision, reversed so `{x}` is the bottom element.
    pub fn neighborhood_semilattice(&self, x: usize) -> Result<Substructure, GraphError> {
        self.star.principal_ideal(self.embed[x])
    }
}

/// Union-find over boolean variables with parity relations to the root.
struct ParityDsu {
    parent: Vec<usize>,
    rank: Vec<u32>,
    /// Parity of the element relative to its parent.
    rel: Vec<bool>,
}

impl ParityDsu {
    fn new(n: usize) -> Self {
        ParityDsu { parent: (0..n).collect(), rank: vec![0; n], rel: vec![false; n] }
    }

    /// Returns `(root, parity of x relative to root)`.
    fn find(&mut self, x: usize) -> (usize, bool) {
        if self.parent[x] == x {
            return (x, false);
        }
        let (root, p) = self.find(self.parent[x]);
        self.parent[x] = root;
        self.rel[x] ^= p;
        (root, self.rel[x])
    }

    /// Enforces `value(x) ^ value(y) == parity`; false on contradiction.
    fn union(&mut self, x: usize, y: usize, parity: bool) -> bool {
        let (rx, px) = self.find(x);
        let (ry, py) = self.find(y);
        if rx == ry {
            return px ^ py == parity;
        }
        let (big, small, rel) = if self.rank[rx] >= self.rank[ry] {
            (rx, ry, px ^ py ^ parity)
        } else {
            (ry, rx, px ^ py ^ parity)
        };
        self.parent[small] = big;
        self.rel[small] = rel;
        if self.rank[big] == self.rank[small] {
            self.rank[big] += 1;
        }
        true
    }
}

fn bfs_into(adj: &[BitSet], s: usize, dist: &mut [u32]) {
    dist.fill(u32::MAX);
    dist[s] = 0;
    let mut queue = VecDeque::from([s]);
    while let Some(u) = queue.pop_front() {
        for v in adj[u].iter() {
            if dist[v] == u32::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
}

fn unique_extreme(set: &BitSet, leq: impl Fn(usize, usize) -> bool) -> Option<usize> {
    let members: Vec<usize> = set.iter().collect();
    let maximal: Vec<usize> = members
        .iter()
        .copied()
        .filter(|&a| members.iter().all(|&b| a == b || !leq(a, b)))
        .collect();
    if maximal.len() == 1 {
        Some(maximal[0])
    } else {
        None
    }
}

fn sort_sets(sets: &mut [BitSet]) {
    sets.sort_by_key(|s| {
        let members: Vec<usize> = s.iter().collect();
        (members.len(), members)
    });
}

// ----------------------------------------------------------------------
// Generators
// ----------------------------------------------------------------------

/// Path with `k` vertices `0, …, k-1`.
pub fn path_graph(k: usize) -> OrientedGraph {
    let edges: Vec<(usize, usize)> = (0..k - 1).map(|i| (i, i + 1)).collect();
    OrientedGraph::new(k, &edges, rat(1, 1)).unwrap()
}

/// Cycle with `k` vertices.
pub fn cycle_graph(k: usize) -> OrientedGraph {
    let edges: Vec<(usize, usize)> = (0..k).map(|i| (i, (i + 1) % k)).collect();
    OrientedGraph::new(k, &edges, rat(1, 1)).unwrap()
}

/// Complete graph on `k` vertices.
pub fn complete_graph(k: usize) -> OrientedGraph {
    let mut edges = Vec::new();
    for u in 0..k {
        for v in (u + 1)..k {
            edges.push((u, v));
        }
    }
    OrientedGraph::new(k, &edges, rat(1, 1)).unwrap()
}

/// Complete bipartite graph; vertices `0..k` on one side, `k..k+l` on the
/// other.
pub fn complete_bipartite_graph(k: usize, l: usize) -> OrientedGraph {
    let mut edges = Vec::new();
    for u in 0..k {
        for v in 0..l {
            edges.push((u, k + v));
        }
    }
    OrientedGraph::new(k + l, &edges, rat(1, 1)).unwrap()
}

/// Hypercube on `2^n` vertices (bitmask ids).
pub fn cube_graph(n: usize) -> OrientedGraph {
    let size = 1usize << n;
    let mut edges = Vec::new();
    for v in 0..size {
        for b in 0..n {
            let w = v ^ (1 << b);
            if v < w {
                edges.push((v, w));
            }
        }
    }
    OrientedGraph::new(size, &edges, rat(1, 1)).unwrap()
}

/// Grid graph: the product of paths with the given vertex counts.
pub fn grid_graph(sizes: &[usize]) -> OrientedGraph {
    assert!(!sizes.is_empty());
    let mut g = path_graph(sizes[0]);
    for &s in &sizes[1..] {
        g = g.product(&path_graph(s));
    }
    g
}

/// Tree on `n` vertices from an explicit edge list.
pub fn tree_graph(n: usize, edges: &[(usize, usize)]) -> OrientedGraph {
    assert_eq!(edges.len(), n - 1, "a tree has n-1 edges");
    OrientedGraph::new(n, edges, rat(1, 1)).unwrap()
}

/// The covering graph of a semilattice, oriented upward along covers.
pub fn covering_graph(l: &Semilattice) -> OrientedGraph {
    let covers = l.poset().covers().to_vec();
    let g = OrientedGraph::new(l.len(), &covers, rat(1, 1))
        .expect("covering graph of a semilattice is connected")
        .with_names(l.poset().names().to_vec());
    g.with_directed_edges(&covers)
        .expect("covering orientation of a modular semilattice is admissible")
}
