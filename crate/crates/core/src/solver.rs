//! Minimum 0-extension on orientable modular targets and multiway cut via
//! the half-integral relaxation: build the objective on the barycentric
//! subdivision, verify L-convexity termwise, minimize by steepest descent,
//! and project (0-extension) or persistency-round (multiway cut) back.
//!
//! Product targets stay factored: the target graph, its subdivision, and
//! the relaxed state space are all products of small factors, and the
//! objective is a sum of terms touching at most two coordinates.

use crate::graph::{GraphError, OrientedGraph, SubdivisionMap};
use crate::lconvex::{
    check_sum_l_convex, sda_minimize, ProductSpace, SDATrace, SumFn, Term, TupleIter,
    LcError, BRUTE_FORCE_BUDGET, LOCAL_STEP_BUDGET,
};
use crate::rational::{rat_int, ExtRat, Rat};
use num_traits::{Signed, Zero};

#[derive(Debug, thiserror::Error)]
pub enum SolverError {
    #[error("target graph is not an swm graph")]
    NotSwm,
    #[error("target graph is not orientable modular")]
    NotOrientableModular,
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error("negative weight")]
    NegativeWeight,
    #[error(transparent)]
    LConvex(#[from] LcError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A minimum 0-extension instance with a factored target graph
/// `Γ = Γ_1 × ⋯ × Γ_F`. Target vertices are mixed-radix codes over the
/// factor sizes, first factor most significant.
pub struct ZeroExtInstance {
    factors: Vec<OrientedGraph>,
    sizes: Vec<usize>,
    n: usize,
    /// `b[i][v]`: weight pulling variable `i` toward target vertex `v`.
    b: Vec<Vec<Rat>>,
    /// `(i, j, w)` with `i < j`: weight coupling variables `i` and `j`.
    c: Vec<(usize, usize, Rat)>,
    /// Per factor: metric distance matrix.
    dist: Vec<Vec<Rat>>,
}

impl ZeroExtInstance {
    /// Factors may come unoriented; each is checked modular and oriented
    /// admissibly.
    pub fn new(
        factors: Vec<OrientedGraph>,
        n: usize,
        b: Vec<Vec<Rat>>,
        c: Vec<(usize, usize, Rat)>,
    ) -> Result<ZeroExtInstance, SolverError> {
        assert!(!factors.is_empty() && n >= 1);
        let mut oriented = Vec::with_capacity(factors.len());
        for f in factors {
            if !f.is_swm()? {
                return Err(SolverError::NotSwm);
            }
            // Orient modular factors (needed to project relaxed states back);
            // non-modular swm factors (e.g. complete graphs) stay unoriented
            // and only support the relaxation-plus-rounding path.
            let f = if f.is_oriented() || !f.is_modular_graph() {
                f
            } else {
                f.orient().map_err(|_| SolverError::NotOrientableModular)?
            };
            oriented.push(f);
        }
        let sizes: Vec<usize> = oriented.iter().map(|f| f.len()).collect();
        let total: usize = sizes.iter().product();
        assert_eq!(b.len(), n);
        for row in &b {
            assert_eq!(row.len(), total);
            if row.iter().any(|w| w.is_negative()) {
                return Err(SolverError::NegativeWeight);
            }
        }
        for &(i, j, ref w) in &c {
            assert!(i < j && j < n);
            if w.is_negative() {
                return Err(SolverError::NegativeWeight);
            }
        }
        let dist = oriented
            .iter()
            .map(|f| {
                let k = f.len();
                let mut d = vec![Rat::zero(); k * k];
                for x in 0..k {
                    for y in 0..k {
                        d[x * k + y] = f.metric_dist(x, y);
                    }
                }
                d
            })
            .collect();
        Ok(ZeroExtInstance { factors: oriented, sizes, n, b, c, dist })
    }

    pub fn from_graph(
        graph: OrientedGraph,
        n: usize,
        b: Vec<Vec<Rat>>,
        c: Vec<(usize, usize, Rat)>,
    ) -> Result<ZeroExtInstance, SolverError> {
        ZeroExtInstance::new(vec![graph], n, b, c)
    }

    pub fn num_variables(&self) -> usize {
        self.n
    }

    pub fn factors(&self) -> &[OrientedGraph] {
        &self.factors
    }

    pub fn target_size(&self) -> usize {
        self.sizes.iter().product()
    }

    pub fn decode(&self, v: usize) -> Vec<usize> {
        crate::semilattice::decode_product(&self.sizes, v)
    }

    pub fn encode(&self, tuple: &[usize]) -> usize {
        crate::semilattice::encode_product(&self.sizes, tuple)
    }

    /// `d_Γ` between target vertices: the sum of factor distances.
    pub fn target_dist(&self, u: usize, v: usize) -> Rat {
        let us = self.decode(u);
        let vs = self.decode(v);
        let mut d = Rat::zero();
        for f in 0..self.sizes.len() {
            d += &self.dist[f][us[f] * self.sizes[f] + vs[f]];
        }
        d
    }
}

/// `D_I(x) = Σ_i Σ_v b_{iv} d_Γ(x_i, v) + Σ_{i<j} c_{ij} d_Γ(x_i, x_j)`.
pub fn zero_ext_objective(inst: &ZeroExtInstance, x: &[usize]) -> Rat {
    assert_eq!(x.len(), inst.n);
    let mut total = Rat::zero();
    for i in 0..inst.n {
        for v in 0..inst.target_size() {
            if !inst.b[i][v].is_zero() {
                total += &inst.b[i][v] * inst.target_dist(x[i], v);
            }
        }
    }
    for &(i, j, ref w) in &inst.c {
        if !w.is_zero() {
            total += w * inst.target_dist(x[i], x[j]);
        }
    }
    total
}

/// Exact optimum by enumeration of `Γ^n`.
pub fn solve_zero_ext_brute(
    inst: &ZeroExtInstance,
    budget: usize,
) -> Result<(Vec<usize>, Rat), SolverError> {
    let total = inst.target_size();
    let states = total
        .checked_pow(inst.n as u32)
        .filter(|&s| s <= budget)
        .ok_or_else(|| SolverError::TooLarge(format!("more than {budget} states")))?;
    let _ = states;
    let mut best: Option<(Rat, Vec<usize>)> = None;
    for x in TupleIter::new(vec![total; inst.n]) {
        let v = zero_ext_objective(inst, &x);
        if best.as_ref().is_none_or(|(bv, _)| v < *bv) {
            best = Some((v, x));
        }
    }
    let (value, x) = best.unwrap();
    Ok((x, value))
}

/// The relaxed problem on `(Γ*)^n`: state space, objective, and the
/// per-factor subdivision maps. Coordinates are variable-major: variable
/// `i`'s factor `f` sits at coordinate `i * F + f`.
pub struct Relaxation {
    pub space: ProductSpace,
    pub objective: SumFn,
    pub subs: Vec<SubdivisionMap>,
}

impl Relaxation {
    /// Builds `D_{I*}`: `b` weights move to the embedded base vertices
    /// (zero on new vertices), all distances become `d_{Γ*}`. Every term is
    /// verified L-convex on its own coordinate factors.
    pub fn build(inst: &ZeroExtInstance) -> Result<Relaxation, SolverError> {
        let nf = inst.factors.len();
        let subs: Vec<SubdivisionMap> = inst
            .factors
            .iter()
            .map(SubdivisionMap::new)
            .collect::<Result<_, _>>()?;
        let star_dist: Vec<Vec<Rat>> = subs
            .iter()
            .map(|s| {
                let k = s.star.len();
                let mut d = vec![Rat::zero(); k * k];
                for x in 0..k {
                    for y in 0..k {
                        d[x * k + y] = s.star.metric_dist(x, y);
                    }
                }
                d
            })
            .collect();
        let mut star_factors = Vec::with_capacity(inst.n * nf);
        for _ in 0..inst.n {
            for s in &subs {
                star_factors.push(s.star.clone());
            }
        }
        let space = ProductSpace::new(star_factors)?;
        let mut terms: Vec<Term> = Vec::new();
        // Unary pull terms, collapsed per (variable, factor) coordinate:
        // Σ_v b_iv d_{Γ*}(u_i, v) = Σ_f Σ_w (Σ_{v: v_f = w} b_iv) d_{f*}(u_{i,f}, w).
        for i in 0..inst.n {
            for f in 0..nf {
                let mut weight = vec![Rat::zero(); inst.sizes[f]];
                for v in 0..inst.target_size() {
                    if !inst.b[i][v].is_zero() {
                        weight[inst.decode(v)[f]] += &inst.b[i][v];
                    }
                }
                if weight.iter().all(|w| w.is_zero()) {
                    continue;
                }
                let k = subs[f].star.len();
                let values: Vec<ExtRat> = (0..k)
                    .map(|u| {
                        let mut t = Rat::zero();
                        for (w, bw) in weight.iter().enumerate() {
                            if !bw.is_zero() {
                                t += bw * &star_dist[f][u * k + subs[f].embed[w]];
                            }
                        }
                        ExtRat::Finite(t)
                    })
                    .collect();
                terms.push(Term::new(&space, vec![i * nf + f], values));
            }
        }
        // Pairwise coupling terms, one per (pair, factor).
        for &(i, j, ref w) in &inst.c {
            if w.is_zero() {
                continue;
            }
            for f in 0..nf {
                let k = subs[f].star.len();
                let values: Vec<ExtRat> = (0..k * k)
                    .map(|uv| ExtRat::Finite(w * &star_dist[f][uv]))
                    .collect();
                terms.push(Term::new(&space, vec![i * nf + f, j * nf + f], values));
            }
        }
        let objective = SumFn { terms };
        let witness = check_sum_l_convex(&space, &objective)?;
        assert!(
            witness.is_none(),
            "relaxed 0-extension objective must be L-convex: {witness:?}"
        );
        Ok(Relaxation { space, objective, subs })
    }

    /// The star-vertex tuple embedding a target tuple.
    pub fn embed(&self, inst: &ZeroExtInstance, x: &[usize]) -> Vec<usize> {
        let nf = self.subs.len();
        let mut out = Vec::with_capacity(x.len() * nf);
        for &xi in x {
            let coords = inst.decode(xi);
            for f in 0..nf {
                out.push(self.subs[f].embed[coords[f]]);
            }
        }
        out
    }

    /// The two endpoint target tuples of a relaxed state (per coordinate,
    /// the ends of the interval the star vertex stands for).
    pub fn project(&self, inst: &ZeroExtInstance, u: &[usize]) -> (Vec<usize>, Vec<usize>) {
        let nf = self.subs.len();
        let mut x = Vec::new();
        let mut y = Vec::new();
        for (i, chunk) in u.chunks(nf).enumerate() {
            let _ = i;
            let mut lo = Vec::with_capacity(nf);
            let mut hi = Vec::with_capacity(nf);
            for (f, &s) in chunk.iter().enumerate() {
                let (p, q) = self.subs[f]
                    .interval_repr
                    .as_ref()
                    .expect("oriented modular factor")[s];
                lo.push(p);
                hi.push(q);
            }
            x.push(inst.encode(&lo));
            y.push(inst.encode(&hi));
        }
        (x, y)
    }

    /// `Δ`-diameter of the relaxed space: the maximum factor star
    /// `Δ`-eccentricity (iteration bound of the descent).
    pub fn delta_diameter(&self) -> Result<u32, SolverError> {
        let mut diam = 0;
        for s in &self.subs {
            let k = s.star.len();
            for x in 0..k {
                for y in 0..k {
                    diam = diam.max(s.star.delta_dist(x, y)?);
                }
            }
        }
        Ok(diam)
    }
}

/// A solved 0-extension instance. `x` and `y` are the two projections of
/// the relaxed minimizer; both attain `value`.
pub struct ZeroExtSolution {
    pub x: Vec<usize>,
    pub y: Vec<usize>,
    pub value: Rat,
    pub relaxed_value: Rat,
    pub trace: SDATrace,
    pub iteration_bound: u32,
}

/// Solves by relaxation + SDA: verifies the objective L-convex, descends on
/// `(Γ*)^n` from the all-minimum start, projects the relaxed minimizer, and
/// checks the exactness identity `D_{I*}(u) = (D_I(x) + D_I(y))/2`.
pub fn solve_zero_ext_sda(inst: &ZeroExtInstance) -> Result<ZeroExtSolution, SolverError> {
    if inst.factors.iter().any(|f| !f.is_oriented()) {
        return Err(SolverError::NotOrientableModular);
    }
    let relax = Relaxation::build(inst)?;
    let start = relax.embed(inst, &vec![0; inst.n]);
    let trace = sda_minimize(&relax.space, &relax.objective, &start, LOCAL_STEP_BUDGET)?;
    let (x, y) = relax.project(inst, trace.terminal());
    let relaxed_value = match trace.values.last().unwrap() {
        ExtRat::Finite(v) => v.clone(),
        ExtRat::Inf => unreachable!("objective is finite everywhere"),
    };
    let vx = zero_ext_objective(inst, &x);
    let vy = zero_ext_objective(inst, &y);
    assert_eq!(
        (&vx + &vy) / rat_int(2),
        relaxed_value,
        "relaxed optimum must average the projected endpoints"
    );
    assert_eq!(vx, vy, "both projections of the relaxed minimizer are optimal");
    let iteration_bound = relax.delta_diameter()? + 2;
    assert!(
        trace.moves as u32 <= iteration_bound,
        "descent exceeded the diameter bound"
    );
    Ok(ZeroExtSolution { x, y, value: vx, relaxed_value, trace, iteration_bound })
}

/// An edge-capacitated network with terminals.
pub struct CutInstance {
    pub n_nodes: usize,
    pub edges: Vec<(usize, usize, Rat)>,
    pub terminals: Vec<usize>,
}

/// A solved multiway cut.
pub struct CutSolution {
    /// Terminal index assigned to each node.
    pub labeling: Vec<usize>,
    pub cut_value: Rat,
    pub cut_edges: Vec<(usize, usize)>,
    pub relaxed_value: Rat,
    /// States enumerated during persistency rounding.
    pub persistency_candidates: usize,
}

/// Multiway cut via the `(K_k)*` relaxation: encode as 0-extension on
/// `K_k` with terminals pinned by a strictly dominating weight, minimize
/// the L-convex relaxed objective on `((K_k)*)^n`, then persistency-round:
/// some exact minimizer assigns each node a label from the Boolean-gated
/// set its relaxed coordinate stands for.
pub fn solve_multiway_cut(cut: &CutInstance) -> Result<CutSolution, SolverError> {
    let k = cut.terminals.len();
    let n = cut.n_nodes;
    assert!(k >= 2, "need at least two terminals");
    assert!(
        cut.terminals.iter().collect::<std::collections::HashSet<_>>().len() == k,
        "terminals must be distinct"
    );
    let total_cap: Rat = cut.edges.iter().map(|(_, _, w)| w.clone()).sum();
    let pin = rat_int(1) + &total_cap;
    let mut b = vec![vec![Rat::zero(); k]; n];
    for (label, &t) in cut.terminals.iter().enumerate() {
        b[t][label] = pin.clone();
    }
    let mut c_map: std::collections::HashMap<(usize, usize), Rat> =
        std::collections::HashMap::new();
    for &(u, v, ref w) in &cut.edges {
        assert!(u != v && u < n && v < n);
        if w.is_negative() {
            return Err(SolverError::NegativeWeight);
        }
        *c_map.entry((u.min(v), u.max(v))).or_insert_with(Rat::zero) += w;
    }
    let mut c: Vec<(usize, usize, Rat)> = c_map.into_iter().map(|((i, j), w)| (i, j, w)).collect();
    c.sort_by_key(|&(i, j, _)| (i, j));
    let inst = ZeroExtInstance::new(vec![crate::graph::complete_graph(k)], n, b, c)?;

    // Minimize the relaxed objective on ((K_k)*)^n.
    let relax = Relaxation::build(&inst)?;
    let start = relax.embed(&inst, &vec![0; n]);
    let trace = sda_minimize(&relax.space, &relax.objective, &start, LOCAL_STEP_BUDGET)?;
    let relaxed_value = match trace.values.last().unwrap() {
        ExtRat::Finite(v) => v.clone(),
        ExtRat::Inf => unreachable!("objective is finite everywhere"),
    };

    // Persistency rounding: enumerate labelings inside the product of the
    // relaxed minimizer's member sets.
    let u_star = trace.terminal();
    let members: Vec<Vec<usize>> = u_star
        .iter()
        .map(|&s| relax.subs[0].sets[s].iter().collect())
        .collect();
    let count: usize = members.iter().map(|m| m.len()).product();
    if count > BRUTE_FORCE_BUDGET {
        return Err(SolverError::TooLarge(format!("{count} persistency candidates")));
    }
    let mut best: Option<(Rat, Vec<usize>)> = None;
    for choice in TupleIter::new(members.iter().map(|m| m.len()).collect()) {
        let labeling: Vec<usize> = choice.iter().zip(&members).map(|(&c, m)| m[c]).collect();
        let v = zero_ext_objective(&inst, &labeling);
        if best.as_ref().is_none_or(|(bv, _)| v < *bv) {
            best = Some((v, labeling));
        }
    }
    let (cut_value, labeling) = best.unwrap();
    for (label, &t) in cut.terminals.iter().enumerate() {
        assert_eq!(labeling[t], label, "terminal escaped its pin");
    }
    let cut_edges: Vec<(usize, usize)> = cut
        .edges
        .iter()
        .filter(|&&(u, v, _)| labeling[u] != labeling[v])
        .map(|&(u, v, _)| (u, v))
        .collect();
    // Feasibility: same-label reachability must not connect two terminals.
    for (label, &t) in cut.terminals.iter().enumerate() {
        let mut seen = vec![false; n];
        seen[t] = true;
        let mut stack = vec![t];
        while let Some(u) = stack.pop() {
            for &(a, bb, _) in &cut.edges {
                for (p, q) in [(a, bb), (bb, a)] {
                    if p == u && !seen[q] && labeling[p] == labeling[q] {
                        seen[q] = true;
                        stack.push(q);
                    }
                }
            }
        }
        for (other_label, &s) in cut.terminals.iter().enumerate() {
            assert!(
                other_label == label || !seen[s],
                "labeling does not separate the terminals"
            );
        }
    }
    Ok(CutSolution {
        labeling,
        cut_value,
        cut_edges,
        relaxed_value,
        persistency_candidates: count,
    })
}
