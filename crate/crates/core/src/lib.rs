//! Discrete convex analysis on modular semilattices and oriented modular
//! graphs: exact-rational submodularity machinery, L-convexity verifiers,
//! steepest descent minimization, and solvers for 0-extension and multiway
//! cut built on half-integral relaxations.

pub mod bitset;
pub mod graph;
pub mod io;
pub mod lconvex;
pub mod lovasz;
pub mod midpoint;
pub mod par;
pub mod poset;
pub mod rational;
pub mod submodular;
pub mod semilattice;
pub mod solver;
