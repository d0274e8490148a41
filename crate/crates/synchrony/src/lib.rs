//! Balanced equivalence relations ("synchrony patterns") of coupled cell
//! networks.
//!
//! A coupled cell network is a finite set of cells, each with a cell type,
//! together with finitely many arrow types; each arrow type contributes a
//! nonnegative integer adjacency matrix whose entry `(i, j)` counts the
//! arrows **from cell `j` to cell `i`**. A partition of the cells is
//! *balanced* when cells in the same class have the same cell type and,
//! arrow type by arrow type, receive the same number of inputs from every
//! class. Balanced partitions are exactly the robust synchrony patterns of
//! any dynamical system with that network architecture, and they form a
//! complete lattice under refinement.
//!
//! This crate computes:
//!
//! * whether a given partition is balanced ([`balance::is_balanced`]),
//! * the quotient network it induces ([`balance::quotient`]),
//! * the coarsest balanced partition ([`topnode::minimal_balanced_coloring`]),
//! * the full set of balanced partitions ([`lattice::enumerate_balanced`]),
//! * and the lattice of balanced partitions with its covering relations
//!   ([`lattice::build_lattice`]), renderable as Graphviz DOT
//!   ([`io::render_dot`]).
//!
//! Cells are 0-indexed in the API and 1-indexed in all textual formats.

pub mod balance;
pub mod io;
pub mod lattice;
pub mod network;
pub mod partition;
pub mod topnode;

pub use balance::{is_balanced, is_balanced_projection, quotient, QuotientError, QuotientNetwork};
pub use lattice::{build_lattice, enumerate_balanced, EnumerationMode, EnumerationOptions, Lattice};
pub use network::Network;
pub use partition::Partition;
pub use topnode::minimal_balanced_coloring;
