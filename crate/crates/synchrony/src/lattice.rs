//! Enumeration of all balanced partitions and construction of their
//! complete lattice with covering relations.
//!
//! Enumeration filters a refinement space with the balance test: either the
//! refinements of the coarsest balanced partition (top-restricted, the
//! default) or all partitions of the cell set (brute force). Both modes
//! yield the same set. The candidate space is split into contiguous index
//! chunks that workers scan independently; results are merged and sorted,
//! so output is bitwise independent of the worker count.
//!
//! The lattice orders the balanced set by (rank ascending, restricted-growth
//! lexicographic). `B` holds strict refinement, `L` the covering relation:
//! `l_ij = 1` iff `b_ij = 1` and no witness `k` has `b_ik = b_kj = 1`. Every
//! witness's rank lies strictly between the pair's ranks, so the default
//! search only scans that index window; the full `T = B²` product is kept as
//! a cross-checking oracle.

use rayon::prelude::*;
use thiserror::Error;

use crate::balance::{is_balanced_assignment, BalanceScratch};
use crate::network::Network;
use crate::partition::{refines_assignments, Partition, RefinementSpace};
use crate::topnode::minimal_balanced_coloring;

/// Which candidate space to filter.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnumerationMode {
    /// Refinements of `minimal_balanced_coloring(network)`; sound because
    /// every balanced partition refines the coarsest one.
    TopRestricted,
    /// Every partition of the cell set.
    BruteForce,
}

/// Tuning for [`enumerate_balanced`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumerationOptions {
    pub mode: EnumerationMode,
    /// Refusal threshold for the candidate count.
    pub budget: u128,
    /// Worker threads; 0 means one per available core.
    pub jobs: usize,
}

pub const DEFAULT_BUDGET: u128 = 100_000_000;

impl Default for EnumerationOptions {
    fn default() -> EnumerationOptions {
        EnumerationOptions {
            mode: EnumerationMode::TopRestricted,
            budget: DEFAULT_BUDGET,
            jobs: 0,
        }
    }
}

impl EnumerationOptions {
    pub fn new(mode: EnumerationMode) -> EnumerationOptions {
        EnumerationOptions { mode, ..EnumerationOptions::default() }
    }
}

/// The candidate space is too large to scan under the configured budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error(
    "{candidates} candidate partitions exceed the budget of {budget}; \
     a coarser top node or a larger budget is needed"
)]
pub struct BudgetExceeded {
    pub candidates: u128,
    pub budget: u128,
}

/// All balanced partitions of `net`, sorted by (rank ascending,
/// restricted-growth lexicographic). Refuses with [`BudgetExceeded`] when
/// the candidate count `Π bell(class size)` crosses `options.budget`.
pub fn enumerate_balanced(
    net: &Network,
    options: &EnumerationOptions,
) -> Result<Vec<Partition>, BudgetExceeded> {
    let base = match options.mode {
        EnumerationMode::TopRestricted => minimal_balanced_coloring(net),
        EnumerationMode::BruteForce => Partition::top(net.n_cells()),
    };
    let space = RefinementSpace::new(base);
    let total = space.count();
    if total > options.budget {
        return Err(BudgetExceeded { candidates: total, budget: options.budget });
    }

    let scan = |start: u128, end: u128| {
        let mut scratch = BalanceScratch::new();
        let mut found = Vec::new();
        let mut stream = space.range(start, end);
        while let Some((assignment, rank)) = stream.next_assignment() {
            if is_balanced_assignment(net, assignment, rank as usize, &mut scratch) {
                found.push(Partition::from_rgs_unchecked(assignment.to_vec(), rank));
            }
        }
        found
    };

    // Contiguous chunks of the candidate index space; workers scan
    // independently and the final sort makes the merge order irrelevant.
    let chunks = chunk_bounds(total, options.jobs);
    let mut balanced: Vec<Partition> = if chunks.len() <= 1 {
        scan(0, total)
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(options.jobs)
            .build()
            .expect("thread pool construction");
        pool.install(|| {
            chunks
                .par_iter()
                .map(|&(start, end)| scan(start, end))
                .reduce(Vec::new, |mut acc, mut part| {
                    acc.append(&mut part);
                    acc
                })
        })
    };
    sort_canonical(&mut balanced);
    Ok(balanced)
}

/// (rank ascending, assignment lexicographic) — the lattice node order.
fn sort_canonical(partitions: &mut [Partition]) {
    partitions.sort_by(|a, b| {
        a.rank()
            .cmp(&b.rank())
            .then_with(|| a.assignment().cmp(b.assignment()))
    });
}

/// Splits `0..total` into at most `jobs * 8` contiguous chunks of at least
/// 512 candidates (one chunk when that isn't worth it).
fn chunk_bounds(total: u128, jobs: usize) -> Vec<(u128, u128)> {
    let threads = if jobs == 0 {
        std::thread::available_parallelism().map_or(1, |p| p.get())
    } else {
        jobs
    };
    let max_chunks = (threads * 8) as u128;
    let n_chunks = (total / 512).clamp(1, max_chunks);
    let per = total / n_chunks;
    let extra = total % n_chunks;
    let mut bounds = Vec::with_capacity(n_chunks as usize);
    let mut start = 0u128;
    for c in 0..n_chunks {
        let len = per + u128::from(c < extra);
        bounds.push((start, start + len));
        start += len;
    }
    bounds
}

/// How [`build_lattice_with`] finds covering pairs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CoveringStrategy {
    /// Scan only nodes whose rank lies strictly between the pair's ranks
    /// (every witness does). The default.
    #[default]
    WitnessWindow,
    /// Materialize `T = B²` and test `t_ij == 0`. Quadratic memory; kept as
    /// the oracle the optimized path is checked against.
    FullT,
}

/// The complete lattice of balanced partitions.
///
/// Nodes are sorted by (rank ascending, restricted-growth lexicographic),
/// which makes both matrices lower triangular: the coarsest (top) node is
/// first and the discrete (bottom) partition is last.
pub struct Lattice {
    nodes: Vec<Partition>,
    ranks: Vec<usize>,
    /// `b[i][j] = 1` iff node `i` strictly refines node `j`.
    b: BitMatrix,
    /// `l[i][j] = 1` iff node `i` is covered by node `j`.
    l: BitMatrix,
    /// Transpose of `b`, for fast witness scans.
    bt: BitMatrix,
}

/// Builds the lattice of a complete balanced set with the default
/// witness-window covering search.
pub fn build_lattice(balanced: Vec<Partition>) -> Lattice {
    build_lattice_with(balanced, CoveringStrategy::WitnessWindow)
}

/// Builds the lattice with an explicit covering strategy. Both strategies
/// produce identical lattices; `FullT` exists to cross-check.
pub fn build_lattice_with(mut balanced: Vec<Partition>, strategy: CoveringStrategy) -> Lattice {
    sort_canonical(&mut balanced);
    balanced.dedup();
    let p = balanced.len();
    let ranks: Vec<usize> = balanced.iter().map(|q| q.rank()).collect();
    let mut b = BitMatrix::new(p, p);
    let mut bt = BitMatrix::new(p, p);
    for i in 0..p {
        for j in 0..i {
            // Sorted by rank: a strict refinement of node j sits after it.
            if ranks[i] > ranks[j]
                && refines_assignments(balanced[i].assignment(), balanced[j].assignment())
            {
                b.set(i, j);
                bt.set(j, i);
            }
        }
    }
    let mut lattice = Lattice { nodes: balanced, ranks, b, l: BitMatrix::new(p, p), bt };
    lattice.l = match strategy {
        CoveringStrategy::WitnessWindow => lattice.covering_by_witness_window(),
        CoveringStrategy::FullT => lattice.covering_from_full_t(),
    };
    lattice
}

impl Lattice {
    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[Partition] {
        &self.nodes
    }

    /// Class count per node, parallel to `nodes()`.
    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    /// `B` entry: does node `i` strictly refine node `j`?
    pub fn refines(&self, i: usize, j: usize) -> bool {
        self.b.get(i, j)
    }

    /// `L` entry: is node `i` covered by node `j` (an edge of the lattice
    /// diagram)?
    pub fn covers(&self, i: usize, j: usize) -> bool {
        self.l.get(i, j)
    }

    /// Covering pairs `(finer, coarser)` in row-major order.
    pub fn covering_pairs(&self) -> Vec<(usize, usize)> {
        let mut pairs = Vec::new();
        for i in 0..self.n_nodes() {
            for j in 0..i {
                if self.l.get(i, j) {
                    pairs.push((i, j));
                }
            }
        }
        pairs
    }

    /// Number of lattice diagram edges.
    pub fn n_edges(&self) -> usize {
        (0..self.n_nodes()).map(|i| self.l.row_popcount(i) as usize).sum()
    }

    /// Covering search restricted to the witness window: a witness `k` for
    /// `(i, j)` strictly refines `j` and is strictly refined by `i`, so
    /// `ranks[j] < ranks[k] < ranks[i]`; under the sort those `k` form a
    /// contiguous index range.
    fn covering_by_witness_window(&self) -> BitMatrix {
        let p = self.n_nodes();
        let mut l = BitMatrix::new(p, p);
        for i in 0..p {
            for j in 0..i {
                if !self.b.get(i, j) {
                    continue;
                }
                let lo = self.ranks.partition_point(|&r| r <= self.ranks[j]);
                let hi = self.ranks.partition_point(|&r| r < self.ranks[i]);
                if !any_common_bit_in_range(self.b.row(i), self.bt.row(j), lo, hi) {
                    l.set(i, j);
                }
            }
        }
        l
    }

    /// Covering via the full product: `l_ij = 1` iff `b_ij = 1` and
    /// `t_ij = 0` with `T = B²`.
    pub fn covering_from_full_t(&self) -> BitMatrix {
        let p = self.n_nodes();
        let t = self.full_t();
        let mut l = BitMatrix::new(p, p);
        for i in 0..p {
            for j in 0..p {
                if self.b.get(i, j) && t[i][j] == 0 {
                    l.set(i, j);
                }
            }
        }
        l
    }

    /// `T = B²` as explicit counts: `t_ij` is the number of witnesses
    /// between `i` and `j`. Quadratic memory, cubic-ish time; oracle only.
    pub fn full_t(&self) -> Vec<Vec<u64>> {
        let p = self.n_nodes();
        (0..p)
            .map(|i| {
                (0..p)
                    .map(|j| popcount_and(self.b.row(i), self.bt.row(j)))
                    .collect()
            })
            .collect()
    }
}

/// Dense 0/1 matrix over u64 words, row-major.
pub struct BitMatrix {
    words_per_row: usize,
    words: Vec<u64>,
}

impl BitMatrix {
    fn new(rows: usize, cols: usize) -> BitMatrix {
        let words_per_row = cols.div_ceil(64);
        BitMatrix { words_per_row, words: vec![0; rows * words_per_row] }
    }

    fn set(&mut self, i: usize, j: usize) {
        self.words[i * self.words_per_row + j / 64] |= 1 << (j % 64);
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.words[i * self.words_per_row + j / 64] & (1 << (j % 64)) != 0
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.words[i * self.words_per_row..(i + 1) * self.words_per_row]
    }

    fn row_popcount(&self, i: usize) -> u64 {
        self.row(i).iter().map(|w| u64::from(w.count_ones())).sum()
    }
}

/// Whether `a & b` has any set bit at positions `lo..hi`.
fn any_common_bit_in_range(a: &[u64], b: &[u64], lo: usize, hi: usize) -> bool {
    if lo >= hi {
        return false;
    }
    let first = lo / 64;
    let last = (hi - 1) / 64;
    for w in first..=last {
        let mut mask = !0u64;
        if w == first {
            mask &= !0u64 << (lo % 64);
        }
        if w == last {
            let top = (hi - 1) % 64;
            mask &= !0u64 >> (63 - top);
        }
        if a[w] & b[w] & mask != 0 {
            return true;
        }
    }
    false
}

fn popcount_and(a: &[u64], b: &[u64]) -> u64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| u64::from((x & y).count_ones()))
        .sum()
}
