//! The balanced-partition test, its independent projection-based oracle,
//! and quotient network construction.
//!
//! A partition is *balanced* for a network when (a) it refines the cell-type
//! partition and (b) for every arrow type, cells in one class receive the
//! same number of arrows from every class. Condition (b) is checked on the
//! class-column-sum matrix: collapse each adjacency matrix's columns by
//! class and compare rows within classes.

use thiserror::Error;

use crate::network::Network;
use crate::partition::{Partition, SizeMismatch};

/// Reusable buffers for the balance test, so enumeration allocates nothing
/// per candidate.
#[derive(Default)]
pub(crate) struct BalanceScratch {
    /// Class-column sums of each class's first-seen cell, `rank * rank`.
    rep_rows: Vec<u64>,
    /// Class-column sums of the cell under test, `rank`.
    row: Vec<u64>,
    /// Cell type of each class's first-seen cell.
    rep_types: Vec<u32>,
    seen: Vec<bool>,
}

impl BalanceScratch {
    pub(crate) fn new() -> BalanceScratch {
        BalanceScratch::default()
    }
}

/// Core balance test over a restricted-growth assignment with `n_classes`
/// classes. `assignment.len()` must equal `net.n_cells()`.
pub(crate) fn is_balanced_assignment(
    net: &Network,
    assignment: &[u32],
    n_classes: usize,
    scratch: &mut BalanceScratch,
) -> bool {
    debug_assert_eq!(assignment.len(), net.n_cells());
    let k = n_classes;
    // Refinement of the cell-type partition: one cell type per class.
    scratch.rep_types.resize(k, 0);
    scratch.seen.clear();
    scratch.seen.resize(k, false);
    for (cell, &class) in assignment.iter().enumerate() {
        let class = class as usize;
        let ty = net.cell_type(cell);
        if !scratch.seen[class] {
            scratch.seen[class] = true;
            scratch.rep_types[class] = ty;
        } else if scratch.rep_types[class] != ty {
            return false;
        }
    }
    // Per arrow type: within a class, all class-column-sum rows agree.
    scratch.rep_rows.resize(k * k, 0);
    scratch.row.resize(k, 0);
    for arrow in 0..net.n_arrow_types() {
        scratch.seen.clear();
        scratch.seen.resize(k, false);
        for (cell, &class) in assignment.iter().enumerate() {
            let class = class as usize;
            scratch.row.fill(0);
            for (j, &count) in net.row(arrow, cell).iter().enumerate() {
                scratch.row[assignment[j] as usize] += count;
            }
            let rep = &mut scratch.rep_rows[class * k..(class + 1) * k];
            if !scratch.seen[class] {
                scratch.seen[class] = true;
                rep.copy_from_slice(&scratch.row);
            } else if rep != &scratch.row[..] {
                return false;
            }
        }
    }
    true
}

/// Whether `partition` is balanced for `net`: it refines the cell-type
/// partition and, for every arrow type, cells of one class receive equally
/// many arrows from each class.
pub fn is_balanced(net: &Network, partition: &Partition) -> Result<bool, SizeMismatch> {
    if partition.n_cells() != net.n_cells() {
        return Err(SizeMismatch { expected: net.n_cells(), found: partition.n_cells() });
    }
    let mut scratch = BalanceScratch::new();
    Ok(is_balanced_assignment(net, partition.assignment(), partition.rank(), &mut scratch))
}

/// The class-column-sum matrices: per arrow type, an `n × rank` matrix
/// whose `(i, q)` entry counts type-`k` arrows into cell `i` from class `q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassColumnSums {
    n_cells: usize,
    n_classes: usize,
    /// One flat row-major `n × rank` matrix per arrow type.
    per_type: Vec<Vec<u64>>,
}

impl ClassColumnSums {
    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    /// Type-`k` arrows into `cell` from class `class`.
    pub fn entry(&self, k: usize, cell: usize, class: usize) -> u64 {
        self.per_type[k][cell * self.n_classes + class]
    }

    /// Cell `i`'s received arrows of type `k`, summed per class.
    pub fn row(&self, k: usize, cell: usize) -> &[u64] {
        &self.per_type[k][cell * self.n_classes..(cell + 1) * self.n_classes]
    }
}

/// Collapses each adjacency matrix's columns by the classes of `partition`.
pub fn class_column_sums(
    net: &Network,
    partition: &Partition,
) -> Result<ClassColumnSums, SizeMismatch> {
    if partition.n_cells() != net.n_cells() {
        return Err(SizeMismatch { expected: net.n_cells(), found: partition.n_cells() });
    }
    let n = net.n_cells();
    let k = partition.rank();
    let assignment = partition.assignment();
    let per_type = (0..net.n_arrow_types())
        .map(|arrow| {
            let mut m = vec![0u64; n * k];
            for i in 0..n {
                for (j, &count) in net.row(arrow, i).iter().enumerate() {
                    m[i * k + assignment[j] as usize] += count;
                }
            }
            m
        })
        .collect();
    Ok(ClassColumnSums { n_cells: n, n_classes: k, per_type })
}

/// Independent balance oracle through the projection characterization:
/// with `P` the projection onto class representatives (`P[i][rep(i)] = 1`),
/// `partition` is balanced iff it refines the cell-type partition and
/// `P·M·P == M·P` for every adjacency matrix `M`. Slower than
/// [`is_balanced`] (dense `n³` products); intended for cross-checking.
pub fn is_balanced_projection(net: &Network, partition: &Partition) -> Result<bool, SizeMismatch> {
    if partition.n_cells() != net.n_cells() {
        return Err(SizeMismatch { expected: net.n_cells(), found: partition.n_cells() });
    }
    if !partition
        .refines(&net.cell_type_partition())
        .expect("sizes checked above")
    {
        return Ok(false);
    }
    let n = net.n_cells();
    let assignment = partition.assignment();
    let reps = representatives(partition);
    // p[i][j] = 1 iff j is the representative of i's class.
    let mut p = vec![0u64; n * n];
    for i in 0..n {
        p[i * n + reps[assignment[i] as usize]] = 1;
    }
    for arrow in 0..net.n_arrow_types() {
        // mp = M·P, pmp = P·(M·P), both n × n.
        let mut mp = vec![0u64; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0;
                for l in 0..n {
                    acc += net.entry(arrow, i, l) * p[l * n + j];
                }
                mp[i * n + j] = acc;
            }
        }
        let mut pmp = vec![0u64; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0;
                for l in 0..n {
                    acc += p[i * n + l] * mp[l * n + j];
                }
                pmp[i * n + j] = acc;
            }
        }
        if mp != pmp {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Minimal cell of each class, indexed by class id.
fn representatives(partition: &Partition) -> Vec<usize> {
    let mut reps = vec![usize::MAX; partition.rank()];
    for (cell, &class) in partition.assignment().iter().enumerate() {
        if reps[class as usize] == usize::MAX {
            reps[class as usize] = cell;
        }
    }
    reps
}

/// A quotient network together with how it was formed: the balanced source
/// partition and the representative cell chosen per class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientNetwork {
    network: Network,
    partition: Partition,
    representatives: Vec<usize>,
}

impl QuotientNetwork {
    /// The quotient network: one cell per class of the source partition.
    pub fn network(&self) -> &Network {
        &self.network
    }

    /// The balanced partition the quotient was taken by.
    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    /// Minimal source cell of each class (0-indexed), in class order.
    pub fn representatives(&self) -> &[usize] {
        &self.representatives
    }
}

/// Taking a quotient needs a balanced partition of the right size.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuotientError {
    #[error(transparent)]
    SizeMismatch(#[from] SizeMismatch),
    #[error("partition {partition} is not balanced for this network")]
    NotBalanced { partition: Partition },
}

/// Collapses each class of a balanced partition to one cell. Entry `(s, t)`
/// of a quotient matrix counts the type-`k` arrows the representative of
/// class `s` receives from class `t`; balance makes this independent of the
/// representative choice. Cell types are inherited from representatives.
pub fn quotient(net: &Network, partition: &Partition) -> Result<QuotientNetwork, QuotientError> {
    if !is_balanced(net, partition)? {
        return Err(QuotientError::NotBalanced { partition: partition.clone() });
    }
    let k = partition.rank();
    let reps = representatives(partition);
    let sums = class_column_sums(net, partition).expect("sizes checked by is_balanced");
    let raw = crate::network::RawNetwork {
        n_cells: k,
        cell_types: reps.iter().map(|&r| net.cell_type(r)).collect(),
        arrow_types: net
            .arrow_type_names()
            .iter()
            .enumerate()
            .map(|(arrow, name)| crate::network::RawArrowType {
                name: name.clone(),
                matrix: reps.iter().map(|&r| sums.row(arrow, r).to_vec()).collect(),
            })
            .collect(),
    };
    // Structure is sound by construction; arrow-type consistency transfers
    // from the source when the source satisfied it, so don't re-demand it.
    let network = raw.build_permissive().expect("quotient shapes are sound");
    Ok(QuotientNetwork { network, partition: partition.clone(), representatives: reps })
}
