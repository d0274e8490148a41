//! The coarsest balanced partition (the lattice's top node), found by
//! iterated input-driven refinement.
//!
//! Starting from the cell-type partition, each round recolors cells by what
//! they currently receive: two cells stay together only if, for every arrow
//! type, they get equally many arrows from every current color. The class
//! count grows monotonically and stabilizes within `n` rounds; the fixpoint
//! is balanced and every balanced partition refines it.

use std::collections::HashMap;

use crate::network::Network;
use crate::partition::{Partition, SizeMismatch};

/// What one refinement round sees of a cell: its current color plus a
/// sparse tally of inputs per (arrow type, source color). Zero tallies are
/// omitted; entries are sorted, so equal signatures compare and hash
/// reliably.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RefinementSignature {
    pub old_color: u32,
    /// `((arrow type, source color), count)`, sorted, counts positive.
    pub tallies: Vec<((u32, u32), u64)>,
}

impl RefinementSignature {
    pub fn of_cell(net: &Network, coloring: &Partition, cell: usize) -> RefinementSignature {
        let assignment = coloring.assignment();
        let mut tallies = Vec::new();
        let mut per_color = vec![0u64; coloring.rank()];
        for arrow in 0..net.n_arrow_types() {
            per_color.fill(0);
            for (j, &count) in net.row(arrow, cell).iter().enumerate() {
                per_color[assignment[j] as usize] += count;
            }
            for (color, &count) in per_color.iter().enumerate() {
                if count > 0 {
                    tallies.push(((arrow as u32, color as u32), count));
                }
            }
        }
        RefinementSignature { old_color: assignment[cell] as u32, tallies }
    }
}

/// One refinement round: regroups cells by [`RefinementSignature`]. The
/// result always refines `coloring`; it equals `coloring` exactly at a
/// fixpoint.
pub fn refine_once(net: &Network, coloring: &Partition) -> Result<Partition, SizeMismatch> {
    if coloring.n_cells() != net.n_cells() {
        return Err(SizeMismatch { expected: net.n_cells(), found: coloring.n_cells() });
    }
    let mut ids: HashMap<RefinementSignature, u32> = HashMap::new();
    let mut labels = Vec::with_capacity(net.n_cells());
    for cell in 0..net.n_cells() {
        let sig = RefinementSignature::of_cell(net, coloring, cell);
        let next = ids.len() as u32;
        labels.push(*ids.entry(sig).or_insert(next));
    }
    Ok(Partition::from_labels(&labels).expect("networks have at least one cell"))
}

/// The coarsest balanced partition: iterates [`refine_once`] from the
/// cell-type partition until the class count stops growing (at most
/// `n_cells` rounds).
pub fn minimal_balanced_coloring(net: &Network) -> Partition {
    let mut coloring = net.cell_type_partition();
    loop {
        let next = refine_once(net, &coloring).expect("coloring matches the network");
        // A refinement with the same class count is the same partition.
        if next.rank() == coloring.rank() {
            return coloring;
        }
        coloring = next;
    }
}
