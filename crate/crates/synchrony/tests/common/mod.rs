//! Shared helpers for the integration suites: fixture loading, seeded
//! random generators, and partition/permutation utilities.

#![allow(dead_code)]

use std::path::PathBuf;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use synchrony::io::parse_network;
use synchrony::network::{Network, RawArrowType, RawNetwork};
use synchrony::partition::Partition;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn fixture(name: &str) -> Network {
    let text = std::fs::read_to_string(fixture_path(name))
        .unwrap_or_else(|e| panic!("reading fixture {name}: {e}"));
    parse_network(&text)
        .unwrap_or_else(|e| panic!("parsing fixture {name}: {e}"))
        .build()
        .unwrap_or_else(|e| panic!("building fixture {name}: {e}"))
}

/// Random network with `n` cells and `arrow_types` matrices, entries biased
/// toward zero, built permissively (random endpoints need not be
/// type-consistent). `max_cell_type = 0` gives a homogeneous network.
pub fn random_network(
    rng: &mut ChaCha8Rng,
    n: usize,
    arrow_types: usize,
    max_cell_type: u32,
) -> Network {
    let cell_types: Vec<u32> = (0..n).map(|_| rng.gen_range(0..=max_cell_type)).collect();
    let arrow_types = (0..arrow_types)
        .map(|k| RawArrowType {
            name: format!("a{k}"),
            matrix: (0..n)
                .map(|_| {
                    (0..n)
                        .map(|_| rng.gen_range(0..=4u64).saturating_sub(2))
                        .collect()
                })
                .collect(),
        })
        .collect();
    RawNetwork { n_cells: n, cell_types, arrow_types }
        .build_permissive()
        .expect("shape-consistent by construction")
}

pub fn random_partition(rng: &mut ChaCha8Rng, n: usize) -> Partition {
    let labels: Vec<u32> = (0..n).map(|_| rng.gen_range(0..n as u32)).collect();
    Partition::from_labels(&labels).unwrap()
}

/// Uniform random permutation; `perm[old] = new`.
pub fn random_permutation(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    // Fisher-Yates.
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        perm.swap(i, j);
    }
    perm
}

/// The image of a partition under a cell relabeling (`perm[old] = new`).
pub fn permute_partition(partition: &Partition, perm: &[usize]) -> Partition {
    let mut labels = vec![0u32; perm.len()];
    for (old, &label) in partition.assignment().iter().enumerate() {
        labels[perm[old]] = label;
    }
    Partition::from_labels(&labels).unwrap()
}

pub fn strings(partitions: &[Partition]) -> Vec<String> {
    partitions.iter().map(|p| p.to_string()).collect()
}
