//! Coupled cell networks: typed cells plus one nonnegative integer adjacency
//! matrix per arrow type.
//!
//! Entry `(i, j)` of an adjacency matrix counts the arrows **from cell `j`
//! to cell `i`** — rows index the receiving cell. Transposing this
//! convention is the classic mistake when entering a network by hand; when
//! results look wrong, check the arrow direction first.
//!
//! Raw data ([`RawNetwork`]) is validated into a [`Network`] before any
//! computation. Strict validation also checks that all arrows of one type
//! connect the same tail cell type to the same head cell type; permissive
//! validation skips only that check.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::partition::Partition;

/// Network data as parsed or hand-built, before any checking.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawNetwork {
    pub n_cells: usize,
    /// One type id per cell; must have length `n_cells`.
    pub cell_types: Vec<u32>,
    pub arrow_types: Vec<RawArrowType>,
}

/// One arrow type: a name and its adjacency matrix in row-major nested form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawArrowType {
    pub name: String,
    /// `matrix[i][j]` = number of arrows from cell `j` to cell `i`.
    pub matrix: Vec<Vec<u64>>,
}

/// A single violated invariant found during validation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("network has no cells")]
    NoCells,
    #[error("expected {expected} cell types, found {found}")]
    CellTypeCount { expected: usize, found: usize },
    #[error("arrow type {arrow_type:?}: expected {expected} rows, found {found}")]
    MatrixRowCount { arrow_type: String, expected: usize, found: usize },
    #[error("arrow type {arrow_type:?}, row {row}: expected {expected} columns, found {found}")]
    MatrixColumnCount { arrow_type: String, row: usize, expected: usize, found: usize },
    #[error("duplicate arrow type name {name:?}")]
    DuplicateArrowType { name: String },
    #[error(
        "arrow type {arrow_type:?}: head cell types differ \
         (cell {cell_a} has type {type_a}, cell {cell_b} has type {type_b})"
    )]
    HeadTypeMismatch { arrow_type: String, cell_a: usize, type_a: u32, cell_b: usize, type_b: u32 },
    #[error(
        "arrow type {arrow_type:?}: tail cell types differ \
         (cell {cell_a} has type {type_a}, cell {cell_b} has type {type_b})"
    )]
    TailTypeMismatch { arrow_type: String, cell_a: usize, type_a: u32, cell_b: usize, type_b: u32 },
}

/// Outcome of validating a [`RawNetwork`]: pass, or every violation found.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_pass(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violations(&self) -> &[Violation] {
        &self.violations
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_pass() {
            return f.write_str("ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ValidationReport {}

impl RawNetwork {
    /// Checks every invariant, including arrow-type head/tail consistency.
    pub fn validate(&self) -> ValidationReport {
        self.validate_inner(true)
    }

    /// Like [`validate`](Self::validate) but skips the arrow-type head/tail
    /// consistency check, for data sets that mix cell types along one
    /// coupling type on purpose.
    pub fn validate_permissive(&self) -> ValidationReport {
        self.validate_inner(false)
    }

    fn validate_inner(&self, check_arrow_types: bool) -> ValidationReport {
        let mut violations = Vec::new();
        let n = self.n_cells;
        if n == 0 {
            return ValidationReport { violations: vec![Violation::NoCells] };
        }
        let cell_types_ok = self.cell_types.len() == n;
        if !cell_types_ok {
            violations.push(Violation::CellTypeCount { expected: n, found: self.cell_types.len() });
        }
        let mut seen = HashMap::new();
        for (k, at) in self.arrow_types.iter().enumerate() {
            if let Some(_first) = seen.insert(at.name.clone(), k) {
                violations.push(Violation::DuplicateArrowType { name: at.name.clone() });
            }
            let mut shape_ok = true;
            if at.matrix.len() != n {
                violations.push(Violation::MatrixRowCount {
                    arrow_type: at.name.clone(),
                    expected: n,
                    found: at.matrix.len(),
                });
                shape_ok = false;
            }
            for (i, row) in at.matrix.iter().enumerate() {
                if row.len() != n {
                    violations.push(Violation::MatrixColumnCount {
                        arrow_type: at.name.clone(),
                        row: i + 1,
                        expected: n,
                        found: row.len(),
                    });
                    shape_ok = false;
                }
            }
            if check_arrow_types && shape_ok && cell_types_ok {
                self.check_arrow_type_consistency(at, &mut violations);
            }
        }
        ValidationReport { violations }
    }

    /// All arrows of one type must share the head cell type and share the
    /// tail cell type (a type-`k` arrow always couples the same kind of
    /// cells). Reports at most one head and one tail conflict per type.
    fn check_arrow_type_consistency(&self, at: &RawArrowType, violations: &mut Vec<Violation>) {
        let mut first_head: Option<(usize, u32)> = None;
        let mut first_tail: Option<(usize, u32)> = None;
        let mut head_reported = false;
        let mut tail_reported = false;
        for (i, row) in at.matrix.iter().enumerate() {
            for (j, &count) in row.iter().enumerate() {
                if count == 0 {
                    continue;
                }
                let head = self.cell_types[i];
                let tail = self.cell_types[j];
                match first_head {
                    None => first_head = Some((i, head)),
                    Some((a, t)) if t != head && !head_reported => {
                        head_reported = true;
                        violations.push(Violation::HeadTypeMismatch {
                            arrow_type: at.name.clone(),
                            cell_a: a + 1,
                            type_a: t,
                            cell_b: i + 1,
                            type_b: head,
                        });
                    }
                    _ => {}
                }
                match first_tail {
                    None => first_tail = Some((j, tail)),
                    Some((a, t)) if t != tail && !tail_reported => {
                        tail_reported = true;
                        violations.push(Violation::TailTypeMismatch {
                            arrow_type: at.name.clone(),
                            cell_a: a + 1,
                            type_a: t,
                            cell_b: j + 1,
                            type_b: tail,
                        });
                    }
                    _ => {}
                }
            }
        }
    }

    /// Validates strictly and freezes into a [`Network`].
    pub fn build(self) -> Result<Network, ValidationReport> {
        self.build_inner(true)
    }

    /// Validates permissively and freezes into a [`Network`].
    pub fn build_permissive(self) -> Result<Network, ValidationReport> {
        self.build_inner(false)
    }

    fn build_inner(self, check_arrow_types: bool) -> Result<Network, ValidationReport> {
        let report = self.validate_inner(check_arrow_types);
        if !report.is_pass() {
            return Err(report);
        }
        let n = self.n_cells;
        let mut names = Vec::with_capacity(self.arrow_types.len());
        let mut matrices = Vec::with_capacity(self.arrow_types.len());
        for at in self.arrow_types {
            names.push(at.name);
            let mut flat = Vec::with_capacity(n * n);
            for row in at.matrix {
                flat.extend(row);
            }
            matrices.push(flat);
        }
        Ok(Network { n, cell_types: self.cell_types, arrow_names: names, matrices })
    }
}

/// A validated coupled cell network. Immutable after construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Network {
    n: usize,
    cell_types: Vec<u32>,
    arrow_names: Vec<String>,
    /// One flat row-major `n * n` matrix per arrow type.
    matrices: Vec<Vec<u64>>,
}

/// What a cell receives: its type and, per arrow type, its in-degree.
/// Cells with equal signatures are input equivalent. Cells with no inputs
/// at all compare equal exactly when their cell types agree, because the
/// zero in-degree vectors always match.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct InDegreeSignature {
    pub cell_type: u32,
    /// Row sum of each arrow type's matrix at this cell.
    pub per_type_in_degree: Vec<u64>,
}

impl Network {
    /// Builds and strictly validates a network; `n` is `cell_types.len()`.
    pub fn new(
        cell_types: Vec<u32>,
        arrow_types: Vec<(&str, Vec<Vec<u64>>)>,
    ) -> Result<Network, ValidationReport> {
        RawNetwork {
            n_cells: cell_types.len(),
            cell_types,
            arrow_types: arrow_types
                .into_iter()
                .map(|(name, matrix)| RawArrowType { name: name.to_string(), matrix })
                .collect(),
        }
        .build()
    }

    pub fn n_cells(&self) -> usize {
        self.n
    }

    pub fn n_arrow_types(&self) -> usize {
        self.matrices.len()
    }

    pub fn cell_types(&self) -> &[u32] {
        &self.cell_types
    }

    pub fn cell_type(&self, cell: usize) -> u32 {
        self.cell_types[cell]
    }

    pub fn arrow_type_names(&self) -> &[String] {
        &self.arrow_names
    }

    /// Number of arrows of type `k` from cell `j` to cell `i`.
    pub fn entry(&self, k: usize, i: usize, j: usize) -> u64 {
        self.matrices[k][i * self.n + j]
    }

    /// Row `i` of arrow type `k`: what cell `i` receives, per source cell.
    pub fn row(&self, k: usize, i: usize) -> &[u64] {
        &self.matrices[k][i * self.n..(i + 1) * self.n]
    }

    /// Total type-`k` arrows into cell `i`.
    pub fn in_degree(&self, k: usize, i: usize) -> u64 {
        self.row(k, i).iter().sum()
    }

    pub fn in_degree_signature(&self, cell: usize) -> InDegreeSignature {
        InDegreeSignature {
            cell_type: self.cell_types[cell],
            per_type_in_degree: (0..self.n_arrow_types())
                .map(|k| self.in_degree(k, cell))
                .collect(),
        }
    }

    /// Cells grouped by cell type, in restricted-growth order.
    pub fn cell_type_partition(&self) -> Partition {
        Partition::from_labels(&self.cell_types).expect("networks have at least one cell")
    }

    /// The input equivalence relation: cells with the same cell type and the
    /// same per-arrow-type in-degrees share a class. Every balanced
    /// partition refines this one.
    pub fn input_equivalence(&self) -> Partition {
        let mut ids: HashMap<InDegreeSignature, u32> = HashMap::new();
        let mut labels = Vec::with_capacity(self.n);
        for cell in 0..self.n {
            let sig = self.in_degree_signature(cell);
            let next = ids.len() as u32;
            labels.push(*ids.entry(sig).or_insert(next));
        }
        Partition::from_labels(&labels).expect("networks have at least one cell")
    }

    /// The raw data of this network, e.g. to serialize or re-validate.
    pub fn to_raw(&self) -> RawNetwork {
        RawNetwork {
            n_cells: self.n,
            cell_types: self.cell_types.clone(),
            arrow_types: self
                .arrow_names
                .iter()
                .enumerate()
                .map(|(k, name)| RawArrowType {
                    name: name.clone(),
                    matrix: (0..self.n).map(|i| self.row(k, i).to_vec()).collect(),
                })
                .collect(),
        }
    }

    /// The same network with cells relabeled: old cell `c` becomes
    /// `perm[c]`. `perm` must be a permutation of `0..n_cells`.
    pub fn permuted(&self, perm: &[usize]) -> Network {
        assert_eq!(perm.len(), self.n, "permutation length mismatch");
        let mut seen = vec![false; self.n];
        for &img in perm {
            assert!(img < self.n && !seen[img], "not a permutation");
            seen[img] = true;
        }
        let mut cell_types = vec![0; self.n];
        for (c, &img) in perm.iter().enumerate() {
            cell_types[img] = self.cell_types[c];
        }
        let matrices = self
            .matrices
            .iter()
            .map(|m| {
                let mut out = vec![0; self.n * self.n];
                for i in 0..self.n {
                    for j in 0..self.n {
                        out[perm[i] * self.n + perm[j]] = m[i * self.n + j];
                    }
                }
                out
            })
            .collect();
        Network { n: self.n, cell_types, arrow_names: self.arrow_names.clone(), matrices }
    }

    /// All-to-all single-type network without self-loops: every partition
    /// of it is balanced, so it exercises worst-case enumeration.
    pub fn fully_connected(n_cells: usize) -> Network {
        assert!(n_cells >= 1);
        let matrix: Vec<Vec<u64>> = (0..n_cells)
            .map(|i| (0..n_cells).map(|j| u64::from(i != j)).collect())
            .collect();
        Network::new(vec![0; n_cells], vec![("coupling", matrix)])
            .expect("fully connected networks are valid")
    }

    /// Path graph with bidirectional single-type coupling between
    /// neighbours.
    pub fn bidirectional_chain(n_cells: usize) -> Network {
        assert!(n_cells >= 1);
        let matrix: Vec<Vec<u64>> = (0..n_cells)
            .map(|i| {
                (0..n_cells)
                    .map(|j| u64::from(i.abs_diff(j) == 1))
                    .collect()
            })
            .collect();
        Network::new(vec![0; n_cells], vec![("coupling", matrix)])
            .expect("chain networks are valid")
    }
}
