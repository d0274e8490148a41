//! Partitions of a cell set in restricted-growth form, with lexicographic
//! enumeration of full and per-class refinement spaces.
//!
//! A partition of cells `{0, .., n-1}` is stored as a restricted-growth
//! string: `assignment[c]` is the class id of cell `c`, `assignment[0] == 0`,
//! and each later entry is at most one greater than the maximum of all
//! earlier entries. Under this normalization class ids are ordered by each
//! class's minimal cell, and equal partitions have equal assignments.
//!
//! Textual normal form lists classes in parentheses ordered by minimal cell,
//! cells ascending inside each class and 1-indexed: `(124)(35)`. Cell numbers
//! are digit-concatenated only when `n <= 9`; for larger networks cells are
//! comma-separated: `(1,10,12)(2)...`.

use std::fmt;

use thiserror::Error;

/// Number of cells on each side disagreed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("size mismatch: expected {expected} cells, found {found}")]
pub struct SizeMismatch {
    pub expected: usize,
    pub found: usize,
}

/// The assignment vector violates the restricted-growth invariant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum InvalidRgs {
    #[error("a partition needs at least one cell")]
    Empty,
    #[error("restricted-growth violation at cell {cell}: label {label} exceeds {max_allowed}")]
    Jump { cell: usize, label: u32, max_allowed: u32 },
}

/// A partition of `n` cells into nonempty classes.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Partition {
    assignment: Vec<u32>,
    rank: u32,
}

impl Partition {
    /// Builds from a restricted-growth assignment, rejecting anything else.
    pub fn from_rgs(assignment: Vec<u32>) -> Result<Partition, InvalidRgs> {
        if assignment.is_empty() {
            return Err(InvalidRgs::Empty);
        }
        let mut max_allowed = 0u32;
        for (cell, &label) in assignment.iter().enumerate() {
            if label > max_allowed {
                return Err(InvalidRgs::Jump { cell, label, max_allowed });
            }
            if label == max_allowed {
                max_allowed += 1;
            }
        }
        Ok(Partition { rank: max_allowed, assignment })
    }

    pub(crate) fn from_rgs_unchecked(assignment: Vec<u32>, rank: u32) -> Partition {
        debug_assert!(Partition::from_rgs(assignment.clone())
            .map(|p| p.rank == rank)
            .unwrap_or(false));
        Partition { assignment, rank }
    }

    /// Builds from arbitrary labels: cells share a class iff they share a
    /// label. Labels are normalized to restricted-growth form.
    pub fn from_labels(labels: &[u32]) -> Result<Partition, InvalidRgs> {
        if labels.is_empty() {
            return Err(InvalidRgs::Empty);
        }
        let mut remap = std::collections::HashMap::new();
        let mut assignment = Vec::with_capacity(labels.len());
        let mut next = 0u32;
        for &label in labels {
            let id = *remap.entry(label).or_insert_with(|| {
                let id = next;
                next += 1;
                id
            });
            assignment.push(id);
        }
        Ok(Partition { assignment, rank: next })
    }

    /// The coarsest partition: one class holding every cell.
    pub fn top(n_cells: usize) -> Partition {
        assert!(n_cells >= 1, "a partition needs at least one cell");
        Partition { assignment: vec![0; n_cells], rank: 1 }
    }

    /// The finest partition: every cell is its own class.
    pub fn bottom(n_cells: usize) -> Partition {
        assert!(n_cells >= 1, "a partition needs at least one cell");
        Partition {
            assignment: (0..n_cells as u32).collect(),
            rank: n_cells as u32,
        }
    }

    pub fn n_cells(&self) -> usize {
        self.assignment.len()
    }

    /// Number of classes.
    pub fn rank(&self) -> usize {
        self.rank as usize
    }

    /// Class id of a cell (0-indexed; ids are ordered by minimal member).
    pub fn class_id(&self, cell: usize) -> usize {
        self.assignment[cell] as usize
    }

    /// The restricted-growth assignment, one class id per cell.
    pub fn assignment(&self) -> &[u32] {
        &self.assignment
    }

    /// Classes as cell lists; class order and in-class order are ascending.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut classes = vec![Vec::new(); self.rank()];
        for (cell, &label) in self.assignment.iter().enumerate() {
            classes[label as usize].push(cell);
        }
        classes
    }

    /// Whether every class of `self` lies inside a class of `coarser`.
    ///
    /// This is a partial order: reflexive, antisymmetric, transitive.
    pub fn refines(&self, coarser: &Partition) -> Result<bool, SizeMismatch> {
        if self.n_cells() != coarser.n_cells() {
            return Err(SizeMismatch { expected: coarser.n_cells(), found: self.n_cells() });
        }
        Ok(refines_assignments(&self.assignment, &coarser.assignment))
    }

    /// The common refinement: cells share a class iff they do in both inputs.
    /// This is the meet in the lattice of all partitions.
    pub fn meet(&self, other: &Partition) -> Result<Partition, SizeMismatch> {
        if self.n_cells() != other.n_cells() {
            return Err(SizeMismatch { expected: other.n_cells(), found: self.n_cells() });
        }
        let mut remap = std::collections::HashMap::new();
        let mut assignment = Vec::with_capacity(self.n_cells());
        let mut next = 0u32;
        for (&a, &b) in self.assignment.iter().zip(&other.assignment) {
            let id = *remap.entry((a, b)).or_insert_with(|| {
                let id = next;
                next += 1;
                id
            });
            assignment.push(id);
        }
        Ok(Partition { assignment, rank: next })
    }

    /// Parses the textual normal form (and mild variations of it).
    ///
    /// Classes may appear in any order and separators inside a class may be
    /// commas or whitespace. When `n_cells <= 9` separators are optional and
    /// every digit names one cell; when `n_cells > 9` separators are
    /// required, so multi-digit numbers can be read unambiguously.
    pub fn parse(text: &str, n_cells: usize) -> Result<Partition, ParsePartitionError> {
        parse_partition(text, n_cells)
    }
}

/// `finer[c] == finer[d]` implies `coarser[c] == coarser[d]`; slices must
/// have equal lengths.
pub(crate) fn refines_assignments(finer: &[u32], coarser: &[u32]) -> bool {
    debug_assert_eq!(finer.len(), coarser.len());
    let n_classes = finer.iter().map(|&l| l as usize + 1).max().unwrap_or(0);
    let mut image = vec![u32::MAX; n_classes];
    for (&f, &c) in finer.iter().zip(coarser) {
        let slot = &mut image[f as usize];
        if *slot == u32::MAX {
            *slot = c;
        } else if *slot != c {
            return false;
        }
    }
    true
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wide = self.n_cells() > 9;
        for class in self.classes() {
            f.write_str("(")?;
            for (pos, cell) in class.iter().enumerate() {
                if wide && pos > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{}", cell + 1)?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// The partition string could not be read back as a partition of `n` cells.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParsePartitionError {
    #[error("malformed partition: {0}")]
    Malformed(String),
    #[error("cell {cell} is out of range 1..={n_cells}")]
    OutOfRange { cell: u64, n_cells: usize },
    #[error("cell {cell} appears in more than one class")]
    Duplicate { cell: usize },
    #[error("cell {cell} is missing from the partition")]
    Missing { cell: usize },
}

fn parse_partition(text: &str, n_cells: usize) -> Result<Partition, ParsePartitionError> {
    use ParsePartitionError::*;
    if n_cells == 0 {
        return Err(Malformed("a partition needs at least one cell".into()));
    }
    let mut labels = vec![u32::MAX; n_cells];
    let mut class = 0u32;
    let mut rest = text.trim();
    if rest.is_empty() {
        return Err(Malformed("empty partition string".into()));
    }
    while !rest.is_empty() {
        let Some(stripped) = rest.strip_prefix('(') else {
            return Err(Malformed(format!("expected '(' at {rest:?}")));
        };
        let Some(close) = stripped.find(')') else {
            return Err(Malformed("unclosed '('".into()));
        };
        let body = &stripped[..close];
        if body.contains('(') {
            return Err(Malformed("nested '('".into()));
        }
        let cells = parse_class_body(body, n_cells)?;
        if cells.is_empty() {
            return Err(Malformed("empty class '()'".into()));
        }
        for cell in cells {
            if labels[cell] != u32::MAX {
                return Err(Duplicate { cell: cell + 1 });
            }
            labels[cell] = class;
        }
        class += 1;
        rest = stripped[close + 1..].trim_start();
    }
    if let Some(cell) = labels.iter().position(|&l| l == u32::MAX) {
        return Err(Missing { cell: cell + 1 });
    }
    // Classes were labeled in input order; normalize to restricted growth.
    Ok(Partition::from_labels(&labels).expect("n_cells >= 1"))
}

/// Cell numbers inside one pair of parentheses, 0-indexed on return.
fn parse_class_body(body: &str, n_cells: usize) -> Result<Vec<usize>, ParsePartitionError> {
    use ParsePartitionError::*;
    let mut cells = Vec::new();
    if n_cells <= 9 {
        // Single-digit regime: every digit is a cell, separators are cosmetic.
        for ch in body.chars() {
            match ch {
                '0'..='9' => {
                    let cell = ch as u64 - '0' as u64;
                    if cell == 0 || cell > n_cells as u64 {
                        return Err(OutOfRange { cell, n_cells });
                    }
                    cells.push(cell as usize - 1);
                }
                ',' => {}
                ch if ch.is_whitespace() => {}
                ch => return Err(Malformed(format!("unexpected character {ch:?}"))),
            }
        }
    } else {
        // Multi-digit regime: separators are mandatory between cell numbers.
        for token in body.split(|ch: char| ch == ',' || ch.is_whitespace()) {
            if token.is_empty() {
                continue;
            }
            let cell: u64 = token
                .parse()
                .map_err(|_| Malformed(format!("invalid cell number {token:?}")))?;
            if cell == 0 || cell > n_cells as u64 {
                return Err(OutOfRange { cell, n_cells });
            }
            cells.push(cell as usize - 1);
        }
    }
    Ok(cells)
}

/// Bell number `B(n)`: how many partitions an `n`-cell set has. Saturates
/// at `u128::MAX` (first reached at `n = 43`).
pub fn bell(n: usize) -> u128 {
    if n == 0 {
        return 1;
    }
    let mut row = vec![1u128];
    for _ in 1..n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(*row.last().unwrap());
        for &x in &row {
            let prev = *next.last().unwrap();
            next.push(prev.saturating_add(x));
        }
        row = next;
    }
    *row.last().unwrap()
}

/// All partitions of `n` cells, lexicographically by restricted-growth
/// assignment, from the coarsest `(1..n)` to the finest `(1)(2)..(n)`.
pub fn enumerate_all(n_cells: usize) -> Refinements {
    RefinementSpace::new(Partition::top(n_cells)).iter()
}

/// All partitions refining `base`: independent set partitions of each class,
/// composed and normalized. The stream is deterministic and starts with
/// `base` itself; its length is the product of `bell(class size)`.
pub fn enumerate_refinements(base: &Partition) -> Refinements {
    RefinementSpace::new(base.clone()).iter()
}

/// The space of refinements of a base partition, indexable by position so
/// disjoint chunks can be enumerated independently (and in parallel).
pub struct RefinementSpace {
    base: Partition,
    /// Per cell: (base class id, position of the cell inside its class).
    cell_pos: Vec<(u32, u32)>,
    class_sizes: Vec<u32>,
    /// Prefix sums of class sizes: flat key space for subclass labels.
    offsets: Vec<u32>,
    /// Per class: `bell(size)`, the radix of its digit.
    counts: Vec<u128>,
    total: u128,
}

impl RefinementSpace {
    pub fn new(base: Partition) -> RefinementSpace {
        let classes = base.classes();
        let mut cell_pos = vec![(0u32, 0u32); base.n_cells()];
        for (id, class) in classes.iter().enumerate() {
            for (pos, &cell) in class.iter().enumerate() {
                cell_pos[cell] = (id as u32, pos as u32);
            }
        }
        let class_sizes: Vec<u32> = classes.iter().map(|c| c.len() as u32).collect();
        let mut offsets = Vec::with_capacity(class_sizes.len());
        let mut acc = 0u32;
        for &s in &class_sizes {
            offsets.push(acc);
            acc += s;
        }
        let counts: Vec<u128> = class_sizes.iter().map(|&s| bell(s as usize)).collect();
        let total = counts.iter().fold(1u128, |acc, &c| acc.saturating_mul(c));
        RefinementSpace { base, cell_pos, class_sizes, offsets, counts, total }
    }

    pub fn base(&self) -> &Partition {
        &self.base
    }

    /// Number of candidates; saturates at `u128::MAX` for absurd spaces.
    pub fn count(&self) -> u128 {
        self.total
    }

    /// The whole stream, candidate 0 (which is `base` itself) first.
    pub fn iter(&self) -> Refinements {
        self.range(0, self.total)
    }

    /// Candidates `start..end` of the stream; `start <= end <= count()`.
    /// Chunked iteration visits exactly the same candidates in the same
    /// order as one full pass.
    pub fn range(&self, start: u128, end: u128) -> Refinements {
        assert!(start <= end && end <= self.total, "range out of bounds");
        // Mixed-radix digits of `start`, last class varying fastest. Seeking
        // needs exact counts, which saturation would break; starting from 0
        // never seeks, so unbounded spaces still stream lazily.
        assert!(
            start == 0 || self.total < u128::MAX,
            "space too large to seek into"
        );
        let mut digits = vec![0u128; self.counts.len()];
        let mut rem = start.min(self.total.saturating_sub(1));
        for (i, &radix) in self.counts.iter().enumerate().rev() {
            digits[i] = rem % radix;
            rem /= radix;
        }
        let states: Vec<RgsState> = self
            .class_sizes
            .iter()
            .zip(&digits)
            .map(|(&size, &digit)| RgsState::unrank(size as usize, digit))
            .collect();
        let n = self.base.n_cells();
        Refinements {
            cell_pos: self.cell_pos.clone(),
            offsets: self.offsets.clone(),
            states,
            remaining: end - start,
            pending_first: true,
            global: vec![0; n],
            rank: 0,
            remap: vec![u32::MAX; n],
        }
    }
}

/// Per-class restricted-growth string with its prefix maxima, supporting
/// lexicographic successor steps.
struct RgsState {
    a: Vec<u32>,
    /// `pmax[i] = max(a[0..i])`; `pmax[0] = 0`.
    pmax: Vec<u32>,
}

impl RgsState {
    fn zeros(size: usize) -> RgsState {
        RgsState { a: vec![0; size], pmax: vec![0; size] }
    }

    /// The `index`-th restricted-growth string of length `size`, in
    /// lexicographic order; `index < bell(size)`.
    fn unrank(size: usize, mut index: u128) -> RgsState {
        if index == 0 {
            return RgsState::zeros(size);
        }
        // completions[pos][used]: restricted-growth completions of positions
        // pos.. given `used` labels already taken.
        let mut completions = vec![vec![0u128; size + 2]; size + 1];
        for used in 0..=size + 1 {
            completions[size][used] = 1;
        }
        for pos in (0..size).rev() {
            for used in 0..=pos {
                let stay = (used as u128).saturating_mul(completions[pos + 1][used]);
                completions[pos][used] = stay.saturating_add(completions[pos + 1][used + 1]);
            }
        }
        debug_assert!(index < completions[0][0]);
        let mut state = RgsState::zeros(size);
        let mut used = 0u32;
        for pos in 0..size {
            let mut label = 0u32;
            loop {
                let weight = if label < used {
                    completions[pos + 1][used as usize]
                } else {
                    completions[pos + 1][used as usize + 1]
                };
                if index < weight {
                    break;
                }
                index -= weight;
                label += 1;
                debug_assert!(label <= used);
            }
            state.a[pos] = label;
            if pos + 1 < size {
                state.pmax[pos + 1] = state.pmax[pos].max(label);
            }
            used = used.max(label + 1);
        }
        state
    }

    /// Steps to the lexicographic successor; false when already last.
    fn advance(&mut self) -> bool {
        let s = self.a.len();
        for i in (1..s).rev() {
            if self.a[i] <= self.pmax[i] {
                self.a[i] += 1;
                for j in i + 1..s {
                    self.a[j] = 0;
                    self.pmax[j] = self.pmax[j - 1].max(self.a[j - 1]);
                }
                return true;
            }
        }
        false
    }

    fn reset(&mut self) {
        self.a.fill(0);
        self.pmax.fill(0);
    }
}

/// Lazy stream over (a chunk of) a refinement space. Yields partitions in
/// normalized restricted-growth form; never materializes the space.
pub struct Refinements {
    cell_pos: Vec<(u32, u32)>,
    offsets: Vec<u32>,
    states: Vec<RgsState>,
    remaining: u128,
    pending_first: bool,
    global: Vec<u32>,
    rank: u32,
    remap: Vec<u32>,
}

impl Refinements {
    /// Lending form of `next`: the composed assignment of the next
    /// candidate, without allocating a `Partition`.
    pub(crate) fn next_assignment(&mut self) -> Option<(&[u32], u32)> {
        if self.remaining == 0 {
            return None;
        }
        if self.pending_first {
            self.pending_first = false;
        } else {
            let mut advanced = false;
            for i in (0..self.states.len()).rev() {
                if self.states[i].advance() {
                    for state in &mut self.states[i + 1..] {
                        state.reset();
                    }
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                // Wrapped the whole space; only reachable when the caller's
                // range covered it completely.
                self.remaining = 0;
                return None;
            }
        }
        self.remaining -= 1;
        self.compose();
        Some((&self.global, self.rank))
    }

    /// Normalizes the per-class subclass labels into one restricted-growth
    /// assignment over all cells.
    fn compose(&mut self) {
        self.remap.fill(u32::MAX);
        let mut next = 0u32;
        for (cell, &(class, pos)) in self.cell_pos.iter().enumerate() {
            let sub = self.states[class as usize].a[pos as usize];
            let key = (self.offsets[class as usize] + sub) as usize;
            if self.remap[key] == u32::MAX {
                self.remap[key] = next;
                next += 1;
            }
            self.global[cell] = self.remap[key];
        }
        self.rank = next;
    }
}

impl Iterator for Refinements {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        self.next_assignment()
            .map(|(a, rank)| Partition::from_rgs_unchecked(a.to_vec(), rank))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(text: &str, n: usize) -> Partition {
        Partition::parse(text, n).unwrap()
    }

    #[test]
    fn rgs_rejects_jumps() {
        assert!(Partition::from_rgs(vec![0, 1, 2, 1, 0]).is_ok());
        assert_eq!(
            Partition::from_rgs(vec![0, 2]),
            Err(InvalidRgs::Jump { cell: 1, label: 2, max_allowed: 1 })
        );
        assert_eq!(
            Partition::from_rgs(vec![1, 0]),
            Err(InvalidRgs::Jump { cell: 0, label: 1, max_allowed: 0 })
        );
        assert_eq!(Partition::from_rgs(vec![]), Err(InvalidRgs::Empty));
    }

    #[test]
    fn labels_normalize() {
        let p = Partition::from_labels(&[7, 3, 7, 9, 3]).unwrap();
        assert_eq!(p.assignment(), &[0, 1, 0, 2, 1]);
        assert_eq!(p.rank(), 3);
    }

    #[test]
    fn display_normal_form() {
        let p = Partition::from_rgs(vec![0, 1, 2, 1, 0]).unwrap();
        assert_eq!(p.to_string(), "(15)(24)(3)");
        assert_eq!(Partition::top(5).to_string(), "(12345)");
        assert_eq!(Partition::bottom(3).to_string(), "(1)(2)(3)");
    }

    #[test]
    fn display_wide_networks_use_commas() {
        let mut labels = vec![0u32; 12];
        labels[9] = 0; // cell 10 with cell 1
        for (i, l) in labels.iter_mut().enumerate().skip(1) {
            if i != 9 {
                *l = i as u32;
            }
        }
        let p = Partition::from_labels(&labels).unwrap();
        let s = p.to_string();
        assert!(s.starts_with("(1,10)(2)"), "got {s}");
    }

    #[test]
    fn parse_examples() {
        assert_eq!(p("(124)(3)(5)", 5).assignment(), &[0, 0, 1, 0, 2]);
        assert_eq!(p("(1,2,4)(3)(5)", 5).assignment(), &[0, 0, 1, 0, 2]);
        assert_eq!(p("(1 2 4) (3)(5)", 5).assignment(), &[0, 0, 1, 0, 2]);
        // Class order in the input is irrelevant.
        assert_eq!(p("(3)(5)(124)", 5), p("(124)(3)(5)", 5));
        // Wide networks need separators; digit runs are one number there.
        assert_eq!(p("(1,10)(2)(3)(4)(5)(6)(7)(8)(9)", 10).class_id(9), 0);
    }

    #[test]
    fn parse_errors() {
        use ParsePartitionError::*;
        assert!(matches!(
            Partition::parse("(12)(23)", 3),
            Err(Duplicate { cell: 2 })
        ));
        assert!(matches!(
            Partition::parse("(12)", 3),
            Err(Missing { cell: 3 })
        ));
        assert!(matches!(
            Partition::parse("(125)", 4),
            Err(OutOfRange { cell: 5, n_cells: 4 })
        ));
        assert!(matches!(
            Partition::parse("(0)(123)", 3),
            Err(OutOfRange { cell: 0, .. })
        ));
        assert!(matches!(Partition::parse("(12", 2), Err(Malformed(_))));
        assert!(matches!(Partition::parse("12)", 2), Err(Malformed(_))));
        assert!(matches!(Partition::parse("()", 1), Err(Malformed(_))));
        assert!(matches!(Partition::parse("(1)x(2)", 2), Err(Malformed(_))));
        // 110 cannot name cells 1,10 in a wide network: out of range instead.
        assert!(matches!(
            Partition::parse("(110)(2)(3)(4)(5)(6)(7)(8)(9)", 10),
            Err(OutOfRange { cell: 110, .. })
        ));
    }

    #[test]
    fn parse_missing_reports_smallest_cell() {
        assert_eq!(
            Partition::parse("(13)", 3),
            Err(ParsePartitionError::Missing { cell: 2 })
        );
    }

    #[test]
    fn refines_examples() {
        let fine = p("(124)(3)(5)", 5);
        let coarse = p("(124)(35)", 5);
        assert!(fine.refines(&coarse).unwrap());
        assert!(!coarse.refines(&fine).unwrap());
        assert!(fine.refines(&fine).unwrap());
        // Incomparable pair.
        let a = p("(13)(24)(5)", 5);
        let b = p("(1)(25)(3)(4)", 5);
        assert!(!a.refines(&b).unwrap());
        assert!(!b.refines(&a).unwrap());
        // Bottom refines everything, everything refines top.
        assert!(Partition::bottom(5).refines(&a).unwrap());
        assert!(a.refines(&Partition::top(5)).unwrap());
        assert!(Partition::top(3).refines(&Partition::bottom(5)).is_err());
    }

    #[test]
    fn meet_is_common_refinement() {
        let a = p("(123)(45)", 5);
        let b = p("(12)(345)", 5);
        let m = a.meet(&b).unwrap();
        assert_eq!(m.to_string(), "(12)(3)(45)");
        assert!(m.refines(&a).unwrap());
        assert!(m.refines(&b).unwrap());
    }

    #[test]
    fn bell_numbers() {
        let expected: [u128; 10] = [1, 1, 2, 5, 15, 52, 203, 877, 4140, 21147];
        for (n, &want) in expected.iter().enumerate() {
            assert_eq!(bell(n), want, "bell({n})");
        }
        assert_eq!(bell(26), 49_631_246_523_618_756_274); // first beyond u64
        assert_eq!(bell(43), u128::MAX); // saturated
    }

    #[test]
    fn enumerate_all_n3_in_order() {
        let got: Vec<String> = enumerate_all(3).map(|p| p.to_string()).collect();
        assert_eq!(got, vec!["(123)", "(12)(3)", "(13)(2)", "(1)(23)", "(1)(2)(3)"]);
    }

    #[test]
    fn enumerate_all_counts_match_bell() {
        for n in 1..=9 {
            assert_eq!(enumerate_all(n).count() as u128, bell(n), "n={n}");
        }
    }

    #[test]
    fn first_candidate_is_base_last_is_bottom_of_space() {
        let base = p("(124)(35)", 5);
        let all: Vec<Partition> = enumerate_refinements(&base).collect();
        assert_eq!(all.first(), Some(&base));
        assert_eq!(all.last().unwrap().to_string(), "(1)(2)(3)(4)(5)");
        assert_eq!(all.len() as u128, bell(3) * bell(2));
        for q in &all {
            assert!(q.refines(&base).unwrap());
        }
    }

    #[test]
    fn refinements_of_bottom_is_bottom() {
        let base = Partition::bottom(4);
        let all: Vec<Partition> = enumerate_refinements(&base).collect();
        assert_eq!(all, vec![base]);
    }

    #[test]
    fn refinements_match_filtered_full_enumeration() {
        let base = p("(135)(26)(4)", 6);
        let direct: Vec<Partition> = enumerate_refinements(&base).collect();
        let mut filtered: Vec<Partition> =
            enumerate_all(6).filter(|q| q.refines(&base).unwrap()).collect();
        // Orders differ; compare as sets.
        let mut direct_sorted = direct.clone();
        direct_sorted.sort();
        filtered.sort();
        assert_eq!(direct_sorted, filtered);
        assert_eq!(direct.len() as u128, RefinementSpace::new(base).count());
    }

    #[test]
    fn refinements_of_top_are_all_partitions() {
        let direct: Vec<Partition> = enumerate_refinements(&Partition::top(7)).collect();
        let all: Vec<Partition> = enumerate_all(7).collect();
        assert_eq!(direct, all);
    }

    #[test]
    fn refinement_space_count_is_product_of_bells() {
        let base = Partition::parse("(19)(2378)(46)(5)", 9).unwrap();
        let space = RefinementSpace::new(base);
        assert_eq!(space.count(), 2 * 15 * 2); // bell sizes 2,4,2,1
        assert_eq!(space.iter().count(), 60);
    }

    #[test]
    fn chunked_ranges_stitch_to_full_stream() {
        let space = RefinementSpace::new(Partition::top(6));
        let full: Vec<Partition> = space.iter().collect();
        assert_eq!(full.len() as u128, space.count());
        for splits in [[0, 1, 203], [0, 100, 203], [0, 202, 203], [0, 203, 203]] {
            let mut stitched = Vec::new();
            for w in splits.windows(2) {
                stitched.extend(space.range(w[0], w[1]));
            }
            assert_eq!(stitched, full, "splits {splits:?}");
        }
    }

    proptest! {
        #[test]
        fn from_labels_yields_valid_rgs(labels in proptest::collection::vec(0u32..6, 1..12)) {
            let p = Partition::from_labels(&labels).unwrap();
            prop_assert!(Partition::from_rgs(p.assignment().to_vec()).is_ok());
            prop_assert_eq!(p.rank(), p.classes().len());
            // Same-label cells share classes.
            for i in 0..labels.len() {
                for j in 0..labels.len() {
                    prop_assert_eq!(labels[i] == labels[j], p.class_id(i) == p.class_id(j));
                }
            }
        }

        #[test]
        fn display_parse_round_trip(labels in proptest::collection::vec(0u32..8, 1..15)) {
            let p = Partition::from_labels(&labels).unwrap();
            let back = Partition::parse(&p.to_string(), p.n_cells()).unwrap();
            prop_assert_eq!(back, p);
        }

        #[test]
        fn refinement_chains_are_transitive(labels in proptest::collection::vec(0u32..5, 2..10), merges in proptest::collection::vec((0u32..5, 0u32..5), 0..4)) {
            // Build p, then q by merging classes of p, then r by merging more.
            let p = Partition::from_labels(&labels).unwrap();
            let mut q_labels: Vec<u32> = p.assignment().to_vec();
            let k = p.rank() as u32;
            for &(a, b) in merges.iter().take(2) {
                let (a, b) = (a % k, b % k);
                for l in q_labels.iter_mut() {
                    if *l == a { *l = b; }
                }
            }
            let q = Partition::from_labels(&q_labels).unwrap();
            let mut r_labels = q_labels.clone();
            for &(a, b) in merges.iter().skip(2) {
                let (a, b) = (a % k, b % k);
                for l in r_labels.iter_mut() {
                    if *l == a { *l = b; }
                }
            }
            let r = Partition::from_labels(&r_labels).unwrap();
            prop_assert!(p.refines(&q).unwrap());
            prop_assert!(q.refines(&r).unwrap());
            prop_assert!(p.refines(&r).unwrap());
            // Antisymmetry: mutual refinement means equality.
            if q.refines(&p).unwrap() {
                prop_assert_eq!(&q, &p);
            }
        }

        #[test]
        fn meet_is_greatest_lower_bound(pairs in proptest::collection::vec((0u32..4, 0u32..4), 1..7)) {
            let a: Vec<u32> = pairs.iter().map(|p| p.0).collect();
            let b: Vec<u32> = pairs.iter().map(|p| p.1).collect();
            let pa = Partition::from_labels(&a).unwrap();
            let pb = Partition::from_labels(&b).unwrap();
            let m = pa.meet(&pb).unwrap();
            prop_assert!(m.refines(&pa).unwrap());
            prop_assert!(m.refines(&pb).unwrap());
            for q in enumerate_all(a.len()) {
                if q.refines(&pa).unwrap() && q.refines(&pb).unwrap() {
                    prop_assert!(q.refines(&m).unwrap());
                }
            }
        }

        #[test]
        fn range_seek_agrees_with_sequential(n in 1usize..7, split in 0u128..1000) {
            let space = RefinementSpace::new(Partition::top(n));
            let total = space.count();
            let split = split % (total + 1);
            let full: Vec<Partition> = space.iter().collect();
            let mut stitched: Vec<Partition> = space.range(0, split).collect();
            stitched.extend(space.range(split, total));
            prop_assert_eq!(stitched, full);
        }
    }
}
