//! The network file format, its parser and canonical renderer, and the DOT
//! rendering of a lattice.
//!
//! # Network files
//!
//! A network document is line oriented:
//!
//! ```text
//! # comment lines and blank lines are ignored anywhere,
//! # and '#' starts a trailing comment on any line
//! cells 5
//! celltypes 0 1 0 1 1      # optional; defaults to all cells type 0
//!
//! arrowtype e1
//! 0 0 0 0 0
//! 1 0 0 0 0
//! 0 0 0 0 0
//! 0 0 1 0 0
//! 1 0 0 0 0
//!
//! arrowtype e2
//! ...
//! ```
//!
//! `cells N` must come first. `celltypes` is optional, appears at most once,
//! and must precede the first `arrowtype`. Each `arrowtype NAME` is followed
//! by `N` rows of `N` nonnegative integers; entry `(i, j)` counts the arrows
//! of that type **from cell j to cell i** (rows are targets, columns are
//! sources). At least one arrow type is required. Tokens are separated by
//! spaces or tabs; cells are numbered 1..=N in error messages.

use std::fmt;

use thiserror::Error;

use crate::lattice::Lattice;
use crate::network::{Network, RawArrowType, RawNetwork};

/// Largest accepted cell count; guards against absurd allocations.
pub const MAX_CELLS: u64 = 1_000_000;

/// A parse failure, positioned at a 1-indexed source line.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct NetworkParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("expected 'cells N' as the first statement")]
    ExpectedCells,
    #[error("cell count {found} exceeds the supported maximum of {max}")]
    CellCountTooLarge { found: u64, max: u64 },
    #[error("negative entry '{token}' (all counts are nonnegative)")]
    NegativeEntry { token: String },
    #[error("invalid or out-of-range integer '{token}'")]
    BadInteger { token: String },
    #[error("'celltypes' lists {found} labels, expected {expected}")]
    CellTypeCount { expected: usize, found: usize },
    #[error("row {row} of arrow type \"{arrow_type}\" has {found} entries, expected {expected}")]
    RowWidth { arrow_type: String, row: usize, expected: usize, found: usize },
    #[error("duplicate arrow type \"{name}\"")]
    DuplicateArrowType { name: String },
    #[error("'celltypes' appears twice")]
    DuplicateCellTypes,
    #[error("'cells' appears twice")]
    DuplicateCells,
    #[error("'celltypes' must precede the first 'arrowtype'")]
    LateCellTypes,
    #[error("'arrowtype' is missing a name")]
    MissingArrowTypeName,
    #[error("unexpected trailing token '{token}'")]
    TrailingTokens { token: String },
    #[error("keyword '{keyword}' interrupts a matrix ({remaining} rows still expected)")]
    UnexpectedKeyword { keyword: String, remaining: usize },
    #[error("unexpected end of input: expected {expected}")]
    UnexpectedEof { expected: String },
    #[error("expected 'arrowtype', found '{found}'")]
    ExpectedArrowType { found: String },
    #[error("at least one arrow type is required")]
    NoArrowTypes,
}

/// One non-blank line after comment stripping: source line number and its
/// whitespace-separated tokens.
struct Statement<'a> {
    line: usize,
    tokens: Vec<&'a str>,
}

fn tokenize(text: &str) -> (Vec<Statement<'_>>, usize) {
    let mut statements = Vec::new();
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        last_line = idx + 1;
        let content = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if !tokens.is_empty() {
            statements.push(Statement { line: idx + 1, tokens });
        }
    }
    (statements, last_line.max(1))
}

const KEYWORDS: [&str; 3] = ["cells", "celltypes", "arrowtype"];

fn parse_u64(token: &str, line: usize) -> Result<u64, NetworkParseError> {
    token.parse::<u64>().map_err(|_| {
        let kind = if token.starts_with('-') && token[1..].chars().all(|c| c.is_ascii_digit()) && token.len() > 1 {
            ParseErrorKind::NegativeEntry { token: token.to_string() }
        } else {
            ParseErrorKind::BadInteger { token: token.to_string() }
        };
        NetworkParseError { line, kind }
    })
}

fn parse_u32(token: &str, line: usize) -> Result<u32, NetworkParseError> {
    let value = parse_u64(token, line)?;
    u32::try_from(value).map_err(|_| NetworkParseError {
        line,
        kind: ParseErrorKind::BadInteger { token: token.to_string() },
    })
}

/// Parses a network document. The result is shape-consistent by
/// construction; pass it to [`RawNetwork::build`] for the full validity
/// check (or [`RawNetwork::build_permissive`] to skip the per-arrow-type
/// endpoint consistency requirement).
pub fn parse_network(text: &str) -> Result<RawNetwork, NetworkParseError> {
    let (statements, eof_line) = tokenize(text);
    let fail = |line: usize, kind: ParseErrorKind| Err(NetworkParseError { line, kind });

    let mut stream = statements.into_iter().peekable();

    // `cells N`
    let head = match stream.next() {
        Some(s) => s,
        None => return fail(eof_line, ParseErrorKind::ExpectedCells),
    };
    if head.tokens[0] != "cells" {
        return fail(head.line, ParseErrorKind::ExpectedCells);
    }
    if head.tokens.len() < 2 {
        return fail(
            head.line,
            ParseErrorKind::BadInteger { token: String::new() },
        );
    }
    let count = parse_u64(head.tokens[1], head.line)?;
    if count > MAX_CELLS {
        return fail(
            head.line,
            ParseErrorKind::CellCountTooLarge { found: count, max: MAX_CELLS },
        );
    }
    if head.tokens.len() > 2 {
        return fail(
            head.line,
            ParseErrorKind::TrailingTokens { token: head.tokens[2].to_string() },
        );
    }
    let n = count as usize;

    let mut cell_types: Option<Vec<u32>> = None;
    let mut arrow_types: Vec<RawArrowType> = Vec::new();

    while let Some(stmt) = stream.next() {
        match stmt.tokens[0] {
            "cells" => return fail(stmt.line, ParseErrorKind::DuplicateCells),
            "celltypes" => {
                if !arrow_types.is_empty() {
                    return fail(stmt.line, ParseErrorKind::LateCellTypes);
                }
                if cell_types.is_some() {
                    return fail(stmt.line, ParseErrorKind::DuplicateCellTypes);
                }
                let labels = &stmt.tokens[1..];
                if labels.len() != n {
                    return fail(
                        stmt.line,
                        ParseErrorKind::CellTypeCount { expected: n, found: labels.len() },
                    );
                }
                let mut types = Vec::with_capacity(n);
                for token in labels {
                    types.push(parse_u32(token, stmt.line)?);
                }
                cell_types = Some(types);
            }
            "arrowtype" => {
                if stmt.tokens.len() < 2 {
                    return fail(stmt.line, ParseErrorKind::MissingArrowTypeName);
                }
                if stmt.tokens.len() > 2 {
                    return fail(
                        stmt.line,
                        ParseErrorKind::TrailingTokens { token: stmt.tokens[2].to_string() },
                    );
                }
                let name = stmt.tokens[1].to_string();
                if arrow_types.iter().any(|a| a.name == name) {
                    return fail(stmt.line, ParseErrorKind::DuplicateArrowType { name });
                }
                let mut matrix: Vec<Vec<u64>> = Vec::with_capacity(n.min(4096));
                while matrix.len() < n {
                    let row_stmt = match stream.next() {
                        Some(s) => s,
                        None => {
                            return fail(
                                eof_line,
                                ParseErrorKind::UnexpectedEof {
                                    expected: format!(
                                        "{} more rows of arrow type \"{}\"",
                                        n - matrix.len(),
                                        name
                                    ),
                                },
                            )
                        }
                    };
                    if KEYWORDS.contains(&row_stmt.tokens[0]) {
                        return fail(
                            row_stmt.line,
                            ParseErrorKind::UnexpectedKeyword {
                                keyword: row_stmt.tokens[0].to_string(),
                                remaining: n - matrix.len(),
                            },
                        );
                    }
                    if row_stmt.tokens.len() != n {
                        return fail(
                            row_stmt.line,
                            ParseErrorKind::RowWidth {
                                arrow_type: name.clone(),
                                row: matrix.len() + 1,
                                expected: n,
                                found: row_stmt.tokens.len(),
                            },
                        );
                    }
                    let mut row = Vec::with_capacity(n);
                    for token in &row_stmt.tokens {
                        row.push(parse_u64(token, row_stmt.line)?);
                    }
                    matrix.push(row);
                }
                arrow_types.push(RawArrowType { name, matrix });
            }
            other => {
                return fail(
                    stmt.line,
                    ParseErrorKind::ExpectedArrowType { found: other.to_string() },
                )
            }
        }
    }

    if arrow_types.is_empty() {
        return fail(eof_line, ParseErrorKind::NoArrowTypes);
    }

    Ok(RawNetwork {
        n_cells: n,
        cell_types: cell_types.unwrap_or_else(|| vec![0; n]),
        arrow_types,
    })
}

/// Renders a network in canonical document form: `cells`, then `celltypes`
/// (omitted when every cell has type 0), then each arrow type block
/// separated by blank lines. `parse_network` of the result reproduces the
/// network, and rendering is idempotent across that round trip.
pub fn render_network(net: &Network) -> String {
    let n = net.n_cells();
    let mut out = String::new();
    out.push_str(&format!("cells {n}\n"));
    if net.cell_types().iter().any(|&t| t != 0) {
        out.push_str("celltypes");
        for &t in net.cell_types() {
            out.push_str(&format!(" {t}"));
        }
        out.push('\n');
    }
    for (k, name) in net.arrow_type_names().iter().enumerate() {
        out.push('\n');
        out.push_str(&format!("arrowtype {name}\n"));
        for i in 0..n {
            let row = net.row(k, i);
            let mut first = true;
            for &entry in row {
                if !first {
                    out.push(' ');
                }
                out.push_str(&format!("{entry}"));
                first = false;
            }
            out.push('\n');
        }
    }
    out
}

/// A lattice diagram in Graphviz DOT form.
///
/// The digraph's edges are exactly the covering relation (one edge per `L`
/// entry, drawn from the coarser node down to the finer node), every node
/// is labeled with its normal-form partition string, and nodes of equal
/// rank share a `rank=same` group so the layout descends rank by rank.
/// Rendering is deterministic: the same lattice always yields the same
/// bytes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderedLattice(String);

impl RenderedLattice {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

impl fmt::Display for RenderedLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Renders a lattice as a DOT digraph; see [`RenderedLattice`].
pub fn render_dot(lattice: &Lattice) -> RenderedLattice {
    let mut out = String::new();
    out.push_str("digraph lattice {\n");
    out.push_str("  rankdir=TB;\n");
    out.push_str("  node [shape=ellipse];\n");
    for (i, node) in lattice.nodes().iter().enumerate() {
        out.push_str(&format!("  n{i} [label=\"{node}\"];\n"));
    }
    // One rank=same group per distinct class count, coarsest first; the node
    // sort keeps each group a contiguous index range.
    let ranks = lattice.ranks();
    let mut start = 0;
    while start < ranks.len() {
        let mut end = start;
        while end < ranks.len() && ranks[end] == ranks[start] {
            end += 1;
        }
        out.push_str("  { rank=same;");
        for i in start..end {
            out.push_str(&format!(" n{i};"));
        }
        out.push_str(" }\n");
        start = end;
    }
    for (i, j) in lattice.covering_pairs() {
        out.push_str(&format!("  n{j} -> n{i};\n"));
    }
    out.push_str("}\n");
    RenderedLattice(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{
        build_lattice, build_lattice_with, enumerate_balanced, CoveringStrategy,
        EnumerationOptions,
    };

    fn kind_at(text: &str) -> (usize, ParseErrorKind) {
        let err = parse_network(text).unwrap_err();
        (err.line, err.kind)
    }

    #[test]
    fn parses_the_two_type_five_cell_fixture() {
        let raw = parse_network(include_str!("../fixtures/g5.net")).unwrap();
        assert_eq!(raw.n_cells, 5);
        assert_eq!(raw.cell_types, vec![0; 5]);
        let names: Vec<&str> = raw.arrow_types.iter().map(|a| a.name.as_str()).collect();
        assert_eq!(names, vec!["e1", "e2"]);
        let net = raw.build().unwrap();
        // Row = target cell, column = source cell: e2 has an arrow from
        // cell 1 to cell 3 but none from cell 3 to cell 1.
        assert_eq!(net.entry(1, 2, 0), 1);
        assert_eq!(net.entry(1, 0, 2), 0);
    }

    #[test]
    fn celltypes_line_is_applied() {
        let raw = parse_network(include_str!("../fixtures/g3.net")).unwrap();
        assert_eq!(raw.cell_types, vec![0, 1, 0, 1, 1]);
    }

    #[test]
    fn single_cell_document() {
        let raw = parse_network("cells 1\narrowtype a\n0\n").unwrap();
        assert_eq!(raw.n_cells, 1);
        assert_eq!(raw.arrow_types[0].matrix, vec![vec![0]]);
    }

    #[test]
    fn comments_blanks_and_tabs_are_ignored() {
        let text = "# leading comment\n\n  cells 2 # trailing\n\n# mid\ncelltypes\t0 0\narrowtype e # named e\n# before rows\n0\t1\n\n1 0 # done\n# trailing comment\n";
        let raw = parse_network(text).unwrap();
        assert_eq!(raw.n_cells, 2);
        assert_eq!(raw.arrow_types[0].matrix, vec![vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn multi_digit_entries_and_large_counts() {
        let raw = parse_network("cells 2\narrowtype w\n0 18446744073709551615\n12 0\n").unwrap();
        assert_eq!(raw.arrow_types[0].matrix[0][1], u64::MAX);
        assert_eq!(raw.arrow_types[0].matrix[1][0], 12);
    }

    #[test]
    fn error_positions_and_kinds() {
        assert_eq!(kind_at(""), (1, ParseErrorKind::ExpectedCells));
        assert_eq!(kind_at("# only comments\n\n"), (2, ParseErrorKind::ExpectedCells));
        assert_eq!(
            kind_at("arrowtype e\n0\n"),
            (1, ParseErrorKind::ExpectedCells)
        );
        assert_eq!(
            kind_at("cells x\n"),
            (1, ParseErrorKind::BadInteger { token: "x".into() })
        );
        assert_eq!(
            kind_at("cells 2 3\n"),
            (1, ParseErrorKind::TrailingTokens { token: "3".into() })
        );
        assert_eq!(
            kind_at("cells 1000001\n"),
            (
                1,
                ParseErrorKind::CellCountTooLarge { found: 1_000_001, max: MAX_CELLS }
            )
        );
        assert_eq!(
            kind_at("cells 2\ncelltypes 0\narrowtype a\n0 0\n0 0\n"),
            (2, ParseErrorKind::CellTypeCount { expected: 2, found: 1 })
        );
        assert_eq!(
            kind_at("cells 2\narrowtype a\n0 0\n0 0\ncelltypes 0 0\n"),
            (5, ParseErrorKind::LateCellTypes)
        );
        assert_eq!(
            kind_at("cells 2\ncelltypes 0 0\ncelltypes 0 0\narrowtype a\n0 0\n0 0\n"),
            (3, ParseErrorKind::DuplicateCellTypes)
        );
        assert_eq!(
            kind_at("cells 2\narrowtype a\n0 0\n0 0\ncells 2\n"),
            (5, ParseErrorKind::DuplicateCells)
        );
        assert_eq!(
            kind_at("cells 2\narrowtype a\n0 0\n0 0\narrowtype a\n0 0\n0 0\n"),
            (5, ParseErrorKind::DuplicateArrowType { name: "a".into() })
        );
        assert_eq!(
            kind_at("cells 2\narrowtype\n0 0\n0 0\n"),
            (2, ParseErrorKind::MissingArrowTypeName)
        );
        assert_eq!(
            kind_at("cells 2\narrowtype a b\n"),
            (2, ParseErrorKind::TrailingTokens { token: "b".into() })
        );
        assert_eq!(
            kind_at("cells 2\narrowtype a\n0 0 0\n0 0\n"),
            (
                3,
                ParseErrorKind::RowWidth {
                    arrow_type: "a".into(),
                    row: 1,
                    expected: 2,
                    found: 3
                }
            )
        );
        assert_eq!(
            kind_at("cells 2\narrowtype a\n0 0\n0 z\n"),
            (4, ParseErrorKind::BadInteger { token: "z".into() })
        );
        assert_eq!(
            kind_at("cells 2\narrowtype a\n0 -1\n0 0\n"),
            (3, ParseErrorKind::NegativeEntry { token: "-1".into() })
        );
        assert_eq!(
            kind_at("cells 2\narrowtype a\n0 0\narrowtype b\n0 0\n0 0\n"),
            (
                4,
                ParseErrorKind::UnexpectedKeyword { keyword: "arrowtype".into(), remaining: 1 }
            )
        );
        assert_eq!(
            kind_at("cells 2\narrowtype a\n0 0\n"),
            (
                3,
                ParseErrorKind::UnexpectedEof {
                    expected: "1 more rows of arrow type \"a\"".into()
                }
            )
        );
        assert_eq!(
            kind_at("cells 2\nfoo\n"),
            (2, ParseErrorKind::ExpectedArrowType { found: "foo".into() })
        );
        assert_eq!(kind_at("cells 2\n"), (1, ParseErrorKind::NoArrowTypes));
        assert_eq!(
            kind_at("cells 2\ncelltypes 0 5000000000\narrowtype a\n0 0\n0 0\n"),
            (2, ParseErrorKind::BadInteger { token: "5000000000".into() })
        );
    }

    #[test]
    fn error_display_includes_the_line() {
        let err = parse_network("cells 2\narrowtype a\n0 -3\n0 0\n").unwrap_err();
        assert_eq!(
            err.to_string(),
            "line 3: negative entry '-3' (all counts are nonnegative)"
        );
    }

    #[test]
    fn render_is_canonical_and_round_trips() {
        for text in [
            include_str!("../fixtures/g1.net"),
            include_str!("../fixtures/g3.net"),
            include_str!("../fixtures/g5.net"),
            include_str!("../fixtures/lorenz.net"),
            include_str!("../fixtures/neurons9_twotype.net"),
        ] {
            let net = parse_network(text).unwrap().build().unwrap();
            let rendered = render_network(&net);
            let reparsed = parse_network(&rendered).unwrap().build().unwrap();
            assert_eq!(reparsed, net);
            assert_eq!(render_network(&reparsed), rendered);
        }
    }

    #[test]
    fn render_layout_is_exact() {
        let net = Network::new(
            vec![0, 1],
            vec![("a", vec![vec![0, 2], vec![0, 0]])],
        )
        .unwrap();
        assert_eq!(
            render_network(&net),
            "cells 2\ncelltypes 0 1\n\narrowtype a\n0 2\n0 0\n"
        );
        let plain = Network::new(vec![0, 0], vec![("a", vec![vec![0, 0], vec![0, 0]])])
            .unwrap();
        assert!(!render_network(&plain).contains("celltypes"));
    }

    #[test]
    fn dot_of_the_five_cell_lattice_is_frozen() {
        let net = parse_network(include_str!("../fixtures/g5.net"))
            .unwrap()
            .build()
            .unwrap();
        let lattice = build_lattice(
            enumerate_balanced(&net, &EnumerationOptions::default()).unwrap(),
        );
        let dot = render_dot(&lattice);
        let want = "digraph lattice {\n  rankdir=TB;\n  node [shape=ellipse];\n  n0 [label=\"(12345)\"];\n  n1 [label=\"(124)(35)\"];\n  n2 [label=\"(124)(3)(5)\"];\n  n3 [label=\"(1)(2)(35)(4)\"];\n  n4 [label=\"(1)(2)(3)(4)(5)\"];\n  { rank=same; n0; }\n  { rank=same; n1; }\n  { rank=same; n2; }\n  { rank=same; n3; }\n  { rank=same; n4; }\n  n0 -> n1;\n  n1 -> n2;\n  n1 -> n3;\n  n2 -> n4;\n  n3 -> n4;\n}\n";
        assert_eq!(dot.as_str(), want);
    }

    #[test]
    fn dot_counts_for_small_lattices() {
        let count = |dot: &RenderedLattice, needle: &str| -> usize {
            dot.as_str().matches(needle).count()
        };
        let net = parse_network(include_str!("../fixtures/lorenz.net"))
            .unwrap()
            .build()
            .unwrap();
        let dot = render_dot(&build_lattice(
            enumerate_balanced(&net, &EnumerationOptions::default()).unwrap(),
        ));
        assert_eq!(count(&dot, "label="), 2);
        assert_eq!(count(&dot, " -> "), 1);
        assert_eq!(count(&dot, "rank=same"), 2);

        let one = Network::fully_connected(1);
        let dot = render_dot(&build_lattice(
            enumerate_balanced(&one, &EnumerationOptions::default()).unwrap(),
        ));
        assert_eq!(count(&dot, "label="), 1);
        assert_eq!(count(&dot, " -> "), 0);
        assert_eq!(count(&dot, "rank=same"), 1);
    }

    #[test]
    fn dot_is_deterministic_across_covering_strategies() {
        let net = parse_network(include_str!("../fixtures/rossler.net"))
            .unwrap()
            .build()
            .unwrap();
        let balanced = enumerate_balanced(&net, &EnumerationOptions::default()).unwrap();
        let a = render_dot(&build_lattice_with(
            balanced.clone(),
            CoveringStrategy::WitnessWindow,
        ));
        let b = render_dot(&build_lattice_with(balanced, CoveringStrategy::FullT));
        assert_eq!(a, b);
    }

    #[test]
    fn parse_applies_default_cell_types_lazily() {
        // A zero-cell document parses (build() then reports the violation).
        let raw = parse_network("cells 0\narrowtype a\n").unwrap();
        assert_eq!(raw.n_cells, 0);
        assert!(raw.build().is_err());
    }
}
