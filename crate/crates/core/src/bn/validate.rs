use std::collections::HashSet;
use std::fmt;

use super::{BayesNet, ROW_SUM_TOL};

/// A single broken invariant.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NonDenseId {
        position: usize,
        id: usize,
    },
    DuplicateName(String),
    CardinalityTooSmall {
        var: usize,
        cardinality: usize,
    },
    UnknownVariable {
        context: String,
        id: usize,
    },
    MissingCpt {
        var: usize,
    },
    DuplicateCpt {
        var: usize,
    },
    DuplicateParent {
        var: usize,
        parent: usize,
    },
    Cycle {
        vars: Vec<usize>,
    },
    RowCount {
        var: usize,
        expected: usize,
        found: usize,
    },
    CardinalityMismatch {
        var: usize,
        row: usize,
        expected: usize,
        found: usize,
    },
    BadEntry {
        var: usize,
        row: usize,
        value: f64,
    },
    RowSum {
        var: usize,
        row: usize,
        sum: f64,
    },
    BadOrder(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonDenseId { position, id } => {
                write!(f, "variable at position {position} has id {id}")
            }
            Violation::DuplicateName(n) => write!(f, "duplicate variable name '{n}'"),
            Violation::CardinalityTooSmall { var, cardinality } => {
                write!(f, "variable {var}: cardinality {cardinality} < 2")
            }
            Violation::UnknownVariable { context, id } => {
                write!(f, "{context}: unknown variable id {id}")
            }
            Violation::MissingCpt { var } => write!(f, "variable {var}: no CPT"),
            Violation::DuplicateCpt { var } => write!(f, "variable {var}: more than one CPT"),
            Violation::DuplicateParent { var, parent } => {
                write!(f, "variable {var}: parent {parent} listed twice")
            }
            Violation::Cycle { vars } => write!(f, "cycle through variables {vars:?}"),
            Violation::RowCount { var, expected, found } => {
                write!(f, "variable {var}: {found} CPT rows, expected {expected}")
            }
            Violation::CardinalityMismatch {
                var,
                row,
                expected,
                found,
            } => write!(
                f,
                "variable {var} row {row}: {found} entries, cardinality is {expected}"
            ),
            Violation::BadEntry { var, row, value } => {
                write!(f, "variable {var} row {row}: entry {value} outside [0, 1]")
            }
            Violation::RowSum { var, row, sum } => {
                write!(f, "variable {var} row {row}: row sum {sum} ≠ 1")
            }
            Violation::BadOrder(msg) => write!(f, "bad topological order: {msg}"),
        }
    }
}

/// Every invariant violation found in a network; empty means valid.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has_cycle(&self) -> bool {
        self.violations.iter().any(|v| matches!(v, Violation::Cycle { .. }))
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "  - {v}")?;
        }
        Ok(())
    }
}

/// Checks every network and CPT invariant and reports all violations.
pub fn validate(net: &BayesNet) -> ValidationReport {
    let mut out = Vec::new();
    let n = net.variables.len();

    let mut names = HashSet::new();
    for (position, v) in net.variables.iter().enumerate() {
        if v.id != position {
            out.push(Violation::NonDenseId { position, id: v.id });
        }
        if !names.insert(v.name.as_str()) {
            out.push(Violation::DuplicateName(v.name.clone()));
        }
        if v.cardinality < 2 {
            out.push(Violation::CardinalityTooSmall {
                var: position,
                cardinality: v.cardinality,
            });
        }
    }

    let mut seen = vec![0usize; n];
    let mut structural_ok = true;
    for cpt in &net.cpts {
        if cpt.child >= n {
            out.push(Violation::UnknownVariable {
                context: "CPT child".into(),
                id: cpt.child,
            });
            structural_ok = false;
            continue;
        }
        seen[cpt.child] += 1;
        let mut parents = HashSet::new();
        for &p in &cpt.parents {
            if p >= n {
                out.push(Violation::UnknownVariable {
                    context: format!("parent of variable {}", cpt.child),
                    id: p,
                });
                structural_ok = false;
            } else if !parents.insert(p) {
                out.push(Violation::DuplicateParent {
                    var: cpt.child,
                    parent: p,
                });
            }
        }
    }
    for (var, &count) in seen.iter().enumerate() {
        match count {
            0 => {
                out.push(Violation::MissingCpt { var });
                structural_ok = false;
            }
            1 => {}
            _ => out.push(Violation::DuplicateCpt { var }),
        }
    }

    let kahn = net.kahn_order();
    if structural_ok && kahn.len() < n {
        let placed: HashSet<usize> = kahn.iter().copied().collect();
        out.push(Violation::Cycle {
            vars: (0..n).filter(|v| !placed.contains(v)).collect(),
        });
    }

    // Table shape and values.
    for cpt in &net.cpts {
        if cpt.child >= n || cpt.parents.iter().any(|&p| p >= n) {
            continue;
        }
        let var = cpt.child;
        let expected_rows: usize = cpt.parents.iter().map(|&p| net.cards[p]).product();
        if cpt.rows.len() != expected_rows {
            out.push(Violation::RowCount {
                var,
                expected: expected_rows,
                found: cpt.rows.len(),
            });
        }
        for (row, probs) in cpt.rows.iter().enumerate() {
            if probs.len() != net.cards[var] {
                out.push(Violation::CardinalityMismatch {
                    var,
                    row,
                    expected: net.cards[var],
                    found: probs.len(),
                });
            }
            let mut entries_ok = true;
            for &value in probs {
                if !(0.0..=1.0).contains(&value) {
                    out.push(Violation::BadEntry { var, row, value });
                    entries_ok = false;
                }
            }
            let sum: f64 = probs.iter().sum();
            if entries_ok && (sum - 1.0).abs() > ROW_SUM_TOL {
                out.push(Violation::RowSum { var, row, sum });
            }
        }
    }

    // The stored order must be a permutation with parents first.
    if structural_ok && kahn.len() == n {
        let mut position = vec![usize::MAX; n];
        let mut ok = net.order.len() == n;
        for (k, &v) in net.order.iter().enumerate() {
            if v >= n || position[v] != usize::MAX {
                ok = false;
                break;
            }
            position[v] = k;
        }
        if !ok {
            out.push(Violation::BadOrder(format!(
                "{:?} is not a permutation of the variables",
                net.order
            )));
        } else {
            for cpt in &net.cpts {
                for &p in &cpt.parents {
                    if position[p] > position[cpt.child] {
                        out.push(Violation::BadOrder(format!(
                            "parent {p} placed after child {}",
                            cpt.child
                        )));
                    }
                }
            }
        }
    }

    ValidationReport { violations: out }
}
