//! The 75 lattices of the classification, the scripted derivation of their
//! verdicts, and the `(rho, d)` chirality grid.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::certificate::{ChiralityVerdict, Verdict};
use crate::discriminant::{class_invariants, ClassInvariants, Parity};
use crate::error::{Error, Result};
use crate::expr::parse_lattice_expr;
use crate::script::{DerivationScript, StepOutcome};

pub const ENTRY_COUNT: usize = 75;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassEntry {
    pub invariants: ClassInvariants,
    pub lattice_expr: String,
    pub verdict: ChiralityVerdict,
}

impl ClassEntry {
    pub fn status(&self) -> Verdict {
        self.verdict.status
    }
}

const EVEN_TABLE: [(usize, usize, &str); 16] = [
    (4, 0, "U+A2"),
    (4, 2, "U(2)+A2"),
    (8, 2, "U+A2+D4"),
    (8, 4, "U(2)+A2+D4"),
    (8, 6, "U+E6(2)"),
    (8, 8, "U(2)+E6(2)"),
    (12, 0, "U+A2+E8"),
    (12, 2, "U(2)+A2+E8"),
    (12, 4, "U+A2+2D4"),
    (12, 6, "U(2)+A2+2D4"),
    (12, 8, "U+A2+E8(2)"),
    (12, 10, "U(2)+A2+E8(2)"),
    (16, 2, "U+A2+D4+E8"),
    (16, 4, "U(2)+A2+D4+E8"),
    (20, 0, "U+A2+2E8"),
    (20, 2, "U(2)+A2+2E8"),
];

/// Odd rows: `(rho - d, prefix, d - t, smallest t, largest t)`. The entry
/// is `prefix + tA1`.
const ODD_ROWS: [(usize, &str, usize, usize, usize); 11] = [
    (0, "-A1+<6>", 2, 0, 9),
    (2, "-A1+A2", 1, 0, 9),
    (4, "U+A2", 0, 1, 9),
    (6, "U+A2+D4", 2, 1, 6),
    (8, "-A1+<6>+E8", 2, 0, 5),
    (10, "-A1+A2+E8", 1, 0, 5),
    (12, "U+A2+E8", 0, 1, 5),
    (14, "U+A2+D4+E8", 2, 1, 2),
    (16, "-A1+<6>+2E8", 2, 0, 1),
    (18, "-A1+A2+2E8", 1, 0, 1),
    (20, "U+A2+2E8", 0, 1, 1),
];

fn with_a1(prefix: &str, t: usize) -> String {
    match t {
        0 => prefix.to_string(),
        1 => format!("{prefix}+A1"),
        _ => format!("{prefix}+{t}A1"),
    }
}

fn checked_entry(expr: &str, expected: ClassInvariants) -> Result<ClassEntry> {
    let e = parse_lattice_expr(expr)?;
    let got = class_invariants(&e.to_lattice()?)?;
    if got != expected {
        return Err(Error::Verification(format!("{expr} has invariants {got}, listed at {expected}")));
    }
    Ok(ClassEntry { invariants: got, lattice_expr: e.to_string(), verdict: ChiralityVerdict::unknown() })
}

/// Lattices with even discriminant form.
pub fn even_table() -> Result<Vec<ClassEntry>> {
    EVEN_TABLE
        .iter()
        .map(|&(rho, d, expr)| checked_entry(expr, ClassInvariants { rho, d, parity: Parity::Even }))
        .collect()
}

/// Lattices with odd discriminant form.
pub fn odd_table() -> Result<Vec<ClassEntry>> {
    let mut out = Vec::new();
    for &(diff, prefix, offset, lo, hi) in &ODD_ROWS {
        for t in lo..=hi {
            let d = t + offset;
            out.push(checked_entry(&with_a1(prefix, t), ClassInvariants { rho: d + diff, d, parity: Parity::Odd })?);
        }
    }
    Ok(out)
}

/// Both tables, even first, without verdicts.
pub fn generate_tables() -> Result<Vec<ClassEntry>> {
    let mut all = even_table()?;
    all.extend(odd_table()?);
    if all.len() != ENTRY_COUNT {
        return Err(Error::Verification(format!("{} entries instead of {ENTRY_COUNT}", all.len())));
    }
    let mut seen = HashMap::new();
    for e in &all {
        if let Some(prev) = seen.insert(e.invariants, &e.lattice_expr) {
            return Err(Error::Verification(format!("{prev} and {} share invariants {}", e.lattice_expr, e.invariants)));
        }
    }
    Ok(all)
}

/// Index of the entry with the given expression, compared after parsing.
pub fn find_entry(entries: &[ClassEntry], expr: &str) -> Option<usize> {
    let e = parse_lattice_expr(expr).ok()?.to_string();
    entries.iter().position(|x| x.lattice_expr == e)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub chiral: usize,
    pub achiral: usize,
    pub unknown: usize,
    pub pure_classes: usize,
}

impl Summary {
    pub fn of(entries: &[ClassEntry]) -> Self {
        let count = |v| entries.iter().filter(|e| e.status() == v).count();
        let chiral = count(Verdict::Chiral);
        Summary { chiral, achiral: count(Verdict::Achiral), unknown: count(Verdict::Unknown), pure_classes: entries.len() + chiral }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StepReport {
    pub line: usize,
    pub kind: String,
    pub lattice: String,
    pub outcome: String,
    pub millis: u128,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Classification {
    pub entries: Vec<ClassEntry>,
    pub steps: Vec<StepReport>,
    pub summary: Summary,
}

impl Classification {
    pub fn failures(&self) -> impl Iterator<Item = &StepReport> {
        self.steps.iter().filter(|s| s.outcome != "ok")
    }
}

/// Runs the script and attaches each produced certificate to its table
/// entry. Failing steps leave their entries unknown.
pub fn run_classification(script: &DerivationScript) -> Result<Classification> {
    let mut entries = generate_tables()?;
    for s in &script.steps {
        if find_entry(&entries, &s.lattice).is_none() {
            return Err(Error::Script { line: s.line, msg: format!("{} is not a table lattice", s.lattice) });
        }
    }
    let outcomes = script.execute();
    let mut steps = Vec::new();
    for (s, out) in script.steps.iter().zip(outcomes) {
        let (outcome, millis) = match out {
            StepOutcome::Certified { certificate, millis } => {
                let i = find_entry(&entries, &s.lattice).expect("checked above");
                if entries[i].status() != Verdict::Unknown {
                    return Err(Error::Script { line: s.line, msg: format!("{} already has a verdict", s.lattice) });
                }
                entries[i].verdict = ChiralityVerdict::from_certificate(certificate);
                ("ok".to_string(), millis)
            }
            StepOutcome::Checked { millis } => ("ok".to_string(), millis),
            StepOutcome::Failed { error, millis } => (error, millis),
        };
        steps.push(StepReport { line: s.line, kind: s.kind.as_str().to_string(), lattice: s.lattice.clone(), outcome, millis });
    }
    let summary = Summary::of(&entries);
    Ok(Classification { entries, steps, summary })
}

/// Re-verifies every attached certificate from scratch.
pub fn verify_all(entries: &[ClassEntry]) -> Result<()> {
    for e in entries {
        for c in &e.verdict.certificates {
            let v = c.verify()?;
            if v != e.status() {
                return Err(Error::Verification(format!("{} certificate proves {v}, entry says {}", e.lattice_expr, e.status())));
            }
            if parse_lattice_expr(&c.lattice)?.to_string() != e.lattice_expr {
                return Err(Error::Verification(format!("certificate for {} attached to {}", c.lattice, e.lattice_expr)));
            }
        }
    }
    Ok(())
}

pub const GRID_MAX_D: usize = 11;
pub const GRID_RHO: std::ops::RangeInclusive<usize> = 2..=22;

fn mark(v: Verdict, parity: Parity) -> Result<&'static str> {
    Ok(match (v, parity) {
        (Verdict::Chiral, Parity::Odd) => "c",
        (Verdict::Achiral, Parity::Odd) => "a",
        (Verdict::Chiral, Parity::Even) => "𝐜",
        (Verdict::Achiral, Parity::Even) => "𝐚",
        (Verdict::Unknown, _) => return Err(Error::Precondition("unresolved verdict".into())),
    })
}

/// Cell text at `(rho, d)`: the odd mark, the even one bold, the even one in
/// brackets when both exist. Empty when no class has these invariants.
pub fn cell(entries: &[ClassEntry], rho: usize, d: usize) -> Result<String> {
    let find = |p| entries.iter().find(|e| e.invariants.rho == rho && e.invariants.d == d && e.invariants.parity == p);
    Ok(match (find(Parity::Odd), find(Parity::Even)) {
        (Some(o), Some(e)) => format!("{}({})", mark(o.status(), Parity::Odd)?, mark(e.status(), Parity::Even)?),
        (Some(o), None) => mark(o.status(), Parity::Odd)?.to_string(),
        (None, Some(e)) => mark(e.status(), Parity::Even)?.to_string(),
        (None, None) => String::new(),
    })
}

/// Rows from `d = 11` down to `d = 0`, each with the cells for
/// `rho = 2..=22`.
pub fn table1_grid(entries: &[ClassEntry]) -> Result<Vec<(usize, Vec<String>)>> {
    (0..=GRID_MAX_D)
        .rev()
        .map(|d| Ok((d, GRID_RHO.map(|rho| cell(entries, rho, d)).collect::<Result<Vec<_>>>()?)))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableFormat {
    Text,
    Markdown,
    Json,
}

pub fn emit_table1(entries: &[ClassEntry], format: TableFormat) -> Result<String> {
    let grid = table1_grid(entries)?;
    let mut out = String::new();
    match format {
        TableFormat::Text => {
            for (d, cells) in &grid {
                let _ = write!(out, "{d:>3} |");
                for c in cells {
                    let _ = write!(out, "{c:^6}");
                }
                out.push('\n');
            }
            let _ = write!(out, "    +{}\n     ", "-".repeat(6 * cells_len()));
            for rho in GRID_RHO {
                let _ = write!(out, "{rho:^6}");
            }
            out.push_str("  rho\n");
        }
        TableFormat::Markdown => {
            out.push_str("| d \\ rho |");
            for rho in GRID_RHO {
                let _ = write!(out, " {rho} |");
            }
            out.push_str("\n|---|");
            out.push_str(&"---|".repeat(cells_len()));
            out.push('\n');
            for (d, cells) in &grid {
                let _ = write!(out, "| **{d}** |");
                for c in cells {
                    let _ = write!(out, " {c} |");
                }
                out.push('\n');
            }
        }
        TableFormat::Json => {
            let cells: Vec<serde_json::Value> = grid
                .iter()
                .flat_map(|(d, cells)| {
                    GRID_RHO.zip(cells).filter(|(_, c)| !c.is_empty()).map(move |(rho, c)| {
                        serde_json::json!({ "rho": rho, "d": d, "mark": c })
                    })
                })
                .collect();
            out = serde_json::to_string_pretty(&serde_json::json!({
                "cells": cells,
                "summary": Summary::of(entries),
            }))?;
        }
    }
    Ok(out)
}

fn cells_len() -> usize {
    GRID_RHO.count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables_have_listed_invariants() {
        let all = generate_tables().unwrap();
        assert_eq!(all.len(), 75);
        assert_eq!(all.iter().filter(|e| e.invariants.parity == Parity::Even).count(), 16);
        let top = all.iter().find(|e| e.invariants == ClassInvariants { rho: 12, d: 10, parity: Parity::Even }).unwrap();
        assert_eq!(top.lattice_expr, "U(2)+A2+E8(2)");
        assert_eq!(find_entry(&all, "-A1+<6>+3*A1"), find_entry(&all, "−A₁+⟨6⟩+3A₁"));
        assert!(find_entry(&all, "U+A2+3E8").is_none());
    }

    #[test]
    fn unresolved_cells_are_rejected() {
        let all = generate_tables().unwrap();
        assert!(emit_table1(&all, TableFormat::Text).is_err());
        assert_eq!(cell(&all, 3, 11).unwrap(), "");
    }
}
