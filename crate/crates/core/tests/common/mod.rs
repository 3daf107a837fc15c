//! Shared fixtures: printed root tables, and checks used by both the
//! focused integration tests and the acceptance report.
#![allow(dead_code)]

pub mod props;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use lattice_chirality::certificate::{Certificate, Verdict};
use lattice_chirality::coxeter::FiniteVolumeReport;
use lattice_chirality::lattice::BlockKind;
use lattice_chirality::linalg::{int, Int, Rat};
use lattice_chirality::roots::{is_root, level_of, run_vinberg, RootConfig, RootSequence, RunStatus};
use lattice_chirality::script::{DerivationScript, StepOutcome};
use lattice_chirality::Lattice;
use num_traits::{ToPrimitive, Zero};

pub struct FigureRow {
    pub name: &'static str,
    pub level: i64,
    /// Block parts separated by `|`: integer coordinates for `U`, `A_n` and
    /// `<k>`; sums of generators `d2-d3` and coweights `-3e8*` for `D_n`,
    /// `E_n`.
    pub coords: &'static str,
}

pub struct Figure {
    pub lattice: &'static str,
    pub squares: &'static [i64],
    pub max_level: i64,
    /// `Some(true)` when the printed list is the whole wall system, `None`
    /// when only the printed part is compared.
    pub complete: Option<bool>,
    /// Compare all roots up to `max_level` exactly instead of checking that
    /// the printed rows occur.
    pub exact: bool,
    /// Blocks whose simple roots are level-0 walls left out of the table.
    pub implicit_blocks: &'static [usize],
    pub rows: &'static [FigureRow],
}

macro_rules! rows {
    ($(($n:expr, $l:expr, $c:expr)),* $(,)?) => {
        &[$(FigureRow { name: $n, level: $l, coords: $c }),*]
    };
}

pub const FIGURES: &[Figure] = &[
    Figure {
        lattice: "U(2)+A2",
        squares: &[2, 6],
        max_level: 400,
        complete: Some(true),
        exact: true,
        implicit_blocks: &[],
        rows: rows![("v1", 0, "0,0|0,1"), ("v2", 0, "0,0|1,-1"), ("v3", 4, "0,-1|-1,-1"), ("v4", 4, "1,0|-1,-1")],
    },
    Figure {
        lattice: "U+A2+D4",
        squares: &[2, 6],
        max_level: 400,
        complete: Some(true),
        exact: true,
        implicit_blocks: &[2],
        rows: rows![
            ("v1", 0, "1,1|0,0|0"),
            ("v2", 0, "0,0|0,1|0"),
            ("v3", 0, "0,0|1,-1|0"),
            ("v4", 1, "0,-1|-1,-1|0"),
            ("v5", 1, "0,-1|0,0|-d1*"),
        ],
    },
    Figure {
        lattice: "U(2)+A2+E8",
        squares: &[2, 6],
        max_level: 48,
        complete: None,
        exact: true,
        implicit_blocks: &[2],
        rows: rows![
            ("v1", 0, "0,0|0,1|0"),
            ("v2", 0, "0,0|1,-1|0"),
            ("v3", 4, "0,-1|-1,-1|0"),
            ("v4", 4, "1,0|-1,-1|0"),
            ("v5", 4, "0,-1|0,0|-e8*"),
            ("v6", 4, "1,0|0,0|-e8*"),
            ("v7", 16, "1,-1|-1,-1|-e1*"),
            ("v8", 48, "3,-3|-4,-2|-3e8*"),
        ],
    },
    Figure {
        lattice: "U(2)+A2+D4",
        squares: &[2, 6],
        max_level: 48,
        complete: None,
        exact: true,
        implicit_blocks: &[2],
        rows: rows![
            ("v1", 0, "0,0|0,1|0"),
            ("v2", 0, "0,0|1,-1|0"),
            ("v3", 4, "0,-1|-1,-1|0"),
            ("v4", 4, "1,0|-1,-1|0"),
            ("v5", 4, "0,-1|0,0|-d1*"),
            ("v6", 4, "1,0|0,0|-d1*"),
            ("v7^2", 16, "1,-1|-1,-1|-2d2*"),
            ("v7^3", 16, "1,-1|-1,-1|-2d3*"),
            ("v7^4", 16, "1,-1|-1,-1|-2d4*"),
            ("v8", 48, "3,-3|-4,-2|-3d1*"),
        ],
    },
    Figure {
        lattice: "U+A2+2E8",
        squares: &[2, 6],
        max_level: 48,
        complete: None,
        exact: false,
        implicit_blocks: &[2, 3],
        rows: rows![
            ("v1", 0, "1,1|0,0|0|0"),
            ("v2", 0, "0,0|0,1|0|0"),
            ("v3", 0, "0,0|1,-1|0|0"),
            ("v4", 1, "0,-1|-1,-1|0|0"),
            ("v5", 1, "0,-1|0,0|-e8*|0"),
            ("v5'", 1, "0,-1|0,0|0|-e8*"),
            ("v6", 16, "2,-2|-1,-1|-e1*|-e1*"),
            ("v7", 36, "3,-3|-2,-1|-e7*|-e2*"),
            ("v7'", 36, "3,-3|-2,-1|-e2*|-e7*"),
            ("v8", 48, "6,-6|-4,-2|-3e8*|-3e1*"),
            ("v8'", 48, "6,-6|-4,-2|-3e1*|-3e8*"),
        ],
    },
    Figure {
        lattice: "U+A2+A1+E8",
        squares: &[2, 6],
        max_level: 48,
        complete: None,
        exact: true,
        implicit_blocks: &[3],
        rows: rows![
            ("v1", 0, "1,1|0,0|0|0"),
            ("v2", 0, "0,0|0,1|0|0"),
            ("v3", 0, "0,0|1,-1|0|0"),
            ("v4", 0, "0,0|0,0|1|0"),
            ("v5", 1, "0,-1|-1,-1|0|0"),
            ("v6", 1, "0,-1|0,0|-1|0"),
            ("v7", 1, "0,-1|0,0|0|-e8*"),
            ("v8", 48, "6,-6|-4,-2|-3|-3e1*"),
        ],
    },
    Figure {
        lattice: "-A1+<6>+A1",
        squares: &[2, 6],
        max_level: 400,
        complete: Some(true),
        exact: true,
        implicit_blocks: &[],
        rows: rows![("v1", 0, "0|1|0"), ("v2", 0, "0|0|1"), ("v3", 12, "3|-1|-3"), ("v4", 12, "3|-2|0")],
    },
    Figure {
        lattice: "-A1+<6>+2A1",
        squares: &[2, 6],
        max_level: 16,
        complete: None,
        exact: true,
        implicit_blocks: &[],
        rows: rows![
            ("v1", 0, "0|1|0|0"),
            ("v2", 0, "0|0|1|0"),
            ("v3", 0, "0|0|0|1"),
            ("v4", 4, "1|0|-1|-1"),
            ("v5", 12, "3|-1|-3|0"),
            ("v6", 12, "3|-1|0|-3"),
            ("v7", 12, "3|-2|0|0"),
            ("v8", 16, "2|-1|-1|-1"),
        ],
    },
    Figure {
        lattice: "U+A2+A1+D4",
        squares: &[2, 6],
        max_level: 400,
        complete: Some(true),
        exact: true,
        implicit_blocks: &[3],
        rows: rows![
            ("v1", 0, "1,1|0,0|0|0"),
            ("v2", 0, "0,0|0,1|0|0"),
            ("v3", 0, "0,0|1,-1|0|0"),
            ("v4", 0, "0,0|0,0|1|0"),
            ("v5", 1, "0,-1|-1,-1|0|0"),
            ("v6", 1, "0,-1|0,0|-1|0"),
            ("v7", 1, "0,-1|0,0|0|-d1*"),
            ("v8", 48, "6,-6|-4,-2|-3|-6d2*"),
            ("v9", 48, "6,-6|-4,-2|-3|-6d3*"),
            ("v10", 48, "6,-6|-4,-2|-3|-6d4*"),
        ],
    },
    Figure {
        lattice: "-A1+<6>+E8",
        squares: &[2, 6],
        max_level: 400,
        complete: Some(true),
        exact: true,
        implicit_blocks: &[2],
        rows: rows![
            ("v1", 0, "0|1|0"),
            ("v2", 4, "1|0|-e1*"),
            ("v3", 12, "3|-1|-3e8*"),
            ("v4", 12, "3|-2|0"),
            ("v5", 16, "2|-1|-e1*"),
        ],
    },
    Figure {
        lattice: "-A1+A2+A1+D4",
        squares: &[2, 4, 6],
        max_level: 400,
        complete: Some(true),
        exact: true,
        implicit_blocks: &[],
        rows: rows![
            ("v1", 0, "0|0,1|0|0"),
            ("v2", 0, "0|1,-1|0|0"),
            ("v3", 0, "0|0,0|1|0"),
            ("d1", 0, "0|0,0|0|d1"),
            ("f2", 0, "0|0,0|0|d2-d3"),
            ("f3", 0, "0|0,0|0|d3-d4"),
            ("d4", 0, "0|0,0|0|d4"),
            ("v4", 2, "1|0,0|-1|-2d2*"),
            ("v5", 4, "1|-1,-1|-1|0"),
            ("v6", 4, "1|-1,-1|0|-d1*"),
            ("v7", 12, "3|-4,-2|0|0"),
        ],
    },
    Figure {
        lattice: "-A1+A2+4A1",
        squares: &[2, 4, 6],
        max_level: 400,
        complete: Some(true),
        exact: true,
        implicit_blocks: &[],
        rows: rows![
            ("v1", 0, "0|0,1|0|0|0|0"),
            ("v2", 0, "0|1,-1|0|0|0|0"),
            ("v3", 0, "0|0,0|1|-1|0|0"),
            ("v4", 0, "0|0,0|0|1|-1|0"),
            ("v5", 0, "0|0,0|0|0|1|-1"),
            ("v6", 0, "0|0,0|0|0|0|1"),
            ("v7", 2, "1|0,0|-1|-1|-1|0"),
            ("v8", 4, "1|-1,-1|-1|0|0|0"),
            ("v9", 12, "3|-4,-2|0|0|0|0"),
            ("v10", 108, "9|-8,-4|-3|-3|-3|-3"),
        ],
    },
];

/// Parses one `D`/`E` block entry such as `-3e8*`, `d2-d3` or `0` into
/// block-local rational coordinates.
fn parse_combination(l: &Lattice, block: usize, text: &str) -> Result<Vec<Rat>, String> {
    let b = &l.blocks()[block];
    let mut out = vec![Rat::zero(); l.rank()];
    let t = text.replace(' ', "");
    if t == "0" {
        return Ok(out);
    }
    let mut rest = t.as_str();
    while !rest.is_empty() {
        let sign = if let Some(r) = rest.strip_prefix('-') {
            rest = r;
            -1
        } else {
            rest = rest.strip_prefix('+').unwrap_or(rest);
            1
        };
        let digits: String = rest.chars().take_while(|c| c.is_ascii_digit()).collect();
        rest = &rest[digits.len()..];
        let coef = if digits.is_empty() { 1 } else { digits.parse::<i64>().map_err(|e| e.to_string())? } * sign;
        let letter = rest.chars().next().ok_or_else(|| format!("dangling coefficient in `{text}`"))?;
        rest = &rest[1..];
        let idx: String = rest.chars().take_while(|c| c.is_ascii_digit()).collect();
        rest = &rest[idx.len()..];
        let name = format!("{letter}{idx}");
        let dual = rest.starts_with('*');
        if dual {
            rest = &rest[1..];
        }
        let v: Vec<Rat> = if dual {
            l.weight_vector(block, &name).map_err(|e| e.to_string())?
        } else {
            let k: usize = idx.parse().map_err(|_| format!("bad generator `{name}`"))?;
            let mut e = vec![Rat::zero(); l.rank()];
            e[b.offset + k - 1] = Rat::from_integer(int(1));
            e
        };
        for (o, x) in out.iter_mut().zip(v) {
            *o += x * Rat::from_integer(int(coef));
        }
    }
    Ok(out)
}

pub fn row_vector(l: &Lattice, coords: &str) -> Result<Vec<Int>, String> {
    let parts: Vec<&str> = coords.split('|').map(str::trim).collect();
    if parts.len() != l.blocks().len() {
        return Err(format!("`{coords}` has {} parts for {} blocks", parts.len(), l.blocks().len()));
    }
    let mut v = vec![Rat::zero(); l.rank()];
    for (bi, (b, part)) in l.blocks().iter().zip(&parts).enumerate() {
        match b.kind {
            BlockKind::D(_) | BlockKind::E(_) => {
                for (o, x) in v.iter_mut().zip(parse_combination(l, bi, part)?) {
                    *o += x;
                }
            }
            _ => {
                let xs: Vec<i64> =
                    part.split(',').map(|s| s.trim().parse::<i64>()).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
                if xs.len() != b.rank() {
                    return Err(format!("part `{part}` has {} entries for a rank {} block", xs.len(), b.rank()));
                }
                for (k, x) in xs.into_iter().enumerate() {
                    v[b.offset + k] = Rat::from_integer(int(x));
                }
            }
        }
    }
    v.into_iter()
        .map(|x| if x.is_integer() { Ok(x.to_integer()) } else { Err(format!("`{coords}` is not integral")) })
        .collect()
}

/// Rows of a figure with the implicit block roots added at level 0.
pub fn figure_rows(l: &Lattice, f: &Figure) -> Result<Vec<(String, i64, Vec<Int>)>, String> {
    let mut out: Vec<(String, i64, Vec<Int>)> = f
        .rows
        .iter()
        .map(|r| Ok((r.name.to_string(), r.level, row_vector(l, r.coords)?)))
        .collect::<Result<_, String>>()?;
    for &bi in f.implicit_blocks {
        let b = &l.blocks()[bi];
        for i in b.range() {
            out.push((l.labels()[i].clone(), 0, l.basis_vector(i)));
        }
    }
    Ok(out)
}

pub fn run_figure(l: &Lattice, f: &Figure) -> Result<RootSequence, String> {
    let c = RootConfig::new(l).map_err(|e| e.to_string())?.with_squares(f.squares).with_max_level(f.max_level);
    run_vinberg(l, &c).map_err(|e| e.to_string())
}

/// Level oracle: every printed row is a root whose level formula gives the
/// printed level.
pub fn check_levels(f: &Figure) -> Result<usize, String> {
    let l = Lattice::from_expr(f.lattice).map_err(|e| e.to_string())?;
    let p = RootConfig::new(&l).map_err(|e| e.to_string())?.base_point;
    let rows = figure_rows(&l, f)?;
    for (name, level, v) in &rows {
        if is_root(&l, v, f.squares).is_none() {
            return Err(format!("{}: {name} is not a root", f.lattice));
        }
        let got = level_of(&l, &p, v);
        if got != Rat::from_integer(int(*level)) {
            return Err(format!("{}: {name} has level {got}, printed {level}", f.lattice));
        }
    }
    Ok(rows.len())
}

pub struct FigureCheck {
    pub roots: usize,
    pub elapsed: Duration,
    pub sequence: RootSequence,
}

/// Root-table reproduction: roots by level equal the printed ones (or
/// contain them for partial tables), and completeness where printed.
pub fn check_figure(f: &Figure) -> Result<FigureCheck, String> {
    let start = Instant::now();
    let l = Lattice::from_expr(f.lattice).map_err(|e| e.to_string())?;
    let seq = run_figure(&l, f)?;
    let elapsed = start.elapsed();
    let expected = figure_rows(&l, f)?;
    let mut want: BTreeMap<i64, Vec<Vec<Int>>> = BTreeMap::new();
    for (_, level, v) in &expected {
        want.entry(*level).or_default().push(v.clone());
    }
    let mut got: BTreeMap<i64, Vec<Vec<Int>>> = BTreeMap::new();
    for r in &seq.roots {
        let lv = r.level.to_integer().to_i64().ok_or("level overflow")?;
        if r.level.is_integer() {
            got.entry(lv).or_default().push(r.vector.clone());
        } else {
            return Err(format!("{}: non-integral level {}", f.lattice, r.level));
        }
    }
    for (lv, vs) in &want {
        let have = got.get(lv).cloned().unwrap_or_default();
        for v in vs {
            if !have.contains(v) {
                return Err(format!("{}: printed root {v:?} missing at level {lv}", f.lattice));
            }
        }
        if f.exact && have.len() != vs.len() {
            return Err(format!("{}: {} roots at level {lv}, printed {}", f.lattice, have.len(), vs.len()));
        }
    }
    if f.exact {
        if let Some(lv) = got.keys().find(|k| !want.contains_key(k)) {
            return Err(format!("{}: unprinted roots at level {lv}", f.lattice));
        }
    }
    if f.complete == Some(true) && seq.status != RunStatus::Complete {
        return Err(format!("{}: run ended {}", f.lattice, seq.status));
    }
    Ok(FigureCheck { roots: seq.roots.len(), elapsed, sequence: seq })
}

/// Printed finite-volume witnesses for `U+A2+A1+D4`: parabolic components
/// with the types that complete them, and Lanner pairs with their elliptic
/// complements.
pub const PARABOLIC_TABLE: &[(&[&str], &str, &str)] = &[
    (&["v2", "v3", "v5"], "~G2", "~D4+~A1"),
    (&["d1", "d2", "d3", "d4", "v7"], "~D4", "~G2+~A1"),
    (&["v4", "v6"], "~A1", "~G2+~D4"),
    (&["d1", "d2", "d3", "v1", "v7", "v5", "v6"], "~D6", "~A1"),
    (&["v3", "v10"], "~A1", "~D6"),
];

pub const LANNER_TABLE: &[(&[&str], &[&str], &str)] = &[
    (&["d2", "v8"], &["d3", "d4", "v1", "v6", "v7", "v5", "v2"], "2A1+D5"),
    (&["v4", "v8"], &["d1", "d3", "d4", "v7", "v1", "v5", "v2"], "D7"),
    (&["v9", "v10"], &["d1", "d2", "v7", "v1", "v6", "v5", "v2"], "E7"),
];

fn type_multiset(t: &str) -> Vec<String> {
    let mut out = Vec::new();
    for part in t.split('+') {
        let tilde = part.starts_with('~');
        let body = part.trim_start_matches('~');
        let digits: String = body.chars().take_while(|c| c.is_ascii_digit()).collect();
        let n: usize = if digits.is_empty() { 1 } else { digits.parse().unwrap() };
        let name = format!("{}{}", if tilde { "~" } else { "" }, &body[digits.len()..]);
        out.extend(std::iter::repeat(name).take(n));
    }
    out.sort();
    out
}

fn sorted(v: &[&str]) -> Vec<String> {
    let mut s: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    s.sort();
    s
}

pub fn check_witness_tables(report: &FiniteVolumeReport) -> Result<(), String> {
    for (set, ty, comp) in PARABOLIC_TABLE {
        let want = sorted(set);
        let w = report
            .parabolic
            .iter()
            .find(|w| sorted(&w.component.iter().map(String::as_str).collect::<Vec<_>>()) == want)
            .ok_or_else(|| format!("parabolic {want:?} not reported"))?;
        if type_multiset(&w.component_type) != type_multiset(ty) {
            return Err(format!("{want:?} has type {}, printed {ty}", w.component_type));
        }
        let mut full = type_multiset(ty);
        full.extend(type_multiset(comp));
        full.sort();
        let got = w.completion_type.as_deref().map(type_multiset).unwrap_or_default();
        if got != full {
            return Err(format!("{want:?} completes to {:?}, printed {ty}+{comp}", w.completion_type));
        }
    }
    for (s, t, ty) in LANNER_TABLE {
        let want = sorted(s);
        let w = report
            .lanner
            .iter()
            .find(|w| sorted(&w.diagram.iter().map(String::as_str).collect::<Vec<_>>()) == want)
            .ok_or_else(|| format!("Lanner diagram {want:?} not reported"))?;
        let comp = w.complement.clone().ok_or_else(|| format!("{want:?} has no complement"))?;
        let mut comp_sorted = comp.clone();
        comp_sorted.sort();
        if comp_sorted != sorted(t) {
            return Err(format!("{want:?} complement {comp:?}, printed {t:?}"));
        }
        if w.complement_type.as_deref().map(type_multiset) != Some(type_multiset(ty)) {
            return Err(format!("{want:?} complement type {:?}, printed {ty}", w.complement_type));
        }
    }
    let printed: Vec<(Vec<String>, Vec<String>)> = PARABOLIC_TABLE
        .iter()
        .map(|(_, ty, comp)| {
            let mut full = type_multiset(ty);
            full.extend(type_multiset(comp));
            full.sort();
            (type_multiset(ty), full)
        })
        .collect();
    for w in &report.parabolic {
        let key = (type_multiset(&w.component_type), w.completion_type.as_deref().map(type_multiset).unwrap_or_default());
        if !printed.contains(&key) {
            return Err(format!("reported parabolic {:?} of type {} is not of a printed kind", w.component, w.component_type));
        }
    }
    let printed: Vec<Vec<String>> = LANNER_TABLE.iter().map(|(_, _, ty)| type_multiset(ty)).collect();
    for w in &report.lanner {
        if !w.complement_type.as_deref().map(type_multiset).is_some_and(|t| printed.contains(&t)) {
            return Err(format!("reported Lanner pair {:?} has complement {:?}", w.diagram, w.complement_type));
        }
    }
    Ok(())
}

/// Lattices with an expected verdict, checked through the shipped
/// derivation chain.
pub const VERDICT_CASES: &[(&str, Verdict)] = &[
    ("U+A2", Verdict::Chiral),
    ("U+A2+E8", Verdict::Chiral),
    ("U(2)+A2", Verdict::Chiral),
    ("U+A2+D4", Verdict::Chiral),
    ("-A1+<6>", Verdict::Chiral),
    ("-A1+<6>+A1", Verdict::Chiral),
    ("-A1+<6>+E8", Verdict::Chiral),
    ("-A1+A2+4A1", Verdict::Chiral),
    ("U+A2+4A1", Verdict::Chiral),
    ("U(2)+A2+E8", Verdict::Achiral),
    ("U(2)+A2+D4", Verdict::Achiral),
    ("U(2)+E6(2)", Verdict::Achiral),
    ("-A1+<6>+2A1", Verdict::Achiral),
    ("U+A2+2E8", Verdict::Achiral),
    ("U+A2+E8+A1", Verdict::Achiral),
];

/// Runs the steps needed for `lattice` and returns its certificate.
pub fn certify(lattice: &str) -> Result<Certificate, String> {
    let script = DerivationScript::builtin().map_err(|e| e.to_string())?;
    let chain = script.chain_for(lattice).ok_or_else(|| format!("no derivation for {lattice}"))?;
    let outcomes = chain.execute();
    let last = chain.steps.len() - 1;
    for (i, out) in outcomes.into_iter().enumerate() {
        match out {
            StepOutcome::Failed { error, .. } => return Err(format!("line {}: {error}", chain.steps[i].line)),
            StepOutcome::Certified { certificate, .. } if i == last => return Ok(certificate),
            _ => {}
        }
    }
    Err(format!("chain for {lattice} produced no certificate"))
}

/// Certificate for a case, re-verified, with its verdict checked.
pub fn check_verdict(lattice: &str, expected: Verdict) -> Result<(Certificate, Duration), String> {
    let start = Instant::now();
    let c = certify(lattice)?;
    let v = c.verify().map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    if v != expected || c.verdict != expected {
        return Err(format!("{lattice}: derived {v}, expected {expected}"));
    }
    Ok((c, elapsed))
}

/// The printed `(rho, d)` grid, rows from `d = 11` down to `0`; `C` and `A`
/// stand for bold marks.
pub const TABLE1_ROWS: &[(usize, &str)] = &[
    (11, "11:a"),
    (10, "10:a 12:a(A)"),
    (9, "9:a 11:a 13:a"),
    (8, "8:a(A) 10:a 12:a(A) 14:a"),
    (7, "7:a 9:a 11:a 13:a 15:a"),
    (6, "6:a 8:a(A) 10:a 12:a(A) 14:a 16:a"),
    (5, "5:a 7:c 9:a 11:a 13:a 15:a 17:a"),
    (4, "4:a 6:c 8:c(A) 10:a 12:a(A) 14:a 16:a(A) 18:a"),
    (3, "3:c 5:c 7:c 9:c 11:a 13:a 15:a 17:a 19:a"),
    (2, "2:c 4:c(C) 6:c 8:C 10:c 12:a(A) 14:a 16:A 18:a 20:a(A)"),
    (1, "3:c 5:c 11:c 13:a 19:a 21:a"),
    (0, "4:C 12:C 20:A"),
];

/// Printed cell at `(rho, d)` in the emitted alphabet.
pub fn printed_cell(rho: usize, d: usize) -> String {
    let row = TABLE1_ROWS.iter().find(|(r, _)| *r == d).map(|(_, s)| *s).unwrap_or("");
    row.split_whitespace()
        .find_map(|c| {
            let (r, m) = c.split_once(':')?;
            (r.parse::<usize>().ok()? == rho).then(|| m.replace('C', "𝐜").replace('A', "𝐚"))
        })
        .unwrap_or_default()
}
