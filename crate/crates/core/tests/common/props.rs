//! Invariant checks over automorphisms, chambers, discriminant forms and
//! certificates.

use std::sync::OnceLock;

use lattice_chirality::certificate::{Certificate, Evidence};
use lattice_chirality::chirality::{block_sign_flip, delta3_by_six_root, induced_automorphism, LatticeAutomorphism, ThreeCharacter};
use lattice_chirality::coxeter::graph_symmetries;
use lattice_chirality::discriminant::{mod_rat, DiscriminantGroup};
use lattice_chirality::linalg::{det, int, int_vec, mat_mul, transpose, Int, Rat};
use lattice_chirality::roots::{run_vinberg, RootConfig};
use lattice_chirality::tables::ClassEntry;
use lattice_chirality::Lattice;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use super::{certify, run_figure, FIGURES};

pub struct Family {
    pub name: &'static str,
    pub lattice: Lattice,
    pub character: ThreeCharacter,
    pub gens: Vec<LatticeAutomorphism>,
    pub six_roots: Vec<Vec<Int>>,
}

fn is_six_root(l: &Lattice, v: &[Int]) -> bool {
    let three = int(3);
    l.norm(v) == int(6) && v.iter().any(|x| !(x % &three).is_zero())
}

/// Reflections in the walls of each figure lattice, the automorphisms
/// induced by its graph symmetries, and the block sign flip.
pub fn families() -> &'static [Family] {
    static CELL: OnceLock<Vec<Family>> = OnceLock::new();
    CELL.get_or_init(|| {
        FIGURES
            .iter()
            .map(|f| {
                let l = Lattice::from_expr(f.lattice).unwrap();
                let seq = run_figure(&l, f).unwrap();
                let vecs = seq.vectors();
                let mut gens: Vec<LatticeAutomorphism> =
                    vecs.iter().filter_map(|v| LatticeAutomorphism::reflection(&l, v).ok()).collect();
                let g = seq.graph(&l).unwrap();
                if let Ok(syms) = graph_symmetries(&g, 64) {
                    gens.extend(
                        syms.iter().skip(1).take(48).filter_map(|s| induced_automorphism(&l, &vecs, s).ok().flatten()),
                    );
                }
                gens.push(block_sign_flip(&l).unwrap());
                let six_roots = vecs.iter().filter(|v| is_six_root(&l, v)).cloned().collect();
                Family { name: f.lattice, character: ThreeCharacter::of(&l).unwrap(), lattice: l, gens, six_roots }
            })
            .collect()
    })
}

pub fn word(f: &Family, idx: &[usize]) -> LatticeAutomorphism {
    idx.iter().fold(LatticeAutomorphism::identity(f.lattice.rank()), |acc, &i| acc.compose(&f.gens[i % f.gens.len()]))
}

pub struct AutomorphismStats {
    pub instances: usize,
    pub six_root_checks: usize,
}

/// Random words in the generators: the form is preserved, the determinant
/// is a unit, and the 6-root sign test agrees with the discriminant action.
pub fn check_automorphisms(instances: usize, seed: u64) -> Result<AutomorphismStats, String> {
    let fams = families();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut six_root_checks = 0;
    for n in 0..instances {
        let f = &fams[n % fams.len()];
        let len = rng.gen_range(1..=6);
        let idx: Vec<usize> = (0..len).map(|_| rng.gen_range(0..f.gens.len())).collect();
        let g = word(f, &idx);
        let m = g.matrix();
        if mat_mul(&mat_mul(&transpose(m), f.lattice.gram()), m) != *f.lattice.gram() {
            return Err(format!("{}: word {idx:?} breaks the form", f.name));
        }
        let d = det(m);
        if !d.abs().is_one() {
            return Err(format!("{}: word {idx:?} has determinant {d}", f.name));
        }
        let sign = f.character.eval(&g).map_err(|e| e.to_string())?;
        for v in &f.six_roots {
            if delta3_by_six_root(&g, v) != Some(sign) {
                return Err(format!("{}: word {idx:?} and 6-root {v:?} disagree", f.name));
            }
            six_root_checks += 1;
        }
    }
    Ok(AutomorphismStats { instances, six_root_checks })
}

pub fn check_multiplicative(samples: usize, seed: u64) -> Result<usize, String> {
    let fams = families();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let f = &fams[rng.gen_range(0..fams.len())];
        let mut pick = || (0..rng.gen_range(1..5)).map(|_| rng.gen_range(0..f.gens.len())).collect::<Vec<_>>();
        let (a, b) = (pick(), pick());
        let (ga, gb) = (word(f, &a), word(f, &b));
        let c = &f.character;
        let lhs = c.eval(&ga.compose(&gb)).map_err(|e| e.to_string())?;
        let rhs = c.eval(&ga).map_err(|e| e.to_string())? * c.eval(&gb).map_err(|e| e.to_string())?;
        if lhs != rhs {
            return Err(format!("{}: delta_3 not multiplicative on {a:?}, {b:?}", f.name));
        }
    }
    Ok(samples)
}

pub fn check_chamber(l: &Lattice, p: &[Int], roots: &[Vec<Int>], what: &str) -> Result<(), String> {
    for (i, v) in roots.iter().enumerate() {
        if l.dot(p, v).is_positive() {
            return Err(format!("{what}: root {i} has the base point on the wrong side"));
        }
        if let Some(w) = roots[i + 1..].iter().find(|w| l.dot(v, w).is_positive()) {
            return Err(format!("{what}: obtuse pair {v:?}, {w:?}"));
        }
    }
    Ok(())
}

/// Chambers of every figure run and of a short run on every table lattice.
pub fn check_chambers(entries: &[ClassEntry]) -> Result<usize, String> {
    let mut n = 0;
    for f in FIGURES {
        let l = Lattice::from_expr(f.lattice).map_err(|e| e.to_string())?;
        let seq = run_figure(&l, f)?;
        check_chamber(&l, &seq.config.base_point, &seq.vectors(), f.lattice)?;
        n += 1;
    }
    for e in entries {
        let l = Lattice::from_expr(&e.lattice_expr).map_err(|e| e.to_string())?;
        let c = RootConfig::new(&l).map_err(|e| e.to_string())?.with_max_level(4).with_volume_check(false);
        let seq = run_vinberg(&l, &c).map_err(|e| e.to_string())?;
        check_chamber(&l, &c.base_point, &seq.vectors(), &e.lattice_expr)?;
        n += 1;
    }
    Ok(n)
}

/// Polarization against every generator at every element; by induction on
/// word length in the generators this covers all pairs.
pub fn check_polarization(entries: &[ClassEntry]) -> Result<usize, String> {
    let two = Rat::from_integer(int(2));
    let mut elements = 0;
    for e in entries {
        let l = Lattice::from_expr(&e.lattice_expr).map_err(|e| e.to_string())?;
        let dg = DiscriminantGroup::of(&l).map_err(|e| e.to_string())?;
        let k = dg.generators.len();
        let units: Vec<Vec<Int>> =
            (0..k).map(|i| (0..k).map(|j| if i == j { Int::one() } else { Int::zero() }).collect()).collect();
        let qu: Vec<Rat> = units.iter().map(|u| dg.q(u)).collect();
        for x in dg.elements().map_err(|e| e.to_string())? {
            let qx = dg.q(&x);
            if !mod_rat(&(dg.b(&x, &x) - &qx), 1).is_zero() {
                return Err(format!("{}: q and b disagree at {x:?}", e.lattice_expr));
            }
            for (i, u) in units.iter().enumerate() {
                let mut sum = x.clone();
                sum[i] += 1;
                let diff = dg.q(&sum) - &qx - &qu[i] - &two * dg.b(&x, u);
                if !mod_rat(&diff, 2).is_zero() {
                    return Err(format!("{}: polarization fails at {x:?} + g{i}", e.lattice_expr));
                }
            }
            elements += 1;
        }
    }
    Ok(elements)
}

/// Each recorded automorphism must be an isometry with the recorded
/// `delta_3`, and the 6-root test must agree on every recorded 6-root.
pub fn check_delta3_records(c: &Certificate, count: &mut usize) -> Result<(), String> {
    let l = Lattice::from_expr(&c.lattice).map_err(|e| e.to_string())?;
    let compare = |roots: &[Vec<Int>], matrix: &[Vec<i64>], d: i8, count: &mut usize| -> Result<(), String> {
        let g = LatticeAutomorphism::from_i64(&l, matrix).map_err(|e| e.to_string())?;
        let m = g.matrix();
        if mat_mul(&mat_mul(&transpose(m), l.gram()), m) != *l.gram() || !det(m).abs().is_one() {
            return Err(format!("{}: recorded matrix is not an isometry", c.lattice));
        }
        let char_sign = ThreeCharacter::of(&l).and_then(|t| t.eval(&g)).map_err(|e| e.to_string())?;
        if char_sign != d {
            return Err(format!("{}: recorded delta_3 {d}, discriminant gives {char_sign}", c.lattice));
        }
        for v in roots.iter().filter(|v| is_six_root(&l, v)) {
            if delta3_by_six_root(&g, v) != Some(d) {
                return Err(format!("{}: 6-root {v:?} gives a different delta_3", c.lattice));
            }
            *count += 1;
        }
        Ok(())
    };
    match &c.evidence {
        Evidence::Symmetry { roots, matrix, delta3, .. } => {
            let vs: Vec<Vec<Int>> = roots.iter().map(|r| int_vec(&r.coords)).collect();
            compare(&vs, matrix, *delta3, count)
        }
        Evidence::Complete { roots, symmetries, .. } | Evidence::ExtendedGroup { roots, symmetries, .. } => {
            let vs: Vec<Vec<Int>> = roots.iter().map(|r| int_vec(&r.coords)).collect();
            for s in symmetries {
                if let (Some(m), Some(d)) = (&s.matrix, s.delta3) {
                    compare(&vs, m, d, count)?;
                }
            }
            Ok(())
        }
        Evidence::Rootless { .. } => Ok(()),
        Evidence::Extension { base: inner, .. } | Evidence::Descent { larger: inner, .. } | Evidence::Reduction { source: inner, .. } => {
            check_delta3_records(inner, count)
        }
    }
}

fn numeric_leaves(v: &Value, keys: &[&str], inside: bool, path: &mut Vec<String>, out: &mut Vec<Vec<String>>) {
    match v {
        Value::Number(_) if inside => out.push(path.clone()),
        Value::Array(xs) => {
            for (i, x) in xs.iter().enumerate() {
                path.push(i.to_string());
                numeric_leaves(x, keys, inside, path, out);
                path.pop();
            }
        }
        Value::Object(m) => {
            for (k, x) in m {
                path.push(k.clone());
                numeric_leaves(x, keys, inside || keys.contains(&k.as_str()), path, out);
                path.pop();
            }
        }
        _ => {}
    }
}

fn leaf<'a>(v: &'a mut Value, path: &[String]) -> &'a mut Value {
    path.iter().fold(v, |node, key| match node {
        Value::Array(xs) => &mut xs[key.parse::<usize>().unwrap()],
        Value::Object(m) => m.get_mut(key).unwrap(),
        _ => unreachable!(),
    })
}

fn rejected(v: &Value) -> bool {
    Certificate::from_json(&v.to_string()).map_or(true, |c| c.verify().is_err())
}

/// Derives the certificate for `lattice`, then checks that it verifies and
/// that verdict flips, renames, summand swaps and changes to any matrix,
/// permutation, root coordinate or recorded sign are rejected. Returns the
/// number of mutations tried.
pub fn check_mutations(lattice: &str, exhaustive: bool) -> Result<usize, String> {
    let c = certify(lattice)?;
    c.verify().map_err(|e| format!("{lattice}: {e}"))?;
    let base: Value = serde_json::from_str(&c.to_json().map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let mut tried = 0;
    let mut expect_rejected = |m: &Value, what: &str| {
        tried += 1;
        if rejected(m) {
            Ok(())
        } else {
            Err(format!("{lattice}: {what} accepted"))
        }
    };
    let mut flipped = base.clone();
    flipped["verdict"] = Value::from(if base["verdict"] == "chiral" { "achiral" } else { "chiral" });
    expect_rejected(&flipped, "verdict flip")?;
    let mut renamed = base.clone();
    renamed["lattice"] = Value::from(format!("{lattice}+A1"));
    expect_rejected(&renamed, "rename")?;

    let mut paths = Vec::new();
    numeric_leaves(&base, &["matrix", "perm", "coords", "delta3"], false, &mut Vec::new(), &mut paths);
    if paths.is_empty() {
        return Err(format!("{lattice}: nothing to mutate"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(lattice.len() as u64);
    let chosen: Vec<&Vec<String>> =
        if exhaustive { paths.iter().collect() } else { (0..12).map(|_| &paths[rng.gen_range(0..paths.len())]).collect() };
    for p in chosen {
        let mut m = base.clone();
        let x = leaf(&mut m, p);
        let old = x.as_i64().unwrap();
        *x = Value::from(if p.iter().any(|k| k == "delta3") { -old } else { old + 1 });
        expect_rejected(&m, &format!("change at {p:?}"))?;
    }
    let text = base.to_string();
    for (from, to) in [("\"D4\"", "\"E8\""), ("\"A1\"", "\"2A1\"")] {
        if text.contains(from) {
            let m: Value = serde_json::from_str(&text.replacen(from, to, 1)).map_err(|e| e.to_string())?;
            expect_rejected(&m, &format!("summand {from} -> {to}"))?;
        }
    }
    Ok(tried)
}

/// One certificate of each kind, with the mutations to try exhaustively on
/// the small ones.
pub const MUTATION_CASES: &[(&str, bool)] = &[
    ("U(2)+A2", true),
    ("-A1+<6>+2A1", true),
    ("U(2)+E6(2)", true),
    ("-A1+A2+4A1", false),
    ("-A1+A2+3A1", false),
    ("U(2)+A2+2D4", false),
    ("U+A2+D4+2A1", false),
];
