//! Chirality verdicts and self-contained certificates.
//!
//! Every certificate names its lattice by expression and carries enough data
//! to be re-checked from scratch by [`Certificate::verify`]: root runs are
//! repeated, automorphisms are rebuilt from the recorded symmetries, and
//! nested certificates are verified recursively.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::chirality::{
    automorphism_from_symmetry, block_sign_flip, delta3_by_six_root, induced_automorphism, six_root_witness,
    LatticeAutomorphism, ThreeCharacter,
};
use crate::coxeter::{build_graph, graph_symmetries, GraphSymmetry, DEFAULT_SYMMETRY_BOUND};
use crate::discriminant::{class_invariants, ClassInvariants, DiscriminantGroup};
use crate::error::{Error, Result};
use crate::expr::parse_lattice_expr;
use crate::lattice::Lattice;
use crate::linalg::{fincke_pohst, int, int_vec, rat, row_basis, to_rat_matrix, Int, Rat};
use crate::roots::{run_vinberg, to_i64s, RootConfig, RootSequence, RunStatus};

pub const CITE_CRITERION: &str =
    "a lattice is achiral iff some chamber-preserving, sheet-preserving automorphism acts by -1 on discr_3";
pub const CITE_SYMMETRY: &str =
    "a symmetry of the graph of chamber walls spanning the lattice over Z induces a unique sheet-preserving chamber automorphism";
pub const CITE_COMPLETE: &str =
    "on a finite-volume chamber every chamber automorphism is induced by a symmetry of the full Coxeter graph";
pub const CITE_EXTENDED: &str =
    "chamber automorphisms of the {2,6}-reflection group factor through symmetries of the {2,4,6}-chamber and reflections in its 4-root walls";
pub const CITE_ROOTLESS: &str = "without 2- and 6-roots the chamber is the whole hyperbolic space";
pub const CITE_EXTENSION: &str =
    "adding an elliptic summand spanned by 2-roots with 2-elementary discriminant preserves achirality";
pub const CITE_DESCENT: &str =
    "adding such a summand preserves achirality, so a chiral sum forces a chiral summand";
pub const CITE_REDUCTION: &str =
    "the complement of an invariant elliptic primitive 2-elementary root sublattice inherits achirality";
pub const CITE_INVARIANTS: &str = "lattices of this family are determined by (rho, d, parity)";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Chiral,
    Achiral,
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Chiral => "chiral",
            Verdict::Achiral => "achiral",
            Verdict::Unknown => "unknown",
        })
    }
}

/// Parameters needed to repeat a root run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunParams {
    pub base_point: Vec<i64>,
    pub squares: Vec<i64>,
    pub max_level: String,
    pub max_roots: usize,
    pub check_volume: bool,
}

impl RunParams {
    pub fn from_config(c: &RootConfig) -> Result<Self> {
        Ok(RunParams {
            base_point: to_i64s(&c.base_point)?,
            squares: c.allowed_squares.clone(),
            max_level: c.max_level.to_string(),
            max_roots: c.max_roots,
            check_volume: c.check_volume,
        })
    }

    pub fn to_config(&self) -> Result<RootConfig> {
        let max_level: Rat = self
            .max_level
            .parse()
            .map_err(|_| Error::Verification(format!("bad level bound `{}`", self.max_level)))?;
        Ok(RootConfig {
            base_point: int_vec(&self.base_point),
            allowed_squares: self.squares.clone(),
            max_level,
            max_roots: self.max_roots,
            check_volume: self.check_volume,
        })
    }

    fn rerun(&self, l: &Lattice) -> Result<RootSequence> {
        let c = self.to_config()?;
        c.validate(l)?;
        run_vinberg(l, &c)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedRoot {
    pub name: String,
    pub coords: Vec<i64>,
}

impl NamedRoot {
    fn vector(&self) -> Vec<Int> {
        int_vec(&self.coords)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymmetryRecord {
    pub perm: Vec<usize>,
    /// `None` when the permutation does not extend to an integral isometry.
    pub matrix: Option<Vec<Vec<i64>>>,
    pub delta3: Option<i8>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WallRecord {
    pub root: String,
    pub delta3: i8,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Evidence {
    /// A graph symmetry on a spanning set of walls with `delta_3 = -1`.
    Symmetry {
        run: RunParams,
        roots: Vec<NamedRoot>,
        perm: Vec<usize>,
        matrix: Vec<Vec<i64>>,
        delta3: i8,
        six_root: Option<String>,
    },
    /// The full symmetry group of a complete wall system, all `delta_3 = +1`.
    Complete { run: RunParams, roots: Vec<NamedRoot>, symmetries: Vec<SymmetryRecord> },
    /// As `Complete` for a {2,4,6} run, plus the 4-root wall reflections.
    ExtendedGroup { run: RunParams, roots: Vec<NamedRoot>, symmetries: Vec<SymmetryRecord>, walls: Vec<WallRecord> },
    /// An automorphism of a lattice without 2- and 6-roots.
    Rootless { matrix: Vec<Vec<i64>>, test_point: Vec<i64> },
    /// `lattice = base + summand` with `base` achiral.
    Extension { summand: String, base: Box<Certificate> },
    /// `lattice + summand = larger` with `larger` chiral.
    Descent { summand: String, larger: Box<Certificate> },
    /// `lattice` is the orthogonal complement of the span of `j` in the
    /// source lattice.
    Reduction { j: Vec<String>, complement: ClassInvariants, source: Box<Certificate> },
}

impl Evidence {
    pub fn kind(&self) -> &'static str {
        match self {
            Evidence::Symmetry { .. } => "symmetry",
            Evidence::Complete { .. } => "complete",
            Evidence::ExtendedGroup { .. } => "extended_group",
            Evidence::Rootless { .. } => "rootless",
            Evidence::Extension { .. } => "extension",
            Evidence::Descent { .. } => "descent",
            Evidence::Reduction { .. } => "reduction",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub lattice: String,
    pub verdict: Verdict,
    #[serde(flatten)]
    pub evidence: Evidence,
    pub citations: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChiralityVerdict {
    pub status: Verdict,
    pub certificates: Vec<Certificate>,
}

impl ChiralityVerdict {
    pub fn unknown() -> Self {
        ChiralityVerdict { status: Verdict::Unknown, certificates: vec![] }
    }

    pub fn from_certificate(c: Certificate) -> Self {
        ChiralityVerdict { status: c.verdict, certificates: vec![c] }
    }
}

fn fail<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Verification(msg.into()))
}

fn cite(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

fn named_roots(seq: &RootSequence, pick: &[usize]) -> Result<Vec<NamedRoot>> {
    pick.iter()
        .map(|&i| Ok(NamedRoot { name: seq.roots[i].name.clone(), coords: to_i64s(&seq.roots[i].vector)? }))
        .collect()
}

fn matrix_i64(g: &LatticeAutomorphism) -> Result<Vec<Vec<i64>>> {
    g.to_i64()
}

/// Whether two lattice expressions denote the same table lattice: equal as
/// sums, or equal class invariants.
fn same_class(expected: &Lattice, expected_expr: &str, actual: &Lattice, actual_expr: &str) -> Result<()> {
    if let (Ok(a), Ok(b)) = (parse_lattice_expr(expected_expr), parse_lattice_expr(actual_expr)) {
        if a == b {
            return Ok(());
        }
    }
    let a = class_invariants(expected)?;
    let b = class_invariants(actual)?;
    if a != b {
        return fail(format!("{expected_expr} has invariants {a} but {actual_expr} has {b}"));
    }
    Ok(())
}

/// Preconditions on a summand used for extension and descent.
pub fn check_extension_summand(le: &Lattice) -> Result<()> {
    if !le.is_positive_definite() {
        return Err(Error::Precondition("summand is not positive definite".into()));
    }
    let exp = DiscriminantGroup::of(le)?.exponent();
    if exp > int(2) {
        return Err(Error::Precondition(format!("summand discriminant has exponent {exp}, not dividing 2")));
    }
    let mut roots: Vec<Vec<Int>> = Vec::new();
    fincke_pohst(&to_rat_matrix(le.gram()), &rat(2, 1), true, |x| {
        roots.push(x.to_vec());
        true
    });
    let b = row_basis(&roots);
    if b.len() != le.rank() || !crate::linalg::det(&b).abs().is_one() {
        return Err(Error::Precondition("2-roots of the summand do not span it".into()));
    }
    Ok(())
}

fn roots_match(seq: &RootSequence, listed: &[NamedRoot]) -> Result<Vec<usize>> {
    let mut seen = BTreeSet::new();
    listed
        .iter()
        .map(|r| {
            let v = r.vector();
            let i = seq
                .roots
                .iter()
                .position(|x| x.vector == v && x.name == r.name)
                .ok_or_else(|| Error::Verification(format!("root {} is not produced by the recorded run", r.name)))?;
            if !seen.insert(i) {
                return fail(format!("root {} listed twice", r.name));
            }
            Ok(i)
        })
        .collect()
}

/// Symmetry records for every symmetry of a complete graph.
fn symmetry_records(l: &Lattice, roots: &[Vec<Int>], syms: &[GraphSymmetry]) -> Result<Vec<SymmetryRecord>> {
    let chi = ThreeCharacter::of(l)?;
    syms.iter()
        .map(|s| {
            let g = induced_automorphism(l, roots, s)?;
            Ok(match g {
                Some(g) => SymmetryRecord { perm: s.perm.clone(), matrix: Some(matrix_i64(&g)?), delta3: Some(chi.eval(&g)?) },
                None => SymmetryRecord { perm: s.perm.clone(), matrix: None, delta3: None },
            })
        })
        .collect()
}

fn symmetry_bound(k: usize) -> usize {
    k.max(DEFAULT_SYMMETRY_BOUND)
}

/// Achirality certificate from a graph symmetry `sigma` of the walls
/// `seq.roots[pick]`.
pub fn achirality_certificate(
    l: &Lattice,
    expr: &str,
    seq: &RootSequence,
    pick: &[usize],
    sigma: &GraphSymmetry,
) -> Result<Certificate> {
    let roots: Vec<Vec<Int>> = pick.iter().map(|&i| seq.roots[i].vector.clone()).collect();
    let g = automorphism_from_symmetry(l, &roots, sigma)?;
    if !g.preserves_sheet(l, &seq.config.base_point)? {
        return Err(Error::Verification("induced automorphism swaps the sheets".into()));
    }
    let d = ThreeCharacter::of(l)?.eval(&g)?;
    if d != -1 {
        return Err(Error::Precondition("the symmetry acts trivially on discr_3".into()));
    }
    let six = six_root_witness(l, &roots);
    if let Some(k) = six {
        if delta3_by_six_root(&g, &roots[k]) != Some(d) {
            return Err(Error::Verification("6-root test disagrees with the discriminant action".into()));
        }
    }
    Ok(Certificate {
        lattice: expr.to_string(),
        verdict: Verdict::Achiral,
        evidence: Evidence::Symmetry {
            run: RunParams::from_config(&seq.config)?,
            roots: named_roots(seq, pick)?,
            perm: sigma.perm.clone(),
            matrix: matrix_i64(&g)?,
            delta3: d,
            six_root: six.map(|k| seq.roots[pick[k]].name.clone()),
        },
        citations: cite(&[CITE_CRITERION, CITE_SYMMETRY]),
    })
}

/// First symmetry of the full graph of `seq` whose induced automorphism is
/// integral with `delta_3 = -1`.
pub fn reversing_symmetry(l: &Lattice, seq: &RootSequence) -> Result<Option<GraphSymmetry>> {
    let roots = seq.vectors();
    let graph = seq.graph(l)?;
    let chi = ThreeCharacter::of(l)?;
    for s in graph_symmetries(&graph, symmetry_bound(graph.len()))? {
        if let Some(g) = induced_automorphism(l, &roots, &s)? {
            if chi.eval(&g)? == -1 {
                return Ok(Some(s));
            }
        }
    }
    Ok(None)
}

/// Chirality proof from a complete wall system: every symmetry that extends
/// to an automorphism must act trivially on `discr_3`.
pub fn chirality_proof(l: &Lattice, expr: &str, seq: &RootSequence) -> Result<Certificate> {
    if seq.status != RunStatus::Complete {
        return Err(Error::Precondition("root sequence is not complete".into()));
    }
    if seq.config.allowed_squares.contains(&4) {
        return Err(Error::Precondition("use the extended-group method for runs with 4-roots".into()));
    }
    let roots = seq.vectors();
    let graph = seq.graph(l)?;
    let syms = graph_symmetries(&graph, symmetry_bound(graph.len()))?;
    let records = symmetry_records(l, &roots, &syms)?;
    if records.iter().any(|r| r.delta3 == Some(-1)) {
        return Err(Error::Precondition("a chamber automorphism reverses discr_3".into()));
    }
    Ok(Certificate {
        lattice: expr.to_string(),
        verdict: Verdict::Chiral,
        evidence: Evidence::Complete {
            run: RunParams::from_config(&seq.config)?,
            roots: named_roots(seq, &(0..seq.roots.len()).collect::<Vec<_>>())?,
            symmetries: records,
        },
        citations: cite(&[CITE_CRITERION, CITE_COMPLETE]),
    })
}

fn wall_records(l: &Lattice, seq: &RootSequence) -> Result<Vec<WallRecord>> {
    let chi = ThreeCharacter::of(l)?;
    seq.roots
        .iter()
        .filter(|r| r.square == 4)
        .map(|r| {
            let h = LatticeAutomorphism::reflection(l, &r.vector)?;
            Ok(WallRecord { root: r.name.clone(), delta3: chi.eval(&h)? })
        })
        .collect()
}

/// Chirality proof through the {2,4,6} reflection group.
pub fn extended_group_chirality(l: &Lattice, expr: &str, seq: &RootSequence) -> Result<Certificate> {
    if seq.status != RunStatus::Complete {
        return Err(Error::Precondition("extended root sequence is not complete".into()));
    }
    if !seq.config.allowed_squares.contains(&4) {
        return Err(Error::Precondition("run does not include 4-roots".into()));
    }
    let roots = seq.vectors();
    let graph = seq.graph(l)?;
    let syms = graph_symmetries(&graph, symmetry_bound(graph.len()))?;
    let records = symmetry_records(l, &roots, &syms)?;
    let walls = wall_records(l, seq)?;
    if records.iter().any(|r| r.delta3 == Some(-1)) || walls.iter().any(|w| w.delta3 == -1) {
        return Err(Error::Precondition("extended-group method is inconclusive".into()));
    }
    Ok(Certificate {
        lattice: expr.to_string(),
        verdict: Verdict::Chiral,
        evidence: Evidence::ExtendedGroup {
            run: RunParams::from_config(&seq.config)?,
            roots: named_roots(seq, &(0..seq.roots.len()).collect::<Vec<_>>())?,
            symmetries: records,
            walls,
        },
        citations: cite(&[CITE_CRITERION, CITE_EXTENDED]),
    })
}

fn check_rootless(l: &Lattice) -> Result<()> {
    if !l.norms_divisible_by_four() {
        return Err(Error::Precondition("cannot certify the absence of 2- and 6-roots".into()));
    }
    Ok(())
}

/// Achirality of a lattice without 2- and 6-roots. With `g = None` the
/// candidate is `id` on the hyperbolic block and `-id` elsewhere.
pub fn rootless_certificate(
    l: &Lattice,
    expr: &str,
    g: Option<LatticeAutomorphism>,
    test_point: &[Int],
) -> Result<Certificate> {
    check_rootless(l)?;
    let g = match g {
        Some(g) => g,
        None => block_sign_flip(l)?,
    };
    if !g.preserves_sheet(l, test_point)? {
        return Err(Error::Precondition("automorphism swaps the sheets".into()));
    }
    if ThreeCharacter::of(l)?.eval(&g)? != -1 {
        return Err(Error::Precondition("automorphism acts trivially on discr_3".into()));
    }
    Ok(Certificate {
        lattice: expr.to_string(),
        verdict: Verdict::Achiral,
        evidence: Evidence::Rootless { matrix: matrix_i64(&g)?, test_point: to_i64s(test_point)? },
        citations: cite(&[CITE_CRITERION, CITE_ROOTLESS]),
    })
}

/// Achirality of `target = base + summand`.
pub fn extension_step(base: Certificate, summand: &str, target: &str) -> Result<Certificate> {
    if base.verdict != Verdict::Achiral {
        return Err(Error::Precondition("extension needs an achiral base".into()));
    }
    let cert = Certificate {
        lattice: target.to_string(),
        verdict: Verdict::Achiral,
        evidence: Evidence::Extension { summand: summand.to_string(), base: Box::new(base) },
        citations: cite(&[CITE_EXTENSION, CITE_INVARIANTS]),
    };
    cert.check_extension()?;
    Ok(cert)
}

/// Chirality of `target`, given that `target + summand` is chiral.
pub fn descent_step(larger: Certificate, summand: &str, target: &str) -> Result<Certificate> {
    if larger.verdict != Verdict::Chiral {
        return Err(Error::Precondition("descent needs a chiral sum".into()));
    }
    let cert = Certificate {
        lattice: target.to_string(),
        verdict: Verdict::Chiral,
        evidence: Evidence::Descent { summand: summand.to_string(), larger: Box::new(larger) },
        citations: cite(&[CITE_DESCENT, CITE_INVARIANTS]),
    };
    cert.check_descent()?;
    Ok(cert)
}

/// Achirality of the orthogonal complement of the walls `j` of a symmetry
/// certificate.
pub fn reduction_step(source: Certificate, j: &[String], target: &str) -> Result<Certificate> {
    let complement = reduction_complement(&source, j)?;
    let cert = Certificate {
        lattice: target.to_string(),
        verdict: Verdict::Achiral,
        evidence: Evidence::Reduction { j: j.to_vec(), complement, source: Box::new(source) },
        citations: cite(&[CITE_REDUCTION, CITE_INVARIANTS]),
    };
    cert.check_reduction()?;
    Ok(cert)
}

/// Checks the reduction preconditions and returns the complement invariants.
fn reduction_complement(source: &Certificate, j: &[String]) -> Result<ClassInvariants> {
    let Evidence::Symmetry { roots, perm, .. } = &source.evidence else {
        return Err(Error::Precondition("reduction needs a symmetry certificate".into()));
    };
    if source.verdict != Verdict::Achiral {
        return Err(Error::Precondition("reduction needs an achiral source".into()));
    }
    if j.is_empty() {
        return Err(Error::Precondition("J is empty".into()));
    }
    let l = Lattice::from_expr(&source.lattice)?;
    let idx: Vec<usize> = j
        .iter()
        .map(|n| {
            roots
                .iter()
                .position(|r| &r.name == n)
                .ok_or_else(|| Error::Precondition(format!("{n} is not among the symmetric walls")))
        })
        .collect::<Result<_>>()?;
    let set: BTreeSet<usize> = idx.iter().copied().collect();
    if set.len() != idx.len() {
        return Err(Error::Precondition("J has repeated vertices".into()));
    }
    if idx.iter().any(|&i| perm.get(i).map_or(true, |p| !set.contains(p))) {
        return Err(Error::Precondition("J is not invariant under the symmetry".into()));
    }
    let vecs: Vec<Vec<Int>> = idx.iter().map(|&i| roots[i].vector()).collect();
    let graph = build_graph(&l, j, &vecs)?;
    if !graph.is_elliptic(graph.full_mask()) {
        return Err(Error::Precondition("the graph on J is not elliptic".into()));
    }
    let lj = l.sublattice(&row_basis(&vecs))?;
    if DiscriminantGroup::of(&lj)?.exponent() > int(2) {
        return Err(Error::Precondition("span of J has discriminant exponent above 2".into()));
    }
    if !l.saturation(&vecs)?.is_primitive {
        return Err(Error::Precondition("span of J is not primitive".into()));
    }
    let (comp, _) = l.orthogonal_complement(&vecs)?;
    class_invariants(&comp)
}

impl Certificate {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Number of certificates in the chain, this one included.
    pub fn depth(&self) -> usize {
        1 + match &self.evidence {
            Evidence::Extension { base: c, .. } | Evidence::Descent { larger: c, .. } | Evidence::Reduction { source: c, .. } => {
                c.depth()
            }
            _ => 0,
        }
    }

    /// Re-checks the certificate and everything it depends on. Returns the
    /// verdict it establishes.
    pub fn verify(&self) -> Result<Verdict> {
        let derived = match &self.evidence {
            Evidence::Symmetry { .. } => self.check_symmetry()?,
            Evidence::Complete { .. } | Evidence::ExtendedGroup { .. } => self.check_complete()?,
            Evidence::Rootless { .. } => self.check_rootless_cert()?,
            Evidence::Extension { .. } => self.check_extension()?,
            Evidence::Descent { .. } => self.check_descent()?,
            Evidence::Reduction { .. } => self.check_reduction()?,
        };
        if derived != self.verdict {
            return fail(format!("certificate claims {} but establishes {derived}", self.verdict));
        }
        Ok(derived)
    }

    fn lattice(&self) -> Result<Lattice> {
        Lattice::from_expr(&self.lattice)
    }

    fn check_symmetry(&self) -> Result<Verdict> {
        let Evidence::Symmetry { run, roots, perm, matrix, delta3, six_root } = &self.evidence else { unreachable!() };
        let l = self.lattice()?;
        let seq = run.rerun(&l)?;
        roots_match(&seq, roots)?;
        let vecs: Vec<Vec<Int>> = roots.iter().map(NamedRoot::vector).collect();
        let sigma = GraphSymmetry { perm: perm.clone() };
        let g = automorphism_from_symmetry(&l, &vecs, &sigma)?;
        if g.to_i64()? != *matrix {
            return fail("recorded matrix differs from the induced automorphism");
        }
        if !g.preserves_sheet(&l, &int_vec(&run.base_point))? {
            return fail("automorphism swaps the sheets");
        }
        let d = ThreeCharacter::of(&l)?.eval(&g)?;
        if d != *delta3 {
            return fail(format!("recorded delta_3 {delta3} but computed {d}"));
        }
        if let Some(name) = six_root {
            let k = roots.iter().position(|r| &r.name == name).ok_or_else(|| Error::Verification(format!("unknown 6-root {name}")))?;
            if l.norm(&vecs[k]) != int(6) {
                return fail(format!("{name} is not a 6-root"));
            }
            if delta3_by_six_root(&g, &vecs[k]) != Some(d) {
                return fail("6-root test disagrees with the discriminant action");
            }
        }
        Ok(if d == -1 { Verdict::Achiral } else { Verdict::Unknown })
    }

    fn check_complete(&self) -> Result<Verdict> {
        let (run, roots, symmetries, walls) = match &self.evidence {
            Evidence::Complete { run, roots, symmetries } => (run, roots, symmetries, None),
            Evidence::ExtendedGroup { run, roots, symmetries, walls } => (run, roots, symmetries, Some(walls)),
            _ => unreachable!(),
        };
        let l = self.lattice()?;
        if walls.is_some() != run.squares.contains(&4) {
            return fail("4-roots must be used exactly by extended-group certificates");
        }
        let seq = run.rerun(&l)?;
        if seq.status != RunStatus::Complete {
            return fail("recorded run does not terminate with a finite-volume chamber");
        }
        if roots_match(&seq, roots)?.len() != seq.roots.len() {
            return fail("recorded roots are not the full wall system");
        }
        let graph = seq.graph(&l)?;
        let syms = graph_symmetries(&graph, symmetry_bound(graph.len()))?;
        let listed: BTreeSet<&Vec<usize>> = symmetries.iter().map(|s| &s.perm).collect();
        let actual: BTreeSet<&Vec<usize>> = syms.iter().map(|s| &s.perm).collect();
        if listed != actual || listed.len() != symmetries.len() {
            return fail("recorded symmetry group differs from the graph's");
        }
        let records = symmetry_records(&l, &seq.vectors(), &syms)?;
        for r in &records {
            let claimed = symmetries.iter().find(|s| s.perm == r.perm).expect("same group");
            if claimed != r {
                return fail(format!("symmetry {:?} recorded incorrectly", r.perm));
            }
        }
        let mut direct = records.iter().all(|r| r.delta3 != Some(-1));
        if let Some(walls) = walls {
            let actual = wall_records(&l, &seq)?;
            if *walls != actual {
                return fail("4-root wall reflections recorded incorrectly");
            }
            direct &= actual.iter().all(|w| w.delta3 == 1);
        }
        Ok(if direct { Verdict::Chiral } else { Verdict::Unknown })
    }

    fn check_rootless_cert(&self) -> Result<Verdict> {
        let Evidence::Rootless { matrix, test_point } = &self.evidence else { unreachable!() };
        let l = self.lattice()?;
        check_rootless(&l)?;
        let g = LatticeAutomorphism::from_i64(&l, matrix)?;
        if !g.preserves_sheet(&l, &int_vec(test_point))? {
            return fail("automorphism swaps the sheets");
        }
        Ok(if ThreeCharacter::of(&l)?.eval(&g)? == -1 { Verdict::Achiral } else { Verdict::Unknown })
    }

    fn check_extension(&self) -> Result<Verdict> {
        let Evidence::Extension { summand, base } = &self.evidence else { unreachable!() };
        if base.verify()? != Verdict::Achiral {
            return fail("extension base is not achiral");
        }
        let le = Lattice::from_expr(summand)?;
        check_extension_summand(&le)?;
        let lh = base.lattice()?;
        let sum_expr = parse_lattice_expr(&base.lattice)?.plus(&parse_lattice_expr(summand)?);
        let sum = sum_expr.to_lattice()?;
        same_class(&self.lattice()?, &self.lattice, &sum, &sum_expr.to_string())?;
        debug_assert_eq!(lh.rank() + le.rank(), sum.rank());
        Ok(Verdict::Achiral)
    }

    fn check_descent(&self) -> Result<Verdict> {
        let Evidence::Descent { summand, larger } = &self.evidence else { unreachable!() };
        if larger.verify()? != Verdict::Chiral {
            return fail("descent source is not chiral");
        }
        check_extension_summand(&Lattice::from_expr(summand)?)?;
        let sum_expr = parse_lattice_expr(&self.lattice)?.plus(&parse_lattice_expr(summand)?);
        same_class(&larger.lattice()?, &larger.lattice, &sum_expr.to_lattice()?, &sum_expr.to_string())?;
        Ok(Verdict::Chiral)
    }

    fn check_reduction(&self) -> Result<Verdict> {
        let Evidence::Reduction { j, complement, source } = &self.evidence else { unreachable!() };
        if source.verify()? != Verdict::Achiral {
            return fail("reduction source is not achiral");
        }
        let inv = reduction_complement(source, j)?;
        if inv != *complement {
            return fail(format!("complement has invariants {inv}, recorded {complement}"));
        }
        let target = class_invariants(&self.lattice()?)?;
        if target != inv {
            return fail(format!("{} has invariants {target}, complement has {inv}", self.lattice));
        }
        Ok(Verdict::Achiral)
    }
}

/// The involution swapping each pair `(a, b)` of root names (`a == b` for a
/// fixed root). Returns the indices of the named roots in `seq` and the
/// involution as a permutation of those positions.
pub fn symmetry_on_subset(seq: &RootSequence, pairs: &[(String, String)]) -> Result<(Vec<usize>, GraphSymmetry)> {
    let mut names: Vec<String> = Vec::new();
    for (a, b) in pairs {
        for x in [a, b] {
            if !names.contains(x) {
                names.push(x.clone());
            }
        }
    }
    let image = |n: &String| -> Option<&String> {
        pairs.iter().find_map(|(a, b)| if a == n { Some(b) } else if b == n { Some(a) } else { None })
    };
    let pick: Vec<usize> = names
        .iter()
        .map(|n| seq.roots.iter().position(|r| &r.name == n).ok_or_else(|| Error::Precondition(format!("no root named {n}"))))
        .collect::<Result<_>>()?;
    let perm: Vec<usize> = names
        .iter()
        .map(|n| {
            let m = image(n).expect("listed");
            names.iter().position(|x| x == m).expect("listed")
        })
        .collect();
    Ok((pick, GraphSymmetry { perm }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lat(s: &str) -> Lattice {
        Lattice::from_expr(s).unwrap()
    }

    fn run(expr: &str, squares: &[i64], level: i64) -> (Lattice, RootSequence) {
        let l = lat(expr);
        let c = RootConfig::new(&l).unwrap().with_squares(squares).with_max_level(level);
        let seq = run_vinberg(&l, &c).unwrap();
        (l, seq)
    }

    fn pairs(spec: &str) -> Vec<(String, String)> {
        spec.split(',')
            .map(|p| match p.split_once(':') {
                Some((a, b)) => (a.to_string(), b.to_string()),
                None => (p.to_string(), p.to_string()),
            })
            .collect()
    }

    fn round_trip(c: &Certificate) {
        let back = Certificate::from_json(&c.to_json().unwrap()).unwrap();
        assert_eq!(&back, c);
        assert_eq!(back.verify().unwrap(), c.verdict);
    }

    #[test]
    fn u2a2_is_chiral() {
        let (l, seq) = run("U(2)+A2", &[2, 6], 400);
        let c = chirality_proof(&l, "U(2)+A2", &seq).unwrap();
        assert_eq!(c.verdict, Verdict::Chiral);
        let Evidence::Complete { symmetries, .. } = &c.evidence else { panic!() };
        assert_eq!(symmetries.len(), 2);
        assert!(symmetries.iter().all(|s| s.delta3 == Some(1)));
        round_trip(&c);
        let swap = GraphSymmetry { perm: vec![0, 1, 3, 2] };
        assert!(achirality_certificate(&l, "U(2)+A2", &seq, &[0, 1, 2, 3], &swap).is_err());
        assert!(reversing_symmetry(&l, &seq).unwrap().is_none());
    }

    #[test]
    fn mirrors_give_achirality() {
        for expr in ["U(2)+A2+E8", "U(2)+A2+D4"] {
            let (l, seq) = run(expr, &[2, 6], 48);
            let s = reversing_symmetry(&l, &seq).unwrap().expect("mirror");
            let pick: Vec<usize> = (0..seq.roots.len()).collect();
            let c = achirality_certificate(&l, expr, &seq, &pick, &s).unwrap();
            round_trip(&c);
        }
    }

    #[test]
    fn rootless_lattice() {
        let l = lat("U(2)+E6(2)");
        let p = int_vec(&[1, -1, 0, 0, 0, 0, 0, 0]);
        let c = rootless_certificate(&l, "U(2)+E6(2)", None, &p).unwrap();
        round_trip(&c);
        let id = LatticeAutomorphism::identity(8);
        assert!(rootless_certificate(&l, "U(2)+E6(2)", Some(id), &p).is_err());
        assert!(rootless_certificate(&lat("U(2)+A2"), "U(2)+A2", None, &int_vec(&[1, -1, 0, 0])).is_err());
    }

    #[test]
    fn extension_and_descent() {
        let (l, seq) = run("U(2)+A2+D4", &[2, 6], 48);
        let s = reversing_symmetry(&l, &seq).unwrap().unwrap();
        let pick: Vec<usize> = (0..seq.roots.len()).collect();
        let base = achirality_certificate(&l, "U(2)+A2+D4", &seq, &pick, &s).unwrap();
        let c = extension_step(base.clone(), "D4", "U(2)+A2+2D4").unwrap();
        round_trip(&c);
        assert_eq!(c.depth(), 2);
        assert!(extension_step(base.clone(), "A2", "U(2)+A2+D4+A2").is_err());
        assert!(extension_step(base, "D4", "U+A2+2D4").is_err());

        let (l, seq) = run("-A1+<6>+A1", &[2, 6], 400);
        let chiral = chirality_proof(&l, "-A1+<6>+A1", &seq).unwrap();
        let c = descent_step(chiral, "A1", "-A1+<6>").unwrap();
        round_trip(&c);
    }

    #[test]
    fn hexagon_reduction() {
        let (l, seq) = run("U+A2+2E8", &[2, 6], 48);
        let psi = pairs("v1:e4,v5:e5,e8:e6,e7,e2:v6,v8:e8',e7',v4:e3,v2:e1,v7,e1',v9,e6',e2',e3',e4',e5'");
        let (pick, sigma) = symmetry_on_subset(&seq, &psi).unwrap();
        let source = achirality_certificate(&l, "U+A2+2E8", &seq, &pick, &sigma).unwrap();
        let j: Vec<String> = "v9,e6,e7,e8,v8,e6',e7',e8',e1,e1',v2,v7".split(',').map(String::from).collect();
        let c = reduction_step(source.clone(), &j, "U+E6(2)").unwrap();
        round_trip(&c);
        assert!(reduction_step(source.clone(), &["v4".to_string()], "U+A2+D4+E8").is_err());
        assert!(reduction_step(source, &j, "U+A2+2D4").is_err());
    }

    #[test]
    fn extended_group_method() {
        let (l, seq) = run("-A1+A2+4A1", &[2, 4, 6], 400);
        assert_eq!(seq.roots.len(), 10);
        let c = extended_group_chirality(&l, "-A1+A2+4A1", &seq).unwrap();
        round_trip(&c);
        let (l, seq) = run("-A1+A2+4A1", &[2, 6], 400);
        assert!(extended_group_chirality(&l, "-A1+A2+4A1", &seq).is_err());
    }

    #[test]
    fn mutations_are_rejected() {
        let (l, seq) = run("U(2)+A2+E8", &[2, 6], 48);
        let s = reversing_symmetry(&l, &seq).unwrap().unwrap();
        let pick: Vec<usize> = (0..seq.roots.len()).collect();
        let c = achirality_certificate(&l, "U(2)+A2+E8", &seq, &pick, &s).unwrap();
        let mut bad = c.clone();
        bad.verdict = Verdict::Chiral;
        assert!(bad.verify().is_err());
        let mut bad = c.clone();
        bad.lattice = "U+A2+E8".into();
        assert!(bad.verify().is_err());
        let mut bad = c.clone();
        if let Evidence::Symmetry { matrix, .. } = &mut bad.evidence {
            matrix[0][0] += 1;
        }
        assert!(bad.verify().is_err());
        let mut bad = c.clone();
        if let Evidence::Symmetry { perm, .. } = &mut bad.evidence {
            perm.swap(0, 1);
        }
        assert!(bad.verify().is_err());
        let mut bad = c.clone();
        if let Evidence::Symmetry { roots, .. } = &mut bad.evidence {
            roots[0].coords[0] += 3;
        }
        assert!(bad.verify().is_err());
    }
}
