//! Roots of square 2, 4 and 6 and Vinberg's algorithm.
//!
//! A vector `v` of square 2 is always a root; square 4 needs `v.x` even for
//! all `x` in the lattice, square 6 needs `v.x` divisible by 3. The level of
//! `v` relative to the base point `p` is `2(p.v)^2 / v^2`.
//!
//! Candidates at a level are found in "product coordinates": with `R0` the
//! level-0 simple roots and `Q` a basis of the lattice orthogonal to `p` and
//! `R0`, a vector is determined by `(p.v, R0.v, Q.v)`. The chamber condition
//! makes `R0.v <= 0`, and since the inverse Gram of a simple system is
//! entrywise non-negative, the search over those products is monotone.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::coxeter::{build_graph, finite_volume_check, CoxeterGraph, FiniteVolumeReport};
use crate::error::{Error, Result};
use crate::lattice::{BlockKind, Lattice};
use crate::linalg::{
    fincke_pohst, int, inverse_rat, isqrt, kernel, lll_gram, mat_mul, row_basis, to_rat_matrix, transpose, Int,
    IntMatrix, Rat, RatMatrix,
};

pub const DEFAULT_MAX_LEVEL: i64 = 400;
pub const DEFAULT_MAX_ROOTS: usize = 120;

fn divisor(square: i64) -> i64 {
    match square {
        4 => 2,
        6 => 3,
        _ => 1,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootConfig {
    pub base_point: Vec<Int>,
    pub allowed_squares: Vec<i64>,
    pub max_level: Rat,
    pub max_roots: usize,
    /// Run the finite-volume check after each accepted batch.
    pub check_volume: bool,
}

impl RootConfig {
    /// Default base point, squares `{2, 6}`, and default budgets.
    pub fn new(l: &Lattice) -> Result<Self> {
        Ok(RootConfig {
            base_point: default_base_point(l)?,
            allowed_squares: vec![2, 6],
            max_level: Rat::from_integer(int(DEFAULT_MAX_LEVEL)),
            max_roots: DEFAULT_MAX_ROOTS,
            check_volume: true,
        })
    }

    pub fn with_squares(mut self, squares: &[i64]) -> Self {
        self.allowed_squares = squares.to_vec();
        self
    }

    pub fn with_max_level(mut self, level: i64) -> Self {
        self.max_level = Rat::from_integer(int(level));
        self
    }

    pub fn with_max_roots(mut self, n: usize) -> Self {
        self.max_roots = n;
        self
    }

    pub fn with_volume_check(mut self, on: bool) -> Self {
        self.check_volume = on;
        self
    }

    pub fn validate(&self, l: &Lattice) -> Result<()> {
        if self.base_point.len() != l.rank() {
            return Err(Error::Dimension(format!(
                "base point has {} coordinates, lattice rank is {}",
                self.base_point.len(),
                l.rank()
            )));
        }
        if !l.norm(&self.base_point).is_negative() {
            return Err(Error::Precondition("base point must have negative square".into()));
        }
        if self.allowed_squares.is_empty() || self.allowed_squares.iter().any(|s| ![2, 4, 6].contains(s)) {
            return Err(Error::Precondition("allowed squares must be a non-empty subset of {2,4,6}".into()));
        }
        Ok(())
    }
}

/// `u1 - u2` of the first `U`/`U(k)` summand, else the generator of the
/// first negated `A1`.
pub fn default_base_point(l: &Lattice) -> Result<Vec<Int>> {
    let mut p = vec![Int::zero(); l.rank()];
    if let Some(b) = l.blocks().iter().find(|b| b.kind == BlockKind::U && !b.negated) {
        p[b.offset] = Int::one();
        p[b.offset + 1] = -Int::one();
        return Ok(p);
    }
    if let Some(b) = l.blocks().iter().find(|b| b.negated && b.kind == BlockKind::A(1)) {
        p[b.offset] = Int::one();
        return Ok(p);
    }
    Err(Error::Precondition("no U or -A1 summand to place a default base point".into()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Root {
    pub name: String,
    pub vector: Vec<Int>,
    pub square: i64,
    pub level: Rat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Complete,
    BudgetExhausted,
}

impl fmt::Display for RunStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RunStatus::Complete => "complete",
            RunStatus::BudgetExhausted => "budget_exhausted",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelRecord {
    pub level: String,
    pub candidates: usize,
    pub accepted: usize,
}

#[derive(Clone, Debug)]
pub struct RootSequence {
    pub config: RootConfig,
    pub roots: Vec<Root>,
    pub status: RunStatus,
    /// Every nonempty candidate level scanned, including those where
    /// nothing was accepted.
    pub levels: Vec<LevelRecord>,
    pub volume: Option<FiniteVolumeReport>,
}

impl RootSequence {
    pub fn vectors(&self) -> Vec<Vec<Int>> {
        self.roots.iter().map(|r| r.vector.clone()).collect()
    }

    pub fn names(&self) -> Vec<String> {
        self.roots.iter().map(|r| r.name.clone()).collect()
    }

    pub fn graph(&self, l: &Lattice) -> Result<CoxeterGraph> {
        build_graph(l, &self.names(), &self.vectors())
    }

    pub fn find(&self, name: &str) -> Option<&Root> {
        self.roots.iter().find(|r| r.name == name)
    }

    pub fn at_level(&self, level: i64) -> Vec<&Root> {
        let lv = Rat::from_integer(int(level));
        self.roots.iter().filter(|r| r.level == lv).collect()
    }

    pub fn to_json(&self) -> Result<RootSequenceJson> {
        Ok(RootSequenceJson {
            base_point: to_i64s(&self.config.base_point)?,
            allowed_squares: self.config.allowed_squares.clone(),
            max_level: self.config.max_level.to_string(),
            max_roots: self.config.max_roots,
            roots: self
                .roots
                .iter()
                .map(|r| {
                    Ok(RootJson {
                        name: r.name.clone(),
                        coords: to_i64s(&r.vector)?,
                        square: r.square,
                        level: r.level.to_string(),
                    })
                })
                .collect::<Result<_>>()?,
            status: self.status,
            levels: self.levels.clone(),
        })
    }
}

pub fn to_i64s(v: &[Int]) -> Result<Vec<i64>> {
    v.iter()
        .map(|x| x.to_i64().ok_or_else(|| Error::Budget(format!("coordinate {x} does not fit in 64 bits"))))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootJson {
    pub name: String,
    pub coords: Vec<i64>,
    pub square: i64,
    pub level: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootSequenceJson {
    pub base_point: Vec<i64>,
    pub allowed_squares: Vec<i64>,
    pub max_level: String,
    pub max_roots: usize,
    pub roots: Vec<RootJson>,
    pub status: RunStatus,
    pub levels: Vec<LevelRecord>,
}

/// Square of `v` if it is a root with an allowed square.
pub fn is_root(l: &Lattice, v: &[Int], allowed: &[i64]) -> Option<i64> {
    if v.iter().all(|x| x.is_zero()) {
        return None;
    }
    let s = l.norm(v).to_i64()?;
    if !allowed.contains(&s) {
        return None;
    }
    let f = int(divisor(s));
    l.products(v).iter().all(|x| x.is_multiple_of(&f)).then_some(s)
}

pub fn level_of(l: &Lattice, p: &[Int], v: &[Int]) -> Rat {
    let pv = l.dot(p, v);
    Rat::new(int(2) * &pv * &pv, l.norm(v))
}

fn lex_positive(v: &[Int]) -> bool {
    v.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_positive())
}

/// All roots of allowed square orthogonal to `p`.
pub fn roots_orthogonal_to(l: &Lattice, p: &[Int], allowed: &[i64]) -> Vec<(Vec<Int>, i64)> {
    let n = l.rank();
    let gp = l.products(p);
    let k = kernel(&[gp], n);
    if k.is_empty() {
        return vec![];
    }
    let mut out = Vec::new();
    for &s in allowed {
        let f = divisor(s);
        // z with G K z = 0 mod f
        let basis: Vec<Vec<Int>> = if f == 1 {
            k.clone()
        } else {
            let gk: IntMatrix = k.iter().map(|kv| l.products(kv)).collect();
            let cols = k.len() + n;
            let rows: IntMatrix = (0..n)
                .map(|r| {
                    let mut row: Vec<Int> = gk.iter().map(|g| g[r].clone()).collect();
                    row.extend((0..n).map(|c| if c == r { int(-f) } else { Int::zero() }));
                    row
                })
                .collect();
            let zs: Vec<Vec<Int>> = kernel(&rows, cols).into_iter().map(|z| z[..k.len()].to_vec()).collect();
            row_basis(&zs)
                .into_iter()
                .map(|z| {
                    let mut x = vec![Int::zero(); n];
                    for (zi, kv) in z.iter().zip(&k) {
                        for (xj, kj) in x.iter_mut().zip(kv) {
                            *xj += zi * kj;
                        }
                    }
                    x
                })
                .collect()
        };
        let gram: IntMatrix = basis.iter().map(|a| basis.iter().map(|b| l.dot(a, b)).collect()).collect();
        let (t, reduced) = lll_gram(&gram);
        let red_basis = mat_mul(&t, &basis);
        fincke_pohst(&to_rat_matrix(&reduced), &Rat::from_integer(int(s)), true, |z| {
            let mut x = vec![Int::zero(); n];
            for (zi, b) in z.iter().zip(&red_basis) {
                if zi.is_zero() {
                    continue;
                }
                for (xj, bj) in x.iter_mut().zip(b) {
                    *xj += zi * bj;
                }
            }
            if is_root(l, &x, &[s]).is_some() {
                out.push((x, s));
            }
            true
        });
    }
    out
}

/// Simple roots of the finite root system orthogonal to `p`, positive
/// meaning lexicographically positive in lattice coordinates.
pub fn initial_simple_system(l: &Lattice, p: &[Int], allowed: &[i64]) -> Vec<(Vec<Int>, i64)> {
    let mut pos: Vec<(Vec<Int>, i64)> = roots_orthogonal_to(l, p, allowed).into_iter().filter(|(v, _)| lex_positive(v)).collect();
    pos.sort();
    let mut simple: Vec<(Vec<Int>, i64)> = Vec::new();
    for (v, s) in pos {
        if simple.iter().all(|(w, _)| !l.dot(&v, w).is_positive()) {
            simple.push((v, s));
        }
    }
    let block_of = |v: &[Int]| {
        let i = v.iter().position(|x| !x.is_zero()).unwrap_or(0);
        l.blocks().iter().position(|b| b.range().contains(&i)).unwrap_or(0)
    };
    simple.sort_by(|a, b| {
        let ka = (block_of(&a.0), a.0.iter().filter(|x| !x.is_zero()).count());
        let kb = (block_of(&b.0), b.0.iter().filter(|x| !x.is_zero()).count());
        ka.cmp(&kb).then_with(|| b.0.cmp(&a.0))
    });
    simple
}

/// Precomputed product-coordinate data for candidate search.
struct Search<'a> {
    l: &'a Lattice,
    p2: Int,
    r0: Vec<Vec<Int>>,
    ainv_num: IntMatrix,
    ainv_den: Int,
    cinv: RatMatrix,
    w_num: IntMatrix,
    w_den: Int,
}

fn common_denominator(m: &RatMatrix) -> Int {
    m.iter().flatten().fold(Int::one(), |acc, x| acc.lcm(x.denom()))
}

fn scale(m: &RatMatrix, d: &Int) -> IntMatrix {
    let dr = Rat::from_integer(d.clone());
    m.iter().map(|row| row.iter().map(|x| (x * &dr).to_integer()).collect()).collect()
}

impl<'a> Search<'a> {
    fn new(l: &'a Lattice, p: &[Int], r0: Vec<Vec<Int>>) -> Result<Self> {
        let n = l.rank();
        let mut cons: IntMatrix = vec![l.products(p)];
        cons.extend(r0.iter().map(|r| l.products(r)));
        let q0 = kernel(&cons, n);
        let qgram: IntMatrix = q0.iter().map(|a| q0.iter().map(|b| l.dot(a, b)).collect()).collect();
        let (t, cgram) = lll_gram(&qgram);
        let q = mat_mul(&t, &q0);
        let mut b: IntMatrix = vec![p.to_vec()];
        b.extend(r0.iter().cloned());
        b.extend(q.iter().cloned());
        if b.len() != n {
            return Err(Error::Verification("base point and level-0 roots do not split the lattice".into()));
        }
        let h: IntMatrix = b.iter().map(|x| b.iter().map(|y| l.dot(x, y)).collect()).collect();
        let hinv = inverse_rat(&to_rat_matrix(&h)).ok_or(Error::Degenerate)?;
        let bt = to_rat_matrix(&transpose(&b));
        let w: RatMatrix = (0..n)
            .map(|i| (0..n).map(|j| (0..n).map(|k| &bt[i][k] * &hinv[k][j]).sum()).collect())
            .collect();
        let w_den = common_denominator(&w);
        let a: IntMatrix = r0.iter().map(|x| r0.iter().map(|y| l.dot(x, y)).collect()).collect();
        let ainv = if a.is_empty() { vec![] } else { inverse_rat(&to_rat_matrix(&a)).ok_or(Error::Degenerate)? };
        let ainv_den = common_denominator(&ainv);
        let cinv = if cgram.is_empty() { vec![] } else { inverse_rat(&to_rat_matrix(&cgram)).ok_or(Error::Degenerate)? };
        Ok(Search {
            l,
            p2: l.norm(p),
            r0,
            ainv_num: scale(&ainv, &ainv_den),
            ainv_den,
            cinv,
            w_num: scale(&w, &w_den),
            w_den,
        })
    }

    /// All roots of square `s` with `p.v = c` and `v.r <= 0` on level 0.
    fn candidates(&self, s: i64, c: &Int) -> Vec<Vec<Int>> {
        let f = int(divisor(s));
        let cp = c / &f;
        // m^T A^-1 m + y^T C^-1 y = s/f^2 - c'^2/p^2
        let target = Rat::new(int(s), &f * &f) - Rat::new(&cp * &cp, self.p2.clone());
        let scaled_target = &target * Rat::from_integer(self.ainv_den.clone());
        let cap = scaled_target.floor().to_integer();
        let k0 = self.r0.len();
        let mut out = Vec::new();
        let mut m = vec![Int::zero(); k0];
        let mut am = vec![Int::zero(); k0];
        self.walk(0, &mut m, &mut am, Int::zero(), &cap, &scaled_target, s, &f, &cp, &mut out);
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn walk(
        &self,
        i: usize,
        m: &mut Vec<Int>,
        am: &mut Vec<Int>,
        value: Int,
        cap: &Int,
        target: &Rat,
        s: i64,
        f: &Int,
        cp: &Int,
        out: &mut Vec<Vec<Int>>,
    ) {
        let k0 = m.len();
        if i == k0 {
            let rest = (target - Rat::from_integer(value)) / Rat::from_integer(self.ainv_den.clone());
            self.finish(m, &rest, s, f, cp, out);
            return;
        }
        let mut t = Int::zero();
        let mut val = value.clone();
        loop {
            self.walk(i + 1, m, am, val.clone(), cap, target, s, f, cp, out);
            // raise m_i by one: value += 2 (A^-1 m)_i + A^-1_ii
            let next = &val + int(2) * &am[i] + &self.ainv_num[i][i];
            if &next > cap {
                break;
            }
            t += 1;
            m[i] = t.clone();
            for (j, a) in am.iter_mut().enumerate() {
                *a += &self.ainv_num[j][i];
            }
            val = next;
        }
        for (j, a) in am.iter_mut().enumerate() {
            *a -= &t * &self.ainv_num[j][i];
        }
        m[i] = Int::zero();
    }

    fn finish(&self, m: &[Int], rest: &Rat, s: i64, f: &Int, cp: &Int, out: &mut Vec<Vec<Int>>) {
        let mut emit = |y: &[Int]| {
            let mut pi: Vec<Int> = Vec::with_capacity(1 + m.len() + y.len());
            pi.push(cp * f);
            pi.extend(m.iter().map(|x| -(x * f)));
            pi.extend(y.iter().map(|x| x * f));
            let mut v = Vec::with_capacity(pi.len());
            for row in &self.w_num {
                let num: Int = row.iter().zip(&pi).map(|(a, b)| a * b).sum();
                let (qt, r) = num.div_rem(&self.w_den);
                if !r.is_zero() {
                    return;
                }
                v.push(qt);
            }
            if is_root(self.l, &v, &[s]).is_some() {
                out.push(v);
            }
        };
        if self.cinv.is_empty() {
            if rest.is_zero() {
                emit(&[]);
            }
            return;
        }
        if rest.is_negative() {
            return;
        }
        fincke_pohst(&self.cinv, rest, true, |y| {
            emit(y);
            true
        });
    }
}

/// Roots at exactly `level` with `p.v < 0` that are non-obtuse to the
/// level-0 system, before filtering against later accepted roots.
fn level_plan(l: &Lattice, p: &[Int], allowed: &[i64], max_level: &Rat) -> BTreeMap<Rat, Vec<(i64, Int)>> {
    let g = l.products(p).iter().fold(Int::zero(), |acc, x| acc.gcd(x));
    let mut plan: BTreeMap<Rat, Vec<(i64, Int)>> = BTreeMap::new();
    for &s in allowed {
        let step = g.lcm(&int(divisor(s)));
        if step.is_zero() {
            continue;
        }
        // 2c^2/s <= max  <=>  c^2 <= max*s/2
        let bound = (max_level * Rat::new(int(s), int(2))).floor().to_integer();
        let cmax = isqrt(&bound);
        let mut c = step.clone();
        while c <= cmax {
            let level = Rat::new(int(2) * &c * &c, int(s));
            plan.entry(level).or_default().push((s, -c.clone()));
            c += &step;
        }
    }
    plan
}

/// Roots at `level` non-obtuse to `accepted`, in lexicographic order.
pub fn enumerate_level(l: &Lattice, p: &[Int], level: &Rat, allowed: &[i64], accepted: &[Vec<Int>]) -> Result<Vec<(Vec<Int>, i64)>> {
    if !level.is_positive() {
        return Err(Error::Precondition("level must be positive".into()));
    }
    let r0: Vec<Vec<Int>> = initial_simple_system(l, p, allowed).into_iter().map(|r| r.0).collect();
    let search = Search::new(l, p, r0)?;
    let plan = level_plan(l, p, allowed, level);
    let mut found = Vec::new();
    if let Some(pairs) = plan.get(level) {
        for (s, c) in pairs {
            found.extend(search.candidates(*s, c).into_iter().map(|v| (v, *s)));
        }
    }
    found.sort();
    let mut out: Vec<(Vec<Int>, i64)> = Vec::new();
    for (v, s) in found {
        let ok = accepted.iter().chain(out.iter().map(|x| &x.0)).all(|w| !l.dot(&v, w).is_positive());
        if ok {
            out.push((v, s));
        }
    }
    Ok(out)
}

fn level0_name(l: &Lattice, v: &[Int]) -> Option<String> {
    let i = v.iter().position(|x| !x.is_zero())?;
    if v[i] != Int::one() || v.iter().filter(|x| !x.is_zero()).count() != 1 {
        return None;
    }
    let b = l.blocks().iter().find(|b| b.range().contains(&i))?;
    matches!(b.kind, BlockKind::D(_) | BlockKind::E(_)).then(|| l.labels()[i].clone())
}

/// Vinberg's algorithm from `config.base_point`.
pub fn run_vinberg(l: &Lattice, config: &RootConfig) -> Result<RootSequence> {
    config.validate(l)?;
    let p = &config.base_point;
    let allowed = &config.allowed_squares;
    let n = l.rank() - 1;
    let mut counter = 0usize;
    let mut next_name = || {
        counter += 1;
        format!("v{counter}")
    };
    let mut roots = Vec::new();
    let level0 = initial_simple_system(l, p, allowed);
    for (v, s) in &level0 {
        let name = level0_name(l, v).unwrap_or_else(&mut next_name);
        roots.push(Root { name, vector: v.clone(), square: *s, level: Rat::zero() });
    }
    let search = Search::new(l, p, level0.into_iter().map(|r| r.0).collect())?;
    let plan = level_plan(l, p, allowed, &config.max_level);
    let mut levels = Vec::new();
    let mut volume = None;
    let mut status = RunStatus::BudgetExhausted;
    for (level, pairs) in plan {
        let mut found: Vec<(Vec<Int>, i64)> = Vec::new();
        for (s, c) in &pairs {
            found.extend(search.candidates(*s, c).into_iter().map(|v| (v, *s)));
        }
        found.sort();
        let candidates = found.len();
        let mut accepted = 0;
        for (v, s) in found {
            if roots.iter().all(|r: &Root| !l.dot(&v, &r.vector).is_positive()) {
                roots.push(Root { name: next_name(), vector: v, square: s, level: level.clone() });
                accepted += 1;
            }
        }
        if candidates > 0 {
            levels.push(LevelRecord { level: level.to_string(), candidates, accepted });
        }
        if roots.len() > config.max_roots {
            break;
        }
        if accepted > 0 && config.check_volume {
            let names: Vec<String> = roots.iter().map(|r| r.name.clone()).collect();
            let vecs: Vec<Vec<Int>> = roots.iter().map(|r| r.vector.clone()).collect();
            let g = build_graph(l, &names, &vecs)?;
            let report = finite_volume_check(&g, n);
            let done = report.is_finite();
            volume = Some(report);
            if done {
                status = RunStatus::Complete;
                break;
            }
        }
    }
    Ok(RootSequence { config: config.clone(), roots, status, levels, volume })
}
