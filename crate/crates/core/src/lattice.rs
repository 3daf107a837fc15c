//! Even non-degenerate integral lattices given by exact Gram matrices.
//!
//! Gram conventions for the named blocks (all before rescaling/negation):
//!
//! * `U`: `[[0,1],[1,0]]`, generators `u1, u2`.
//! * `A_n`: the chain `a1 - a2 - ... - an`, diagonal 2, neighbours -1.
//! * `D_n`: `d1` is the branch ("central") node joined to `d2, d3, d4`, and
//!   `d4 - d5 - ... - dn` continues as a chain. For `D4` this is the star
//!   with centre `d1`.
//! * `E_n` (n = 6, 7, 8), Bourbaki numbering: the chain
//!   `e1 - e3 - e4 - e5 - e6 - e7 - e8` with `e2` attached to `e4`.
//! * `<k>`: the rank one lattice with Gram `[k]`, generator `x`.
//!
//! Repeated generator names inside a direct sum get prime suffixes
//! (`e1`, `e1'`, `e1''`, ...).

use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::LatticeExpr;
use crate::linalg::{
    bilinear, bilinear_rat, det, identity, inertia, int, kernel, mat_mul, mat_vec, row_basis,
    smith, solve_rat, to_rat_matrix, transpose, Int, IntMatrix, Rat,
};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BlockKind {
    U,
    A(u32),
    D(u32),
    E(u32),
    /// Rank one block `<k>`.
    Diag(i64),
}

impl BlockKind {
    pub fn rank(&self) -> usize {
        match *self {
            BlockKind::U => 2,
            BlockKind::A(n) | BlockKind::D(n) | BlockKind::E(n) => n as usize,
            BlockKind::Diag(_) => 1,
        }
    }

    fn label_prefix(&self) -> &'static str {
        match self {
            BlockKind::U => "u",
            BlockKind::A(_) => "a",
            BlockKind::D(_) => "d",
            BlockKind::E(_) => "e",
            BlockKind::Diag(_) => "x",
        }
    }

    fn base_gram(&self) -> Result<IntMatrix> {
        let edges: Vec<(usize, usize)> = match *self {
            BlockKind::U => return Ok(vec![vec![int(0), int(1)], vec![int(1), int(0)]]),
            BlockKind::Diag(k) => {
                if k % 2 != 0 {
                    return Err(Error::OddDiagonal(k));
                }
                if k == 0 {
                    return Err(Error::Degenerate);
                }
                return Ok(vec![vec![int(k)]]);
            }
            BlockKind::A(n) => {
                if n == 0 {
                    return Err(Error::UnknownBlock("A0".into()));
                }
                (1..n as usize).map(|i| (i - 1, i)).collect()
            }
            BlockKind::D(n) => {
                if n < 3 {
                    return Err(Error::UnknownBlock(format!("D{n}")));
                }
                let n = n as usize;
                let mut e = vec![(0, 1), (0, 2)];
                if n >= 4 {
                    e.push((0, 3));
                }
                for i in 4..n {
                    e.push((i - 1, i));
                }
                e
            }
            BlockKind::E(n) => {
                if !(6..=8).contains(&n) {
                    return Err(Error::UnknownBlock(format!("E{n}")));
                }
                // Bourbaki: 1-3, 3-4, 4-5, 5-6, 6-7, 7-8, 2-4 (1-based)
                let all = [(0, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (1, 3)];
                all.iter().copied().filter(|&(a, b)| a < n as usize && b < n as usize).collect()
            }
        };
        let r = self.rank();
        let mut g = vec![vec![int(0); r]; r];
        for (i, row) in g.iter_mut().enumerate() {
            row[i] = int(2);
        }
        for (a, b) in edges {
            g[a][b] = int(-1);
            g[b][a] = int(-1);
        }
        Ok(g)
    }
}

impl fmt::Display for BlockKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BlockKind::U => write!(f, "U"),
            BlockKind::A(n) => write!(f, "A{n}"),
            BlockKind::D(n) => write!(f, "D{n}"),
            BlockKind::E(n) => write!(f, "E{n}"),
            BlockKind::Diag(k) => write!(f, "<{k}>"),
        }
    }
}

/// One orthogonal summand of a lattice built from named blocks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub kind: BlockKind,
    pub scale: u32,
    pub negated: bool,
    /// Index of the first generator of this block in the ambient basis.
    pub offset: usize,
}

impl Block {
    pub fn rank(&self) -> usize {
        self.kind.rank()
    }

    pub fn range(&self) -> std::ops::Range<usize> {
        self.offset..self.offset + self.rank()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    gram: IntMatrix,
    labels: Vec<String>,
    blocks: Vec<Block>,
    name: Option<String>,
}

/// Result of saturating a set of vectors inside a lattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Saturation {
    pub is_primitive: bool,
    pub index: Int,
    pub basis: Vec<Vec<Int>>,
}

impl Lattice {
    /// Builds a lattice from an explicit Gram matrix, checking symmetry,
    /// evenness and non-degeneracy.
    pub fn new(gram: IntMatrix, labels: Vec<String>) -> Result<Self> {
        let n = gram.len();
        if gram.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension("gram matrix is not square".into()));
        }
        if labels.len() != n {
            return Err(Error::Dimension(format!("{} labels for rank {n}", labels.len())));
        }
        for i in 0..n {
            for j in 0..i {
                if gram[i][j] != gram[j][i] {
                    return Err(Error::NotSymmetric);
                }
            }
            if gram[i][i].is_odd() {
                return Err(Error::NotEven(i));
            }
        }
        if n == 0 || det(&gram).is_zero() {
            return Err(Error::Degenerate);
        }
        Ok(Lattice { gram, labels, blocks: vec![], name: None })
    }

    /// Lattice spanned by the rows of `basis` (coordinates in `self`).
    pub fn sublattice(&self, basis: &[Vec<Int>]) -> Result<Lattice> {
        let g = mat_mul(&mat_mul(basis, &self.gram), &transpose(basis));
        let labels = (1..=basis.len()).map(|i| format!("b{i}")).collect();
        Lattice::new(g, labels)
    }

    /// A named standard block multiplied entrywise by `scale`.
    pub fn standard(kind: BlockKind, scale: u32) -> Result<Self> {
        Self::block(kind, scale, false)
    }

    pub fn block(kind: BlockKind, scale: u32, negated: bool) -> Result<Self> {
        if scale == 0 {
            return Err(Error::Degenerate);
        }
        let mut g = kind.base_gram()?;
        let s = int(scale as i64) * if negated { -1 } else { 1 };
        for row in g.iter_mut() {
            for x in row.iter_mut() {
                *x = &*x * &s;
            }
        }
        let labels = (1..=kind.rank()).map(|i| format!("{}{}", kind.label_prefix(), i)).collect();
        let mut l = Lattice::new(g, labels)?;
        let mut name = kind.to_string();
        if scale != 1 {
            name = format!("{name}({scale})");
        }
        if negated {
            name = format!("-{name}");
        }
        l.name = Some(name);
        l.blocks = vec![Block { kind, scale, negated, offset: 0 }];
        Ok(l)
    }

    pub fn from_expr(text: &str) -> Result<Self> {
        let e: LatticeExpr = text.parse()?;
        e.to_lattice()
    }

    /// Orthogonal direct sum; repeated labels get prime suffixes.
    pub fn direct_sum(parts: &[Lattice]) -> Result<Lattice> {
        if parts.is_empty() {
            return Err(Error::Dimension("empty direct sum".into()));
        }
        let n: usize = parts.iter().map(|p| p.rank()).sum();
        let mut gram = vec![vec![int(0); n]; n];
        let mut labels: Vec<String> = Vec::with_capacity(n);
        let mut blocks = Vec::new();
        let mut off = 0;
        for p in parts {
            let r = p.rank();
            for i in 0..r {
                for j in 0..r {
                    gram[off + i][off + j] = p.gram[i][j].clone();
                }
                let mut l = p.labels[i].clone();
                while labels.contains(&l) {
                    l.push('\'');
                }
                labels.push(l);
            }
            for b in &p.blocks {
                blocks.push(Block { offset: b.offset + off, ..b.clone() });
            }
            off += r;
        }
        let name = parts.iter().map(|p| p.display_name()).collect::<Vec<_>>().join("+");
        let mut l = Lattice::new(gram, labels)?;
        l.blocks = blocks;
        l.name = Some(name);
        Ok(l)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn display_name(&self) -> String {
        self.name.clone().unwrap_or_else(|| format!("L{}", self.rank()))
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn det(&self) -> Int {
        det(&self.gram)
    }

    /// `(n_plus, n_minus)`.
    pub fn signature(&self) -> (usize, usize) {
        let (p, m, _) = inertia(&self.gram);
        (p, m)
    }

    pub fn is_hyperbolic(&self) -> bool {
        self.signature().1 == 1
    }

    pub fn is_positive_definite(&self) -> bool {
        self.signature().1 == 0
    }

    fn check_dim(&self, len: usize) -> Result<()> {
        if len != self.rank() {
            return Err(Error::Dimension(format!("vector of length {len} in rank {}", self.rank())));
        }
        Ok(())
    }

    pub fn inner(&self, x: &[Int], y: &[Int]) -> Result<Int> {
        self.check_dim(x.len())?;
        self.check_dim(y.len())?;
        Ok(bilinear(&self.gram, x, y))
    }

    pub fn inner_rat(&self, x: &[Rat], y: &[Rat]) -> Result<Rat> {
        self.check_dim(x.len())?;
        self.check_dim(y.len())?;
        Ok(bilinear_rat(&self.gram, x, y))
    }

    /// Unchecked inner product for hot loops.
    pub fn dot(&self, x: &[Int], y: &[Int]) -> Int {
        bilinear(&self.gram, x, y)
    }

    pub fn norm(&self, x: &[Int]) -> Int {
        bilinear(&self.gram, x, x)
    }

    /// Products of `x` with every basis vector.
    pub fn products(&self, x: &[Int]) -> Vec<Int> {
        mat_vec(&self.gram, x)
    }

    pub fn basis_vector(&self, i: usize) -> Vec<Int> {
        identity(self.rank()).swap_remove(i)
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Fundamental coweight `x*` dual to generator `name` of block `summand`:
    /// the rational vector inside that block with `x* . y = delta` for the
    /// block generators `y`. For `D4` this gives `d1* = 2d1+d2+d3+d4`.
    pub fn weight_vector(&self, summand: usize, name: &str) -> Result<Vec<Rat>> {
        let b = self
            .blocks
            .get(summand)
            .ok_or_else(|| Error::NoDualVector(summand, name.to_string()))?;
        if !matches!(b.kind, BlockKind::D(_) | BlockKind::E(_) | BlockKind::A(_)) {
            return Err(Error::NoDualVector(summand, name.to_string()));
        }
        let idx = b
            .range()
            .find(|&i| self.labels[i].trim_end_matches(['\'', '*']) == name.trim_end_matches(['\'', '*']))
            .ok_or_else(|| Error::NoDualVector(summand, name.to_string()))?;
        let local = idx - b.offset;
        let sub: Vec<Vec<Int>> =
            b.range().map(|i| b.range().map(|j| self.gram[i][j].clone()).collect()).collect();
        let rhs: Vec<Rat> =
            (0..b.rank()).map(|i| if i == local { Rat::one() } else { Rat::zero() }).collect();
        let sol = solve_rat(&to_rat_matrix(&sub), &rhs).ok_or(Error::Degenerate)?;
        let mut out = vec![Rat::zero(); self.rank()];
        for (k, v) in sol.into_iter().enumerate() {
            out[b.offset + k] = v;
        }
        Ok(out)
    }

    /// Primitive closure of the span of `vectors`.
    pub fn saturation(&self, vectors: &[Vec<Int>]) -> Result<Saturation> {
        for v in vectors {
            self.check_dim(v.len())?;
        }
        let basis = row_basis(vectors);
        if basis.is_empty() {
            return Err(Error::EmptySpan);
        }
        let (_, d, v) = smith(&basis);
        let r = basis.len();
        let mut index = Int::one();
        for i in 0..r {
            index *= d[i][i].abs();
        }
        // rows of v^{-1}: the first r of them span the saturation
        let vinv = crate::linalg::inverse_rat(&to_rat_matrix(&v)).ok_or(Error::Degenerate)?;
        let sat: Vec<Vec<Int>> = vinv[..r]
            .iter()
            .map(|row| row.iter().map(|x| x.to_integer()).collect())
            .collect();
        Ok(Saturation { is_primitive: index.is_one(), index, basis: row_basis(&sat) })
    }

    /// Basis of `{x in L : x.s = 0 for all s}` and the induced lattice.
    pub fn orthogonal_complement(&self, vectors: &[Vec<Int>]) -> Result<(Lattice, Vec<Vec<Int>>)> {
        for v in vectors {
            self.check_dim(v.len())?;
        }
        let span = row_basis(vectors);
        if !span.is_empty() {
            let g = mat_mul(&mat_mul(&span, &self.gram), &transpose(&span));
            if det(&g).is_zero() {
                return Err(Error::Degenerate);
            }
        }
        let rows: Vec<Vec<Int>> = span.iter().map(|s| self.products(s)).collect();
        let basis = kernel(&rows, self.rank());
        let sub = self.sublattice(&basis)?;
        Ok((sub, basis))
    }

    /// Whether `x` lies in the dual lattice `L*` (given in `L (x) Q` coordinates).
    pub fn in_dual(&self, x: &[Rat]) -> bool {
        self.gram.iter().all(|row| {
            let mut s = Rat::zero();
            for (g, xi) in row.iter().zip(x) {
                if !g.is_zero() {
                    s += Rat::from_integer(g.clone()) * xi;
                }
            }
            s.is_integer()
        })
    }

    /// Whether the Gram matrix is divisible by 2 with `G/2` still even, which
    /// forces every norm into `4Z`.
    pub fn norms_divisible_by_four(&self) -> bool {
        let n = self.rank();
        (0..n).all(|i| {
            (0..n).all(|j| self.gram[i][j].is_even()) && self.gram[i][i].is_multiple_of(&int(4))
        })
    }

    pub fn is_negative(&self, x: &[Int]) -> bool {
        self.norm(x).is_negative()
    }
}

impl fmt::Display for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_name())
    }
}
