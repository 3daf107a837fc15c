//! Lattice automorphisms and their action on the 3-primary discriminant.

use num_traits::{One, Signed, Zero};

use crate::coxeter::GraphSymmetry;
use crate::discriminant::DiscriminantGroup;
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::linalg::{
    det, int, inverse_rat, mat_mul, rank, row_basis, transpose, Int, IntMatrix, Rat,
};

/// An isometry of a lattice, stored as the matrix whose `j`-th column is the
/// image of the `j`-th basis vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LatticeAutomorphism {
    matrix: IntMatrix,
}

impl LatticeAutomorphism {
    pub fn identity(n: usize) -> Self {
        LatticeAutomorphism { matrix: crate::linalg::identity(n) }
    }

    /// Checks that `matrix` preserves the Gram matrix of `l` and is unimodular.
    pub fn new(l: &Lattice, matrix: IntMatrix) -> Result<Self> {
        let n = l.rank();
        if matrix.len() != n || matrix.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension(format!("automorphism must be {n}x{n}")));
        }
        let g = LatticeAutomorphism { matrix };
        if !g.preserves_gram(l) {
            return Err(Error::Verification("matrix does not preserve the Gram matrix".into()));
        }
        if !g.det().abs().is_one() {
            return Err(Error::Verification("matrix is not unimodular".into()));
        }
        Ok(g)
    }

    pub fn from_i64(l: &Lattice, rows: &[Vec<i64>]) -> Result<Self> {
        Self::new(l, rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect())
    }

    /// Reflection `x -> x - 2 (x.e / e.e) e`, when it is integral.
    pub fn reflection(l: &Lattice, e: &[Int]) -> Result<Self> {
        let ee = l.norm(e);
        if ee.is_zero() {
            return Err(Error::Precondition("cannot reflect in an isotropic vector".into()));
        }
        let ge = l.products(e);
        let n = l.rank();
        let mut m = crate::linalg::identity(n);
        for (j, gj) in ge.iter().enumerate() {
            let c = Int::from(2) * gj;
            if !(&c % &ee).is_zero() {
                return Err(Error::Precondition("reflection is not integral".into()));
            }
            let c = c / &ee;
            for i in 0..n {
                m[i][j] -= &c * &e[i];
            }
        }
        Self::new(l, m)
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        self.matrix.len()
    }

    pub fn to_i64(&self) -> Result<Vec<Vec<i64>>> {
        self.matrix.iter().map(|r| crate::roots::to_i64s(r)).collect()
    }

    pub fn apply(&self, x: &[Int]) -> Vec<Int> {
        crate::linalg::mat_vec(&self.matrix, x)
    }

    pub fn apply_rat(&self, x: &[Rat]) -> Vec<Rat> {
        self.matrix
            .iter()
            .map(|row| {
                row.iter()
                    .zip(x)
                    .filter(|(a, _)| !a.is_zero())
                    .fold(Rat::zero(), |s, (a, b)| s + Rat::from_integer(a.clone()) * b)
            })
            .collect()
    }

    /// `self` after `other`.
    pub fn compose(&self, other: &LatticeAutomorphism) -> LatticeAutomorphism {
        LatticeAutomorphism { matrix: mat_mul(&self.matrix, &other.matrix) }
    }

    pub fn det(&self) -> Int {
        det(&self.matrix)
    }

    pub fn is_identity(&self) -> bool {
        self.matrix.iter().enumerate().all(|(i, r)| r.iter().enumerate().all(|(j, x)| *x == int((i == j) as i64)))
    }

    pub fn preserves_gram(&self, l: &Lattice) -> bool {
        let m = &self.matrix;
        mat_mul(&mat_mul(&transpose(m), l.gram()), m) == *l.gram()
    }

    /// Whether `p` (of negative square) and its image lie in the same sheet
    /// of the hyperboloid.
    pub fn preserves_sheet(&self, l: &Lattice, p: &[Int]) -> Result<bool> {
        if !l.norm(p).is_negative() {
            return Err(Error::Precondition("test point must have negative square".into()));
        }
        Ok(l.dot(p, &self.apply(p)).is_negative())
    }
}

/// Whether the integer span of `vectors` is all of `l`.
pub fn spans_lattice(l: &Lattice, vectors: &[Vec<Int>]) -> bool {
    let b = row_basis(vectors);
    b.len() == l.rank() && det(&b).abs().is_one()
}

/// The rational linear map sending `domain[i]` to `images[i]`, when the
/// domain has full rank. Returns `None` if the map is inconsistent or not
/// integral. Gram preservation is checked; a map that is integral but not an
/// isometry is an error.
pub fn automorphism_from_images(
    l: &Lattice,
    domain: &[Vec<Int>],
    images: &[Vec<Int>],
) -> Result<Option<LatticeAutomorphism>> {
    let n = l.rank();
    if domain.len() != images.len() {
        return Err(Error::Dimension("domain and image lists differ in length".into()));
    }
    let mut picked: Vec<usize> = Vec::new();
    let mut rows: Vec<Vec<Int>> = Vec::new();
    for (i, v) in domain.iter().enumerate() {
        rows.push(v.clone());
        if rank(&rows) > picked.len() {
            picked.push(i);
            if picked.len() == n {
                break;
            }
        } else {
            rows.pop();
        }
    }
    if picked.len() < n {
        return Err(Error::Precondition(format!("vectors span rank {} < {n}", picked.len())));
    }
    // columns of v are picked domain vectors; M = W V^{-1}
    let v: Vec<Vec<Rat>> = (0..n).map(|r| picked.iter().map(|&i| Rat::from_integer(domain[i][r].clone())).collect()).collect();
    let vinv = inverse_rat(&v).ok_or(Error::Degenerate)?;
    let mut m: IntMatrix = vec![vec![Int::zero(); n]; n];
    for r in 0..n {
        for c in 0..n {
            let mut s = Rat::zero();
            for (k, &i) in picked.iter().enumerate() {
                if !images[i][r].is_zero() && !vinv[k][c].is_zero() {
                    s += Rat::from_integer(images[i][r].clone()) * &vinv[k][c];
                }
            }
            if !s.is_integer() {
                return Ok(None);
            }
            m[r][c] = s.to_integer();
        }
    }
    let g = LatticeAutomorphism { matrix: m };
    if domain.iter().zip(images).any(|(d, im)| g.apply(d) != *im) {
        return Ok(None);
    }
    if !g.preserves_gram(l) {
        return Err(Error::Verification("induced map does not preserve the Gram matrix".into()));
    }
    if !g.det().abs().is_one() {
        return Err(Error::Verification("induced map is not unimodular".into()));
    }
    Ok(Some(g))
}

fn check_symmetry(l: &Lattice, roots: &[Vec<Int>], sigma: &GraphSymmetry) -> Result<()> {
    let k = roots.len();
    let mut seen = vec![false; k];
    if sigma.perm.len() != k || sigma.perm.iter().any(|&j| j >= k || std::mem::replace(&mut seen[j], true)) {
        return Err(Error::Precondition("sigma is not a permutation of the roots".into()));
    }
    for i in 0..k {
        for j in i..k {
            if l.dot(&roots[i], &roots[j]) != l.dot(&roots[sigma.perm[i]], &roots[sigma.perm[j]]) {
                return Err(Error::Precondition(format!("sigma changes the product of roots {i} and {j}")));
            }
        }
    }
    Ok(())
}

/// The unique automorphism extending a symmetry of the Coxeter graph on a
/// root set that spans `l` over the integers.
pub fn automorphism_from_symmetry(
    l: &Lattice,
    roots: &[Vec<Int>],
    sigma: &GraphSymmetry,
) -> Result<LatticeAutomorphism> {
    if !spans_lattice(l, roots) {
        return Err(Error::Precondition("roots do not span the lattice over Z".into()));
    }
    check_symmetry(l, roots, sigma)?;
    let images: Vec<Vec<Int>> = sigma.perm.iter().map(|&j| roots[j].clone()).collect();
    automorphism_from_images(l, roots, &images)?
        .ok_or_else(|| Error::Verification("symmetry of a spanning root set is not integral".into()))
}

/// Like [`automorphism_from_symmetry`], for a root set spanning `l (x) Q`
/// only: returns `None` when the induced map is not integral.
pub fn induced_automorphism(
    l: &Lattice,
    roots: &[Vec<Int>],
    sigma: &GraphSymmetry,
) -> Result<Option<LatticeAutomorphism>> {
    check_symmetry(l, roots, sigma)?;
    let images: Vec<Vec<Int>> = sigma.perm.iter().map(|&j| roots[j].clone()).collect();
    automorphism_from_images(l, roots, &images)
}

/// The character `delta_3 : O(L) -> {+1, -1}` given by the action on the
/// 3-primary part of the discriminant, which must be `Z/3`.
#[derive(Clone, Debug)]
pub struct ThreeCharacter {
    generator: Vec<Rat>,
}

impl ThreeCharacter {
    pub fn of(l: &Lattice) -> Result<Self> {
        let three = DiscriminantGroup::of(l)?.primary_part(3);
        match three.generators.as_slice() {
            [g] if g.order == int(3) => Ok(ThreeCharacter { generator: g.lift.clone() }),
            _ => Err(Error::Precondition("3-primary discriminant is not Z/3".into())),
        }
    }

    pub fn generator(&self) -> &[Rat] {
        &self.generator
    }

    pub fn eval(&self, g: &LatticeAutomorphism) -> Result<i8> {
        let image = g.apply_rat(&self.generator);
        let integral = |sign: i64| {
            image
                .iter()
                .zip(&self.generator)
                .all(|(a, b)| (a - Rat::from_integer(int(sign)) * b).is_integer())
        };
        if integral(1) {
            Ok(1)
        } else if integral(-1) {
            Ok(-1)
        } else {
            Err(Error::Verification("automorphism does not preserve the 3-primary discriminant".into()))
        }
    }
}

pub fn delta3(l: &Lattice, g: &LatticeAutomorphism) -> Result<i8> {
    ThreeCharacter::of(l)?.eval(g)
}

/// Sign read off a 6-root `v` with `v/3` nonzero in the discriminant:
/// `+1` when `v - g(v)` lies in `3L`, `-1` when `v + g(v)` does.
/// `None` when `v` is divisible by 3.
pub fn delta3_by_six_root(g: &LatticeAutomorphism, v: &[Int]) -> Option<i8> {
    let three = int(3);
    if v.iter().all(|x| (x % &three).is_zero()) {
        return None;
    }
    let gv = g.apply(v);
    if v.iter().zip(&gv).all(|(a, b)| ((a - b) % &three).is_zero()) {
        Some(1)
    } else if v.iter().zip(&gv).all(|(a, b)| ((a + b) % &three).is_zero()) {
        Some(-1)
    } else {
        None
    }
}

/// First vector of square 6 in `roots` that is not divisible by 3.
pub fn six_root_witness(l: &Lattice, roots: &[Vec<Int>]) -> Option<usize> {
    let three = int(3);
    roots.iter().position(|v| l.norm(v) == int(6) && v.iter().any(|x| !(x % &three).is_zero()))
}

/// Sign-preserving isometry `id` on the first hyperbolic block and `-id` on
/// every other block.
pub fn block_sign_flip(l: &Lattice) -> Result<LatticeAutomorphism> {
    let blocks = l.blocks();
    let first = blocks
        .iter()
        .position(|b| b.rank() > 0 && l.sublattice(&b.range().map(|i| l.basis_vector(i)).collect::<Vec<_>>()).map_or(false, |s| s.signature().1 > 0))
        .ok_or_else(|| Error::Precondition("no block carries the negative direction".into()))?;
    let n = l.rank();
    let mut m = crate::linalg::identity(n);
    for (k, b) in blocks.iter().enumerate() {
        if k != first {
            for i in b.range() {
                m[i][i] = int(-1);
            }
        }
    }
    LatticeAutomorphism::new(l, m)
}
