//! Exact integer and rational matrix routines.
//!
//! Everything here works over `BigInt` / `BigRational`; matrices are plain
//! row-major `Vec<Vec<_>>`. Dimensions in this crate stay below ~30, so the
//! algorithms favour clarity over asymptotics.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Int = BigInt;
pub type Rat = BigRational;
pub type IntMatrix = Vec<Vec<Int>>;
pub type RatMatrix = Vec<Vec<Rat>>;

pub fn int(v: i64) -> Int {
    Int::from(v)
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(Int::from(n), Int::from(d))
}

pub fn rat_int(v: &Int) -> Rat {
    Rat::from_integer(v.clone())
}

pub fn int_matrix(rows: &[&[i64]]) -> IntMatrix {
    rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()
}

pub fn int_vec(v: &[i64]) -> Vec<Int> {
    v.iter().map(|&x| int(x)).collect()
}

pub fn identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { Int::one() } else { Int::zero() }).collect())
        .collect()
}

pub fn zeros(r: usize, c: usize) -> IntMatrix {
    vec![vec![Int::zero(); c]; r]
}

pub fn transpose<T: Clone>(a: &[Vec<T>]) -> Vec<Vec<T>> {
    if a.is_empty() {
        return vec![];
    }
    (0..a[0].len()).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

pub fn mat_mul(a: &[Vec<Int>], b: &[Vec<Int>]) -> IntMatrix {
    let inner = b.len();
    let cols = if inner == 0 { 0 } else { b[0].len() };
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut s = Int::zero();
                    for k in 0..inner {
                        if !row[k].is_zero() && !b[k][j].is_zero() {
                            s += &row[k] * &b[k][j];
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

pub fn mat_vec(a: &[Vec<Int>], x: &[Int]) -> Vec<Int> {
    a.iter().map(|row| dot(row, x)).collect()
}

pub fn dot(x: &[Int], y: &[Int]) -> Int {
    let mut s = Int::zero();
    for (a, b) in x.iter().zip(y) {
        if !a.is_zero() && !b.is_zero() {
            s += a * b;
        }
    }
    s
}

/// `x^T g y` for integer vectors.
pub fn bilinear(g: &[Vec<Int>], x: &[Int], y: &[Int]) -> Int {
    let mut s = Int::zero();
    for (i, xi) in x.iter().enumerate() {
        if xi.is_zero() {
            continue;
        }
        s += xi * dot(&g[i], y);
    }
    s
}

/// `x^T g y` for rational vectors over an integer Gram matrix.
pub fn bilinear_rat(g: &[Vec<Int>], x: &[Rat], y: &[Rat]) -> Rat {
    let mut s = Rat::zero();
    for (i, xi) in x.iter().enumerate() {
        if xi.is_zero() {
            continue;
        }
        let mut row = Rat::zero();
        for (j, yj) in y.iter().enumerate() {
            if !yj.is_zero() && !g[i][j].is_zero() {
                row += yj * rat_int(&g[i][j]);
            }
        }
        s += xi * row;
    }
    s
}

pub fn to_rat_matrix(a: &[Vec<Int>]) -> RatMatrix {
    a.iter().map(|r| r.iter().map(rat_int).collect()).collect()
}

pub fn to_rat_vec(v: &[Int]) -> Vec<Rat> {
    v.iter().map(rat_int).collect()
}

/// Returns the integer vector if every entry is integral.
pub fn integral_vec(v: &[Rat]) -> Option<Vec<Int>> {
    v.iter().map(|x| if x.is_integer() { Some(x.to_integer()) } else { None }).collect()
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn det(a: &[Vec<Int>]) -> Int {
    let n = a.len();
    if n == 0 {
        return Int::one();
    }
    let mut m: IntMatrix = a.to_vec();
    let mut sign = Int::one();
    let mut prev = Int::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return Int::zero();
            };
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * m[n - 1][n - 1].clone()
}

/// Solves `a x = b` over the rationals; `None` when `a` is singular.
pub fn solve_rat(a: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let n = a.len();
    let mut m: Vec<Vec<Rat>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    for col in 0..n {
        let p = (col..n).find(|&i| !m[i][col].is_zero())?;
        m.swap(col, p);
        let piv = m[col][col].clone();
        for j in col..=n {
            m[col][j] = &m[col][j] / &piv;
        }
        for i in 0..n {
            if i != col && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                for j in col..=n {
                    let t = &f * &m[col][j];
                    m[i][j] -= t;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n].clone()).collect())
}

pub fn inverse_rat(a: &[Vec<Rat>]) -> Option<RatMatrix> {
    let n = a.len();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let e: Vec<Rat> = (0..n).map(|i| if i == j { Rat::one() } else { Rat::zero() }).collect();
        cols.push(solve_rat(a, &e)?);
    }
    Some(transpose(&cols))
}

/// Inertia `(positive, negative, zero)` of a symmetric integer matrix via
/// rational congruence diagonalization.
pub fn inertia(a: &[Vec<Int>]) -> (usize, usize, usize) {
    let n = a.len();
    let mut m = to_rat_matrix(a);
    let (mut pos, mut neg, mut zero) = (0, 0, 0);
    for i in 0..n {
        if m[i][i].is_zero() {
            if let Some(j) = (i + 1..n).find(|&j| !m[j][j].is_zero()) {
                m.swap(i, j);
                for row in m.iter_mut() {
                    row.swap(i, j);
                }
            } else if let Some(j) = (i + 1..n).find(|&j| !m[i][j].is_zero()) {
                // row/col i += row/col j makes the pivot 2*m[i][j] != 0
                for k in 0..n {
                    let t = m[j][k].clone();
                    m[i][k] += t;
                }
                for k in 0..n {
                    let t = m[k][j].clone();
                    m[k][i] += t;
                }
            } else {
                zero += 1;
                continue;
            }
        }
        let piv = m[i][i].clone();
        if piv.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        for k in i + 1..n {
            if m[k][i].is_zero() {
                continue;
            }
            let f = &m[k][i] / &piv;
            for l in i..n {
                let t = &f * &m[i][l];
                m[k][l] -= t;
            }
        }
        for k in i + 1..n {
            m[i][k] = Rat::zero();
        }
    }
    (pos, neg, zero)
}

pub fn is_positive_definite(a: &[Vec<Int>]) -> bool {
    // Sylvester: all leading principal minors positive.
    let n = a.len();
    let mut m = to_rat_matrix(a);
    for i in 0..n {
        if !m[i][i].is_positive() {
            return false;
        }
        let piv = m[i][i].clone();
        for k in i + 1..n {
            if m[k][i].is_zero() {
                continue;
            }
            let f = &m[k][i] / &piv;
            for l in i..n {
                let t = &f * &m[i][l];
                m[k][l] -= t;
            }
        }
    }
    true
}

fn swap_cols(m: &mut [Vec<Int>], a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

fn add_row_multiple(m: &mut [Vec<Int>], dst: usize, src: usize, f: &Int) {
    if f.is_zero() {
        return;
    }
    let srow = m[src].clone();
    for (d, s) in m[dst].iter_mut().zip(srow.iter()) {
        if !s.is_zero() {
            *d += f * s;
        }
    }
}

fn add_col_multiple(m: &mut [Vec<Int>], dst: usize, src: usize, f: &Int) {
    if f.is_zero() {
        return;
    }
    for row in m.iter_mut() {
        if !row[src].is_zero() {
            let t = f * &row[src];
            row[dst] += t;
        }
    }
}

/// Smith normal form: returns `(u, d, v)` with `u * a * v = d`, `u`, `v`
/// unimodular and `d` diagonal with non-negative entries `d_0 | d_1 | ...`.
pub fn smith(a: &[Vec<Int>]) -> (IntMatrix, IntMatrix, IntMatrix) {
    let r = a.len();
    let c = if r == 0 { 0 } else { a[0].len() };
    let mut m = a.to_vec();
    let mut u = identity(r);
    let mut v = identity(c);
    for t in 0..r.min(c) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..r {
                for j in t..c {
                    if !m[i][j].is_zero()
                        && best.map_or(true, |(bi, bj)| m[i][j].abs() < m[bi][bj].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else {
                return (u, m, v);
            };
            m.swap(t, bi);
            u.swap(t, bi);
            swap_cols(&mut m, t, bj);
            swap_cols(&mut v, t, bj);
            let mut clean = true;
            for i in t + 1..r {
                if m[i][t].is_zero() {
                    continue;
                }
                let q = -m[i][t].div_floor(&m[t][t]);
                add_row_multiple(&mut m, i, t, &q);
                add_row_multiple(&mut u, i, t, &q);
                if !m[i][t].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..c {
                if m[t][j].is_zero() {
                    continue;
                }
                let q = -m[t][j].div_floor(&m[t][t]);
                add_col_multiple(&mut m, j, t, &q);
                add_col_multiple(&mut v, j, t, &q);
                if !m[t][j].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            let bad = (t + 1..r).find(|&i| (t + 1..c).any(|j| !m[i][j].is_multiple_of(&m[t][t])));
            if let Some(i) = bad {
                let one = Int::one();
                add_row_multiple(&mut m, t, i, &one);
                add_row_multiple(&mut u, t, i, &one);
                continue;
            }
            break;
        }
        if m[t][t].is_negative() {
            for x in m[t].iter_mut() {
                *x = -x.clone();
            }
            for x in u[t].iter_mut() {
                *x = -x.clone();
            }
        }
    }
    (u, m, v)
}

/// Basis of the integer kernel `{x in Z^c : m x = 0}`.
pub fn kernel(m: &[Vec<Int>], c: usize) -> Vec<Vec<Int>> {
    let mut a = m.to_vec();
    let mut v = identity(c);
    let mut pivot = 0;
    for row in 0..a.len() {
        if pivot >= c {
            break;
        }
        // Euclid on columns pivot..c of this row
        loop {
            let mut best: Option<usize> = None;
            for j in pivot..c {
                if !a[row][j].is_zero() && best.map_or(true, |b| a[row][j].abs() < a[row][b].abs()) {
                    best = Some(j);
                }
            }
            let Some(b) = best else { break };
            swap_cols(&mut a, pivot, b);
            swap_cols(&mut v, pivot, b);
            let mut done = true;
            for j in pivot + 1..c {
                if a[row][j].is_zero() {
                    continue;
                }
                let q = -a[row][j].div_floor(&a[row][pivot]);
                add_col_multiple(&mut a, j, pivot, &q);
                add_col_multiple(&mut v, j, pivot, &q);
                if !a[row][j].is_zero() {
                    done = false;
                }
            }
            if done {
                pivot += 1;
                break;
            }
        }
    }
    (pivot..c).map(|j| v.iter().map(|r| r[j].clone()).collect()).collect()
}

/// Echelon basis of the Z-span of the given row vectors.
pub fn row_basis(gens: &[Vec<Int>]) -> Vec<Vec<Int>> {
    if gens.is_empty() {
        return vec![];
    }
    let n = gens[0].len();
    let mut m: IntMatrix = gens.to_vec();
    let mut out = Vec::new();
    let mut start = 0;
    for col in 0..n {
        loop {
            let mut best: Option<usize> = None;
            for i in start..m.len() {
                if !m[i][col].is_zero() && best.map_or(true, |b| m[i][col].abs() < m[b][col].abs()) {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            m.swap(start, b);
            let mut done = true;
            for i in start + 1..m.len() {
                if m[i][col].is_zero() {
                    continue;
                }
                let q = -m[i][col].div_floor(&m[start][col]);
                add_row_multiple(&mut m, i, start, &q);
                if !m[i][col].is_zero() {
                    done = false;
                }
            }
            if done {
                if m[start][col].is_negative() {
                    for x in m[start].iter_mut() {
                        *x = -x.clone();
                    }
                }
                out.push(m[start].clone());
                start += 1;
                break;
            }
        }
    }
    out
}

pub fn rank(rows: &[Vec<Int>]) -> usize {
    row_basis(rows).len()
}

/// LLL reduction of a positive definite Gram matrix. Returns the unimodular
/// transform `t` (rows are the new basis in old coordinates) and the reduced
/// Gram `t * gram * t^T`.
pub fn lll_gram(gram: &[Vec<Int>]) -> (IntMatrix, IntMatrix) {
    let n = gram.len();
    let mut t = identity(n);
    if n <= 1 {
        return (t, gram.to_vec());
    }
    let ip = |t: &IntMatrix, i: usize, j: usize| -> Rat { rat_int(&bilinear(gram, &t[i], &t[j])) };
    let mut mu: Vec<Vec<Rat>> = vec![vec![Rat::zero(); n]; n];
    let mut bb: Vec<Rat> = vec![Rat::zero(); n];
    bb[0] = ip(&t, 0, 0);
    let mut k = 1;
    let mut kmax = 0;
    let half = rat(1, 2);
    let delta = rat(3, 4);
    while k < n {
        if k > kmax {
            kmax = k;
            for j in 0..k {
                let mut s = ip(&t, k, j);
                for i in 0..j {
                    s -= &mu[j][i] * &mu[k][i] * &bb[i];
                }
                mu[k][j] = s / &bb[j];
            }
            let mut s = ip(&t, k, k);
            for j in 0..k {
                s -= &mu[k][j] * &mu[k][j] * &bb[j];
            }
            bb[k] = s;
        }
        let red = |t: &mut IntMatrix, mu: &mut Vec<Vec<Rat>>, k: usize, l: usize| {
            if mu[k][l].abs() > half {
                let q = (&mu[k][l] + &half).floor().to_integer();
                let row_l = t[l].clone();
                for (a, b) in t[k].iter_mut().zip(row_l.iter()) {
                    *a -= &q * b;
                }
                let qr = rat_int(&q);
                mu[k][l] -= &qr;
                for i in 0..l {
                    let d = &qr * &mu[l][i];
                    mu[k][i] -= d;
                }
            }
        };
        red(&mut t, &mut mu, k, k - 1);
        if bb[k] < (&delta - &mu[k][k - 1] * &mu[k][k - 1]) * &bb[k - 1] {
            t.swap(k, k - 1);
            for j in 0..k - 1 {
                let tmp = mu[k][j].clone();
                mu[k][j] = mu[k - 1][j].clone();
                mu[k - 1][j] = tmp;
            }
            let m = mu[k][k - 1].clone();
            let b = &bb[k] + &m * &m * &bb[k - 1];
            mu[k][k - 1] = &m * &bb[k - 1] / &b;
            bb[k] = &bb[k - 1] * &bb[k] / &b;
            bb[k - 1] = b;
            for i in k + 1..=kmax {
                let tt = mu[i][k].clone();
                mu[i][k] = &mu[i][k - 1] - &m * &tt;
                mu[i][k - 1] = &tt + &mu[k][k - 1] * &mu[i][k];
            }
            if k > 1 {
                k -= 1;
            }
        } else {
            for l in (0..k - 1).rev() {
                red(&mut t, &mut mu, k, l);
            }
            k += 1;
        }
    }
    let reduced = mat_mul(&mat_mul(&t, gram), &transpose(&t));
    (t, reduced)
}

pub fn isqrt(n: &Int) -> Int {
    if n.is_negative() {
        return Int::zero();
    }
    n.sqrt()
}

/// Enumerates all integer vectors `x` with `x^T q x <= bound` (or `== bound`
/// when `exact`), for a positive definite rational Gram `q`. The callback
/// returns `false` to stop early.
pub fn fincke_pohst<F>(q: &[Vec<Rat>], bound: &Rat, exact: bool, mut visit: F)
where
    F: FnMut(&[Int]) -> bool,
{
    let n = q.len();
    if n == 0 {
        if bound.is_zero() || (!exact && !bound.is_negative()) {
            visit(&[]);
        }
        return;
    }
    // q(x) = sum_i d_i (x_i + sum_{j>i} mu_ij x_j)^2
    let mut a = q.to_vec();
    let mut d = vec![Rat::zero(); n];
    let mut mu = vec![vec![Rat::zero(); n]; n];
    for i in 0..n {
        d[i] = a[i][i].clone();
        assert!(d[i].is_positive(), "fincke_pohst needs a positive definite form");
        for j in i + 1..n {
            mu[i][j] = &a[i][j] / &d[i];
        }
        for j in i + 1..n {
            for l in i + 1..n {
                let t = &a[j][i] * &a[i][l] / &d[i];
                a[j][l] -= t;
            }
        }
    }
    let mut x = vec![Int::zero(); n];
    fp_rec(n - 1, &d, &mu, bound.clone(), exact, &mut x, &mut visit);
}

fn fp_rec<F>(
    i: usize,
    d: &[Rat],
    mu: &[Vec<Rat>],
    remaining: Rat,
    exact: bool,
    x: &mut Vec<Int>,
    visit: &mut F,
) -> bool
where
    F: FnMut(&[Int]) -> bool,
{
    let n = d.len();
    let mut center = Rat::zero();
    for j in i + 1..n {
        if !x[j].is_zero() {
            center += &mu[i][j] * rat_int(&x[j]);
        }
    }
    let r = &remaining / &d[i];
    let s = isqrt(&r.ceil().to_integer()) + Int::one();
    let lo = (-&center).floor().to_integer() - &s;
    let hi = (-&center).ceil().to_integer() + &s;
    let mut v = lo;
    while v <= hi {
        let shifted = rat_int(&v) + &center;
        let used = &d[i] * &shifted * &shifted;
        if used <= remaining {
            x[i] = v.clone();
            let rest = &remaining - &used;
            if i == 0 {
                if (!exact || rest.is_zero()) && !visit(x) {
                    return false;
                }
            } else if !fp_rec(i - 1, d, mu, rest, exact, x, visit) {
                return false;
            }
        }
        v += 1;
    }
    x[i] = Int::zero();
    true
}
