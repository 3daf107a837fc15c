//! Discriminant groups `L*/L` with their quadratic forms, and the class
//! invariants `(rho, d, parity)`.
//!
//! The quadratic form is stored via rational lifts: `q(x) = lift(x)^2 mod 2`
//! and `b(x, y) = lift(x).lift(y) mod 1`, both reduced exactly.

use std::fmt;

use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::linalg::{bilinear_rat, int, rat, smith, Int, IntMatrix, Rat};

/// Largest group swept element by element.
pub const MAX_SWEEP_ORDER: u64 = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscGenerator {
    pub order: Int,
    /// Representative in `L (x) Q`, coordinates in the lattice basis.
    pub lift: Vec<Rat>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscriminantGroup {
    gram: IntMatrix,
    pub generators: Vec<DiscGenerator>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ClassInvariants {
    pub rho: usize,
    pub d: usize,
    /// `Even` by convention when `d = 0`.
    pub parity: Parity,
}

impl fmt::Display for ClassInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(rho={}, d={}, {})", self.rho, self.d, self.parity)
    }
}

/// JSON view of a discriminant group.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct DiscriminantSummary {
    pub order: String,
    pub orders: Vec<String>,
    /// `q` of each generator, as `"a/b mod 2"`.
    pub q_values: Vec<String>,
    /// `b` between generators, as `"a/b mod 1"`.
    pub b_values: Vec<Vec<String>>,
}

pub fn mod_rat(x: &Rat, m: i64) -> Rat {
    let m = Rat::from_integer(int(m));
    x - &m * (x / &m).floor()
}

fn fmt_rat(x: &Rat) -> String {
    if x.is_integer() {
        x.to_integer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

impl DiscriminantGroup {
    /// `L*/L` via the Smith normal form of the Gram matrix.
    pub fn of(l: &Lattice) -> Result<Self> {
        let g = l.gram();
        let (_, d, v) = smith(g);
        let n = l.rank();
        let mut generators = Vec::new();
        for i in 0..n {
            let di = d[i][i].clone();
            if di.is_zero() {
                return Err(Error::Degenerate);
            }
            if di.is_one() {
                continue;
            }
            let lift = (0..n).map(|r| Rat::new(v[r][i].clone(), di.clone())).collect();
            generators.push(DiscGenerator { order: di, lift });
        }
        Ok(DiscriminantGroup { gram: g.clone(), generators })
    }

    pub fn order(&self) -> Int {
        self.generators.iter().fold(Int::one(), |acc, g| acc * &g.order)
    }

    pub fn is_trivial(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn orders(&self) -> Vec<Int> {
        self.generators.iter().map(|g| g.order.clone()).collect()
    }

    /// Exponent of the group (lcm of orders).
    pub fn exponent(&self) -> Int {
        self.generators.iter().fold(Int::one(), |acc, g| acc.lcm(&g.order))
    }

    pub fn lift(&self, coeffs: &[Int]) -> Vec<Rat> {
        let n = self.gram.len();
        let mut out = vec![Rat::zero(); n];
        for (c, g) in coeffs.iter().zip(&self.generators) {
            if c.is_zero() {
                continue;
            }
            let cr = Rat::from_integer(c.clone());
            for (o, x) in out.iter_mut().zip(&g.lift) {
                *o += &cr * x;
            }
        }
        out
    }

    /// `q(x)` in `[0, 2)`.
    pub fn q(&self, coeffs: &[Int]) -> Rat {
        let x = self.lift(coeffs);
        mod_rat(&bilinear_rat(&self.gram, &x, &x), 2)
    }

    /// `b(x, y)` in `[0, 1)`.
    pub fn b(&self, x: &[Int], y: &[Int]) -> Rat {
        mod_rat(&bilinear_rat(&self.gram, &self.lift(x), &self.lift(y)), 1)
    }

    /// All elements as coefficient vectors; errors above [`MAX_SWEEP_ORDER`].
    pub fn elements(&self) -> Result<Vec<Vec<Int>>> {
        let order = self.order();
        if order > Int::from(MAX_SWEEP_ORDER) {
            return Err(Error::Budget(format!("discriminant group of order {order} is too large to sweep")));
        }
        let mut out = vec![vec![]];
        for g in &self.generators {
            let k = g.order.to_u64().unwrap_or(0);
            let mut next = Vec::with_capacity(out.len() * k as usize);
            for e in &out {
                for a in 0..k {
                    let mut e2 = e.clone();
                    e2.push(Int::from(a));
                    next.push(e2);
                }
            }
            out = next;
        }
        Ok(out)
    }

    /// The `p`-Sylow subgroup.
    pub fn primary_part(&self, p: u64) -> DiscriminantGroup {
        let p = Int::from(p);
        let mut generators = Vec::new();
        for g in &self.generators {
            let mut pk = Int::one();
            let mut rest = g.order.clone();
            while rest.is_multiple_of(&p) {
                rest /= &p;
                pk *= &p;
            }
            if pk.is_one() {
                continue;
            }
            let rr = Rat::from_integer(rest);
            generators.push(DiscGenerator { order: pk, lift: g.lift.iter().map(|x| x * &rr).collect() });
        }
        DiscriminantGroup { gram: self.gram.clone(), generators }
    }

    /// Prime divisors of the group order.
    pub fn primes(&self) -> Vec<u64> {
        let mut n = self.order();
        let mut out = Vec::new();
        let mut p = Int::from(2);
        while n > Int::one() {
            if n.is_multiple_of(&p) {
                out.push(p.to_u64().unwrap_or(0));
                while n.is_multiple_of(&p) {
                    n /= &p;
                }
            }
            p += 1;
        }
        out
    }

    /// Rank and parity of the 2-primary part; requires it to be
    /// 2-elementary. Parity is checked over every element.
    pub fn two_rank_and_parity(&self) -> Result<(usize, Parity)> {
        let two = self.primary_part(2);
        if two.generators.iter().any(|g| g.order != int(2)) {
            return Err(Error::Precondition("2-primary part is not 2-elementary".into()));
        }
        let d = two.generators.len();
        let odd = two.elements()?.iter().any(|e| !two.q(e).is_integer());
        Ok((d, if odd { Parity::Odd } else { Parity::Even }))
    }

    pub fn summary(&self) -> DiscriminantSummary {
        let unit = |i: usize| -> Vec<Int> {
            (0..self.generators.len()).map(|j| if i == j { Int::one() } else { Int::zero() }).collect()
        };
        let k = self.generators.len();
        DiscriminantSummary {
            order: self.order().to_string(),
            orders: self.generators.iter().map(|g| g.order.to_string()).collect(),
            q_values: (0..k).map(|i| format!("{} mod 2", fmt_rat(&self.q(&unit(i))))).collect(),
            b_values: (0..k)
                .map(|i| (0..k).map(|j| format!("{} mod 1", fmt_rat(&self.b(&unit(i), &unit(j))))).collect())
                .collect(),
        }
    }
}

/// `(rho, d, parity)` for a lattice satisfying the uniqueness preconditions:
/// even, one negative square, discriminant = 2-elementary part plus a `Z/3`
/// carrying the form of `<6>` (`q = 2/3 mod 2`).
pub fn class_invariants(l: &Lattice) -> Result<ClassInvariants> {
    let (_, minus) = l.signature();
    if minus != 1 {
        return Err(Error::Precondition(format!("negative index is {minus}, expected 1")));
    }
    let disc = DiscriminantGroup::of(l)?;
    if let Some(p) = disc.primes().into_iter().find(|&p| p != 2 && p != 3) {
        return Err(Error::Precondition(format!("discriminant has a {p}-primary part")));
    }
    let three = disc.primary_part(3);
    if three.orders() != vec![int(3)] {
        return Err(Error::Precondition(format!(
            "3-primary part has invariant factors {:?}, expected Z/3",
            three.orders().iter().map(|x| x.to_string()).collect::<Vec<_>>()
        )));
    }
    if three.q(&[Int::one()]) != rat(2, 3) {
        return Err(Error::Precondition("3-primary form differs from that of <6>".into()));
    }
    let (d, parity) = disc.two_rank_and_parity()?;
    Ok(ClassInvariants { rho: l.rank(), d, parity })
}
