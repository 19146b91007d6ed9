//! Truncated multivariate Taylor polynomials in three variables.
//!
//! A [`Taylor`] holds `c[α] = ∂^α u / α!` for every multi-index `|α| ≤ order`
//! (at most [`MAX_ORDER`]). Products truncate to the smaller order, and a
//! partial derivative lowers the order by one, so a curvature computation
//! started from an order-`N` metric jet carries exact derivatives of every
//! intermediate quantity as far as the jet allows.

use std::ops::{Add, Mul, Neg, Sub};
use std::sync::LazyLock;

pub const MAX_ORDER: usize = 4;
/// Number of monomials of degree ≤ 4 in three variables.
pub const NCOEF: usize = 35;

pub(crate) struct Tables {
    /// Exponents, graded by total degree.
    pub monomials: Vec<[u8; 3]>,
    /// `offsets[d]` is the number of monomials with degree < d.
    pub offsets: [usize; MAX_ORDER + 2],
    /// (a, b, a+b) index triples sorted by total degree.
    pairs: Vec<(u8, u8, u8)>,
    /// `pair_end[d]` is the number of triples with total degree ≤ d.
    pair_end: [usize; MAX_ORDER + 1],
    /// `shift[i][k]` is the index of monomial k + e_i, if within MAX_ORDER.
    shift: [[Option<u8>; NCOEF]; 3],
    /// Multi-index factorial α! for each monomial.
    pub factorial: [f64; NCOEF],
}

pub(crate) static TABLES: LazyLock<Tables> = LazyLock::new(|| {
    let mut monomials = Vec::with_capacity(NCOEF);
    let mut offsets = [0usize; MAX_ORDER + 2];
    for d in 0..=MAX_ORDER as u8 {
        offsets[d as usize] = monomials.len();
        for a in (0..=d).rev() {
            for b in (0..=d - a).rev() {
                monomials.push([a, b, d - a - b]);
            }
        }
    }
    offsets[MAX_ORDER + 1] = monomials.len();
    assert_eq!(monomials.len(), NCOEF);

    let index = |m: [u8; 3]| monomials.iter().position(|x| *x == m);
    let degree = |m: [u8; 3]| (m[0] + m[1] + m[2]) as usize;

    let mut pairs = Vec::new();
    for (ia, a) in monomials.iter().enumerate() {
        for (ib, b) in monomials.iter().enumerate() {
            let s = [a[0] + b[0], a[1] + b[1], a[2] + b[2]];
            if degree(s) <= MAX_ORDER {
                pairs.push((ia as u8, ib as u8, index(s).unwrap() as u8));
            }
        }
    }
    pairs.sort_by_key(|&(_, _, c)| degree(monomials[c as usize]));
    let mut pair_end = [0usize; MAX_ORDER + 1];
    for (d, end) in pair_end.iter_mut().enumerate() {
        *end = pairs
            .iter()
            .filter(|&&(_, _, c)| degree(monomials[c as usize]) <= d)
            .count();
    }

    let mut shift = [[None; NCOEF]; 3];
    for (axis, row) in shift.iter_mut().enumerate() {
        for (k, m) in monomials.iter().enumerate() {
            let mut s = *m;
            s[axis] += 1;
            if degree(s) <= MAX_ORDER {
                row[k] = Some(index(s).unwrap() as u8);
            }
        }
    }

    let fact = |n: u8| (1..=n as u32).product::<u32>() as f64;
    let mut factorial = [0.0; NCOEF];
    for (k, m) in monomials.iter().enumerate() {
        factorial[k] = fact(m[0]) * fact(m[1]) * fact(m[2]);
    }

    Tables {
        monomials,
        offsets,
        pairs,
        pair_end,
        shift,
        factorial,
    }
});

/// Index of the monomial with the given exponents.
pub(crate) fn monomial_index(exps: [u8; 3]) -> usize {
    TABLES
        .monomials
        .iter()
        .position(|m| *m == exps)
        .expect("monomial degree exceeds MAX_ORDER")
}

/// Index of the monomial ∂_{axes[0]} ∂_{axes[1]} ... (order of axes is irrelevant).
pub(crate) fn multi_index(axes: &[usize]) -> usize {
    let mut e = [0u8; 3];
    for &a in axes {
        e[a] += 1;
    }
    monomial_index(e)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Taylor {
    pub order: u8,
    pub c: [f64; NCOEF],
}

impl Taylor {
    pub fn zero(order: usize) -> Self {
        debug_assert!(order <= MAX_ORDER);
        Taylor {
            order: order as u8,
            c: [0.0; NCOEF],
        }
    }

    pub fn constant(v: f64, order: usize) -> Self {
        let mut t = Taylor::zero(order);
        t.c[0] = v;
        t
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    fn len(&self) -> usize {
        TABLES.offsets[self.order as usize + 1]
    }

    /// Exact partial derivative `∂^α u` at the expansion point for `|α| ≤ order`.
    pub fn partial(&self, axes: &[usize]) -> f64 {
        assert!(axes.len() <= self.order as usize, "derivative beyond jet order");
        let k = multi_index(axes);
        self.c[k] * TABLES.factorial[k]
    }

    /// ∂/∂x_axis as a Taylor polynomial of one lower order.
    pub fn deriv(&self, axis: usize) -> Taylor {
        assert!(self.order > 0, "cannot differentiate an order-0 jet");
        let t = &*TABLES;
        let mut out = Taylor::zero(self.order as usize - 1);
        for k in 0..out.len() {
            let s = t.shift[axis][k].expect("shift within table") as usize;
            out.c[k] = self.c[s] * (t.monomials[k][axis] as f64 + 1.0);
        }
        out
    }

    #[cfg(test)]
    pub fn truncate(&self, order: usize) -> Taylor {
        let mut out = Taylor::zero(order.min(self.order as usize));
        let n = out.len();
        out.c[..n].copy_from_slice(&self.c[..n]);
        out
    }

    pub fn scale(&self, s: f64) -> Taylor {
        let mut out = *self;
        for v in out.c.iter_mut() {
            *v *= s;
        }
        out
    }

    /// Reciprocal via the geometric series in the non-constant part.
    pub fn recip(&self) -> Taylor {
        let a0 = self.c[0];
        assert!(a0 != 0.0, "reciprocal of a jet with zero value");
        let mut u = self.scale(1.0 / a0);
        u.c[0] = 0.0;
        let mut acc = Taylor::constant(1.0, self.order as usize);
        for _ in 0..self.order {
            acc = Taylor::constant(1.0, self.order as usize) - u * acc;
        }
        acc.scale(1.0 / a0)
    }
}

impl Add for Taylor {
    type Output = Taylor;
    fn add(self, rhs: Taylor) -> Taylor {
        let mut out = Taylor::zero(self.order.min(rhs.order) as usize);
        for k in 0..out.len() {
            out.c[k] = self.c[k] + rhs.c[k];
        }
        out
    }
}

impl Sub for Taylor {
    type Output = Taylor;
    fn sub(self, rhs: Taylor) -> Taylor {
        let mut out = Taylor::zero(self.order.min(rhs.order) as usize);
        for k in 0..out.len() {
            out.c[k] = self.c[k] - rhs.c[k];
        }
        out
    }
}

impl Neg for Taylor {
    type Output = Taylor;
    fn neg(self) -> Taylor {
        self.scale(-1.0)
    }
}

impl Mul for Taylor {
    type Output = Taylor;
    fn mul(self, rhs: Taylor) -> Taylor {
        let t = &*TABLES;
        let order = self.order.min(rhs.order) as usize;
        let mut out = Taylor::zero(order);
        for &(a, b, c) in &t.pairs[..t.pair_end[order]] {
            out.c[c as usize] += self.c[a as usize] * rhs.c[b as usize];
        }
        out
    }
}
