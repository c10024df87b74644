//! Exact linear algebra over ℚ.
//!
//! Row spaces are kept in integer echelon form: every stored row is primitive
//! with a positive pivot, and reduction is fraction-free with a tracked scale.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"3"`, `"-1/4"` style literals.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Invalid(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((a, b)) => {
            let a: BigInt = a.trim().parse().map_err(|_| bad())?;
            let b: BigInt = b.trim().parse().map_err(|_| bad())?;
            if b.is_zero() {
                return Err(bad());
            }
            Ok(Q::new(a, b))
        }
        None => Ok(Q::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

pub fn fmt_q(v: &Q) -> String {
    if v.is_integer() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

pub fn fmt_vec(v: &[Q]) -> String {
    let parts: Vec<String> = v.iter().map(fmt_q).collect();
    format!("[{}]", parts.join(","))
}

pub fn is_zero_vec(v: &[Q]) -> bool {
    v.iter().all(|x| x.is_zero())
}

#[derive(Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Q>,
}

impl fmt::Debug for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {}", fmt_vec(self.row(r)))?;
        }
        Ok(())
    }
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix {
            rows,
            cols,
            data: vec![Q::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Q::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Q>>, cols: usize) -> Self {
        let r = rows.len();
        let mut data = Vec::with_capacity(r * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "ragged matrix");
            data.extend(row);
        }
        RationalMatrix {
            rows: r,
            cols,
            data,
        }
    }

    pub fn from_cols(cols: Vec<Vec<Q>>, rows: usize) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.into_iter().enumerate() {
            assert_eq!(c.len(), rows, "ragged matrix");
            for (i, v) in c.into_iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map(|r| r.len()).unwrap_or(0);
        Self::from_rows(
            rows.iter().map(|r| r.iter().map(|&v| q(v)).collect()).collect(),
            cols,
        )
    }

    pub fn get(&self, r: usize, c: usize) -> &Q {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Q) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Q] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn col(&self, c: usize) -> Vec<Q> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                m.set(c, r, self.get(r, c).clone());
            }
        }
        m
    }

    pub fn mul(&self, other: &RationalMatrix) -> RationalMatrix {
        assert_eq!(self.cols, other.rows, "shape mismatch in product");
        let mut m = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let v = m.get(i, j) + a * b;
                        m.set(i, j, v);
                    }
                }
            }
        }
        m
    }

    pub fn apply(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(self.cols, v.len(), "shape mismatch in apply");
        (0..self.rows)
            .map(|i| {
                let mut s = Q::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        s += a * b;
                    }
                }
                s
            })
            .collect()
    }

    pub fn sub(&self, other: &RationalMatrix) -> RationalMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        RationalMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, s: &Q) -> RationalMatrix {
        RationalMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    pub fn hstack(&self, other: &RationalMatrix) -> RationalMatrix {
        assert_eq!(self.rows, other.rows);
        let mut m = Self::zeros(self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                m.set(r, c, self.get(r, c).clone());
            }
            for c in 0..other.cols {
                m.set(r, self.cols + c, other.get(r, c).clone());
            }
        }
        m
    }

    pub fn vstack(&self, other: &RationalMatrix) -> RationalMatrix {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        RationalMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn block_diag(blocks: &[RationalMatrix]) -> RationalMatrix {
        let r: usize = blocks.iter().map(|b| b.rows).sum();
        let c: usize = blocks.iter().map(|b| b.cols).sum();
        let mut m = Self::zeros(r, c);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    m.set(r0 + i, c0 + j, b.get(i, j).clone());
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    pub fn rank(&self) -> usize {
        let mut e = Echelon::new(self.cols);
        for r in 0..self.rows {
            e.insert(self.row(r));
        }
        e.rank()
    }

    /// Rank of the column space (same as `rank`) plus a column-space echelon.
    pub fn column_space(&self) -> Echelon {
        let t = self.transpose();
        let mut e = Echelon::new(self.rows);
        for r in 0..t.rows {
            e.insert(t.row(r));
        }
        e
    }
}

fn lcm_denoms(v: &[Q]) -> BigInt {
    v.iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

fn to_int(v: &[Q]) -> (Vec<BigInt>, BigInt) {
    let d = lcm_denoms(v);
    let w = v.iter().map(|x| (x * Q::from_integer(d.clone())).to_integer()).collect();
    (w, d)
}

fn content(w: &[BigInt]) -> BigInt {
    w.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}

/// Incremental integer row echelon form of a subspace of ℚⁿ.
#[derive(Clone, Debug)]
pub struct Echelon {
    n: usize,
    rows: Vec<Vec<BigInt>>,
    piv: Vec<usize>,
}

impl Echelon {
    pub fn new(n: usize) -> Self {
        Echelon {
            n,
            rows: Vec::new(),
            piv: Vec::new(),
        }
    }

    pub fn from_vectors<'a>(n: usize, vs: impl IntoIterator<Item = &'a Vec<Q>>) -> Self {
        let mut e = Echelon::new(n);
        for v in vs {
            e.insert(v);
        }
        e
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.piv
    }

    /// Reduces `w` in place; returns the scale `s` with `w / s ≡ input` mod the span.
    fn reduce_int(&self, w: &mut [BigInt], mut s: Q) -> Q {
        for (row, &p) in self.rows.iter().zip(&self.piv) {
            if w[p].is_zero() {
                continue;
            }
            let g = row[p].gcd(&w[p]);
            let a = &row[p] / &g;
            let b = &w[p] / &g;
            for k in 0..self.n {
                let rk = &row[k];
                if a.is_one() {
                    if !rk.is_zero() {
                        w[k] -= &b * rk;
                    }
                } else if rk.is_zero() {
                    if !w[k].is_zero() {
                        w[k] *= &a;
                    }
                } else {
                    w[k] = &a * &w[k] - &b * rk;
                }
            }
            s *= Q::from_integer(a);
            let c = content(w);
            if !c.is_zero() && !c.is_one() {
                for x in w.iter_mut() {
                    *x /= &c;
                }
                s /= Q::from_integer(c);
            }
        }
        s
    }

    /// Adds `v` to the span; returns true when the rank grows.
    pub fn insert(&mut self, v: &[Q]) -> bool {
        assert_eq!(v.len(), self.n, "vector length mismatch");
        let (mut w, d) = to_int(v);
        self.reduce_int(&mut w, Q::from_integer(d));
        self.insert_reduced(w)
    }

    fn insert_reduced(&mut self, mut w: Vec<BigInt>) -> bool {
        let Some(p) = w.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let c = content(&w);
        for x in w.iter_mut() {
            *x /= &c;
        }
        if w[p].is_negative() {
            for x in w.iter_mut() {
                *x = -&*x;
            }
        }
        let at = self.piv.partition_point(|&q| q < p);
        self.piv.insert(at, p);
        self.rows.insert(at, w);
        true
    }

    pub fn contains(&self, v: &[Q]) -> bool {
        let (mut w, d) = to_int(v);
        self.reduce_int(&mut w, Q::from_integer(d));
        w.iter().all(|x| x.is_zero())
    }

    /// Canonical representative of `v` modulo the span (zero at every pivot).
    pub fn residual(&self, v: &[Q]) -> Vec<Q> {
        let (mut w, d) = to_int(v);
        let s = self.reduce_int(&mut w, Q::from_integer(d));
        w.into_iter().map(|x| Q::from_integer(x) / &s).collect()
    }

    pub fn basis(&self) -> Vec<Vec<Q>> {
        self.rows
            .iter()
            .map(|r| r.iter().map(|x| Q::from_integer(x.clone())).collect())
            .collect()
    }

    /// Fully reduced rows with unit pivots.
    pub fn reduced(&self) -> Vec<Vec<Q>> {
        let mut rows: Vec<Vec<Q>> = self.basis();
        for i in 0..rows.len() {
            let p = self.piv[i];
            let inv = Q::one() / &rows[i][p];
            for x in rows[i].iter_mut() {
                *x *= &inv;
            }
        }
        for i in (0..rows.len()).rev() {
            let p = self.piv[i];
            for k in 0..i {
                let f = rows[k][p].clone();
                if !f.is_zero() {
                    for j in 0..self.n {
                        if !rows[i][j].is_zero() {
                            let v = &rows[k][j] - &f * &rows[i][j];
                            rows[k][j] = v;
                        }
                    }
                }
            }
        }
        rows
    }

    pub fn is_subspace_of(&self, other: &Echelon) -> bool {
        self.basis().iter().all(|v| other.contains(v))
    }

    pub fn same_span(&self, other: &Echelon) -> bool {
        self.rank() == other.rank() && self.is_subspace_of(other)
    }

    /// First vector of `self` outside `other`, if any.
    pub fn witness_outside(&self, other: &Echelon) -> Option<Vec<Q>> {
        self.basis().into_iter().find(|v| !other.contains(v))
    }
}

/// `(rank, kernel basis)` of `a` acting on column vectors.
pub fn rank_kernel(a: &RationalMatrix) -> (usize, Vec<Vec<Q>>) {
    let mut e = Echelon::new(a.cols);
    for r in 0..a.rows {
        e.insert(a.row(r));
    }
    let red = e.reduced();
    let piv = e.pivots().to_vec();
    let mut ker = Vec::new();
    for f in (0..a.cols).filter(|c| !piv.contains(c)) {
        let mut v = vec![Q::zero(); a.cols];
        v[f] = Q::one();
        for (row, &p) in red.iter().zip(&piv) {
            v[p] = -row[f].clone();
        }
        ker.push(v);
    }
    (e.rank(), ker)
}

/// Inverse of a square matrix, `None` when singular.
pub fn inverse(m: &RationalMatrix) -> Option<RationalMatrix> {
    if m.rows != m.cols {
        return None;
    }
    let n = m.rows;
    let aug = m.hstack(&RationalMatrix::identity(n));
    let mut e = Echelon::new(2 * n);
    for r in 0..n {
        e.insert(aug.row(r));
    }
    if e.rank() < n || e.pivots().iter().any(|&p| p >= n) {
        return None;
    }
    let red = e.reduced();
    Some(RationalMatrix::from_rows(
        red.into_iter().map(|r| r[n..].to_vec()).collect(),
        n,
    ))
}

/// `ℚⁿ / S` with the standard basis vectors at non-pivot positions as basis.
#[derive(Clone, Debug)]
pub struct QuotientSpace {
    pub sub: Echelon,
    pub free: Vec<usize>,
}

impl QuotientSpace {
    pub fn new(sub: Echelon) -> Self {
        let piv = sub.pivots();
        let free = (0..sub.ambient()).filter(|c| !piv.contains(c)).collect();
        QuotientSpace { sub, free }
    }

    pub fn ambient(&self) -> usize {
        self.sub.ambient()
    }

    pub fn dim(&self) -> usize {
        self.free.len()
    }

    pub fn project(&self, v: &[Q]) -> Vec<Q> {
        let r = self.sub.residual(v);
        self.free.iter().map(|&i| r[i].clone()).collect()
    }

    pub fn section(&self, coords: &[Q]) -> Vec<Q> {
        let mut v = vec![Q::zero(); self.ambient()];
        for (&i, c) in self.free.iter().zip(coords) {
            v[i] = c.clone();
        }
        v
    }
}

/// Matrix of the map `ℚⁿ/S₁ → ℚᵐ/S₂` induced by `map`, which must send S₁ into S₂.
pub fn quotient_and_induced_map(
    src: &QuotientSpace,
    dst: &QuotientSpace,
    map: &RationalMatrix,
) -> Result<RationalMatrix> {
    assert_eq!(map.cols, src.ambient());
    assert_eq!(map.rows, dst.ambient());
    for s in src.sub.basis() {
        let img = map.apply(&s);
        if !dst.sub.contains(&img) {
            return Err(Error::IllDefined(vec![fmt_vec(&s), fmt_vec(&img)]));
        }
    }
    let cols = src
        .free
        .iter()
        .map(|&j| {
            let mut e = vec![Q::zero(); src.ambient()];
            e[j] = Q::one();
            dst.project(&map.apply(&e))
        })
        .collect();
    Ok(RationalMatrix::from_cols(cols, dst.dim()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoeqWitness {
    /// A vector of C outside the image of q.
    Cokernel(Vec<Q>),
    /// A vector in ker q outside im(r1 - r2).
    Kernel(Vec<Q>),
}

impl CoeqWitness {
    pub fn describe(&self) -> String {
        match self {
            CoeqWitness::Cokernel(v) => format!("cokernel {}", fmt_vec(v)),
            CoeqWitness::Kernel(v) => format!("kernel {}", fmt_vec(v)),
        }
    }
}

/// Is `A ⇉ B → C` (maps `r1, r2`, then `q`) a coequalizer of vector spaces?
pub fn is_exact_coequalizer(
    r1: &RationalMatrix,
    r2: &RationalMatrix,
    q: &RationalMatrix,
) -> Result<(bool, Option<CoeqWitness>)> {
    if r1.rows != r2.rows || r1.cols != r2.cols || q.cols != r1.rows {
        return Err(Error::Invalid("incompatible shapes".into()));
    }
    if q.mul(r1) != q.mul(r2) {
        return Err(Error::NotAFork);
    }
    let img_q = q.column_space();
    if img_q.rank() < q.rows {
        let w = (0..q.rows)
            .map(|i| {
                let mut e = vec![Q::zero(); q.rows];
                e[i] = Q::one();
                e
            })
            .find(|e| !img_q.contains(e))
            .expect("a standard vector escapes a proper subspace");
        return Ok((false, Some(CoeqWitness::Cokernel(w))));
    }
    let (_, ker) = rank_kernel(q);
    let diff = r1.sub(r2).column_space();
    if diff.rank() == ker.len() {
        return Ok((true, None));
    }
    let w = ker
        .into_iter()
        .find(|k| !diff.contains(k))
        .expect("dimension gap yields a witness");
    Ok((false, Some(CoeqWitness::Kernel(w))))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_and_kernel_basics() {
        let (r, k) = rank_kernel(&RationalMatrix::identity(3));
        assert_eq!((r, k.len()), (3, 0));
        let (r, k) = rank_kernel(&RationalMatrix::zeros(2, 3));
        assert_eq!((r, k.len()), (0, 3));
        let a = RationalMatrix::from_i64(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        let (r, k) = rank_kernel(&a);
        assert_eq!(r, 2);
        assert_eq!(k.len(), 1);
        assert!(is_zero_vec(&a.apply(&k[0])));
    }

    #[test]
    fn quotient_trivial_cases() {
        let zero = QuotientSpace::new(Echelon::new(3));
        assert_eq!(zero.dim(), 3);
        let full = QuotientSpace::new(Echelon::from_vectors(
            2,
            &[vec![q(1), q(0)], vec![q(1), q(1)]],
        ));
        assert_eq!(full.dim(), 0);
        let m = quotient_and_induced_map(&zero, &zero, &RationalMatrix::identity(3)).unwrap();
        assert_eq!(m, RationalMatrix::identity(3));
    }

    #[test]
    fn ill_defined_map_has_witness() {
        let s = QuotientSpace::new(Echelon::from_vectors(2, &[vec![q(1), q(0)]]));
        let t = QuotientSpace::new(Echelon::new(2));
        let err = quotient_and_induced_map(&s, &t, &RationalMatrix::identity(2)).unwrap_err();
        assert!(matches!(err, Error::IllDefined(_)));
    }

    #[test]
    fn coequalizer_examples() {
        let i = RationalMatrix::identity(2);
        assert_eq!(is_exact_coequalizer(&i, &i, &i).unwrap(), (true, None));
        let z = RationalMatrix::zeros(2, 1);
        let proj = RationalMatrix::from_i64(&[&[1, 0]]);
        let (ok, w) = is_exact_coequalizer(&z, &z, &proj).unwrap();
        assert!(!ok);
        assert!(matches!(w, Some(CoeqWitness::Kernel(_))));
        let r1 = RationalMatrix::from_i64(&[&[1], &[0]]);
        assert_eq!(
            is_exact_coequalizer(&r1, &z, &i).unwrap_err(),
            Error::NotAFork
        );
    }

    #[test]
    fn residual_is_canonical() {
        let e = Echelon::from_vectors(3, &[vec![q(2), q(1), q(0)], vec![q(0), q(3), q(1)]]);
        let v = vec![q(1), qf(1, 2), q(7)];
        let w = vec![q(3), q(5), q(8)];
        let r1 = e.residual(&v);
        assert_eq!(r1[0], q(0));
        assert_eq!(r1[1], q(0));
        let sum: Vec<Q> = v.iter().zip(&e.basis()[0]).map(|(a, b)| a + b * q(5)).collect();
        assert_eq!(e.residual(&sum), r1);
        assert!(!e.contains(&w) || e.residual(&w).iter().all(|x| x.is_zero()));
    }

    #[test]
    fn inverse_roundtrip() {
        let a = RationalMatrix::from_i64(&[&[2, 1], &[1, 1]]);
        let b = inverse(&a).unwrap();
        assert_eq!(a.mul(&b), RationalMatrix::identity(2));
        assert!(inverse(&RationalMatrix::from_i64(&[&[1, 2], &[2, 4]])).is_none());
    }

    #[test]
    fn parse_rationals() {
        assert_eq!(parse_q("1/4").unwrap(), qf(1, 4));
        assert_eq!(parse_q("-3").unwrap(), q(-3));
        assert!(parse_q("x").is_err());
        assert!(parse_q("1/0").is_err());
    }
}
