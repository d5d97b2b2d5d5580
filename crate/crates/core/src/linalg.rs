//! Exact linear algebra over the integers and over prime fields.
//!
//! Everything here is deterministic and exact: arbitrary-precision entries,
//! no floating point, a fixed pivot rule (smallest nonzero absolute value,
//! ties broken by lowest `(row, col)`). Smith and Hermite normal forms,
//! saturated kernel bases, exact solving and determinants are the substrate
//! every categorical operation is reduced to.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// The coefficient ring a matrix lives over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BaseRing {
    Integers,
    /// GF(p) for a prime `p`; entries are kept reduced to `[0, p-1]`.
    PrimeField(u64),
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl BaseRing {
    /// A prime field instance; rejects non-prime moduli.
    pub fn prime_field(p: u64) -> Result<BaseRing> {
        if is_prime(p) {
            Ok(BaseRing::PrimeField(p))
        } else {
            Err(Error::Precondition(format!("modulus {p} is not prime")))
        }
    }

    pub fn is_field(&self) -> bool {
        matches!(self, BaseRing::PrimeField(_))
    }

    /// The default field instance: GF(5), small enough to hand-check and
    /// with a unit group of order 4.
    pub fn default_prime_field() -> BaseRing {
        BaseRing::PrimeField(5)
    }

    pub fn modulus(&self) -> Option<u64> {
        match self {
            BaseRing::Integers => None,
            BaseRing::PrimeField(p) => Some(*p),
        }
    }

    /// Canonical representative: identity over Z, reduction to `[0, p-1]` over GF(p).
    pub fn reduce(&self, x: &BigInt) -> BigInt {
        match self {
            BaseRing::Integers => x.clone(),
            BaseRing::PrimeField(p) => x.mod_floor(&BigInt::from(*p)),
        }
    }

    pub fn is_unit(&self, x: &BigInt) -> bool {
        match self {
            BaseRing::Integers => x.abs().is_one(),
            BaseRing::PrimeField(_) => !self.reduce(x).is_zero(),
        }
    }

    /// Multiplicative inverse of a unit, when one exists.
    pub fn inv_unit(&self, x: &BigInt) -> Option<BigInt> {
        match self {
            BaseRing::Integers => {
                if x.abs().is_one() {
                    Some(x.clone())
                } else {
                    None
                }
            }
            BaseRing::PrimeField(p) => {
                let m = BigInt::from(*p);
                let r = self.reduce(x);
                if r.is_zero() {
                    return None;
                }
                let e = r.extended_gcd(&m);
                if e.gcd.is_one() {
                    Some(e.x.mod_floor(&m))
                } else {
                    None
                }
            }
        }
    }
}

/// A dense matrix over a [`BaseRing`], row-major. Zero-row and zero-column
/// matrices are legal values everywhere.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    ring: BaseRing,
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl Matrix {
    pub fn new(ring: BaseRing, rows: usize, cols: usize, entries: Vec<BigInt>) -> Matrix {
        assert_eq!(entries.len(), rows * cols, "entry count must be rows*cols");
        let entries = entries.into_iter().map(|e| ring.reduce(&e)).collect();
        Matrix {
            ring,
            rows,
            cols,
            entries,
        }
    }

    pub fn from_fn(
        ring: BaseRing,
        rows: usize,
        cols: usize,
        f: impl Fn(usize, usize) -> BigInt,
    ) -> Matrix {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Matrix::new(ring, rows, cols, entries)
    }

    pub fn from_i64(ring: BaseRing, rows: usize, cols: usize, entries: &[i64]) -> Matrix {
        Matrix::new(
            ring,
            rows,
            cols,
            entries.iter().map(|&e| BigInt::from(e)).collect(),
        )
    }

    pub fn zero(ring: BaseRing, rows: usize, cols: usize) -> Matrix {
        Matrix {
            ring,
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(ring: BaseRing, n: usize) -> Matrix {
        Matrix::from_fn(ring, n, n, |i, j| {
            if i == j {
                BigInt::one()
            } else {
                BigInt::zero()
            }
        })
    }

    pub fn ring(&self) -> BaseRing {
        self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &BigInt {
        debug_assert!(i < self.rows && j < self.cols);
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        debug_assert!(i < self.rows && j < self.cols);
        self.entries[i * self.cols + j] = self.ring.reduce(&v);
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.ring, other.ring, "ring mismatch in matrix product");
        assert_eq!(
            self.cols, other.rows,
            "inner dimension mismatch in matrix product"
        );
        let mut out = Matrix::zero(self.ring, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.at(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let cur = out.at(i, j) + a * b;
                    out.set(i, j, cur);
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.ring, other.ring);
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix::from_fn(self.ring, self.rows, self.cols, |i, j| {
            self.at(i, j) + other.at(i, j)
        })
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.ring, other.ring);
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix::from_fn(self.ring, self.rows, self.cols, |i, j| {
            self.at(i, j) - other.at(i, j)
        })
    }

    pub fn neg(&self) -> Matrix {
        Matrix::from_fn(self.ring, self.rows, self.cols, |i, j| -self.at(i, j))
    }

    pub fn scale(&self, c: &BigInt) -> Matrix {
        Matrix::from_fn(self.ring, self.rows, self.cols, |i, j| self.at(i, j) * c)
    }

    /// Side-by-side concatenation `[self | other]`.
    pub fn hstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.ring, other.ring);
        assert_eq!(self.rows, other.rows, "hstack needs equal row counts");
        Matrix::from_fn(self.ring, self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self.at(i, j).clone()
            } else {
                other.at(i, j - self.cols).clone()
            }
        })
    }

    /// Stacked concatenation, `self` on top of `other`.
    pub fn vstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.ring, other.ring);
        assert_eq!(self.cols, other.cols, "vstack needs equal column counts");
        Matrix::from_fn(self.ring, self.rows + other.rows, self.cols, |i, j| {
            if i < self.rows {
                self.at(i, j).clone()
            } else {
                other.at(i - self.rows, j).clone()
            }
        })
    }

    pub fn block_diag(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.ring, other.ring);
        Matrix::from_fn(
            self.ring,
            self.rows + other.rows,
            self.cols + other.cols,
            |i, j| {
                if i < self.rows && j < self.cols {
                    self.at(i, j).clone()
                } else if i >= self.rows && j >= self.cols {
                    other.at(i - self.rows, j - self.cols).clone()
                } else {
                    BigInt::zero()
                }
            },
        )
    }

    pub fn row_slice(&self, from: usize, to: usize) -> Matrix {
        assert!(from <= to && to <= self.rows);
        Matrix::from_fn(self.ring, to - from, self.cols, |i, j| {
            self.at(from + i, j).clone()
        })
    }

    pub fn col_slice(&self, from: usize, to: usize) -> Matrix {
        assert!(from <= to && to <= self.cols);
        Matrix::from_fn(self.ring, self.rows, to - from, |i, j| {
            self.at(i, from + j).clone()
        })
    }

    pub fn column(&self, j: usize) -> Matrix {
        self.col_slice(j, j + 1)
    }

    // elementary operations (used by the normal forms)

    fn swap_rows(&mut self, i1: usize, i2: usize) {
        if i1 == i2 {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(i1 * self.cols + j, i2 * self.cols + j);
        }
    }

    fn swap_cols(&mut self, j1: usize, j2: usize) {
        if j1 == j2 {
            return;
        }
        for i in 0..self.rows {
            self.entries.swap(i * self.cols + j1, i * self.cols + j2);
        }
    }

    /// row_i += c * row_j
    fn add_row_multiple(&mut self, i: usize, j: usize, c: &BigInt) {
        debug_assert_ne!(i, j);
        if c.is_zero() {
            return;
        }
        for k in 0..self.cols {
            let v = self.at(i, k) + c * self.at(j, k);
            self.set(i, k, v);
        }
    }

    /// col_j += c * col_i
    fn add_col_multiple(&mut self, j: usize, i: usize, c: &BigInt) {
        debug_assert_ne!(i, j);
        if c.is_zero() {
            return;
        }
        for k in 0..self.rows {
            let v = self.at(k, j) + c * self.at(k, i);
            self.set(k, j, v);
        }
    }

    /// row_i *= c, for a unit c.
    fn scale_row(&mut self, i: usize, c: &BigInt) {
        for k in 0..self.cols {
            let v = self.at(i, k) * c;
            self.set(i, k, v);
        }
    }

    /// col_j *= c, for a unit c.
    fn scale_col(&mut self, j: usize, c: &BigInt) {
        for k in 0..self.rows {
            let v = self.at(k, j) * c;
            self.set(k, j, v);
        }
    }
}

/// Quotient minimizing the remainder's absolute value (round-to-nearest).
fn symmetric_quotient(a: &BigInt, b: &BigInt) -> BigInt {
    let (mut q, r) = a.div_rem(b);
    if r.abs() * 2 > b.abs() {
        if (r < BigInt::zero()) == (b < &BigInt::zero()) {
            q += 1;
        } else {
            q -= 1;
        }
    }
    q
}

/// `U * A * V = D` with `U`, `V` invertible (unimodular over Z) and `D`
/// diagonal with a divisibility chain `d1 | d2 | ...` of positive divisors.
#[derive(Debug, Clone)]
pub struct SnfDecomposition {
    pub u: Matrix,
    pub d: Matrix,
    pub v: Matrix,
    pub divisors: Vec<BigInt>,
}

/// Pivot rule shared by the normal forms: smallest nonzero absolute value in
/// the block, ties broken by lowest `(row, col)`.
fn min_abs_pivot(m: &Matrix, row_from: usize, col_from: usize) -> Option<(usize, usize)> {
    let mut best: Option<(BigInt, usize, usize)> = None;
    for i in row_from..m.rows() {
        for j in col_from..m.cols() {
            let e = m.at(i, j);
            if e.is_zero() {
                continue;
            }
            let a = e.abs();
            match &best {
                Some((cur, _, _)) if *cur <= a => {}
                _ => best = Some((a, i, j)),
            }
        }
    }
    best.map(|(_, i, j)| (i, j))
}

pub fn snf(a: &Matrix) -> SnfDecomposition {
    let ring = a.ring();
    let (rows, cols) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut u = Matrix::identity(ring, rows);
    let mut v = Matrix::identity(ring, cols);
    let mut k = 0usize;

    while k < rows.min(cols) {
        let Some((pi, pj)) = min_abs_pivot(&d, k, k) else {
            break;
        };
        d.swap_rows(k, pi);
        u.swap_rows(k, pi);
        d.swap_cols(k, pj);
        v.swap_cols(k, pj);

        if ring.is_field() {
            let inv = ring
                .inv_unit(&d.at(k, k).clone())
                .expect("nonzero field entry is a unit");
            d.scale_row(k, &inv);
            u.scale_row(k, &inv);
            for i in k + 1..rows {
                let c = -d.at(i, k).clone();
                d.add_row_multiple(i, k, &c);
                u.add_row_multiple(i, k, &c);
            }
            for j in k + 1..cols {
                let c = -d.at(k, j).clone();
                d.add_col_multiple(j, k, &c);
                v.add_col_multiple(j, k, &c);
            }
            k += 1;
            continue;
        }

        loop {
            // clear the pivot column, then the pivot row, re-pivoting on any
            // remainder so the pivot's absolute value strictly decreases
            let mut clean = true;
            for i in k + 1..rows {
                if d.at(i, k).is_zero() {
                    continue;
                }
                let q = -symmetric_quotient(d.at(i, k), d.at(k, k));
                d.add_row_multiple(i, k, &q);
                u.add_row_multiple(i, k, &q);
                if !d.at(i, k).is_zero() {
                    clean = false;
                }
            }
            if !clean {
                let (pi, pj) = min_abs_pivot(&d, k, k).expect("block cannot vanish mid-step");
                d.swap_rows(k, pi);
                u.swap_rows(k, pi);
                d.swap_cols(k, pj);
                v.swap_cols(k, pj);
                continue;
            }
            for j in k + 1..cols {
                if d.at(k, j).is_zero() {
                    continue;
                }
                let q = -symmetric_quotient(d.at(k, j), d.at(k, k));
                d.add_col_multiple(j, k, &q);
                v.add_col_multiple(j, k, &q);
                if !d.at(k, j).is_zero() {
                    clean = false;
                }
            }
            if !clean {
                let (pi, pj) = min_abs_pivot(&d, k, k).expect("block cannot vanish mid-step");
                d.swap_rows(k, pi);
                u.swap_rows(k, pi);
                d.swap_cols(k, pj);
                v.swap_cols(k, pj);
                continue;
            }
            // row and column are clear; enforce divisibility of the rest
            let mut offender = None;
            'scan: for i in k + 1..rows {
                for j in k + 1..cols {
                    if !d.at(i, j).mod_floor(d.at(k, k)).is_zero() {
                        offender = Some(i);
                        break 'scan;
                    }
                }
            }
            match offender {
                Some(i) => {
                    let one = BigInt::one();
                    d.add_row_multiple(k, i, &one);
                    u.add_row_multiple(k, i, &one);
                }
                None => break,
            }
        }
        if d.at(k, k).is_negative() {
            let m1 = BigInt::from(-1);
            d.scale_row(k, &m1);
            u.scale_row(k, &m1);
        }
        k += 1;
    }

    let mut divisors = Vec::new();
    for i in 0..rows.min(cols) {
        if d.at(i, i).is_zero() {
            break;
        }
        divisors.push(d.at(i, i).clone());
    }
    SnfDecomposition { u, d, v, divisors }
}

/// Column Hermite form `H = A * V` with `V` invertible (unimodular over Z):
/// column echelon, pivots positive over Z (equal to 1 over a prime field),
/// entries left of a pivot reduced modulo the pivot (to zero over a field),
/// zero columns pushed to the right.
pub fn hnf(a: &Matrix) -> (Matrix, Matrix) {
    let (h, v, _) = hnf_with_pivots(a);
    (h, v)
}

pub(crate) fn hnf_with_pivots(a: &Matrix) -> (Matrix, Matrix, Vec<usize>) {
    let ring = a.ring();
    let (rows, cols) = (a.rows(), a.cols());
    let mut h = a.clone();
    let mut v = Matrix::identity(ring, cols);
    let mut pivot_rows = Vec::new();
    let mut r = 0usize;

    for i in 0..rows {
        if r == cols {
            break;
        }
        if (r..cols).all(|j| h.at(i, j).is_zero()) {
            continue;
        }
        if ring.is_field() {
            let j0 = (r..cols).find(|&j| !h.at(i, j).is_zero()).unwrap();
            h.swap_cols(r, j0);
            v.swap_cols(r, j0);
            let inv = ring.inv_unit(&h.at(i, r).clone()).unwrap();
            h.scale_col(r, &inv);
            v.scale_col(r, &inv);
            for j in 0..cols {
                if j == r || h.at(i, j).is_zero() {
                    continue;
                }
                let c = -h.at(i, j).clone();
                h.add_col_multiple(j, r, &c);
                v.add_col_multiple(j, r, &c);
            }
        } else {
            loop {
                let jmin = (r..cols)
                    .filter(|&j| !h.at(i, j).is_zero())
                    .min_by_key(|&j| (h.at(i, j).abs(), j))
                    .unwrap();
                h.swap_cols(r, jmin);
                v.swap_cols(r, jmin);
                let mut clean = true;
                for j in r + 1..cols {
                    if h.at(i, j).is_zero() {
                        continue;
                    }
                    let q = -symmetric_quotient(h.at(i, j), h.at(i, r));
                    h.add_col_multiple(j, r, &q);
                    v.add_col_multiple(j, r, &q);
                    if !h.at(i, j).is_zero() {
                        clean = false;
                    }
                }
                if clean {
                    break;
                }
            }
            if h.at(i, r).is_negative() {
                let m1 = BigInt::from(-1);
                h.scale_col(r, &m1);
                v.scale_col(r, &m1);
            }
            for j in 0..r {
                let q = -h.at(i, j).div_floor(h.at(i, r));
                h.add_col_multiple(j, r, &q);
                v.add_col_multiple(j, r, &q);
            }
        }
        pivot_rows.push(i);
        r += 1;
    }
    (h, v, pivot_rows)
}

pub fn rank(a: &Matrix) -> usize {
    hnf_with_pivots(a).2.len()
}

/// Columns generating the full solution set of `A x = 0`.
///
/// Over the integers the columns generate the *saturated* kernel lattice:
/// every integer solution is an integer combination of them. The number of
/// columns is `cols(A) - rank(A)`.
pub fn kernel_basis(a: &Matrix) -> Matrix {
    let (_, v, pivots) = hnf_with_pivots(a);
    v.col_slice(pivots.len(), a.cols())
}

/// Exact solution `X` of `A X = B`, if one exists. Absence is a normal
/// outcome (e.g. a divisibility obstruction over Z), not an error.
pub fn solve_matrix(a: &Matrix, b: &Matrix) -> Option<Matrix> {
    assert_eq!(a.ring(), b.ring(), "ring mismatch in solve");
    assert_eq!(a.rows(), b.rows(), "row mismatch in solve");
    let ring = a.ring();
    let (h, v, pivots) = hnf_with_pivots(a);
    let mut x = Matrix::zero(ring, a.cols(), b.cols());

    for bc in 0..b.cols() {
        let mut res: Vec<BigInt> = (0..b.rows()).map(|i| b.at(i, bc).clone()).collect();
        let mut y = vec![BigInt::zero(); a.cols()];
        let mut t = 0usize;
        for i in 0..a.rows() {
            if t < pivots.len() && pivots[t] == i {
                let c = h.at(i, t);
                let q = match ring {
                    BaseRing::Integers => {
                        let (q, r) = res[i].div_rem(c);
                        if !r.is_zero() {
                            return None;
                        }
                        q
                    }
                    BaseRing::PrimeField(_) => {
                        let inv = ring
                            .inv_unit(c)
                            .expect("Hermite pivot is a unit over a field");
                        ring.reduce(&(&res[i] * inv))
                    }
                };
                if !q.is_zero() {
                    for (row, r) in res.iter_mut().enumerate().skip(i) {
                        let upd = &*r - &q * h.at(row, t);
                        *r = ring.reduce(&upd);
                    }
                }
                y[t] = q;
                t += 1;
            } else if !ring.reduce(&res[i]).is_zero() {
                return None;
            }
        }
        for xr in 0..a.cols() {
            let mut acc = BigInt::zero();
            for (t, yt) in y.iter().enumerate() {
                if !yt.is_zero() {
                    acc += v.at(xr, t) * yt;
                }
            }
            x.set(xr, bc, acc);
        }
    }
    Some(x)
}

/// Exact determinant by fraction-free (Bareiss) elimination.
pub fn det(a: &Matrix) -> Result<BigInt> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "determinant of a {}x{} matrix",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    if n == 0 {
        return Ok(BigInt::one());
    }
    let mut m: Vec<Vec<BigInt>> = (0..n)
        .map(|i| (0..n).map(|j| a.at(i, j).clone()).collect())
        .collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return Ok(BigInt::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = num / &prev;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    Ok(a.ring().reduce(&(sign * m[n - 1][n - 1].clone())))
}

/// Invertibility over the ring: determinant in {+1, -1} over Z, any nonzero
/// determinant over a prime field.
pub fn is_unimodular(a: &Matrix) -> bool {
    if !a.is_square() {
        return false;
    }
    match det(a) {
        Ok(d) => a.ring().is_unit(&d),
        Err(_) => false,
    }
}

/// Whether `b` lies in the column span of `a` over the ring.
pub fn column_span_membership(a: &Matrix, b: &Matrix) -> bool {
    solve_matrix(a, b).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn z() -> BaseRing {
        BaseRing::Integers
    }

    fn gf(p: u64) -> BaseRing {
        BaseRing::prime_field(p).unwrap()
    }

    fn check_snf(a: &Matrix) {
        let s = snf(a);
        assert_eq!(s.u.mul(a).mul(&s.v), s.d, "U*A*V = D must hold exactly");
        assert!(is_unimodular(&s.u), "U unimodular");
        assert!(is_unimodular(&s.v), "V unimodular");
        for w in s.divisors.windows(2) {
            assert!(w[1].mod_floor(&w[0]).is_zero(), "divisibility chain");
        }
        for d in &s.divisors {
            assert!(d > &BigInt::zero(), "divisors positive");
        }
        assert_eq!(s.divisors.len(), rank(a), "rank = number of divisors");
        if a.is_square() && a.ring() == BaseRing::Integers {
            let product: BigInt = s.divisors.iter().product();
            let expect = if s.divisors.len() == a.rows() {
                product
            } else {
                BigInt::zero()
            };
            assert_eq!(det(a).unwrap().abs(), expect.abs());
        }
    }

    fn check_hnf(a: &Matrix) {
        let (h, v) = hnf(a);
        assert_eq!(a.mul(&v), h, "H = A*V must hold exactly");
        assert!(is_unimodular(&v));
        // echelon structure
        let (_, _, pivots) = hnf_with_pivots(a);
        for (t, &i) in pivots.iter().enumerate() {
            let p = h.at(i, t);
            assert!(p > &BigInt::zero());
            if a.ring().is_field() {
                assert!(p.is_one());
            }
            for j in t + 1..h.cols() {
                assert!(h.at(i, j).is_zero(), "right of pivot is zero");
            }
            for j in 0..t {
                let e = h.at(i, j);
                assert!(e >= &BigInt::zero() && e < p, "left of pivot reduced");
            }
            for above in 0..i {
                if !pivots[..t].contains(&above) {
                    assert!(h.at(above, t).is_zero(), "echelon above pivot");
                }
            }
        }
        for j in pivots.len()..h.cols() {
            for i in 0..h.rows() {
                assert!(h.at(i, j).is_zero(), "trailing columns zero");
            }
        }
    }

    #[test]
    fn snf_2x2_example() {
        let a = Matrix::from_i64(z(), 2, 2, &[2, 4, 6, 8]);
        let s = snf(&a);
        assert_eq!(
            s.divisors,
            vec![BigInt::from(2), BigInt::from(4)],
            "diag(2,4): gcd of entries is 2, |det| = 8 preserved"
        );
        assert_eq!(det(&a).unwrap().abs(), BigInt::from(8));
        check_snf(&a);
    }

    #[test]
    fn snf_zero_matrix() {
        let a = Matrix::zero(z(), 2, 3);
        let s = snf(&a);
        assert!(s.d.is_zero());
        assert!(s.divisors.is_empty());
        check_snf(&a);
    }

    #[test]
    fn snf_identity() {
        let a = Matrix::identity(z(), 3);
        let s = snf(&a);
        assert_eq!(s.d, a);
        assert_eq!(s.divisors, vec![BigInt::one(); 3]);
    }

    #[test]
    fn snf_field_divisors_are_one() {
        let a = Matrix::from_i64(gf(5), 3, 3, &[2, 4, 1, 0, 3, 3, 1, 1, 4]);
        let s = snf(&a);
        for d in &s.divisors {
            assert!(d.is_one());
        }
        check_snf(&a);
    }

    #[test]
    fn hnf_identity() {
        let a = Matrix::identity(z(), 3);
        let (h, v) = hnf(&a);
        assert_eq!(h, a);
        assert_eq!(v, a);
    }

    #[test]
    fn hnf_row_gcd_pivot() {
        let a = Matrix::from_i64(z(), 1, 2, &[4, 2]);
        let (h, _) = hnf(&a);
        assert_eq!(
            h,
            Matrix::from_i64(z(), 1, 2, &[2, 0]),
            "gcd appears as sole pivot"
        );
        check_hnf(&a);
    }

    #[test]
    fn hnf_field_pivots_one() {
        let a = Matrix::from_i64(gf(7), 2, 3, &[3, 1, 4, 2, 6, 5]);
        check_hnf(&a);
    }

    #[test]
    fn kernel_of_sum_map() {
        let a = Matrix::from_i64(z(), 1, 2, &[1, 1]);
        let k = kernel_basis(&a);
        assert_eq!(k.cols(), 1);
        let v0 = k.at(0, 0).clone();
        let v1 = k.at(1, 0).clone();
        assert_eq!(v0.abs(), BigInt::one(), "spans (1,-1) up to sign");
        assert_eq!(v0 + v1, BigInt::zero());
        // small integer solutions are generated by the basis
        for c0 in -3i64..=3 {
            for c1 in -3i64..=3 {
                if c0 + c1 == 0 {
                    let sol = Matrix::from_i64(z(), 2, 1, &[c0, c1]);
                    assert!(column_span_membership(&k, &sol));
                }
            }
        }
    }

    #[test]
    fn kernel_of_invertible_is_empty() {
        let a = Matrix::from_i64(z(), 2, 2, &[2, 1, 1, 1]);
        assert_eq!(kernel_basis(&a).cols(), 0);
    }

    #[test]
    fn kernel_of_field_unit_is_empty() {
        let a = Matrix::from_i64(gf(5), 1, 1, &[2]);
        assert_eq!(kernel_basis(&a).cols(), 0, "2 is a unit in GF(5)");
    }

    #[test]
    fn solve_identity() {
        let a = Matrix::identity(z(), 2);
        let b = Matrix::from_i64(z(), 2, 2, &[7, -3, 0, 11]);
        assert_eq!(solve_matrix(&a, &b), Some(b));
    }

    #[test]
    fn solve_divisibility_obstruction() {
        let a = Matrix::from_i64(z(), 1, 1, &[2]);
        let b = Matrix::from_i64(z(), 1, 1, &[3]);
        assert_eq!(solve_matrix(&a, &b), None);
    }

    #[test]
    fn solve_in_prime_field() {
        let a = Matrix::from_i64(gf(5), 1, 1, &[2]);
        let b = Matrix::from_i64(gf(5), 1, 1, &[3]);
        let x = solve_matrix(&a, &b).unwrap();
        // exhaustive oracle over GF(5): 2*4 = 8 = 3 is the unique solution
        let mut expected = None;
        for c in 0..5i64 {
            if (2 * c) % 5 == 3 {
                expected = Some(c);
            }
        }
        assert_eq!(x.at(0, 0), &BigInt::from(expected.unwrap()));
    }

    #[test]
    fn det_examples() {
        assert_eq!(det(&Matrix::identity(z(), 4)).unwrap(), BigInt::one());
        // the matrix arising in the change-of-splitting computation for the
        // (i_r, i_l; -p_l, p_r) double sequence
        let a = Matrix::from_i64(z(), 2, 2, &[0, -1, 1, 0]);
        assert_eq!(det(&a).unwrap(), BigInt::one());
        assert!(det(&Matrix::zero(z(), 2, 3)).is_err());
    }

    #[test]
    fn membership_divisibility() {
        let a = Matrix::from_i64(z(), 2, 1, &[2, 0]);
        let b = Matrix::from_i64(z(), 2, 1, &[1, 0]);
        assert!(!column_span_membership(&a, &b));
        let c = Matrix::from_i64(z(), 2, 1, &[-6, 0]);
        assert!(column_span_membership(&a, &c));
    }

    #[test]
    fn snf_determinantal_divisor_oracle() {
        // independent oracle: the k-th determinantal divisor (gcd of all k x k
        // minors) equals d1*...*dk
        fn minors_gcd(a: &Matrix, k: usize) -> BigInt {
            fn combos(n: usize, k: usize) -> Vec<Vec<usize>> {
                if k == 0 {
                    return vec![vec![]];
                }
                if n < k {
                    return vec![];
                }
                let mut out = combos(n - 1, k);
                for mut c in combos(n - 1, k - 1) {
                    c.push(n - 1);
                    out.push(c);
                }
                out
            }
            let mut g = BigInt::zero();
            for rs in combos(a.rows(), k) {
                for cs in combos(a.cols(), k) {
                    let m = Matrix::from_fn(a.ring(), k, k, |i, j| a.at(rs[i], cs[j]).clone());
                    g = g.gcd(&det(&m).unwrap());
                }
            }
            g
        }
        let samples = [
            Matrix::from_i64(z(), 2, 2, &[2, 4, 6, 8]),
            Matrix::from_i64(z(), 3, 3, &[2, 0, 0, 0, 3, 0, 0, 0, 0]),
            Matrix::from_i64(z(), 3, 4, &[6, 4, 2, 0, 0, 10, 4, 2, 2, 2, 2, 2]),
            Matrix::from_i64(
                z(),
                4,
                3,
                &[-6, 111, -36, 5, -672, 210, 0, -255, 81, -7, 255, -81],
            ),
        ];
        for a in &samples {
            let s = snf(a);
            let mut acc = BigInt::one();
            for (i, d) in s.divisors.iter().enumerate() {
                acc *= d;
                assert_eq!(acc, minors_gcd(a, i + 1), "determinantal divisor {}", i + 1);
            }
        }
    }

    #[test]
    fn field_results_match_reduced_integer_results_when_rank_stable() {
        // 100 full-rank instances: determinant, rank and the unique solution
        // agree with the integer computation reduced mod p
        let p = 5u64;
        let mut state = 0x1234_5678_9abc_def0u64;
        let mut next = move || {
            state ^= state >> 12;
            state ^= state << 25;
            state ^= state >> 27;
            state.wrapping_mul(0x2545_F491_4F6C_DD1D)
        };
        let mut found = 0;
        let mut tries = 0;
        while found < 100 && tries < 2000 {
            tries += 1;
            let n = 1 + (next() % 4) as usize;
            let entries: Vec<i64> = (0..n * n).map(|_| (next() % 19) as i64 - 9).collect();
            let a_z = Matrix::from_i64(z(), n, n, &entries);
            let a_p = Matrix::from_i64(gf(p), n, n, &entries);
            let dz = det(&a_z).unwrap();
            let dp = det(&a_p).unwrap();
            assert_eq!(gf(p).reduce(&dz), dp);
            if dp.is_zero() {
                continue;
            }
            found += 1;
            assert_eq!(rank(&a_z), n);
            assert_eq!(rank(&a_p), n);
            assert_eq!(kernel_basis(&a_p).cols(), 0);
            let x: Vec<i64> = (0..n).map(|_| (next() % 7) as i64 - 3).collect();
            let x_z = Matrix::from_i64(z(), n, 1, &x);
            let b_z = a_z.mul(&x_z);
            let b_p = Matrix::new(gf(p), n, 1, b_z.entries().to_vec());
            if let Some(sol_z) = solve_matrix(&a_z, &b_z) {
                let sol_p = solve_matrix(&a_p, &b_p).expect("field solve exists");
                for i in 0..n {
                    assert_eq!(gf(p).reduce(sol_z.at(i, 0)), *sol_p.at(i, 0));
                }
            }
        }
        assert!(
            found >= 100,
            "needed 100 full-rank instances, found {found}"
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn snf_random_integers(rows in 0usize..5, cols in 0usize..5,
                               seed in proptest::collection::vec(-20i64..=20, 0..25)) {
            let mut entries = vec![0i64; rows * cols];
            for (i, v) in seed.iter().take(rows * cols).enumerate() {
                entries[i] = *v;
            }
            let a = Matrix::from_i64(z(), rows, cols, &entries);
            check_snf(&a);
            check_hnf(&a);
        }

        #[test]
        fn snf_random_field(rows in 0usize..5, cols in 0usize..5,
                            seed in proptest::collection::vec(0i64..5, 0..25)) {
            let mut entries = vec![0i64; rows * cols];
            for (i, v) in seed.iter().take(rows * cols).enumerate() {
                entries[i] = *v;
            }
            let a = Matrix::from_i64(gf(5), rows, cols, &entries);
            check_snf(&a);
            check_hnf(&a);
        }

        #[test]
        fn solve_soundness(rows in 1usize..4, cols in 1usize..4,
                           a_e in proptest::collection::vec(-6i64..=6, 16),
                           x_e in proptest::collection::vec(-6i64..=6, 16)) {
            let a = Matrix::from_i64(z(), rows, cols, &a_e[..rows * cols]);
            let x = Matrix::from_i64(z(), cols, 1, &x_e[..cols]);
            let b = a.mul(&x);
            let sol = solve_matrix(&a, &b).expect("a constructed solution exists");
            prop_assert_eq!(a.mul(&sol), b);
        }

        #[test]
        fn kernel_completeness(rows in 1usize..4, cols in 1usize..4,
                               a_e in proptest::collection::vec(-5i64..=5, 16),
                               c_e in proptest::collection::vec(-7i64..=7, 16)) {
            let a = Matrix::from_i64(z(), rows, cols, &a_e[..rows * cols]);
            let k = kernel_basis(&a);
            // every lattice combination of the basis solves A x = 0
            if k.cols() > 0 {
                let coeffs = Matrix::from_i64(z(), k.cols(), 1, &c_e[..k.cols()]);
                let v = k.mul(&coeffs);
                prop_assert!(a.mul(&v).is_zero());
            }
            // brute-force small solutions all lie in the basis lattice
            let mut idx = vec![-3i64; cols];
            let mut done = false;
            while !done {
                let x = Matrix::new(z(), cols, 1, idx.iter().map(|&c| BigInt::from(c)).collect());
                if a.mul(&x).is_zero() {
                    prop_assert!(column_span_membership(&k, &x));
                }
                let mut p = 0;
                loop {
                    if p == cols {
                        done = true;
                        break;
                    }
                    idx[p] += 1;
                    if idx[p] <= 3 {
                        break;
                    }
                    idx[p] = -3;
                    p += 1;
                }
            }
        }

        #[test]
        fn field_matches_reduced_integers(n in 1usize..4,
                                          a_e in proptest::collection::vec(-10i64..=10, 16)) {
            // full-rank spot check: the GF(p) result equals the integer result mod p
            let a_z = Matrix::from_i64(z(), n, n, &a_e[..n * n]);
            prop_assume!(!det(&a_z).unwrap().is_zero());
            let p = 5u64;
            let a_p = Matrix::from_i64(gf(p), n, n, &a_e[..n * n]);
            let dz = det(&a_z).unwrap();
            let dp = det(&a_p).unwrap();
            prop_assert_eq!(gf(p).reduce(&dz), dp);
        }
    }
}
