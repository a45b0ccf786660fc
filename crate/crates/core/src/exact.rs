//! Exact arithmetic over `ℤ[1/√2]` and dense matrices built from it.
//!
//! A [`Scalar`] stores a value `numer / √2^sde` with an arbitrary-precision
//! integer numerator. Every matrix entry that arises from products of
//! Toffoli-Hadamard gates has this shape, and the representation makes the
//! dyadic/non-dyadic distinction a parity check on `sde`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact scalar `numer / √2^sde`.
///
/// Canonical form: zero is `(0, 0)`; otherwise `sde` is minimal, i.e. the
/// numerator is odd whenever `sde >= 2`. Two representations of the same
/// value differ by the rewrite `(n, k) ~ (2n, k + 2)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Scalar {
    numer: BigInt,
    sde: u32,
}

impl Scalar {
    pub fn new(numer: impl Into<BigInt>, sde: u32) -> Self {
        Scalar {
            numer: numer.into(),
            sde,
        }
        .canonicalize()
    }

    pub fn zero() -> Self {
        Scalar {
            numer: BigInt::zero(),
            sde: 0,
        }
    }

    pub fn one() -> Self {
        Scalar {
            numer: BigInt::one(),
            sde: 0,
        }
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        Scalar {
            numer: n.into(),
            sde: 0,
        }
    }

    /// `1/√2`.
    pub fn inv_sqrt2() -> Self {
        Scalar {
            numer: BigInt::one(),
            sde: 1,
        }
    }

    /// Dyadic fraction `n / 2^k`.
    pub fn dyadic(n: impl Into<BigInt>, k: u32) -> Self {
        Scalar {
            numer: n.into(),
            sde: 2 * k,
        }
        .canonicalize()
    }

    pub fn numer(&self) -> &BigInt {
        &self.numer
    }

    pub fn sde(&self) -> u32 {
        self.sde
    }

    /// Minimal-`sde` representative of the same value. Idempotent.
    pub fn canonicalize(mut self) -> Self {
        if self.numer.is_zero() {
            self.sde = 0;
            return self;
        }
        while self.sde >= 2 && self.numer.is_even() {
            self.numer /= 2;
            self.sde -= 2;
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.numer.is_zero()
    }

    /// True iff the value lies in the dyadic fractions `ℤ[1/2]`.
    pub fn is_dyadic(&self) -> bool {
        self.sde.is_multiple_of(2)
    }

    /// The value as a rational, valid only when dyadic.
    pub fn to_rational(&self) -> Option<BigRational> {
        if !self.is_dyadic() {
            return None;
        }
        let denom = BigInt::one() << (self.sde / 2);
        Some(BigRational::new(self.numer.clone(), denom))
    }

    /// Split into `r + t√2` with `r`, `t` rational; exactly one part is
    /// nonzero for a nonzero scalar.
    pub fn rational_parts(&self) -> (BigRational, BigRational) {
        if self.is_zero() {
            return (BigRational::zero(), BigRational::zero());
        }
        if self.is_dyadic() {
            (self.to_rational().unwrap(), BigRational::zero())
        } else {
            // n/√2^(2k+1) = (n/2^(k+1)) √2
            let denom = BigInt::one() << (self.sde / 2 + 1);
            (
                BigRational::zero(),
                BigRational::new(self.numer.clone(), denom),
            )
        }
    }

    fn add_impl(&self, other: &Scalar) -> Scalar {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        assert_eq!(
            self.sde % 2,
            other.sde % 2,
            "sum {self} + {other} leaves the n/√2^k representable set"
        );
        let (hi, lo) = if self.sde >= other.sde {
            (self, other)
        } else {
            (other, self)
        };
        let lifted = &lo.numer << ((hi.sde - lo.sde) / 2);
        Scalar {
            numer: &hi.numer + lifted,
            sde: hi.sde,
        }
        .canonicalize()
    }

    fn mul_impl(&self, other: &Scalar) -> Scalar {
        Scalar {
            numer: &self.numer * &other.numer,
            sde: self.sde + other.sde,
        }
        .canonicalize()
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        self.add_impl(rhs)
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self.add_impl(&-rhs)
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        self.mul_impl(rhs)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            numer: -&self.numer,
            sde: self.sde,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sde {
            0 => write!(f, "{}", self.numer),
            1 => write!(f, "{}/sqrt2", self.numer),
            k if k % 2 == 0 => write!(f, "{}/{}", self.numer, BigInt::one() << (k / 2)),
            k => write!(f, "{}/({}*sqrt2)", self.numer, BigInt::one() << (k / 2)),
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.numer, self.sde)
    }
}

/// Whether every entry of an orthogonal matrix is dyadic, or the matrix
/// carries a residual factor of `1/√2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SdeClass {
    DyadicOrthogonal,
    RootTwoResidue,
}

/// Dense square (or rectangular) matrix of [`Scalar`]s, row-major.
///
/// Equality is entrywise exact equality of canonical forms.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    entries: Vec<Scalar>,
}

impl Matrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            entries: vec![Scalar::zero(); rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Matrix::zero(dim, dim);
        for i in 0..dim {
            m.set(i, i, Scalar::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                entries.push(f(r, c).canonicalize());
            }
        }
        Matrix {
            rows,
            cols,
            entries,
        }
    }

    /// Square matrix from integer entries.
    pub fn from_ints(dim: usize, ints: &[i64]) -> Self {
        assert_eq!(ints.len(), dim * dim);
        Matrix {
            rows: dim,
            cols: dim,
            entries: ints.iter().map(|&n| Scalar::from_int(n)).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Dimension of a square matrix.
    pub fn dim(&self) -> usize {
        assert_eq!(self.rows, self.cols, "matrix is not square");
        self.rows
    }

    pub fn get(&self, r: usize, c: usize) -> &Scalar {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        self.entries[r * self.cols + c] = v.canonicalize();
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(
            self.cols, other.rows,
            "dimension mismatch in matrix product"
        );
        let mut out = Matrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = Scalar::zero();
                for k in 0..self.cols {
                    let term = self.get(i, k).mul_impl(other.get(k, j));
                    acc = acc.add_impl(&term);
                }
                out.entries[i * out.cols + j] = acc;
            }
        }
        out
    }

    pub fn kron(&self, other: &Matrix) -> Matrix {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut out = Matrix::zero(rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out.set(i * other.rows + k, j * other.cols + l, a * other.get(k, l));
                    }
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |r, c| self.get(c, r).clone())
    }

    pub fn neg(&self) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| -e).collect(),
        }
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn scale(&self, s: &Scalar) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e * s).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols && *self == Matrix::identity(self.rows)
    }

    /// True iff `AᵀA = I` exactly.
    pub fn is_orthogonal(&self) -> bool {
        self.rows == self.cols && self.transpose().mul(self).is_identity()
    }

    /// Classify an orthogonal matrix by the parity of its entries' `sde`.
    pub fn sde_class(&self) -> SdeClass {
        debug_assert!(self.is_orthogonal());
        if self.entries.iter().all(Scalar::is_dyadic) {
            SdeClass::DyadicOrthogonal
        } else {
            SdeClass::RootTwoResidue
        }
    }

    pub fn pow(&self, mut n: u64) -> Matrix {
        let mut acc = Matrix::identity(self.dim());
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn commutes_with(&self, other: &Matrix) -> bool {
        self.mul(other) == other.mul(self)
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self.get(r, c).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Exact RREF of a rational matrix. Returns the pivot column of each pivot
/// row, in order.
fn rref(m: &mut [Vec<BigRational>]) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return vec![];
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let inv = m[rank][c].recip();
        for x in m[rank].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..rows {
            if r != rank && !m[r][c].is_zero() {
                let factor = m[r][c].clone();
                let pivot_row = m[rank].clone();
                for (cc, x) in m[r].iter_mut().enumerate() {
                    let t = &pivot_row[cc] * &factor;
                    *x = &*x - &t;
                }
            }
        }
        pivots.push(c);
        rank += 1;
        if rank == rows {
            break;
        }
    }
    pivots
}

/// Basis of `{ M rational : MA = AM for all A in gens }`, cleared to
/// integer matrices.
///
/// The kernel of the stacked commutator system is computed by exact
/// Gaussian elimination; basis vectors are ordered by the index of their
/// free column in the reduced system, so the output is deterministic.
/// Entries of `gens` may contain `√2` parts; each equation is split into
/// its rational and `√2`-rational components.
pub fn commutant_basis(gens: &[Matrix]) -> Vec<Matrix> {
    assert!(
        !gens.is_empty(),
        "commutant of an empty set is unconstrained"
    );
    let n = gens[0].dim();
    for g in gens {
        assert_eq!(g.dim(), n, "commutant generators must share a dimension");
    }
    let vars = n * n;
    // Constraint rows: for each generator A and each (i,j),
    //   sum_k M[i][k] A[k][j] - A[i][k] M[k][j] = 0,
    // split into rational and √2 parts.
    let mut rows: Vec<Vec<BigRational>> = Vec::new();
    for a in gens {
        for i in 0..n {
            for j in 0..n {
                let mut row_rat = vec![BigRational::zero(); vars];
                let mut row_rt2 = vec![BigRational::zero(); vars];
                for k in 0..n {
                    // + M[i][k] * A[k][j]
                    let (r, t) = a.get(k, j).rational_parts();
                    row_rat[i * n + k] = &row_rat[i * n + k] + &r;
                    row_rt2[i * n + k] = &row_rt2[i * n + k] + &t;
                    // - A[i][k] * M[k][j]
                    let (r, t) = a.get(i, k).rational_parts();
                    row_rat[k * n + j] = &row_rat[k * n + j] - &r;
                    row_rt2[k * n + j] = &row_rt2[k * n + j] - &t;
                }
                if row_rat.iter().any(|x| !x.is_zero()) {
                    rows.push(row_rat);
                }
                if row_rt2.iter().any(|x| !x.is_zero()) {
                    rows.push(row_rt2);
                }
            }
        }
    }
    if rows.is_empty() {
        // Everything commutes; return the standard basis.
        return (0..vars)
            .map(|v| {
                let mut m = Matrix::zero(n, n);
                m.set(v / n, v % n, Scalar::one());
                m
            })
            .collect();
    }
    let pivots = rref(&mut rows);
    let pivot_of_col: Vec<Option<usize>> = {
        let mut v = vec![None; vars];
        for (r, &c) in pivots.iter().enumerate() {
            v[c] = Some(r);
        }
        v
    };
    let mut basis = Vec::new();
    for free in 0..vars {
        if pivot_of_col[free].is_some() {
            continue;
        }
        // Nullspace vector: free column = 1, pivot columns read off the RREF.
        let mut vec_rat = vec![BigRational::zero(); vars];
        vec_rat[free] = BigRational::one();
        for (r, &c) in pivots.iter().enumerate() {
            vec_rat[c] = -rows[r][free].clone();
        }
        basis.push(clear_denominators(n, &vec_rat));
    }
    basis
}

/// Scale a rational matrix (flattened row-major) to a primitive integer
/// matrix with positive leading entry.
fn clear_denominators(n: usize, v: &[BigRational]) -> Matrix {
    let mut lcm = BigInt::one();
    for x in v {
        lcm = lcm.lcm(x.denom());
    }
    let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
    let mut gcd = BigInt::zero();
    for x in &ints {
        gcd = gcd.gcd(x);
    }
    if gcd.is_zero() {
        gcd = BigInt::one();
    }
    if let Some(first) = ints.iter().find(|x| !x.is_zero()) {
        if first.is_negative() {
            gcd = -gcd;
        }
    }
    Matrix::from_fn(n, n, |r, c| Scalar::from_int(&ints[r * n + c] / &gcd))
}

/// True iff `m` lies in the rational span of `basis`.
pub fn in_span(basis: &[Matrix], m: &Matrix) -> bool {
    if basis.is_empty() {
        return m.entries.iter().all(Scalar::is_zero);
    }
    let n = basis[0].dim();
    let vars = basis.len();
    // Solve sum_i x_i basis_i = m by RREF over the stacked columns.
    let mut rows: Vec<Vec<BigRational>> = Vec::with_capacity(n * n);
    for r in 0..n {
        for c in 0..n {
            let mut row: Vec<BigRational> = basis
                .iter()
                .map(|b| b.get(r, c).to_rational().expect("integer basis"))
                .collect();
            row.push(m.get(r, c).to_rational().expect("dyadic target"));
            rows.push(row);
        }
    }
    let pivots = rref(&mut rows);
    // Inconsistent iff some pivot lands in the augmented column.
    !pivots.contains(&vars)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(n: i64, k: u32) -> Scalar {
        Scalar::new(n, k)
    }

    #[test]
    fn canonicalize_examples() {
        // Oracle: exhaustive reduction by (2m, k) -> (m, k-2) for k >= 2.
        fn oracle(mut n: i64, mut k: u32) -> (i64, u32) {
            if n == 0 {
                return (0, 0);
            }
            while k >= 2 && n % 2 == 0 {
                n /= 2;
                k -= 2;
            }
            (n, k)
        }
        assert_eq!(s(2, 2), Scalar::from_int(1));
        assert_eq!(s(0, 5), Scalar::zero());
        assert_eq!(oracle(4, 3), (2, 1));
        assert_eq!(s(4, 3), s(2, 1));
        for n in -20..=20i64 {
            for k in 0..8u32 {
                let (cn, ck) = oracle(n, k);
                let got = s(n, k);
                assert_eq!((got.numer().clone(), got.sde()), (BigInt::from(cn), ck));
            }
        }
    }

    #[test]
    fn ring_examples() {
        // (1/√2)^2 = 1/2
        assert_eq!(&s(1, 1) * &s(1, 1), s(1, 2));
        assert_eq!(&s(1, 0) + &s(-1, 0), Scalar::zero());
        // 1/√2 + 1/√2 = √2 = 2/√2
        assert_eq!(&s(1, 1) + &s(1, 1), s(2, 1));
    }

    #[test]
    #[should_panic(expected = "representable")]
    fn mixed_parity_addition_panics() {
        let _ = &s(1, 1) + &s(1, 0);
    }

    #[test]
    fn dyadic_parity() {
        assert!(s(1, 0).is_dyadic());
        assert!(s(1, 2).is_dyadic());
        assert!(!s(1, 1).is_dyadic());
        assert!(!s(3, 5).is_dyadic());
    }

    #[test]
    fn rational_parts_roundtrip() {
        let (r, t) = s(3, 4).rational_parts();
        assert_eq!(r, BigRational::new(3.into(), 4.into()));
        assert!(t.is_zero());
        let (r, t) = s(3, 5).rational_parts();
        assert!(r.is_zero());
        // 3/√2^5 = 3/(4√2) = (3/8)√2
        assert_eq!(t, BigRational::new(3.into(), 8.into()));
    }

    proptest! {
        #[test]
        fn canonicalize_idempotent(n in -1000i64..1000, k in 0u32..10) {
            let a = s(n, k);
            prop_assert_eq!(a.clone().canonicalize(), a);
        }

        // Same sde parity so that sums stay representable.
        #[test]
        fn ring_axioms(
            (a, b, c) in (0u32..2).prop_flat_map(|p| {
                let elem = move |n: i64, k: u32| Scalar::new(n, 2 * k + p);
                (-50i64..50, 0u32..4, -50i64..50, 0u32..4, -50i64..50, 0u32..4)
                    .prop_map(move |(n1, k1, n2, k2, n3, k3)| {
                        (elem(n1, k1), elem(n2, k2), elem(n3, k3))
                    })
            })
        ) {
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        }
    }

    #[test]
    fn matrix_basics() {
        let h = Matrix::from_fn(2, 2, |r, c| {
            let sign = if (r, c) == (1, 1) { -1 } else { 1 };
            Scalar::new(sign, 1)
        });
        assert!(h.is_orthogonal());
        assert!(h.mul(&h).is_identity());
        assert_eq!(h.sde_class(), SdeClass::RootTwoResidue);
        let i2 = Matrix::identity(2);
        assert_eq!(i2.kron(&i2), Matrix::identity(4));
        assert!(!Matrix::from_ints(2, &[2, 0, 0, 1]).is_orthogonal());
    }

    #[test]
    fn xz_anticommute() {
        let x = Matrix::from_ints(2, &[0, 1, 1, 0]);
        let z = Matrix::from_ints(2, &[1, 0, 0, -1]);
        assert_eq!(x.mul(&z), z.mul(&x).neg());
    }

    #[test]
    fn commutant_of_identity_is_everything() {
        let basis = commutant_basis(&[Matrix::identity(3)]);
        assert_eq!(basis.len(), 9);
        let basis = commutant_basis(&[Matrix::identity(8)]);
        assert_eq!(basis.len(), 64);
    }

    proptest! {
        // Random small-entry 8x8 matrices over a shared sde parity.
        #[test]
        fn matrix_product_associative(seed in 0u64..1000) {
            let mut state = seed;
            let mut next = move || {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((state >> 33) % 7) as i64 - 3
            };
            let mut rand_mat = || Matrix::from_fn(8, 8, |_, _| Scalar::new(next(), 2));
            let (a, b, c) = (rand_mat(), rand_mat(), rand_mat());
            prop_assert_eq!(a.mul(&b.mul(&c)), a.mul(&b).mul(&c));
        }
    }

    #[test]
    fn self_commutant_of_a_gate_set() {
        let gens: Vec<Matrix> = ["X0", "CX01", "CCX12", "K12"]
            .iter()
            .map(|t| {
                crate::gates::GateSymbol::parse(t)
                    .unwrap()
                    .matrix(3)
                    .unwrap()
            })
            .collect();
        let basis = commutant_basis(&gens);
        for b in &basis {
            for g in &gens {
                assert!(b.commutes_with(g));
            }
        }
        assert!(in_span(&basis, &Matrix::identity(8)));
    }

    #[test]
    fn commutant_members_commute() {
        let x = Matrix::from_ints(2, &[0, 1, 1, 0]);
        let basis = commutant_basis(std::slice::from_ref(&x));
        assert_eq!(basis.len(), 2);
        for b in &basis {
            assert!(b.commutes_with(&x));
        }
        assert!(in_span(&basis, &Matrix::identity(2)));
        assert!(!in_span(&basis, &Matrix::from_ints(2, &[1, 0, 0, -1])));
    }
}
