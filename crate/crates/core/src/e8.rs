//! The E8 lattice, its root system, Householder reflections, and the
//! reflection generators with their circuit decompositions.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::exact::{Matrix, Scalar};
use crate::words::{Alphabet, Word};

/// Vector in `(1/2)ℤ^8`, stored as doubled integer coordinates.
///
/// Invariant: the doubled coordinates are all even (integer vector) or all
/// odd (half-integer vector).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LatticeVector {
    doubled: [i64; 8],
}

impl LatticeVector {
    /// From doubled coordinates (`doubled[i] = 2 * v[i]`).
    pub fn from_doubled(doubled: [i64; 8]) -> Self {
        let par = doubled[0].rem_euclid(2);
        assert!(
            doubled.iter().all(|c| c.rem_euclid(2) == par),
            "coordinates must be all integers or all half-integers"
        );
        LatticeVector { doubled }
    }

    pub fn from_ints(v: [i64; 8]) -> Self {
        LatticeVector {
            doubled: v.map(|c| 2 * c),
        }
    }

    pub fn doubled(&self) -> &[i64; 8] {
        &self.doubled
    }

    pub fn is_zero(&self) -> bool {
        self.doubled.iter().all(|&c| c == 0)
    }

    /// `4 <v, w>`, exact in the doubled coordinates.
    fn dot4(&self, other: &LatticeVector) -> i64 {
        self.doubled
            .iter()
            .zip(&other.doubled)
            .map(|(a, b)| a * b)
            .sum()
    }

    /// `<v, v>` when integral, which holds for all of `Γ8`.
    pub fn norm2_times4(&self) -> i64 {
        self.dot4(self)
    }

    pub fn neg(&self) -> LatticeVector {
        LatticeVector {
            doubled: self.doubled.map(|c| -c),
        }
    }
}

/// Membership in the E8 lattice: all-integer or all-half-integer
/// coordinates with an even coordinate sum.
pub fn e8_member(v: &LatticeVector) -> bool {
    let sum: i64 = v.doubled.iter().sum();
    // doubled sum ≡ 0 (mod 4) iff the coordinate sum is an even integer
    sum.rem_euclid(4) == 0
}

/// The simple roots, read column-wise from the printed root-system matrix.
pub fn simple_roots() -> [LatticeVector; 8] {
    let e = |i: usize, j: usize, si: i64, sj: i64| {
        let mut v = [0i64; 8];
        v[i] = si;
        v[j] = sj;
        LatticeVector::from_ints(v)
    };
    [
        e(0, 1, 1, -1),
        e(1, 2, 1, -1),
        e(2, 3, 1, -1),
        e(3, 4, 1, -1),
        e(4, 5, 1, -1),
        e(5, 6, 1, -1),
        e(5, 6, 1, 1),
        LatticeVector::from_doubled([-1; 8]),
    ]
}

/// Coxeter matrix of the reflection group: `ord(r_j r_k) = N[j-1][k-1]`.
pub const COXETER_MATRIX: [[u8; 8]; 8] = [
    [1, 3, 2, 2, 2, 2, 2, 2],
    [3, 1, 3, 2, 2, 2, 2, 2],
    [2, 3, 1, 3, 2, 2, 2, 2],
    [2, 2, 3, 1, 3, 2, 2, 2],
    [2, 2, 2, 3, 1, 3, 3, 2],
    [2, 2, 2, 2, 3, 1, 2, 2],
    [2, 2, 2, 2, 3, 2, 1, 3],
    [2, 2, 2, 2, 2, 2, 3, 1],
];

/// All 240 roots of `Γ8`: the norm²=2 lattice vectors.
pub fn e8_roots() -> Vec<LatticeVector> {
    let mut roots = Vec::with_capacity(240);
    // Integer roots: two nonzero coordinates, each ±1.
    for i in 0..8 {
        for j in (i + 1)..8 {
            for si in [1i64, -1] {
                for sj in [1i64, -1] {
                    let mut v = [0i64; 8];
                    v[i] = si;
                    v[j] = sj;
                    roots.push(LatticeVector::from_ints(v));
                }
            }
        }
    }
    // Half-integer roots: all coordinates ±1/2, evenly many minus signs.
    for pattern in 0u32..256 {
        if pattern.count_ones() % 2 != 0 {
            continue;
        }
        let mut v = [0i64; 8];
        for (i, c) in v.iter_mut().enumerate() {
            *c = if (pattern >> i) & 1 == 1 { -1 } else { 1 };
        }
        roots.push(LatticeVector::from_doubled(v));
    }
    debug_assert!(roots.iter().all(|r| r.norm2_times4() == 8));
    roots
}

/// Roots whose exact expansion in `basis` has only nonnegative
/// coefficients. Solves the 8×8 rational system per root.
///
/// Panics if the basis is linearly dependent.
pub fn positive_roots(basis: &[LatticeVector; 8]) -> Vec<LatticeVector> {
    // Column-major basis matrix over the rationals, in doubled coordinates.
    let rat = |n: i64| BigRational::from(BigInt::from(n));
    let mut out = Vec::new();
    for root in e8_roots() {
        let mut aug: Vec<Vec<BigRational>> = (0..8)
            .map(|r| {
                let mut row: Vec<BigRational> = (0..8).map(|c| rat(basis[c].doubled[r])).collect();
                row.push(rat(root.doubled[r]));
                row
            })
            .collect();
        let coeffs = solve_square(&mut aug).expect("basis not linearly independent");
        if coeffs.iter().all(|c| !c.is_negative()) {
            out.push(root);
        }
    }
    out
}

/// Gaussian elimination for a square augmented system; `None` if singular.
fn solve_square(aug: &mut [Vec<BigRational>]) -> Option<Vec<BigRational>> {
    let n = aug.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !aug[r][col].is_zero())?;
        aug.swap(col, pivot);
        let inv = aug[col][col].recip();
        for x in aug[col].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..n {
            if r != col && !aug[r][col].is_zero() {
                let f = aug[r][col].clone();
                let pivot_row = aug[col].clone();
                for (c, x) in aug[r].iter_mut().enumerate() {
                    let t = &pivot_row[c] * &f;
                    *x = &*x - &t;
                }
            }
        }
    }
    Some((0..n).map(|r| aug[r][n].clone()).collect())
}

/// Reflection about the hyperplane normal to `alpha`:
/// `v ↦ v - 2 <v,α>/<α,α> α`.
///
/// Panics on the zero vector, and on vectors whose reflection matrix
/// leaves the dyadic fractions (possible only when `<α,α>` has an odd
/// factor).
pub fn householder(alpha: &LatticeVector) -> Matrix {
    assert!(!alpha.is_zero(), "reflection about the zero vector");
    let norm4 = alpha.norm2_times4();
    Matrix::from_fn(8, 8, |r, c| {
        // entry = δ_rc - 2 α_r α_c / <α,α>, over doubled coordinates:
        //       = δ_rc - 2 d_r d_c / (4 <α,α>) = δ_rc - d_r d_c * 2 / norm4
        let num = BigRational::new(
            BigInt::from(-2 * alpha.doubled[r] * alpha.doubled[c]),
            BigInt::from(norm4),
        );
        let diag = if r == c {
            BigRational::from(BigInt::from(1))
        } else {
            BigRational::zero()
        };
        rational_to_scalar(&(diag + num))
    })
}

fn rational_to_scalar(q: &BigRational) -> Scalar {
    let denom = q.denom();
    let mut k = 0u32;
    let mut d = denom.clone();
    let two = BigInt::from(2);
    while (&d % &two).is_zero() {
        d /= &two;
        k += 1;
    }
    assert!(d == BigInt::from(1), "value {q} is not a dyadic fraction");
    Scalar::dyadic(q.numer().clone(), k)
}

/// Reflect a lattice vector about a root (`<α,α> = 2`), exactly.
pub fn reflect_by_root(alpha: &LatticeVector, v: &LatticeVector) -> LatticeVector {
    assert_eq!(
        alpha.norm2_times4(),
        8,
        "reflection formula specialized to roots"
    );
    // v - <v,α> α ; dot4/4 is the true inner product, integral on Γ8.
    let dot4 = v.dot4(alpha);
    assert_eq!(dot4 % 4, 0, "inner product not integral");
    let k = dot4 / 4;
    let mut doubled = [0i64; 8];
    for (i, d) in doubled.iter_mut().enumerate() {
        *d = v.doubled[i] - k * alpha.doubled[i];
    }
    LatticeVector::from_doubled(doubled)
}

/// The matrix of the `j`-th reflection generator, `1 <= j <= 8`.
pub fn coxeter_generator(j: u8) -> Matrix {
    assert!((1..=8).contains(&j));
    householder(&simple_roots()[j as usize - 1])
}

/// Circuit decomposition of the `j`-th reflection generator over the
/// 3-qubit gate alphabet.
pub fn coxeter_circuit_tokens(j: u8) -> &'static [&'static str] {
    match j {
        1 => &["X0", "X1", "CCX01", "X1", "X0"],
        2 => &["X0", "CX21", "CCX01", "CX21", "X0"],
        3 => &["X0", "CCX01", "X0"],
        4 => &["CX01", "CX02", "CCX12", "CX02", "CX01"],
        5 => &["X1", "CCX01", "X1"],
        6 => &["CX21", "CCX01", "CX21"],
        7 => &["CZ01", "CX21", "CCX01", "CX21", "CZ01"],
        8 => &[
            "K12", "X1", "X2", "CZ02", "CCX12", "CZ02", "X2", "X1", "K12",
        ],
        _ => panic!("generator index out of range"),
    }
}

/// `coxeter_circuit_tokens(j)` interned into `alphabet`.
pub fn coxeter_circuit(alphabet: &mut Alphabet, j: u8) -> Word {
    Word::new(
        coxeter_circuit_tokens(j)
            .iter()
            .map(|t| alphabet.intern(t))
            .collect(),
    )
}

/// Word over the generators whose product is the reflection about `beta`
/// (any root). Found by breadth-first search from `beta` to a simple root
/// through simple reflections, so the result is deterministic.
pub fn reflection_word(beta: &LatticeVector) -> Vec<u8> {
    assert_eq!(beta.norm2_times4(), 8, "reflection_word expects a root");
    let simples = simple_roots();
    let key = |v: &LatticeVector| *v.doubled();
    let mut parent: std::collections::HashMap<[i64; 8], Option<([i64; 8], u8)>> =
        std::collections::HashMap::new();
    parent.insert(key(beta), None);
    let mut queue = std::collections::VecDeque::from([beta.clone()]);
    while let Some(cur) = queue.pop_front() {
        for (i, s) in simples.iter().enumerate() {
            if *s == cur || s.neg() == cur {
                // path j_1..j_k maps beta to ±simple_i, so the reflection
                // about beta is (r_{j_1}..r_{j_k}) r_i (r_{j_k}..r_{j_1}).
                let mut path = Vec::new();
                let mut node = key(&cur);
                while let Some(Some((prev, j))) = parent.get(&node) {
                    path.push(*j);
                    node = *prev;
                }
                path.reverse();
                let mut word = path.clone();
                word.push(i as u8 + 1);
                path.reverse();
                word.extend(path);
                return word;
            }
            let img = reflect_by_root(s, &cur);
            if let std::collections::hash_map::Entry::Vacant(e) = parent.entry(key(&img)) {
                e.insert(Some((key(&cur), i as u8 + 1)));
                queue.push_back(img);
            }
        }
    }
    unreachable!("the root graph is connected");
}

/// The fourteen construction words over the reflection generators, fully
/// expanded, keyed 1..=14. Values are sequences of generator indices 1..=8.
///
/// `w1..w9` follow the staircase construction: `w1..w6` are diagonal sign
/// matrices, `w7` evaluates to the Toffoli with controls 0,1 and `w8` to
/// `X2`. The remaining targets (`w10 -> K12`, `w11 -> SW12`, `w12 -> SW01`,
/// `w13 -> SW02`, `w14 -> CX01`) are built from products of reflections
/// about explicit roots spanning the target's (-1)-eigenspace, each turned
/// into a generator word by [`reflection_word`]. Every image is checked
/// exactly in the test suite.
pub fn construction_words() -> Vec<Vec<u8>> {
    let w = |parts: &[&[u8]]| -> Vec<u8> {
        let mut v = Vec::new();
        for p in parts {
            v.extend_from_slice(p);
        }
        v
    };
    let refl = |doubled: [i64; 8]| reflection_word(&LatticeVector::from_doubled(doubled));
    let w1 = w(&[&[6, 7]]);
    let w2 = w(&[&[6, 5], &w1, &[5, 6]]);
    let w3 = w(&[&[5, 4], &w2, &[4, 5]]);
    let w4 = w(&[&[4, 3], &w3, &[3, 4]]);
    let w5 = w(&[&[3, 2], &w4, &[2, 3]]);
    let w6 = w(&[&[2, 1], &w5, &[1, 2]]);
    let w7 = w(&[&[7, 8, 6], &w6, &w4, &w2, &[8], &w6, &w4, &w2, &[6, 8, 7]]);
    let w8 = w(&[&[1, 3, 5], &w7]);
    let w9 = w(&[&[6], &w7, &w1, &w7, &[6]]);
    // K12 = refl(e1-e2) refl(e5-e6) refl(ρ1) refl(ρ2): four orthogonal
    // roots spanning its (-1)-eigenspace.
    let w10 = w(&[
        &[2, 6],
        &refl([1, -1, -1, -1, 1, -1, -1, -1]),
        &refl([1, -1, -1, -1, -1, 1, 1, 1]),
    ]);
    // SW12 = refl(e1-e2) refl(e5-e6) = r2 r6.
    let w11 = w(&[&[2, 6]]);
    // SW01 = refl(e2-e4) refl(e3-e5).
    let w12 = w(&[
        &refl([0, 0, 2, 0, -2, 0, 0, 0]),
        &refl([0, 0, 0, 2, 0, -2, 0, 0]),
    ]);
    let w13 = w(&[&w11, &w12, &w11]);
    // CX01 = refl(e4-e6) refl(e5-e7).
    let w14 = w(&[
        &refl([0, 0, 0, 0, 2, 0, -2, 0]),
        &refl([0, 0, 0, 0, 0, 2, 0, -2]),
    ]);
    vec![w1, w2, w3, w4, w5, w6, w7, w8, w9, w10, w11, w12, w13, w14]
}

/// Evaluate a construction word to its exact matrix.
pub fn eval_generator_word(word: &[u8]) -> Matrix {
    let gens: Vec<Matrix> = (1..=8).map(coxeter_generator).collect();
    let mut acc = Matrix::identity(8);
    for &j in word {
        acc = acc.mul(&gens[j as usize - 1]);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::GateSymbol;

    #[test]
    fn lattice_membership() {
        let v = LatticeVector::from_ints([1, 1, 0, 0, 0, 0, 0, 0]);
        assert!(e8_member(&v));
        let half = LatticeVector::from_doubled([1; 8]);
        assert!(e8_member(&half));
        let odd = LatticeVector::from_ints([1, 0, 0, 0, 0, 0, 0, 0]);
        assert!(!e8_member(&odd));
    }

    #[test]
    fn root_count_oracle() {
        // Oracle: brute-force enumeration over doubled coordinates in
        // {-2,-1,0,1,2} with norm²=2, all-even or all-odd, even sum.
        fn brute_force_count() -> usize {
            let mut count = 0usize;
            let vals = [-2i64, -1, 0, 1, 2];
            let mut v = [0i64; 8];
            fn rec(vals: &[i64], v: &mut [i64; 8], i: usize, count: &mut usize) {
                if i == 8 {
                    let norm4: i64 = v.iter().map(|c| c * c).sum();
                    if norm4 != 8 {
                        return;
                    }
                    let par = v[0].rem_euclid(2);
                    if !v.iter().all(|c| c.rem_euclid(2) == par) {
                        return;
                    }
                    let sum: i64 = v.iter().sum();
                    if sum.rem_euclid(4) == 0 {
                        *count += 1;
                    }
                    return;
                }
                for &x in vals {
                    v[i] = x;
                    rec(vals, v, i + 1, count);
                }
            }
            rec(&vals, &mut v, 0, &mut count);
            count
        }
        assert_eq!(brute_force_count(), 240);
        let roots = e8_roots();
        assert_eq!(roots.len(), 240);
        assert!(roots.iter().all(e8_member));
    }

    #[test]
    fn positive_root_count() {
        let basis = simple_roots();
        let pos = positive_roots(&basis);
        assert_eq!(pos.len(), 120);
        for b in &basis {
            assert!(pos.contains(b), "simple root not positive");
        }
    }

    #[test]
    fn householder_examples() {
        let e1 = LatticeVector::from_ints([1, 0, 0, 0, 0, 0, 0, 0]);
        let r = householder(&e1);
        let mut expect = Matrix::identity(8);
        expect.set(0, 0, Scalar::from_int(-1));
        assert_eq!(r, expect);
        // v and -v define the same reflection
        let a = simple_roots()[7].clone();
        assert_eq!(householder(&a), householder(&a.neg()));
        for j in 1..=8 {
            let g = coxeter_generator(j);
            assert!(g.is_orthogonal());
            assert!(g.mul(&g).is_identity());
        }
    }

    #[test]
    fn reflections_fix_the_lattice() {
        let probes: Vec<LatticeVector> = simple_roots()
            .into_iter()
            .chain([
                LatticeVector::from_ints([2, 0, 0, 0, 0, 0, 0, 0]),
                LatticeVector::from_ints([1, -1, 0, 2, 0, 0, 0, 0]),
                LatticeVector::from_doubled([1, 1, 1, 1, 1, 1, 1, -3]),
            ])
            .collect();
        for alpha in e8_roots() {
            for v in &probes {
                assert!(e8_member(&reflect_by_root(&alpha, v)));
            }
        }
    }

    #[test]
    fn coxeter_orders_match_table() {
        let gens: Vec<Matrix> = (1..=8).map(coxeter_generator).collect();
        for j in 0..8 {
            for k in j..8 {
                let expected = COXETER_MATRIX[j][k] as u64;
                let m = gens[j].mul(&gens[k]);
                for o in 1..expected {
                    assert!(
                        !m.pow(o).is_identity(),
                        "ord(r{}r{}) < {}",
                        j + 1,
                        k + 1,
                        expected
                    );
                }
                assert!(
                    m.pow(expected).is_identity(),
                    "ord(r{}r{}) != {}",
                    j + 1,
                    k + 1,
                    expected
                );
            }
        }
    }

    #[test]
    fn circuits_match_reflections() {
        let mut alph = Alphabet::new();
        for j in 1..=8 {
            let word = coxeter_circuit(&mut alph, j);
            let interp = crate::gates::Interpretation::standard(&alph, 8).unwrap();
            let got = interp.word_matrix(&alph, &word).unwrap();
            assert_eq!(got, coxeter_generator(j), "circuit for r{j}");
        }
    }

    #[test]
    fn first_construction_word_is_diagonal() {
        let words = construction_words();
        let w1 = eval_generator_word(&words[0]);
        let cz01 = GateSymbol::parse("CZ01").unwrap().matrix(3).unwrap();
        let cz02 = GateSymbol::parse("CZ02").unwrap().matrix(3).unwrap();
        assert_eq!(w1, cz01.mul(&cz02));
    }
}
