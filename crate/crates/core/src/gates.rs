//! Matrices for the named gate symbols and the interpretation map from
//! words to matrices.
//!
//! Circuit gates are fixed at 3 qubits (dimension 8) with qubit 0 the most
//! significant bit of the basis index, so `|x0 x1 x2>` has index
//! `4*x0 + 2*x1 + x2`. Multi-level operators are dimension-generic.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::exact::{Matrix, Scalar};
use crate::words::{Alphabet, Word};

/// A named generator with its parameters.
///
/// Circuit gates take qubit indices in `[0, 3)`; `CCX` is keyed by its two
/// control qubits, the target being the remaining qubit. `CCZ` is
/// parameterless (it is the same diagonal for every control choice).
/// Multi-level operators take strictly increasing level indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GateSymbol {
    X(u8),
    Z(u8),
    H(u8),
    /// `K_{j,k} = H_j ∘ H_k`, `j < k`.
    K(u8, u8),
    /// Control then target.
    Cx(u8, u8),
    /// `j < k`; the matrix is symmetric in the pair.
    Cz(u8, u8),
    /// The two controls, `j < k`.
    Ccx(u8, u8),
    Ccz,
    /// Qubit swap, `j < k`.
    Swap(u8, u8),
    /// One-level `(-1)` operator at a basis index.
    Neg(usize),
    /// Two-level `X` operator, indices strictly increasing.
    TlX(usize, usize),
    /// Four-level `K` operator, indices strictly increasing.
    TlK([usize; 4]),
    /// Coxeter generator `r_j`, `1 <= j <= 8`.
    R(u8),
}

#[derive(Debug, Error)]
pub enum GateError {
    #[error("unknown gate token `{0}`")]
    UnknownToken(String),
    #[error("invalid indices for `{0}`")]
    InvalidIndices(String),
    #[error("symbol `{0}` has no matrix in dimension {1}")]
    DimensionMismatch(String, usize),
}

impl GateSymbol {
    /// Parse a surface token (`X0`, `CX01`, `NEG[7]`, `TLK[0,1,2,3]`, `r3`, ...).
    pub fn parse(tok: &str) -> Result<GateSymbol, GateError> {
        let bad = || GateError::UnknownToken(tok.to_string());
        let qubit = |c: u8| -> Result<u8, GateError> {
            match c {
                b'0'..=b'2' => Ok(c - b'0'),
                _ => Err(GateError::InvalidIndices(tok.to_string())),
            }
        };
        let b = tok.as_bytes();
        if let Some(rest) = tok.strip_prefix("NEG[") {
            let idx = rest.strip_suffix(']').ok_or_else(bad)?;
            let a: usize = idx.parse().map_err(|_| bad())?;
            return Ok(GateSymbol::Neg(a));
        }
        if let Some(rest) = tok.strip_prefix("TLX[") {
            let idx = rest.strip_suffix(']').ok_or_else(bad)?;
            let parts: Vec<usize> = idx
                .split(',')
                .map(|p| p.trim().parse().map_err(|_| bad()))
                .collect::<Result<_, _>>()?;
            if parts.len() != 2 || parts[0] >= parts[1] {
                return Err(GateError::InvalidIndices(tok.to_string()));
            }
            return Ok(GateSymbol::TlX(parts[0], parts[1]));
        }
        if let Some(rest) = tok.strip_prefix("TLK[") {
            let idx = rest.strip_suffix(']').ok_or_else(bad)?;
            let parts: Vec<usize> = idx
                .split(',')
                .map(|p| p.trim().parse().map_err(|_| bad()))
                .collect::<Result<_, _>>()?;
            if parts.len() != 4 || !parts.windows(2).all(|w| w[0] < w[1]) {
                return Err(GateError::InvalidIndices(tok.to_string()));
            }
            return Ok(GateSymbol::TlK([parts[0], parts[1], parts[2], parts[3]]));
        }
        match b {
            [b'X', q] => Ok(GateSymbol::X(qubit(*q)?)),
            [b'Z', q] => Ok(GateSymbol::Z(qubit(*q)?)),
            [b'H', q] => Ok(GateSymbol::H(qubit(*q)?)),
            [b'K', j, k] if j < k => Ok(GateSymbol::K(qubit(*j)?, qubit(*k)?)),
            [b'C', b'X', j, k] if j != k => Ok(GateSymbol::Cx(qubit(*j)?, qubit(*k)?)),
            [b'C', b'Z', j, k] if j < k => Ok(GateSymbol::Cz(qubit(*j)?, qubit(*k)?)),
            [b'C', b'C', b'X', j, k] if j < k => Ok(GateSymbol::Ccx(qubit(*j)?, qubit(*k)?)),
            [b'C', b'C', b'Z'] => Ok(GateSymbol::Ccz),
            [b'S', b'W', j, k] if j < k => Ok(GateSymbol::Swap(qubit(*j)?, qubit(*k)?)),
            [b'r', j @ b'1'..=b'8'] => Ok(GateSymbol::R(j - b'0')),
            _ => Err(bad()),
        }
    }

    /// Matrix in dimension `2^qubits`; circuit gates require `qubits = 3`.
    pub fn matrix(&self, qubits: u32) -> Result<Matrix, GateError> {
        self.matrix_in_dim(1usize << qubits)
    }

    /// Matrix in an explicit dimension (multi-level operators are valid in
    /// any dimension that contains their indices).
    pub fn matrix_in_dim(&self, n: usize) -> Result<Matrix, GateError> {
        let dim_err = || GateError::DimensionMismatch(self.to_string(), n);
        // bit index of qubit j in a 3-qubit basis state
        let mask = |j: u8| 1usize << (2 - j as usize);
        let bit = |i: usize, j: u8| (i >> (2 - j as usize)) & 1;
        let circuit = |f: &dyn Fn(usize) -> (usize, bool)| -> Result<Matrix, GateError> {
            if n != 8 {
                return Err(dim_err());
            }
            let mut m = Matrix::zero(8, 8);
            for i in 0..8 {
                let (j, neg) = f(i);
                m.set(
                    j,
                    i,
                    if neg {
                        Scalar::from_int(-1)
                    } else {
                        Scalar::one()
                    },
                );
            }
            Ok(m)
        };
        match *self {
            GateSymbol::X(q) => circuit(&|i| (i ^ mask(q), false)),
            GateSymbol::Z(q) => circuit(&|i| (i, bit(i, q) == 1)),
            GateSymbol::H(q) => {
                if n != 8 {
                    return Err(dim_err());
                }
                let h = hadamard();
                let i2 = Matrix::identity(2);
                Ok(match q {
                    0 => h.kron(&i2).kron(&i2),
                    1 => i2.kron(&h).kron(&i2),
                    _ => i2.kron(&i2).kron(&h),
                })
            }
            GateSymbol::K(j, k) => {
                let hj = GateSymbol::H(j).matrix_in_dim(n)?;
                let hk = GateSymbol::H(k).matrix_in_dim(n)?;
                Ok(hj.mul(&hk))
            }
            GateSymbol::Cx(c, t) => circuit(&|i| {
                if bit(i, c) == 1 {
                    (i ^ mask(t), false)
                } else {
                    (i, false)
                }
            }),
            GateSymbol::Cz(j, k) => circuit(&|i| (i, bit(i, j) & bit(i, k) == 1)),
            GateSymbol::Ccx(j, k) => {
                let t = (0..3).find(|&q| q != j && q != k).unwrap();
                circuit(&|i| {
                    if bit(i, j) & bit(i, k) == 1 {
                        (i ^ mask(t), false)
                    } else {
                        (i, false)
                    }
                })
            }
            GateSymbol::Ccz => circuit(&|i| (i, i == 7)),
            GateSymbol::Swap(j, k) => circuit(&|i| {
                let (bj, bk) = (bit(i, j), bit(i, k));
                if bj != bk {
                    (i ^ mask(j) ^ mask(k), false)
                } else {
                    (i, false)
                }
            }),
            GateSymbol::Neg(a) => {
                if a >= n {
                    return Err(dim_err());
                }
                let mut m = Matrix::identity(n);
                m.set(a, a, Scalar::from_int(-1));
                Ok(m)
            }
            GateSymbol::TlX(a, b) => {
                if b >= n {
                    return Err(dim_err());
                }
                let mut m = Matrix::identity(n);
                m.set(a, a, Scalar::zero());
                m.set(b, b, Scalar::zero());
                m.set(a, b, Scalar::one());
                m.set(b, a, Scalar::one());
                Ok(m)
            }
            GateSymbol::TlK(idx) => {
                if idx[3] >= n {
                    return Err(dim_err());
                }
                let block = hadamard().kron(&hadamard());
                let mut m = Matrix::identity(n);
                for (j, &a) in idx.iter().enumerate() {
                    for (k, &b) in idx.iter().enumerate() {
                        m.set(a, b, block.get(j, k).clone());
                    }
                }
                Ok(m)
            }
            GateSymbol::R(j) => {
                if n != 8 {
                    return Err(dim_err());
                }
                Ok(crate::e8::coxeter_generator(j))
            }
        }
    }

    /// Qubits touched by a 3-qubit circuit gate; `None` for multi-level
    /// operators and Coxeter generators.
    pub fn support(&self) -> Option<Vec<u8>> {
        match *self {
            GateSymbol::X(q) | GateSymbol::Z(q) | GateSymbol::H(q) => Some(vec![q]),
            GateSymbol::K(j, k) | GateSymbol::Cz(j, k) | GateSymbol::Swap(j, k) => Some(vec![j, k]),
            GateSymbol::Cx(c, t) => Some(if c < t { vec![c, t] } else { vec![t, c] }),
            GateSymbol::Ccx(_, _) | GateSymbol::Ccz => Some(vec![0, 1, 2]),
            _ => None,
        }
    }
}

fn hadamard() -> Matrix {
    Matrix::from_fn(2, 2, |r, c| {
        Scalar::new(if (r, c) == (1, 1) { -1 } else { 1 }, 1)
    })
}

impl fmt::Display for GateSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateSymbol::X(q) => write!(f, "X{q}"),
            GateSymbol::Z(q) => write!(f, "Z{q}"),
            GateSymbol::H(q) => write!(f, "H{q}"),
            GateSymbol::K(j, k) => write!(f, "K{j}{k}"),
            GateSymbol::Cx(j, k) => write!(f, "CX{j}{k}"),
            GateSymbol::Cz(j, k) => write!(f, "CZ{j}{k}"),
            GateSymbol::Ccx(j, k) => write!(f, "CCX{j}{k}"),
            GateSymbol::Ccz => write!(f, "CCZ"),
            GateSymbol::Swap(j, k) => write!(f, "SW{j}{k}"),
            GateSymbol::Neg(a) => write!(f, "NEG[{a}]"),
            GateSymbol::TlX(a, b) => write!(f, "TLX[{a},{b}]"),
            GateSymbol::TlK([a, b, c, d]) => write!(f, "TLK[{a},{b},{c},{d}]"),
            GateSymbol::R(j) => write!(f, "r{j}"),
        }
    }
}

/// Map from symbol names to matrices of one shared dimension.
///
/// `injective` is caller-asserted; the kernel operations that rely on
/// injectivity never infer it.
#[derive(Clone, Debug)]
pub struct Interpretation {
    dim: usize,
    map: BTreeMap<String, Matrix>,
    pub injective: bool,
}

#[derive(Debug, Error)]
pub enum InterpError {
    #[error("symbol `{0}` has no interpretation")]
    UnknownSymbol(String),
    #[error("image of `{0}` has dimension {1}, expected {2}")]
    WrongDimension(String, usize, usize),
    #[error("symbol `{0}` already interpreted")]
    Clash(String),
    #[error(transparent)]
    Gate(#[from] GateError),
}

impl Interpretation {
    pub fn new(dim: usize) -> Self {
        Interpretation {
            dim,
            map: BTreeMap::new(),
            injective: false,
        }
    }

    /// Interpret every symbol of `alphabet` as its gate matrix in
    /// dimension `dim` (8 for circuit gates).
    pub fn standard(alphabet: &Alphabet, dim: usize) -> Result<Self, InterpError> {
        let mut interp = Interpretation::new(dim);
        for name in alphabet.names() {
            let sym = GateSymbol::parse(name)?;
            interp.insert(name, sym.matrix_in_dim(dim)?)?;
        }
        Ok(interp)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn insert(&mut self, name: &str, m: Matrix) -> Result<(), InterpError> {
        if m.dim() != self.dim {
            return Err(InterpError::WrongDimension(
                name.to_string(),
                m.dim(),
                self.dim,
            ));
        }
        if self.map.contains_key(name) {
            return Err(InterpError::Clash(name.to_string()));
        }
        self.map.insert(name.to_string(), m);
        Ok(())
    }

    pub fn image(&self, name: &str) -> Option<&Matrix> {
        self.map.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.map.contains_key(name)
    }

    /// Left-to-right product of the images; the empty word maps to `I`.
    pub fn word_matrix(&self, alphabet: &Alphabet, w: &Word) -> Result<Matrix, InterpError> {
        let mut acc = Matrix::identity(self.dim);
        for &sym in w.symbols() {
            let name = alphabet.name(sym);
            let m = self
                .map
                .get(name)
                .ok_or_else(|| InterpError::UnknownSymbol(name.to_string()))?;
            acc = acc.mul(m);
        }
        Ok(acc)
    }

    /// Extension mapping a fresh symbol to the image of `w`; this is the
    /// unique extension compatible with the defining relation `x ≈ w`.
    pub fn extend(&self, alphabet: &Alphabet, name: &str, w: &Word) -> Result<Self, InterpError> {
        if self.map.contains_key(name) {
            return Err(InterpError::Clash(name.to_string()));
        }
        let image = self.word_matrix(alphabet, w)?;
        let mut next = self.clone();
        next.map.insert(name.to_string(), image);
        Ok(next)
    }

    /// Drop a symbol from the map.
    pub fn restrict(&self, name: &str) -> Result<Self, InterpError> {
        if !self.map.contains_key(name) {
            return Err(InterpError::UnknownSymbol(name.to_string()));
        }
        let mut next = self.clone();
        next.map.remove(name);
        Ok(next)
    }
}
