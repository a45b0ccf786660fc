//! Exact matrix semantics and equational reasoning for 3-qubit
//! Toffoli-Hadamard circuits.
//!
//! The crate is organized around three layers:
//!
//! - **Exact arithmetic** ([`exact`]): scalars of the form `n / √2^k` over
//!   arbitrary-precision integers, dense matrices over them, and exact
//!   commutant computation. Everything downstream is decided by exact
//!   equality, never by floating point.
//! - **Gate semantics** ([`gates`], [`e8`]): the matrices of the named
//!   one-, two- and three-qubit gates, multi-level operators, the E8 root
//!   system, Householder reflections, and the interpretation map from
//!   words to matrices.
//! - **Presentations and rewriting** ([`words`], [`schemas`], [`tietze`],
//!   [`proofs`], [`equiv`]): monoid presentations with a line-oriented file
//!   format, single-step rewriting and bounded derivation search, the four
//!   presentation transformations with validity checking, derivational
//!   proof checking, relation-schema instantiation and counting, and the
//!   H-pushing normal form that decides circuit equivalence.

pub mod e8;
pub mod equiv;
pub mod exact;
pub mod gates;
pub mod proofs;
pub mod schemas;
pub mod tietze;
pub mod words;

pub use exact::{Matrix, Scalar, SdeClass};
pub use gates::{GateSymbol, Interpretation};
pub use words::{Alphabet, Direction, Presentation, Relation, RewriteStep, Word};
