//! Exact computer algebra for free Lie and Poisson algebras.
//!
//! The crate builds, over the rationals:
//!
//! * the free Lie algebra on finitely many generators with its Lyndon basis
//!   ([`freelie`]);
//! * the free Poisson algebra `SLV`, the symmetrization map into the tensor
//!   algebra and the PBW star product with its graded components
//!   ([`freepoisson`]);
//! * truncated Poisson envelopes of finitely presented commutative algebras
//!   ([`envelope`]);
//! * the quantized truncated algebras built from the star product
//!   ([`quantize`]);
//! * commutator and nil-Poisson filtrations of finite-dimensional algebras
//!   ([`filtration`]);
//! * a small expression language with JSON interchange ([`syntax`]) and the
//!   property checks behind the `verify` command ([`verify`]).
//!
//! All arithmetic is exact; no floating point is used anywhere.

pub mod combination;
pub mod envelope;
pub mod error;
pub mod filtration;
pub mod freelie;
pub mod freepoisson;
pub mod linalg;
pub mod quantize;
pub mod syntax;
pub mod verify;

pub use combination::Combination;
pub use error::AlgebraError;
pub use freelie::{LieElement, LyndonWord, TensorElement, Word};
pub use freepoisson::{PoissonElement, PoissonMonomial};
pub use linalg::{Rational, SparseMatrix, SparseVector, Span};
