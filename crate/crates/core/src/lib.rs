//! Exact deformation-theory engine for chain complexes and dg Lie algebras.
//!
//! Everything here is computed over an exact field of characteristic zero
//! (in practice [`Rat`], arbitrary-precision rationals): kernels and ranks,
//! homology of chain complexes, dg Lie algebra axioms, Maurer-Cartan sets of
//! nilpotent dg Lie algebras, gauge equivalence, the (simplicial) Deligne
//! groupoid, Sullivan polynomial forms on simplices, and twisted complexes
//! over artinian local dg bases.
//!
//! The core is generic over the scalar type through [`scalar::Scalar`]; the
//! aliases below fix the rational instantiation used by the CLI and the test
//! suites.

pub mod artin;
pub mod check;
pub mod deform;
pub mod deligne;
pub mod dgla;
pub mod forms;
pub mod graded;
pub mod linalg;
pub mod mc;
pub mod scalar;

/// Arbitrary-precision rational scalar, the default ground field.
pub type Rat = num_rational::BigRational;

/// Matrix over the rationals.
pub type QMatrix = linalg::Matrix<Rat>;
/// Chain complex over the rationals.
pub type QComplex = graded::ChainComplex<Rat>;
/// dg Lie algebra over the rationals.
pub type QDgla = dgla::Dgla<Rat>;
/// Commutative dg algebra over the rationals.
pub type QCdga = dgla::Cdga<Rat>;
/// Artinian local dg algebra over the rationals.
pub type QArtinian = artin::ArtinianLocalDga<Rat>;
// /// Sullivan polynomial form over the rationals.
/// Polynomial form on a simplex with rational coefficients.
pub type QForm = forms::SullivanForm<Rat>;

/// Shorthand for building a [`Rat`] from an integer.
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(n.into())
}

/// Shorthand for building a [`Rat`] fraction `n/d`.
pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(n.into(), d.into())
}
