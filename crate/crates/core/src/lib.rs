//! Exact modular data, fusion rings and the metaplectic family.

pub mod analyze;
pub mod arith;
pub mod cyclo;
pub mod format;
pub mod fusion;
pub mod moddata;
pub mod zoo;

use num_rational::{BigRational, Rational64};

pub use cyclo::{Accumulator, Cyclotomic, CycloError};

/// Cyclotomic numbers with arbitrary precision rational coefficients.
pub type Cyclo = Cyclotomic<BigRational>;
/// Cyclotomic numbers with machine-word rational coefficients.
pub type Cyclo64 = Cyclotomic<Rational64>;

/// `n/d` as an arbitrary precision rational.
pub fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}
