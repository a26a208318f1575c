//! Exact arithmetic: rationals, Laurent polynomials, graded truncated series.

pub mod field;
pub mod laurent;
pub mod rational;
pub mod series;
pub mod var;

pub use field::Field;
pub use laurent::{Bindings, LaurentPoly};
pub use rational::Rational;
pub use series::TruncatedSeries;
pub use var::{Monomial, Var, WeightMap, MAX_X, NVARS};
