//! Truncated multivariate Laurent series whose coefficients are polynomials
//! over a cyclotomic field, plus the constant-term functionals evaluated on
//! them. This is the residue-calculus workhorse behind the quasi-polynomial
//! germs.

pub mod poly;
pub mod truncated;

pub use poly::Poly;
pub use truncated::TruncatedSeries;
