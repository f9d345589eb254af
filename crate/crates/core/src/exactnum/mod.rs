//! Exact scalars: arbitrary-precision rationals, roots of unity, and elements
//! of cyclotomic fields `Q(zeta_N)` in a canonical normal form.
//!
//! All Verlinde-sum values live here. The canonical form (reduction modulo the
//! N-th cyclotomic polynomial) makes equality decidable, which is the one
//! property every downstream test needs.

pub mod rational;
pub mod root_of_unity;
pub mod cyclotomic;

pub use rational::{format_rational, frac_mod_one, parse_rational, qi, qr, QRat};
pub use root_of_unity::RootOfUnity;
pub use cyclotomic::Cyclotomic;
