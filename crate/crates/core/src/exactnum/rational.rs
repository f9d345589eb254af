//! Arbitrary-precision rationals and their `"p/q"` wire format.
//!
//! `BigRational` already maintains the invariants we need (always reduced,
//! denominator positive), so this module only adds parsing, formatting, and
//! small conveniences used throughout the crate.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};

use crate::error::{Error, Result};

/// The ambient rational scalar type. Always reduced, denominator > 0.
pub type QRat = BigRational;

/// Parse a rational from the wire format `"p/q"` or `"p"`.
///
/// Whitespace is not accepted; the denominator must be nonzero. A leading `-`
/// is allowed on the numerator only.
pub fn parse_rational(s: &str) -> Result<QRat> {
    let bad = |msg: &str| Error::Config {
        pointer: String::new(),
        message: format!("invalid rational {s:?}: {msg}"),
    };
    let (num_str, den_str) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let num: BigInt = num_str
        .parse()
        .map_err(|_| bad("numerator is not an integer"))?;
    let den: BigInt = den_str
        .parse()
        .map_err(|_| bad("denominator is not an integer"))?;
    if den.is_zero() {
        return Err(bad("denominator is zero"));
    }
    if den.is_negative() {
        return Err(bad("denominator must be positive"));
    }
    Ok(QRat::new(num, den))
}

/// Format a rational in the wire format: `"p"` for integers, `"p/q"` otherwise.
pub fn format_rational(r: &QRat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// `n` as a rational.
pub fn qi(n: i64) -> QRat {
    QRat::from_integer(BigInt::from(n))
}

/// `p/q` as a rational (q != 0).
pub fn qr(p: i64, q: i64) -> QRat {
    QRat::new(BigInt::from(p), BigInt::from(q))
}

/// Reduce `r` into the half-open interval `[0, 1)` modulo 1.
pub fn frac_mod_one(r: &QRat) -> QRat {
    let fl = r.floor();
    r - fl
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["0", "5", "-3", "2/3", "-7/12", "10/4"] {
            let r = parse_rational(s).unwrap();
            let back = parse_rational(&format_rational(&r)).unwrap();
            assert_eq!(r, back);
        }
        assert_eq!(format_rational(&parse_rational("10/4").unwrap()), "5/2");
    }

    #[test]
    fn parse_rejects_bad_input() {
        for s in ["", "1/0", "1/-2", "a", "1/b", "1.5"] {
            assert!(parse_rational(s).is_err(), "should reject {s:?}");
        }
    }

    #[test]
    fn frac_mod_one_lands_in_unit_interval() {
        for (p, q, want_p, want_q) in [(-1, 2, 1, 2), (7, 3, 1, 3), (4, 1, 0, 1), (-9, 4, 3, 4)] {
            assert_eq!(frac_mod_one(&qr(p, q)), qr(want_p, want_q));
        }
    }
}
