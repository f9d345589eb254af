//! Roots of unity as reduced rational exponents.
//!
//! `RootOfUnity { exponent: a/b }` stands for `e^{2*pi*i*a/b}` with
//! `0 <= a/b < 1` reduced; the order of the root is the denominator `b`.
//! Multiplication is addition of exponents mod 1, which keeps products of
//! character values exact without ever touching a cyclotomic field.

use num::{BigInt, One, ToPrimitive, Zero};
use std::fmt;

use super::rational::{frac_mod_one, qi, QRat};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RootOfUnity {
    exponent: QRat,
}

impl RootOfUnity {
    /// The root `e^{2*pi*i*exp}`; the exponent is reduced mod 1.
    pub fn from_exponent(exp: QRat) -> Self {
        RootOfUnity {
            exponent: frac_mod_one(&exp),
        }
    }

    pub fn one() -> Self {
        RootOfUnity {
            exponent: QRat::zero(),
        }
    }

    /// Primitive `n`-th root `zeta_n^k = e^{2*pi*i*k/n}`.
    pub fn root(k: i64, n: i64) -> Self {
        assert!(n > 0, "root order must be positive");
        Self::from_exponent(QRat::new(BigInt::from(k), BigInt::from(n)))
    }

    pub fn exponent(&self) -> &QRat {
        &self.exponent
    }

    /// Multiplicative order: the denominator of the reduced exponent.
    pub fn order(&self) -> u64 {
        self.exponent
            .denom()
            .to_u64()
            .expect("root-of-unity order exceeds u64")
    }

    pub fn is_one(&self) -> bool {
        self.exponent.is_zero()
    }

    pub fn mul(&self, other: &RootOfUnity) -> RootOfUnity {
        Self::from_exponent(&self.exponent + &other.exponent)
    }

    pub fn inv(&self) -> RootOfUnity {
        Self::from_exponent(-&self.exponent)
    }

    /// Complex conjugate; for a root of unity this is the inverse.
    pub fn conj(&self) -> RootOfUnity {
        self.inv()
    }

    pub fn pow(&self, k: i64) -> RootOfUnity {
        Self::from_exponent(&self.exponent * qi(k))
    }

    /// All `m`-th roots of `self`, i.e. the solutions of `zeta^m = self`.
    pub fn roots(&self, m: u64) -> Vec<RootOfUnity> {
        assert!(m > 0);
        let base = &self.exponent / qi(m as i64);
        (0..m)
            .map(|j| Self::from_exponent(&base + QRat::new(BigInt::from(j), BigInt::from(m))))
            .collect()
    }
}

impl fmt::Debug for RootOfUnity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent.is_zero() {
            write!(f, "1")
        } else if self.exponent == QRat::new(BigInt::one(), BigInt::from(2)) {
            write!(f, "-1")
        } else {
            write!(f, "e(2pi*i*{})", self.exponent)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational::qr;

    #[test]
    fn group_law_and_order() {
        let z3 = RootOfUnity::root(1, 3);
        assert_eq!(z3.order(), 3);
        assert!(z3.mul(&z3).mul(&z3).is_one());
        assert_eq!(z3.inv(), RootOfUnity::root(2, 3));
        assert_eq!(z3.pow(-1), z3.inv());
        assert_eq!(RootOfUnity::root(6, 4), RootOfUnity::root(1, 2));
    }

    #[test]
    fn m_th_roots_enumerate_solutions() {
        let u = RootOfUnity::one();
        let rs = u.roots(2);
        assert_eq!(rs.len(), 2);
        assert!(rs.contains(&RootOfUnity::one()));
        assert!(rs.contains(&RootOfUnity::root(1, 2)));
        for r in u.roots(3) {
            assert!(r.pow(3).is_one());
        }
        let v = RootOfUnity::from_exponent(qr(1, 3));
        for r in v.roots(2) {
            assert_eq!(r.pow(2), v);
        }
    }
}
