//! Sparse multivariate polynomials with cyclotomic coefficients.
//!
//! These are the series coefficients of the symbolic residue calculus: for a
//! rank-`r` problem the variables are the `r` coordinates of `lambda`
//! followed by `ell`. With zero variables the ring degenerates to plain
//! cyclotomic constants, which is what the pointwise (evaluated) mode uses.

use num::{BigInt, One, Zero};
use std::collections::BTreeMap;
use std::fmt;

use crate::exactnum::{Cyclotomic, QRat};

/// `sum_e coeff_e * x^e` with exponent vectors of fixed length `nvars`.
#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Cyclotomic>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Cyclotomic) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(vec![0; nvars], c);
        }
        Poly { nvars, terms }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Cyclotomic::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars);
        let mut e = vec![0u32; nvars];
        e[i] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(e, Cyclotomic::one());
        Poly { nvars, terms }
    }

    /// Degree-one polynomial `c0 + sum_i c_i x_i` from rational data.
    pub fn linear(nvars: usize, c0: QRat, coeffs: &[QRat]) -> Self {
        let mut p = Self::constant(nvars, Cyclotomic::from_rational(c0));
        for (i, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                p = p.add(&Self::var(nvars, i).scale_rat(c));
            }
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Cyclotomic)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn constant_coeff(&self) -> Cyclotomic {
        self.terms.get(&vec![0; self.nvars]).cloned().unwrap_or_else(Cyclotomic::zero)
    }

    pub fn coeff(&self, e: &[u32]) -> Cyclotomic {
        self.terms.get(e).cloned().unwrap_or_else(Cyclotomic::zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    fn insert_add(&mut self, e: Vec<u32>, c: Cyclotomic) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(v) => {
                *v = v.add(&c);
                if v.is_zero() {
                    self.terms.remove(&e);
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.insert_add(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c.neg())).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.nvars, other.nvars);
        let mut out = Poly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.insert_add(e, c1.mul(c2));
            }
        }
        out
    }

    pub fn scale(&self, c: &Cyclotomic) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v.mul(c))).collect(),
        }
    }

    pub fn scale_rat(&self, r: &QRat) -> Poly {
        self.scale(&Cyclotomic::from_rational(r.clone()))
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut out = Poly::one(self.nvars);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Evaluate at a rational point.
    pub fn eval(&self, point: &[QRat]) -> Cyclotomic {
        debug_assert_eq!(point.len(), self.nvars);
        let mut acc = Cyclotomic::zero();
        for (e, c) in &self.terms {
            let mut m = QRat::one();
            for (x, &k) in point.iter().zip(e) {
                for _ in 0..k {
                    m *= x;
                }
            }
            acc = acc.add(&c.scale(&m));
        }
        acc
    }

    pub fn eval_i64(&self, point: &[i64]) -> Cyclotomic {
        let q: Vec<QRat> = point.iter().map(|&x| QRat::from_integer(BigInt::from(x))).collect();
        self.eval(&q)
    }

    /// Partial derivative in variable `i`.
    pub fn derivative(&self, i: usize) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut e2 = e.clone();
                e2[i] -= 1;
                out.insert_add(e2, c.scale(&QRat::from_integer(BigInt::from(e[i]))));
            }
        }
        out
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c:?})")?;
            for (i, &k) in e.iter().enumerate() {
                if k == 1 {
                    write!(f, "*x{i}")?;
                } else if k > 1 {
                    write!(f, "*x{i}^{k}")?;
                }
            }
        }
        Ok(())
    }
}
