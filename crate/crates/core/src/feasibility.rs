//! Exact feasibility of systems of rational linear inequalities.
//!
//! Fourier-Motzkin elimination over `Q`, with strict and non-strict
//! inequalities tracked separately. Used for cone-membership and
//! validity-region tests where no epsilon is acceptable. System sizes are
//! small (a handful of variables), so the quadratic blowup per elimination
//! step is irrelevant; duplicate constraints are pruned after normalization.

use num::{One, Signed, Zero};
use std::collections::BTreeSet;

use crate::exactnum::QRat;

/// One constraint `coeffs . x  (<|<=)  rhs`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Row {
    coeffs: Vec<QRat>,
    rhs: QRat,
    strict: bool,
}

impl Row {
    /// Scale so the largest absolute coefficient is 1; keeps the set
    /// representation small without changing the constraint.
    fn normalized(mut self) -> Row {
        let mut scale: Option<QRat> = None;
        for c in self.coeffs.iter().chain(std::iter::once(&self.rhs)) {
            let a = c.abs();
            if !a.is_zero() {
                match &scale {
                    Some(s) if *s >= a => {}
                    _ => scale = Some(a),
                }
            }
        }
        if let Some(s) = scale {
            for c in self.coeffs.iter_mut() {
                *c = &*c / &s;
            }
            self.rhs = &self.rhs / &s;
        }
        self
    }
}

/// A conjunction of rational linear constraints on `nvars` unknowns.
#[derive(Clone, Debug)]
pub struct System {
    nvars: usize,
    rows: Vec<Row>,
}

impl System {
    pub fn new(nvars: usize) -> Self {
        System { nvars, rows: Vec::new() }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Add `coeffs . x <= rhs`.
    pub fn le(&mut self, coeffs: Vec<QRat>, rhs: QRat) {
        debug_assert_eq!(coeffs.len(), self.nvars);
        self.rows.push(Row { coeffs, rhs, strict: false });
    }

    /// Add `coeffs . x < rhs`.
    pub fn lt(&mut self, coeffs: Vec<QRat>, rhs: QRat) {
        debug_assert_eq!(coeffs.len(), self.nvars);
        self.rows.push(Row { coeffs, rhs, strict: true });
    }

    /// Add `coeffs . x >= rhs`.
    pub fn ge(&mut self, coeffs: Vec<QRat>, rhs: QRat) {
        self.le(coeffs.into_iter().map(|c| -c).collect(), -rhs);
    }

    /// Add `coeffs . x > rhs`.
    pub fn gt(&mut self, coeffs: Vec<QRat>, rhs: QRat) {
        self.lt(coeffs.into_iter().map(|c| -c).collect(), -rhs);
    }

    /// Add `coeffs . x == rhs` (as a pair of non-strict inequalities).
    pub fn eq(&mut self, coeffs: Vec<QRat>, rhs: QRat) {
        self.le(coeffs.clone(), rhs.clone());
        self.ge(coeffs, rhs);
    }

    /// Decide whether a rational solution exists.
    pub fn feasible(&self) -> bool {
        let mut rows: Vec<Row> = self.rows.iter().map(|r| r.clone().normalized()).collect();
        for var in (0..self.nvars).rev() {
            let mut uppers: Vec<Row> = Vec::new(); // coeff > 0 after keeping x_var on the left
            let mut lowers: Vec<Row> = Vec::new(); // coeff < 0
            let mut rest: Vec<Row> = Vec::new();
            for r in rows.into_iter() {
                let c = r.coeffs[var].clone();
                if c.is_zero() {
                    rest.push(r);
                } else if c.is_positive() {
                    uppers.push(scale_out(r, var));
                } else {
                    lowers.push(scale_out(r, var));
                }
            }
            let mut seen: BTreeSet<Row> = rest.iter().cloned().collect();
            // combine every lower bound with every upper bound
            for lo in &lowers {
                for up in &uppers {
                    // lo: -x + a.x' <= b  => a.x' - b <= x
                    // up:  x + c.x' <= d  => x <= d - c.x'
                    let mut coeffs = Vec::with_capacity(self.nvars);
                    for i in 0..self.nvars {
                        coeffs.push(&lo.coeffs[i] + &up.coeffs[i]);
                    }
                    let mut row = Row {
                        coeffs,
                        rhs: &lo.rhs + &up.rhs,
                        strict: lo.strict || up.strict,
                    };
                    row.coeffs[var] = QRat::zero();
                    let row = row.normalized();
                    if seen.insert(row.clone()) {
                        rest.push(row);
                    }
                }
            }
            rows = rest;
        }
        // only constant constraints remain: 0 (<|<=) rhs
        rows.iter().all(|r| {
            if r.strict {
                r.rhs.is_positive()
            } else {
                !r.rhs.is_negative()
            }
        })
    }
}

/// Divide a row through by |coeff(var)| so that the kept coefficient is +-1.
fn scale_out(mut r: Row, var: usize) -> Row {
    let a = r.coeffs[var].abs();
    if !a.is_one() {
        for c in r.coeffs.iter_mut() {
            *c = &*c / &a;
        }
        r.rhs = &r.rhs / &a;
    }
    r
}
