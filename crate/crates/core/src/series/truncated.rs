//! Truncated multivariate Laurent series.
//!
//! Variables `z_0 .. z_{m-1}` are ordered by expansion priority: the variable
//! with the HIGHEST index is the innermost one, i.e. series are elements of
//! the iterated Laurent field `K((z_0))((z_1))...((z_{m-1}))` truncated to a
//! per-variable upper cap. The iterated constant term in the order
//! `CT_{z_0} o ... o CT_{z_{m-1}}` (innermost applied first) is then simply
//! the coefficient of the zero exponent vector.
//!
//! Every series carries a cone *anchor* `m`: a certificate that each true
//! support exponent `e` satisfies `sum_{i>=k} (e_i - m_i) >= 0` for all `k`.
//! All atoms built here satisfy this (exp factors: `m = 0`; an inverted
//! linear form `1/L` with leading variable `k0`: `m = -e_{k0}`), and the
//! property is preserved by products and sums. Together with caps chosen
//! from the anchors (see `safe_caps`), truncation never loses a contribution
//! to the coefficients that are eventually read.

use num::{BigInt, One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::exactnum::{Cyclotomic, QRat};

use super::poly::Poly;

#[derive(Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    zvars: usize,
    poly_vars: usize,
    caps: Vec<i64>,
    anchor: Vec<i64>,
    terms: BTreeMap<Vec<i64>, Poly>,
}

impl TruncatedSeries {
    pub fn zero(zvars: usize, poly_vars: usize, caps: Vec<i64>) -> Self {
        assert_eq!(caps.len(), zvars);
        TruncatedSeries { zvars, poly_vars, caps, anchor: vec![0; zvars], terms: BTreeMap::new() }
    }

    pub fn constant(zvars: usize, poly_vars: usize, caps: Vec<i64>, c: Poly) -> Self {
        let mut s = Self::zero(zvars, poly_vars, caps);
        if !c.is_zero() && s.caps.iter().all(|&c| c >= 0) {
            s.terms.insert(vec![0; zvars], c);
        }
        s
    }

    pub fn one(zvars: usize, poly_vars: usize, caps: Vec<i64>) -> Self {
        let one = Poly::one(poly_vars);
        Self::constant(zvars, poly_vars, caps, one)
    }

    pub fn monomial(zvars: usize, poly_vars: usize, caps: Vec<i64>, e: Vec<i64>, c: Poly) -> Self {
        assert_eq!(e.len(), zvars);
        let anchor: Vec<i64> = e.iter().map(|&x| x.min(0)).collect();
        let mut s = TruncatedSeries { zvars, poly_vars, caps, anchor, terms: BTreeMap::new() };
        if !c.is_zero() && s.in_caps(&e) {
            s.terms.insert(e, c);
        }
        s
    }

    /// Build from explicit single-variable data `z_var^k -> coeff`.
    pub fn single_var(
        zvars: usize,
        poly_vars: usize,
        caps: Vec<i64>,
        var: usize,
        coeffs: Vec<(i64, Poly)>,
    ) -> Self {
        let min_exp = coeffs.iter().map(|(k, _)| *k).min().unwrap_or(0).min(0);
        let mut anchor = vec![0; zvars];
        anchor[var] = min_exp;
        let mut terms = BTreeMap::new();
        for (k, c) in coeffs {
            if k <= caps[var] && !c.is_zero() {
                let mut e = vec![0i64; zvars];
                e[var] = k;
                terms.insert(e, c);
            }
        }
        TruncatedSeries { zvars, poly_vars, caps, anchor, terms }
    }

    /// `exp(g * z_var)` truncated: `sum_j g^j / j! z_var^j`.
    pub fn exp_in_var(zvars: usize, caps: Vec<i64>, var: usize, g: &Poly) -> Self {
        let poly_vars = g.nvars();
        let mut coeffs = Vec::new();
        let mut power = Poly::one(poly_vars);
        let mut fact = QRat::one();
        for j in 0..=caps[var].max(0) {
            if j > 0 {
                power = power.mul(g);
                fact *= QRat::from_integer(BigInt::from(j));
            }
            coeffs.push((j, power.scale_rat(&(QRat::one() / &fact))));
        }
        Self::single_var(zvars, poly_vars, caps, var, coeffs)
    }

    /// `1 / (a_{k0} z_{k0} + ... )`: the inverse of a linear form, expanded
    /// with its lowest-index (outermost) variable leading:
    /// `1/L = sum_j (-1)^j a_{k0}^{-j-1} z_{k0}^{-1-j} R^j` with
    /// `R = sum_{k > k0} a_k z_k`.
    pub fn inv_linear_form(zvars: usize, poly_vars: usize, caps: Vec<i64>, linear: &[QRat]) -> Self {
        assert_eq!(linear.len(), zvars);
        let k0 = linear.iter().position(|a| !a.is_zero()).expect("linear form must be nonzero");
        let a0 = linear[k0].clone();
        let mut anchor = vec![0; zvars];
        anchor[k0] = -1;

        let mut out = TruncatedSeries { zvars, poly_vars, caps: caps.clone(), anchor, terms: BTreeMap::new() };
        // r_pow holds R^j restricted to the caps of the inner variables
        let mut r_pow: BTreeMap<Vec<i64>, QRat> = BTreeMap::new();
        r_pow.insert(vec![0; zvars], QRat::one());
        let mut j: i64 = 0;
        loop {
            let lead = -1 - j;
            if lead <= caps[k0] {
                let scale = {
                    // (-1)^j / a0^{j+1}
                    let mut s = QRat::one() / &a0;
                    for _ in 0..j {
                        s = -s / &a0;
                    }
                    s
                };
                for (e, c) in &r_pow {
                    let mut key = e.clone();
                    key[k0] = lead;
                    if out.in_caps(&key) {
                        let val = Poly::constant(poly_vars, Cyclotomic::from_rational(c * &scale));
                        out.insert_add(key, val);
                    }
                }
            }
            // next power of R
            let mut next: BTreeMap<Vec<i64>, QRat> = BTreeMap::new();
            for (e, c) in &r_pow {
                for (k, a) in linear.iter().enumerate().skip(k0 + 1) {
                    if a.is_zero() {
                        continue;
                    }
                    let mut e2 = e.clone();
                    e2[k] += 1;
                    if e2[k] <= caps[k] {
                        *next.entry(e2).or_insert_with(QRat::zero) += c * a;
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            r_pow = next;
            j += 1;
        }
        out
    }

    /// `(1 - w e^L)^{-1}` for a root-of-unity scalar `w != 1` and a linear
    /// form `L` in the z's. Holomorphic at 0; support is componentwise >= 0.
    pub fn inv_one_minus_exp_regular(
        zvars: usize,
        poly_vars: usize,
        caps: Vec<i64>,
        w: &Cyclotomic,
        linear: &[QRat],
    ) -> Result<Self> {
        let one_minus_w = Cyclotomic::one().sub(w);
        if one_minus_w.is_zero() {
            return Err(Error::Internal("regular factor requires w != 1".into()));
        }
        let inv = one_minus_w.inv()?;
        let ratio = w.mul(&inv); // w / (1 - w)
        // (1 - w e^L)^{-1} = (1-w)^{-1} sum_j (w/(1-w))^j (e^L - 1)^j
        let em1 = Self::exp_linear_minus_one(zvars, poly_vars, caps.clone(), linear);
        let mut acc = Self::one(zvars, poly_vars, caps.clone());
        let mut pw = Self::one(zvars, poly_vars, caps.clone());
        let mut scalar = Cyclotomic::one();
        loop {
            pw = pw.mul(&em1);
            if pw.terms.is_empty() {
                break;
            }
            scalar = scalar.mul(&ratio);
            acc = acc.add(&pw.scale_cyclo(&scalar));
        }
        Ok(acc.scale_cyclo(&inv))
    }

    /// `(1 - e^L)^{-1} = -L^{-1} * ((e^L - 1)/L)^{-1}`, the singular factor.
    pub fn inv_one_minus_exp_singular(
        zvars: usize,
        poly_vars: usize,
        caps: Vec<i64>,
        linear: &[QRat],
    ) -> Self {
        // g = (e^L - 1)/L = sum_m L^m/(m+1)!; support >= 0, g(0) = 1
        let mut g = Self::zero(zvars, poly_vars, caps.clone());
        let mut l_pow = Self::one(zvars, poly_vars, caps.clone());
        let l = Self::linear_form(zvars, poly_vars, caps.clone(), linear);
        let mut m: i64 = 0;
        loop {
            if m > 0 {
                l_pow = l_pow.mul(&l);
                if l_pow.terms.is_empty() {
                    break;
                }
            }
            g = g.add(&l_pow.scale_rat(&(QRat::one() / factorial(m + 1))));
            m += 1;
        }
        let g_inv = g.invert_unit_power_series();
        let l_inv = Self::inv_linear_form(zvars, poly_vars, caps, linear);
        l_inv.mul(&g_inv).neg()
    }

    /// The linear form `sum a_k z_k` as a series.
    pub fn linear_form(zvars: usize, poly_vars: usize, caps: Vec<i64>, linear: &[QRat]) -> Self {
        let mut s = Self::zero(zvars, poly_vars, caps);
        for (k, a) in linear.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let mut e = vec![0i64; zvars];
            e[k] = 1;
            if s.in_caps(&e) {
                s.terms.insert(e, Poly::constant(poly_vars, Cyclotomic::from_rational(a.clone())));
            }
        }
        s
    }

    /// `e^L - 1` for a linear form `L` (componentwise-nonnegative support).
    pub fn exp_linear_minus_one(zvars: usize, poly_vars: usize, caps: Vec<i64>, linear: &[QRat]) -> Self {
        let l = Self::linear_form(zvars, poly_vars, caps.clone(), linear);
        let mut acc = Self::zero(zvars, poly_vars, caps);
        let mut pw = l.clone();
        let mut m: i64 = 1;
        while !pw.terms.is_empty() {
            acc = acc.add(&pw.scale_rat(&(QRat::one() / factorial(m))));
            pw = pw.mul(&l);
            m += 1;
        }
        acc
    }

    /// Invert a power series with unit constant term and componentwise
    /// nonnegative support (geometric series; exact within caps).
    pub fn invert_unit_power_series(&self) -> Self {
        let c0 = self.coefficient(&vec![0; self.zvars]);
        let c0c = c0.constant_coeff();
        assert!(
            c0.num_terms() == 1 && !c0c.is_zero(),
            "constant term must be a nonzero scalar"
        );
        let c0_inv = c0c.inv().expect("nonzero scalar");
        let mut h = self.scale_cyclo(&c0_inv);
        h.terms.remove(&vec![0; self.zvars]);
        // (1 + h)^{-1} = sum (-h)^j
        let mut acc = Self::one(self.zvars, self.poly_vars, self.caps.clone());
        let mut pw = Self::one(self.zvars, self.poly_vars, self.caps.clone());
        let neg_h = h.neg();
        loop {
            pw = pw.mul(&neg_h);
            if pw.terms.is_empty() {
                break;
            }
            acc = acc.add(&pw);
        }
        acc.scale_cyclo(&c0_inv)
    }

    /// General inversion: the leading term (minimal in the iterated-Laurent
    /// valuation order) must be a scalar times a pure monomial.
    pub fn invert(&self) -> Result<Self> {
        let (lead_e, lead_c) = self
            .terms
            .iter()
            .min_by(|(a, _), (b, _)| cmp_val_order(a, b))
            .ok_or(Error::NotInvertible)?;
        let lead_e = lead_e.clone();
        let lead_scalar = if lead_c.num_terms() == 1 {
            let c = lead_c.constant_coeff();
            if c.is_zero() {
                return Err(Error::NotInvertible);
            }
            c
        } else {
            return Err(Error::NotInvertible);
        };
        let lead_inv = lead_scalar.inv()?;
        // h = self / (c z^e) - 1, all terms valuation-positive
        let neg_e: Vec<i64> = lead_e.iter().map(|x| -x).collect();
        let shifted = self.shift(&neg_e).scale_cyclo(&lead_inv);
        let mut h = shifted;
        h.terms.remove(&vec![0; self.zvars]);
        let mut acc = Self::one(self.zvars, self.poly_vars, self.caps.clone());
        let mut pw = Self::one(self.zvars, self.poly_vars, self.caps.clone());
        let neg_h = h.neg();
        let mut guard = 0usize;
        loop {
            pw = pw.mul(&neg_h);
            if pw.terms.is_empty() {
                break;
            }
            acc = acc.add(&pw);
            guard += 1;
            if guard > 100_000 {
                return Err(Error::Internal("series inversion did not terminate".into()));
            }
        }
        Ok(acc.shift(&neg_e).scale_cyclo(&lead_inv))
    }

    /// Divide by another series (see `invert` for the leading-term rule).
    pub fn div(&self, other: &TruncatedSeries) -> Result<Self> {
        Ok(self.mul(&other.invert()?))
    }

    /// Shift all exponents by `delta` (multiplication by the monomial `z^delta`).
    pub fn shift(&self, delta: &[i64]) -> Self {
        let mut out = TruncatedSeries {
            zvars: self.zvars,
            poly_vars: self.poly_vars,
            caps: self.caps.clone(),
            anchor: self.anchor.iter().zip(delta).map(|(a, d)| (a + d).min(0)).collect(),
            terms: BTreeMap::new(),
        };
        for (e, c) in &self.terms {
            let key: Vec<i64> = e.iter().zip(delta).map(|(a, d)| a + d).collect();
            if out.in_caps(&key) {
                out.terms.insert(key, c.clone());
            }
        }
        out
    }

    pub fn zvars(&self) -> usize {
        self.zvars
    }

    pub fn caps(&self) -> &[i64] {
        &self.caps
    }

    pub fn anchor(&self) -> &[i64] {
        &self.anchor
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &Poly)> {
        self.terms.iter()
    }

    fn in_caps(&self, e: &[i64]) -> bool {
        e.iter().zip(&self.caps).all(|(x, c)| x <= c)
    }

    fn insert_add(&mut self, e: Vec<i64>, c: Poly) {
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

    pub fn add(&self, other: &TruncatedSeries) -> Self {
        assert_eq!(self.caps, other.caps, "series caps must agree");
        let mut out = self.clone();
        out.anchor = self.anchor.iter().zip(&other.anchor).map(|(a, b)| *a.min(b)).collect();
        for (e, c) in &other.terms {
            out.insert_add(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.neg();
        }
        out
    }

    pub fn mul(&self, other: &TruncatedSeries) -> Self {
        assert_eq!(self.caps, other.caps, "series caps must agree");
        assert_eq!(self.poly_vars, other.poly_vars);
        let mut out = TruncatedSeries {
            zvars: self.zvars,
            poly_vars: self.poly_vars,
            caps: self.caps.clone(),
            anchor: self.anchor.iter().zip(&other.anchor).map(|(a, b)| a + b).collect(),
            terms: BTreeMap::new(),
        };
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let key: Vec<i64> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                if out.in_caps(&key) {
                    out.insert_add(key, c1.mul(c2));
                }
            }
        }
        out
    }

    pub fn scale_poly(&self, p: &Poly) -> Self {
        let mut out = self.clone();
        out.terms = self
            .terms
            .iter()
            .map(|(e, c)| (e.clone(), c.mul(p)))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        out
    }

    pub fn scale_cyclo(&self, c: &Cyclotomic) -> Self {
        let mut out = self.clone();
        out.terms = self
            .terms
            .iter()
            .map(|(e, v)| (e.clone(), v.scale(c)))
            .filter(|(_, v)| !v.is_zero())
            .collect();
        out
    }

    pub fn scale_rat(&self, r: &QRat) -> Self {
        self.scale_cyclo(&Cyclotomic::from_rational(r.clone()))
    }

    pub fn coefficient(&self, e: &[i64]) -> Poly {
        self.terms.get(e).cloned().unwrap_or_else(|| Poly::zero(self.poly_vars))
    }

    /// Formal derivative in `z_var`.
    pub fn z_derivative(&self, var: usize) -> Self {
        let mut out = TruncatedSeries {
            zvars: self.zvars,
            poly_vars: self.poly_vars,
            caps: self.caps.clone(),
            anchor: {
                let mut a = self.anchor.clone();
                a[var] -= 1;
                a
            },
            terms: BTreeMap::new(),
        };
        for (e, c) in &self.terms {
            if e[var] == 0 {
                continue;
            }
            let mut key = e.clone();
            key[var] -= 1;
            if out.in_caps(&key) {
                out.insert_add(key, c.scale_rat(&QRat::from_integer(BigInt::from(e[var]))));
            }
        }
        out
    }

    /// Extract the `z_var^0` slice and drop the variable. Requires the cap
    /// in that variable to reach order 0.
    pub fn constant_term(&self, var: usize) -> Result<TruncatedSeries> {
        if self.caps[var] < 0 {
            return Err(Error::Precision { variable: var, suggested: (self.caps[var].abs() + 1) * 2 });
        }
        let drop = |v: &[i64]| -> Vec<i64> {
            v.iter().enumerate().filter(|(i, _)| *i != var).map(|(_, x)| *x).collect()
        };
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            if e[var] == 0 {
                terms.insert(drop(e), c.clone());
            }
        }
        let anchor = if terms.is_empty() {
            vec![0; self.zvars - 1]
        } else {
            let mut a = vec![i64::MAX; self.zvars - 1];
            for e in terms.keys() {
                for (i, &x) in e.iter().enumerate() {
                    a[i] = a[i].min(x.min(0));
                }
            }
            a.iter_mut().for_each(|x| {
                if *x == i64::MAX {
                    *x = 0;
                }
            });
            a
        };
        Ok(TruncatedSeries {
            zvars: self.zvars - 1,
            poly_vars: self.poly_vars,
            caps: drop(&self.caps),
            anchor,
            terms,
        })
    }

    /// The full iterated constant term `CT_{z_0} ... CT_{z_{m-1}}` (innermost
    /// variable first): the coefficient of the zero exponent vector.
    pub fn iterated_ct(&self) -> Result<Poly> {
        for (v, &c) in self.caps.iter().enumerate() {
            if c < 0 {
                return Err(Error::Precision { variable: v, suggested: (c.abs() + 1) * 2 });
            }
        }
        Ok(self.coefficient(&vec![0; self.zvars]))
    }

    /// Debug dump, one line per monomial, exponents ascending lexicographic:
    /// `z1^a z2^b : <polynomial>`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (e, c) in &self.terms {
            let mons: Vec<String> =
                e.iter().enumerate().map(|(i, k)| format!("z{}^{}", i + 1, k)).collect();
            out.push_str(&format!("{} : {:?}\n", mons.join(" "), c));
        }
        out
    }
}

/// Caps that make the truncated atom product exact at every coefficient
/// `e <= target`: `cap_k = sum_{i>=k} max(target_i,0) + s_{>=k} + s_{>=k+1} + 1`
/// where `s_{>=k}` counts singular atoms whose leading variable is `>= k`.
/// `atom_anchors` holds one anchor vector per factor in the product.
pub fn safe_caps(zvars: usize, atom_anchors: &[Vec<i64>], target: &[i64]) -> Vec<i64> {
    let mut s_ge = vec![0i64; zvars + 1];
    for k in (0..zvars).rev() {
        let here: i64 = atom_anchors
            .iter()
            .filter(|a| a.iter().enumerate().any(|(i, &x)| i == k && x < 0))
            .map(|a| -a[k])
            .sum();
        s_ge[k] = s_ge[k + 1] + here;
    }
    (0..zvars)
        .map(|k| {
            let t: i64 = (k..zvars).map(|i| target[i].max(0)).sum();
            t + s_ge[k] + s_ge[(k + 1).min(zvars)] + 1
        })
        .collect()
}

/// Compare exponent vectors in the iterated-Laurent valuation order: the
/// innermost (highest-index) variable is most significant.
fn cmp_val_order(a: &[i64], b: &[i64]) -> std::cmp::Ordering {
    for i in (0..a.len()).rev() {
        match a[i].cmp(&b[i]) {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    std::cmp::Ordering::Equal
}

fn factorial(n: i64) -> QRat {
    let mut f = BigInt::one();
    for k in 2..=n {
        f *= BigInt::from(k);
    }
    QRat::from_integer(f)
}

impl fmt::Debug for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Series[caps {:?}, {} terms]", self.caps, self.terms.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{qi, qr};

    fn consts(zvars: usize, caps: Vec<i64>) -> TruncatedSeries {
        TruncatedSeries::one(zvars, 0, caps)
    }

    #[test]
    fn invert_one_minus_exp_neg_z() {
        // (1 - e^{-z})^{-1} = z^{-1} + 1/2 + z/12 - z^3/720 ...
        let caps = vec![4i64];
        let s = TruncatedSeries::inv_one_minus_exp_singular(1, 0, caps, &[qi(-1)]);
        assert_eq!(s.coefficient(&[-1]).constant_coeff(), Cyclotomic::one());
        assert_eq!(s.coefficient(&[0]).constant_coeff(), Cyclotomic::from_rational(qr(1, 2)));
        assert_eq!(s.coefficient(&[1]).constant_coeff(), Cyclotomic::from_rational(qr(1, 12)));
        assert_eq!(s.coefficient(&[2]).constant_coeff(), Cyclotomic::zero());
    }

    #[test]
    fn ct_of_bernoulli_kernel() {
        // z/(1-e^z) has constant term -1 (and z-coefficient 1/2... with sign)
        let caps = vec![4i64];
        let inv = TruncatedSeries::inv_one_minus_exp_singular(1, 0, caps.clone(), &[qi(1)]);
        let z = TruncatedSeries::linear_form(1, 0, caps, &[qi(1)]);
        let s = z.mul(&inv);
        assert_eq!(s.coefficient(&[0]).constant_coeff(), Cyclotomic::from_i64(-1));
        assert_eq!(s.coefficient(&[1]).constant_coeff(), Cyclotomic::from_rational(qr(1, 2)));
    }

    #[test]
    fn basic_rank_one_constant_term() {
        // CT(e^{lambda z} * (ell z/(1-e^{ell z})) * (1-e^{-z})^{-1})
        //   = -lambda + (ell-1)/2, with lambda = x0 and ell = x1 formal.
        let caps = vec![3i64];
        let lambda = Poly::var(2, 0);
        let ell = Poly::var(2, 1);
        let e_lz = TruncatedSeries::exp_in_var(1, caps.clone(), 0, &lambda);
        // ell*z/(1-e^{ell*z}) = -h(ell z)^{-1} where h = (e^w-1)/w: build from
        // the singular inverse times the linear form, with ell folded in as a
        // polynomial coefficient. Expand (1-e^{ell z})^{-1} directly is not
        // possible with polynomial ell, so use the h-series route:
        // w/(e^w - 1) evaluated at w = ell*z.
        let h_inv = h_inverse_series(4);
        let coeffs: Vec<(i64, Poly)> = h_inv
            .iter()
            .enumerate()
            .map(|(m, b)| {
                let p = ell.pow(m as u32).scale_rat(b);
                (m as i64, p)
            })
            .collect();
        // w/(1-e^w) = -w/(e^w-1)
        let t_factor = TruncatedSeries::single_var(1, 2, caps.clone(), 0, coeffs).neg();
        let f = TruncatedSeries::inv_one_minus_exp_singular(1, 2, caps.clone(), &[qi(-1)]);
        let prod = e_lz.mul(&t_factor).mul(&f);
        let ct = prod.iterated_ct().unwrap();
        // expected: -lambda + ell/2 - 1/2
        let expected = lambda
            .neg()
            .add(&ell.scale_rat(&qr(1, 2)))
            .sub(&Poly::one(2).scale_rat(&qr(1, 2)));
        assert_eq!(ct, expected);
    }

    #[test]
    fn ict_order_dependence() {
        // z0/(z0+z1) expanded with z1 innermost gives iCT = 1;
        // with swapped priority (z1 outermost leading) gives 0.
        let caps = vec![3i64, 3];
        let z0 = TruncatedSeries::linear_form(2, 0, caps.clone(), &[qi(1), qi(0)]);
        let inv_a = TruncatedSeries::inv_linear_form(2, 0, caps.clone(), &[qi(1), qi(1)]);
        let a = z0.mul(&inv_a);
        assert_eq!(a.iterated_ct().unwrap().constant_coeff(), Cyclotomic::one());

        // swap roles: treat the variables in the order (z1, z0) by relabeling
        let z0_swapped = TruncatedSeries::linear_form(2, 0, caps.clone(), &[qi(0), qi(1)]);
        let inv_b = TruncatedSeries::inv_linear_form(2, 0, caps, &[qi(1), qi(1)]);
        let b = z0_swapped.mul(&inv_b);
        assert_eq!(b.iterated_ct().unwrap().constant_coeff(), Cyclotomic::zero());
    }

    #[test]
    fn ict_of_pure_ratios_vanishes() {
        let caps = vec![3i64, 3];
        // z1/z0 and z0/z1 both have zero constant term
        let s1 = TruncatedSeries::monomial(2, 0, caps.clone(), vec![-1, 1], Poly::one(0));
        let s2 = TruncatedSeries::monomial(2, 0, caps, vec![1, -1], Poly::one(0));
        assert!(s1.iterated_ct().unwrap().is_zero());
        assert!(s2.iterated_ct().unwrap().is_zero());
    }

    #[test]
    fn scaling_invariance_of_ict() {
        // replacing z_k by c_k z_k leaves the iterated CT unchanged:
        // check on T = e^{2 z0} (1-e^{-(z0+z1)})^{-1} (1-e^{-z1})^{-1}
        let caps = vec![6i64, 6];
        let build = |c0: QRat, c1: QRat| {
            let two = Poly::constant(0, Cyclotomic::from_i64(2)).scale_rat(&c0);
            let e = TruncatedSeries::exp_in_var(2, caps.clone(), 0, &two);
            let f1 = TruncatedSeries::inv_one_minus_exp_singular(
                2,
                0,
                caps.clone(),
                &[-c0.clone(), -c1.clone()],
            );
            let f2 =
                TruncatedSeries::inv_one_minus_exp_singular(2, 0, caps.clone(), &[qi(0), -c1.clone()]);
            e.mul(&f1).mul(&f2).iterated_ct().unwrap()
        };
        let base = build(qi(1), qi(1));
        assert_eq!(base, build(qi(3), qi(1)));
        assert_eq!(base, build(qr(1, 2), qi(-2)));
        assert_eq!(base, build(qi(-1), qr(5, 3)));
    }

    #[test]
    fn derivative_has_no_residue() {
        let caps = vec![4i64];
        let s = TruncatedSeries::inv_one_minus_exp_singular(1, 0, caps, &[qi(1)]);
        let ds = s.z_derivative(0);
        // the z^{-1} coefficient of an exact derivative vanishes
        assert!(ds.coefficient(&[-1]).is_zero());
    }

    #[test]
    fn division_and_general_inverse() {
        let caps = vec![4i64];
        let one = consts(1, caps.clone());
        let em1 = TruncatedSeries::exp_linear_minus_one(1, 0, caps.clone(), &[qi(-1)]);
        let denom = one.add(&em1.neg()); // 1 - (e^{-z} - 1) ... = 2 - e^{-z}
        let q = one.div(&denom).unwrap();
        let prod = q.mul(&denom);
        assert_eq!(prod.coefficient(&[0]).constant_coeff(), Cyclotomic::one());
        for k in 1..=3 {
            assert!(prod.coefficient(&[k]).is_zero());
        }
        // pure monomial inverse shifts exponents
        let m = TruncatedSeries::monomial(1, 0, caps.clone(), vec![2], Poly::one(0));
        let mi = m.invert().unwrap();
        assert_eq!(mi.coefficient(&[-2]).constant_coeff(), Cyclotomic::one());
        // a zero series is not invertible
        assert!(TruncatedSeries::zero(1, 0, caps).invert().is_err());
    }

    /// Coefficients of `w / (e^w - 1)` up to the requested order.
    pub fn h_inverse_series(order: usize) -> Vec<QRat> {
        super::h_inverse_series(order)
    }
}

/// Coefficients `b_m` of `w/(e^w - 1) = sum_m b_m w^m`
/// (`1, -1/2, 1/12, 0, -1/720, ...`).
pub fn h_inverse_series(order: usize) -> Vec<QRat> {
    // invert h(w) = (e^w - 1)/w = sum_m w^m/(m+1)!
    let mut b = vec![QRat::zero(); order + 1];
    b[0] = QRat::one();
    for m in 1..=order {
        let mut acc = QRat::zero();
        for j in 0..m {
            acc += &b[j] / factorial((m - j + 1) as i64);
        }
        b[m] = -acc;
    }
    b
}
