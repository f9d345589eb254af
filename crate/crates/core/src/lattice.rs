//! Lattice pairs `Lambda <= Xi`, the torsion subgroups `T_ell`, characters,
//! and the calculus of functions on the weight lattice (delta functions,
//! convolution, finite differences, pull/push, finite Fourier transform).
//!
//! Coordinates: `Lambda = Z^r` always; `Xi` is described by a rational
//! generator matrix (rows) containing `Z^r`. Weights live in
//! `Lambda^* = Z^r` with the plain dot-product pairing. The inner product
//! `B` is an integer symmetric positive-definite matrix on `Lambda`; its
//! inverse is the induced inner product on covectors.

use num::{BigInt, One, Signed, ToPrimitive, Zero};
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::exactnum::{frac_mod_one, Cyclotomic, QRat, RootOfUnity};
use crate::linalg::{
    self, imat_mul, qmat_from_imat, qmat_inverse, qmat_mul, qsolve_left, quotient_reps, IMat,
    QMat, QVec,
};

/// The pair `Lambda = Z^r  <=  Xi` with an integral inner product.
#[derive(Clone)]
pub struct LatticeContext {
    rank: usize,
    /// Rows are generators of `Xi` in the coordinates of `t = Lambda (x) R`.
    xi_rows: QMat,
    /// `xi_rows^{-1}`, integral exactly because `Lambda <= Xi`.
    xi_inv: IMat,
    /// Rows form a basis of `Xi^* <= Lambda^*` (equal to `xi_inv` transposed).
    xi_star_rows: IMat,
    /// Integer symmetric positive-definite inner product on `Lambda`.
    inner: IMat,
    /// Inverse of `inner`: the induced inner product on `Lambda^* (x) Q`.
    inner_dual: QMat,
    /// Index `[Xi : Lambda]`.
    index: u64,
}

impl LatticeContext {
    pub fn new(xi_rows: QMat, inner: IMat) -> Result<Self> {
        let rank = xi_rows.len();
        if rank == 0 {
            // rank-0 context: trivial lattices; used by reductions
            return Ok(LatticeContext {
                rank: 0,
                xi_rows: vec![],
                xi_inv: vec![],
                xi_star_rows: vec![],
                inner: vec![],
                inner_dual: vec![],
                index: 1,
            });
        }
        let cfg = |m: String| Error::Config { pointer: "xi_generators".into(), message: m };
        if xi_rows.iter().any(|r| r.len() != rank) {
            return Err(cfg("generator matrix must be square".into()));
        }
        let inv_q = qmat_inverse(&xi_rows).ok_or_else(|| cfg("generators are dependent".into()))?;
        let mut xi_inv: IMat = Vec::with_capacity(rank);
        for row in &inv_q {
            let mut irow = Vec::with_capacity(rank);
            for x in row {
                if !x.denom().is_one() {
                    return Err(cfg("Z^r is not contained in the span of the generators".into()));
                }
                irow.push(x.numer().clone());
            }
            xi_inv.push(irow);
        }
        let det = int_det(&xi_inv);
        if det.is_zero() {
            return Err(cfg("generators are dependent".into()));
        }
        let index: u64 = det.abs().to_u64().ok_or_else(|| cfg("index too large".into()))?;
        let xi_star_rows: IMat = (0..rank)
            .map(|i| (0..rank).map(|j| xi_inv[j][i].clone()).collect())
            .collect();

        let icfg = |m: String| Error::Config { pointer: "inner_product".into(), message: m };
        if inner.len() != rank || inner.iter().any(|r| r.len() != rank) {
            return Err(icfg("inner product must be rank x rank".into()));
        }
        for i in 0..rank {
            for j in 0..rank {
                if inner[i][j] != inner[j][i] {
                    return Err(icfg("inner product must be symmetric".into()));
                }
            }
        }
        // positive definiteness via leading principal minors
        for k in 1..=rank {
            let sub: QMat = (0..k)
                .map(|i| (0..k).map(|j| QRat::from_integer(inner[i][j].clone())).collect())
                .collect();
            if !q_det(&sub).is_positive() {
                return Err(icfg("inner product must be positive definite".into()));
            }
        }
        let inner_dual = qmat_inverse(&qmat_from_imat(&inner))
            .ok_or_else(|| icfg("inner product must be invertible".into()))?;
        Ok(LatticeContext { rank, xi_rows, xi_inv, xi_star_rows, inner, inner_dual, index })
    }

    /// The standard context `Lambda = Xi = Z^r` with the identity form.
    pub fn standard(rank: usize) -> Self {
        let xi: QMat = (0..rank)
            .map(|i| (0..rank).map(|j| if i == j { QRat::one() } else { QRat::zero() }).collect())
            .collect();
        let inner = linalg::identity_imat(rank);
        LatticeContext::new(xi, inner).expect("standard context is valid")
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn xi_rows(&self) -> &QMat {
        &self.xi_rows
    }

    pub fn inner(&self) -> &IMat {
        &self.inner
    }

    /// Rows generate `Xi^*` inside `Lambda^* = Z^r`.
    pub fn xi_star_rows(&self) -> &IMat {
        &self.xi_star_rows
    }

    /// Inner product of two covectors via `B^{-1}`.
    pub fn pair_dual(&self, a: &[QRat], b: &[QRat]) -> QRat {
        let ga = linalg::qvec_mat(a, &self.inner_dual);
        linalg::dot_q(&ga, b)
    }

    /// Convert a covector to the vector it pairs like: `tau = B^{-1} a`, so
    /// that `<alpha, tau> = B^{-1}(alpha, a)` is a plain dot product.
    pub fn covector_to_vector(&self, a: &[QRat]) -> QVec {
        linalg::qvec_mat(a, &self.inner_dual)
    }

    /// `#T_ell = ell^rank * [Xi : Lambda]`.
    pub fn t_ell_size(&self, ell: u64) -> u128 {
        (ell as u128).pow(self.rank as u32) * self.index as u128
    }

    /// Enumerate one representative per element of `T_ell = (1/ell) Xi / Lambda`,
    /// via the Smith normal form of `ell * xi_inv`. Sorted by coordinates.
    pub fn enumerate_t_ell(&self, ell: u64) -> Vec<TorusPoint> {
        assert!(ell >= 1);
        if self.rank == 0 {
            return vec![TorusPoint { coords: vec![] }];
        }
        let m: IMat = self
            .xi_inv
            .iter()
            .map(|row| row.iter().map(|x| x * BigInt::from(ell)).collect())
            .collect();
        let reps = quotient_reps(&m);
        let ell_q = QRat::from_integer(BigInt::from(ell));
        let mut pts: Vec<TorusPoint> = reps
            .into_iter()
            .map(|rep| {
                let repq: QVec = rep.iter().map(|x| QRat::from_integer(x.clone()) / &ell_q).collect();
                let coords = linalg::qvec_mat(&repq, &self.xi_rows);
                TorusPoint::new(coords)
            })
            .collect();
        pts.sort();
        pts.dedup();
        debug_assert_eq!(pts.len() as u128, self.t_ell_size(ell));
        pts
    }

    /// Representatives of the dual quotient `Lambda^* / ell Xi^*`.
    pub fn lambda_star_mod_ell_xi_star(&self, ell: u64) -> Vec<Vec<i64>> {
        let m: IMat = self
            .xi_star_rows
            .iter()
            .map(|row| row.iter().map(|x| x * BigInt::from(ell)).collect())
            .collect();
        quotient_reps(&m)
            .into_iter()
            .map(|r| r.iter().map(|x| x.to_i64().expect("rep out of range")).collect())
            .collect()
    }

    /// Membership test `lambda in Xi^*`.
    pub fn in_xi_star(&self, lambda: &[i64]) -> bool {
        let x: Vec<BigInt> = lambda.iter().map(|&v| BigInt::from(v)).collect();
        linalg::solve_in_row_lattice(&self.xi_star_rows, &x).is_some()
    }
}

impl fmt::Debug for LatticeContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LatticeContext(rank {}, index {})", self.rank, self.index)
    }
}

fn int_det(a: &IMat) -> BigInt {
    let q = q_det(&qmat_from_imat(a));
    assert!(q.denom().is_one());
    q.numer().clone()
}

fn q_det(a: &QMat) -> QRat {
    let n = a.len();
    let mut m = a.clone();
    let mut det = QRat::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&i| !m[i][col].is_zero()) else {
            return QRat::zero();
        };
        if p != col {
            m.swap(col, p);
            det = -det;
        }
        det *= &m[col][col];
        let pivot = m[col][col].clone();
        for i in col + 1..n {
            if !m[i][col].is_zero() {
                let f = &m[i][col] / &pivot;
                for j in col..n {
                    let d = &f * &m[col][j];
                    m[i][j] -= d;
                }
            }
        }
    }
    det
}

/// A point of the torus `t / Lambda`, stored as the reduced representative
/// in `[0,1)^r`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct TorusPoint {
    coords: QVec,
}

impl TorusPoint {
    pub fn new(coords: QVec) -> Self {
        TorusPoint { coords: coords.iter().map(frac_mod_one).collect() }
    }

    pub fn identity(rank: usize) -> Self {
        TorusPoint { coords: vec![QRat::zero(); rank] }
    }

    pub fn coords(&self) -> &[QRat] {
        &self.coords
    }

    pub fn is_identity(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn mul(&self, other: &TorusPoint) -> TorusPoint {
        TorusPoint::new(linalg::qvec_add(&self.coords, &other.coords))
    }

    pub fn inv(&self) -> TorusPoint {
        TorusPoint::new(self.coords.iter().map(|c| -c).collect())
    }

    /// The character value `t^lambda` as a root of unity.
    pub fn character_root(&self, lambda: &[i64]) -> RootOfUnity {
        let mut e = QRat::zero();
        for (c, &l) in self.coords.iter().zip(lambda) {
            e += c * QRat::from_integer(BigInt::from(l));
        }
        RootOfUnity::from_exponent(e)
    }

    /// The character value `t^lambda` embedded at the order of the root.
    pub fn character(&self, lambda: &[i64]) -> Cyclotomic {
        Cyclotomic::from_root(&self.character_root(lambda))
    }
}

impl fmt::Debug for TorusPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// A weight with a root-of-unity scalar attached.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AugmentedWeight {
    pub alpha: Vec<i64>,
    pub u: RootOfUnity,
}

impl AugmentedWeight {
    pub fn new(alpha: Vec<i64>, u: RootOfUnity) -> Self {
        AugmentedWeight { alpha, u }
    }

    pub fn plain(alpha: Vec<i64>) -> Self {
        AugmentedWeight { alpha, u: RootOfUnity::one() }
    }

    pub fn is_zero_weight(&self) -> bool {
        self.alpha.iter().all(|&a| a == 0)
    }

    /// `(-alpha, u^{-1})`, the orientation flip.
    pub fn flip(&self) -> AugmentedWeight {
        AugmentedWeight { alpha: self.alpha.iter().map(|a| -a).collect(), u: self.u.inv() }
    }
}

/// Inclusive box `lo..=hi` in `Lambda^*`, the query shape for lazy functions.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BoxWindow {
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
}

impl BoxWindow {
    pub fn new(lo: Vec<i64>, hi: Vec<i64>) -> Self {
        assert_eq!(lo.len(), hi.len());
        assert!(lo.iter().zip(&hi).all(|(a, b)| a <= b), "empty box");
        BoxWindow { lo, hi }
    }

    pub fn contains(&self, p: &[i64]) -> bool {
        p.iter().zip(self.lo.iter().zip(&self.hi)).all(|(&x, (&l, &h))| l <= x && x <= h)
    }

    pub fn points(&self) -> Vec<Vec<i64>> {
        let mut out = vec![vec![]];
        for d in 0..self.lo.len() {
            let mut next = Vec::new();
            for p in &out {
                for x in self.lo[d]..=self.hi[d] {
                    let mut q = p.clone();
                    q.push(x);
                    next.push(q);
                }
            }
            out = next;
        }
        out
    }

    /// Minkowski difference shift: the box of `x - s` for `x` in `self`.
    pub fn shift(&self, s: &[i64]) -> BoxWindow {
        BoxWindow {
            lo: self.lo.iter().zip(s).map(|(a, b)| a - b).collect(),
            hi: self.hi.iter().zip(s).map(|(a, b)| a - b).collect(),
        }
    }
}

type Table = BTreeMap<Vec<i64>, Cyclotomic>;

/// A function `Lambda^* -> Q(zeta)`, either finitely supported or given by a
/// window-lazy evaluator with per-box memoization.
#[derive(Clone)]
pub enum LatticeFunction {
    Finite(Table),
    Windowed(WindowedFn),
}

#[derive(Clone)]
pub struct WindowedFn {
    eval: Arc<dyn Fn(&BoxWindow) -> Table + Send + Sync>,
    memo: Arc<Mutex<HashMap<BoxWindow, Arc<Table>>>>,
}

impl LatticeFunction {
    pub fn zero() -> Self {
        LatticeFunction::Finite(BTreeMap::new())
    }

    /// `delta_S` for a finite set `S`.
    pub fn delta_set(points: impl IntoIterator<Item = Vec<i64>>) -> Self {
        let mut t = BTreeMap::new();
        for p in points {
            t.insert(p, Cyclotomic::one());
        }
        LatticeFunction::Finite(t)
    }

    pub fn delta(point: Vec<i64>) -> Self {
        Self::delta_set([point])
    }

    pub fn from_table(mut table: Table) -> Self {
        table.retain(|_, v| !v.is_zero());
        LatticeFunction::Finite(table)
    }

    pub fn windowed(eval: impl Fn(&BoxWindow) -> Table + Send + Sync + 'static) -> Self {
        LatticeFunction::Windowed(WindowedFn {
            eval: Arc::new(eval),
            memo: Arc::new(Mutex::new(HashMap::new())),
        })
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, LatticeFunction::Finite(_))
    }

    pub fn finite_table(&self) -> Option<&Table> {
        match self {
            LatticeFunction::Finite(t) => Some(t),
            LatticeFunction::Windowed(_) => None,
        }
    }

    /// All values on a box, as a table without explicit zeros.
    pub fn eval_box(&self, window: &BoxWindow) -> Table {
        match self {
            LatticeFunction::Finite(t) => t
                .iter()
                .filter(|(p, _)| window.contains(p))
                .map(|(p, v)| (p.clone(), v.clone()))
                .collect(),
            LatticeFunction::Windowed(w) => {
                let mut memo = w.memo.lock().expect("window memo poisoned");
                if let Some(t) = memo.get(window) {
                    return (**t).clone();
                }
                let mut t = (w.eval)(window);
                t.retain(|_, v| !v.is_zero());
                memo.insert(window.clone(), Arc::new(t.clone()));
                t
            }
        }
    }

    pub fn value_at(&self, p: &[i64]) -> Cyclotomic {
        match self {
            LatticeFunction::Finite(t) => t.get(p).cloned().unwrap_or_else(Cyclotomic::zero),
            LatticeFunction::Windowed(_) => {
                let w = BoxWindow::new(p.to_vec(), p.to_vec());
                self.eval_box(&w).remove(p).unwrap_or_else(Cyclotomic::zero)
            }
        }
    }

    /// Pointwise multiplication by the character `e_t`.
    pub fn mul_character(&self, t: &TorusPoint) -> LatticeFunction {
        match self {
            LatticeFunction::Finite(tab) => LatticeFunction::from_table(
                tab.iter().map(|(p, v)| (p.clone(), v.mul(&t.character(p)))).collect(),
            ),
            LatticeFunction::Windowed(w) => {
                let inner = w.clone();
                let t = t.clone();
                LatticeFunction::windowed(move |win| {
                    let base = LatticeFunction::Windowed(inner.clone()).eval_box(win);
                    base.into_iter().map(|(p, v)| {
                        let c = v.mul(&t.character(&p));
                        (p, c)
                    }).collect()
                })
            }
        }
    }

    pub fn scale(&self, c: &Cyclotomic) -> LatticeFunction {
        match self {
            LatticeFunction::Finite(tab) => LatticeFunction::from_table(
                tab.iter().map(|(p, v)| (p.clone(), v.mul(c))).collect(),
            ),
            LatticeFunction::Windowed(w) => {
                let inner = w.clone();
                let c = c.clone();
                LatticeFunction::windowed(move |win| {
                    LatticeFunction::Windowed(inner.clone())
                        .eval_box(win)
                        .into_iter()
                        .map(|(p, v)| (p, v.mul(&c)))
                        .collect()
                })
            }
        }
    }

    pub fn add(&self, other: &LatticeFunction) -> LatticeFunction {
        match (self, other) {
            (LatticeFunction::Finite(a), LatticeFunction::Finite(b)) => {
                let mut out = a.clone();
                for (p, v) in b {
                    let e = out.entry(p.clone()).or_insert_with(Cyclotomic::zero);
                    *e = e.add(v);
                }
                LatticeFunction::from_table(out)
            }
            _ => {
                let f = self.clone();
                let g = other.clone();
                LatticeFunction::windowed(move |win| {
                    let mut out = f.eval_box(win);
                    for (p, v) in g.eval_box(win) {
                        let e = out.entry(p).or_insert_with(Cyclotomic::zero);
                        *e = e.add(&v);
                    }
                    out
                })
            }
        }
    }

    /// Convolution `(f * g)(lambda) = sum_{a+b=lambda} f(a) g(b)`.
    ///
    /// Proper when at least one factor is finitely supported; other shape
    /// combinations must be windowed by the caller.
    pub fn convolve(&self, other: &LatticeFunction) -> Result<LatticeFunction> {
        match (self, other) {
            (LatticeFunction::Finite(a), LatticeFunction::Finite(b)) => {
                let mut out: Table = BTreeMap::new();
                for (p, v) in a {
                    for (q, w) in b {
                        let key: Vec<i64> = p.iter().zip(q).map(|(x, y)| x + y).collect();
                        let e = out.entry(key).or_insert_with(Cyclotomic::zero);
                        *e = e.add(&v.mul(w));
                    }
                }
                Ok(LatticeFunction::from_table(out))
            }
            (LatticeFunction::Finite(a), LatticeFunction::Windowed(_)) => {
                let a = a.clone();
                let g = other.clone();
                Ok(LatticeFunction::windowed(move |win| {
                    let mut out: Table = BTreeMap::new();
                    for (p, v) in &a {
                        // g is needed on win - p
                        let sub = g.eval_box(&win.shift(p));
                        for (q, w) in sub {
                            let key: Vec<i64> = p.iter().zip(&q).map(|(x, y)| x + y).collect();
                            if win.contains(&key) {
                                let e = out.entry(key).or_insert_with(Cyclotomic::zero);
                                *e = e.add(&v.mul(&w));
                            }
                        }
                    }
                    out
                }))
            }
            (LatticeFunction::Windowed(_), LatticeFunction::Finite(_)) => other.convolve(self),
            _ => Err(Error::ImproperConvolution(
                "convolution of two lazily windowed functions needs a finite factor".into(),
            )),
        }
    }

    /// Finite difference `(grad_beta f)(lambda) = f(lambda) - v f(lambda - beta)`.
    pub fn finite_difference(&self, beta: &AugmentedWeight) -> LatticeFunction {
        let v = Cyclotomic::from_root(&beta.u);
        match self {
            LatticeFunction::Finite(t) => {
                let mut out = t.clone();
                for (p, val) in t {
                    let shifted: Vec<i64> = p.iter().zip(&beta.alpha).map(|(x, b)| x + b).collect();
                    let e = out.entry(shifted).or_insert_with(Cyclotomic::zero);
                    *e = e.sub(&v.mul(val));
                }
                LatticeFunction::from_table(out)
            }
            LatticeFunction::Windowed(_) => {
                let f = self.clone();
                let beta = beta.clone();
                let v = v.clone();
                LatticeFunction::windowed(move |win| {
                    let direct = f.eval_box(win);
                    let shifted = f.eval_box(&win.shift(&beta.alpha));
                    let mut out = direct;
                    for (p, val) in shifted {
                        let key: Vec<i64> = p.iter().zip(&beta.alpha).map(|(x, b)| x + b).collect();
                        if win.contains(&key) {
                            let e = out.entry(key).or_insert_with(Cyclotomic::zero);
                            *e = e.sub(&v.mul(&val));
                        }
                    }
                    out
                })
            }
        }
    }

    /// Pullback along the covector map `phi` given as an integer matrix
    /// (rows = images of the source basis): `(phi^* f)(x) = f(x phi)`.
    pub fn pullback(&self, phi: &IMat) -> LatticeFunction {
        let f = self.clone();
        let phi = phi.clone();
        LatticeFunction::windowed(move |win| {
            let mut out: Table = BTreeMap::new();
            for p in win.points() {
                let image = apply_imat(&p, &phi);
                let v = f.value_at(&image);
                if !v.is_zero() {
                    out.insert(p, v);
                }
            }
            out
        })
    }

    /// Pushforward `(phi_* f)(y) = sum_{x phi = y} f(x)`; finite input only
    /// (the proper case we need).
    pub fn pushforward(&self, phi: &IMat, target_dim: usize) -> Result<LatticeFunction> {
        match self {
            LatticeFunction::Finite(t) => {
                let mut out: Table = BTreeMap::new();
                for (p, v) in t {
                    let image = apply_imat(p, phi);
                    debug_assert_eq!(image.len(), target_dim);
                    let e = out.entry(image).or_insert_with(Cyclotomic::zero);
                    *e = e.add(v);
                }
                Ok(LatticeFunction::from_table(out))
            }
            LatticeFunction::Windowed(_) => Err(Error::ImproperPushforward(
                "pushforward of a lazily windowed function; restrict to a finite window first".into(),
            )),
        }
    }
}

pub fn apply_imat(p: &[i64], phi: &IMat) -> Vec<i64> {
    let cols = phi[0].len();
    (0..cols)
        .map(|j| {
            let mut acc = BigInt::zero();
            for (i, &x) in p.iter().enumerate() {
                acc += BigInt::from(x) * &phi[i][j];
            }
            acc.to_i64().expect("lattice point out of i64 range")
        })
        .collect()
}

/// Finite Fourier transform of an `ell Xi^*`-periodic function, returned as a
/// table on `T_ell` with `f(lambda) = sum_t fhat(t) t^lambda`.
///
/// Periodicity is checked on the generators of `ell Xi^*` at every
/// representative of the quotient; failure is reported as an error.
pub fn finite_fourier(
    ctx: &LatticeContext,
    f: &dyn Fn(&[i64]) -> Cyclotomic,
    ell: u64,
) -> Result<BTreeMap<TorusPoint, Cyclotomic>> {
    let reps = ctx.lambda_star_mod_ell_xi_star(ell);
    for rep in &reps {
        for gen in ctx.xi_star_rows() {
            let shifted: Vec<i64> = rep
                .iter()
                .zip(gen)
                .map(|(&x, g)| x + ell as i64 * g.to_i64().expect("generator out of range"))
                .collect();
            if f(rep) != f(&shifted) {
                return Err(Error::NotPeriodic(format!("{ell}*Xi^*")));
            }
        }
    }
    let size = QRat::from_integer(BigInt::from(ctx.t_ell_size(ell) as i64));
    let mut out = BTreeMap::new();
    for t in ctx.enumerate_t_ell(ell) {
        let mut acc = Cyclotomic::zero();
        for rep in &reps {
            let neg: Vec<i64> = rep.iter().map(|&x| -x).collect();
            acc = acc.add(&f(rep).mul(&t.character(&neg)));
        }
        let val = acc.scale(&(QRat::one() / &size));
        if !val.is_zero() {
            out.insert(t, val);
        }
    }
    Ok(out)
}
