//! Combinatorics of the weight list: admissible subspaces and their
//! chambers, genericity certificates for the expansion center, the periodic
//! affine hyperplane arrangement with its vertices and nbc bases, and
//! zonotope lattice-point sets.
//!
//! Everything is exact. Chambers are described by the integer "wall"
//! families cutting them out (a primitive normal vector plus the translation
//! period of the family), which makes membership and validity-region tests
//! rational linear feasibility problems.

use num::{BigInt, Integer, One, Signed, ToPrimitive, Zero};
use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::exactnum::{frac_mod_one, qi, QRat, RootOfUnity};
use crate::feasibility::System;
use crate::lattice::{AugmentedWeight, LatticeContext};
use crate::linalg::{
    self, ceil_sqrt, imat_inverse_unimodular, qmat_from_imat, qmat_inverse, qsolve_left,
    saturation_rows, IMat, QMat, QVec,
};
use crate::reduction::reduce_mod_lattice;

/// One linear span of a sublist of weights, with a canonical saturated basis.
#[derive(Clone, Debug)]
pub struct AdmissibleSpan {
    /// Canonical (HNF) saturated basis rows of `Lambda^* cap D`; empty for `{0}`.
    pub basis: IMat,
    pub dim: usize,
    /// Indices of all weights lying in the span (the parallel sublist).
    pub members: Vec<usize>,
}

/// An admissible affine subspace `Delta = xi + D`.
#[derive(Clone, Debug)]
pub struct AdmissibleSubspace {
    /// Index into the span list.
    pub span: usize,
    /// Canonical translate in `Xi^*` (reduced modulo `Xi^* cap D`).
    pub translate: Vec<i64>,
}

/// All distinct linear spans of sublists of the weights, including `{0}`
/// and the full span, each with its parallel sublist.
pub fn admissible_spans(rank: usize, weights: &[AugmentedWeight]) -> Vec<AdmissibleSpan> {
    let nonzero: Vec<(usize, &AugmentedWeight)> =
        weights.iter().enumerate().filter(|(_, w)| !w.is_zero_weight()).collect();
    let n = nonzero.len();
    let mut seen: BTreeSet<Vec<Vec<BigInt>>> = BTreeSet::new();
    let mut spans = Vec::new();
    for mask in 0..(1u32 << n) {
        let rows: IMat = (0..n)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| linalg::ivec_from(&nonzero[i].1.alpha))
            .collect();
        let basis = if rows.is_empty() {
            Vec::new()
        } else {
            linalg::row_hnf(&saturation_rows(&rows))
        };
        if !seen.insert(basis.clone()) {
            continue;
        }
        let dim = basis.len();
        // membership of each weight in the span (the basis is saturated, so
        // integer lattice membership is exactly rational span membership)
        let members: Vec<usize> = weights
            .iter()
            .enumerate()
            .filter(|(_, w)| {
                !w.is_zero_weight()
                    && dim > 0
                    && linalg::solve_in_row_lattice(&basis, &linalg::ivec_from(&w.alpha)).is_some()
            })
            .map(|(i, _)| i)
            .collect();
        spans.push(AdmissibleSpan { basis, dim, members });
    }
    let _ = rank;
    spans.sort_by_key(|s| (s.dim, format!("{:?}", s.basis)));
    spans
}

/// Basis of `Xi^* cap D` for a span.
pub fn xi_star_in_span(ctx: &LatticeContext, span: &AdmissibleSpan) -> IMat {
    if span.dim == 0 {
        return Vec::new();
    }
    // normals to D (in t): {n : <basis_i, n> = 0 for all i}
    let normals = linalg::left_kernel_int(&transpose(&span.basis));
    if normals.is_empty() {
        // D is everything: Xi^* itself
        return ctx.xi_star_rows().clone();
    }
    // {c in Z^r : (c X) . n = 0 for all normals}
    let x = ctx.xi_star_rows();
    let pairing: IMat = x
        .iter()
        .map(|row| {
            normals
                .iter()
                .map(|nr| {
                    let mut acc = BigInt::zero();
                    for (a, b) in row.iter().zip(nr) {
                        acc += a * b;
                    }
                    acc
                })
                .collect()
        })
        .collect();
    let kern = linalg::left_kernel_int(&pairing);
    kern.iter().map(|c| linalg::ivec_mat(c, x)).collect()
}

fn transpose(a: &IMat) -> IMat {
    if a.is_empty() {
        return Vec::new();
    }
    (0..a[0].len()).map(|j| a.iter().map(|row| row[j].clone()).collect()).collect()
}

/// A family of parallel affine walls `{x : <normal, x> = k * period}`,
/// `k` an integer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WallFamily {
    /// Primitive integer normal (a vector in `t`).
    pub normal: Vec<i64>,
    /// Positive integer translation period `gcd <normal, Xi^*>`.
    pub period: i64,
}

/// The wall families of the codimension-one admissible spans.
pub fn wall_families(ctx: &LatticeContext, spans: &[AdmissibleSpan]) -> Vec<WallFamily> {
    let r = ctx.rank();
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for span in spans.iter().filter(|s| s.dim + 1 == r) {
        // primitive integer normal n with basis . n = 0: the integer kernel
        // of the basis matrix read as columns
        let kern = linalg::left_kernel_int(&transpose(&span.basis));
        assert_eq!(kern.len(), 1);
        let mut n = kern[0].clone();
        // primitive + canonical sign
        let g = n.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        if !g.is_zero() && !g.is_one() {
            for x in n.iter_mut() {
                *x = &*x / &g;
            }
        }
        if let Some(first) = n.iter().find(|x| !x.is_zero()) {
            if first.is_negative() {
                for x in n.iter_mut() {
                    *x = -x.clone();
                }
            }
        }
        let n_i64: Vec<i64> = n.iter().map(|x| x.to_i64().expect("normal out of range")).collect();
        // period: gcd of pairings with the Xi^* basis
        let mut period = BigInt::zero();
        for row in ctx.xi_star_rows() {
            let mut acc = BigInt::zero();
            for (a, &b) in row.iter().zip(&n_i64) {
                acc += a * BigInt::from(b);
            }
            period = period.gcd(&acc);
        }
        let period: i64 = period.to_i64().expect("period out of range");
        assert!(period > 0, "full-rank Xi^* pairs nontrivially with a nonzero normal");
        let fam = WallFamily { normal: n_i64, period };
        if seen.insert(format!("{fam:?}")) {
            out.push(fam);
        }
    }
    out.sort_by_key(|f| (f.normal.clone(), f.period));
    out
}

/// A chamber of the full-rank admissible-subspace arrangement: the open
/// polyhedron cut out by one strip per wall family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chamber {
    pub strips: Vec<(WallFamily, i64)>, // floor index m: m*c < <n,x> < (m+1)*c
}

impl Chamber {
    /// Deterministic key for caching.
    pub fn signature(&self) -> String {
        format!("{:?}", self.strips)
    }
}

/// Locate the chamber of a rational point; errors if the point lies on a wall.
pub fn chamber_of(
    ctx: &LatticeContext,
    spans: &[AdmissibleSpan],
    point: &[QRat],
) -> Result<Chamber> {
    let mut strips = Vec::new();
    for fam in wall_families(ctx, spans) {
        let v: QRat = fam
            .normal
            .iter()
            .zip(point)
            .map(|(&n, x)| QRat::from_integer(BigInt::from(n)) * x)
            .sum();
        let scaled = v / qi(fam.period);
        if scaled.denom().is_one() {
            return Err(Error::NonGenericChamberPoint(format!(
                "point lies on the wall <{:?}, x> = {} * {}",
                fam.normal, scaled, fam.period
            )));
        }
        let m = scaled.floor().to_integer().to_i64().expect("floor out of range");
        strips.push((fam, m));
    }
    Ok(Chamber { strips })
}

/// Exact test for `lambda in ell * chamber - zonotope(weights)`.
pub fn in_validity_region(
    chamber: &Chamber,
    weights: &[AugmentedWeight],
    lambda: &[i64],
    ell: u64,
) -> bool {
    let n = weights.len();
    let mut sys = System::new(n);
    // 0 <= t_k <= 1
    for k in 0..n {
        let mut unit = vec![QRat::zero(); n];
        unit[k] = QRat::one();
        sys.ge(unit.clone(), QRat::zero());
        sys.le(unit, QRat::one());
    }
    // ell * m * c < <normal, lambda + sum t_k alpha_k> < ell * (m+1) * c
    for (fam, m) in &chamber.strips {
        let base: QRat = fam
            .normal
            .iter()
            .zip(lambda)
            .map(|(&a, &b)| qi(a) * qi(b))
            .sum();
        let coeffs: Vec<QRat> = weights
            .iter()
            .map(|w| {
                fam.normal
                    .iter()
                    .zip(&w.alpha)
                    .map(|(&a, &b)| qi(a) * qi(b))
                    .sum()
            })
            .collect();
        let lo = qi(ell as i64) * qi(*m) * qi(fam.period);
        let hi = qi(ell as i64) * qi(m + 1) * qi(fam.period);
        sys.gt(coeffs.iter().map(|c| -c.clone()).collect(), &base - &hi); // base + c.t < hi
        sys.lt(coeffs.iter().map(|c| -c.clone()).collect(), &base - &lo); // base + c.t > lo
    }
    sys.feasible()
}

/// Certified projection data of the expansion center onto one admissible
/// subspace.
pub struct GammaProjection {
    /// The projected point (a covector) on `Delta`.
    pub gamma_delta: QVec,
    /// `tau = gamma_Delta - gamma` as a covector.
    pub tau: QVec,
    /// The same functional as a vector: pairings with weights are plain dots.
    pub tau_vec: QVec,
    /// `sigma = -sum` of the complement weights pairing negatively with tau.
    pub sigma: Vec<i64>,
    /// Indices of weights not parallel to `Delta`.
    pub complement: Vec<usize>,
}

/// B-orthogonal projection of `gamma` onto `Delta`, with the genericity
/// certificates: `gamma_Delta` regular in `Delta` and `<alpha, tau> != 0`
/// for every complement weight.
pub fn project_gamma(
    ctx: &LatticeContext,
    spans: &[AdmissibleSpan],
    weights: &[AugmentedWeight],
    delta: &AdmissibleSubspace,
    gamma: &[QRat],
) -> Result<GammaProjection> {
    let span = &spans[delta.span];
    let r = ctx.rank();
    let xi_q: QVec = delta.translate.iter().map(|&x| qi(x)).collect();
    let gamma_delta = if span.dim == 0 {
        xi_q.clone()
    } else {
        // gamma_Delta = xi + proj_D(gamma - xi) in the dual inner product
        let p_q = qmat_from_imat(&span.basis);
        let diff: QVec = gamma.iter().zip(&xi_q).map(|(g, x)| g - x).collect();
        // Gram system: (P G P^T) c = P G diff^T
        let pg: QMat = p_q.iter().map(|row| ctx_dual_apply(ctx, row)).collect();
        let gram: QMat = pg
            .iter()
            .map(|gi| p_q.iter().map(|pj| linalg::dot_q(gi, pj)).collect())
            .collect();
        let rhs: QVec = pg.iter().map(|gi| linalg::dot_q(gi, &diff)).collect();
        let gram_inv = qmat_inverse(&gram)
            .ok_or_else(|| Error::Internal("span Gram matrix singular".into()))?;
        let c = linalg::qvec_mat(&rhs, &gram_inv);
        let proj = linalg::qvec_mat(&c, &p_q);
        linalg::qvec_add(&xi_q, &proj)
    };
    let tau: QVec = gamma_delta.iter().zip(gamma).map(|(a, b)| a - b).collect();
    let tau_vec = ctx.covector_to_vector(&tau);

    // certificate 1: <alpha, tau> != 0 for complement weights
    let mut complement = Vec::new();
    let mut sigma = vec![0i64; r];
    for (i, w) in weights.iter().enumerate() {
        if w.is_zero_weight() || span.members.contains(&i) {
            continue;
        }
        complement.push(i);
        let p: QRat = w.alpha.iter().zip(&tau_vec).map(|(&a, t)| qi(a) * t).sum();
        if p.is_zero() {
            return Err(Error::NonGenericGamma(format!(
                "<alpha_{i}, tau_Delta> = 0 for Delta with translate {:?}",
                delta.translate
            )));
        }
        if p.is_negative() {
            for (s, &a) in sigma.iter_mut().zip(&w.alpha) {
                *s -= a;
            }
        }
    }

    // certificate 2: gamma_Delta is regular in Delta (not on any admissible
    // subspace of strictly smaller dimension)
    for other in spans.iter().filter(|s| s.dim < span.dim) {
        if point_on_translates(ctx, other, &gamma_delta) {
            return Err(Error::NonGenericGamma(format!(
                "projection onto Delta (translate {:?}) lies on a dim-{} admissible subspace",
                delta.translate, other.dim
            )));
        }
    }
    Ok(GammaProjection { gamma_delta, tau, tau_vec, sigma, complement })
}

fn ctx_dual_apply(ctx: &LatticeContext, covector: &[QRat]) -> QVec {
    ctx.covector_to_vector(covector)
}

/// Does the rational point lie on some `Xi^*`-translate of the span?
pub fn point_on_translates(ctx: &LatticeContext, span: &AdmissibleSpan, point: &[QRat]) -> bool {
    let r = ctx.rank();
    // quotient by D via pairings with integer normals
    let normals = if span.dim == 0 {
        linalg::identity_imat(r)
    } else {
        linalg::left_kernel_int(&transpose(&span.basis))
    };
    if normals.is_empty() {
        return true; // D is the whole space
    }
    let q_point: QVec = normals
        .iter()
        .map(|nr| {
            nr.iter().zip(point).map(|(a, x)| QRat::from_integer(a.clone()) * x).sum()
        })
        .collect();
    if q_point.iter().any(|x| !x.denom().is_one()) {
        return false;
    }
    let q_int: Vec<BigInt> = q_point.iter().map(|x| x.numer().clone()).collect();
    let image: IMat = ctx
        .xi_star_rows()
        .iter()
        .map(|row| {
            normals
                .iter()
                .map(|nr| {
                    let mut acc = BigInt::zero();
                    for (a, b) in nr.iter().zip(row) {
                        acc += a * b;
                    }
                    acc
                })
                .collect()
        })
        .collect();
    linalg::solve_in_row_lattice(&image, &q_int).is_some()
}

/// All admissible subspaces whose term in the decomposition can contain
/// `lambda` in its support cone
/// `sigma_Delta + ell*Delta + R_{>=0} (polarized complement)`,
/// paired with their certified projection data.
pub fn relevant_subspaces(
    ctx: &LatticeContext,
    spans: &[AdmissibleSpan],
    weights: &[AugmentedWeight],
    gamma: &[QRat],
    lambda: &[i64],
    ell: u64,
) -> Result<Vec<(AdmissibleSubspace, GammaProjection)>> {
    let r = ctx.rank();
    let ell_q = qi(ell as i64);
    let lambda_q: QVec = lambda.iter().map(|&x| qi(x)).collect();
    // ||lambda - ell gamma||_G^2 with G the dual inner product
    let diff: QVec = lambda_q
        .iter()
        .zip(gamma)
        .map(|(l, g)| l - &ell_q * g)
        .collect();
    let radius_sq = dual_norm_sq(ctx, &diff) / (&ell_q * &ell_q);

    let mut out = Vec::new();
    for (si, span) in spans.iter().enumerate() {
        let sub_lattice = xi_star_in_span(ctx, span);
        for xi in enumerate_translates(ctx, span, &sub_lattice, gamma, &radius_sq)? {
            let delta = AdmissibleSubspace { span: si, translate: xi };
            let proj = project_gamma(ctx, spans, weights, &delta, gamma)?;
            if support_cone_contains(span, weights, &proj, &delta, lambda, ell) {
                out.push((delta, proj));
            }
        }
    }
    Ok(out)
}

fn dual_norm_sq(ctx: &LatticeContext, covector: &[QRat]) -> QRat {
    let v = ctx.covector_to_vector(covector);
    linalg::dot_q(covector, &v)
}

/// Enumerate canonical translates `xi in Xi^* mod (Xi^* cap D)` with
/// `||proj_perp(xi - gamma)||_G <= sqrt(radius_sq)`.
fn enumerate_translates(
    ctx: &LatticeContext,
    span: &AdmissibleSpan,
    sub_lattice: &IMat,
    gamma: &[QRat],
    radius_sq: &QRat,
) -> Result<Vec<Vec<i64>>> {
    let r = ctx.rank();
    if span.dim == r {
        return Ok(vec![vec![0; r]]);
    }
    // quotient basis: complete Xi^* cap D inside Xi^*
    let x = ctx.xi_star_rows();
    let x_inv = qmat_inverse(&qmat_from_imat(x)).expect("Xi^* basis invertible");
    let quot_basis: IMat = {
        if span.dim == 0 {
            x.clone()
        } else {
            // coordinates of the sublattice in the Xi^* basis
            let c_rows: IMat = sub_lattice
                .iter()
                .map(|row| {
                    let rq = linalg::qvec_from_ivec(row);
                    let c = linalg::qvec_mat(&rq, &x_inv);
                    c.iter()
                        .map(|v| {
                            assert!(v.denom().is_one());
                            v.numer().clone()
                        })
                        .collect()
                })
                .collect();
            let f = linalg::snf(&c_rows);
            // saturated sublattice: elementary divisors are 1; quotient basis
            // rows are the trailing rows of V^{-1} mapped back through X
            let v_inv = imat_inverse_unimodular(&f.v);
            (f.rank..r).map(|i| linalg::ivec_mat(&v_inv[i], x)).collect()
        }
    };
    let q = quot_basis.len();
    debug_assert_eq!(q, r - span.dim);

    // Gram of the perpendicular projections of the quotient basis
    let perp = |cov: &QVec| -> QVec {
        if span.dim == 0 {
            return cov.clone();
        }
        let p_q = qmat_from_imat(&span.basis);
        let pg: QMat = p_q.iter().map(|row| ctx.covector_to_vector(row)).collect();
        let gram: QMat = pg
            .iter()
            .map(|gi| p_q.iter().map(|pj| linalg::dot_q(gi, pj)).collect())
            .collect();
        let rhs: QVec = pg.iter().map(|gi| linalg::dot_q(gi, cov)).collect();
        let gram_inv = qmat_inverse(&gram).expect("span Gram invertible");
        let c = linalg::qvec_mat(&rhs, &gram_inv);
        let proj = linalg::qvec_mat(&c, &p_q);
        linalg::qvec_sub(cov, &proj)
    };
    let quot_perp: Vec<QVec> = quot_basis
        .iter()
        .map(|row| perp(&linalg::qvec_from_ivec(row)))
        .collect();
    let gamma_perp = perp(&gamma.to_vec());
    let gram: QMat = quot_perp
        .iter()
        .map(|a| {
            quot_perp
                .iter()
                .map(|b| {
                    let av = ctx.covector_to_vector(a);
                    linalg::dot_q(&av, b)
                })
                .collect()
        })
        .collect();
    let center = qsolve_left(
        &{
            let m: QMat = quot_perp.clone();
            m
        },
        &gamma_perp,
    );
    // per-coordinate bound: |c_i - center_i| <= sqrt(radius_sq * (gram^{-1})_ii)
    let gram_inv = qmat_inverse(&gram)
        .ok_or_else(|| Error::Internal("quotient Gram singular".into()))?;
    let center = center.unwrap_or_else(|| vec![QRat::zero(); q]);
    let mut ranges: Vec<(i64, i64)> = Vec::with_capacity(q);
    for i in 0..q {
        let spread = radius_sq * &gram_inv[i][i];
        let s = if spread.is_negative() { BigInt::zero() } else { ceil_sqrt(&spread) };
        let s: i64 = s.to_i64().unwrap_or(i64::MAX / 4);
        let lo = (&center[i]).floor().to_integer().to_i64().unwrap_or(0) - s - 1;
        let hi = (&center[i]).ceil().to_integer().to_i64().unwrap_or(0) + s + 1;
        ranges.push((lo, hi));
    }
    // enumerate and filter by the exact norm inequality
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    let mut stack = vec![Vec::<i64>::new()];
    for (lo, hi) in &ranges {
        let mut next = Vec::new();
        for partial in &stack {
            for c in *lo..=*hi {
                let mut p = partial.clone();
                p.push(c);
                next.push(p);
            }
        }
        stack = next;
    }
    for coeffs in stack {
        let mut xi_cov = vec![QRat::zero(); r];
        for (c, row) in coeffs.iter().zip(&quot_basis) {
            for (v, b) in xi_cov.iter_mut().zip(row) {
                *v += qi(*c) * QRat::from_integer(b.clone());
            }
        }
        let tau = perp(&linalg::qvec_sub(&xi_cov, &gamma.to_vec()));
        if &dual_norm_sq(ctx, &tau) > radius_sq {
            continue;
        }
        let xi_int: Vec<i64> = xi_cov
            .iter()
            .map(|v| {
                debug_assert!(v.denom().is_one());
                v.numer().to_i64().expect("translate out of range")
            })
            .collect();
        let canonical = if sub_lattice.is_empty() {
            xi_int
        } else {
            reduce_mod_lattice(sub_lattice, &xi_int)
        };
        if seen.insert(canonical.clone()) {
            out.push(canonical);
        }
    }
    out.sort();
    Ok(out)
}

/// Exact feasibility of
/// `lambda in sigma + ell*(xi + D) + R_{>=0}(polarized complement)`.
fn support_cone_contains(
    span: &AdmissibleSpan,
    weights: &[AugmentedWeight],
    proj: &GammaProjection,
    delta: &AdmissibleSubspace,
    lambda: &[i64],
    ell: u64,
) -> bool {
    let r = lambda.len();
    let d = span.dim;
    let comp = &proj.complement;
    let nvars = d + comp.len();
    let mut sys = System::new(nvars);
    // m_k >= 0 for the cone coefficients
    for k in 0..comp.len() {
        let mut unit = vec![QRat::zero(); nvars];
        unit[d + k] = QRat::one();
        sys.ge(unit, QRat::zero());
    }
    // equality rows: lambda = sigma + ell*xi + t*P + sum m_k alpha_k^pol
    for j in 0..r {
        let mut coeffs = vec![QRat::zero(); nvars];
        for (ti, row) in span.basis.iter().enumerate() {
            coeffs[ti] = QRat::from_integer(row[j].clone());
        }
        for (k, &wi) in comp.iter().enumerate() {
            let w = &weights[wi];
            let pairing: QRat = w
                .alpha
                .iter()
                .zip(&proj.tau_vec)
                .map(|(&a, t)| qi(a) * t)
                .sum();
            let a = if pairing.is_positive() { w.alpha[j] } else { -w.alpha[j] };
            coeffs[d + k] = qi(a);
        }
        let rhs = qi(lambda[j]) - qi(proj.sigma[j]) - qi(ell as i64) * qi(delta.translate[j]);
        sys.eq(coeffs, rhs);
    }
    sys.feasible()
}

/// One affine hyperplane `{X : <conormal, X> = offset}` of the periodic
/// arrangement, conormal primitive and sign-canonical.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Hyperplane {
    pub conormal: Vec<i64>,
    pub offset: QRat,
}

/// A vertex of the arrangement with the (deduplicated, ordered) list of
/// hyperplanes through it.
#[derive(Clone, Debug)]
pub struct ArrangementVertex {
    /// Representative in `[0,1)^r`.
    pub point: QVec,
    pub hyperplanes: Vec<Hyperplane>,
}

/// One representative per `Lambda`-orbit of arrangement vertices. Requires a
/// primitivized full-span weight list.
pub fn arrangement_vertices(
    ctx: &LatticeContext,
    weights: &[AugmentedWeight],
) -> Result<Vec<ArrangementVertex>> {
    let r = ctx.rank();
    // canonical families (conormal primitive sign-canonical, offset mod 1)
    let mut families: Vec<(Vec<i64>, QRat)> = Vec::new();
    let mut seen = BTreeSet::new();
    for w in weights {
        if w.is_zero_weight() {
            continue;
        }
        let mut alpha = w.alpha.clone();
        let mut s = w.u.exponent().clone();
        let first = alpha.iter().find(|&&a| a != 0).copied().unwrap();
        if first < 0 {
            alpha.iter_mut().for_each(|a| *a = -*a);
            s = -s;
        }
        let s = frac_mod_one(&s);
        let key = format!("{alpha:?}|{s}");
        if seen.insert(key) {
            families.push((alpha, s));
        }
    }
    // span check
    {
        let rows: IMat = families.iter().map(|(a, _)| linalg::ivec_from(a)).collect();
        if rows.is_empty() || linalg::snf(&rows).rank < r {
            return Err(Error::NotFullRank);
        }
    }
    // intersect r-subsets of families
    let nf = families.len();
    let mut verts: Vec<QVec> = Vec::new();
    let mut seen_pts = BTreeSet::new();
    let idxs: Vec<usize> = (0..nf).collect();
    for combo in combinations(&idxs, r) {
        let a_rows: IMat = combo.iter().map(|&i| linalg::ivec_from(&families[i].0)).collect();
        let a_q = qmat_from_imat(&a_rows);
        let Some(a_inv) = qmat_inverse(&a_q) else { continue };
        // k-space reps: Z^r / column lattice of A = Z^r / rowlattice(A^T)
        let reps = linalg::quotient_reps(&transpose(&a_rows));
        for k in reps {
            // X solves <alpha_i, X> = s_i + k_i: X = (s+k) * (A^{-1})^T
            let b: QVec = combo
                .iter()
                .zip(&k)
                .map(|(&i, kk)| &families[i].1 + QRat::from_integer(kk.clone()))
                .collect();
            // row-vector solve: X_j = sum_i b_i (A^{-1})_{j i}... use transpose
            let x: QVec = (0..r)
                .map(|j| {
                    let mut acc = QRat::zero();
                    for (i, bi) in b.iter().enumerate() {
                        acc += bi * &a_inv[j][i];
                    }
                    acc
                })
                .collect();
            let reduced: QVec = x.iter().map(frac_mod_one).collect();
            let key = format!("{reduced:?}");
            if seen_pts.insert(key) {
                verts.push(reduced);
            }
        }
    }
    // attach hyperplanes through each vertex
    let mut out = Vec::new();
    for p in verts {
        let mut hps = Vec::new();
        for (alpha, s) in &families {
            let v: QRat = alpha.iter().zip(&p).map(|(&a, x)| qi(a) * x).sum();
            if (&v - s).denom().is_one() {
                hps.push(Hyperplane { conormal: alpha.clone(), offset: v });
            }
        }
        hps.sort();
        hps.dedup();
        out.push(ArrangementVertex { point: p, hyperplanes: hps });
    }
    out.sort_by(|a, b| a.point.cmp(&b.point));
    Ok(out)
}

fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    fn rec(items: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            cur.push(items[i]);
            rec(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= items.len() {
        rec(items, k, 0, &mut Vec::new(), &mut out);
    }
    out
}

/// All no-broken-circuit tuples of the vertex's hyperplane list under its
/// stored (lexicographic) ordering: the `r`-subsets `H` of independent
/// hyperplanes such that for every hyperplane `h` of the vertex,
/// `{h' in H : h < h'} + h` is linearly independent.
pub fn nbc_bases(vertex: &ArrangementVertex, rank: usize) -> Vec<Vec<usize>> {
    let n = vertex.hyperplanes.len();
    let idxs: Vec<usize> = (0..n).collect();
    let indep = |set: &[usize]| -> bool {
        let rows: IMat =
            set.iter().map(|&i| linalg::ivec_from(&vertex.hyperplanes[i].conormal)).collect();
        linalg::snf(&rows).rank == rows.len()
    };
    let mut out = Vec::new();
    'tuples: for tuple in combinations(&idxs, rank) {
        if !indep(&tuple) {
            continue;
        }
        for h in 0..n {
            let mut test: Vec<usize> = tuple.iter().copied().filter(|&x| x > h).collect();
            test.push(h);
            if !indep(&test) {
                continue 'tuples;
            }
        }
        out.push(tuple);
    }
    out
}

/// Lattice points `mu in Xi^*` with `nu - mu` interior to the parallelepiped
/// spanned by the basis `beta0`, plus the zonotope volume
/// `|det(beta0)|` in the `Xi^*` normalization. The two must agree; a
/// boundary hit reports a non-generic chamber point.
pub fn zonotope_lattice_points(
    ctx: &LatticeContext,
    nu: &[QRat],
    beta0: &IMat,
) -> Result<(Vec<Vec<i64>>, u64)> {
    let r = ctx.rank();
    assert_eq!(beta0.len(), r);
    // volume: |det| of beta0 in a basis of Xi^*
    let xs_inv = qmat_inverse(&qmat_from_imat(ctx.xi_star_rows())).expect("Xi^* invertible");
    let coords = linalg::qmat_mul(&qmat_from_imat(beta0), &xs_inv);
    let det = det_q(&coords);
    if det.is_zero() {
        return Err(Error::NotFullRank);
    }
    assert!(det.denom().is_one(), "beta0 entries must lie in Xi^*");
    let vol: u64 = det.numer().abs().to_u64().expect("volume out of range");

    let b_inv = qmat_inverse(&qmat_from_imat(beta0))
        .ok_or(Error::NotFullRank)?;
    // bounding box of { nu - sum t_k beta0_k : t in [0,1]^r }
    let mut lo: Vec<QRat> = nu.to_vec();
    let mut hi: Vec<QRat> = nu.to_vec();
    for row in beta0 {
        for j in 0..r {
            let v = QRat::from_integer(row[j].clone());
            if v.is_positive() {
                lo[j] -= v;
            } else {
                hi[j] -= v;
            }
        }
    }
    let lo_i: Vec<i64> = lo.iter().map(|x| x.floor().to_integer().to_i64().unwrap()).collect();
    let hi_i: Vec<i64> = hi.iter().map(|x| x.ceil().to_integer().to_i64().unwrap()).collect();
    let mut points = Vec::new();
    let mut stack: Vec<Vec<i64>> = vec![vec![]];
    for j in 0..r {
        let mut next = Vec::new();
        for p in &stack {
            for v in lo_i[j]..=hi_i[j] {
                let mut q = p.clone();
                q.push(v);
                next.push(q);
            }
        }
        stack = next;
    }
    for mu in stack {
        if !ctx.in_xi_star(&mu) {
            continue;
        }
        // coordinates of nu - mu in the beta0 basis: solve t * beta0 = nu - mu
        let diff: QVec = nu.iter().zip(&mu).map(|(a, &b)| a - qi(b)).collect();
        let t = linalg::qvec_mat(&diff, &b_inv);
        let mut in_closed = true;
        let mut on_boundary = false;
        for v in &t {
            if v.is_zero() || *v == QRat::one() {
                on_boundary = true;
            }
            if v.is_negative() || *v > QRat::one() {
                in_closed = false;
            }
        }
        if in_closed && on_boundary {
            return Err(Error::NonGenericChamberPoint(format!(
                "zonotope boundary hit at mu = {mu:?}"
            )));
        }
        if in_closed {
            points.push(mu);
        }
    }
    points.sort();
    if points.len() as u64 != vol {
        return Err(Error::Internal(format!(
            "zonotope count {} does not match volume {}",
            points.len(),
            vol
        )));
    }
    Ok((points, vol))
}

fn det_q(a: &QMat) -> QRat {
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

/// JSON report of the arrangement: vertices, hyperplanes, nbc tuples.
pub fn arrangement_report_json(vertices: &[ArrangementVertex], rank: usize) -> serde_json::Value {
    let items: Vec<serde_json::Value> = vertices
        .iter()
        .map(|v| {
            let hps: Vec<serde_json::Value> = v
                .hyperplanes
                .iter()
                .map(|h| {
                    serde_json::json!({
                        "alpha": h.conormal,
                        "offset": crate::exactnum::format_rational(&h.offset),
                    })
                })
                .collect();
            serde_json::json!({
                "vertex": v.point.iter().map(crate::exactnum::format_rational).collect::<Vec<_>>(),
                "hyperplanes": hps,
                "nbc": nbc_bases(v, rank),
            })
        })
        .collect();
    serde_json::Value::Array(items)
}

/// Helpers shared with the tests and the Szenes module.
pub mod helpers {
    use super::*;

    /// The `SU(3)` negative roots in covector coordinates.
    pub fn su3_negative_roots() -> Vec<AugmentedWeight> {
        vec![
            AugmentedWeight::plain(vec![-2, 1]),
            AugmentedWeight::plain(vec![1, -2]),
            AugmentedWeight::plain(vec![-1, -1]),
        ]
    }

    /// Rescale a primitive conormal into `Xi^*` (the smallest positive
    /// multiple landing there), with the matching offset scale.
    pub fn scale_into_xi_star(ctx: &LatticeContext, alpha: &[i64]) -> (Vec<i64>, i64) {
        for m in 1..=ctx.index() as i64 {
            let scaled: Vec<i64> = alpha.iter().map(|&a| a * m).collect();
            if ctx.in_xi_star(&scaled) {
                return (scaled, m);
            }
        }
        panic!("no multiple of the conormal lies in Xi^* within the index bound");
    }
}

// linalg helper used above but defined here to keep linalg generic-free
impl AdmissibleSpan {
    /// Rational membership of a covector in the span.
    pub fn contains_q(&self, x: &[QRat]) -> bool {
        if self.dim == 0 {
            return x.iter().all(Zero::is_zero);
        }
        let p_q = qmat_from_imat(&self.basis);
        match qsolve_left(&p_q, x) {
            None => false,
            Some(c) => linalg::qvec_mat(&c, &p_q) == x.to_vec(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::qr;

    fn su3_ctx() -> LatticeContext {
        let xi = vec![vec![qr(2, 3), qr(1, 3)], vec![qr(1, 3), qr(2, 3)]];
        let inner = vec![linalg::ivec_from(&[2, -1]), linalg::ivec_from(&[-1, 2])];
        LatticeContext::new(xi, inner).unwrap()
    }

    #[test]
    fn spans_for_simple_lists() {
        // {1,1,1} in rank 1: spans {0} and R
        let w: Vec<AugmentedWeight> = (0..3).map(|_| AugmentedWeight::plain(vec![1])).collect();
        let spans = admissible_spans(1, &w);
        assert_eq!(spans.len(), 2);
        assert_eq!(spans.iter().filter(|s| s.dim == 0).count(), 1);
        assert_eq!(spans.iter().filter(|s| s.dim == 1).count(), 1);

        // SU(3) negative roots: {0}, three lines, and the plane
        let spans = admissible_spans(2, &helpers::su3_negative_roots());
        assert_eq!(spans.iter().filter(|s| s.dim == 0).count(), 1);
        assert_eq!(spans.iter().filter(|s| s.dim == 1).count(), 3);
        assert_eq!(spans.iter().filter(|s| s.dim == 2).count(), 1);

        // single weight in rank 2: {0} and one line
        let w = vec![AugmentedWeight::plain(vec![1, 0])];
        let spans = admissible_spans(2, &w);
        assert_eq!(spans.len(), 2);
    }

    #[test]
    fn chamber_location_and_walls() {
        let ctx = su3_ctx();
        let spans = admissible_spans(2, &helpers::su3_negative_roots());
        // point (0,1) is interior to the triangle chamber spanned by
        // 0, alpha_2, alpha_3
        let c = chamber_of(&ctx, &spans, &[qr(0, 1), qr(1, 1)]).unwrap();
        assert_eq!(c.strips.len(), 3);
        // a wall point errors
        assert!(chamber_of(&ctx, &spans, &[qr(1, 3), qr(1, 3)]).is_err());
        // deterministic signature
        let c2 = chamber_of(&ctx, &spans, &[qr(1, 10), qr(9, 10)]).unwrap();
        assert_eq!(c.signature(), c2.signature());
    }

    #[test]
    fn gamma_projection_su3_line() {
        // gamma in the fundamental alcove piece below the alpha_3 line:
        // tau for Delta = R alpha_1 is a positive multiple of -varpi_2
        let ctx = su3_ctx();
        let weights = helpers::su3_negative_roots();
        let spans = admissible_spans(2, &weights);
        let line = spans
            .iter()
            .position(|s| s.dim == 1 && s.contains_q(&[qr(2, 1), qr(-1, 1)]))
            .unwrap();
        let delta = AdmissibleSubspace { span: line, translate: vec![0, 0] };
        // gamma = point (3/10, 1/2) in t; covector form B*gamma = (1/10, 7/10)
        let gamma = vec![qr(1, 10), qr(7, 10)];
        let proj = project_gamma(&ctx, &spans, &weights, &delta, &gamma).unwrap();
        assert_eq!(proj.tau[0], qr(0, 1));
        assert_eq!(proj.tau[1], qr(-3, 4));
        // gamma_Delta = alpha_1 / 20
        assert_eq!(proj.gamma_delta, vec![qr(2, 20), qr(-1, 20)]);
        // full space: projection is the identity
        let full = spans.iter().position(|s| s.dim == 2).unwrap();
        let proj2 = project_gamma(
            &ctx,
            &spans,
            &weights,
            &AdmissibleSubspace { span: full, translate: vec![0, 0] },
            &gamma,
        )
        .unwrap();
        assert!(proj2.tau.iter().all(Zero::is_zero));
        assert!(proj2.sigma.iter().all(|&s| s == 0));
    }

    #[test]
    fn rank1_point_projection() {
        let ctx = LatticeContext::standard(1);
        let weights = vec![AugmentedWeight::plain(vec![1])];
        let spans = admissible_spans(1, &weights);
        let pt = spans.iter().position(|s| s.dim == 0).unwrap();
        let gamma = vec![qr(3, 7)];
        for mu in -2i64..=2 {
            let delta = AdmissibleSubspace { span: pt, translate: vec![mu] };
            let proj = project_gamma(&ctx, &spans, &weights, &delta, &gamma).unwrap();
            assert_eq!(proj.tau[0], qr(7 * mu - 3, 7));
            // weight +1 is polarized iff mu > 0, i.e. sigma = 0 iff mu >= 1
            if mu >= 1 {
                assert_eq!(proj.sigma, vec![0]);
            } else {
                assert_eq!(proj.sigma, vec![-1]);
            }
        }
    }

    #[test]
    fn relevant_subspaces_rank1() {
        let ctx = LatticeContext::standard(1);
        let weights = vec![AugmentedWeight::plain(vec![1]), AugmentedWeight::plain(vec![1])];
        let spans = admissible_spans(1, &weights);
        let gamma = vec![qr(3, 7)];
        // lambda = 0, ell = 3: only the full line's cone contains lambda
        let rel = relevant_subspaces(&ctx, &spans, &weights, &gamma, &[0], 3).unwrap();
        let dims: Vec<usize> = rel.iter().map(|(d, _)| spans[d.span].dim).collect();
        assert!(dims.contains(&1));
        for (delta, _) in &rel {
            if spans[delta.span].dim == 0 {
                // any contributing point term must evaluate to zero here:
                // mu = 0 would need P(ell*mu - lambda - n) = P(-2) = 0
                assert!(delta.translate[0] <= 0);
            }
        }
        // lambda far in the tail: the point terms to the left contribute
        let rel = relevant_subspaces(&ctx, &spans, &weights, &gamma, &[9], 2).unwrap();
        let mus: Vec<i64> = rel
            .iter()
            .filter(|(d, _)| spans[d.span].dim == 0)
            .map(|(d, _)| d.translate[0])
            .collect();
        assert!(mus.contains(&1), "mu=1 tail term reaches lambda=9 at ell=2: {mus:?}");
    }

    #[test]
    fn vertices_and_nbc_rank1() {
        let ctx = LatticeContext::standard(1);
        // all-ones list: single vertex class at 0
        let w: Vec<AugmentedWeight> = (0..3).map(|_| AugmentedWeight::plain(vec![1])).collect();
        let vs = arrangement_vertices(&ctx, &w).unwrap();
        assert_eq!(vs.len(), 1);
        assert_eq!(vs[0].point[0], qr(0, 1));
        assert_eq!(nbc_bases(&vs[0], 1), vec![vec![0]]);
        // primitivized {2}: classes at 0 and 1/2
        let w = vec![
            AugmentedWeight::plain(vec![1]),
            AugmentedWeight::new(vec![1], RootOfUnity::root(1, 2)),
        ];
        let vs = arrangement_vertices(&ctx, &w).unwrap();
        let pts: Vec<QRat> = vs.iter().map(|v| v.point[0].clone()).collect();
        assert_eq!(pts, vec![qr(0, 1), qr(1, 2)]);
    }

    #[test]
    fn vertices_su3() {
        let ctx = su3_ctx();
        let vs = arrangement_vertices(&ctx, &helpers::su3_negative_roots()).unwrap();
        // three classes: 0 and the two fundamental-weight points
        assert_eq!(vs.len(), 3);
        for v in &vs {
            assert_eq!(v.hyperplanes.len(), 3);
            let nbc = nbc_bases(&v, 2);
            assert_eq!(nbc.len(), 2);
            // with H1 < H2 < H3 the tuples are (H1,H2) and (H1,H3)
            assert_eq!(nbc, vec![vec![0, 1], vec![0, 2]]);
        }
    }

    #[test]
    fn nbc_two_lines() {
        // two concurrent lines: the single tuple (H1, H2)
        let v = ArrangementVertex {
            point: vec![qr(0, 1), qr(0, 1)],
            hyperplanes: vec![
                Hyperplane { conormal: vec![1, 0], offset: qr(0, 1) },
                Hyperplane { conormal: vec![0, 1], offset: qr(0, 1) },
            ],
        };
        assert_eq!(nbc_bases(&v, 2), vec![vec![0, 1]]);
    }

    #[test]
    fn zonotope_points_su3() {
        let ctx = su3_ctx();
        let nu = vec![qr(0, 1), qr(1, 1)]; // interior point of the chamber
        // beta0 = (alpha_1, alpha_2): the single point {0}
        let b1: IMat = vec![linalg::ivec_from(&[2, -1]), linalg::ivec_from(&[-1, 2])];
        let (pts, vol) = zonotope_lattice_points(&ctx, &nu, &b1).unwrap();
        assert_eq!(vol, 1);
        assert_eq!(pts, vec![vec![0, 0]]);
        // beta0 = (alpha_1, alpha_3): the single point {-alpha_1}
        let b2: IMat = vec![linalg::ivec_from(&[2, -1]), linalg::ivec_from(&[1, 1])];
        let (pts, vol) = zonotope_lattice_points(&ctx, &nu, &b2).unwrap();
        assert_eq!(vol, 1);
        assert_eq!(pts, vec![vec![-2, 1]]);
    }

    #[test]
    fn zonotope_rank1() {
        let ctx = LatticeContext::standard(1);
        let (pts, vol) =
            zonotope_lattice_points(&ctx, &[qr(1, 2)], &vec![linalg::ivec_from(&[1])]).unwrap();
        assert_eq!(vol, 1);
        assert_eq!(pts, vec![vec![0]]);
        // integral nu sits on the boundary
        assert!(zonotope_lattice_points(&ctx, &[qr(1, 1)], &vec![linalg::ivec_from(&[1])]).is_err());
    }
}
