//! Passing to sublattices and quotients.
//!
//! Two reductions recur throughout: restricting a problem to the span of a
//! sublist of weights (the quotient torus of the orthogonal subtorus), and
//! restricting to the kernel hyperplane of one weight (for difference
//! equations). Both produce a lower-rank [`LatticeContext`] together with the
//! coordinate maps needed to transport weights, covectors, and points.

use num::{BigInt, One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exactnum::QRat;
use crate::lattice::LatticeContext;
use crate::linalg::{
    self, hnf_with_transform, integral_preimage_lattice, left_kernel_int, qmat_from_imat,
    qmat_inverse, qsolve_left, saturation_rows, IMat, QMat, QVec,
};

/// Reduction onto the rational span `D` of a list of covectors:
/// `Lambda'^* = Lambda^* cap D` with basis `P`, and `Xi'^*` the sublattice of
/// coordinates landing in `Xi^*`.
pub struct SpanReduction {
    /// Dimension `d` of the span.
    pub dim: usize,
    /// `P`: `d x r` saturated basis of `Lambda^* cap D`.
    pub basis: IMat,
    /// Basis of `Xi'^* <= Z^d` in `P`-coordinates.
    pub xi_star_sub: IMat,
    /// `[Xi' : Lambda'] = |det xi_star_sub|`.
    pub sub_index: u64,
    /// The reduced lattice pair (rank `d`).
    pub sub_ctx: LatticeContext,
}

impl SpanReduction {
    /// Build the reduction for the span of the given covectors.
    pub fn new(ctx: &LatticeContext, span_of: &[Vec<i64>]) -> Self {
        let r = ctx.rank();
        let rows: IMat = span_of.iter().map(|a| linalg::ivec_from(a)).collect();
        let basis = if rows.is_empty() { Vec::new() } else { saturation_rows(&rows) };
        let dim = basis.len();
        if dim == 0 {
            return SpanReduction {
                dim: 0,
                basis: Vec::new(),
                xi_star_sub: Vec::new(),
                sub_index: 1,
                sub_ctx: LatticeContext::new(vec![], vec![]).expect("rank-0 context"),
            };
        }
        // Xi'^* = {c in Z^d : c P in Xi^*}; membership via pairing with the
        // Xi generators: (c P) xi_rows^T integral.
        let p_q = qmat_from_imat(&basis);
        let xi_t: QMat = {
            let xr = ctx.xi_rows();
            (0..r).map(|i| (0..r).map(|j| xr[j][i].clone()).collect()).collect()
        };
        let r_mat = linalg::qmat_mul(&p_q, &xi_t);
        let k = integral_preimage_lattice(&r_mat);
        let det = qmat_inverse(&qmat_from_imat(&k))
            .map(|_| {
                // |det K| via the diagonal of its Smith form
                let f = linalg::snf(&k);
                f.diag().iter().product::<BigInt>()
            })
            .unwrap_or_else(BigInt::zero);
        let sub_index: u64 = det.to_u64().expect("sublattice index out of range");
        assert!(sub_index >= 1);
        // sub-context: xi_inv' = K^T so that Xi'^* has basis rows K.
        let kt: IMat = (0..dim).map(|i| (0..dim).map(|j| k[j][i].clone()).collect()).collect();
        let xi_rows_sub =
            qmat_inverse(&qmat_from_imat(&kt)).expect("Xi'^* basis must be invertible");
        let sub_ctx = LatticeContext::new(xi_rows_sub, linalg::identity_imat(dim))
            .expect("reduced context is valid");
        SpanReduction { dim, basis, xi_star_sub: k, sub_index, sub_ctx }
    }

    /// Integer coordinates of a covector lying in `Lambda^* cap D`.
    pub fn covector_coords(&self, alpha: &[i64]) -> Option<Vec<i64>> {
        let x = linalg::ivec_from(alpha);
        linalg::solve_in_row_lattice(&self.basis, &x)
            .map(|c| c.iter().map(|v| v.to_i64().expect("coordinate out of range")).collect())
    }

    /// Rational coordinates of a covector lying in the span `D`.
    pub fn coords_q(&self, x: &[QRat]) -> Option<QVec> {
        if self.dim == 0 {
            return if x.iter().all(Zero::is_zero) { Some(vec![]) } else { None };
        }
        let p_q = qmat_from_imat(&self.basis);
        let c = qsolve_left(&p_q, x)?;
        // verify the residual (qsolve_left only guarantees consistency)
        let back = linalg::qvec_mat(&c, &p_q);
        if back == x.to_vec() {
            Some(c)
        } else {
            None
        }
    }

    /// `#(T_ell cap T_perp)`, the multiplier of the staged summation:
    /// `ell^{r-d} [Xi:Lambda] / [Xi':Lambda']`.
    pub fn multiplier(&self, ctx: &LatticeContext, ell: u64) -> u64 {
        let codim = (ctx.rank() - self.dim) as u32;
        ell.pow(codim) * ctx.index() / self.sub_index
    }

    /// Decompose `lambda = lambda' + ell*xi` with `lambda' in Lambda^* cap D`
    /// and `xi in Xi^*`; returns the `P`-coordinates of `lambda'`.
    pub fn split_mod_ell_xi_star(
        &self,
        ctx: &LatticeContext,
        lambda: &[i64],
        ell: u64,
    ) -> Option<Vec<i64>> {
        let r = ctx.rank();
        let mut stacked: IMat = Vec::new();
        for row in &self.basis {
            stacked.push(row.clone());
        }
        for row in ctx.xi_star_rows() {
            stacked.push(row.iter().map(|x| x * BigInt::from(ell)).collect());
        }
        if stacked.is_empty() {
            return if lambda.iter().all(|&v| v == 0) { Some(vec![]) } else { None };
        }
        let x = linalg::ivec_from(lambda);
        let coeffs = linalg::solve_in_row_lattice(&stacked, &x)?;
        let _ = r;
        Some(
            coeffs[..self.dim]
                .iter()
                .map(|v| v.to_i64().expect("coordinate out of range"))
                .collect(),
        )
    }
}

/// Reduction to the kernel hyperplane of a single weight `beta`:
/// the sublattices `Lambda_beta = Lambda cap ker(beta)`,
/// `Xi_beta = Xi cap ker(beta)`, and the restriction map on covectors.
pub struct HyperplaneReduction {
    /// Basis rows of `Lambda cap ker(beta)` (vectors in `t`).
    pub kernel_basis: IMat,
    /// The reduced pair (rank `r-1`).
    pub sub_ctx: LatticeContext,
}

impl HyperplaneReduction {
    pub fn new(ctx: &LatticeContext, beta: &[i64]) -> Result<Self> {
        let r = ctx.rank();
        if beta.iter().all(|&b| b == 0) {
            return Err(Error::UnsupportedCase("hyperplane reduction of the zero weight".into()));
        }
        // Lambda cap ker(beta): integer kernel of the column beta
        let beta_col: IMat = beta.iter().map(|&b| vec![BigInt::from(b)]).collect();
        let kernel_basis = left_kernel_int(&beta_col);
        assert_eq!(kernel_basis.len(), r - 1);

        // Xi cap ker(beta): c * Gx * beta^T = 0 over integer c
        let gx = ctx.xi_rows();
        let mut col: Vec<QRat> = Vec::with_capacity(r);
        for row in gx {
            let mut acc = QRat::zero();
            for (x, &b) in row.iter().zip(beta) {
                acc += x * QRat::from_integer(BigInt::from(b));
            }
            col.push(acc);
        }
        let mut denom = BigInt::one();
        for x in &col {
            denom = num::Integer::lcm(&denom, x.denom());
        }
        let int_col: IMat = col
            .iter()
            .map(|x| vec![(x * QRat::from_integer(denom.clone())).to_integer()])
            .collect();
        let cc = left_kernel_int(&int_col);
        assert_eq!(cc.len(), r - 1);
        // generators of Xi_beta in t-coordinates, then in kernel_basis coords
        let gb = linalg::qmat_mul(&qmat_from_imat(&cc), gx);
        let kb_q = qmat_from_imat(&kernel_basis);
        let mut xi_rows_sub: QMat = Vec::with_capacity(r - 1);
        for row in &gb {
            let y = qsolve_left(&kb_q, row)
                .ok_or_else(|| Error::Internal("Xi_beta does not lie in ker(beta)".into()))?;
            xi_rows_sub.push(y);
        }
        let sub_ctx = LatticeContext::new(xi_rows_sub, linalg::identity_imat(r - 1))?;
        Ok(HyperplaneReduction { kernel_basis, sub_ctx })
    }

    /// Restriction of a covector: pairings with the kernel basis vectors.
    pub fn project_weight(&self, alpha: &[i64]) -> Vec<i64> {
        self.kernel_basis
            .iter()
            .map(|row| {
                let mut acc = BigInt::zero();
                for (x, &a) in row.iter().zip(alpha) {
                    acc += x * BigInt::from(a);
                }
                acc.to_i64().expect("projected weight out of range")
            })
            .collect()
    }

    /// Restriction of a rational covector.
    pub fn project_covector_q(&self, x: &[QRat]) -> QVec {
        self.kernel_basis
            .iter()
            .map(|row| {
                let mut acc = QRat::zero();
                for (v, xi) in row.iter().zip(x) {
                    acc += QRat::from_integer(v.clone()) * xi;
                }
                acc
            })
            .collect()
    }

    /// Coordinates of a vector `tau in ker(beta)` in the kernel basis.
    pub fn vector_coords(&self, tau: &[QRat]) -> Option<QVec> {
        let kb_q = qmat_from_imat(&self.kernel_basis);
        let c = qsolve_left(&kb_q, tau)?;
        let back = linalg::qvec_mat(&c, &kb_q);
        if back == tau.to_vec() {
            Some(c)
        } else {
            None
        }
    }
}

/// Canonical representative of `xi` modulo the row lattice of `basis`
/// (Hermite reduction; deterministic).
pub fn reduce_mod_lattice(basis: &IMat, xi: &[i64]) -> Vec<i64> {
    if basis.is_empty() {
        return xi.to_vec();
    }
    let (h, _t) = hnf_with_transform(basis);
    let mut x = linalg::ivec_from(xi);
    for hrow in h.iter() {
        if hrow.iter().all(Zero::is_zero) {
            continue;
        }
        let lead = hrow.iter().position(|v| !v.is_zero()).unwrap();
        if !x[lead].is_zero() {
            let q = num::Integer::div_floor(&x[lead], &hrow[lead]);
            if !q.is_zero() {
                for (xi_, hv) in x.iter_mut().zip(hrow) {
                    *xi_ -= &q * hv;
                }
            }
        }
    }
    x.iter().map(|v| v.to_i64().expect("reduced vector out of range")).collect()
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
    fn span_reduction_su3_root_line() {
        let ctx = su3_ctx();
        // span of alpha_1 = (2,-1): saturated basis is +-(2,-1) itself
        let red = SpanReduction::new(&ctx, &[vec![2, -1]]);
        assert_eq!(red.dim, 1);
        assert_eq!(red.sub_index, 1);
        // multiplier = 3 ell
        assert_eq!(red.multiplier(&ctx, 1), 3);
        assert_eq!(red.multiplier(&ctx, 4), 12);
        // alpha_1 has coordinate +-1
        let c = red.covector_coords(&[2, -1]).unwrap();
        assert_eq!(c[0].abs(), 1);
        assert!(red.covector_coords(&[1, 1]).is_none());
    }

    #[test]
    fn span_reduction_zero_dim() {
        let ctx = LatticeContext::standard(2);
        let red = SpanReduction::new(&ctx, &[]);
        assert_eq!(red.dim, 0);
        assert_eq!(red.multiplier(&ctx, 3), 9);
        assert_eq!(red.split_mod_ell_xi_star(&ctx, &[6, -3], 3), Some(vec![]));
        assert_eq!(red.split_mod_ell_xi_star(&ctx, &[6, -2], 3), None);
    }

    #[test]
    fn hyperplane_reduction_standard() {
        let ctx = LatticeContext::standard(2);
        let red = HyperplaneReduction::new(&ctx, &[1, 0]).unwrap();
        // kernel of (1,0) is the second axis
        assert_eq!(red.project_weight(&[3, 5]).len(), 1);
        assert_eq!(red.sub_ctx.rank(), 1);
        assert_eq!(red.sub_ctx.index(), 1);
        // projecting a weight = pairing with the kernel generator
        let p = red.project_weight(&[3, 5]);
        assert_eq!(p[0].abs(), 5);
    }

    #[test]
    fn hyperplane_reduction_su3() {
        let ctx = su3_ctx();
        // beta = alpha_1 = (2,-1): Lambda cap ker is Z(1,2) while
        // Xi cap ker is Z(1/3,2/3), so the kernel pair has index 3
        let red = HyperplaneReduction::new(&ctx, &[2, -1]).unwrap();
        assert_eq!(red.sub_ctx.rank(), 1);
        assert_eq!(red.sub_ctx.index(), 3);
    }

    #[test]
    fn mod_lattice_reduction_is_canonical() {
        let basis: IMat = vec![linalg::ivec_from(&[2, 0]), linalg::ivec_from(&[0, 2])];
        assert_eq!(reduce_mod_lattice(&basis, &[5, -3]), vec![1, 1]);
        assert_eq!(reduce_mod_lattice(&basis, &[-1, 7]), vec![1, 1]);
        assert_eq!(reduce_mod_lattice(&basis, &[4, 4]), vec![0, 0]);
    }
}
