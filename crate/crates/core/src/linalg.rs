//! Exact integer and rational linear algebra.
//!
//! Conventions used across the crate: vectors are rows, lattices are
//! Z-row-spans of basis matrices, and matrices act on the right, so the
//! pairing of a covector `a` with a vector `x` is the plain dot product
//! of coordinate rows.
//!
//! The sizes here are tiny (rank <= 4 in practice), so the algorithms are
//! the straightforward ones: Smith normal form by alternating row/column
//! reduction, Hermite form with a recorded transform, dense Gaussian
//! elimination over `Q`.

use num::{BigInt, Integer, One, Signed, Zero};

use crate::exactnum::QRat;

pub type IVec = Vec<BigInt>;
pub type IMat = Vec<Vec<BigInt>>;
pub type QVec = Vec<QRat>;
pub type QMat = Vec<Vec<QRat>>;

pub fn ivec_from(v: &[i64]) -> IVec {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

pub fn qvec_from_ivec(v: &[BigInt]) -> QVec {
    v.iter().map(|x| QRat::from_integer(x.clone())).collect()
}

pub fn qvec_from(v: &[i64]) -> QVec {
    v.iter().map(|&x| QRat::from_integer(BigInt::from(x))).collect()
}

pub fn identity_imat(n: usize) -> IMat {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

pub fn imat_mul(a: &IMat, b: &IMat) -> IMat {
    let n = a.len();
    let m = b[0].len();
    let k = b.len();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| (0..k).map(|t| &a[i][t] * &b[t][j]).sum())
                .collect()
        })
        .collect()
}

pub fn ivec_mat(v: &[BigInt], a: &IMat) -> IVec {
    let m = a[0].len();
    (0..m).map(|j| a.iter().zip(v).map(|(row, vi)| vi * &row[j]).sum()).collect()
}

pub fn dot_q(a: &[QRat], b: &[QRat]) -> QRat {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn qmat_from_imat(a: &IMat) -> QMat {
    a.iter().map(|r| qvec_from_ivec(r)).collect()
}

pub fn qmat_mul(a: &QMat, b: &QMat) -> QMat {
    let n = a.len();
    let m = b[0].len();
    let k = b.len();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| (0..k).map(|t| &a[i][t] * &b[t][j]).sum())
                .collect()
        })
        .collect()
}

pub fn qvec_mat(v: &[QRat], a: &QMat) -> QVec {
    let m = a[0].len();
    (0..m).map(|j| a.iter().zip(v).map(|(row, vi)| vi * &row[j]).sum()).collect()
}

pub fn qvec_add(a: &[QRat], b: &[QRat]) -> QVec {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn qvec_sub(a: &[QRat], b: &[QRat]) -> QVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn qvec_scale(a: &[QRat], c: &QRat) -> QVec {
    a.iter().map(|x| x * c).collect()
}

/// Result of the Smith normal form `S = U * A * V` with `U`, `V` unimodular
/// and `S` diagonal with `s_1 | s_2 | ...` (nonnegative).
pub struct Snf {
    pub u: IMat,
    pub s: IMat,
    pub v: IMat,
    pub rank: usize,
}

impl Snf {
    pub fn diag(&self) -> Vec<BigInt> {
        (0..self.rank).map(|i| self.s[i][i].clone()).collect()
    }
}

/// Smith normal form by alternating row and column reduction.
pub fn snf(a: &IMat) -> Snf {
    let n = a.len();
    let m = if n == 0 { 0 } else { a[0].len() };
    let mut s = a.clone();
    let mut u = identity_imat(n);
    let mut v = identity_imat(m);

    let mut t = 0usize;
    while t < n.min(m) {
        // find a pivot with minimal nonzero absolute value in s[t.., t..]
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..n {
            for j in t..m {
                if !s[i][j].is_zero() {
                    let better = match &pivot {
                        None => true,
                        Some((pi, pj)) => s[i][j].abs() < s[*pi][*pj].abs(),
                    };
                    if better {
                        pivot = Some((i, j));
                    }
                }
            }
        }
        let (pi, pj) = match pivot {
            None => break,
            Some(p) => p,
        };
        s.swap(t, pi);
        u.swap(t, pi);
        for row in s.iter_mut() {
            row.swap(t, pj);
        }
        for row in v.iter_mut() {
            row.swap(t, pj);
        }

        // clear column t and row t
        let mut clean = true;
        for i in t + 1..n {
            if !s[i][t].is_zero() {
                let q = div_round(&s[i][t], &s[t][t]);
                if !q.is_zero() {
                    for j in 0..m {
                        let d = &q * &s[t][j];
                        s[i][j] -= d;
                    }
                    for j in 0..n {
                        let d = &q * &u[t][j];
                        u[i][j] -= d;
                    }
                }
                if !s[i][t].is_zero() {
                    clean = false;
                }
            }
        }
        for j in t + 1..m {
            if !s[t][j].is_zero() {
                let q = div_round(&s[t][j], &s[t][t]);
                if !q.is_zero() {
                    for i in 0..n {
                        let d = &q * &s[i][t];
                        s[i][j] -= d;
                    }
                    for i in 0..m {
                        let d = &q * &v[i][t];
                        v[i][j] -= d;
                    }
                }
                if !s[t][j].is_zero() {
                    clean = false;
                }
            }
        }
        if !clean {
            continue; // smaller pivot now exists; repeat this step
        }
        t += 1;
    }

    // enforce divisibility s_i | s_{i+1}
    let rank = (0..n.min(m)).take_while(|&i| !s[i][i].is_zero()).count();
    let mut i = 0;
    while i + 1 < rank {
        if (&s[i + 1][i + 1] % &s[i][i]).is_zero() {
            i += 1;
            continue;
        }
        // standard trick: add column i+1 to column i, then re-reduce
        for r in 0..n {
            let d = s[r][i + 1].clone();
            s[r][i] += d;
        }
        for r in 0..m {
            let d = v[r][i + 1].clone();
            v[r][i] += d;
        }
        let redo = snf_plain(&s);
        s = redo.0;
        u = imat_mul(&redo.1, &u);
        v = imat_mul(&v, &redo.2);
        i = 0;
    }
    for i in 0..rank {
        if s[i][i].is_negative() {
            for j in 0..m {
                s[i][j] = -s[i][j].clone();
            }
            for j in 0..n {
                u[i][j] = -u[i][j].clone();
            }
        }
    }
    Snf { u, s, v, rank }
}

/// One pass of SNF without the divisibility fix-up (helper for `snf`).
fn snf_plain(a: &IMat) -> (IMat, IMat, IMat) {
    let n = a.len();
    let m = if n == 0 { 0 } else { a[0].len() };
    let mut s = a.clone();
    let mut u = identity_imat(n);
    let mut v = identity_imat(m);
    let mut t = 0usize;
    while t < n.min(m) {
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..n {
            for j in t..m {
                if !s[i][j].is_zero() {
                    let better = match &pivot {
                        None => true,
                        Some((pi, pj)) => s[i][j].abs() < s[*pi][*pj].abs(),
                    };
                    if better {
                        pivot = Some((i, j));
                    }
                }
            }
        }
        let (pi, pj) = match pivot {
            None => break,
            Some(p) => p,
        };
        s.swap(t, pi);
        u.swap(t, pi);
        for row in s.iter_mut() {
            row.swap(t, pj);
        }
        for row in v.iter_mut() {
            row.swap(t, pj);
        }
        let mut clean = true;
        for i in t + 1..n {
            if !s[i][t].is_zero() {
                let q = div_round(&s[i][t], &s[t][t]);
                for j in 0..m {
                    let d = &q * &s[t][j];
                    s[i][j] -= d;
                }
                for j in 0..n {
                    let d = &q * &u[t][j];
                    u[i][j] -= d;
                }
                if !s[i][t].is_zero() {
                    clean = false;
                }
            }
        }
        for j in t + 1..m {
            if !s[t][j].is_zero() {
                let q = div_round(&s[t][j], &s[t][t]);
                for i in 0..n {
                    let d = &q * &s[i][t];
                    s[i][j] -= d;
                }
                for i in 0..m {
                    let d = &q * &v[i][t];
                    v[i][j] -= d;
                }
                if !s[t][j].is_zero() {
                    clean = false;
                }
            }
        }
        if clean {
            t += 1;
        }
    }
    (s, u, v)
}

/// Rounded division, used to shrink remainders during elimination.
fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_rem(b);
    if (&r * BigInt::from(2)).abs() > b.abs() {
        if (r.is_negative()) == (b.is_negative()) {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

/// Exact inverse of a rational matrix; `None` if singular.
pub fn qmat_inverse(a: &QMat) -> Option<QMat> {
    let n = a.len();
    let mut work: Vec<Vec<QRat>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            for j in 0..n {
                r.push(if i == j { QRat::one() } else { QRat::zero() });
            }
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&i| !work[i][col].is_zero())?;
        work.swap(col, pivot);
        let p = work[col][col].clone();
        for x in work[col].iter_mut() {
            *x = &*x / &p;
        }
        for i in 0..n {
            if i != col && !work[i][col].is_zero() {
                let f = work[i][col].clone();
                for j in 0..2 * n {
                    let d = &f * &work[col][j];
                    work[i][j] -= d;
                }
            }
        }
    }
    Some(work.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Inverse of a unimodular integer matrix (asserts integrality).
pub fn imat_inverse_unimodular(a: &IMat) -> IMat {
    let q = qmat_inverse(&qmat_from_imat(a)).expect("unimodular matrix must be invertible");
    q.iter()
        .map(|row| {
            row.iter()
                .map(|x| {
                    assert!(x.denom().is_one(), "matrix inverse is not integral");
                    x.numer().clone()
                })
                .collect()
        })
        .collect()
}

/// Solve `x * A = b` over `Q` (row-vector convention). Returns any solution.
pub fn qsolve_left(a: &QMat, b: &[QRat]) -> Option<QVec> {
    // transpose to the standard Ax = b shape
    let n = a.len(); // unknowns
    let m = a[0].len(); // equations
    let mut aug: Vec<Vec<QRat>> = (0..m)
        .map(|j| {
            let mut row: Vec<QRat> = (0..n).map(|i| a[i][j].clone()).collect();
            row.push(b[j].clone());
            row
        })
        .collect();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut r = 0usize;
    for c in 0..n {
        if let Some(p) = (r..m).find(|&i| !aug[i][c].is_zero()) {
            aug.swap(r, p);
            let pv = aug[r][c].clone();
            for x in aug[r].iter_mut() {
                *x = &*x / &pv;
            }
            for i in 0..m {
                if i != r && !aug[i][c].is_zero() {
                    let f = aug[i][c].clone();
                    for j in 0..=n {
                        let d = &f * &aug[r][j];
                        aug[i][j] -= d;
                    }
                }
            }
            pivots.push((r, c));
            r += 1;
            if r == m {
                break;
            }
        }
    }
    for i in r..m {
        if !aug[i][n].is_zero() {
            return None; // inconsistent
        }
    }
    let mut x = vec![QRat::zero(); n];
    for (row, col) in pivots {
        x[col] = aug[row][n].clone();
    }
    Some(x)
}

/// Hermite-style reduction with transform: returns `(H, T)` with `H = T * A`,
/// `T` unimodular, and `H` in row echelon form (zero rows last).
pub fn hnf_with_transform(a: &IMat) -> (IMat, IMat) {
    let n = a.len();
    let m = if n == 0 { 0 } else { a[0].len() };
    let mut h = a.clone();
    let mut t = identity_imat(n);
    let mut row = 0usize;
    for col in 0..m {
        // find nonzero entries in this column at or below `row`, reduce by gcd
        loop {
            let mut idx: Option<usize> = None;
            for i in row..n {
                if !h[i][col].is_zero() {
                    let better = match idx {
                        None => true,
                        Some(k) => h[i][col].abs() < h[k][col].abs(),
                    };
                    if better {
                        idx = Some(i);
                    }
                }
            }
            let Some(p) = idx else { break };
            h.swap(row, p);
            t.swap(row, p);
            let mut any = false;
            for i in row + 1..n {
                if !h[i][col].is_zero() {
                    let q = div_round(&h[i][col], &h[row][col]);
                    for j in 0..m {
                        let d = &q * &h[row][j];
                        h[i][j] -= d;
                    }
                    for j in 0..n {
                        let d = &q * &t[row][j];
                        t[i][j] -= d;
                    }
                    if !h[i][col].is_zero() {
                        any = true;
                    }
                }
            }
            if !any {
                break;
            }
        }
        if row < n && !h[row][col].is_zero() {
            if h[row][col].is_negative() {
                for j in 0..m {
                    h[row][j] = -h[row][j].clone();
                }
                for j in 0..n {
                    t[row][j] = -t[row][j].clone();
                }
            }
            // reduce the rows above
            for i in 0..row {
                if !h[i][col].is_zero() {
                    let q = h[i][col].div_floor(&h[row][col]);
                    if !q.is_zero() {
                        for j in 0..m {
                            let d = &q * &h[row][j];
                            h[i][j] -= d;
                        }
                        for j in 0..n {
                            let d = &q * &t[row][j];
                            t[i][j] -= d;
                        }
                    }
                }
            }
            row += 1;
        }
    }
    (h, t)
}

/// Canonical Hermite normal form of the row lattice (zero rows dropped).
pub fn row_hnf(a: &IMat) -> IMat {
    let (h, _) = hnf_with_transform(a);
    h.into_iter().filter(|r| r.iter().any(|x| !x.is_zero())).collect()
}

/// Solve `x = sum c_i row_i(A)` over `Z`. Returns the coefficients on the
/// original rows of `A` if `x` lies in the row lattice.
pub fn solve_in_row_lattice(a: &IMat, x: &[BigInt]) -> Option<IVec> {
    let (h, t) = hnf_with_transform(a);
    let m = x.len();
    let mut rem: IVec = x.to_vec();
    let mut coeff_h = vec![BigInt::zero(); a.len()];
    for (i, hrow) in h.iter().enumerate() {
        if hrow.iter().all(Zero::is_zero) {
            continue;
        }
        let lead = hrow.iter().position(|v| !v.is_zero()).unwrap();
        if !rem[lead].is_zero() {
            let (q, r) = rem[lead].div_rem(&hrow[lead]);
            if !r.is_zero() {
                return None;
            }
            for j in 0..m {
                let d = &q * &hrow[j];
                rem[j] -= d;
            }
            coeff_h[i] = q;
        }
    }
    if rem.iter().any(|v| !v.is_zero()) {
        return None;
    }
    // coefficients on original rows: x = coeff_h * H = coeff_h * T * A
    Some(ivec_mat(&coeff_h, &t))
}

/// Basis (rows) of the saturation `rowspan_Q(A) âˆ© Z^m`.
pub fn saturation_rows(a: &IMat) -> IMat {
    let f = snf(a);
    if f.rank == 0 {
        return Vec::new();
    }
    let v_inv = imat_inverse_unimodular(&f.v);
    (0..f.rank).map(|i| v_inv[i].clone()).collect()
}

/// Basis (rows) of the integer kernel `{x in Z^n : x * A = 0}`.
pub fn left_kernel_int(a: &IMat) -> IMat {
    // S = U A V => x A = 0 iff (x U^{-1}) S = 0 iff x is an integer
    // combination of the trailing rows of U.
    let f = snf(a);
    let n = a.len();
    (f.rank..n).map(|i| f.u[i].clone()).collect()
}

/// Representatives of `Z^r / rowlattice(M)` for a full-rank integer `M`.
pub fn quotient_reps(m: &IMat) -> Vec<IVec> {
    let r = m.len();
    let f = snf(m);
    assert_eq!(f.rank, r, "quotient_reps requires a full-rank matrix");
    let v_inv = imat_inverse_unimodular(&f.v);
    let diag = f.diag();
    let mut reps: Vec<IVec> = vec![vec![BigInt::zero(); r]];
    for (i, s) in diag.iter().enumerate() {
        let s: u64 = s.try_into().expect("elementary divisor too large");
        let mut next = Vec::with_capacity(reps.len() * s as usize);
        for rep in &reps {
            for c in 0..s {
                let mut x = rep.clone();
                for j in 0..r {
                    x[j] += BigInt::from(c) * &v_inv[i][j];
                }
                next.push(x);
            }
        }
        reps = next;
    }
    reps
}

/// Basis rows of the lattice `{c in Z^d : c * R in Z^k}` for a rational `R`.
pub fn integral_preimage_lattice(r_mat: &QMat) -> IMat {
    let d = r_mat.len();
    if d == 0 {
        return Vec::new();
    }
    // clear denominators: R = N / m
    let mut m = BigInt::one();
    for row in r_mat {
        for x in row {
            m = m.lcm(x.denom());
        }
    }
    let n_mat: IMat = r_mat
        .iter()
        .map(|row| row.iter().map(|x| (x * QRat::from_integer(m.clone())).to_integer()).collect())
        .collect();
    // c N = 0 mod m  <=>  (c U^{-1}) S = 0 mod m for S = U N V
    let f = snf(&n_mat);
    let mut rows: IMat = Vec::with_capacity(d);
    for i in 0..d {
        let scale = if i < f.rank {
            let g = f.s[i][i].gcd(&m);
            &m / g
        } else {
            BigInt::one()
        };
        rows.push(f.u[i].iter().map(|x| x * &scale).collect());
    }
    rows
}

/// Integer ceiling of the square root of a nonnegative rational.
pub fn ceil_sqrt(x: &QRat) -> BigInt {
    assert!(!x.is_negative());
    if x.is_zero() {
        return BigInt::zero();
    }
    let c = x.ceil().to_integer();
    let mut lo = BigInt::zero();
    let mut hi = &c + BigInt::one();
    // smallest k with k^2 >= x; binary search on integers
    while &lo < &hi {
        let mid: BigInt = (&lo + &hi) / 2;
        if QRat::from_integer(&mid * &mid) >= *x {
            hi = mid;
        } else {
            lo = mid + BigInt::one();
        }
    }
    lo
}

#[cfg(test)]
mod tests {
    use super::*;

    fn imat(rows: &[&[i64]]) -> IMat {
        rows.iter().map(|r| ivec_from(r)).collect()
    }

    #[test]
    fn snf_shapes_and_transforms() {
        let a = imat(&[&[2, 4, 4], &[-6, 6, 12], &[10, 4, 16]]);
        let f = snf(&a);
        let lhs = imat_mul(&imat_mul(&f.u, &a), &f.v);
        assert_eq!(lhs, f.s);
        for i in 0..f.rank.saturating_sub(1) {
            assert!((&f.s[i + 1][i + 1] % &f.s[i][i]).is_zero());
        }
        // product of elementary divisors = |det|
        let prod: BigInt = f.diag().iter().product();
        assert_eq!(prod, BigInt::from(624));
    }

    #[test]
    fn quotient_reps_count_matches_determinant() {
        let m = imat(&[&[2, 1], &[0, 3]]);
        let reps = quotient_reps(&m);
        assert_eq!(reps.len(), 6);
        // all reps distinct mod the lattice
        for (i, a) in reps.iter().enumerate() {
            for b in reps.iter().skip(i + 1) {
                let diff: IVec = a.iter().zip(b).map(|(x, y)| x - y).collect();
                assert!(solve_in_row_lattice(&m, &diff).is_none());
            }
        }
    }

    #[test]
    fn saturation_is_saturated() {
        // row (2, 4) spans the line y = 2x; saturation is generated by (1, 2)
        let sat = saturation_rows(&imat(&[&[2, 4]]));
        assert_eq!(sat.len(), 1);
        assert_eq!(sat[0].iter().map(|x| x.abs()).collect::<Vec<_>>(), ivec_from(&[1, 2]));
    }

    #[test]
    fn kernel_and_membership() {
        let a = imat(&[&[1, 2], &[2, 4]]);
        let k = left_kernel_int(&a);
        assert_eq!(k.len(), 1);
        let prod = ivec_mat(&k[0], &a);
        assert!(prod.iter().all(Zero::is_zero));

        let rows = imat(&[&[2, 0], &[0, 3]]);
        assert!(solve_in_row_lattice(&rows, &ivec_from(&[4, 3])).is_some());
        assert!(solve_in_row_lattice(&rows, &ivec_from(&[1, 0])).is_none());
        let c = solve_in_row_lattice(&rows, &ivec_from(&[6, -9])).unwrap();
        assert_eq!(c, ivec_from(&[3, -3]));
    }

    #[test]
    fn rational_solve_and_inverse() {
        use crate::exactnum::rational::qi;
        let a: QMat = vec![qvec_from(&[2, 1]), qvec_from(&[1, 1])];
        let inv = qmat_inverse(&a).unwrap();
        let prod = qmat_mul(&a, &inv);
        assert_eq!(prod[0][0], qi(1));
        assert_eq!(prod[0][1], qi(0));
        let x = qsolve_left(&a, &qvec_from(&[5, 3])).unwrap();
        // x * a = (5,3): x = (2,1)
        assert_eq!(x, qvec_from(&[2, 1]));
    }

    #[test]
    fn ceil_sqrt_bounds() {
        use crate::exactnum::rational::qr;
        assert_eq!(ceil_sqrt(&qr(0, 1)), BigInt::from(0));
        assert_eq!(ceil_sqrt(&qr(1, 1)), BigInt::from(1));
        assert_eq!(ceil_sqrt(&qr(2, 1)), BigInt::from(2));
        assert_eq!(ceil_sqrt(&qr(49, 4)), BigInt::from(4)); // sqrt(12.25) = 3.5 -> 4
    }
}
