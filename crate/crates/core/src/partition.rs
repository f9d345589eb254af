//! Generalized partition functions.
//!
//! `P_(alpha,tau)(lambda) = sum u_1^{j_1} ... u_n^{j_n}` over nonnegative
//! integer solutions of `j_1 alpha_1 + ... + j_n alpha_n = lambda`, after the
//! list has been polarized by `tau` (weights pairing negatively with `tau`
//! are flipped, with sign / scalar / shift bookkeeping). With all `u = 1`
//! this is a vector partition function; for the positive roots of a simple
//! Lie algebra it is the Kostant partition function.
//!
//! Values are computed by exact dynamic programming: weights are folded one
//! at a time, with the geometric-series index bounded through the strictly
//! positive pairing with `tau`.

use num::{BigInt, Signed, Zero};
use std::collections::HashMap;
use std::sync::Mutex;

use crate::error::{Error, Result};
use crate::exactnum::{Cyclotomic, QRat, RootOfUnity};
use crate::lattice::{AugmentedWeight, BoxWindow, LatticeFunction};

/// The outcome of polarizing a list by `tau`.
pub struct PolarizedData {
    /// All weights now pair strictly positively with `tau`.
    pub polarized: Vec<AugmentedWeight>,
    /// `(-1)^{#flipped}`.
    pub sign: i64,
    /// `prod u^{-1}` over the flipped weights.
    pub scalar: RootOfUnity,
    /// `sigma = -sum alpha` over the flipped weights.
    pub shift: Vec<i64>,
}

fn pair(alpha: &[i64], tau: &[QRat]) -> QRat {
    let mut acc = QRat::zero();
    for (&a, t) in alpha.iter().zip(tau) {
        acc += QRat::from_integer(BigInt::from(a)) * t;
    }
    acc
}

/// Split the list by the sign of `<alpha, tau>` and flip the negative part.
/// `P_(list,tau)(lambda) = sign * scalar * P_(polarized,tau)(lambda - shift)`.
pub fn polarize(weights: &[AugmentedWeight], tau: &[QRat]) -> Result<PolarizedData> {
    let rank = tau.len();
    let mut polarized = Vec::with_capacity(weights.len());
    let mut sign = 1i64;
    let mut scalar = RootOfUnity::one();
    let mut shift = vec![0i64; rank];
    for (index, w) in weights.iter().enumerate() {
        let p = pair(&w.alpha, tau);
        if p.is_zero() {
            return Err(Error::NotPolarizing { index });
        }
        if p.is_positive() {
            polarized.push(w.clone());
        } else {
            sign = -sign;
            scalar = scalar.mul(&w.u.inv());
            for (s, &a) in shift.iter_mut().zip(&w.alpha) {
                *s -= a;
            }
            polarized.push(w.flip());
        }
    }
    Ok(PolarizedData { polarized, sign, scalar, shift })
}

/// A memoized evaluator for one polarized list. Values are exact; the memo is
/// per-instance, so separate evaluations share nothing.
pub struct PartitionFn {
    data: PolarizedData,
    tau: Vec<QRat>,
    /// `u^j` embeddings are cheap; the recursion on (prefix length, point)
    /// is what the memo caches.
    memo: Mutex<HashMap<(usize, Vec<i64>), Cyclotomic>>,
}

impl PartitionFn {
    pub fn new(weights: &[AugmentedWeight], tau: &[QRat]) -> Result<Self> {
        let mut data = polarize(weights, tau)?;
        // fold in descending pairing order: tightest pruning first
        data.polarized.sort_by(|a, b| {
            pair(&b.alpha, tau).cmp(&pair(&a.alpha, tau))
        });
        Ok(PartitionFn { data, tau: tau.to_vec(), memo: Mutex::new(HashMap::new()) })
    }

    pub fn polarized_data(&self) -> &PolarizedData {
        &self.data
    }

    /// `P` of the *polarized* list at `lambda`.
    fn eval_polarized(&self, k: usize, lambda: &[i64]) -> Cyclotomic {
        if k == 0 {
            return if lambda.iter().all(|&x| x == 0) {
                Cyclotomic::one()
            } else {
                Cyclotomic::zero()
            };
        }
        let height = pair(lambda, &self.tau);
        if height.is_negative() {
            return Cyclotomic::zero();
        }
        let key = (k, lambda.to_vec());
        if let Some(v) = self.memo.lock().unwrap().get(&key) {
            return v.clone();
        }
        let w = &self.data.polarized[k - 1];
        let step = pair(&w.alpha, &self.tau);
        let jmax = (height / step).floor().to_integer();
        let jmax: i64 = jmax.try_into().expect("geometric index out of range");
        let mut acc = Cyclotomic::zero();
        let mut u_pow = RootOfUnity::one();
        let mut point = lambda.to_vec();
        for j in 0..=jmax {
            if j > 0 {
                for (p, &a) in point.iter_mut().zip(&w.alpha) {
                    *p -= a;
                }
                u_pow = u_pow.mul(&w.u);
            }
            let inner = self.eval_polarized(k - 1, &point);
            if !inner.is_zero() {
                acc = acc.add(&inner.mul(&Cyclotomic::from_root(&u_pow)));
            }
        }
        self.memo.lock().unwrap().insert(key, acc.clone());
        acc
    }

    /// The generalized partition function of the original list at `lambda`.
    pub fn eval(&self, lambda: &[i64]) -> Cyclotomic {
        let shifted: Vec<i64> = lambda.iter().zip(&self.data.shift).map(|(x, s)| x - s).collect();
        let v = self.eval_polarized(self.data.polarized.len(), &shifted);
        if v.is_zero() {
            return v;
        }
        let mut out = v.mul(&Cyclotomic::from_root(&self.data.scalar));
        if self.data.sign < 0 {
            out = out.neg();
        }
        out
    }
}

/// One-shot evaluation.
pub fn partition_eval(weights: &[AugmentedWeight], tau: &[QRat], lambda: &[i64]) -> Result<Cyclotomic> {
    Ok(PartitionFn::new(weights, tau)?.eval(lambda))
}

/// The partition function as a window-lazy lattice function.
pub fn partition_window(weights: &[AugmentedWeight], tau: &[QRat]) -> Result<LatticeFunction> {
    let f = PartitionFn::new(weights, tau)?;
    Ok(LatticeFunction::windowed(move |win: &BoxWindow| {
        win.points()
            .into_iter()
            .map(|p| {
                let v = f.eval(&p);
                (p, v)
            })
            .filter(|(_, v)| !v.is_zero())
            .collect()
    }))
}

/// The `A_2` positive roots in covector coordinates, and a polarizing vector
/// in the interior of the dual positive chamber. `partition_eval` on this
/// data is the `SU(3)` Kostant partition function.
pub fn kostant_a2() -> (Vec<AugmentedWeight>, Vec<QRat>) {
    let roots = vec![
        AugmentedWeight::plain(vec![2, -1]),
        AugmentedWeight::plain(vec![-1, 2]),
        AugmentedWeight::plain(vec![1, 1]),
    ];
    let tau = vec![QRat::from_integer(BigInt::from(1)), QRat::from_integer(BigInt::from(1))];
    (roots, tau)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{qi, qr};

    fn ones(n: usize) -> Vec<AugmentedWeight> {
        (0..n).map(|_| AugmentedWeight::plain(vec![1])).collect()
    }

    #[test]
    fn one_dimensional_counts() {
        let tau = vec![qi(1)];
        // P_2(lambda) = lambda + 1
        assert_eq!(partition_eval(&ones(2), &tau, &[5]).unwrap(), Cyclotomic::from_i64(6));
        // P_3(2) = 6
        assert_eq!(partition_eval(&ones(3), &tau, &[2]).unwrap(), Cyclotomic::from_i64(6));
        // empty support below zero
        assert_eq!(partition_eval(&ones(3), &tau, &[-1]).unwrap(), Cyclotomic::zero());
        // P_1 = 1 on all of Z_{>=0}
        assert_eq!(partition_eval(&ones(1), &tau, &[9]).unwrap(), Cyclotomic::one());
    }

    #[test]
    fn polarize_bookkeeping() {
        // already polarized: trivial data
        let tau = vec![qi(1)];
        let d = polarize(&ones(2), &tau).unwrap();
        assert_eq!(d.sign, 1);
        assert!(d.scalar.is_one());
        assert_eq!(d.shift, vec![0]);

        // single weight +1 with tau = -1: flipped, sign -1, shift -1
        let d = polarize(&ones(1), &[qi(-1)]).unwrap();
        assert_eq!(d.sign, -1);
        assert_eq!(d.shift, vec![-1]);
        assert_eq!(d.polarized[0].alpha, vec![-1]);

        // zero pairing is rejected
        let w = vec![AugmentedWeight::plain(vec![1, 0])];
        assert!(matches!(
            polarize(&w, &[qi(0), qi(1)]),
            Err(Error::NotPolarizing { index: 0 })
        ));
    }

    #[test]
    fn flip_identity() {
        // P_(list,tau)(lambda) = -v^{-1} P_(flipped,tau)(lambda + beta)
        let beta = AugmentedWeight::new(vec![1], RootOfUnity::root(1, 3));
        let other = AugmentedWeight::plain(vec![1]);
        let list = vec![beta.clone(), other.clone()];
        let flipped = vec![beta.flip(), other];
        let tau = vec![qi(1)];
        let v_inv = Cyclotomic::from_root(&beta.u.inv());
        for lam in -4i64..=6 {
            let lhs = partition_eval(&list, &tau, &[lam]).unwrap();
            let rhs = partition_eval(&flipped, &tau, &[lam + 1]).unwrap();
            assert_eq!(lhs, rhs.mul(&v_inv).neg(), "at lambda={lam}");
        }
    }

    #[test]
    fn kostant_values() {
        let (roots, tau) = kostant_a2();
        // at alpha_1 + alpha_2 = (1,1): the two decompositions give 2
        assert_eq!(partition_eval(&roots, &tau, &[1, 1]).unwrap(), Cyclotomic::from_i64(2));
        // at a*alpha_1 + b*alpha_2 the count is min(a,b)+1
        for a in 0i64..=4 {
            for b in 0i64..=4 {
                let mu = vec![2 * a - b, 2 * b - a];
                let expect = a.min(b) + 1;
                assert_eq!(
                    partition_eval(&roots, &tau, &mu).unwrap(),
                    Cyclotomic::from_i64(expect),
                    "at a={a}, b={b}"
                );
            }
        }
        // off the root lattice cone: zero
        assert_eq!(partition_eval(&roots, &tau, &[1, 0]).unwrap(), Cyclotomic::zero());
    }

    #[test]
    fn window_and_support() {
        let tau = vec![qi(1)];
        // empty list: delta_0 on any window
        let w = partition_window(&[], &tau).unwrap();
        let t = w.eval_box(&BoxWindow::new(vec![-3], vec![3]));
        assert_eq!(t.len(), 1);
        assert_eq!(t.get(&vec![0i64]).unwrap(), &Cyclotomic::one());
        // window strictly outside the support cone: zero function
        let p = partition_window(&ones(2), &tau).unwrap();
        assert!(p.eval_box(&BoxWindow::new(vec![-9], vec![-1])).is_empty());
        // convolution of split lists equals the full list
        let left = partition_window(&ones(1), &tau).unwrap();
        let full = PartitionFn::new(&ones(3), &tau).unwrap();
        let two = partition_window(&ones(2), &tau).unwrap();
        let conv = match &two {
            LatticeFunction::Windowed(_) => {
                // restrict one factor to a finite window large enough for the test range
                let finite = LatticeFunction::from_table(two.eval_box(&BoxWindow::new(vec![0], vec![20])));
                finite.convolve(&left).unwrap()
            }
            _ => unreachable!(),
        };
        for lam in 0i64..=12 {
            assert_eq!(conv.value_at(&[lam]), full.eval(&[lam]), "at lambda={lam}");
        }
    }

    #[test]
    fn deletion_and_character_shift() {
        let tau = vec![qi(1), qr(1, 3)];
        let weights = vec![
            AugmentedWeight::plain(vec![1, 0]),
            AugmentedWeight::new(vec![0, 1], RootOfUnity::root(1, 2)),
            AugmentedWeight::plain(vec![1, 1]),
        ];
        // grad_beta P_list = P_(list minus beta)
        let beta = weights[2].clone();
        let f = partition_window(&weights, &tau).unwrap();
        let reduced = PartitionFn::new(&weights[..2], &tau).unwrap();
        let diff = f.finite_difference(&beta);
        for p in BoxWindow::new(vec![-2, -2], vec![5, 5]).points() {
            assert_eq!(diff.value_at(&p), reduced.eval(&p), "at {p:?}");
        }
        // multiplying by e_h shifts the scalars u -> u h^alpha
        let h = crate::lattice::TorusPoint::new(vec![qr(1, 4), qr(1, 2)]);
        let shifted_list: Vec<AugmentedWeight> = weights
            .iter()
            .map(|w| AugmentedWeight::new(w.alpha.clone(), w.u.mul(&h.character_root(&w.alpha))))
            .collect();
        let lhs = f.mul_character(&h);
        let rhs = PartitionFn::new(&shifted_list, &tau).unwrap();
        for p in BoxWindow::new(vec![0, 0], vec![4, 4]).points() {
            assert_eq!(lhs.value_at(&p), rhs.eval(&p), "at {p:?}");
        }
    }

    #[test]
    fn restriction_to_hyperplane() {
        use crate::lattice::LatticeContext;
        use crate::reduction::HyperplaneReduction;
        // restrict along beta = (0,1): pi(lambda) = lambda_1-ish coordinate
        let ctx = LatticeContext::standard(2);
        let red = HyperplaneReduction::new(&ctx, &[0, 1]).unwrap();
        let weights = vec![
            AugmentedWeight::plain(vec![1, 0]),
            AugmentedWeight::new(vec![1, 1], RootOfUnity::root(1, 3)),
            AugmentedWeight::plain(vec![2, -1]),
        ];
        // tau in the hyperplane: tau = (1, 0)
        let tau = vec![qi(1), qi(0)];
        let restricted: Vec<AugmentedWeight> = weights
            .iter()
            .map(|w| AugmentedWeight::new(red.project_weight(&w.alpha), w.u.clone()))
            .collect();
        let tau_sub = red.vector_coords(&tau).unwrap();
        let full = PartitionFn::new(&weights, &tau).unwrap();
        let sub = PartitionFn::new(&restricted, &tau_sub).unwrap();
        // pushforward along pi = pairing-with-kernel-basis of a finite window
        let window = BoxWindow::new(vec![0, -8], vec![8, 8]);
        let finite = LatticeFunction::from_table(
            window
                .points()
                .into_iter()
                .map(|p| {
                    let v = full.eval(&p);
                    (p, v)
                })
                .filter(|(_, v)| !v.is_zero())
                .collect(),
        );
        // covector projection matrix: columns are the kernel basis rows
        let phi: crate::linalg::IMat = (0..2)
            .map(|i| red.kernel_basis.iter().map(|row| row[i].clone()).collect())
            .collect();
        let pushed = finite.pushforward(&phi, 1).unwrap();
        for lam in 0i64..=8 {
            let image = red.project_weight(&[lam, 0]);
            assert_eq!(pushed.value_at(&image), sub.eval(&image), "at lambda={lam}");
        }
    }
}
