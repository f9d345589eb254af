//! Exact computation of multiple Verlinde sums (rational trigonometric sums)
//! and their decomposition into quasi-polynomial germs and partition-function
//! tails.
//!
//! Everything in this crate is exact: scalars live in cyclotomic fields
//! `Q(zeta_N)` with big-rational coefficients, lattice geometry is done with
//! exact integer/rational linear algebra, and residue calculus is done on
//! truncated Laurent series whose coefficients are polynomials over a
//! cyclotomic field. There is no floating point anywhere.
//!
//! The main entry points:
//!
//! - [`verlinde::direct_verlinde`]: the brute-force sum over the torsion
//!   subgroup `T_ell`, the ground truth everything else is checked against.
//! - [`szenes::szenes_value`] / [`szenes::szenes_germ`]: Szenes' iterated
//!   constant-term formula, pointwise or as a symbolic quasi-polynomial.
//! - [`decomp::decomposition_eval`]: the decomposition of a Verlinde sum into
//!   a sum over admissible subspaces of germ-times-partition convolutions.
//! - [`decomp::su3_report`]: the full `SU(3)` worked example.
//! - [`equivariant`]: expansions in formal equivariant parameters.

pub mod error;
pub mod exactnum;
pub mod linalg;
pub mod feasibility;
pub mod lattice;
pub mod reduction;
pub mod series;
pub mod arrange;
pub mod partition;
pub mod verlinde;
pub mod szenes;
pub mod decomp;
pub mod equivariant;
pub mod config;
pub mod verify;

pub use error::{Error, Result};
pub use exactnum::{Cyclotomic, QRat, RootOfUnity};
