//! Dense complex linear algebra used by the rest of the crate.
//!
//! Everything here is a pure function of its inputs and targets the small
//! sizes this problem produces (matrices up to 64×64, LPs up to 128×128).

mod eig;
mod lp;
mod matrix;
mod spd;

pub use eig::{
    hermitian_eig, min_eigenvalue, psd_factor, psd_project, pseudo_inverse, Eigen, JACOBI_REL_TOL,
    PSD_CLIP_TOL, PSD_REJECT_TOL,
};
pub use lp::{lp_feasible, lp_feasible_with, LpOptions, LpOutcome, MAX_LP_SIZE};
pub use matrix::{CMatrix, HERMITIAN_TOL};
pub use spd::solve_spd;
