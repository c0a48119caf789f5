//! Estimation of multidimensional rational spectral densities `(P/Q)^ν` from
//! covariance lags and generalized (`ν`-)cepstral coefficients.
//!
//! The estimator minimizes a regularized dual functional over pairs of positive
//! trigonometric polynomials on a regular grid of the d-torus. The minimizer
//! `(P̂, Q̂)` matches the covariances exactly and the cepstral coefficients up to
//! an error proportional to the regularization parameter `λ`.
//!
//! All numerical code is generic over [`Scalar`] (`f32` or `f64`); the `*F64`
//! aliases below name the double-precision instantiations.
//!
//! ```
//! use numoment::*;
//!
//! let grid = make_grid(3, 20)?;
//! let model = CascadeFilterModelF64::zeroless(2);
//! let phi = model_spectrum(&model, &grid)?;
//! let data = moments_from_spectrum(&phi, &model.natural_support(), 2)?;
//!
//! let lambdas = [1.0, 1e-2, 1e-4, 1e-6];
//! let solves = lambda_continuation(&data, &lambdas, &grid, &SolverConfig::default())?;
//! let last = solves.last().unwrap();
//! assert!(last.converged && last.residuals.max_abs_covariance() < 1e-9);
//! # Ok::<(), numoment::Error>(())
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiment;
pub mod grid;
pub mod index;
pub mod linalg;
pub mod models;
pub mod moments;
pub mod scalar;
pub mod solver;
pub mod trigpoly;

pub use error::{Error, Result};
pub use experiment::{
    cross_section, reconstruction_error, run_reconstruction_experiment, Cell, ExperimentConfig,
    ExperimentResult, ModelOutcome,
};
pub use grid::{basis_field, grid_mean, make_grid, BasisTable, Grid, GridField};
pub use index::{build_difference_set, half_index_set, unit_generators, HalfIndexSet, IndexSet, MultiIndex};
pub use linalg::Matrix;
pub use models::{model_polynomials, model_spectrum, normalize_numerator, CascadeFilterModel};
pub use moments::{
    covariances, matching_residuals, moments_from_spectrum, nu_cepstral, nu_entropy, MomentData,
    ResidualReport,
};
pub use scalar::Scalar;
pub use solver::{
    boundary_derivative_probe, gradient, hessian, lambda_continuation, newton_solve, objective,
    reconstruct_spectrum, DualPoint, DualProblem, IterationRecord, SolveResult, SolverConfig, StepRule,
};
pub use trigpoly::{eval_trig_poly, filter_autocorrelation, pack_variables, unpack_variables, TrigPoly};

pub type TrigPolyF64 = TrigPoly<f64>;
pub type GridFieldF64 = GridField<f64>;
pub type MomentDataF64 = MomentData<f64>;
pub type DualPointF64 = DualPoint<f64>;
pub type DualProblemF64 = DualProblem<f64>;
pub type SolverConfigF64 = SolverConfig<f64>;
pub type SolveResultF64 = SolveResult<f64>;
pub type ResidualReportF64 = ResidualReport<f64>;
pub type CascadeFilterModelF64 = CascadeFilterModel<f64>;
pub type ExperimentConfigF64 = ExperimentConfig<f64>;
pub type ExperimentResultF64 = ExperimentResult<f64>;
pub type MatrixF64 = Matrix<f64>;

pub type TrigPolyF32 = TrigPoly<f32>;
pub type MomentDataF32 = MomentData<f32>;
pub type SolveResultF32 = SolveResult<f32>;
