//! End-to-end reconstruction study: true moments from a filter model, a
//! descending λ sweep, coefficient errors and spectral cross sections.

use std::thread;

use log::warn;

use crate::error::{Error, Result};
use crate::grid::{make_grid, Grid, GridField};
use crate::index::{build_difference_set, unit_generators, MultiIndex};
use crate::models::{model_polynomials, model_spectrum, CascadeFilterModel};
use crate::moments::{check_nu, moments_from_spectrum, regularity_warning, MomentData};
use crate::scalar::Scalar;
use crate::solver::{reconstruct_spectrum, DualPoint, DualProblem, SolveResult, SolverConfig};
use crate::trigpoly::{pack_variables, TrigPoly};

#[derive(Debug, Clone)]
pub struct ExperimentConfig<T> {
    pub d: usize,
    pub nu: u32,
    pub n: usize,
    /// `λ = 10^{−n}` for each entry; must be strictly ascending.
    pub lambda_exponents: Vec<i32>,
    pub lambda_plus: Vec<MultiIndex>,
    pub models: Vec<CascadeFilterModel<T>>,
    pub solver: SolverConfig<T>,
    /// Axis traversed by the cross sections.
    pub section_axis: usize,
    /// Grid indices of the remaining axes; `None` selects `N/2` (θ = π for even N).
    pub section_fixed: Option<Vec<usize>>,
}

impl<T: Scalar> Default for ExperimentConfig<T> {
    fn default() -> Self {
        Self {
            d: 3,
            nu: 2,
            n: 20,
            lambda_exponents: vec![0, 2, 4, 6, 8, 10],
            lambda_plus: unit_generators(3),
            models: vec![
                CascadeFilterModel::zeroless(2),
                CascadeFilterModel::spectral_zero(2),
            ],
            solver: SolverConfig::default(),
            section_axis: 0,
            section_fixed: None,
        }
    }
}

impl<T: Scalar> ExperimentConfig<T> {
    /// Checks the configuration and returns any non-fatal warnings.
    pub fn validate(&self) -> Result<Vec<String>> {
        check_nu(self.nu)?;
        make_grid(self.d, self.n)?;
        self.solver.validate()?;
        if self.lambda_plus.is_empty() {
            return Err(Error::InvalidInput("lambda_plus must not be empty".into()));
        }
        if let Some(k) = self.lambda_plus.iter().find(|k| k.dim() != self.d) {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                found: k.dim(),
            });
        }
        build_difference_set(&self.lambda_plus)?;
        if self.lambda_exponents.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput(
                "lambda_exponents must be strictly ascending (lambda strictly descending)".into(),
            ));
        }
        if self.models.is_empty() {
            return Err(Error::InvalidInput("at least one model is required".into()));
        }
        for m in &self.models {
            if m.dim() != self.d {
                return Err(Error::DimensionMismatch {
                    expected: self.d,
                    found: m.dim(),
                });
            }
            if m.nu() != self.nu {
                return Err(Error::InvalidInput(format!(
                    "model {} has nu = {}, experiment uses nu = {}",
                    m.label,
                    m.nu(),
                    self.nu
                )));
            }
        }
        if self.section_axis >= self.d {
            return Err(Error::InvalidInput(format!(
                "section axis {} out of range for d = {}",
                self.section_axis, self.d
            )));
        }
        let fixed = self.fixed_indices();
        if fixed.len() + 1 != self.d || fixed.iter().any(|&j| j >= self.n) {
            return Err(Error::InvalidInput(
                "section_fixed needs d − 1 grid indices in range".into(),
            ));
        }
        Ok(regularity_warning(self.nu, self.d).into_iter().collect())
    }

    pub fn lambdas(&self) -> Vec<T> {
        self.lambda_exponents
            .iter()
            // 1/10^e is correctly rounded where 10^(−e) is not
            .map(|&e| {
                T::lit(if e >= 0 {
                    1.0 / 10f64.powi(e)
                } else {
                    10f64.powi(-e)
                })
            })
            .collect()
    }

    pub fn fixed_indices(&self) -> Vec<usize> {
        self.section_fixed
            .clone()
            .unwrap_or_else(|| vec![self.n / 2; self.d.saturating_sub(1)])
    }
}

/// One `(model, λ)` cell of the sweep.
#[derive(Debug, Clone)]
pub struct Cell<T> {
    pub lambda: T,
    pub exponent: i32,
    pub solve: std::result::Result<SolveResult<T>, Error>,
    /// `‖(p̂, q̂) − (p, q)‖₂`, present when the solve succeeded.
    pub reconstruction_error: Option<T>,
    pub cross_section: Option<Vec<T>>,
}

impl<T: Scalar> Cell<T> {
    pub fn converged(&self) -> bool {
        matches!(&self.solve, Ok(r) if r.converged)
    }
}

#[derive(Debug, Clone)]
pub struct ModelOutcome<T> {
    pub label: String,
    pub truth: DualPoint<T>,
    pub moments: MomentData<T>,
    pub true_cross_section: Vec<T>,
    pub cells: Vec<Cell<T>>,
}

impl<T: Scalar> ModelOutcome<T> {
    pub fn errors(&self) -> Vec<Option<T>> {
        self.cells.iter().map(|c| c.reconstruction_error).collect()
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentResult<T> {
    pub grid: Grid,
    pub lambdas: Vec<T>,
    pub exponents: Vec<i32>,
    pub models: Vec<ModelOutcome<T>>,
    pub warnings: Vec<String>,
}

impl<T: Scalar> ExperimentResult<T> {
    pub fn all_converged(&self) -> bool {
        self.models.iter().all(|m| m.cells.iter().all(Cell::converged))
    }
}

/// `‖pack(p̂, q̂) − pack(p, q)‖₂`.
pub fn reconstruction_error<T: Scalar>(
    solved: &DualPoint<T>,
    truth_p: &TrigPoly<T>,
    truth_q: &TrigPoly<T>,
) -> Result<T> {
    if solved.support() != truth_p.support() || solved.support() != truth_q.support() {
        return Err(Error::InvalidInput(
            "solution and truth have different index sets".into(),
        ));
    }
    let a = solved.pack();
    let b = pack_variables(truth_p, truth_q)?;
    Ok(a.iter()
        .zip(&b)
        .map(|(&x, &y)| (x - y) * (x - y))
        .sum::<T>()
        .sqrt())
}

/// Values of `field` along `axis` with the other axes held at `fixed` (in axis order).
pub fn cross_section<T: Scalar>(field: &GridField<T>, axis: usize, fixed: &[usize]) -> Result<Vec<T>> {
    let grid = field.grid();
    let d = grid.dim();
    if axis >= d {
        return Err(Error::InvalidInput(format!(
            "axis {axis} out of range for d = {d}"
        )));
    }
    if fixed.len() + 1 != d {
        return Err(Error::DimensionMismatch {
            expected: d - 1,
            found: fixed.len(),
        });
    }
    let n = grid.points_per_axis();
    let mut js = Vec::with_capacity(d);
    (0..n)
        .map(|j| {
            js.clear();
            js.extend_from_slice(&fixed[..axis]);
            js.push(j);
            js.extend_from_slice(&fixed[axis..]);
            Ok(field.at(grid.linear_index(&js)?))
        })
        .collect()
}

fn run_model<T: Scalar>(
    model: &CascadeFilterModel<T>,
    cfg: &ExperimentConfig<T>,
    grid: &Grid,
) -> Result<ModelOutcome<T>> {
    let support = build_difference_set(&cfg.lambda_plus)?;
    let (p, q) = model_polynomials(model, &support)?;
    let truth = DualPoint::new(p.clone(), q.clone())?;
    let phi = model_spectrum(model, grid)?;
    let moments = moments_from_spectrum(&phi, &support, cfg.nu)?;
    let fixed = cfg.fixed_indices();
    let true_cross_section = cross_section(&phi, cfg.section_axis, &fixed)?;

    let base = DualProblem::new(moments.clone(), grid, T::one())?;
    let mut warm: Option<DualPoint<T>> = None;
    let mut cells = Vec::with_capacity(cfg.lambda_exponents.len());
    for (&lambda, &exponent) in cfg.lambdas().iter().zip(&cfg.lambda_exponents) {
        let solve = base
            .with_lambda(lambda)
            .and_then(|prob| prob.newton_solve(&cfg.solver, warm.as_ref()));
        let mut cell = Cell {
            lambda,
            exponent,
            solve,
            reconstruction_error: None,
            cross_section: None,
        };
        match &cell.solve {
            Ok(res) => {
                cell.reconstruction_error = Some(reconstruction_error(&res.point, &p, &q)?);
                let field = reconstruct_spectrum(&res.point, cfg.nu, grid)?;
                cell.cross_section = Some(cross_section(&field, cfg.section_axis, &fixed)?);
                if res.converged {
                    warm = Some(res.point.clone());
                } else {
                    warn!(
                        "{}: lambda = {:e} did not converge",
                        model.label,
                        lambda.to_f64_lossy()
                    );
                }
            }
            Err(e) => warn!(
                "{}: lambda = {:e} failed: {e}",
                model.label,
                lambda.to_f64_lossy()
            ),
        }
        cells.push(cell);
    }
    Ok(ModelOutcome {
        label: model.label.clone(),
        truth,
        moments,
        true_cross_section,
        cells,
    })
}

/// Runs the full sweep; models are processed on separate threads.
pub fn run_reconstruction_experiment<T: Scalar>(cfg: &ExperimentConfig<T>) -> Result<ExperimentResult<T>> {
    let warnings = cfg.validate()?;
    for w in &warnings {
        warn!("{w}");
    }
    let grid = make_grid(cfg.d, cfg.n)?;
    let outcomes: Vec<Result<ModelOutcome<T>>> = thread::scope(|s| {
        let handles: Vec<_> = cfg
            .models
            .iter()
            .map(|m| s.spawn(|| run_model(m, cfg, &grid)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("model worker panicked"))
            .collect()
    });
    let models = outcomes.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(ExperimentResult {
        grid,
        lambdas: cfg.lambdas(),
        exponents: cfg.lambda_exponents.clone(),
        models,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::basis_field;
    use crate::index::IndexSet;

    #[test]
    fn reconstruction_error_examples() {
        let lam = build_difference_set(&unit_generators(3)).unwrap();
        let p = TrigPoly::constant(lam.clone(), 1.0f64);
        let q = TrigPoly::constant(lam.clone(), 2.0f64);
        let pt = DualPoint::new(p.clone(), q.clone()).unwrap();
        assert_eq!(reconstruction_error(&pt, &p, &q).unwrap(), 0.0);
        let shifted = DualPoint::new(p.clone(), TrigPoly::constant(lam, 2.1)).unwrap();
        assert!((reconstruction_error(&shifted, &p, &q).unwrap() - 0.1).abs() < 1e-15);
        let other = IndexSet::zero_only(3);
        let po = TrigPoly::constant(other.clone(), 1.0);
        let qo = TrigPoly::constant(other, 1.0);
        assert!(reconstruction_error(&pt, &po, &qo).is_err());
    }

    #[test]
    fn cross_section_examples() {
        let g = make_grid(3, 20).unwrap();
        let c = cross_section(&GridField::constant(g, 3.0f64), 0, &[4, 7]).unwrap();
        assert_eq!(c, vec![3.0; 20]);
        let f = basis_field::<f64>(&g, &MultiIndex::unit(3, 0)).unwrap();
        let c = cross_section(&f, 0, &[10, 10]).unwrap();
        for (j, v) in c.iter().enumerate() {
            assert!((v - (std::f64::consts::TAU * j as f64 / 20.0).cos()).abs() < 1e-15);
        }
        assert!(cross_section(&f, 3, &[1, 1]).is_err());
        assert!(cross_section(&f, 0, &[1]).is_err());
        assert!(cross_section(&f, 0, &[1, 20]).is_err());
    }

    #[test]
    fn model_two_true_section_has_zero_at_pi() {
        let g = make_grid(3, 20).unwrap();
        let phi = model_spectrum(&CascadeFilterModel::<f64>::spectral_zero(2), &g).unwrap();
        let c = cross_section(&phi, 0, &[10, 10]).unwrap();
        assert_eq!(c[10], 0.0);
        assert!(c.iter().enumerate().all(|(j, &v)| j == 10 || v > 0.0));
    }

    #[test]
    fn config_validation() {
        let cfg = ExperimentConfig::<f64>::default();
        assert!(cfg.validate().unwrap().is_empty());
        assert_eq!(cfg.lambdas().len(), 6);
        assert_eq!(cfg.fixed_indices(), vec![10, 10]);

        let bad = ExperimentConfig::<f64> {
            lambda_exponents: vec![0, 4, 2],
            ..ExperimentConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = ExperimentConfig::<f64> {
            nu: 1,
            ..ExperimentConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = ExperimentConfig::<f64> {
            n: 1,
            ..ExperimentConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = ExperimentConfig::<f64> {
            lambda_plus: vec![],
            ..ExperimentConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn low_nu_emits_warning() {
        let cfg = ExperimentConfig::<f64> {
            d: 6,
            lambda_plus: unit_generators(6),
            models: vec![CascadeFilterModel::new(
                "ar",
                2,
                vec![1.0, 0.3, 0.0, 0.0, 0.0, 0.0, 0.0],
                vec![1.0; 7],
            )
            .unwrap()],
            n: 4,
            ..ExperimentConfig::default()
        };
        let w = cfg.validate().unwrap();
        assert_eq!(w.len(), 1);
    }
}
