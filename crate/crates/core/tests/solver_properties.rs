//! Convergence, stationarity and stability properties of the damped Newton solver.

mod common;

use common::*;
use numoment::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn lambdas() -> Vec<f64> {
    (0..6).map(|i| 1.0 / 10f64.powi(2 * i)).collect()
}

fn models() -> [CascadeFilterModelF64; 2] {
    [
        CascadeFilterModelF64::zeroless(2),
        CascadeFilterModelF64::spectral_zero(2),
    ]
}

#[test]
fn scalar_problem_has_closed_form() {
    let grid = grid3();
    let data = MomentData::new(IndexSet::zero_only(3), 2, vec![2.0], vec![]).unwrap();
    let cfg = SolverConfigF64::default();
    for lambda in [1.0, 1e-6] {
        for start in [None, Some(0.2), Some(3.0)] {
            let warm = start.map(|q0| DualPoint::from_packed(&[q0], data.support()).unwrap());
            let res = newton_solve(&data, lambda, &grid, &cfg, warm.as_ref()).unwrap();
            assert!(res.converged);
            assert!(
                res.iterations <= 10,
                "{} iterations from {start:?}",
                res.iterations
            );
            assert!((res.point.q().coeffs()[0] - 0.5f64.sqrt()).abs() <= 1e-10);
        }
    }
}

#[test]
fn objective_decreases_along_iterates() {
    let grid = grid3();
    for model in models() {
        let data = model_moments(&model, &grid);
        for lambda in [1.0, 1e-4] {
            let res = newton_solve(&data, lambda, &grid, &SolverConfig::default(), None).unwrap();
            assert!(res.converged);
            for w in res.trace.windows(2) {
                let (a, b) = (&w[0], &w[1]);
                match a.rule {
                    StepRule::Armijo => assert!(b.objective < a.objective, "{a:?} -> {b:?}"),
                    StepRule::GradientDecrease => {
                        let slack = 1e-12 * a.objective.abs().max(1.0);
                        assert!(b.objective <= a.objective + slack, "{a:?} -> {b:?}");
                        assert!(b.grad_norm < a.grad_norm);
                    }
                    StepRule::None => unreachable!("only the final record has no step"),
                }
            }
        }
    }
}

#[test]
fn stationarity_holds_at_every_converged_solve() {
    let grid = grid3();
    let cfg = SolverConfigF64::default();
    let tol = 10.0 * cfg.grad_tol;
    for model in models() {
        let data = model_moments(&model, &grid);
        for res in lambda_continuation(&data, &lambdas(), &grid, &cfg).unwrap() {
            assert!(res.converged);
            let r = &res.residuals;
            assert!(
                r.max_abs_covariance() <= tol,
                "covariance residual {:e}",
                r.max_abs_covariance()
            );
            assert!(
                r.max_identity_gap() <= tol,
                "identity gap {:e}",
                r.max_identity_gap()
            );
            assert!(r.max_abs_cepstral() <= tol);
        }
    }
}

#[test]
fn different_starts_reach_the_same_minimizer() {
    let grid = grid3();
    let cfg = SolverConfig {
        max_iter: 1000,
        ..SolverConfig::default()
    };
    for model in models() {
        let data = model_moments(&model, &grid);
        let chain = lambda_continuation(&data, &lambdas(), &grid, &cfg).unwrap();
        for res in &chain {
            let cold = newton_solve(&data, res.lambda, &grid, &cfg, None).unwrap();
            assert!(cold.converged);
            let diff = max_abs_diff(&cold.point.pack(), &res.point.pack());
            assert!(diff <= 1e-6, "{} at λ={:e}: {diff:e}", model.label, res.lambda);
        }
    }
}

/// Largest observed `‖Δx‖ / ‖Δ(c, m)‖` over both models and all λ, from the first verified run.
const WELL_POSEDNESS_K: f64 = 1.5;

#[test]
fn solution_depends_continuously_on_moments() {
    let grid = grid3();
    let cfg = SolverConfigF64::default();
    let delta = 1e-6;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    for model in models() {
        let data = model_moments(&model, &grid);
        for res in lambda_continuation(&data, &lambdas(), &grid, &cfg).unwrap() {
            let dc: Vec<f64> = data
                .c()
                .iter()
                .map(|_| if rng.random::<bool>() { delta } else { -delta })
                .collect();
            let dm: Vec<f64> = data
                .m()
                .iter()
                .map(|_| if rng.random::<bool>() { delta } else { -delta })
                .collect();
            let c: Vec<f64> = data.c().iter().zip(&dc).map(|(a, b)| a + b).collect();
            let m: Vec<f64> = data.m().iter().zip(&dm).map(|(a, b)| a + b).collect();
            let perturbed = data.with_values(c, m).unwrap();
            let moved = newton_solve(&perturbed, res.lambda, &grid, &cfg, Some(&res.point)).unwrap();
            assert!(moved.converged);
            let dx: Vec<f64> = moved
                .point
                .pack()
                .iter()
                .zip(res.point.pack())
                .map(|(a, b)| a - b)
                .collect();
            let dmom = norm(&[dc, dm].concat());
            worst = worst.max(norm(&dx) / dmom);
        }
    }
    assert!(worst <= 2.0 * WELL_POSEDNESS_K, "sensitivity {worst}");
}

#[test]
fn flat_spectrum_is_recovered() {
    let grid = grid3();
    let support = support3();
    let phi = GridField::constant(grid, 1.0);
    let data = moments_from_spectrum(&phi, &support, 2).unwrap();
    let res = newton_solve(&data, 1e-12, &grid, &SolverConfig::default(), None).unwrap();
    assert!(res.converged);
    let one = TrigPoly::constant(support, 1.0).coeffs().to_vec();
    assert!(max_abs_diff(res.point.p().coeffs(), &one) <= 1e-5);
    assert!(max_abs_diff(res.point.q().coeffs(), &one) <= 1e-5);
}

#[test]
fn zeroless_model_is_recovered_at_small_lambda() {
    let grid = grid3();
    let model = CascadeFilterModelF64::zeroless(2);
    let data = model_moments(&model, &grid);
    let chain = lambda_continuation(&data, &lambdas(), &grid, &SolverConfig::default()).unwrap();
    let last = chain.last().unwrap();
    let err = max_abs_diff(&last.point.pack(), &model_truth(&model).pack());
    assert!(err <= 1e-5, "coefficient error {err:e}");
}

#[test]
fn boundary_probe_diverges_at_a_spectral_zero() {
    let grid = grid3();
    let model = CascadeFilterModelF64::spectral_zero(2);
    let data = model_moments(&model, &grid);
    // Q carries the on-grid zero of the model numerator; P ≡ 1.
    let q0 = model_truth(&model).p().clone();
    let p = TrigPoly::constant(data.support().clone(), 1.0);
    let ts: Vec<f64> = (1..=6).map(|e| 10f64.powi(-e)).collect();
    let fp = boundary_derivative_probe(&p, &q0, &ts, &data, &grid).unwrap();
    assert!(fp.windows(2).all(|w| w[1] < w[0]), "{fp:?}");
    assert!(*fp.last().unwrap() < -1e6);
    let cells = grid.len() as f64;
    for (&t, &v) in ts.iter().zip(&fp) {
        assert!(v <= data.c()[0] - t.powi(-2) / cells);
    }
}

#[test]
fn invalid_inputs_are_reported() {
    let grid = grid3();
    let data = model_moments(&CascadeFilterModelF64::zeroless(2), &grid);
    let cfg = SolverConfigF64::default();
    assert!(matches!(
        newton_solve(&data, 0.0, &grid, &cfg, None),
        Err(Error::InvalidInput(_))
    ));
    assert!(matches!(
        newton_solve(&data, -1.0, &grid, &cfg, None),
        Err(Error::InvalidInput(_))
    ));
    assert!(lambda_continuation(&data, &[1e-2, 1.0], &grid, &cfg).is_err());
    assert!(MomentData::new(support3(), 1, data.c().to_vec(), data.m().to_vec()).is_err());
    let bad = SolverConfig { armijo_c: 1.5, ..cfg };
    assert!(newton_solve(&data, 1.0, &grid, &bad, None).is_err());
}

#[test]
fn single_precision_solve_converges_loosely() {
    let grid = grid3();
    let model = CascadeFilterModel::<f32>::zeroless(2);
    let phi = model_spectrum(&model, &grid).unwrap();
    let data: MomentDataF32 = moments_from_spectrum(&phi, &model.natural_support(), 2).unwrap();
    let cfg = SolverConfig {
        grad_tol: 1e-3f32,
        ..SolverConfig::default()
    };
    let res = newton_solve(&data, 1e-2f32, &grid, &cfg, None).unwrap();
    assert!(res.converged);
    assert!(res.residuals.max_abs_covariance() < 1e-2);
}
