//! The default reconstruction experiment: convergence, monotonicity and pinned errors.

mod common;

use common::*;
use numoment::*;

fn run_default() -> ExperimentResultF64 {
    run_reconstruction_experiment(&ExperimentConfig::default()).unwrap()
}

#[test]
fn default_experiment_converges_and_improves_with_lambda() {
    let res = run_default();
    assert_eq!(res.lambdas.len(), 6);
    assert!(res.all_converged());
    for m in &res.models {
        let errs: Vec<f64> = m.errors().into_iter().map(Option::unwrap).collect();
        assert!(errs.windows(2).all(|w| w[1] < w[0]), "{}: {errs:?}", m.label);
    }
}

#[test]
fn reconstruction_errors_match_pinned_values() {
    let res = run_default();
    for (m, pinned) in res.models.iter().zip([ZEROLESS_ERRORS, SPECTRAL_ZERO_ERRORS]) {
        for (e, p) in m.errors().into_iter().zip(pinned) {
            let e = e.unwrap();
            assert!(rel_close(e, p, 1e-6), "{}: {e:e} vs pinned {p:e}", m.label);
        }
    }
}

#[test]
fn spectral_zero_cross_section() {
    let res = run_default();
    let m = res.models.iter().find(|m| m.label == "spectral_zero").unwrap();
    assert_eq!(m.true_cross_section[10], 0.0);
    let dev = |c: &Cell<f64>| max_abs_diff(c.cross_section.as_ref().unwrap(), &m.true_cross_section);
    for c in &m.cells {
        assert!(c.cross_section.as_ref().unwrap()[10] > 0.0);
    }
    let at = |e: i32| m.cells.iter().find(|c| c.exponent == e).unwrap();
    assert!(dev(at(10)) < dev(at(4)));
}

#[test]
fn cross_section_is_along_requested_axis() {
    let grid = make_grid(3, 4).unwrap();
    let f = GridField::from_fn(grid, |i| i as f64);
    assert_eq!(
        cross_section(&f, 0, &[1, 2]).unwrap(),
        vec![6.0, 22.0, 38.0, 54.0]
    );
    assert_eq!(
        cross_section(&f, 2, &[1, 2]).unwrap(),
        vec![24.0, 25.0, 26.0, 27.0]
    );
    assert!(cross_section(&f, 3, &[0, 0]).is_err());
    assert!(cross_section(&f, 0, &[0, 0, 0]).is_err());
}

#[test]
fn invalid_configs_are_rejected() {
    let base = ExperimentConfigF64::default();
    let bad = [
        ExperimentConfig {
            nu: 1,
            ..base.clone()
        },
        ExperimentConfig { n: 1, ..base.clone() },
        ExperimentConfig {
            lambda_plus: vec![],
            ..base.clone()
        },
        ExperimentConfig {
            lambda_exponents: vec![2, 0],
            ..base.clone()
        },
        ExperimentConfig {
            models: vec![],
            ..base.clone()
        },
    ];
    for cfg in bad {
        assert!(run_reconstruction_experiment(&cfg).is_err(), "{cfg:?}");
    }
}

#[test]
fn low_order_warning_is_reported() {
    assert!(ExperimentConfigF64::default().validate().unwrap().is_empty());
    assert!(numoment::moments::regularity_warning(2, 5).is_some());
    assert!(numoment::moments::regularity_warning(2, 4).is_none());
}
