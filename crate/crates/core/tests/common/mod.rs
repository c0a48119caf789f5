#![allow(dead_code)]

use numoment::*;

pub const N: usize = 20;

pub fn support3() -> IndexSet {
    build_difference_set(&unit_generators(3)).unwrap()
}

pub fn grid3() -> Grid {
    make_grid(3, N).unwrap()
}

pub fn model_moments(model: &CascadeFilterModelF64, grid: &Grid) -> MomentDataF64 {
    let phi = model_spectrum(model, grid).unwrap();
    moments_from_spectrum(&phi, &model.natural_support(), model.nu()).unwrap()
}

pub fn model_truth(model: &CascadeFilterModelF64) -> DualPointF64 {
    let (p, q) = model_polynomials(model, &model.natural_support()).unwrap();
    DualPoint::new(p, q).unwrap()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn rel_close(found: f64, expected: f64, rel: f64) -> bool {
    (found - expected).abs() <= rel * expected.abs()
}

/// Reconstruction errors from the first verified run of the default experiment.
pub const ZEROLESS_ERRORS: [f64; 6] = [
    0.47667880143654284,
    0.1179473851451216,
    0.019137101733804566,
    0.0023239528938626517,
    7.198878479363499e-5,
    7.59955753785364e-7,
];

pub const SPECTRAL_ZERO_ERRORS: [f64; 6] = [
    0.5093851497541171,
    0.13690019105293988,
    0.025706127918968178,
    0.004960916294361778,
    0.0010051729295243352,
    0.00022870024706628483,
];

/// Random perturbation of `truth` with `min P ≥ 0.05` and `min Q ≥ 0.005` on the grid,
/// far enough from the boundary for central differences with step `1e−6` to resolve.
pub fn random_interior_point(rng: &mut impl rand::Rng, truth: &DualPointF64, grid: &Grid) -> Vec<f64> {
    loop {
        let x: Vec<f64> = truth
            .pack()
            .iter()
            .map(|&v| v + rng.random_range(-0.05..0.05) * (1.0 + v.abs()))
            .collect();
        let pt = DualPoint::from_packed(&x, truth.support()).unwrap();
        let pmin = eval_trig_poly(pt.p(), grid).unwrap().min().1;
        let qmin = eval_trig_poly(pt.q(), grid).unwrap().min().1;
        if pmin >= 0.05 && qmin >= 0.005 {
            return x;
        }
    }
}
