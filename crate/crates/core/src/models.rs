//! Cascade shaping-filter models with degree-one numerator and denominator.
//!
//! A model `(a, b)` drives unit-variance white noise through `ν` identical copies of
//! `b(z)/a(z)` with `g(z) = g_0 − Σ_j g_j z_j^{−1}`, giving the spectrum
//! `(P/Q)^ν` with `P = |b|²` and `Q = |a|²`.

use crate::error::{Error, Result};
use crate::grid::{Grid, GridField};
use crate::index::{build_difference_set, unit_generators, IndexSet};
use crate::moments::check_nu;
use crate::scalar::{powu, Scalar};
use crate::trigpoly::{eval_trig_poly, filter_autocorrelation, TrigPoly};

#[derive(Debug, Clone, PartialEq)]
pub struct CascadeFilterModel<T> {
    pub label: String,
    nu: u32,
    a: Vec<T>,
    b: Vec<T>,
}

/// `b_raw / ‖b_raw‖₂`.
pub fn normalize_numerator<T: Scalar>(b_raw: &[T]) -> Result<Vec<T>> {
    let norm = b_raw.iter().map(|&x| x * x).sum::<T>().sqrt();
    if !(norm > T::zero()) || !norm.is_finite() {
        return Err(Error::InvalidInput(
            "numerator coefficients must be finite and not all zero".into(),
        ));
    }
    Ok(b_raw.iter().map(|&x| x / norm).collect())
}

impl<T: Scalar> CascadeFilterModel<T> {
    /// Builds a model, normalizing the numerator to unit norm.
    pub fn new(label: impl Into<String>, nu: u32, a: Vec<T>, b_raw: Vec<T>) -> Result<Self> {
        check_nu(nu)?;
        if a.len() < 2 || a.len() != b_raw.len() {
            return Err(Error::InvalidModel(format!(
                "filter coefficient vectors must both have length d + 1 >= 2 (got {} and {})",
                a.len(),
                b_raw.len()
            )));
        }
        if a.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidModel(
                "denominator coefficients must be finite".into(),
            ));
        }
        let b = normalize_numerator(&b_raw)?;
        Ok(Self {
            label: label.into(),
            nu,
            a,
            b,
        })
    }

    /// Zeroless model: `a = [1, 0.3, 0.3, 0.3]`, `b̃ = [1, −0.2, −0.3, −0.4]`.
    pub fn zeroless(nu: u32) -> Self {
        Self::new(
            "zeroless",
            nu,
            [1.0, 0.3, 0.3, 0.3].map(T::lit).to_vec(),
            [1.0, -0.2, -0.3, -0.4].map(T::lit).to_vec(),
        )
        .expect("valid built-in model")
    }

    /// Model whose numerator vanishes at `θ = (π, π, π)`: `b̃ = [1, −0.2, −0.3, −0.5]`.
    pub fn spectral_zero(nu: u32) -> Self {
        Self::new(
            "spectral_zero",
            nu,
            [1.0, 0.3, 0.3, 0.3].map(T::lit).to_vec(),
            [1.0, -0.2, -0.3, -0.5].map(T::lit).to_vec(),
        )
        .expect("valid built-in model")
    }

    pub fn dim(&self) -> usize {
        self.a.len() - 1
    }

    pub fn nu(&self) -> u32 {
        self.nu
    }

    pub fn a(&self) -> &[T] {
        &self.a
    }

    /// Normalized numerator coefficients.
    pub fn b(&self) -> &[T] {
        &self.b
    }

    pub fn with_nu(mut self, nu: u32) -> Result<Self> {
        check_nu(nu)?;
        self.nu = nu;
        Ok(self)
    }

    /// `{0, e_1, …, e_d} − {0, e_1, …, e_d}`, the smallest support holding both autocorrelations.
    pub fn natural_support(&self) -> IndexSet {
        build_difference_set(&unit_generators(self.dim())).expect("unit generators are valid")
    }
}

/// `(P, Q) = (|b|², |a|²)` on `lambda`, with `P` scaled so that `p_0 = 1` exactly.
pub fn model_polynomials<T: Scalar>(
    model: &CascadeFilterModel<T>,
    lambda: &IndexSet,
) -> Result<(TrigPoly<T>, TrigPoly<T>)> {
    let p_raw = filter_autocorrelation(model.b(), lambda)?;
    let q = filter_autocorrelation(model.a(), lambda)?;
    // ‖b‖ = 1 makes p_0 = 1 up to rounding; rescaling pins it exactly.
    let p0 = p_raw.coeffs()[0];
    let p = TrigPoly::new(lambda.clone(), p_raw.coeffs().iter().map(|&c| c / p0).collect())?;
    Ok((p, q))
}

/// Rounding floor for evaluating a polynomial: values with magnitude below this
/// are indistinguishable from zero.
fn rounding_floor<T: Scalar>(p: &TrigPoly<T>) -> T {
    let two = T::one() + T::one();
    let mass = p
        .coeffs()
        .iter()
        .enumerate()
        .map(|(r, c)| if r == 0 { c.abs() } else { two * c.abs() })
        .sum::<T>();
    T::lit(64.0) * T::epsilon() * mass
}

/// `(P/Q)^ν` on the grid, exactly zero where `P` vanishes to rounding.
pub fn model_spectrum<T: Scalar>(model: &CascadeFilterModel<T>, grid: &Grid) -> Result<GridField<T>> {
    if grid.dim() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: grid.dim(),
            found: model.dim(),
        });
    }
    let (p, q) = model_polynomials(model, &model.natural_support())?;
    let pv = eval_trig_poly(&p, grid)?;
    let qv = eval_trig_poly(&q, grid)?;
    let (i, qmin) = qv.min();
    if !(qmin > T::zero()) {
        return Err(Error::InvalidModel(format!(
            "denominator |a|^2 is not positive on the grid (value {qmin} at point {i})"
        )));
    }
    let floor = rounding_floor(&p);
    let nu = model.nu();
    pv.zip_with(&qv, |pv, qv| {
        let pv = if pv.abs() <= floor { T::zero() } else { pv };
        powu(pv / qv, nu)
    })
}
