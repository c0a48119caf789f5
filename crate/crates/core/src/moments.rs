//! Covariance lags, generalized cepstral coefficients and entropy of a gridded
//! spectral density, plus moment-matching residuals of a candidate solution.

use crate::error::{Error, Result};
use crate::grid::{mean_of, BasisTable, Grid, GridField};
use crate::index::{half_index_set, HalfIndexSet, IndexSet, MultiIndex};
use crate::scalar::{powu, Scalar};
use crate::trigpoly::{eval_trig_poly, TrigPoly};

/// Spectra slightly below zero from rounding are accepted and treated as zero.
pub const NEGATIVE_SPECTRUM_SLACK: f64 = 1e-12;

/// Rejects `nu < 2`.
pub fn check_nu(nu: u32) -> Result<()> {
    if nu < 2 {
        return Err(Error::UnsupportedParameter(format!(
            "nu must be an integer >= 2 (got {nu})"
        )));
    }
    Ok(())
}

/// Warning text when `nu < d/2`, where an interior solution is no longer guaranteed.
pub fn regularity_warning(nu: u32, d: usize) -> Option<String> {
    if 2 * (nu as usize) < d {
        Some(format!(
            "nu = {nu} is below d/2 = {}; an interior solution is not guaranteed",
            d as f64 / 2.0
        ))
    } else {
        None
    }
}

/// Covariances `c_k` on the half set and `ν`-cepstral coefficients `m_k` on its
/// nonzero part.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentData<T> {
    support: IndexSet,
    half: HalfIndexSet,
    nu: u32,
    c: Vec<T>,
    m: Vec<T>,
}

impl<T: Scalar> MomentData<T> {
    pub fn new(support: IndexSet, nu: u32, c: Vec<T>, m: Vec<T>) -> Result<Self> {
        check_nu(nu)?;
        let half = half_index_set(&support);
        if c.len() != half.len() {
            return Err(Error::InvalidInput(format!(
                "expected {} covariances, got {}",
                half.len(),
                c.len()
            )));
        }
        if m.len() + 1 != half.len() {
            return Err(Error::InvalidInput(format!(
                "expected {} cepstral coefficients, got {}",
                half.len() - 1,
                m.len()
            )));
        }
        if !(c[0] > T::zero()) {
            return Err(Error::InvalidInput(format!(
                "zero-lag covariance c_0 must be positive, got {}",
                c[0]
            )));
        }
        if let Some(v) = c.iter().chain(&m).find(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("moment value {v} is not finite")));
        }
        Ok(Self {
            support,
            half,
            nu,
            c,
            m,
        })
    }

    pub fn support(&self) -> &IndexSet {
        &self.support
    }

    pub fn half(&self) -> &HalfIndexSet {
        &self.half
    }

    pub fn nu(&self) -> u32 {
        self.nu
    }

    pub fn dim(&self) -> usize {
        self.support.dim()
    }

    pub fn c(&self) -> &[T] {
        &self.c
    }

    pub fn m(&self) -> &[T] {
        &self.m
    }

    pub fn covariance(&self, k: &MultiIndex) -> Option<T> {
        self.half.position(k).map(|r| self.c[r])
    }

    pub fn cepstral(&self, k: &MultiIndex) -> Option<T> {
        match self.half.position(k) {
            Some(r) if r > 0 => Some(self.m[r - 1]),
            _ => None,
        }
    }

    /// Same support with every value transformed, e.g. for perturbation studies.
    pub fn with_values(&self, c: Vec<T>, m: Vec<T>) -> Result<Self> {
        Self::new(self.support.clone(), self.nu, c, m)
    }

    pub fn with_nu(&self, nu: u32) -> Result<Self> {
        Self::new(self.support.clone(), nu, self.c.clone(), self.m.clone())
    }
}

fn check_spectrum<T: Scalar>(phi: &GridField<T>) -> Result<()> {
    let slack = -T::lit(NEGATIVE_SPECTRUM_SLACK);
    for (i, &v) in phi.values().iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::Integration {
                index: i,
                value: v.to_f64_lossy(),
            });
        }
        if v < slack {
            return Err(Error::InvalidSpectrum {
                index: i,
                value: v.to_f64_lossy(),
            });
        }
    }
    Ok(())
}

fn check_grid<T: Scalar>(phi: &GridField<T>, grid: &Grid, d: usize) -> Result<()> {
    if phi.grid() != grid || grid.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: grid.dim(),
            found: d,
        });
    }
    Ok(())
}

/// `Φ^{(ν−1)/ν}`, continuous at zero.
#[inline]
fn root_power<T: Scalar>(phi: T, nu: u32) -> T {
    if phi <= T::zero() {
        T::zero()
    } else {
        let nu_t = T::lit(nu as f64);
        phi.powf((nu_t - T::one()) / nu_t)
    }
}

/// `c_k = mean(cos⟨k,θ⟩ Φ)` for every representative of `half`.
pub fn covariances<T: Scalar>(phi: &GridField<T>, half: &HalfIndexSet, grid: &Grid) -> Result<Vec<T>> {
    check_grid(phi, grid, half.dim())?;
    check_spectrum(phi)?;
    let basis = BasisTable::<T>::new(grid, half)?;
    let v = phi.values();
    Ok((0..half.len())
        .map(|r| {
            let row = basis.row(r);
            mean_of(v.len(), |i| row[i] * v[i])
        })
        .collect())
}

/// `m_k = ν/(ν−1) mean(cos⟨k,θ⟩ Φ^{(ν−1)/ν})` for every nonzero representative of `half`.
pub fn nu_cepstral<T: Scalar>(
    phi: &GridField<T>,
    half: &HalfIndexSet,
    nu: u32,
    grid: &Grid,
) -> Result<Vec<T>> {
    check_nu(nu)?;
    check_grid(phi, grid, half.dim())?;
    check_spectrum(phi)?;
    let basis = BasisTable::<T>::new(grid, half)?;
    let nu_t = T::lit(nu as f64);
    let scale = nu_t / (nu_t - T::one());
    let root: Vec<T> = phi.values().iter().map(|&v| root_power(v, nu)).collect();
    Ok((1..half.len())
        .map(|r| {
            let row = basis.row(r);
            scale * mean_of(root.len(), |i| row[i] * root[i])
        })
        .collect())
}

/// `ν²/(ν−1) (mean(Φ^{(ν−1)/ν}) − 1)`.
pub fn nu_entropy<T: Scalar>(phi: &GridField<T>, nu: u32) -> Result<T> {
    check_nu(nu)?;
    check_spectrum(phi)?;
    let nu_t = T::lit(nu as f64);
    let v = phi.values();
    let mean = mean_of(v.len(), |i| root_power(v[i], nu));
    Ok(nu_t * nu_t / (nu_t - T::one()) * (mean - T::one()))
}

/// Covariance and cepstral moments of `phi` on `support`.
pub fn moments_from_spectrum<T: Scalar>(
    phi: &GridField<T>,
    support: &IndexSet,
    nu: u32,
) -> Result<MomentData<T>> {
    let half = half_index_set(support);
    let grid = *phi.grid();
    let c = covariances(phi, &half, &grid)?;
    let m = nu_cepstral(phi, &half, nu, &grid)?;
    MomentData::new(support.clone(), nu, c, m)
}

/// Moment-matching diagnostics of a candidate `(P̂, Q̂)`.
///
/// At a stationary point of the regularized dual, `covariance` and `cepstral`
/// vanish and `raw_cepstral_mismatch = −predicted_error`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport<T> {
    /// `c_k − mean(cos_k (P̂/Q̂)^ν)` over the half set.
    pub covariance: Vec<T>,
    /// `m_k − ν/(ν−1) mean(cos_k [(P̂/Q̂)^{ν−1} − λ/P̂^{ν+1}])` over the nonzero half set.
    pub cepstral: Vec<T>,
    /// `ε_k = λν/(ν−1) mean(cos_k / P̂^{ν+1})`.
    pub predicted_error: Vec<T>,
    /// `m_k − ν/(ν−1) mean(cos_k (P̂/Q̂)^{ν−1})`.
    pub raw_cepstral_mismatch: Vec<T>,
}

fn max_abs<T: Scalar>(v: impl IntoIterator<Item = T>) -> T {
    v.into_iter().fold(T::zero(), |a, x| a.max(x.abs()))
}

impl<T: Scalar> ResidualReport<T> {
    pub fn max_abs_covariance(&self) -> T {
        max_abs(self.covariance.iter().copied())
    }

    pub fn max_abs_cepstral(&self) -> T {
        max_abs(self.cepstral.iter().copied())
    }

    /// `max_k |raw_k + ε_k|`.
    pub fn max_identity_gap(&self) -> T {
        max_abs(
            self.raw_cepstral_mismatch
                .iter()
                .zip(&self.predicted_error)
                .map(|(&r, &e)| r + e),
        )
    }
}

/// Evaluates the stationarity conditions at `(p_hat, q_hat)`.
pub fn matching_residuals<T: Scalar>(
    p_hat: &TrigPoly<T>,
    q_hat: &TrigPoly<T>,
    data: &MomentData<T>,
    grid: &Grid,
    lambda_reg: T,
) -> Result<ResidualReport<T>> {
    if p_hat.support() != data.support() || q_hat.support() != data.support() {
        return Err(Error::InvalidInput(
            "polynomial support differs from moment support".into(),
        ));
    }
    let pv = eval_trig_poly(p_hat, grid)?;
    let qv = eval_trig_poly(q_hat, grid)?;
    for (which, f) in [("P", &pv), ("Q", &qv)] {
        let (i, v) = f.min();
        if !(v > T::zero()) {
            return Err(Error::Boundary {
                which,
                index: i,
                value: v.to_f64_lossy(),
            });
        }
    }
    let basis = BasisTable::<T>::new(grid, data.half())?;
    let nu = data.nu();
    let nu_t = T::lit(nu as f64);
    let scale = nu_t / (nu_t - T::one());
    let n = grid.len();
    let (pv, qv) = (pv.values(), qv.values());
    let ratio: Vec<T> = (0..n).map(|i| pv[i] / qv[i]).collect();
    let spec: Vec<T> = ratio.iter().map(|&r| powu(r, nu)).collect();
    let spec_m1: Vec<T> = ratio.iter().map(|&r| powu(r, nu - 1)).collect();
    let inv_p: Vec<T> = pv.iter().map(|&p| T::one() / powu(p, nu + 1)).collect();

    let mut report = ResidualReport {
        covariance: Vec::with_capacity(basis.num_rows()),
        cepstral: Vec::new(),
        predicted_error: Vec::new(),
        raw_cepstral_mismatch: Vec::new(),
    };
    for r in 0..basis.num_rows() {
        let row = basis.row(r);
        report
            .covariance
            .push(data.c()[r] - mean_of(n, |i| row[i] * spec[i]));
        if r == 0 {
            continue;
        }
        let m = data.m()[r - 1];
        let mixed = mean_of(n, |i| row[i] * (spec_m1[i] - lambda_reg * inv_p[i]));
        let raw = mean_of(n, |i| row[i] * spec_m1[i]);
        let eps = lambda_reg * scale * mean_of(n, |i| row[i] * inv_p[i]);
        report.cepstral.push(m - scale * mixed);
        report.raw_cepstral_mismatch.push(m - scale * raw);
        report.predicted_error.push(eps);
    }
    Ok(report)
}
