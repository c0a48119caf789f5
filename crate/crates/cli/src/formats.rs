//! On-disk records for configurations, moments, solutions and gridded fields.
//!
//! Structured files are JSON. Indices are keyed by their canonical
//! representative string, e.g. `"1,-1,0"`.

use std::path::Path;

use indexmap::IndexMap;
use numoment::{
    build_difference_set, half_index_set, unit_generators, CascadeFilterModelF64, GridFieldF64, HalfIndexSet,
    IndexSet, IterationRecord, MomentDataF64, MultiIndex, ResidualReportF64, SolveResultF64, SolverConfigF64,
    StepRule, TrigPolyF64,
};
use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const GRID_ORDERING: &str = "row-major, last axis fastest";

pub fn read_json<T: DeserializeOwned>(path: &Path, what: &str) -> CliResult<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::validation(what, format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::validation(what, format!("{}: {e}", path.display())))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("records serialize");
    s.push('\n');
    s
}

pub fn write_file(path: &Path, contents: &[u8]) -> CliResult<()> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::Numerical(format!("cannot write {}: {e}", path.display())))
}

pub fn parse_indices(field: &str, raw: &[Vec<i64>]) -> CliResult<Vec<MultiIndex>> {
    raw.iter()
        .map(|k| MultiIndex::new(k.clone()).map_err(|e| CliError::validation(field, e)))
        .collect()
}

pub fn index_lists<'a>(it: impl Iterator<Item = &'a MultiIndex>) -> Vec<Vec<i64>> {
    it.map(|k| k.components().to_vec()).collect()
}

/// Generating set `Λ₊` to support `Λ = Λ₊ − Λ₊`.
pub fn support_from(field: &str, lambda_plus: &[Vec<i64>]) -> CliResult<IndexSet> {
    if lambda_plus.is_empty() {
        return Err(CliError::validation(field, "must not be empty"));
    }
    build_difference_set(&parse_indices(field, lambda_plus)?).map_err(|e| CliError::validation(field, e))
}

fn keyed(half: &HalfIndexSet, skip_zero: bool, values: &[f64]) -> IndexMap<String, f64> {
    half.iter()
        .skip(usize::from(skip_zero))
        .map(|k| k.key())
        .zip(values.iter().copied())
        .collect()
}

/// Values of `map` in half-set order; every representative must appear exactly once.
fn unkeyed(
    field: &str,
    half: &HalfIndexSet,
    skip_zero: bool,
    map: &IndexMap<String, f64>,
) -> CliResult<Vec<f64>> {
    let offset = usize::from(skip_zero);
    let mut out = vec![None; half.len() - offset];
    for (key, &v) in map {
        let k = MultiIndex::parse_key(key).map_err(|e| CliError::validation(field, e))?;
        let pos = half
            .position(&k)
            .filter(|&r| r >= offset)
            .ok_or_else(|| CliError::validation(field, format!("lag {key} is not in the support")))?;
        if out[pos - offset].replace(v).is_some() {
            return Err(CliError::validation(
                field,
                format!("lag {key} given twice (as k and -k)"),
            ));
        }
    }
    out.into_iter()
        .enumerate()
        .map(|(r, v)| {
            v.ok_or_else(|| {
                CliError::validation(field, format!("missing lag {}", half.get(r + offset).key()))
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrigPolyRecord {
    pub support: Vec<Vec<i64>>,
    pub coeffs: IndexMap<String, f64>,
}

impl TrigPolyRecord {
    pub fn from_poly(p: &TrigPolyF64) -> Self {
        Self {
            support: index_lists(p.support().iter()),
            coeffs: keyed(p.half(), false, p.coeffs()),
        }
    }

    pub fn to_poly(&self) -> CliResult<TrigPolyF64> {
        let support = IndexSet::new(parse_indices("support", &self.support)?)
            .map_err(|e| CliError::validation("support", e))?;
        let coeffs = unkeyed("coeffs", &half_index_set(&support), false, &self.coeffs)?;
        TrigPolyF64::new(support, coeffs).map_err(|e| CliError::validation("coeffs", e))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentRecord {
    pub lambda_plus: Vec<Vec<i64>>,
    pub nu: u32,
    pub c: IndexMap<String, f64>,
    pub m: IndexMap<String, f64>,
    /// Points per axis of the grid the moments were computed on.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
}

impl MomentRecord {
    pub fn from_data(lambda_plus: &[MultiIndex], data: &MomentDataF64, grid: Option<usize>) -> Self {
        Self {
            lambda_plus: index_lists(lambda_plus.iter()),
            nu: data.nu(),
            c: keyed(data.half(), false, data.c()),
            m: keyed(data.half(), true, data.m()),
            grid,
        }
    }

    pub fn to_data(&self) -> CliResult<MomentDataF64> {
        let support = support_from("lambda_plus", &self.lambda_plus)?;
        let half = half_index_set(&support);
        let c = unkeyed("c", &half, false, &self.c)?;
        let m = unkeyed("m", &half, true, &self.m)?;
        MomentDataF64::new(support, self.nu, c, m).map_err(|e| CliError::validation("moments", e))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridFieldRecord {
    pub d: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub ordering: String,
    pub values: Vec<f64>,
}

impl GridFieldRecord {
    pub fn from_field(f: &GridFieldF64) -> Self {
        Self {
            d: f.grid().dim(),
            n: f.grid().points_per_axis(),
            ordering: GRID_ORDERING.into(),
            values: f.values().to_vec(),
        }
    }

    pub fn to_field(&self) -> CliResult<GridFieldF64> {
        if self.ordering != GRID_ORDERING {
            return Err(CliError::validation(
                "ordering",
                format!("expected \"{GRID_ORDERING}\""),
            ));
        }
        let grid = numoment::make_grid(self.d, self.n).map_err(|e| CliError::validation("N", e))?;
        GridFieldF64::new(grid, self.values.clone()).map_err(|e| CliError::validation("values", e))
    }
}

/// A built-in model name or an explicit filter pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModelSpec {
    Builtin(String),
    Filters {
        label: String,
        a: Vec<f64>,
        b_raw: Vec<f64>,
    },
}

impl ModelSpec {
    pub fn build(&self, nu: u32) -> CliResult<CascadeFilterModelF64> {
        let model = match self {
            ModelSpec::Builtin(name) => match name.as_str() {
                "zeroless" => CascadeFilterModelF64::zeroless(2),
                "spectral_zero" => CascadeFilterModelF64::spectral_zero(2),
                other => {
                    return Err(CliError::validation(
                        "model",
                        format!(
                            "unknown built-in model {other:?} (expected \"zeroless\" or \"spectral_zero\")"
                        ),
                    ))
                }
            },
            ModelSpec::Filters { label, a, b_raw } => {
                return CascadeFilterModelF64::new(label.clone(), nu, a.clone(), b_raw.clone())
                    .map_err(|e| CliError::validation("model", e))
            }
        };
        model.with_nu(nu).map_err(|e| CliError::validation("nu", e))
    }
}

/// Explicit `{label, a, b_raw}` form of a built model; `b_raw` is the normalized numerator.
pub fn resolved_model(model: &CascadeFilterModelF64) -> ModelSpec {
    ModelSpec::Filters {
        label: model.label.clone(),
        a: model.a().to_vec(),
        b_raw: model.b().to_vec(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentsConfig {
    pub grid: usize,
    pub lambda_plus: Vec<Vec<i64>>,
    pub nu: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelSpec>,
    /// Gridded spectrum file, relative to the config file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum_file: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverRecord {
    pub grad_tol: f64,
    pub max_iter: usize,
    pub armijo_c: f64,
    pub backtrack_factor: f64,
    pub min_step: f64,
    pub positivity_margin: f64,
}

impl Default for SolverRecord {
    fn default() -> Self {
        Self::from(SolverConfigF64::default())
    }
}

impl From<SolverConfigF64> for SolverRecord {
    fn from(c: SolverConfigF64) -> Self {
        Self {
            grad_tol: c.grad_tol,
            max_iter: c.max_iter,
            armijo_c: c.armijo_c,
            backtrack_factor: c.backtrack_factor,
            min_step: c.min_step,
            positivity_margin: c.positivity_margin,
        }
    }
}

impl From<SolverRecord> for SolverConfigF64 {
    fn from(r: SolverRecord) -> Self {
        Self {
            grad_tol: r.grad_tol,
            max_iter: r.max_iter,
            armijo_c: r.armijo_c,
            backtrack_factor: r.backtrack_factor,
            min_step: r.min_step,
            positivity_margin: r.positivity_margin,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentFile {
    pub d: usize,
    pub nu: u32,
    pub grid: usize,
    /// `λ = 10^{−e}` for each exponent, ascending.
    pub lambda_exponents: Vec<i32>,
    pub lambda_plus: Vec<Vec<i64>>,
    pub models: Vec<ModelSpec>,
    pub solver: SolverRecord,
    pub section_axis: usize,
    pub section_fixed: Option<Vec<usize>>,
    /// Model whose cross-section is tabulated; defaults to the last one.
    pub section_model: Option<String>,
}

impl Default for ExperimentFile {
    fn default() -> Self {
        Self {
            d: 3,
            nu: 2,
            grid: 20,
            lambda_exponents: vec![0, 2, 4, 6, 8, 10],
            lambda_plus: index_lists(unit_generators(3).iter()),
            models: vec![
                ModelSpec::Builtin("zeroless".into()),
                ModelSpec::Builtin("spectral_zero".into()),
            ],
            solver: SolverRecord::default(),
            section_axis: 0,
            section_fixed: None,
            section_model: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationEntry {
    pub iteration: usize,
    pub objective: f64,
    pub grad_norm: f64,
    pub step: f64,
    pub rule: String,
}

impl From<&IterationRecord<f64>> for IterationEntry {
    fn from(r: &IterationRecord<f64>) -> Self {
        Self {
            iteration: r.iteration,
            objective: r.objective,
            grad_norm: r.grad_norm,
            step: r.step,
            rule: match r.rule {
                StepRule::Armijo => "armijo",
                StepRule::GradientDecrease => "gradient_decrease",
                StepRule::None => "none",
            }
            .into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualRecord {
    pub max_abs_covariance: f64,
    pub max_abs_cepstral: f64,
    pub max_identity_gap: f64,
    pub covariance: IndexMap<String, f64>,
    pub cepstral: IndexMap<String, f64>,
    pub predicted_error: IndexMap<String, f64>,
    pub raw_cepstral_mismatch: IndexMap<String, f64>,
}

impl ResidualRecord {
    fn new(r: &ResidualReportF64, half: &HalfIndexSet) -> Self {
        Self {
            max_abs_covariance: r.max_abs_covariance(),
            max_abs_cepstral: r.max_abs_cepstral(),
            max_identity_gap: r.max_identity_gap(),
            covariance: keyed(half, false, &r.covariance),
            cepstral: keyed(half, true, &r.cepstral),
            predicted_error: keyed(half, true, &r.predicted_error),
            raw_cepstral_mismatch: keyed(half, true, &r.raw_cepstral_mismatch),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveRecord {
    /// `"converged"`, `"not_converged"` or `"failed"`.
    pub status: String,
    pub lambda: f64,
    pub nu: u32,
    pub grid: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solution: Option<SolutionRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionRecord {
    pub iterations: usize,
    pub objective: f64,
    pub grad_norm: f64,
    pub condition_estimate: f64,
    /// Packed-coordinate layout: `q` over `half`, then `p` over `half` without zero.
    pub half: Vec<Vec<i64>>,
    pub packed: Vec<f64>,
    pub p: TrigPolyRecord,
    pub q: TrigPolyRecord,
    pub residuals: ResidualRecord,
    pub trace: Vec<IterationEntry>,
    pub warnings: Vec<String>,
}

impl SolveRecord {
    pub fn from_result(
        res: &Result<SolveResultF64, numoment::Error>,
        lambda: f64,
        nu: u32,
        grid: usize,
    ) -> Self {
        match res {
            Ok(r) => {
                let half = r.point.p().half();
                Self {
                    status: if r.converged { "converged" } else { "not_converged" }.into(),
                    lambda,
                    nu,
                    grid,
                    error: None,
                    solution: Some(SolutionRecord {
                        iterations: r.iterations,
                        objective: r.objective,
                        grad_norm: r.grad_norm,
                        condition_estimate: r.condition_estimate,
                        half: index_lists(half.iter()),
                        packed: r.point.pack(),
                        p: TrigPolyRecord::from_poly(r.point.p()),
                        q: TrigPolyRecord::from_poly(r.point.q()),
                        residuals: ResidualRecord::new(&r.residuals, half),
                        trace: r.trace.iter().map(IterationEntry::from).collect(),
                        warnings: r.warnings.clone(),
                    }),
                }
            }
            Err(e) => Self {
                status: "failed".into(),
                lambda,
                nu,
                grid,
                error: Some(e.to_string()),
                solution: None,
            },
        }
    }
}

/// `{:.16e}`: 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use numoment::{make_grid, model_spectrum, moments_from_spectrum};

    #[test]
    fn moment_record_round_trips() {
        let grid = make_grid(3, 8).unwrap();
        let model = CascadeFilterModelF64::zeroless(2);
        let phi = model_spectrum(&model, &grid).unwrap();
        let data = moments_from_spectrum(&phi, &model.natural_support(), 2).unwrap();
        let rec = MomentRecord::from_data(&unit_generators(3), &data, Some(8));
        let back: MomentRecord = serde_json::from_str(&to_json(&rec)).unwrap();
        assert_eq!(back, rec);
        assert_eq!(back.to_data().unwrap(), data);
        assert_eq!(rec.c.keys().next().unwrap(), "0,0,0");
    }

    #[test]
    fn negated_keys_are_accepted_once() {
        let mut rec = MomentRecord {
            lambda_plus: vec![vec![0], vec![1]],
            nu: 2,
            c: IndexMap::from([("0".to_string(), 1.0), ("-1".to_string(), 0.25)]),
            m: IndexMap::from([("1".to_string(), 0.5)]),
            grid: None,
        };
        let data = rec.to_data().unwrap();
        assert_eq!(data.c(), &[1.0, 0.25]);
        rec.c.insert("1".into(), 0.25);
        assert!(matches!(rec.to_data(), Err(CliError::Validation(_))));
        rec.c.shift_remove("1");
        rec.m.clear();
        let err = rec.to_data().unwrap_err().to_string();
        assert!(err.starts_with("m: missing lag 1"), "{err}");
    }

    #[test]
    fn trig_poly_record_round_trips() {
        let support = build_difference_set(&unit_generators(2)).unwrap();
        let p = numoment::filter_autocorrelation(&[1.0, 0.5, -0.25], &support).unwrap();
        let rec = TrigPolyRecord::from_poly(&p);
        assert_eq!(rec.to_poly().unwrap(), p);
    }

    #[test]
    fn grid_field_record_checks_shape() {
        let grid = make_grid(2, 3).unwrap();
        let f = GridFieldF64::from_fn(grid, |i| i as f64);
        let mut rec = GridFieldRecord::from_field(&f);
        assert_eq!(rec.to_field().unwrap(), f);
        rec.values.pop();
        assert!(rec.to_field().is_err());
    }

    #[test]
    fn floats_keep_seventeen_digits() {
        let x = 0.1f64 + 0.2;
        let s = fmt_float(x);
        assert_eq!(s, "3.0000000000000004e-1");
        assert_eq!(s.parse::<f64>().unwrap(), x);
    }

    #[test]
    fn experiment_file_defaults_match_library() {
        let f: ExperimentFile = serde_json::from_str("{}").unwrap();
        assert_eq!(f, ExperimentFile::default());
        assert!(serde_json::from_str::<ExperimentFile>(r#"{"bogus": 1}"#).is_err());
    }
}
