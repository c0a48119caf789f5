//! The `moments`, `solve` and `experiment` workflows.

use std::path::{Path, PathBuf};

use chrono::{SecondsFormat, Utc};
use indexmap::IndexMap;
use log::{info, warn};
use numoment::{
    make_grid, model_spectrum, moments_from_spectrum, newton_solve, run_reconstruction_experiment,
    CascadeFilterModelF64, ExperimentConfigF64, ExperimentResultF64, SolverConfigF64,
};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};
use crate::formats::*;

/// Outcome of a command that ran to completion: `Ok(true)` when every solve converged.
pub type Completed = CliResult<bool>;

fn check_common(nu: u32, grid: usize) -> CliResult<()> {
    if nu < 2 {
        return Err(CliError::validation(
            "nu",
            format!("must be an integer >= 2 (got {nu})"),
        ));
    }
    if grid < 2 {
        return Err(CliError::validation(
            "grid",
            format!("need at least 2 points per axis (got {grid})"),
        ));
    }
    Ok(())
}

pub fn cmd_moments(config_path: &Path, out_path: &Path) -> CliResult<()> {
    let cfg: MomentsConfig = read_json(config_path, "config")?;
    check_common(cfg.nu, cfg.grid)?;
    let support = support_from("lambda_plus", &cfg.lambda_plus)?;
    let d = support.dim();
    let grid = make_grid(d, cfg.grid).map_err(|e| CliError::validation("grid", e))?;
    if let Some(w) = numoment::moments::regularity_warning(cfg.nu, d) {
        warn!("{w}");
    }
    let phi = match (&cfg.model, &cfg.spectrum_file) {
        (Some(spec), None) => {
            let model = spec.build(cfg.nu)?;
            if model.dim() != d {
                return Err(CliError::validation(
                    "model",
                    format!(
                        "filter dimension {} differs from lambda_plus dimension {d}",
                        model.dim()
                    ),
                ));
            }
            model_spectrum(&model, &grid).map_err(|e| CliError::validation("model", e))?
        }
        (None, Some(file)) => {
            let path = config_path.parent().unwrap_or(Path::new(".")).join(file);
            let field = read_json::<GridFieldRecord>(&path, "spectrum_file")?.to_field()?;
            if *field.grid() != grid {
                return Err(CliError::validation(
                    "spectrum_file",
                    format!(
                        "grid is d={}, N={}; config needs d={d}, N={}",
                        field.grid().dim(),
                        field.grid().points_per_axis(),
                        cfg.grid
                    ),
                ));
            }
            field
        }
        _ => {
            return Err(CliError::validation(
                "config",
                "give exactly one of model and spectrum_file",
            ))
        }
    };
    let data =
        moments_from_spectrum(&phi, &support, cfg.nu).map_err(|e| CliError::from_core("moments", e))?;
    let lambda_plus = parse_indices("lambda_plus", &cfg.lambda_plus)?;
    let rec = MomentRecord::from_data(&lambda_plus, &data, Some(cfg.grid));
    write_file(out_path, to_json(&rec).as_bytes())?;
    info!(
        "wrote {} covariances and {} cepstral coefficients to {}",
        data.c().len(),
        data.m().len(),
        out_path.display()
    );
    Ok(())
}

#[derive(Debug, Clone, Default)]
pub struct SolveArgs {
    pub moments: PathBuf,
    pub lambda: f64,
    pub nu: Option<u32>,
    pub grid: Option<usize>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub out: PathBuf,
}

pub fn cmd_solve(args: &SolveArgs) -> Completed {
    if !(args.lambda > 0.0 && args.lambda.is_finite()) {
        return Err(CliError::validation(
            "lambda",
            format!("must be finite and strictly positive (got {})", args.lambda),
        ));
    }
    let rec: MomentRecord = read_json(&args.moments, "moments")?;
    let mut data = rec.to_data()?;
    if let Some(nu) = args.nu {
        check_common(nu, 2)?;
        data = data.with_nu(nu).map_err(|e| CliError::validation("nu", e))?;
    }
    let n = args
        .grid
        .or(rec.grid)
        .ok_or_else(|| CliError::validation("grid", "not recorded in the moments file; pass --grid"))?;
    check_common(data.nu(), n)?;
    let grid = make_grid(data.dim(), n).map_err(|e| CliError::validation("grid", e))?;
    let mut cfg = SolverConfigF64::default();
    if let Some(tol) = args.tol {
        cfg.grad_tol = tol;
    }
    if let Some(it) = args.max_iter {
        cfg.max_iter = it;
    }
    cfg.validate().map_err(|e| CliError::validation("solver", e))?;

    let res = newton_solve(&data, args.lambda, &grid, &cfg, None);
    let out = SolveRecord::from_result(&res, args.lambda, data.nu(), n);
    write_file(&args.out, to_json(&out).as_bytes())?;
    match res {
        Ok(r) if r.converged => {
            info!(
                "converged in {} iterations, |grad| = {:e}",
                r.iterations, r.grad_norm
            );
            Ok(true)
        }
        Ok(r) => {
            warn!(
                "not converged after {} iterations, |grad| = {:e}",
                r.iterations, r.grad_norm
            );
            Ok(false)
        }
        Err(e) if crate::error::is_numerical(&e) => {
            warn!("solve failed: {e}");
            Ok(false)
        }
        Err(e) => Err(CliError::from_core("solve", e)),
    }
}

/// Core configuration plus what the CLI needs to name outputs.
pub struct ResolvedExperiment {
    pub config: ExperimentConfigF64,
    pub file: ExperimentFile,
    pub section_model: String,
}

pub fn resolve_experiment(file: ExperimentFile) -> CliResult<ResolvedExperiment> {
    check_common(file.nu, file.grid)?;
    let lambda_plus = parse_indices("lambda_plus", &file.lambda_plus)?;
    if lambda_plus.is_empty() {
        return Err(CliError::validation("lambda_plus", "must not be empty"));
    }
    if file.lambda_exponents.is_empty() {
        return Err(CliError::validation("lambda_exponents", "must not be empty"));
    }
    if file.lambda_exponents.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::validation(
            "lambda_exponents",
            "must be strictly ascending so that lambda = 10^-e is strictly descending",
        ));
    }
    if file.models.is_empty() {
        return Err(CliError::validation("models", "must not be empty"));
    }
    let models: Vec<CascadeFilterModelF64> = file
        .models
        .iter()
        .map(|m| m.build(file.nu))
        .collect::<CliResult<_>>()?;
    let mut labels: Vec<&str> = models.iter().map(|m| m.label.as_str()).collect();
    labels.sort_unstable();
    if labels.windows(2).any(|w| w[0] == w[1]) {
        return Err(CliError::validation("models", "labels must be distinct"));
    }
    let section_model = match &file.section_model {
        Some(l) if models.iter().any(|m| &m.label == l) => l.clone(),
        Some(l) => {
            return Err(CliError::validation(
                "section_model",
                format!("no model labelled {l:?}"),
            ))
        }
        None => models.last().expect("non-empty").label.clone(),
    };
    let config = ExperimentConfigF64 {
        d: file.d,
        nu: file.nu,
        n: file.grid,
        lambda_exponents: file.lambda_exponents.clone(),
        lambda_plus,
        models: models.clone(),
        solver: file.solver.into(),
        section_axis: file.section_axis,
        section_fixed: file.section_fixed.clone(),
    };
    config.validate().map_err(|e| CliError::from_core("config", e))?;
    let file = ExperimentFile {
        models: models.iter().map(resolved_model).collect(),
        section_fixed: Some(config.fixed_indices()),
        section_model: Some(section_model.clone()),
        ..file
    };
    Ok(ResolvedExperiment {
        config,
        file,
        section_model,
    })
}

pub fn lambda_label(exponent: i32) -> String {
    format!("1e{}", -exponent)
}

fn csv_bytes(header: &[String], rows: &[Vec<String>]) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| CliError::Numerical(format!("csv: {e}"));
    w.write_record(header).map_err(fail)?;
    for r in rows {
        w.write_record(r).map_err(fail)?;
    }
    w.into_inner()
        .map_err(|e| CliError::Numerical(format!("csv: {e}")))
}

pub fn errors_table(res: &ExperimentResultF64) -> CliResult<Vec<u8>> {
    let header: Vec<String> = std::iter::once("lambda".to_string())
        .chain(res.models.iter().map(|m| m.label.clone()))
        .collect();
    let rows: Vec<Vec<String>> = res
        .lambdas
        .iter()
        .enumerate()
        .map(|(i, &l)| {
            std::iter::once(fmt_float(l))
                .chain(res.models.iter().map(|m| match m.cells[i].reconstruction_error {
                    Some(e) if m.cells[i].converged() => fmt_float(e),
                    _ => "failed".to_string(),
                }))
                .collect()
        })
        .collect();
    csv_bytes(&header, &rows)
}

pub fn cross_section_table(res: &ExperimentResultF64, label: &str) -> CliResult<Vec<u8>> {
    let m = res
        .models
        .iter()
        .find(|m| m.label == label)
        .ok_or_else(|| CliError::validation("section_model", format!("no model labelled {label:?}")))?;
    let header: Vec<String> = ["grid_index", "theta", "true"]
        .into_iter()
        .map(String::from)
        .chain(
            m.cells
                .iter()
                .map(|c| format!("lambda_{}", lambda_label(c.exponent))),
        )
        .collect();
    let rows: Vec<Vec<String>> = (0..res.grid.points_per_axis())
        .map(|j| {
            let theta: f64 = res.grid.axis_theta(j);
            [
                j.to_string(),
                fmt_float(theta),
                fmt_float(m.true_cross_section[j]),
            ]
            .into_iter()
            .chain(m.cells.iter().map(|c| match (&c.cross_section, c.converged()) {
                (Some(s), true) => fmt_float(s[j]),
                _ => "failed".to_string(),
            }))
            .collect()
        })
        .collect();
    csv_bytes(&header, &rows)
}

#[derive(Debug, Serialize)]
struct Manifest {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    started_at: String,
    finished_at: String,
    status: &'static str,
    config: ExperimentFile,
    inputs: IndexMap<String, String>,
    outputs: IndexMap<String, String>,
    warnings: Vec<String>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

fn now() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true)
}

pub const MANIFEST: &str = "manifest.json";

pub fn cmd_experiment(config_path: &Path, out_dir: &Path) -> Completed {
    let started_at = now();
    let config_bytes = std::fs::read(config_path)
        .map_err(|e| CliError::validation("config", format!("cannot read {}: {e}", config_path.display())))?;
    let file: ExperimentFile = serde_json::from_slice(&config_bytes)
        .map_err(|e| CliError::validation("config", format!("{}: {e}", config_path.display())))?;
    let resolved = resolve_experiment(file)?;
    std::fs::create_dir_all(out_dir)
        .map_err(|e| CliError::Numerical(format!("cannot create {}: {e}", out_dir.display())))?;

    let res =
        run_reconstruction_experiment(&resolved.config).map_err(|e| CliError::from_core("experiment", e))?;

    let mut outputs: Vec<(String, Vec<u8>)> = vec![
        ("errors.csv".into(), errors_table(&res)?),
        (
            "cross_section.csv".into(),
            cross_section_table(&res, &resolved.section_model)?,
        ),
    ];
    let mut warnings = res.warnings.clone();
    for m in &res.models {
        for c in &m.cells {
            let rec = SolveRecord::from_result(&c.solve, c.lambda, resolved.config.nu, resolved.config.n);
            if rec.status != "converged" {
                let why = rec.error.clone().unwrap_or_else(|| "not converged".into());
                warnings.push(format!(
                    "{} at lambda {}: {why}",
                    m.label,
                    lambda_label(c.exponent)
                ));
            }
            outputs.push((
                format!("solve_{}_{}.json", m.label, lambda_label(c.exponent)),
                to_json(&rec).into_bytes(),
            ));
        }
    }
    let mut digests = IndexMap::new();
    for (name, bytes) in &outputs {
        write_file(&out_dir.join(name), bytes)?;
        digests.insert(name.clone(), sha256_hex(bytes));
    }
    let all_ok = res.all_converged();
    let manifest = Manifest {
        tool: "numoment",
        version: env!("CARGO_PKG_VERSION"),
        command: "experiment",
        started_at,
        finished_at: now(),
        status: if all_ok { "ok" } else { "partial_failure" },
        config: resolved.file,
        inputs: IndexMap::from([(config_path.display().to_string(), sha256_hex(&config_bytes))]),
        outputs: digests,
        warnings,
    };
    write_file(&out_dir.join(MANIFEST), to_json(&manifest).as_bytes())?;
    info!("wrote {} files to {}", outputs.len() + 1, out_dir.display());
    Ok(all_ok)
}
