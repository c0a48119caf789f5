//! Regularized dual functional and its damped Newton minimizer.
//!
//! The dual variables are packed as `[q over the half set, p over the half set
//! minus zero]` (see [`pack_variables`]). With `β_0 = 1` and
//! `β_k = 2 cos⟨k,θ⟩`, the objective on the grid is
//!
//! ```text
//! J(p, q) = 1/(ν−1) mean(P^ν/Q^{ν−1} + λ/P^ν) + Σ mult_k q_k c_k − Σ 2 p_k m_k
//! ```
//!
//! which is strictly convex where `P > 0` and `Q > 0`.

use log::warn;

use crate::error::{Error, Result};
use crate::grid::{BasisTable, Grid, GridField};
use crate::index::{HalfIndexSet, IndexSet};
use crate::linalg::{condition_estimate, solve_spd, Matrix};
use crate::moments::{check_nu, matching_residuals, regularity_warning, MomentData, ResidualReport};
use crate::scalar::{powu, tree_reduce, Scalar};
use crate::trigpoly::{eval_trig_poly, pack_variables, unpack_variables, TrigPoly};

/// Values of `P` or `Q` in `[−slack, 0]` count as boundary zeros rather than domain errors.
pub const DOMAIN_SLACK: f64 = 1e-12;

/// A pair `(P, Q)` with `p_0 = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualPoint<T> {
    p: TrigPoly<T>,
    q: TrigPoly<T>,
}

impl<T: Scalar> DualPoint<T> {
    pub fn new(p: TrigPoly<T>, q: TrigPoly<T>) -> Result<Self> {
        // validates p_0 = 1 and matching supports
        pack_variables(&p, &q)?;
        Ok(Self { p, q })
    }

    pub fn from_packed(x: &[T], support: &IndexSet) -> Result<Self> {
        let (p, q) = unpack_variables(x, support)?;
        Ok(Self { p, q })
    }

    /// `P ≡ 1`, `Q ≡ c_0^{−1/ν}`.
    pub fn cold_start(data: &MomentData<T>) -> Self {
        let nu = T::lit(data.nu() as f64);
        let q0 = data.c()[0].powf(-T::one() / nu);
        Self {
            p: TrigPoly::constant(data.support().clone(), T::one()),
            q: TrigPoly::constant(data.support().clone(), q0),
        }
    }

    pub fn p(&self) -> &TrigPoly<T> {
        &self.p
    }

    pub fn q(&self) -> &TrigPoly<T> {
        &self.q
    }

    pub fn support(&self) -> &IndexSet {
        self.p.support()
    }

    pub fn pack(&self) -> Vec<T> {
        pack_variables(&self.p, &self.q).expect("DualPoint invariant: p_0 = 1")
    }

    /// `min P > margin` and `min Q > margin` on the grid.
    pub fn is_interior(&self, grid: &Grid, margin: T) -> Result<bool> {
        let pv = eval_trig_poly(&self.p, grid)?;
        let qv = eval_trig_poly(&self.q, grid)?;
        Ok(pv.min().1 > margin && qv.min().1 > margin)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig<T> {
    pub grad_tol: T,
    pub max_iter: usize,
    pub armijo_c: T,
    pub backtrack_factor: T,
    pub min_step: T,
    pub positivity_margin: T,
}

impl<T: Scalar> Default for SolverConfig<T> {
    fn default() -> Self {
        Self {
            grad_tol: T::lit(1e-10),
            max_iter: 200,
            armijo_c: T::lit(1e-4),
            backtrack_factor: T::lit(0.5),
            min_step: T::lit(1e-16),
            positivity_margin: T::zero(),
        }
    }
}

impl<T: Scalar> SolverConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidInput(format!("solver config: {what}")));
        if !(self.grad_tol > T::zero()) {
            return bad("grad_tol must be positive");
        }
        if self.max_iter == 0 {
            return bad("max_iter must be positive");
        }
        if !(self.armijo_c > T::zero() && self.armijo_c < T::one()) {
            return bad("armijo_c must lie in (0, 1)");
        }
        if !(self.backtrack_factor > T::zero() && self.backtrack_factor < T::one()) {
            return bad("backtrack_factor must lie in (0, 1)");
        }
        if !(self.min_step > T::zero()) {
            return bad("min_step must be positive");
        }
        if !(self.positivity_margin >= T::zero()) {
            return bad("positivity_margin must be non-negative");
        }
        Ok(())
    }
}

/// How a Newton step was accepted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepRule {
    /// Sufficient decrease of the objective.
    Armijo,
    /// Predicted decrease below the objective's rounding level; accepted because
    /// the gradient norm dropped.
    GradientDecrease,
    /// Final iterate, no step taken.
    None,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord<T> {
    pub iteration: usize,
    pub objective: T,
    pub grad_norm: T,
    pub step: T,
    pub rule: StepRule,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult<T> {
    pub point: DualPoint<T>,
    pub lambda: T,
    pub objective: T,
    pub grad_norm: T,
    pub iterations: usize,
    pub converged: bool,
    pub residuals: ResidualReport<T>,
    /// `λ_max/λ_min` of the Hessian at the returned point.
    pub condition_estimate: T,
    pub trace: Vec<IterationRecord<T>>,
    pub warnings: Vec<String>,
}

/// The discretized regularized dual problem for fixed data, grid and `λ`.
#[derive(Debug, Clone)]
pub struct DualProblem<T> {
    data: MomentData<T>,
    basis: BasisTable<T>,
    lambda: T,
}

/// Per-point values of `P` and `Q`.
struct Fields<T> {
    p: Vec<T>,
    q: Vec<T>,
}

impl<T: Scalar> DualProblem<T> {
    pub fn new(data: MomentData<T>, grid: &Grid, lambda_reg: T) -> Result<Self> {
        check_nu(data.nu())?;
        if !(lambda_reg >= T::zero()) || !lambda_reg.is_finite() {
            return Err(Error::InvalidInput(format!(
                "regularization parameter must be finite and non-negative, got {lambda_reg}"
            )));
        }
        let basis = BasisTable::new(grid, data.half())?;
        Ok(Self {
            data,
            basis,
            lambda: lambda_reg,
        })
    }

    /// Same data and grid, different `λ`.
    pub fn with_lambda(&self, lambda_reg: T) -> Result<Self> {
        if !(lambda_reg >= T::zero()) || !lambda_reg.is_finite() {
            return Err(Error::InvalidInput(format!(
                "regularization parameter must be finite and non-negative, got {lambda_reg}"
            )));
        }
        Ok(Self {
            data: self.data.clone(),
            basis: self.basis.clone(),
            lambda: lambda_reg,
        })
    }

    pub fn data(&self) -> &MomentData<T> {
        &self.data
    }

    pub fn grid(&self) -> &Grid {
        self.basis.grid()
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    fn half(&self) -> &HalfIndexSet {
        self.data.half()
    }

    /// Number of packed coordinates, `|Λ|`.
    pub fn num_vars(&self) -> usize {
        2 * self.half().len() - 1
    }

    fn nu_t(&self) -> T {
        T::lit(self.data.nu() as f64)
    }

    fn check_point(&self, x: &[T]) -> Result<()> {
        if x.len() != self.num_vars() {
            return Err(Error::InvalidInput(format!(
                "packed point has {} coordinates, problem has {}",
                x.len(),
                self.num_vars()
            )));
        }
        Ok(())
    }

    fn fields(&self, x: &[T]) -> Fields<T> {
        let h = self.half().len();
        let mut pc = Vec::with_capacity(h);
        pc.push(T::one());
        pc.extend_from_slice(&x[h..]);
        Fields {
            p: self.basis.eval(&pc),
            q: self.basis.eval(&x[..h]),
        }
    }

    fn check_domain(&self, f: &Fields<T>) -> Result<()> {
        let slack = -T::lit(DOMAIN_SLACK);
        for (which, v) in [("P", &f.p), ("Q", &f.q)] {
            if let Some((i, &val)) = v.iter().enumerate().find(|(_, &val)| val < slack || val.is_nan()) {
                return Err(Error::Domain {
                    which,
                    index: i,
                    value: val.to_f64_lossy(),
                });
            }
        }
        Ok(())
    }

    fn check_interior(&self, f: &Fields<T>) -> Result<()> {
        for (which, v) in [("P", &f.p), ("Q", &f.q)] {
            if let Some((i, &val)) = v.iter().enumerate().find(|(_, &val)| !(val > T::zero())) {
                return Err(Error::Boundary {
                    which,
                    index: i,
                    value: val.to_f64_lossy(),
                });
            }
        }
        Ok(())
    }

    fn interior_with_margin(f: &Fields<T>, margin: T) -> bool {
        f.p.iter().chain(&f.q).all(|&v| v > margin)
    }

    /// `⟨q, c⟩` and `⟨p, m⟩` over the full symmetric index sets.
    fn linear_terms(&self, x: &[T]) -> (T, T) {
        let h = self.half().len();
        let two = T::one() + T::one();
        let c = self.data.c();
        let m = self.data.m();
        let mut qc = x[0] * c[0];
        for r in 1..h {
            qc += two * x[r] * c[r];
        }
        let mut pm = T::zero();
        for r in 1..h {
            pm += two * x[h + r - 1] * m[r - 1];
        }
        (qc, pm)
    }

    fn objective_parts(&self, x: &[T], f: &Fields<T>) -> (T, T, T) {
        let nu = self.data.nu();
        let lambda = self.lambda;
        let n = f.p.len();
        let sum = tree_reduce(
            n,
            &|r: std::ops::Range<usize>| {
                let mut s = T::zero();
                for i in r {
                    s += pointwise_g_ext(f.p[i], f.q[i], lambda, nu);
                }
                s
            },
            &|a, b| a + b,
        );
        let integral = sum / T::from_usize_lossy(n) / (self.nu_t() - T::one());
        let (qc, pm) = self.linear_terms(x);
        (integral, qc, pm)
    }

    /// `J_{ν,λ}` at packed `x`; `+∞` if `P` or `Q` vanishes where the integrand diverges.
    pub fn objective_packed(&self, x: &[T]) -> Result<T> {
        self.check_point(x)?;
        let f = self.fields(x);
        self.check_domain(&f)?;
        let (integral, qc, pm) = self.objective_parts(x, &f);
        if integral.is_infinite() {
            return Ok(T::infinity());
        }
        Ok(integral + qc - pm)
    }

    pub fn objective(&self, pt: &DualPoint<T>) -> Result<T> {
        self.objective_packed(&pt.pack())
    }

    fn gradient_from_fields(&self, f: &Fields<T>) -> Vec<T> {
        let h = self.half().len();
        let nv = self.num_vars();
        let nu = self.data.nu();
        let nu_t = self.nu_t();
        let lambda = self.lambda;
        let basis = &self.basis;
        let n = f.p.len();
        // accumulates mean(β_r Φ) for the q block and mean(β_r [(P/Q)^{ν−1} − λ/P^{ν+1}]) for p
        let sums = tree_reduce(
            n,
            &|range: std::ops::Range<usize>| {
                let mut acc = vec![T::zero(); nv];
                for i in range {
                    let ratio = f.p[i] / f.q[i];
                    let spec_m1 = powu(ratio, nu - 1);
                    let spec = spec_m1 * ratio;
                    let cep = spec_m1 - lambda / powu(f.p[i], nu + 1);
                    for r in 0..h {
                        let b = basis.beta(r, i);
                        acc[r] += b * spec;
                        if r > 0 {
                            acc[h + r - 1] += b * cep;
                        }
                    }
                }
                acc
            },
            &|mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
        let nf = T::from_usize_lossy(n);
        let two = T::one() + T::one();
        let c = self.data.c();
        let m = self.data.m();
        let scale = nu_t / (nu_t - T::one());
        let mut g = vec![T::zero(); nv];
        for r in 0..h {
            let mult = if r == 0 { T::one() } else { two };
            g[r] = mult * c[r] - sums[r] / nf;
            if r > 0 {
                g[h + r - 1] = -two * m[r - 1] + scale * sums[h + r - 1] / nf;
            }
        }
        g
    }

    pub fn gradient_packed(&self, x: &[T]) -> Result<Vec<T>> {
        self.check_point(x)?;
        let f = self.fields(x);
        self.check_domain(&f)?;
        self.check_interior(&f)?;
        Ok(self.gradient_from_fields(&f))
    }

    pub fn gradient(&self, pt: &DualPoint<T>) -> Result<Vec<T>> {
        self.gradient_packed(&pt.pack())
    }

    fn hessian_from_fields(&self, f: &Fields<T>) -> Matrix<T> {
        let h = self.half().len();
        let nv = self.num_vars();
        let nu = self.data.nu();
        let nu_t = self.nu_t();
        let lambda = self.lambda;
        let basis = &self.basis;
        let n = f.p.len();
        let barrier = lambda * nu_t * (nu_t + T::one()) / (nu_t - T::one());
        let packed = nv * (nv + 1) / 2;
        let sums = tree_reduce(
            n,
            &|range: std::ops::Range<usize>| {
                let mut acc = vec![T::zero(); packed];
                let mut beta = vec![T::zero(); nv];
                for i in range {
                    let (p, q) = (f.p[i], f.q[i]);
                    let ratio = p / q;
                    // ν P^{ν−2}/Q^{ν−1} written as ν (P/Q)^{ν−1} / P to stay finite for ν = 2
                    let r_m1 = powu(ratio, nu - 1);
                    let w_qq = nu_t * r_m1 * ratio / q;
                    let w_pq = -nu_t * r_m1 / q;
                    let w_pp = nu_t * r_m1 / p + barrier / powu(p, nu + 2);
                    for r in 0..h {
                        beta[r] = basis.beta(r, i);
                        if r > 0 {
                            beta[h + r - 1] = basis.beta(r, i);
                        }
                    }
                    let mut idx = 0;
                    for a in 0..nv {
                        let a_is_q = a < h;
                        for b in a..nv {
                            let b_is_q = b < h;
                            let w = match (a_is_q, b_is_q) {
                                (true, true) => w_qq,
                                (false, false) => w_pp,
                                _ => w_pq,
                            };
                            acc[idx] += beta[a] * beta[b] * w;
                            idx += 1;
                        }
                    }
                }
                acc
            },
            &|mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
        let nf = T::from_usize_lossy(n);
        let mut hm = Matrix::zeros(nv);
        let mut idx = 0;
        for a in 0..nv {
            for b in a..nv {
                let v = sums[idx] / nf;
                hm.set(a, b, v);
                hm.set(b, a, v);
                idx += 1;
            }
        }
        hm
    }

    pub fn hessian_packed(&self, x: &[T]) -> Result<Matrix<T>> {
        self.check_point(x)?;
        let f = self.fields(x);
        self.check_domain(&f)?;
        self.check_interior(&f)?;
        Ok(self.hessian_from_fields(&f))
    }

    pub fn hessian(&self, pt: &DualPoint<T>) -> Result<Matrix<T>> {
        self.hessian_packed(&pt.pack())
    }

    /// Damped Newton minimization from `warm_start`, or from the cold start.
    pub fn newton_solve(
        &self,
        cfg: &SolverConfig<T>,
        warm_start: Option<&DualPoint<T>>,
    ) -> Result<SolveResult<T>> {
        cfg.validate()?;
        if !(self.lambda > T::zero()) {
            return Err(Error::InvalidInput(format!(
                "regularization parameter must be strictly positive, got {}",
                self.lambda
            )));
        }
        let mut warnings = Vec::new();
        if let Some(w) = regularity_warning(self.data.nu(), self.data.dim()) {
            warn!("{w}");
            warnings.push(w);
        }
        let start = match warm_start {
            Some(pt) => {
                if pt.support() != self.data.support() {
                    return Err(Error::InvalidInput("warm start has a different support".into()));
                }
                pt.clone()
            }
            None => DualPoint::cold_start(&self.data),
        };
        let mut x = start.pack();
        let mut f = self.fields(&x);
        if !Self::interior_with_margin(&f, cfg.positivity_margin) {
            return Err(Error::InvalidInput("starting point is not interior".into()));
        }

        let mut trace = Vec::new();
        let mut obj = self.objective_from_fields(&x, &f);
        let mut grad = self.gradient_from_fields(&f);
        let mut gnorm = norm(&grad);
        let mut converged = false;
        let mut iterations = 0;

        loop {
            if gnorm <= cfg.grad_tol {
                converged = true;
                break;
            }
            if iterations >= cfg.max_iter {
                break;
            }
            let hess = self.hessian_from_fields(&f);
            let neg: Vec<T> = grad.iter().map(|&g| -g).collect();
            let step = solve_spd(&hess, &neg, T::lit(1e-12), 3).ok_or_else(|| Error::Conditioning {
                condition_estimate: condition_estimate(&hess).to_f64_lossy(),
            })?;
            let mut dir = step.x;
            let mut slope = dot(&grad, &dir);
            if !(slope < T::zero()) {
                dir = neg;
                slope = -gnorm * gnorm;
            }

            let noise = T::lit(64.0) * T::epsilon() * obj.1;
            let mut t = T::one();
            let accepted = loop {
                let trial: Vec<T> = x.iter().zip(&dir).map(|(&xi, &di)| xi + t * di).collect();
                let tf = self.fields(&trial);
                if Self::interior_with_margin(&tf, cfg.positivity_margin) {
                    let tobj = self.objective_from_fields(&trial, &tf);
                    if tobj.0.is_finite() {
                        if (t * slope).abs() > noise {
                            if tobj.0 <= obj.0 + cfg.armijo_c * t * slope {
                                break Some((trial, tf, tobj, t, StepRule::Armijo));
                            }
                        } else {
                            let tg = self.gradient_from_fields(&tf);
                            if norm(&tg) < gnorm {
                                break Some((trial, tf, tobj, t, StepRule::GradientDecrease));
                            }
                        }
                    }
                }
                t *= cfg.backtrack_factor;
                if t < cfg.min_step {
                    break None;
                }
            };
            let Some((nx, nf, nobj, t, rule)) = accepted else {
                return Err(Error::LineSearch {
                    iteration: iterations,
                    step: t.to_f64_lossy(),
                });
            };
            trace.push(IterationRecord {
                iteration: iterations,
                objective: obj.0,
                grad_norm: gnorm,
                step: t,
                rule,
            });
            x = nx;
            f = nf;
            obj = nobj;
            grad = self.gradient_from_fields(&f);
            gnorm = norm(&grad);
            iterations += 1;
        }
        trace.push(IterationRecord {
            iteration: iterations,
            objective: obj.0,
            grad_norm: gnorm,
            step: T::zero(),
            rule: StepRule::None,
        });

        let point = DualPoint::from_packed(&x, self.data.support())?;
        let residuals = matching_residuals(&point.p, &point.q, &self.data, self.grid(), self.lambda)?;
        let cond = condition_estimate(&self.hessian_from_fields(&f));
        Ok(SolveResult {
            point,
            lambda: self.lambda,
            objective: obj.0,
            grad_norm: gnorm,
            iterations,
            converged,
            residuals,
            condition_estimate: cond,
            trace,
            warnings,
        })
    }

    /// Objective value and the magnitude scale of its terms (for rounding estimates).
    fn objective_from_fields(&self, x: &[T], f: &Fields<T>) -> (T, T) {
        let (integral, qc, pm) = self.objective_parts(x, f);
        (integral + qc - pm, integral.abs() + qc.abs() + pm.abs())
    }
}

/// `g(x, y) = x^ν / y^{ν−1} + λ / x^ν`, extended by `+∞` where `x ≤ 0` (for `λ > 0`) or `y ≤ 0`.
pub fn pointwise_g_ext<T: Scalar>(x: T, y: T, lambda_reg: T, nu: u32) -> T {
    if y <= T::zero() {
        return T::infinity();
    }
    if x <= T::zero() {
        return if lambda_reg > T::zero() {
            T::infinity()
        } else {
            T::zero()
        };
    }
    powu(x, nu) / powu(y, nu - 1) + lambda_reg / powu(x, nu)
}

/// `∇g(x, y)` for `x, y > 0`.
pub fn pointwise_grad_g<T: Scalar>(x: T, y: T, lambda_reg: T, nu: u32) -> [T; 2] {
    let nu_t = T::lit(nu as f64);
    let base = powu(x, nu - 1) / powu(y, nu);
    [
        base * nu_t * y - lambda_reg * nu_t / powu(x, nu + 1),
        base * (T::one() - nu_t) * x,
    ]
}

/// `∇²g(x, y)` for `x, y > 0` and `ν ≥ 2`.
pub fn pointwise_hessian_g<T: Scalar>(x: T, y: T, lambda_reg: T, nu: u32) -> [[T; 2]; 2] {
    let nu_t = T::lit(nu as f64);
    let s = nu_t * (nu_t - T::one()) * powu(x, nu - 2) / powu(y, nu + 1);
    let bar = lambda_reg * nu_t * (nu_t + T::one()) / powu(x, nu + 2);
    [[s * y * y + bar, -s * x * y], [-s * x * y, s * x * x]]
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

fn norm<T: Scalar>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

/// `J_{ν,λ}(P, Q)` on `grid`.
pub fn objective<T: Scalar>(
    pt: &DualPoint<T>,
    data: &MomentData<T>,
    lambda_reg: T,
    grid: &Grid,
) -> Result<T> {
    DualProblem::new(data.clone(), grid, lambda_reg)?.objective(pt)
}

/// Gradient of `J_{ν,λ}` in packed coordinates.
pub fn gradient<T: Scalar>(
    pt: &DualPoint<T>,
    data: &MomentData<T>,
    lambda_reg: T,
    grid: &Grid,
) -> Result<Vec<T>> {
    DualProblem::new(data.clone(), grid, lambda_reg)?.gradient(pt)
}

/// Hessian of `J_{ν,λ}` in packed coordinates.
pub fn hessian<T: Scalar>(
    pt: &DualPoint<T>,
    data: &MomentData<T>,
    lambda_reg: T,
    grid: &Grid,
) -> Result<Matrix<T>> {
    DualProblem::new(data.clone(), grid, lambda_reg)?.hessian(pt)
}

pub fn newton_solve<T: Scalar>(
    data: &MomentData<T>,
    lambda_reg: T,
    grid: &Grid,
    cfg: &SolverConfig<T>,
    warm_start: Option<&DualPoint<T>>,
) -> Result<SolveResult<T>> {
    DualProblem::new(data.clone(), grid, lambda_reg)?.newton_solve(cfg, warm_start)
}

/// Solves for each `λ` in strictly descending order, warm-starting from the previous solution.
pub fn lambda_continuation<T: Scalar>(
    data: &MomentData<T>,
    lambdas: &[T],
    grid: &Grid,
    cfg: &SolverConfig<T>,
) -> Result<Vec<SolveResult<T>>> {
    check_descending(lambdas)?;
    let Some(&first) = lambdas.first() else {
        return Ok(Vec::new());
    };
    let base = DualProblem::new(data.clone(), grid, first)?;
    let mut out: Vec<SolveResult<T>> = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let problem = base.with_lambda(lambda)?;
        let warm = out.last().map(|r| &r.point);
        let res = problem.newton_solve(cfg, warm).map_err(|e| Error::AtLambda {
            lambda: lambda.to_f64_lossy(),
            source: Box::new(e),
        })?;
        out.push(res);
    }
    Ok(out)
}

/// Rejects non-positive or non-descending `λ` lists.
pub fn check_descending<T: Scalar>(lambdas: &[T]) -> Result<()> {
    if let Some(l) = lambdas.iter().find(|&&l| !(l > T::zero()) || !l.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "regularization parameters must be finite and positive, got {l}"
        )));
    }
    if lambdas.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidInput(
            "regularization parameters must be strictly descending".into(),
        ));
    }
    Ok(())
}

/// `(P/Q)^ν` on the grid.
pub fn reconstruct_spectrum<T: Scalar>(pt: &DualPoint<T>, nu: u32, grid: &Grid) -> Result<GridField<T>> {
    check_nu(nu)?;
    let pv = eval_trig_poly(pt.p(), grid)?;
    let qv = eval_trig_poly(pt.q(), grid)?;
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
    pv.zip_with(&qv, |p, q| powu(p / q, nu))
}

/// `f′(t) = c_0 − mean([P/(Q + t)]^ν)`, the derivative of `t ↦ J(P, Q + t·1)`.
pub fn boundary_derivative_probe<T: Scalar>(
    p: &TrigPoly<T>,
    q0: &TrigPoly<T>,
    ts: &[T],
    data: &MomentData<T>,
    grid: &Grid,
) -> Result<Vec<T>> {
    let nu = data.nu();
    check_nu(nu)?;
    let pv = eval_trig_poly(p, grid)?;
    let qv = eval_trig_poly(q0, grid)?;
    let (i, pmin) = pv.min();
    if !(pmin > T::zero()) {
        return Err(Error::Boundary {
            which: "P",
            index: i,
            value: pmin.to_f64_lossy(),
        });
    }
    let (iq, qmin) = qv.min();
    let c0 = data.c()[0];
    ts.iter()
        .map(|&t| {
            if !(qmin + t > T::zero()) {
                return Err(Error::Boundary {
                    which: "Q + t",
                    index: iq,
                    value: (qmin + t).to_f64_lossy(),
                });
            }
            let n = grid.len();
            let s = crate::grid::mean_of(n, |i| powu(pv.at(i) / (qv.at(i) + t), nu));
            Ok(c0 - s)
        })
        .collect()
}
