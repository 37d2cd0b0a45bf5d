//! Drivers for the numerical studies: stability-function sweeps, the
//! approximation error of the hyperbolic model, local/global convergence,
//! amplification-matrix power norms and the heat-equation study.

use nalgebra::DVector;

use crate::analytic::{hm_error_bound, ErrorBoundInputs, HmModalSolution, HmSystemSolution, DENSE_SAMPLES};
use crate::error::{invalid, Result};
use crate::harness::config::{ExperimentConfig, ProblemKind};
use crate::harness::order::ConvergenceTable;
use crate::harness::table::{Cell, CsvTable};
use crate::linalg::SymmetricOperator;
use crate::scheme::{hm_step, integrate, residual_ratio, zero_source, Bootstrap, HmParams, SchemeState};
use crate::stability::{
    block_eigenvalues, build_block, epsilon_policy_bounds, growth_indicator, operator_blocks,
    power_norm_curve, reference_curves, samarskii_check, stability_report, AmplificationBlock,
    EpsilonPolicy, SamarskiiVerdict, StabilityReport, OVERFLOW_GUARD,
};

/// Time samples in the approximation-error study.
pub const HM_ERROR_POINTS: usize = 300;

/// Local or global error measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvergenceMode {
    /// One step from exact levels at `t = 0` and `t = tau`, compared at `2 tau`.
    Local,
    /// Full run to `T` from an exact first step, compared at the final time.
    Global,
}

/// Block entries, eigenvalues and reference stability functions over mu.
pub fn run_sweep_mu(cfg: &ExperimentConfig) -> Result<CsvTable> {
    cfg.validate()?;
    let et = cfg.eps_tilde();
    let mut t = CsvTable::new(&[
        "mu",
        "S11",
        "S12",
        "Re_xi1",
        "Re_xi2",
        "Im_xi1",
        "exp_neg_mu",
        "implicit_euler",
    ]);
    for mu in cfg.mu_grid() {
        let b = build_block(mu, et)?;
        let e = block_eigenvalues(mu, et)?;
        let (exact, implicit) = reference_curves(mu);
        t.push(vec![
            mu.into(),
            b.s11().into(),
            b.s12().into(),
            e.xi1.re.into(),
            e.xi2.re.into(),
            e.xi1.im.into(),
            exact.into(),
            implicit.into(),
        ]);
    }
    Ok(t)
}

/// `|exp(-lambda t) - y_hm(t)|` against its a-priori bound (with `omega = lambda`,
/// `C = 1`) and `eps |y_hm''(t)|`, for the scalar problem.
pub fn run_hm_error(cfg: &ExperimentConfig) -> Result<CsvTable> {
    cfg.validate()?;
    let sol = HmModalSolution::new(cfg.lambda, cfg.eps)?;
    let mut table = CsvTable::new(&["t", "measured_error", "bound", "eps_y2"]);
    let dt = cfg.t_final / (HM_ERROR_POINTS - 1) as f64;
    for i in 0..HM_ERROR_POINTS {
        let t = dt * i as f64;
        let measured = ((-cfg.lambda * t).exp() - sol.eval(t, 0)).abs();
        let inputs = ErrorBoundInputs {
            eps: cfg.eps,
            omega: cfg.lambda,
            c: 1.0,
            max_y2: sol.max_abs_derivative(2, 0.0, t, DENSE_SAMPLES),
        };
        table.push(vec![
            t.into(),
            measured.into(),
            hm_error_bound(&inputs, t).into(),
            (cfg.eps * sol.eval(t, 2).abs()).into(),
        ]);
    }
    Ok(table)
}

fn relative_error(approx: &DVector<f64>, exact: &DVector<f64>) -> f64 {
    (approx - exact).norm() / exact.norm()
}

fn convergence_study(
    a: &SymmetricOperator,
    y0: &DVector<f64>,
    cfg: &ExperimentConfig,
    mode: ConvergenceMode,
) -> Result<ConvergenceTable> {
    if cfg.halvings < 3 {
        return Err(invalid("a convergence study needs at least 3 halvings (4 step sizes)"));
    }
    let exact = HmSystemSolution::new(a, cfg.eps, y0)?;
    let zero = DVector::zeros(a.dim());
    let mut table = ConvergenceTable::default();
    for tau in cfg.tau_sequence() {
        let p = HmParams::new(tau, cfg.eps)?;
        match mode {
            ConvergenceMode::Local => {
                let seed = SchemeState::new(1, tau, exact.eval(0.0, 0)?, exact.eval(tau, 0)?)?;
                let next = hm_step(a, &zero, &seed, &p)?;
                let reference = exact.eval(2.0 * tau, 0)?;
                let ratio = residual_ratio(a, &zero, &seed, &next, &p)?;
                table.push(tau, relative_error(&next.y_curr, &reference), 1, ratio);
            }
            ConvergenceMode::Global => {
                let traj = integrate(a, zero_source(a.dim()), y0, &p, cfg.t_final, Bootstrap::ExactHm)?;
                let ratio = trajectory_residual_ratio(a, &traj, &p)?;
                let last = traj.last().expect("non-empty trajectory");
                let reference = exact.eval(last.t, 0)?;
                table.push(tau, relative_error(&last.y_curr, &reference), last.n - 1, ratio);
            }
        }
    }
    Ok(table)
}

/// Largest residual ratio over consecutive states of a homogeneous run.
pub fn trajectory_residual_ratio(a: &SymmetricOperator, traj: &[SchemeState], p: &HmParams) -> Result<f64> {
    let zero = DVector::zeros(a.dim());
    traj.windows(2)
        .map(|w| residual_ratio(a, &zero, &w[0], &w[1], p))
        .try_fold(0.0_f64, |acc, r| Ok(acc.max(r?)))
}

/// Local or global errors of the scheme against the hyperbolic-model solution
/// for `tau, tau/2, ...`.
pub fn run_convergence(cfg: &ExperimentConfig, mode: ConvergenceMode) -> Result<ConvergenceTable> {
    cfg.validate()?;
    let (a, y0) = cfg.problem_setup()?;
    convergence_study(&a, &y0, cfg, mode)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerCurve {
    pub tau: f64,
    /// `||S^n||` for `n = 1, 2, ...`
    pub norms: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerSummary {
    pub tau: f64,
    pub max_norm: f64,
    pub indicator: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowersResult {
    pub curves: Vec<PowerCurve>,
    pub summary: Vec<PowerSummary>,
}

impl PowersResult {
    pub fn to_csv(&self) -> CsvTable {
        let mut t = CsvTable::new(&["tau", "n", "t", "norm_Sn"]);
        for c in &self.curves {
            for (i, &norm) in c.norms.iter().enumerate() {
                let n = i as u64 + 1;
                let norm_cell = if norm > OVERFLOW_GUARD {
                    Cell::from("overflow")
                } else {
                    norm.into()
                };
                t.push(vec![c.tau.into(), n.into(), (n as f64 * c.tau).into(), norm_cell]);
            }
        }
        t
    }

    pub fn summary_csv(&self) -> CsvTable {
        let mut t = CsvTable::new(&["tau", "max_norm", "indicator"]);
        for s in &self.summary {
            t.push(vec![s.tau.into(), s.max_norm.into(), s.indicator.into()]);
        }
        t
    }
}

fn powers_study(a: &SymmetricOperator, cfg: &ExperimentConfig) -> Result<PowersResult> {
    let mut curves = Vec::new();
    let mut summary = Vec::new();
    for tau in cfg.tau_sequence() {
        let p = HmParams::new(tau, cfg.eps)?;
        let blocks = operator_blocks(a, &p);
        let norms = power_norm_curve(&blocks, cfg.steps_for(tau)?)?;
        let max_norm = norms.iter().copied().fold(0.0, f64::max);
        let indicator = a
            .eigenvalues()
            .iter()
            .filter_map(|&l| growth_indicator(l, &p).ok())
            .fold(0.0, f64::max);
        curves.push(PowerCurve { tau, norms });
        summary.push(PowerSummary {
            tau,
            max_norm,
            indicator,
        });
    }
    Ok(PowersResult { curves, summary })
}

/// `||S^n||` over `n <= T/tau` for each step size, with the growth indicator.
pub fn run_powers(cfg: &ExperimentConfig) -> Result<PowersResult> {
    cfg.validate()?;
    let (a, _) = cfg.problem_setup()?;
    powers_study(&a, cfg)
}

/// `||S_j^p||` over a mu grid and `p = 1..=n_max` at fixed `eps_tilde`.
/// A row whose norm exceeds the overflow guard is written as `overflow` and
/// ends that mu's curve.
pub fn run_block_powers(cfg: &ExperimentConfig) -> Result<CsvTable> {
    cfg.validate()?;
    let p_max = cfg.steps_for(cfg.tau)?;
    let mut t = CsvTable::new(&["mu", "p", "norm_Sjp"]);
    for mu in cfg.mu_grid() {
        let block = AmplificationBlock::new(mu, cfg.eps_tilde())?;
        let curve = power_norm_curve(&[block], p_max)?;
        for (i, &norm) in curve.iter().enumerate() {
            let cell = if norm > OVERFLOW_GUARD {
                Cell::from("overflow")
            } else {
                norm.into()
            };
            t.push(vec![mu.into(), (i as u64 + 1).into(), cell]);
        }
    }
    Ok(t)
}

#[derive(Debug, Clone)]
pub struct Heat1dResult {
    pub lambda_max: f64,
    pub samarskii: SamarskiiVerdict,
    pub initial: DVector<f64>,
    pub powers: PowersResult,
    pub convergence: ConvergenceTable,
}

/// Power norms and global convergence for the method-of-lines heat equation.
pub fn run_heat1d(cfg: &ExperimentConfig) -> Result<Heat1dResult> {
    let cfg = ExperimentConfig {
        problem: ProblemKind::Heat1d,
        ..cfg.clone()
    };
    cfg.validate()?;
    let (a, y0) = cfg.problem_setup()?;
    let samarskii = samarskii_check(&cfg.params()?, a.lambda_max())?;
    let powers = powers_study(&a, &cfg)?;
    let convergence = convergence_study(&a, &y0, &cfg, ConvergenceMode::Global)?;
    Ok(Heat1dResult {
        lambda_max: a.lambda_max(),
        samarskii,
        initial: y0,
        powers,
        convergence,
    })
}

/// Per-mode eigenvalue data for the selected problem.
pub fn run_stability_report(cfg: &ExperimentConfig) -> Result<(StabilityReport, CsvTable)> {
    cfg.validate()?;
    let (a, _) = cfg.problem_setup()?;
    let p = cfg.params()?;
    let report = stability_report(&a, &p, cfg.steps_for(cfg.tau)?)?;
    let mut t = CsvTable::new(&[
        "lambda",
        "mu",
        "xi1_re",
        "xi1_im",
        "xi2_re",
        "xi2_im",
        "inverse_separation",
        "indicator",
    ]);
    for m in &report.per_mode {
        t.push(vec![
            m.lambda.into(),
            m.mu.into(),
            m.xi1.re.into(),
            m.xi1.im.into(),
            m.xi2.re.into(),
            m.xi2.im.into(),
            m.inverse_separation.into(),
            m.indicator.into(),
        ]);
    }
    Ok((report, t))
}

/// Largest stable step under the three `eps` policies, for the selected
/// problem's `lambda_max` and the heat grid spacing (`K = 1`).
pub fn run_policy_bounds(cfg: &ExperimentConfig) -> Result<CsvTable> {
    cfg.validate()?;
    let (a, _) = cfg.problem_setup()?;
    let h = 2.0 * std::f64::consts::PI / (cfg.nx + 1) as f64;
    let policies = [
        ("const_eps", EpsilonPolicy::ConstEps { eps: cfg.eps }),
        ("linear_in_tau", EpsilonPolicy::LinearInTau { c_tilde: cfg.eps_tilde() }),
        ("linear_in_h", EpsilonPolicy::LinearInH { k: 1.0, h }),
    ];
    let mut t = CsvTable::new(&["policy", "max_tau", "note"]);
    for (name, policy) in policies {
        let b = epsilon_policy_bounds(policy, a.lambda_max())?;
        t.push(vec![name.into(), b.max_tau.into(), b.note.into()]);
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn sweep_first_row_matches_block() {
        let cfg = ExperimentConfig::default();
        let t = run_sweep_mu(&cfg).unwrap();
        let b = build_block(0.0, cfg.eps_tilde()).unwrap();
        assert_eq!(t.rows[0][1].as_f64().unwrap(), b.s11());
        assert_eq!(t.rows[0][2].as_f64().unwrap(), b.s12());
        assert_eq!(t.rows[0][6].as_f64().unwrap(), 1.0);
        assert_eq!(t.rows[0][7].as_f64().unwrap(), 1.0);
    }

    #[test]
    fn sweep_shows_large_s11_with_small_eigenvalues() {
        let cfg = ExperimentConfig::default();
        let t = run_sweep_mu(&cfg).unwrap();
        let s11 = t.column("S11");
        let mu = t.column("mu");
        let re1 = t.column("Re_xi1");
        let re2 = t.column("Re_xi2");
        let im1 = t.column("Im_xi1");
        assert!(s11.iter().any(|&v| v < -1.0));
        for i in 1..mu.len() - 1 {
            let radius = (re1[i] * re1[i] + im1[i] * im1[i]).sqrt().max(re2[i].abs());
            assert!(radius < 1.0, "mu = {}", mu[i]);
        }
    }

    #[test]
    fn hm_error_rows() {
        let cfg = ExperimentConfig::default();
        let t = run_hm_error(&cfg).unwrap();
        assert_eq!(t.rows.len(), HM_ERROR_POINTS);
        assert_eq!(t.rows[0][1].as_f64().unwrap(), 0.0);
        assert_eq!(t.rows[0][2].as_f64().unwrap(), 0.0);
        assert!(t.rows[0][3].as_f64().unwrap().abs() < 1e-9);
        let measured = t.column("measured_error");
        let bound = t.column("bound");
        for (m, b) in measured.iter().zip(&bound) {
            assert!(m <= b);
        }
    }

    #[test]
    fn local_convergence_small_run() {
        let cfg = ExperimentConfig::default();
        let table = run_convergence(&cfg, ConvergenceMode::Local).unwrap();
        assert_eq!(table.rows.len(), 4);
        assert!(table.rows.iter().all(|r| r.steps == 1));
        let order = table.fitted_order().unwrap();
        assert!(order > 3.5, "{order}");
    }

    #[test]
    fn convergence_needs_four_taus() {
        let cfg = ExperimentConfig { halvings: 2, ..Default::default() };
        assert!(run_convergence(&cfg, ConvergenceMode::Local).is_err());
    }

    #[test]
    fn powers_first_norm_matches_block() {
        let cfg = ExperimentConfig { halvings: 1, ..Default::default() };
        let res = run_powers(&cfg).unwrap();
        let b = build_block(cfg.tau * cfg.lambda, cfg.eps_tilde()).unwrap();
        assert_relative_eq!(
            res.curves[0].norms[0],
            crate::linalg::two_norm_2x2(b.matrix()),
            max_relative = 1e-15
        );
        assert_eq!(res.curves[0].norms.len(), 100);
        assert_eq!(res.curves[1].norms.len(), 200);
        let csv = res.to_csv();
        assert_eq!(csv.rows.len(), 300);
        assert_eq!(res.summary_csv().rows.len(), 2);
    }

    #[test]
    fn block_powers_flags_overflow() {
        let cfg = ExperimentConfig {
            mu_min: Some(0.5),
            mu_max: Some(200.0),
            mu_points: 3,
            n_max: Some(500),
            ..Default::default()
        };
        let t = run_block_powers(&cfg).unwrap();
        let flagged: Vec<_> = t.rows.iter().filter(|r| r[2] == Cell::from("overflow")).collect();
        assert!(!flagged.is_empty());
        // stable mu = 0.5 has all 500 powers
        assert_eq!(t.rows.iter().filter(|r| r[0].as_f64() == Some(0.5)).count(), 500);
    }

    #[test]
    fn policy_table() {
        let t = run_policy_bounds(&ExperimentConfig::default()).unwrap();
        assert_eq!(t.rows.len(), 3);
        assert_relative_eq!(t.rows[0][1].as_f64().unwrap(), 8e-7f64.sqrt(), max_relative = 1e-15);
    }

    #[test]
    fn stability_report_table() {
        let cfg = ExperimentConfig { problem: ProblemKind::Heat1d, nx: 10, ..Default::default() };
        let (report, table) = run_stability_report(&cfg).unwrap();
        assert!(report.stable);
        assert_eq!(table.rows.len(), 10);
    }
}
