use std::path::PathBuf;

use nalgebra::DVector;

use crate::error::{invalid, Result};
use crate::linalg::SymmetricOperator;
use crate::problems::{build_heat1d, heat1d_initial, scalar_problem};
use crate::scheme::{step_count, HmParams};

/// Which test problem an experiment runs on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProblemKind {
    /// `y' = -lambda y`, `y(0) = 1`.
    #[default]
    Scalar,
    /// Method-of-lines heat equation with `nx` interior nodes.
    Heat1d,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub problem: ProblemKind,
    pub lambda: f64,
    pub eps: f64,
    pub tau: f64,
    pub t_final: f64,
    pub nx: usize,
    /// Number of powers / steps; defaults to `floor(T/tau + 1/2)` per step size.
    pub n_max: Option<usize>,
    /// Defaults to 0.
    pub mu_min: Option<f64>,
    /// Defaults to the stability limit `4 eps / tau`.
    pub mu_max: Option<f64>,
    pub mu_points: usize,
    /// Number of times `tau` is halved in step-size studies.
    pub halvings: usize,
    pub out: Option<PathBuf>,
    pub emit_svg: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            problem: ProblemKind::Scalar,
            lambda: 1e3,
            eps: 2e-4,
            tau: 3e-5,
            t_final: 3e-3,
            nx: 100,
            n_max: None,
            mu_min: None,
            mu_max: None,
            mu_points: 200,
            halvings: 3,
            out: None,
            emit_svg: false,
        }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be positive and finite, got {v}")))
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        positive("lambda", self.lambda)?;
        positive("eps", self.eps)?;
        positive("tau", self.tau)?;
        positive("T", self.t_final)?;
        if self.t_final < 2.0 * self.tau {
            return Err(invalid(format!(
                "T = {} must be at least 2 tau = {}",
                self.t_final,
                2.0 * self.tau
            )));
        }
        if self.nx < 2 {
            return Err(invalid(format!("nx must be at least 2, got {}", self.nx)));
        }
        if self.n_max == Some(0) {
            return Err(invalid("nmax must be at least 1"));
        }
        if self.mu_points < 2 {
            return Err(invalid("mu-points must be at least 2"));
        }
        let (lo, hi) = self.mu_range();
        if !(lo >= 0.0 && hi > lo && hi.is_finite()) {
            return Err(invalid(format!("invalid mu range [{lo}, {hi}]")));
        }
        if self.emit_svg && self.out.is_none() {
            return Err(invalid("--svg needs --out"));
        }
        step_count(self.t_final, self.tau / 2f64.powi(self.halvings as i32))?;
        Ok(())
    }

    pub fn params(&self) -> Result<HmParams> {
        HmParams::new(self.tau, self.eps)
    }

    pub fn eps_tilde(&self) -> f64 {
        self.eps / self.tau
    }

    pub fn mu_range(&self) -> (f64, f64) {
        (
            self.mu_min.unwrap_or(0.0),
            self.mu_max.unwrap_or(4.0 * self.eps_tilde()),
        )
    }

    /// `mu_points` equispaced values over the mu range.
    pub fn mu_grid(&self) -> Vec<f64> {
        let (lo, hi) = self.mu_range();
        let step = (hi - lo) / (self.mu_points - 1) as f64;
        (0..self.mu_points).map(|i| lo + step * i as f64).collect()
    }

    /// `tau, tau/2, ..., tau/2^halvings`.
    pub fn tau_sequence(&self) -> Vec<f64> {
        (0..=self.halvings)
            .map(|k| self.tau / 2f64.powi(k as i32))
            .collect()
    }

    /// Steps (or powers) to run at step size `tau`.
    pub fn steps_for(&self, tau: f64) -> Result<usize> {
        match self.n_max {
            Some(n) => Ok(n),
            None => Ok(step_count(self.t_final, tau)? as usize),
        }
    }

    /// The operator and initial vector of the selected problem.
    pub fn problem_setup(&self) -> Result<(SymmetricOperator, DVector<f64>)> {
        match self.problem {
            ProblemKind::Scalar => Ok((scalar_problem(self.lambda)?, DVector::from_element(1, 1.0))),
            ProblemKind::Heat1d => {
                let heat = build_heat1d(self.nx)?;
                let y0 = heat1d_initial(&heat);
                Ok((heat.operator, y0))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        let cfg = ExperimentConfig::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.tau_sequence(), vec![3e-5, 1.5e-5, 7.5e-6, 3.75e-6]);
        assert_eq!(cfg.steps_for(3e-5).unwrap(), 100);
        let grid = cfg.mu_grid();
        assert_eq!(grid.len(), 200);
        assert_eq!(grid[0], 0.0);
        assert!((grid[199] - 80.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_values() {
        let bad = [
            ExperimentConfig { eps: 0.0, ..Default::default() },
            ExperimentConfig { tau: -1.0, ..Default::default() },
            ExperimentConfig { t_final: 4e-5, ..Default::default() },
            ExperimentConfig { nx: 1, ..Default::default() },
            ExperimentConfig { mu_points: 1, ..Default::default() },
            ExperimentConfig { mu_min: Some(5.0), mu_max: Some(1.0), ..Default::default() },
            ExperimentConfig { n_max: Some(0), ..Default::default() },
            ExperimentConfig { emit_svg: true, ..Default::default() },
        ];
        for cfg in bad {
            assert!(cfg.validate().is_err(), "{cfg:?}");
        }
    }
}
