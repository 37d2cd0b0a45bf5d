use crate::error::{invalid, Error, Result};
use crate::harness::table::CsvTable;

/// Least-squares slope of `log(error)` against `log(tau)`.
pub fn fit_order(taus: &[f64], errors: &[f64]) -> Result<f64> {
    if taus.len() != errors.len() {
        return Err(Error::DimensionMismatch {
            expected: taus.len(),
            found: errors.len(),
        });
    }
    if taus.len() < 3 {
        return Err(Error::InsufficientData {
            needed: 3,
            got: taus.len(),
        });
    }
    if taus.iter().chain(errors).any(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(invalid("step sizes and errors must be positive and finite"));
    }
    let xs: Vec<f64> = taus.iter().map(|t| t.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(invalid("step sizes must not all be equal"));
    }
    Ok(sxy / sxx)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub tau: f64,
    pub error: f64,
    /// `log2(e(2 tau) / e(tau))` against the previous (coarser) row.
    pub observed_order: Option<f64>,
    pub steps: u64,
    /// Largest residual-to-tolerance ratio over the scheme steps of this run.
    pub max_residual_ratio: f64,
}

/// Errors for a halving sequence of step sizes.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    /// Appends a row, filling `observed_order` from the previous row.
    pub fn push(&mut self, tau: f64, error: f64, steps: u64, max_residual_ratio: f64) {
        let observed_order = self
            .rows
            .last()
            .map(|prev| (prev.error / error).ln() / (prev.tau / tau).ln());
        self.rows.push(ConvergenceRow {
            tau,
            error,
            observed_order,
            steps,
            max_residual_ratio,
        });
    }

    pub fn taus(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.tau).collect()
    }

    pub fn errors(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.error).collect()
    }

    pub fn fitted_order(&self) -> Result<f64> {
        fit_order(&self.taus(), &self.errors())
    }

    /// Observed order between the two finest step sizes.
    pub fn finest_order(&self) -> Option<f64> {
        self.rows.last().and_then(|r| r.observed_order)
    }

    pub fn max_residual_ratio(&self) -> f64 {
        self.rows.iter().map(|r| r.max_residual_ratio).fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> CsvTable {
        let mut t = CsvTable::new(&["tau", "error", "observed_order"]);
        for r in &self.rows {
            t.push(vec![r.tau.into(), r.error.into(), r.observed_order.into()]);
        }
        t
    }
}
