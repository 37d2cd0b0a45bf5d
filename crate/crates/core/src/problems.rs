//! Test problems: the scalar decay equation and the method-of-lines 1D heat
//! equation on `(-pi, pi)` with homogeneous Dirichlet conditions.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::error::{invalid, Result};
use crate::linalg::SymmetricOperator;

/// Second-order finite-difference heat operator on `nx` interior nodes
/// `x_i = -pi + i h`, `h = 2 pi / (nx + 1)`.
#[derive(Debug, Clone)]
pub struct Heat1dProblem {
    pub nx: usize,
    pub length: f64,
    pub h: f64,
    pub operator: SymmetricOperator,
    pub grid: DVector<f64>,
}

impl Heat1dProblem {
    /// Analytic eigenvalues `(4/h^2) sin^2(k pi / (2 (nx + 1)))`, `k = 1..=nx`.
    pub fn analytic_eigenvalues(&self) -> Vec<f64> {
        let m = (self.nx + 1) as f64;
        (1..=self.nx)
            .map(|k| 4.0 / (self.h * self.h) * (k as f64 * PI / (2.0 * m)).sin().powi(2))
            .collect()
    }
}

pub fn build_heat1d(nx: usize) -> Result<Heat1dProblem> {
    if nx < 2 {
        return Err(invalid(format!("heat problem needs nx >= 2, got {nx}")));
    }
    let length = 2.0 * PI;
    let h = length / (nx + 1) as f64;
    let inv_h2 = 1.0 / (h * h);
    let entries = DMatrix::from_fn(nx, nx, |i, j| match i.abs_diff(j) {
        0 => 2.0 * inv_h2,
        1 => -inv_h2,
        _ => 0.0,
    });
    let grid = DVector::from_fn(nx, |i, _| -PI + (i + 1) as f64 * h);
    Ok(Heat1dProblem {
        nx,
        length,
        h,
        operator: SymmetricOperator::new(entries)?,
        grid,
    })
}

/// `sin(x) + sin(2x) + sin(3x)` on the interior nodes.
pub fn heat1d_initial(problem: &Heat1dProblem) -> DVector<f64> {
    problem
        .grid
        .map(|x| x.sin() + (2.0 * x).sin() + (3.0 * x).sin())
}

/// The 1x1 operator `[lambda]`; with `y0 = 1` the exact solution is `exp(-lambda t)`.
pub fn scalar_problem(lambda: f64) -> Result<SymmetricOperator> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(invalid(format!("lambda must be positive, got {lambda}")));
    }
    SymmetricOperator::scalar(lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn two_node_spectrum() {
        let p = build_heat1d(2).unwrap();
        assert_relative_eq!(p.h, 2.0 * PI / 3.0);
        let ev = p.operator.eigenvalues();
        let inv_h2 = 1.0 / (p.h * p.h);
        assert_relative_eq!(ev[0], inv_h2, max_relative = 1e-14);
        assert_relative_eq!(ev[1], 3.0 * inv_h2, max_relative = 1e-14);
    }

    #[test]
    fn hundred_node_spectrum() {
        let p = build_heat1d(100).unwrap();
        let analytic = p.analytic_eigenvalues();
        for (num, exact) in p.operator.eigenvalues().iter().zip(&analytic) {
            assert_relative_eq!(*num, *exact, max_relative = 1e-8);
        }
        let lmax = p.operator.lambda_max();
        let four_over_h2 = 4.0 / (p.h * p.h);
        assert!(lmax < four_over_h2 && lmax > 3.9 / (p.h * p.h));
        assert_relative_eq!(four_over_h2, 101.0f64.powi(2) / (PI * PI), max_relative = 1e-14);
    }

    #[test]
    fn dirichlet_rows() {
        let p = build_heat1d(10).unwrap();
        let ones = DVector::from_element(10, 1.0);
        let a1 = p.operator.apply(&ones).unwrap();
        assert!(a1[0] > 0.0 && a1[9] > 0.0);
        let h2 = p.h * p.h;
        assert_relative_eq!(a1[0] * h2, 1.0, max_relative = 1e-12);
        assert_relative_eq!(a1[9] * h2, 1.0, max_relative = 1e-12);
        for i in 1..9 {
            assert!((a1[i] * h2).abs() < 1e-12);
        }
    }

    #[test]
    fn initial_vector() {
        // nx odd puts a node at x = 0
        let p = build_heat1d(101).unwrap();
        let y0 = heat1d_initial(&p);
        assert!(y0[50].abs() < 1e-14);
        assert!(p.grid[0] > -PI && p.grid[100] < PI);
        let p = build_heat1d(100).unwrap();
        let n = heat1d_initial(&p).norm();
        assert!(n.is_finite() && n > 0.0);
    }

    #[test]
    fn builders_validate() {
        assert!(build_heat1d(1).is_err());
        assert!(scalar_problem(0.0).is_err());
        assert!(scalar_problem(-2.0).is_err());
        let a = scalar_problem(1000.0).unwrap();
        assert_eq!(a.omega(), a.lambda_max());
        let a = scalar_problem(1.0).unwrap();
        let y = a.expm_apply(1.0, &DVector::from_element(1, 1.0)).unwrap();
        assert_relative_eq!(y[0], (-1.0f64).exp(), max_relative = 1e-15);
    }
}
