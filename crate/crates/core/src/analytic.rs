//! Closed-form solutions of the hyperbolic-model approximation
//! `eps*y'' + y' = -lambda*y`, the a-priori error bound against the parabolic
//! solution, the modeled local error of the scheme and central-difference
//! helpers.

use nalgebra::DVector;

use crate::error::{invalid, Error, Result};
use crate::linalg::{phi, SymmetricOperator};

/// Dense sample count used when a maximum of a closed-form derivative is needed.
pub const DENSE_SAMPLES: usize = 1000;

/// Solution of `eps*y'' + y' + lambda*y = 0` with `y(0) = 1`, `y'(0) = -lambda`.
///
/// `y(t) = c1*exp(rate1*t) + c2*exp(rate2*t)` with
/// `rate_{1,2} = (-1 +- sqrt(D)) / (2 eps)`, `D = 1 - 4 lambda eps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HmModalSolution {
    pub lambda: f64,
    pub eps: f64,
    pub discriminant: f64,
    pub rate1: f64,
    pub rate2: f64,
    pub c1: f64,
    pub c2: f64,
}

impl HmModalSolution {
    pub fn new(lambda: f64, eps: f64) -> Result<Self> {
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(invalid(format!("eps must be positive, got {eps}")));
        }
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(invalid(format!("lambda must be nonnegative, got {lambda}")));
        }
        let discriminant = 1.0 - 4.0 * lambda * eps;
        if !(discriminant > 0.0) {
            return Err(Error::NegativeDiscriminant {
                lambda,
                discriminant,
            });
        }
        let root = discriminant.sqrt();
        // Cancellation-free forms of (-1 + sqrt D)/(2 eps) and
        // c2 = (rate1 + lambda)/(rate1 - rate2).
        let rate1 = -2.0 * lambda / (1.0 + root);
        let rate2 = -(1.0 + root) / (2.0 * eps);
        let c2 = -4.0 * lambda * lambda * eps * eps / (root * (1.0 + root) * (1.0 + root));
        let c1 = 1.0 - c2;
        Ok(Self {
            lambda,
            eps,
            discriminant,
            rate1,
            rate2,
            c1,
            c2,
        })
    }

    /// `k`-th time derivative of the solution at `t`.
    pub fn eval(&self, t: f64, order: u32) -> f64 {
        let k = order as i32;
        self.c1 * self.rate1.powi(k) * (self.rate1 * t).exp()
            + self.c2 * self.rate2.powi(k) * (self.rate2 * t).exp()
    }

    /// `max |y^(order)(s)|` over `s` in `[from, to]`, sampled on a uniform grid
    /// of `samples` points (endpoints included).
    pub fn max_abs_derivative(&self, order: u32, from: f64, to: f64, samples: usize) -> f64 {
        let samples = samples.max(2);
        let step = (to - from) / (samples - 1) as f64;
        (0..samples)
            .map(|i| self.eval(from + step * i as f64, order).abs())
            .fold(0.0, f64::max)
    }
}

/// Evaluates the modal solution or one of its derivatives at `t >= 0`.
pub fn hm_modal_exact(sol: &HmModalSolution, t: f64, derivative_order: u32) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(invalid(format!("t must be nonnegative, got {t}")));
    }
    Ok(sol.eval(t, derivative_order))
}

/// Inputs of the a-priori bound on `|| y(t) - y_hm(t) ||`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorBoundInputs {
    pub eps: f64,
    /// Smallest eigenvalue of the operator.
    pub omega: f64,
    /// Constant in `||exp(-tA)|| <= C exp(-omega t)`; 1 for the spectral norm.
    pub c: f64,
    /// `max ||y_hm''(s)||` over the interval.
    pub max_y2: f64,
}

/// `C * eps * t * phi(-omega t) * max_y2`.
pub fn hm_error_bound(inp: &ErrorBoundInputs, t: f64) -> f64 {
    inp.c * inp.eps * t * phi(-inp.omega * t) * inp.max_y2
}

/// The two modeled local-error terms of one scheme step, driven by bounds `m3`
/// on `|y'''|` and `m4` on `|y''''|` over the two-step stencil.
pub fn local_error_model(tau: f64, eps: f64, m3: f64, m4: f64) -> Result<(f64, f64)> {
    if !(tau > 0.0) || !(eps > 0.0) {
        return Err(invalid(format!("tau and eps must be positive, got tau={tau}, eps={eps}")));
    }
    if !(m3 >= 0.0) || !(m4 >= 0.0) {
        return Err(invalid("derivative bounds must be nonnegative"));
    }
    let scale = 2.0 * tau.powi(4) / (tau + 2.0 * eps);
    Ok((m3 / 6.0 * scale, m4 / 12.0 * scale * eps))
}

/// Central first and second differences from three equispaced samples.
pub fn central_diff_truncation(y_minus: f64, y_mid: f64, y_plus: f64, tau: f64) -> Result<(f64, f64)> {
    if !(tau > 0.0) {
        return Err(invalid(format!("tau must be positive, got {tau}")));
    }
    let first = (y_plus - y_minus) / (2.0 * tau);
    let second = (y_plus - 2.0 * y_mid + y_minus) / (tau * tau);
    Ok((first, second))
}

/// Modal assembly of the hyperbolic-model solution for a full operator.
///
/// Each eigenmode `j` starts from amplitude `a_j = (Q^T y0)_j` with velocity
/// `-lambda_j a_j`.
#[derive(Debug, Clone)]
pub struct HmSystemSolution<'a> {
    operator: &'a SymmetricOperator,
    amplitudes: DVector<f64>,
    modes: Vec<HmModalSolution>,
}

impl<'a> HmSystemSolution<'a> {
    pub fn new(operator: &'a SymmetricOperator, eps: f64, y0: &DVector<f64>) -> Result<Self> {
        let amplitudes = operator.to_modal(y0)?;
        let modes = operator
            .eigenvalues()
            .iter()
            .map(|&lambda| HmModalSolution::new(lambda, eps))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            operator,
            amplitudes,
            modes,
        })
    }

    pub fn modes(&self) -> &[HmModalSolution] {
        &self.modes
    }

    /// `k`-th time derivative of the assembled solution at `t`.
    pub fn eval(&self, t: f64, order: u32) -> Result<DVector<f64>> {
        if !(t >= 0.0) {
            return Err(invalid(format!("t must be nonnegative, got {t}")));
        }
        let modal = DVector::from_iterator(
            self.modes.len(),
            self.modes
                .iter()
                .zip(self.amplitudes.iter())
                .map(|(m, &a)| a * m.eval(t, order)),
        );
        self.operator.from_modal(&modal)
    }
}

/// `y_hm(t)` for the operator `a` and initial vector `y0`.
pub fn hm_system_exact(a: &SymmetricOperator, eps: f64, t: f64, y0: &DVector<f64>) -> Result<DVector<f64>> {
    HmSystemSolution::new(a, eps, y0)?.eval(t, 0)
}
