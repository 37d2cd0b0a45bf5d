//! The explicit three-level hyperbolic-model (HM) stepper
//!
//! ```text
//! (y[n+1] - y[n-1]) / (2 tau) + eps (y[n+1] - 2 y[n] + y[n-1]) / tau^2 = -A y[n] + f[n]
//! ```
//!
//! solved for `y[n+1]`, together with first-step bootstraps, a fixed-step
//! driver, the classic Du Fort-Frankel update and an explicit Euler reference.

use nalgebra::DVector;

use crate::analytic::HmSystemSolution;
use crate::error::{check_dim, invalid, Error, Result};
use crate::linalg::SymmetricOperator;

/// Largest number of steps a driver will attempt.
pub const MAX_STEPS: u64 = 1_000_000_000;

/// Relative tolerance of the defining-equation residual of a step.
pub const RESIDUAL_TOL: f64 = 1e-12;

/// Time step and hyperbolic parameter with the derived ratios
/// `eps_tilde = eps / tau` and `kappa = eps / tau^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HmParams {
    tau: f64,
    eps: f64,
    eps_tilde: f64,
    kappa: f64,
}

impl HmParams {
    pub fn new(tau: f64, eps: f64) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(invalid(format!("tau must be positive and finite, got {tau}")));
        }
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(invalid(format!("eps must be positive and finite, got {eps}")));
        }
        Ok(Self {
            tau,
            eps,
            eps_tilde: eps / tau,
            kappa: eps / (tau * tau),
        })
    }

    /// Parameters in the `eps = kappa * tau^2` parametrisation.
    pub fn from_kappa(tau: f64, kappa: f64) -> Result<Self> {
        Self::new(tau, kappa * tau * tau)
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn eps_tilde(&self) -> f64 {
        self.eps_tilde
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// The same `eps` with a different step.
    pub fn with_tau(&self, tau: f64) -> Result<Self> {
        Self::new(tau, self.eps)
    }
}

/// Two consecutive solution levels `(y[n-1], y[n])` at step `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeState {
    pub n: u64,
    pub t: f64,
    pub y_prev: DVector<f64>,
    pub y_curr: DVector<f64>,
}

impl SchemeState {
    pub fn new(n: u64, tau: f64, y_prev: DVector<f64>, y_curr: DVector<f64>) -> Result<Self> {
        if n < 1 {
            return Err(invalid("a three-level state needs n >= 1"));
        }
        check_dim(y_prev.len(), y_curr.len())?;
        Ok(Self {
            n,
            t: n as f64 * tau,
            y_prev,
            y_curr,
        })
    }

    pub fn dim(&self) -> usize {
        self.y_curr.len()
    }
}

/// Advances the state by one HM step with source sample `f_n = f(n tau)`.
pub fn hm_step(
    a: &SymmetricOperator,
    f_n: &DVector<f64>,
    state: &SchemeState,
    p: &HmParams,
) -> Result<SchemeState> {
    let n = a.dim();
    check_dim(n, state.y_curr.len())?;
    check_dim(n, state.y_prev.len())?;
    check_dim(n, f_n.len())?;

    let et = p.eps_tilde();
    let tau = p.tau();
    let inv = 1.0 / (1.0 + 2.0 * et);
    let ay = a.entries() * &state.y_curr;

    let next = DVector::from_iterator(
        n,
        (0..n).map(|i| {
            (4.0 * et * state.y_curr[i] - 2.0 * tau * ay[i]
                + (1.0 - 2.0 * et) * state.y_prev[i]
                + 2.0 * tau * f_n[i])
                * inv
        }),
    );
    if next.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { step: state.n + 1 });
    }
    let n_next = state.n + 1;
    Ok(SchemeState {
        n: n_next,
        t: n_next as f64 * tau,
        y_prev: state.y_curr.clone(),
        y_curr: next,
    })
}

/// Residual of the defining three-level equation for given levels.
pub fn hm_residual(
    a: &SymmetricOperator,
    f_n: &DVector<f64>,
    y_prev: &DVector<f64>,
    y_curr: &DVector<f64>,
    y_next: &DVector<f64>,
    p: &HmParams,
) -> Result<DVector<f64>> {
    let ay = a.apply(y_curr)?;
    check_dim(ay.len(), f_n.len())?;
    check_dim(ay.len(), y_prev.len())?;
    check_dim(ay.len(), y_next.len())?;
    let tau = p.tau();
    Ok(DVector::from_iterator(
        ay.len(),
        (0..ay.len()).map(|i| {
            (y_next[i] - y_prev[i]) / (2.0 * tau)
                + p.eps() * (y_next[i] - 2.0 * y_curr[i] + y_prev[i]) / (tau * tau)
                + ay[i]
                - f_n[i]
        }),
    ))
}

/// Admissible residual norm `1e-12 * (||A|| ||y[n]|| + ||f[n]|| + 1)`.
pub fn residual_bound(a: &SymmetricOperator, y_curr: &DVector<f64>, f_n: &DVector<f64>) -> f64 {
    RESIDUAL_TOL * (a.norm2() * y_curr.norm() + f_n.norm() + 1.0)
}

/// Residual norm of the step `before -> after`, divided by [`residual_bound`].
/// Values at or below 1 satisfy the step contract.
pub fn residual_ratio(
    a: &SymmetricOperator,
    f_n: &DVector<f64>,
    before: &SchemeState,
    after: &SchemeState,
    p: &HmParams,
) -> Result<f64> {
    let r = hm_residual(a, f_n, &before.y_prev, &before.y_curr, &after.y_curr, p)?;
    Ok(r.norm() / residual_bound(a, &before.y_curr, f_n))
}

/// First-step strategies producing `y[1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Bootstrap {
    /// `y1 = y0 + tau (-A y0 + f0)`.
    #[default]
    ExplicitEuler,
    /// `y1` from the closed-form solution of the hyperbolic-model problem
    /// (homogeneous; the source is ignored).
    ExactHm,
}

/// Produces the state at `n = 1` from `y0`.
pub fn bootstrap(
    a: &SymmetricOperator,
    f0: &DVector<f64>,
    y0: &DVector<f64>,
    p: &HmParams,
    method: Bootstrap,
) -> Result<SchemeState> {
    check_dim(a.dim(), y0.len())?;
    check_dim(a.dim(), f0.len())?;
    let y1 = match method {
        Bootstrap::ExplicitEuler => y0 + (f0 - a.apply(y0)?) * p.tau(),
        Bootstrap::ExactHm => HmSystemSolution::new(a, p.eps(), y0)?.eval(p.tau(), 0)?,
    };
    if y1.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { step: 1 });
    }
    SchemeState::new(1, p.tau(), y0.clone(), y1)
}

/// Number of steps taken to approximately reach `t_final`: `floor(T/tau + 1/2)`.
pub fn step_count(t_final: f64, tau: f64) -> Result<u64> {
    if !(t_final.is_finite() && tau > 0.0) {
        return Err(invalid("final time must be finite and tau positive"));
    }
    let raw = (t_final / tau).floor();
    if raw > MAX_STEPS as f64 {
        return Err(Error::StepCountOverflow {
            steps: raw,
            limit: MAX_STEPS,
        });
    }
    Ok((t_final / tau + 0.5).floor() as u64)
}

/// Runs the HM scheme from `y0` to (approximately) `t_final`.
///
/// Returns states `n = 1 ..= floor(T/tau + 1/2)`; the last state's `t` is the
/// time actually reached.
pub fn integrate<F>(
    a: &SymmetricOperator,
    f: F,
    y0: &DVector<f64>,
    p: &HmParams,
    t_final: f64,
    method: Bootstrap,
) -> Result<Vec<SchemeState>>
where
    F: Fn(f64) -> DVector<f64>,
{
    if !(t_final >= 2.0 * p.tau()) {
        return Err(invalid(format!(
            "final time {t_final} must be at least two steps (2 tau = {})",
            2.0 * p.tau()
        )));
    }
    let steps = step_count(t_final, p.tau())?;
    let mut states = Vec::with_capacity(steps as usize);
    states.push(bootstrap(a, &f(0.0), y0, p, method)?);
    for _ in 1..steps {
        let current = states.last().expect("bootstrap state");
        let f_n = f(current.n as f64 * p.tau());
        let next = hm_step(a, &f_n, current, p)?;
        states.push(next);
    }
    Ok(states)
}

/// A zero source of dimension `n`.
pub fn zero_source(n: usize) -> impl Fn(f64) -> DVector<f64> {
    move |_| DVector::zeros(n)
}

/// Du Fort-Frankel update for `u_t = u_xx` with homogeneous Dirichlet
/// boundary values, on interior nodes:
///
/// `(u[n+1]_i - u[n-1]_i)/(2 tau) = (u[n]_{i+1} - u[n+1]_i - u[n-1]_i + u[n]_{i-1}) / h^2`.
pub fn dufort_frankel_step(
    prev: &DVector<f64>,
    curr: &DVector<f64>,
    tau: f64,
    h: f64,
) -> Result<DVector<f64>> {
    check_dim(curr.len(), prev.len())?;
    if !(tau > 0.0) || !(h > 0.0) {
        return Err(invalid("tau and h must be positive"));
    }
    let r = 2.0 * tau / (h * h);
    let n = curr.len();
    Ok(DVector::from_iterator(
        n,
        (0..n).map(|i| {
            let left = if i > 0 { curr[i - 1] } else { 0.0 };
            let right = if i + 1 < n { curr[i + 1] } else { 0.0 };
            ((1.0 - r) * prev[i] + r * (left + right)) / (1.0 + r)
        }),
    ))
}

/// Explicit Euler from `y0`; returns `y[0] ..= y[N]` with `N = floor(T/tau + 1/2)`.
pub fn explicit_euler_integrate<F>(
    a: &SymmetricOperator,
    f: F,
    y0: &DVector<f64>,
    tau: f64,
    t_final: f64,
) -> Result<Vec<DVector<f64>>>
where
    F: Fn(f64) -> DVector<f64>,
{
    check_dim(a.dim(), y0.len())?;
    if !(tau > 0.0) {
        return Err(invalid("tau must be positive"));
    }
    let steps = step_count(t_final, tau)?;
    let mut out = Vec::with_capacity(steps as usize + 1);
    out.push(y0.clone());
    for n in 0..steps {
        let y = out.last().expect("initial value");
        let f_n = f(n as f64 * tau);
        check_dim(y.len(), f_n.len())?;
        let next = y + (f_n - a.entries() * y) * tau;
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { step: n + 1 });
        }
        out.push(next);
    }
    Ok(out)
}
