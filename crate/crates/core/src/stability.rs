//! Amplification-matrix analysis of the HM scheme.
//!
//! In the eigenbasis of `A` the one-step operator `(y[n], y[n-1]) -> (y[n+1], y[n])`
//! splits into independent 2x2 blocks depending only on `mu = tau*lambda` and
//! `eps_tilde = eps/tau`. Eigenvalues, spectral-radius verdicts, power norms and
//! the growth indicator are all computed per block.

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::linalg::{two_norm, two_norm_2x2, SymmetricOperator};
use crate::scheme::HmParams;

/// Largest power accepted by [`power_norm_curve`].
pub const MAX_POWER: usize = 10_000_000;
/// Power-norm curves stop once a norm exceeds this value.
pub const OVERFLOW_GUARD: f64 = 1e12;

const REAL_CUTOFF: f64 = 1e-13;
const SINGULAR_INDICATOR_TOL: f64 = 1e-14;

fn check_block_params(mu: f64, eps_tilde: f64) -> Result<()> {
    if !(eps_tilde > 0.0) || !eps_tilde.is_finite() {
        return Err(invalid(format!("eps_tilde must be positive, got {eps_tilde}")));
    }
    if !(mu >= 0.0) || !mu.is_finite() {
        return Err(invalid(format!("mu must be nonnegative, got {mu}")));
    }
    Ok(())
}

/// One 2x2 diagonal block of the amplification matrix,
/// `[[(4e - 2mu)/(1+2e), (1-2e)/(1+2e)], [1, 0]]` with `e = eps_tilde`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplificationBlock {
    mu: f64,
    eps_tilde: f64,
    matrix: Matrix2<f64>,
}

impl AmplificationBlock {
    pub fn new(mu: f64, eps_tilde: f64) -> Result<Self> {
        check_block_params(mu, eps_tilde)?;
        let denom = 1.0 + 2.0 * eps_tilde;
        let matrix = Matrix2::new(
            (4.0 * eps_tilde - 2.0 * mu) / denom,
            (1.0 - 2.0 * eps_tilde) / denom,
            1.0,
            0.0,
        );
        Ok(Self {
            mu,
            eps_tilde,
            matrix,
        })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn eps_tilde(&self) -> f64 {
        self.eps_tilde
    }

    pub fn matrix(&self) -> &Matrix2<f64> {
        &self.matrix
    }

    pub fn s11(&self) -> f64 {
        self.matrix[(0, 0)]
    }

    pub fn s12(&self) -> f64 {
        self.matrix[(0, 1)]
    }

    pub fn det(&self) -> f64 {
        -self.s12()
    }

    pub fn eigen(&self) -> BlockEigen {
        eigen_unchecked(self.mu, self.eps_tilde)
    }

    /// `S^p` by repeated multiplication.
    pub fn power(&self, p: usize) -> Matrix2<f64> {
        let mut acc = Matrix2::identity();
        for _ in 0..p {
            acc = self.matrix * acc;
        }
        acc
    }
}

pub fn build_block(mu: f64, eps_tilde: f64) -> Result<AmplificationBlock> {
    AmplificationBlock::new(mu, eps_tilde)
}

/// Eigenvalue pair of a block. `xi1` carries the `+` sign of the square root.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockEigen {
    pub xi1: Complex64,
    pub xi2: Complex64,
    /// `mu^2 + 1 - 4 eps_tilde mu`
    pub discriminant: f64,
    /// `|xi1 - xi2|`
    pub separation: f64,
}

impl BlockEigen {
    pub fn is_real(&self) -> bool {
        self.xi1.im.abs() < REAL_CUTOFF * self.xi1.norm() && self.xi2.im.abs() < REAL_CUTOFF * self.xi2.norm()
    }

    pub fn spectral_radius(&self) -> f64 {
        self.xi1.norm().max(self.xi2.norm())
    }
}

fn radicand(mu: f64, eps_tilde: f64) -> f64 {
    mu * (mu - 4.0 * eps_tilde) + 1.0
}

fn eigen_unchecked(mu: f64, eps_tilde: f64) -> BlockEigen {
    let denom = 1.0 + 2.0 * eps_tilde;
    let b = 2.0 * eps_tilde - mu;
    let disc = radicand(mu, eps_tilde);
    let product = (2.0 * eps_tilde - 1.0) / denom;

    let (xi1, xi2) = if disc >= 0.0 {
        let s = disc.sqrt();
        let plus = (b + s) / denom;
        let minus = (b - s) / denom;
        // Recover the root that suffers cancellation from the product of roots.
        if b >= 0.0 {
            let minus = if plus != 0.0 { product / plus } else { minus };
            (Complex64::new(plus, 0.0), Complex64::new(minus, 0.0))
        } else {
            let plus = if minus != 0.0 { product / minus } else { plus };
            (Complex64::new(plus, 0.0), Complex64::new(minus, 0.0))
        }
    } else {
        let s = (-disc).sqrt();
        (
            Complex64::new(b / denom, s / denom),
            Complex64::new(b / denom, -s / denom),
        )
    };

    BlockEigen {
        xi1,
        xi2,
        discriminant: disc,
        separation: 2.0 * disc.abs().sqrt() / denom,
    }
}

/// Roots of `(1+2e) xi^2 + (2mu - 4e) xi + (2e - 1) = 0`.
pub fn block_eigenvalues(mu: f64, eps_tilde: f64) -> Result<BlockEigen> {
    check_block_params(mu, eps_tilde)?;
    Ok(eigen_unchecked(mu, eps_tilde))
}

/// `|xi1 - xi2| = 2 |sqrt(mu^2 + 1 - 4 e mu)| / (1 + 2e)`.
pub fn exact_separation(mu: f64, eps_tilde: f64) -> Result<f64> {
    check_block_params(mu, eps_tilde)?;
    Ok(2.0 * radicand(mu, eps_tilde).abs().sqrt() / (1.0 + 2.0 * eps_tilde))
}

/// Small-`mu` approximation of `|xi1 - xi2|^{-1}`:
/// `(tau + 2 eps) / (2 tau sqrt|1 - 4 eps lambda|)`.
pub fn growth_indicator(lambda: f64, p: &HmParams) -> Result<f64> {
    if !(lambda >= 0.0) {
        return Err(invalid(format!("lambda must be nonnegative, got {lambda}")));
    }
    let value = (1.0 - 4.0 * p.eps() * lambda).abs();
    if value < SINGULAR_INDICATOR_TOL {
        return Err(Error::SingularIndicator { value });
    }
    Ok((p.tau() + 2.0 * p.eps()) / (2.0 * p.tau() * value.sqrt()))
}

/// Outcome of the step-size condition `tau < sqrt(4 eps / lambda_max)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamarskiiVerdict {
    pub stable: bool,
    pub tau_bound: f64,
    pub margin: f64,
}

pub fn samarskii_check(p: &HmParams, lambda_max: f64) -> Result<SamarskiiVerdict> {
    if !(lambda_max > 0.0) || !lambda_max.is_finite() {
        return Err(invalid(format!("lambda_max must be positive, got {lambda_max}")));
    }
    let tau_bound = (4.0 * p.eps() / lambda_max).sqrt();
    Ok(SamarskiiVerdict {
        stable: p.tau() < tau_bound,
        tau_bound,
        margin: tau_bound - p.tau(),
    })
}

/// Dense `2N x 2N` amplification matrix
/// `[[4e/(1+2e) I - 2tau/(1+2e) A, (1-2e)/(1+2e) I], [I, 0]]`.
pub fn build_amplification(a: &SymmetricOperator, p: &HmParams) -> DMatrix<f64> {
    let n = a.dim();
    let et = p.eps_tilde();
    let denom = 1.0 + 2.0 * et;
    let mut s = DMatrix::zeros(2 * n, 2 * n);
    let top_left = DMatrix::identity(n, n) * (4.0 * et / denom) - a.entries() * (2.0 * p.tau() / denom);
    s.view_mut((0, 0), (n, n)).copy_from(&top_left);
    for i in 0..n {
        s[(i, n + i)] = (1.0 - 2.0 * et) / denom;
        s[(n + i, i)] = 1.0;
    }
    s
}

/// The per-eigenvalue blocks of the amplification matrix of `a`.
pub fn operator_blocks(a: &SymmetricOperator, p: &HmParams) -> Vec<AmplificationBlock> {
    a.eigenvalues()
        .iter()
        .map(|&lambda| {
            AmplificationBlock::new(p.tau() * lambda, p.eps_tilde()).expect("validated parameters")
        })
        .collect()
}

fn check_power(n_max: usize) -> Result<()> {
    if n_max < 1 {
        return Err(invalid("n_max must be at least 1"));
    }
    if n_max > MAX_POWER {
        return Err(Error::StepCountOverflow {
            steps: n_max as f64,
            limit: MAX_POWER as u64,
        });
    }
    Ok(())
}

/// `||S^n||_2` for `n = 1 ..= n_max`, computed as the maximum over blocks of
/// `||S_j^n||_2` with each block power accumulated by repeated multiplication.
///
/// The curve is truncated after the first value exceeding [`OVERFLOW_GUARD`].
pub fn power_norm_curve(blocks: &[AmplificationBlock], n_max: usize) -> Result<Vec<f64>> {
    check_power(n_max)?;
    if blocks.is_empty() {
        return Err(invalid("at least one block is required"));
    }
    let mut powers: Vec<Matrix2<f64>> = vec![Matrix2::identity(); blocks.len()];
    let mut curve = Vec::with_capacity(n_max);
    for _ in 0..n_max {
        let mut worst = 0.0_f64;
        for (acc, block) in powers.iter_mut().zip(blocks) {
            *acc = block.matrix() * *acc;
            worst = worst.max(two_norm_2x2(acc));
        }
        curve.push(worst);
        if !(worst <= OVERFLOW_GUARD) {
            break;
        }
    }
    Ok(curve)
}

/// `||S^n||_2` from direct powers of the dense matrix; for cross-checking.
pub fn power_norm_curve_full(s: &DMatrix<f64>, n_max: usize) -> Result<Vec<f64>> {
    check_power(n_max)?;
    if s.nrows() != s.ncols() {
        return Err(Error::NotSquare {
            rows: s.nrows(),
            cols: s.ncols(),
        });
    }
    let mut acc = DMatrix::identity(s.nrows(), s.ncols());
    let mut curve = Vec::with_capacity(n_max);
    for _ in 0..n_max {
        acc = s * &acc;
        let norm = two_norm(&acc);
        curve.push(norm);
        if !(norm <= OVERFLOW_GUARD) {
            break;
        }
    }
    Ok(curve)
}

/// Reference stability functions at `mu`: the exact `exp(-mu)` and implicit
/// Euler `1/(1+mu)`.
pub fn reference_curves(mu: f64) -> (f64, f64) {
    ((-mu).exp(), 1.0 / (1.0 + mu))
}

/// Positive initial levels whose next HM level is negative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonotonicityWitness {
    pub mu: f64,
    pub y0: f64,
    pub y1: f64,
    pub y2: f64,
}

/// Constructs positive `(y0, y1)` with `y2 = S11 y1 + S12 y0 < 0` for the
/// scalar problem with eigenvalue `lambda`, i.e. at `mu = tau*lambda`.
///
/// Takes `y1 = 1` and the smallest integer `y0 > S11/|S12|`. Returns `None`
/// when `S12 >= 0` (`eps_tilde <= 1/2`), where this construction cannot work.
pub fn monotonicity_witness(p: &HmParams, lambda: f64) -> Option<MonotonicityWitness> {
    let mu = p.tau() * lambda;
    let block = AmplificationBlock::new(mu, p.eps_tilde()).ok()?;
    let (s11, s12) = (block.s11(), block.s12());
    if s12 >= 0.0 {
        return None;
    }
    let y1 = 1.0;
    let y0 = if s11 <= 0.0 {
        1.0
    } else {
        (s11 / -s12).floor() + 1.0
    };
    let y2 = s11 * y1 + s12 * y0;
    (y2 < 0.0).then_some(MonotonicityWitness { mu, y0, y1, y2 })
}

/// How `eps` is tied to the discretisation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EpsilonPolicy {
    /// Fixed `eps`.
    ConstEps { eps: f64 },
    /// `eps = c_tilde * tau`.
    LinearInTau { c_tilde: f64 },
    /// `eps = k * h` for a heat equation with conductivity `k` on spacing `h`,
    /// where `lambda_max = 4k/h^2`.
    LinearInH { k: f64, h: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolicyBound {
    pub max_tau: f64,
    pub note: &'static str,
}

/// Largest stable `tau` under an `eps` policy.
pub fn epsilon_policy_bounds(policy: EpsilonPolicy, lambda_max: f64) -> Result<PolicyBound> {
    let positive = |name: &str, v: f64| -> Result<()> {
        if v > 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(invalid(format!("{name} must be positive, got {v}")))
        }
    };
    match policy {
        EpsilonPolicy::ConstEps { eps } => {
            positive("eps", eps)?;
            positive("lambda_max", lambda_max)?;
            Ok(PolicyBound {
                max_tau: (4.0 * eps / lambda_max).sqrt(),
                note: "tau < sqrt(4 eps / lambda_max)",
            })
        }
        EpsilonPolicy::LinearInTau { c_tilde } => {
            positive("c_tilde", c_tilde)?;
            positive("lambda_max", lambda_max)?;
            Ok(PolicyBound {
                max_tau: 4.0 * c_tilde / lambda_max,
                note: "tau < 4 c / lambda_max: an explicit-scheme-type restriction, tau = O(h^2)",
            })
        }
        EpsilonPolicy::LinearInH { k, h } => {
            positive("k", k)?;
            positive("h", h)?;
            // h * sqrt(eps / k) with eps = k h
            Ok(PolicyBound {
                max_tau: h * (k * h / k).sqrt(),
                note: "tau < h^(3/2), independent of k",
            })
        }
    }
}

/// Per-eigenvalue stability data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeStability {
    pub lambda: f64,
    pub mu: f64,
    pub xi1: Complex64,
    pub xi2: Complex64,
    /// `|xi1 - xi2|^{-1}`; infinite at a double root.
    pub inverse_separation: f64,
    /// [`growth_indicator`], absent where it is singular.
    pub indicator: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub tau_bound: f64,
    /// `tau < tau_bound`.
    pub stable: bool,
    /// Largest `|xi|` over modes with `lambda > 0`.
    pub spectral_radius: f64,
    pub per_mode: Vec<ModeStability>,
    /// `max_{n <= n_max} ||S^n||_2`.
    pub max_power_norm: f64,
}

pub fn stability_report(a: &SymmetricOperator, p: &HmParams, n_max: usize) -> Result<StabilityReport> {
    let verdict = samarskii_check(p, a.lambda_max())?;
    let blocks = operator_blocks(a, p);
    let per_mode: Vec<ModeStability> = blocks
        .iter()
        .zip(a.eigenvalues().iter())
        .map(|(block, &lambda)| {
            let eig = block.eigen();
            ModeStability {
                lambda,
                mu: block.mu(),
                xi1: eig.xi1,
                xi2: eig.xi2,
                inverse_separation: 1.0 / eig.separation,
                indicator: growth_indicator(lambda, p).ok(),
            }
        })
        .collect();
    let spectral_radius = per_mode
        .iter()
        .filter(|m| m.lambda > 0.0)
        .map(|m| m.xi1.norm().max(m.xi2.norm()))
        .fold(0.0, f64::max);
    let curve = power_norm_curve(&blocks, n_max)?;
    Ok(StabilityReport {
        tau_bound: verdict.tau_bound,
        stable: verdict.stable,
        spectral_radius,
        per_mode,
        max_power_norm: curve.iter().copied().fold(0.0, f64::max),
    })
}
