//! Receivers and bounds for discriminating `|+α>` from `|-α>` with equal priors.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{self, CMatrix, LinearOp, TruncationConfig, C64};
use crate::gaussian::{GaussianState, MIN_DET};

/// Receiver amplitudes above this are clamped; every error has underflowed by then.
pub const MAX_ALPHA: f64 = 10.0;

const OD_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReceiverKind {
    Homodyne,
    Kennedy,
    OptimizedDisplacement,
    Helstrom,
}

impl ReceiverKind {
    pub const ALL: [ReceiverKind; 4] =
        [ReceiverKind::Homodyne, ReceiverKind::Kennedy, ReceiverKind::OptimizedDisplacement, ReceiverKind::Helstrom];

    pub fn error(self, alpha: f64) -> Result<ReceiverResult> {
        match self {
            ReceiverKind::Homodyne => homodyne_error(alpha),
            ReceiverKind::Kennedy => kennedy_error(alpha),
            ReceiverKind::OptimizedDisplacement => optimized_displacement(alpha),
            ReceiverKind::Helstrom => helstrom_error(alpha),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ReceiverKind::Homodyne => "homodyne",
            ReceiverKind::Kennedy => "kennedy",
            ReceiverKind::OptimizedDisplacement => "optimized_displacement",
            ReceiverKind::Helstrom => "helstrom",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReceiverResult {
    pub error_prob: f64,
    /// Displacement used by the optimized-displacement receiver.
    pub beta: Option<f64>,
}

impl ReceiverResult {
    fn plain(error_prob: f64) -> Self {
        Self { error_prob, beta: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UsdResult {
    pub success_prob: f64,
    pub inconclusive_prob: f64,
}

fn check_alpha(alpha: f64) -> Result<f64> {
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(Error::InvalidArgument(format!("amplitude {alpha} must be finite and non-negative")));
    }
    Ok(alpha.min(MAX_ALPHA))
}

/// `½(1 - √(1 - ε))` written to avoid cancellation for small `ε`.
fn helstrom_from_overlap(eps: f64) -> f64 {
    let eps = eps.clamp(0.0, 1.0);
    0.5 * eps / (1.0 + (1.0 - eps).sqrt())
}

/// Sign of the x quadrature: `½ erfc(√2 α)`.
pub fn homodyne_error(alpha: f64) -> Result<ReceiverResult> {
    let a = check_alpha(alpha)?;
    Ok(ReceiverResult::plain(0.5 * libm::erfc(std::f64::consts::SQRT_2 * a)))
}

/// Monte-Carlo estimate of the homodyne error from `shots` samples of the
/// x marginal of `|+α>` (mean `α`, variance 1/4).
pub fn homodyne_error_mc(alpha: f64, shots: u64, seed: u64) -> Result<f64> {
    let a = check_alpha(alpha)?;
    if shots == 0 {
        return Err(Error::InvalidArgument("zero shots".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(a, 0.5).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let wrong = (0..shots).filter(|_| normal.sample(&mut rng) < 0.0).count();
    Ok(wrong as f64 / shots as f64)
}

pub fn helstrom_error(alpha: f64) -> Result<ReceiverResult> {
    let a = check_alpha(alpha)?;
    Ok(ReceiverResult::plain(helstrom_from_overlap((-4.0 * a * a).exp())))
}

pub fn kennedy_error(alpha: f64) -> Result<ReceiverResult> {
    let a = check_alpha(alpha)?;
    Ok(ReceiverResult::plain(0.5 * (-4.0 * a * a).exp()))
}

/// Error of a displacement-by-`β` on/off receiver; `β = α` is Kennedy.
pub fn displacement_receiver_error(alpha: f64, beta: f64) -> f64 {
    0.5 - (-(alpha * alpha + beta * beta)).exp() * (2.0 * alpha * beta).sinh()
}

/// Optimized displacement: `β` solves `α = β tanh(2αβ)` on `[1/√2, α+2]`.
pub fn optimized_displacement(alpha: f64) -> Result<ReceiverResult> {
    let a = check_alpha(alpha)?;
    let lo0 = std::f64::consts::FRAC_1_SQRT_2;
    let beta = if a < 1e-6 {
        lo0
    } else {
        let g = |b: f64| b * (2.0 * a * b).tanh() - a;
        let (mut lo, mut hi) = (lo0, a + 2.0);
        if g(lo) > 0.0 || g(hi) < 0.0 {
            return Err(Error::Convergence(format!("no root of the displacement condition bracketed at alpha {a}")));
        }
        while hi - lo > OD_TOL {
            let mid = 0.5 * (lo + hi);
            if g(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    Ok(ReceiverResult { error_prob: displacement_receiver_error(a, beta), beta: Some(beta) })
}

pub fn usd(alpha: f64) -> Result<UsdResult> {
    let a = check_alpha(alpha)?;
    let fail = (-2.0 * a * a).exp();
    Ok(UsdResult { success_prob: -(-2.0 * a * a).exp_m1(), inconclusive_prob: fail })
}

/// Kennedy POVM `(Π+, Π-)` with `Π- = D(β)† |0><0| D(β) = |-β><-β|`, built
/// from the truncated displacement operator.
pub fn kennedy_povm(beta: f64, cfg: TruncationConfig) -> Result<(LinearOp, LinearOp)> {
    let d = fock::displacement_op(C64::new(beta, 0.0), cfg)?;
    let mut vac = CMatrix::zeros(cfg.dim, cfg.dim);
    vac[(0, 0)] = C64::new(1.0, 0.0);
    let clicks = CMatrix::identity(cfg.dim, cfg.dim) - &vac;
    let dm = d.matrix();
    let pi_minus = dm.adjoint() * vac * dm;
    let pi_plus = dm.adjoint() * clicks * dm;
    Ok((LinearOp::from_matrix(pi_plus, cfg)?, LinearOp::from_matrix(pi_minus, cfg)?))
}

/// Minimum error for two pure Gaussian states from their squared overlap.
pub fn gaussian_pair_helstrom(s_plus: &GaussianState, s_minus: &GaussianState) -> Result<f64> {
    for g in [s_plus, s_minus] {
        if g.det() > MIN_DET + 1e-6 {
            return Err(Error::MixedStateUnsupported { det: g.det() });
        }
    }
    Ok(helstrom_from_overlap(s_plus.overlap(s_minus)?))
}

/// Exact minimum error for two Gaussian states sharing a covariance matrix,
/// pure or mixed.
///
/// A symplectic map takes both states to thermal states displaced by `±h`.
/// Since the parity operator maps one onto the other, the difference has
/// support only on odd `m + n` and its trace norm is twice the nuclear norm
/// of the even-row/odd-column block.
pub fn gaussian_pair_helstrom_equal_cov(s_plus: &GaussianState, s_minus: &GaussianState) -> Result<f64> {
    if (s_plus.cov - s_minus.cov).abs().max() > 1e-12 {
        return Err(Error::InvalidArgument("covariances differ".into()));
    }
    let cov = s_plus.cov;
    let nu = s_plus.symplectic_eigenvalue();
    let inv = cov.try_inverse().ok_or_else(|| Error::NonPhysicalCovariance("singular covariance".into()))?;
    let d = s_plus.mean - s_minus.mean;
    let maha = d.dot(&(inv * d));
    if nu < 1.0 + 1e-9 {
        return Ok(helstrom_from_overlap((-0.25 * maha).exp()));
    }
    let h = (nu * maha / 16.0).sqrt();
    let nbar = 0.5 * (nu - 1.0);
    let mut dim = ((8.0 * (h + 1.0) * (h + 1.0)) as usize + 20).max(((nbar + 1.0) * 40.0) as usize).max(24);
    loop {
        let (pops, _) = fock::thermal_populations(nbar, dim);
        let dm = fock::displacement_elements_real(h, dim);
        let scaled = DMatrix::from_fn(dim, dim, |m, k| dm[(m, k)] * pops[k]);
        let a = &scaled * dm.transpose();
        let leak = 1.0 - a.trace();
        if leak < 1e-12 {
            let even: Vec<usize> = (0..dim).step_by(2).collect();
            let odd: Vec<usize> = (1..dim).step_by(2).collect();
            let b = DMatrix::from_fn(even.len(), odd.len(), |i, j| 2.0 * a[(even[i], odd[j])]);
            let nuclear: f64 = b.singular_values().iter().sum();
            return Ok((0.5 * (1.0 - nuclear)).clamp(0.0, 0.5));
        }
        if dim > 4000 {
            return Err(Error::Truncation { dim, leak, tol: 1e-12 });
        }
        dim *= 2;
    }
}

/// Minimum error for arbitrary Gaussian pairs via their number-basis images.
pub fn gaussian_pair_helstrom_mixed(
    s_plus: &GaussianState,
    s_minus: &GaussianState,
    cfg: TruncationConfig,
) -> Result<f64> {
    let a = s_plus.to_density(cfg)?;
    let b = s_minus.to_density(cfg)?;
    let diff = a.matrix() - b.matrix();
    let herm = (&diff + diff.adjoint()).scale(0.5);
    let trace_norm: f64 = nalgebra::SymmetricEigen::new(herm).eigenvalues.iter().map(|v| v.abs()).sum();
    Ok((0.5 * (1.0 - 0.5 * trace_norm)).clamp(0.0, 0.5))
}

/// Best single-quadrature measurement for two states with equal covariance:
/// project on `Σ⁻¹ d` and threshold at the midpoint.
pub fn gaussian_pair_homodyne(s_plus: &GaussianState, s_minus: &GaussianState) -> Result<f64> {
    let cov = 0.5 * (s_plus.cov + s_minus.cov);
    let inv = cov.try_inverse().ok_or_else(|| Error::NonPhysicalCovariance("singular covariance".into()))?;
    let d = s_plus.mean - s_minus.mean;
    let snr = 0.5 * d.dot(&(inv * d)).sqrt();
    Ok(0.5 * libm::erfc(snr / std::f64::consts::SQRT_2))
}
