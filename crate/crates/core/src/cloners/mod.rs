//! Symmetric 1→2 cloners for the binary alphabet.
//!
//! Every scheme reports the clone of `|+α>`; the `|-α>` case follows by
//! reflection. Branches list the states the clone is a convex mixture of,
//! so `mean_fidelity = Σ p_i <α|ρ_i|α>`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::alphabet::{coherent_basis_to_fock, CoherentBasisDensity, OverlapAngle};
use crate::discrimination::ReceiverKind;
use crate::error::Result;
use crate::fock::{DensityOp, TruncationConfig};
use crate::gaussian::{GaussianMixture, GaussianState};

mod gaussian_schemes;
mod measure;
mod optimal;
mod usd;

pub use gaussian_schemes::{
    beamsplitter_cloner, partial_mp_cloner, partial_mp_fidelity, partial_mp_spec, psa_cloner, psa_fidelity,
    psa_spec, PartialMpParams, TapReceiver,
};
pub use measure::{mp_cloner, mp_spec, mp_stationary_residual, MpPrep};
pub use optimal::{bruss_bound, optimal_clone_state, optimal_cloner, optimal_transform, OptimalCloneTransform};
pub use usd::{usd_cloner, usd_spec, UsdPrep};

use crate::optimize::OptimizerSpec;

/// Fidelity bound of the optimal cloner at the alphabet's amplitude.
pub fn bruss_bound_at(alpha: f64) -> f64 {
    bruss_bound(crate::alphabet::overlap_angle(alpha).overlap())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Optimal,
    Beamsplitter,
    Psa,
    MpExact,
    MpCoherent,
    MpSqueezed,
    PartialMp,
    UsdRandom,
    UsdCoherent,
    UsdSqueezed,
}

impl Scheme {
    pub const PRACTICAL: [Scheme; 9] = [
        Scheme::Beamsplitter,
        Scheme::Psa,
        Scheme::MpExact,
        Scheme::MpCoherent,
        Scheme::MpSqueezed,
        Scheme::PartialMp,
        Scheme::UsdRandom,
        Scheme::UsdCoherent,
        Scheme::UsdSqueezed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Optimal => "optimal",
            Scheme::Beamsplitter => "beamsplitter",
            Scheme::Psa => "psa",
            Scheme::MpExact => "mp_exact",
            Scheme::MpCoherent => "mp_coherent",
            Scheme::MpSqueezed => "mp_squeezed",
            Scheme::PartialMp => "partial_mp",
            Scheme::UsdRandom => "usd_random",
            Scheme::UsdCoherent => "usd_coherent",
            Scheme::UsdSqueezed => "usd_squeezed",
        }
    }

    /// Keys of `CloneReport::params`, fixed per scheme.
    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            Scheme::Optimal => &["theta", "s_norm", "zeta"],
            Scheme::Beamsplitter => &["t"],
            Scheme::Psa => &["r", "clone_amplitude"],
            Scheme::MpExact | Scheme::MpCoherent | Scheme::MpSqueezed => &["beta", "delta_beta", "s", "p_err"],
            Scheme::PartialMp => &["t", "r1", "r2", "g", "p_err"],
            Scheme::UsdRandom | Scheme::UsdCoherent | Scheme::UsdSqueezed => &["beta", "s", "p_succ", "f_inc"],
        }
    }

    pub fn from_name(s: &str) -> Option<Scheme> {
        [Scheme::Optimal].iter().chain(Scheme::PRACTICAL.iter()).copied().find(|k| k.name() == s)
    }

    /// Runs the scheme with its default optimizer settings.
    pub fn run(self, alpha: f64, opts: &SchemeOptions) -> Result<CloneReport> {
        let seeded = |spec: OptimizerSpec| {
            let spec = spec.with_seed(opts.seed);
            match opts.starts {
                Some(n) => spec.with_starts(n),
                None => spec,
            }
        };
        match self {
            Scheme::Optimal => optimal_cloner(alpha),
            Scheme::Beamsplitter => beamsplitter_cloner(alpha),
            Scheme::Psa => psa_cloner(alpha, &seeded(psa_spec())),
            Scheme::MpExact => mp_cloner(alpha, opts.receiver, MpPrep::Exact, &seeded(mp_spec(alpha, MpPrep::Exact))),
            Scheme::MpCoherent => {
                mp_cloner(alpha, opts.receiver, MpPrep::OptimizedCoherent, &seeded(mp_spec(alpha, MpPrep::OptimizedCoherent)))
            }
            Scheme::MpSqueezed => {
                mp_cloner(alpha, opts.receiver, MpPrep::OptimizedSqueezed, &seeded(mp_spec(alpha, MpPrep::OptimizedSqueezed)))
            }
            Scheme::PartialMp => partial_mp_cloner(alpha, opts.tap, &seeded(partial_mp_spec())),
            Scheme::UsdRandom => usd_cloner(alpha, UsdPrep::RandomSignal, &seeded(usd_spec(alpha, UsdPrep::RandomSignal))),
            Scheme::UsdCoherent => {
                usd_cloner(alpha, UsdPrep::OptimizedCoherent, &seeded(usd_spec(alpha, UsdPrep::OptimizedCoherent)))
            }
            Scheme::UsdSqueezed => {
                usd_cloner(alpha, UsdPrep::OptimizedSqueezed, &seeded(usd_spec(alpha, UsdPrep::OptimizedSqueezed)))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeOptions {
    /// Receiver used by the measure-and-prepare schemes.
    pub receiver: ReceiverKind,
    /// Receiver acting on the tapped beam of the partial-measurement scheme.
    pub tap: TapReceiver,
    pub seed: u64,
    /// Overrides the number of optimizer starts.
    #[serde(default)]
    pub starts: Option<usize>,
}

impl Default for SchemeOptions {
    fn default() -> Self {
        Self { receiver: ReceiverKind::Helstrom, tap: TapReceiver::Helstrom, seed: 0x5eed, starts: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CloneState {
    Gaussian(GaussianState),
    Mixture(GaussianMixture),
    CoherentBasis(CoherentBasisDensity),
}

impl CloneState {
    pub fn fidelity(&self, alpha: f64) -> Result<f64> {
        let a = crate::C64::new(alpha, 0.0);
        match self {
            CloneState::Gaussian(g) => crate::gaussian::overlap_with_coherent(g, a),
            CloneState::Mixture(m) => m.overlap_with_coherent(a),
            CloneState::CoherentBasis(c) => {
                // <α|ρ|α> with <α|±α> = 1, e^{-2α²}.
                let s = (-2.0 * alpha * alpha).exp();
                let v = c.rho_pp + c.rho_pm * s + c.rho_mp * s + c.rho_mm * s * s;
                Ok(v.re)
            }
        }
    }

    pub fn to_density(&self, cfg: TruncationConfig) -> Result<DensityOp> {
        match self {
            CloneState::Gaussian(g) => g.to_density(cfg),
            CloneState::Mixture(m) => m.to_density(cfg),
            CloneState::CoherentBasis(c) => coherent_basis_to_fock(c, cfg),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub label: String,
    pub probability: f64,
    pub state: CloneState,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CloneReport {
    pub scheme: Scheme,
    pub alpha: f64,
    pub params: BTreeMap<String, f64>,
    pub branch_states: Vec<Branch>,
    pub mean_fidelity: f64,
}

impl CloneReport {
    pub fn n_mean(&self) -> f64 {
        self.alpha * self.alpha
    }

    pub fn param(&self, key: &str) -> Option<f64> {
        self.params.get(key).copied()
    }

    /// Fidelity recomputed from the branches; equals `mean_fidelity`.
    pub fn branch_fidelity(&self) -> Result<f64> {
        self.branch_states
            .iter()
            .map(|b| b.state.fidelity(self.alpha).map(|f| b.probability * f))
            .sum()
    }

    /// The clone as a number-basis density operator.
    pub fn density(&self, cfg: TruncationConfig) -> Result<DensityOp> {
        let parts = self
            .branch_states
            .iter()
            .map(|b| b.state.to_density(cfg).map(|r| (b.probability, r)))
            .collect::<Result<Vec<_>>>()?;
        let refs: Vec<(f64, &DensityOp)> = parts.iter().map(|(w, r)| (*w, r)).collect();
        DensityOp::mixture(&refs)
    }
}

fn check_alpha(alpha: f64) -> Result<f64> {
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(crate::Error::InvalidArgument(format!("amplitude {alpha} must be finite and non-negative")));
    }
    Ok(alpha)
}

fn theta_of(alpha: f64) -> OverlapAngle {
    crate::alphabet::overlap_angle(alpha)
}

fn params<const N: usize>(pairs: [(&str, f64); N]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}
