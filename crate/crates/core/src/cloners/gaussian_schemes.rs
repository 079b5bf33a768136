//! Beam-splitter, phase-sensitive-amplifier and partial-measurement cloners.

use std::cell::Cell;

use serde::{Deserialize, Serialize};

use super::{check_alpha, params, Branch, CloneReport, CloneState, Scheme};
use crate::discrimination::{gaussian_pair_helstrom_equal_cov, gaussian_pair_homodyne};
use crate::error::{Error, Result};
use crate::gaussian::{beamsplit, overlap_with_coherent, partial_trace, GaussianState};
use crate::optimize::{maximize, OptimizerSpec, Strategy};
use crate::C64;

fn split_with_vacuum(g: &GaussianState) -> GaussianState {
    partial_trace(&beamsplit(g, &GaussianState::vacuum(), 0.5).expect("T = 1/2 is valid"), 0)
}

/// Both clones are `|α/√2>`.
pub fn beamsplitter_cloner(alpha: f64) -> Result<CloneReport> {
    let a = check_alpha(alpha)?;
    let clone = split_with_vacuum(&GaussianState::coherent(C64::new(a, 0.0)));
    let f = overlap_with_coherent(&clone, C64::new(a, 0.0))?;
    Ok(CloneReport {
        scheme: Scheme::Beamsplitter,
        alpha: a,
        params: params([("t", 0.5)]),
        branch_states: vec![Branch { label: "clone".into(), probability: 1.0, state: CloneState::Gaussian(clone) }],
        mean_fidelity: f,
    })
}

fn psa_clone(alpha: f64, r: f64) -> GaussianState {
    split_with_vacuum(&GaussianState::coherent(C64::new(alpha, 0.0)).squeeze(r, 0.0))
}

/// Amplify x by `e^r`, then split symmetrically with vacuum.
pub fn psa_fidelity(alpha: f64, r: f64) -> Result<f64> {
    overlap_with_coherent(&psa_clone(alpha, r), C64::new(alpha, 0.0))
}

pub fn psa_spec() -> OptimizerSpec {
    OptimizerSpec::new(vec![(0.0, 2.0)])
}

pub fn psa_cloner(alpha: f64, spec: &OptimizerSpec) -> Result<CloneReport> {
    let a = check_alpha(alpha)?;
    let opt = maximize(|x| psa_fidelity(a, x[0]).unwrap_or(f64::NAN), spec)?;
    let r = opt.x[0];
    let clone = psa_clone(a, r);
    Ok(CloneReport {
        scheme: Scheme::Psa,
        alpha: a,
        params: params([("r", r), ("clone_amplitude", clone.mean[0])]),
        branch_states: vec![Branch { label: "clone".into(), probability: 1.0, state: CloneState::Gaussian(clone) }],
        mean_fidelity: opt.value,
    })
}

/// Measurement applied to the tapped-off beam.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TapReceiver {
    /// Exact minimum-error measurement on the (generally mixed) reflected pair.
    Helstrom,
    /// Best single-quadrature measurement.
    Homodyne,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartialMpParams {
    /// Intensity transmissivity of the tap-off splitter.
    pub t: f64,
    /// Squeezing of the vacuum entering the tap-off splitter (x quadrature).
    pub r1: f64,
    /// Amplification of x on the transmitted beam.
    pub r2: f64,
    /// Forward gain; `g = 1` gives clones of amplitude `α` on a correct decision.
    pub g: f64,
}

impl PartialMpParams {
    fn from_slice(x: &[f64]) -> Self {
        Self { t: x[0], r1: x[1], r2: x[2], g: x[3] }
    }

    /// At `T = 0` only `r2 - r1` is observable; at `T = 1` the ancilla leaves
    /// through the tap and `r1` is irrelevant. Picks the representative with
    /// the smaller squeezings.
    fn canonical(self) -> Self {
        if self.t == 0.0 {
            let d = self.r2 - self.r1;
            Self { r1: (-d).max(0.0), r2: d.max(0.0), ..self }
        } else if self.t == 1.0 {
            Self { r1: 0.0, ..self }
        } else {
            self
        }
    }
}

struct PartialStages {
    error_prob: f64,
    correct: GaussianState,
    wrong: GaussianState,
}

thread_local! {
    // The tap error depends only on (α, T, r1, receiver); coordinate sweeps over r2 and g reuse it.
    static TAP_CACHE: Cell<Option<([u64; 4], f64)>> = const { Cell::new(None) };
}

fn tap_error(alpha: f64, t: f64, r1: f64, tap: TapReceiver) -> Result<f64> {
    let key = [alpha.to_bits(), t.to_bits(), r1.to_bits(), tap as u64];
    if let Some((k, v)) = TAP_CACHE.with(Cell::get) {
        if k == key {
            return Ok(v);
        }
    }
    let anc = GaussianState::squeezed_vacuum(r1, 0.0);
    let plus = partial_trace(&beamsplit(&GaussianState::coherent(C64::new(alpha, 0.0)), &anc, t)?, 1);
    let minus = partial_trace(&beamsplit(&GaussianState::coherent(C64::new(-alpha, 0.0)), &anc, t)?, 1);
    let p = match tap {
        TapReceiver::Helstrom => gaussian_pair_helstrom_equal_cov(&plus, &minus)?,
        TapReceiver::Homodyne => gaussian_pair_homodyne(&plus, &minus)?,
    };
    TAP_CACHE.with(|c| c.set(Some((key, p))));
    Ok(p)
}

fn partial_stages(alpha: f64, p: PartialMpParams, tap: TapReceiver) -> Result<PartialStages> {
    if !(0.0..=1.0).contains(&p.t) {
        return Err(Error::InvalidArgument(format!("transmissivity {} outside [0, 1]", p.t)));
    }
    let error_prob = tap_error(alpha, p.t, p.r1, tap)?;
    let anc = GaussianState::squeezed_vacuum(p.r1, 0.0);
    let transmitted = partial_trace(&beamsplit(&GaussianState::coherent(C64::new(alpha, 0.0)), &anc, p.t)?, 0);
    let amplified = transmitted.squeeze(p.r2, 0.0);
    let shift = p.g * (std::f64::consts::SQRT_2 - p.r2.exp() * p.t.sqrt()) * alpha;
    let correct = split_with_vacuum(&amplified.displace(shift, 0.0));
    let wrong = split_with_vacuum(&amplified.displace(-shift, 0.0));
    Ok(PartialStages { error_prob, correct, wrong })
}

/// Tap off, discriminate, amplify, displace according to the decision, then
/// split symmetrically.
pub fn partial_mp_fidelity(alpha: f64, p: PartialMpParams, tap: TapReceiver) -> Result<f64> {
    let s = partial_stages(alpha, p, tap)?;
    let a = C64::new(alpha, 0.0);
    Ok((1.0 - s.error_prob) * overlap_with_coherent(&s.correct, a)? + s.error_prob * overlap_with_coherent(&s.wrong, a)?)
}

/// Bounds `(T, r1, r2, g)`.
pub fn partial_mp_spec() -> OptimizerSpec {
    // Coordinate descent crawls along the r1 ≈ r2 ridge at small T.
    OptimizerSpec::new(vec![(0.0, 1.0), (0.0, 1.5), (0.0, 1.5), (0.0, 1.5)]).with_strategy(Strategy::Simplex)
}

pub fn partial_mp_cloner(alpha: f64, tap: TapReceiver, spec: &OptimizerSpec) -> Result<CloneReport> {
    let a = check_alpha(alpha)?;
    let opt = maximize(
        |x| partial_mp_fidelity(a, PartialMpParams::from_slice(x), tap).unwrap_or(f64::NAN),
        spec,
    )?;
    let p = PartialMpParams::from_slice(&opt.x).canonical();
    let s = partial_stages(a, p, tap)?;
    let f = (1.0 - s.error_prob) * overlap_with_coherent(&s.correct, C64::new(a, 0.0))?
        + s.error_prob * overlap_with_coherent(&s.wrong, C64::new(a, 0.0))?;
    Ok(CloneReport {
        scheme: Scheme::PartialMp,
        alpha: a,
        params: params([("t", p.t), ("r1", p.r1), ("r2", p.r2), ("g", p.g), ("p_err", s.error_prob)]),
        branch_states: vec![
            Branch { label: "correct".into(), probability: 1.0 - s.error_prob, state: CloneState::Gaussian(s.correct) },
            Branch { label: "error".into(), probability: s.error_prob, state: CloneState::Gaussian(s.wrong) },
        ],
        mean_fidelity: f,
    })
}
