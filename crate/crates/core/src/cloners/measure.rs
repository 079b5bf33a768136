//! Measure-and-prepare cloning: decide the sign, then prepare two copies.

use serde::{Deserialize, Serialize};

use super::{check_alpha, params, Branch, CloneReport, CloneState, Scheme};
use crate::discrimination::ReceiverKind;
use crate::error::Result;
use crate::gaussian::{overlap_with_coherent, GaussianState};
use crate::optimize::{maximize, OptimizerSpec};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MpPrep {
    /// Prepare `|±α>`.
    Exact,
    /// Prepare `|±β>` with optimized `β`.
    OptimizedCoherent,
    /// Prepare `D(±β) S|0>` with optimized `β` and x/p squeezing `s`.
    OptimizedSqueezed,
}

/// Prepared state for a `+` decision; `s > 0` squeezes x.
fn prepared(beta: f64, s: f64) -> GaussianState {
    GaussianState::squeezed_vacuum(s, 0.0).displace(beta, 0.0)
}

fn mp_fidelity(alpha: f64, p_err: f64, beta: f64, s: f64) -> Result<f64> {
    let a = C64::new(alpha, 0.0);
    Ok((1.0 - p_err) * overlap_with_coherent(&prepared(beta, s), a)?
        + p_err * overlap_with_coherent(&prepared(-beta, s), a)?)
}

/// `ln[(α+β)/(α-β)] - 4αβ - ln[(1-p)/p]` in terms of `δ = α - β`; zero at the
/// optimal coherent preparation.
pub fn mp_stationary_residual(alpha: f64, delta: f64, p_err: f64) -> f64 {
    (2.0 * alpha - delta).ln() - delta.ln() - 4.0 * alpha * (alpha - delta) - ((1.0 - p_err).ln() - p_err.ln())
}

/// The stationarity condition has exactly one root in `0 < δ < α` for
/// `p < ½`: the residual falls from `+∞` to its minimum at
/// `δ₁ = α - √(α² - ½)` (or monotonically when `α² < ½`) and stays negative
/// beyond. Bisection in `ln δ` resolves `δ` far below the spacing of
/// doubles near `α`, where `F(β)` itself is flat.
fn stationary_delta(alpha: f64, p_err: f64) -> Option<f64> {
    if alpha <= 0.0 || !(p_err > 0.0 && p_err < 0.5) {
        return None;
    }
    let hi = if alpha * alpha > 0.5 { alpha - (alpha * alpha - 0.5).sqrt() } else { alpha };
    let (mut lo, mut up) = (f64::MIN_POSITIVE.ln(), hi.ln());
    if mp_stationary_residual(alpha, up.exp(), p_err) > 0.0 {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + up);
        if mp_stationary_residual(alpha, mid.exp(), p_err) > 0.0 {
            lo = mid;
        } else {
            up = mid;
        }
    }
    Some((0.5 * (lo + up)).exp())
}

/// Bounds `(β)` or `(β, s)` for the optimized preparations.
pub fn mp_spec(alpha: f64, prep: MpPrep) -> OptimizerSpec {
    let beta = (0.0, 2.0 * alpha + 1.0);
    match prep {
        MpPrep::Exact => OptimizerSpec::new(vec![(alpha, alpha)]),
        MpPrep::OptimizedCoherent => OptimizerSpec::new(vec![beta]).with_initial(vec![alpha]),
        MpPrep::OptimizedSqueezed => OptimizerSpec::new(vec![beta, (-2.0, 2.0)]).with_initial(vec![alpha, 0.0]),
    }
}

pub fn mp_cloner(alpha: f64, receiver: ReceiverKind, prep: MpPrep, spec: &OptimizerSpec) -> Result<CloneReport> {
    let a = check_alpha(alpha)?;
    let p_err = receiver.error(a)?.error_prob;
    let (beta, delta_beta, s, f) = match prep {
        MpPrep::Exact => (a, 0.0, 0.0, mp_fidelity(a, p_err, a, 0.0)?),
        MpPrep::OptimizedCoherent => {
            let opt = maximize(|x| mp_fidelity(a, p_err, x[0], 0.0).unwrap_or(f64::NAN), spec)?;
            match stationary_delta(a, p_err) {
                Some(d) => {
                    let polished = mp_fidelity(a, p_err, a - d, 0.0)?;
                    if polished + spec.tolerance < opt.value {
                        log::warn!("stationary point at alpha {a} is worse than the numerical optimum");
                        (opt.x[0], opt.x[0] - a, 0.0, opt.value)
                    } else {
                        (a - d, -d, 0.0, polished.max(opt.value))
                    }
                }
                None => (opt.x[0], opt.x[0] - a, 0.0, opt.value),
            }
        }
        MpPrep::OptimizedSqueezed => {
            let opt = maximize(|x| mp_fidelity(a, p_err, x[0], x[1]).unwrap_or(f64::NAN), spec)?;
            (opt.x[0], opt.x[0] - a, opt.x[1], opt.value)
        }
    };
    let scheme = match prep {
        MpPrep::Exact => Scheme::MpExact,
        MpPrep::OptimizedCoherent => Scheme::MpCoherent,
        MpPrep::OptimizedSqueezed => Scheme::MpSqueezed,
    };
    Ok(CloneReport {
        scheme,
        alpha: a,
        params: params([("beta", beta), ("delta_beta", delta_beta), ("s", s), ("p_err", p_err)]),
        branch_states: vec![
            Branch { label: "correct".into(), probability: 1.0 - p_err, state: CloneState::Gaussian(prepared(beta, s)) },
            Branch { label: "error".into(), probability: p_err, state: CloneState::Gaussian(prepared(-beta, s)) },
        ],
        mean_fidelity: f,
    })
}
