//! Cloning via unambiguous discrimination: identified signals are copied
//! perfectly, inconclusive runs prepare a fixed fallback state.

use serde::{Deserialize, Serialize};

use super::{check_alpha, params, Branch, CloneReport, CloneState, Scheme};
use crate::discrimination::usd;
use crate::error::Result;
use crate::gaussian::{overlap_with_coherent, GaussianMixture, GaussianState};
use crate::optimize::{maximize, OptimizerSpec};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UsdPrep {
    /// Prepare `|+α>` or `|-α>` at random.
    RandomSignal,
    /// Prepare a coherent state `|β>` with optimized real `β`.
    OptimizedCoherent,
    /// Prepare `D(β) S|0>` with optimized `β` and x/p squeezing `s`.
    OptimizedSqueezed,
}

/// Fallback state; `s > 0` squeezes x. Mixed over `±β` so the clone stays
/// symmetric under `α ↔ -α` (the fidelity is unchanged by linearity).
fn fallback(beta: f64, s: f64) -> Result<GaussianMixture> {
    let g = GaussianState::squeezed_vacuum(s, 0.0);
    GaussianMixture::new(vec![(0.5, g.displace(beta, 0.0)), (0.5, g.displace(-beta, 0.0))])
}

/// `½(<α|ρ|α> + <-α|ρ|-α>)` for the fallback `ρ = D(β)S|0><0|S†D(β)†`.
fn inconclusive_fidelity(alpha: f64, beta: f64, s: f64) -> Result<f64> {
    let g = GaussianState::squeezed_vacuum(s, 0.0).displace(beta, 0.0);
    Ok(0.5 * (overlap_with_coherent(&g, C64::new(alpha, 0.0))? + overlap_with_coherent(&g, C64::new(-alpha, 0.0))?))
}

pub fn usd_spec(alpha: f64, prep: UsdPrep) -> OptimizerSpec {
    let beta = (0.0, 2.0 * alpha + 1.0);
    match prep {
        UsdPrep::RandomSignal => OptimizerSpec::new(vec![(alpha, alpha)]),
        UsdPrep::OptimizedCoherent => OptimizerSpec::new(vec![beta]).with_initial(vec![0.0]),
        UsdPrep::OptimizedSqueezed => OptimizerSpec::new(vec![beta, (-2.0, 2.0)]).with_initial(vec![0.0, 0.0]),
    }
}

pub fn usd_cloner(alpha: f64, prep: UsdPrep, spec: &OptimizerSpec) -> Result<CloneReport> {
    let a = check_alpha(alpha)?;
    let u = usd(a)?;
    let (beta, s, f_inc) = match prep {
        UsdPrep::RandomSignal => (a, 0.0, 0.5 * (1.0 + (-4.0 * a * a).exp())),
        UsdPrep::OptimizedCoherent => {
            let opt = maximize(|x| inconclusive_fidelity(a, x[0], 0.0).unwrap_or(f64::NAN), spec)?;
            (opt.x[0], 0.0, opt.value)
        }
        UsdPrep::OptimizedSqueezed => {
            let opt = maximize(|x| inconclusive_fidelity(a, x[0], x[1]).unwrap_or(f64::NAN), spec)?;
            (opt.x[0], opt.x[1], opt.value)
        }
    };
    let scheme = match prep {
        UsdPrep::RandomSignal => Scheme::UsdRandom,
        UsdPrep::OptimizedCoherent => Scheme::UsdCoherent,
        UsdPrep::OptimizedSqueezed => Scheme::UsdSqueezed,
    };
    Ok(CloneReport {
        scheme,
        alpha: a,
        params: params([("beta", beta), ("s", s), ("p_succ", u.success_prob), ("f_inc", f_inc)]),
        branch_states: vec![
            Branch {
                label: "identified".into(),
                probability: u.success_prob,
                state: CloneState::Gaussian(GaussianState::coherent(C64::new(a, 0.0))),
            },
            Branch { label: "inconclusive".into(), probability: u.inconclusive_prob, state: CloneState::Mixture(fallback(beta, s)?) },
        ],
        mean_fidelity: u.success_prob + u.inconclusive_prob * f_inc,
    })
}
