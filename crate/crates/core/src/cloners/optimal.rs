//! The optimal cloner for two pure states, in Bloch and coherent-basis form.

use serde::{Deserialize, Serialize};

use super::{check_alpha, params, theta_of, Branch, CloneReport, CloneState, Scheme};
use crate::alphabet::{
    bloch_to_coherent_basis, coherent_basis_to_fock, BlochVector, CoherentBasisDensity, OverlapAngle,
    DEGENERATE_CUTOFF,
};
use crate::error::{Error, Result};
use crate::fock::{DensityOp, TruncationConfig};

/// Upper bound on the mean fidelity of a symmetric 1→2 cloner of two pure
/// states with overlap `S`.
pub fn bruss_bound(s: f64) -> f64 {
    let s2 = s * s;
    0.5 * (1.0 + (1.0 - s2) / (1.0 + s2).sqrt() + s2 * (1.0 + s) / (1.0 + s2))
}

/// The clone's Bloch vector has norm `s_norm` and sits at angle `2θ + ζ`
/// from the z axis, in the plane of the signals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimalCloneTransform {
    pub theta: OverlapAngle,
    pub s_norm: f64,
    pub zeta: f64,
}

impl OptimalCloneTransform {
    pub fn clone_bloch(&self) -> BlochVector {
        let phi = 2.0 * self.theta.theta + self.zeta;
        BlochVector { x: self.s_norm * phi.sin(), y: 0.0, z: self.s_norm * phi.cos() }
    }

    /// `½(1 + |s| cos ζ)`, the overlap of the clone with the signal.
    pub fn fidelity(&self) -> f64 {
        0.5 * (1.0 + self.s_norm * self.zeta.cos())
    }
}

/// Clone Bloch components in the signal plane.
fn clone_components(s: f64) -> (f64, f64) {
    let s2 = s * s;
    let x = s * (1.0 + s) / (1.0 + s2);
    let z = ((1.0 - s2) / (1.0 + s2)).sqrt();
    (x, z)
}

pub fn optimal_transform(theta: f64) -> Result<OptimalCloneTransform> {
    let angle = OverlapAngle::from_theta(theta)?;
    let (x, z) = clone_components(angle.overlap());
    let s_norm = (x * x + z * z).sqrt();
    let zeta = (z / s_norm).clamp(-1.0, 1.0).acos() - 2.0 * theta;
    Ok(OptimalCloneTransform { theta: angle, s_norm, zeta })
}

/// Coefficients of the optimal clone of `|+α>` and its number-basis image.
pub fn optimal_clone_state(alpha: f64, cfg: TruncationConfig) -> Result<(CoherentBasisDensity, DensityOp)> {
    let coeffs = optimal_coefficients(alpha)?;
    let rho = coherent_basis_to_fock(&coeffs, cfg)?;
    Ok((coeffs, rho))
}

fn optimal_coefficients(alpha: f64) -> Result<CoherentBasisDensity> {
    let a = check_alpha(alpha)?;
    let theta = theta_of(a).theta;
    if std::f64::consts::FRAC_PI_4 - theta < DEGENERATE_CUTOFF {
        return Err(Error::DegenerateBasis { theta });
    }
    let t = optimal_transform(theta)?;
    let mut c = bloch_to_coherent_basis(&t.clone_bloch(), theta)?;
    c.alpha = a;
    Ok(c)
}

pub fn optimal_cloner(alpha: f64) -> Result<CloneReport> {
    let a = check_alpha(alpha)?;
    let angle = theta_of(a);
    let t = optimal_transform(angle.theta)?;
    let bound = bruss_bound(angle.overlap());
    let branch_states = match optimal_coefficients(a) {
        Ok(c) => vec![Branch { label: "clone".into(), probability: 1.0, state: CloneState::CoherentBasis(c) }],
        // Near α = 0 the coherent basis is singular; the clone is the signal itself.
        Err(Error::DegenerateBasis { .. }) => vec![Branch {
            label: "clone".into(),
            probability: 1.0,
            state: CloneState::CoherentBasis(CoherentBasisDensity::pure_plus(a)),
        }],
        Err(e) => return Err(e),
    };
    Ok(CloneReport {
        scheme: Scheme::Optimal,
        alpha: a,
        params: params([("theta", angle.theta), ("s_norm", t.s_norm), ("zeta", t.zeta)]),
        branch_states,
        mean_fidelity: bound,
    })
}
