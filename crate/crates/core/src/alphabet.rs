//! Two-dimensional descriptions of the binary alphabet `{|+α>, |-α>}`.
//!
//! With `sin 2θ = <α|-α> = e^{-2α²}` the signals are
//! `|+α> = cos θ |0> + sin θ |1>` and `|-α> = sin θ |0> + cos θ |1>` in an
//! orthonormal qubit basis, i.e. Bloch vectors `(sin 2θ, 0, ±cos 2θ)`.
//! The cat basis `|Ψ±> ∝ |α> ± |-α>` is the Hadamard image of the qubit basis.

use std::f64::consts::FRAC_PI_4;

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{coherent_state, CMatrix, CVector, DensityOp, PureState, TruncationConfig, C64};

/// Distance from `π/4` below which the coherent basis is treated as degenerate.
pub const DEGENERATE_CUTOFF: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverlapAngle {
    pub theta: f64,
    pub alpha: f64,
}

impl OverlapAngle {
    pub fn from_theta(theta: f64) -> Result<Self> {
        if !(0.0..=FRAC_PI_4).contains(&theta) {
            return Err(Error::InvalidArgument(format!("theta {theta} outside [0, π/4]")));
        }
        if theta == 0.0 {
            return Ok(Self { theta, alpha: f64::INFINITY });
        }
        // ln sin 2θ = ln(1 - 2 sin²(d/2)) with d = π/2 - 2θ, accurate near θ = π/4.
        let half = 0.5 * (std::f64::consts::FRAC_PI_2 - 2.0 * theta);
        let ln_s = (-2.0 * half.sin().powi(2)).ln_1p();
        let alpha = (-0.5 * ln_s).max(0.0).sqrt();
        Ok(Self { theta, alpha })
    }

    /// `S = sin 2θ`, the overlap of the two signals.
    pub fn overlap(&self) -> f64 {
        (2.0 * self.theta).sin()
    }

    pub fn n_mean(&self) -> f64 {
        self.alpha * self.alpha
    }
}

/// `θ = ½ arcsin(e^{-2α²})`, evaluated as an `atan2` so small `α` stays accurate.
pub fn overlap_angle(alpha: f64) -> OverlapAngle {
    let a = alpha.abs();
    let s = (-2.0 * a * a).exp();
    let c = (-(-4.0 * a * a).exp_m1()).sqrt();
    OverlapAngle { theta: 0.5 * s.atan2(c), alpha: a }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let b = Self { x, y, z };
        if b.norm_sqr() > 1.0 + 1e-12 {
            return Err(Error::NonPhysical(format!("Bloch vector norm {} > 1", b.norm())));
        }
        Ok(b)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }
}

/// Bloch vectors of `|+α>` and `|-α>`.
pub fn signal_bloch(theta: f64) -> (BlochVector, BlochVector) {
    let (s, c) = (2.0 * theta).sin_cos();
    (BlochVector { x: s, y: 0.0, z: c }, BlochVector { x: s, y: 0.0, z: -c })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Basis {
    Qubit,
    Cat,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoDimDensity {
    pub m: Matrix2<C64>,
    pub basis: Basis,
}

fn hadamard() -> Matrix2<C64> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    Matrix2::new(C64::new(h, 0.0), C64::new(h, 0.0), C64::new(h, 0.0), C64::new(-h, 0.0))
}

impl TwoDimDensity {
    pub fn new(m: Matrix2<C64>, basis: Basis) -> Result<Self> {
        if (m - m.adjoint()).iter().any(|z| z.norm() > 1e-12) {
            return Err(Error::NonPhysical("2x2 density not Hermitian".into()));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > 1e-12 || tr.im.abs() > 1e-12 {
            return Err(Error::NonPhysical(format!("2x2 trace {tr}")));
        }
        if m.determinant().re < -1e-12 || m[(0, 0)].re < -1e-12 || m[(1, 1)].re < -1e-12 {
            return Err(Error::NonPhysical("2x2 density not positive".into()));
        }
        Ok(Self { m, basis })
    }

    /// `½(1 + x σx + y σy + z σz)` in the qubit basis.
    pub fn from_bloch(b: &BlochVector) -> Self {
        let m = Matrix2::new(
            C64::new(0.5 * (1.0 + b.z), 0.0),
            C64::new(0.5 * b.x, -0.5 * b.y),
            C64::new(0.5 * b.x, 0.5 * b.y),
            C64::new(0.5 * (1.0 - b.z), 0.0),
        );
        Self { m, basis: Basis::Qubit }
    }

    pub fn to_basis(&self, basis: Basis) -> Self {
        if basis == self.basis {
            return *self;
        }
        let h = hadamard();
        Self { m: h * self.m * h, basis }
    }

    pub fn bloch(&self) -> BlochVector {
        let q = self.to_basis(Basis::Qubit).m;
        BlochVector { x: 2.0 * q[(1, 0)].re, y: 2.0 * q[(1, 0)].im, z: (q[(0, 0)] - q[(1, 1)]).re }
    }
}

/// `ρ = Σ c_ij |iα><jα|` over `i, j ∈ {+, -}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherentBasisDensity {
    pub rho_pp: C64,
    pub rho_pm: C64,
    pub rho_mp: C64,
    pub rho_mm: C64,
    pub alpha: f64,
}

impl CoherentBasisDensity {
    pub fn pure_plus(alpha: f64) -> Self {
        let zero = C64::new(0.0, 0.0);
        Self { rho_pp: C64::new(1.0, 0.0), rho_pm: zero, rho_mp: zero, rho_mm: zero, alpha }
    }

    /// `Tr ρ` accounting for the non-orthogonality of the basis.
    pub fn physical_trace(&self) -> C64 {
        let s = (-2.0 * self.alpha * self.alpha).exp();
        self.rho_pp + self.rho_mm + (self.rho_pm + self.rho_mp) * s
    }

    pub fn validate(&self) -> Result<()> {
        if (self.rho_pm - self.rho_mp.conj()).norm() > 1e-12 {
            return Err(Error::NonPhysical("off-diagonal coefficients are not conjugate".into()));
        }
        let tr = self.physical_trace();
        if (tr - 1.0).norm() > 1e-10 {
            return Err(Error::NonPhysical(format!("physical trace {tr}")));
        }
        Ok(())
    }
}

/// Change of basis from the qubit basis to the coherent pair: `|k> = Σ_i B_ki |iα>`.
fn coherent_change_of_basis(theta: f64) -> [[f64; 2]; 2] {
    let (s, c) = theta.sin_cos();
    let d = (2.0 * theta).cos();
    [[c / d, -s / d], [-s / d, c / d]]
}

pub fn bloch_to_coherent_basis(b: &BlochVector, theta: f64) -> Result<CoherentBasisDensity> {
    if FRAC_PI_4 - theta < DEGENERATE_CUTOFF {
        return Err(Error::DegenerateBasis { theta });
    }
    let (s2, c2) = (2.0 * theta).sin_cos();
    let den = 2.0 * c2 * c2;
    let rho_pp = (1.0 + b.z * c2 - b.x * s2) / den;
    let rho_mm = (1.0 - b.z * c2 - b.x * s2) / den;
    let rho_pm = C64::new(b.x - s2, -b.y * c2) / den;
    Ok(CoherentBasisDensity {
        rho_pp: C64::new(rho_pp, 0.0),
        rho_pm,
        rho_mp: rho_pm.conj(),
        rho_mm: C64::new(rho_mm, 0.0),
        alpha: OverlapAngle::from_theta(theta)?.alpha,
    })
}

/// `|Ψ±> = (|α> ± |-α>)/(√2 Ω±)` with `Ω± = √(1 ± e^{-2α²})`.
pub fn cat_basis(alpha: f64, cfg: TruncationConfig) -> Result<(PureState, PureState)> {
    // |α> ± |-α> keeps only the even / odd amplitudes of |α>; masking keeps parity exact.
    let plus = coherent_state(C64::new(alpha, 0.0), cfg)?;
    let parity_part = |keep: usize| {
        CVector::from_iterator(
            cfg.dim,
            plus.amplitudes().iter().enumerate().map(|(n, &c)| if n % 2 == keep { c } else { C64::new(0.0, 0.0) }),
        )
    };
    let (even, odd) = (parity_part(0), parity_part(1));
    let even = PureState::from_amplitudes(even.unscale(even.norm()), cfg, false)?;
    if alpha == 0.0 {
        // The odd cat degenerates to the one-photon state in the limit.
        return Ok((even, PureState::number(1, cfg)?));
    }
    let odd = PureState::from_amplitudes(odd.unscale(odd.norm()), cfg, false)?;
    Ok((even, odd))
}

/// Orthonormal qubit basis `(|0>, |1>)` in the number basis.
pub fn qubit_basis(alpha: f64, cfg: TruncationConfig) -> Result<(PureState, PureState)> {
    let theta = overlap_angle(alpha).theta;
    if FRAC_PI_4 - theta < DEGENERATE_CUTOFF {
        return Err(Error::DegenerateBasis { theta });
    }
    let b = coherent_change_of_basis(theta);
    let plus = coherent_state(C64::new(alpha, 0.0), cfg)?;
    let minus = coherent_state(C64::new(-alpha, 0.0), cfg)?;
    let build = |row: [f64; 2]| -> Result<PureState> {
        let v: CVector = plus.amplitudes() * C64::new(row[0], 0.0) + minus.amplitudes() * C64::new(row[1], 0.0);
        let n = v.norm();
        PureState::from_amplitudes(v.unscale(n), cfg, false)
    };
    Ok((build(b[0])?, build(b[1])?))
}

/// Embeds the coefficients in the number basis.
///
/// Negative eigenvalues down to `-1e-8` are clipped; anything below is
/// reported as non-physical.
pub fn coherent_basis_to_fock(c: &CoherentBasisDensity, cfg: TruncationConfig) -> Result<DensityOp> {
    c.validate()?;
    let plus = coherent_state(C64::new(c.alpha, 0.0), cfg)?;
    let minus = coherent_state(C64::new(-c.alpha, 0.0), cfg)?;
    let (p, m) = (plus.amplitudes(), minus.amplitudes());
    let mut rho: CMatrix = p * p.adjoint() * c.rho_pp
        + p * m.adjoint() * c.rho_pm
        + m * p.adjoint() * c.rho_mp
        + m * m.adjoint() * c.rho_mm;
    rho = (&rho + rho.adjoint()).scale(0.5);
    let eig = nalgebra::SymmetricEigen::new(rho.clone());
    let min_eig = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    if min_eig < -1e-8 {
        return Err(Error::NonPhysical(format!("clone density has eigenvalue {min_eig:e}")));
    }
    if min_eig < 0.0 {
        let vals = eig.eigenvalues.map(|v| C64::new(v.max(0.0), 0.0));
        rho = &eig.eigenvectors * CMatrix::from_diagonal(&vals) * eig.eigenvectors.adjoint();
        rho = (&rho + rho.adjoint()).scale(0.5);
    }
    DensityOp::from_matrix(rho, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::fidelity_pure;
    use proptest::prelude::*;

    fn cfg() -> TruncationConfig {
        TruncationConfig::new(40, 1e-10).unwrap()
    }

    #[test]
    fn overlap_angle_examples() {
        assert!((overlap_angle(0.0).theta - FRAC_PI_4).abs() < 1e-12);
        assert!(overlap_angle(10.0).theta < 1e-40);
        assert!((overlap_angle(0.581).theta - 0.267).abs() < 1e-3);
    }

    #[test]
    fn signal_bloch_examples() {
        let (p, m) = signal_bloch(0.0);
        assert_eq!((p.x, p.z, m.z), (0.0, 1.0, -1.0));
        let (p, m) = signal_bloch(FRAC_PI_4);
        assert!((p.x - 1.0).abs() < 1e-15 && p.z.abs() < 1e-15 && m.z.abs() < 1e-15);
        let theta = 0.3;
        let (p, m) = signal_bloch(theta);
        assert!((p.norm() - 1.0).abs() < 1e-15);
        let mix = (TwoDimDensity::from_bloch(&p).m + TwoDimDensity::from_bloch(&m).m) * C64::new(0.5, 0.0);
        let b = TwoDimDensity { m: mix, basis: Basis::Qubit }.bloch();
        assert!((b.x - (2.0 * theta).sin()).abs() < 1e-15 && b.z.abs() < 1e-15 && b.y == 0.0);
    }

    #[test]
    fn two_dim_validation() {
        let (p, _) = signal_bloch(0.2);
        let rho = TwoDimDensity::from_bloch(&p);
        assert!(TwoDimDensity::new(rho.m, Basis::Qubit).is_ok());
        let bad = rho.m * C64::new(2.0, 0.0);
        assert!(TwoDimDensity::new(bad, Basis::Qubit).is_err());
        assert!(BlochVector::new(1.0, 0.1, 0.0).is_err());
        let back = rho.to_basis(Basis::Cat).to_basis(Basis::Qubit);
        assert!((back.m - rho.m).norm() < 1e-15);
    }

    #[test]
    fn cat_states() {
        let (even, odd) = cat_basis(0.8, cfg()).unwrap();
        assert!(even.inner(&odd).unwrap().norm() < 1e-10);
        assert!(odd.amplitudes().iter().step_by(2).all(|z| z.norm() == 0.0));
        let omega_p = (1.0 + (-2.0 * 0.64f64).exp()).sqrt();
        let omega_m = (1.0 - (-2.0 * 0.64f64).exp()).sqrt();
        let rebuilt = (even.amplitudes() * C64::new(omega_p, 0.0) + odd.amplitudes() * C64::new(omega_m, 0.0))
            .unscale(2f64.sqrt());
        let plus = coherent_state(C64::new(0.8, 0.0), cfg()).unwrap();
        assert!((rebuilt - plus.amplitudes()).norm() < 1e-10);
    }

    #[test]
    fn small_alpha_mixture_is_diagonal_in_cat_basis() {
        for &alpha in &[1e-3, 0.3, 0.9] {
            let (even, odd) = cat_basis(alpha, cfg()).unwrap();
            let plus = coherent_state(C64::new(alpha, 0.0), cfg()).unwrap().to_density();
            let minus = coherent_state(C64::new(-alpha, 0.0), cfg()).unwrap().to_density();
            let mix = DensityOp::mixture(&[(0.5, &plus), (0.5, &minus)]).unwrap();
            let s = (-2.0 * alpha * alpha).exp();
            let pe = fidelity_pure(&mix, &even).unwrap();
            let po = fidelity_pure(&mix, &odd).unwrap();
            let cross = even.amplitudes().dotc(&(mix.matrix() * odd.amplitudes()));
            assert!((pe - 0.5 * (1.0 + s)).abs() < 1e-10);
            assert!((po - 0.5 * (1.0 - s)).abs() < 1e-10);
            assert!(cross.norm() < 1e-10);
        }
        let (even, _) = cat_basis(0.0, cfg()).unwrap();
        assert!((even.amplitudes()[0].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn qubit_basis_is_orthonormal_and_rebuilds_signals() {
        let alpha = 0.6;
        let theta = overlap_angle(alpha).theta;
        let (q0, q1) = qubit_basis(alpha, cfg()).unwrap();
        assert!(q0.inner(&q1).unwrap().norm() < 1e-10);
        assert!((q0.norm() - 1.0).abs() < 1e-12);
        let v = q0.amplitudes() * C64::new(theta.cos(), 0.0) + q1.amplitudes() * C64::new(theta.sin(), 0.0);
        let psi = PureState::from_amplitudes(v, cfg(), false).unwrap();
        let plus = coherent_state(C64::new(alpha, 0.0), cfg()).unwrap();
        assert!((plus.inner(&psi).unwrap().norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn signal_vectors_map_to_pure_projectors() {
        let theta = 0.25;
        let (p, m) = signal_bloch(theta);
        let cp = bloch_to_coherent_basis(&p, theta).unwrap();
        let cm = bloch_to_coherent_basis(&m, theta).unwrap();
        assert!((cp.rho_pp - 1.0).norm() < 1e-12 && cp.rho_pm.norm() < 1e-12 && cp.rho_mm.norm() < 1e-12);
        assert!((cm.rho_mm - 1.0).norm() < 1e-12 && cm.rho_pm.norm() < 1e-12 && cm.rho_pp.norm() < 1e-12);

        let rho = coherent_basis_to_fock(&cp, cfg()).unwrap();
        let plus = coherent_state(C64::new(cp.alpha, 0.0), cfg()).unwrap();
        assert!(fidelity_pure(&rho, &plus).unwrap() >= 1.0 - 1e-8);
        let rho = coherent_basis_to_fock(&cm, cfg()).unwrap();
        let minus = coherent_state(C64::new(-cm.alpha, 0.0), cfg()).unwrap();
        assert!(fidelity_pure(&rho, &minus).unwrap() >= 1.0 - 1e-8);
    }

    #[test]
    fn degenerate_basis_is_rejected() {
        let (p, _) = signal_bloch(FRAC_PI_4);
        assert!(matches!(bloch_to_coherent_basis(&p, FRAC_PI_4 - 1e-7), Err(Error::DegenerateBasis { .. })));
    }

    #[test]
    fn equal_mixture_embeds_with_unit_trace() {
        let alpha = 0.7;
        let c = CoherentBasisDensity {
            rho_pp: C64::new(0.5, 0.0),
            rho_pm: C64::new(0.0, 0.0),
            rho_mp: C64::new(0.0, 0.0),
            rho_mm: C64::new(0.5, 0.0),
            alpha,
        };
        let rho = coherent_basis_to_fock(&c, cfg()).unwrap();
        assert!((rho.trace() - 1.0).abs() < 1e-10);
        assert_eq!(coherent_basis_to_fock(&CoherentBasisDensity::pure_plus(alpha), cfg()).unwrap().purity() > 0.999, true);
    }

    proptest! {
        #[test]
        fn coefficients_match_change_of_basis(theta in 0.01f64..0.78, r in 0.0f64..1.0, phi in 0.0f64..std::f64::consts::TAU, y in -0.2f64..0.2) {
            let (x, z) = (r * phi.cos() * (1.0 - y * y).sqrt(), r * phi.sin() * (1.0 - y * y).sqrt());
            let b = BlochVector::new(x, y, z).unwrap();
            let c = bloch_to_coherent_basis(&b, theta).unwrap();
            let q = TwoDimDensity::from_bloch(&b).m;
            let bm = coherent_change_of_basis(theta);
            let bm = Matrix2::new(bm[0][0], bm[0][1], bm[1][0], bm[1][1]).map(|v| C64::new(v, 0.0));
            let oracle = bm.transpose() * q * bm;
            let scale = 1.0 / (2.0 * theta).cos().powi(2);
            prop_assert!((oracle[(0, 0)] - c.rho_pp).norm() < 1e-12 * scale);
            prop_assert!((oracle[(0, 1)] - c.rho_pm).norm() < 1e-12 * scale);
            prop_assert!((oracle[(1, 0)] - c.rho_mp).norm() < 1e-12 * scale);
            prop_assert!((oracle[(1, 1)] - c.rho_mm).norm() < 1e-12 * scale);
            prop_assert!((c.physical_trace() - 1.0).norm() < 1e-10);
        }

        #[test]
        fn overlap_angle_round_trips(theta in 0.0f64..FRAC_PI_4) {
            let a = OverlapAngle::from_theta(theta).unwrap();
            prop_assert!((overlap_angle(a.alpha).theta - theta).abs() < 1e-10);
            prop_assert!(((2.0 * theta).sin() - (-2.0 * a.alpha * a.alpha).exp()).abs() < 1e-12);
        }
    }
}
