//! Single- and two-mode Gaussian phase-space calculus.
//!
//! Means are `(<x>, <p>)` and covariances use the same convention as the
//! Fock layer: the vacuum covariance is `I/4`. Beam-splitter transmissivities
//! are intensity transmissivities `T ∈ [0, 1]` (amplitude factor `√T`).

use nalgebra::{Matrix2, Matrix4, SymmetricEigen, Vector2, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{self, C64, CMatrix, DensityOp, LinearOp, TruncationConfig};

/// Heisenberg bound `det Σ >= 1/16` in the shot-noise-1/4 convention.
pub const MIN_DET: f64 = 1.0 / 16.0;

fn rotation(phi: f64) -> Matrix2<f64> {
    let (s, c) = phi.sin_cos();
    Matrix2::new(c, -s, s, c)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianState {
    pub mean: Vector2<f64>,
    pub cov: Matrix2<f64>,
}

impl GaussianState {
    pub fn new(mean: Vector2<f64>, cov: Matrix2<f64>) -> Result<Self> {
        if (cov[(0, 1)] - cov[(1, 0)]).abs() > 1e-12 {
            return Err(Error::NonPhysicalCovariance("not symmetric".into()));
        }
        let eig = SymmetricEigen::new(cov);
        if eig.eigenvalues.iter().any(|&v| !(v > 0.0)) {
            return Err(Error::NonPhysicalCovariance(format!("eigenvalues {:?}", eig.eigenvalues)));
        }
        if cov.determinant() < MIN_DET - 1e-12 {
            return Err(Error::NonPhysicalCovariance(format!(
                "det {} below the uncertainty bound 1/16",
                cov.determinant()
            )));
        }
        Ok(Self { mean, cov })
    }

    pub fn vacuum() -> Self {
        Self { mean: Vector2::zeros(), cov: Matrix2::identity() * 0.25 }
    }

    pub fn coherent(alpha: C64) -> Self {
        Self { mean: Vector2::new(alpha.re, alpha.im), cov: Matrix2::identity() * 0.25 }
    }

    /// Vacuum squeezed by `r` along the quadrature at angle `axis`
    /// (variance `e^{-2r}/4` there, `e^{+2r}/4` orthogonally).
    pub fn squeezed_vacuum(r: f64, axis: f64) -> Self {
        let rot = rotation(axis);
        let d = Matrix2::new((-2.0 * r).exp(), 0.0, 0.0, (2.0 * r).exp()) * 0.25;
        Self { mean: Vector2::zeros(), cov: rot * d * rot.transpose() }
    }

    /// Phase-sensitive amplification: the symplectic map `diag(e^r, e^-r)`
    /// rotated so that the amplified axis sits at angle `phi`.
    pub fn squeeze(&self, r: f64, phi: f64) -> Self {
        let rot = rotation(phi);
        let m = rot * Matrix2::new(r.exp(), 0.0, 0.0, (-r).exp()) * rot.transpose();
        Self { mean: m * self.mean, cov: m * self.cov * m.transpose() }
    }

    pub fn displace(&self, dx: f64, dp: f64) -> Self {
        Self { mean: self.mean + Vector2::new(dx, dp), cov: self.cov }
    }

    /// Mean amplitude as a complex number `<x> + i<p>`.
    pub fn amplitude(&self) -> C64 {
        C64::new(self.mean[0], self.mean[1])
    }

    pub fn det(&self) -> f64 {
        self.cov.determinant()
    }

    /// Symplectic eigenvalue, 1 for pure states.
    pub fn symplectic_eigenvalue(&self) -> f64 {
        4.0 * self.det().max(0.0).sqrt()
    }

    pub fn purity(&self) -> f64 {
        1.0 / self.symplectic_eigenvalue()
    }

    pub fn is_pure(&self, tol: f64) -> bool {
        self.det() <= MIN_DET + tol
    }

    pub fn mean_photon_number(&self) -> f64 {
        self.cov.trace() + self.mean.norm_squared() - 0.5
    }

    /// `Tr[ρ_a ρ_b]`; equals `|<a|b>|²` when both states are pure.
    pub fn overlap(&self, other: &GaussianState) -> Result<f64> {
        let s = self.cov + other.cov;
        let det = s.determinant();
        if !(det > 0.0) {
            return Err(Error::NonPhysicalCovariance(format!("det(Σa+Σb) = {det}")));
        }
        let inv = s.try_inverse().ok_or_else(|| Error::NonPhysicalCovariance("singular".into()))?;
        let d = self.mean - other.mean;
        Ok((-0.5 * d.dot(&(inv * d))).exp() / (2.0 * det.sqrt()))
    }

    /// Builds the state in the number basis as `D(β) S(z) ρ_th S(z)† D(β)†`.
    pub fn to_density(&self, cfg: TruncationConfig) -> Result<DensityOp> {
        let nu = self.symplectic_eigenvalue();
        let nbar = ((nu - 1.0) / 2.0).max(0.0);
        let eig = SymmetricEigen::new(self.cov);
        let (imin, imax) = if eig.eigenvalues[0] <= eig.eigenvalues[1] { (0, 1) } else { (1, 0) };
        let lmin = eig.eigenvalues[imin];
        let lmax = eig.eigenvalues[imax];
        let v = eig.eigenvectors.column(imin);
        let axis = v[1].atan2(v[0]);
        let r = 0.25 * (lmax / lmin).ln();
        let z = C64::from_polar(r, 2.0 * axis);

        let (pops, lost) = fock::thermal_populations(nbar, cfg.dim);
        if lost > cfg.tail_tol {
            return Err(Error::Truncation { dim: cfg.dim, leak: lost, tol: cfg.tail_tol });
        }
        let diag = fock::CVector::from_iterator(cfg.dim, pops.iter().map(|&w| C64::new(w, 0.0)));
        let thermal = CMatrix::from_diagonal(&diag);
        let u = fock::displacement_op(self.amplitude(), cfg)?.compose(&fock::squeeze_op(z, cfg)?)?;
        let m = u.matrix() * thermal * u.matrix().adjoint();
        let tr = m.trace().re;
        if (1.0 - tr).abs() > cfg.tail_tol {
            return Err(Error::Truncation { dim: cfg.dim, leak: (1.0 - tr).abs(), tol: cfg.tail_tol });
        }
        DensityOp::from_matrix(m.map(|w| w / tr), cfg)
    }
}

/// `<α|ρ_g|α> = exp(-½ δᵀ(Σ + I/4)⁻¹ δ) / (2 √det(Σ + I/4))`.
///
/// The `1/2` prefactor is fixed by requiring vacuum-vs-vacuum to give 1 in
/// the `1/4` convention, and is checked against the Fock oracle in tests.
pub fn overlap_with_coherent(g: &GaussianState, alpha: C64) -> Result<f64> {
    if g.det() < MIN_DET - 1e-10 {
        return Err(Error::NonPhysicalCovariance(format!("det {}", g.det())));
    }
    g.overlap(&GaussianState::coherent(alpha))
}

/// Two modes ordered `(x1, p1, x2, p2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoModeGaussian {
    pub mean: Vector4<f64>,
    pub cov: Matrix4<f64>,
}

impl TwoModeGaussian {
    pub fn product(a: &GaussianState, b: &GaussianState) -> Self {
        let mut mean = Vector4::zeros();
        let mut cov = Matrix4::zeros();
        mean.fixed_rows_mut::<2>(0).copy_from(&a.mean);
        mean.fixed_rows_mut::<2>(2).copy_from(&b.mean);
        cov.fixed_view_mut::<2, 2>(0, 0).copy_from(&a.cov);
        cov.fixed_view_mut::<2, 2>(2, 2).copy_from(&b.cov);
        Self { mean, cov }
    }

    /// Largest violation of `Σ + iΩ/4 ≽ 0` (zero when physical).
    pub fn physicality_defect(&self) -> f64 {
        let mut h = nalgebra::Matrix4::<C64>::zeros();
        for i in 0..4 {
            for j in 0..4 {
                h[(i, j)] = C64::new(self.cov[(i, j)], 0.0);
            }
        }
        for k in 0..2 {
            h[(2 * k, 2 * k + 1)] += C64::new(0.0, 0.25);
            h[(2 * k + 1, 2 * k)] -= C64::new(0.0, 0.25);
        }
        let eig = SymmetricEigen::new(h);
        eig.eigenvalues.iter().cloned().fold(0.0_f64, |acc, v| acc.max(-v))
    }

    pub fn validate(&self) -> Result<()> {
        if (self.cov - self.cov.transpose()).abs().max() > 1e-12 {
            return Err(Error::NonPhysicalCovariance("not symmetric".into()));
        }
        let defect = self.physicality_defect();
        if defect > 1e-10 {
            return Err(Error::NonPhysicalCovariance(format!("uncertainty violated by {defect:e}")));
        }
        Ok(())
    }

    pub fn mean_photon_number(&self) -> f64 {
        partial_trace(self, 0).mean_photon_number() + partial_trace(self, 1).mean_photon_number()
    }
}

/// Beam splitter with intensity transmissivity `t`:
/// `out1 = √T in1 + √(1-T) in2`, `out2 = √(1-T) in1 - √T in2`.
pub fn beamsplit(a: &GaussianState, b: &GaussianState, t: f64) -> Result<TwoModeGaussian> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidArgument(format!("transmissivity {t} outside [0, 1]")));
    }
    let (ta, ra) = (t.sqrt(), (1.0 - t).sqrt());
    let mut s = Matrix4::zeros();
    for q in 0..2 {
        s[(q, q)] = ta;
        s[(q, 2 + q)] = ra;
        s[(2 + q, q)] = ra;
        s[(2 + q, 2 + q)] = -ta;
    }
    let input = TwoModeGaussian::product(a, b);
    Ok(TwoModeGaussian { mean: s * input.mean, cov: s * input.cov * s.transpose() })
}

/// Reduced state of mode `keep` (0 or 1).
pub fn partial_trace(tm: &TwoModeGaussian, keep: usize) -> GaussianState {
    let o = 2 * keep.min(1);
    GaussianState {
        mean: tm.mean.fixed_rows::<2>(o).into_owned(),
        cov: tm.cov.fixed_view::<2, 2>(o, o).into_owned(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianMixture {
    components: Vec<(f64, GaussianState)>,
}

impl GaussianMixture {
    pub fn new(components: Vec<(f64, GaussianState)>) -> Result<Self> {
        let total: f64 = components.iter().map(|(w, _)| *w).sum();
        if components.iter().any(|(w, _)| !(0.0..=1.0).contains(w)) || (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("mixture weights sum to {total}")));
        }
        Ok(Self { components })
    }

    pub fn single(g: GaussianState) -> Self {
        Self { components: vec![(1.0, g)] }
    }

    pub fn components(&self) -> &[(f64, GaussianState)] {
        &self.components
    }

    /// Linear in the state: weighted sum of component overlaps.
    pub fn overlap_with_coherent(&self, alpha: C64) -> Result<f64> {
        self.components
            .iter()
            .map(|(w, g)| overlap_with_coherent(g, alpha).map(|f| w * f))
            .sum()
    }

    pub fn to_density(&self, cfg: TruncationConfig) -> Result<DensityOp> {
        let parts = self
            .components
            .iter()
            .map(|(w, g)| g.to_density(cfg).map(|r| (*w, r)))
            .collect::<Result<Vec<_>>>()?;
        let refs: Vec<(f64, &DensityOp)> = parts.iter().map(|(w, r)| (*w, r)).collect();
        DensityOp::mixture(&refs)
    }
}

/// Fock-space image of the quadrature pair, convenient for checks.
pub fn quadrature_moments(rho: &DensityOp) -> Result<(Vector2<f64>, Matrix2<f64>)> {
    use crate::fock::FockState;
    let (x, p) = fock::quadrature_ops(rho.config());
    let mx = rho.expect(&x)?.re;
    let mp = rho.expect(&p)?.re;
    let xx = rho.expect(&x.pow(2))?.re - mx * mx;
    let pp = rho.expect(&p.pow(2))?.re - mp * mp;
    let sym: LinearOp = x.compose(&p)?.add(&p.compose(&x)?)?;
    let xp = 0.5 * rho.expect(&sym)?.re - mx * mp;
    Ok((Vector2::new(mx, mp), Matrix2::new(xx, xp, xp, pp)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{coherent_state, displaced_squeezed_vacuum, fidelity_pure};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn coherent_examples() {
        let v = GaussianState::coherent(C64::new(0.0, 0.0));
        assert_eq!(v, GaussianState::vacuum());
        let g = GaussianState::coherent(C64::new(0.5, 0.0));
        assert_eq!(g.mean, Vector2::new(0.5, 0.0));
    }

    #[test]
    fn rejects_unphysical_covariance() {
        let bad = Matrix2::new(0.1, 0.0, 0.0, 0.1);
        assert!(GaussianState::new(Vector2::zeros(), bad).is_err());
        let asym = Matrix2::new(0.3, 0.1, 0.0, 0.3);
        assert!(GaussianState::new(Vector2::zeros(), asym).is_err());
    }

    #[test]
    fn squeeze_examples() {
        let g = GaussianState::coherent(C64::new(0.4, 0.0));
        assert_eq!(g.squeeze(0.0, 0.0), g);
        let v = GaussianState::vacuum().squeeze(0.3, 0.0);
        assert!(close(v.cov[(0, 0)], 0.6f64.exp() / 4.0, 1e-15));
        assert!(close(v.cov[(1, 1)], (-0.6f64).exp() / 4.0, 1e-15));
        let s = g.squeeze(0.2, 0.0);
        assert!(close(s.mean[0], 0.2f64.exp() * 0.4, 1e-15));
        assert!(close(s.det(), MIN_DET, 1e-15));
    }

    #[test]
    fn squeeze_matches_fock_operator() {
        // Amplifying x by r is S(z) with z = -r in the Fock convention.
        let cfg = TruncationConfig::new(60, 1e-10).unwrap();
        let alpha = 0.4;
        let fock_state = fock::squeeze_op(C64::new(-0.25, 0.0), cfg)
            .unwrap()
            .apply(&coherent_state(C64::new(alpha, 0.0), cfg).unwrap())
            .unwrap();
        let (m, c) = quadrature_moments(&fock_state.to_density()).unwrap();
        let g = GaussianState::coherent(C64::new(alpha, 0.0)).squeeze(0.25, 0.0);
        assert!((m - g.mean).norm() < 1e-9);
        assert!((c - g.cov).norm() < 1e-9);
    }

    #[test]
    fn beamsplit_examples() {
        let a = GaussianState::coherent(C64::new(0.7, 0.1));
        let b = GaussianState::squeezed_vacuum(0.4, 0.0);
        let tm = beamsplit(&a, &b, 1.0).unwrap();
        assert_eq!(partial_trace(&tm, 0), a);
        let alpha = 0.9;
        let tm = beamsplit(&GaussianState::coherent(C64::new(alpha, 0.0)), &GaussianState::vacuum(), 0.5).unwrap();
        assert!(close(partial_trace(&tm, 0).mean[0], alpha / 2f64.sqrt(), 1e-15));
        let tm = beamsplit(&a, &b, 0.5).unwrap();
        let avg = (a.cov + b.cov) * 0.5;
        assert!((partial_trace(&tm, 0).cov - avg).norm() < 1e-15);
        assert!((partial_trace(&tm, 1).cov - avg).norm() < 1e-15);
        assert!(tm.validate().is_ok());
        assert!(close(tm.mean_photon_number(), a.mean_photon_number() + b.mean_photon_number(), 1e-12));
        assert!(beamsplit(&a, &b, 1.5).is_err());
    }

    #[test]
    fn tap_off_with_vacuum() {
        let g = GaussianState::coherent(C64::new(0.8, -0.2)).squeeze(0.3, 0.4);
        for &t in &[0.0, 0.2, 0.7, 1.0] {
            let out = partial_trace(&beamsplit(&g, &GaussianState::vacuum(), t).unwrap(), 0);
            assert!((out.mean - g.mean * t.sqrt()).norm() < 1e-15);
            let expect = g.cov * t + Matrix2::identity() * (0.25 * (1.0 - t));
            assert!((out.cov - expect).norm() < 1e-15);
        }
    }

    #[test]
    fn entangled_reduced_state_is_mixed() {
        let tm = beamsplit(&GaussianState::squeezed_vacuum(0.5, 0.0), &GaussianState::vacuum(), 0.5).unwrap();
        let red = partial_trace(&tm, 0);
        assert!(red.det() > MIN_DET + 1e-6);
        assert!(red.purity() < 1.0);
        let prod = TwoModeGaussian::product(&GaussianState::vacuum(), &red);
        assert_eq!(partial_trace(&prod, 1), red);
    }

    #[test]
    fn unphysical_two_mode_is_rejected() {
        let mut tm = TwoModeGaussian::product(&GaussianState::vacuum(), &GaussianState::vacuum());
        tm.cov[(0, 0)] = 0.05;
        assert!(tm.validate().is_err());
    }

    #[test]
    fn coherent_overlap_examples() {
        let alpha = C64::new(0.6, 0.0);
        assert!(close(overlap_with_coherent(&GaussianState::coherent(alpha), alpha).unwrap(), 1.0, 1e-15));
        let f = overlap_with_coherent(&GaussianState::coherent(-alpha), alpha).unwrap();
        assert!(close(f, (-4.0 * 0.36f64).exp(), 1e-15));
        let bad = GaussianState { mean: Vector2::zeros(), cov: Matrix2::identity() * 0.1 };
        assert!(overlap_with_coherent(&bad, alpha).is_err());
    }

    #[test]
    fn overlap_agrees_with_fock_on_random_states() {
        let cfg = TruncationConfig::new(60, 1e-9).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut worst = 0.0_f64;
        for _ in 0..20 {
            let beta = C64::from_polar(rng.random_range(0.0..1.0), rng.random_range(0.0..std::f64::consts::TAU));
            let r = rng.random_range(0.0..0.6);
            let axis = rng.random_range(0.0..std::f64::consts::PI);
            let alpha = C64::from_polar(rng.random_range(0.0..1.0), rng.random_range(0.0..std::f64::consts::TAU));
            let psi = displaced_squeezed_vacuum(beta, C64::from_polar(r, 2.0 * axis), cfg).unwrap();
            let f_fock = fidelity_pure(&psi.to_density(), &coherent_state(alpha, cfg).unwrap()).unwrap();
            let g = GaussianState::squeezed_vacuum(r, axis).displace(beta.re, beta.im);
            let f_gauss = overlap_with_coherent(&g, alpha).unwrap();
            worst = worst.max((f_fock - f_gauss).abs());
        }
        assert!(worst <= 1e-8, "max deviation {worst:e}");
    }

    #[test]
    fn to_density_reproduces_moments_for_mixed_states() {
        let cfg = TruncationConfig::new(50, 1e-9).unwrap();
        let tm = beamsplit(
            &GaussianState::coherent(C64::new(0.5, 0.2)),
            &GaussianState::squeezed_vacuum(0.4, 0.3),
            0.6,
        )
        .unwrap();
        let g = partial_trace(&tm, 1);
        let rho = g.to_density(cfg).unwrap();
        let (m, c) = quadrature_moments(&rho).unwrap();
        assert!((m - g.mean).norm() < 1e-8);
        assert!((c - g.cov).norm() < 1e-8);
        assert!(close(rho.purity(), g.purity(), 1e-8));
    }

    #[test]
    fn mixture_fidelity_is_linear() {
        let alpha = C64::new(0.7, 0.0);
        let a = GaussianState::coherent(C64::new(0.6, 0.0)).squeeze(0.1, 0.0);
        let b = GaussianState::coherent(C64::new(-0.6, 0.0)).squeeze(0.1, 0.0);
        let mix = GaussianMixture::new(vec![(0.8, a), (0.2, b)]).unwrap();
        let expect = 0.8 * overlap_with_coherent(&a, alpha).unwrap() + 0.2 * overlap_with_coherent(&b, alpha).unwrap();
        assert!(close(mix.overlap_with_coherent(alpha).unwrap(), expect, 1e-15));
        assert!(GaussianMixture::new(vec![(0.8, a), (0.3, b)]).is_err());
    }
}
