//! Truncated number-basis numerics.
//!
//! Quadratures follow the shot-noise convention `x = (a + a†)/2`,
//! `p = (a - a†)/(2i)`, so the vacuum variance is 1/4 and `<α|x|α> = Re α`.
//! Squeezing uses `S(z) = exp((z* a² - z a†²)/2)`, which for real `z = r > 0`
//! squeezes `x` (variance `e^{-2r}/4`).

use log::debug;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Hermiticity tolerance for density operators (elementwise).
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Eigenvalues above `-EIGEN_FLOOR` count as non-negative round-off.
pub const EIGEN_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationConfig {
    pub dim: usize,
    pub tail_tol: f64,
}

impl TruncationConfig {
    pub const DEFAULT_TAIL_TOL: f64 = 1e-10;

    pub fn new(dim: usize, tail_tol: f64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidArgument(format!("dim must be >= 2, got {dim}")));
        }
        if !(tail_tol >= 0.0) {
            return Err(Error::InvalidArgument(format!("tail_tol must be >= 0, got {tail_tol}")));
        }
        Ok(Self { dim, tail_tol })
    }

    /// Default sizing for states built from amplitudes `alpha` and `beta`:
    /// `max(20, ceil(8 (|α|+|β|)² + 20))` levels, tail tolerance 1e-10.
    pub fn for_amplitudes(alpha: f64, beta: f64) -> Self {
        let s = alpha.abs() + beta.abs();
        let dim = (8.0 * s * s + 20.0).ceil().max(20.0) as usize;
        Self { dim, tail_tol: Self::DEFAULT_TAIL_TOL }
    }

    pub fn with_dim(self, dim: usize) -> Self {
        Self { dim, ..self }
    }

    pub fn doubled(self) -> Self {
        self.with_dim(self.dim * 2)
    }

    fn ensure_same(&self, other: &TruncationConfig) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: other.dim });
        }
        Ok(())
    }
}

fn ln_factorial(n: usize) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

/// Fock amplitudes `e^{-|α|²/2} αⁿ/√n!` for `n < dim`, evaluated in log space.
pub fn coherent_amplitudes(alpha: C64, dim: usize) -> CVector {
    let r = alpha.norm();
    let phase = alpha.arg();
    CVector::from_fn(dim, |n, _| {
        if r == 0.0 {
            return if n == 0 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
        }
        let log_mag = -0.5 * r * r + n as f64 * r.ln() - 0.5 * ln_factorial(n);
        C64::from_polar(log_mag.exp(), n as f64 * phase)
    })
}

/// A normalized state vector in the truncated number basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: CVector,
    config: TruncationConfig,
    norm_deficit: f64,
}

impl PureState {
    /// Wraps raw amplitudes. The norm deficit `1 - Σ|cₙ|²` must not exceed
    /// `tail_tol`; when `renormalize` is set the vector is rescaled to unit
    /// norm and the deficit is kept on record.
    pub fn from_amplitudes(amplitudes: CVector, config: TruncationConfig, renormalize: bool) -> Result<Self> {
        if amplitudes.len() != config.dim {
            return Err(Error::DimensionMismatch { left: amplitudes.len(), right: config.dim });
        }
        let norm_sq = amplitudes.norm_squared();
        let deficit = 1.0 - norm_sq;
        if deficit.abs() > config.tail_tol.max(1e-14) {
            return Err(Error::Truncation { dim: config.dim, leak: deficit.abs(), tol: config.tail_tol });
        }
        let amplitudes = if renormalize && norm_sq > 0.0 {
            if deficit != 0.0 {
                debug!("renormalizing state at dim {}: norm deficit {:e}", config.dim, deficit);
            }
            amplitudes.unscale(norm_sq.sqrt())
        } else {
            amplitudes
        };
        Ok(Self { amplitudes, config, norm_deficit: deficit })
    }

    pub fn number(n: usize, config: TruncationConfig) -> Result<Self> {
        if n >= config.dim {
            return Err(Error::Truncation { dim: config.dim, leak: 1.0, tol: config.tail_tol });
        }
        let mut v = CVector::zeros(config.dim);
        v[n] = C64::new(1.0, 0.0);
        Ok(Self { amplitudes: v, config, norm_deficit: 0.0 })
    }

    pub fn vacuum(config: TruncationConfig) -> Self {
        Self::number(0, config).expect("dim >= 2")
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn config(&self) -> TruncationConfig {
        self.config
    }

    /// Weight that was missing before renormalization.
    pub fn norm_deficit(&self) -> f64 {
        self.norm_deficit
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PureState) -> Result<C64> {
        self.config.ensure_same(&other.config)?;
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    pub fn to_density(&self) -> DensityOp {
        let m = &self.amplitudes * self.amplitudes.adjoint();
        DensityOp { matrix: m, config: self.config }
    }

    /// Weight carried by the top `levels` basis states.
    pub fn edge_weight(&self, levels: usize) -> f64 {
        let d = self.config.dim;
        let start = d.saturating_sub(levels);
        (start..d).map(|n| self.amplitudes[n].norm_sqr()).sum()
    }
}

/// A density operator in the truncated number basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOp {
    matrix: CMatrix,
    config: TruncationConfig,
}

impl DensityOp {
    /// Validates Hermiticity, trace and positivity.
    pub fn from_matrix(matrix: CMatrix, config: TruncationConfig) -> Result<Self> {
        if matrix.nrows() != config.dim || matrix.ncols() != config.dim {
            return Err(Error::DimensionMismatch { left: matrix.nrows(), right: config.dim });
        }
        let herm_defect = (&matrix - matrix.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm_defect > HERMITIAN_TOL {
            return Err(Error::NonPhysical(format!("hermiticity defect {herm_defect:e}")));
        }
        let rho = Self { matrix, config };
        let tr = rho.trace();
        if (1.0 - tr).abs() > config.tail_tol.max(1e-12) {
            return Err(Error::Truncation { dim: config.dim, leak: (1.0 - tr).abs(), tol: config.tail_tol });
        }
        let min_eig = rho.eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min);
        if min_eig < -EIGEN_FLOOR {
            return Err(Error::NonPhysical(format!("negative eigenvalue {min_eig:e}")));
        }
        Ok(rho)
    }

    /// Convex combination of states sharing a config.
    pub fn mixture(parts: &[(f64, &DensityOp)]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty mixture".into()))?
            .1;
        let mut m = CMatrix::zeros(first.config.dim, first.config.dim);
        for (w, rho) in parts {
            first.config.ensure_same(&rho.config)?;
            m += rho.matrix.scale(*w);
        }
        Ok(Self { matrix: m, config: first.config })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn config(&self) -> TruncationConfig {
        self.config
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let herm = (&self.matrix + self.matrix.adjoint()).scale(0.5);
        SymmetricEigen::new(herm).eigenvalues.iter().cloned().collect()
    }

    /// Drops eigenvalues in `[-EIGEN_FLOOR, 0)`; anything more negative is an error.
    pub fn clip_negative(&self) -> Result<Self> {
        let herm = (&self.matrix + self.matrix.adjoint()).scale(0.5);
        let eig = SymmetricEigen::new(herm);
        let min_eig = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        if min_eig < -EIGEN_FLOOR {
            return Err(Error::NonPhysical(format!("negative eigenvalue {min_eig:e}")));
        }
        if min_eig >= 0.0 {
            return Ok(self.clone());
        }
        let vals = eig.eigenvalues.map(|v| C64::new(v.max(0.0), 0.0));
        let m = &eig.eigenvectors * CMatrix::from_diagonal(&vals) * eig.eigenvectors.adjoint();
        Ok(Self { matrix: m, config: self.config })
    }

    /// `<m|rho|n>` restricted to the retained levels.
    pub fn element(&self, m: usize, n: usize) -> C64 {
        self.matrix[(m, n)]
    }

    /// Weight on the top `levels` diagonal entries.
    pub fn edge_weight(&self, levels: usize) -> f64 {
        let d = self.config.dim;
        (d.saturating_sub(levels)..d).map(|n| self.matrix[(n, n)].re).sum()
    }
}

/// An operator on the truncated space.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearOp {
    matrix: CMatrix,
    config: TruncationConfig,
}

impl LinearOp {
    pub fn from_matrix(matrix: CMatrix, config: TruncationConfig) -> Result<Self> {
        if matrix.nrows() != config.dim || matrix.ncols() != config.dim {
            return Err(Error::DimensionMismatch { left: matrix.nrows(), right: config.dim });
        }
        Ok(Self { matrix, config })
    }

    pub fn identity(config: TruncationConfig) -> Self {
        Self { matrix: CMatrix::identity(config.dim, config.dim), config }
    }

    pub fn annihilation(config: TruncationConfig) -> Self {
        let d = config.dim;
        let m = CMatrix::from_fn(d, d, |i, j| {
            if j == i + 1 { C64::new((j as f64).sqrt(), 0.0) } else { C64::new(0.0, 0.0) }
        });
        Self { matrix: m, config }
    }

    pub fn creation(config: TruncationConfig) -> Self {
        Self::annihilation(config).adjoint()
    }

    pub fn number(config: TruncationConfig) -> Self {
        let diag = CVector::from_fn(config.dim, |n, _| C64::new(n as f64, 0.0));
        Self { matrix: CMatrix::from_diagonal(&diag), config }
    }

    pub fn parity(config: TruncationConfig) -> Self {
        let diag = CVector::from_fn(config.dim, |n, _| {
            C64::new(if n % 2 == 0 { 1.0 } else { -1.0 }, 0.0)
        });
        Self { matrix: CMatrix::from_diagonal(&diag), config }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn config(&self) -> TruncationConfig {
        self.config
    }

    pub fn adjoint(&self) -> Self {
        Self { matrix: self.matrix.adjoint(), config: self.config }
    }

    pub fn compose(&self, other: &LinearOp) -> Result<Self> {
        self.config.ensure_same(&other.config)?;
        Ok(Self { matrix: &self.matrix * &other.matrix, config: self.config })
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { matrix: self.matrix.map(|z| z * s), config: self.config }
    }

    pub fn add(&self, other: &LinearOp) -> Result<Self> {
        self.config.ensure_same(&other.config)?;
        Ok(Self { matrix: &self.matrix + &other.matrix, config: self.config })
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut m = CMatrix::identity(self.config.dim, self.config.dim);
        for _ in 0..k {
            m = &m * &self.matrix;
        }
        Self { matrix: m, config: self.config }
    }

    /// `U|ψ>`; the result is renormalized (explicitly) within `tail_tol`.
    pub fn apply(&self, psi: &PureState) -> Result<PureState> {
        self.config.ensure_same(&psi.config)?;
        PureState::from_amplitudes(&self.matrix * &psi.amplitudes, self.config, true)
    }

    /// `U ρ U†`.
    pub fn conjugate(&self, rho: &DensityOp) -> Result<DensityOp> {
        self.config.ensure_same(&rho.config)?;
        let m = &self.matrix * &rho.matrix * self.matrix.adjoint();
        Ok(DensityOp { matrix: m, config: self.config })
    }

    /// `max |(U†U - 1)_{ij}|` over the lower half of the basis.
    pub fn unitarity_defect_lower_half(&self) -> f64 {
        let h = self.config.dim / 2;
        let g = self.matrix.adjoint() * &self.matrix;
        let mut worst = 0.0_f64;
        for i in 0..h {
            for j in 0..h {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[(i, j)] - C64::new(target, 0.0)).norm());
            }
        }
        worst
    }
}

/// States the expectation/fidelity routines accept.
pub trait FockState {
    fn config(&self) -> TruncationConfig;
    /// `Tr[ρ Op]`.
    fn expect(&self, op: &LinearOp) -> Result<C64>;
    fn density(&self) -> DensityOp;
}

impl FockState for PureState {
    fn config(&self) -> TruncationConfig {
        self.config
    }

    fn expect(&self, op: &LinearOp) -> Result<C64> {
        self.config.ensure_same(&op.config)?;
        Ok(self.amplitudes.dotc(&(&op.matrix * &self.amplitudes)))
    }

    fn density(&self) -> DensityOp {
        self.to_density()
    }
}

impl FockState for DensityOp {
    fn config(&self) -> TruncationConfig {
        self.config
    }

    fn expect(&self, op: &LinearOp) -> Result<C64> {
        self.config.ensure_same(&op.config)?;
        // Tr[ρ O] = Σ_ij ρ_ij O_ji
        let d = self.config.dim;
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..d {
            for j in 0..d {
                acc += self.matrix[(i, j)] * op.matrix[(j, i)];
            }
        }
        Ok(acc)
    }

    fn density(&self) -> DensityOp {
        self.clone()
    }
}

/// Coherent state `|α>`. Errors when the Poisson weight beyond the cutoff
/// exceeds `tail_tol`; otherwise renormalizes and records the deficit.
pub fn coherent_state(alpha: C64, cfg: TruncationConfig) -> Result<PureState> {
    let amps = coherent_amplitudes(alpha, cfg.dim);
    PureState::from_amplitudes(amps, cfg, true)
}

/// Leakage of a truncated unitary: distance between its vacuum column and
/// the exact image of the vacuum, plus the exact weight beyond the cutoff.
fn vacuum_column_leakage(u: &CMatrix, exact: &CVector, exact_tail: f64) -> f64 {
    let col = u.column(0);
    let diff: f64 = col.iter().zip(exact.iter()).map(|(a, b)| (a - b).norm_sqr()).sum();
    diff.max(exact_tail)
}

/// `D(β) = exp(β a† - β* a)` from the matrix exponential of the truncated generator.
pub fn displacement_op(beta: C64, cfg: TruncationConfig) -> Result<LinearOp> {
    let a = LinearOp::annihilation(cfg);
    let gen = a.matrix.adjoint().map(|z| z * beta) - a.matrix.map(|z| z * beta.conj());
    let u = gen.exp();
    let exact = coherent_amplitudes(beta, cfg.dim);
    let tail = (1.0 - exact.norm_squared()).max(0.0);
    let leak = vacuum_column_leakage(&u, &exact, tail);
    if leak > cfg.tail_tol {
        return Err(Error::Truncation { dim: cfg.dim, leak, tol: cfg.tail_tol });
    }
    Ok(LinearOp { matrix: u, config: cfg })
}

/// Fock amplitudes of the squeezed vacuum `S(z)|0>`.
pub fn squeezed_vacuum_amplitudes(z: C64, dim: usize) -> CVector {
    let r = z.norm();
    let phi = z.arg();
    let t = r.tanh();
    let pref = 1.0 / r.cosh().sqrt();
    let mut v = CVector::zeros(dim);
    // c_{2n} = pref (-e^{iφ} tanh r)^n sqrt((2n)!)/(2^n n!)
    let mut mag = pref;
    let mut n = 0usize;
    while 2 * n < dim {
        v[2 * n] = C64::from_polar(mag, n as f64 * (phi + std::f64::consts::PI));
        // ratio c_{2n+2}/c_{2n} in magnitude: t sqrt((2n+1)(2n+2))/(2(n+1))
        let nf = n as f64;
        mag *= t * ((2.0 * nf + 1.0) * (2.0 * nf + 2.0)).sqrt() / (2.0 * (nf + 1.0));
        n += 1;
    }
    v
}

/// `S(z) = exp((z* a² - z a†²)/2)`.
pub fn squeeze_op(z: C64, cfg: TruncationConfig) -> Result<LinearOp> {
    let a = LinearOp::annihilation(cfg);
    let a2 = &a.matrix * &a.matrix;
    let ad2 = a2.adjoint();
    let gen = a2.map(|w| w * z.conj() * 0.5) - ad2.map(|w| w * z * 0.5);
    let u = gen.exp();
    let exact = squeezed_vacuum_amplitudes(z, cfg.dim);
    let tail = (1.0 - exact.norm_squared()).max(0.0);
    let leak = vacuum_column_leakage(&u, &exact, tail);
    if leak > cfg.tail_tol {
        return Err(Error::Truncation { dim: cfg.dim, leak, tol: cfg.tail_tol });
    }
    Ok(LinearOp { matrix: u, config: cfg })
}

/// `D(β) S(z) |0>` built operationally.
pub fn displaced_squeezed_vacuum(beta: C64, z: C64, cfg: TruncationConfig) -> Result<PureState> {
    let sq = squeeze_op(z, cfg)?;
    let d = displacement_op(beta, cfg)?;
    let s0 = sq.apply(&PureState::vacuum(cfg))?;
    d.apply(&s0)
}

/// `(x, p)` with `x = (a + a†)/2`, `p = (a - a†)/(2i)`.
pub fn quadrature_ops(cfg: TruncationConfig) -> (LinearOp, LinearOp) {
    let a = LinearOp::annihilation(cfg).matrix;
    let ad = a.adjoint();
    let x = (&a + &ad).scale(0.5);
    let p = (&a - &ad).map(|z| z * C64::new(0.0, -0.5));
    (LinearOp { matrix: x, config: cfg }, LinearOp { matrix: p, config: cfg })
}

/// `<ψ|ρ|ψ>`, clamped to [0, 1] after a tolerance check.
pub fn fidelity_pure(rho: &DensityOp, psi: &PureState) -> Result<f64> {
    rho.config.ensure_same(&psi.config)?;
    let v = psi.amplitudes.dotc(&(&rho.matrix * &psi.amplitudes));
    let slack = 1e-9 + rho.config.tail_tol;
    if v.re < -slack || v.re > 1.0 + slack || v.im.abs() > 1e-9 {
        return Err(Error::NonPhysical(format!("fidelity {v} outside [0, 1]")));
    }
    Ok(v.re.clamp(0.0, 1.0))
}

/// `Tr[ρ Op]`.
pub fn expectation<S: FockState + ?Sized>(op: &LinearOp, state: &S) -> Result<C64> {
    state.expect(op)
}

/// Diagonals `E_n = |<n+k|D(β)|n>|`-with-sign for `k = 0..dim`, from the
/// normalized Laguerre recurrence
/// `E_{n+1} = ((2n+1+k-x) E_n - √(n(n+k)) E_{n-1}) / √((n+1)(n+k+1))`,
/// `x = |β|²`. Unlike the ladder recursion this stays accurate for large `|β|`.
fn displacement_diagonals(x: f64, dim: usize) -> Vec<Vec<f64>> {
    (0..dim)
        .map(|k| {
            let len = dim - k;
            let mut e = vec![0.0; len];
            e[0] = if x == 0.0 {
                if k == 0 { 1.0 } else { 0.0 }
            } else {
                (-0.5 * x + 0.5 * k as f64 * x.ln() - 0.5 * ln_factorial(k)).exp()
            };
            if len > 1 {
                e[1] = (1.0 + k as f64 - x) * e[0] / ((k + 1) as f64).sqrt();
            }
            for n in 1..len.saturating_sub(1) {
                let (nf, kf) = (n as f64, k as f64);
                e[n + 1] = ((2.0 * nf + 1.0 + kf - x) * e[n] - (nf * (nf + kf)).sqrt() * e[n - 1])
                    / ((nf + 1.0) * (nf + kf + 1.0)).sqrt();
            }
            e
        })
        .collect()
}

/// Exact matrix elements `<m|D(β)|n>` of the untruncated displacement
/// operator for `m, n < dim`.
pub fn displacement_elements(beta: C64, dim: usize) -> CMatrix {
    let mut d = CMatrix::zeros(dim, dim);
    let x = beta.norm_sqr();
    let ph = if x > 0.0 { beta / beta.norm() } else { C64::new(1.0, 0.0) };
    let mph = -ph.conj();
    for (k, e) in displacement_diagonals(x, dim).into_iter().enumerate() {
        let (lo, up) = (ph.powu(k as u32), mph.powu(k as u32));
        for (n, v) in e.into_iter().enumerate() {
            d[(n + k, n)] = lo * v;
            if k > 0 {
                d[(n, n + k)] = up * v;
            }
        }
    }
    d
}

/// Real-valued `<m|D(h)|n>` for real `h`.
pub fn displacement_elements_real(h: f64, dim: usize) -> DMatrix<f64> {
    let mut d = DMatrix::<f64>::zeros(dim, dim);
    let s = if h < 0.0 { -1.0 } else { 1.0 };
    for (k, e) in displacement_diagonals(h * h, dim).into_iter().enumerate() {
        let lo = if k % 2 == 1 { s } else { 1.0 };
        for (n, v) in e.into_iter().enumerate() {
            d[(n + k, n)] = lo * v;
            if k > 0 {
                d[(n, n + k)] = lo * if k % 2 == 1 { -v } else { v };
            }
        }
    }
    d
}

/// Thermal populations `(1-q) qⁿ` with `q = n̄/(n̄+1)`, and the weight lost above `dim`.
pub fn thermal_populations(mean_photons: f64, dim: usize) -> (Vec<f64>, f64) {
    if mean_photons <= 0.0 {
        let mut w = vec![0.0; dim];
        w[0] = 1.0;
        return (w, 0.0);
    }
    let q = mean_photons / (mean_photons + 1.0);
    let w: Vec<f64> = (0..dim).map(|n| (1.0 - q) * q.powi(n as i32)).collect();
    (w, q.powi(dim as i32))
}
