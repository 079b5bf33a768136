//! Phase-space and statistical diagnostics: Wigner grids and quadrature
//! cumulants.
//!
//! `W(x, p) = (2/π) Tr[ρ D(γ) Π D(γ)†]` with `γ = x + ip` and `Π` the parity,
//! normalized so that `∫ W dx dp = Tr ρ`. The vacuum peaks at `2/π`.

use std::f64::consts::FRAC_2_PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{displacement_elements, quadrature_ops, CMatrix, FockState, C64};
use crate::par::{self, Exec};

pub const DEFAULT_POINTS: usize = 121;
pub const DEFAULT_HALF_WIDTH: f64 = 4.5;
/// Largest `|W|` tolerated on the grid boundary.
pub const EDGE_TOL: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_range: (f64, f64),
    pub p_range: (f64, f64),
    pub nx: usize,
    pub np: usize,
}

impl GridSpec {
    pub fn new(x_range: (f64, f64), p_range: (f64, f64), nx: usize, np: usize) -> Result<Self> {
        let ok = |r: (f64, f64)| r.0.is_finite() && r.1.is_finite() && r.0 < r.1;
        if !ok(x_range) || !ok(p_range) || nx < 2 || np < 2 {
            return Err(Error::InvalidArgument(format!("bad grid {x_range:?} x {p_range:?}, {nx} x {np} points")));
        }
        Ok(Self { x_range, p_range, nx, np })
    }

    /// Square `n × n` grid of half-width `half_width` around `(x0, p0)`.
    pub fn centered(x0: f64, p0: f64, half_width: f64, n: usize) -> Result<Self> {
        Self::new((x0 - half_width, x0 + half_width), (p0 - half_width, p0 + half_width), n, n)
    }

    /// Default grid around the state's quadrature means.
    pub fn around<S: FockState + ?Sized>(state: &S) -> Result<Self> {
        let (x, p) = quadrature_ops(state.config());
        let (x0, p0) = (state.expect(&x)?.re, state.expect(&p)?.re);
        Self::centered(x0, p0, DEFAULT_HALF_WIDTH, DEFAULT_POINTS)
    }

    fn axis(range: (f64, f64), n: usize) -> Vec<f64> {
        let step = (range.1 - range.0) / (n - 1) as f64;
        (0..n).map(|i| range.0 + step * i as f64).collect()
    }
}

/// Wigner function sampled on a uniform grid; `values[(i, j)]` is
/// `W(x_axis[i], p_axis[j])`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WignerGrid {
    pub x_axis: Vec<f64>,
    pub p_axis: Vec<f64>,
    pub values: DMatrix<f64>,
    pub dxdp: f64,
}

impl WignerGrid {
    pub fn integral(&self) -> f64 {
        self.values.sum() * self.dxdp
    }

    pub fn abs_integral(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum::<f64>() * self.dxdp
    }

    fn dx(&self) -> f64 {
        self.x_axis[1] - self.x_axis[0]
    }

    fn dp(&self) -> f64 {
        self.p_axis[1] - self.p_axis[0]
    }

    /// Distribution of `x`: `W` integrated over `p`.
    pub fn x_marginal(&self) -> Vec<f64> {
        self.values.row_iter().map(|r| r.sum() * self.dp()).collect()
    }

    /// Distribution of `p`: `W` integrated over `x`.
    pub fn p_marginal(&self) -> Vec<f64> {
        self.values.column_iter().map(|c| c.sum() * self.dx()).collect()
    }

    /// Integrals over the half-planes `x < 0` and `x > 0`.
    pub fn half_plane_integrals(&self) -> (f64, f64) {
        let m = self.x_marginal();
        let dx = self.dx();
        let side = |keep: fn(f64) -> bool| {
            self.x_axis.iter().zip(&m).filter(|(x, _)| keep(**x)).map(|(_, w)| w * dx).sum::<f64>()
        };
        (side(|x| x < 0.0), side(|x| x > 0.0))
    }

    /// Index of the grid point closest to `(x, p)`.
    pub fn nearest(&self, x: f64, p: f64) -> (usize, usize) {
        let idx = |axis: &[f64], v: f64| {
            let step = axis[1] - axis[0];
            (((v - axis[0]) / step).round().max(0.0) as usize).min(axis.len() - 1)
        };
        (idx(&self.x_axis, x), idx(&self.p_axis, p))
    }

    pub fn value_at(&self, x: f64, p: f64) -> f64 {
        self.values[self.nearest(x, p)]
    }

    fn edge_max(&self) -> f64 {
        let (nx, np) = self.values.shape();
        let mut m: f64 = 0.0;
        for i in 0..nx {
            m = m.max(self.values[(i, 0)].abs()).max(self.values[(i, np - 1)].abs());
        }
        for j in 0..np {
            m = m.max(self.values[(0, j)].abs()).max(self.values[(nx - 1, j)].abs());
        }
        m
    }
}

/// `ρ_mn (-1)^m`, so that `W(γ) = (2/π) Re Σ_mn ρ̃_mn <n|D(2γ)|m>`.
fn parity_weighted(rho: &CMatrix) -> CMatrix {
    let mut r = rho.clone();
    for (m, mut row) in r.row_iter_mut().enumerate() {
        if m % 2 == 1 {
            row.neg_mut();
        }
    }
    r
}

fn wigner_point(weighted: &CMatrix, gamma: C64) -> f64 {
    let d = displacement_elements(gamma * 2.0, weighted.nrows());
    // Σ_mn ρ̃_mn D_nm = Σ of the elementwise product with Dᵀ.
    let acc: C64 = weighted.iter().zip(d.transpose().iter()).map(|(a, b)| a * b).sum();
    FRAC_2_PI * acc.re
}

/// `W(x, p)` at a single point.
pub fn wigner_at<S: FockState + ?Sized>(state: &S, x: f64, p: f64) -> f64 {
    wigner_point(&parity_weighted(state.density().matrix()), C64::new(x, p))
}

/// Samples `W` on `spec`. Fails with `GridTooSmall` if the state is not
/// negligible on the boundary.
pub fn wigner<S: FockState + ?Sized>(state: &S, spec: &GridSpec, exec: Exec) -> Result<WignerGrid> {
    let weighted = parity_weighted(state.density().matrix());
    let x_axis = GridSpec::axis(spec.x_range, spec.nx);
    let p_axis = GridSpec::axis(spec.p_range, spec.np);
    let rows = par::map_range(exec, spec.nx, |i| {
        p_axis.iter().map(|&p| wigner_point(&weighted, C64::new(x_axis[i], p))).collect::<Vec<_>>()
    });
    let values = DMatrix::from_fn(spec.nx, spec.np, |i, j| rows[i][j]);
    let dxdp = (x_axis[1] - x_axis[0]) * (p_axis[1] - p_axis[0]);
    let grid = WignerGrid { x_axis, p_axis, values, dxdp };
    let edge = grid.edge_max();
    if edge > EDGE_TOL {
        return Err(Error::GridTooSmall(format!("|W| reaches {edge:e} on the boundary")));
    }
    Ok(grid)
}

/// Elementwise `a - b` on identical grids.
pub fn wigner_diff(a: &WignerGrid, b: &WignerGrid) -> Result<WignerGrid> {
    let same = |u: &[f64], v: &[f64]| u.len() == v.len() && u.iter().zip(v).all(|(s, t)| (s - t).abs() <= 1e-12);
    if !same(&a.x_axis, &b.x_axis) || !same(&a.p_axis, &b.p_axis) {
        return Err(Error::GridMismatch(format!(
            "{}x{} vs {}x{} points or shifted axes",
            a.x_axis.len(),
            a.p_axis.len(),
            b.x_axis.len(),
            b.p_axis.len()
        )));
    }
    Ok(WignerGrid { x_axis: a.x_axis.clone(), p_axis: a.p_axis.clone(), values: &a.values - &b.values, dxdp: a.dxdp })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    P,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::P => "p",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CumulantSet {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub k4: f64,
    pub k5: f64,
    pub k6: f64,
}

impl CumulantSet {
    pub fn as_array(&self) -> [f64; 6] {
        [self.k1, self.k2, self.k3, self.k4, self.k5, self.k6]
    }

    /// Cumulants from the mean and central moments `μ2..μ6`.
    pub fn from_central(mean: f64, mu: [f64; 5]) -> Self {
        let [m2, m3, m4, m5, m6] = mu;
        Self {
            k1: mean,
            k2: m2,
            k3: m3,
            k4: m4 - 3.0 * m2 * m2,
            k5: m5 - 10.0 * m3 * m2,
            k6: m6 - 15.0 * m4 * m2 - 10.0 * m3 * m3 + 30.0 * m2.powi(3),
        }
    }
}

/// Levels above the cutoff that `X^6` can reach and return from.
const MOMENT_PAD: usize = 3;

/// Cumulants `κ1..κ6` of a quadrature from operator expectations. The
/// quadrature is built on a space padded by three levels, so `<X^k>` is
/// exact for the truncated state; the state itself must not crowd its cutoff.
pub fn cumulants<S: FockState + ?Sized>(state: &S, axis: Axis) -> Result<CumulantSet> {
    let rho = state.density();
    let cfg = rho.config();
    let leak = rho.edge_weight(MOMENT_PAD);
    if leak > cfg.tail_tol {
        return Err(Error::Truncation { dim: cfg.dim, leak, tol: cfg.tail_tol });
    }
    let d = cfg.dim;
    let (x, p) = quadrature_ops(cfg.with_dim(d + MOMENT_PAD));
    let q = match axis {
        Axis::X => x,
        Axis::P => p,
    }
    .matrix()
    .clone();
    let tr = rho.trace();
    let expect = |op: &CMatrix| -> f64 {
        let mut acc = C64::new(0.0, 0.0);
        for m in 0..d {
            for n in 0..d {
                acc += rho.element(m, n) * op[(n, m)];
            }
        }
        acc.re / tr
    };
    let mean = expect(&q);
    let shifted = &q - CMatrix::identity(d + MOMENT_PAD, d + MOMENT_PAD).scale(mean);
    let mut power = shifted.clone();
    let mut mu = [0.0; 5];
    for slot in mu.iter_mut() {
        power = &power * &shifted;
        *slot = expect(&power);
    }
    Ok(CumulantSet::from_central(mean, mu))
}
