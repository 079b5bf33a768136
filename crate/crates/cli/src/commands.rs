//! The subcommands. Rows are computed under the configured execution policy
//! and assembled in grid order.

use bcs_core::alphabet::{cat_basis, qubit_basis};
use bcs_core::analysis::{cumulants, wigner, wigner_at, wigner_diff, Axis, GridSpec, WignerGrid};
use bcs_core::cloners::{bruss_bound_at, optimal_clone_state, CloneReport, CloneState, Scheme};
use bcs_core::discrimination::{homodyne_error_mc, ReceiverKind};
use bcs_core::fock::{coherent_state, FockState};
use bcs_core::{par, DensityOp, Error, Exec, GaussianState, PureState, TruncationConfig, C64};
use serde_json::{json, Value};

use crate::config::{RunConfig, WignerState};
use crate::table::{Cell, Table};
use crate::CliError;

/// Doublings tried when a sized truncation turns out too small.
const MAX_DOUBLINGS: usize = 2;

fn exec(cfg: &RunConfig) -> Exec {
    if cfg.sequential {
        Exec::Sequential
    } else {
        Exec::Parallel
    }
}

fn status(errors: &[String]) -> Cell {
    if errors.is_empty() {
        "ok".into()
    } else {
        errors.join("; ").into()
    }
}

pub fn discrim_curve(cfg: &RunConfig) -> Result<Table, CliError> {
    let mut columns = vec!["n_mean", "homodyne", "kennedy", "od", "od_beta", "helstrom"];
    if cfg.mc_shots > 0 {
        columns.push("homodyne_mc");
    }
    columns.push("status");
    let mut table = Table::new(columns);
    let rows = par::map(exec(cfg), &cfg.grid.amplitudes(), |&a| {
        let mut errors = Vec::new();
        let mut value = |rk: ReceiverKind| match rk.error(a) {
            Ok(r) => (r.error_prob, r.beta.unwrap_or(f64::NAN)),
            Err(e) => {
                errors.push(format!("{}: {e}", rk.name()));
                (f64::NAN, f64::NAN)
            }
        };
        let hom = value(ReceiverKind::Homodyne).0;
        let ken = value(ReceiverKind::Kennedy).0;
        let (od, od_beta) = value(ReceiverKind::OptimizedDisplacement);
        let hel = value(ReceiverKind::Helstrom).0;
        let mut row: Vec<Cell> = vec![(a * a).into(), hom.into(), ken.into(), od.into(), od_beta.into(), hel.into()];
        if cfg.mc_shots > 0 {
            let mc = homodyne_error_mc(a, cfg.mc_shots, cfg.seed).unwrap_or_else(|e| {
                errors.push(format!("homodyne_mc: {e}"));
                f64::NAN
            });
            row.push(mc.into());
        }
        row.push(status(&errors));
        row
    });
    for r in rows {
        table.push(r);
    }
    Ok(table)
}

fn schemes_or(cfg: &RunConfig, default: &[Scheme]) -> Vec<Scheme> {
    cfg.schemes.clone().unwrap_or_else(|| default.to_vec())
}

pub fn fidelity_curve(cfg: &RunConfig) -> Result<Table, CliError> {
    let schemes = schemes_or(cfg, &Scheme::PRACTICAL);
    let mut columns = vec!["n_mean".to_string()];
    columns.extend(schemes.iter().map(|s| s.name().to_string()));
    columns.extend(["bruss_bound".to_string(), "status".to_string()]);
    let mut table = Table::new(columns);
    let opts = cfg.scheme_options();
    let rows = par::map(exec(cfg), &cfg.grid.amplitudes(), |&a| {
        let bound = bruss_bound_at(a);
        let mut errors = Vec::new();
        let mut row: Vec<Cell> = vec![(a * a).into()];
        for s in &schemes {
            let f = match s.run(a, &opts) {
                Ok(r) => r.mean_fidelity,
                Err(e) => {
                    errors.push(format!("{}: {e}", s.name()));
                    f64::NAN
                }
            };
            if f > bound + 1e-9 {
                errors.push(format!("{} above bound by {:.3e}", s.name(), f - bound));
            }
            row.push(f.into());
        }
        row.push(bound.into());
        row.push(status(&errors));
        row
    });
    for r in rows {
        table.push(r);
    }
    Ok(table)
}

const PARAM_DEFAULTS: [Scheme; 5] =
    [Scheme::Psa, Scheme::MpCoherent, Scheme::PartialMp, Scheme::UsdCoherent, Scheme::UsdSqueezed];

pub fn params(cfg: &RunConfig) -> Result<Table, CliError> {
    let schemes = schemes_or(cfg, &PARAM_DEFAULTS);
    let mut columns = vec!["n_mean".to_string()];
    for s in &schemes {
        columns.extend(s.param_names().iter().map(|p| format!("{}.{p}", s.name())));
        columns.push(format!("{}.fidelity", s.name()));
    }
    columns.push("status".into());
    let mut table = Table::new(columns);
    let opts = cfg.scheme_options();
    let rows = par::map(exec(cfg), &cfg.grid.amplitudes(), |&a| {
        let mut errors = Vec::new();
        let mut row: Vec<Cell> = vec![(a * a).into()];
        for s in &schemes {
            match s.run(a, &opts) {
                Ok(r) => {
                    row.extend(s.param_names().iter().map(|p| r.param(p).unwrap_or(f64::NAN).into()));
                    row.push(r.mean_fidelity.into());
                }
                Err(e) => {
                    errors.push(format!("{}: {e}", s.name()));
                    row.extend(std::iter::repeat_n(Cell::Num(f64::NAN), s.param_names().len() + 1));
                }
            }
        }
        row.push(status(&errors));
        row
    });
    for r in rows {
        table.push(r);
    }
    Ok(table)
}

/// Number-basis extent of a Gaussian state: displacement plus a margin for
/// squeezing and thermal spread.
fn gaussian_extent(g: &GaussianState) -> f64 {
    let e = nalgebra::SymmetricEigen::new(g.cov).eigenvalues;
    let r = 0.25 * (e.max() / e.min()).ln();
    let nbar = ((g.symplectic_eigenvalue() - 1.0) / 2.0).max(0.0);
    g.amplitude().norm() + 1.5 * r + 2.0 * nbar.sqrt()
}

fn report_extent(r: &CloneReport) -> f64 {
    r.branch_states
        .iter()
        .map(|b| match &b.state {
            CloneState::Gaussian(g) => gaussian_extent(g),
            CloneState::Mixture(m) => m.components().iter().map(|(_, g)| gaussian_extent(g)).fold(0.0, f64::max),
            CloneState::CoherentBasis(c) => c.alpha,
        })
        .fold(0.0, f64::max)
}

/// Builds a state at a fixed dimension, or at a sized one that is doubled
/// while the truncation leaks.
fn with_truncation<T>(cfg: &RunConfig, extent: f64, build: impl Fn(TruncationConfig) -> bcs_core::Result<T>) -> Result<T, CliError> {
    let tol = cfg.truncation.tail_tol;
    if let Some(dim) = cfg.truncation.dim {
        return Ok(build(TruncationConfig::new(dim, tol)?)?);
    }
    let mut t = TruncationConfig { tail_tol: tol, ..TruncationConfig::for_amplitudes(extent, 0.0) };
    for attempt in 0..=MAX_DOUBLINGS {
        match build(t) {
            Err(Error::Truncation { .. }) if attempt < MAX_DOUBLINGS => t = t.doubled(),
            r => return Ok(r?),
        }
    }
    unreachable!("the last attempt returns")
}

const CUMULANT_DEFAULTS: [Scheme; 3] = [Scheme::Optimal, Scheme::MpExact, Scheme::MpSqueezed];

pub fn cumulant_table(cfg: &RunConfig) -> Result<Table, CliError> {
    let schemes = schemes_or(cfg, &CUMULANT_DEFAULTS);
    let mut table = Table::new(["n_mean", "scheme", "axis", "k1", "k2", "k3", "k4", "k5", "k6", "status"]);
    let opts = cfg.scheme_options();
    let jobs: Vec<(f64, Scheme)> =
        cfg.grid.amplitudes().into_iter().flat_map(|a| schemes.iter().map(move |&s| (a, s))).collect();
    let rows = par::map(exec(cfg), &jobs, |&(a, s)| {
        let computed = s.run(a, &opts).map_err(CliError::from).and_then(|r| {
            let rho = with_truncation(cfg, report_extent(&r), |t| r.density(t))?;
            cfg.axes.iter().map(|&ax| Ok((ax, cumulants(&rho, ax)?))).collect::<Result<Vec<_>, CliError>>()
        });
        match computed {
            Ok(sets) => sets
                .into_iter()
                .map(|(ax, k)| {
                    let mut row: Vec<Cell> = vec![(a * a).into(), s.name().into(), ax.name().into()];
                    row.extend(k.as_array().iter().map(|&v| Cell::Num(v)));
                    row.push("ok".into());
                    row
                })
                .collect::<Vec<_>>(),
            Err(e) => cfg
                .axes
                .iter()
                .map(|ax| {
                    let mut row: Vec<Cell> = vec![(a * a).into(), s.name().into(), ax.name().into()];
                    row.extend(std::iter::repeat_n(Cell::Num(f64::NAN), 6));
                    row.push(format!("{}: {e}", s.name()).into());
                    row
                })
                .collect(),
        }
    });
    for r in rows.into_iter().flatten() {
        table.push(r);
    }
    Ok(table)
}

pub struct WignerOutput {
    pub grid: WignerGrid,
    pub summary: Value,
}

fn selected_state(cfg: &RunConfig, a: f64) -> Result<DensityOp, CliError> {
    let state = cfg.wigner.state;
    let pure = |f: &dyn Fn(TruncationConfig) -> bcs_core::Result<PureState>| {
        with_truncation(cfg, a, |t| f(t).map(|p| p.density()))
    };
    match state {
        WignerState::Vacuum => pure(&|t| Ok(PureState::vacuum(t))),
        WignerState::Coherent => pure(&|t| coherent_state(C64::new(a, 0.0), t)),
        WignerState::CatEven => pure(&|t| cat_basis(a, t).map(|c| c.0)),
        WignerState::CatOdd => pure(&|t| cat_basis(a, t).map(|c| c.1)),
        WignerState::QubitBasis0 => pure(&|t| qubit_basis(a, t).map(|q| q.0)),
        WignerState::QubitBasis1 => pure(&|t| qubit_basis(a, t).map(|q| q.1)),
        WignerState::OptimalClone => with_truncation(cfg, a, |t| optimal_clone_state(a, t).map(|c| c.1)),
    }
}

pub fn wigner_map(cfg: &RunConfig) -> Result<WignerOutput, CliError> {
    let a = cfg.wigner_amplitude();
    let rho = selected_state(cfg, a)?;
    let w = &cfg.wigner;
    let spec = GridSpec::centered(a, 0.0, w.half_width, w.points)?;
    let state_grid = wigner(&rho, &spec, exec(cfg))?;
    let grid = if w.diff {
        let coh = with_truncation(cfg, a, |t| coherent_state(C64::new(a, 0.0), t).map(|p| p.density()))?;
        wigner_diff(&state_grid, &wigner(&coh, &spec, exec(cfg))?)?
    } else {
        state_grid
    };
    let (neg, pos) = grid.half_plane_integrals();
    let summary = json!({
        "state": w.state,
        "alpha": a,
        "diff": w.diff,
        "dim": rho.config().dim,
        "trace": rho.trace(),
        "integral": grid.integral(),
        "abs_integral": grid.abs_integral(),
        "integral_x_negative": neg,
        "integral_x_positive": pos,
        "state_w_origin": wigner_at(&rho, 0.0, 0.0),
        "min": grid.values.min(),
        "max": grid.values.max(),
    });
    Ok(WignerOutput { grid, summary })
}

pub fn wigner_table(g: &WignerGrid) -> Table {
    let mut t = Table::new(["x", "p", "w"]);
    for (i, &x) in g.x_axis.iter().enumerate() {
        for (j, &p) in g.p_axis.iter().enumerate() {
            t.push(vec![x.into(), p.into(), g.values[(i, j)].into()]);
        }
    }
    t
}

pub fn marginal_table(g: &WignerGrid) -> Table {
    let mut t = Table::new(["axis", "q", "density"]);
    for (axis, coords, dens) in [(Axis::X, &g.x_axis, g.x_marginal()), (Axis::P, &g.p_axis, g.p_marginal())] {
        for (&q, d) in coords.iter().zip(dens) {
            t.push(vec![axis.name().into(), q.into(), d.into()]);
        }
    }
    t
}

pub fn wigner_envelope(g: &WignerGrid, summary: &Value) -> Value {
    let rows: Vec<Vec<f64>> = g.values.row_iter().map(|r| r.iter().copied().collect()).collect();
    json!({ "x_axis": g.x_axis, "p_axis": g.p_axis, "dxdp": g.dxdp, "values": rows, "summary": summary })
}
