//! Small derivative-free maximizers for bounded, low-dimensional objectives.
//!
//! Bounds with `lo == hi` pin a parameter. Multi-start runs are seeded so that
//! results do not depend on thread scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::{self, Exec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    GoldenSection,
    Simplex,
    CoordinateDescent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerSpec {
    pub bounds: Vec<(f64, f64)>,
    pub tolerance: f64,
    pub max_evals: usize,
    pub strategy: Strategy,
    pub starts: usize,
    pub seed: u64,
    /// Cross-check against a 50-point-per-axis scan when `k <= 2`.
    pub audit: bool,
    /// First start; later starts are drawn uniformly inside the bounds.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<Vec<f64>>,
}

impl OptimizerSpec {
    pub fn new(bounds: Vec<(f64, f64)>) -> Self {
        let k = bounds.len();
        Self {
            bounds,
            tolerance: 1e-8,
            max_evals: 100_000,
            strategy: if k == 1 { Strategy::GoldenSection } else { Strategy::CoordinateDescent },
            starts: if k >= 3 { 8 } else { 1 },
            seed: 0x5eed,
            audit: k <= 2,
            initial: None,
        }
    }

    pub fn with_strategy(mut self, strategy: Strategy) -> Self {
        self.strategy = strategy;
        self
    }

    pub fn with_starts(mut self, starts: usize) -> Self {
        self.starts = starts;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_initial(mut self, x: Vec<f64>) -> Self {
        self.initial = Some(x);
        self
    }

    pub fn with_audit(mut self, audit: bool) -> Self {
        self.audit = audit;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.bounds.is_empty() {
            return Err(Error::InvalidArgument("no parameters".into()));
        }
        if !(self.tolerance > 0.0) || self.max_evals == 0 || self.starts == 0 {
            return Err(Error::InvalidArgument("tolerance, max_evals and starts must be positive".into()));
        }
        for &(lo, hi) in &self.bounds {
            if !lo.is_finite() || !hi.is_finite() || lo > hi {
                return Err(Error::InvalidArgument(format!("bad bounds [{lo}, {hi}]")));
            }
        }
        if let Some(x) = &self.initial {
            if x.len() != self.bounds.len() {
                return Err(Error::DimensionMismatch { left: x.len(), right: self.bounds.len() });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Optimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
    /// Best value reached from each start, in start order.
    pub start_values: Vec<f64>,
}

struct Counted<'a, F> {
    f: &'a F,
    evals: usize,
    max_evals: usize,
}

impl<F: Fn(&[f64]) -> f64> Counted<'_, F> {
    fn eval(&mut self, x: &[f64]) -> Result<f64> {
        if self.evals >= self.max_evals {
            return Err(Error::Convergence(format!("exceeded {} evaluations", self.max_evals)));
        }
        self.evals += 1;
        let v = (self.f)(x);
        Ok(if v.is_nan() { f64::NEG_INFINITY } else { v })
    }
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section maximization of `g` on `[a, b]`, including both endpoints.
fn golden<G: FnMut(f64) -> Result<f64>>(mut g: G, a0: f64, b0: f64, xtol: f64) -> Result<(f64, f64)> {
    let (fa0, fb0) = (g(a0)?, g(b0)?);
    let (mut a, mut b) = (a0, b0);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (g(c)?, g(d)?);
    while b - a > xtol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = g(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = g(d)?;
        }
    }
    let mut best = if fc >= fd { (c, fc) } else { (d, fd) };
    for cand in [(a0, fa0), (b0, fb0)] {
        if cand.1 > best.1 {
            best = cand;
        }
    }
    Ok(best)
}

/// Coarse scan followed by a golden search in the bracket around the best sample.
fn line_search<G: FnMut(f64) -> Result<f64>>(mut g: G, lo: f64, hi: f64, xtol: f64) -> Result<(f64, f64)> {
    const SAMPLES: usize = 9;
    let step = (hi - lo) / (SAMPLES - 1) as f64;
    let mut vals = Vec::with_capacity(SAMPLES);
    for i in 0..SAMPLES {
        vals.push(g(lo + step * i as f64)?);
    }
    let i = (0..SAMPLES).fold(0, |b, i| if vals[i] > vals[b] { i } else { b });
    let a = lo + step * i.saturating_sub(1) as f64;
    let b = (lo + step * (i + 1).min(SAMPLES - 1) as f64).min(hi);
    let (x, v) = golden(&mut g, a, b, xtol)?;
    Ok(if vals[i] > v { (lo + step * i as f64, vals[i]) } else { (x, v) })
}

fn clamp_into(x: &mut [f64], bounds: &[(f64, f64)]) {
    for (v, &(lo, hi)) in x.iter_mut().zip(bounds) {
        *v = v.clamp(lo, hi);
    }
}

fn free_axes(bounds: &[(f64, f64)]) -> Vec<usize> {
    (0..bounds.len()).filter(|&i| bounds[i].1 > bounds[i].0).collect()
}

fn xtol_for(spec: &OptimizerSpec, lo: f64, hi: f64) -> f64 {
    (spec.tolerance.sqrt() * 1e-2 * (hi - lo)).max(1e-12)
}

fn run_coordinate<F: Fn(&[f64]) -> f64>(cf: &mut Counted<F>, spec: &OptimizerSpec, x0: Vec<f64>) -> Result<(Vec<f64>, f64)> {
    let free = free_axes(&spec.bounds);
    let mut x = x0;
    let mut fx = cf.eval(&x)?;
    loop {
        let before = fx;
        for &i in &free {
            let (lo, hi) = spec.bounds[i];
            let mut trial = x.clone();
            let (xi, v) = line_search(
                |t| {
                    trial[i] = t;
                    cf.eval(&trial)
                },
                lo,
                hi,
                xtol_for(spec, lo, hi),
            )?;
            if v > fx {
                x[i] = xi;
                fx = v;
            }
        }
        if fx - before <= 0.01 * spec.tolerance {
            return Ok((x, fx));
        }
    }
}

fn run_simplex<F: Fn(&[f64]) -> f64>(cf: &mut Counted<F>, spec: &OptimizerSpec, x0: Vec<f64>) -> Result<(Vec<f64>, f64)> {
    let free = free_axes(&spec.bounds);
    let n = free.len();
    let embed = |y: &[f64], base: &[f64]| {
        let mut x = base.to_vec();
        for (k, &i) in free.iter().enumerate() {
            x[i] = y[k];
        }
        clamp_into(&mut x, &spec.bounds);
        x
    };
    let mut best_x = x0.clone();
    let mut best_f = cf.eval(&best_x)?;
    if n == 0 {
        return Ok((best_x, best_f));
    }
    // Restart from the best vertex until a restart no longer helps.
    loop {
        let base = best_x.clone();
        let start: Vec<f64> = free.iter().map(|&i| base[i]).collect();
        let mut simplex = vec![start.clone()];
        for (k, &i) in free.iter().enumerate() {
            let (lo, hi) = spec.bounds[i];
            let mut v = start.clone();
            let step = 0.1 * (hi - lo);
            v[k] = if v[k] + step <= hi { v[k] + step } else { v[k] - step };
            simplex.push(v);
        }
        let mut vals = Vec::with_capacity(n + 1);
        for v in &simplex {
            vals.push(-cf.eval(&embed(v, &base))?);
        }
        loop {
            let mut order: Vec<usize> = (0..=n).collect();
            order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
            simplex = order.iter().map(|&i| simplex[i].clone()).collect();
            vals = order.iter().map(|&i| vals[i]).collect();
            let spread = vals[n] - vals[0];
            let size = simplex[1..]
                .iter()
                .map(|v| v.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
                .fold(0.0, f64::max);
            if spread <= 0.01 * spec.tolerance && size <= spec.tolerance.sqrt() {
                break;
            }
            let centroid: Vec<f64> =
                (0..n).map(|k| simplex[..n].iter().map(|v| v[k]).sum::<f64>() / n as f64).collect();
            let along = |t: f64| -> Vec<f64> {
                let p: Vec<f64> = (0..n).map(|k| centroid[k] + t * (simplex[n][k] - centroid[k])).collect();
                let mut full = embed(&p, &base);
                clamp_into(&mut full, &spec.bounds);
                free.iter().map(|&i| full[i]).collect()
            };
            let xr = along(-1.0);
            let fr = -cf.eval(&embed(&xr, &base))?;
            if fr < vals[0] {
                let xe = along(-2.0);
                let fe = -cf.eval(&embed(&xe, &base))?;
                if fe < fr {
                    simplex[n] = xe;
                    vals[n] = fe;
                } else {
                    simplex[n] = xr;
                    vals[n] = fr;
                }
            } else if fr < vals[n - 1] {
                simplex[n] = xr;
                vals[n] = fr;
            } else {
                let (xc, fc) = if fr < vals[n] {
                    let xc = along(-0.5);
                    let fc = -cf.eval(&embed(&xc, &base))?;
                    (xc, fc)
                } else {
                    let xc = along(0.5);
                    let fc = -cf.eval(&embed(&xc, &base))?;
                    (xc, fc)
                };
                if fc < vals[n].min(fr) {
                    simplex[n] = xc;
                    vals[n] = fc;
                } else {
                    for j in 1..=n {
                        let shrunk: Vec<f64> = (0..n).map(|k| simplex[0][k] + 0.5 * (simplex[j][k] - simplex[0][k])).collect();
                        vals[j] = -cf.eval(&embed(&shrunk, &base))?;
                        simplex[j] = shrunk;
                    }
                }
            }
        }
        let cand = embed(&simplex[0], &base);
        let fc = -vals[0];
        if fc > best_f + 0.01 * spec.tolerance {
            best_x = cand;
            best_f = fc;
        } else {
            if fc > best_f {
                best_x = cand;
                best_f = fc;
            }
            return Ok((best_x, best_f));
        }
    }
}

fn local<F: Fn(&[f64]) -> f64>(cf: &mut Counted<F>, spec: &OptimizerSpec, x0: Vec<f64>) -> Result<(Vec<f64>, f64)> {
    match spec.strategy {
        Strategy::GoldenSection if free_axes(&spec.bounds).len() <= 1 => {
            let free = free_axes(&spec.bounds);
            let mut x = x0;
            if let Some(&i) = free.first() {
                let (lo, hi) = spec.bounds[i];
                let mut trial = x.clone();
                let (xi, v) = line_search(
                    |t| {
                        trial[i] = t;
                        cf.eval(&trial)
                    },
                    lo,
                    hi,
                    xtol_for(spec, lo, hi),
                )?;
                x[i] = xi;
                Ok((x, v))
            } else {
                let v = cf.eval(&x)?;
                Ok((x, v))
            }
        }
        Strategy::GoldenSection | Strategy::CoordinateDescent => run_coordinate(cf, spec, x0),
        Strategy::Simplex => run_simplex(cf, spec, x0),
    }
}

fn start_points(spec: &OptimizerSpec) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut pts = Vec::with_capacity(spec.starts);
    let first = spec
        .initial
        .clone()
        .unwrap_or_else(|| spec.bounds.iter().map(|&(lo, hi)| 0.5 * (lo + hi)).collect());
    pts.push(first);
    while pts.len() < spec.starts {
        pts.push(spec.bounds.iter().map(|&(lo, hi)| if hi > lo { rng.random_range(lo..=hi) } else { lo }).collect());
    }
    for p in &mut pts {
        clamp_into(p, &spec.bounds);
    }
    pts
}

fn audit_grid(k: usize, bounds: &[(f64, f64)]) -> Vec<Vec<f64>> {
    const N: usize = 50;
    let axis = |i: usize| -> Vec<f64> {
        let (lo, hi) = bounds[i];
        if hi > lo { (0..N).map(|j| lo + (hi - lo) * j as f64 / (N - 1) as f64).collect() } else { vec![lo] }
    };
    match k {
        1 => axis(0).into_iter().map(|a| vec![a]).collect(),
        2 => {
            let (xs, ys) = (axis(0), axis(1));
            xs.iter().flat_map(|&a| ys.iter().map(move |&b| vec![a, b])).collect()
        }
        _ => Vec::new(),
    }
}

/// Maximizes `f` within the spec's bounds.
pub fn maximize<F: Fn(&[f64]) -> f64 + Sync>(f: F, spec: &OptimizerSpec) -> Result<Optimum> {
    maximize_with(f, spec, Exec::Sequential)
}

/// As [`maximize`], running the starts under `exec`.
pub fn maximize_with<F: Fn(&[f64]) -> f64 + Sync>(f: F, spec: &OptimizerSpec, exec: Exec) -> Result<Optimum> {
    spec.validate()?;
    let starts = start_points(spec);
    let per_start = spec.max_evals;
    let runs: Vec<Result<(Vec<f64>, f64, usize)>> = par::map(exec, &starts, |x0| {
        let mut cf = Counted { f: &f, evals: 0, max_evals: per_start };
        local(&mut cf, spec, x0.clone()).map(|(x, v)| (x, v, cf.evals))
    });
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut evals = 0;
    let mut start_values = Vec::with_capacity(runs.len());
    for r in runs {
        let (x, v, e) = r?;
        evals += e;
        start_values.push(v);
        if best.as_ref().is_none_or(|b| v > b.1) {
            best = Some((x, v));
        }
    }
    let (mut x, mut value) = best.expect("at least one start");

    let k = spec.bounds.len();
    if spec.audit && k <= 2 {
        let grid = audit_grid(k, &spec.bounds);
        let vals: Vec<f64> = grid.iter().map(|p| f(p)).collect();
        evals += grid.len();
        let (gi, gv) = vals
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |b, (i, &v)| if v > b.1 { (i, v) } else { b });
        if gv > value + spec.tolerance {
            log::debug!("optimizer audit found {gv} above {value}; refining from the grid point");
            let mut cf = Counted { f: &f, evals: 0, max_evals: per_start };
            let (rx, rv) = local(&mut cf, spec, grid[gi].clone())?;
            evals += cf.evals;
            if rv > gv {
                x = rx;
                value = rv;
            } else {
                x = grid[gi].clone();
                value = gv;
            }
        }
    }
    if !value.is_finite() {
        return Err(Error::Convergence(format!("objective is not finite at the optimum ({value})")));
    }
    Ok(Optimum { x, value, evals, start_values })
}
