//! Monotone Lax–Friedrichs reference solver for `u_t + H(u_x) = 0`.
//!
//! `u_j ← u_j − dt H((u_{j+1} − u_{j−1})/2dx) + (dt α/2)(u_{j+1} − 2u_j + u_{j−1})/dx`
//! is monotone when `α ≥ max |H'|` over the realized slopes and
//! `dt α/dx ≤ 1/2`.

use alloc::format;
use alloc::vec::Vec;

use crate::adomian::AdmSeries;
use crate::characteristics::{critical_time, DEFAULT_SCAN_POINTS};
use crate::error::{Error, Result};
use crate::problem::{ProblemSpec, SPACE_VAR, STATE_VAR};
use crate::symexpr::Program;

pub const DEFAULT_NODES: usize = 1001;
pub const DEFAULT_CFL: f64 = 0.5;
/// Allowed mismatch of `u0` at the two ends of a periodic grid.
pub const PERIODIC_TOLERANCE: f64 = 1e-9;
// Slack on the CFL bound and on snapshot landing, relative.
const EPS: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundary {
    /// Node `J-1` duplicates node `0`.
    Periodic,
    /// Ghost values extrapolated from the three outermost nodes.
    Extrapolate,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    nodes: usize,
    boundary: Boundary,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, nodes: usize, boundary: Boundary) -> Result<Grid> {
        if nodes < 3 {
            return Err(Error::InvalidArgument(format!("grid of {nodes} nodes, need at least 3")));
        }
        if !(x_min.is_finite() && x_max.is_finite() && x_min < x_max) {
            return Err(Error::InvalidArgument(format!(
                "grid interval [{x_min}, {x_max}] is empty"
            )));
        }
        Ok(Grid {
            x_min,
            x_max,
            nodes,
            boundary,
        })
    }

    /// Grid over the problem domain.
    pub fn for_problem(p: &ProblemSpec, nodes: usize, boundary: Boundary) -> Result<Grid> {
        let (a, b) = p.domain();
        Grid::new(a, b, nodes, boundary)
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.x_min, self.x_max)
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.nodes - 1) as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        if j + 1 == self.nodes {
            self.x_max
        } else {
            self.x_min + j as f64 * self.dx()
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.nodes).map(|j| self.x(j)).collect()
    }

    /// Samples `u0`, checking periodicity when required.
    pub fn sample_initial(&self, p: &ProblemSpec) -> Result<Vec<f64>> {
        let u0 = compile(p.initial(), SPACE_VAR)?;
        let values = self
            .points()
            .into_iter()
            .map(|x| eval(&u0, x, || format!("u0 at x = {x}")))
            .collect::<Result<Vec<_>>>()?;
        if self.boundary == Boundary::Periodic {
            let gap = (values[0] - values[self.nodes - 1]).abs();
            if gap > PERIODIC_TOLERANCE {
                return Err(Error::InvalidProblem(format!(
                    "periodic grid but u0 differs by {gap} between the ends"
                )));
            }
        }
        Ok(values)
    }
}

fn compile(e: &crate::symexpr::Expr, var: &str) -> Result<Program> {
    e.compile(var).map_err(|source| Error::Eval {
        context: format!("compiling `{e}`"),
        source,
    })
}

fn eval(p: &Program, at: f64, context: impl FnOnce() -> alloc::string::String) -> Result<f64> {
    p.eval(at).map_err(|source| Error::Eval {
        context: context(),
        source,
    })
}

/// `H` and `H'` compiled for one grid.
#[derive(Clone, Debug)]
pub struct LfScheme {
    grid: Grid,
    h: Program,
    dh: Program,
}

impl LfScheme {
    pub fn new(p: &ProblemSpec, grid: Grid) -> Result<LfScheme> {
        let dh = p
            .hamiltonian()
            .differentiate_capped(STATE_VAR, p.node_cap())?;
        Ok(LfScheme {
            h: compile(p.hamiltonian(), STATE_VAR)?,
            dh: compile(&dh, STATE_VAR)?,
            grid,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// `(u_{j-1}, u_{j+1})` with the boundary closure applied.
    fn neighbours(&self, u: &[f64], j: usize) -> (f64, f64) {
        let n = u.len();
        match self.grid.boundary {
            Boundary::Periodic => {
                // n-1 distinct nodes; node n-1 is node 0 again
                let m = n - 1;
                let j = j % m;
                (u[(j + m - 1) % m], u[(j + 1) % m])
            }
            Boundary::Extrapolate => {
                let left = if j == 0 {
                    3.0 * u[0] - 3.0 * u[1] + u[2]
                } else {
                    u[j - 1]
                };
                let right = if j + 1 == n {
                    3.0 * u[n - 1] - 3.0 * u[n - 2] + u[n - 3]
                } else {
                    u[j + 1]
                };
                (left, right)
            }
        }
    }

    fn slope(&self, u: &[f64], j: usize) -> f64 {
        let (l, r) = self.neighbours(u, j);
        (r - l) / (2.0 * self.grid.dx())
    }

    /// `max_j |H'(central slope_j)|`.
    pub fn max_speed(&self, u: &[f64]) -> Result<f64> {
        let mut max = 0.0f64;
        for j in 0..u.len() {
            let s = self.slope(u, j);
            let a = eval(&self.dh, s, || format!("H' at slope {s} (node {j})"))?;
            if !a.is_finite() {
                return Err(Error::NonFinite { step: 0 });
            }
            max = max.max(a.abs());
        }
        Ok(max)
    }

    /// One step; `step` only labels errors.
    pub fn step(&self, u: &[f64], dt: f64, alpha: f64, step: usize) -> Result<Vec<f64>> {
        let n = self.grid.nodes;
        if u.len() != n {
            return Err(Error::InvalidArgument(format!(
                "{} values for a grid of {n} nodes",
                u.len()
            )));
        }
        let dx = self.grid.dx();
        let ratio = dt * alpha / dx;
        if ratio > 0.5 * (1.0 + EPS) {
            return Err(Error::Cfl { ratio });
        }
        let required = self.max_speed(u)?;
        if alpha < required {
            return Err(Error::Viscosity { alpha, required });
        }
        let mut out = Vec::with_capacity(n);
        for j in 0..n {
            let (l, r) = self.neighbours(u, j);
            let s = (r - l) / (2.0 * dx);
            let h = eval(&self.h, s, || format!("H at slope {s} (node {j}, step {step})"))?;
            let v = u[j] - dt * h + 0.5 * dt * alpha * (r - 2.0 * u[j] + l) / dx;
            if !v.is_finite() {
                return Err(Error::NonFinite { step });
            }
            out.push(v);
        }
        if self.grid.boundary == Boundary::Periodic {
            out[n - 1] = out[0];
        }
        Ok(out)
    }
}

/// One monotone step, compiling `H` on the fly.
pub fn lf_step(values: &[f64], p: &ProblemSpec, grid: &Grid, dt: f64, alpha: f64) -> Result<Vec<f64>> {
    LfScheme::new(p, grid.clone())?.step(values, dt, alpha, 0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub values: Vec<f64>,
    /// Viscosity coefficient in force on arrival; never decreases in time.
    pub alpha: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridSolution {
    pub grid: Grid,
    /// Strictly increasing in time, starting at `t = 0`.
    pub snapshots: Vec<Snapshot>,
    pub cfl: f64,
    /// Final viscosity coefficient.
    pub alpha: f64,
    pub steps: usize,
}

impl GridSolution {
    pub fn at(&self, t: f64) -> Option<&Snapshot> {
        self.snapshots.iter().find(|s| s.t == t)
    }

    /// Partial sums of a series sampled like a solver run, e.g. to emit
    /// them side by side or to compare a series with itself.
    pub fn from_series(series: &AdmSeries, order: usize, grid: Grid, times: &[f64]) -> Result<GridSolution> {
        let times = snapshot_times(times, times.iter().copied().fold(0.0, f64::max))?;
        let points = grid.points();
        let snapshots = times
            .into_iter()
            .map(|t| {
                let values = points
                    .iter()
                    .map(|&x| series.partial_sum(order, x, t))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Snapshot { t, values, alpha: 0.0 })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(GridSolution {
            grid,
            snapshots,
            cfl: 0.0,
            alpha: 0.0,
            steps: 0,
        })
    }
}

/// `0`, the requested times, and `t_end`, sorted without duplicates.
fn snapshot_times(requested: &[f64], t_end: f64) -> Result<Vec<f64>> {
    if !(t_end.is_finite() && t_end >= 0.0) {
        return Err(Error::InvalidArgument(format!("end time {t_end}")));
    }
    if let Some(t) = requested
        .iter()
        .find(|t| !(t.is_finite() && **t >= 0.0 && **t <= t_end))
    {
        return Err(Error::InvalidArgument(format!(
            "snapshot time {t} outside [0, {t_end}]"
        )));
    }
    let mut times: Vec<f64> = Vec::with_capacity(requested.len() + 2);
    times.push(0.0);
    times.extend_from_slice(requested);
    times.push(t_end);
    times.sort_by(f64::total_cmp);
    times.dedup();
    Ok(times)
}

/// Marches from `u0` to `t_end`, landing exactly on every requested time.
///
/// `dt = cfl dx / (2α)`; `α` starts at the largest `|H'|` over the slopes
/// of the sampled `u0` and is raised, never lowered, as the slopes evolve.
/// A `cfl` above 1 violates the monotonicity bound and fails on the first
/// step.
pub fn solve(p: &ProblemSpec, grid: &Grid, t_end: f64, cfl: f64, times: &[f64]) -> Result<GridSolution> {
    if !(cfl.is_finite() && cfl > 0.0) {
        return Err(Error::InvalidArgument(format!("cfl number {cfl}")));
    }
    let targets = snapshot_times(times, t_end)?;
    let scheme = LfScheme::new(p, grid.clone())?;
    let dx = grid.dx();
    let mut u = grid.sample_initial(p)?;
    let mut alpha = scheme.max_speed(&u)?;
    let mut t = 0.0;
    let mut steps = 0;
    let mut snapshots = alloc::vec![Snapshot {
        t: 0.0,
        values: u.clone(),
        alpha,
    }];

    for &target in &targets[1..] {
        while t < target {
            alpha = alpha.max(scheme.max_speed(&u).map_err(|e| match e {
                Error::NonFinite { .. } => Error::NonFinite { step: steps },
                e => e,
            })?);
            let full = if alpha > 0.0 { cfl * dx / (2.0 * alpha) } else { f64::INFINITY };
            let remaining = target - t;
            let (dt, lands) = if full >= remaining * (1.0 - EPS) {
                (remaining, true)
            } else {
                (full, false)
            };
            u = scheme.step(&u, dt, alpha, steps)?;
            steps += 1;
            t = if lands { target } else { t + dt };
        }
        snapshots.push(Snapshot {
            t: target,
            values: u.clone(),
            alpha,
        });
    }
    Ok(GridSolution {
        grid: grid.clone(),
        snapshots,
        cfl,
        alpha,
        steps,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComparisonRow {
    pub t: f64,
    pub order: usize,
    pub sup: f64,
    pub rms: f64,
    /// `t > T*`; never set when `T*` is infinite.
    pub past_critical: bool,
    /// Nodes entering the norms.
    pub nodes: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonReport {
    pub t_star: Option<f64>,
    pub rows: Vec<ComparisonRow>,
}

/// Nodes compared at time `t`: all distinct nodes when periodic; otherwise
/// the interior nodes farther than `t α` from either end, which the
/// boundary closure cannot yet have influenced. `α` is the coefficient in
/// force at `t` (the final one if `t` is not a snapshot time); as it never
/// decreases, `t α` bounds the distance travelled since `t = 0`.
pub fn comparison_window(sol: &GridSolution, t: f64) -> core::ops::Range<usize> {
    let n = sol.grid.nodes;
    match sol.grid.boundary {
        Boundary::Periodic => 0..n - 1,
        Boundary::Extrapolate => {
            let alpha = sol.at(t).map_or(sol.alpha, |s| s.alpha);
            let reach = t * alpha;
            let (a, b) = sol.grid.bounds();
            let first = (1..n - 1).find(|&j| sol.grid.x(j) - a >= reach);
            let last = (1..n - 1).rev().find(|&j| b - sol.grid.x(j) >= reach);
            match (first, last) {
                (Some(f), Some(l)) if f <= l => f..l + 1,
                _ => 0..0,
            }
        }
    }
}

/// Sup and RMS distance between the solver and the order-`order` partial
/// sum at each requested time, over [`comparison_window`]. A time whose
/// window is empty gets a row with no nodes and NaN norms.
pub fn compare(sol: &GridSolution, series: &AdmSeries, order: usize, times: &[f64]) -> Result<ComparisonReport> {
    let critical = critical_time(series.problem(), DEFAULT_SCAN_POINTS)?;
    let points = sol.grid.points();
    // ũ_n(x_j), reused at every time
    let coeffs = (0..=order)
        .map(|n| {
            points
                .iter()
                .map(|&x| series.coefficient_at(n, x))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::with_capacity(times.len());
    for &t in times {
        let snap = sol.at(t).ok_or(Error::MissingSnapshot { time: t })?;
        let window = comparison_window(sol, t);
        let past_critical = critical.t_star.is_some_and(|ts| t > ts);
        if window.is_empty() {
            // every node is within reach of the boundary closure
            rows.push(ComparisonRow {
                t,
                order,
                sup: f64::NAN,
                rms: f64::NAN,
                past_critical,
                nodes: 0,
            });
            continue;
        }
        let (mut sup, mut sum_sq) = (0.0f64, 0.0f64);
        for j in window.clone() {
            let mut u_n = 0.0;
            let mut weight = 1.0;
            for (n, c) in coeffs.iter().enumerate() {
                if n > 0 {
                    weight *= t / n as f64;
                }
                u_n += c[j] * weight;
            }
            let d = (snap.values[j] - u_n).abs();
            sup = sup.max(d);
            sum_sq += d * d;
        }
        rows.push(ComparisonRow {
            t,
            order,
            sup,
            rms: libm::sqrt(sum_sq / window.len() as f64),
            past_critical,
            nodes: window.len(),
        });
    }
    Ok(ComparisonReport {
        t_star: critical.t_star,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adomian::{build_series, CapPolicy};
    use crate::symexpr::parse;
    use core::f64::consts::PI;

    fn problem(h: &str, u0: &str, a: f64, b: f64) -> ProblemSpec {
        ProblemSpec::new(parse(h).unwrap(), parse(u0).unwrap(), a, b).unwrap()
    }

    #[test]
    fn affine_step_is_exact() {
        let p = problem("v^2/2 + 3*v", "2*x - 1", -1.0, 1.0);
        let grid = Grid::for_problem(&p, 21, Boundary::Extrapolate).unwrap();
        let u = grid.sample_initial(&p).unwrap();
        let next = lf_step(&u, &p, &grid, 0.005, 6.0).unwrap();
        for (j, v) in next.iter().enumerate() {
            let exact = 2.0 * grid.x(j) - 1.0 - 0.005 * 8.0;
            assert!((v - exact).abs() < 1e-14, "node {j}: {v} vs {exact}");
        }
    }

    #[test]
    fn constant_data_decreases_uniformly() {
        let p = problem("v^2 + 3", "7", 0.0, 1.0);
        let grid = Grid::for_problem(&p, 11, Boundary::Periodic).unwrap();
        let next = lf_step(&alloc::vec![7.0; 11], &p, &grid, 0.02, 1.0).unwrap();
        assert!(next.iter().all(|v| (v - 6.94).abs() < 1e-15));
    }

    #[test]
    fn step_preconditions() {
        let p = problem("v^2/2", "x", 0.0, 1.0);
        let grid = Grid::for_problem(&p, 11, Boundary::Extrapolate).unwrap();
        let u = grid.sample_initial(&p).unwrap();
        assert!(matches!(lf_step(&u, &p, &grid, 1.0, 1.0), Err(Error::Cfl { .. })));
        assert!(matches!(lf_step(&u, &p, &grid, 0.01, 0.5), Err(Error::Viscosity { .. })));
        assert!(lf_step(&u[1..], &p, &grid, 0.01, 1.0).is_err());
    }

    #[test]
    fn periodicity_is_checked() {
        let p = problem("v", "x", 0.0, 1.0);
        let grid = Grid::for_problem(&p, 11, Boundary::Periodic).unwrap();
        assert!(matches!(grid.sample_initial(&p), Err(Error::InvalidProblem(_))));
        assert!(Grid::new(0.0, 1.0, 2, Boundary::Periodic).is_err());
        assert!(Grid::new(1.0, 1.0, 5, Boundary::Periodic).is_err());
    }

    #[test]
    fn zero_end_time() {
        let p = problem("v^2/2", "-x^2", -2.0, 2.0);
        let grid = Grid::for_problem(&p, 41, Boundary::Extrapolate).unwrap();
        let sol = solve(&p, &grid, 0.0, 0.5, &[]).unwrap();
        assert_eq!(sol.snapshots.len(), 1);
        assert_eq!(sol.snapshots[0].values, grid.sample_initial(&p).unwrap());
    }

    #[test]
    fn snapshots_are_hit_exactly() {
        let p = problem("-sqrt(1+v^2)", "sin(x)", 0.0, 2.0 * PI);
        let grid = Grid::for_problem(&p, 101, Boundary::Periodic).unwrap();
        let sol = solve(&p, &grid, 0.5, 0.5, &[0.1, 0.25, 0.1]).unwrap();
        let ts: Vec<f64> = sol.snapshots.iter().map(|s| s.t).collect();
        assert_eq!(ts, [0.0, 0.1, 0.25, 0.5]);
        assert!(solve(&p, &grid, 0.5, 0.5, &[0.7]).is_err());
        assert!(matches!(solve(&p, &grid, 0.5, 10.0, &[]), Err(Error::Cfl { .. })));
    }

    #[test]
    fn self_comparison_is_zero() {
        let p = problem("-sqrt(1+v^2)", "sin(x)", 0.0, 2.0 * PI);
        let s = build_series(&p, 4, CapPolicy::Fail).unwrap();
        let grid = Grid::for_problem(&p, 51, Boundary::Periodic).unwrap();
        let times = [0.0, 0.5, 2.0];
        let sol = GridSolution::from_series(&s, 4, grid, &times).unwrap();
        let report = compare(&sol, &s, 4, &times).unwrap();
        assert!(report.rows.iter().all(|r| r.sup == 0.0 && r.rms == 0.0));
        assert!(!report.rows[1].past_critical && report.rows[2].past_critical);
        assert!(matches!(compare(&sol, &s, 4, &[0.3]), Err(Error::MissingSnapshot { .. })));
    }

    #[test]
    fn window_shrinks_with_the_realized_speed() {
        let p = problem("v^2/2", "-x^2", -2.0, 2.0);
        let s = build_series(&p, 4, CapPolicy::Fail).unwrap();
        let grid = Grid::for_problem(&p, 401, Boundary::Extrapolate).unwrap();
        let times = [0.0, 0.1, 0.4];
        let sol = solve(&p, &grid, 0.4, 0.5, &times).unwrap();
        let alphas: Vec<f64> = sol.snapshots.iter().map(|s| s.alpha).collect();
        assert!(alphas.windows(2).all(|w| w[0] <= w[1]), "{alphas:?}");
        let report = compare(&sol, &s, 4, &times).unwrap();
        assert_eq!(report.rows[0].nodes, 399);
        assert!(report.rows[1].nodes > 0 && report.rows[1].nodes < 399);
        // by t = 0.4 the boundary can have reached every node
        assert_eq!(report.rows[2].nodes, 0);
        assert!(report.rows[2].sup.is_nan());
    }
}
