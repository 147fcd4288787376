//! Subcommand pipelines.

use std::fmt;
use std::io;
use std::path::Path;
use std::time::Instant;

use clap::ValueEnum;
use hjadm_core::adomian::estimate_radius;
use hjadm_core::characteristics::{first_crossing, CharFan, CriticalKind};
use hjadm_core::{build_series, compare, critical_time, solve, AdmSeries, CapPolicy, Grid};
use log::{debug, info, warn};
use serde_json::Value;

use crate::config::RunConfig;
use crate::manifest::{ErrorClass, ErrorRecord, Manifest, StageTiming};
use crate::output::{write_table, Table};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Subcommand {
    /// Series coefficients and the partial-sum surface.
    Series,
    /// Critical time from the slope of the characteristic speed.
    CriticalTime,
    /// Characteristic fan and adjacent crossing times.
    Characteristics,
    /// Finite-difference reference solution.
    FdSolve,
    /// Solver against the partial sum at each snapshot time.
    Compare,
    /// Ratio-test radius of the series in time.
    Radius,
}

impl Subcommand {
    pub fn name(self) -> &'static str {
        match self {
            Subcommand::Series => "series",
            Subcommand::CriticalTime => "critical-time",
            Subcommand::Characteristics => "characteristics",
            Subcommand::FdSolve => "fd-solve",
            Subcommand::Compare => "compare",
            Subcommand::Radius => "radius",
        }
    }
}

impl fmt::Display for Subcommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

enum StageError {
    Core(hjadm_core::Error),
    Io(io::Error),
}

impl From<hjadm_core::Error> for StageError {
    fn from(e: hjadm_core::Error) -> Self {
        StageError::Core(e)
    }
}

impl From<io::Error> for StageError {
    fn from(e: io::Error) -> Self {
        StageError::Io(e)
    }
}

impl StageError {
    fn record(&self) -> ErrorRecord {
        match self {
            StageError::Core(e) if e.is_numerical() => ErrorRecord::new(ErrorClass::Numerical, e.to_string()),
            StageError::Core(e) => ErrorRecord::new(ErrorClass::Config, e.to_string()),
            StageError::Io(e) => ErrorRecord::new(ErrorClass::Io, e.to_string()),
        }
    }
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    manifest: Manifest,
}

impl Ctx<'_> {
    fn timed<T>(&mut self, stage: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        let seconds = start.elapsed().as_secs_f64();
        debug!("{stage}: {seconds:.3} s");
        self.manifest.stages.push(StageTiming {
            stage: stage.to_string(),
            seconds,
        });
        out
    }

    fn emit(&mut self, table: &Table) -> io::Result<()> {
        let (dir, format) = (self.cfg.out_dir(), self.cfg.format());
        let record = self.timed(&format!("write {}", table.name), || write_table(dir, table, format))?;
        info!("wrote {} ({} rows)", dir.join(&record.name).display(), record.rows);
        self.manifest.files.push(record);
        Ok(())
    }

    fn note(&mut self, key: &str, value: impl Into<Value>) {
        self.manifest.summary.insert(key.to_string(), value.into());
    }

    fn series(&mut self) -> Result<AdmSeries, StageError> {
        let p = &self.cfg.problem;
        let s = self.timed("series", || build_series(p, p.terms(), CapPolicy::Fail))?;
        let sizes: Vec<usize> = s.coefficients().iter().map(|e| e.size()).collect();
        self.note("node_counts", sizes);
        if let Some(n) = s.finite_from() {
            self.note("finite_from", n);
        }
        Ok(s)
    }

    fn grid(&self) -> Result<Grid, StageError> {
        Ok(Grid::for_problem(&self.cfg.problem, self.cfg.file.fd.nodes, self.cfg.boundary)?)
    }
}

/// Runs one subcommand and writes its outputs and manifest into the
/// configured output directory. The returned manifest carries the status
/// and exit code; `Err` means the manifest itself could not be written.
pub fn run(sub: Subcommand, cfg: &RunConfig) -> io::Result<Manifest> {
    let echo = serde_json::to_value(&cfg.file).map_err(io::Error::from)?;
    let mut ctx = Ctx {
        cfg,
        manifest: Manifest::new(sub.name(), echo),
    };
    let dir = cfg.out_dir();
    std::fs::create_dir_all(dir)?;
    info!("{sub}: H = {}, u0 = {}", cfg.problem.hamiltonian(), cfg.problem.initial());

    let result = match sub {
        Subcommand::Series => series(&mut ctx),
        Subcommand::CriticalTime => critical(&mut ctx),
        Subcommand::Characteristics => characteristics(&mut ctx),
        Subcommand::FdSolve => fd_solve(&mut ctx),
        Subcommand::Compare => comparison(&mut ctx),
        Subcommand::Radius => radius(&mut ctx),
    };
    if let Err(e) = result {
        let record = e.record();
        warn!("{sub} failed: {}", record.message);
        ctx.manifest.fail(record);
    }
    ctx.manifest.write(dir)?;
    Ok(ctx.manifest)
}

/// Writes a manifest recording a configuration failure, for runs whose
/// output directory is known even though the config is not.
pub fn write_config_failure(sub: Subcommand, dir: &Path, message: &str) -> io::Result<Manifest> {
    let mut manifest = Manifest::new(sub.name(), Value::Null);
    manifest.fail(ErrorRecord::new(ErrorClass::Config, message));
    std::fs::create_dir_all(dir)?;
    manifest.write(dir)?;
    Ok(manifest)
}

fn series(ctx: &mut Ctx) -> Result<(), StageError> {
    let s = ctx.series()?;
    let xs = ctx.cfg.sample_points();
    let order = s.order();

    let mut coeffs = Table::new("series", &["n", "x", "u_tilde_n"]);
    for n in 0..=order {
        for &x in &xs {
            coeffs.push(vec![n.into(), x.into(), s.coefficient_at(n, x)?.into()]);
        }
    }
    let mut surface = Table::new("surface", &["x", "t", "u_N"]);
    for &x in &xs {
        for &t in &ctx.cfg.times {
            surface.push(vec![x.into(), t.into(), s.partial_sum(order, x, t)?.into()]);
        }
    }
    ctx.note("order", order);
    ctx.emit(&coeffs)?;
    ctx.emit(&surface)?;
    Ok(())
}

fn critical(ctx: &mut Ctx) -> Result<(), StageError> {
    let scan = ctx.cfg.file.characteristics.scan;
    let r = ctx.timed("critical time", || critical_time(&ctx.cfg.problem, scan))?;
    if r.boundary_warning {
        warn!("speed slope is smallest at the edge of the domain (x = {})", r.x_star);
    }
    let kind = match r.kind {
        CriticalKind::Finite => "finite",
        CriticalKind::Infinite => "infinite",
    };
    let t_star = r.t_star.unwrap_or(f64::INFINITY);
    info!("T* = {t_star} at x = {}", r.x_star);

    let mut table = Table::new("critical_time", &["kind", "t_star", "x_star", "m"]);
    table.push(vec![kind.into(), t_star.into(), r.x_star.into(), r.m.into()]);
    ctx.note("kind", kind);
    ctx.note("t_star", r.t_star);
    ctx.note("x_star", r.x_star);
    ctx.note("boundary_warning", r.boundary_warning);
    ctx.note("skipped", r.skipped);
    ctx.emit(&table)?;
    Ok(())
}

fn characteristics(ctx: &mut Ctx) -> Result<(), StageError> {
    let n = ctx.cfg.file.characteristics.fan;
    let fan = ctx.timed("fan", || CharFan::equispaced(&ctx.cfg.problem, n))?;
    let crossings = fan.adjacent_crossings();
    let first = first_crossing(&fan)?;

    // crossing_t is the time each line meets its right neighbour
    let mut table = Table::new("characteristics", &["x0", "speed", "crossing_t"]);
    for (i, line) in fan.lines().iter().enumerate() {
        let t = crossings.get(i).copied().flatten().unwrap_or(f64::INFINITY);
        table.push(vec![line.foot.into(), line.speed.into(), t.into()]);
    }
    ctx.note("first_crossing", first);
    ctx.emit(&table)?;
    Ok(())
}

fn fd_solve(ctx: &mut Ctx) -> Result<(), StageError> {
    let grid = ctx.grid()?;
    let cfg = ctx.cfg;
    let sol = ctx.timed("solve", || solve(&cfg.problem, &grid, cfg.t_end, cfg.file.fd.cfl, &cfg.times))?;
    info!("{} steps, alpha = {}", sol.steps, sol.alpha);

    let mut table = Table::new("fd", &["t", "x", "u"]);
    let xs = grid.points();
    for snap in &sol.snapshots {
        for (x, u) in xs.iter().zip(&snap.values) {
            table.push(vec![snap.t.into(), (*x).into(), (*u).into()]);
        }
    }
    ctx.note("steps", sol.steps);
    ctx.note("alpha", sol.alpha);
    ctx.note("periodic", grid.boundary() == hjadm_core::Boundary::Periodic);
    ctx.emit(&table)?;
    Ok(())
}

fn comparison(ctx: &mut Ctx) -> Result<(), StageError> {
    let grid = ctx.grid()?;
    let s = ctx.series()?;
    let cfg = ctx.cfg;
    let sol = ctx.timed("solve", || solve(&cfg.problem, &grid, cfg.t_end, cfg.file.fd.cfl, &cfg.times))?;
    let order = s.order();
    let report = ctx.timed("compare", || compare(&sol, &s, order, &cfg.times))?;

    let mut table = Table::new("compare", &["t", "N", "sup_diff", "rms_diff", "past_critical"]);
    for row in &report.rows {
        debug!("t = {}: sup {:e}, rms {:e}", row.t, row.sup, row.rms);
        table.push(vec![
            row.t.into(),
            row.order.into(),
            row.sup.into(),
            row.rms.into(),
            row.past_critical.into(),
        ]);
    }
    ctx.note("t_star", report.t_star);
    ctx.note("steps", sol.steps);
    ctx.emit(&table)?;
    Ok(())
}

fn radius(ctx: &mut Ctx) -> Result<(), StageError> {
    let s = ctx.series()?;
    let mut table = Table::new("radius", &["x", "radius", "valid", "low_order"]);
    let mut valid = 0;
    for x in ctx.cfg.sample_points() {
        let r = estimate_radius(&s, x)?;
        valid += usize::from(r.valid);
        let radius = if r.valid { r.radius.unwrap_or(f64::INFINITY) } else { f64::NAN };
        table.push(vec![x.into(), radius.into(), r.valid.into(), r.low_order.into()]);
    }
    ctx.note("valid_points", valid);
    ctx.emit(&table)?;
    Ok(())
}
