//! Characteristic lines `x(t) = x_0 + H'(u0'(x_0)) t` of the conservation
//! law satisfied by `v = u_x`, their crossings, and the critical time
//! `T* = -1 / min_x (H' ∘ u0')'(x)`.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::problem::{ProblemSpec, SPACE_VAR, STATE_VAR};
use crate::symexpr::{Expr, Program};

pub const DEFAULT_SCAN_POINTS: usize = 10_000;
pub const DEFAULT_FAN_SIZE: usize = 10_001;
/// A minimum slope at or above `-INFINITE_TOLERANCE` means no crossing.
pub const INFINITE_TOLERANCE: f64 = 1e-12;
const GOLDEN_TOLERANCE: f64 = 1e-10;

/// Compiled `x ↦ H'(u0'(x))` and its slope.
#[derive(Clone, Debug)]
pub struct SpeedField {
    speed: Expr,
    speed_program: Program,
    slope: Expr,
    slope_program: Program,
}

fn compile(e: &Expr) -> Result<Program> {
    e.compile(SPACE_VAR).map_err(|source| Error::Eval {
        context: format!("compiling `{e}`"),
        source,
    })
}

impl SpeedField {
    pub fn new(p: &ProblemSpec) -> Result<SpeedField> {
        let cap = p.node_cap();
        let dh = p.hamiltonian().differentiate_capped(STATE_VAR, cap)?;
        let du0 = p.initial().differentiate_capped(SPACE_VAR, cap)?;
        let speed = dh.substitute_capped(STATE_VAR, &du0, cap)?.simplify();
        let slope = speed.differentiate_capped(SPACE_VAR, cap)?;
        Ok(SpeedField {
            speed_program: compile(&speed)?,
            slope_program: compile(&slope)?,
            speed,
            slope,
        })
    }

    /// `a(v_0(x))` as an expression in `x`.
    pub fn speed_expr(&self) -> &Expr {
        &self.speed
    }

    /// `(H' ∘ u0')'` as an expression in `x`.
    pub fn slope_expr(&self) -> &Expr {
        &self.slope
    }

    pub fn speed(&self, x0: f64) -> Result<f64> {
        self.speed_program.eval(x0).map_err(|source| Error::Eval {
            context: format!("characteristic speed at x = {x0}"),
            source,
        })
    }

    pub fn slope(&self, x: f64) -> Result<f64> {
        self.slope_program.eval(x).map_err(|source| Error::Eval {
            context: format!("speed slope at x = {x}"),
            source,
        })
    }
}

/// `H'(u0'(x0))`.
pub fn char_speed(p: &ProblemSpec, x0: f64) -> Result<f64> {
    SpeedField::new(p)?.speed(x0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CharLine {
    pub foot: f64,
    pub speed: f64,
}

impl CharLine {
    pub fn position(&self, t: f64) -> f64 {
        self.foot + self.speed * t
    }
}

/// Lines with strictly increasing feet.
#[derive(Clone, Debug, PartialEq)]
pub struct CharFan {
    lines: Vec<CharLine>,
}

impl CharFan {
    /// Sorts by foot; duplicate feet or non-finite data are rejected.
    pub fn new(mut lines: Vec<CharLine>) -> Result<CharFan> {
        if lines.iter().any(|l| !l.foot.is_finite() || !l.speed.is_finite()) {
            return Err(Error::InvalidArgument("non-finite characteristic".into()));
        }
        lines.sort_by(|a, b| a.foot.total_cmp(&b.foot));
        if lines.windows(2).any(|w| w[0].foot >= w[1].foot) {
            return Err(Error::InvalidArgument("duplicate characteristic foot".into()));
        }
        Ok(CharFan { lines })
    }

    /// `n` equispaced feet spanning the problem domain.
    pub fn equispaced(p: &ProblemSpec, n: usize) -> Result<CharFan> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("fan of {n} lines")));
        }
        let field = SpeedField::new(p)?;
        let (a, b) = p.domain();
        let lines = (0..n)
            .map(|i| {
                let foot = lerp(a, b, i, n);
                Ok(CharLine {
                    foot,
                    speed: field.speed(foot)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        CharFan::new(lines)
    }

    pub fn lines(&self) -> &[CharLine] {
        &self.lines
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    /// Crossing time of each line with its right neighbour.
    pub fn adjacent_crossings(&self) -> Vec<Option<f64>> {
        self.lines
            .windows(2)
            .map(|w| pairwise_crossing(&w[0], &w[1]))
            .collect()
    }
}

/// `i`-th of `n` equispaced points on `[a, b]`, hitting both ends exactly.
fn lerp(a: f64, b: f64, i: usize, n: usize) -> f64 {
    if i + 1 == n {
        b
    } else {
        a + (b - a) * (i as f64 / (n - 1) as f64)
    }
}

/// Forward-time crossing of two lines with `l1.foot < l2.foot`.
pub fn pairwise_crossing(l1: &CharLine, l2: &CharLine) -> Option<f64> {
    (l1.speed > l2.speed).then(|| (l2.foot - l1.foot) / (l1.speed - l2.speed))
}

/// Earliest crossing over adjacent pairs.
pub fn first_crossing(fan: &CharFan) -> Result<Option<f64>> {
    if fan.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "fan needs at least 2 lines, has {}",
            fan.len()
        )));
    }
    Ok(fan
        .adjacent_crossings()
        .into_iter()
        .flatten()
        .min_by(f64::total_cmp))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CriticalKind {
    Finite,
    Infinite,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CriticalTimeResult {
    pub kind: CriticalKind,
    /// `-1/m` when finite.
    pub t_star: Option<f64>,
    /// Minimizer of `(H' ∘ u0')'` over the domain.
    pub x_star: f64,
    pub m: f64,
    /// Set when `x_star` is within one scan step of the domain boundary, so
    /// the true minimum may lie outside.
    pub boundary_warning: bool,
    /// Scan points where the slope could not be evaluated.
    pub skipped: usize,
}

impl CriticalTimeResult {
    pub fn is_finite(&self) -> bool {
        self.kind == CriticalKind::Finite
    }
}

/// Dense scan of the speed slope over the domain, then golden-section
/// refinement around the best scan point.
pub fn critical_time(p: &ProblemSpec, scan_points: usize) -> Result<CriticalTimeResult> {
    if scan_points < 3 {
        return Err(Error::InvalidArgument(format!(
            "{scan_points} scan points, need at least 3"
        )));
    }
    let field = SpeedField::new(p)?;
    let (a, b) = p.domain();
    let step = (b - a) / (scan_points - 1) as f64;

    let mut best: Option<(usize, f64)> = None;
    let mut skipped = 0;
    for i in 0..scan_points {
        match field.slope(lerp(a, b, i, scan_points)) {
            // strict comparison keeps the leftmost point of a plateau
            Ok(g) if g.is_finite() => {
                if best.is_none_or(|(_, m)| g < m) {
                    best = Some((i, g));
                }
            }
            _ => skipped += 1,
        }
    }
    if 2 * skipped > scan_points {
        return Err(Error::ScanFailed {
            skipped,
            total: scan_points,
        });
    }
    let (i, scanned) = best.ok_or(Error::ScanFailed {
        skipped,
        total: scan_points,
    })?;
    let x_i = lerp(a, b, i, scan_points);
    let lo = if i == 0 { a } else { lerp(a, b, i - 1, scan_points) };
    let hi = if i + 1 == scan_points { b } else { lerp(a, b, i + 1, scan_points) };
    let (mut x_star, mut m) = golden_section(|x| field.slope(x).ok(), lo, hi);
    if !(m < scanned) {
        x_star = x_i;
        m = scanned;
    }

    let boundary_warning = x_star - a <= step || b - x_star <= step;
    let finite = m < -INFINITE_TOLERANCE;
    Ok(CriticalTimeResult {
        kind: if finite {
            CriticalKind::Finite
        } else {
            CriticalKind::Infinite
        },
        t_star: finite.then(|| -1.0 / m),
        x_star,
        m,
        boundary_warning,
        skipped,
    })
}

/// Minimizes `f` on `[lo, hi]`; points where `f` is undefined count as
/// `+∞`.
fn golden_section(f: impl Fn(f64) -> Option<f64>, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let inv_phi = (libm::sqrt(5.0) - 1.0) / 2.0;
    let g = |x: f64| f(x).filter(|v| v.is_finite()).unwrap_or(f64::INFINITY);
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let (mut fc, mut fd) = (g(c), g(d));
    while hi - lo > GOLDEN_TOLERANCE {
        if fc <= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = g(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = g(d);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, g(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::parse;
    use core::f64::consts::{FRAC_PI_2, PI};

    fn problem(h: &str, u0: &str, a: f64, b: f64) -> ProblemSpec {
        ProblemSpec::new(parse(h).unwrap(), parse(u0).unwrap(), a, b).unwrap()
    }

    #[test]
    fn speeds() {
        assert_eq!(char_speed(&problem("v^2/2", "-x^2", -5.0, 5.0), 1.0).unwrap(), -2.0);
        let sin = problem("sqrt(1+v^2)", "sin(x)", 0.0, 2.0 * PI);
        let s = char_speed(&sin, 0.0).unwrap();
        assert!((s - 1.0 / libm::sqrt(2.0)).abs() < 1e-15);
        let lin = problem("sqrt(1+v^2)", "3*x+1", -1.0, 1.0);
        for x in [-0.9, 0.0, 0.4] {
            assert!((char_speed(&lin, x).unwrap() - 3.0 / libm::sqrt(10.0)).abs() < 1e-15);
        }
    }

    #[test]
    fn pairwise() {
        let l = |foot, speed| CharLine { foot, speed };
        assert_eq!(pairwise_crossing(&l(-1.0, 2.0), &l(1.0, -2.0)), Some(0.5));
        assert_eq!(pairwise_crossing(&l(-1.0, 2.0), &l(1.0, 2.0)), None);
        assert_eq!(pairwise_crossing(&l(-1.0, -2.0), &l(1.0, 2.0)), None);
    }

    #[test]
    fn fans() {
        let burgers = problem("v^2/2", "-x^2", -1.0, 1.0);
        let fan = CharFan::equispaced(&burgers, 101).unwrap();
        assert!((first_crossing(&fan).unwrap().unwrap() - 0.5).abs() < 1e-9);
        let lin = problem("sqrt(1+v^2)", "x", -1.0, 1.0);
        assert_eq!(first_crossing(&CharFan::equispaced(&lin, 50).unwrap()).unwrap(), None);
        let single = CharFan::new(alloc::vec![CharLine { foot: 0.0, speed: 1.0 }]).unwrap();
        assert!(first_crossing(&single).is_err());
        let dup = alloc::vec![CharLine { foot: 0.0, speed: 1.0 }; 2];
        assert!(CharFan::new(dup).is_err());
    }

    #[test]
    fn critical_times() {
        let r = critical_time(&problem("v^2/2", "-x^2", -5.0, 5.0), DEFAULT_SCAN_POINTS).unwrap();
        assert!(r.is_finite());
        assert!((r.t_star.unwrap() - 0.5).abs() < 1e-12);
        assert!((r.m + 2.0).abs() < 1e-12);
        // constant slope: the leftmost point wins, which sits on the boundary
        assert!(r.boundary_warning);

        let r = critical_time(&problem("sqrt(1+v^2)", "3*x+1", -5.0, 5.0), 1000).unwrap();
        assert_eq!(r.kind, CriticalKind::Infinite);
        assert_eq!(r.t_star, None);

        let r = critical_time(&problem("sqrt(1+v^2)", "sin(x)", 0.0, 2.0 * PI), DEFAULT_SCAN_POINTS)
            .unwrap();
        assert!((r.t_star.unwrap() - 1.0).abs() < 1e-9);
        assert!((r.x_star - FRAC_PI_2).abs() < 1e-4);
        assert!(!r.boundary_warning);
    }

    #[test]
    fn scan_failure() {
        // the slope is undefined for x < 0
        let p = problem("v^2/2", "sqrt(x)^3", -3.0, 1.0);
        assert!(matches!(critical_time(&p, 100), Err(Error::ScanFailed { .. })));
    }
}
