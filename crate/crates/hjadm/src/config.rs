//! Run configuration: one TOML file drives every subcommand.
//!
//! ```toml
//! [problem]
//! hamiltonian = "v^2/2"
//! u0 = "-x^2"
//! domain = [-2, 2]          # numbers or constant expressions such as "2*pi"
//!
//! [adm]
//! terms = 4
//!
//! [fd]
//! nodes = 2001
//! t_end = 0.4
//! times = [0.1, 0.2, 0.3]
//! ```
//!
//! Every section but `[problem]` may be omitted.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use hjadm_core::adomian::MAX_ORDER;
use hjadm_core::characteristics::{DEFAULT_FAN_SIZE, DEFAULT_SCAN_POINTS};
use hjadm_core::fdsolve::{DEFAULT_CFL, DEFAULT_NODES, PERIODIC_TOLERANCE};
use hjadm_core::problem::{SPACE_VAR, STATE_VAR};
use hjadm_core::symexpr::DEFAULT_NODE_CAP;
use hjadm_core::{parse, Boundary, Expr, ProblemSpec};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DEFAULT_TERMS: usize = 4;
pub const DEFAULT_SAMPLES: usize = 101;
/// End time used when neither `t_end` nor `times` is given.
pub const DEFAULT_T_END: f64 = 1.0;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Syntax(String),
    #[error("{key}: {message}")]
    Invalid { key: String, message: String },
}

fn invalid(key: &str, message: impl fmt::Display) -> ConfigError {
    ConfigError::Invalid {
        key: key.to_string(),
        message: message.to_string(),
    }
}

/// A domain end point: a number, or a constant expression in which `pi`
/// may appear.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Bound {
    Number(f64),
    Expr(String),
}

impl Bound {
    fn value(&self, key: &str) -> Result<f64, ConfigError> {
        let text = match self {
            Bound::Number(x) => return Ok(*x),
            Bound::Expr(s) => s,
        };
        let e = parse(text).map_err(|err| invalid(key, err))?;
        if let Some(v) = e.free_vars().into_iter().find(|v| v != "pi") {
            return Err(invalid(key, format!("unknown variable {v}")));
        }
        e.eval_at("pi", PI).map_err(|err| invalid(key, err))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSection {
    pub hamiltonian: String,
    pub u0: String,
    pub domain: [Bound; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AdmSection {
    /// Highest series order `N`.
    pub terms: usize,
    pub node_cap: usize,
    /// Points of the domain at which series and radius are tabulated.
    pub samples: usize,
}

impl Default for AdmSection {
    fn default() -> Self {
        AdmSection {
            terms: DEFAULT_TERMS,
            node_cap: DEFAULT_NODE_CAP,
            samples: DEFAULT_SAMPLES,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CharacteristicsSection {
    pub fan: usize,
    pub scan: usize,
}

impl Default for CharacteristicsSection {
    fn default() -> Self {
        CharacteristicsSection {
            fan: DEFAULT_FAN_SIZE,
            scan: DEFAULT_SCAN_POINTS,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryMode {
    /// Periodic when `u0` and `u0'` agree at both ends, else extrapolate.
    #[default]
    Auto,
    Periodic,
    Extrapolate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FdSection {
    pub nodes: usize,
    pub cfl: f64,
    pub boundary: BoundaryMode,
    pub t_end: Option<f64>,
    pub times: Vec<f64>,
}

impl Default for FdSection {
    fn default() -> Self {
        FdSection {
            nodes: DEFAULT_NODES,
            cfl: DEFAULT_CFL,
            boundary: BoundaryMode::Auto,
            t_end: None,
            times: Vec::new(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputsSection {
    pub dir: PathBuf,
    pub format: Format,
}

impl Default for OutputsSection {
    fn default() -> Self {
        OutputsSection {
            dir: PathBuf::from("out"),
            format: Format::Csv,
        }
    }
}

/// The file as written, with defaults filled in.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub problem: ProblemSection,
    #[serde(default)]
    pub adm: AdmSection,
    #[serde(default)]
    pub characteristics: CharacteristicsSection,
    #[serde(default)]
    pub fd: FdSection,
    #[serde(default)]
    pub outputs: OutputsSection,
}

/// A validated configuration with everything the stages need resolved.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub file: ConfigFile,
    pub problem: ProblemSpec,
    pub boundary: Boundary,
    pub t_end: f64,
    /// Snapshot and comparison times, ascending.
    pub times: Vec<f64>,
}

impl RunConfig {
    pub fn domain(&self) -> (f64, f64) {
        self.problem.domain()
    }

    pub fn out_dir(&self) -> &Path {
        &self.file.outputs.dir
    }

    pub fn format(&self) -> Format {
        self.file.outputs.format
    }

    /// `samples` equispaced points covering the domain.
    pub fn sample_points(&self) -> Vec<f64> {
        let (a, b) = self.domain();
        let n = self.file.adm.samples;
        if n == 1 {
            return vec![a];
        }
        (0..n)
            .map(|i| if i == n - 1 { b } else { a + (b - a) * i as f64 / (n - 1) as f64 })
            .collect()
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let file: ConfigFile = toml::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;
    file.validate()
}

fn expression(key: &str, text: &str, var: &str) -> Result<Expr, ConfigError> {
    let e = parse(text).map_err(|err| invalid(key, err))?;
    let stray: BTreeSet<String> = e.free_vars().into_iter().filter(|v| v != var).collect();
    match stray.first() {
        Some(v) => Err(invalid(key, format!("unknown variable {v} (expected {var})"))),
        None => Ok(e),
    }
}

impl ConfigFile {
    pub fn validate(self) -> Result<RunConfig, ConfigError> {
        let h = expression("problem.hamiltonian", &self.problem.hamiltonian, STATE_VAR)?;
        let u0 = expression("problem.u0", &self.problem.u0, SPACE_VAR)?;
        let a = self.problem.domain[0].value("problem.domain")?;
        let b = self.problem.domain[1].value("problem.domain")?;
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(invalid("problem.domain", format!("[{a}, {b}] is not a bounded interval")));
        }

        let adm = &self.adm;
        if adm.terms > MAX_ORDER {
            return Err(invalid("adm.terms", format!("{} exceeds the supported {MAX_ORDER}", adm.terms)));
        }
        if adm.node_cap == 0 {
            return Err(invalid("adm.node_cap", "must be positive"));
        }
        if adm.samples == 0 {
            return Err(invalid("adm.samples", "must be positive"));
        }
        if self.characteristics.fan < 2 {
            return Err(invalid("characteristics.fan", "needs at least 2 lines"));
        }
        if self.characteristics.scan < 2 {
            return Err(invalid("characteristics.scan", "needs at least 2 points"));
        }

        let fd = &self.fd;
        if fd.nodes < 3 {
            return Err(invalid("fd.nodes", "needs at least 3 nodes"));
        }
        // cfl above 1 is accepted here and caught by the solver, so that it
        // reports as a numerical failure
        if !(fd.cfl.is_finite() && fd.cfl > 0.0) {
            return Err(invalid("fd.cfl", "must be positive"));
        }
        let t_end = match fd.t_end {
            Some(t) => t,
            None => fd.times.iter().copied().fold(None, |m: Option<f64>, t| Some(m.map_or(t, |m| m.max(t))))
                .unwrap_or(DEFAULT_T_END),
        };
        if !(t_end.is_finite() && t_end >= 0.0) {
            return Err(invalid("fd.t_end", "must be a non-negative number"));
        }
        if let Some(t) = fd.times.iter().find(|t| !(**t >= 0.0 && **t <= t_end)) {
            return Err(invalid("fd.times", format!("{t} lies outside [0, {t_end}]")));
        }
        let mut times = if fd.times.is_empty() { vec![0.0, t_end] } else { fd.times.clone() };
        times.sort_by(f64::total_cmp);
        times.dedup();

        let problem = ProblemSpec::new(h, u0, a, b)
            .map_err(|e| invalid("problem", e))?
            .with_terms(adm.terms)
            .with_node_cap(adm.node_cap);
        let boundary = match fd.boundary {
            BoundaryMode::Periodic => Boundary::Periodic,
            BoundaryMode::Extrapolate => Boundary::Extrapolate,
            BoundaryMode::Auto => detect_boundary(&problem),
        };
        let mut file = self;
        file.fd.t_end = Some(t_end);
        Ok(RunConfig {
            file,
            problem,
            boundary,
            t_end,
            times,
        })
    }
}

/// Periodic when `u0` and its slope match at the two ends.
fn detect_boundary(p: &ProblemSpec) -> Boundary {
    let (a, b) = p.domain();
    let matches = |e: &Expr| match (e.eval_at(SPACE_VAR, a), e.eval_at(SPACE_VAR, b)) {
        (Ok(ya), Ok(yb)) => (ya - yb).abs() <= PERIODIC_TOLERANCE * (1.0 + ya.abs().max(yb.abs())),
        _ => false,
    };
    let periodic = matches(p.initial())
        && p.initial().differentiate(SPACE_VAR).is_ok_and(|d| matches(&d.simplify()));
    if periodic {
        Boundary::Periodic
    } else {
        Boundary::Extrapolate
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BURGERS: &str = r#"
        [problem]
        hamiltonian = "v^2/2"
        u0 = "-x^2"
        domain = [-2, 2]
    "#;

    #[test]
    fn defaults_fill_missing_sections() {
        let cfg = parse_config(BURGERS).unwrap();
        assert_eq!(cfg.file.adm.terms, 4);
        assert_eq!(cfg.file.fd.nodes, 1001);
        assert_eq!(cfg.file.fd.cfl, 0.5);
        assert_eq!(cfg.file.characteristics.fan, 10_001);
        assert_eq!(cfg.file.characteristics.scan, 10_000);
        assert_eq!(cfg.boundary, Boundary::Extrapolate);
        assert_eq!(cfg.times, vec![0.0, 1.0]);
        assert_eq!(cfg.problem.hamiltonian(), &parse("v^2/2").unwrap());
        assert_eq!(cfg.problem.initial(), &parse("-x^2").unwrap());
    }

    #[test]
    fn symbolic_domain_and_periodic_detection() {
        let cfg = parse_config(
            r#"
            [problem]
            hamiltonian = "-sqrt(1+v^2)"
            u0 = "sin(x)"
            domain = [0, "2*pi"]
            [fd]
            times = [0.5, 0.1]
        "#,
        )
        .unwrap();
        assert_eq!(cfg.domain(), (0.0, 2.0 * PI));
        assert_eq!(cfg.boundary, Boundary::Periodic);
        assert_eq!(cfg.t_end, 0.5);
        assert_eq!(cfg.times, vec![0.1, 0.5]);
    }

    #[test]
    fn unknown_variable_names_the_key() {
        let text = BURGERS.replace("-x^2", "sin(y)");
        let err = parse_config(&text).unwrap_err();
        assert!(matches!(&err, ConfigError::Invalid { key, .. } if key == "problem.u0"));
        assert!(err.to_string().contains("unknown variable y"), "{err}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = parse_config(&format!("{BURGERS}\n[fd]\nnodez = 3\n")).unwrap_err();
        assert!(matches!(err, ConfigError::Syntax(ref m) if m.contains("nodez")), "{err}");
    }

    #[test]
    fn times_must_lie_before_the_end() {
        let err = parse_config(&format!("{BURGERS}\n[fd]\nt_end = 0.4\ntimes = [0.5]\n")).unwrap_err();
        assert!(matches!(&err, ConfigError::Invalid { key, .. } if key == "fd.times"), "{err}");
    }
}
