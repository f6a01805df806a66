//! Scenario configuration: a small sectioned `key = value` format.
//!
//! ```text
//! mode = "sweep"
//!
//! [problem]
//! omega_s = 0.2
//! wet = false
//!
//! [problem.nondimensional]
//! alpha = 3.0
//! xi = 1.0
//! eta = 2.0
//!
//! [sweep]
//! from = 0.0
//! to = 0.5
//! count = 26
//! ```
//!
//! Exactly one of `[problem.nondimensional]` / `[problem.dimensional]` must
//! be present; unknown keys are rejected with their full path. Dimensional
//! parameters use SI units consistently (`R_i`, `R_o` in meters, `mu`,
//! `kappa_f`, `p_o` in pascals, `mu_s`, `kappa_s` in newtons per meter);
//! only their ratios enter the solver.

use crate::sphere::{NondimensionalProblem, SolverError, SolverSettings, SphereProblem};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Relax,
    Solve,
    Sweep,
    StressProfile,
    GeometryCheck,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Relax => "relax",
            Mode::Solve => "solve",
            Mode::Sweep => "sweep",
            Mode::StressProfile => "stress-profile",
            Mode::GeometryCheck => "geometry-check",
        }
    }

    fn parse(s: &str) -> Option<Mode> {
        Some(match s {
            "relax" => Mode::Relax,
            "solve" => Mode::Solve,
            "sweep" => Mode::Sweep,
            "stress-profile" => Mode::StressProfile,
            "geometry-check" => Mode::GeometryCheck,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn parse(s: &str) -> Option<Format> {
        match s {
            "csv" => Some(Format::Csv),
            "json" => Some(Format::Json),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum ProblemParams {
    Nondimensional { alpha: f64, xi: f64, eta: f64, eta_f: f64, p_hat_o: f64 },
    Dimensional {
        r_i: f64,
        r_o: f64,
        mu: f64,
        mu_s: f64,
        kappa_s: f64,
        kappa_f: f64,
        p_o: f64,
    },
}

#[derive(Debug, Clone, Copy)]
pub struct SweepSpec {
    pub from: f64,
    pub to: f64,
    pub count: usize,
}

impl SweepSpec {
    pub fn grid(&self) -> Vec<f64> {
        (0..self.count)
            .map(|k| {
                if k == self.count - 1 {
                    self.to
                } else {
                    self.from + (self.to - self.from) * k as f64 / (self.count - 1) as f64
                }
            })
            .collect()
    }
}

/// A fully validated scenario.
#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub mode: Mode,
    pub omega_s: f64,
    pub omega_l: f64,
    pub wet: bool,
    pub params: ProblemParams,
    pub solver: SolverSettings,
    pub sweep: Option<SweepSpec>,
    pub out_path: Option<String>,
    pub format: Option<Format>,
    pub profile_samples: usize,
}

impl ScenarioConfig {
    /// The nondimensional problem this scenario solves.
    pub fn nondimensional(&self) -> Result<NondimensionalProblem, SolverError> {
        let nd = match self.params {
            ProblemParams::Nondimensional { alpha, xi, eta, eta_f, p_hat_o } => {
                NondimensionalProblem {
                    alpha,
                    xi,
                    eta,
                    eta_f,
                    p_hat_o,
                    omega_s: self.omega_s,
                    omega_l: self.omega_l,
                    wet: self.wet,
                }
            }
            ProblemParams::Dimensional { r_i, r_o, mu, mu_s, kappa_s, kappa_f, p_o } => {
                SphereProblem {
                    r_i,
                    r_o,
                    mu,
                    mu_s,
                    kappa_s,
                    kappa_f,
                    omega_s: self.omega_s,
                    omega_l: self.omega_l,
                    p_o,
                    wet: self.wet,
                }
                .nondimensionalize()?
            }
        };
        nd.validate()?;
        Ok(nd)
    }

    /// Output format: explicit choice, or the mode default (JSON for single
    /// solves, CSV for tables).
    pub fn effective_format(&self) -> Format {
        self.format.unwrap_or(match self.mode {
            Mode::Relax | Mode::Solve => Format::Json,
            Mode::Sweep | Mode::StressProfile | Mode::GeometryCheck => Format::Csv,
        })
    }

    /// A canonical text rendering of the scenario, sufficient to reproduce
    /// the run with no other state.
    pub fn echo(&self) -> String {
        use crate::emit::fmt_float as ff;
        let mut s = String::new();
        s.push_str(&format!("mode = \"{}\"\n", self.mode.as_str()));
        s.push_str(&format!("profile_samples = {}\n", self.profile_samples));
        s.push_str("[problem]\n");
        s.push_str(&format!("omega_s = {}\n", ff(self.omega_s)));
        s.push_str(&format!("omega_l = {}\n", ff(self.omega_l)));
        s.push_str(&format!("wet = {}\n", self.wet));
        match self.params {
            ProblemParams::Nondimensional { alpha, xi, eta, eta_f, p_hat_o } => {
                s.push_str("[problem.nondimensional]\n");
                s.push_str(&format!("alpha = {}\n", ff(alpha)));
                s.push_str(&format!("xi = {}\n", ff(xi)));
                s.push_str(&format!("eta = {}\n", ff(eta)));
                s.push_str(&format!("eta_f = {}\n", ff(eta_f)));
                s.push_str(&format!("p_hat_o = {}\n", ff(p_hat_o)));
            }
            ProblemParams::Dimensional { r_i, r_o, mu, mu_s, kappa_s, kappa_f, p_o } => {
                s.push_str("[problem.dimensional]\n");
                s.push_str(&format!("R_i = {}\n", ff(r_i)));
                s.push_str(&format!("R_o = {}\n", ff(r_o)));
                s.push_str(&format!("mu = {}\n", ff(mu)));
                s.push_str(&format!("mu_s = {}\n", ff(mu_s)));
                s.push_str(&format!("kappa_s = {}\n", ff(kappa_s)));
                s.push_str(&format!("kappa_f = {}\n", ff(kappa_f)));
                s.push_str(&format!("p_o = {}\n", ff(p_o)));
            }
        }
        s.push_str("[solver]\n");
        s.push_str(&format!("bracket_lo = {}\n", ff(self.solver.bracket.0)));
        s.push_str(&format!("bracket_hi = {}\n", ff(self.solver.bracket.1)));
        s.push_str(&format!("scan = {}\n", self.solver.scan_points));
        s.push_str(&format!("tol = {}\n", ff(self.solver.tol)));
        if let Some(sw) = &self.sweep {
            s.push_str("[sweep]\n");
            s.push_str(&format!("from = {}\n", ff(sw.from)));
            s.push_str(&format!("to = {}\n", ff(sw.to)));
            s.push_str(&format!("count = {}\n", sw.count));
        }
        s.push_str("[output]\n");
        s.push_str(&format!(
            "format = \"{}\"\n",
            match self.effective_format() {
                Format::Csv => "csv",
                Format::Json => "json",
            }
        ));
        s
    }
}

#[derive(Debug, Clone)]
pub enum ConfigError {
    Syntax { line: usize, detail: String },
    UnknownSection { line: usize, name: String },
    UnknownKey { path: String },
    DuplicateKey { path: String },
    MissingKey { path: String },
    BadValue { path: String, detail: String },
    BothParameterBlocks,
    NoParameterBlock,
    SweepCount { count: usize },
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Syntax { line, detail } => write!(f, "line {line}: {detail}"),
            ConfigError::UnknownSection { line, name } => {
                write!(f, "line {line}: unknown section [{name}]")
            }
            ConfigError::UnknownKey { path } => write!(f, "unknown key '{path}'"),
            ConfigError::DuplicateKey { path } => write!(f, "duplicate key '{path}'"),
            ConfigError::MissingKey { path } => write!(f, "missing required key '{path}'"),
            ConfigError::BadValue { path, detail } => write!(f, "bad value for '{path}': {detail}"),
            ConfigError::BothParameterBlocks => write!(
                f,
                "both [problem.nondimensional] and [problem.dimensional] present; give exactly one"
            ),
            ConfigError::NoParameterBlock => write!(
                f,
                "neither [problem.nondimensional] nor [problem.dimensional] present; give exactly one"
            ),
            ConfigError::SweepCount { count } => {
                write!(f, "sweep.count = {count}, but sweep mode needs at least 2 grid points")
            }
        }
    }
}

impl std::error::Error for ConfigError {}

const SECTIONS: &[&str] =
    &["problem", "problem.nondimensional", "problem.dimensional", "solver", "sweep", "output"];

const KEYS: &[(&str, &[&str])] = &[
    ("", &["mode", "profile_samples"]),
    ("problem", &["omega_s", "omega_l", "wet"]),
    ("problem.nondimensional", &["alpha", "xi", "eta", "eta_f", "p_hat_o"]),
    ("problem.dimensional", &["R_i", "R_o", "mu", "mu_s", "kappa_s", "kappa_f", "p_o"]),
    ("solver", &["bracket_lo", "bracket_hi", "scan", "tol"]),
    ("sweep", &["from", "to", "count"]),
    ("output", &["path", "format"]),
];

fn key_path(section: &str, key: &str) -> String {
    if section.is_empty() {
        key.to_string()
    } else {
        format!("{section}.{key}")
    }
}

struct RawConfig {
    values: BTreeMap<String, String>,
    sections_seen: Vec<String>,
}

impl RawConfig {
    fn take(&mut self, path: &str) -> Option<String> {
        self.values.remove(path)
    }

    fn f64_or(&mut self, path: &str, default: f64) -> Result<f64, ConfigError> {
        match self.take(path) {
            None => Ok(default),
            Some(raw) => raw.parse().map_err(|_| ConfigError::BadValue {
                path: path.to_string(),
                detail: format!("expected a number, got '{raw}'"),
            }),
        }
    }

    fn f64_required(&mut self, path: &str) -> Result<f64, ConfigError> {
        match self.take(path) {
            None => Err(ConfigError::MissingKey { path: path.to_string() }),
            Some(raw) => raw.parse().map_err(|_| ConfigError::BadValue {
                path: path.to_string(),
                detail: format!("expected a number, got '{raw}'"),
            }),
        }
    }

    fn usize_or(&mut self, path: &str, default: usize) -> Result<usize, ConfigError> {
        match self.take(path) {
            None => Ok(default),
            Some(raw) => raw.parse().map_err(|_| ConfigError::BadValue {
                path: path.to_string(),
                detail: format!("expected a non-negative integer, got '{raw}'"),
            }),
        }
    }

    fn bool_or(&mut self, path: &str, default: bool) -> Result<bool, ConfigError> {
        match self.take(path) {
            None => Ok(default),
            Some(raw) => match raw.as_str() {
                "true" => Ok(true),
                "false" => Ok(false),
                other => Err(ConfigError::BadValue {
                    path: path.to_string(),
                    detail: format!("expected true or false, got '{other}'"),
                }),
            },
        }
    }

    fn string(&mut self, path: &str) -> Result<Option<String>, ConfigError> {
        match self.take(path) {
            None => Ok(None),
            Some(raw) => {
                let s = raw.trim();
                if s.len() >= 2 && s.starts_with('"') && s.ends_with('"') {
                    Ok(Some(s[1..s.len() - 1].to_string()))
                } else {
                    Err(ConfigError::BadValue {
                        path: path.to_string(),
                        detail: format!("expected a quoted string, got '{raw}'"),
                    })
                }
            }
        }
    }
}

fn tokenize(text: &str) -> Result<RawConfig, ConfigError> {
    let mut values = BTreeMap::new();
    let mut sections_seen = Vec::new();
    let mut section = String::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        // strip comments outside quotes
        let mut in_quotes = false;
        let mut line = String::new();
        for ch in raw_line.chars() {
            match ch {
                '"' => {
                    in_quotes = !in_quotes;
                    line.push(ch);
                }
                '#' if !in_quotes => break,
                _ => line.push(ch),
            }
        }
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let Some(name) = name.strip_suffix(']') else {
                return Err(ConfigError::Syntax {
                    line: line_no,
                    detail: format!("unterminated section header '{line}'"),
                });
            };
            let name = name.trim();
            if !SECTIONS.contains(&name) {
                return Err(ConfigError::UnknownSection { line: line_no, name: name.to_string() });
            }
            section = name.to_string();
            sections_seen.push(section.clone());
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigError::Syntax {
                line: line_no,
                detail: format!("expected 'key = value', got '{line}'"),
            });
        };
        let key = key.trim();
        let value = value.trim();
        if value.is_empty() {
            return Err(ConfigError::Syntax {
                line: line_no,
                detail: format!("empty value for key '{key}'"),
            });
        }
        let allowed = KEYS
            .iter()
            .find(|(s, _)| *s == section)
            .map(|(_, ks)| ks.contains(&key))
            .unwrap_or(false);
        let path = key_path(&section, key);
        if !allowed {
            return Err(ConfigError::UnknownKey { path });
        }
        if values.insert(path.clone(), value.to_string()).is_some() {
            return Err(ConfigError::DuplicateKey { path });
        }
    }
    Ok(RawConfig { values, sections_seen })
}

/// Parses and validates a scenario document, filling defaults.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let mut raw = tokenize(text)?;

    let mode = match raw.string("mode")? {
        None => Mode::Relax,
        Some(s) => Mode::parse(&s).ok_or_else(|| ConfigError::BadValue {
            path: "mode".into(),
            detail: format!("'{s}' is not one of relax, solve, sweep, stress-profile, geometry-check"),
        })?,
    };
    let profile_samples = raw.usize_or("profile_samples", 101)?;
    if profile_samples < 2 {
        return Err(ConfigError::BadValue {
            path: "profile_samples".into(),
            detail: format!("need at least 2 samples, got {profile_samples}"),
        });
    }

    let omega_s = raw.f64_or("problem.omega_s", 0.0)?;
    let omega_l = raw.f64_or("problem.omega_l", 0.0)?;
    let wet = raw.bool_or("problem.wet", false)?;

    let has_nd = raw.sections_seen.iter().any(|s| s == "problem.nondimensional");
    let has_dim = raw.sections_seen.iter().any(|s| s == "problem.dimensional");
    let params = match (has_nd, has_dim) {
        (true, true) => return Err(ConfigError::BothParameterBlocks),
        (false, false) => return Err(ConfigError::NoParameterBlock),
        (true, false) => ProblemParams::Nondimensional {
            alpha: raw.f64_required("problem.nondimensional.alpha")?,
            xi: raw.f64_or("problem.nondimensional.xi", 0.0)?,
            eta: raw.f64_or("problem.nondimensional.eta", 0.0)?,
            eta_f: raw.f64_or("problem.nondimensional.eta_f", 0.0)?,
            p_hat_o: raw.f64_or("problem.nondimensional.p_hat_o", 0.0)?,
        },
        (false, true) => ProblemParams::Dimensional {
            r_i: raw.f64_required("problem.dimensional.R_i")?,
            r_o: raw.f64_required("problem.dimensional.R_o")?,
            mu: raw.f64_required("problem.dimensional.mu")?,
            mu_s: raw.f64_or("problem.dimensional.mu_s", 0.0)?,
            kappa_s: raw.f64_or("problem.dimensional.kappa_s", 0.0)?,
            kappa_f: raw.f64_or("problem.dimensional.kappa_f", 0.0)?,
            p_o: raw.f64_or("problem.dimensional.p_o", 0.0)?,
        },
    };

    let defaults = SolverSettings::default();
    let solver = SolverSettings {
        bracket: (
            raw.f64_or("solver.bracket_lo", defaults.bracket.0)?,
            raw.f64_or("solver.bracket_hi", defaults.bracket.1)?,
        ),
        scan_points: raw.usize_or("solver.scan", defaults.scan_points)?,
        tol: raw.f64_or("solver.tol", defaults.tol)?,
    };

    let sweep = if raw.sections_seen.iter().any(|s| s == "sweep") {
        let count_raw = raw
            .take("sweep.count")
            .ok_or(ConfigError::MissingKey { path: "sweep.count".into() })?;
        let count = count_raw.parse().map_err(|_| ConfigError::BadValue {
            path: "sweep.count".into(),
            detail: format!("expected a positive integer, got '{count_raw}'"),
        })?;
        Some(SweepSpec {
            from: raw.f64_required("sweep.from")?,
            to: raw.f64_required("sweep.to")?,
            count,
        })
    } else {
        None
    };

    let out_path = raw.string("output.path")?;
    let format = match raw.string("output.format")? {
        None => None,
        Some(s) => Some(Format::parse(&s).ok_or_else(|| ConfigError::BadValue {
            path: "output.format".into(),
            detail: format!("'{s}' is not csv or json"),
        })?),
    };

    if mode == Mode::Sweep {
        match &sweep {
            None => return Err(ConfigError::MissingKey { path: "sweep.from".into() }),
            Some(sw) if sw.count < 2 => return Err(ConfigError::SweepCount { count: sw.count }),
            Some(_) => {}
        }
    }

    debug_assert!(raw.values.is_empty(), "unconsumed keys: {:?}", raw.values);

    Ok(ScenarioConfig {
        mode,
        omega_s,
        omega_l,
        wet,
        params,
        solver,
        sweep,
        out_path,
        format,
        profile_samples,
    })
}
