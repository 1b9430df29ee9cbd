//! Line-oriented `section.key = value` configuration.
//!
//! Blank lines and lines starting with `#` are ignored; a ` #` after a value
//! starts a trailing comment. Values may be wrapped in double quotes.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use qbm_core::{mb_fugacity, GasSpec, ParticleSpec, ScatteringModel, Statistics, TabulatedTMatrix};

/// Largest relative mismatch tolerated between `gas.z` and the fugacity
/// implied by `gas.n` for a Maxwell-Boltzmann gas.
pub const MB_CONSISTENCY_TOL: f64 = 1e-12;

const KNOWN_KEYS: &[&str] = &[
    "units.note",
    "gas.m",
    "gas.beta",
    "gas.n",
    "gas.z",
    "gas.statistics",
    "particle.mass",
    "scattering.model",
    "scattering.v0",
    "scattering.r0",
    "scattering.a0",
    "scattering.table",
    "scattering.alpha_correction",
    "task.kind",
    "dpp.method",
    "scan.q_min",
    "scan.q_max",
    "scan.points",
    "scan.p",
    "lindblad.points",
    "lindblad.dp",
    "lindblad.sample_every",
    "lindblad.eigen_every",
    "kramers.x_points",
    "kramers.x_half_width",
    "kramers.p_points",
    "kramers.p_half_width",
    "kramers.sample_every",
    "evolve.t_final",
    "evolve.dt",
    "evolve.snapshots",
    "initial.p0",
    "initial.sigma_p",
    "initial.x0",
    "initial.sigma_x",
    "tolerance.quad_rel",
    "tolerance.detailed_balance",
    "tolerance.low_density",
    "tolerance.closed_form",
    "tolerance.trace",
    "output.path",
];

/// One problem found in a configuration file.
#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    Parse { line: usize, message: String },
    Validation {
        field: String,
        line: Option<usize>,
        message: String,
    },
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Parse { line, message } => write!(f, "parse error on line {line}: {message}"),
            ConfigError::Validation {
                field,
                line: Some(line),
                message,
            } => write!(f, "invalid `{field}` (line {line}): {message}"),
            ConfigError::Validation { field, line: None, message } => write!(f, "invalid `{field}`: {message}"),
        }
    }
}

/// Every error found in one pass over a configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigErrors(pub Vec<ConfigError>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaskKind {
    Sfactor,
    Dpp,
    EvolveLindblad,
    EvolveKramers,
    Check,
}

impl TaskKind {
    pub fn name(self) -> &'static str {
        match self {
            TaskKind::Sfactor => "sfactor",
            TaskKind::Dpp => "dpp",
            TaskKind::EvolveLindblad => "evolve-lindblad",
            TaskKind::EvolveKramers => "evolve-kramers",
            TaskKind::Check => "check",
        }
    }
}

impl fmt::Display for TaskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TaskKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sfactor" => Ok(TaskKind::Sfactor),
            "dpp" => Ok(TaskKind::Dpp),
            "evolve-lindblad" => Ok(TaskKind::EvolveLindblad),
            "evolve-kramers" => Ok(TaskKind::EvolveKramers),
            "check" => Ok(TaskKind::Check),
            other => Err(format!(
                "unknown task `{other}` (expected sfactor, dpp, evolve-lindblad, evolve-kramers or check)"
            )),
        }
    }
}

/// How the `dpp` task obtains `D_pp`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DppMethod {
    Quadrature,
    Closed,
}

impl DppMethod {
    pub fn name(self) -> &'static str {
        match self {
            DppMethod::Quadrature => "quadrature",
            DppMethod::Closed => "closed",
        }
    }
}

/// Momentum-transfer scan along the x axis for `sfactor`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanConfig {
    pub q_min: f64,
    pub q_max: f64,
    pub points: usize,
    /// Test-particle momentum, collinear with `q`.
    pub p: f64,
}

impl ScanConfig {
    pub fn q_values(&self) -> impl Iterator<Item = f64> + '_ {
        let step = (self.q_max - self.q_min) / (self.points - 1) as f64;
        (0..self.points).map(move |i| if i + 1 == self.points { self.q_max } else { self.q_min + step * i as f64 })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LindbladConfig {
    pub points: usize,
    /// Momentum step; `None` spans eight thermal widths either side.
    pub dp: Option<f64>,
    pub sample_every: usize,
    pub eigen_every: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KramersConfig {
    pub x_points: usize,
    pub x_half_width: f64,
    pub p_points: usize,
    /// `None` means eight thermal widths.
    pub p_half_width: Option<f64>,
    pub sample_every: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveConfig {
    pub t_final: Option<f64>,
    /// `None` picks a step inside the engine's stability region.
    pub dt: Option<f64>,
    /// Number of snapshots including the initial and final states.
    pub snapshots: usize,
}

/// Gaussian initial state. The Lindblad engine uses a minimum-uncertainty
/// packet and ignores `sigma_x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialState {
    pub p0: f64,
    /// `None` means half the thermal width.
    pub sigma_p: Option<f64>,
    pub x0: f64,
    pub sigma_x: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub quad_rel: f64,
    pub detailed_balance: f64,
    pub low_density: f64,
    pub closed_form: f64,
    pub trace: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            quad_rel: 1e-12,
            detailed_balance: 1e-10,
            low_density: 1e-5,
            closed_form: 1e-8,
            trace: 1e-10,
        }
    }
}

/// Fully validated run description.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub units_note: Option<String>,
    pub gas: GasSpec<f64>,
    pub particle: ParticleSpec<f64>,
    pub scattering: ScatteringModel<f64>,
    pub table_path: Option<PathBuf>,
    pub alpha_correction: bool,
    pub task: TaskKind,
    pub dpp_method: DppMethod,
    pub scan: ScanConfig,
    pub lindblad: LindbladConfig,
    pub kramers: KramersConfig,
    pub evolve: EvolveConfig,
    pub initial: InitialState,
    pub tolerances: Tolerances,
    pub output: Option<PathBuf>,
}

impl RunConfig {
    /// Thermal momentum width `sqrt(M / beta)` of the test particle.
    pub fn thermal_width(&self) -> f64 {
        (self.particle.mass / self.gas.beta).sqrt()
    }
}

#[derive(Debug, Clone)]
struct Entry {
    value: String,
    line: usize,
}

fn canonical_key(key: &str) -> &str {
    match key {
        "particle.M" => "particle.mass",
        other => other,
    }
}

fn strip_comment(line: &str) -> &str {
    let mut in_quotes = false;
    let bytes = line.as_bytes();
    for (i, &b) in bytes.iter().enumerate() {
        match b {
            b'"' => in_quotes = !in_quotes,
            b'#' if !in_quotes && (i == 0 || bytes[i - 1].is_ascii_whitespace()) => return &line[..i],
            _ => {}
        }
    }
    line
}

fn unquote(value: &str) -> &str {
    value
        .strip_prefix('"')
        .and_then(|v| v.strip_suffix('"'))
        .unwrap_or(value)
}

fn tokenize(text: &str, errors: &mut Vec<ConfigError>) -> BTreeMap<String, Entry> {
    let mut entries: BTreeMap<String, Entry> = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = strip_comment(raw).trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            errors.push(ConfigError::Parse {
                line,
                message: format!("expected `section.key = value`, found `{content}`"),
            });
            continue;
        };
        let key = canonical_key(key.trim());
        let value = unquote(value.trim()).to_string();
        if !key.contains('.') || key.starts_with('.') || key.ends_with('.') {
            errors.push(ConfigError::Parse {
                line,
                message: format!("key `{key}` is not of the form `section.key`"),
            });
            continue;
        }
        if !KNOWN_KEYS.contains(&key) {
            errors.push(ConfigError::Parse {
                line,
                message: format!("unknown key `{key}`"),
            });
            continue;
        }
        if value.is_empty() {
            errors.push(ConfigError::Parse {
                line,
                message: format!("key `{key}` has no value"),
            });
            continue;
        }
        if let Some(first) = entries.get(key) {
            errors.push(ConfigError::Parse {
                line,
                message: format!("duplicate key `{key}` on lines {} and {line}", first.line),
            });
            continue;
        }
        entries.insert(key.to_string(), Entry { value, line });
    }
    entries
}

/// Typed access to the parsed entries that records every failure.
struct Fields {
    entries: BTreeMap<String, Entry>,
    errors: Vec<ConfigError>,
}

impl Fields {
    fn line(&self, key: &str) -> Option<usize> {
        self.entries.get(key).map(|e| e.line)
    }

    fn invalid(&mut self, key: &str, message: impl Into<String>) {
        let line = self.line(key);
        self.errors.push(ConfigError::Validation {
            field: key.to_string(),
            line,
            message: message.into(),
        });
    }

    fn has(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    fn raw(&self, key: &str) -> Option<String> {
        self.entries.get(key).map(|e| e.value.clone())
    }

    fn parsed<V: FromStr>(&mut self, key: &str, what: &str) -> Option<V> {
        let raw = self.raw(key)?;
        match raw.parse() {
            Ok(v) => Some(v),
            Err(_) => {
                self.invalid(key, format!("expected {what}, found `{raw}`"));
                None
            }
        }
    }

    fn float(&mut self, key: &str) -> Option<f64> {
        let v: f64 = self.parsed(key, "a number")?;
        if v.is_finite() {
            Some(v)
        } else {
            self.invalid(key, format!("must be finite, found {v}"));
            None
        }
    }

    fn positive(&mut self, key: &str) -> Option<f64> {
        let v = self.float(key)?;
        if v > 0.0 {
            Some(v)
        } else {
            self.invalid(key, format!("must be > 0, found {v}"));
            None
        }
    }

    fn required_positive(&mut self, key: &str) -> Option<f64> {
        if !self.has(key) {
            self.invalid(key, "missing");
            return None;
        }
        self.positive(key)
    }

    fn count(&mut self, key: &str, default: usize, min: usize) -> usize {
        if !self.has(key) {
            return default;
        }
        match self.parsed::<usize>(key, "a non-negative integer") {
            Some(v) if v >= min => v,
            Some(v) => {
                self.invalid(key, format!("must be at least {min}, found {v}"));
                default
            }
            None => default,
        }
    }

    fn boolean(&mut self, key: &str, default: bool) -> bool {
        if !self.has(key) {
            return default;
        }
        self.parsed(key, "`true` or `false`").unwrap_or(default)
    }
}

/// Parses and validates `text`, resolving a table path against the current directory.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigErrors> {
    parse_config_with(text, Path::new("."), None)
}

/// Parses and validates `text`.
///
/// Relative table paths resolve against `base_dir`. `task` is the task named
/// on the command line; it must agree with `task.kind` when both are given.
pub fn parse_config_with(text: &str, base_dir: &Path, task: Option<TaskKind>) -> Result<RunConfig, ConfigErrors> {
    let mut errors = Vec::new();
    let entries = tokenize(text, &mut errors);
    let mut f = Fields { entries, errors };

    let gas = gas_block(&mut f);
    let mass = f.required_positive("particle.mass");
    let particle = mass.and_then(|m| ParticleSpec::new(m).ok());
    let (scattering, table_path) = scattering_block(&mut f, base_dir);
    let alpha_correction = f.boolean("scattering.alpha_correction", false);

    let file_task = if f.has("task.kind") {
        f.parsed::<TaskKind>("task.kind", "a task name")
    } else {
        None
    };
    let task = match (file_task, task) {
        (Some(a), Some(b)) if a != b => {
            f.invalid("task.kind", format!("config names `{a}` but the command line asks for `{b}`"));
            None
        }
        (Some(a), _) => Some(a),
        (None, Some(b)) => Some(b),
        (None, None) => {
            if !f.has("task.kind") {
                f.invalid("task.kind", "missing");
            }
            None
        }
    };

    let dpp_method = match f.raw("dpp.method").as_deref() {
        None | Some("quadrature") => DppMethod::Quadrature,
        Some("closed") => DppMethod::Closed,
        Some(other) => {
            f.invalid("dpp.method", format!("expected `quadrature` or `closed`, found `{other}`"));
            DppMethod::Quadrature
        }
    };

    let scan = scan_block(&mut f);
    let lindblad = LindbladConfig {
        points: f.count("lindblad.points", 64, 4),
        dp: if f.has("lindblad.dp") { f.positive("lindblad.dp") } else { None },
        sample_every: f.count("lindblad.sample_every", 10, 1),
        eigen_every: f.count("lindblad.eigen_every", 1, 1),
    };
    let kramers = KramersConfig {
        x_points: f.count("kramers.x_points", 64, 4),
        x_half_width: if f.has("kramers.x_half_width") {
            f.positive("kramers.x_half_width").unwrap_or(10.0)
        } else {
            10.0
        },
        p_points: f.count("kramers.p_points", 128, 4),
        p_half_width: if f.has("kramers.p_half_width") {
            f.positive("kramers.p_half_width")
        } else {
            None
        },
        sample_every: f.count("kramers.sample_every", 10, 1),
    };
    let evolve = EvolveConfig {
        t_final: if f.has("evolve.t_final") {
            f.positive("evolve.t_final")
        } else {
            None
        },
        dt: if f.has("evolve.dt") { f.positive("evolve.dt") } else { None },
        snapshots: f.count("evolve.snapshots", 2, 2),
    };
    if matches!(task, Some(TaskKind::EvolveLindblad | TaskKind::EvolveKramers)) && !f.has("evolve.t_final") {
        f.invalid("evolve.t_final", "required by the evolve tasks");
    }
    let initial = InitialState {
        p0: if f.has("initial.p0") { f.float("initial.p0").unwrap_or(0.0) } else { 0.0 },
        sigma_p: if f.has("initial.sigma_p") {
            f.positive("initial.sigma_p")
        } else {
            None
        },
        x0: if f.has("initial.x0") { f.float("initial.x0").unwrap_or(0.0) } else { 0.0 },
        sigma_x: if f.has("initial.sigma_x") {
            f.positive("initial.sigma_x").unwrap_or(1.0)
        } else {
            1.0
        },
    };
    let tolerances = tolerance_block(&mut f);
    let output = f.raw("output.path").map(PathBuf::from);
    let units_note = f.raw("units.note");

    if !f.errors.is_empty() {
        return Err(ConfigErrors(f.errors));
    }
    // every `None` below was reported as an error above
    match (gas, particle, scattering, task) {
        (Some(gas), Some(particle), Some(scattering), Some(task)) => Ok(RunConfig {
            units_note,
            gas,
            particle,
            scattering,
            table_path,
            alpha_correction,
            task,
            dpp_method,
            scan,
            lindblad,
            kramers,
            evolve,
            initial,
            tolerances,
            output,
        }),
        _ => Err(ConfigErrors(vec![ConfigError::Validation {
            field: "config".into(),
            line: None,
            message: "incomplete configuration".into(),
        }])),
    }
}

fn gas_block(f: &mut Fields) -> Option<GasSpec<f64>> {
    let m = f.required_positive("gas.m");
    let beta = f.required_positive("gas.beta");
    let statistics = match f.raw("gas.statistics") {
        None => Some(Statistics::MaxwellBoltzmann),
        Some(raw) => match raw.parse::<Statistics>() {
            Ok(s) => Some(s),
            Err(e) => {
                f.invalid("gas.statistics", e);
                None
            }
        },
    };
    let n = if f.has("gas.n") { f.positive("gas.n") } else { None };
    let z = if f.has("gas.z") { f.positive("gas.z") } else { None };
    let statistics = statistics?;

    if let Some(z) = z {
        if statistics == Statistics::BoseEinstein && z >= 1.0 {
            f.invalid(
                "gas.z",
                format!("Bose-Einstein fugacity must satisfy 0 < z < 1, found {z}"),
            );
            return None;
        }
    }
    let (m, beta) = (m?, beta?);
    let (n, z) = match statistics {
        Statistics::MaxwellBoltzmann => match (n, z, f.has("gas.n"), f.has("gas.z")) {
            (Some(n), Some(z), _, _) => {
                let implied = mb_fugacity(n, beta, m);
                if ((z - implied) / implied).abs() > MB_CONSISTENCY_TOL {
                    f.invalid(
                        "gas.z",
                        format!("z = {z} disagrees with the fugacity {implied:e} implied by gas.n for a classical gas"),
                    );
                    return None;
                }
                (n, z)
            }
            (Some(n), None, _, false) => (n, mb_fugacity(n, beta, m)),
            (None, Some(z), false, _) => (z / mb_fugacity(1.0, beta, m), z),
            (None, None, false, false) => {
                f.invalid("gas.n", "set gas.n, gas.z or both");
                return None;
            }
            _ => return None,
        },
        Statistics::BoseEinstein | Statistics::FermiDirac => {
            for key in ["gas.n", "gas.z"] {
                if !f.has(key) {
                    f.invalid(key, format!("required for {statistics} statistics"));
                }
            }
            (n?, z?)
        }
    };
    match GasSpec::new(m, beta, n, z, statistics) {
        Ok(gas) => Some(gas),
        Err(e) => {
            f.invalid("gas", e.to_string());
            None
        }
    }
}

fn scattering_block(f: &mut Fields, base_dir: &Path) -> (Option<ScatteringModel<f64>>, Option<PathBuf>) {
    let Some(model) = f.raw("scattering.model") else {
        f.invalid("scattering.model", "missing (gaussian, contact or tabulated)");
        return (None, None);
    };
    let extra = |f: &mut Fields, allowed: &[&str]| {
        for key in ["scattering.v0", "scattering.r0", "scattering.a0", "scattering.table"] {
            if f.has(key) && !allowed.contains(&key) {
                f.invalid(key, format!("not used by the `{model}` model"));
            }
        }
    };
    match model.as_str() {
        "gaussian" => {
            extra(f, &["scattering.v0", "scattering.r0"]);
            let v0 = if f.has("scattering.v0") {
                f.float("scattering.v0")
            } else {
                f.invalid("scattering.v0", "missing");
                None
            };
            let r0 = f.required_positive("scattering.r0");
            (v0.zip(r0).and_then(|(v0, r0)| ScatteringModel::gaussian(v0, r0).ok()), None)
        }
        "contact" => {
            extra(f, &["scattering.a0"]);
            let a0 = if f.has("scattering.a0") {
                f.float("scattering.a0")
            } else {
                f.invalid("scattering.a0", "missing");
                None
            };
            (a0.and_then(|a0| ScatteringModel::contact(a0).ok()), None)
        }
        "tabulated" => {
            extra(f, &["scattering.table"]);
            let Some(raw) = f.raw("scattering.table") else {
                f.invalid("scattering.table", "missing");
                return (None, None);
            };
            let path = base_dir.join(&raw);
            match std::fs::read_to_string(&path) {
                Ok(text) => match TabulatedTMatrix::parse(&text) {
                    Ok(table) => (Some(ScatteringModel::Tabulated(table)), Some(path)),
                    Err(e) => {
                        f.invalid("scattering.table", format!("{}: {e}", path.display()));
                        (None, Some(path))
                    }
                },
                Err(e) => {
                    f.invalid("scattering.table", format!("cannot read {}: {e}", path.display()));
                    (None, Some(path))
                }
            }
        }
        other => {
            f.invalid(
                "scattering.model",
                format!("unknown model `{other}` (expected gaussian, contact or tabulated)"),
            );
            (None, None)
        }
    }
}

fn scan_block(f: &mut Fields) -> ScanConfig {
    let q_min = if f.has("scan.q_min") { f.float("scan.q_min") } else { Some(0.1) };
    let q_max = if f.has("scan.q_max") { f.float("scan.q_max") } else { Some(5.0) };
    let points = f.count("scan.points", 50, 2);
    let p = if f.has("scan.p") { f.float("scan.p").unwrap_or(0.0) } else { 0.0 };
    let (q_min, q_max) = match (q_min, q_max) {
        (Some(a), Some(b)) if a < b => (a, b),
        (Some(a), Some(b)) => {
            f.invalid("scan.q_max", format!("must exceed scan.q_min = {a}, found {b}"));
            (0.1, 5.0)
        }
        _ => (0.1, 5.0),
    };
    ScanConfig { q_min, q_max, points, p }
}

fn tolerance_block(f: &mut Fields) -> Tolerances {
    let mut t = Tolerances::default();
    for (key, slot) in [
        ("tolerance.quad_rel", &mut t.quad_rel),
        ("tolerance.detailed_balance", &mut t.detailed_balance),
        ("tolerance.low_density", &mut t.low_density),
        ("tolerance.closed_form", &mut t.closed_form),
        ("tolerance.trace", &mut t.trace),
    ] {
        if f.has(key) {
            if let Some(v) = f.positive(key) {
                *slot = v;
            }
        }
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "gas.m = 1\ngas.beta = 2\ngas.n = 0.01\nparticle.mass = 20\nscattering.model = contact\nscattering.a0 = 0.5\ntask.kind = dpp\n";

    #[test]
    fn minimal_config_fills_defaults() {
        let cfg = parse_config(MINIMAL).unwrap();
        assert_eq!(cfg.gas.statistics, Statistics::MaxwellBoltzmann);
        assert_eq!(cfg.gas.z, mb_fugacity(0.01, 2.0, 1.0));
        assert_eq!(cfg.lindblad.points, 64);
        assert_eq!(cfg.tolerances, Tolerances::default());
        assert_eq!(cfg.dpp_method, DppMethod::Quadrature);
        assert!(cfg.output.is_none());
    }

    #[test]
    fn comments_quotes_and_alias() {
        let text = MINIMAL.replace("particle.mass = 20", "particle.M = 20  # heavy")
            + "# full-line comment\noutput.path = \"out #1.csv\"\n";
        let cfg = parse_config(&text).unwrap();
        assert_eq!(cfg.particle.mass, 20.0);
        assert_eq!(cfg.output.unwrap(), PathBuf::from("out #1.csv"));
    }

    #[test]
    fn errors_are_collected() {
        let text = "gas.m = -1\ngas.beta = x\nnonsense\nfoo.bar = 1\nparticle.mass = 2\n";
        let errs = parse_config(text).unwrap_err().0;
        assert!(errs.len() >= 5, "{errs:?}");
        assert!(errs.iter().any(|e| matches!(e, ConfigError::Parse { line: 3, .. })));
        assert!(errs.iter().any(|e| matches!(e, ConfigError::Parse { line: 4, .. })));
        assert!(errs
            .iter()
            .any(|e| matches!(e, ConfigError::Validation { field, line: Some(1), .. } if field == "gas.m")));
    }

    #[test]
    fn mb_density_and_fugacity_must_agree() {
        let z = mb_fugacity(0.01, 2.0, 1.0);
        let ok = format!("{MINIMAL}gas.z = {z:.17e}\n");
        assert!(parse_config(&ok).is_ok());
        let bad = format!("{MINIMAL}gas.z = {}\n", z * (1.0 + 1e-9));
        let errs = parse_config(&bad).unwrap_err().0;
        assert!(matches!(&errs[0], ConfigError::Validation { field, .. } if field == "gas.z"));
    }

    #[test]
    fn fugacity_alone_sets_density() {
        let text = MINIMAL.replace("gas.n = 0.01", "gas.z = 0.05");
        let cfg = parse_config(&text).unwrap();
        assert!((mb_fugacity(cfg.gas.n, 2.0, 1.0) / 0.05 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn quantum_gases_need_both() {
        let text = MINIMAL.to_string() + "gas.statistics = fd\n";
        let errs = parse_config(&text).unwrap_err().0;
        assert!(errs
            .iter()
            .any(|e| matches!(e, ConfigError::Validation { field, .. } if field == "gas.z")));
    }

    #[test]
    fn task_must_match_command_line() {
        let errs = parse_config_with(MINIMAL, Path::new("."), Some(TaskKind::Check)).unwrap_err().0;
        assert!(matches!(&errs[0], ConfigError::Validation { field, .. } if field == "task.kind"));
        let without = MINIMAL.replace("task.kind = dpp\n", "");
        let cfg = parse_config_with(&without, Path::new("."), Some(TaskKind::Check)).unwrap();
        assert_eq!(cfg.task, TaskKind::Check);
        assert!(parse_config(&without).is_err());
    }

    #[test]
    fn evolve_needs_final_time() {
        let text = MINIMAL.replace("task.kind = dpp", "task.kind = evolve-kramers");
        let errs = parse_config(&text).unwrap_err().0;
        assert!(matches!(&errs[0], ConfigError::Validation { field, .. } if field == "evolve.t_final"));
    }

    #[test]
    fn model_parameters_are_checked() {
        let text = MINIMAL.to_string() + "scattering.r0 = 1\n";
        let errs = parse_config(&text).unwrap_err().0;
        assert!(matches!(&errs[0], ConfigError::Validation { field, .. } if field == "scattering.r0"));
        let missing = MINIMAL.replace("scattering.model = contact", "scattering.model = tabulated");
        assert!(parse_config(&missing).is_err());
    }

    #[test]
    fn scan_endpoints_are_exact() {
        let scan = ScanConfig {
            q_min: 0.1,
            q_max: 0.7,
            points: 7,
            p: 0.0,
        };
        let q: Vec<f64> = scan.q_values().collect();
        assert_eq!(q.len(), 7);
        assert_eq!(q[0], 0.1);
        assert_eq!(q[6], 0.7);
    }
}
