//! Flat `key = value` scenario documents.
//!
//! ```text
//! # comments run to end of line
//! scenario = otto
//! output = otto.csv
//! otto.omega0 = 2.0
//! ```
//!
//! Keys are dotted identifiers, each may appear once. Lists are comma
//! separated. Unknown keys are rejected.

use std::collections::BTreeMap;
use std::path::PathBuf;

use thiserror::Error;

use crate::channels::{Mode, ThermalizationParams};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown scenario `{0}` (expected gibbs, process, otto, classical, demon or sweep)")]
    UnknownScenario(String),
    #[error("missing required key `{0}`")]
    MissingKey(String),
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { key: String, line: usize },
    #[error("line {line}: `{key}`: {message}")]
    Invalid {
        key: String,
        line: usize,
        message: String,
    },
    #[error("{flag}: {message}")]
    Override { flag: &'static str, message: String },
}

impl ConfigError {
    pub fn exit_code(&self) -> i32 {
        match self {
            ConfigError::Invalid { .. } | ConfigError::UnknownKey { .. } | ConfigError::Override { .. } => super::EXIT_CONFIG,
            ConfigError::Parse { .. } => super::EXIT_PARSE,
            ConfigError::UnknownScenario(_) => super::EXIT_UNKNOWN_SCENARIO,
            ConfigError::MissingKey(_) => super::EXIT_MISSING_KEY,
        }
    }
}

type ConfigResult<T> = std::result::Result<T, ConfigError>;

#[derive(Clone, Debug, PartialEq)]
struct Entry {
    value: String,
    line: usize,
}

fn parse_document(text: &str) -> ConfigResult<BTreeMap<String, Entry>> {
    let mut entries = BTreeMap::new();
    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let indent = content.len() - content.trim_start().len();
        let Some(eq) = content.find('=') else {
            return Err(ConfigError::Parse {
                line,
                column: indent + 1,
                message: "expected `key = value`".into(),
            });
        };
        let key = content[..eq].trim();
        if key.is_empty() {
            return Err(ConfigError::Parse {
                line,
                column: indent + 1,
                message: "empty key".into(),
            });
        }
        if let Some(offset) = key.find(|c: char| !(c.is_ascii_alphanumeric() || c == '_' || c == '.')) {
            return Err(ConfigError::Parse {
                line,
                column: indent + offset + 1,
                message: format!("invalid character in key `{key}`"),
            });
        }
        let value = content[eq + 1..].trim();
        if value.is_empty() {
            return Err(ConfigError::Parse {
                line,
                column: eq + 2,
                message: format!("missing value for `{key}`"),
            });
        }
        let entry = Entry {
            value: value.to_string(),
            line,
        };
        if let Some(previous) = entries.insert(key.to_string(), entry) {
            return Err(ConfigError::Parse {
                line,
                column: indent + 1,
                message: format!("duplicate key `{key}` (first set on line {})", previous.line),
            });
        }
    }
    Ok(entries)
}

/// Key lookups that remember which keys were used.
struct Fields {
    entries: BTreeMap<String, Entry>,
    used: Vec<String>,
}

impl Fields {
    fn new(entries: BTreeMap<String, Entry>) -> Self {
        Self {
            entries,
            used: Vec::new(),
        }
    }

    fn raw(&mut self, key: &str) -> Option<Entry> {
        let entry = self.entries.get(key).cloned();
        if entry.is_some() {
            self.used.push(key.to_string());
        }
        entry
    }

    fn invalid(key: &str, entry: &Entry, message: impl Into<String>) -> ConfigError {
        ConfigError::Invalid {
            key: key.to_string(),
            line: entry.line,
            message: message.into(),
        }
    }

    fn opt_f64(&mut self, key: &str) -> ConfigResult<Option<f64>> {
        let Some(entry) = self.raw(key) else {
            return Ok(None);
        };
        parse_number(&entry.value)
            .map(Some)
            .map_err(|m| Self::invalid(key, &entry, m))
    }

    fn f64(&mut self, key: &str) -> ConfigResult<f64> {
        self.opt_f64(key)?.ok_or_else(|| ConfigError::MissingKey(key.into()))
    }

    fn positive(&mut self, key: &str) -> ConfigResult<f64> {
        let v = self.f64(key)?;
        self.check(key, v > 0.0, "must be positive")?;
        Ok(v)
    }

    fn opt_positive(&mut self, key: &str) -> ConfigResult<Option<f64>> {
        let v = self.opt_f64(key)?;
        if let Some(v) = v {
            self.check(key, v > 0.0, "must be positive")?;
        }
        Ok(v)
    }

    fn check(&self, key: &str, ok: bool, message: &str) -> ConfigResult<()> {
        if ok {
            return Ok(());
        }
        let entry = &self.entries[key];
        Err(Self::invalid(key, entry, format!("{message}, got {}", entry.value)))
    }

    fn opt_usize(&mut self, key: &str) -> ConfigResult<Option<usize>> {
        let Some(entry) = self.raw(key) else {
            return Ok(None);
        };
        entry
            .value
            .parse::<usize>()
            .map(Some)
            .map_err(|_| Self::invalid(key, &entry, format!("expected a non-negative integer, got {}", entry.value)))
    }

    fn steps(&mut self, key: &str) -> ConfigResult<usize> {
        let v = self.opt_usize(key)?.ok_or_else(|| ConfigError::MissingKey(key.into()))?;
        self.check(key, v >= 2, "must be at least 2")?;
        Ok(v)
    }

    fn opt_str(&mut self, key: &str) -> Option<String> {
        self.raw(key).map(|e| e.value)
    }

    fn str(&mut self, key: &str) -> ConfigResult<String> {
        self.opt_str(key).ok_or_else(|| ConfigError::MissingKey(key.into()))
    }

    fn opt_list(&mut self, key: &str) -> ConfigResult<Option<Vec<f64>>> {
        let Some(entry) = self.raw(key) else {
            return Ok(None);
        };
        entry
            .value
            .split(',')
            .map(|item| parse_number(item.trim()))
            .collect::<Result<Vec<_>, _>>()
            .map(Some)
            .map_err(|m| Self::invalid(key, &entry, m))
    }

    fn list(&mut self, key: &str) -> ConfigResult<Vec<f64>> {
        self.opt_list(key)?.ok_or_else(|| ConfigError::MissingKey(key.into()))
    }

    fn mode(&mut self, key: &str) -> ConfigResult<Option<Mode>> {
        let Some(entry) = self.raw(key) else {
            return Ok(None);
        };
        match entry.value.as_str() {
            "markovian" => Ok(Some(Mode::Markovian)),
            "non_markovian" => Ok(Some(Mode::NonMarkovian)),
            other => Err(Self::invalid(
                key,
                &entry,
                format!("expected markovian or non_markovian, got {other}"),
            )),
        }
    }

    fn finish(self) -> ConfigResult<()> {
        for (key, entry) in &self.entries {
            if !self.used.iter().any(|k| k == key) {
                return Err(ConfigError::UnknownKey {
                    key: key.clone(),
                    line: entry.line,
                });
            }
        }
        Ok(())
    }
}

fn parse_number(text: &str) -> Result<f64, String> {
    match text.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(format!("expected a finite decimal number, got `{text}`")),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScenarioKind {
    Gibbs,
    Process,
    Otto,
    Classical,
    Demon,
    Sweep,
}

impl ScenarioKind {
    fn parse(name: &str) -> ConfigResult<Self> {
        Ok(match name {
            "gibbs" => Self::Gibbs,
            "process" => Self::Process,
            "otto" => Self::Otto,
            "classical" => Self::Classical,
            "demon" => Self::Demon,
            "sweep" => Self::Sweep,
            other => return Err(ConfigError::UnknownScenario(other.into())),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Gibbs => "gibbs",
            Self::Process => "process",
            Self::Otto => "otto",
            Self::Classical => "classical",
            Self::Demon => "demon",
            Self::Sweep => "sweep",
        }
    }
}

/// Temperature scan of a qubit Gibbs state.
#[derive(Clone, Debug, PartialEq)]
pub struct GibbsParams {
    pub omega: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub steps: usize,
}

/// Thermal relaxation of a qubit at fixed splitting.
#[derive(Clone, Debug, PartialEq)]
pub struct ProcessParams {
    pub omega: f64,
    pub temperature: f64,
    pub n0: f64,
    pub params: ThermalizationParams,
    pub duration: f64,
    pub steps: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OttoParams {
    pub config: crate::engines::OttoConfig,
    pub cycles: usize,
    pub seed_population: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalParams {
    pub th: f64,
    pub tc: f64,
    pub t1: f64,
    pub t3: f64,
    pub qh: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PovmKind {
    /// The single effect `I`.
    Identity,
    /// `outcomes` effects equal to `I/outcomes`.
    Uninformative(usize),
    /// Rank-one projectors onto the basis states.
    Computational,
}

/// Measurement information along the diagonal path `ρ(t) = ρ0 + t·ρ̇`.
#[derive(Clone, Debug, PartialEq)]
pub struct DemonParams {
    pub populations: Vec<f64>,
    pub flow: Vec<f64>,
    pub povm: PovmKind,
    pub temperature: f64,
    pub duration: f64,
    pub steps: usize,
    pub delta_w: Option<f64>,
    pub delta_f: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Scenario {
    Gibbs(GibbsParams),
    Process(ProcessParams),
    Otto(OttoParams),
    Classical(ClassicalParams),
    Demon(DemonParams),
}

impl Scenario {
    pub fn kind(&self) -> ScenarioKind {
        match self {
            Scenario::Gibbs(_) => ScenarioKind::Gibbs,
            Scenario::Process(_) => ScenarioKind::Process,
            Scenario::Otto(_) => ScenarioKind::Otto,
            Scenario::Classical(_) => ScenarioKind::Classical,
            Scenario::Demon(_) => ScenarioKind::Demon,
        }
    }

    /// Replaces the grid step count; scenarios without a grid are unchanged.
    pub fn override_steps(&mut self, steps: usize) {
        match self {
            Scenario::Gibbs(p) => p.steps = steps,
            Scenario::Process(p) => p.steps = steps,
            Scenario::Otto(p) => p.config.steps = steps,
            Scenario::Demon(p) => p.steps = steps,
            Scenario::Classical(_) => {}
        }
    }
}

/// One executable run and the CSV file it writes.
#[derive(Clone, Debug, PartialEq)]
pub struct RunSpec {
    pub label: String,
    pub output: PathBuf,
    pub scenario: Scenario,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: ScenarioKind,
    pub output: PathBuf,
    /// One run, or one per sweep value in file order.
    pub runs: Vec<RunSpec>,
}

pub fn parse_config(text: &str) -> ConfigResult<ScenarioConfig> {
    let entries = parse_document(text)?;
    let mut fields = Fields::new(entries.clone());
    let kind = ScenarioKind::parse(&fields.str("scenario")?)?;
    let output = PathBuf::from(fields.opt_str("output").unwrap_or_else(|| format!("{}.csv", kind.name())));

    if kind != ScenarioKind::Sweep {
        let scenario = parse_scenario(kind, &mut fields)?;
        fields.finish()?;
        let label = kind.name().to_string();
        return Ok(ScenarioConfig {
            scenario: kind,
            output: output.clone(),
            runs: vec![RunSpec { label, output, scenario }],
        });
    }

    let base = ScenarioKind::parse(&fields.str("sweep.scenario")?)?;
    if base == ScenarioKind::Sweep {
        let entry = &entries["sweep.scenario"];
        return Err(Fields::invalid("sweep.scenario", entry, "a sweep cannot sweep sweeps"));
    }
    let key = fields.str("sweep.key")?;
    let values = fields.list("sweep.values")?;
    if !key.starts_with(&format!("{}.", base.name())) {
        let entry = &entries["sweep.key"];
        return Err(Fields::invalid(
            "sweep.key",
            entry,
            format!("must name a `{}.*` key, got {key}", base.name()),
        ));
    }
    let values_line = entries["sweep.values"].line;
    let stem = output
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "sweep".into());
    let parent = output.parent().map(PathBuf::from).unwrap_or_default();
    let mut runs = Vec::with_capacity(values.len());
    for (i, value) in values.iter().enumerate() {
        let mut run_entries = entries.clone();
        run_entries.insert(
            key.clone(),
            Entry {
                value: value.to_string(),
                line: values_line,
            },
        );
        let mut run_fields = Fields::new(run_entries);
        for k in ["scenario", "output", "sweep.scenario", "sweep.key", "sweep.values"] {
            run_fields.raw(k);
        }
        let scenario = parse_scenario(base, &mut run_fields)?;
        run_fields.finish()?;
        runs.push(RunSpec {
            label: format!("{}[{i}] {key}={value}", base.name()),
            output: parent.join(format!("{stem}_{i:03}.csv")),
            scenario,
        });
    }
    Ok(ScenarioConfig {
        scenario: kind,
        output,
        runs,
    })
}

fn parse_scenario(kind: ScenarioKind, f: &mut Fields) -> ConfigResult<Scenario> {
    Ok(match kind {
        ScenarioKind::Gibbs => {
            let t_min = f.positive("gibbs.t_min")?;
            let t_max = f.positive("gibbs.t_max")?;
            f.check("gibbs.t_max", t_max > t_min, "must exceed gibbs.t_min")?;
            Scenario::Gibbs(GibbsParams {
                omega: f.positive("gibbs.omega")?,
                t_min,
                t_max,
                steps: f.steps("gibbs.steps")?,
            })
        }
        ScenarioKind::Process => {
            let n0 = f.f64("process.n0")?;
            f.check("process.n0", (0.0..=1.0).contains(&n0), "must lie in [0, 1]")?;
            Scenario::Process(ProcessParams {
                omega: f.positive("process.omega")?,
                temperature: f.positive("process.temperature")?,
                n0,
                params: bath_params(f, "process", None)?,
                duration: f.positive("process.duration")?,
                steps: f.steps("process.steps")?,
            })
        }
        ScenarioKind::Otto => {
            let omega0 = f.positive("otto.omega0")?;
            let omega1 = f.positive("otto.omega1")?;
            f.check("otto.omega1", omega1 < omega0, "must be below otto.omega0")?;
            let shared = SharedBath {
                gamma: f.positive("otto.gamma")?,
                mode: f.mode("otto.mode")?,
                omega_mem: f.opt_positive("otto.omega_mem")?,
            };
            let config = crate::engines::OttoConfig {
                omega0,
                omega1,
                th: f.positive("otto.th")?,
                tc: f.positive("otto.tc")?,
                stroke_duration: f.positive("otto.duration")?,
                steps: f.steps("otto.steps")?,
                params_h: bath_params(f, "otto.hot", Some(&shared))?,
                params_c: bath_params(f, "otto.cold", Some(&shared))?,
            };
            let cycles = f.opt_usize("otto.cycles")?.unwrap_or(10);
            if f.entries.contains_key("otto.cycles") {
                f.check("otto.cycles", cycles >= 1, "must be at least 1")?;
            }
            let seed_population = f.opt_f64("otto.seed_population")?;
            if let Some(n) = seed_population {
                f.check("otto.seed_population", (0.0..=1.0).contains(&n), "must lie in [0, 1]")?;
            }
            Scenario::Otto(OttoParams {
                config,
                cycles,
                seed_population,
            })
        }
        ScenarioKind::Classical => Scenario::Classical(ClassicalParams {
            th: f.positive("classical.th")?,
            tc: f.positive("classical.tc")?,
            t1: f.positive("classical.t1")?,
            t3: f.positive("classical.t3")?,
            qh: f.positive("classical.qh")?,
        }),
        ScenarioKind::Demon => {
            let populations = f.list("demon.populations")?;
            let total: f64 = populations.iter().sum();
            f.check(
                "demon.populations",
                populations.iter().all(|&p| p >= 0.0) && (total - 1.0).abs() <= 1e-10,
                "must be non-negative and sum to 1",
            )?;
            let flow = f.opt_list("demon.flow")?.unwrap_or_else(|| vec![0.0; populations.len()]);
            if f.entries.contains_key("demon.flow") {
                f.check(
                    "demon.flow",
                    flow.len() == populations.len() && flow.iter().sum::<f64>().abs() <= 1e-10,
                    "must match demon.populations in length and sum to 0",
                )?;
            }
            let povm = match f.str("demon.povm")?.as_str() {
                "identity" => PovmKind::Identity,
                "computational" => PovmKind::Computational,
                "uninformative" => {
                    let n = f.opt_usize("demon.outcomes")?.unwrap_or(2);
                    if f.entries.contains_key("demon.outcomes") {
                        f.check("demon.outcomes", n >= 1, "must be at least 1")?;
                    }
                    PovmKind::Uninformative(n)
                }
                other => {
                    let entry = &f.entries["demon.povm"];
                    return Err(Fields::invalid(
                        "demon.povm",
                        entry,
                        format!("expected identity, uninformative or computational, got {other}"),
                    ));
                }
            };
            Scenario::Demon(DemonParams {
                populations,
                flow,
                povm,
                temperature: f.positive("demon.temperature")?,
                duration: f.opt_positive("demon.duration")?.unwrap_or(1.0),
                steps: match f.opt_usize("demon.steps")? {
                    Some(n) => {
                        f.check("demon.steps", n >= 2, "must be at least 2")?;
                        n
                    }
                    None => 2,
                },
                delta_w: f.opt_f64("demon.delta_w")?,
                delta_f: f.opt_f64("demon.delta_f")?,
            })
        }
        ScenarioKind::Sweep => unreachable!("sweeps are expanded by parse_config"),
    })
}

struct SharedBath {
    gamma: f64,
    mode: Option<Mode>,
    omega_mem: Option<f64>,
}

/// Reads `<prefix>.gamma`, `.mode`, `.omega_mem` and `.kick`, falling back to `shared`.
fn bath_params(f: &mut Fields, prefix: &str, shared: Option<&SharedBath>) -> ConfigResult<ThermalizationParams> {
    let gamma_key = format!("{prefix}.gamma");
    let gamma = match (f.opt_positive(&gamma_key)?, shared) {
        (Some(g), _) => g,
        (None, Some(s)) => s.gamma,
        (None, None) => return Err(ConfigError::MissingKey(gamma_key)),
    };
    let mode = f
        .mode(&format!("{prefix}.mode"))?
        .or(shared.and_then(|s| s.mode))
        .unwrap_or(Mode::Markovian);
    let mem_key = format!("{prefix}.omega_mem");
    let omega_mem = f.opt_positive(&mem_key)?.or(shared.and_then(|s| s.omega_mem));
    let kick_key = format!("{prefix}.kick");
    let kick = f.opt_f64(&kick_key)?;
    let invalid = |key: &str, f: &Fields, message: String| -> ConfigError {
        match f.entries.get(key) {
            Some(entry) => Fields::invalid(key, entry, message),
            None => ConfigError::MissingKey(key.to_string()),
        }
    };
    let params = match mode {
        Mode::Markovian => ThermalizationParams::markovian(gamma),
        Mode::NonMarkovian => {
            let Some(w) = omega_mem else {
                return Err(ConfigError::MissingKey(mem_key));
            };
            ThermalizationParams::non_markovian(gamma, w)
        }
    }
    .map_err(|e| invalid(&gamma_key, f, e.to_string()))?;
    match kick {
        Some(k) => params.with_kick(k).map_err(|e| invalid(&kick_key, f, e.to_string())),
        None => Ok(params),
    }
}
