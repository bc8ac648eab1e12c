//! JSON input files.
//!
//! Every file names its alphabet and carries rationals as strings such as
//! `"-1/2"`. Situations are lists of symbols, `[]` being the root.
//!
//! ```json
//! {"alphabet": ["A", "B", "C"],
//!  "model": {"kind": "envelope", "vertices": [["0", "1/2", "1/2"], ["1/2", "0", "1/2"]]}}
//! ```
//!
//! Model kinds: `linear {p}`, `envelope {vertices}`, `vacuous`,
//! `gamma_f {gamma, f}`, `interval_f {interval: [lo, hi], f}`.
//! System kinds: `stationary {model}`, `cyclic {models}`,
//! `table {default, entries: [{situation, model}]}`.
//! Strategy kinds: `lln {gamble, direction, epsilon, selection}`,
//! `constant {multiplier}`, `table {default, entries: [{situation, multiplier}]}`,
//! `default {gambles, epsilon_fractions, max_modulus}`.
//! Process kinds: `multiplier {strategy}`, `table {default, entries: [{situation, value}]}`.

use std::collections::HashMap;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::analysis::{default_battery, BatteryConfig};
use crate::error::{Error, Result};
use crate::forecast::ForecastingSystem;
use crate::lower::{IntervalQ, LowerExpectation, Representation};
use crate::martingale::{from_multiplier, lln_strategy, ConstantMultiplier, Direction, LlnParams, MultiplierProcess, RationalProcess, SelectionProcess, TableMultiplier};
use crate::rational::Rational;
use crate::space::{Gamble, Pmf, SampleSpace};

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    Linear { p: Vec<Rational> },
    Envelope { vertices: Vec<Vec<Rational>> },
    Vacuous {},
    GammaF { gamma: Rational, f: Vec<Rational> },
    IntervalF { interval: IntervalQ, f: Vec<Rational> },
}

impl ModelSpec {
    /// The raw representation; pmf weights are only length-checked.
    pub fn representation(&self, space: &SampleSpace) -> Result<Representation> {
        let pmf = |w: &Vec<Rational>| Pmf::new_unchecked(space, w.clone());
        Ok(match self {
            ModelSpec::Linear { p } => Representation::Linear(pmf(p)?),
            ModelSpec::Envelope { vertices } => Representation::Envelope(vertices.iter().map(pmf).collect::<Result<_>>()?),
            ModelSpec::Vacuous {} => Representation::Vacuous,
            ModelSpec::GammaF { gamma, f } => Representation::GammaF { gamma: gamma.clone(), anchor: Gamble::new(space, f.clone())? },
            ModelSpec::IntervalF { interval, f } => Representation::IntervalF { interval: interval.clone(), anchor: Gamble::new(space, f.clone())? },
        })
    }

    pub fn build(&self, space: &SampleSpace) -> Result<LowerExpectation> {
        LowerExpectation::checked(space.clone(), self.representation(space)?)
    }

    /// Keeps invalid models so that their defects can be reported.
    pub fn build_unchecked(&self, space: &SampleSpace) -> Result<LowerExpectation> {
        Ok(LowerExpectation::unchecked(space.clone(), self.representation(space)?))
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelEntry {
    pub situation: Vec<String>,
    pub model: ModelSpec,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SystemSpec {
    Stationary { model: ModelSpec },
    Cyclic { models: Vec<ModelSpec> },
    Table { default: ModelSpec, entries: Vec<ModelEntry> },
}

impl SystemSpec {
    pub fn build(&self, space: &SampleSpace) -> Result<ForecastingSystem> {
        match self {
            SystemSpec::Stationary { model } => ForecastingSystem::stationary(model.build(space)?),
            SystemSpec::Cyclic { models } => ForecastingSystem::cyclic(models.iter().map(|m| m.build(space)).collect::<Result<_>>()?),
            SystemSpec::Table { default, entries } => {
                let mut map = HashMap::new();
                for e in entries {
                    map.insert(situation(space, &e.situation)?, e.model.build(space)?);
                }
                ForecastingSystem::table(map, default.build(space)?)
            }
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultiplierEntry {
    pub situation: Vec<String>,
    pub multiplier: Vec<Rational>,
}

fn all() -> String {
    "all".into()
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StrategySpec {
    Lln {
        gamble: Vec<Rational>,
        direction: Direction,
        epsilon: Rational,
        #[serde(default = "all")]
        selection: String,
    },
    Constant {
        multiplier: Vec<Rational>,
        #[serde(default)]
        label: Option<String>,
    },
    Table {
        default: Vec<Rational>,
        entries: Vec<MultiplierEntry>,
        #[serde(default)]
        label: Option<String>,
    },
    /// The default battery, optionally with extra gambles bet on first.
    Default {
        #[serde(default)]
        gambles: Vec<Vec<Rational>>,
        #[serde(default)]
        epsilon_fractions: Option<Vec<Rational>>,
        #[serde(default)]
        max_modulus: Option<usize>,
    },
}

impl StrategySpec {
    /// Forecast-driven strategies need `sys`.
    pub fn build(&self, space: &SampleSpace, sys: Option<&ForecastingSystem>) -> Result<Vec<MultiplierProcess>> {
        let need_sys = || sys.ok_or_else(|| Error::InvalidArgument("forecast-driven strategies need a forecasting system".into()));
        Ok(match self {
            StrategySpec::Lln { gamble, direction, epsilon, selection } => {
                let params = LlnParams::new(Gamble::new(space, gamble.clone())?, *direction, epsilon.clone(), selection.parse::<SelectionProcess>()?)?;
                vec![lln_strategy(params, need_sys()?)?]
            }
            StrategySpec::Constant { multiplier, label } => {
                let d = ConstantMultiplier::new(Gamble::new(space, multiplier.clone())?)?;
                vec![Arc::new(match label {
                    Some(l) => d.with_label(l.clone()),
                    None => d,
                })]
            }
            StrategySpec::Table { default, entries, label } => {
                let mut map = HashMap::new();
                for e in entries {
                    map.insert(situation(space, &e.situation)?, Gamble::new(space, e.multiplier.clone())?);
                }
                let t = TableMultiplier::new(map, Gamble::new(space, default.clone())?)?;
                vec![Arc::new(match label {
                    Some(l) => t.with_label(l.clone()),
                    None => t,
                })]
            }
            StrategySpec::Default { gambles, epsilon_fractions, max_modulus } => {
                let mut config = BatteryConfig::with_gambles(gambles.iter().map(|g| Gamble::new(space, g.clone())).collect::<Result<_>>()?);
                if let Some(e) = epsilon_fractions {
                    config.epsilon_fractions = e.clone();
                }
                if let Some(m) = max_modulus {
                    config.max_modulus = *m;
                }
                default_battery(need_sys()?, &config)?
            }
        })
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValueEntry {
    pub situation: Vec<String>,
    pub value: Rational,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProcessSpec {
    /// The process generated by a single multiplier strategy.
    Multiplier { strategy: StrategySpec },
    Table { default: Rational, entries: Vec<ValueEntry> },
}

impl ProcessSpec {
    pub fn build(&self, space: &SampleSpace, sys: Option<&ForecastingSystem>) -> Result<RationalProcess> {
        match self {
            ProcessSpec::Multiplier { strategy } => {
                let mut ds = strategy.build(space, sys)?;
                if ds.len() != 1 {
                    return Err(Error::InvalidArgument(format!("a process needs exactly one strategy, got {}", ds.len())));
                }
                Ok(from_multiplier(ds.remove(0)))
            }
            ProcessSpec::Table { default, entries } => {
                let mut map = HashMap::new();
                for e in entries {
                    map.insert(situation(space, &e.situation)?, e.value.clone());
                }
                Ok(RationalProcess::table(space, map, default.clone()))
            }
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub alphabet: Vec<String>,
    pub model: ModelSpec,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    pub alphabet: Vec<String>,
    pub system: SystemSpec,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatteryFile {
    pub alphabet: Vec<String>,
    pub strategies: Vec<StrategySpec>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GambleFile {
    pub alphabet: Vec<String>,
    pub values: Vec<Rational>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcessFile {
    pub alphabet: Vec<String>,
    pub process: ProcessSpec,
}

/// Mass functions for the random generators, used cyclically.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PmfsFile {
    pub alphabet: Vec<String>,
    pub pmfs: Vec<Vec<Rational>>,
}

fn situation(space: &SampleSpace, tokens: &[String]) -> Result<Vec<usize>> {
    tokens.iter().map(|t| space.index_of(t).ok_or_else(|| Error::Parse(format!("unknown symbol {t:?} in situation for {space}")))).collect()
}

fn space_of(alphabet: &[String]) -> Result<SampleSpace> {
    SampleSpace::new(alphabet.iter().cloned())
}

fn name(path: &Path) -> String {
    path.display().to_string()
}

pub fn parse_json<T: DeserializeOwned>(text: &str, path: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|source| Error::Json { path: path.into(), source })
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io { path: name(path), source })?;
    parse_json(&text, &name(path))
}

/// Attaches the file name to errors raised while building from a file.
fn in_file<T>(path: &Path, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", name(path))),
        other => other,
    })
}

pub fn load_model(path: &Path) -> Result<LowerExpectation> {
    let file: ModelFile = read_json(path)?;
    in_file(path, space_of(&file.alphabet).and_then(|s| file.model.build(&s)))
}

pub fn load_model_unchecked(path: &Path) -> Result<LowerExpectation> {
    let file: ModelFile = read_json(path)?;
    in_file(path, space_of(&file.alphabet).and_then(|s| file.model.build_unchecked(&s)))
}

pub fn load_system(path: &Path) -> Result<ForecastingSystem> {
    let file: SystemFile = read_json(path)?;
    in_file(path, space_of(&file.alphabet).and_then(|s| file.system.build(&s)))
}

/// A model file is also accepted as a stationary system.
pub fn load_system_or_model(path: &Path) -> Result<ForecastingSystem> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io { path: name(path), source })?;
    let value: serde_json::Value = parse_json(&text, &name(path))?;
    if value.get("model").is_some() {
        let file: ModelFile = parse_json(&text, &name(path))?;
        in_file(path, space_of(&file.alphabet).and_then(|s| ForecastingSystem::stationary(file.model.build(&s)?)))
    } else {
        let file: SystemFile = parse_json(&text, &name(path))?;
        in_file(path, space_of(&file.alphabet).and_then(|s| file.system.build(&s)))
    }
}

pub fn load_battery(path: &Path, sys: &ForecastingSystem) -> Result<Vec<MultiplierProcess>> {
    let file: BatteryFile = read_json(path)?;
    let space = in_file(path, space_of(&file.alphabet))?;
    space.ensure_same(sys.space())?;
    let mut battery = Vec::new();
    for s in &file.strategies {
        battery.extend(in_file(path, s.build(&space, Some(sys)))?);
    }
    if battery.is_empty() {
        return Err(Error::EmptyBattery);
    }
    Ok(battery)
}

pub fn load_gamble(path: &Path) -> Result<Gamble> {
    let file: GambleFile = read_json(path)?;
    in_file(path, space_of(&file.alphabet).and_then(|s| Gamble::new(&s, file.values)))
}

pub fn load_process(path: &Path, sys: Option<&ForecastingSystem>) -> Result<RationalProcess> {
    let file: ProcessFile = read_json(path)?;
    in_file(path, space_of(&file.alphabet).and_then(|s| file.process.build(&s, sys)))
}

pub fn load_pmfs(path: &Path) -> Result<Vec<Pmf>> {
    let file: PmfsFile = read_json(path)?;
    let space = in_file(path, space_of(&file.alphabet))?;
    if file.pmfs.is_empty() {
        return Err(Error::Parse(format!("{}: no pmfs", name(path))));
    }
    file.pmfs.into_iter().map(|w| Pmf::new(&space, w)).collect()
}
