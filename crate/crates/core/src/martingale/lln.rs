//! Selection processes and the law-of-large-numbers betting strategy.
//!
//! With base increment `ΔM(s)` (a submartingale difference, e.g.
//! `f - E_s(f)`), the multiplier
//!
//! ```text
//! D(s) = 1 - xi S(s) ΔM(s),    xi = eps / (2 B^2)
//! ```
//!
//! makes capital grow at least like `exp(eps^2 / (4 B^2) · n)` once the
//! selected average of `ΔM` over `n` selected steps is `<= -eps`.

use std::collections::HashSet;
use std::sync::Arc;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forecast::ForecastingSystem;
use crate::lower::{lower, upper, LowerExpectation};
use crate::rational::Rational;
use crate::space::{Gamble, SampleSpace};

use super::multiplier::{Multiplier, MultiplierProcess};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// `ΔM = f - E_s(f)`; gains when the average of `f` drops below the
    /// lower forecast.
    Lower,
    /// `ΔM = Ē_s(f) - f`; gains when the average of `f` rises above the
    /// upper forecast.
    Upper,
}

/// A `{0,1}`-valued process choosing which steps to bet on.
#[derive(Clone, Debug)]
pub enum SelectionProcess {
    AllOnes,
    /// Selects situations whose depth is `i mod m`.
    ResidueClass { m: usize, i: usize },
    /// Selects exactly the listed situations.
    Table(Arc<HashSet<Vec<usize>>>),
}

impl SelectionProcess {
    pub fn residue(m: usize, i: usize) -> Result<Self> {
        if m == 0 || i >= m {
            return Err(Error::InvalidStrategy(format!("residue class {i} mod {m} is invalid")));
        }
        Ok(SelectionProcess::ResidueClass { m, i })
    }

    pub fn selects(&self, s: &[usize]) -> bool {
        self.selects_depth(s.len()).unwrap_or_else(|| match self {
            SelectionProcess::Table(set) => set.contains(s),
            _ => unreachable!(),
        })
    }

    /// The decision when it only depends on depth.
    pub fn selects_depth(&self, depth: usize) -> Option<bool> {
        match self {
            SelectionProcess::AllOnes => Some(true),
            SelectionProcess::ResidueClass { m, i } => Some(depth % m == *i),
            SelectionProcess::Table(_) => None,
        }
    }

    pub fn period(&self) -> Option<usize> {
        match self {
            SelectionProcess::AllOnes => Some(1),
            SelectionProcess::ResidueClass { m, .. } => Some(*m),
            SelectionProcess::Table(_) => None,
        }
    }

    pub fn label(&self) -> String {
        match self {
            SelectionProcess::AllOnes => "all".into(),
            SelectionProcess::ResidueClass { m, i } => format!("residue:{m}:{i}"),
            SelectionProcess::Table(set) => format!("table[{}]", set.len()),
        }
    }
}

impl std::str::FromStr for SelectionProcess {
    type Err = Error;

    /// `all` or `residue:m:i`.
    fn from_str(s: &str) -> Result<Self> {
        if s == "all" {
            return Ok(SelectionProcess::AllOnes);
        }
        let bad = || Error::Parse(format!("selection {s:?}: expected `all` or `residue:m:i`"));
        let rest = s.strip_prefix("residue:").ok_or_else(bad)?;
        let (m, i) = rest.split_once(':').ok_or_else(bad)?;
        SelectionProcess::residue(m.parse().map_err(|_| bad())?, i.parse().map_err(|_| bad())?)
    }
}

#[derive(Clone, Debug)]
pub struct LlnParams {
    pub gamble: Gamble,
    pub direction: Direction,
    pub epsilon: Rational,
    pub bound: Rational,
    pub xi: Rational,
    pub selection: SelectionProcess,
}

impl LlnParams {
    /// Uses `B = max{1, max f - min f}`.
    pub fn new(gamble: Gamble, direction: Direction, epsilon: Rational, selection: SelectionProcess) -> Result<Self> {
        let (min, max) = gamble.range();
        let bound = Rational::one().max(max - min);
        Self::with_bound(gamble, direction, epsilon, bound, selection)
    }

    /// An explicit increment bound `B`, for strategies driven by increment
    /// tables bounded by `B` in absolute value.
    pub fn with_bound(gamble: Gamble, direction: Direction, epsilon: Rational, bound: Rational, selection: SelectionProcess) -> Result<Self> {
        if !bound.is_positive() {
            return Err(Error::InvalidStrategy(format!("bound B = {bound} must be positive")));
        }
        if !epsilon.is_positive() || epsilon >= bound {
            return Err(Error::InvalidStrategy(format!("epsilon = {epsilon} must lie in (0, B) with B = {bound}")));
        }
        let xi = &epsilon / (Rational::from(2) * &bound * &bound);
        if xi.is_negative() || xi >= bound.recip()? {
            return Err(Error::InvalidStrategy(format!("xi = {xi} must lie in (0, 1/B)")));
        }
        Ok(LlnParams { gamble, direction, epsilon, bound, xi, selection })
    }

    pub fn label(&self) -> String {
        let dir = match self.direction {
            Direction::Lower => "lower",
            Direction::Upper => "upper",
        };
        format!("lln{:?} {dir} eps={} sel={}", self.gamble, self.epsilon, self.selection.label())
    }
}

pub type IncrementFn = dyn Fn(&[usize]) -> Gamble + Send + Sync;

enum Increments {
    Forecast(ForecastingSystem),
    Custom(Arc<IncrementFn>),
}

/// The multiplier `1 - xi S(s) ΔM(s)`.
pub struct LlnStrategy {
    params: LlnParams,
    space: SampleSpace,
    increments: Increments,
    rows: Option<Vec<Gamble>>,
    label: String,
}

/// Base increment of `direction` on `f` under one model.
pub fn base_increment(model: &LowerExpectation, f: &Gamble, direction: Direction) -> Result<Gamble> {
    Ok(match direction {
        Direction::Lower => f.shift(&-lower(model, f)?),
        Direction::Upper => f.map(|v| -v).shift(&upper(model, f)?),
    })
}

fn lcm(a: usize, b: usize) -> usize {
    a.lcm(&b)
}

impl LlnStrategy {
    fn multiplier_from(params: &LlnParams, selected: bool, delta: &Gamble) -> Gamble {
        if !selected {
            return Gamble::constant(delta.space(), Rational::one());
        }
        let one = Rational::one();
        let d = delta.map(|v| &one - &params.xi * v);
        assert!(
            d.values().iter().all(Rational::is_positive),
            "LLN multiplier {d:?} is not positive; the increment exceeds the bound B = {}",
            params.bound
        );
        d
    }

    fn build(params: LlnParams, space: SampleSpace, increments: Increments, periodic_increments: Option<Vec<Gamble>>) -> Self {
        let rows = match (params.selection.period(), periodic_increments) {
            (Some(p), Some(inc)) => {
                let period = lcm(p, inc.len());
                Some((0..period).map(|n| Self::multiplier_from(&params, params.selection.selects_depth(n).unwrap(), &inc[n % inc.len()])).collect())
            }
            _ => None,
        };
        let label = params.label();
        LlnStrategy { params, space, increments, rows, label }
    }

    pub fn params(&self) -> &LlnParams {
        &self.params
    }

    /// `ΔM(s)`.
    pub fn increment_at(&self, s: &[usize]) -> Gamble {
        match &self.increments {
            Increments::Forecast(sys) => base_increment(&sys.model_at(s), &self.params.gamble, self.params.direction).expect("system models are valid"),
            Increments::Custom(f) => {
                let g = f(s);
                let b = &self.params.bound;
                assert!(g.values().iter().all(|v| &v.abs() <= b), "increment {g:?} exceeds the bound B = {b}");
                g
            }
        }
    }
}

impl Multiplier for LlnStrategy {
    fn space(&self) -> &SampleSpace {
        &self.space
    }

    fn multiplier_at(&self, s: &[usize]) -> Gamble {
        if let Some(rows) = &self.rows {
            return rows[s.len() % rows.len()].clone();
        }
        let selected = self.params.selection.selects(s);
        if !selected {
            return Gamble::constant(&self.space, Rational::one());
        }
        Self::multiplier_from(&self.params, true, &self.increment_at(s))
    }

    fn factor(&self, s: &[usize], x: usize) -> Rational {
        match &self.rows {
            Some(rows) => rows[s.len() % rows.len()].value(x).clone(),
            None => self.multiplier_at(s).value(x).clone(),
        }
    }

    fn periodic(&self) -> Option<&[Gamble]> {
        self.rows.as_deref()
    }

    fn trusted(&self) -> bool {
        matches!(self.increments, Increments::Forecast(_))
    }

    fn label(&self) -> String {
        self.label.clone()
    }
}

/// Per-depth increments for a depth-only system, shared by strategies that
/// differ only in `eps` or selection.
pub fn periodic_increments(sys: &ForecastingSystem, f: &Gamble, direction: Direction) -> Result<Option<Vec<Gamble>>> {
    match sys.periodic_models() {
        Some(models) => Ok(Some(models.iter().map(|m| base_increment(m, f, direction)).collect::<Result<_>>()?)),
        None => Ok(None),
    }
}

/// The LLN strategy for `params` under `sys`.
pub fn lln_strategy(params: LlnParams, sys: &ForecastingSystem) -> Result<MultiplierProcess> {
    let inc = periodic_increments(sys, &params.gamble, params.direction)?;
    lln_strategy_with_increments(params, sys, inc)
}

pub(crate) fn lln_strategy_with_increments(params: LlnParams, sys: &ForecastingSystem, inc: Option<Vec<Gamble>>) -> Result<MultiplierProcess> {
    params.gamble.space().ensure_same(sys.space())?;
    let space = sys.space().clone();
    Ok(Arc::new(LlnStrategy::build(params, space, Increments::Forecast(sys.clone()), inc)))
}

/// An LLN strategy driven by an explicit increment process, each value
/// bounded by `B` in absolute value.
pub fn lln_from_increments(params: LlnParams, increments: impl Fn(&[usize]) -> Gamble + Send + Sync + 'static) -> MultiplierProcess {
    let space = params.gamble.space().clone();
    Arc::new(LlnStrategy::build(params, space, Increments::Custom(Arc::new(increments)), None))
}
