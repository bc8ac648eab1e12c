//! Expectation-interval estimation along a prefix.
//!
//! For each grid point `gamma` the lower side tests the model "`E(f) >= gamma`"
//! (`GammaF{gamma, f}`) and the upper side the model "`Ē(f) <= gamma`"
//! (`GammaF{-gamma, -f}`), each with the default battery. The accepted
//! lower endpoint is the largest grid point whose repaired deficiency stays
//! within the threshold, and symmetrically for the upper endpoint.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::forecast::ForecastingSystem;
use crate::lower::LowerExpectation;
use crate::par::{self, Exec};
use crate::rational::Rational;
use crate::space::{negate, Gamble};

use super::battery::{default_battery, BatteryConfig};
use super::scan::CompiledBattery;
use super::SequencePrefix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// Candidate lower bounds `E(f) = gamma`.
    Lower,
    /// Candidate upper bounds `Ē(f) = gamma`.
    Upper,
}

pub type SystemBuilder = dyn Fn(Side, &Rational) -> Result<ForecastingSystem> + Send + Sync;

/// The stationary `GammaF` family for `f`.
pub fn gamma_family(f: &Gamble) -> Arc<SystemBuilder> {
    let f = f.clone();
    Arc::new(move |side, gamma| {
        let model = match side {
            Side::Lower => LowerExpectation::gamma_f(gamma.clone(), f.clone())?,
            Side::Upper => LowerExpectation::gamma_f(-gamma, negate(&f))?,
        };
        ForecastingSystem::stationary(model)
    })
}

/// `min f, min f + step, ...` up to `max f`, always including `max f`.
pub fn gamma_grid(f: &Gamble, step: &Rational) -> Result<Vec<Rational>> {
    if !step.is_positive() {
        return Err(Error::EmptyGrid);
    }
    let (min, max) = f.range();
    let mut grid = Vec::new();
    let mut g = min;
    while g < max {
        grid.push(g.clone());
        g += step;
    }
    grid.push(max);
    Ok(grid)
}

#[derive(Clone, Debug, Serialize)]
pub struct GridPoint {
    pub gamma: Rational,
    pub deficiency_bits: f64,
    /// Running maximum towards the interior of the range.
    pub repaired_bits: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct IntervalEstimate {
    pub f: Vec<Rational>,
    pub lo_accept: Rational,
    pub hi_accept: Rational,
    /// The raw endpoints crossed and were swapped.
    pub crossed: bool,
    pub threshold_bits: f64,
    pub grid_step: Rational,
    pub lower_side: Vec<GridPoint>,
    pub upper_side: Vec<GridPoint>,
}

/// Raw per-grid-point deficiencies, before thresholding.
#[derive(Clone, Debug)]
pub struct IntervalScan {
    pub grid: Vec<Rational>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl IntervalScan {
    /// Repaired deficiencies: running max from the bottom of the grid on the
    /// lower side and from the top on the upper side.
    pub fn repaired(&self) -> (Vec<f64>, Vec<f64>) {
        let mut lo = self.lower.clone();
        for j in 1..lo.len() {
            lo[j] = lo[j].max(lo[j - 1]);
        }
        let mut hi = self.upper.clone();
        for j in (0..hi.len().saturating_sub(1)).rev() {
            hi[j] = hi[j].max(hi[j + 1]);
        }
        (lo, hi)
    }

    /// Largest accepted lower endpoint and smallest accepted upper endpoint.
    pub fn raw_endpoints(&self, threshold_bits: f64) -> (Rational, Rational) {
        let (lo, hi) = self.repaired();
        let lo_idx = lo.iter().rposition(|&d| d <= threshold_bits).unwrap_or(0);
        let hi_idx = hi.iter().position(|&d| d <= threshold_bits).unwrap_or(hi.len() - 1);
        (self.grid[lo_idx].clone(), self.grid[hi_idx].clone())
    }

    pub fn accept(&self, f: &Gamble, threshold_bits: f64, grid_step: &Rational) -> IntervalEstimate {
        let (lo_raw, hi_raw) = self.raw_endpoints(threshold_bits);
        let crossed = lo_raw > hi_raw;
        let (lo_accept, hi_accept) = if crossed { (hi_raw, lo_raw) } else { (lo_raw, hi_raw) };
        let (rlo, rhi) = self.repaired();
        let points = |raw: &[f64], rep: &[f64]| {
            self.grid.iter().zip(raw).zip(rep).map(|((g, &d), &r)| GridPoint { gamma: g.clone(), deficiency_bits: d, repaired_bits: r }).collect()
        };
        IntervalEstimate {
            f: f.values().to_vec(),
            lo_accept,
            hi_accept,
            crossed,
            threshold_bits,
            grid_step: grid_step.clone(),
            lower_side: points(&self.lower, &rlo),
            upper_side: points(&self.upper, &rhi),
        }
    }
}

/// Compiled batteries for every grid point on both sides, reusable across
/// prefixes.
pub struct IntervalEstimator {
    f: Gamble,
    grid_step: Rational,
    grid: Vec<Rational>,
    lower: Vec<CompiledBattery>,
    upper: Vec<CompiledBattery>,
}

impl IntervalEstimator {
    /// `config.user_gambles` is extended with `f` itself, placed first.
    pub fn new(f: &Gamble, builder: &SystemBuilder, grid_step: &Rational, config: &BatteryConfig) -> Result<Self> {
        Self::new_with(Exec::default(), f, builder, grid_step, config)
    }

    pub fn new_with(exec: Exec, f: &Gamble, builder: &SystemBuilder, grid_step: &Rational, config: &BatteryConfig) -> Result<Self> {
        let grid = gamma_grid(f, grid_step)?;
        let mut config = config.clone();
        config.user_gambles.insert(0, f.clone());
        let compile = |side: Side| -> Result<Vec<CompiledBattery>> {
            par::map(exec, &grid, |g| {
                let sys = builder(side, g)?;
                sys.space().ensure_same(f.space())?;
                CompiledBattery::new(&default_battery(&sys, &config)?)
            })
            .into_iter()
            .collect()
        };
        Ok(IntervalEstimator { f: f.clone(), grid_step: grid_step.clone(), lower: compile(Side::Lower)?, upper: compile(Side::Upper)?, grid })
    }

    pub fn grid(&self) -> &[Rational] {
        &self.grid
    }

    pub fn scan(&self, prefix: &SequencePrefix, exec: Exec) -> Result<IntervalScan> {
        prefix.space.ensure_same(self.f.space())?;
        let jobs: Vec<(Side, usize)> = (0..self.grid.len()).map(|j| (Side::Lower, j)).chain((0..self.grid.len()).map(|j| (Side::Upper, j))).collect();
        let bits = par::map(exec, &jobs, |&(side, j)| {
            let b = match side {
                Side::Lower => &self.lower[j],
                Side::Upper => &self.upper[j],
            };
            b.deficiency_bits(&prefix.symbols)
        });
        let (lower, upper) = bits.split_at(self.grid.len());
        Ok(IntervalScan { grid: self.grid.clone(), lower: lower.to_vec(), upper: upper.to_vec() })
    }

    pub fn estimate(&self, prefix: &SequencePrefix, threshold_bits: f64) -> Result<IntervalEstimate> {
        self.estimate_with(Exec::default(), prefix, threshold_bits)
    }

    pub fn estimate_with(&self, exec: Exec, prefix: &SequencePrefix, threshold_bits: f64) -> Result<IntervalEstimate> {
        if threshold_bits.is_nan() || threshold_bits <= 0.0 {
            return Err(Error::InvalidArgument(format!("threshold_bits = {threshold_bits} must be positive")));
        }
        Ok(self.scan(prefix, exec)?.accept(&self.f, threshold_bits, &self.grid_step))
    }
}

/// One-shot interval estimate with the default battery.
pub fn estimate_interval(prefix: &SequencePrefix, f: &Gamble, builder: &SystemBuilder, threshold_bits: f64, grid_step: &Rational) -> Result<IntervalEstimate> {
    if threshold_bits.is_nan() || threshold_bits <= 0.0 {
        return Err(Error::InvalidArgument(format!("threshold_bits = {threshold_bits} must be positive")));
    }
    IntervalEstimator::new(f, builder, grid_step, &BatteryConfig::default())?.estimate(prefix, threshold_bits)
}
