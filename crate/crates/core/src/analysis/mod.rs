//! Randomness analysis of data prefixes: strategy batteries, capital
//! trajectories, deficiencies, running averages and interval estimates.

mod average;
mod battery;
mod exact;
mod interval;
mod report;
mod scan;

pub use average::{check_running_average, AverageReport, Averages, StationaryMargins};
pub(crate) use battery::check_battery;
pub use battery::{audit_battery, default_battery, default_selections, BatteryConfig};
pub use exact::{capital_path, run_battery, run_battery_with, Trajectory};
pub use interval::{estimate_interval, gamma_family, gamma_grid, GridPoint, IntervalEstimate, IntervalEstimator, IntervalScan, Side, SystemBuilder};
pub use report::{deficiency_summary, scan_summary, write_trajectory_csv, DeficiencyReport, SummaryRow};
pub use scan::{scan_battery, CompiledBattery, ScanResult, StrategyScan};

use crate::error::{Error, Result};
use crate::space::SampleSpace;

/// A finite data sequence as symbol indices into a sample space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SequencePrefix {
    pub space: SampleSpace,
    pub symbols: Vec<usize>,
}

impl SequencePrefix {
    pub fn new(space: SampleSpace, symbols: Vec<usize>) -> Result<Self> {
        if let Some(&bad) = symbols.iter().find(|&&x| x >= space.size()) {
            return Err(Error::InvalidArgument(format!("symbol index {bad} outside {space}")));
        }
        Ok(SequencePrefix { space, symbols })
    }

    pub fn from_tokens<S: AsRef<str>>(space: SampleSpace, tokens: &[S]) -> Result<Self> {
        let symbols = tokens
            .iter()
            .map(|t| space.index_of(t.as_ref()).ok_or_else(|| Error::InvalidArgument(format!("unknown symbol {:?} for {space}", t.as_ref()))))
            .collect::<Result<Vec<_>>>()?;
        Ok(SequencePrefix { space, symbols })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn tokens(&self) -> Vec<&str> {
        self.symbols.iter().map(|&x| self.space.symbol(x)).collect()
    }
}
