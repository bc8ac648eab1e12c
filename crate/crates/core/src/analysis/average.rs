//! Selected running averages of a gamble along a prefix.

use serde::Serialize;

use crate::error::Result;
use crate::forecast::ForecastingSystem;
use crate::lower::{lower, upper};
use crate::martingale::SelectionProcess;
use crate::rational::Rational;
use crate::space::Gamble;

use super::SequencePrefix;

#[derive(Clone, Debug, Serialize)]
pub struct StationaryMargins {
    pub lower: Rational,
    pub upper: Rational,
    /// `average - E(f)`; negative when the data undershoot the lower forecast.
    pub above_lower: Rational,
    /// `Ē(f) - average`; negative when the data overshoot the upper forecast.
    pub below_upper: Rational,
}

#[derive(Clone, Debug, Serialize)]
pub struct Averages {
    /// Selected average of `f(x_{k+1})`.
    pub mean: Rational,
    /// Selected average of `f(x_{k+1}) - E_{x_{1:k}}(f)`.
    pub mean_minus_lower: Rational,
    /// Selected average of `Ē_{x_{1:k}}(f) - f(x_{k+1})`.
    pub upper_minus_mean: Rational,
    pub stationary: Option<StationaryMargins>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AverageReport {
    pub length: usize,
    pub selected: usize,
    /// `None` when no step was selected and the average is undefined.
    pub averages: Option<Averages>,
}

/// Averages of `f` and of its forecast increments over the steps selected
/// by `selection`.
pub fn check_running_average(prefix: &SequencePrefix, f: &Gamble, selection: &SelectionProcess, sys: &ForecastingSystem) -> Result<AverageReport> {
    prefix.space.ensure_same(f.space())?;
    prefix.space.ensure_same(sys.space())?;
    let periodic = match sys.periodic_models() {
        Some(models) => Some(models.iter().map(|m| Ok((lower(m, f)?, upper(m, f)?))).collect::<Result<Vec<_>>>()?),
        None => None,
    };
    let mut selected = 0usize;
    let mut sum_f = Rational::zero();
    let mut sum_lower = Rational::zero();
    let mut sum_upper = Rational::zero();
    let symbols = &prefix.symbols;
    for (n, &x) in symbols.iter().enumerate() {
        let s = &symbols[..n];
        if !selection.selects(s) {
            continue;
        }
        selected += 1;
        let (lo, up) = match &periodic {
            Some(rows) => rows[n % rows.len()].clone(),
            None => {
                let m = sys.model_at(s);
                (lower(&m, f)?, upper(&m, f)?)
            }
        };
        sum_f += f.value(x);
        sum_lower += lo;
        sum_upper += up;
    }
    if selected == 0 {
        return Ok(AverageReport { length: symbols.len(), selected, averages: None });
    }
    let count = Rational::from(selected);
    let mean = &sum_f / &count;
    let stationary = match &periodic {
        Some(rows) if rows.len() == 1 => {
            let (lo, up) = rows[0].clone();
            Some(StationaryMargins { above_lower: &mean - &lo, below_upper: &up - &mean, lower: lo, upper: up })
        }
        _ => None,
    };
    Ok(AverageReport {
        length: symbols.len(),
        selected,
        averages: Some(Averages {
            mean_minus_lower: (&sum_f - &sum_lower) / &count,
            upper_minus_mean: (&sum_upper - &sum_f) / &count,
            mean,
            stationary,
        }),
    })
}
