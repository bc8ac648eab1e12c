//! The default strategy battery.

use crate::error::{Error, Result};
use crate::forecast::ForecastingSystem;
use crate::martingale::{audit_multiplier, lln_strategy_with_increments, periodic_increments, Direction, LlnParams, MultiplierProcess, SelectionProcess};
use crate::rational::Rational;
use crate::space::Gamble;

/// Which LLN strategies the default battery contains.
#[derive(Clone, Debug)]
pub struct BatteryConfig {
    /// Gambles bet on before the symbol indicators.
    pub user_gambles: Vec<Gamble>,
    pub include_indicators: bool,
    /// `eps` as fractions of `B`, in betting order.
    pub epsilon_fractions: Vec<Rational>,
    /// Residue-class selections use every modulus `2..=max_modulus`.
    pub max_modulus: usize,
}

impl Default for BatteryConfig {
    fn default() -> Self {
        BatteryConfig {
            user_gambles: Vec::new(),
            include_indicators: true,
            epsilon_fractions: vec![Rational::frac(1, 2), Rational::frac(1, 4), Rational::frac(1, 8), Rational::frac(1, 16)],
            max_modulus: 4,
        }
    }
}

impl BatteryConfig {
    pub fn with_gambles(gambles: Vec<Gamble>) -> Self {
        BatteryConfig { user_gambles: gambles, ..Self::default() }
    }
}

/// `AllOnes` followed by every residue class `i mod m` for `2 <= m <= max_modulus`.
pub fn default_selections(max_modulus: usize) -> Vec<SelectionProcess> {
    let mut out = vec![SelectionProcess::AllOnes];
    for m in 2..=max_modulus {
        out.extend((0..m).map(|i| SelectionProcess::ResidueClass { m, i }));
    }
    out
}

/// LLN strategies ordered by gamble, then selection, then direction, then
/// decreasing `eps`, so that the strategies most likely to matter get the
/// largest mixture weights.
pub fn default_battery(sys: &ForecastingSystem, config: &BatteryConfig) -> Result<Vec<MultiplierProcess>> {
    let space = sys.space();
    let mut gambles: Vec<Gamble> = Vec::new();
    let indicators = if config.include_indicators { (0..space.size()).map(|x| Gamble::indicator(space, x)).collect() } else { Vec::new() };
    for g in config.user_gambles.iter().chain(&indicators) {
        space.ensure_same(g.space())?;
        if !gambles.contains(g) {
            gambles.push(g.clone());
        }
    }
    let selections = default_selections(config.max_modulus);
    let mut battery: Vec<MultiplierProcess> = Vec::new();
    for g in &gambles {
        let (min, max) = g.range();
        let bound = Rational::one().max(max - min);
        let incs = [periodic_increments(sys, g, Direction::Lower)?, periodic_increments(sys, g, Direction::Upper)?];
        for sel in &selections {
            for (dir, inc) in [Direction::Lower, Direction::Upper].into_iter().zip(&incs) {
                for frac in &config.epsilon_fractions {
                    let params = LlnParams::new(g.clone(), dir, frac * &bound, sel.clone())?;
                    battery.push(lln_strategy_with_increments(params, sys, inc.clone())?);
                }
            }
        }
    }
    if battery.is_empty() {
        return Err(Error::EmptyBattery);
    }
    Ok(battery)
}

/// Audits every strategy that is not valid by construction.
pub fn audit_battery(battery: &[MultiplierProcess], sys: &ForecastingSystem, depth: usize) -> Result<()> {
    for d in battery {
        if !d.trusted() {
            audit_multiplier(d.as_ref(), sys, depth)?;
        }
    }
    Ok(())
}

pub(crate) fn check_battery(battery: &[MultiplierProcess], sys: &ForecastingSystem) -> Result<()> {
    if battery.is_empty() {
        return Err(Error::EmptyBattery);
    }
    for d in battery {
        sys.space().ensure_same(d.space())?;
    }
    Ok(())
}

