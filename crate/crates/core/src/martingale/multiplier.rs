//! Multiplier processes and the capital processes they generate.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::forecast::{level, ForecastingSystem};
use crate::lower::upper;
use crate::rational::Rational;
use crate::space::{Gamble, SampleSpace};

use super::process::RationalProcess;

/// A map from situations to non-negative gambles `D(s)`.
pub trait Multiplier: Send + Sync {
    fn space(&self) -> &SampleSpace;

    fn multiplier_at(&self, s: &[usize]) -> Gamble;

    /// `D(s)(x)`.
    fn factor(&self, s: &[usize], x: usize) -> Rational {
        self.multiplier_at(s).value(x).clone()
    }

    /// Rows `D_0, ..., D_{P-1}` when `D(s) = D_{d(s) mod P}` for every `s`.
    fn periodic(&self) -> Option<&[Gamble]> {
        None
    }

    /// Whether the multiplier is a supermartingale multiplier for the
    /// system it was built from by construction.
    fn trusted(&self) -> bool {
        false
    }

    fn label(&self) -> String;
}

pub type MultiplierProcess = Arc<dyn Multiplier>;

impl fmt::Debug for dyn Multiplier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

fn check_non_negative(g: &Gamble) -> Result<()> {
    if g.values().iter().any(Rational::is_negative) {
        return Err(Error::InvalidStrategy(format!("multiplier {g:?} has a negative entry")));
    }
    Ok(())
}

/// A multiplier that does not depend on the situation.
pub struct ConstantMultiplier {
    rows: [Gamble; 1],
    label: String,
}

impl ConstantMultiplier {
    pub fn new(d: Gamble) -> Result<Self> {
        check_non_negative(&d)?;
        let label = format!("constant{d:?}");
        Ok(ConstantMultiplier { rows: [d], label })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }
}

impl Multiplier for ConstantMultiplier {
    fn space(&self) -> &SampleSpace {
        self.rows[0].space()
    }
    fn multiplier_at(&self, _: &[usize]) -> Gamble {
        self.rows[0].clone()
    }
    fn factor(&self, _: &[usize], x: usize) -> Rational {
        self.rows[0].value(x).clone()
    }
    fn periodic(&self) -> Option<&[Gamble]> {
        Some(&self.rows)
    }
    fn label(&self) -> String {
        self.label.clone()
    }
}

/// Explicit per-situation multipliers with a default.
pub struct TableMultiplier {
    map: HashMap<Vec<usize>, Gamble>,
    default: Gamble,
    label: String,
}

impl TableMultiplier {
    pub fn new(map: HashMap<Vec<usize>, Gamble>, default: Gamble) -> Result<Self> {
        check_non_negative(&default)?;
        for (s, g) in &map {
            default.space().ensure_same(g.space())?;
            check_non_negative(g)?;
            if s.iter().any(|&x| x >= default.space().size()) {
                return Err(Error::InvalidStrategy(format!("table situation {s:?} outside {}", default.space())));
            }
        }
        let label = format!("table[{} entries]", map.len());
        Ok(TableMultiplier { map, default, label })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }
}

impl Multiplier for TableMultiplier {
    fn space(&self) -> &SampleSpace {
        self.default.space()
    }
    fn multiplier_at(&self, s: &[usize]) -> Gamble {
        self.map.get(s).unwrap_or(&self.default).clone()
    }
    fn factor(&self, s: &[usize], x: usize) -> Rational {
        self.map.get(s).unwrap_or(&self.default).value(x).clone()
    }
    fn label(&self) -> String {
        self.label.clone()
    }
}

pub type MultiplierFn = dyn Fn(&[usize]) -> Gamble + Send + Sync;

/// A multiplier given by a pure function. Non-negativity is the caller's
/// contract.
pub struct FnMultiplier {
    space: SampleSpace,
    f: Arc<MultiplierFn>,
    label: String,
}

impl FnMultiplier {
    pub fn new(space: &SampleSpace, label: impl Into<String>, f: impl Fn(&[usize]) -> Gamble + Send + Sync + 'static) -> Self {
        FnMultiplier { space: space.clone(), f: Arc::new(f), label: label.into() }
    }
}

impl Multiplier for FnMultiplier {
    fn space(&self) -> &SampleSpace {
        &self.space
    }
    fn multiplier_at(&self, s: &[usize]) -> Gamble {
        (self.f)(s)
    }
    fn label(&self) -> String {
        self.label.clone()
    }
}

/// The process `M(□) = 1`, `M(sx) = M(s) D(s)(x)`, memoized along every
/// queried path.
pub fn from_multiplier(d: MultiplierProcess) -> RationalProcess {
    let space = d.space().clone();
    let cache: Arc<Mutex<HashMap<Vec<usize>, Rational>>> = Arc::default();
    cache.lock().unwrap().insert(Vec::new(), Rational::one());
    RationalProcess::new(&space, move |s| {
        let (mut k, mut value) = {
            let c = cache.lock().unwrap();
            if let Some(v) = c.get(s) {
                return v.clone();
            }
            let mut k = s.len() - 1;
            loop {
                if let Some(v) = c.get(&s[..k]) {
                    break (k, v.clone());
                }
                k -= 1;
            }
        };
        let mut fresh = Vec::with_capacity(s.len() - k);
        while k < s.len() {
            value *= d.factor(&s[..k], s[k]);
            k += 1;
            fresh.push(value.clone());
        }
        let mut c = cache.lock().unwrap();
        let start = s.len() - fresh.len();
        for (j, v) in fresh.into_iter().enumerate() {
            c.insert(s[..start + j + 1].to_vec(), v);
        }
        value
    })
}

/// Checks `D(s) >= 0` and `Ē_s(D(s)) <= 1` at every situation of depth
/// `<= depth`. Depth-only multipliers under depth-only systems are checked
/// once per depth.
pub fn audit_multiplier(d: &dyn Multiplier, sys: &ForecastingSystem, depth: usize) -> Result<()> {
    d.space().ensure_same(sys.space())?;
    let depth_only = d.periodic().is_some() && sys.periodic_models().is_some();
    for n in 0..=depth {
        let situations = if depth_only { vec![vec![0; n]] } else { level(d.space().size(), n) };
        for s in situations {
            let g = d.multiplier_at(&s);
            check_non_negative(&g)?;
            let u = upper(&sys.model_at(&s), &g)?;
            if u > Rational::one() {
                let at = s.iter().map(|&x| d.space().symbol(x)).collect::<Vec<_>>().join(" ");
                return Err(Error::InvalidStrategy(format!("{}: upper expectation of D at [{at}] is {u} > 1", d.label())));
            }
        }
    }
    Ok(())
}
