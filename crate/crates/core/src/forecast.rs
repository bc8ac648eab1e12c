//! Situations in the event tree and forecasting systems.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::lower::{lower, LowerExpectation};
use crate::space::{Gamble, SampleSpace};

/// A finite sequence of outcomes; the empty situation is the root.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Situation {
    space: SampleSpace,
    symbols: Vec<usize>,
}

impl Situation {
    pub fn root(space: &SampleSpace) -> Self {
        Situation { space: space.clone(), symbols: Vec::new() }
    }

    pub fn new(space: &SampleSpace, symbols: Vec<usize>) -> Result<Self> {
        if let Some(&bad) = symbols.iter().find(|&&x| x >= space.size()) {
            return Err(Error::InvalidArgument(format!("symbol index {bad} outside {space}")));
        }
        Ok(Situation { space: space.clone(), symbols })
    }

    pub fn from_tokens<S: AsRef<str>>(space: &SampleSpace, tokens: &[S]) -> Result<Self> {
        let symbols = tokens
            .iter()
            .map(|t| space.index_of(t.as_ref()).ok_or_else(|| Error::InvalidArgument(format!("unknown symbol {:?} for {space}", t.as_ref()))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Situation { space: space.clone(), symbols })
    }

    pub fn space(&self) -> &SampleSpace {
        &self.space
    }

    pub fn symbols(&self) -> &[usize] {
        &self.symbols
    }

    pub fn depth(&self) -> usize {
        self.symbols.len()
    }

    pub fn child(&self, x: usize) -> Situation {
        let mut symbols = Vec::with_capacity(self.symbols.len() + 1);
        symbols.extend_from_slice(&self.symbols);
        symbols.push(x);
        Situation { space: self.space.clone(), symbols }
    }

    pub fn tokens(&self) -> Vec<&str> {
        self.symbols.iter().map(|&x| self.space.symbol(x)).collect()
    }
}

impl fmt::Debug for Situation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.symbols.is_empty() {
            write!(f, "□")
        } else {
            write!(f, "{}", self.tokens().join(""))
        }
    }
}

/// All situations of depth exactly `depth`, in symbol order.
pub fn level(k: usize, depth: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..depth {
        out = out
            .into_iter()
            .flat_map(|s| {
                (0..k).map(move |x| {
                    let mut c = s.clone();
                    c.push(x);
                    c
                })
            })
            .collect();
    }
    out
}

/// Breadth-first enumeration of all situations with depth `<= depth`.
pub fn situations_to_depth(k: usize, depth: usize) -> Vec<Vec<usize>> {
    (0..=depth).flat_map(|d| level(k, d)).collect()
}

pub type ForecastFn = dyn Fn(&[usize]) -> LowerExpectation + Send + Sync;

#[derive(Clone)]
pub enum Rule {
    Stationary(Arc<LowerExpectation>),
    Cyclic(Vec<Arc<LowerExpectation>>),
    Table { map: HashMap<Vec<usize>, Arc<LowerExpectation>>, default: Arc<LowerExpectation> },
    /// A deterministic function of the situation.
    Programmatic(Arc<ForecastFn>),
}

/// Assigns a coherent lower expectation to every situation.
#[derive(Clone)]
pub struct ForecastingSystem {
    space: SampleSpace,
    rule: Rule,
}

impl ForecastingSystem {
    pub fn stationary(model: LowerExpectation) -> Result<Self> {
        model.validate()?;
        Ok(ForecastingSystem { space: model.space().clone(), rule: Rule::Stationary(Arc::new(model)) })
    }

    pub fn cyclic(models: Vec<LowerExpectation>) -> Result<Self> {
        let space = models.first().ok_or_else(|| Error::InvalidModel("cyclic system without models".into()))?.space().clone();
        for m in &models {
            space.ensure_same(m.space())?;
            m.validate()?;
        }
        Ok(ForecastingSystem { space, rule: Rule::Cyclic(models.into_iter().map(Arc::new).collect()) })
    }

    pub fn table(map: HashMap<Vec<usize>, LowerExpectation>, default: LowerExpectation) -> Result<Self> {
        let space = default.space().clone();
        default.validate()?;
        for (s, m) in &map {
            space.ensure_same(m.space())?;
            m.validate()?;
            Situation::new(&space, s.clone())?;
        }
        Ok(ForecastingSystem {
            space,
            rule: Rule::Table { map: map.into_iter().map(|(k, v)| (k, Arc::new(v))).collect(), default: Arc::new(default) },
        })
    }

    /// The function must be deterministic and return models on `space`.
    pub fn programmatic(space: &SampleSpace, f: impl Fn(&[usize]) -> LowerExpectation + Send + Sync + 'static) -> Self {
        ForecastingSystem { space: space.clone(), rule: Rule::Programmatic(Arc::new(f)) }
    }

    pub fn space(&self) -> &SampleSpace {
        &self.space
    }

    pub fn rule(&self) -> &Rule {
        &self.rule
    }

    /// The model at a situation given by its symbol indices.
    pub fn model_at(&self, s: &[usize]) -> Arc<LowerExpectation> {
        match &self.rule {
            Rule::Stationary(m) => m.clone(),
            Rule::Cyclic(ms) => ms[s.len() % ms.len()].clone(),
            Rule::Table { map, default } => map.get(s).unwrap_or(default).clone(),
            Rule::Programmatic(f) => Arc::new(f(s)),
        }
    }

    /// Models indexed by `depth mod period` when the system only depends on
    /// depth.
    pub fn periodic_models(&self) -> Option<Vec<Arc<LowerExpectation>>> {
        match &self.rule {
            Rule::Stationary(m) => Some(vec![m.clone()]),
            Rule::Cyclic(ms) => Some(ms.clone()),
            _ => None,
        }
    }
}

impl fmt::Debug for ForecastingSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.rule {
            Rule::Stationary(_) => "stationary",
            Rule::Cyclic(_) => "cyclic",
            Rule::Table { .. } => "table",
            Rule::Programmatic(_) => "programmatic",
        };
        write!(f, "ForecastingSystem({kind} on {})", self.space)
    }
}

/// The model attached to `s`.
pub fn forecast_at(sys: &ForecastingSystem, s: &Situation) -> Result<Arc<LowerExpectation>> {
    sys.space.ensure_same(&s.space)?;
    let m = sys.model_at(&s.symbols);
    sys.space.ensure_same(m.space())?;
    Ok(m)
}

/// True iff `a` is pointwise below `b` on every probe at every situation of
/// depth `<= depth`.
pub fn pointwise_leq(a: &ForecastingSystem, b: &ForecastingSystem, depth: usize, probes: &[Gamble]) -> Result<bool> {
    a.space.ensure_same(&b.space)?;
    for g in probes {
        a.space.ensure_same(g.space())?;
    }
    let k = a.space.size();
    let depth_only = a.periodic_models().is_some() && b.periodic_models().is_some();
    for d in 0..=depth {
        let situations = if depth_only { vec![vec![0; d]] } else { level(k, d) };
        for s in situations {
            let (ma, mb) = (a.model_at(&s), b.model_at(&s));
            for g in probes {
                if lower(&ma, g)? > lower(&mb, g)? {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::Pmf;

    #[test]
    fn breadth_first_order() {
        let all = situations_to_depth(2, 2);
        assert_eq!(all, vec![vec![], vec![0], vec![1], vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        assert_eq!(situations_to_depth(3, 5).len(), 364);
    }

    #[test]
    fn cyclic_indexes_by_depth() {
        let s = SampleSpace::letters(3);
        let ps: Vec<_> = (0..3).map(|i| LowerExpectation::linear(Pmf::point_mass(&s, i))).collect();
        let sys = ForecastingSystem::cyclic(ps.clone()).unwrap();
        let sit = Situation::new(&s, vec![2, 2, 2, 2]).unwrap();
        assert_eq!(*forecast_at(&sys, &sit).unwrap(), ps[1]);
    }

    #[test]
    fn table_uses_default_off_table() {
        let s = SampleSpace::letters(2);
        let special = LowerExpectation::linear(Pmf::point_mass(&s, 0));
        let sys = ForecastingSystem::table(HashMap::from([(vec![1], special.clone())]), LowerExpectation::vacuous(&s)).unwrap();
        assert_eq!(*sys.model_at(&[1]), special);
        assert_eq!(*sys.model_at(&[0]), LowerExpectation::vacuous(&s));
    }
}
