//! Rational processes on the event tree and their classification.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use serde::Serialize;

use crate::error::Result;
use crate::forecast::{level, ForecastingSystem, Situation};
use crate::lower::{lower, upper};
use crate::par::{self, Exec};
use crate::rational::Rational;
use crate::space::{Gamble, SampleSpace};

pub type ProcessFn = dyn Fn(&[usize]) -> Rational + Send + Sync;

/// A rational-valued process, evaluated lazily on situations given as
/// symbol-index slices.
#[derive(Clone)]
pub struct RationalProcess {
    space: SampleSpace,
    eval: Arc<ProcessFn>,
}

impl RationalProcess {
    /// Wraps a pure function of the situation.
    pub fn new(space: &SampleSpace, eval: impl Fn(&[usize]) -> Rational + Send + Sync + 'static) -> Self {
        RationalProcess { space: space.clone(), eval: Arc::new(eval) }
    }

    pub fn constant(space: &SampleSpace, c: Rational) -> Self {
        Self::new(space, move |_| c.clone())
    }

    /// A process backed by an explicit table with a fallback value.
    pub fn table(space: &SampleSpace, values: HashMap<Vec<usize>, Rational>, default: Rational) -> Self {
        Self::new(space, move |s| values.get(s).cloned().unwrap_or_else(|| default.clone()))
    }

    /// Caches every value it computes. The cache is shared between clones.
    pub fn memoized(self) -> Self {
        let cache: Arc<Mutex<HashMap<Vec<usize>, Rational>>> = Arc::default();
        let inner = self.eval;
        Self::new(&self.space, move |s| {
            if let Some(v) = cache.lock().unwrap().get(s) {
                return v.clone();
            }
            let v = inner(s);
            cache.lock().unwrap().insert(s.to_vec(), v.clone());
            v
        })
    }

    pub fn space(&self) -> &SampleSpace {
        &self.space
    }

    pub fn at(&self, s: &[usize]) -> Rational {
        (self.eval)(s)
    }

    pub fn value(&self, s: &Situation) -> Result<Rational> {
        self.space.ensure_same(s.space())?;
        Ok(self.at(s.symbols()))
    }

    /// The pointwise negation `-F`.
    pub fn negated(&self) -> Self {
        let inner = self.eval.clone();
        Self::new(&self.space, move |s| -inner(s))
    }
}

impl fmt::Debug for RationalProcess {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalProcess(on {}, root = {})", self.space, self.at(&[]))
    }
}

/// `ΔF(s)(x) = F(sx) - F(s)`.
pub fn difference(f: &RationalProcess, s: &Situation) -> Result<Gamble> {
    f.space.ensure_same(s.space())?;
    Ok(difference_at(f, s.symbols()))
}

pub fn difference_at(f: &RationalProcess, s: &[usize]) -> Gamble {
    let here = f.at(s);
    let mut child = s.to_vec();
    child.push(0);
    let values = (0..f.space.size())
        .map(|x| {
            *child.last_mut().unwrap() = x;
            f.at(&child) - &here
        })
        .collect();
    Gamble::new(&f.space, values).expect("one value per symbol")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessKind {
    /// `Ē_s(ΔF(s)) > 0`.
    PositiveUpperIncrement,
    /// `F(s) < 0`.
    Negative,
    /// `F(□) != 1`.
    InitialNotOne,
}

#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub situation: Vec<String>,
    pub kind: WitnessKind,
    pub value: Rational,
}

#[derive(Clone, Debug, Serialize)]
pub struct Classification {
    pub depth: usize,
    pub situations: usize,
    pub supermartingale: bool,
    pub strict: bool,
    pub submartingale: bool,
    pub strict_submartingale: bool,
    pub non_negative: bool,
    pub test: bool,
    /// Every situation that breaks the test-supermartingale conditions.
    pub witnesses: Vec<Witness>,
}

struct Local {
    upper: Rational,
    lower: Rational,
    negatives: Vec<(Vec<usize>, Rational)>,
}

/// Exact check of the (super/sub)martingale conditions at every situation
/// of depth `<= depth`, breadth first in symbol order. Non-negativity is
/// checked on the swept situations and their children.
pub fn classify_process(f: &RationalProcess, sys: &ForecastingSystem, depth: usize) -> Result<Classification> {
    classify_process_with(Exec::default(), f, sys, depth)
}

pub fn classify_process_with(exec: Exec, f: &RationalProcess, sys: &ForecastingSystem, depth: usize) -> Result<Classification> {
    f.space.ensure_same(sys.space())?;
    let k = f.space.size();
    let tokens = |s: &[usize]| s.iter().map(|&x| f.space.symbol(x).to_string()).collect::<Vec<_>>();
    let root = f.at(&[]);
    let mut c = Classification {
        depth,
        situations: 0,
        supermartingale: true,
        strict: true,
        submartingale: true,
        strict_submartingale: true,
        non_negative: !root.is_negative(),
        test: false,
        witnesses: Vec::new(),
    };
    if !root.is_one() {
        c.witnesses.push(Witness { situation: vec![], kind: WitnessKind::InitialNotOne, value: root.clone() });
    }
    if root.is_negative() {
        c.witnesses.push(Witness { situation: vec![], kind: WitnessKind::Negative, value: root.clone() });
    }
    for d in 0..=depth {
        let situations = level(k, d);
        let results: Vec<Result<Local>> = par::map(exec, &situations, |s| {
            let delta = difference_at(f, s);
            let model = sys.model_at(s);
            let here = f.at(s);
            let negatives = delta
                .values()
                .iter()
                .enumerate()
                .filter_map(|(x, dv)| {
                    let v = dv + &here;
                    v.is_negative().then(|| {
                        let mut child = s.clone();
                        child.push(x);
                        (child, v)
                    })
                })
                .collect();
            Ok(Local { upper: upper(&model, &delta)?, lower: lower(&model, &delta)?, negatives })
        });
        for (s, r) in situations.iter().zip(results) {
            let r = r?;
            c.situations += 1;
            c.strict &= r.upper.is_negative();
            c.strict_submartingale &= r.lower.is_positive();
            c.submartingale &= !r.lower.is_negative();
            if r.upper.is_positive() {
                c.supermartingale = false;
                c.witnesses.push(Witness { situation: tokens(s), kind: WitnessKind::PositiveUpperIncrement, value: r.upper });
            }
            for (child, v) in r.negatives {
                c.non_negative = false;
                c.witnesses.push(Witness { situation: tokens(&child), kind: WitnessKind::Negative, value: v });
            }
        }
    }
    c.test = c.supermartingale && c.non_negative && root.is_one();
    Ok(c)
}
