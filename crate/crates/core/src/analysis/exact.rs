//! Exact capital paths along a prefix.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use crate::error::Result;
use crate::forecast::ForecastingSystem;
use crate::martingale::{mixture_weights, MultiplierProcess};
use crate::par::{self, Exec};
use crate::rational::Rational;
use crate::space::SampleSpace;

use super::battery::check_battery;
use super::SequencePrefix;

/// Capital of every strategy and of their mixture at steps `0..=N`.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub space: SampleSpace,
    pub symbols: Vec<usize>,
    pub labels: Vec<String>,
    /// `capitals[i][n]` is strategy `i` after `n` observations.
    pub capitals: Vec<Vec<Rational>>,
    pub mixture: Vec<Rational>,
    pub running_max: Vec<Rational>,
    /// `log2` of the largest mixture capital; `>= 0` since the mixture
    /// starts at one.
    pub deficiency_bits: f64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// First step at which the running maximum is attained.
    pub fn mixture_argmax(&self) -> usize {
        let best = self.running_max.last().expect("at least the initial step");
        self.mixture.iter().position(|v| v == best).unwrap_or(0)
    }
}

/// Exact capital of one multiplier along `symbols`.
pub fn capital_path(d: &MultiplierProcess, symbols: &[usize]) -> Vec<Rational> {
    running_product(&factor_path(d, symbols))
}

fn factor_path(d: &MultiplierProcess, symbols: &[usize]) -> Vec<Rational> {
    let rows = d.periodic();
    symbols
        .iter()
        .enumerate()
        .map(|(n, &x)| match rows {
            Some(rows) => rows[n % rows.len()].value(x).clone(),
            None => d.factor(&symbols[..n], x),
        })
        .collect()
}

fn running_product(factors: &[Rational]) -> Vec<Rational> {
    let mut path = Vec::with_capacity(factors.len() + 1);
    let mut c = Rational::one();
    path.push(c.clone());
    for f in factors {
        if !f.is_one() {
            c *= f;
        }
        path.push(c.clone());
    }
    path
}

/// Mixture `sum_i 2^-i M_i / (1 - 2^-n)` at every step.
///
/// Capitals are carried as integer numerators over one denominator shared by
/// the whole battery, so each step needs a single reduction rather than one
/// per strategy.
fn mixture_path(factors: &[Vec<Rational>], weights: &[Rational], steps: usize) -> Vec<Rational> {
    let wden = weights.iter().fold(BigInt::one(), |l, w| l.lcm(w.denom()));
    let wnum: Vec<BigInt> = weights.iter().map(|w| w.numer() * (&wden / w.denom())).collect();
    let mut nums = vec![BigInt::one(); factors.len()];
    let mut den = BigInt::one();
    let value = |nums: &[BigInt], den: &BigInt| {
        let total: BigInt = nums.iter().zip(&wnum).map(|(a, w)| a * w).sum();
        Rational::new(total, &wden * den).expect("positive denominator")
    };
    let mut out = Vec::with_capacity(steps + 1);
    out.push(value(&nums, &den));
    for n in 0..steps {
        let small = factors.iter().try_fold(1u64, |l, f| {
            let d = f[n].denom().to_u64()?;
            (l / l.gcd(&d)).checked_mul(d)
        });
        let l = match small {
            Some(l) => BigInt::from(l),
            None => factors.iter().fold(BigInt::one(), |l, f| l.lcm(f[n].denom())),
        };
        for (c, f) in nums.iter_mut().zip(factors) {
            let f = &f[n];
            if l.is_one() {
                if !f.is_one() {
                    *c *= f.numer();
                }
            } else {
                *c *= f.numer() * (&l / f.denom());
            }
        }
        den *= &l;
        out.push(value(&nums, &den));
    }
    out
}

/// Runs every strategy along the prefix with exact arithmetic.
pub fn run_battery(prefix: &SequencePrefix, sys: &ForecastingSystem, battery: &[MultiplierProcess]) -> Result<Trajectory> {
    run_battery_with(Exec::default(), prefix, sys, battery)
}

pub fn run_battery_with(exec: Exec, prefix: &SequencePrefix, sys: &ForecastingSystem, battery: &[MultiplierProcess]) -> Result<Trajectory> {
    check_battery(battery, sys)?;
    prefix.space.ensure_same(sys.space())?;
    let symbols = &prefix.symbols;
    let factors: Vec<Vec<Rational>> = par::map(exec, battery, |d| factor_path(d, symbols));
    let capitals: Vec<Vec<Rational>> = par::map(exec, &factors, |f| running_product(f));
    let mixture = mixture_path(&factors, &mixture_weights(battery.len()), symbols.len());
    let mut running_max = Vec::with_capacity(mixture.len());
    let mut best = mixture[0].clone();
    for v in &mixture {
        if v > &best {
            best = v.clone();
        }
        running_max.push(best.clone());
    }
    let deficiency_bits = best.log2().max(0.0);
    Ok(Trajectory {
        space: prefix.space.clone(),
        symbols: symbols.clone(),
        labels: battery.iter().map(|d| d.label()).collect(),
        capitals,
        mixture,
        running_max,
        deficiency_bits,
    })
}
