//! Sequence generation and sequence files.
//!
//! Random sequences use ChaCha20 seeded with `ChaCha20Rng::seed_from_u64`.
//! Each symbol is drawn by scaling the step pmf to integer weights over a
//! common denominator `L`, drawing a uniform integer in `[0, L)` by
//! rejection sampling and inverting the integer CDF. No floating point is
//! involved, so a seed fixes the sequence on every platform.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::analysis::{check_battery, SequencePrefix};
use crate::error::{Error, Result};
use crate::forecast::ForecastingSystem;
use crate::lower::upper;
use crate::martingale::{mixture_weights, MultiplierProcess};
use crate::rational::Rational;
use crate::space::{Pmf, SampleSpace};

#[derive(Clone)]
pub enum GeneratorKind {
    Iid(Pmf),
    /// Step `n` (from 0) is drawn from `pmfs[n % pmfs.len()]`.
    Cyclic(Vec<Pmf>),
    /// Greedy descent of the battery mixture; ignores the seed.
    Adversarial { sys: ForecastingSystem, battery: Vec<MultiplierProcess> },
}

#[derive(Clone)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    pub length: usize,
    pub seed: u64,
}

/// Exact integer sampler for one pmf.
struct Sampler {
    total: BigUint,
    /// Upper ends of the cumulative integer weights.
    cumulative: Vec<BigUint>,
    small: Option<(u64, Vec<u64>)>,
}

impl Sampler {
    fn new(p: &Pmf) -> Result<Self> {
        if !p.is_valid() {
            return Err(Error::InvalidPmf(format!("cannot sample from {:?}", p.weights())));
        }
        let mut l = BigInt::one();
        for w in p.weights() {
            l = l.lcm(w.denom());
        }
        let mut acc = BigUint::zero();
        let mut cumulative = Vec::with_capacity(p.weights().len());
        for w in p.weights() {
            let scaled = w.numer() * (&l / w.denom());
            acc += scaled.to_biguint().expect("non-negative weight");
            cumulative.push(acc.clone());
        }
        let total = l.to_biguint().expect("positive denominator");
        let small = total.to_u64().map(|t| (t, cumulative.iter().map(|c| c.to_u64().expect("bounded by total")).collect()));
        Ok(Sampler { total, cumulative, small })
    }

    fn draw(&self, rng: &mut ChaCha20Rng) -> usize {
        match &self.small {
            Some((total, cumulative)) => {
                let zone = (u64::MAX / total) * total;
                let u = loop {
                    let r = rng.next_u64();
                    if r < zone {
                        break r % total;
                    }
                };
                cumulative.iter().position(|&c| u < c).expect("u below total")
            }
            None => {
                let bits = self.total.bits();
                let words = bits.div_ceil(64) as usize;
                let u = loop {
                    let bytes: Vec<u8> = (0..words).flat_map(|_| rng.next_u64().to_le_bytes()).collect();
                    let mut r = BigUint::from_bytes_le(&bytes);
                    let excess = words as u64 * 64 - bits;
                    r >>= excess;
                    if r < self.total {
                        break r;
                    }
                };
                self.cumulative.iter().position(|c| &u < c).expect("u below total")
            }
        }
    }
}

/// Generates a prefix according to `spec`.
pub fn generate(spec: &GeneratorSpec) -> Result<SequencePrefix> {
    match &spec.kind {
        GeneratorKind::Iid(p) => sample(std::slice::from_ref(p), spec.length, spec.seed),
        GeneratorKind::Cyclic(ps) => sample(ps, spec.length, spec.seed),
        GeneratorKind::Adversarial { sys, battery } => adversarial(sys, battery, spec.length),
    }
}

fn sample(pmfs: &[Pmf], length: usize, seed: u64) -> Result<SequencePrefix> {
    let first = pmfs.first().ok_or_else(|| Error::InvalidArgument("no pmfs to sample from".into()))?;
    let space = first.space().clone();
    for p in pmfs {
        space.ensure_same(p.space())?;
    }
    let samplers = pmfs.iter().map(Sampler::new).collect::<Result<Vec<_>>>()?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let symbols = (0..length).map(|n| samplers[n % samplers.len()].draw(&mut rng)).collect();
    SequencePrefix::new(space, symbols)
}

/// At each situation picks the child minimizing the normalized mixture of
/// the battery, ties going to the smallest symbol index. Every factor must
/// be positive and, for strategies not valid by construction, the upper
/// expectation of the multiplier must not exceed one at each visited
/// situation.
fn adversarial(sys: &ForecastingSystem, battery: &[MultiplierProcess], length: usize) -> Result<SequencePrefix> {
    check_battery(battery, sys)?;
    let space = sys.space().clone();
    let k = space.size();
    let mut weighted = mixture_weights(battery.len());
    let mut symbols = Vec::with_capacity(length);
    for n in 0..length {
        let rows: Vec<_> = battery.iter().map(|d| d.multiplier_at(&symbols)).collect();
        for (i, row) in rows.iter().enumerate() {
            if let Some(x) = (0..k).find(|&x| !row.value(x).is_positive()) {
                return Err(Error::InvalidStrategy(format!(
                    "strategy {i} ({}) has non-positive factor {} at {:?} after {n} steps",
                    battery[i].label(),
                    row.value(x),
                    space.symbol(x)
                )));
            }
            if !battery[i].trusted() && upper(&sys.model_at(&symbols), row)? > Rational::one() {
                return Err(Error::InvalidStrategy(format!("strategy {i} ({}) has upper multiplier above 1 after {n} steps", battery[i].label())));
            }
        }
        let mut best: Option<(usize, Rational)> = None;
        for x in 0..k {
            let v: Rational = weighted.iter().zip(&rows).map(|(c, row)| c * row.value(x)).sum();
            if best.as_ref().is_none_or(|(_, b)| &v < b) {
                best = Some((x, v));
            }
        }
        let (x, _) = best.expect("non-empty space");
        for (c, row) in weighted.iter_mut().zip(&rows) {
            let f = row.value(x);
            if !f.is_one() {
                *c = &*c * f;
            }
        }
        symbols.push(x);
    }
    SequencePrefix::new(space, symbols)
}

const HEADER: &str = "# alphabet:";
const PER_LINE: usize = 40;

/// Parses sequence text. `space` is required when the text has no alphabet
/// header; when both are present they must agree.
pub fn parse_sequence(text: &str, path: &str, space: Option<&SampleSpace>) -> Result<SequencePrefix> {
    let mut declared: Option<SampleSpace> = None;
    let mut body = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if let Some(rest) = trimmed.strip_prefix(HEADER) {
            if declared.is_some() || !body.is_empty() {
                return Err(Error::Parse(format!("{path}:{}: alphabet header must come first and only once", i + 1)));
            }
            let symbols: Vec<&str> = rest.split_whitespace().collect();
            declared = Some(SampleSpace::new(symbols).map_err(|e| Error::Parse(format!("{path}:{}: {e}", i + 1)))?);
        } else if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        } else {
            body.push((i + 1, line));
        }
    }
    let space = match (declared, space) {
        (Some(d), Some(s)) if &d != s => {
            return Err(Error::AlphabetMismatch { path: path.into(), expected: s.symbols().to_vec(), found: d.symbols().to_vec() });
        }
        (Some(d), _) => d,
        (None, Some(s)) => s.clone(),
        (None, None) => return Err(Error::Parse(format!("{path}: no `{HEADER}` header and no alphabet given"))),
    };
    let mut symbols = Vec::new();
    for (line, text) in body {
        for token in text.split_whitespace() {
            let x = space.index_of(token).ok_or_else(|| Error::UnknownToken { path: path.into(), line, token: token.into() })?;
            symbols.push(x);
        }
    }
    SequencePrefix::new(space, symbols)
}

/// Sequence text with an alphabet header.
pub fn format_sequence(prefix: &SequencePrefix) -> String {
    let mut out = format!("{HEADER} {}\n", prefix.space.symbols().join(" "));
    for chunk in prefix.symbols.chunks(PER_LINE) {
        let line: Vec<&str> = chunk.iter().map(|&x| prefix.space.symbol(x)).collect();
        writeln!(out, "{}", line.join(" ")).expect("writing to a string");
    }
    out
}

pub fn read_sequence(path: &Path, space: Option<&SampleSpace>) -> Result<SequencePrefix> {
    let name = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|source| Error::Io { path: name.clone(), source })?;
    parse_sequence(&text, &name, space)
}

pub fn write_sequence(prefix: &SequencePrefix, path: &Path) -> Result<()> {
    fs::write(path, format_sequence(prefix)).map_err(|source| Error::Io { path: path.display().to_string(), source })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abc() -> SampleSpace {
        SampleSpace::letters(3)
    }

    #[test]
    fn degenerate_iid_repeats_its_atom() {
        let spec = GeneratorSpec { kind: GeneratorKind::Iid(Pmf::point_mass(&abc(), 0)), length: 5, seed: 9 };
        let prefix = generate(&spec).unwrap();
        assert_eq!(prefix.tokens(), vec!["A"; 5]);
    }

    #[test]
    fn seeds_are_reproducible_and_distinct() {
        let p = Pmf::from_fracs(&abc(), &[(1, 2), (1, 4), (1, 4)]).unwrap();
        let gen = |seed| generate(&GeneratorSpec { kind: GeneratorKind::Iid(p.clone()), length: 200, seed }).unwrap();
        assert_eq!(gen(1), gen(1));
        assert_ne!(gen(1), gen(2));
    }

    #[test]
    fn wide_denominators_use_the_big_path() {
        let space = SampleSpace::letters(2);
        let third = Rational::new(BigInt::one(), BigInt::from(3u8).pow(50)).unwrap();
        let p = Pmf::new(&space, vec![third.clone(), Rational::one() - third]).unwrap();
        let prefix = generate(&GeneratorSpec { kind: GeneratorKind::Iid(p), length: 100, seed: 3 }).unwrap();
        assert!(prefix.symbols.iter().all(|&x| x == 1));
    }

    #[test]
    fn parse_reports_unknown_tokens_with_lines() {
        let err = parse_sequence("# alphabet: A B C\nA B\nC D\n", "data.txt", None).unwrap_err();
        assert!(matches!(err, Error::UnknownToken { line: 3, ref token, .. } if token == "D"), "{err}");
    }

    #[test]
    fn header_only_is_empty_and_mismatch_is_reported() {
        let empty = parse_sequence("# alphabet: A B C\n", "x", None).unwrap();
        assert!(empty.is_empty());
        let other = SampleSpace::new(["H", "T"]).unwrap();
        assert!(matches!(parse_sequence("# alphabet: A B C\n", "x", Some(&other)), Err(Error::AlphabetMismatch { .. })));
        assert!(matches!(parse_sequence("A B", "x", None), Err(Error::Parse(_))));
    }

    #[test]
    fn format_round_trips() {
        let p = Pmf::uniform(&abc());
        let prefix = generate(&GeneratorSpec { kind: GeneratorKind::Iid(p), length: 1000, seed: 5 }).unwrap();
        assert_eq!(parse_sequence(&format_sequence(&prefix), "x", None).unwrap(), prefix);
    }
}
