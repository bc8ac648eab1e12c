#![allow(dead_code)]

use std::io::Write;

use imprand::{Gamble, LowerExpectation, Pmf, Rational, SampleSpace};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

pub fn below(rng: &mut ChaCha20Rng, n: u64) -> u64 {
    rng.next_u64() % n
}

pub fn q(n: i64, d: i64) -> Rational {
    Rational::frac(n, d)
}

pub fn abc() -> SampleSpace {
    SampleSpace::letters(3)
}

pub fn corner_vertices() -> Vec<Pmf> {
    let s = abc();
    vec![
        Pmf::from_fracs(&s, &[(0, 1), (1, 2), (1, 2)]).unwrap(),
        Pmf::from_fracs(&s, &[(1, 2), (0, 1), (1, 2)]).unwrap(),
        Pmf::from_fracs(&s, &[(1, 2), (1, 2), (0, 1)]).unwrap(),
    ]
}

pub fn corner_envelope() -> LowerExpectation {
    LowerExpectation::envelope(corner_vertices()).unwrap()
}

pub fn corner_f() -> Gamble {
    Gamble::from_ints(&abc(), &[1, -2, 3]).unwrap()
}

/// Rational in `[lo, hi]` with denominator `den`.
pub fn rational_in(rng: &mut ChaCha20Rng, lo: i64, hi: i64, den: i64) -> Rational {
    let span = ((hi - lo) * den) as u64 + 1;
    Rational::frac(lo * den + below(rng, span) as i64, den)
}

pub fn random_gamble(rng: &mut ChaCha20Rng, space: &SampleSpace, lo: i64, hi: i64) -> Gamble {
    let den = 1 + below(rng, 4) as i64;
    Gamble::new(space, (0..space.size()).map(|_| rational_in(rng, lo, hi, den)).collect()).unwrap()
}

/// Random pmf with small denominators, possibly with zeros.
pub fn random_pmf(rng: &mut ChaCha20Rng, space: &SampleSpace) -> Pmf {
    loop {
        let raw: Vec<i64> = (0..space.size()).map(|_| below(rng, 5) as i64).collect();
        let total: i64 = raw.iter().sum();
        if total > 0 {
            return Pmf::new(space, raw.iter().map(|&w| Rational::frac(w, total)).collect()).unwrap();
        }
    }
}

pub fn random_envelope(rng: &mut ChaCha20Rng, space: &SampleSpace) -> LowerExpectation {
    let n = 1 + below(rng, 3) as usize;
    LowerExpectation::envelope((0..n).map(|_| random_pmf(rng, space)).collect()).unwrap()
}

/// Upper expectation straight from a list of mass functions.
pub fn vertex_upper(vertices: &[Pmf], g: &Gamble) -> Rational {
    vertices.iter().map(|p| dot(p.weights(), g.values())).max().unwrap()
}

pub fn vertex_lower(vertices: &[Pmf], g: &Gamble) -> Rational {
    vertices.iter().map(|p| dot(p.weights(), g.values())).min().unwrap()
}

pub fn dot(w: &[Rational], v: &[Rational]) -> Rational {
    w.iter().zip(v).map(|(a, b)| a * b).sum()
}

/// Sum of `ln(1 + y)` with compensated summation.
pub fn ln1p_sum(ys: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut c) = (0.0f64, 0.0f64);
    for y in ys {
        let v = y.ln_1p();
        let t = sum + v;
        if sum.abs() >= v.abs() {
            c += (sum - t) + v;
        } else {
            c += (v - t) + sum;
        }
        sum = t;
    }
    sum + c
}

/// Prints one acceptance line and returns the verdict.
///
/// Writes to the process stdout handle directly so the line shows up even
/// when the harness captures test output.
pub fn report(id: u32, title: &str, pass: bool, detail: &str) -> bool {
    let line = format!("criterion {id:>2} [{}] {title}: {detail}\n", if pass { "PASS" } else { "FAIL" });
    let mut out = std::io::stdout().lock();
    out.write_all(line.as_bytes()).and_then(|_| out.flush()).expect("stdout is writable");
    pass
}
