//! Sample spaces, gambles and probability mass functions.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::rational::Rational;

/// A finite ordered alphabet. Cloning is cheap.
#[derive(Clone)]
pub struct SampleSpace {
    symbols: Arc<[String]>,
}

impl SampleSpace {
    pub fn new<S: Into<String>>(symbols: impl IntoIterator<Item = S>) -> Result<Self> {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return Err(Error::InvalidSpace("no symbols".into()));
        }
        for (i, s) in symbols.iter().enumerate() {
            if s.is_empty() || s.chars().any(|c| c.is_whitespace() || c.is_control()) || s.starts_with('#') {
                return Err(Error::InvalidSpace(format!("symbol {s:?} is not a printable token")));
            }
            if symbols[..i].contains(s) {
                return Err(Error::InvalidSpace(format!("duplicate symbol {s:?}")));
            }
        }
        Ok(SampleSpace { symbols: symbols.into() })
    }

    /// `{A, B, C, ...}` with the first `k` capital letters.
    pub fn letters(k: usize) -> Self {
        assert!((1..=26).contains(&k));
        Self::new((0..k).map(|i| ((b'A' + i as u8) as char).to_string())).unwrap()
    }

    pub fn size(&self) -> usize {
        self.symbols.len()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn symbol(&self, index: usize) -> &str {
        &self.symbols[index]
    }

    pub fn index_of(&self, token: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s == token)
    }

    pub fn ensure_same(&self, other: &SampleSpace) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::mismatch(self, other))
        }
    }
}

impl PartialEq for SampleSpace {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.symbols, &other.symbols) || self.symbols == other.symbols
    }
}

impl Eq for SampleSpace {}

impl std::hash::Hash for SampleSpace {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.symbols.hash(state);
    }
}

impl fmt::Display for SampleSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.symbols.join(","))
    }
}

impl fmt::Debug for SampleSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A rational-valued function on a sample space.
#[derive(Clone, PartialEq, Eq)]
pub struct Gamble {
    space: SampleSpace,
    values: Vec<Rational>,
}

impl Gamble {
    pub fn new(space: &SampleSpace, values: Vec<Rational>) -> Result<Self> {
        if values.len() != space.size() {
            return Err(Error::Length { expected: space.size(), got: values.len() });
        }
        Ok(Gamble { space: space.clone(), values })
    }

    /// Builds a gamble from small integer fractions `(num, den)`.
    pub fn from_fracs(space: &SampleSpace, values: &[(i64, i64)]) -> Result<Self> {
        Self::new(space, values.iter().map(|&(n, d)| Rational::frac(n, d)).collect())
    }

    pub fn from_ints(space: &SampleSpace, values: &[i64]) -> Result<Self> {
        Self::new(space, values.iter().map(|&v| Rational::from(v)).collect())
    }

    pub fn constant(space: &SampleSpace, c: Rational) -> Self {
        Gamble { space: space.clone(), values: vec![c; space.size()] }
    }

    pub fn zero(space: &SampleSpace) -> Self {
        Self::constant(space, Rational::zero())
    }

    /// The indicator `1_{x}` of a single symbol.
    pub fn indicator(space: &SampleSpace, index: usize) -> Self {
        let values = (0..space.size()).map(|i| if i == index { Rational::one() } else { Rational::zero() }).collect();
        Gamble { space: space.clone(), values }
    }

    pub fn space(&self) -> &SampleSpace {
        &self.space
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn value(&self, index: usize) -> &Rational {
        &self.values[index]
    }

    pub fn min(&self) -> Rational {
        self.values.iter().min().cloned().expect("non-empty space")
    }

    pub fn max(&self) -> Rational {
        self.values.iter().max().cloned().expect("non-empty space")
    }

    pub fn range(&self) -> (Rational, Rational) {
        gamble_range(self)
    }

    pub fn is_constant(&self) -> bool {
        self.values.iter().all(|v| v == &self.values[0])
    }

    pub fn map(&self, f: impl Fn(&Rational) -> Rational) -> Gamble {
        Gamble { space: self.space.clone(), values: self.values.iter().map(f).collect() }
    }

    pub fn zip_with(&self, other: &Gamble, f: impl Fn(&Rational, &Rational) -> Rational) -> Result<Gamble> {
        self.space.ensure_same(&other.space)?;
        Ok(Gamble { space: self.space.clone(), values: self.values.iter().zip(&other.values).map(|(a, b)| f(a, b)).collect() })
    }

    pub fn add(&self, other: &Gamble) -> Result<Gamble> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Gamble) -> Result<Gamble> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: &Rational) -> Gamble {
        self.map(|v| v * c)
    }

    pub fn shift(&self, c: &Rational) -> Gamble {
        self.map(|v| v + c)
    }

    /// `max_x |f(x) - g(x)|`.
    pub fn sup_distance(&self, other: &Gamble) -> Result<Rational> {
        let d = self.zip_with(other, |a, b| (a - b).abs())?;
        Ok(d.max())
    }

    /// True when `self(x) <= other(x)` for every symbol.
    pub fn pointwise_le(&self, other: &Gamble) -> bool {
        self.values.iter().zip(&other.values).all(|(a, b)| a <= b)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.values.iter().map(Rational::to_f64).collect()
    }
}

impl fmt::Debug for Gamble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// `(min f, max f)`.
pub fn gamble_range(f: &Gamble) -> (Rational, Rational) {
    (f.min(), f.max())
}

/// Pointwise negation.
pub fn negate(f: &Gamble) -> Gamble {
    f.map(|v| -v)
}

/// A probability mass function with exact weights summing to one.
#[derive(Clone, PartialEq, Eq)]
pub struct Pmf {
    space: SampleSpace,
    weights: Vec<Rational>,
}

impl Pmf {
    pub fn new(space: &SampleSpace, weights: Vec<Rational>) -> Result<Self> {
        let p = Self::new_unchecked(space, weights)?;
        if p.weights.iter().any(Rational::is_negative) {
            return Err(Error::InvalidPmf(format!("negative weight in {p:?}")));
        }
        let total: Rational = p.weights.iter().sum();
        if !total.is_one() {
            return Err(Error::InvalidPmf(format!("weights of {p:?} sum to {total}, not 1")));
        }
        Ok(p)
    }

    /// A weight vector that skips the non-negativity and normalization
    /// checks. Only the length is validated. Used to build deliberately
    /// incoherent models for testing the coherence checker.
    pub fn new_unchecked(space: &SampleSpace, weights: Vec<Rational>) -> Result<Self> {
        if weights.len() != space.size() {
            return Err(Error::Length { expected: space.size(), got: weights.len() });
        }
        Ok(Pmf { space: space.clone(), weights })
    }

    pub fn from_fracs(space: &SampleSpace, weights: &[(i64, i64)]) -> Result<Self> {
        Self::new(space, weights.iter().map(|&(n, d)| Rational::frac(n, d)).collect())
    }

    pub fn point_mass(space: &SampleSpace, index: usize) -> Self {
        Pmf { space: space.clone(), weights: Gamble::indicator(space, index).values }
    }

    pub fn uniform(space: &SampleSpace) -> Self {
        let w = Rational::frac(1, space.size() as i64);
        Pmf { space: space.clone(), weights: vec![w; space.size()] }
    }

    pub fn space(&self) -> &SampleSpace {
        &self.space
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn weight(&self, index: usize) -> &Rational {
        &self.weights[index]
    }

    /// Whether the weights are non-negative and sum to one.
    pub fn is_valid(&self) -> bool {
        self.weights.iter().all(|w| !w.is_negative()) && self.weights.iter().sum::<Rational>().is_one()
    }
}

impl fmt::Debug for Pmf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p{:?}", Gamble { space: self.space.clone(), values: self.weights.clone() })
    }
}

/// `E_p(f) = Σ_x f(x) p(x)`.
pub fn linear_expectation(p: &Pmf, f: &Gamble) -> Result<Rational> {
    p.space.ensure_same(&f.space)?;
    Ok(dot(&p.weights, &f.values))
}

pub(crate) fn dot(w: &[Rational], v: &[Rational]) -> Rational {
    w.iter().zip(v).filter(|(w, _)| !w.is_zero()).map(|(w, v)| w * v).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abc() -> SampleSpace {
        SampleSpace::letters(3)
    }

    #[test]
    fn example_one_third_vertex() {
        let p2 = Pmf::from_fracs(&abc(), &[(1, 2), (1, 2), (0, 1)]).unwrap();
        let f = Gamble::from_ints(&abc(), &[1, -2, 3]).unwrap();
        assert_eq!(linear_expectation(&p2, &f).unwrap(), Rational::frac(-1, 2));
    }

    #[test]
    fn point_mass_and_constants() {
        let f = Gamble::from_ints(&abc(), &[1, -2, 3]).unwrap();
        assert_eq!(linear_expectation(&Pmf::point_mass(&abc(), 1), &f).unwrap(), Rational::from(-2));
        let c = Gamble::constant(&abc(), Rational::frac(7, 3));
        assert_eq!(linear_expectation(&Pmf::uniform(&abc()), &c).unwrap(), Rational::frac(7, 3));
    }

    #[test]
    fn ranges_and_negation() {
        let f = Gamble::from_ints(&abc(), &[1, -2, 3]).unwrap();
        assert_eq!(gamble_range(&f), (Rational::from(-2), Rational::from(3)));
        assert_eq!(negate(&f), Gamble::from_ints(&abc(), &[-1, 2, -3]).unwrap());
        assert_eq!(negate(&f).min(), Rational::from(-3));
        assert_eq!(negate(&negate(&f)), f);
        let z = Gamble::zero(&abc());
        assert_eq!(negate(&z), z);
        assert_eq!(gamble_range(&z), (Rational::zero(), Rational::zero()));
        let g = Gamble::from_fracs(&abc(), &[(1, 3), (1, 3), (1, 2)]).unwrap();
        assert_eq!(gamble_range(&g), (Rational::frac(1, 3), Rational::frac(1, 2)));
    }

    #[test]
    fn mismatches_are_reported() {
        let ab = SampleSpace::letters(2);
        let f = Gamble::from_ints(&abc(), &[1, 2, 3]).unwrap();
        let err = linear_expectation(&Pmf::uniform(&ab), &f).unwrap_err();
        assert_eq!(err.to_string(), "sample space mismatch: {A,B} vs {A,B,C}");
        assert!(Gamble::from_ints(&ab, &[1]).is_err());
        assert!(Pmf::from_fracs(&ab, &[(1, 2), (1, 3)]).is_err());
        assert!(Pmf::from_fracs(&ab, &[(3, 2), (-1, 2)]).is_err());
        assert!(SampleSpace::new(["A", "A"]).is_err());
        assert!(SampleSpace::new(["A B"]).is_err());
    }
}
