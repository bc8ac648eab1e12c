//! Coherent lower expectations and their conjugate upper expectations.
//!
//! Five closed representations are supported. `GammaF` is the least
//! conservative coherent model with `E(f) >= gamma`, evaluated as
//!
//! ```text
//! E(g) = max_{mu >= 0} min_x ( g(x) - mu (f(x) - gamma) )
//! ```
//!
//! The inner minimum is concave and piecewise linear in `mu`, so the maximum
//! sits at `mu = 0` or at a crossing of two of the `K` lines; all candidates
//! are evaluated exactly. `IntervalF` pins `[E(f), Ē(f)]` to an interval by
//! combining two `GammaF` evaluations.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::space::{dot, negate, Gamble, Pmf, SampleSpace};

/// A closed interval with rational endpoints.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "[Rational; 2]", into = "[Rational; 2]")]
pub struct IntervalQ {
    lo: Rational,
    hi: Rational,
}

impl IntervalQ {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidArgument(format!("interval [{lo}, {hi}] has lo > hi")));
        }
        Ok(IntervalQ { lo, hi })
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }
}

impl TryFrom<[Rational; 2]> for IntervalQ {
    type Error = Error;
    fn try_from([lo, hi]: [Rational; 2]) -> Result<Self> {
        IntervalQ::new(lo, hi)
    }
}

impl From<IntervalQ> for [Rational; 2] {
    fn from(i: IntervalQ) -> Self {
        [i.lo, i.hi]
    }
}

impl fmt::Display for IntervalQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Exact intersection, `None` when the intervals are disjoint.
pub fn intersect(a: &IntervalQ, b: &IntervalQ) -> Option<IntervalQ> {
    let lo = a.lo.clone().max(b.lo.clone());
    let hi = a.hi.clone().min(b.hi.clone());
    IntervalQ::new(lo, hi).ok()
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Representation {
    Linear(Pmf),
    Envelope(Vec<Pmf>),
    Vacuous,
    GammaF { gamma: Rational, anchor: Gamble },
    IntervalF { interval: IntervalQ, anchor: Gamble },
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LowerExpectation {
    space: SampleSpace,
    repr: Representation,
    valid: bool,
}

impl LowerExpectation {
    pub fn linear(p: Pmf) -> Self {
        let space = p.space().clone();
        Self::checked(space, Representation::Linear(p)).expect("a Pmf is valid by construction")
    }

    pub fn envelope(vertices: Vec<Pmf>) -> Result<Self> {
        let space = vertices.first().ok_or_else(|| Error::InvalidModel("envelope without vertices".into()))?.space().clone();
        Self::checked(space, Representation::Envelope(vertices))
    }

    pub fn vacuous(space: &SampleSpace) -> Self {
        LowerExpectation { space: space.clone(), repr: Representation::Vacuous, valid: true }
    }

    pub fn gamma_f(gamma: Rational, anchor: Gamble) -> Result<Self> {
        let space = anchor.space().clone();
        Self::checked(space, Representation::GammaF { gamma, anchor })
    }

    pub fn interval_f(interval: IntervalQ, anchor: Gamble) -> Result<Self> {
        let space = anchor.space().clone();
        Self::checked(space, Representation::IntervalF { interval, anchor })
    }

    /// Validates a representation against its invariants.
    pub fn checked(space: SampleSpace, repr: Representation) -> Result<Self> {
        validate(&space, &repr)?;
        Ok(LowerExpectation { space, repr, valid: true })
    }

    /// Builds a representation without enforcing its invariants. Evaluating
    /// it through [`lower`] reports the violation; [`check_coherence`] still
    /// probes the raw functional so that its defects can be exhibited.
    pub fn unchecked(space: SampleSpace, repr: Representation) -> Self {
        let valid = validate(&space, &repr).is_ok();
        LowerExpectation { space, repr, valid }
    }

    pub fn space(&self) -> &SampleSpace {
        &self.space
    }

    pub fn representation(&self) -> &Representation {
        &self.repr
    }

    pub fn is_valid(&self) -> bool {
        self.valid
    }

    /// The invariant violation, if the model was built unchecked.
    pub fn validate(&self) -> Result<()> {
        validate(&self.space, &self.repr)
    }

    pub fn lower(&self, g: &Gamble) -> Result<Rational> {
        lower(self, g)
    }

    pub fn upper(&self, g: &Gamble) -> Result<Rational> {
        upper(self, g)
    }

    /// Evaluation without the validity gate.
    fn raw_lower(&self, g: &Gamble) -> Rational {
        let gv = g.values();
        match &self.repr {
            Representation::Linear(p) => dot(p.weights(), gv),
            Representation::Envelope(vs) => vs.iter().map(|p| dot(p.weights(), gv)).min().expect("non-empty envelope"),
            Representation::Vacuous => g.min(),
            Representation::GammaF { gamma, anchor } => gamma_lower(gamma, anchor.values(), gv),
            Representation::IntervalF { interval, anchor } => {
                let a = gamma_lower(interval.lo(), anchor.values(), gv);
                let neg: Vec<Rational> = anchor.values().iter().map(|v| -v).collect();
                let b = gamma_lower(&-interval.hi(), &neg, gv);
                a.max(b)
            }
        }
    }

    fn raw_upper(&self, g: &Gamble) -> Rational {
        -self.raw_lower(&negate(g))
    }
}

fn validate(space: &SampleSpace, repr: &Representation) -> Result<()> {
    match repr {
        Representation::Linear(p) => {
            space.ensure_same(p.space())?;
            if !p.is_valid() {
                return Err(Error::InvalidPmf(format!("{p:?} is not a probability mass function")));
            }
        }
        Representation::Envelope(vs) => {
            if vs.is_empty() {
                return Err(Error::InvalidModel("envelope without vertices".into()));
            }
            for p in vs {
                space.ensure_same(p.space())?;
                if !p.is_valid() {
                    return Err(Error::InvalidPmf(format!("envelope vertex {p:?} is not a probability mass function")));
                }
            }
        }
        Representation::Vacuous => {}
        Representation::GammaF { gamma, anchor } => {
            space.ensure_same(anchor.space())?;
            let (min, max) = anchor.range();
            if gamma < &min || gamma > &max {
                return Err(Error::InvalidModel(format!("gamma {gamma} outside the anchor range [{min}, {max}]")));
            }
        }
        Representation::IntervalF { interval, anchor } => {
            space.ensure_same(anchor.space())?;
            let (min, max) = anchor.range();
            if interval.lo() < &min || interval.hi() > &max {
                return Err(Error::IntervalOutsideRange {
                    lo: interval.lo().to_string(),
                    hi: interval.hi().to_string(),
                    min: min.to_string(),
                    max: max.to_string(),
                });
            }
        }
    }
    Ok(())
}

/// `max_{mu >= 0} min_x (g(x) - mu (f(x) - gamma))` for `min f <= gamma <= max f`.
pub(crate) fn gamma_lower(gamma: &Rational, f: &[Rational], g: &[Rational]) -> Rational {
    let slopes: Vec<Rational> = f.iter().map(|v| v - gamma).collect();
    let phi = |mu: &Rational| -> Rational {
        g.iter().zip(&slopes).map(|(gx, cx)| if mu.is_zero() || cx.is_zero() { gx.clone() } else { gx - mu * cx }).min().expect("non-empty space")
    };
    if slopes.iter().all(|c| !c.is_positive()) {
        // gamma == max f: phi is non-decreasing and levels off at the flat lines.
        return g.iter().zip(&slopes).filter(|(_, c)| c.is_zero()).map(|(gx, _)| gx.clone()).min().expect("gamma within range");
    }
    if slopes.iter().all(|c| !c.is_negative()) {
        return phi(&Rational::zero());
    }
    let mut best = phi(&Rational::zero());
    for x in 0..g.len() {
        for y in (x + 1)..g.len() {
            if slopes[x] == slopes[y] {
                continue;
            }
            let mu = (&g[x] - &g[y]) / (&slopes[x] - &slopes[y]);
            if mu.is_positive() {
                let v = phi(&mu);
                if v > best {
                    best = v;
                }
            }
        }
    }
    best
}

/// Exact lower expectation of `g`.
pub fn lower(e: &LowerExpectation, g: &Gamble) -> Result<Rational> {
    e.space.ensure_same(g.space())?;
    if !e.valid {
        e.validate()?;
    }
    Ok(e.raw_lower(g))
}

/// Conjugate upper expectation `Ē(g) = -E(-g)`.
pub fn upper(e: &LowerExpectation, g: &Gamble) -> Result<Rational> {
    Ok(-lower(e, &negate(g))?)
}

/// The coherence property a violation refers to.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum Axiom {
    /// Boundedness, `E(f) >= min f`.
    C1,
    /// Homogeneity for positive scalars.
    C2,
    /// Superadditivity.
    C3,
    /// `min f <= E(f) <= Ē(f) <= max f`.
    C4,
    /// Homogeneity of both `E` and `Ē` for scalars `>= 0`.
    C5,
    /// Super/subadditivity of `E` and `Ē`.
    C6,
    /// Constant additivity.
    C7,
    /// Increasingness.
    C8,
    /// Uniform continuity, checked as the Lipschitz bound `|E(f)-E(g)| <= max|f-g|`.
    C9,
}

#[derive(Clone, Debug, Serialize)]
pub struct Violation {
    pub axiom: Axiom,
    pub detail: String,
    #[serde(serialize_with = "ser_gambles")]
    pub witnesses: Vec<Gamble>,
}

fn ser_gambles<S: serde::Serializer>(gs: &[Gamble], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(gs.len()))?;
    for g in gs {
        seq.serialize_element(g.values())?;
    }
    seq.end()
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct CoherenceReport {
    pub checks: usize,
    pub violations: Vec<Violation>,
}

impl CoherenceReport {
    pub fn is_coherent(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violates(&self, axiom: Axiom) -> bool {
        self.violations.iter().any(|v| v.axiom == axiom)
    }

    fn check(&mut self, ok: bool, axiom: Axiom, witnesses: &[&Gamble], detail: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.violations.push(Violation { axiom, detail: detail(), witnesses: witnesses.iter().map(|g| (*g).clone()).collect() });
        }
    }
}

/// Indicators and their negations, followed by `count` seeded gambles with
/// values `n/d` for `|n| <= 6` and `d` in `{1, 2, 3}`.
pub fn probe_gambles(space: &SampleSpace, count: usize, seed: u64) -> Vec<Gamble> {
    use rand_chacha::rand_core::{RngCore, SeedableRng};
    let mut out = Vec::new();
    for x in 0..space.size() {
        let g = Gamble::indicator(space, x);
        out.push(negate(&g));
        out.push(g);
    }
    let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(seed);
    for _ in 0..count {
        let values = (0..space.size()).map(|_| Rational::frac((rng.next_u32() % 13) as i64 - 6, (rng.next_u32() % 3) as i64 + 1)).collect();
        out.push(Gamble::new(space, values).expect("one value per symbol"));
    }
    out
}

/// Probe-based verification of the coherence axioms.
///
/// C1–C3 are checked on every probe and every ordered probe pair; C4–C8 on
/// spot instances built from the probes; C9 through the Lipschitz bound on
/// every pair. Invalid representations are probed as raw functionals.
pub fn check_coherence(e: &LowerExpectation, probes: &[Gamble]) -> Result<CoherenceReport> {
    if probes.len() < 2 {
        return Err(Error::InvalidArgument("check_coherence needs at least two probes".into()));
    }
    for g in probes {
        e.space.ensure_same(g.space())?;
    }
    let lo = |g: &Gamble| e.raw_lower(g);
    let up = |g: &Gamble| e.raw_upper(g);
    let scalars = [Rational::frac(1, 2), Rational::from(2), Rational::frac(7, 3)];
    let shifts = [Rational::from(-1), Rational::frac(1, 3), Rational::frac(5, 2)];
    let mut r = CoherenceReport::default();
    let values: Vec<(Rational, Rational)> = probes.iter().map(|f| (lo(f), up(f))).collect();

    for (f, (ef, uf)) in probes.iter().zip(&values) {
        let (min, max) = f.range();
        r.check(ef >= &min, Axiom::C1, &[f], || format!("E(f) = {ef} < min f = {min}"));
        r.check(&min <= ef && ef <= uf && uf <= &max, Axiom::C4, &[f], || format!("bounds fail: min {min}, E {ef}, Ē {uf}, max {max}"));
        for a in &scalars {
            let af = f.scale(a);
            let (ea, ua) = (lo(&af), up(&af));
            r.check(ea == a * ef, Axiom::C2, &[f], || format!("E({a}f) = {ea} but {a}E(f) = {}", a * ef));
            r.check(ua == a * uf, Axiom::C5, &[f], || format!("Ē({a}f) = {ua} but {a}Ē(f) = {}", a * uf));
        }
        let zero = f.scale(&Rational::zero());
        let (e0, u0) = (lo(&zero), up(&zero));
        r.check(e0.is_zero() && u0.is_zero(), Axiom::C5, &[f], || format!("E(0) = {e0}, Ē(0) = {u0}"));
        for c in &shifts {
            let fc = f.shift(c);
            let (ec, uc) = (lo(&fc), up(&fc));
            r.check(ec == ef + c && uc == uf + c, Axiom::C7, &[f], || format!("E(f+{c}) = {ec}, Ē(f+{c}) = {uc}; expected {} and {}", ef + c, uf + c));
        }
    }

    for (i, f) in probes.iter().enumerate() {
        for (j, g) in probes.iter().enumerate() {
            let (ef, uf) = &values[i];
            let (eg, ug) = &values[j];
            let sum = f.add(g)?;
            let (es, us) = (lo(&sum), up(&sum));
            r.check(es >= ef + eg, Axiom::C3, &[f, g], || format!("E(f+g) = {es} < E(f)+E(g) = {}", ef + eg));
            r.check(us <= uf + ug, Axiom::C6, &[f, g], || format!("Ē(f+g) = {us} > Ē(f)+Ē(g) = {}", uf + ug));
            if f.pointwise_le(g) {
                r.check(ef <= eg && uf <= ug, Axiom::C8, &[f, g], || format!("f <= g but E: {ef} vs {eg}, Ē: {uf} vs {ug}"));
            }
            // The pointwise minimum is always below f, which gives C8 an instance even for incomparable probes.
            let m = f.zip_with(g, |a, b| a.clone().min(b.clone()))?;
            let (em, um) = (lo(&m), up(&m));
            r.check(&em <= ef && &um <= uf, Axiom::C8, &[&m, f], || format!("min(f,g) <= f but E: {em} vs {ef}, Ē: {um} vs {uf}"));
            if i < j {
                let d = f.sup_distance(g)?;
                let ok = (ef - eg).abs() <= d && (uf - ug).abs() <= d;
                r.check(ok, Axiom::C9, &[f, g], || format!("|E(f)-E(g)| = {}, |Ē(f)-Ē(g)| = {} exceed max|f-g| = {d}", (ef - eg).abs(), (uf - ug).abs()));
            }
        }
    }
    Ok(r)
}

/// True iff `lower(el, g) <= lower(eh, g)` for every probe.
pub fn dominates(el: &LowerExpectation, eh: &LowerExpectation, probes: &[Gamble]) -> Result<bool> {
    el.space.ensure_same(&eh.space)?;
    for g in probes {
        if lower(el, g)? > lower(eh, g)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The model `E_{I,f}` with `E(f) = min I` and `Ē(f) = max I`.
pub fn interval_model(interval: IntervalQ, f: Gamble) -> Result<LowerExpectation> {
    LowerExpectation::interval_f(interval, f)
}
