//! Real processes given by rational approximation oracles, and the
//! rationalization that turns them into positive rational strict test
//! supermartingales.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::space::{Gamble, SampleSpace};

use super::process::RationalProcess;
use super::transform::cap_process;

pub type NetFn = dyn Fn(&[usize], u64) -> Rational + Send + Sync;
pub type ModulusFn = dyn Fn(&[usize], u64) -> Rational + Send + Sync;

/// A net `r(s, n)` with modulus `e(s, N)`: whenever `n >= e(s, N)`,
/// `|r(s, n) - F(s)| <= 2^-N` for the limit process `F`.
#[derive(Clone)]
pub struct ApproxProcess {
    space: SampleSpace,
    net: Arc<NetFn>,
    modulus: Arc<ModulusFn>,
}

impl fmt::Debug for ApproxProcess {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ApproxProcess(on {})", self.space)
    }
}

fn precision(e: &Rational) -> u64 {
    let c = e.ceil();
    if c <= BigInt::from(0) {
        0
    } else {
        c.to_u64().expect("modulus fits in 64 bits")
    }
}

impl ApproxProcess {
    pub fn new(
        space: &SampleSpace,
        net: impl Fn(&[usize], u64) -> Rational + Send + Sync + 'static,
        modulus: impl Fn(&[usize], u64) -> Rational + Send + Sync + 'static,
    ) -> Self {
        ApproxProcess { space: space.clone(), net: Arc::new(net), modulus: Arc::new(modulus) }
    }

    /// A net with `|r(s, n) - F(s)| <= 2^-n`, i.e. modulus `e(s, N) = N`.
    pub fn from_standard_net(space: &SampleSpace, net: impl Fn(&[usize], u64) -> Rational + Send + Sync + 'static) -> Self {
        Self::new(space, net, |_, n| Rational::from(n))
    }

    /// The exact process itself, with zero modulus.
    pub fn exact(p: RationalProcess) -> Self {
        let space = p.space().clone();
        Self::new(&space, move |s, _| p.at(s), |_, _| Rational::zero())
    }

    pub fn space(&self) -> &SampleSpace {
        &self.space
    }

    pub fn net(&self, s: &[usize], n: u64) -> Rational {
        (self.net)(s, n)
    }

    pub fn modulus(&self, s: &[usize], big_n: u64) -> Rational {
        (self.modulus)(s, big_n)
    }

    /// `r(s, max{0, ceil e(s, N)})`, within `2^-N` of the limit.
    pub fn approximate(&self, s: &[usize], big_n: u64) -> Rational {
        self.net(s, precision(&self.modulus(s, big_n)))
    }
}

/// The process generated by a multiplier known only through nets
/// `|nets(s, n)(x) - D(s)(x)| <= 2^-n`.
///
/// The net of the product takes absolute values of the factor nets and its
/// modulus is `e(s, N) = N + alpha(s)` with
/// `alpha(x_{1:m}) = m · prod_k (2 + |r^{x_{k+1}}_{x_{1:k}, 0}|)`.
pub fn from_multiplier_nets(space: &SampleSpace, nets: impl Fn(&[usize], u64) -> Gamble + Send + Sync + 'static) -> ApproxProcess {
    let nets = Arc::new(nets);
    let nets2 = nets.clone();
    ApproxProcess::new(
        space,
        move |s, n| (0..s.len()).map(|k| nets(&s[..k], n).value(s[k]).abs()).product(),
        move |s, big_n| {
            let m = Rational::from(s.len());
            let prod: Rational = (0..s.len()).map(|k| Rational::from(2) + nets2(&s[..k], 0).value(s[k]).abs()).product();
            Rational::from(big_n) + m * prod
        },
    )
}

/// The limit `sum_{k >= 1} 2^-k M^(k)` of capped copies of a positive
/// rational test supermartingale, with net `r(s, n) = sum_{k=1}^n 2^-k M^(k)(s)`
/// and modulus `e(s, N) = N + max_{l <= d(s)} M(x_{1:l})`.
pub fn capped_mixture_limit(m: RationalProcess) -> ApproxProcess {
    let space = m.space().clone();
    let m2 = m.clone();
    ApproxProcess::new(
        &space,
        move |s, n| (1..=n).map(|k| Rational::pow2(-(k as i64)) * cap_process(&m, k as u32).at(s)).sum(),
        move |s, big_n| {
            let running_max = (0..=s.len()).map(|l| m2.at(&s[..l])).max().expect("non-empty");
            Rational::from(big_n) + running_max
        },
    )
}

/// The result of rationalizing an approximated supermartingale.
#[derive(Clone, Debug)]
pub struct Rationalized {
    pub process: RationalProcess,
    pub alpha: Rational,
}

/// Builds `M'(s) = (r(s, d(s)) + 6 · 2^-d(s)) / (r(□, 0) + 6)` from the
/// standard net of `m`, where `r(s, n) = m.approximate(s, n)` lies within
/// `2^-n` of the limit. Returns `M'` and `alpha = r(□, 0) + 6`.
///
/// If `m` approximates a non-negative supermartingale, `M'` is a positive
/// rational strict test supermartingale with `|alpha M'(s) - M(s)| <= 7`.
pub fn rationalize(m: &ApproxProcess) -> Result<Rationalized> {
    let alpha = m.approximate(&[], 0) + Rational::from(6);
    if !alpha.is_positive() {
        return Err(Error::Contract(format!("r(□, 0) + 6 = {alpha} is not positive; the approximated process is not non-negative")));
    }
    let m = m.clone();
    let a = alpha.clone();
    let process = RationalProcess::new(&m.space.clone(), move |s| {
        let d = s.len() as i64;
        (m.approximate(s, d as u64) + Rational::from(6) * Rational::pow2(-d)) / &a
    })
    .memoized();
    Ok(Rationalized { process, alpha })
}
