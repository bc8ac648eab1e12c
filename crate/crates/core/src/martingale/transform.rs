//! Capping and mixing of processes.

use crate::error::{Error, Result};
use crate::rational::Rational;

use super::process::RationalProcess;

/// `M^(k)`: equal to `M` until the running maximum reaches `2^k`, then
/// frozen at `2^k`.
pub fn cap_process(m: &RationalProcess, k: u32) -> RationalProcess {
    let m = m.clone();
    let cap = Rational::pow2(k as i64);
    let space = m.space().clone();
    RationalProcess::new(&space, move |s| {
        for l in 0..=s.len() {
            if m.at(&s[..l]) >= cap {
                return cap.clone();
            }
        }
        m.at(s)
    })
}

/// Weights `2^-i / (1 - 2^-n)` for `i = 1..=n`. They sum to one.
pub fn mixture_weights(n: usize) -> Vec<Rational> {
    let z = Rational::one() - Rational::pow2(-(n as i64));
    (1..=n).map(|i| Rational::pow2(-(i as i64)) / &z).collect()
}

/// `sum_i w_i M_i` over the first `truncation` processes (all of them when
/// `None`) with the renormalized weights of [`mixture_weights`].
pub fn mix(processes: &[RationalProcess], truncation: Option<usize>) -> Result<RationalProcess> {
    let n = truncation.unwrap_or(processes.len()).min(processes.len());
    if n == 0 {
        return Err(Error::InvalidArgument("mix needs at least one process".into()));
    }
    let space = processes[0].space().clone();
    for p in &processes[..n] {
        space.ensure_same(p.space())?;
    }
    let members: Vec<RationalProcess> = processes[..n].to_vec();
    let weights = mixture_weights(n);
    Ok(RationalProcess::new(&space, move |s| members.iter().zip(&weights).map(|(p, w)| w * p.at(s)).sum()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::SampleSpace;

    #[test]
    fn cap_of_doubling() {
        let s = SampleSpace::letters(2);
        let m = RationalProcess::new(&s, |sit| Rational::pow2(sit.len() as i64));
        let c = cap_process(&m, 1);
        let path = [1usize, 0, 1, 1];
        let values: Vec<_> = (0..=path.len()).map(|l| c.at(&path[..l])).collect();
        assert_eq!(values, vec![Rational::one(), Rational::from(2), Rational::from(2), Rational::from(2), Rational::from(2)]);
        let c0 = cap_process(&m, 0);
        assert!((0..=path.len()).all(|l| c0.at(&path[..l]).is_one()));
    }

    #[test]
    fn weights_are_normalized() {
        let w = mixture_weights(2);
        assert_eq!(w, vec![Rational::frac(2, 3), Rational::frac(1, 3)]);
        assert!(mixture_weights(7).iter().sum::<Rational>().is_one());
    }
}
