//! Natural-number scalar trait and the Cantor pairing used to schedule stages.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_integer::Roots;
use num_traits::{NumCast, PrimInt, Unsigned};

/// Unsigned primitive integers usable as elements of ω.
pub trait Natural:
    PrimInt + Unsigned + Roots + Debug + Display + Hash + Default + Send + Sync + 'static
{
    /// Lossless widening used by the pairing arithmetic.
    fn widen(self) -> u128 {
        self.to_u128().expect("unsigned primitive fits in u128")
    }

    /// Narrowing back from `u128`; panics if the value does not fit.
    fn narrow(v: u128) -> Self {
        <Self as NumCast>::from(v).expect("value does not fit the target scalar")
    }

    fn as_usize(self) -> usize {
        self.to_usize().expect("value does not fit in usize")
    }

    fn from_usize(v: usize) -> Self {
        <Self as NumCast>::from(v).expect("value does not fit the target scalar")
    }
}

impl<T> Natural for T where
    T: PrimInt + Unsigned + Roots + Debug + Display + Hash + Default + Send + Sync + 'static
{
}

/// A decoded stage index `⟨e, n⟩`: requirement `e`, round `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StagePair<N> {
    pub e: N,
    pub n: N,
}

/// `⟨e, n⟩ = (e + n)(e + n + 1)/2 + e`.
pub fn cantor_pair<N: Natural>(e: N, n: N) -> N {
    let (e, n) = (e.widen(), n.widen());
    let w = e + n;
    N::narrow(w * (w + 1) / 2 + e)
}

/// Inverse of [`cantor_pair`].
pub fn cantor_unpair<N: Natural>(s: N) -> StagePair<N> {
    let s = s.widen();
    // w = largest value with w(w+1)/2 <= s
    let mut w = ((8 * s + 1).sqrt() - 1) / 2;
    while w * (w + 1) / 2 > s {
        w -= 1;
    }
    while (w + 1) * (w + 2) / 2 <= s {
        w += 1;
    }
    let e = s - w * (w + 1) / 2;
    StagePair {
        e: N::narrow(e),
        n: N::narrow(w - e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairing_examples() {
        assert_eq!(cantor_pair(0u64, 0), 0);
        assert_eq!(cantor_pair(0u64, 1), 1);
        assert_eq!(cantor_pair(1u64, 0), 2);
        assert_eq!(cantor_unpair(2u32), StagePair { e: 1, n: 0 });
    }

    #[test]
    fn pairing_round_trips_to_1000() {
        for e in 0..=1000u64 {
            for n in 0..=1000u64 {
                let s = cantor_pair(e, n);
                assert_eq!(cantor_unpair(s), StagePair { e, n });
            }
        }
    }

    #[test]
    fn pairing_is_onto_an_initial_segment() {
        let mut seen = vec![false; 5050];
        for e in 0..100u32 {
            for n in 0..(100 - e) {
                let s = cantor_pair(e, n) as usize;
                assert!(!seen[s]);
                seen[s] = true;
            }
        }
        assert!(seen.iter().all(|&b| b));
    }

    #[test]
    fn generic_over_width() {
        assert_eq!(
            cantor_unpair(cantor_pair(7u8, 5u8)),
            StagePair { e: 7, n: 5 }
        );
        assert_eq!(
            cantor_unpair(cantor_pair(123_456usize, 9)),
            StagePair { e: 123_456, n: 9 }
        );
    }
}
