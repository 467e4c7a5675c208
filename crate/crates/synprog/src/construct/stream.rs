//! Generators of infinite pairwise-prime sets, used as the H_0 pool when a
//! search needs fresh multipliers coprime to everything already in play.

use super::ConstructError;
use crate::arith::{gcd_u64, is_prime_u64};

/// An unbounded pairwise-prime stream. The prime variants are pairwise prime
/// trivially; `PrimeSquares` demonstrates a pairwise-prime set of composites.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PairwisePrimeStream {
    Primes,
    PrimeSquares,
    PrimesCoprimeTo(u64),
}

impl PairwisePrimeStream {
    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        let variant = self.clone();
        (2u64..).filter_map(move |p| {
            if !is_prime_u64(p) {
                return None;
            }
            match variant {
                PairwisePrimeStream::Primes => Some(p),
                PairwisePrimeStream::PrimeSquares => p.checked_mul(p),
                PairwisePrimeStream::PrimesCoprimeTo(m) => (m % p != 0).then_some(p),
            }
        })
    }

    /// Draws `count` elements coprime to every value in `forbidden` and to
    /// everything in `already` (which is extended with the draws).
    pub fn draw_coprime(
        &self,
        forbidden: &[u64],
        count: usize,
        already: &mut Vec<u64>,
    ) -> Result<Vec<u64>, ConstructError> {
        let mut out = Vec::with_capacity(count);
        for cand in self.iter().take(1_000_000) {
            if forbidden.iter().all(|&b| gcd_u64(cand, b) == 1)
                && already.iter().all(|&a| gcd_u64(cand, a) == 1)
            {
                out.push(cand);
                already.push(cand);
                if out.len() == count {
                    return Ok(out);
                }
            }
        }
        Err(ConstructError::Internal(format!(
            "pairwise-prime stream exhausted drawing {count} elements"
        )))
    }

    /// Parses `primes`, `prime-squares`, or `primes-coprime-to:<m>`.
    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "primes" => Some(Self::Primes),
            "prime-squares" => Some(Self::PrimeSquares),
            other => other
                .strip_prefix("primes-coprime-to:")
                .and_then(|m| m.parse().ok())
                .map(Self::PrimesCoprimeTo),
        }
    }
}

impl std::fmt::Display for PairwisePrimeStream {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Primes => write!(f, "primes"),
            Self::PrimeSquares => write!(f, "prime-squares"),
            Self::PrimesCoprimeTo(m) => write!(f, "primes-coprime-to:{m}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes_stream_head() {
        let head: Vec<u64> = PairwisePrimeStream::Primes.iter().take(5).collect();
        assert_eq!(head, vec![2, 3, 5, 7, 11]);
    }

    #[test]
    fn prime_squares_are_composite_and_pairwise_prime() {
        let head: Vec<u64> = PairwisePrimeStream::PrimeSquares.iter().take(4).collect();
        assert_eq!(head, vec![4, 9, 25, 49]);
        assert!(crate::arith::is_pairwise_coprime_u64(&head));
    }

    #[test]
    fn coprime_filter() {
        let head: Vec<u64> = PairwisePrimeStream::PrimesCoprimeTo(12)
            .iter()
            .take(4)
            .collect();
        assert_eq!(head, vec![5, 7, 11, 13]);
    }

    #[test]
    fn draw_respects_forbidden_and_already() {
        let mut already = vec![5];
        let drawn = PairwisePrimeStream::Primes
            .draw_coprime(&[6], 3, &mut already)
            .unwrap();
        assert_eq!(drawn, vec![7, 11, 13]);
        assert_eq!(already, vec![5, 7, 11, 13]);
    }

    #[test]
    fn parse_round_trip() {
        for text in ["primes", "prime-squares", "primes-coprime-to:12"] {
            let s = PairwisePrimeStream::parse(text).unwrap();
            assert_eq!(s.to_string(), text);
        }
        assert_eq!(PairwisePrimeStream::parse("nope"), None);
    }
}
