//! Greedy extraction of pairwise-prime multiplier sets, and the order-one
//! triplet search built on it.
//!
//! Maximality here is maximality relative to the observable universe: an
//! ascending greedy scan over the window is maximal in the sense that no
//! further in-window multiplier can be appended, which is all the downstream
//! growth machinery ever uses.

use super::ConstructError;
use crate::arith::gcd_u64;
use crate::synset::SyndeticWindow;

/// Ascending greedy scan collecting multipliers x with r*x a window member
/// above the excluded prefix [1, l], pairwise prime with everything chosen
/// so far. The result cannot be extended within the window.
pub fn greedy_maximal_pairwise_prime(window: &SyndeticWindow, r: u64) -> Vec<u64> {
    greedy_pairwise_prime_prefix(window, r, usize::MAX)
}

/// The first `max_len` elements the greedy scan would pick (the full scan's
/// prefix; stopping early keeps large windows cheap when only a small
/// witness set is needed).
pub fn greedy_pairwise_prime_prefix(window: &SyndeticWindow, r: u64, max_len: usize) -> Vec<u64> {
    let mut chosen: Vec<u64> = Vec::new();
    if r == 0 || max_len == 0 {
        return chosen;
    }
    let n_up = window.upper();
    let l = window.l();
    let mut x = 1u64;
    while let Some(rx) = r.checked_mul(x).filter(|&v| v <= n_up) {
        if rx > l && window.contains(rx) && chosen.iter().all(|&y| gcd_u64(x, y) == 1) {
            chosen.push(x);
            if chosen.len() >= max_len {
                break;
            }
        }
        x += 1;
    }
    chosen
}

/// Outcome of the order-one search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrderOneOutcome {
    /// A scale d in [2, l] whose greedy set reached size h: the seed of an
    /// order-one triplet ({d}, h, l).
    Triplet { d: u64, witnesses: Vec<u64> },
    /// Only d = 1 reached size h; the caller should hand the pairwise-prime
    /// set straight to the direct progression search instead.
    UnitScaleOnly { witnesses: Vec<u64> },
}

/// Searches d in [2, l] (then d = 1) for a greedy pairwise-prime set of size
/// h with d*B inside the window. Reports per-d achieved sizes when nothing
/// reaches h.
pub fn order_one_triveni(
    window: &SyndeticWindow,
    h: usize,
) -> Result<OrderOneOutcome, ConstructError> {
    if h == 0 {
        return Err(ConstructError::PreconditionViolated(
            "h must be >= 1".into(),
        ));
    }
    if window.l() < 2 {
        return Err(ConstructError::PreconditionViolated(format!(
            "window syndeticity bound l = {} leaves [2, l] empty",
            window.l()
        )));
    }
    let mut achieved: Vec<(u64, usize)> = Vec::new();
    for d in 2..=window.l() {
        let mut b = greedy_pairwise_prime_prefix(window, d, h);
        if b.len() >= h {
            b.truncate(h);
            return Ok(OrderOneOutcome::Triplet { d, witnesses: b });
        }
        achieved.push((d, b.len()));
    }
    let b1 = greedy_pairwise_prime_prefix(window, 1, h);
    if b1.len() >= h {
        return Ok(OrderOneOutcome::UnitScaleOnly { witnesses: b1 });
    }
    achieved.push((1, b1.len()));
    Err(ConstructError::NotFoundInWindow(format!(
        "no scale reached h = {h}; achieved sizes {achieved:?}"
    )))
}

/// How strongly the window supports the divisor-escape hypothesis that every
/// x misses at least two of its multiples: counts x <= limit with at least
/// two multiples in [1, N] outside the window. Only a partial, caveated
/// check is possible on a window.
pub fn divisor_escape_support(window: &SyndeticWindow, limit: u64) -> (u64, u64) {
    let n_up = window.upper();
    let mut supported = 0u64;
    let mut checked = 0u64;
    for x in 1..=limit.min(n_up) {
        checked += 1;
        let mut missing = 0;
        let mut m = x;
        while m <= n_up {
            if !window.contains(m) {
                missing += 1;
                if missing >= 2 {
                    break;
                }
            }
            m += x;
        }
        if missing >= 2 {
            supported += 1;
        }
    }
    (supported, checked)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{is_pairwise_coprime_u64, primes_upto};

    #[test]
    fn greedy_on_primes_collects_them_all() {
        let w = SyndeticWindow::from_raw_parts(primes_upto(100), 100, 1, "primes").unwrap();
        let b = greedy_maximal_pairwise_prime(&w, 1);
        assert_eq!(b, primes_upto(100));
        assert!(is_pairwise_coprime_u64(&b));
    }

    #[test]
    fn greedy_on_powers_of_two_stops_after_first() {
        let members = [4u64, 8, 16, 32, 64];
        let w = SyndeticWindow::from_raw_parts(members, 64, 1, "pow2").unwrap();
        let b = greedy_maximal_pairwise_prime(&w, 1);
        assert_eq!(b, vec![4]);
    }

    #[test]
    fn greedy_empty_window() {
        let w = SyndeticWindow::from_members(std::iter::empty(), 10, None, "empty").unwrap();
        assert!(greedy_maximal_pairwise_prime(&w, 1).is_empty());
    }

    #[test]
    fn greedy_is_maximal_in_window() {
        let members = (1..=500u64).filter(|x| x % 3 != 1);
        let w = SyndeticWindow::from_members(members, 500, None, "no-1-mod-3").unwrap();
        let b = greedy_maximal_pairwise_prime(&w, 2);
        assert!(is_pairwise_coprime_u64(&b));
        // No extension exists: every unchosen candidate either is not a
        // member, is in the excluded prefix, or collides.
        for x in 1..=250u64 {
            if b.contains(&x) {
                continue;
            }
            let rx = 2 * x;
            let appendable =
                rx <= 500 && rx > w.l() && w.contains(rx) && b.iter().all(|&y| gcd_u64(x, y) == 1);
            assert!(!appendable, "greedy missed appendable {x}");
        }
    }

    #[test]
    fn order_one_on_even_window() {
        let w = crate::synset::materialize(&crate::synset::SetRule::Evens, 10_000, None).unwrap();
        assert_eq!(w.l(), 2);
        match order_one_triveni(&w, 3).unwrap() {
            OrderOneOutcome::Triplet { d, witnesses } => {
                assert_eq!(d, 2);
                assert_eq!(witnesses.len(), 3);
                assert!(is_pairwise_coprime_u64(&witnesses));
                for &x in &witnesses {
                    assert!(w.contains(2 * x));
                }
            }
            other => panic!("expected triplet, got {other:?}"),
        }
    }

    #[test]
    fn order_one_on_claimed_full_window() {
        // A full window carrying a coarser claim l = 2 still seeds at d = 2.
        let w = SyndeticWindow::from_members(1..=100u64, 100, Some(2), "full").unwrap();
        match order_one_triveni(&w, 2).unwrap() {
            OrderOneOutcome::Triplet { d, witnesses } => {
                assert_eq!(d, 2);
                assert_eq!(witnesses, vec![2, 3]);
            }
            other => panic!("expected triplet, got {other:?}"),
        }
    }

    #[test]
    fn order_one_on_tiny_window_fails() {
        let w = SyndeticWindow::from_members([1u64], 1, Some(2), "one").unwrap();
        assert!(matches!(
            order_one_triveni(&w, 1),
            Err(ConstructError::NotFoundInWindow(_)) | Err(ConstructError::PreconditionViolated(_))
        ));
    }

    #[test]
    fn order_one_unit_scale_fallback() {
        // Squarefree-ish sparse window where only d=1 accumulates enough.
        let members = primes_upto(1000);
        let w = SyndeticWindow::from_members(members, 1000, Some(100), "primes").unwrap();
        match order_one_triveni(&w, 4) {
            Ok(OrderOneOutcome::UnitScaleOnly { witnesses }) => {
                assert_eq!(witnesses.len(), 4);
            }
            Ok(OrderOneOutcome::Triplet { .. }) => {}
            Err(e) => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn divisor_escape_support_full_window_is_zero() {
        let w = SyndeticWindow::from_members(1..=100u64, 100, None, "full").unwrap();
        let (supported, checked) = divisor_escape_support(&w, 50);
        assert_eq!(supported, 0);
        assert_eq!(checked, 50);
    }
}
