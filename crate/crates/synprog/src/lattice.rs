//! The finite divisor lattice T(l) and its derived quantities.
//!
//! For a prime p and l >= 1, r(p, l) is the largest t with p^t <= 2l+1.
//! T(l) collects every product of p^e over primes p <= 2l+1 with
//! 0 <= e <= r(p, l); these are exactly the values the gcd of two distinct
//! integers from an interval of 2l+1 consecutive integers can take. C(l) =
//! (2l+1)^(2l+1) dominates every element and D(l) = |T(l)|.

use crate::arith::is_prime_u64;
use num_bigint::BigUint;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};
use thiserror::Error;

/// Elements of T(l) stay below 2^63 for every l the guard admits, so the
/// lattice itself is stored in machine words.
pub const MAX_LATTICE_L: u64 = 20;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LatticeError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("l must be at least 1")]
    ZeroL,
    #[error("lattice guard exceeded: l = {0} > {MAX_LATTICE_L}")]
    LatticeTooLarge(u64),
    #[error("{0} is not an element of T({1})")]
    ElementNotInLattice(u64, u64),
}

/// Largest exponent t with p^t <= 2l+1.
pub fn r_exponent(p: u64, l: u64) -> Result<u32, LatticeError> {
    if l == 0 {
        return Err(LatticeError::ZeroL);
    }
    if !is_prime_u64(p) {
        return Err(LatticeError::NotPrime(p));
    }
    let bound = 2 * l + 1;
    let mut power = 1u64;
    let mut t = 0u32;
    while power <= bound / p {
        power *= p;
        t += 1;
    }
    Ok(t)
}

/// The materialized lattice: exponent table, sorted element list and the
/// C(l) bound. Values are immutable after construction and safe to share.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TlLattice {
    l: u64,
    exponents: Vec<(u64, u32)>,
    elements: Vec<u64>,
    c_bound: BigUint,
}

impl TlLattice {
    pub fn build(l: u64) -> Result<Self, LatticeError> {
        Self::build_with_limit(l, MAX_LATTICE_L)
    }

    /// Builds with a caller-chosen enumeration guard instead of the default
    /// (the guard is an artifact bound, not a mathematical one; machine-word
    /// overflow of an element still rejects the build).
    pub fn build_with_limit(l: u64, limit: u64) -> Result<Self, LatticeError> {
        if l == 0 {
            return Err(LatticeError::ZeroL);
        }
        if l > limit {
            return Err(LatticeError::LatticeTooLarge(l));
        }
        let bound = 2 * l + 1;
        let mut exponents = Vec::new();
        for p in 2..=bound {
            if is_prime_u64(p) {
                exponents.push((p, r_exponent(p, l)?));
            }
        }
        let mut elements = vec![1u64];
        for &(p, r) in &exponents {
            let mut next = Vec::with_capacity(elements.len() * (r as usize + 1));
            for &e in &elements {
                let mut v = e;
                next.push(v);
                for _ in 0..r {
                    v = v.checked_mul(p).ok_or(LatticeError::LatticeTooLarge(l))?;
                    next.push(v);
                }
            }
            elements = next;
        }
        elements.sort_unstable();
        let c_bound = BigUint::from(bound).pow(bound as u32);
        Ok(Self {
            l,
            exponents,
            elements,
            c_bound,
        })
    }

    /// Shared per-l instance; queries dominate, so lattices are built once
    /// and cached for concurrent read-only use.
    pub fn cached(l: u64) -> Result<Arc<Self>, LatticeError> {
        static CACHE: OnceLock<Mutex<HashMap<u64, Arc<TlLattice>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("lattice cache poisoned");
        if let Some(hit) = guard.get(&l) {
            return Ok(Arc::clone(hit));
        }
        let built = Arc::new(Self::build(l)?);
        guard.insert(l, Arc::clone(&built));
        Ok(built)
    }

    pub fn l(&self) -> u64 {
        self.l
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    /// D(l) = |T(l)|.
    pub fn d(&self) -> usize {
        self.elements.len()
    }

    /// C(l) = (2l+1)^(2l+1).
    pub fn c_bound(&self) -> &BigUint {
        &self.c_bound
    }

    /// The r(p, l) table over primes p <= 2l+1.
    pub fn exponent_table(&self) -> &[(u64, u32)] {
        &self.exponents
    }

    pub fn contains(&self, v: u64) -> bool {
        self.elements.binary_search(&v).is_ok()
    }

    pub fn contains_big(&self, v: &BigUint) -> bool {
        u64::try_from(v).map(|v| self.contains(v)).unwrap_or(false)
    }

    /// Mul(F): the lattice elements divisible by some member of F.
    /// Every member of F must itself belong to the lattice.
    pub fn mul_closure(&self, f: &[u64]) -> Result<Vec<u64>, LatticeError> {
        for &u in f {
            if !self.contains(u) {
                return Err(LatticeError::ElementNotInLattice(u, self.l));
            }
        }
        Ok(self
            .elements
            .iter()
            .copied()
            .filter(|&v| f.iter().any(|&u| v % u == 0))
            .collect())
    }

    /// T(l) minus Mul(F), ascending.
    pub fn outside_mul_closure(&self, f: &[u64]) -> Result<Vec<u64>, LatticeError> {
        let mul = self.mul_closure(f)?;
        Ok(self
            .elements
            .iter()
            .copied()
            .filter(|v| mul.binary_search(v).is_err())
            .collect())
    }

    /// Largest member of `allowed` dividing `x`, if any. `allowed` must be
    /// ascending (as produced by the closure queries).
    pub fn max_divisor_among(x: &BigUint, allowed: &[u64]) -> Option<u64> {
        use num_traits::Zero;
        allowed
            .iter()
            .rev()
            .copied()
            .find(|&u| (x % BigUint::from(u)).is_zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::gcd_u64;

    #[test]
    fn r_exponent_examples() {
        assert_eq!(r_exponent(2, 1).unwrap(), 1);
        assert_eq!(r_exponent(5, 1).unwrap(), 0);
        assert_eq!(r_exponent(2, 3).unwrap(), 2);
        assert_eq!(r_exponent(4, 1), Err(LatticeError::NotPrime(4)));
    }

    #[test]
    fn lattice_l1() {
        let t = TlLattice::build(1).unwrap();
        assert_eq!(t.elements(), &[1, 2, 3, 6]);
        assert_eq!(t.d(), 4);
        assert_eq!(t.c_bound(), &BigUint::from(27u32));
        assert!(!t.contains(4));
    }

    #[test]
    fn lattice_l2() {
        let t = TlLattice::build(2).unwrap();
        assert_eq!(t.d(), 12);
        for v in [1u64, 2, 4, 3, 5, 60] {
            assert!(t.contains(v), "{v} missing from T(2)");
        }
        assert_eq!(t.c_bound(), &BigUint::from(3125u32));
        assert_eq!(t.exponent_table(), &[(2, 2), (3, 1), (5, 1)]);
    }

    #[test]
    fn lattice_guard() {
        assert_eq!(
            TlLattice::build(MAX_LATTICE_L + 1),
            Err(LatticeError::LatticeTooLarge(MAX_LATTICE_L + 1))
        );
        assert_eq!(TlLattice::build(0), Err(LatticeError::ZeroL));
    }

    #[test]
    fn elements_dominated_by_c_and_counted_by_d() {
        for l in 1..=4u64 {
            let t = TlLattice::build(l).unwrap();
            let expected_d: usize = t
                .exponent_table()
                .iter()
                .map(|&(_, r)| r as usize + 1)
                .product();
            assert_eq!(t.d(), expected_d);
            for &v in t.elements() {
                assert!(&BigUint::from(v) < t.c_bound(), "{v} >= C({l})");
            }
            assert!(t.contains(1));
        }
    }

    #[test]
    fn closure_under_gcd_and_lcm() {
        for l in 1..=4u64 {
            let t = TlLattice::build(l).unwrap();
            for &a in t.elements() {
                for &b in t.elements() {
                    let g = gcd_u64(a, b);
                    assert!(t.contains(g), "gcd({a},{b})={g} escapes T({l})");
                    let m = a / g * b;
                    assert!(t.contains(m), "lcm({a},{b})={m} escapes T({l})");
                }
            }
        }
    }

    #[test]
    fn mul_closure_examples() {
        let t = TlLattice::build(1).unwrap();
        assert_eq!(t.mul_closure(&[]).unwrap(), Vec::<u64>::new());
        assert_eq!(t.mul_closure(&[2]).unwrap(), vec![2, 6]);
        assert_eq!(t.mul_closure(&[6]).unwrap(), vec![6]);
        assert_eq!(
            t.mul_closure(&[4]),
            Err(LatticeError::ElementNotInLattice(4, 1))
        );
    }

    #[test]
    fn mul_closure_distributes_over_union() {
        let t = TlLattice::build(3).unwrap();
        let elems = t.elements().to_vec();
        // A few subset pairs; exhaustive subsets would be 2^32 cases.
        let subsets: Vec<Vec<u64>> = vec![
            vec![],
            vec![elems[1]],
            vec![elems[2], elems[4]],
            vec![elems[3], elems[5], elems[7]],
        ];
        for f1 in &subsets {
            for f2 in &subsets {
                let mut union: Vec<u64> = f1.iter().chain(f2.iter()).copied().collect();
                union.sort_unstable();
                union.dedup();
                let lhs = t.mul_closure(&union).unwrap();
                let mut rhs: Vec<u64> = t
                    .mul_closure(f1)
                    .unwrap()
                    .into_iter()
                    .chain(t.mul_closure(f2).unwrap())
                    .collect();
                rhs.sort_unstable();
                rhs.dedup();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn interval_gcds_land_in_lattice() {
        // gcd of two distinct integers from any window of 2l+1 consecutive
        // integers belongs to T(l); brute force over n <= 10^4, l <= 3.
        for l in 1..=3u64 {
            let t = TlLattice::build(l).unwrap();
            let width = 2 * l + 1;
            for n in 1u64..=10_000 {
                for i in 0..width {
                    for j in (i + 1)..width {
                        let g = gcd_u64(n + i, n + j);
                        assert!(
                            t.contains(g),
                            "gcd({}, {}) = {g} outside T({l})",
                            n + i,
                            n + j
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn mul_closure_monotone() {
        let t = TlLattice::build(2).unwrap();
        let small = t.mul_closure(&[6]).unwrap();
        let large = t.mul_closure(&[2, 6]).unwrap();
        for v in &small {
            assert!(large.contains(v));
        }
    }

    #[test]
    fn cache_is_shared_across_threads() {
        let handles: Vec<_> = (0..8)
            .map(|_| std::thread::spawn(|| TlLattice::cached(3).unwrap()))
            .collect();
        let instances: Vec<_> = handles.into_iter().map(|h| h.join().unwrap()).collect();
        for pair in instances.windows(2) {
            assert!(std::sync::Arc::ptr_eq(&pair[0], &pair[1]));
        }
    }

    #[test]
    fn max_divisor_among_picks_largest() {
        let t = TlLattice::build(1).unwrap();
        let allowed = t.outside_mul_closure(&[2]).unwrap();
        assert_eq!(allowed, vec![1, 3]);
        assert_eq!(
            TlLattice::max_divisor_among(&BigUint::from(75u32), &allowed),
            Some(3)
        );
        assert_eq!(
            TlLattice::max_divisor_among(&BigUint::from(7u32), &allowed),
            Some(1)
        );
    }
}
