//! Arbitrary-precision integer primitives: gcd/lcm, factorization, prime
//! enumeration, pairwise-coprimality checks and a certified CRT solver.
//!
//! Everything downstream (divisor lattices, shift certificates, family
//! constructions) is built on these operations. All values are big
//! integers: the family constructions routinely produce numbers with
//! thousands of digits, so fixed-width arithmetic is not part of any
//! contract here.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use std::sync::OnceLock;
use thiserror::Error;

/// Trial-division bound used by [`factorize`] before falling back to
/// Pollard's rho.
pub const TRIAL_DIVISION_BOUND: u64 = 1_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ArithError {
    #[error("moduli are not pairwise coprime: gcd({a}, {b}) = {g}")]
    NonCoprimeModuli { a: BigUint, b: BigUint, g: BigUint },
    #[error("modulus must be at least 2, got {0}")]
    ModulusTooSmall(BigUint),
    #[error("cannot factorize zero")]
    ZeroNotFactorable,
}

pub fn gcd(a: &BigUint, b: &BigUint) -> BigUint {
    a.gcd(b)
}

pub fn lcm(a: &BigUint, b: &BigUint) -> BigUint {
    a.lcm(b)
}

pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = b;
        b = a % b;
        a = t;
    }
    a
}

/// True iff every two elements at distinct positions have gcd 1.
/// A duplicated value greater than 1 therefore fails the check, and a
/// singleton or empty sequence passes vacuously.
pub fn is_pairwise_coprime(xs: &[BigUint]) -> bool {
    for (i, a) in xs.iter().enumerate() {
        for b in &xs[i + 1..] {
            if !gcd(a, b).is_one() {
                return false;
            }
        }
    }
    true
}

pub fn is_pairwise_coprime_u64(xs: &[u64]) -> bool {
    for (i, &a) in xs.iter().enumerate() {
        for &b in &xs[i + 1..] {
            if gcd_u64(a, b) != 1 {
                return false;
            }
        }
    }
    true
}

fn mulmod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod_u64(acc, base, m);
        }
        base = mulmod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for u64 (the base set below is known to be
/// exact for all n < 3.3 * 10^24).
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d & 1 == 0 {
        d >>= 1;
        s += 1;
    }
    'bases: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod_u64(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// Miller-Rabin on big integers. Deterministic below 3.3 * 10^24, a fixed
/// extended base set above (strong probable-prime check; the toolkit never
/// needs primality certificates).
pub fn is_probable_prime(n: &BigUint) -> bool {
    if let Ok(small) = u64::try_from(n) {
        return is_prime_u64(small);
    }
    let one = BigUint::one();
    let two = BigUint::from(2u32);
    if n.is_even() {
        return false;
    }
    let n_minus_1 = n - &one;
    let mut d = n_minus_1.clone();
    let mut s = 0u32;
    while d.is_even() {
        d >>= 1;
        s += 1;
    }
    const BASES: [u64; 20] = [
        2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71,
    ];
    'bases: for &a in &BASES {
        let a = BigUint::from(a);
        if &a >= n {
            continue;
        }
        let mut x = a.modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == n_minus_1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// All primes up to and including `n`, ascending (plain sieve; callers in
/// this crate stay far below memory limits).
pub fn primes_upto(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for p in 2..=n {
        if !composite[p] {
            primes.push(p as u64);
            let mut q = p * p;
            while q <= n {
                composite[q] = true;
                q += p;
            }
        }
    }
    primes
}

fn small_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| primes_upto(TRIAL_DIVISION_BOUND))
}

/// A positive integer together with its sorted prime-power decomposition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub value: BigUint,
    /// `(prime, exponent)` pairs with strictly increasing primes.
    pub factors: Vec<(BigUint, u32)>,
}

impl Factorization {
    /// Multiplies the factorization back together.
    pub fn recompose(&self) -> BigUint {
        let mut acc = BigUint::one();
        for (p, e) in &self.factors {
            acc *= p.pow(*e);
        }
        acc
    }

    /// The maximal prime powers dividing the value exactly, i.e. p^e with
    /// p^e | value and p^(e+1) not dividing value.
    pub fn maximal_prime_powers(&self) -> Vec<BigUint> {
        self.factors.iter().map(|(p, e)| p.pow(*e)).collect()
    }
}

/// Factors `n >= 1` by trial division up to [`TRIAL_DIVISION_BOUND`] and a
/// Pollard-rho (Brent variant) fallback for what remains. `n = 1` yields an
/// empty factor list. Machine-word inputs take a machine-word path.
pub fn factorize(n: &BigUint) -> Result<Factorization, ArithError> {
    if n.is_zero() {
        return Err(ArithError::ZeroNotFactorable);
    }
    let mut factors: Vec<(BigUint, u32)> = Vec::new();
    let mut rest = n.clone();
    if let Ok(mut small) = u64::try_from(n) {
        for &p in small_primes() {
            if p.saturating_mul(p) > small {
                break;
            }
            if small % p == 0 {
                let mut e = 0u32;
                while small % p == 0 {
                    small /= p;
                    e += 1;
                }
                factors.push((BigUint::from(p), e));
            }
        }
        if small > 1 && is_prime_u64(small) {
            factors.push((BigUint::from(small), 1));
            small = 1;
        }
        rest = BigUint::from(small);
    } else {
        for &p in small_primes() {
            if rest.is_one() {
                break;
            }
            let pb = BigUint::from(p);
            if &pb * &pb > rest {
                break;
            }
            let mut e = 0u32;
            while (&rest % &pb).is_zero() {
                rest /= &pb;
                e += 1;
            }
            if e > 0 {
                factors.push((pb, e));
            }
        }
    }
    if !rest.is_one() {
        let mut stack = vec![rest];
        while let Some(m) = stack.pop() {
            if is_probable_prime(&m) {
                match factors.iter_mut().find(|(p, _)| *p == m) {
                    Some((_, e)) => *e += 1,
                    None => factors.push((m, 1)),
                }
            } else {
                let d = pollard_rho(&m);
                stack.push(&m / &d);
                stack.push(d);
            }
        }
    }
    factors.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(Factorization {
        value: n.clone(),
        factors,
    })
}

/// Pollard rho with Brent cycle detection and gcd batching. Expects a
/// composite with no factor below the trial-division bound; always returns
/// a proper divisor.
fn pollard_rho(n: &BigUint) -> BigUint {
    if n.is_even() {
        return BigUint::from(2u32);
    }
    let mut c = 1u64;
    loop {
        let cc = BigUint::from(c);
        let step = |x: &BigUint| (x * x + &cc) % n;
        let batch = 128u64;
        let mut y = BigUint::from(2u32);
        let mut g = BigUint::one();
        let mut q = BigUint::one();
        let mut r = 1u64;
        let mut x = y.clone();
        let mut ys = y.clone();
        while g.is_one() && r <= 1 << 30 {
            x = y.clone();
            for _ in 0..r {
                y = step(&y);
            }
            let mut k = 0u64;
            while k < r && g.is_one() {
                ys = y.clone();
                for _ in 0..batch.min(r - k) {
                    y = step(&y);
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = (q * diff) % n;
                }
                g = q.gcd(n);
                k += batch;
            }
            r *= 2;
        }
        if &g == n {
            // The batch jumped past the factor; rewind one step at a time.
            loop {
                ys = step(&ys);
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                g = diff.gcd(n);
                if !g.is_one() {
                    break;
                }
            }
        }
        if !g.is_one() && &g != n {
            return g;
        }
        c += 1;
    }
}

/// Least prime strictly above `n` (deterministic for u64).
pub fn next_prime_above(mut n: u64) -> u64 {
    loop {
        n += 1;
        if is_prime_u64(n) {
            return n;
        }
    }
}

/// Distinct prime divisors of a machine-word value, ascending.
pub fn prime_support_u64(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// A system of simultaneous congruences `x = residue_i (mod modulus_i)`.
/// Residues are normalized into `[0, modulus_i)` on construction, since
/// callers routinely supply representatives at or above the modulus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CongruenceSystem {
    congruences: Vec<(BigUint, BigUint)>,
}

impl CongruenceSystem {
    /// Builds a system from `(residue, modulus)` pairs; every modulus must
    /// be at least 2.
    pub fn new(pairs: Vec<(BigUint, BigUint)>) -> Result<Self, ArithError> {
        let two = BigUint::from(2u32);
        let mut congruences = Vec::with_capacity(pairs.len());
        for (r, m) in pairs {
            if m < two {
                return Err(ArithError::ModulusTooSmall(m));
            }
            let r = r % &m;
            congruences.push((r, m));
        }
        Ok(Self { congruences })
    }

    pub fn congruences(&self) -> &[(BigUint, BigUint)] {
        &self.congruences
    }

    pub fn is_empty(&self) -> bool {
        self.congruences.is_empty()
    }

    fn check_pairwise_coprime(&self) -> Result<(), ArithError> {
        for (i, (_, a)) in self.congruences.iter().enumerate() {
            for (_, b) in &self.congruences[i + 1..] {
                let g = gcd(a, b);
                if !g.is_one() {
                    return Err(ArithError::NonCoprimeModuli {
                        a: a.clone(),
                        b: b.clone(),
                        g,
                    });
                }
            }
        }
        Ok(())
    }
}

/// The unique solution of a solvable congruence system: `base` in
/// `[0, modulus)` with `modulus` the product of the system moduli.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrtSolution {
    pub base: BigUint,
    pub modulus: BigUint,
}

impl CrtSolution {
    /// Re-substitution check against the originating system.
    pub fn satisfies(&self, system: &CongruenceSystem) -> bool {
        system
            .congruences()
            .iter()
            .all(|(r, m)| &self.base % m == *r)
    }
}

/// Solves a pairwise-coprime congruence system by iterated two-term CRT.
/// The empty system yields `(0 mod 1)`.
pub fn crt_solve(system: &CongruenceSystem) -> Result<CrtSolution, ArithError> {
    system.check_pairwise_coprime()?;
    let mut base = BigUint::zero();
    let mut modulus = BigUint::one();
    for (r, m) in system.congruences() {
        // x = base (mod modulus), x = r (mod m); gcd(modulus, m) = 1.
        let inv = modular_inverse(&modulus, m).expect("coprimality checked above");
        let base_mod_m = &base % m;
        let delta = if *r >= base_mod_m {
            r - &base_mod_m
        } else {
            m - &base_mod_m + r
        };
        let t = (delta * inv) % m;
        base += &modulus * t;
        modulus *= m;
    }
    let solution = CrtSolution { base, modulus };
    debug_assert!(solution.satisfies(system));
    Ok(solution)
}

/// Inverse of `a` modulo `m`, when it exists.
pub fn modular_inverse(a: &BigUint, m: &BigUint) -> Option<BigUint> {
    let a = BigInt::from(a.clone());
    let m_int = BigInt::from(m.clone());
    let e = a.extended_gcd(&m_int);
    if !e.gcd.is_one() {
        return None;
    }
    let mut x = e.x % &m_int;
    if x < BigInt::zero() {
        x += &m_int;
    }
    Some(x.to_biguint().expect("normalized to non-negative"))
}
