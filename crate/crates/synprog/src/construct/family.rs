//! Families with gcds confined to T(l), and their embedding into a
//! prescribed interval.
//!
//! The family is built inductively: x_1 = 1 and each next anchor is one more
//! than the product of all members so far, which forces every prime power
//! q^(r(q,l)+1) out of the cross gcds. The embedding shifts such a family by
//! the unique multiple of L = prod q^(r(q,l)+1) (q prime up to the family
//! bound) inside (n, n+L], landing it in [n, n + L + c(h)].

use super::ConstructError;
use crate::arith::{gcd, primes_upto};
use crate::lattice::{r_exponent, TlLattice};
use num_bigint::BigUint;
use num_traits::One;

/// Anchor growth is doubly exponential; eight steps is already thousands of
/// digits.
pub const MAX_FAMILY_H: u64 = 8;

/// Decimal-digit ceiling for the embedding modulus L.
pub const EMBED_DIGIT_GUARD: u64 = 100_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GcdControlledFamily {
    pub l: u64,
    /// Strictly increasing interval anchors x_1..x_h, x_1 = 1.
    pub anchors: Vec<BigUint>,
    /// c(h): every member is at most this.
    pub bound: BigUint,
    /// The union of the intervals [x_i, x_i + 2l], ascending.
    pub members: Vec<BigUint>,
}

impl GcdControlledFamily {
    /// Exhaustive invariant check: members bounded by c(h), anchors
    /// ascending from 1, every cross gcd inside T(l).
    pub fn verify(&self, lattice: &TlLattice) -> bool {
        if self.anchors.first() != Some(&BigUint::one()) {
            return false;
        }
        if self.anchors.windows(2).any(|w| w[0] >= w[1]) {
            return false;
        }
        if self.members.iter().any(|m| m > &self.bound) {
            return false;
        }
        for (i, a) in self.members.iter().enumerate() {
            for b in &self.members[i + 1..] {
                if !lattice.contains_big(&gcd(a, b)) {
                    return false;
                }
            }
        }
        true
    }
}

/// Builds the h-step family for T(l). Each step takes m = prod of current
/// members and appends the interval [m+1, m+1+2l]; m+1 is 1 mod every
/// maximal prime power dividing m (their product is m itself), which is
/// exactly what keeps the new gcds inside T(l).
pub fn gcd_controlled_family(l: u64, h: u64) -> Result<GcdControlledFamily, ConstructError> {
    if l == 0 || h == 0 {
        return Err(ConstructError::PreconditionViolated(
            "need l >= 1 and h >= 1".into(),
        ));
    }
    if h > MAX_FAMILY_H {
        return Err(ConstructError::GrowthGuardExceeded(format!(
            "family step h = {h} exceeds guard {MAX_FAMILY_H}"
        )));
    }
    let lattice = TlLattice::cached(l)?;
    let width = 2 * l;
    let mut anchors = vec![BigUint::one()];
    let mut members: Vec<BigUint> = (1..=width + 1).map(BigUint::from).collect();
    let mut bound = BigUint::from(2 * l + 1);
    for _ in 2..=h {
        let m: BigUint = members.iter().product();
        let next = m + BigUint::one();
        let top = &next + BigUint::from(width);
        if top > bound {
            bound = top.clone();
        }
        for j in 0..=width {
            members.push(&next + BigUint::from(j));
        }
        anchors.push(next);
    }
    let family = GcdControlledFamily {
        l,
        anchors,
        bound,
        members,
    };
    debug_assert!(family.verify(&lattice));
    Ok(family)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmbeddedFamily {
    pub l: u64,
    pub h: u64,
    /// Requested interval start n; the family lands in [n, n + capacity].
    pub start: BigUint,
    /// The multiple of L chosen in (n, n+L].
    pub base: BigUint,
    /// L = prod over primes q <= c(h) of q^(r(q,l)+1).
    pub l_product: BigUint,
    /// m(h, l) = L + c(h).
    pub capacity: BigUint,
    /// Shifted anchors base + y_i.
    pub anchors: Vec<BigUint>,
    /// Shifted members; gcd structure is inherited from the family.
    pub members: Vec<BigUint>,
}

impl EmbeddedFamily {
    pub fn verify(&self, lattice: &TlLattice) -> bool {
        let end = &self.start + &self.capacity;
        if self.members.iter().any(|v| v < &self.start || v > &end) {
            return false;
        }
        let width = BigUint::from(2 * self.l);
        for (idx, a) in self.anchors.iter().enumerate() {
            let lo = idx * (2 * self.l as usize + 1);
            let hi = lo + 2 * self.l as usize;
            if self.members[lo] != *a || self.members[hi] != a + &width {
                return false;
            }
        }
        for (i, a) in self.members.iter().enumerate() {
            for b in &self.members[i + 1..] {
                let g = gcd(a, b);
                if !lattice.contains_big(&g) {
                    return false;
                }
            }
        }
        true
    }
}

/// L and m(h, l) for the embedding, guarded on the digit count of L.
pub fn embed_capacity(l: u64, h: u64) -> Result<(BigUint, BigUint, BigUint), ConstructError> {
    let family = gcd_controlled_family(l, h)?;
    let c = family.bound.clone();
    let c_small = u64::try_from(&c).map_err(|_| {
        ConstructError::GrowthGuardExceeded(format!(
            "family bound c({h}) has {} digits; prime enumeration infeasible",
            c.to_string().len()
        ))
    })?;
    // theta(c) ~ c, so L has about c / ln(10) digits.
    let digit_estimate = (c_small as f64 / std::f64::consts::LN_10) as u64 + 1;
    if digit_estimate > EMBED_DIGIT_GUARD {
        return Err(ConstructError::GrowthGuardExceeded(format!(
            "embedding modulus L would have ~{digit_estimate} digits (c({h}) = {c_small})"
        )));
    }
    let mut l_product = BigUint::one();
    for q in primes_upto(c_small) {
        let r = r_exponent(q, l).expect("sieve yields primes");
        l_product *= BigUint::from(q).pow(r + 1);
    }
    let capacity = &l_product + &c;
    Ok((l_product, c, capacity))
}

/// Embeds the h-step family into [n, n + m(h,l)]: base is the unique
/// multiple of L in (n, n+L], members are base + family members. Properties
/// are re-verified over the members only, never by scanning the interval.
pub fn embed_family(l: u64, h: u64, n: &BigUint) -> Result<EmbeddedFamily, ConstructError> {
    let family = gcd_controlled_family(l, h)?;
    let (l_product, _c, capacity) = embed_capacity(l, h)?;
    let lattice = TlLattice::cached(l)?;
    let base = &l_product * (n / &l_product + BigUint::one());
    let members: Vec<BigUint> = family.members.iter().map(|u| &base + u).collect();
    let anchors: Vec<BigUint> = family.anchors.iter().map(|y| &base + y).collect();
    let embedded = EmbeddedFamily {
        l,
        h,
        start: n.clone(),
        base,
        l_product,
        capacity,
        anchors,
        members,
    };
    if !embedded.verify(&lattice) {
        return Err(ConstructError::Internal(
            "embedded family failed verification".into(),
        ));
    }
    Ok(embedded)
}
