//! Simultaneous offset alignment.
//!
//! Given triples (a_i, x_i, u_i) with pairwise-coprime x_i and u_i in T(l),
//! find z, remainders r_i in [0, C(l)] and multipliers t_i >= 1 with
//! z + r_i = a_i + t_i * x_i * u_i for every i. Writing u = lcm(u_i) and
//! a_i = b_i u + r_i, a CRT solution b = b_i (mod x_i), lifted until every
//! (b - b_i)/x_i is positive, gives z = b u and t_i = v_i u / u_i exactly.

use super::ConstructError;
use crate::arith::{crt_solve, is_pairwise_coprime, CongruenceSystem};
use crate::lattice::TlLattice;
use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlignmentSolution {
    pub z: BigUint,
    /// r_i in [0, C(l)].
    pub remainders: Vec<BigUint>,
    /// t_i >= 1, one per input triple.
    pub multipliers: Vec<BigUint>,
}

impl AlignmentSolution {
    /// Exact re-substitution of z + r_i = a_i + t_i x_i u_i.
    pub fn satisfies(&self, triples: &[(BigUint, BigUint, u64)]) -> bool {
        triples.len() == self.remainders.len()
            && triples.len() == self.multipliers.len()
            && triples
                .iter()
                .zip(self.remainders.iter().zip(&self.multipliers))
                .all(|((a, x, u), (r, t))| &self.z + r == a + t * x * BigUint::from(*u))
    }
}

/// Solves the alignment for triples (a_i, x_i, u_i). Errors when the x_i are
/// not pairwise coprime or some u_i lies outside T(l).
pub fn align_offsets(
    l: u64,
    triples: &[(BigUint, BigUint, u64)],
) -> Result<AlignmentSolution, ConstructError> {
    if triples.is_empty() {
        return Err(ConstructError::PreconditionViolated(
            "at least one triple required".into(),
        ));
    }
    let lattice = TlLattice::cached(l)?;
    for (_, x, u) in triples {
        if x.is_zero() {
            return Err(ConstructError::PreconditionViolated(
                "x_i must be >= 1".into(),
            ));
        }
        if !lattice.contains(*u) {
            return Err(ConstructError::Lattice(
                crate::lattice::LatticeError::ElementNotInLattice(*u, l),
            ));
        }
    }
    let xs: Vec<BigUint> = triples.iter().map(|(_, x, _)| x.clone()).collect();
    if !is_pairwise_coprime(&xs) {
        return Err(ConstructError::NonCoprimeX(format!("{xs:?}")));
    }

    let u_all = triples.iter().fold(1u64, |acc, (_, _, u)| acc.lcm(u));
    debug_assert!(lattice.contains(u_all));
    let u_big = BigUint::from(u_all);

    let mut quotients = Vec::with_capacity(triples.len());
    let mut remainders = Vec::with_capacity(triples.len());
    for (a, _, _) in triples {
        let (b_i, r_i) = a.div_rem(&u_big);
        quotients.push(b_i);
        remainders.push(r_i);
    }

    // b = b_i (mod x_i); moduli of 1 are vacuous.
    let pairs: Vec<(BigUint, BigUint)> = quotients
        .iter()
        .zip(&xs)
        .filter(|(_, x)| **x > BigUint::one())
        .map(|(b, x)| (b % x, x.clone()))
        .collect();
    let system = CongruenceSystem::new(pairs)?;
    let solution = crt_solve(&system).map_err(|e| ConstructError::NonCoprimeX(e.to_string()))?;

    // Lift until every v_i = (b - b_i)/x_i is at least 1.
    let need = quotients
        .iter()
        .zip(&xs)
        .map(|(b, x)| b + x)
        .max()
        .expect("nonempty");
    let b = if solution.base >= need {
        solution.base.clone()
    } else {
        let deficit = &need - &solution.base;
        let steps = (&deficit + &solution.modulus - BigUint::one()) / &solution.modulus;
        &solution.base + steps * &solution.modulus
    };

    let mut multipliers = Vec::with_capacity(triples.len());
    for ((b_i, x_i), (_, _, u_i)) in quotients.iter().zip(&xs).zip(triples) {
        let diff = &b - b_i;
        debug_assert!((&diff % x_i).is_zero());
        let v_i = diff / x_i;
        let t_i = v_i * (u_all / u_i);
        multipliers.push(t_i);
    }
    let out = AlignmentSolution {
        z: &b * &u_big,
        remainders,
        multipliers,
    };
    if !out.satisfies(triples) {
        return Err(ConstructError::Internal(
            "alignment failed exact re-substitution".into(),
        ));
    }
    if out.remainders.iter().any(|r| r > lattice.c_bound()) {
        return Err(ConstructError::Internal(
            "alignment remainder escaped [0, C(l)]".into(),
        ));
    }
    Ok(out)
}
