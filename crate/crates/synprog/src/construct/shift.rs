//! CRT shift certificates.
//!
//! For pairwise-coprime moduli m_1..m_h and offsets t_1..t_h, the congruence
//! system x + t_i = m_i (mod m_i^2) has a solution u_0, and every
//! u_t = u_0 + t * prod(m_i^2) satisfies (u_t + t_i)/m_i = 1 (mod m_i). The
//! certificate packages u_0 and the stride so any position can be re-checked
//! by plain substitution.

use super::ConstructError;
use crate::arith::{crt_solve, is_pairwise_coprime, CongruenceSystem};
use num_bigint::BigUint;
use num_traits::Zero;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftCertificate {
    /// Least positive solution of the offset congruences.
    pub u0: BigUint,
    /// prod(m_i^2); consecutive aligned positions differ by this.
    pub stride: BigUint,
    pub moduli: Vec<BigUint>,
    pub offsets: Vec<BigUint>,
}

impl ShiftCertificate {
    /// u_t = u_0 + t * stride.
    pub fn position(&self, t: &BigUint) -> BigUint {
        &self.u0 + t * &self.stride
    }

    /// Checks (u_t + t_i) = m_i (mod m_i^2) for every i at one t.
    pub fn check_at(&self, t: &BigUint) -> bool {
        let u_t = self.position(t);
        self.moduli.iter().zip(&self.offsets).all(|(m, off)| {
            let m2 = m * m;
            (&u_t + off) % &m2 == m % &m2
        })
    }

    /// Checks a range of t values.
    pub fn verify_range(&self, t_from: u64, t_to: u64) -> bool {
        (t_from..=t_to).all(|t| self.check_at(&BigUint::from(t)))
    }
}

/// Builds and re-verifies the shift certificate for the given moduli
/// (pairwise coprime, each >= 2) and offsets.
pub fn crt_shift(
    moduli: &[BigUint],
    offsets: &[BigUint],
) -> Result<ShiftCertificate, ConstructError> {
    if moduli.len() != offsets.len() {
        return Err(ConstructError::PreconditionViolated(format!(
            "{} moduli vs {} offsets",
            moduli.len(),
            offsets.len()
        )));
    }
    if moduli.is_empty() {
        return Err(ConstructError::PreconditionViolated(
            "at least one modulus required".into(),
        ));
    }
    let two = BigUint::from(2u32);
    for m in moduli {
        if *m < two {
            return Err(ConstructError::PreconditionViolated(format!(
                "modulus {m} below 2"
            )));
        }
    }
    if !is_pairwise_coprime(moduli) {
        return Err(ConstructError::NonCoprimeModuli(format!(
            "moduli {moduli:?}"
        )));
    }
    let mut pairs = Vec::with_capacity(moduli.len());
    for (m, off) in moduli.iter().zip(offsets) {
        let m2 = m * m;
        // residue m - t_i, normalized into [0, m^2).
        let residue = (m + (&m2 - (off % &m2))) % &m2;
        pairs.push((residue, m2));
    }
    let system = CongruenceSystem::new(pairs)?;
    let solution = crt_solve(&system)?;
    let stride = solution.modulus;
    let u0 = if solution.base.is_zero() {
        stride.clone()
    } else {
        solution.base
    };
    let cert = ShiftCertificate {
        u0,
        stride,
        moduli: moduli.to_vec(),
        offsets: offsets.to_vec(),
    };
    if !cert.verify_range(0, 2) {
        return Err(ConstructError::Internal(
            "shift certificate failed re-substitution".into(),
        ));
    }
    Ok(cert)
}

/// Convenience over machine-word inputs.
pub fn crt_shift_u64(moduli: &[u64], offsets: &[u64]) -> Result<ShiftCertificate, ConstructError> {
    let m: Vec<BigUint> = moduli.iter().map(|&x| BigUint::from(x)).collect();
    let t: Vec<BigUint> = offsets.iter().map(|&x| BigUint::from(x)).collect();
    crt_shift(&m, &t)
}

impl ShiftCertificate {
    /// The quotients r_i = (u_t + t_i)/m_i, each congruent to 1 mod m_i.
    pub fn quotients_at(&self, t: &BigUint) -> Vec<BigUint> {
        let u_t = self.position(t);
        self.moduli
            .iter()
            .zip(&self.offsets)
            .map(|(m, off)| (&u_t + off) / m)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn shift_example_two_three() {
        let cert = crt_shift_u64(&[2, 3], &[0, 1]).unwrap();
        assert_eq!(cert.u0, big(2));
        assert_eq!(cert.stride, big(36));
        // (2+0)/2 = 1 = 1 mod 2; (2+1)/3 = 1 = 1 mod 3.
        let q = cert.quotients_at(&big(0));
        assert_eq!(q, vec![big(1), big(1)]);
    }

    #[test]
    fn shift_example_single() {
        let cert = crt_shift_u64(&[5], &[0]).unwrap();
        assert_eq!(cert.u0, big(5));
        assert_eq!(cert.stride, big(25));
    }

    #[test]
    fn shift_example_t1() {
        let cert = crt_shift_u64(&[2, 3], &[0, 1]).unwrap();
        let u1 = cert.position(&big(1));
        assert_eq!(u1, big(38));
        let q = cert.quotients_at(&big(1));
        assert_eq!(q, vec![big(19), big(13)]);
        assert_eq!(&q[0] % big(2), big(1));
        assert_eq!(&q[1] % big(3), big(1));
    }

    #[test]
    fn shift_rejects_non_coprime() {
        assert!(matches!(
            crt_shift_u64(&[4, 6], &[0, 0]),
            Err(ConstructError::NonCoprimeModuli(_))
        ));
    }

    #[test]
    fn shift_oversized_offset_normalizes() {
        // offset t_i = m_i: solution becomes 0 mod m^2, so least positive is
        // the stride itself.
        let cert = crt_shift_u64(&[2], &[2]).unwrap();
        assert_eq!(cert.u0, big(4));
        assert!(cert.verify_range(0, 5));
    }

    #[test]
    fn shift_certificate_holds_for_many_t() {
        let cert = crt_shift_u64(&[3, 4, 5], &[1, 2, 3]).unwrap();
        assert!(cert.verify_range(0, 25));
    }
}
