//! The gap-or-progression dichotomy.
//!
//! Given a pairwise-prime B with u*B inside the window and a matching
//! pairwise-prime H coprime to B, the moduli m_i = b_i * f(b_i)^k admit a
//! shift certificate z'. Probing the scaled intervals u*[z_t, z_t + |B| - 1]
//! either hits a member — which unwinds to a witness {u*b_j, u*b_j *
//! f(b_j)^k * r} with r = 1 (mod f(b_j)) — or certifies every probed
//! interval empty.

use super::shift::crt_shift;
use super::stream::PairwisePrimeStream;
use super::ConstructError;
use crate::arith::is_pairwise_coprime_u64;
use crate::gp::{check_witness, GpWitness};
use crate::synset::SyndeticWindow;
use num_bigint::BigUint;
use num_traits::Zero;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapCertificate {
    /// Base z' of the probed positions z_t = z' + t * stride.
    pub z_prime: BigUint,
    /// (prod b^2)(prod f^2k) for b in B, f in H.
    pub stride: BigUint,
    /// The scale u applied to every probe.
    pub scale: u64,
    /// Probe interval length |B|.
    pub interval_len: usize,
    /// t values whose interval fit in the window and were verified empty.
    pub probed: Vec<u64>,
    /// First t whose interval no longer fit, if any.
    pub first_unfit: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GapOrGp {
    Witness(GpWitness),
    Gap(GapCertificate),
}

/// Runs the dichotomy for one (B, u, H, k). Probes t in [1, t_max] in
/// ascending order, and within each interval the least j, so the returned
/// witness is the deterministic first hit.
pub fn gap_or_gp(
    window: &SyndeticWindow,
    b: &[u64],
    u: u64,
    h_set: &[u64],
    k: u32,
    t_max: u64,
) -> Result<GapOrGp, ConstructError> {
    if b.is_empty() || u == 0 || k == 0 {
        return Err(ConstructError::PreconditionViolated(
            "need nonempty B, u >= 1, k >= 1".into(),
        ));
    }
    if h_set.len() != b.len() {
        return Err(ConstructError::PreconditionViolated(format!(
            "|H| = {} must equal |B| = {}",
            h_set.len(),
            b.len()
        )));
    }
    if !is_pairwise_coprime_u64(b) {
        return Err(ConstructError::PreconditionViolated(format!(
            "B not pairwise prime: {b:?}"
        )));
    }
    if !is_pairwise_coprime_u64(h_set) {
        return Err(ConstructError::PreconditionViolated(format!(
            "H not pairwise prime: {h_set:?}"
        )));
    }
    let mut b_sorted = b.to_vec();
    b_sorted.sort_unstable();
    let mut h_sorted = h_set.to_vec();
    h_sorted.sort_unstable();
    for &f in &h_sorted {
        if f < 2 {
            return Err(ConstructError::PreconditionViolated(format!(
                "H element {f} below 2"
            )));
        }
        for &x in &b_sorted {
            if crate::arith::gcd_u64(f, x) != 1 {
                return Err(ConstructError::PreconditionViolated(format!(
                    "gcd({f}, {x}) != 1 across H and B"
                )));
            }
        }
    }
    for &x in &b_sorted {
        let pos = u.checked_mul(x).filter(|&p| window.contains(p));
        if pos.is_none() {
            return Err(ConstructError::PreconditionViolated(format!(
                "u*b = {u}*{x} not a window member"
            )));
        }
    }

    // Pair b_i with f_i by ascending order; m_i = b_i * f_i^k.
    let moduli: Vec<BigUint> = b_sorted
        .iter()
        .zip(&h_sorted)
        .map(|(&x, &f)| BigUint::from(x) * BigUint::from(f).pow(k))
        .collect();
    let offsets: Vec<BigUint> = (0..b_sorted.len() as u64).map(BigUint::from).collect();
    let cert = crt_shift(&moduli, &offsets)?;

    let len = b_sorted.len();
    let n_up = BigUint::from(window.upper());
    let u_big = BigUint::from(u);
    let mut probed = Vec::new();
    let mut first_unfit = None;
    for t in 1..=t_max {
        let z_t = cert.position(&BigUint::from(t));
        let top = &u_big * (&z_t + BigUint::from(len as u64 - 1));
        if top > n_up {
            first_unfit = Some(t);
            break;
        }
        for j in 1..=len as u64 {
            let pos_big = &u_big * (&z_t + BigUint::from(j - 1));
            let pos = u64::try_from(&pos_big).expect("probe fits the window");
            if window.contains(pos) {
                let idx = (j - 1) as usize;
                let m_j = &moduli[idx];
                let numerator = &z_t + BigUint::from(j - 1);
                debug_assert!((&numerator % m_j).is_zero());
                let r_big = numerator / m_j;
                let r = u64::try_from(&r_big).map_err(|_| {
                    ConstructError::Internal("quotient r exceeds machine range".into())
                })?;
                let x = u * b_sorted[idx];
                let witness = GpWitness {
                    x,
                    n: h_sorted[idx],
                    k,
                    r,
                    ratio: pos / x,
                };
                if !check_witness(window, &witness).unwrap_or(false) {
                    return Err(ConstructError::Internal(format!(
                        "dichotomy witness failed re-check: {witness:?}"
                    )));
                }
                return Ok(GapOrGp::Witness(witness));
            }
        }
        probed.push(t);
    }
    if probed.is_empty() {
        return Err(ConstructError::WindowTooSmall(format!(
            "no probe interval fits: first position u*(z_1 + {}) already exceeds N = {}",
            len - 1,
            window.upper()
        )));
    }
    Ok(GapOrGp::Gap(GapCertificate {
        z_prime: cert.u0.clone(),
        stride: cert.stride.clone(),
        scale: u,
        interval_len: len,
        probed,
        first_unfit,
    }))
}

/// Drives the dichotomy at u = 1 for a pairwise-prime subset B of the window
/// with |B| >= l. Any probed interval then has at least l consecutive
/// integers inside the measured span, so an l-syndetic window must put a
/// member in it and the first fitting probe produces a witness.
pub fn gp_from_pairwise_prime(
    window: &SyndeticWindow,
    b: &[u64],
    k: u32,
    h0: &PairwisePrimeStream,
    t_max: u64,
) -> Result<GpWitness, ConstructError> {
    if (b.len() as u64) < window.l() {
        return Err(ConstructError::PreconditionViolated(format!(
            "|B| = {} below window syndeticity bound l = {}",
            b.len(),
            window.l()
        )));
    }
    for &x in b {
        if !window.contains(x) {
            return Err(ConstructError::PreconditionViolated(format!(
                "B element {x} not a window member"
            )));
        }
    }
    let mut drawn = Vec::new();
    let h = h0.draw_coprime(b, b.len(), &mut drawn)?;
    match gap_or_gp(window, b, 1, &h, k, t_max)? {
        GapOrGp::Witness(w) => Ok(w),
        GapOrGp::Gap(cert) => {
            let last = window.last_member().unwrap_or(0);
            let decisive = cert.probed.iter().any(|&t| {
                let z_t = &cert.z_prime + BigUint::from(t) * &cert.stride;
                let top = z_t + BigUint::from(cert.interval_len as u64 - 1);
                top <= BigUint::from(last)
            });
            if decisive {
                Err(ConstructError::SyndeticityContradicted(format!(
                    "an empty interval of {} consecutive integers lies inside the measured \
                     span of a window claiming l = {}",
                    cert.interval_len,
                    window.l()
                )))
            } else {
                Err(ConstructError::WindowTooSmall(format!(
                    "all {} probed intervals touch the unmeasured tail past {last}",
                    cert.probed.len()
                )))
            }
        }
    }
}
