//! Geometric-progression finders and the brute-force oracle that certifies
//! them.
//!
//! A witness is a pair {x, x*ratio} inside a window with ratio = n^k * r and
//! r = 1 (mod n). The two square-ratio finders walk explicit identity chains
//! over a 2-syndetic window; `find_ratio_nkr` enumerates ratios of the form
//! n^k * r directly; `oracle_enumerate` independently lists every qualifying
//! pair by divisor scan, with no knowledge of how the finders work.

use crate::synset::{syndetic_gap, SyndeticWindow};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GpError {
    #[error("window has measured gap {gap}, need 2-syndetic")]
    NotTwoSyndetic { gap: u64 },
    #[error("window too small: {0}")]
    WindowTooSmall(String),
    #[error("window is empty")]
    EmptyWindow,
    #[error("witness target {x} * {ratio} exceeds window upper bound")]
    OutOfWindow { x: u64, ratio: u64 },
}

/// A 2-term geometric progression {x, x*ratio} with ratio = n^k * r.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GpWitness {
    pub x: u64,
    pub n: u64,
    pub k: u32,
    pub r: u64,
    pub ratio: u64,
}

impl GpWitness {
    /// Square-ratio witness {x, x*q^2}, encoded as n = q, k = 2, r = 1.
    pub fn square(x: u64, q: u64) -> Self {
        Self {
            x,
            n: q,
            k: 2,
            r: 1,
            ratio: q * q,
        }
    }

    pub fn target(&self) -> Option<u64> {
        let y = self.x as u128 * self.ratio as u128;
        u64::try_from(y).ok()
    }
}

/// The generating step a finder used to emit a witness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    /// m^2+1 in S and (2m^2+1)^2 - 1 = 4m^2(m^2+1) in S.
    SquarePlusOne,
    /// m^2 in S and m^2 n^2 in S for the least n >= 2.
    SquareTimesSquare,
    /// u = m^2 +/- 1 with u^2-2 in S and (u^2-2) u^2 in S.
    ShiftedSquareChain,
    /// m^2 +/- 2 in S paired with m^2 (m^2 +/- 2) in S.
    AdjacentShiftedSquare,
    /// One of the quartered consecutive targets (m^2-1)/4, (m^2+3)/4 with
    /// ratio 4.
    ConsecutiveQuarters,
    /// {a, a+1} in S with a(4a+3)^2 or (a+1)(4a+1)^2 in S.
    ConsecutivePair,
    /// Window is a single residual progression of difference d; ratio
    /// (1+d)^2 stays inside it.
    ResidualAp,
    /// Direct enumeration of x, n, r.
    Enumerated,
    /// Extracted from a shift-certificate interval probe.
    ShiftInterval,
}

impl Branch {
    pub fn as_str(&self) -> &'static str {
        match self {
            Branch::SquarePlusOne => "square-plus-one",
            Branch::SquareTimesSquare => "square-times-square",
            Branch::ShiftedSquareChain => "shifted-square-chain",
            Branch::AdjacentShiftedSquare => "adjacent-shifted-square",
            Branch::ConsecutiveQuarters => "consecutive-quarters",
            Branch::ConsecutivePair => "consecutive-pair",
            Branch::ResidualAp => "residual-ap",
            Branch::Enumerated => "enumerated",
            Branch::ShiftInterval => "shift-interval",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchWitness {
    pub witness: GpWitness,
    pub branch: Branch,
}

/// Outcome of a square-ratio search: verified witnesses with their branches,
/// odd perfect squares found in the window along the way, and soft
/// diagnostics for every path the window was too short to decide.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SquareSearch {
    pub witnesses: Vec<BranchWitness>,
    pub odd_squares: Vec<u64>,
    pub diagnostics: Vec<String>,
}

/// Default number of witnesses a finder will report.
pub const DEFAULT_BUDGET: usize = 128;

fn canonical_sort(witnesses: &mut Vec<BranchWitness>) {
    witnesses.sort_by_key(|b| {
        (
            b.witness.x,
            b.witness.ratio,
            b.witness.n,
            b.witness.r,
            b.branch,
        )
    });
    witnesses.dedup();
}

/// Verifies a witness against the window: membership of both terms, the
/// ratio decomposition ratio = n^k * r, the congruence r = 1 (mod n) for
/// n >= 2, and ratio >= 2. A target beyond the window is an error, not a
/// refutation.
pub fn check_witness(window: &SyndeticWindow, w: &GpWitness) -> Result<bool, GpError> {
    let y = w.x as u128 * w.ratio as u128;
    if w.x == 0 || y > window.upper() as u128 {
        return Err(GpError::OutOfWindow {
            x: w.x,
            ratio: w.ratio,
        });
    }
    let y = y as u64;
    let decomposition = (w.n as u128)
        .checked_pow(w.k)
        .and_then(|nk| nk.checked_mul(w.r as u128))
        .map(|v| v == w.ratio as u128)
        .unwrap_or(false);
    Ok(w.n >= 1
        && w.k >= 1
        && w.r >= 1
        && w.ratio >= 2
        && decomposition
        && (w.n < 2 || w.r % w.n == 1)
        && window.contains(w.x)
        && window.contains(y))
}

// ---------------------------------------------------------------------------
// Method 1: odd-square chain
// ---------------------------------------------------------------------------

#[derive(Default)]
struct MScan {
    witnesses: Vec<BranchWitness>,
    odd_squares: Vec<u64>,
    diags: Vec<String>,
    /// A branch target exceeded the window before the cascade could decide.
    truncated: bool,
    /// The cascade reached a membership-decided end.
    decided: bool,
}

/// Walks the identity cascade for one odd m. Every arrow is gated on an
/// explicit membership check; targets past N mark the scan truncated.
fn scan_odd_m(window: &SyndeticWindow, m: u64) -> MScan {
    let n_up = window.upper();
    let mut scan = MScan::default();
    let m2 = m * m;
    let m2p1 = m2 + 1;

    if m2p1 <= n_up && window.contains(m2p1) {
        // (2m^2+1)^2 - 1 = 4m^2(m^2+1): {m^2+1, 4m^2(m^2+1)} is a candidate
        // pair with ratio (2m)^2.
        let target = 4u128 * m2 as u128 * m2p1 as u128;
        if target > n_up as u128 {
            scan.truncated = true;
            return scan;
        }
        let target = target as u64;
        if window.contains(target) {
            scan.witnesses.push(BranchWitness {
                witness: GpWitness::square(m2p1, 2 * m),
                branch: Branch::SquarePlusOne,
            });
            scan.decided = true;
        } else {
            // target and target+1 = (2m^2+1)^2 are consecutive; the second
            // is an odd perfect square when present.
            let osq = target + 1;
            if osq <= n_up && window.contains(osq) {
                scan.odd_squares.push(osq);
                scan.decided = true;
            } else {
                scan.diags.push(format!(
                    "m={m}: neither 4m^2(m^2+1) nor (2m^2+1)^2 present (tail or claim gap)"
                ));
            }
        }
        return scan;
    }
    if m2p1 > n_up {
        scan.truncated = true;
    }

    // m^2+1 absent: 2-syndeticity forces the odd square m^2 into S.
    if !window.contains(m2) {
        scan.diags.push(format!(
            "m={m}: both m^2 and m^2+1 missing (tail or claim gap)"
        ));
        return scan;
    }
    scan.odd_squares.push(m2);

    // Least n >= 2 with m^2 n^2 in S gives {m^2, m^2 n^2}.
    let mut n = 2u64;
    let mut n_scan_any = false;
    while let Some(t) = m2.checked_mul(n * n).filter(|&t| t <= n_up) {
        n_scan_any = true;
        if window.contains(t) {
            scan.witnesses.push(BranchWitness {
                witness: GpWitness::square(m2, n),
                branch: Branch::SquareTimesSquare,
            });
            scan.decided = true;
            return scan;
        }
        n += 1;
    }
    if !n_scan_any {
        scan.truncated = true;
        return scan;
    }
    scan.diags.push(format!(
        "m={m}: no m^2 n^2 in window up to N (absence beyond N unverifiable)"
    ));

    // Chain through u = z^2 +/- 1 with z odd, z^2 = 0 (mod m): z = m.
    // (u^2-2) u^2 = m^2 k^2 - 1 for k = (u^2-1)/m.
    for i in [-1i64, 1] {
        let u = (m2 as i64 + i) as u64;
        let u2 = match u.checked_mul(u).filter(|&v| v <= n_up) {
            Some(v) => v,
            None => {
                scan.truncated = true;
                continue;
            }
        };
        let x_cand = u2 - 2;
        let target = match x_cand.checked_mul(u2).filter(|&v| v <= n_up) {
            Some(v) => v,
            None => {
                scan.truncated = true;
                continue;
            }
        };
        if window.contains(x_cand) && window.contains(target) {
            scan.witnesses.push(BranchWitness {
                witness: GpWitness::square(x_cand, u),
                branch: Branch::ShiftedSquareChain,
            });
            scan.decided = true;
            return scan;
        }
    }
    if scan.truncated {
        return scan;
    }

    // Both u^2-2 were absent, so u^2-1 = m^2(m^2 + 2i) should be present for
    // both signs; from there either m^2+2i itself is in S (ratio m^2), or
    // the quartered consecutive pair decides with ratio 4.
    let y2 = m2;
    for i in [-1i64, 1] {
        let prod = (y2 as i64 + 2 * i) as u64;
        let target = match y2.checked_mul(prod).filter(|&v| v <= n_up) {
            Some(v) => v,
            None => {
                scan.truncated = true;
                return scan;
            }
        };
        if !window.contains(target) {
            scan.diags.push(format!(
                "m={m}: expected m^2(m^2{:+}) in S but absent (tail or claim gap)",
                2 * i
            ));
            return scan;
        }
        if window.contains(prod) {
            scan.witnesses.push(BranchWitness {
                witness: GpWitness::square(prod, m),
                branch: Branch::AdjacentShiftedSquare,
            });
            scan.decided = true;
            return scan;
        }
    }

    let q_low = y2 - 1; // divisible by 8 for odd y
    let q_high = y2 + 3; // = 4 (mod 8)
    if q_high > n_up {
        scan.truncated = true;
        return scan;
    }
    if !window.contains(q_low) || !window.contains(q_high) {
        scan.diags.push(format!(
            "m={m}: quartered-pair targets m^2-1, m^2+3 not both present"
        ));
        return scan;
    }
    let a_y = q_low / 4;
    let b_y = q_high / 4;
    if window.contains(a_y) {
        scan.witnesses.push(BranchWitness {
            witness: GpWitness::square(a_y, 2),
            branch: Branch::ConsecutiveQuarters,
        });
        scan.decided = true;
    } else if window.contains(b_y) {
        scan.witnesses.push(BranchWitness {
            witness: GpWitness::square(b_y, 2),
            branch: Branch::ConsecutiveQuarters,
        });
        scan.decided = true;
    } else {
        scan.diags.push(format!(
            "m={m}: neither quartered target present (claim gap)"
        ));
    }
    scan
}

/// Square-ratio search, first method: ascend over odd m >= 3, following the
/// odd-square identity cascade. Emits membership-verified witnesses plus the
/// odd perfect squares encountered; errors `WindowTooSmall` when every
/// cascade hit the window ceiling before deciding anything.
pub fn find_square_method1(
    window: &SyndeticWindow,
    budget: usize,
) -> Result<SquareSearch, GpError> {
    let gap = syndetic_gap(window).map_err(|_| GpError::EmptyWindow)?;
    if gap > 2 {
        return Err(GpError::NotTwoSyndetic { gap });
    }
    let n_up = window.upper();
    let m_values: Vec<u64> = (3..)
        .step_by(2)
        .take_while(|&m: &u64| m.saturating_mul(m) <= n_up + 1)
        .collect();
    if m_values.is_empty() {
        return Err(GpError::WindowTooSmall(format!(
            "no odd m >= 3 with m^2 - 1 <= {n_up}"
        )));
    }
    let scans: Vec<MScan> = m_values
        .par_iter()
        .map(|&m| scan_odd_m(window, m))
        .collect();
    let mut out = SquareSearch::default();
    let mut any_decided = false;
    for s in scans {
        out.witnesses.extend(s.witnesses);
        out.odd_squares.extend(s.odd_squares);
        out.diagnostics.extend(s.diags);
        any_decided |= s.decided;
    }
    if out.witnesses.is_empty() && !any_decided {
        return Err(GpError::WindowTooSmall(
            "every branch target exceeded the window".into(),
        ));
    }
    canonical_sort(&mut out.witnesses);
    out.witnesses.truncate(budget);
    out.odd_squares.sort_unstable();
    out.odd_squares.dedup();
    Ok(out)
}

// ---------------------------------------------------------------------------
// Method 2: consecutive pairs
// ---------------------------------------------------------------------------

/// Square-ratio search, second method. For every a with {a, a+1} in S the
/// integers a(4a+3)^2 and (a+1)(4a+1)^2 are consecutive (the identity
/// a(4a+3)^2 + 1 = (a+1)(4a+1)^2), so a 2-syndetic set holds one of them;
/// whichever is present yields a square-ratio witness. A window with no
/// consecutive pair at all is a single residual progression, and the witness
/// {x, x(1+d)^2} is taken inside it.
pub fn find_square_method2(
    window: &SyndeticWindow,
    budget: usize,
) -> Result<SquareSearch, GpError> {
    let gap = syndetic_gap(window).map_err(|_| GpError::EmptyWindow)?;
    if gap > 2 {
        return Err(GpError::NotTwoSyndetic { gap });
    }
    let n_up = window.upper();
    let mut out = SquareSearch::default();

    let a_values: Vec<u64> = (1..)
        .take_while(|&a: &u64| {
            let root = 4 * a as u128 + 3;
            a as u128 * root * root <= n_up as u128
        })
        .collect();
    let mut any_pair_low = false;
    let mut any_decided = false;
    let scans: Vec<(Option<BranchWitness>, Option<String>, bool)> = a_values
        .par_iter()
        .map(|&a| {
            if !(window.contains(a) && window.contains(a + 1)) {
                return (None, None, false);
            }
            let t1 = a * (4 * a + 3) * (4 * a + 3); // fits: bounded by n_up
            let t2 = t1 + 1;
            if window.contains(t1) {
                (
                    Some(BranchWitness {
                        witness: GpWitness::square(a, 4 * a + 3),
                        branch: Branch::ConsecutivePair,
                    }),
                    None,
                    true,
                )
            } else if t2 <= n_up && window.contains(t2) {
                (
                    Some(BranchWitness {
                        witness: GpWitness::square(a + 1, 4 * a + 1),
                        branch: Branch::ConsecutivePair,
                    }),
                    None,
                    true,
                )
            } else if t2 <= n_up {
                (
                    None,
                    Some(format!(
                        "a={a}: neither consecutive target present (claim gap)"
                    )),
                    true,
                )
            } else {
                // Only t1 was checkable and it was absent: undecidable here.
                (None, None, false)
            }
        })
        .collect();
    for (w, d, decided) in scans {
        if let Some(w) = w {
            out.witnesses.push(w);
        }
        if let Some(d) = d {
            out.diagnostics.push(d);
        }
        any_pair_low |= decided;
        any_decided |= decided;
    }

    // Pair existence anywhere in the window decides which branch applies.
    let any_pair = window.members().any(|x| window.contains(x + 1));
    if !any_pair {
        let members: Vec<u64> = window.members().collect();
        match common_difference(&members) {
            Some(d) if d >= 2 => {
                let ratio_root = 1 + d;
                for &x in &members {
                    if out.witnesses.len() >= budget {
                        break;
                    }
                    let y = match x.checked_mul(ratio_root * ratio_root) {
                        Some(y) if y <= n_up => y,
                        _ => break,
                    };
                    if window.contains(y) {
                        out.witnesses.push(BranchWitness {
                            witness: GpWitness::square(x, ratio_root),
                            branch: Branch::ResidualAp,
                        });
                        any_decided = true;
                    }
                }
                if out.witnesses.is_empty() {
                    out.diagnostics.push(format!(
                        "residual progression d={d} holds no (1+d)^2 multiple within the window"
                    ));
                }
            }
            _ => out
                .diagnostics
                .push("no consecutive pair and member differences are not constant".into()),
        }
    } else if !any_pair_low {
        out.diagnostics
            .push("consecutive pairs exist but none low enough for in-window targets".into());
    }

    if out.witnesses.is_empty() && !any_decided {
        return Err(GpError::WindowTooSmall(
            "every consecutive-pair target exceeded the window".into(),
        ));
    }
    canonical_sort(&mut out.witnesses);
    out.witnesses.truncate(budget);
    Ok(out)
}

fn common_difference(members: &[u64]) -> Option<u64> {
    if members.len() < 2 {
        return None;
    }
    let d = members[1] - members[0];
    members.windows(2).all(|w| w[1] - w[0] == d).then_some(d)
}

// ---------------------------------------------------------------------------
// Direct n^k r enumeration
// ---------------------------------------------------------------------------

/// Enumerates witnesses {x, x n^k r} with n in `h`, r = 1 (mod n), in
/// canonical (x, then n, then r) order up to `budget`. An empty result makes
/// no nonexistence claim. Work is partitioned over x-chunks; chunk results
/// are concatenated in order, so the output is independent of thread count.
pub fn find_ratio_nkr(
    window: &SyndeticWindow,
    k: u32,
    h: &[u64],
    budget: usize,
) -> Vec<BranchWitness> {
    let n_up = window.upper();
    let mut h_sorted: Vec<u64> = h.iter().copied().filter(|&n| n >= 2).collect();
    h_sorted.sort_unstable();
    h_sorted.dedup();
    if h_sorted.is_empty() || k == 0 {
        return Vec::new();
    }
    let members: Vec<u64> = window.members().collect();
    let mut out: Vec<BranchWitness> = Vec::new();
    for chunk in members.chunks(4096) {
        let batch: Vec<Vec<BranchWitness>> = chunk
            .par_iter()
            .map(|&x| {
                let mut found = Vec::new();
                for &n in &h_sorted {
                    let nk = match (n as u128).checked_pow(k) {
                        Some(v) => v,
                        None => break,
                    };
                    if x as u128 * nk > n_up as u128 {
                        break; // h is ascending; larger n only worse
                    }
                    let base = x as u128 * nk;
                    let mut r = 1u64;
                    loop {
                        let y = base * r as u128;
                        if y > n_up as u128 {
                            break;
                        }
                        if window.contains(y as u64) {
                            found.push(BranchWitness {
                                witness: GpWitness {
                                    x,
                                    n,
                                    k,
                                    r,
                                    ratio: (nk * r as u128) as u64,
                                },
                                branch: Branch::Enumerated,
                            });
                        }
                        r += n;
                    }
                }
                found
            })
            .collect();
        out.extend(batch.into_iter().flatten());
        if out.len() >= budget {
            break;
        }
    }
    canonical_sort(&mut out);
    out.truncate(budget);
    out
}

// ---------------------------------------------------------------------------
// Oracle
// ---------------------------------------------------------------------------

/// Ratio families the oracle can select on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RatioClass {
    AnyInteger,
    PerfectSquare,
    Nkr { k: u32, h: Vec<u64> },
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while (r + 1).saturating_mul(r + 1) <= n {
        r += 1;
    }
    while r.saturating_mul(r) > n {
        r -= 1;
    }
    r
}

impl RatioClass {
    pub fn matches(&self, q: u64) -> bool {
        if q < 2 {
            return false;
        }
        match self {
            RatioClass::AnyInteger => true,
            RatioClass::PerfectSquare => {
                let s = isqrt(q);
                s >= 2 && s * s == q
            }
            RatioClass::Nkr { k, h } => h.iter().any(|&n| {
                if n < 2 {
                    return false;
                }
                match (n as u128).checked_pow(*k) {
                    Some(nk) if nk <= q as u128 => {
                        let nk = nk as u64;
                        q.is_multiple_of(nk) && (q / nk) % n == 1
                    }
                    _ => false,
                }
            }),
        }
    }

    pub fn name(&self) -> String {
        match self {
            RatioClass::AnyInteger => "any-integer".into(),
            RatioClass::PerfectSquare => "perfect-square".into(),
            RatioClass::Nkr { k, h } => format!(
                "nkr(k={k},h={})",
                h.iter()
                    .map(|n| n.to_string())
                    .collect::<Vec<_>>()
                    .join("|")
            ),
        }
    }
}

/// Exhaustive divisor-scan enumeration of all pairs x < y in the window with
/// y/x an integer ratio in the class, by multiple enumeration (O(N log N)
/// membership probes). Pairs stream in (x, then y) order.
pub fn oracle_enumerate<'a>(
    window: &'a SyndeticWindow,
    class: RatioClass,
) -> impl Iterator<Item = (u64, u64)> + 'a {
    let n_up = window.upper();
    window.members().flat_map(move |x| {
        let class = class.clone();
        (2..=n_up.checked_div(x).unwrap_or(0)).filter_map(move |q| {
            let y = x * q;
            (window.contains(y) && class.matches(q)).then_some((x, y))
        })
    })
}

/// Direct check that a pair belongs to the oracle enumeration.
pub fn oracle_pair_matches(window: &SyndeticWindow, class: &RatioClass, x: u64, y: u64) -> bool {
    x >= 1
        && y > x
        && y <= window.upper()
        && y.is_multiple_of(x)
        && window.contains(x)
        && window.contains(y)
        && class.matches(y / x)
}

/// Bonus statistic: 3-term configurations {x, xq, xq^2} in the window,
/// counted by extending oracle pairs, capped at `pair_cap` scanned pairs.
pub fn oracle_three_term_count(window: &SyndeticWindow, class: RatioClass, pair_cap: usize) -> u64 {
    let n_up = window.upper();
    oracle_enumerate(window, class)
        .take(pair_cap)
        .filter(|&(x, y)| {
            let q = y / x;
            match y.checked_mul(q) {
                Some(z) => z <= n_up && window.contains(z),
                None => false,
            }
        })
        .count() as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synset::{materialize, parse_rule, SetRule, SyndeticWindow};

    fn full(n: u64) -> SyndeticWindow {
        SyndeticWindow::from_members(1..=n, n, None, "full").unwrap()
    }

    fn odds(n: u64) -> SyndeticWindow {
        materialize(&SetRule::Ap { start: 1, step: 2 }, n, None).unwrap()
    }

    #[test]
    fn check_witness_examples() {
        let w = SyndeticWindow::from_members([10u64, 360], 1000, Some(1000), "pair").unwrap();
        let witness = GpWitness::square(10, 6);
        assert_eq!(witness.ratio, 36);
        assert!(check_witness(&w, &witness).unwrap());

        // r not congruent to 1 mod n fails the check.
        let bad = GpWitness {
            x: 10,
            n: 6,
            k: 1,
            r: 6,
            ratio: 36,
        };
        assert!(!check_witness(&w, &bad).unwrap());

        let oob = GpWitness::square(10, 11);
        assert_eq!(
            check_witness(&w, &oob),
            Err(GpError::OutOfWindow { x: 10, ratio: 121 })
        );
    }

    #[test]
    fn method1_on_full_window_finds_square_plus_one() {
        let w = full(10_000);
        let out = find_square_method1(&w, DEFAULT_BUDGET).unwrap();
        // m = 3: 10 in S and 19^2 - 1 = 360 in S.
        assert!(out
            .witnesses
            .iter()
            .any(|b| b.witness == GpWitness::square(10, 6) && b.branch == Branch::SquarePlusOne));
        for b in &out.witnesses {
            assert!(check_witness(&w, &b.witness).unwrap());
        }
    }

    #[test]
    fn method1_on_odds_finds_nine_times_nine() {
        let w = odds(10_000);
        let out = find_square_method1(&w, DEFAULT_BUDGET).unwrap();
        let first = &out.witnesses[0];
        assert_eq!(first.witness, GpWitness::square(9, 3));
        assert_eq!(first.witness.ratio, 9);
        assert_eq!(first.branch, Branch::SquareTimesSquare);
        assert!(out.odd_squares.contains(&9));
    }

    #[test]
    fn method1_on_evens_finds_ten_to_360() {
        let w = materialize(&SetRule::Evens, 10_000, None).unwrap();
        let out = find_square_method1(&w, DEFAULT_BUDGET).unwrap();
        assert!(out
            .witnesses
            .iter()
            .any(|b| b.witness == GpWitness::square(10, 6)));
    }

    #[test]
    fn method1_gap3_rejected() {
        let w = materialize(&SetRule::Ap { start: 1, step: 3 }, 1000, None).unwrap();
        assert_eq!(
            find_square_method1(&w, DEFAULT_BUDGET),
            Err(GpError::NotTwoSyndetic { gap: 3 })
        );
    }

    #[test]
    fn method1_tiny_window_too_small() {
        let w = full(10);
        assert!(matches!(
            find_square_method1(&w, DEFAULT_BUDGET),
            Err(GpError::WindowTooSmall(_))
        ));
    }

    #[test]
    fn method2_full_window_pair_a1() {
        let w = full(10_000);
        let out = find_square_method2(&w, DEFAULT_BUDGET).unwrap();
        // a = 1: 1 * 49 = 49 is in the full window.
        assert_eq!(out.witnesses[0].witness, GpWitness::square(1, 7));
        assert_eq!(out.witnesses[0].branch, Branch::ConsecutivePair);
    }

    #[test]
    fn method2_odds_residual_ap() {
        let w = odds(10_000);
        let out = find_square_method2(&w, DEFAULT_BUDGET).unwrap();
        assert_eq!(out.witnesses[0].witness, GpWitness::square(1, 3));
        assert_eq!(out.witnesses[0].branch, Branch::ResidualAp);
        for b in &out.witnesses {
            assert!(check_witness(&w, &b.witness).unwrap());
        }
    }

    #[test]
    fn method2_prefers_lower_target() {
        // Window holds {1, 2} and 49; the finder must pick (1, 49) over
        // (2, 50) because a(4a+3)^2 is probed first.
        let mut members: Vec<u64> = vec![1, 2, 49, 50];
        members.extend((3..=48).filter(|x| x % 2 == 0));
        members.extend((51..=100).filter(|x| x % 2 == 0));
        members.sort_unstable();
        members.dedup();
        let w = SyndeticWindow::from_members(members, 100, Some(2), "engineered").unwrap();
        let out = find_square_method2(&w, DEFAULT_BUDGET).unwrap();
        assert_eq!(out.witnesses[0].witness, GpWitness::square(1, 7));
    }

    #[test]
    fn find_ratio_nkr_multiples_of_three() {
        let w = materialize(&SetRule::Ap { start: 3, step: 3 }, 100, None).unwrap();
        let out = find_ratio_nkr(&w, 2, &[2], DEFAULT_BUDGET);
        let first = &out[0].witness;
        assert_eq!((first.x, first.n, first.k, first.r), (3, 2, 2, 1));
        assert_eq!(first.ratio, 4);
        for b in &out {
            assert!(check_witness(&w, &b.witness).unwrap());
        }
    }

    #[test]
    fn find_ratio_nkr_trivial_cases() {
        let w = SyndeticWindow::from_members([1u64], 1, None, "singleton").unwrap();
        assert!(find_ratio_nkr(&w, 1, &[2, 3], DEFAULT_BUDGET).is_empty());

        let w = full(100);
        let out = find_ratio_nkr(&w, 1, &[3], 1);
        assert_eq!(out[0].witness.x, 1);
        assert_eq!(out[0].witness.n, 3);
        assert_eq!(out[0].witness.r, 1);
    }

    #[test]
    fn oracle_on_squares_window() {
        let members: Vec<u64> = (1..=7).map(|k| k * k).collect();
        let w = SyndeticWindow::from_members(members, 50, Some(50), "squares<=49").unwrap();
        let pairs: Vec<(u64, u64)> = oracle_enumerate(&w, RatioClass::PerfectSquare).collect();
        let expected = vec![
            (1, 4),
            (1, 9),
            (1, 16),
            (1, 25),
            (1, 36),
            (1, 49),
            (4, 16),
            (4, 36),
            (9, 36),
        ];
        assert_eq!(pairs, expected);
    }

    #[test]
    fn oracle_on_primes_is_empty() {
        let members: Vec<u64> = crate::arith::primes_upto(30);
        let w = SyndeticWindow::from_members(members, 30, Some(30), "primes<=30").unwrap();
        assert_eq!(oracle_enumerate(&w, RatioClass::AnyInteger).count(), 0);
    }

    #[test]
    fn oracle_empty_window() {
        let w = SyndeticWindow::from_members(std::iter::empty(), 10, None, "empty").unwrap();
        assert_eq!(oracle_enumerate(&w, RatioClass::AnyInteger).count(), 0);
    }

    #[test]
    fn oracle_nkr_class_agrees_with_finder() {
        let w = full(2000);
        let class = RatioClass::Nkr { k: 2, h: vec![3] };
        let found = find_ratio_nkr(&w, 2, &[3], 50);
        for b in &found {
            let y = b.witness.target().unwrap();
            assert!(oracle_pair_matches(&w, &class, b.witness.x, y));
        }
        for (x, y) in oracle_enumerate(&w, class).take(50) {
            let q = y / x;
            assert!(q % 9 == 0 && (q / 9) % 3 == 1);
        }
    }

    #[test]
    fn finder_witnesses_all_in_oracle() {
        let w = materialize(
            &parse_rule("random-syndetic(l=2,seed=11)").unwrap(),
            100_000,
            None,
        )
        .unwrap();
        let m1 = find_square_method1(&w, DEFAULT_BUDGET).unwrap();
        let m2 = find_square_method2(&w, DEFAULT_BUDGET).unwrap();
        let class = RatioClass::PerfectSquare;
        for b in m1.witnesses.iter().chain(m2.witnesses.iter()) {
            assert!(check_witness(&w, &b.witness).unwrap());
            let y = b.witness.target().unwrap();
            assert!(oracle_pair_matches(&w, &class, b.witness.x, y));
        }
    }

    #[test]
    fn witness_survives_window_extension() {
        let small = odds(1_000);
        let grown = odds(100_000);
        let out = find_square_method1(&small, DEFAULT_BUDGET).unwrap();
        for b in &out.witnesses {
            assert!(check_witness(&grown, &b.witness).unwrap());
        }
    }

    #[test]
    fn oracle_pair_matches_agrees_with_enumeration() {
        let w = materialize(
            &parse_rule("random-syndetic(l=3,seed=5)").unwrap(),
            300,
            None,
        )
        .unwrap();
        for class in [
            RatioClass::AnyInteger,
            RatioClass::PerfectSquare,
            RatioClass::Nkr {
                k: 1,
                h: vec![2, 3],
            },
        ] {
            let enumerated: std::collections::HashSet<(u64, u64)> =
                oracle_enumerate(&w, class.clone()).collect();
            for x in 1..=300u64 {
                for y in (x + 1)..=300 {
                    assert_eq!(
                        enumerated.contains(&(x, y)),
                        oracle_pair_matches(&w, &class, x, y),
                        "disagreement at ({x}, {y}) for {}",
                        class.name()
                    );
                }
            }
        }
    }

    #[test]
    fn three_term_counter_on_powers() {
        let members = vec![1u64, 2, 4, 8, 16, 32, 64];
        let w = SyndeticWindow::from_members(members, 64, Some(64), "pow2").unwrap();
        // (1,2,4), (1,4,16), (2,4,8), ... all q-chains present.
        assert!(oracle_three_term_count(&w, RatioClass::AnyInteger, 10_000) > 0);
    }
}
