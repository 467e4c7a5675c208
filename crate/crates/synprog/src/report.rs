//! Machine-readable run reports and their independent re-verification.
//!
//! A report is self-contained: together with the set file it names, every
//! witness and certificate in it can be re-checked from scratch. Values
//! that can exceed machine range (everything produced by the construction
//! pipeline) are serialized as decimal strings; window-bounded values stay
//! plain numbers.

use crate::construct::{
    verify_triveni, AlignmentSolution, EmbeddedFamily, GcdControlledFamily, ShiftCertificate,
    TriveniTriplet,
};
use crate::gp::{check_witness, oracle_pair_matches, Branch, BranchWitness, GpWitness, RatioClass};
use crate::lattice::TlLattice;
use crate::synset::SyndeticWindow;
use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::str::FromStr;

pub const SCHEMA: &str = "synprog-report/1";

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct Report {
    pub schema: String,
    /// Semantic command echo. Runtime tuning flags (thread counts) are
    /// deliberately omitted so equal runs produce equal reports.
    pub command: String,
    pub window: Option<WindowInfo>,
    pub witnesses: Vec<WitnessRecord>,
    pub certificates: Vec<CertificateRecord>,
    pub diagnostics: Vec<String>,
    pub elapsed_ms: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct WindowInfo {
    pub provenance: String,
    pub n: u64,
    pub l: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct WitnessRecord {
    pub x: u64,
    pub n: u64,
    pub k: u32,
    pub r: u64,
    pub ratio: u64,
    pub branch: String,
    pub verified: bool,
}

impl WitnessRecord {
    pub fn new(bw: &BranchWitness, verified: bool) -> Self {
        Self {
            x: bw.witness.x,
            n: bw.witness.n,
            k: bw.witness.k,
            r: bw.witness.r,
            ratio: bw.witness.ratio,
            branch: bw.branch.as_str().to_string(),
            verified,
        }
    }

    pub fn witness(&self) -> GpWitness {
        GpWitness {
            x: self.x,
            n: self.n,
            k: self.k,
            r: self.r,
            ratio: self.ratio,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CertificateRecord {
    Shift {
        u0: String,
        stride: String,
        moduli: Vec<String>,
        offsets: Vec<String>,
        recheck: bool,
    },
    Family {
        l: u64,
        h: u64,
        anchors: Vec<String>,
        bound: String,
        members: Vec<String>,
        recheck: bool,
    },
    Embed {
        l: u64,
        h: u64,
        start: String,
        base: String,
        l_product: String,
        capacity: String,
        members: Vec<String>,
        recheck: bool,
    },
    Align {
        l: u64,
        triples: Vec<AlignTriple>,
        z: String,
        remainders: Vec<String>,
        multipliers: Vec<String>,
        recheck: bool,
    },
    Triveni {
        l: u64,
        h: u64,
        f: Vec<u64>,
        witnesses: BTreeMap<String, Vec<u64>>,
        recheck: bool,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct AlignTriple {
    pub a: String,
    pub x: String,
    pub u: u64,
}

fn strings(values: &[BigUint]) -> Vec<String> {
    values.iter().map(|v| v.to_string()).collect()
}

impl CertificateRecord {
    pub fn from_shift(cert: &ShiftCertificate, recheck: bool) -> Self {
        Self::Shift {
            u0: cert.u0.to_string(),
            stride: cert.stride.to_string(),
            moduli: strings(&cert.moduli),
            offsets: strings(&cert.offsets),
            recheck,
        }
    }

    pub fn from_family(f: &GcdControlledFamily, recheck: bool) -> Self {
        Self::Family {
            l: f.l,
            h: f.anchors.len() as u64,
            anchors: strings(&f.anchors),
            bound: f.bound.to_string(),
            members: strings(&f.members),
            recheck,
        }
    }

    pub fn from_embed(e: &EmbeddedFamily, recheck: bool) -> Self {
        Self::Embed {
            l: e.l,
            h: e.h,
            start: e.start.to_string(),
            base: e.base.to_string(),
            l_product: e.l_product.to_string(),
            capacity: e.capacity.to_string(),
            members: strings(&e.members),
            recheck,
        }
    }

    pub fn from_align(
        l: u64,
        triples: &[(BigUint, BigUint, u64)],
        sol: &AlignmentSolution,
        recheck: bool,
    ) -> Self {
        Self::Align {
            l,
            triples: triples
                .iter()
                .map(|(a, x, u)| AlignTriple {
                    a: a.to_string(),
                    x: x.to_string(),
                    u: *u,
                })
                .collect(),
            z: sol.z.to_string(),
            remainders: strings(&sol.remainders),
            multipliers: strings(&sol.multipliers),
            recheck,
        }
    }

    pub fn from_triveni(t: &TriveniTriplet, recheck: bool) -> Self {
        Self::Triveni {
            l: t.l,
            h: t.h as u64,
            f: t.f.clone(),
            witnesses: t
                .witnesses
                .iter()
                .map(|(u, b)| (u.to_string(), b.clone()))
                .collect(),
            recheck,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VerifyFailure {
    Malformed(String),
    Check { item: String, reason: String },
}

impl std::fmt::Display for VerifyFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            VerifyFailure::Malformed(m) => write!(f, "malformed report: {m}"),
            VerifyFailure::Check { item, reason } => write!(f, "{item}: {reason}"),
        }
    }
}

fn parse_big(s: &str, what: &str) -> Result<BigUint, VerifyFailure> {
    BigUint::from_str(s).map_err(|_| VerifyFailure::Malformed(format!("{what}: bad integer {s:?}")))
}

fn parse_bigs(ss: &[String], what: &str) -> Result<Vec<BigUint>, VerifyFailure> {
    ss.iter().map(|s| parse_big(s, what)).collect()
}

/// Re-checks every witness and certificate in the report from first
/// principles. Witnesses and Triveni certificates need the window; the
/// purely arithmetic certificates are re-substituted on their own.
pub fn verify_report(
    report: &Report,
    window: Option<&SyndeticWindow>,
) -> Result<(), VerifyFailure> {
    if report.schema != SCHEMA {
        return Err(VerifyFailure::Malformed(format!(
            "unknown schema {:?}",
            report.schema
        )));
    }
    for (idx, w) in report.witnesses.iter().enumerate() {
        let item = format!("witness[{idx}] (x={}, ratio={})", w.x, w.ratio);
        let window = window.ok_or_else(|| VerifyFailure::Check {
            item: item.clone(),
            reason: "witness present but no window supplied".into(),
        })?;
        match check_witness(window, &w.witness()) {
            Ok(true) => {}
            Ok(false) => {
                return Err(VerifyFailure::Check {
                    item,
                    reason: "membership or congruence check failed".into(),
                })
            }
            Err(e) => {
                return Err(VerifyFailure::Check {
                    item,
                    reason: e.to_string(),
                })
            }
        }
        let y =
            w.x.checked_mul(w.ratio)
                .ok_or_else(|| VerifyFailure::Check {
                    item: item.clone(),
                    reason: "x * ratio overflows".into(),
                })?;
        if !oracle_pair_matches(window, &RatioClass::AnyInteger, w.x, y) {
            return Err(VerifyFailure::Check {
                item,
                reason: "pair missing from oracle enumeration".into(),
            });
        }
    }
    for (idx, cert) in report.certificates.iter().enumerate() {
        verify_certificate(cert, window).map_err(|e| match e {
            VerifyFailure::Check { item, reason } => VerifyFailure::Check {
                item: format!("certificate[{idx}] {item}"),
                reason,
            },
            other => other,
        })?;
    }
    Ok(())
}

fn verify_certificate(
    cert: &CertificateRecord,
    window: Option<&SyndeticWindow>,
) -> Result<(), VerifyFailure> {
    let fail = |item: &str, reason: String| {
        Err(VerifyFailure::Check {
            item: item.into(),
            reason,
        })
    };
    match cert {
        CertificateRecord::Shift {
            u0,
            stride,
            moduli,
            offsets,
            ..
        } => {
            let rebuilt = ShiftCertificate {
                u0: parse_big(u0, "shift.u0")?,
                stride: parse_big(stride, "shift.stride")?,
                moduli: parse_bigs(moduli, "shift.moduli")?,
                offsets: parse_bigs(offsets, "shift.offsets")?,
            };
            let product: BigUint = rebuilt.moduli.iter().map(|m| m * m).product();
            if product != rebuilt.stride {
                return fail(
                    "shift",
                    "stride is not the product of squared moduli".into(),
                );
            }
            if !rebuilt.verify_range(0, 10) {
                return fail("shift", "congruence re-substitution failed".into());
            }
            Ok(())
        }
        CertificateRecord::Family {
            l,
            anchors,
            bound,
            members,
            ..
        } => {
            let rebuilt = GcdControlledFamily {
                l: *l,
                anchors: parse_bigs(anchors, "family.anchors")?,
                bound: parse_big(bound, "family.bound")?,
                members: parse_bigs(members, "family.members")?,
            };
            let lattice =
                TlLattice::cached(*l).map_err(|e| VerifyFailure::Malformed(e.to_string()))?;
            if !rebuilt.verify(&lattice) {
                return fail("family", "gcd or bound invariant failed".into());
            }
            Ok(())
        }
        CertificateRecord::Embed {
            l,
            h,
            start,
            base,
            l_product,
            capacity,
            members,
            ..
        } => {
            let span = 2 * *l as usize + 1;
            if *l == 0 || members.len() != *h as usize * span {
                return fail("embed", format!("expected {h} runs of {span} members"));
            }
            let m = parse_bigs(members, "embed.members")?;
            let anchors: Vec<BigUint> = m.chunks(span).map(|c| c[0].clone()).collect();
            let rebuilt = EmbeddedFamily {
                l: *l,
                h: *h,
                start: parse_big(start, "embed.start")?,
                base: parse_big(base, "embed.base")?,
                l_product: parse_big(l_product, "embed.l_product")?,
                capacity: parse_big(capacity, "embed.capacity")?,
                anchors,
                members: m,
            };
            let lattice =
                TlLattice::cached(*l).map_err(|e| VerifyFailure::Malformed(e.to_string()))?;
            if !rebuilt.verify(&lattice) {
                return fail("embed", "interval or gcd invariant failed".into());
            }
            if (&rebuilt.base % &rebuilt.l_product) != BigUint::from(0u32) {
                return fail("embed", "base is not a multiple of L".into());
            }
            Ok(())
        }
        CertificateRecord::Align {
            triples,
            z,
            remainders,
            multipliers,
            ..
        } => {
            let sol = AlignmentSolution {
                z: parse_big(z, "align.z")?,
                remainders: parse_bigs(remainders, "align.remainders")?,
                multipliers: parse_bigs(multipliers, "align.multipliers")?,
            };
            let t: Vec<(BigUint, BigUint, u64)> = triples
                .iter()
                .map(|tr| {
                    Ok((
                        parse_big(&tr.a, "align.a")?,
                        parse_big(&tr.x, "align.x")?,
                        tr.u,
                    ))
                })
                .collect::<Result<_, VerifyFailure>>()?;
            if !sol.satisfies(&t) {
                return fail("align", "exact re-substitution failed".into());
            }
            Ok(())
        }
        CertificateRecord::Triveni {
            l, h, f, witnesses, ..
        } => {
            let window = match window {
                Some(w) => w,
                None => return fail("triveni", "window required for witness membership".into()),
            };
            let mut parsed = BTreeMap::new();
            for (u, b) in witnesses {
                let u: u64 = u
                    .parse()
                    .map_err(|_| VerifyFailure::Malformed(format!("triveni key {u:?}")))?;
                parsed.insert(u, b.clone());
            }
            let rebuilt = TriveniTriplet {
                l: *l,
                h: *h as usize,
                f: f.clone(),
                witnesses: parsed,
            };
            if !verify_triveni(window, &rebuilt) {
                return fail("triveni", "triplet conditions failed against window".into());
            }
            Ok(())
        }
    }
}

impl Report {
    pub fn new(command: String, window: Option<&SyndeticWindow>) -> Self {
        Self {
            schema: SCHEMA.to_string(),
            command,
            window: window.map(|w| WindowInfo {
                provenance: w.provenance().to_string(),
                n: w.upper(),
                l: w.l(),
            }),
            witnesses: Vec::new(),
            certificates: Vec::new(),
            diagnostics: Vec::new(),
            elapsed_ms: 0,
        }
    }

    pub fn push_witnesses(&mut self, window: &SyndeticWindow, found: &[BranchWitness]) {
        for bw in found {
            let verified = match check_witness(window, &bw.witness) {
                Ok(true) => true,
                Ok(false) => {
                    self.diagnostics.push(format!(
                        "witness (x={}, ratio={}) failed re-verification",
                        bw.witness.x, bw.witness.ratio
                    ));
                    false
                }
                Err(e) => {
                    self.diagnostics.push(format!(
                        "witness (x={}, ratio={}): {e}",
                        bw.witness.x, bw.witness.ratio
                    ));
                    false
                }
            };
            self.witnesses.push(WitnessRecord::new(bw, verified));
        }
    }

    pub fn any_verified(&self) -> bool {
        self.witnesses.iter().any(|w| w.verified)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Convenience for tests and the CLI: a witness record straight from parts.
pub fn witness_record(w: GpWitness, branch: Branch, verified: bool) -> WitnessRecord {
    WitnessRecord::new(&BranchWitness { witness: w, branch }, verified)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{align_offsets, crt_shift_u64, embed_family, gcd_controlled_family};
    use crate::gp::{find_square_method1, DEFAULT_BUDGET};
    use crate::synset::{materialize, SetRule};

    #[test]
    fn report_round_trips_through_json() {
        let w = materialize(&SetRule::Ap { start: 1, step: 2 }, 10_000, None).unwrap();
        let out = find_square_method1(&w, DEFAULT_BUDGET).unwrap();
        let mut report = Report::new("find odds --mode square".into(), Some(&w));
        report.push_witnesses(&w, &out.witnesses);
        let json = report.to_json();
        let back: Report = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
        assert!(verify_report(&back, Some(&w)).is_ok());
    }

    #[test]
    fn tampered_witness_fails_verification() {
        let w = materialize(&SetRule::Ap { start: 1, step: 2 }, 10_000, None).unwrap();
        let out = find_square_method1(&w, DEFAULT_BUDGET).unwrap();
        let mut report = Report::new("find".into(), Some(&w));
        report.push_witnesses(&w, &out.witnesses);
        report.witnesses[0].r += 1;
        let err = verify_report(&report, Some(&w)).unwrap_err();
        match err {
            VerifyFailure::Check { item, .. } => assert!(item.contains("witness[0]")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn wrong_window_fails_membership() {
        let w = materialize(&SetRule::Ap { start: 1, step: 2 }, 10_000, None).unwrap();
        let other = materialize(&SetRule::Ap { start: 3, step: 3 }, 10_000, None);
        let other = other.unwrap();
        let out = find_square_method1(&w, DEFAULT_BUDGET).unwrap();
        let mut report = Report::new("find".into(), Some(&w));
        report.push_witnesses(&w, &out.witnesses);
        assert!(verify_report(&report, Some(&other)).is_err());
    }

    #[test]
    fn certificates_recheck() {
        let shift = crt_shift_u64(&[2, 3], &[0, 1]).unwrap();
        let family = gcd_controlled_family(1, 2).unwrap();
        let embed = embed_family(1, 1, &BigUint::from(1u32)).unwrap();
        let triples = vec![(BigUint::from(5u32), BigUint::from(3u32), 2u64)];
        let align = align_offsets(1, &triples).unwrap();

        let mut report = Report::new("construct".into(), None);
        report
            .certificates
            .push(CertificateRecord::from_shift(&shift, true));
        report
            .certificates
            .push(CertificateRecord::from_family(&family, true));
        report
            .certificates
            .push(CertificateRecord::from_embed(&embed, true));
        report
            .certificates
            .push(CertificateRecord::from_align(1, &triples, &align, true));
        assert!(verify_report(&report, None).is_ok());

        // Tamper with the alignment and watch it fail.
        if let CertificateRecord::Align { z, .. } = &mut report.certificates[3] {
            *z = "11".into();
        }
        assert!(verify_report(&report, None).is_err());
    }
}
