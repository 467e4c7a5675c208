//! Command-line surface: generate/ingest set windows, run the progression
//! finders and constructions, verify reports, and emit machine-readable
//! JSON reports on stdout.
//!
//! Exit codes are a stable contract: 0 success, 1 inconclusive, 2 input
//! error, 3 guard/feasibility, 4 verification failure.

use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use synprog::construct::{
    align_offsets, crt_shift, embed_family, gcd_controlled_family, gp_from_pairwise_prime,
    grow_triveni_order, order_one_triveni, ConstructError, GrowOutcome, OrderOneOutcome,
    PairwisePrimeStream, TriveniBudget, TriveniTriplet,
};
use synprog::gp::{
    find_ratio_nkr, find_square_method1, find_square_method2, oracle_pair_matches,
    oracle_three_term_count, Branch, BranchWitness, RatioClass, DEFAULT_BUDGET,
};
use synprog::report::{CertificateRecord, Report, VerifyFailure};
use synprog::synset::{materialize, override_seed, parse_rule, SyndeticWindow, SynsetError};

const EXIT_OK: u8 = 0;
const EXIT_INCONCLUSIVE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_GUARD: u8 = 3;
const EXIT_VERIFY: u8 = 4;

#[derive(Parser)]
#[command(
    name = "synprog",
    version,
    about = "Constructive searches for geometric progressions in syndetic-set windows"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Materialize a rule into a set file.
    Gen {
        /// Rule text, e.g. "ap(1,2)" or "random-syndetic(l=2,seed=7)".
        rule: String,
        /// Window upper bound N.
        #[arg(long)]
        n: u64,
        /// Output path for the set file.
        #[arg(long)]
        out: PathBuf,
        /// Override the seed of every random primitive in the rule.
        #[arg(long)]
        seed: Option<u64>,
        /// Accept measured gaps up to this bound (default: declared l for
        /// random rules, ceil(sqrt(N)) otherwise).
        #[arg(long)]
        max_gap: Option<u64>,
    },
    /// Run a progression finder over a set file and print a JSON report.
    Find {
        set: PathBuf,
        /// square: both square-ratio methods; nkr: direct n^k r enumeration.
        #[arg(long)]
        mode: FindMode,
        /// Exponent k for nkr mode.
        #[arg(long, default_value_t = 1)]
        k: u32,
        /// Comma-separated admissible n values for nkr mode.
        #[arg(long, default_value = "2,3,5,7")]
        h: String,
        /// Witness budget per finder.
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
        /// Worker threads (output is identical for any value; 0 = default).
        #[arg(long, default_value_t = 0)]
        threads: usize,
        /// Also write the report to this path (atomic).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-check every witness and certificate of a report against a set file.
    Verify { report: PathBuf, set: PathBuf },
    /// Run a construction and print its certificate as a JSON report.
    Construct {
        #[command(subcommand)]
        kind: ConstructKind,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum FindMode {
    Square,
    Nkr,
}

#[derive(Subcommand)]
enum ConstructKind {
    /// CRT shift certificate from moduli and offsets.
    Shift {
        /// Comma-separated pairwise-coprime moduli, each >= 2.
        #[arg(long)]
        moduli: String,
        /// Comma-separated offsets, same length as moduli.
        #[arg(long)]
        offsets: String,
    },
    /// Gcd-controlled family for T(l).
    Family {
        #[arg(long)]
        l: u64,
        #[arg(long)]
        h: u64,
    },
    /// Family embedded into [n, n + m(h,l)].
    Embed {
        #[arg(long)]
        l: u64,
        #[arg(long)]
        h: u64,
        #[arg(long)]
        n: String,
    },
    /// Offset alignment for triples a:x:u (comma-separated).
    Align {
        #[arg(long)]
        l: u64,
        #[arg(long)]
        triples: String,
    },
    /// Seed an order-one triplet from a window and grow it once.
    Triveni(TriveniArgs),
}

#[derive(Args)]
struct TriveniArgs {
    /// Set file providing the window.
    #[arg(long)]
    set: PathBuf,
    /// Ratio exponent k.
    #[arg(long, default_value_t = 1)]
    k: u32,
    /// Witness size of the grown triplet (published floor is 2l+2).
    #[arg(long, default_value_t = 1)]
    k0: u64,
    /// Input witness prefix for the shift-certificate probes.
    #[arg(long, default_value_t = 1)]
    witness_size: usize,
    /// Embedded intervals to draw candidates from.
    #[arg(long, default_value_t = 1)]
    intervals: u64,
    /// Gap-certificate probe range.
    #[arg(long, default_value_t = 16)]
    t_max: u64,
    /// Enforce the published bounds instead of the scaled ones.
    #[arg(long, default_value_t = false)]
    published_exact: bool,
    /// Lattice parameter l for the triplet machinery.
    #[arg(long, default_value_t = 1)]
    l: u64,
    /// Pairwise-prime pool: primes | prime-squares | primes-coprime-to:<m>.
    #[arg(long, default_value = "primes")]
    h0: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Gen {
            rule,
            n,
            out,
            seed,
            max_gap,
        } => cmd_gen(&rule, n, &out, seed, max_gap),
        Command::Find {
            set,
            mode,
            k,
            h,
            budget,
            threads,
            out,
        } => cmd_find(&set, mode, k, &h, budget, threads, out.as_deref()),
        Command::Verify { report, set } => cmd_verify(&report, &set),
        Command::Construct { kind } => cmd_construct(kind),
    };
    ExitCode::from(code)
}

fn fail(code: u8, message: impl std::fmt::Display) -> u8 {
    eprintln!("synprog: {message}");
    code
}

fn synset_exit(e: &SynsetError) -> u8 {
    match e {
        SynsetError::Syntax { .. }
        | SynsetError::InvalidRule(_)
        | SynsetError::MalformedFile(_)
        | SynsetError::Io(_) => EXIT_INPUT,
        SynsetError::NotSyndeticInWindow { .. } | SynsetError::EmptyWindow => EXIT_GUARD,
    }
}

fn construct_exit(e: &ConstructError) -> u8 {
    match e {
        ConstructError::GrowthGuardExceeded(_) | ConstructError::Lattice(_) => EXIT_GUARD,
        ConstructError::NonCoprimeModuli(_)
        | ConstructError::NonCoprimeX(_)
        | ConstructError::PreconditionViolated(_) => EXIT_INPUT,
        ConstructError::WindowTooSmall(_)
        | ConstructError::NotFoundInWindow(_)
        | ConstructError::OrderBoundReached(_)
        | ConstructError::SyndeticityContradicted(_) => EXIT_INCONCLUSIVE,
        ConstructError::Internal(_) => EXIT_VERIFY,
    }
}

fn cmd_gen(rule_text: &str, n: u64, out: &Path, seed: Option<u64>, max_gap: Option<u64>) -> u8 {
    let mut rule = match parse_rule(rule_text) {
        Ok(r) => r,
        Err(e) => return fail(EXIT_INPUT, e),
    };
    if let Some(s) = seed {
        override_seed(&mut rule, s);
    }
    let window = match materialize(&rule, n, max_gap) {
        Ok(w) => w,
        Err(e) => return fail(synset_exit(&e), e),
    };
    if let Err(e) = window.save(out) {
        return fail(EXIT_INPUT, e);
    }
    println!(
        "wrote {} members, N={}, l={} to {}",
        window.len(),
        window.upper(),
        window.l(),
        out.display()
    );
    EXIT_OK
}

fn parse_u64_list(text: &str) -> Result<Vec<u64>, String> {
    text.split(',')
        .map(|s| s.trim().parse().map_err(|_| format!("bad integer {s:?}")))
        .collect()
}

fn emit(report: &mut Report, started: Instant, out: Option<&Path>) -> Result<(), u8> {
    report.elapsed_ms = started.elapsed().as_millis() as u64;
    let json = report.to_json();
    println!("{json}");
    if let Some(path) = out {
        let dir = path.parent().unwrap_or_else(|| Path::new("."));
        let tmp = dir.join(format!(
            ".{}.tmp",
            path.file_name()
                .map(|f| f.to_string_lossy().into_owned())
                .unwrap_or_else(|| "report".into())
        ));
        std::fs::write(&tmp, &json).map_err(|e| fail(EXIT_INPUT, e))?;
        std::fs::rename(&tmp, path).map_err(|e| fail(EXIT_INPUT, e))?;
    }
    Ok(())
}

fn cmd_find(
    set: &Path,
    mode: FindMode,
    k: u32,
    h_text: &str,
    budget: usize,
    threads: usize,
    out: Option<&Path>,
) -> u8 {
    let started = Instant::now();
    let window = match SyndeticWindow::load(set) {
        Ok(w) => w,
        Err(e) => return fail(EXIT_INPUT, e),
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p,
        Err(e) => return fail(EXIT_INPUT, e),
    };

    let (command, witnesses, mut diagnostics) = match mode {
        FindMode::Square => {
            let command = format!("find {} --mode square --budget {budget}", set.display());
            let mut diagnostics = Vec::new();
            let mut witnesses: Vec<BranchWitness> = Vec::new();
            let (m1, m2) = pool.install(|| {
                (
                    find_square_method1(&window, budget),
                    find_square_method2(&window, budget),
                )
            });
            for (label, outcome) in [("method1", m1), ("method2", m2)] {
                match outcome {
                    Ok(found) => {
                        diagnostics.extend(
                            found
                                .diagnostics
                                .iter()
                                .take(8)
                                .map(|d| format!("{label}: {d}")),
                        );
                        if !found.odd_squares.is_empty() {
                            diagnostics.push(format!(
                                "{label}: odd squares present: {:?}{}",
                                &found.odd_squares[..found.odd_squares.len().min(8)],
                                if found.odd_squares.len() > 8 {
                                    " ..."
                                } else {
                                    ""
                                }
                            ));
                        }
                        witnesses.extend(found.witnesses);
                    }
                    Err(e) => diagnostics.push(format!("{label}: {e}")),
                }
            }
            witnesses.sort_by_key(|b| {
                (
                    b.witness.x,
                    b.witness.ratio,
                    b.witness.n,
                    b.witness.r,
                    b.branch,
                )
            });
            witnesses.dedup_by(|a, b| a.witness == b.witness);
            witnesses.truncate(budget);
            for bw in &witnesses {
                let y = bw.witness.x * bw.witness.ratio;
                if !oracle_pair_matches(&window, &RatioClass::PerfectSquare, bw.witness.x, y) {
                    diagnostics.push(format!(
                        "witness (x={}, ratio={}) missing from the square oracle",
                        bw.witness.x, bw.witness.ratio
                    ));
                }
            }
            let three = oracle_three_term_count(&window, RatioClass::PerfectSquare, 1_000_000);
            diagnostics.push(format!("three-term square-ratio hits (bonus): {three}"));
            (command, witnesses, diagnostics)
        }
        FindMode::Nkr => {
            let h = match parse_u64_list(h_text) {
                Ok(h) => h,
                Err(e) => return fail(EXIT_INPUT, e),
            };
            let command = format!(
                "find {} --mode nkr --k {k} --h {h_text} --budget {budget}",
                set.display()
            );
            let witnesses = pool.install(|| find_ratio_nkr(&window, k, &h, budget));
            let mut diagnostics = Vec::new();
            let class = RatioClass::Nkr { k, h: h.clone() };
            for bw in &witnesses {
                let y = bw.witness.x * bw.witness.ratio;
                if !oracle_pair_matches(&window, &class, bw.witness.x, y) {
                    diagnostics.push(format!(
                        "witness (x={}, ratio={}) missing from the nkr oracle",
                        bw.witness.x, bw.witness.ratio
                    ));
                }
            }
            if witnesses.is_empty() {
                diagnostics
                    .push("no witness within the window (no nonexistence claim implied)".into());
            }
            (command, witnesses, diagnostics)
        }
    };

    let mut report = Report::new(command, Some(&window));
    report.push_witnesses(&window, &witnesses);
    report.diagnostics.append(&mut diagnostics);
    if emit(&mut report, started, out).is_err() {
        return EXIT_INPUT;
    }
    if report.any_verified() {
        EXIT_OK
    } else {
        EXIT_INCONCLUSIVE
    }
}

fn cmd_verify(report_path: &Path, set: &Path) -> u8 {
    let text = match std::fs::read_to_string(report_path) {
        Ok(t) => t,
        Err(e) => return fail(EXIT_INPUT, e),
    };
    let report: Report = match serde_json::from_str(&text) {
        Ok(r) => r,
        Err(e) => return fail(EXIT_INPUT, format!("malformed report: {e}")),
    };
    let window = match SyndeticWindow::load(set) {
        Ok(w) => w,
        Err(e) => return fail(EXIT_INPUT, e),
    };
    match synprog::report::verify_report(&report, Some(&window)) {
        Ok(()) => {
            println!(
                "verified: {} witnesses, {} certificates",
                report.witnesses.len(),
                report.certificates.len()
            );
            EXIT_OK
        }
        Err(VerifyFailure::Malformed(m)) => fail(EXIT_INPUT, m),
        Err(e) => fail(EXIT_VERIFY, e),
    }
}

fn cmd_construct(kind: ConstructKind) -> u8 {
    let started = Instant::now();
    match kind {
        ConstructKind::Shift { moduli, offsets } => {
            let (m, t) = match (parse_u64_list(&moduli), parse_u64_list(&offsets)) {
                (Ok(m), Ok(t)) => (m, t),
                (Err(e), _) | (_, Err(e)) => return fail(EXIT_INPUT, e),
            };
            let m: Vec<BigUint> = m.into_iter().map(BigUint::from).collect();
            let t: Vec<BigUint> = t.into_iter().map(BigUint::from).collect();
            let cert = match crt_shift(&m, &t) {
                Ok(c) => c,
                Err(e) => return fail(construct_exit(&e), e),
            };
            let recheck = cert.verify_range(0, 10);
            let mut report = Report::new(
                format!(
                    "construct shift --moduli {} --offsets {}",
                    moduli.trim(),
                    offsets.trim()
                ),
                None,
            );
            report
                .certificates
                .push(CertificateRecord::from_shift(&cert, recheck));
            let _ = emit(&mut report, started, None);
            if recheck {
                EXIT_OK
            } else {
                EXIT_VERIFY
            }
        }
        ConstructKind::Family { l, h } => {
            let family = match gcd_controlled_family(l, h) {
                Ok(f) => f,
                Err(e) => return fail(construct_exit(&e), e),
            };
            let lattice = match synprog::lattice::TlLattice::cached(l) {
                Ok(lat) => lat,
                Err(e) => return fail(EXIT_GUARD, e),
            };
            let recheck = family.verify(&lattice);
            let mut report = Report::new(format!("construct family --l {l} --h {h}"), None);
            report
                .certificates
                .push(CertificateRecord::from_family(&family, recheck));
            let _ = emit(&mut report, started, None);
            if recheck {
                EXIT_OK
            } else {
                EXIT_VERIFY
            }
        }
        ConstructKind::Embed { l, h, n } => {
            let n = match BigUint::from_str(&n) {
                Ok(n) => n,
                Err(_) => return fail(EXIT_INPUT, format!("bad integer {n:?}")),
            };
            let embedded = match embed_family(l, h, &n) {
                Ok(e) => e,
                Err(e) => return fail(construct_exit(&e), e),
            };
            let lattice = match synprog::lattice::TlLattice::cached(l) {
                Ok(lat) => lat,
                Err(e) => return fail(EXIT_GUARD, e),
            };
            let recheck = embedded.verify(&lattice);
            let mut report = Report::new(format!("construct embed --l {l} --h {h} --n {n}"), None);
            report
                .certificates
                .push(CertificateRecord::from_embed(&embedded, recheck));
            let _ = emit(&mut report, started, None);
            if recheck {
                EXIT_OK
            } else {
                EXIT_VERIFY
            }
        }
        ConstructKind::Align { l, triples } => {
            let mut parsed: Vec<(BigUint, BigUint, u64)> = Vec::new();
            for part in triples.split(',') {
                let fields: Vec<&str> = part.trim().split(':').collect();
                if fields.len() != 3 {
                    return fail(EXIT_INPUT, format!("triple {part:?} is not a:x:u"));
                }
                let a = BigUint::from_str(fields[0]);
                let x = BigUint::from_str(fields[1]);
                let u = fields[2].parse::<u64>();
                match (a, x, u) {
                    (Ok(a), Ok(x), Ok(u)) => parsed.push((a, x, u)),
                    _ => return fail(EXIT_INPUT, format!("triple {part:?} has bad integers")),
                }
            }
            let solution = match align_offsets(l, &parsed) {
                Ok(s) => s,
                Err(e) => return fail(construct_exit(&e), e),
            };
            let recheck = solution.satisfies(&parsed);
            let mut report = Report::new(
                format!("construct align --l {l} --triples {}", triples.trim()),
                None,
            );
            report.certificates.push(CertificateRecord::from_align(
                l, &parsed, &solution, recheck,
            ));
            let _ = emit(&mut report, started, None);
            if recheck {
                EXIT_OK
            } else {
                EXIT_VERIFY
            }
        }
        ConstructKind::Triveni(args) => cmd_construct_triveni(args, started),
    }
}

fn cmd_construct_triveni(args: TriveniArgs, started: Instant) -> u8 {
    let window = match SyndeticWindow::load(&args.set) {
        Ok(w) => w,
        Err(e) => return fail(EXIT_INPUT, e),
    };
    let h0 = match PairwisePrimeStream::parse(&args.h0) {
        Some(s) => s,
        None => return fail(EXIT_INPUT, format!("unknown stream {:?}", args.h0)),
    };
    let budget = if args.published_exact {
        match TriveniBudget::published(args.l, args.k0.max(1)) {
            Ok(b) => b,
            Err(e) => return fail(construct_exit(&e), e),
        }
    } else {
        TriveniBudget::scaled(args.k0, args.witness_size, args.intervals, args.t_max)
    };
    let command = format!(
        "construct triveni --set {} --l {} --k {} --k0 {} --witness-size {} --intervals {} \
         --t-max {} --h0 {}",
        args.set.display(),
        args.l,
        args.k,
        args.k0,
        args.witness_size,
        args.intervals,
        args.t_max,
        h0
    );
    let mut report = Report::new(command, Some(&window));
    let seed_size = budget.witness_size.max(budget.k0 as usize);

    // The divisor-escape hypothesis behind the order-one search is only
    // partially checkable on a window; report how much of it holds.
    let (supported, checked) = synprog::construct::divisor_escape_support(&window, 64);
    report.diagnostics.push(format!(
        "divisor-escape hypothesis support: {supported}/{checked} scales have two missing \
         multiples in-window (tail unverifiable)"
    ));

    let seed = match order_one_triveni(&window, seed_size) {
        Ok(OrderOneOutcome::Triplet { d, witnesses }) => TriveniTriplet {
            l: args.l,
            h: seed_size,
            f: vec![d],
            witnesses: std::collections::BTreeMap::from([(d, witnesses)]),
        },
        Ok(OrderOneOutcome::UnitScaleOnly { witnesses }) => {
            report
                .diagnostics
                .push("only the unit scale reached the seed size; taking the direct route".into());
            match gp_from_pairwise_prime(&window, &witnesses, args.k, &h0, args.t_max) {
                Ok(w) => {
                    report.push_witnesses(
                        &window,
                        &[BranchWitness {
                            witness: w,
                            branch: Branch::ShiftInterval,
                        }],
                    );
                    let _ = emit(&mut report, started, None);
                    return if report.any_verified() {
                        EXIT_OK
                    } else {
                        EXIT_VERIFY
                    };
                }
                Err(e) => {
                    report.diagnostics.push(e.to_string());
                    let _ = emit(&mut report, started, None);
                    return construct_exit(&e);
                }
            }
        }
        Err(e) => {
            report.diagnostics.push(e.to_string());
            let _ = emit(&mut report, started, None);
            return construct_exit(&e);
        }
    };
    if !synprog::construct::verify_triveni(&window, &seed) {
        return fail(EXIT_VERIFY, "seed triplet failed verification");
    }
    report
        .certificates
        .push(CertificateRecord::from_triveni(&seed, true));

    match grow_triveni_order(&window, &seed, args.k, &h0, &budget) {
        Ok(GrowOutcome::Grown {
            triplet,
            diagnostics,
        }) => {
            report.diagnostics.extend(diagnostics);
            let recheck = synprog::construct::verify_triveni(&window, &triplet);
            report
                .certificates
                .push(CertificateRecord::from_triveni(&triplet, recheck));
            let _ = emit(&mut report, started, None);
            if recheck {
                EXIT_OK
            } else {
                EXIT_VERIFY
            }
        }
        Ok(GrowOutcome::Witness(w)) => {
            report.push_witnesses(
                &window,
                &[BranchWitness {
                    witness: w,
                    branch: Branch::ShiftInterval,
                }],
            );
            let _ = emit(&mut report, started, None);
            if report.any_verified() {
                EXIT_OK
            } else {
                EXIT_VERIFY
            }
        }
        Err(e) => {
            report.diagnostics.push(e.to_string());
            let _ = emit(&mut report, started, None);
            construct_exit(&e)
        }
    }
}
