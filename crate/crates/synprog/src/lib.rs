//! Certificate-producing constructions and searches for 2-term geometric
//! progressions in syndetic sets.
//!
//! The crate is organized as a small stack:
//!
//! - [`arith`] — big-integer primitives: gcd/lcm, factorization, prime
//!   enumeration, pairwise-coprimality, and a certified CRT solver.
//! - [`lattice`] — the finite divisor lattice T(l) with its r(p, l)
//!   exponent table and the Mul(F) closure queries.
//! - [`synset`] — syndetic-set windows: the rule DSL, seeded random
//!   generators, gap analysis and the set-file format.
//! - [`construct`] — executable constructions: CRT shift certificates, the
//!   gap-or-progression dichotomy, gcd-controlled families, interval
//!   embeddings, offset alignment, and Triveni-triplet extraction/growth.
//! - [`gp`] — geometric-progression finders for square ratios in
//!   2-syndetic windows and ratios of the form n^k * r, all certified
//!   against a brute-force enumeration oracle.
//! - [`report`] — the machine-readable JSON report schema emitted by the
//!   CLI, with independent re-verification.
//!
//! Every search result is a witness that can be re-checked from the window
//! alone; every construction carries enough data to re-substitute its
//! defining congruences exactly.

pub mod arith;
pub mod construct;
pub mod gp;
pub mod lattice;
pub mod report;
pub mod synset;
