//! Syndetic-set windows: a finite truncation of a set of naturals with a
//! measured gap bound, plus the rule DSL that generates them, seeded random
//! l-syndetic generators, and the on-disk set-file format.
//!
//! A set A of naturals is l-syndetic when every run of l consecutive
//! integers meets A. A window stores A intersected with [1, N] as a bitmap;
//! the stretch past the last member is unmeasurable from the window and is
//! excluded from gap analysis, so the window is an honest finite proxy.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SynsetError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("rule is not syndetic in window: measured gap {measured} exceeds bound {bound}")]
    NotSyndeticInWindow { measured: u64, bound: u64 },
    #[error("window is empty")]
    EmptyWindow,
    #[error("invalid rule: {0}")]
    InvalidRule(String),
    #[error("malformed set file: {0}")]
    MalformedFile(String),
    #[error("io error: {0}")]
    Io(String),
}

// ---------------------------------------------------------------------------
// Bitmap
// ---------------------------------------------------------------------------

/// Fixed-capacity bitmap over [1, upper]; bit x-1 represents membership of x.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Bitmap {
    words: Vec<u64>,
    upper: u64,
}

impl Bitmap {
    fn new(upper: u64) -> Self {
        let words = vec![0u64; (upper as usize).div_ceil(64)];
        Self { words, upper }
    }

    #[inline]
    fn set(&mut self, x: u64) {
        debug_assert!(x >= 1 && x <= self.upper);
        let i = (x - 1) as usize;
        self.words[i / 64] |= 1u64 << (i % 64);
    }

    #[inline]
    fn get(&self, x: u64) -> bool {
        if x == 0 || x > self.upper {
            return false;
        }
        let i = (x - 1) as usize;
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    fn count(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    None
                } else {
                    let b = bits.trailing_zeros() as u64;
                    bits &= bits - 1;
                    Some(wi as u64 * 64 + b + 1)
                }
            })
        })
    }
}

// ---------------------------------------------------------------------------
// SyndeticWindow
// ---------------------------------------------------------------------------

/// The trace of a set on [1, N] with its claimed syndeticity bound l.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyndeticWindow {
    upper: u64,
    l: u64,
    bits: Bitmap,
    provenance: String,
}

impl SyndeticWindow {
    /// Builds a window from an ascending member list. When `claimed_l` is
    /// given it must be at least the measured gap; otherwise l is set to the
    /// measured gap itself (or N for an empty window, vacuously).
    pub fn from_members<I: IntoIterator<Item = u64>>(
        members: I,
        upper: u64,
        claimed_l: Option<u64>,
        provenance: impl Into<String>,
    ) -> Result<Self, SynsetError> {
        let mut bits = Bitmap::new(upper);
        for x in members {
            if x == 0 || x > upper {
                return Err(SynsetError::MalformedFile(format!(
                    "member {x} outside [1, {upper}]"
                )));
            }
            bits.set(x);
        }
        let mut w = Self {
            upper,
            l: 0,
            bits,
            provenance: provenance.into(),
        };
        let measured = w.measured_gap().unwrap_or(upper.max(1));
        match claimed_l {
            Some(l) if l < measured => {
                return Err(SynsetError::NotSyndeticInWindow { measured, bound: l })
            }
            Some(l) => w.l = l,
            None => w.l = measured,
        }
        Ok(w)
    }

    /// Builds a window trusting the stated l instead of validating it
    /// against the measured gap. For raw traces and engineered fixtures
    /// where the caller owns the claim; files loaded from disk are always
    /// validated.
    pub fn from_raw_parts<I: IntoIterator<Item = u64>>(
        members: I,
        upper: u64,
        l: u64,
        provenance: impl Into<String>,
    ) -> Result<Self, SynsetError> {
        let mut bits = Bitmap::new(upper);
        for x in members {
            if x == 0 || x > upper {
                return Err(SynsetError::MalformedFile(format!(
                    "member {x} outside [1, {upper}]"
                )));
            }
            bits.set(x);
        }
        Ok(Self {
            upper,
            l,
            bits,
            provenance: provenance.into(),
        })
    }

    pub fn upper(&self) -> u64 {
        self.upper
    }

    /// Claimed syndeticity bound.
    pub fn l(&self) -> u64 {
        self.l
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    #[inline]
    pub fn contains(&self, x: u64) -> bool {
        self.bits.get(x)
    }

    pub fn contains_big(&self, x: &num_bigint::BigUint) -> bool {
        u64::try_from(x).map(|x| self.contains(x)).unwrap_or(false)
    }

    pub fn len(&self) -> u64 {
        self.bits.count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn members(&self) -> impl Iterator<Item = u64> + '_ {
        self.bits.iter()
    }

    pub fn first_member(&self) -> Option<u64> {
        self.members().next()
    }

    pub fn last_member(&self) -> Option<u64> {
        self.bits
            .words
            .iter()
            .enumerate()
            .rev()
            .find(|(_, w)| **w != 0)
            .map(|(wi, w)| wi as u64 * 64 + (63 - w.leading_zeros() as u64) + 1)
    }

    fn measured_gap(&self) -> Option<u64> {
        let mut prev: Option<u64> = None;
        let mut worst = 0u64;
        for x in self.members() {
            let step = match prev {
                None => x,
                Some(p) => x - p,
            };
            worst = worst.max(step);
            prev = Some(x);
        }
        prev.map(|_| worst)
    }

    /// Writes the set file: a `# synset v1 N=<upper> l=<claimed>` header
    /// followed by the members in ascending decimal, one per line. The write
    /// is atomic (temp file in the target directory, then rename).
    pub fn save(&self, path: &Path) -> Result<(), SynsetError> {
        let dir = path.parent().unwrap_or_else(|| Path::new("."));
        let tmp = dir.join(format!(
            ".{}.tmp",
            path.file_name()
                .map(|f| f.to_string_lossy().into_owned())
                .unwrap_or_else(|| "synset".into())
        ));
        let mut out = String::new();
        out.push_str(&format!("# synset v1 N={} l={}\n", self.upper, self.l));
        for x in self.members() {
            out.push_str(&format!("{x}\n"));
        }
        let mut f = fs::File::create(&tmp).map_err(|e| SynsetError::Io(e.to_string()))?;
        f.write_all(out.as_bytes())
            .map_err(|e| SynsetError::Io(e.to_string()))?;
        f.sync_all().map_err(|e| SynsetError::Io(e.to_string()))?;
        fs::rename(&tmp, path).map_err(|e| SynsetError::Io(e.to_string()))?;
        Ok(())
    }

    /// Parses a set file, validating the header, ascending order, range, and
    /// that the claimed l is consistent with the measured gap.
    pub fn load(path: &Path) -> Result<Self, SynsetError> {
        let text = fs::read_to_string(path).map_err(|e| SynsetError::Io(e.to_string()))?;
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| SynsetError::MalformedFile("empty file".into()))?;
        let rest = header
            .strip_prefix("# synset v1 N=")
            .ok_or_else(|| SynsetError::MalformedFile("bad header".into()))?;
        let (n_part, l_part) = rest
            .split_once(" l=")
            .ok_or_else(|| SynsetError::MalformedFile("bad header".into()))?;
        let upper: u64 = n_part
            .parse()
            .map_err(|_| SynsetError::MalformedFile("bad N in header".into()))?;
        let l: u64 = l_part
            .parse()
            .map_err(|_| SynsetError::MalformedFile("bad l in header".into()))?;
        let mut members = Vec::new();
        let mut prev = 0u64;
        for line in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let x: u64 = line
                .parse()
                .map_err(|_| SynsetError::MalformedFile(format!("bad member line {line:?}")))?;
            if x <= prev {
                return Err(SynsetError::MalformedFile(format!(
                    "members not strictly ascending at {x}"
                )));
            }
            prev = x;
            members.push(x);
        }
        Self::from_members(members, upper, Some(l), path.display().to_string()).map_err(|e| match e
        {
            SynsetError::NotSyndeticInWindow { measured, bound } => SynsetError::MalformedFile(
                format!("claimed l={bound} below measured gap {measured}"),
            ),
            other => other,
        })
    }
}

/// The least l such that the window is l-syndetic on [1, N]: the maximum of
/// the first member and all successive member differences. The tail past the
/// last member is excluded by design.
pub fn syndetic_gap(window: &SyndeticWindow) -> Result<u64, SynsetError> {
    window.measured_gap().ok_or(SynsetError::EmptyWindow)
}

// ---------------------------------------------------------------------------
// Rule DSL
// ---------------------------------------------------------------------------

/// Expression tree over the set-construction primitives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SetRule {
    /// Arithmetic progression start, start+step, ...
    Ap {
        start: u64,
        step: u64,
    },
    List(Vec<u64>),
    Union(Vec<SetRule>),
    Intersect(Vec<SetRule>),
    /// Everything in [1, N] except the members of the inner rule.
    ComplementOfSparse(Box<SetRule>),
    /// Seeded l-syndetic generator; `density` is an extra-member percentage.
    RandomSyndetic {
        l: u64,
        density: u64,
        seed: u64,
    },
    Squares,
    Odds,
    Evens,
}

impl fmt::Display for SetRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetRule::Ap { start, step } => write!(f, "ap({start},{step})"),
            SetRule::List(xs) => {
                write!(f, "list(")?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ")")
            }
            SetRule::Union(rs) => {
                write!(f, "union(")?;
                for (i, r) in rs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{r}")?;
                }
                write!(f, ")")
            }
            SetRule::Intersect(rs) => {
                write!(f, "intersect(")?;
                for (i, r) in rs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{r}")?;
                }
                write!(f, ")")
            }
            SetRule::ComplementOfSparse(r) => write!(f, "complement-of-sparse({r})"),
            SetRule::RandomSyndetic { l, density, seed } => {
                if *density == 0 {
                    write!(f, "random-syndetic(l={l},seed={seed})")
                } else {
                    write!(f, "random-syndetic(l={l},density={density},seed={seed})")
                }
            }
            SetRule::Squares => write!(f, "squares"),
            SetRule::Odds => write!(f, "odds"),
            SetRule::Evens => write!(f, "evens"),
        }
    }
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn error<T>(&self, message: impl Into<String>) -> Result<T, SynsetError> {
        Err(SynsetError::Syntax {
            offset: self.pos,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.text.len() && self.text.as_bytes()[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.text.as_bytes().get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<(), SynsetError> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.error(format!("expected {:?}", c as char))
        }
    }

    fn ident(&mut self) -> Result<&'a str, SynsetError> {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == b'-' || c == b'_' {
                self.pos += 1;
            } else {
                break;
            }
        }
        if self.pos == start {
            return self.error("expected identifier");
        }
        Ok(&self.text[start..self.pos])
    }

    fn integer(&mut self) -> Result<u64, SynsetError> {
        self.skip_ws();
        let start = self.pos;
        while self.peek().map(|c| c.is_ascii_digit()).unwrap_or(false) {
            self.pos += 1;
        }
        if self.pos == start {
            return self.error("expected integer");
        }
        self.text[start..self.pos]
            .parse()
            .or_else(|_| self.error("integer out of range"))
    }

    fn integer_args(&mut self) -> Result<Vec<u64>, SynsetError> {
        let mut args = Vec::new();
        self.expect(b'(')?;
        self.skip_ws();
        if self.peek() == Some(b')') {
            self.pos += 1;
            return Ok(args);
        }
        loop {
            args.push(self.integer()?);
            self.skip_ws();
            match self.peek() {
                Some(b',') => self.pos += 1,
                Some(b')') => {
                    self.pos += 1;
                    return Ok(args);
                }
                _ => return self.error("expected ',' or ')'"),
            }
        }
    }

    fn rule_args(&mut self) -> Result<Vec<SetRule>, SynsetError> {
        let mut args = Vec::new();
        self.expect(b'(')?;
        loop {
            args.push(self.rule()?);
            self.skip_ws();
            match self.peek() {
                Some(b',') => self.pos += 1,
                Some(b')') => {
                    self.pos += 1;
                    return Ok(args);
                }
                _ => return self.error("expected ',' or ')'"),
            }
        }
    }

    fn keyword_args(&mut self) -> Result<Vec<(&'a str, u64)>, SynsetError> {
        let mut args = Vec::new();
        self.expect(b'(')?;
        loop {
            let key = self.ident()?;
            self.expect(b'=')?;
            let value = self.integer()?;
            args.push((key, value));
            self.skip_ws();
            match self.peek() {
                Some(b',') => self.pos += 1,
                Some(b')') => {
                    self.pos += 1;
                    return Ok(args);
                }
                _ => return self.error("expected ',' or ')'"),
            }
        }
    }

    fn rule(&mut self) -> Result<SetRule, SynsetError> {
        let name = self.ident()?;
        match name {
            "ap" => {
                let args = self.integer_args()?;
                if args.len() != 2 {
                    return self.error("ap takes exactly two arguments");
                }
                Ok(SetRule::Ap {
                    start: args[0],
                    step: args[1],
                })
            }
            "list" => Ok(SetRule::List(self.integer_args()?)),
            "union" => Ok(SetRule::Union(self.rule_args()?)),
            "intersect" => Ok(SetRule::Intersect(self.rule_args()?)),
            "complement-of-sparse" => {
                let mut args = self.rule_args()?;
                if args.len() != 1 {
                    return self.error("complement-of-sparse takes one argument");
                }
                Ok(SetRule::ComplementOfSparse(Box::new(args.remove(0))))
            }
            "random-syndetic" => {
                let kw = self.keyword_args()?;
                let mut l = None;
                let mut density = 0u64;
                let mut seed = None;
                for (k, v) in kw {
                    match k {
                        "l" => l = Some(v),
                        "density" => density = v,
                        "seed" => seed = Some(v),
                        other => return self.error(format!("unknown key {other:?}")),
                    }
                }
                match (l, seed) {
                    (Some(l), Some(seed)) => Ok(SetRule::RandomSyndetic { l, density, seed }),
                    _ => self.error("random-syndetic requires l= and seed="),
                }
            }
            "squares" => {
                self.maybe_empty_parens()?;
                Ok(SetRule::Squares)
            }
            "odds" => {
                self.maybe_empty_parens()?;
                Ok(SetRule::Odds)
            }
            "evens" => {
                self.maybe_empty_parens()?;
                Ok(SetRule::Evens)
            }
            other => self.error(format!("unknown rule {other:?}")),
        }
    }

    fn maybe_empty_parens(&mut self) -> Result<(), SynsetError> {
        self.skip_ws();
        if self.peek() == Some(b'(') {
            self.pos += 1;
            self.expect(b')')?;
        }
        Ok(())
    }
}

/// Parses rule text into an expression tree. Errors carry a byte offset.
pub fn parse_rule(text: &str) -> Result<SetRule, SynsetError> {
    let mut p = Parser { text, pos: 0 };
    let rule = p.rule()?;
    p.skip_ws();
    if p.pos != text.len() {
        return p.error("trailing input");
    }
    Ok(rule)
}

fn eval(rule: &SetRule, upper: u64, bits: &mut Bitmap) -> Result<(), SynsetError> {
    match rule {
        SetRule::Ap { start, step } => {
            if *step == 0 {
                return Err(SynsetError::InvalidRule("ap step must be >= 1".into()));
            }
            let mut x = *start;
            if x == 0 {
                x = *step;
            }
            while x <= upper {
                bits.set(x);
                x += step;
            }
            Ok(())
        }
        SetRule::List(xs) => {
            for &x in xs {
                if x >= 1 && x <= upper {
                    bits.set(x);
                }
            }
            Ok(())
        }
        SetRule::Union(rs) => {
            for r in rs {
                eval(r, upper, bits)?;
            }
            Ok(())
        }
        SetRule::Intersect(rs) => {
            if rs.is_empty() {
                return Err(SynsetError::InvalidRule("empty intersect".into()));
            }
            let mut acc: Option<Bitmap> = None;
            for r in rs {
                let mut b = Bitmap::new(upper);
                eval(r, upper, &mut b)?;
                acc = Some(match acc {
                    None => b,
                    Some(mut a) => {
                        for (w, v) in a.words.iter_mut().zip(b.words.iter()) {
                            *w &= v;
                        }
                        a
                    }
                });
            }
            let a = acc.expect("non-empty intersect");
            for (w, v) in bits.words.iter_mut().zip(a.words.iter()) {
                *w |= v;
            }
            Ok(())
        }
        SetRule::ComplementOfSparse(r) => {
            let mut inner = Bitmap::new(upper);
            eval(r, upper, &mut inner)?;
            for x in 1..=upper {
                if !inner.get(x) {
                    bits.set(x);
                }
            }
            Ok(())
        }
        SetRule::RandomSyndetic { l, density, seed } => {
            if *l == 0 {
                return Err(SynsetError::InvalidRule(
                    "random-syndetic needs l >= 1".into(),
                ));
            }
            if *density > 100 {
                return Err(SynsetError::InvalidRule(
                    "density is a percentage (0..=100)".into(),
                ));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            // One pick in every sliding block of l integers: the next member
            // is chosen uniformly from the l integers after the previous one,
            // which bounds the first member and all member gaps by l.
            let mut pos = 0u64;
            loop {
                pos += rng.gen_range(1..=*l);
                if pos > upper {
                    break;
                }
                bits.set(pos);
            }
            if *density > 0 {
                for x in 1..=upper {
                    if !bits.get(x) && rng.gen_range(0u64..100) < *density {
                        bits.set(x);
                    }
                }
            }
            Ok(())
        }
        SetRule::Squares => {
            let mut k = 1u64;
            while k * k <= upper {
                bits.set(k * k);
                k += 1;
            }
            Ok(())
        }
        SetRule::Odds => eval(&SetRule::Ap { start: 1, step: 2 }, upper, bits),
        SetRule::Evens => eval(&SetRule::Ap { start: 2, step: 2 }, upper, bits),
    }
}

fn isqrt_ceil(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r < n {
        r += 1;
    }
    while r > 0 && (r - 1) * (r - 1) >= n {
        r -= 1;
    }
    r
}

/// Evaluates a rule into a window of [1, N]. The window's l is the measured
/// gap. A rule whose measured gap exceeds the acceptance bound is rejected:
/// the bound is the rule's declared l for a top-level random-syndetic rule,
/// `max_gap` when the caller supplies one, and ceil(sqrt(N)) otherwise
/// (a gap that grows with the window is not usefully syndetic).
pub fn materialize(
    rule: &SetRule,
    upper: u64,
    max_gap: Option<u64>,
) -> Result<SyndeticWindow, SynsetError> {
    let mut bits = Bitmap::new(upper);
    eval(rule, upper, &mut bits)?;
    let provenance = rule.to_string();
    let mut window = SyndeticWindow {
        upper,
        l: 0,
        bits,
        provenance,
    };
    let measured = syndetic_gap(&window)?;
    let bound = max_gap.unwrap_or(match rule {
        SetRule::RandomSyndetic { l, .. } => *l,
        _ => isqrt_ceil(upper).max(1),
    });
    if measured > bound {
        return Err(SynsetError::NotSyndeticInWindow { measured, bound });
    }
    window.l = measured;
    Ok(window)
}

/// Replaces the seed of every random primitive in the tree (CLI --seed).
pub fn override_seed(rule: &mut SetRule, seed: u64) {
    match rule {
        SetRule::RandomSyndetic { seed: s, .. } => *s = seed,
        SetRule::Union(rs) | SetRule::Intersect(rs) => {
            for r in rs {
                override_seed(r, seed);
            }
        }
        SetRule::ComplementOfSparse(r) => override_seed(r, seed),
        _ => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parse_examples() {
        assert_eq!(
            parse_rule("ap(1,2)").unwrap(),
            SetRule::Ap { start: 1, step: 2 }
        );
        assert_eq!(
            parse_rule("union(ap(0,3),ap(1,3))").unwrap(),
            SetRule::Union(vec![
                SetRule::Ap { start: 0, step: 3 },
                SetRule::Ap { start: 1, step: 3 },
            ])
        );
        match parse_rule("ap(1,") {
            Err(SynsetError::Syntax { offset, .. }) => assert_eq!(offset, 5),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn parse_random_syndetic_keywords() {
        assert_eq!(
            parse_rule("random-syndetic(l=2, seed=42)").unwrap(),
            SetRule::RandomSyndetic {
                l: 2,
                density: 0,
                seed: 42
            }
        );
        assert_eq!(
            parse_rule("random-syndetic(seed=1,density=25,l=3)").unwrap(),
            SetRule::RandomSyndetic {
                l: 3,
                density: 25,
                seed: 1
            }
        );
    }

    #[test]
    fn render_round_trip() {
        for text in [
            "ap(1,2)",
            "union(ap(0,3),ap(1,3))",
            "intersect(odds,complement-of-sparse(squares))",
            "random-syndetic(l=2,seed=7)",
            "random-syndetic(l=2,density=10,seed=7)",
            "list(1,2,3,10)",
            "evens",
        ] {
            let rule = parse_rule(text).unwrap();
            let rendered = rule.to_string();
            assert_eq!(parse_rule(&rendered).unwrap(), rule, "via {rendered}");
        }
    }

    #[test]
    fn materialize_odds() {
        let w = materialize(&parse_rule("ap(1,2)").unwrap(), 10, None).unwrap();
        assert_eq!(w.members().collect::<Vec<_>>(), vec![1, 3, 5, 7, 9]);
        assert_eq!(w.l(), 2);
    }

    #[test]
    fn materialize_squares_rejected() {
        let e = materialize(&parse_rule("squares").unwrap(), 100, None).unwrap_err();
        match e {
            SynsetError::NotSyndeticInWindow { measured, .. } => assert_eq!(measured, 19),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn materialize_random_syndetic_is_deterministic_and_tight() {
        let rule = parse_rule("random-syndetic(l=2,seed=42)").unwrap();
        let a = materialize(&rule, 100, None).unwrap();
        let b = materialize(&rule, 100, None).unwrap();
        assert_eq!(a, b);
        assert!(syndetic_gap(&a).unwrap() <= 2);
    }

    #[test]
    fn random_syndetic_gap_bound_over_seeds() {
        for seed in 0..200u64 {
            let rule = SetRule::RandomSyndetic {
                l: 3,
                density: 0,
                seed,
            };
            let w = materialize(&rule, 5_000, None).unwrap();
            assert!(syndetic_gap(&w).unwrap() <= 3, "seed {seed}");
        }
    }

    #[test]
    fn gap_examples() {
        let w = SyndeticWindow::from_members((1..=99).step_by(2), 100, None, "odds").unwrap();
        assert_eq!(syndetic_gap(&w).unwrap(), 2);

        let w = SyndeticWindow::from_members(1..=50, 50, None, "full").unwrap();
        assert_eq!(syndetic_gap(&w).unwrap(), 1);

        let members = std::iter::once(1).chain(5..=20);
        let w = SyndeticWindow::from_members(members, 20, None, "gap4").unwrap();
        assert_eq!(syndetic_gap(&w).unwrap(), 4);

        let w = SyndeticWindow::from_members(std::iter::empty(), 10, None, "empty").unwrap();
        assert_eq!(syndetic_gap(&w), Err(SynsetError::EmptyWindow));
    }

    #[test]
    fn save_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("w.synset");
        let w = materialize(&parse_rule("ap(1,2)").unwrap(), 1000, None).unwrap();
        w.save(&path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("# synset v1 N=1000 l=2\n"));
        assert_eq!(text.lines().count(), 501);
        let back = SyndeticWindow::load(&path).unwrap();
        assert_eq!(back.upper(), w.upper());
        assert_eq!(back.l(), w.l());
        assert_eq!(
            back.members().collect::<Vec<_>>(),
            w.members().collect::<Vec<_>>()
        );
    }

    #[test]
    fn load_rejects_false_claim() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.synset");
        fs::write(&path, "# synset v1 N=10 l=1\n1\n5\n").unwrap();
        assert!(matches!(
            SyndeticWindow::load(&path),
            Err(SynsetError::MalformedFile(_))
        ));
    }

    #[test]
    fn load_rejects_descending() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad2.synset");
        fs::write(&path, "# synset v1 N=10 l=9\n5\n1\n").unwrap();
        assert!(matches!(
            SyndeticWindow::load(&path),
            Err(SynsetError::MalformedFile(_))
        ));
    }

    #[test]
    fn complement_of_sparse() {
        let w = materialize(
            &parse_rule("complement-of-sparse(squares)").unwrap(),
            100,
            None,
        )
        .unwrap();
        assert!(!w.contains(49));
        assert!(w.contains(50));
        assert_eq!(w.len(), 90);
    }

    #[test]
    fn load_accepts_coarser_claim() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("coarse.synset");
        fs::write(&path, "# synset v1 N=10 l=5\n1\n3\n5\n7\n9\n").unwrap();
        let w = SyndeticWindow::load(&path).unwrap();
        assert_eq!(w.l(), 5);
        assert_eq!(syndetic_gap(&w).unwrap(), 2);
    }

    fn rule_strategy() -> impl Strategy<Value = SetRule> {
        let leaf = prop_oneof![
            (0u64..50, 1u64..10).prop_map(|(start, step)| SetRule::Ap { start, step }),
            proptest::collection::vec(1u64..500, 0..5).prop_map(SetRule::List),
            (1u64..4, 0u64..50, proptest::option::of(0u64..100)).prop_map(|(l, seed, d)| {
                SetRule::RandomSyndetic {
                    l,
                    density: d.unwrap_or(0),
                    seed,
                }
            }),
            Just(SetRule::Squares),
            Just(SetRule::Odds),
            Just(SetRule::Evens),
        ];
        leaf.prop_recursive(3, 16, 4, |inner| {
            prop_oneof![
                proptest::collection::vec(inner.clone(), 1..4).prop_map(SetRule::Union),
                proptest::collection::vec(inner.clone(), 1..4).prop_map(SetRule::Intersect),
                inner.prop_map(|r| SetRule::ComplementOfSparse(Box::new(r))),
            ]
        })
    }

    proptest! {
        #[test]
        fn renders_always_reparse(rule in rule_strategy()) {
            let text = rule.to_string();
            prop_assert_eq!(parse_rule(&text).unwrap(), rule);
        }

        #[test]
        fn window_membership_matches_rule(n in 10u64..300) {
            let w = materialize(&SetRule::Ap { start: 2, step: 2 }, n, None).unwrap();
            for x in 1..=n {
                prop_assert_eq!(w.contains(x), x % 2 == 0);
            }
        }

        #[test]
        fn save_load_preserves_arbitrary_windows(
            members in proptest::collection::btree_set(1u64..500, 1..60),
            slack in 0u64..20,
        ) {
            let upper = members.iter().max().copied().unwrap() + slack;
            let w = SyndeticWindow::from_members(members.iter().copied(), upper, None, "prop")
                .unwrap();
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("w.synset");
            w.save(&path).unwrap();
            let back = SyndeticWindow::load(&path).unwrap();
            prop_assert_eq!(back.upper(), w.upper());
            prop_assert_eq!(back.l(), w.l());
            prop_assert_eq!(
                back.members().collect::<Vec<_>>(),
                w.members().collect::<Vec<_>>()
            );
        }
    }
}
