//! Formal words over the generators `g(i)` and `t(s)`, their evaluation as
//! PL maps, the substitution homomorphisms rho and theta, and the exact
//! verification that `theta rho` squares to the identity on generators.
//!
//! Text grammar: whitespace-separated tokens `g(i)` or `t(s)`, each with an
//! optional `^e`, e.g. `t(2)^-1 g(0) t(2)`. The empty string is the empty
//! word.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::plmap::PlMap;
use crate::rational::Rational;
use crate::thompson::{factorize, generator_g, generator_t, is_member};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GenSymbol {
    /// `g_{n,i}`
    G(i64),
    /// `t_s: x -> x + s`
    T(i64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Letter {
    pub symbol: GenSymbol,
    pub exp: i64,
}

impl Letter {
    pub fn g(i: i64, exp: i64) -> Self {
        Letter {
            symbol: GenSymbol::G(i),
            exp,
        }
    }

    pub fn t(s: i64, exp: i64) -> Self {
        Letter {
            symbol: GenSymbol::T(s),
            exp,
        }
    }
}

/// A freely reduced word: no zero exponents, no two adjacent letters with the
/// same symbol. No relations are applied.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn empty() -> Self {
        Word::default()
    }

    pub fn from_letters(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut w = Word::empty();
        for l in letters {
            w.push(l);
        }
        w
    }

    pub fn letter(l: Letter) -> Self {
        Word::from_letters([l])
    }

    pub fn push(&mut self, l: Letter) {
        if l.exp == 0 {
            return;
        }
        match self.letters.last_mut() {
            Some(last) if last.symbol == l.symbol => {
                last.exp += l.exp;
                if last.exp == 0 {
                    self.letters.pop();
                }
            }
            _ => self.letters.push(l),
        }
    }

    pub fn append(&mut self, other: &Word) {
        for l in &other.letters {
            self.push(*l);
        }
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut w = self.clone();
        w.append(other);
        w
    }

    pub fn inverse(&self) -> Word {
        Word::from_letters(self.letters.iter().rev().map(|l| Letter {
            symbol: l.symbol,
            exp: -l.exp,
        }))
    }

    pub fn pow(&self, e: i64) -> Word {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut w = Word::empty();
        for _ in 0..e.unsigned_abs() {
            w.append(&base);
        }
        w
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Total number of generator occurrences, counting exponents.
    pub fn syllable_length(&self) -> u64 {
        self.letters.iter().map(|l| l.exp.unsigned_abs()).sum()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            match l.symbol {
                GenSymbol::G(i) => write!(f, "g({i})")?,
                GenSymbol::T(s) => write!(f, "t({s})")?,
            }
            if l.exp != 1 {
                write!(f, "^{}", l.exp)?;
            }
        }
        Ok(())
    }
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl Cursor<'_> {
    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(|c: char| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.src[self.pos..].starts_with(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected '{c}'")))
        }
    }

    fn integer(&mut self) -> Result<i64> {
        let start = self.pos;
        self.eat('-');
        while self.src[self.pos..].starts_with(|c: char| c.is_ascii_digit()) {
            self.pos += 1;
        }
        self.src[start..self.pos]
            .parse()
            .map_err(|_| self.error("expected an integer"))
    }

    fn error(&self, msg: &str) -> Error {
        Error::Parse(format!("word {:?} at offset {}: {msg}", self.src, self.pos))
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut cur = Cursor { src: s, pos: 0 };
        let mut word = Word::empty();
        loop {
            cur.skip_ws();
            if cur.pos == s.len() {
                return Ok(word);
            }
            let make: fn(i64, i64) -> Letter = if cur.eat('g') {
                Letter::g
            } else if cur.eat('t') {
                Letter::t
            } else {
                return Err(cur.error("expected 'g(' or 't('"));
            };
            cur.expect('(')?;
            cur.skip_ws();
            let index = cur.integer()?;
            cur.skip_ws();
            cur.expect(')')?;
            let exp = if cur.eat('^') { cur.integer()? } else { 1 };
            word.push(make(index, exp));
        }
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn letter_map(n: u32, l: &Letter) -> PlMap {
    match l.symbol {
        GenSymbol::G(i) => generator_g(n, i).pow(l.exp),
        GenSymbol::T(s) => generator_t(s.checked_mul(l.exp).expect("translation overflow")),
    }
}

/// The product of the letters, applied left to right.
pub fn word_eval(n: u32, w: &Word) -> PlMap {
    w.letters
        .iter()
        .fold(PlMap::identity(), |acc, l| acc.compose(&letter_map(n, l)))
}

/// Letterwise image under conjugation by `x -> -x`:
/// `g(i) -> g(-i-1) t(n-1)^-1` and `t(s) -> t(s)^-1`.
pub fn rho_apply(n: u32, w: &Word) -> Word {
    let shift = n as i64 - 1;
    let mut out = Word::empty();
    for l in &w.letters {
        let image = match l.symbol {
            GenSymbol::G(i) => Word::from_letters([Letter::g(-i - 1, 1), Letter::t(shift, -1)]),
            GenSymbol::T(s) => Word::letter(Letter::t(s, -1)),
        };
        out.append(&image.pow(l.exp));
    }
    out
}

/// A word-level description of an automorphism theta of F_{2,inf}: the image
/// of `g(0)` as a word over the slots `g(0)` and `t(1)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawThetaSpec")]
pub struct ThetaSpec {
    pub w: Word,
    pub f1: Option<PlMap>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawThetaSpec {
    w: Word,
    #[serde(default)]
    f1: Option<PlMap>,
}

impl TryFrom<RawThetaSpec> for ThetaSpec {
    type Error = Error;
    fn try_from(raw: RawThetaSpec) -> Result<Self> {
        ThetaSpec::new(raw.w, raw.f1)
    }
}

impl ThetaSpec {
    /// `w` may only use the slot letters `g(0)` and `t(1)`.
    pub fn new(w: Word, f1: Option<PlMap>) -> Result<Self> {
        let bad = w
            .letters()
            .iter()
            .find(|l| !matches!(l.symbol, GenSymbol::G(0) | GenSymbol::T(1)));
        if let Some(l) = bad {
            return Err(Error::Parse(format!(
                "theta word may only use g(0) and t(1), found {}",
                Word::letter(*l)
            )));
        }
        Ok(ThetaSpec { w, f1 })
    }

    pub fn identity() -> Self {
        ThetaSpec {
            w: Word::letter(Letter::g(0, 1)),
            f1: Some(PlMap::identity()),
        }
    }

    /// `w(g(i), t(n-1))`.
    pub fn instantiate(&self, n: u32, i: i64) -> Word {
        let shift = n as i64 - 1;
        Word::from_letters(self.w.letters().iter().map(|l| match l.symbol {
            GenSymbol::G(_) => Letter::g(i, l.exp),
            GenSymbol::T(_) => Letter::t(shift, l.exp),
        }))
    }
}

/// Formal substitution `g(i) -> w(g(i), t(n-1))`, fixing every t-letter.
pub fn theta_apply(n: u32, spec: &ThetaSpec, w: &Word) -> Word {
    let mut out = Word::empty();
    for l in w.letters() {
        match l.symbol {
            GenSymbol::G(i) => out.append(&spec.instantiate(n, i).pow(l.exp)),
            GenSymbol::T(_) => out.push(*l),
        }
    }
    out
}

/// `x -> 1 - x`.
pub fn flip() -> PlMap {
    PlMap::reflection(Rational::one())
}

/// Checks that `f1` is an increasing PL bijection of `[0,1]` in F_{2,inf},
/// extended by the identity outside `[0,1]`.
pub fn check_unit_map(f1: &PlMap) -> Result<()> {
    let report = is_member(f1, 2);
    if !report.member {
        return Err(Error::NotMember {
            n: 2,
            violations: report.violations,
        });
    }
    let inside = f1
        .breakpoints()
        .iter()
        .all(|b| *b >= Rational::zero() && *b <= Rational::one());
    if !inside || !f1.left_tail().slope.is_one() || !f1.left_tail().intercept.is_zero() {
        return Err(Error::InvalidMap(
            "base map must be the identity outside [0,1]".into(),
        ));
    }
    Ok(())
}

/// `flip . f1 . flip == f1^-1`, i.e. `(1 - (1 - x) f1) f1 = x` on `[0,1]`.
pub fn base_involution_check(f1: &PlMap) -> bool {
    f1.conjugate(&flip()) == f1.invert()
}

/// `(flip u flip) u^-1`, which always passes [`base_involution_check`].
pub fn symmetric_from(u: &PlMap) -> Result<PlMap> {
    check_unit_map(u)?;
    let flipped = u.conjugate(&flip());
    Ok(flipped.compose(&u.invert()))
}

/// The map `f_theta` of the real line commuting with `x -> x + 1` whose
/// restriction to `[0,1]` is `f1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivariantPl {
    f1: PlMap,
    f1_inv: PlMap,
}

impl EquivariantPl {
    pub fn new(f1: PlMap) -> Result<Self> {
        check_unit_map(&f1)?;
        let f1_inv = f1.invert();
        Ok(EquivariantPl { f1, f1_inv })
    }

    pub fn base(&self) -> &PlMap {
        &self.f1
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let whole = Rational::from_integer(x.floor());
        self.f1.eval(&(x - &whole)) + whole
    }

    pub fn eval_inverse(&self, x: &Rational) -> Rational {
        let whole = Rational::from_integer(x.floor());
        self.f1_inv.eval(&(x - &whole)) + whole
    }

    /// A finite PL map equal to `f_theta` on `[lo, hi]` and the identity
    /// outside.
    pub fn window(&self, lo: i64, hi: i64) -> PlMap {
        let inner: Vec<_> = self
            .f1
            .breakpoints()
            .iter()
            .filter(|b| b.is_positive() && *b < &Rational::one())
            .cloned()
            .collect();
        let mut nodes = Vec::new();
        for m in lo..hi {
            let shift = Rational::from_integer(m);
            nodes.push((shift.clone(), shift.clone()));
            for b in &inner {
                nodes.push((b + &shift, self.f1.eval(b) + &shift));
            }
        }
        let end = Rational::from_integer(hi);
        nodes.push((end.clone(), end));
        PlMap::from_nodes(Rational::one(), &nodes, Rational::one())
            .expect("equivariant window nodes are increasing")
    }
}

/// `f_theta^-1 g(0) f_theta` in F_{2,inf}, glued from its exact value on
/// `[0,1]` and the tails `x` and `x + 1`.
pub fn theta_conjugate_of_g0(f: &EquivariantPl) -> Result<PlMap> {
    let window = f.window(-1, 3);
    let core = window.invert().compose(&generator_g(2, 0)).compose(&window);
    let left = PlMap::glue(&PlMap::identity(), &core, &Rational::zero())?;
    let conj = PlMap::glue(&left, &generator_t(1), &Rational::one())?;

    // Dense dyadic cross-check against the equivariant definition.
    let g = generator_g(2, 0);
    let step = Rational::new(1, 64);
    let mut x = Rational::from_integer(-2);
    while x <= Rational::from_integer(3) {
        let expected = f.eval(&g.eval(&f.eval_inverse(&x)));
        if conj.eval(&x) != expected {
            return Err(Error::Internal(format!(
                "theta conjugate disagrees with f_theta at {x}"
            )));
        }
        x += &step;
    }
    if !is_member(&conj, 2).member {
        return Err(Error::Internal(
            "theta conjugate is not in F_{2,inf}".into(),
        ));
    }
    Ok(conj)
}

/// Builds the theta word from a symmetric base map by factorizing
/// `f_theta^-1 g(0) f_theta` over `{g(0), t(1)}`.
pub fn theta_word_from(f1: &PlMap) -> Result<ThetaSpec> {
    let f = EquivariantPl::new(f1.clone())?;
    if !base_involution_check(f1) {
        return Err(Error::BaseCheckFailed);
    }
    let conj = theta_conjugate_of_g0(&f)?;
    let w = factorize(&conj, 2)?;
    ThetaSpec::new(w, Some(f1.clone()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GeneratorCheck {
    pub generator: Word,
    /// Letters in the freely reduced word `x (theta rho)^2`.
    pub image_length: usize,
    pub equal: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExoticReport {
    pub n: u32,
    pub ok: bool,
    pub checks: Vec<GeneratorCheck>,
}

impl ExoticReport {
    pub fn failing(&self) -> Vec<&GeneratorCheck> {
        self.checks.iter().filter(|c| !c.equal).collect()
    }
}

fn theta_rho(n: u32, spec: &ThetaSpec, w: &Word) -> Word {
    rho_apply(n, &theta_apply(n, spec, w))
}

/// `x (theta rho)^2` for a single word.
pub fn theta_rho_squared(n: u32, spec: &ThetaSpec, w: &Word) -> Word {
    theta_rho(n, spec, &theta_rho(n, spec, w))
}

/// Checks `x (theta_n rho_n)^2 == x` exactly for every generator
/// `g(0), ..., g(n-2), t(n-1)`.
///
/// The squared images get long, so they are evaluated as products of the
/// cached maps `eval(l theta rho)` over the letters `l` of `x theta rho`.
pub fn exotic_order2_check(n: u32, spec: &ThetaSpec) -> ExoticReport {
    assert!(n >= 2, "n must be at least 2");
    let mut gens: Vec<Word> = (0..n as i64 - 1)
        .map(|i| Word::letter(Letter::g(i, 1)))
        .collect();
    gens.push(Word::letter(Letter::t(n as i64 - 1, 1)));
    let once: Vec<Word> = gens.iter().map(|g| theta_rho(n, spec, g)).collect();

    let mut symbols: Vec<GenSymbol> = once
        .iter()
        .flat_map(|w| w.letters().iter().map(|l| l.symbol))
        .collect();
    symbols.sort_unstable();
    symbols.dedup();
    let images: HashMap<GenSymbol, PlMap> = symbols
        .into_par_iter()
        .map(|symbol| {
            let letter = Word::letter(Letter { symbol, exp: 1 });
            (symbol, word_eval(n, &theta_rho(n, spec, &letter)))
        })
        .collect();

    let checks: Vec<GeneratorCheck> = gens
        .into_par_iter()
        .zip(once.into_par_iter())
        .map(|(generator, once)| {
            let image = theta_rho(n, spec, &once);
            let equal = image == generator || {
                let value = once.letters().iter().fold(PlMap::identity(), |acc, l| {
                    acc.compose(&images[&l.symbol].pow(l.exp))
                });
                value == word_eval(n, &generator)
            };
            GeneratorCheck {
                generator,
                image_length: image.letters().len(),
                equal,
            }
        })
        .collect();
    ExoticReport {
        n,
        ok: checks.iter().all(|c| c.equal),
        checks,
    }
}
