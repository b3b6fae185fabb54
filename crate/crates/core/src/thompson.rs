//! Membership in F_{n,inf}, its generators, the characters at a fixed point
//! and at the ends, and factorization of elements into generator words.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::nadic::{in_nadic, log_n};
use crate::plmap::{Affine, PlMap};
use crate::rational::Rational;
use crate::words::{word_eval, Letter, Word};

/// Default cap on the number of subdivision leaves `factorize` will build.
pub const DEFAULT_FACTORIZE_BOUND: usize = 1 << 16;

/// Environment variable overriding [`DEFAULT_FACTORIZE_BOUND`].
pub const FACTORIZE_BOUND_ENV: &str = "FNINF_FACTORIZE_BOUND";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ViolationKind {
    SlopeNotPowerOfN,
    BreakNotNAdic,
    ImageNotNAdic,
    TailNotTranslation,
    TailOffsetNotMultiple,
    NotIncreasing,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub location: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} at {}", self.kind, self.location)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MembershipReport {
    pub member: bool,
    pub violations: Vec<Violation>,
}

impl MembershipReport {
    pub fn into_result(self, n: u32) -> Result<()> {
        if self.member {
            Ok(())
        } else {
            Err(Error::NotMember {
                n,
                violations: self.violations,
            })
        }
    }
}

fn tail_index(piece: &Affine, n: u32) -> Option<BigInt> {
    if !piece.slope.is_one() || !piece.intercept.is_integer() {
        return None;
    }
    let (q, r) = piece.intercept.numer().div_rem(&BigInt::from(n - 1));
    r.is_zero().then_some(q)
}

pub fn is_member(f: &PlMap, n: u32) -> MembershipReport {
    assert!(n >= 2, "n must be at least 2");
    let mut violations = Vec::new();
    let mut flag = |kind, location: String| violations.push(Violation { kind, location });

    if !f.is_increasing() {
        flag(ViolationKind::NotIncreasing, "map".into());
    }
    for (i, p) in f.pieces().iter().enumerate() {
        if log_n(&p.slope, n).is_none() {
            flag(
                ViolationKind::SlopeNotPowerOfN,
                format!("piece {i} (slope {})", p.slope),
            );
        }
    }
    for b in f.breakpoints() {
        if !in_nadic(b, n) {
            flag(ViolationKind::BreakNotNAdic, b.to_string());
        }
        let image = f.eval(b);
        if !in_nadic(&image, n) {
            flag(ViolationKind::ImageNotNAdic, format!("{b} -> {image}"));
        }
    }
    for (side, piece) in [("left tail", f.left_tail()), ("right tail", f.right_tail())] {
        if !piece.slope.is_one() {
            flag(ViolationKind::TailNotTranslation, side.into());
        } else if tail_index(piece, n).is_none() {
            flag(
                ViolationKind::TailOffsetNotMultiple,
                format!("{side} (offset {})", piece.intercept),
            );
        }
    }
    MembershipReport {
        member: violations.is_empty(),
        violations,
    }
}

pub fn require_member(f: &PlMap, n: u32) -> Result<()> {
    is_member(f, n).into_result(n)
}

/// The three-piece generator: `x` for `x < i`, `n(x-i)+i` on `[i,i+1]`,
/// `x+n-1` for `x > i+1`.
pub fn generator_g(n: u32, i: i64) -> PlMap {
    assert!(n >= 2, "n must be at least 2");
    let i = Rational::from_integer(i);
    let nr = Rational::from_integer(n);
    let one = Rational::one();
    PlMap::new(
        vec![i.clone(), &i + &one],
        vec![
            Affine::identity(),
            Affine::new(nr.clone(), &i * (&one - &nr)),
            Affine::new(one, Rational::from_integer(n - 1)),
        ],
    )
    .expect("generator is a valid PL map")
}

/// `x -> x + s`.
pub fn generator_t(s: i64) -> PlMap {
    PlMap::translation(Rational::from_integer(s))
}

fn to_i64(v: &BigInt) -> Result<i64> {
    v.to_i64().ok_or_else(|| Error::Overflow(v.to_string()))
}

/// `(j, i)`: the left tail is `x + j(n-1)`, the right tail `x + i(n-1)`.
pub fn tail_indices(f: &PlMap, n: u32) -> Result<(i64, i64)> {
    require_member(f, n)?;
    let j = tail_index(f.left_tail(), n).expect("member tails are translations");
    let i = tail_index(f.right_tail(), n).expect("member tails are translations");
    Ok((to_i64(&j)?, to_i64(&i)?))
}

fn fixed_slope_exponent(f: &PlMap, t0: &Rational, n: u32, right: bool) -> Result<i64> {
    if f.eval(t0) != *t0 {
        return Err(Error::NotFixed(t0.to_string()));
    }
    let slope = if right {
        f.slope_right_at(t0)
    } else {
        f.slope_left_at(t0)
    };
    log_n(&slope, n).ok_or_else(|| Error::SlopeNotPowerOfN(slope.to_string(), n))
}

/// `log_n` of the right-hand slope at the fixed point `t0`.
pub fn mu1(f: &PlMap, t0: &Rational, n: u32) -> Result<i64> {
    fixed_slope_exponent(f, t0, n, true)
}

/// `log_n` of the left-hand slope at the fixed point `t0`.
pub fn nu1(f: &PlMap, t0: &Rational, n: u32) -> Result<i64> {
    fixed_slope_exponent(f, t0, n, false)
}

/// Minus the right translation index.
pub fn mu2(f: &PlMap, n: u32) -> Result<i64> {
    let (_, i) = tail_indices(f, n)?;
    Ok(-i)
}

/// Minus the left translation index.
pub fn nu2(f: &PlMap, n: u32) -> Result<i64> {
    let (j, _) = tail_indices(f, n)?;
    Ok(-j)
}

pub fn has_slope_witness(f: &PlMap, t0: &Rational) -> bool {
    f.eval(t0) == *t0 && !f.slope_right_at(t0).is_one()
}

/// `t_s^-1 g_{n,i} t_s == g_{n,i+s}`, checked on the maps.
pub fn check_t_conjugation(n: u32, i: i64, s: i64) -> bool {
    generator_g(n, i).conjugate(&generator_t(s)) == generator_g(n, i + s)
}

fn factorize_bound() -> usize {
    std::env::var(FACTORIZE_BOUND_ENV)
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_FACTORIZE_BOUND)
}

/// Writes a member of F_{n,inf} as a word over `t(n-1)` and
/// `g(0), ..., g(n-2)`. The result is verified by evaluation before it is
/// returned.
pub fn factorize(f: &PlMap, n: u32) -> Result<Word> {
    factorize_with_bound(f, n, factorize_bound())
}

/// A finite n-ary subdivision tree of a standard interval.
enum Tree {
    Leaf,
    Node(Vec<Tree>),
}

struct Interval {
    lo: Rational,
    len: Rational,
}

/// Is `[lo, lo + len]` a node of the standard n-ary subdivision of some unit
/// interval?
fn is_standard(lo: &Rational, len: &Rational, n: u32) -> bool {
    matches!(log_n(len, n), Some(e) if e <= 0) && (lo / len).is_integer()
}

struct Refiner<'a> {
    f: &'a PlMap,
    n: u32,
    nr: Rational,
    leaves: Vec<Interval>,
    bound: usize,
}

impl Refiner<'_> {
    fn refine(&mut self, lo: Rational, len: Rational) -> Result<Tree> {
        let hi = &lo + &len;
        let i = self.f.breakpoints().partition_point(|b| *b <= lo);
        let affine = self.f.breakpoints().get(i).is_none_or(|b| *b >= hi);
        if affine {
            let image_lo = self.f.eval(&lo);
            let image_len = self.f.eval(&hi) - &image_lo;
            if is_standard(&image_lo, &image_len, self.n) {
                if self.leaves.len() >= self.bound {
                    return Err(Error::SearchExhausted(self.bound));
                }
                self.leaves.push(Interval {
                    lo: image_lo,
                    len: image_len,
                });
                return Ok(Tree::Leaf);
            }
        }
        let child = &len / &self.nr;
        let mut children = Vec::with_capacity(self.n as usize);
        for r in 0..self.n {
            let start = &lo + &child * Rational::from_integer(r);
            children.push(self.refine(start, child.clone())?);
        }
        Ok(Tree::Node(children))
    }
}

/// Rebuilds the subdivision tree of `[lo, lo+len]` from a sorted run of
/// standard leaves that partition it.
fn tree_from_leaves(leaves: &[Interval], lo: &Rational, len: &Rational, n: u32) -> Result<Tree> {
    match leaves {
        [only] if only.lo == *lo && only.len == *len => return Ok(Tree::Leaf),
        [] => return Err(Error::Internal("range leaves do not cover a unit".into())),
        _ => {}
    }
    let child = len / Rational::from_integer(n);
    let mut children = Vec::with_capacity(n as usize);
    let mut rest = leaves;
    for r in 0..n {
        let start = lo + &child * Rational::from_integer(r);
        let end = &start + &child;
        let take = rest.partition_point(|iv| &iv.lo + &iv.len <= end);
        children.push(tree_from_leaves(&rest[..take], &start, &child, n)?);
        rest = &rest[take..];
    }
    if !rest.is_empty() {
        return Err(Error::Internal("range leaves overflow their unit".into()));
    }
    Ok(Tree::Node(children))
}

/// Emits `g_k` for every split, in an order where each split's index is its
/// current leaf index: units right to left, pre-order, children right to left.
fn emit_splits(tree: &Tree, index: i64, out: &mut Vec<i64>) {
    if let Tree::Node(children) = tree {
        out.push(index);
        for (r, child) in children.iter().enumerate().rev() {
            emit_splits(child, index + r as i64, out);
        }
    }
}

fn subdivision_word(units: &[(i64, Tree)]) -> Vec<i64> {
    let mut out = Vec::new();
    for (m, tree) in units.iter().rev() {
        emit_splits(tree, *m, &mut out);
    }
    out
}

/// `g(k)` as `t(n-1)^-q g(r) t(n-1)^q` with `k = r + q(n-1)`, `0 <= r < n-1`.
fn push_g(word: &mut Word, k: i64, exp: i64, n: u32) {
    let shift = n as i64 - 1;
    let (q, r) = (k.div_euclid(shift), k.rem_euclid(shift));
    word.push(Letter::t(shift, -q));
    word.push(Letter::g(r, exp));
    word.push(Letter::t(shift, q));
}

pub fn factorize_with_bound(f: &PlMap, n: u32, bound: usize) -> Result<Word> {
    let (j, _) = tail_indices(f, n)?;
    let shift = n as i64 - 1;
    let mut word = Word::empty();

    if !f.breakpoints().is_empty() {
        // f sends the leaves of a domain subdivision D of [lo, hi] in order onto
        // the leaves of a range subdivision R, so f = sigma_D t_c sigma_R^-1.
        let lo = f.breakpoints()[0].floor();
        let hi = f.breakpoints().last().unwrap().ceil();
        let (lo, hi) = (to_i64(&lo)?, to_i64(&hi)?);
        let mut refiner = Refiner {
            f,
            n,
            nr: Rational::from_integer(n),
            leaves: Vec::new(),
            bound,
        };
        let mut domain = Vec::new();
        for m in lo..hi {
            let tree = refiner.refine(Rational::from_integer(m), Rational::one())?;
            domain.push((m, tree));
        }
        let leaves = refiner.leaves;
        let image_lo = lo + j * shift;
        let image_hi = to_i64(&f.eval(&Rational::from_integer(hi)).floor())?;
        let mut range = Vec::new();
        let mut rest = &leaves[..];
        for m in image_lo..image_hi {
            let end = Rational::from_integer(m + 1);
            let take = rest.partition_point(|iv| &iv.lo + &iv.len <= end);
            let tree = tree_from_leaves(
                &rest[..take],
                &Rational::from_integer(m),
                &Rational::one(),
                n,
            )?;
            range.push((m, tree));
            rest = &rest[take..];
        }

        for k in subdivision_word(&domain) {
            push_g(&mut word, k, 1, n);
        }
        word.push(Letter::t(shift, j));
        for k in subdivision_word(&range).into_iter().rev() {
            push_g(&mut word, k, -1, n);
        }
    } else {
        word.push(Letter::t(shift, j));
    }

    if word_eval(n, &word) != *f {
        return Err(Error::Internal(format!(
            "factorization of {f} failed verification"
        )));
    }
    Ok(word)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn map(nodes: &[(&str, &str)], left: &str, right: &str) -> PlMap {
        let nodes: Vec<_> = nodes.iter().map(|(x, y)| (q(x), q(y))).collect();
        PlMap::from_nodes(q(left), &nodes, q(right)).unwrap()
    }

    fn kinds(r: &MembershipReport) -> Vec<ViolationKind> {
        r.violations.iter().map(|v| v.kind).collect()
    }

    #[test]
    fn membership_examples() {
        for n in 2..=5 {
            for i in -3..4 {
                assert!(is_member(&generator_g(n, i), n).member);
            }
            assert!(is_member(&generator_t(n as i64 - 1), n).member);
        }
        let r = is_member(&generator_t(1), 3);
        assert_eq!(kinds(&r), vec![ViolationKind::TailOffsetNotMultiple; 2]);
        let slope3 = map(&[("0", "0"), ("1", "3")], "1", "1");
        let r = is_member(&slope3, 2);
        assert!(!r.member);
        assert!(kinds(&r).contains(&ViolationKind::SlopeNotPowerOfN));
        let third = map(&[("1/3", "1/3"), ("1", "5/3")], "1", "1");
        let r = is_member(&third, 2);
        assert!(kinds(&r).contains(&ViolationKind::BreakNotNAdic));
        assert!(kinds(&r).contains(&ViolationKind::ImageNotNAdic));
        let r = is_member(&PlMap::reflection(q("0")), 2);
        assert!(kinds(&r).contains(&ViolationKind::NotIncreasing));
        assert!(kinds(&r).contains(&ViolationKind::TailNotTranslation));
    }

    #[test]
    fn generator_examples() {
        assert_eq!(generator_g(3, 0).eval(&q("1/2")), q("3/2"));
        let g = generator_g(4, 2);
        assert_eq!(g.eval(&q("-10")), q("-10"));
        assert_eq!(g.eval(&q("2")), q("2"));
        assert_eq!(generator_g(2, 0), map(&[("0", "0"), ("1", "2")], "1", "1"));
        assert!(generator_t(0).is_identity());
        assert_eq!(generator_t(2).eval(&q("5")), q("7"));
    }

    #[test]
    fn tail_and_character_examples() {
        assert_eq!(tail_indices(&PlMap::identity(), 3).unwrap(), (0, 0));
        assert_eq!(tail_indices(&generator_g(3, 0), 3).unwrap(), (0, 1));
        assert_eq!(tail_indices(&generator_t(2).pow(2), 3).unwrap(), (2, 2));
        assert!(matches!(
            tail_indices(&generator_t(1), 3),
            Err(Error::NotMember { .. })
        ));

        assert_eq!(mu1(&PlMap::identity(), &q("5/7"), 3).unwrap(), 0);
        assert_eq!(mu1(&generator_g(3, 0), &q("0"), 3).unwrap(), 1);
        assert_eq!(nu1(&generator_g(3, 0), &q("0"), 3).unwrap(), 0);
        assert_eq!(
            nu1(&generator_g(3, 0), &q("1"), 3),
            Err(Error::NotFixed("1".into()))
        );
        assert_eq!(mu2(&PlMap::identity(), 3).unwrap(), 0);
        assert_eq!(mu2(&generator_g(3, 0), 3).unwrap(), -1);
        assert_eq!(mu2(&generator_t(2).invert(), 3).unwrap(), 1);
        assert_eq!(nu2(&generator_t(2).invert(), 3).unwrap(), 1);
        let slope3 = map(&[("0", "0"), ("1", "3")], "1", "1");
        assert!(matches!(
            mu1(&slope3, &q("0"), 2),
            Err(Error::SlopeNotPowerOfN(..))
        ));
    }

    #[test]
    fn slope_witness_examples() {
        assert!(has_slope_witness(&generator_g(2, 0), &q("0")));
        assert!(!has_slope_witness(&PlMap::identity(), &q("3")));
        assert!(!has_slope_witness(&generator_g(2, 0), &q("1/2")));
    }

    #[test]
    fn t_conjugation_relation() {
        assert!(check_t_conjugation(3, 0, 2));
        assert!(check_t_conjugation(2, 5, -3));
        assert!(check_t_conjugation(4, -1, 1));
    }

    #[test]
    fn factorize_examples() {
        for n in 2..=5u32 {
            for i in 0..n as i64 - 1 {
                let w = factorize(&generator_g(n, i), n).unwrap();
                assert_eq!(w, Word::letter(Letter::g(i, 1)), "n={n} i={i}");
            }
            let shift = n as i64 - 1;
            let w = factorize(&generator_g(n, shift), n).unwrap();
            assert_eq!(w.to_string(), format!("t({shift})^-1 g(0) t({shift})"));
            assert!(factorize(&PlMap::identity(), n).unwrap().is_empty());
            let t = generator_t(shift).pow(-3);
            assert_eq!(
                factorize(&t, n).unwrap().to_string(),
                format!("t({shift})^-3")
            );
        }
        let g = generator_g(2, 0);
        let target = g.compose(&g.conjugate(&generator_t(1)));
        let w = factorize(&target, 2).unwrap();
        assert_eq!(word_eval(2, &w), target);
        assert!(matches!(
            factorize(&generator_t(1), 3),
            Err(Error::NotMember { .. })
        ));
    }

    #[test]
    fn factorize_respects_bound() {
        let deep = generator_g(2, 0).pow(12);
        assert_eq!(
            factorize_with_bound(&deep, 2, 4),
            Err(Error::SearchExhausted(4))
        );
        let w = factorize(&deep, 2).unwrap();
        assert_eq!(word_eval(2, &w), deep);
    }
}
