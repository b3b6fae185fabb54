//! Seeded randomized property suites. Each suite is deterministic for a given
//! seed and reports the first exact mismatch it finds.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::construct::{
    centralizer_extend, centralizer_restrict, fixed_slope_element, interpolate, transport,
};
use crate::error::Error;
use crate::involutions::{
    conjugacy_invariant, conjugate_involutions, fixed_point_in_half_lattice, in_extension,
    is_order_two, make_involution,
};
use crate::nadic::{decompose_rational, n_pow, phi_of};
use crate::plmap::{HalfLineMap, PlMap, Side};
use crate::rational::Rational;
use crate::thompson::{generator_g, is_member};
use crate::words::{
    base_involution_check, exotic_order2_check, symmetric_from, theta_word_from, word_eval, Letter,
    Word,
};

pub const DEFAULT_SEED: u64 = 20_240_917;
pub const SUITE_IDS: [u8; 8] = [1, 2, 3, 4, 5, 6, 7, 8];

#[derive(Clone, Debug, Serialize)]
pub struct SuiteResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub cases: usize,
    pub detail: String,
    #[serde(skip)]
    pub elapsed: Duration,
    #[serde(skip)]
    pub limit: Duration,
}

type Outcome = std::result::Result<usize, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn ok_or<T>(
    r: crate::error::Result<T>,
    ctx: impl FnOnce() -> String,
) -> std::result::Result<T, String> {
    r.map_err(|e| format!("{}: {e}", ctx()))
}

fn describe(id: u8) -> (&'static str, Duration) {
    let secs = |s| Duration::from_secs(s);
    match id {
        1 => ("group laws", secs(10)),
        2 => ("phi invariance", secs(1)),
        3 => ("rational fixed points with slope", secs(5)),
        4 => ("transport", secs(5)),
        5 => ("centralizer bijection", secs(10)),
        6 => ("fixed points of order-two elements", secs(10)),
        7 => ("conjugacy certificates", secs(30)),
        8 => ("exotic order-two verification", secs(120)),
        _ => panic!("unknown suite {id}"),
    }
}

pub fn run_suite(id: u8, seed: u64) -> SuiteResult {
    let (name, limit) = describe(id);
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(id as u64));
    let start = Instant::now();
    let outcome = match id {
        1 => group_laws(&mut rng),
        2 => phi_invariance(&mut rng),
        3 => fixed_slope(&mut rng),
        4 => transport_suite(&mut rng),
        5 => centralizer(&mut rng),
        6 => half_lattice(&mut rng),
        7 => conjugacy(&mut rng),
        8 => exotic(&mut rng),
        _ => unreachable!(),
    };
    let elapsed = start.elapsed();
    let (passed, cases, detail) = match outcome {
        Ok(cases) if elapsed < limit => (true, cases, format!("{cases} cases")),
        Ok(cases) => (
            false,
            cases,
            format!("{cases} cases, took {elapsed:?} over the {limit:?} limit"),
        ),
        Err(msg) => (false, 0, msg),
    };
    SuiteResult {
        id,
        name,
        passed,
        cases,
        detail,
        elapsed,
        limit,
    }
}

/// Runs every suite; independent suites run in parallel, results come back
/// in id order.
pub fn run_all(seed: u64) -> Vec<SuiteResult> {
    SUITE_IDS
        .par_iter()
        .map(|&id| run_suite(id, seed))
        .collect()
}

// ---------------------------------------------------------------- generators

pub fn random_word(rng: &mut ChaCha8Rng, n: u32, max_len: usize) -> Word {
    let len = rng.gen_range(1..=max_len);
    let shift = n as i64 - 1;
    Word::from_letters((0..len).map(|_| {
        let e = if rng.gen_bool(0.5) { 1 } else { -1 };
        if rng.gen_bool(0.2) {
            Letter::t(shift, e)
        } else {
            Letter::g(rng.gen_range(-3..=3), e)
        }
    }))
}

pub fn random_nadic(rng: &mut ChaCha8Rng, n: u32, span: i64, max_exp: i64) -> Rational {
    let e = rng.gen_range(0..=max_exp);
    Rational::from_integer(rng.gen_range(-span..=span)) * n_pow(n, -e)
}

/// A random member of F_{2,inf} supported in `[0,1]`, through up to
/// `interior` random nodes on the grid `2^-depth Z`.
pub fn random_unit_map(rng: &mut ChaCha8Rng, interior: usize, depth: u32) -> PlMap {
    let denom = 1i64 << depth;
    let mut xs: Vec<i64> = (0..interior).map(|_| rng.gen_range(1..denom)).collect();
    let mut ys: Vec<i64> = (0..interior).map(|_| rng.gen_range(1..denom)).collect();
    xs.sort_unstable();
    ys.sort_unstable();
    xs.dedup();
    ys.dedup();
    let m = xs.len().min(ys.len());
    let mut pairs = vec![(Rational::zero(), Rational::zero())];
    pairs.extend((0..m).map(|i| (Rational::new(xs[i], denom), Rational::new(ys[i], denom))));
    pairs.push((Rational::one(), Rational::one()));
    let inner = interpolate(2, &pairs).expect("dyadic pairs interpolate");
    let left = PlMap::glue(&PlMap::identity(), &inner, &Rational::zero()).expect("fixes 0");
    PlMap::glue(&left, &PlMap::identity(), &Rational::one()).expect("fixes 1")
}

// -------------------------------------------------------------------- suites

fn group_laws(rng: &mut ChaCha8Rng) -> Outcome {
    let mut cases = 0;
    for n in [2u32, 3, 5] {
        for _ in 0..500 {
            let (wa, wb, wc) = (
                random_word(rng, n, 12),
                random_word(rng, n, 12),
                random_word(rng, n, 12),
            );
            let (a, b, c) = (word_eval(n, &wa), word_eval(n, &wb), word_eval(n, &wc));
            ensure!(
                word_eval(n, &wa.concat(&wb)) == a.compose(&b),
                "n={n}: eval({wa} {wb}) is not eval({wa}) eval({wb})"
            );
            ensure!(
                a.compose(&b).compose(&c) == a.compose(&b.compose(&c)),
                "n={n}: associativity fails for {wa}, {wb}, {wc}"
            );
            ensure!(
                a.compose(&a.invert()).is_identity() && a.invert().compose(&a).is_identity(),
                "n={n}: inverse law fails for {wa}"
            );
            ensure!(
                word_eval(n, &wa.inverse()) == a.invert(),
                "n={n}: eval of the inverse word {} differs",
                wa.inverse()
            );
            ensure!(
                is_member(&a.compose(&b), n).member && is_member(&a.invert(), n).member,
                "n={n}: closure fails for {wa}, {wb}"
            );
            cases += 1;
        }
    }
    Ok(cases)
}

fn phi_invariance(rng: &mut ChaCha8Rng) -> Outcome {
    let mut cases = 0;
    for _ in 0..200 {
        let n = rng.gen_range(2..=5u32);
        let w = random_word(rng, n, 8);
        let f = word_eval(n, &w);
        let x = random_nadic(rng, n, 60, 3);
        let before = ok_or(phi_of(&x, n), || format!("phi_{n}({x})"))?;
        let after = ok_or(phi_of(&f.eval(&x), n), || format!("phi_{n}(({x}){w})"))?;
        ensure!(before == after, "n={n}: phi(({x}){w}) != phi({x})");
        cases += 1;
    }
    for _ in 0..200 {
        let n = rng.gen_range(2..=5u32);
        let x = random_nadic(rng, n, 200, 4);
        let y = random_nadic(rng, n, 200, 4);
        let sum = ok_or(phi_of(&(&x + &y), n), || format!("phi_{n}({x} + {y})"))?;
        let parts = phi_of(&x, n).unwrap().add(&phi_of(&y, n).unwrap());
        ensure!(sum == parts, "n={n}: phi is not additive on {x}, {y}");
        cases += 1;
    }
    Ok(cases)
}

fn check_fixed_slope(n: u32, t0: &Rational) -> std::result::Result<PlMap, String> {
    let d = ok_or(decompose_rational(t0, n), || {
        format!("decompose({t0}, {n})")
    })?;
    ensure!(
        d.reconstruct(n) == *t0,
        "n={n}: decomposition of {t0} does not reconstruct"
    );
    ensure!(
        d.s > 0 && d.t > 0,
        "n={n}: decomposition of {t0} has s or t zero"
    );
    let f = ok_or(fixed_slope_element(n, t0), || {
        format!("fixed_slope({n}, {t0})")
    })?;
    ensure!(f.eval(t0) == *t0, "n={n}: element does not fix {t0}");
    let slope = f.slope_right_at(t0);
    ensure!(
        slope == n_pow(n, d.s as i64) && !slope.is_one(),
        "n={n}: right slope at {t0} is {slope}"
    );
    ensure!(
        is_member(&f, n).member,
        "n={n}: element for {t0} is not a member"
    );
    Ok(f)
}

fn fixed_slope(rng: &mut ChaCha8Rng) -> Outcome {
    let pinned = [(2, "1/3", "-1", "4", "2"), (3, "1/2", "-4", "9", "4")];
    for (n, t0, b, a, right) in pinned {
        let t0: Rational = t0.parse().unwrap();
        let f = check_fixed_slope(n, &t0)?;
        let (a, b, right): (Rational, Rational, Rational) = (
            a.parse().unwrap(),
            b.parse().unwrap(),
            right.parse().unwrap(),
        );
        let expected = PlMap::from_nodes(
            Rational::one(),
            &[(Rational::zero(), b.clone()), (Rational::one(), &a + &b)],
            Rational::one(),
        )
        .unwrap();
        ensure!(
            f == expected && f.right_tail().intercept == right,
            "pinned fixed_slope({n}, {t0}) gave {f}"
        );
    }
    let mut cases = pinned.len();
    while cases < 100 + pinned.len() {
        let n = rng.gen_range(2..=5u32);
        let den = rng.gen_range(1..=40i64);
        let num = rng.gen_range(-10 * den + 1..10 * den);
        if num == 0 {
            continue;
        }
        check_fixed_slope(n, &Rational::new(num, den))?;
        cases += 1;
    }
    Ok(cases)
}

fn coprime_k(rng: &mut ChaCha8Rng, n: u32) -> u64 {
    loop {
        let k = rng.gen_range(1..=9u64);
        if num_integer::gcd(k, n as u64) == 1 {
            return k;
        }
    }
}

fn transport_suite(rng: &mut ChaCha8Rng) -> Outcome {
    let mut cases = 0;
    while cases < 100 {
        let n = rng.gen_range(2..=5u32);
        let k = coprime_k(rng, n);
        let kr = Rational::from_integer(k);
        let t1 = random_nadic(rng, n, 40, 2) / &kr;
        let step = Rational::from_integer(k * (n as u64 - 1)) * random_nadic(rng, n, 6, 2);
        let t2 = &t1 + &(step / &kr);
        let tr = ok_or(transport(n, k, &t1, &t2), || {
            format!("transport({n}, {k}, {t1}, {t2})")
        })?;
        let g = &tr.map;
        ensure!(
            is_member(g, n).member,
            "transport({n}, {k}, {t1}, {t2}) is not a member"
        );
        ensure!(
            g.eval(&t1) == t2,
            "transport({n}, {k}, {t1}, {t2}) misses t2"
        );
        let (lo, hi) = &tr.middle;
        let shift = &t2 - &t1;
        let translating = g.eval(lo) == lo + &shift
            && g.eval(hi) == hi + &shift
            && !g.breakpoints().iter().any(|b| b > lo && b < hi);
        ensure!(
            lo <= &t1 && &t1 <= hi && translating,
            "transport({n}, {k}, {t1}, {t2}) is not x + {shift} on [{lo}, {hi}]"
        );

        let modulus = k * (n as u64 - 1);
        if modulus > 1 {
            let off = rng.gen_range(1..modulus as i64);
            let bad = &t1 + &(Rational::from_integer(off) / &kr);
            ensure!(
                matches!(transport(n, k, &t1, &bad), Err(Error::HypothesisFail(_))),
                "transport({n}, {k}, {t1}, {bad}) should fail the divisibility hypothesis"
            );
        }
        cases += 1;
    }
    Ok(cases)
}

/// An element fixing `t0` whose behaviour right of `t0` is random.
fn random_fixing(rng: &mut ChaCha8Rng, n: u32, t0: &Rational) -> PlMap {
    let base = fixed_slope_element(n, t0).expect("rational t0");
    let start = Rational::from_integer(t0.ceil() + 1);
    let count = rng.gen_range(1..=3);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let (mut x, mut y) = (start.clone(), start.clone());
    for _ in 0..count {
        // equal phi: both steps are congruent mod n-1
        let r = rng.gen_range(0..n as i64 - 1).max(1);
        x = &x + &Rational::from_integer(r + (n as i64 - 1) * rng.gen_range(0..3));
        y = &y + &Rational::from_integer(r + (n as i64 - 1) * rng.gen_range(0..3));
        xs.push(x.clone());
        ys.push(y.clone());
    }
    let mut pairs = vec![(start.clone(), start)];
    pairs.extend(xs.into_iter().zip(ys));
    let v = interpolate(n, &pairs).expect("phi-matched pairs");
    base.pow(rng.gen_range(-2..=2)).compose(&v)
}

fn centralizer(rng: &mut ChaCha8Rng) -> Outcome {
    for case in 0..100 {
        let n = rng.gen_range(2..=3u32);
        let c = random_nadic(rng, n, 20, 2);
        let h = PlMap::reflection(c.clone());
        let t0 = &c / &Rational::from_integer(2);
        let g = random_fixing(rng, n, &t0);
        let r = ok_or(HalfLineMap::restrict(&g, &t0, Side::Right), || {
            format!("restrict at {t0}")
        })?;
        let ext = ok_or(centralizer_extend(&r, &h, n), || {
            format!("case {case}: extend (n={n}, c={c})")
        })?;
        ensure!(
            ext.compose(&h) == h.compose(&ext),
            "case {case}: extension does not commute with h"
        );
        ensure!(ext.eval(&t0) == t0, "case {case}: extension moves {t0}");
        ensure!(
            is_member(&ext, n).member,
            "case {case}: extension is not a member"
        );
        let back = ok_or(centralizer_restrict(&ext, &h, n), || {
            format!("case {case}: restrict")
        })?;
        ensure!(back == r, "case {case}: restrict(extend(r)) != r");
        let again = ok_or(centralizer_extend(&back, &h, n), || {
            format!("case {case}: re-extend")
        })?;
        ensure!(again == ext, "case {case}: extend(restrict(f)) != f");
    }
    Ok(100)
}

fn half_lattice(rng: &mut ChaCha8Rng) -> Outcome {
    let h0 = PlMap::reflection(Rational::zero());
    for case in 0..200 {
        let n = rng.gen_range(2..=5u32);
        let u = word_eval(n, &random_word(rng, n, 8));
        let c = Rational::from_integer((n as i64 - 1) * rng.gen_range(-10..=10));
        let m = ok_or(make_involution(&u, &c, n), || {
            format!("case {case}: make_involution")
        })?;
        ensure!(
            is_order_two(&m) && m.is_decreasing(),
            "case {case}: not a decreasing involution"
        );
        ok_or(in_extension(&m, &h0, n), || {
            format!("case {case}: extension membership of {m}")
        })?;
        let r = ok_or(fixed_point_in_half_lattice(n, &m), || {
            format!("case {case}: half-lattice")
        })?;
        ensure!(
            r.ok,
            "case {case}: n={n}, fixed point {} not in (1/2)Z[1/{n}]",
            r.t
        );
        ensure!(
            n % 2 == 1 || r.in_nadic,
            "case {case}: n={n} even but fixed point {} not in Z[1/{n}]",
            r.t
        );
    }
    Ok(200)
}

fn random_involution(rng: &mut ChaCha8Rng, n: u32) -> PlMap {
    let u = word_eval(n, &random_word(rng, n, 6));
    let c = Rational::from_integer((n as i64 - 1) * rng.gen_range(-8..=8));
    make_involution(&u, &c, n).expect("u is a member")
}

fn check_conjugator(n: u32, k: u64, h: &PlMap, m1: &PlMap, m2: &PlMap) -> Outcome {
    let c = ok_or(conjugate_involutions(n, h, m1, m2, k), || {
        format!("conjugate_involutions(n={n}, k={k}) for {m1} and {m2}")
    })?;
    let g = &c.conjugator;
    ensure!(
        g.invert().compose(m2).compose(g) == *m1 && is_member(g, n).member,
        "conjugator for {m1} and {m2} fails verification"
    );
    Ok(1)
}

fn conjugacy(rng: &mut ChaCha8Rng) -> Outcome {
    let h0 = PlMap::reflection(Rational::zero());
    let mut cases = 0;
    for _ in 0..50 {
        let (m1, m2) = (random_involution(rng, 2), random_involution(rng, 2));
        let (i1, i2) = (
            conjugacy_invariant(2, 1, &m1).map_err(|e| e.to_string())?,
            conjugacy_invariant(2, 1, &m2).map_err(|e| e.to_string())?,
        );
        ensure!(i1 == i2, "n=2 invariants differ mod 1");
        cases += check_conjugator(2, 1, &h0, &m1, &m2)?;
    }

    let (mut equal, mut unequal) = (0, 0);
    while equal < 50 || unequal < 20 {
        let (m1, m2) = (random_involution(rng, 3), random_involution(rng, 3));
        let i1 = ok_or(conjugacy_invariant(3, 2, &m1), || {
            format!("invariant of {m1}")
        })?;
        let i2 = ok_or(conjugacy_invariant(3, 2, &m2), || {
            format!("invariant of {m2}")
        })?;
        if i1 == i2 {
            if equal < 50 {
                cases += check_conjugator(3, 2, &h0, &m1, &m2)?;
                equal += 1;
            }
        } else if unequal < 20 {
            ensure!(
                matches!(
                    conjugate_involutions(3, &h0, &m1, &m2, 2),
                    Err(Error::NotCertified(_))
                ),
                "n=3: unequal invariants for {m1} and {m2} should not be certified"
            );
            unequal += 1;
            cases += 1;
        }
    }

    let pinned = conjugate_involutions(
        3,
        &h0,
        &PlMap::reflection(Rational::zero()),
        &PlMap::reflection(Rational::from_integer(2)),
        2,
    );
    ensure!(
        matches!(pinned, Err(Error::NotCertified(_))),
        "pinned pair (-x, -x+2) gave {pinned:?}"
    );
    Ok(cases + 1)
}

fn map_a() -> PlMap {
    let node = |x: (i64, i64), y: (i64, i64)| (Rational::new(x.0, x.1), Rational::new(y.0, y.1));
    PlMap::from_nodes(
        Rational::one(),
        &[
            node((0, 1), (0, 1)),
            node((1, 2), (1, 4)),
            node((3, 4), (1, 2)),
            node((1, 1), (1, 1)),
        ],
        Rational::one(),
    )
    .expect("valid nodes")
}

fn exotic(rng: &mut ChaCha8Rng) -> Outcome {
    let mut bases = vec![map_a()];
    while bases.len() < 11 {
        let interior = rng.gen_range(1..=2);
        let u = random_unit_map(rng, interior, 4);
        let f1 = symmetric_from(&u).map_err(|e| e.to_string())?;
        if !f1.is_identity() {
            bases.push(f1);
        }
    }
    let outcomes: Vec<Outcome> = bases
        .par_iter()
        .enumerate()
        .map(|(idx, f1)| {
            ensure!(
                base_involution_check(f1),
                "base {idx}: flip check fails for {f1}"
            );
            let spec = ok_or(theta_word_from(f1), || format!("base {idx}: theta word"))?;
            let mut checks = 0;
            for n in [3u32, 4, 5] {
                let report = exotic_order2_check(n, &spec);
                ensure!(
                    report.ok,
                    "base {idx}, n={n}: (theta rho)^2 moves {:?}",
                    report
                        .failing()
                        .iter()
                        .map(|c| c.generator.to_string())
                        .collect::<Vec<_>>()
                );
                if !f1.is_identity() {
                    let image = word_eval(n, &spec.instantiate(n, 0));
                    ensure!(
                        image != generator_g(n, 0),
                        "base {idx}, n={n}: theta fixes g(0) although f1 is not the identity"
                    );
                }
                checks += report.checks.len();
            }
            ensure!(
                word_eval(2, &spec.w) != generator_g(2, 0) || f1.is_identity(),
                "base {idx}: theta word evaluates to g(0)"
            );
            Ok(checks)
        })
        .collect();
    outcomes.into_iter().sum()
}
