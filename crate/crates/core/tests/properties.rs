use fninf_core::construct::interpolate;
use fninf_core::nadic::{phi_of, Residue};
use fninf_core::thompson::{factorize, generator_g, is_member};
use fninf_core::words::{rho_apply, word_eval};
use fninf_core::{Letter, PlMap, Rational, Word};
use proptest::prelude::*;

fn word_strategy(n: u32) -> impl Strategy<Value = Word> {
    let shift = n as i64 - 1;
    prop::collection::vec(
        (
            any::<bool>(),
            -3i64..=3,
            prop::sample::select(vec![-2i64, -1, 1, 2]),
        ),
        0..10,
    )
    .prop_map(move |raw| {
        Word::from_letters(raw.into_iter().map(|(is_t, i, e)| {
            if is_t {
                Letter::t(shift, e)
            } else {
                Letter::g(i, e)
            }
        }))
    })
}

fn one_word(lo: u32, hi: u32) -> impl Strategy<Value = (u32, Word)> {
    (lo..=hi).prop_flat_map(|n| (Just(n), word_strategy(n)))
}

fn two_words(lo: u32, hi: u32) -> impl Strategy<Value = (u32, Word, Word)> {
    (lo..=hi).prop_flat_map(|n| (Just(n), word_strategy(n), word_strategy(n)))
}

fn nadic(n: u32) -> impl Strategy<Value = Rational> {
    (-500i64..=500, 0u32..4).prop_map(move |(a, e)| Rational::new(a, (n as i64).pow(e)))
}

fn point() -> impl Strategy<Value = Rational> {
    (-400i64..=400, 1i64..=36).prop_map(|(a, b)| Rational::new(a, b))
}

/// Exact comparison at every breakpoint, every midpoint between them and
/// beyond both ends: two PL maps agreeing there are equal.
fn same_map(f: &PlMap, g: &PlMap) -> bool {
    let mut xs: Vec<Rational> = f
        .breakpoints()
        .iter()
        .chain(g.breakpoints())
        .cloned()
        .collect();
    xs.sort();
    xs.dedup();
    let mut probes = xs.clone();
    for w in xs.windows(2) {
        probes.push((&w[0] + &w[1]) / Rational::from_integer(2));
    }
    let lo = xs.first().cloned().unwrap_or_else(Rational::zero);
    let hi = xs.last().cloned().unwrap_or_else(Rational::zero);
    probes.push(&lo - &Rational::one());
    probes.push(&lo - &Rational::from_integer(2));
    probes.push(&hi + &Rational::one());
    probes.push(&hi + &Rational::from_integer(2));
    probes.iter().all(|x| f.eval(x) == g.eval(x))
}

/// Composition rebuilt from nodes: every candidate breakpoint of `f` then
/// `g`, evaluated pointwise, joined by straight segments.
fn compose_oracle(f: &PlMap, g: &PlMap) -> PlMap {
    let inv = f.invert();
    let mut xs: Vec<Rational> = f.breakpoints().to_vec();
    xs.extend(g.breakpoints().iter().map(|b| inv.eval(b)));
    xs.sort();
    xs.dedup();
    if xs.is_empty() {
        xs.push(Rational::zero());
    }
    let nodes: Vec<_> = xs.iter().map(|x| (x.clone(), g.eval(&f.eval(x)))).collect();
    let left = f.left_tail().slope.clone() * g.slope_left_at(&f.eval(&(&xs[0] - &Rational::one())));
    let last = xs.last().unwrap();
    let right =
        f.right_tail().slope.clone() * g.slope_right_at(&f.eval(&(last + &Rational::one())));
    PlMap::from_nodes(left, &nodes, right).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 64,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn compose_matches_pointwise((n, a, b) in two_words(2, 4), x in point()) {
        let (f, g) = (word_eval(n, &a), word_eval(n, &b));
        let fg = f.compose(&g);
        prop_assert_eq!(fg.eval(&x), g.eval(&f.eval(&x)));
        prop_assert!(same_map(&fg, &compose_oracle(&f, &g)));
        let reflected = PlMap::reflection(Rational::new(1, 3)).compose(&f);
        prop_assert_eq!(reflected.eval(&x), f.eval(&(Rational::new(1, 3) - &x)));
        let after = f.compose(&PlMap::reflection(Rational::zero()));
        prop_assert_eq!(after.eval(&x), -f.eval(&x));
    }

    #[test]
    fn word_eval_is_a_monoid_action((n, a, b) in two_words(2, 5)) {
        let (fa, fb) = (word_eval(n, &a), word_eval(n, &b));
        prop_assert_eq!(word_eval(n, &a.concat(&b)), fa.compose(&fb));
        prop_assert!(word_eval(n, &a.concat(&a.inverse())).is_identity());
        prop_assert!(is_member(&fa, n).member);
    }

    #[test]
    fn invert_is_a_two_sided_inverse((n, a) in one_word(2, 5), x in point()) {
        let f = word_eval(n, &a);
        let inv = f.invert();
        prop_assert_eq!(inv.eval(&f.eval(&x)), x.clone());
        prop_assert_eq!(f.eval(&inv.eval(&x)), x);
        prop_assert_eq!(inv.invert(), f);
    }

    #[test]
    fn split_then_join_is_identity((n, a) in one_word(2, 4), t in point()) {
        let f = word_eval(n, &a);
        // conjugate so that t is fixed
        let fixing = PlMap::translation(-f.eval(&t) + &t);
        let g = f.compose(&fixing);
        prop_assert_eq!(g.eval(&t), t.clone());
        let (left, right) = g.split_at(&t).unwrap();
        prop_assert_eq!(PlMap::join_at(&left, &right).unwrap(), g);
    }

    #[test]
    fn plmap_text_and_json_round_trip((n, a) in one_word(2, 5)) {
        let f = word_eval(n, &a);
        let json = serde_json::to_string(&f).unwrap();
        let back: PlMap = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(&back, &f);
        prop_assert_eq!(serde_json::to_string(&back).unwrap(), json);
    }

    #[test]
    fn word_text_round_trip(a in word_strategy(4)) {
        let text = a.to_string();
        let back: Word = text.parse().unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn rho_is_conjugation_by_the_reflection((n, a) in one_word(2, 5)) {
        let r = PlMap::reflection(Rational::zero());
        prop_assert_eq!(word_eval(n, &rho_apply(n, &a)), word_eval(n, &a).conjugate(&r));
    }

    #[test]
    fn phi_is_additive((n, x, y) in (2u32..=7).prop_flat_map(|n| (Just(n), nadic(n), nadic(n)))) {
        let (px, py) = (phi_of(&x, n).unwrap(), phi_of(&y, n).unwrap());
        prop_assert_eq!(phi_of(&(&x + &y), n).unwrap(), px.add(&py));
    }

    #[test]
    fn phi_is_invariant_under_the_group(
        (n, x, a) in (2u32..=5).prop_flat_map(|n| (Just(n), nadic(n), word_strategy(n))),
    ) {
        let f = word_eval(n, &a);
        prop_assert_eq!(phi_of(&f.eval(&x), n).unwrap(), phi_of(&x, n).unwrap());
    }

    #[test]
    fn interpolate_hits_every_pair(
        n in 2u32..=5,
        steps in prop::collection::vec((1i64..6, 0i64..4, 0i64..4, 0u32..3), 1..5),
    ) {
        let nm1 = n as i64 - 1;
        let scale = Rational::new(1, (n as i64).pow(2));
        let (mut x, mut y) = (Rational::zero(), Rational::from_integer(3 * nm1));
        let mut pairs = vec![(x.clone(), y.clone())];
        for (r, a, b, e) in steps {
            // equal residues mod n-1 keep phi in step
            let unit = Rational::new(1, (n as i64).pow(e));
            x = &x + &(Rational::from_integer(r + a * nm1) * &unit) * &scale;
            y = &y + &Rational::from_integer(r + b * nm1) * &unit;
            pairs.push((x.clone(), y.clone()));
        }
        let f = interpolate(n, &pairs).unwrap();
        prop_assert!(is_member(&f, n).member);
        for (px, py) in &pairs {
            prop_assert_eq!(&f.eval(px), py);
        }
    }

    #[test]
    fn factorize_round_trips((n, a) in one_word(2, 4)) {
        let f = word_eval(n, &a);
        let w = factorize(&f, n).unwrap();
        prop_assert_eq!(word_eval(n, &w), f);
    }
}

#[test]
fn same_map_detects_a_difference() {
    let g = generator_g(2, 0);
    assert!(same_map(&g, &g.compose(&PlMap::identity())));
    assert!(!same_map(&g, &generator_g(2, 1)));
    assert_eq!(Residue::new(&5.into(), 3).value, 2);
}
