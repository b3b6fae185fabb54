//! Constructions of certified elements of F_{n,inf}: interpolation through
//! prescribed points, transporters between two points, elements fixing a
//! rational point with non-trivial slope, and the extension/restriction pair
//! identifying a centralizer with a half-line group.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::nadic::{decompose_rational, divides_in_nadic, in_nadic, mod_inverse, n_pow, phi_of};
use crate::plmap::{HalfLineMap, PlMap, Side};
use crate::rational::Rational;
use crate::thompson::{generator_g, is_member, require_member};

/// Smallest `K >= 0` with `x * n^K` an integer; `x` must lie in Z[1/n].
fn scale_exponent(x: &Rational, n: u32) -> i64 {
    let nb = BigInt::from(n);
    let mut k = 0;
    let mut pow = BigInt::one();
    while !(&pow % x.denom()).is_zero() {
        pow *= &nb;
        k += 1;
    }
    k
}

/// Interior nodes of a PL map sending `[x0, x0+dx]` onto `[y0, y0+dy]` with
/// n-power slopes and n-adic breakpoints. Requires `phi_n(dx) == phi_n(dy)`.
fn segment_nodes(
    n: u32,
    (x0, dx): (&Rational, &Rational),
    (y0, dy): (&Rational, &Rational),
) -> Vec<(Rational, Rational)> {
    let kx = scale_exponent(dx, n);
    let ky = scale_exponent(dy, n);
    let unit = n_pow(n, -kx.max(ky));
    let count_x = (dx / &unit).numer().clone();
    let count_y = (dy / &unit).numer().clone();
    if count_x == count_y {
        return Vec::new();
    }
    // Refine the side with fewer unit pieces: split all pieces while that
    // does not overshoot, then split the first `d` pieces once more.
    let swap = count_x > count_y;
    let (small, large) = if swap {
        (count_y, count_x)
    } else {
        (count_x, count_y)
    };
    let nm1 = BigInt::from(n - 1);
    let nb = BigInt::from(n);
    let mut cur = small;
    let mut piece = unit.clone();
    while &large - &cur >= &cur * &nm1 {
        cur *= &nb;
        piece = piece / Rational::from_integer(n);
    }
    let (d, rem) = (&large - &cur).div_rem(&nm1);
    debug_assert!(rem.is_zero(), "piece counts must agree mod n-1");
    if d.is_zero() {
        return Vec::new();
    }
    // The first d coarse pieces on the small side become d*n fine pieces,
    // matched with d*n unit pieces on the large side.
    let small_span = &piece * Rational::from_integer(d.clone());
    let large_span = &unit * Rational::from_integer(d * &nb);
    let node = if swap {
        (x0 + &large_span, y0 + &small_span)
    } else {
        (x0 + &small_span, y0 + &large_span)
    };
    vec![node]
}

/// A member of F_{n,inf} with `(x_i) f = y_i` for every pair.
pub fn interpolate(n: u32, pairs: &[(Rational, Rational)]) -> Result<PlMap> {
    assert!(n >= 2, "n must be at least 2");
    for (i, (x, y)) in pairs.iter().enumerate() {
        let (px, py) = (phi_of(x, n)?, phi_of(y, n)?);
        if px != py {
            return Err(Error::PhiMismatch(i));
        }
    }
    if pairs
        .windows(2)
        .any(|w| w[0].0 >= w[1].0 || w[0].1 >= w[1].1)
    {
        return Err(Error::NotSorted);
    }
    let Some(((x1, y1), (xp, yp))) = pairs.first().zip(pairs.last()) else {
        return Ok(PlMap::identity());
    };

    let low = Rational::from_integer(x1.min(y1).floor() - 1);
    let bx: BigInt = xp.ceil() + 1;
    let nm1 = BigInt::from(n - 1);
    let steps = (yp - Rational::from_integer(bx.clone())) / Rational::from_integer(nm1.clone());
    let by = &bx + (steps.floor() + 1) * &nm1;

    let mut anchors = Vec::with_capacity(pairs.len() + 2);
    anchors.push((low.clone(), low));
    anchors.extend(pairs.iter().cloned());
    anchors.push((Rational::from_integer(bx), Rational::from_integer(by)));

    let mut nodes = vec![anchors[0].clone()];
    for w in anchors.windows(2) {
        let ((xa, ya), (xb, yb)) = (&w[0], &w[1]);
        let dx = xb - xa;
        let dy = yb - ya;
        nodes.extend(segment_nodes(n, (xa, &dx), (ya, &dy)));
        nodes.push(w[1].clone());
    }
    let f = PlMap::from_nodes(Rational::one(), &nodes, Rational::one())?;
    debug_assert!(is_member(&f, n).member);
    Ok(f)
}

/// The transporter and the interval on which it is the translation by
/// `t2 - t1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Transport {
    pub map: PlMap,
    pub middle: (Rational, Rational),
}

/// An element `g` of F_{n,inf} with `(t1) g = t2`, for `t1 = m n^a / k`,
/// `t2 = r n^c / k` and `k(n-1) | r n^c - m n^a` in Z[1/n].
pub fn transport(n: u32, k: u64, t1: &Rational, t2: &Rational) -> Result<Transport> {
    assert!(n >= 2, "n must be at least 2");
    if k == 0 || (n as u64).gcd(&k) != 1 {
        return Err(Error::NotCoprime(n.to_string(), k.to_string()));
    }
    let kr = Rational::from_integer(k);
    for t in [t1, t2] {
        if !in_nadic(&(&kr * t), n) {
            return Err(Error::BadDenominator(format!("{k}*{t} is not in Z[1/{n}]")));
        }
    }
    let modulus = Rational::from_integer(k * (n as u64 - 1));
    let diff = &kr * t2 - &kr * t1;
    if !divides_in_nadic(&modulus, &diff, n)? {
        return Err(Error::HypothesisFail(format!(
            "{modulus} does not divide {diff} in Z[1/{n}]"
        )));
    }

    // smallest s >= 0 with k | 1 + n s
    let s = (0..k)
        .find(|s| (1 + n as u64 * s).is_multiple_of(k))
        .expect("n is invertible mod k");
    let nr = Rational::from_integer(n);
    let x1 = t1 + t1 * &nr * Rational::from_integer(s);
    let x2 = t1 + t1 * &nr * (Rational::from_integer(s) - &kr);
    let shift = t2 - t1;
    let (lo, hi) = if x1 <= x2 { (x1, x2) } else { (x2, x1) };
    let pairs = if lo == hi {
        vec![(lo.clone(), &lo + &shift)]
    } else {
        vec![(lo.clone(), &lo + &shift), (hi.clone(), &hi + &shift)]
    };
    let map = interpolate(n, &pairs)?;
    if map.eval(t1) != *t2 {
        return Err(Error::Internal("transporter misses its target".into()));
    }
    Ok(Transport {
        map,
        middle: (lo, hi),
    })
}

/// An element fixing the rational `t0` whose right-hand slope there is
/// `n^s != 1`: affine `n^s x - k/n^t` on `(x1, x2]` around `t0`, translations
/// outside. `t0 = 0` gives `g(0)`.
pub fn fixed_slope_element(n: u32, t0: &Rational) -> Result<PlMap> {
    assert!(n >= 2, "n must be at least 2");
    if t0.is_zero() {
        return Ok(generator_g(n, 0));
    }
    let dec = decompose_rational(t0, n)?;
    let nb = BigInt::from(n);
    let nm1 = BigInt::from(n - 1);
    let modulus = nb.pow(dec.t as u32);
    let geometric = (nb.pow(dec.s as u32) - 1) / &nm1;
    let k1 = &dec.k / &nm1;
    let alpha0 = (&k1 * mod_inverse(&geometric, &modulus)?).mod_floor(&modulus);

    let scale = Rational::from_integer(modulus.clone());
    let target = t0 * &scale;
    let offset = (&target - Rational::from_integer(alpha0.clone())) / &scale;
    // largest alpha1 < target and smallest alpha2 > target, both = alpha0 mod n^t
    let alpha1 = &alpha0 + &modulus * (offset.ceil() - 1);
    let alpha2 = &alpha0 + &modulus * (offset.floor() + 1);

    let slope = Rational::from_integer(nb.pow(dec.s as u32));
    let intercept = -Rational::new(dec.k.clone(), modulus);
    let node = |alpha: BigInt| {
        let x = Rational::from_integer(alpha) / &scale;
        let y = &slope * &x + &intercept;
        (x, y)
    };
    let f = PlMap::from_nodes(
        Rational::one(),
        &[node(alpha1), node(alpha2)],
        Rational::one(),
    )?;
    if f.eval(t0) != *t0 || !is_member(&f, n).member {
        return Err(Error::Internal(format!(
            "fixed-slope element for {t0} is invalid"
        )));
    }
    Ok(f)
}

/// The unique fixed point of `h`, after checking that `h` is a decreasing
/// involution.
pub fn involution_fixed_point(h: &PlMap) -> Result<Rational> {
    if !h.is_decreasing() || !h.compose(h).is_identity() {
        return Err(Error::NotInvolution);
    }
    h.unique_fixed_point()
}

/// Extends a right half-line map at the fixed point of `h` to the unique
/// element commuting with `h`: `h g h` left of `t0`, `g` right of it.
pub fn centralizer_extend(g_right: &HalfLineMap, h: &PlMap, n: u32) -> Result<PlMap> {
    if g_right.side() != Side::Right {
        return Err(Error::PreconditionFail(
            "expected a right half-line map".into(),
        ));
    }
    let t0 = involution_fixed_point(h)?;
    if t0 != *g_right.anchor() {
        return Err(Error::AnchorMismatch {
            expected: t0.to_string(),
            found: g_right.anchor().to_string(),
        });
    }
    let g = g_right.as_map();
    let left = h.compose(g).compose(h);
    let ext = PlMap::glue(&left, g, &t0)?;
    require_member(&ext, n)?;
    Ok(ext)
}

/// The restriction to `[t0, inf)` of an element commuting with `h`.
pub fn centralizer_restrict(f: &PlMap, h: &PlMap, n: u32) -> Result<HalfLineMap> {
    let t0 = involution_fixed_point(h)?;
    if f.compose(h) != h.compose(f) {
        return Err(Error::NotCentralizing);
    }
    require_member(f, n)?;
    HalfLineMap::restrict(f, &t0, Side::Right)
}
