//! Order-two elements of the extension F_{n,inf} x| <h> by a decreasing PL
//! involution `h`: recognition, fixed points, explicit conjugators between
//! them, and the residue invariant that certifies conjugacy.

use num_bigint::BigInt;
use num_integer::Integer;
use serde::Serialize;

use crate::construct::{involution_fixed_point, transport};
use crate::error::{Error, Result};
use crate::nadic::{divides_in_nadic, is_nadic, mod_inverse, Residue};
use crate::plmap::PlMap;
use crate::rational::Rational;
use crate::thompson::{is_member, require_member};

/// Splits `m = f h^eps` with `f` in F_{n,inf}.
pub fn in_extension(m: &PlMap, h: &PlMap, n: u32) -> Result<(PlMap, u8)> {
    involution_fixed_point(h)?;
    let (f, eps) = if m.is_increasing() {
        (m.clone(), 0)
    } else {
        (m.compose(&h.invert()), 1)
    };
    if is_member(&f, n).member {
        Ok((f, eps))
    } else {
        Err(Error::NotInGroup)
    }
}

pub fn is_order_two(m: &PlMap) -> bool {
    !m.is_identity() && m.compose(m).is_identity()
}

/// `u^-1 (x -> -x + c) u`, whose fixed point is `(c/2) u`.
pub fn make_involution(u: &PlMap, c: &Rational, n: u32) -> Result<PlMap> {
    require_member(u, n)?;
    Ok(u.invert().compose(&PlMap::reflection(c.clone())).compose(u))
}

/// `g` in F_{n,inf} fixing `t0` with `phi(g)^-1 f g = f_tilde`, where `phi`
/// is conjugation by `h`. Built as `f^-1 f_tilde` left of `t0` and the
/// identity right of it.
pub fn tec3_conjugator(n: u32, h: &PlMap, f: &PlMap, f_tilde: &PlMap) -> Result<PlMap> {
    let fail = |clause: &str| Error::PreconditionFail(clause.to_string());
    let t0 = involution_fixed_point(h).map_err(|_| fail("h is a decreasing involution"))?;
    for (name, map) in [("f", f), ("f_tilde", f_tilde)] {
        if !is_member(map, n).member {
            return Err(fail(&format!("{name} is in F_{{{n},inf}}")));
        }
        if map.conjugate(h) != map.invert() {
            return Err(fail(&format!("phi({name}) = {name}^-1")));
        }
        if map.eval(&t0) != t0 {
            return Err(fail(&format!("{name} fixes t0 = {t0}")));
        }
    }
    let left = f.invert().compose(f_tilde);
    let g = PlMap::glue(&left, &PlMap::identity(), &t0)?;
    let lhs = g.conjugate(h).invert().compose(f).compose(&g);
    if lhs != *f_tilde || !is_member(&g, n).member {
        return Err(Error::Internal(
            "tec3 conjugator failed verification".into(),
        ));
    }
    Ok(g)
}

/// A verified conjugator between two order-two elements.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvolutionConjugacy {
    pub conjugator: PlMap,
    pub transporter: PlMap,
    pub t1: Rational,
    pub t2: Rational,
}

fn order_two_in_extension(m: &PlMap, h: &PlMap, n: u32) -> Result<Rational> {
    if !is_order_two(m) {
        return Err(Error::NotOrderTwo);
    }
    let (_, eps) = in_extension(m, h, n)?;
    debug_assert_eq!(eps, 1);
    m.unique_fixed_point()
}

fn check_lattice(t: &Rational, k: u64, n: u32) -> Result<Rational> {
    let kt = Rational::from_integer(k) * t;
    if is_nadic(&kt, n).is_none() {
        return Err(Error::FixedPointNotLattice(t.to_string()));
    }
    Ok(kt)
}

/// `g` in F_{n,inf} with `g^-1 m2 g = m1`, when the fixed points satisfy
/// `k(n-1) | k t2 - k t1` in Z[1/n].
pub fn conjugate_involutions(
    n: u32,
    h: &PlMap,
    m1: &PlMap,
    m2: &PlMap,
    k: u64,
) -> Result<InvolutionConjugacy> {
    if k == 0 || (n as u64).gcd(&k) != 1 {
        return Err(Error::NotCoprime(n.to_string(), k.to_string()));
    }
    let t1 = order_two_in_extension(m1, h, n)?;
    let t2 = order_two_in_extension(m2, h, n)?;
    let kt1 = check_lattice(&t1, k, n)?;
    let kt2 = check_lattice(&t2, k, n)?;
    let modulus = Rational::from_integer(k * (n as u64 - 1));
    if !divides_in_nadic(&modulus, &(&kt2 - &kt1), n)? {
        return Err(Error::NotCertified(format!(
            "{modulus} does not divide {} in Z[1/{n}]",
            &kt2 - &kt1
        )));
    }

    // Move m2's fixed point onto t1, then solve the fixed-point problem there.
    let ghat = transport(n, k, &t1, &t2)?.map;
    let ghat_inv = ghat.invert();
    let moved = ghat.compose(m2).compose(&ghat_inv);
    let f = m1.compose(&moved);
    let g = tec3_conjugator(n, m1, &f, &PlMap::identity())?;
    let conjugator = ghat_inv.compose(&g);

    if conjugator.invert().compose(m2).compose(&conjugator) != *m1
        || !is_member(&conjugator, n).member
    {
        return Err(Error::Internal(
            "involution conjugator failed verification".into(),
        ));
    }
    Ok(InvolutionConjugacy {
        conjugator,
        transporter: ghat,
        t1,
        t2,
    })
}

/// The class of `k t` in Z[1/n] / k(n-1) Z[1/n] = Z/k(n-1), `t` the fixed
/// point of `m`.
pub fn conjugacy_invariant(n: u32, k: u64, m: &PlMap) -> Result<Residue> {
    if !is_order_two(m) {
        return Err(Error::NotOrderTwo);
    }
    if k == 0 || (n as u64).gcd(&k) != 1 {
        return Err(Error::NotCoprime(n.to_string(), k.to_string()));
    }
    let t = m.unique_fixed_point()?;
    let kt = check_lattice(&t, k, n)?;
    let modulus = k * (n as u64 - 1);
    let mb = BigInt::from(modulus);
    // k t = a / n^e
    let a = kt.numer();
    let den = kt.denom();
    let inv = mod_inverse(&den.mod_floor(&mb), &mb)?;
    Ok(Residue::new(&(a * inv), modulus))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HalfLattice {
    /// `2t` lies in Z[1/n].
    pub ok: bool,
    pub t: Rational,
    /// `t` itself lies in Z[1/n].
    pub in_nadic: bool,
    pub n_even: bool,
}

pub fn fixed_point_in_half_lattice(n: u32, m: &PlMap) -> Result<HalfLattice> {
    if !is_order_two(m) {
        return Err(Error::NotOrderTwo);
    }
    let t = m.unique_fixed_point()?;
    let two_t = Rational::from_integer(2) * &t;
    Ok(HalfLattice {
        ok: is_nadic(&two_t, n).is_some(),
        in_nadic: is_nadic(&t, n).is_some(),
        n_even: n.is_multiple_of(2),
        t,
    })
}
