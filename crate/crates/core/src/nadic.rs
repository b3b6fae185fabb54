//! The n-adic rationals Z[1/n], the residue map `phi_n`, and the small pieces
//! of number theory the constructions lean on.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// `unit * base^exp`, canonical: `unit == 0 => exp == 0`, otherwise
/// `base` does not divide `unit`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NAdic {
    base: u32,
    exp: i64,
    unit: BigInt,
}

impl NAdic {
    pub fn new(base: u32, unit: impl Into<BigInt>, exp: i64) -> Self {
        assert!(base >= 2, "base must be at least 2");
        let mut unit = unit.into();
        let mut exp = exp;
        if unit.is_zero() {
            return NAdic { base, exp: 0, unit };
        }
        let n = BigInt::from(base);
        loop {
            let (quot, rem) = unit.div_rem(&n);
            if !rem.is_zero() {
                break;
            }
            unit = quot;
            exp += 1;
        }
        NAdic { base, exp, unit }
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn exp(&self) -> i64 {
        self.exp
    }

    pub fn unit(&self) -> &BigInt {
        &self.unit
    }

    pub fn value(&self) -> Rational {
        Rational::from_integer(self.unit.clone())
            * Rational::pow(&Rational::from_integer(self.base), self.exp)
    }
}

impl fmt::Display for NAdic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*{}^{}", self.unit, self.base, self.exp)
    }
}

/// A class in Z/m.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Residue {
    pub modulus: u64,
    pub value: u64,
}

impl Residue {
    pub fn new(value: &BigInt, modulus: u64) -> Self {
        assert!(modulus >= 1);
        let m = BigInt::from(modulus);
        let value = value.mod_floor(&m).to_u64().expect("reduced below modulus");
        Residue { modulus, value }
    }

    pub fn add(&self, other: &Residue) -> Residue {
        assert_eq!(self.modulus, other.modulus, "mismatched moduli");
        Residue {
            modulus: self.modulus,
            value: ((self.value as u128 + other.value as u128) % self.modulus as u128) as u64,
        }
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.modulus)
    }
}

/// `phi_n(n^a b) = b mod (n - 1)`. The modulus is 1 when `n = 2`.
pub fn phi_n(x: &NAdic) -> Residue {
    Residue::new(&x.unit, x.base as u64 - 1)
}

/// `phi_n` on a rational, if it lies in Z[1/n].
pub fn phi_of(x: &Rational, n: u32) -> Result<Residue> {
    is_nadic(x, n)
        .map(|a| phi_n(&a))
        .ok_or_else(|| Error::NotNAdic(x.to_string(), n))
}

/// Smallest `e >= 0` with `den | n^e`, if any.
fn nadic_depth(den: &BigInt, n: u32) -> Option<i64> {
    let n = BigInt::from(n);
    let mut d = den.abs();
    let mut e = 0i64;
    while !d.is_one() {
        let g = d.gcd(&n);
        if g.is_one() {
            return None;
        }
        d /= g;
        e += 1;
    }
    Some(e)
}

pub fn is_nadic(x: &Rational, n: u32) -> Option<NAdic> {
    assert!(n >= 2, "base must be at least 2");
    let e = nadic_depth(x.denom(), n)?;
    let scale = BigInt::from(n).pow(e as u32);
    let unit = x.numer() * (scale / x.denom());
    Some(NAdic::new(n, unit, -e))
}

pub fn in_nadic(x: &Rational, n: u32) -> bool {
    nadic_depth(x.denom(), n).is_some()
}

/// Is `x / d` in Z[1/n]?
pub fn divides_in_nadic(d: &Rational, x: &Rational, n: u32) -> Result<bool> {
    for v in [d, x] {
        if !in_nadic(v, n) {
            return Err(Error::NotNAdic(v.to_string(), n));
        }
    }
    if d.is_zero() {
        return Err(Error::ZeroInput);
    }
    Ok(in_nadic(&(x / d), n))
}

/// The exponent `e` with `r = n^e`, if `r` is an integral power of `n`.
pub fn log_n(r: &Rational, n: u32) -> Option<i64> {
    if !r.is_positive() {
        return None;
    }
    let n = BigInt::from(n);
    let exact_power = |v: &BigInt| -> Option<i64> {
        let mut v = v.clone();
        let mut e = 0i64;
        while !v.is_one() {
            let (quot, rem) = v.div_rem(&n);
            if !rem.is_zero() {
                return None;
            }
            v = quot;
            e += 1;
        }
        Some(e)
    };
    if r.denom().is_one() {
        exact_power(r.numer())
    } else if r.numer().is_one() {
        exact_power(r.denom()).map(|e| -e)
    } else {
        None
    }
}

pub fn n_pow(n: u32, e: i64) -> Rational {
    Rational::pow(&Rational::from_integer(n), e)
}

/// `u` in `[0, m)` with `a * u = 1 (mod m)`.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Result<BigInt> {
    if !m.is_positive() {
        return Err(Error::PreconditionFail(format!(
            "modulus {m} must be positive"
        )));
    }
    let ext = a.mod_floor(m).extended_gcd(m);
    if !ext.gcd.is_one() {
        return Err(Error::NotCoprime(a.to_string(), m.to_string()));
    }
    Ok(ext.x.mod_floor(m))
}

/// Smallest `s >= 1` with `n^s = 1 (mod m)`; requires `gcd(n, m) = 1`.
pub fn multiplicative_order(n: u32, m: &BigInt) -> Result<u64> {
    let n = BigInt::from(n);
    if !n.gcd(m).is_one() {
        return Err(Error::NotCoprime(n.to_string(), m.to_string()));
    }
    if m.is_one() {
        return Ok(1);
    }
    let base = n.mod_floor(m);
    let mut acc = base.clone();
    let mut s = 1u64;
    while !acc.is_one() {
        acc = (acc * &base).mod_floor(m);
        s += 1;
    }
    Ok(s)
}

/// `t0 = k / (n^t (n^s - 1))` with `(n - 1) | k` and `s, t > 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Decomposition {
    #[serde(serialize_with = "serialize_display")]
    pub k: BigInt,
    pub s: u64,
    pub t: u64,
}

fn serialize_display<S: serde::Serializer>(
    v: &BigInt,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

impl Decomposition {
    pub fn reconstruct(&self, n: u32) -> Rational {
        let nb = BigInt::from(n);
        let den = nb.pow(self.t as u32) * (nb.pow(self.s as u32) - 1);
        Rational::new(self.k.clone(), den)
    }
}

/// Writes `t0 = r/m` with `r = p(n-1)`, `m = q(n-1)`, splits `m = m1 m2` with
/// the primes of `m1` dividing `n` and `gcd(m2, n) = 1`, then takes the
/// smallest `t >= 1` with `m1 | n^t` and `s = ord_{m2}(n)`.
pub fn decompose_rational(t0: &Rational, n: u32) -> Result<Decomposition> {
    if t0.is_zero() {
        return Err(Error::ZeroInput);
    }
    let nb = BigInt::from(n);
    let nm1 = BigInt::from(n - 1);
    let r = t0.numer() * &nm1;
    let m = t0.denom() * &nm1;

    let mut m1 = BigInt::one();
    let mut m2 = m.clone();
    loop {
        let g = m2.gcd(&nb);
        if g.is_one() {
            break;
        }
        m2 /= &g;
        m1 *= g;
    }

    let mut t = 1u64;
    let mut nt = nb.clone();
    while !(&nt % &m1).is_zero() {
        nt *= &nb;
        t += 1;
    }
    let s = multiplicative_order(n, &m2)?;
    let full = &nt * (nb.pow(s as u32) - 1);
    debug_assert!(Zero::is_zero(&(&full % &m)));
    let k = (full / m) * r;
    Ok(Decomposition { k, s, t })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn nadic(x: &str, n: u32) -> NAdic {
        is_nadic(&q(x), n).unwrap()
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi_n(&nadic("6", 3)).value, 0);
        assert_eq!(phi_n(&NAdic::new(7, 0, 0)).value, 0);
        assert_eq!(phi_n(&nadic("7/25", 5)).value, 3);
        assert_eq!(phi_n(&nadic("-1", 3)).value, 1);
        assert_eq!(
            phi_n(&nadic("5/8", 2)),
            Residue {
                modulus: 1,
                value: 0
            }
        );
    }

    #[test]
    fn is_nadic_examples() {
        let a = nadic("1/8", 2);
        assert_eq!((a.unit().clone(), a.exp()), (BigInt::from(1), -3));
        assert!(is_nadic(&q("1/3"), 2).is_none());
        let b = nadic("5", 3);
        assert_eq!((b.unit().clone(), b.exp()), (BigInt::from(5), 0));
        let c = nadic("18", 3);
        assert_eq!((c.unit().clone(), c.exp()), (BigInt::from(2), 2));
        assert_eq!(nadic("5/36", 6).value(), q("5/36"));
        assert!(is_nadic(&q("1/4"), 6).is_some());
        assert_eq!(NAdic::new(3, 0, 5).exp(), 0);
    }

    #[test]
    fn divides_examples() {
        assert!(divides_in_nadic(&q("3"), &q("3"), 2).unwrap());
        assert!(!divides_in_nadic(&q("4"), &q("1"), 3).unwrap());
        assert!(divides_in_nadic(&q("4"), &q("4"), 3).unwrap());
        assert!(matches!(
            divides_in_nadic(&q("1/5"), &q("1"), 3),
            Err(Error::NotNAdic(..))
        ));
    }

    #[test]
    fn mod_inverse_examples() {
        let b = BigInt::from;
        assert_eq!(mod_inverse(&b(3), &b(4)).unwrap(), b(3));
        assert_eq!(mod_inverse(&b(1), &b(9)).unwrap(), b(1));
        assert_eq!(mod_inverse(&b(-1), &b(5)).unwrap(), b(4));
        assert!(matches!(
            mod_inverse(&b(2), &b(4)),
            Err(Error::NotCoprime(..))
        ));
    }

    #[test]
    fn decompose_examples() {
        let d = decompose_rational(&q("1/3"), 2).unwrap();
        assert_eq!((d.k, d.s, d.t), (BigInt::from(2), 2, 1));
        let d = decompose_rational(&q("1/2"), 3).unwrap();
        assert_eq!((d.k, d.s, d.t), (BigInt::from(12), 2, 1));
        let d = decompose_rational(&q("5"), 2).unwrap();
        assert_eq!((d.k, d.s, d.t), (BigInt::from(10), 1, 1));
        assert_eq!(decompose_rational(&q("0"), 3), Err(Error::ZeroInput));
    }

    #[test]
    fn decompose_negative_keeps_sign() {
        let d = decompose_rational(&q("-7/12"), 5).unwrap();
        assert!(d.k.is_negative());
        assert_eq!(d.reconstruct(5), q("-7/12"));
        assert!((&d.k % BigInt::from(4)).is_zero());
    }

    #[test]
    fn log_n_detects_powers() {
        assert_eq!(log_n(&q("9"), 3), Some(2));
        assert_eq!(log_n(&q("1/27"), 3), Some(-3));
        assert_eq!(log_n(&q("1"), 3), Some(0));
        assert_eq!(log_n(&q("6"), 3), None);
        assert_eq!(log_n(&q("-3"), 3), None);
        assert_eq!(log_n(&q("3/9"), 3), Some(-1));
    }
}
