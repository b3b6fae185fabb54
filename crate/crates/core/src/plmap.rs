//! Piecewise-linear homeomorphisms of the real line with finitely many
//! breakpoints and affine tails.
//!
//! Maps act on the right: `a.compose(&b)` applies `a` first, so
//! `a.compose(&b).eval(x) == b.eval(&a.eval(x))`. With that convention the
//! conjugate `h^-1 f h` reads `h.invert().compose(f).compose(h)`.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// `x -> slope * x + intercept`, with `slope != 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Affine {
    pub slope: Rational,
    pub intercept: Rational,
}

impl Affine {
    pub fn new(slope: Rational, intercept: Rational) -> Self {
        Affine { slope, intercept }
    }

    pub fn identity() -> Self {
        Affine::new(Rational::one(), Rational::zero())
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        &self.slope * x + &self.intercept
    }

    /// Apply `self`, then `next`.
    pub fn then(&self, next: &Affine) -> Affine {
        Affine {
            slope: &self.slope * &next.slope,
            intercept: &next.slope * &self.intercept + &next.intercept,
        }
    }

    pub fn inverse(&self) -> Affine {
        let inv = self.slope.recip().expect("affine piece with zero slope");
        Affine {
            intercept: -(&self.intercept * &inv),
            slope: inv,
        }
    }
}

impl fmt::Display for Affine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lin = if self.slope.is_one() {
            "x".to_string()
        } else if self.slope == -1 {
            "-x".to_string()
        } else {
            format!("{}x", self.slope)
        };
        if self.intercept.is_zero() {
            write!(f, "{lin}")
        } else if self.intercept.is_negative() {
            write!(f, "{lin}{}", self.intercept)
        } else {
            write!(f, "{lin}+{}", self.intercept)
        }
    }
}

/// Canonical PL homeomorphism: strictly increasing breakpoints, one more
/// piece than breakpoints, continuity at every breakpoint, no two adjacent
/// pieces equal, and all slopes of one sign.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawPlMap", into = "RawPlMap")]
pub struct PlMap {
    breakpoints: Vec<Rational>,
    pieces: Vec<Affine>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPlMap {
    breakpoints: Vec<Rational>,
    pieces: Vec<Affine>,
}

impl TryFrom<RawPlMap> for PlMap {
    type Error = Error;
    fn try_from(raw: RawPlMap) -> Result<Self> {
        PlMap::new(raw.breakpoints, raw.pieces)
    }
}

impl From<PlMap> for RawPlMap {
    fn from(m: PlMap) -> Self {
        RawPlMap {
            breakpoints: m.breakpoints,
            pieces: m.pieces,
        }
    }
}

impl PlMap {
    /// Validates every invariant, then drops redundant breakpoints.
    pub fn new(breakpoints: Vec<Rational>, pieces: Vec<Affine>) -> Result<Self> {
        if pieces.len() != breakpoints.len() + 1 {
            return Err(Error::InvalidMap(format!(
                "{} breakpoints need {} pieces, got {}",
                breakpoints.len(),
                breakpoints.len() + 1,
                pieces.len()
            )));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidMap(
                "breakpoints not strictly increasing".into(),
            ));
        }
        if pieces.iter().any(|p| p.slope.is_zero()) {
            return Err(Error::InvalidMap("zero slope".into()));
        }
        let positive = pieces[0].slope.is_positive();
        if pieces.iter().any(|p| p.slope.is_positive() != positive) {
            return Err(Error::NotMonotone);
        }
        for (i, b) in breakpoints.iter().enumerate() {
            if pieces[i].eval(b) != pieces[i + 1].eval(b) {
                return Err(Error::InvalidMap(format!("discontinuous at {b}")));
            }
        }
        Ok(PlMap::from_parts_unchecked(breakpoints, pieces))
    }

    fn from_parts_unchecked(breakpoints: Vec<Rational>, pieces: Vec<Affine>) -> Self {
        let mut out_b = Vec::with_capacity(breakpoints.len());
        let mut out_p: Vec<Affine> = Vec::with_capacity(pieces.len());
        let mut pieces = pieces.into_iter();
        out_p.push(pieces.next().expect("at least one piece"));
        for (b, p) in breakpoints.into_iter().zip(pieces) {
            if out_p.last() != Some(&p) {
                out_b.push(b);
                out_p.push(p);
            }
        }
        PlMap {
            breakpoints: out_b,
            pieces: out_p,
        }
    }

    /// Interpolates through `nodes` (strictly increasing x), extending with
    /// the given tail slopes beyond the first and last node.
    pub fn from_nodes(
        left_slope: Rational,
        nodes: &[(Rational, Rational)],
        right_slope: Rational,
    ) -> Result<Self> {
        let (x0, y0) = nodes
            .first()
            .ok_or_else(|| Error::InvalidMap("no interpolation nodes".into()))?;
        let mut pieces = vec![Affine::new(left_slope.clone(), y0 - &left_slope * x0)];
        for w in nodes.windows(2) {
            let ((xa, ya), (xb, yb)) = (&w[0], &w[1]);
            if xa >= xb {
                return Err(Error::InvalidMap("nodes not strictly increasing".into()));
            }
            let slope = (yb - ya) / (xb - xa);
            pieces.push(Affine::new(slope.clone(), ya - &slope * xa));
        }
        let (xl, yl) = nodes.last().unwrap();
        pieces.push(Affine::new(right_slope.clone(), yl - &right_slope * xl));
        let breakpoints = nodes.iter().map(|(x, _)| x.clone()).collect();
        PlMap::new(breakpoints, pieces)
    }

    pub fn identity() -> Self {
        PlMap::affine(Affine::identity())
    }

    pub fn translation(s: Rational) -> Self {
        PlMap::affine(Affine::new(Rational::one(), s))
    }

    /// Panics on a zero slope.
    pub fn affine(piece: Affine) -> Self {
        assert!(!piece.slope.is_zero(), "zero slope");
        PlMap {
            breakpoints: Vec::new(),
            pieces: vec![piece],
        }
    }

    /// `x -> -x + c`.
    pub fn reflection(c: Rational) -> Self {
        PlMap::affine(Affine::new(-Rational::one(), c))
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Affine] {
        &self.pieces
    }

    pub fn is_identity(&self) -> bool {
        self.breakpoints.is_empty() && self.pieces[0] == Affine::identity()
    }

    pub fn is_increasing(&self) -> bool {
        self.pieces[0].slope.is_positive()
    }

    pub fn is_decreasing(&self) -> bool {
        !self.is_increasing()
    }

    pub fn left_tail(&self) -> &Affine {
        &self.pieces[0]
    }

    pub fn right_tail(&self) -> &Affine {
        self.pieces.last().unwrap()
    }

    /// The piece governing an open neighbourhood just right of `x`.
    pub fn piece_right_of(&self, x: &Rational) -> &Affine {
        &self.pieces[self.breakpoints.partition_point(|b| b <= x)]
    }

    /// The piece governing an open neighbourhood just left of `x`.
    pub fn piece_left_of(&self, x: &Rational) -> &Affine {
        &self.pieces[self.breakpoints.partition_point(|b| b < x)]
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.piece_left_of(x).eval(x)
    }

    pub fn slope_right_at(&self, x: &Rational) -> Rational {
        self.piece_right_of(x).slope.clone()
    }

    pub fn slope_left_at(&self, x: &Rational) -> Rational {
        self.piece_left_of(x).slope.clone()
    }

    pub fn invert(&self) -> PlMap {
        let images: Vec<Rational> = self
            .breakpoints
            .iter()
            .zip(&self.pieces)
            .map(|(b, p)| p.eval(b))
            .collect();
        let pieces: Vec<Affine> = self.pieces.iter().map(Affine::inverse).collect();
        if self.is_increasing() {
            PlMap::from_parts_unchecked(images, pieces)
        } else {
            PlMap::from_parts_unchecked(
                images.into_iter().rev().collect(),
                pieces.into_iter().rev().collect(),
            )
        }
    }

    /// Apply `self`, then `next`.
    pub fn compose(&self, next: &PlMap) -> PlMap {
        // Sweep x upwards. The images of x sweep next's breakpoints upwards
        // when self is increasing and downwards when it is decreasing.
        let inc = self.is_increasing();
        let nb = &next.breakpoints;
        let mut i = 0;
        let mut j = if inc { 0 } else { nb.len() };
        let mut cuts = Vec::with_capacity(self.breakpoints.len() + nb.len());
        let mut pieces = Vec::with_capacity(cuts.capacity() + 1);
        pieces.push(self.pieces[0].then(&next.pieces[j]));
        loop {
            let own = self.breakpoints.get(i);
            let other = if inc {
                nb.get(j)
            } else {
                j.checked_sub(1).map(|k| &nb[k])
            };
            let (step_i, step_j) = match (own, other) {
                (None, None) => break,
                (Some(_), None) => (true, false),
                (None, Some(_)) => (false, true),
                (Some(b), Some(c)) => {
                    let y = self.pieces[i].eval(b);
                    match (y.cmp(c), inc) {
                        (Ordering::Equal, _) => (true, true),
                        (Ordering::Less, true) | (Ordering::Greater, false) => (true, false),
                        _ => (false, true),
                    }
                }
            };
            if step_i {
                cuts.push(self.breakpoints[i].clone());
            } else {
                let c = other.expect("next breakpoint");
                let p = &self.pieces[i];
                cuts.push((c - &p.intercept) / &p.slope);
            }
            if step_i {
                i += 1;
            }
            if step_j {
                if inc {
                    j += 1;
                } else {
                    j -= 1;
                }
            }
            pieces.push(self.pieces[i].then(&next.pieces[j]));
        }
        PlMap::from_parts_unchecked(cuts, pieces)
    }

    /// `h^-1 self h`.
    pub fn conjugate(&self, h: &PlMap) -> PlMap {
        h.invert().compose(self).compose(h)
    }

    pub fn pow(&self, e: i64) -> PlMap {
        let base = if e < 0 { self.invert() } else { self.clone() };
        let mut acc = PlMap::identity();
        for _ in 0..e.unsigned_abs() {
            acc = acc.compose(&base);
        }
        acc
    }

    /// The unique fixed point of a strictly decreasing map.
    pub fn unique_fixed_point(&self) -> Result<Rational> {
        if !self.is_decreasing() {
            return Err(Error::NotDecreasing);
        }
        // x - f(x) is strictly increasing, so exactly one piece contains the root.
        for (i, p) in self.pieces.iter().enumerate() {
            let x = &p.intercept / (Rational::one() - &p.slope);
            let above_lo = i == 0 || x >= self.breakpoints[i - 1];
            let below_hi = i == self.breakpoints.len() || x <= self.breakpoints[i];
            if above_lo && below_hi {
                return Ok(x);
            }
        }
        unreachable!("a decreasing PL homeomorphism has a fixed point")
    }

    /// `left` on `(-inf, at]`, `right` on `[at, inf)`. Both must agree at `at`.
    pub fn glue(left: &PlMap, right: &PlMap, at: &Rational) -> Result<PlMap> {
        if left.eval(at) != right.eval(at) {
            return Err(Error::InvalidMap(format!("halves disagree at {at}")));
        }
        let il = left.breakpoints.partition_point(|b| b < at);
        let ir = right.breakpoints.partition_point(|b| b <= at);
        let mut breakpoints = left.breakpoints[..il].to_vec();
        breakpoints.push(at.clone());
        breakpoints.extend_from_slice(&right.breakpoints[ir..]);
        let mut pieces = left.pieces[..=il].to_vec();
        pieces.extend_from_slice(&right.pieces[ir..]);
        PlMap::new(breakpoints, pieces)
    }

    pub fn split_at(&self, t0: &Rational) -> Result<(HalfLineMap, HalfLineMap)> {
        if !self.is_increasing() {
            return Err(Error::NotMonotone);
        }
        if self.eval(t0) != *t0 {
            return Err(Error::NotFixed(t0.to_string()));
        }
        let id = PlMap::identity();
        let left = PlMap::glue(self, &id, t0)?;
        let right = PlMap::glue(&id, self, t0)?;
        Ok((
            HalfLineMap {
                anchor: t0.clone(),
                side: Side::Left,
                map: left,
            },
            HalfLineMap {
                anchor: t0.clone(),
                side: Side::Right,
                map: right,
            },
        ))
    }

    pub fn join_at(left: &HalfLineMap, right: &HalfLineMap) -> Result<PlMap> {
        if left.side != Side::Left || right.side != Side::Right {
            return Err(Error::InvalidMap(
                "join needs a left and a right half".into(),
            ));
        }
        if left.anchor != right.anchor {
            return Err(Error::AnchorMismatch {
                expected: left.anchor.to_string(),
                found: right.anchor.to_string(),
            });
        }
        PlMap::glue(&left.map, &right.map, &left.anchor)
    }
}

impl fmt::Display for PlMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.pieces.iter().enumerate() {
            if i > 0 {
                write!(f, " | ")?;
            }
            write!(f, "{p}")?;
            if i > 0 && i < self.breakpoints.len() {
                write!(
                    f,
                    " on [{},{}]",
                    self.breakpoints[i - 1],
                    self.breakpoints[i]
                )?;
            }
        }
        write!(f, ")")
    }
}

impl fmt::Debug for PlMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PlMap{self} breaks {:?}", self.breakpoints)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// An increasing PL self-map of a half line fixing its anchor, stored as the
/// full-line map that is the identity on the other side.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct HalfLineMap {
    anchor: Rational,
    side: Side,
    map: PlMap,
}

impl HalfLineMap {
    /// Only the part of `map` on `side` of `anchor` is kept.
    pub fn restrict(map: &PlMap, anchor: &Rational, side: Side) -> Result<Self> {
        if !map.is_increasing() {
            return Err(Error::NotMonotone);
        }
        if map.eval(anchor) != *anchor {
            return Err(Error::NotFixed(anchor.to_string()));
        }
        let id = PlMap::identity();
        let map = match side {
            Side::Left => PlMap::glue(map, &id, anchor)?,
            Side::Right => PlMap::glue(&id, map, anchor)?,
        };
        Ok(HalfLineMap {
            anchor: anchor.clone(),
            side,
            map,
        })
    }

    pub fn identity(anchor: Rational, side: Side) -> Self {
        HalfLineMap {
            anchor,
            side,
            map: PlMap::identity(),
        }
    }

    pub fn anchor(&self) -> &Rational {
        &self.anchor
    }

    pub fn side(&self) -> Side {
        self.side
    }

    /// The full-line extension by the identity.
    pub fn as_map(&self) -> &PlMap {
        &self.map
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.map.eval(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use crate::thompson::{generator_g, generator_t};

    fn map(nodes: &[(&str, &str)], left: &str, right: &str) -> PlMap {
        let nodes: Vec<_> = nodes.iter().map(|(x, y)| (q(x), q(y))).collect();
        PlMap::from_nodes(q(left), &nodes, q(right)).unwrap()
    }

    #[test]
    fn evaluate_generator() {
        let g = generator_g(3, 0);
        assert_eq!(g.eval(&q("1/2")), q("3/2"));
        assert_eq!(g.eval(&q("-5")), q("-5"));
        assert_eq!(g.eval(&q("2")), q("4"));
    }

    #[test]
    fn compose_examples() {
        assert!(generator_t(1).compose(&generator_t(-1)).is_identity());
        let t2 = generator_t(2);
        let c = t2.invert().compose(&generator_g(3, 0)).compose(&t2);
        assert_eq!(c, generator_g(3, 2));
        let g = generator_g(2, 0);
        let gg = g.compose(&g);
        assert_eq!(gg, map(&[("0", "0"), ("1/2", "2"), ("1", "3")], "1", "1"));
        assert_eq!(gg.breakpoints(), &[q("0"), q("1/2"), q("1")]);
        assert_eq!(gg.pieces()[1], Affine::new(q("4"), q("0")));
        assert_eq!(gg.pieces()[2], Affine::new(q("2"), q("1")));
        assert_eq!(gg.pieces()[3], Affine::new(q("1"), q("2")));
    }

    #[test]
    fn invert_examples() {
        assert!(PlMap::identity().invert().is_identity());
        assert_eq!(generator_t(3).invert(), generator_t(-3));
        let inv = generator_g(2, 0).invert();
        assert_eq!(inv, map(&[("0", "0"), ("2", "1")], "1", "1"));
        let refl = map(&[("0", "0"), ("1", "-3")], "-1", "-1");
        assert!(refl.compose(&refl.invert()).is_identity());
        assert!(refl.invert().compose(&refl).is_identity());
    }

    #[test]
    fn equality_is_structural() {
        assert_eq!(PlMap::identity(), PlMap::translation(q("0")));
        assert_ne!(generator_g(2, 0), generator_g(2, 1));
        let redundant = PlMap::new(
            vec![q("1"), q("2")],
            vec![
                Affine::identity(),
                Affine::identity(),
                Affine::new(q("2"), q("-2")),
            ],
        )
        .unwrap();
        assert_eq!(redundant.breakpoints(), &[q("2")]);
    }

    #[test]
    fn new_rejects_invalid() {
        let p = |s: &str, c: &str| Affine::new(q(s), q(c));
        assert!(matches!(
            PlMap::new(vec![q("0")], vec![p("1", "0"), p("2", "1")]),
            Err(Error::InvalidMap(_))
        ));
        assert_eq!(
            PlMap::new(vec![q("0")], vec![p("1", "0"), p("-1", "0")]),
            Err(Error::NotMonotone)
        );
        assert!(PlMap::new(vec![q("1"), q("0")], vec![p("1", "0"); 3]).is_err());
        assert!(PlMap::new(vec![], vec![p("0", "1")]).is_err());
        assert!(PlMap::new(vec![q("0")], vec![p("1", "0")]).is_err());
    }

    #[test]
    fn conjugate_examples() {
        let f = generator_g(3, 1);
        assert_eq!(f.conjugate(&PlMap::identity()), f);
        assert_eq!(
            generator_g(3, 0).conjugate(&generator_t(2)),
            generator_g(3, 2)
        );
        let h0 = PlMap::reflection(q("0"));
        for n in 2..=4u32 {
            for i in -2..3i64 {
                let rho = generator_g(n, -i - 1).compose(&generator_t(-(n as i64 - 1)));
                assert_eq!(generator_g(n, i).conjugate(&h0), rho);
            }
        }
    }

    #[test]
    fn fixed_point_examples() {
        assert_eq!(
            PlMap::reflection(q("0")).unique_fixed_point().unwrap(),
            q("0")
        );
        assert_eq!(
            PlMap::reflection(q("1")).unique_fixed_point().unwrap(),
            q("1/2")
        );
        let t1 = generator_t(1);
        let moved = t1.invert().compose(&PlMap::reflection(q("0"))).compose(&t1);
        assert_eq!(moved.unique_fixed_point().unwrap(), q("1"));
        assert_eq!(
            generator_g(2, 0).unique_fixed_point(),
            Err(Error::NotDecreasing)
        );
        let bent = map(&[("-1", "3"), ("2", "-3")], "-4", "-1/4");
        let t = bent.unique_fixed_point().unwrap();
        assert_eq!(bent.eval(&t), t);
    }

    #[test]
    fn one_sided_slopes() {
        let g = generator_g(2, 0);
        assert_eq!(g.slope_right_at(&q("0")), q("2"));
        assert_eq!(g.slope_left_at(&q("0")), q("1"));
        assert_eq!(g.slope_left_at(&q("1/2")), q("2"));
        assert_eq!(PlMap::identity().slope_right_at(&q("7/3")), q("1"));
    }

    #[test]
    fn split_and_join() {
        let id = PlMap::identity();
        let (l, r) = id.split_at(&q("0")).unwrap();
        assert!(l.as_map().is_identity() && r.as_map().is_identity());
        assert!(PlMap::join_at(&l, &r).unwrap().is_identity());

        let g = generator_g(2, 0);
        let (l, r) = g.split_at(&q("0")).unwrap();
        assert!(l.as_map().is_identity());
        assert_eq!(r.as_map(), &g);
        assert_eq!(PlMap::join_at(&l, &r).unwrap(), g);
        assert_eq!(g.split_at(&q("1/2")), Err(Error::NotFixed("1/2".into())));

        // unequal one-sided slopes at the anchor produce a breakpoint there
        let left = HalfLineMap::restrict(
            &map(&[("-2", "-1"), ("0", "0")], "1", "1"),
            &q("0"),
            Side::Left,
        )
        .unwrap();
        let right = HalfLineMap::identity(q("0"), Side::Right);
        let joined = PlMap::join_at(&left, &right).unwrap();
        assert!(joined.breakpoints().contains(&q("0")));
        assert!(matches!(
            PlMap::join_at(&left, &HalfLineMap::identity(q("1"), Side::Right)),
            Err(Error::AnchorMismatch { .. })
        ));
    }

    #[test]
    fn json_round_trip_and_validation() {
        let g = generator_g(3, 1);
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(
            s,
            r#"{"breakpoints":["1","2"],"pieces":[{"slope":"1","intercept":"0"},{"slope":"3","intercept":"-2"},{"slope":"1","intercept":"2"}]}"#
        );
        let back: PlMap = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
        let broken = r#"{"breakpoints":["1"],"pieces":[{"slope":"1","intercept":"0"},{"slope":"3","intercept":"0"}]}"#;
        assert!(serde_json::from_str::<PlMap>(broken).is_err());
    }
}
