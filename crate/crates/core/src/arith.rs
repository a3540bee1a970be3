//! Exact integer and rational helpers shared by every module.
//!
//! Integers are arbitrary precision. On the wire they are JSON numbers when
//! they fit in an `i64` and decimal strings otherwise; rationals are always
//! `"p/q"` strings (plain integers are accepted on input).

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};
use std::fmt;

pub type Int = BigInt;
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse rational `{0}`")]
pub struct ParseRationalError(pub String);

pub fn int(v: i64) -> Int {
    Int::from(v)
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(Int::from(n), Int::from(d))
}

pub fn rat_int(v: &Int) -> Rational {
    Rational::from_integer(v.clone())
}

pub fn rat_vec(vals: &[i64]) -> Vec<Rational> {
    vals.iter().map(|&v| rat(v, 1)).collect()
}

/// Parses `"p/q"`, `"p"` or `"-p/q"`. Whitespace around tokens is ignored.
pub fn parse_rational(s: &str) -> Result<Rational, ParseRationalError> {
    let err = || ParseRationalError(s.to_string());
    let t = s.trim();
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let n: Int = num.parse().map_err(|_| err())?;
    let d: Int = den.parse().map_err(|_| err())?;
    if d.is_zero() {
        return Err(err());
    }
    Ok(Rational::new(n, d))
}

/// Comma separated list of rationals, as taken on the command line.
pub fn parse_rational_list(s: &str) -> Result<Vec<Rational>, ParseRationalError> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(parse_rational)
        .collect()
}

pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn floor_rat(q: &Rational) -> Int {
    q.floor().to_integer()
}

pub fn ceil_rat(q: &Rational) -> Int {
    q.ceil().to_integer()
}

/// Ceiling of `n / d` for `d > 0`.
pub fn ceil_div(n: i64, d: i64) -> i64 {
    debug_assert!(d > 0);
    Integer::div_ceil(&n, &d)
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

/// Scales a rational vector to the primitive integer vector on the same ray.
pub fn primitive_integer(v: &[Rational]) -> Vec<Int> {
    let lcm = v
        .iter()
        .fold(Int::one(), |acc, q| acc.lcm(q.denom()));
    let ints: Vec<Int> = v.iter().map(|q| (q * rat_int(&lcm)).to_integer()).collect();
    let g = ints.iter().fold(Int::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() || g.is_one() {
        ints
    } else {
        ints.into_iter().map(|x| x / &g).collect()
    }
}

/// Exact square root of a non-negative rational when both numerator and
/// denominator are perfect squares.
pub fn rational_sqrt(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    if &(&n * &n) == q.numer() && &(&d * &d) == q.denom() {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Rational approximation of a float on a dyadic grid; used only for
/// heuristic proposals that are then checked exactly.
pub fn dyadic(x: f64, bits: u32) -> Rational {
    let scale = (1u64 << bits) as f64;
    let n = (x * scale).round();
    Rational::new(Int::from(n as i64), Int::from(1u64 << bits))
}

struct IntVisitor;

impl<'de> de::Visitor<'de> for IntVisitor {
    type Value = Int;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("an integer or a decimal integer string")
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Int, E> {
        Ok(Int::from(v))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Int, E> {
        Ok(Int::from(v))
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<Int, E> {
        if v.fract() == 0.0 && v.abs() < 9.0e15 {
            Ok(Int::from(v as i64))
        } else {
            Err(E::custom(format!("non-integral number {v}")))
        }
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Int, E> {
        v.trim().parse().map_err(|_| E::custom(format!("bad integer `{v}`")))
    }
}

/// Serde adapter for a single [`Int`].
pub mod serde_int {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Int, s: S) -> Result<S::Ok, S::Error> {
        match v.to_i64() {
            Some(x) => s.serialize_i64(x),
            None => s.serialize_str(&v.to_string()),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Int, D::Error> {
        d.deserialize_any(IntVisitor)
    }
}

/// Newtype giving [`Int`] the wire format described in the module docs.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WireInt(pub Int);

impl Serialize for WireInt {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        serde_int::serialize(&self.0, s)
    }
}

impl<'de> Deserialize<'de> for WireInt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        serde_int::deserialize(d).map(WireInt)
    }
}

/// Newtype giving [`Rational`] the `"p/q"` wire format.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WireRational(pub Rational);

impl Serialize for WireRational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(&self.0))
    }
}

struct RationalVisitor;

impl<'de> de::Visitor<'de> for RationalVisitor {
    type Value = Rational;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a rational as \"p/q\" or an integer")
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Rational, E> {
        Ok(rat(v, 1))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Rational, E> {
        Ok(Rational::from_integer(Int::from(v)))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Rational, E> {
        parse_rational(v).map_err(E::custom)
    }
}

impl<'de> Deserialize<'de> for WireRational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        d.deserialize_any(RationalVisitor).map(WireRational)
    }
}

/// Serde adapter for `Vec<Rational>` as an array of `"p/q"` strings.
pub mod serde_rational_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let wire: Vec<WireRational> = v.iter().cloned().map(WireRational).collect();
        wire.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let wire: Vec<WireRational> = Vec::deserialize(d)?;
        Ok(wire.into_iter().map(|w| w.0).collect())
    }
}

/// Serde adapter for a single rational.
pub mod serde_rational {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        WireRational::deserialize(d).map(|w| w.0)
    }
}

/// Serde adapter for an optional rational vector.
pub mod serde_opt_rational_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Option<Vec<Rational>>, s: S) -> Result<S::Ok, S::Error> {
        let wire: Option<Vec<WireRational>> =
            v.as_ref().map(|v| v.iter().cloned().map(WireRational).collect());
        wire.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<Option<Vec<Rational>>, D::Error> {
        let wire: Option<Vec<WireRational>> = Option::deserialize(d)?;
        Ok(wire.map(|v| v.into_iter().map(|w| w.0).collect()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["3", "-7/2", "0", "12/5"] {
            assert_eq!(format_rational(&parse_rational(s).unwrap()), s);
        }
        assert_eq!(parse_rational(" 4/8 ").unwrap(), rat(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn list_parsing() {
        let v = parse_rational_list("10,1,1/2").unwrap();
        assert_eq!(v, vec![rat(10, 1), rat(1, 1), rat(1, 2)]);
    }

    #[test]
    fn primitive_scaling() {
        let v = vec![rat(3, 2), rat(1, 2), rat(-1, 1)];
        assert_eq!(primitive_integer(&v), vec![int(3), int(1), int(-2)]);
    }

    #[test]
    fn sqrt_of_squares() {
        assert_eq!(rational_sqrt(&rat(9, 4)), Some(rat(3, 2)));
        assert_eq!(rational_sqrt(&rat(2, 1)), None);
        assert_eq!(rational_sqrt(&rat(-1, 1)), None);
    }

    #[test]
    fn wire_int_handles_large_values() {
        let big: Int = "123456789012345678901234567890".parse().unwrap();
        let json = serde_json::to_string(&WireInt(big.clone())).unwrap();
        assert_eq!(json, "\"123456789012345678901234567890\"");
        let back: WireInt = serde_json::from_str(&json).unwrap();
        assert_eq!(back.0, big);
        let small: WireInt = serde_json::from_str("-5").unwrap();
        assert_eq!(small.0, int(-5));
    }
}
