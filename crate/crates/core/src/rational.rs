//! Exact rational scalars and their JSON form.
//!
//! A rational is written as a `[numerator, denominator]` pair. Components
//! that overflow `i64` are written as decimal strings. On input a bare
//! integer is accepted as shorthand for `[n, 1]`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeTuple, Serializer};
use serde::Deserialize;

pub type Rational = BigRational;

/// `n / d` as a reduced rational. Panics if `d == 0`.
pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Closest f64 to an exact rational.
pub fn to_f64(x: &Rational) -> f64 {
    if let Some(v) = x.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // Huge numerator and denominator: shift both down before dividing.
    let shift = x.numer().bits().max(x.denom().bits()).saturating_sub(1000);
    let n = (x.numer() >> shift).to_f64().unwrap_or(f64::NAN);
    let d = (x.denom() >> shift).to_f64().unwrap_or(f64::NAN);
    n / d
}

/// Exact rational equal to a finite f64.
pub fn from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

pub fn abs(x: &Rational) -> Rational {
    x.abs()
}

/// `base^exp` for a non-negative integer exponent.
pub fn pow(base: &Rational, exp: u32) -> Rational {
    let mut acc = Rational::one();
    for _ in 0..exp {
        acc *= base;
    }
    acc
}

pub fn is_zero(x: &Rational) -> bool {
    x.is_zero()
}

fn bigint_json(v: &BigInt) -> serde_json::Value {
    match v.to_i64() {
        Some(small) => serde_json::Value::from(small),
        None => serde_json::Value::from(v.to_string()),
    }
}

fn bigint_from_json(v: &serde_json::Value) -> Result<BigInt, String> {
    match v {
        serde_json::Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .ok_or_else(|| format!("expected an integer, got {n}")),
        serde_json::Value::String(s) => s
            .parse::<BigInt>()
            .map_err(|e| format!("bad integer string {s:?}: {e}")),
        other => Err(format!("expected an integer, got {other}")),
    }
}

pub(crate) fn rational_from_json(v: &serde_json::Value) -> Result<Rational, String> {
    match v {
        serde_json::Value::Array(pair) if pair.len() == 2 => {
            let n = bigint_from_json(&pair[0])?;
            let d = bigint_from_json(&pair[1])?;
            if d.is_zero() {
                return Err("zero denominator".into());
            }
            Ok(Rational::new(n, d))
        }
        serde_json::Value::Array(_) => Err("a rational is a [numerator, denominator] pair".into()),
        other => bigint_from_json(other).map(Rational::from_integer),
    }
}

/// `#[serde(with = "crate::rational::serde_rational")]`
pub mod serde_rational {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Rational, s: S) -> Result<S::Ok, S::Error> {
        let mut t = s.serialize_tuple(2)?;
        t.serialize_element(&bigint_json(x.numer()))?;
        t.serialize_element(&bigint_json(x.denom()))?;
        t.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        rational_from_json(&v).map_err(de::Error::custom)
    }
}

/// Same as [`serde_rational`] for `Vec<Rational>`.
pub mod serde_rational_vec {
    use super::*;
    use serde::ser::SerializeSeq;

    struct Wrap<'a>(&'a Rational);

    impl serde::Serialize for Wrap<'_> {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            serde_rational::serialize(self.0, s)
        }
    }

    pub fn serialize<S: Serializer>(xs: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(xs.len()))?;
        for x in xs {
            seq.serialize_element(&Wrap(x))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let v = Vec::<serde_json::Value>::deserialize(d)?;
        v.iter()
            .map(|x| rational_from_json(x).map_err(de::Error::custom))
            .collect()
    }
}

/// Integer ceiling of the `d`-th root of `n`: the least `r` with `r^d >= n`.
pub fn ceil_root(n: u64, d: u32) -> u64 {
    if n <= 1 {
        return n;
    }
    let mut r = 1u64;
    while (r as u128).pow(d) < n as u128 {
        r += 1;
    }
    r
}

pub fn one() -> Rational {
    Rational::one()
}

pub fn zero() -> Rational {
    Rational::zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_pair_and_shorthand() {
        let v: serde_json::Value = serde_json::from_str("[6, -4]").unwrap();
        assert_eq!(rational_from_json(&v).unwrap(), q(-3, 2));
        let v: serde_json::Value = serde_json::from_str("7").unwrap();
        assert_eq!(rational_from_json(&v).unwrap(), int(7));
        let v: serde_json::Value = serde_json::from_str("[1, 0]").unwrap();
        assert!(rational_from_json(&v).is_err());
    }

    #[test]
    fn huge_components_round_trip_as_strings() {
        let big = Rational::new(BigInt::from(3).pow(80), BigInt::from(7));
        #[derive(serde::Serialize, serde::Deserialize)]
        struct W(#[serde(with = "serde_rational")] Rational);
        let s = serde_json::to_string(&W(big.clone())).unwrap();
        assert!(s.contains('"'));
        let back: W = serde_json::from_str(&s).unwrap();
        assert_eq!(back.0, big);
    }

    #[test]
    fn ceil_roots() {
        assert_eq!(ceil_root(9, 2), 3);
        assert_eq!(ceil_root(10, 2), 4);
        assert_eq!(ceil_root(64, 3), 4);
        assert_eq!(ceil_root(65, 3), 5);
        assert_eq!(ceil_root(1, 3), 1);
    }

    #[test]
    fn float_conversion_of_huge_values() {
        let x = Rational::new(BigInt::from(10).pow(400), BigInt::from(10).pow(399));
        assert!((to_f64(&x) - 10.0).abs() < 1e-9);
    }
}
