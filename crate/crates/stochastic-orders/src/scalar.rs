//! Numeric substrate shared by every measure: exact rationals or binary64
//! floats, chosen per value and propagated through arithmetic.
//!
//! Exact arithmetic is closed (no rounding ever happens); any operation that
//! mixes the two regimes coerces the exact operand to a float first.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Arithmetic regime of a scalar or a measure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Regime {
    Exact,
    Float,
}

impl Regime {
    /// Regime of the result when two operands meet: float wins.
    pub fn join(self, other: Regime) -> Regime {
        if self == Regime::Exact && other == Regime::Exact {
            Regime::Exact
        } else {
            Regime::Float
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Exact => "exact",
            Regime::Float => "float",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A single number in one of the two regimes.
///
/// Floats are required to be non-NaN; constructors panic on NaN since a NaN
/// scalar is always a bug upstream, never valid data.
#[derive(Clone, Debug)]
pub enum Scalar {
    Exact(BigRational),
    Float(f64),
}

impl Scalar {
    pub fn zero(regime: Regime) -> Scalar {
        match regime {
            Regime::Exact => Scalar::Exact(BigRational::zero()),
            Regime::Float => Scalar::Float(0.0),
        }
    }

    pub fn one(regime: Regime) -> Scalar {
        match regime {
            Regime::Exact => Scalar::Exact(BigRational::one()),
            Regime::Float => Scalar::Float(1.0),
        }
    }

    pub fn from_int(n: i64) -> Scalar {
        Scalar::Exact(BigRational::from_integer(BigInt::from(n)))
    }

    /// Exact rational `num/den`. Panics if `den == 0`.
    pub fn from_ratio(num: i64, den: i64) -> Scalar {
        Scalar::Exact(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_f64(x: f64) -> Scalar {
        assert!(!x.is_nan(), "scalar must not be NaN");
        Scalar::Float(x)
    }

    /// Integer point in the requested regime (support points of lattice laws).
    pub fn int_in(regime: Regime, n: i64) -> Scalar {
        match regime {
            Regime::Exact => Scalar::from_int(n),
            Regime::Float => Scalar::Float(n as f64),
        }
    }

    pub fn regime(&self) -> Regime {
        match self {
            Scalar::Exact(_) => Regime::Exact,
            Scalar::Float(_) => Regime::Float,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => r.to_f64().unwrap_or_else(|| {
                // Falls back to separate conversion when the ratio overflows.
                let n = r.numer().to_f64().unwrap_or(f64::INFINITY);
                let d = r.denom().to_f64().unwrap_or(f64::INFINITY);
                n / d
            }),
            Scalar::Float(x) => *x,
        }
    }

    /// Coerce into the given regime (exact -> float only; float stays float).
    pub fn coerce(&self, regime: Regime) -> Scalar {
        match (self, regime) {
            (Scalar::Exact(r), Regime::Float) => Scalar::Float(Scalar::Exact(r.clone()).to_f64()),
            _ => self.clone(),
        }
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Float(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Float(x) => *x == 0.0,
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_negative(),
            Scalar::Float(x) => *x < 0.0,
        }
    }

    /// True when the value is an integer that fits lattice indexing.
    pub fn is_integer(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_integer(),
            Scalar::Float(x) => x.fract() == 0.0 && x.abs() < 2f64.powi(52),
        }
    }

    pub fn abs(&self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(r.abs()),
            Scalar::Float(x) => Scalar::Float(x.abs()),
        }
    }

    pub fn min(self, other: Scalar) -> Scalar {
        if self.total_cmp(&other) == Ordering::Greater {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Scalar) -> Scalar {
        if self.total_cmp(&other) == Ordering::Less {
            other
        } else {
            self
        }
    }

    pub fn pow(&self, exp: u32) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(num::pow::pow(r.clone(), exp as usize)),
            Scalar::Float(x) => Scalar::Float(x.powi(exp as i32)),
        }
    }

    /// Total order. Cross-regime comparisons go through f64.
    pub fn total_cmp(&self, other: &Scalar) -> Ordering {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a.cmp(b),
            _ => self
                .to_f64()
                .partial_cmp(&other.to_f64())
                .expect("scalar comparison on NaN"),
        }
    }

    /// Parse `p/q` or an integer literal as exact, anything else as float.
    pub fn parse(s: &str) -> Result<Scalar, ScalarParseError> {
        let s = s.trim();
        if s.is_empty() {
            return Err(ScalarParseError(s.to_string()));
        }
        if let Some((num, den)) = s.split_once('/') {
            let n: BigInt = num
                .trim()
                .parse()
                .map_err(|_| ScalarParseError(s.to_string()))?;
            let d: BigInt = den
                .trim()
                .parse()
                .map_err(|_| ScalarParseError(s.to_string()))?;
            if d.is_zero() {
                return Err(ScalarParseError(s.to_string()));
            }
            return Ok(Scalar::Exact(BigRational::new(n, d)));
        }
        if let Ok(n) = s.parse::<BigInt>() {
            return Ok(Scalar::Exact(BigRational::from_integer(n)));
        }
        match s.parse::<f64>() {
            Ok(x) if !x.is_nan() => Ok(Scalar::Float(x)),
            _ => Err(ScalarParseError(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse scalar from {0:?}")]
pub struct ScalarParseError(pub String);

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        self.total_cmp(other) == Ordering::Equal
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.total_cmp(other))
    }
}

macro_rules! scalar_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a $op b),
                    _ => Scalar::Float(self.to_f64() $op rhs.to_f64()),
                }
            }
        }
        impl $trait for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
    };
}

scalar_binop!(Add, add, +);
scalar_binop!(Sub, sub, -);
scalar_binop!(Mul, mul, *);
scalar_binop!(Div, div, /);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(-r),
            Scalar::Float(x) => Scalar::Float(-x),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Scalar::Exact(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Scalar::Float(x) => write!(f, "{x}"),
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            // Exact values keep full precision as "num/den" strings.
            Scalar::Exact(r) => serializer.serialize_str(&format!("{}/{}", r.numer(), r.denom())),
            Scalar::Float(x) => serializer.serialize_f64(*x),
        }
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct ScalarVisitor;

        impl Visitor<'_> for ScalarVisitor {
            type Value = Scalar;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number or a \"num/den\" rational string")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Scalar, E> {
                if v.is_nan() {
                    return Err(E::custom("scalar must not be NaN"));
                }
                Ok(Scalar::Float(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Scalar, E> {
                Ok(Scalar::Float(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Scalar, E> {
                Ok(Scalar::Float(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Scalar, E> {
                Scalar::parse(v).map_err(E::custom)
            }
        }

        deserializer.deserialize_any(ScalarVisitor)
    }
}
