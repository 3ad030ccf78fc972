//! Exact rational horoballs used by the exact-arithmetic predicates.

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{invalid, Error, Result};
use crate::halfspace::Horoball;

pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq)]
pub enum ExactHoroball {
    Tangent { base: Vec<Rational>, radius: Rational },
    AtInfinity { height: Rational },
}

pub fn ratio(p: i64, q: i64) -> Rational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

pub fn to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// The exact dyadic rational equal to a finite float.
pub fn from_f64(x: f64) -> Result<Rational> {
    BigRational::from_float(x).ok_or_else(|| Error::NotRational(alloc::format!("{x}")))
}

/// Parses `p/q`, an integer, or a finite decimal such as `-0.125`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::NotRational(String::from(s));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let mut all = String::from(int);
    all.push_str(frac);
    let num: BigInt = if all.is_empty() { BigInt::zero() } else { all.parse().map_err(|_| bad())? };
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut r = BigRational::from_integer(num);
    if scale >= 0 {
        r *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        r /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if neg { -r } else { r })
}

pub fn format_rational(x: &Rational) -> String {
    if x.denom().is_one() {
        alloc::format!("{}", x.numer())
    } else {
        alloc::format!("{}/{}", x.numer(), x.denom())
    }
}

impl ExactHoroball {
    pub fn to_float(&self) -> Horoball {
        match self {
            ExactHoroball::Tangent { base, radius } => {
                Horoball::Tangent { base: base.iter().map(to_f64).collect(), radius: to_f64(radius) }
            }
            ExactHoroball::AtInfinity { height } => Horoball::AtInfinity { height: to_f64(height) },
        }
    }

    /// Shrink by a rational factor `s` in `(0, 1]`.
    pub fn shrink_by(&self, s: &Rational) -> Result<Self> {
        if !s.is_positive() || *s > Rational::one() {
            return Err(invalid("shrink factor must lie in (0, 1]"));
        }
        Ok(match self {
            ExactHoroball::Tangent { base, radius } => {
                ExactHoroball::Tangent { base: base.clone(), radius: radius * s }
            }
            ExactHoroball::AtInfinity { height } => ExactHoroball::AtInfinity { height: height / s },
        })
    }
}

/// Compares `|x - x'|^2` with `4 r r'` (or `h` with `2r`). `Less` means the
/// open horoballs overlap, `Equal` means tangent.
pub fn separation(a: &ExactHoroball, b: &ExactHoroball) -> Result<Ordering> {
    use ExactHoroball::*;
    match (a, b) {
        (Tangent { base: x, radius: r }, Tangent { base: y, radius: s }) => {
            if x.len() != y.len() {
                return Err(Error::DimensionMismatch { expected: x.len(), found: y.len() });
            }
            let mut d2 = Rational::zero();
            for (u, v) in x.iter().zip(y) {
                let d = u - v;
                d2 += &d * &d;
            }
            let four = Rational::from_integer(BigInt::from(4));
            Ok(d2.cmp(&(four * r * s)))
        }
        (Tangent { radius, .. }, AtInfinity { height }) | (AtInfinity { height }, Tangent { radius, .. }) => {
            let two = Rational::from_integer(BigInt::from(2));
            Ok(height.cmp(&(two * radius)))
        }
        (AtInfinity { .. }, AtInfinity { .. }) => Ok(Ordering::Less),
    }
}

/// `a + b sqrt 2` with integer coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ZSqrt2 {
    pub a: i128,
    pub b: i128,
}

impl ZSqrt2 {
    pub const fn new(a: i128, b: i128) -> Self {
        ZSqrt2 { a, b }
    }

    pub fn checked_add(self, o: Self) -> Option<Self> {
        Some(ZSqrt2 { a: self.a.checked_add(o.a)?, b: self.b.checked_add(o.b)? })
    }

    pub fn checked_sub(self, o: Self) -> Option<Self> {
        Some(ZSqrt2 { a: self.a.checked_sub(o.a)?, b: self.b.checked_sub(o.b)? })
    }

    pub fn checked_mul(self, o: Self) -> Option<Self> {
        let a = self.a.checked_mul(o.a)?.checked_add(self.b.checked_mul(o.b)?.checked_mul(2)?)?;
        let b = self.a.checked_mul(o.b)?.checked_add(self.b.checked_mul(o.a)?)?;
        Some(ZSqrt2 { a, b })
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    pub fn signum(&self) -> i32 {
        let (sa, sb) = (self.a.signum() as i32, self.b.signum() as i32);
        if sa == sb || sb == 0 {
            return sa;
        }
        if sa == 0 {
            return sb;
        }
        // opposite signs: compare a^2 with 2 b^2
        let lhs = BigInt::from(self.a) * BigInt::from(self.a);
        let rhs = BigInt::from(self.b) * BigInt::from(self.b) * 2;
        match lhs.cmp(&rhs) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }

    /// Nearest-ish float; uses the conjugate when the two terms cancel.
    pub fn to_f64(&self) -> f64 {
        let (a, b) = (self.a as f64, self.b as f64 * core::f64::consts::SQRT_2);
        let (direct, conj) = (a + b, a - b);
        if direct.abs() >= conj.abs() {
            return direct;
        }
        let norm: BigInt = BigInt::from(self.a) * BigInt::from(self.a) - BigInt::from(self.b) * BigInt::from(self.b) * BigInt::from(2);
        norm.to_f64().unwrap_or(f64::NAN) / conj
    }
}
