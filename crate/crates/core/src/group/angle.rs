//! Points of `R/Z` carried as unevaluated double-double sums.
//!
//! Torus orbits `k·θ mod 1` are the only place where phase error can build
//! up, so rotation numbers keep roughly 32 significant digits and the
//! reduction mod 1 is done before the final rounding to `f64`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// An element of `R/Z` stored as `hi + lo` with `hi ∈ [0, 1)` and
/// `|lo| ≤ ulp(hi)`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Angle {
    hi: f64,
    lo: f64,
}

impl Angle {
    pub const ZERO: Angle = Angle { hi: 0.0, lo: 0.0 };

    pub fn from_f64(x: f64) -> Angle {
        Self::normalize(x, 0.0)
    }

    fn normalize(hi: f64, lo: f64) -> Angle {
        let (s, e) = two_sum(hi, lo);
        let s = s - s.floor();
        let (mut hi, lo) = two_sum(s, e);
        if hi >= 1.0 {
            hi -= 1.0;
        } else if hi < 0.0 {
            hi += 1.0;
        }
        if hi >= 1.0 {
            hi = 0.0;
        }
        Angle { hi, lo }
    }

    /// Nearest `f64` to the represented value in `[0, 1)`.
    pub fn value(self) -> f64 {
        let v = self.hi + self.lo;
        if v >= 1.0 {
            v - 1.0
        } else if v < 0.0 {
            v + 1.0
        } else {
            v
        }
    }

    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn lo(self) -> f64 {
        self.lo
    }

    pub fn add(self, other: Angle) -> Angle {
        let (s, e) = two_sum(self.hi, other.hi);
        Self::normalize(s, e + self.lo + other.lo)
    }

    pub fn neg(self) -> Angle {
        Self::normalize(-self.hi, -self.lo)
    }

    /// `k·self mod 1`. Exact in the high word for `|k| < 2^53`.
    pub fn mul_int(self, k: i64) -> Angle {
        let kf = k as f64;
        let (p, e) = two_prod(kf, self.hi);
        let frac = p - p.floor();
        Self::normalize(frac, e + kf * self.lo)
    }

    /// `exp(2πi·self)`.
    pub fn unit(self) -> Complex64 {
        let v = self.value();
        if v == 0.0 {
            return Complex64::new(1.0, 0.0);
        }
        // fold to (-1/2, 1/2] so the argument passed to sin/cos stays small
        let t = if v > 0.5 { v - 1.0 } else { v };
        let (s, c) = (std::f64::consts::TAU * t).sin_cos();
        Complex64::new(c, s)
    }

    /// Parses a decimal literal exactly and keeps its fractional part.
    pub fn parse_decimal(text: &str) -> Result<Angle> {
        let frac = parse_decimal_rational(text)?;
        let frac = &frac - frac.floor();
        let hi = frac
            .to_f64()
            .ok_or_else(|| Error::InvalidGroup(format!("cannot represent {text}")))?;
        let hi_exact = BigRational::from_float(hi)
            .ok_or_else(|| Error::InvalidGroup(format!("cannot represent {text}")))?;
        let lo = (&frac - hi_exact).to_f64().unwrap_or(0.0);
        Ok(Self::normalize(hi, lo))
    }

    /// Returns `(p, q)` if the angle sits suspiciously close to a rational
    /// with denominator at most `max_den`: closer than `tol`, and much closer
    /// than the generic `1/q²` rate of continued-fraction convergents.
    pub fn near_rational(self, max_den: u64, tol: f64) -> Option<(u64, u64)> {
        let x = self.value();
        let (mut p0, mut q0, mut p1, mut q1) = (0u64, 1u64, 1u64, 0u64);
        let mut r = x;
        for _ in 0..64 {
            let a = r.floor();
            if a > 1e12 {
                break;
            }
            let a = a as u64;
            let p2 = a.saturating_mul(p1).saturating_add(p0);
            let q2 = a.saturating_mul(q1).saturating_add(q0);
            if q2 > max_den {
                break;
            }
            let err = (x - p2 as f64 / q2 as f64).abs();
            if err <= tol && err * (q2 as f64) * (q2 as f64) < 1e-4 {
                return Some((p2, q2));
            }
            (p0, q0, p1, q1) = (p1, q1, p2, q2);
            let f = r - r.floor();
            if f < 1e-300 {
                break;
            }
            r = 1.0 / f;
        }
        None
    }
}

impl FromStr for Angle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Angle> {
        Angle::parse_decimal(s)
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.17}", self.value())
    }
}

fn parse_decimal_rational(text: &str) -> Result<BigRational> {
    let bad = || Error::InvalidGroup(format!("malformed decimal {text:?}"));
    let t = text.trim();
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((a, b)) => (a, b),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let num: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().map_err(|_| bad())?
    };
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut r = BigRational::from_integer(num);
    if scale >= 0 {
        r *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        r /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    if neg {
        r = -r;
    }
    Ok(r)
}
