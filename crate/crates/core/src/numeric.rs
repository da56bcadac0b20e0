//! Exact rational helpers: the `Q` alias, decimal parsing, formatting,
//! and certified dyadic brackets for rational powers of integers.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::interval::Interval;

/// Exact rational number used throughout the crate.
pub type Q = BigRational;

/// Default working precision (bits after the binary point) for brackets.
pub const DEFAULT_BITS: u32 = 96;

/// Largest precision the escalation loops will try.
pub const MAX_BITS: u32 = 1536;

/// Largest root degree `b` accepted for `base^(a/b)` brackets.
pub const MAX_ROOT_DEGREE: u64 = 1000;

pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// `num/den` string used by every serialized rational.
pub fn fmt_ratio(x: &Q) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

pub fn parse_ratio(s: &str) -> Result<Q> {
    let (n, d) = s
        .split_once('/')
        .ok_or_else(|| Error::Parse(format!("expected num/den, got {s:?}")))?;
    let n: BigInt = n
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
    let d: BigInt = d
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
    if d.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Q::new(n, d))
}

/// Parses a decimal (`1.25`, `-0.5`, `3`) or fraction (`7/3`) string into an
/// exact rational whose reduced denominator is at most `max_den`.
pub fn parse_exact(s: &str, max_den: u64) -> Result<Q> {
    let s = s.trim();
    let value = if s.contains('/') {
        parse_ratio(s)?
    } else {
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s.strip_prefix('+').unwrap_or(s)),
        };
        let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
        if int_part.is_empty() && frac_part.is_empty()
            || !int_part.bytes().all(|b| b.is_ascii_digit())
            || !frac_part.bytes().all(|b| b.is_ascii_digit())
        {
            return Err(Error::Parse(format!("not a decimal number: {s:?}")));
        }
        let digits = format!("{int_part}{frac_part}");
        let numer: BigInt = if digits.is_empty() {
            BigInt::zero()
        } else {
            digits.parse().map_err(|_| Error::Parse(s.to_string()))?
        };
        let denom = BigInt::from(10u32).pow(frac_part.len() as u32);
        let v = Q::new(numer, denom);
        if neg {
            -v
        } else {
            v
        }
    };
    if value.denom() > &BigInt::from(max_den) {
        return Err(Error::Parse(format!(
            "{s:?} needs denominator {} > {max_den}",
            value.denom()
        )));
    }
    Ok(value)
}

/// Formats to `digits` significant digits, trimming trailing zeros.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let s = format!("{:.*e}", digits.saturating_sub(1), x);
    let (mant, exp) = s.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..15).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        let mut out = format!("{:.*}", decimals, x);
        if out.contains('.') {
            out = out.trim_end_matches('0').trim_end_matches('.').to_string();
        }
        out
    } else {
        let mant = if mant.contains('.') {
            mant.trim_end_matches('0').trim_end_matches('.')
        } else {
            mant
        };
        format!("{mant}e{exp}")
    }
}

/// Exact value text plus a 12-significant-digit decimal, e.g. `4/3 (1.33333333333)`.
pub fn describe(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{} ({})", fmt_ratio(x), fmt_sig(to_f64(x), 12))
    }
}

pub fn is_integer(x: &Q) -> bool {
    x.denom().is_one()
}

fn pow2(bits: u64) -> BigUint {
    BigUint::one() << bits
}

/// Certified bracket for `base^exp` with dyadic endpoints of `bits` fractional
/// bits. Integer exponents (and perfect roots) give a degenerate interval.
pub fn pow_bracket(base: u64, exp: &Q, bits: u32) -> Result<Interval> {
    if base == 0 {
        return Err(Error::InvalidParameter("power of zero".into()));
    }
    if base == 1 || exp.is_zero() {
        return Ok(Interval::exact(Q::one()));
    }
    let b = BigUint::from(base);
    let a_abs = exp
        .numer()
        .abs()
        .to_biguint()
        .expect("absolute value is nonnegative");
    let a_abs: u32 = a_abs
        .to_u32()
        .ok_or_else(|| Error::Unsupported(format!("exponent {exp} too large")))?;
    let deg = exp
        .denom()
        .to_u64()
        .ok_or_else(|| Error::Unsupported(format!("exponent {exp} denominator too large")))?;
    let positive = exp.is_positive();

    if deg == 1 {
        let p = BigInt::from(b.pow(a_abs));
        let v = if positive {
            Q::from_integer(p)
        } else {
            Q::new(BigInt::one(), p)
        };
        return Ok(Interval::exact(v));
    }
    if deg > MAX_ROOT_DEGREE {
        return Err(Error::Unsupported(format!(
            "exponent {exp}: root degree {deg} exceeds {MAX_ROOT_DEGREE}"
        )));
    }
    let deg32 = deg as u32;
    let scale_bits = bits as u64 * deg;
    let ba = b.pow(a_abs);
    // floor(2^bits * base^exp) = floor(root_deg(N)) where N is an integer floor.
    let (m, exact) = if positive {
        let n = ba << scale_bits;
        let m = n.nth_root(deg32);
        let exact = m.pow(deg32) == n;
        (m, exact)
    } else {
        let num = pow2(scale_bits);
        let (n, _) = num.div_rem(&ba);
        let m = n.nth_root(deg32);
        let exact = &m.pow(deg32) * &ba == pow2(scale_bits);
        (m, exact)
    };
    let den = BigInt::from(pow2(bits as u64));
    let lo = Q::new(BigInt::from(m.clone()), den.clone());
    if exact {
        return Ok(Interval::exact(lo));
    }
    let hi = Q::new(BigInt::from(m + 1u32), den);
    Ok(Interval::new(lo, hi))
}
