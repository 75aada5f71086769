//! Helpers around [`ExactRational`]: text form, dyadic rounding, powers of two.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational; always reduced with a positive denominator.
pub type ExactRational = BigRational;

/// Binary precision used when enclosure endpoints are rounded outward.
pub const PRECISION_BITS: u32 = 256;

pub fn rat(num: i64, den: i64) -> ExactRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> ExactRational {
    BigRational::from_integer(BigInt::from(v))
}

/// `2^-k` exactly.
pub fn pow2_neg(k: u64) -> ExactRational {
    BigRational::new(BigInt::one(), BigInt::one() << k as usize)
}

pub fn pow2(k: u64) -> BigInt {
    BigInt::one() << k as usize
}

/// Canonical `"num/den"` text form. The denominator is always written.
pub fn to_text(x: &ExactRational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parses `"num/den"`, a bare integer, or a finite decimal such as `"0.375"`.
pub fn parse(s: &str) -> Result<ExactRational> {
    let err = || Error::Parse {
        what: "rational",
        input: s.to_string(),
    };
    let t = s.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| err())?;
        let d: BigInt = d.trim().parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((ip, fp)) = t.split_once('.') {
        let neg = ip.starts_with('-');
        let ip = ip.trim_start_matches(['-', '+']);
        if !fp.chars().all(|c| c.is_ascii_digit()) || fp.is_empty() {
            return Err(err());
        }
        let whole: BigInt = if ip.is_empty() {
            BigInt::zero()
        } else {
            ip.parse().map_err(|_| err())?
        };
        let frac: BigInt = fp.parse().map_err(|_| err())?;
        let scale = num_traits::pow(BigInt::from(10), fp.len());
        let v = BigRational::new(whole * &scale + frac, scale);
        return Ok(if neg { -v } else { v });
    }
    let n: BigInt = t.parse().map_err(|_| err())?;
    Ok(BigRational::from_integer(n))
}

/// Largest multiple of `2^-bits` that is `<= x`.
pub fn round_down(x: &ExactRational, bits: u32) -> ExactRational {
    let scaled = x * BigRational::from_integer(pow2(bits as u64));
    BigRational::new(scaled.floor().to_integer(), pow2(bits as u64))
}

/// Smallest multiple of `2^-bits` that is `>= x`.
pub fn round_up(x: &ExactRational, bits: u32) -> ExactRational {
    let scaled = x * BigRational::from_integer(pow2(bits as u64));
    BigRational::new(scaled.ceil().to_integer(), pow2(bits as u64))
}

/// Rounds a non-negative `x` up to a dyadic with at most `sig` significant bits.
pub fn round_up_significant(x: &ExactRational, sig: u32) -> ExactRational {
    if !x.is_positive() {
        return x.clone();
    }
    // floor(log2 x) estimate from bit lengths, then shift so the mantissa has `sig` bits.
    let e = x.numer().bits() as i64 - x.denom().bits() as i64;
    let shift = sig as i64 - e;
    let scaled = if shift >= 0 {
        x * BigRational::from_integer(pow2(shift as u64))
    } else {
        x / BigRational::from_integer(pow2((-shift) as u64))
    };
    let m = BigRational::from_integer(scaled.ceil().to_integer());
    if shift >= 0 {
        m / BigRational::from_integer(pow2(shift as u64))
    } else {
        m * BigRational::from_integer(pow2((-shift) as u64))
    }
}

pub fn to_f64(x: &ExactRational) -> f64 {
    if let Some(v) = x.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // Huge operands: shift both to a representable range.
    let nb = x.numer().bits() as i64;
    let db = x.denom().bits() as i64;
    let shift = (nb.max(db) - 1000).max(0) as usize;
    let n = (x.numer() >> shift).to_f64().unwrap_or(0.0);
    let d = (x.denom() >> shift).to_f64().unwrap_or(1.0);
    n / d
}

/// Decimal string of `x` with `digits` fractional digits, rounded toward
/// `-inf` (`up == false`) or `+inf` (`up == true`).
pub fn to_decimal(x: &ExactRational, digits: usize, up: bool) -> String {
    let scale = num_traits::pow(BigInt::from(10), digits);
    let scaled = x * BigRational::from_integer(scale.clone());
    let v = if up {
        scaled.ceil().to_integer()
    } else {
        scaled.floor().to_integer()
    };
    let neg = v.sign() == Sign::Minus;
    let (q, r) = v.abs().div_rem(&scale);
    let mut s = String::new();
    if neg {
        s.push('-');
    }
    s.push_str(&q.to_string());
    if digits > 0 {
        s.push('.');
        let r = r.to_string();
        for _ in r.len()..digits {
            s.push('0');
        }
        s.push_str(&r);
    }
    s
}

pub fn min(a: &ExactRational, b: &ExactRational) -> ExactRational {
    if a <= b {
        a.clone()
    } else {
        b.clone()
    }
}

pub fn max(a: &ExactRational, b: &ExactRational) -> ExactRational {
    if a >= b {
        a.clone()
    } else {
        b.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        for s in ["5/4", "-3/7", "0/1", "49/36"] {
            assert_eq!(to_text(&parse(s).unwrap()), s);
        }
        assert_eq!(parse("3").unwrap(), int(3));
        assert_eq!(parse("0.375").unwrap(), rat(3, 8));
        assert_eq!(parse("-.5").unwrap(), rat(-1, 2));
        assert!(parse("1/0").is_err());
        assert!(parse("abc").is_err());
    }

    #[test]
    fn dyadic_rounding_brackets() {
        let x = rat(1, 3);
        let lo = round_down(&x, 10);
        let hi = round_up(&x, 10);
        assert!(lo <= x && x <= hi);
        assert_eq!(&hi - &lo, pow2_neg(10));
        let u = round_up_significant(&x, 8);
        assert!(u >= x && &u - &x < rat(1, 500));
    }

    #[test]
    fn decimal_rounding_direction() {
        let x = rat(2, 3);
        assert_eq!(to_decimal(&x, 4, false), "0.6666");
        assert_eq!(to_decimal(&x, 4, true), "0.6667");
        assert_eq!(to_decimal(&rat(-2, 3), 2, false), "-0.67");
        assert_eq!(to_decimal(&rat(1, 100), 3, true), "0.010");
    }
}
