//! Certified enclosures of `exp`, `ln`, `2^x` and `zeta(2)` at rational
//! arguments, computed in fixed-point integer arithmetic with directed rounding.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::enclosure::Enclosure;
use crate::rational::{self, pow2, rat, ExactRational, PRECISION_BITS};

/// Working precision (bits after the binary point) for fixed-point evaluation.
const WORK_BITS: u64 = PRECISION_BITS as u64 + 64;

/// Fixed-point interval `[lo, hi] * 2^-WORK_BITS`.
#[derive(Clone, Debug)]
struct Fixed {
    lo: BigInt,
    hi: BigInt,
}

fn floor_div(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_floor(b)
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

impl Fixed {
    fn from_rational(x: &ExactRational) -> Fixed {
        let s = x * BigRational::from_integer(pow2(WORK_BITS));
        Fixed {
            lo: s.floor().to_integer(),
            hi: s.ceil().to_integer(),
        }
    }

    fn to_enclosure(&self) -> Enclosure {
        let d = pow2(WORK_BITS);
        Enclosure::new(
            BigRational::new(self.lo.clone(), d.clone()),
            BigRational::new(self.hi.clone(), d),
        )
        .outward(PRECISION_BITS)
    }

    /// Square of a non-negative interval.
    fn square(&self) -> Fixed {
        let d = pow2(WORK_BITS);
        Fixed {
            lo: floor_div(&(&self.lo * &self.lo), &d),
            hi: ceil_div(&(&self.hi * &self.hi), &d),
        }
    }
}

/// `exp(x)` for `0 <= x <= 1/2` by Taylor series with a geometric remainder.
fn exp_small(x: &ExactRational) -> Fixed {
    debug_assert!(!x.is_negative() && x <= &rat(1, 2));
    let one = pow2(WORK_BITS);
    let xf = Fixed::from_rational(x);
    let (mut sum_lo, mut sum_hi) = (one.clone(), one.clone());
    let (mut t_lo, mut t_hi) = (one.clone(), one.clone());
    let mut j = 1u64;
    loop {
        t_lo = floor_div(&(&t_lo * &xf.lo), &one) / BigInt::from(j);
        t_hi = ceil_div(&(&t_hi * &xf.hi), &one);
        t_hi = ceil_div(&t_hi, &BigInt::from(j));
        sum_lo += &t_lo;
        sum_hi += &t_hi;
        j += 1;
        if t_hi.bits() <= 1 {
            break;
        }
    }
    // Remainder after the last term t is at most t (x <= 1/2); doubled for slack.
    sum_hi += &t_hi * 2 + BigInt::from(j);
    Fixed {
        lo: sum_lo,
        hi: sum_hi,
    }
}

/// Certified enclosure of `exp(x)` for rational `x`.
pub fn exp_enclosure(x: &ExactRational) -> Enclosure {
    if x.is_negative() {
        let e = exp_enclosure(&-x);
        // 1/[a,b] = [1/b, 1/a]; endpoints positive.
        return Enclosure::new(rational::int(1) / e.hi(), rational::int(1) / e.lo())
            .outward(PRECISION_BITS);
    }
    // Halve until the argument is at most 1/2, then square back.
    let mut k = 0u32;
    let mut y = x.clone();
    let half = rat(1, 2);
    while y > half {
        y /= rational::int(2);
        k += 1;
    }
    let mut f = exp_small(&y);
    for _ in 0..k {
        f = f.square();
    }
    f.to_enclosure()
}

/// `exp` of an interval (monotone).
pub fn exp_interval(x: &Enclosure) -> Enclosure {
    let a = exp_enclosure(x.lo());
    let b = exp_enclosure(x.hi());
    Enclosure::new(a.lo().clone(), b.hi().clone())
}

/// `2 * atanh(z)` for rational `0 <= z <= 1/3`.
fn two_atanh(z: &ExactRational) -> Fixed {
    let one = pow2(WORK_BITS);
    let zf = Fixed::from_rational(z);
    let z2_lo = floor_div(&(&zf.lo * &zf.lo), &one);
    let z2_hi = ceil_div(&(&zf.hi * &zf.hi), &one);
    let (mut p_lo, mut p_hi) = (zf.lo.clone(), zf.hi.clone());
    let (mut s_lo, mut s_hi) = (BigInt::zero(), BigInt::zero());
    let mut j = 0u64;
    loop {
        let d = BigInt::from(2 * j + 1);
        s_lo += floor_div(&p_lo, &d);
        s_hi += ceil_div(&p_hi, &d);
        p_lo = floor_div(&(&p_lo * &z2_lo), &one);
        p_hi = ceil_div(&(&p_hi * &z2_hi), &one);
        j += 1;
        if p_hi.bits() <= 1 {
            break;
        }
    }
    // Remainder <= p_hi / (1 - z^2) <= 9/8 * p_hi; use 2*p_hi + slack.
    s_hi += &p_hi * 2 + BigInt::from(j);
    Fixed {
        lo: s_lo * 2,
        hi: s_hi * 2,
    }
}

/// Certified enclosure of `ln(x)` for rational `x > 0`.
///
/// # Panics
/// If `x <= 0`.
pub fn ln_enclosure(x: &ExactRational) -> Enclosure {
    assert!(x.is_positive(), "ln of non-positive value");
    // x = 2^e * y with y in [2/3, 4/3], so that z = (y-1)/(y+1) lies in [-1/5, 1/7].
    let mut e: i64 = 0;
    let mut y = x.clone();
    let two = rational::int(2);
    while y > rat(4, 3) {
        y /= &two;
        e += 1;
    }
    while y < rat(2, 3) {
        y *= &two;
        e -= 1;
    }
    let z = (&y - rational::int(1)) / (&y + rational::int(1));
    let ln_y = if z.is_negative() {
        let f = two_atanh(&-&z).to_enclosure();
        -&f
    } else {
        two_atanh(&z).to_enclosure()
    };
    let ln2 = two_atanh(&rat(1, 3)).to_enclosure();
    (&ln_y + &ln2.scale(&rational::int(e))).outward(PRECISION_BITS)
}

/// Certified enclosure of `ln 2`.
pub fn ln2_enclosure() -> Enclosure {
    two_atanh(&rat(1, 3)).to_enclosure()
}

/// Enclosure of `b^(-s)` for integer base `b >= 2` and rational exponent `s`.
pub fn pow_neg(base: u64, s: &ExactRational) -> Enclosure {
    let l = ln_enclosure(&rational::int(base as i64));
    exp_interval(&l.scale(&-s))
}

/// Enclosure of `zeta(2) = pi^2/6`: ten-term partial sum plus Euler-Maclaurin
/// bounds on the remainder `sum_{k>N} 1/k^2`.
pub fn zeta2_enclosure() -> Enclosure {
    let n: i64 = 10;
    let mut partial = BigRational::zero();
    for k in 1..=n {
        partial += rat(1, k * k);
    }
    let nn = BigRational::from_integer(BigInt::from(n));
    let one = BigRational::one();
    let hi_tail = &one / &nn - &one / (rational::int(2) * &nn * &nn)
        + &one / (rational::int(6) * &nn * &nn * &nn);
    let lo_tail = &hi_tail - &one / (rational::int(30) * num_traits::pow(nn.clone(), 5));
    Enclosure::new(&partial + lo_tail, &partial + hi_tail)
}

/// `e^{1 + 1/2 + ... + 1/n}`.
pub fn exp_harmonic(n: u32) -> Enclosure {
    exp_enclosure(&harmonic(n))
}

pub fn harmonic(n: u32) -> ExactRational {
    (1..=n as i64).map(|j| rat(1, j)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(e: &Enclosure, v: f64, tol: f64) {
        assert!((e.mid_f64() - v).abs() < tol, "{} vs {v}", e.mid_f64());
        assert!(e.width_f64() < 1e-60, "width {}", e.width_f64());
    }

    #[test]
    fn exp_values() {
        close(&exp_enclosure(&rational::int(1)), std::f64::consts::E, 1e-15);
        close(&exp_enclosure(&rat(3, 2)), 1.5f64.exp(), 1e-14);
        close(&exp_enclosure(&rational::int(9)), 9f64.exp(), 1e-9);
        close(&exp_enclosure(&rat(-7, 3)), (-7.0f64 / 3.0).exp(), 1e-15);
        assert_eq!(exp_enclosure(&rational::int(0)).lo(), &rational::int(1));
    }

    #[test]
    fn exp_brackets_factorial_sums() {
        // e lies strictly between partial sums of 1/k! and that sum plus 1/(N! N).
        let e = exp_enclosure(&rational::int(1));
        let mut s = BigRational::zero();
        let mut f = BigRational::one();
        for k in 0..30i64 {
            if k > 0 {
                f /= rational::int(k);
            }
            s += &f;
        }
        assert!(*e.lo() > &s - rat(1, 1_000_000_000));
        assert!(e.hi() < &(&s + &f));
    }

    #[test]
    fn ln_values() {
        close(&ln_enclosure(&rational::int(2)), std::f64::consts::LN_2, 1e-16);
        close(&ln_enclosure(&rational::int(3)), 3f64.ln(), 1e-15);
        close(&ln_enclosure(&rat(1, 10)), 0.1f64.ln(), 1e-15);
        let z = ln_enclosure(&rational::int(1));
        assert!(z.contains(&rational::int(0)));
    }

    #[test]
    fn exp_ln_round_trip() {
        let x = rat(7, 5);
        let e = exp_interval(&ln_enclosure(&x));
        assert!(e.contains(&x));
    }

    #[test]
    fn zeta2_contains_pi_squared_over_six() {
        let z = zeta2_enclosure();
        let v = std::f64::consts::PI.powi(2) / 6.0;
        assert!(rational::to_f64(z.lo()) < v && v < rational::to_f64(z.hi()));
        assert!(z.width_f64() < 1e-6);
        // 7/4 - zeta(2) is approximately 0.105066.
        let c = &Enclosure::point(rat(7, 4)) - &z;
        assert!((c.mid_f64() - 0.105066).abs() < 1e-6);
    }
}
