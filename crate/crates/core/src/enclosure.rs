//! Closed rational intervals certifying real values.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::{self, ExactRational};

/// A closed interval `[lo, hi]` of rationals known to contain some real value.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Enclosure {
    lo: ExactRational,
    hi: ExactRational,
}

impl Enclosure {
    /// # Panics
    /// If `lo > hi`.
    pub fn new(lo: ExactRational, hi: ExactRational) -> Self {
        assert!(lo <= hi, "enclosure with lo > hi");
        Enclosure { lo, hi }
    }

    pub fn point(v: ExactRational) -> Self {
        Enclosure {
            lo: v.clone(),
            hi: v,
        }
    }

    pub fn lo(&self) -> &ExactRational {
        &self.lo
    }

    pub fn hi(&self) -> &ExactRational {
        &self.hi
    }

    pub fn width(&self) -> ExactRational {
        &self.hi - &self.lo
    }

    pub fn mid(&self) -> ExactRational {
        (&self.lo + &self.hi) / rational::int(2)
    }

    pub fn contains(&self, x: &ExactRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_enclosure(&self, other: &Enclosure) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn intersects(&self, other: &Enclosure) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// Intersection, or `None` when disjoint.
    pub fn intersect(&self, other: &Enclosure) -> Option<Enclosure> {
        let lo = rational::max(&self.lo, &other.lo);
        let hi = rational::min(&self.hi, &other.hi);
        (lo <= hi).then(|| Enclosure { lo, hi })
    }

    pub fn hull(&self, other: &Enclosure) -> Enclosure {
        Enclosure {
            lo: rational::min(&self.lo, &other.lo),
            hi: rational::max(&self.hi, &other.hi),
        }
    }

    /// True when every point of `self` is strictly below every point of `other`.
    pub fn strictly_below(&self, other: &Enclosure) -> bool {
        self.hi < other.lo
    }

    pub fn scale(&self, k: &ExactRational) -> Enclosure {
        if k.is_negative() {
            Enclosure {
                lo: &self.hi * k,
                hi: &self.lo * k,
            }
        } else {
            Enclosure {
                lo: &self.lo * k,
                hi: &self.hi * k,
            }
        }
    }

    /// Product of two intervals.
    pub fn mul(&self, other: &Enclosure) -> Enclosure {
        let c = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        Enclosure { lo, hi }
    }

    /// Adds `[0, t]`.
    pub fn widen_up(&self, t: &ExactRational) -> Enclosure {
        Enclosure {
            lo: self.lo.clone(),
            hi: &self.hi + t,
        }
    }

    /// Rounds endpoints outward to multiples of `2^-bits`.
    pub fn outward(&self, bits: u32) -> Enclosure {
        Enclosure {
            lo: rational::round_down(&self.lo, bits),
            hi: rational::round_up(&self.hi, bits),
        }
    }

    pub fn mid_f64(&self) -> f64 {
        rational::to_f64(&self.mid())
    }

    pub fn width_f64(&self) -> f64 {
        rational::to_f64(&self.width())
    }

    /// `"[lo, hi]"` with endpoints rounded outward to `digits` decimals.
    pub fn to_decimal(&self, digits: usize) -> String {
        format!(
            "[{}, {}]",
            rational::to_decimal(&self.lo, digits, false),
            rational::to_decimal(&self.hi, digits, true)
        )
    }

    /// Midpoint preview with an explicit `±` radius; the radius is rounded up
    /// and the printed interval `mid ± rad` still contains `[lo, hi]`.
    pub fn to_pm(&self, digits: usize) -> String {
        let mid = rational::parse(&rational::to_decimal(&self.mid(), digits, false)).unwrap();
        let rad = rational::max(&(&self.hi - &mid), &(&mid - &self.lo));
        format!(
            "{} ±{}",
            rational::to_decimal(&mid, digits, false),
            sci_up(&rad)
        )
    }
}

/// Rounds a non-negative rational up to 3 significant decimal digits, in
/// scientific notation.
fn sci_up(x: &ExactRational) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    let f = rational::to_f64(x);
    let mut e = f.abs().log10().floor() as i32;
    // Find mantissa m in [100, 1000) with m * 10^(e-2) >= x, exactly.
    let ten = rational::int(10);
    let scale = |p: i32| -> ExactRational {
        if p >= 0 {
            num_traits::pow(ten.clone(), p as usize)
        } else {
            rational::int(1) / num_traits::pow(ten.clone(), (-p) as usize)
        }
    };
    loop {
        let unit = scale(e - 2);
        let m = (x / &unit).ceil();
        if m > rational::int(1000) {
            e += 1;
            continue;
        }
        let mi = m.to_integer();
        return format!("{}.{}e{}", &mi / 100, format!("{:02}", &mi % 100), e);
    }
}

impl fmt::Display for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}, {}]",
            rational::to_text(&self.lo),
            rational::to_text(&self.hi)
        )
    }
}

impl Add for &Enclosure {
    type Output = Enclosure;
    fn add(self, o: &Enclosure) -> Enclosure {
        Enclosure {
            lo: &self.lo + &o.lo,
            hi: &self.hi + &o.hi,
        }
    }
}

impl Sub for &Enclosure {
    type Output = Enclosure;
    fn sub(self, o: &Enclosure) -> Enclosure {
        Enclosure {
            lo: &self.lo - &o.hi,
            hi: &self.hi - &o.lo,
        }
    }
}

impl Neg for &Enclosure {
    type Output = Enclosure;
    fn neg(self) -> Enclosure {
        Enclosure {
            lo: -&self.hi,
            hi: -&self.lo,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct EnclosureText {
    lo: String,
    hi: String,
}

impl Serialize for Enclosure {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        EnclosureText {
            lo: rational::to_text(&self.lo),
            hi: rational::to_text(&self.hi),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Enclosure {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let t = EnclosureText::deserialize(d)?;
        let lo = rational::parse(&t.lo).map_err(serde::de::Error::custom)?;
        let hi = rational::parse(&t.hi).map_err(serde::de::Error::custom)?;
        if lo > hi {
            return Err(serde::de::Error::custom("lo > hi"));
        }
        Ok(Enclosure { lo, hi })
    }
}
