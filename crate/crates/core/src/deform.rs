//! Exact rational values of the deformations `T_n(k_1, ..., k_r)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::compositions::Composition;
use crate::error::{check_level, Error, Result};
use crate::rational::ExactRational;

/// Largest number of monomials the brute-force expansion will visit.
pub const BRUTEFORCE_LIMIT: u64 = 10_000_000;

/// A deformation level together with a composition.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DeformKey {
    pub n: u32,
    #[serde(with = "composition_text")]
    pub composition: Composition,
}

mod composition_text {
    use super::Composition;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(c: &Composition, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&c.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Composition, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl DeformKey {
    pub fn new(n: u32, composition: Composition) -> Self {
        DeformKey { n, composition }
    }

    /// Canonical text used in cache keys: `"n=<n>;k=<parts>"`.
    pub fn canonical(&self) -> String {
        format!("n={};k={}", self.n, self.composition)
    }
}

fn lcm_upto(b: u64) -> BigInt {
    (1..=b).fold(BigInt::one(), |acc, v| acc.lcm(&BigInt::from(v)))
}

/// Exact `T_n(k)` by dynamic programming over the chains
/// `b_1 >= ... >= b_r >= 1` with steps `b_j - b_{j+1} <= n` and `b_r <= n + 1`,
/// each contributing `prod_j b_j^{-k_j}`.
pub fn tn_exact(key: &DeformKey) -> Result<ExactRational> {
    check_level(key.n)?;
    let parts = key.composition.parts();
    if parts.is_empty() {
        return Err(Error::EmptyComposition);
    }
    let n = key.n as usize;
    let r = parts.len();

    // Layer values D_j(b) = num[b-1] / den, b = 1..=bmax.
    let mut den = BigInt::one();
    let mut num: Vec<BigInt> = vec![BigInt::one(); n + 1];
    let mut bmax = n + 1;
    // Innermost layer: D_r(b) = b^{-k_r}.
    apply_power(&mut num, &mut den, parts[r - 1]);

    for j in (0..r - 1).rev() {
        let new_max = bmax + n;
        // Window sums S(b) = sum_{b' = max(1, b-n)}^{min(b, bmax)} D(b').
        let mut next = Vec::with_capacity(new_max);
        let mut window = BigInt::zero();
        for b in 1..=new_max {
            if b <= bmax {
                window += &num[b - 1];
            }
            if b > n + 1 {
                let out = b - n - 1;
                if out <= bmax {
                    window -= &num[out - 1];
                }
            }
            next.push(window.clone());
        }
        num = next;
        bmax = new_max;
        apply_power(&mut num, &mut den, parts[j]);
    }
    let total: BigInt = num.iter().sum();
    Ok(BigRational::new(total, den))
}

/// Multiplies entry `b` by `b^{-k}` keeping a shared denominator, then reduces.
fn apply_power(num: &mut [BigInt], den: &mut BigInt, k: u32) {
    let l = num_traits::pow(lcm_upto(num.len() as u64), k as usize);
    for (i, v) in num.iter_mut().enumerate() {
        let bk = num_traits::pow(BigInt::from(i as u64 + 1), k as usize);
        *v *= &l / bk;
    }
    *den *= l;
    let mut g = den.clone();
    for v in num.iter() {
        if g.is_one() {
            break;
        }
        g = g.gcd(v);
    }
    if !g.is_one() {
        for v in num.iter_mut() {
            *v /= &g;
        }
        *den /= &g;
    }
}

/// Independent oracle: direct expansion over `a in {0..n}^r` of
/// `prod_j (1 + a_j + ... + a_r)^{-k_j}`. The empty composition gives 1.
pub fn tn_bruteforce(key: &DeformKey) -> Result<ExactRational> {
    check_level(key.n)?;
    let parts = key.composition.parts();
    let r = parts.len();
    let base = key.n as u64 + 1;
    let count = (0..r).try_fold(1u64, |acc, _| acc.checked_mul(base));
    match count {
        Some(c) if c <= BRUTEFORCE_LIMIT => {}
        _ => {
            return Err(Error::SizeGuard(format!(
                "({})^{} monomials exceeds {}",
                base, r, BRUTEFORCE_LIMIT
            )))
        }
    }
    if r == 0 {
        return Ok(BigRational::one());
    }
    // Every product prod b_j^{k_j} divides lcm(1..=bmax)^weight.
    let bmax = 1 + r as u64 * key.n as u64;
    let common = num_traits::pow(lcm_upto(bmax), key.composition.weight() as usize);
    let mut total = BigInt::zero();
    let mut a = vec![0u64; r];
    loop {
        let mut prod = BigInt::one();
        let mut b = 1u64;
        for j in (0..r).rev() {
            b += a[j];
            prod *= num_traits::pow(BigInt::from(b), parts[j] as usize);
        }
        total += &common / prod;
        // odometer increment
        let mut i = 0;
        loop {
            if i == r {
                return Ok(BigRational::new(total, common));
            }
            a[i] += 1;
            if a[i] < base {
                break;
            }
            a[i] = 0;
            i += 1;
        }
    }
}

/// `T_n(base), T_n(base ++ (c)), T_n(base ++ (c, c)), ...` with `steps` entries.
pub fn tn_monotone_table(
    n: u32,
    base: &Composition,
    extension_part: u32,
    steps: usize,
) -> Result<Vec<ExactRational>> {
    if steps == 0 {
        return Err(Error::Precondition("steps must be at least 1".into()));
    }
    let mut out = Vec::with_capacity(steps);
    let mut c = base.clone();
    for _ in 0..steps {
        out.push(tn_exact(&DeformKey::new(n, c.clone()))?);
        c = c.pushed(extension_part)?;
    }
    Ok(out)
}
