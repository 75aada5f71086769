//! Cantor sets, the self-similar set `E_2`, Moran-equation dimensions, box
//! counting, and sampled distortion of the jump-part image.

use std::cmp::Ordering;
use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::compositions::{compositions_up_to, lex_compare, tau, Composition, Tail, TailSpec};
use crate::deform_map::{jump_part, Budget};
use crate::enclosure::Enclosure;
use crate::error::{check_level, Error, Result};
use crate::rational::{self, ExactRational};
use crate::rigorous;

/// Largest point set the generators will build.
pub const POINT_LIMIT: usize = 1 << 22;

/// An iterated function system of similitudes on `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SimilitudeFamily {
    /// Maps `x -> ratio * x + offset`.
    Finite(Vec<(ExactRational, ExactRational)>),
    /// Maps `x -> b^{-k} + b^{-k} x` for every `k >= start`.
    Geometric { base: u64, start: u64 },
}

impl SimilitudeFamily {
    /// `m`-adic Cantor set: ratios `1/m`, offsets `0` and `(m-1)/m`.
    pub fn cantor(m: u64) -> Result<Self> {
        if m < 3 {
            return Err(Error::Precondition("Cantor sets need m >= 3".into()));
        }
        let r = rational::rat(1, m as i64);
        Ok(SimilitudeFamily::Finite(vec![
            (r.clone(), ExactRational::zero()),
            (r, rational::rat(m as i64 - 1, m as i64)),
        ]))
    }

    /// The family `x -> 2^{-k} (1 + x)`, `k >= 2`, whose attractor is `E_2`.
    pub fn e2() -> Self {
        SimilitudeFamily::Geometric { base: 2, start: 2 }
    }

    fn validate(&self) -> Result<()> {
        match self {
            SimilitudeFamily::Finite(maps) => {
                if maps.is_empty() {
                    return Err(Error::Precondition("empty family".into()));
                }
                for (r, _) in maps {
                    if !r.is_positive() || r >= &rational::int(1) {
                        return Err(Error::Precondition("ratios must lie in (0, 1)".into()));
                    }
                }
            }
            SimilitudeFamily::Geometric { base, start } => {
                if *base < 2 || *start < 1 {
                    return Err(Error::Precondition("geometric family needs base >= 2, start >= 1".into()));
                }
            }
        }
        Ok(())
    }

    /// Enclosure of `sum_i r_i^s`.
    pub fn moran_sum(&self, s: &ExactRational) -> Enclosure {
        match self {
            SimilitudeFamily::Finite(maps) => maps.iter().fold(
                Enclosure::point(ExactRational::zero()),
                |acc, (r, _)| {
                    let l = rigorous::ln_enclosure(r);
                    &acc + &rigorous::exp_interval(&l.scale(s))
                },
            ),
            SimilitudeFamily::Geometric { base, start } => {
                // sum_{k >= k0} x^k = x^{k0} / (1 - x), increasing in x = b^{-s} < 1.
                let x = rigorous::pow_neg(*base, s);
                let f = |x: &ExactRational| {
                    num_traits::pow(x.clone(), *start as usize) / (rational::int(1) - x)
                };
                Enclosure::new(f(x.lo()), f(x.hi()))
            }
        }
    }
}

/// Solves `sum_i r_i^s = 1` by bisection; the returned enclosure of `s` has
/// width at most `tol`.
pub fn moran_solve(family: &SimilitudeFamily, tol: &ExactRational) -> Result<Enclosure> {
    family.validate()?;
    if !tol.is_positive() {
        return Err(Error::Precondition("tolerance must be positive".into()));
    }
    let one = rational::int(1);
    // The sum decreases in s; find lo with sum > 1 and hi with sum < 1.
    let mut lo = match family {
        SimilitudeFamily::Finite(_) => ExactRational::zero(),
        SimilitudeFamily::Geometric { .. } => rational::rat(1, 2),
    };
    while !(family.moran_sum(&lo).lo() > &one) {
        if lo.is_zero() {
            // a single map: s = 0
            return Ok(Enclosure::point(lo));
        }
        lo /= rational::int(2);
    }
    let mut hi = rational::int(1);
    while !(family.moran_sum(&hi).hi() < &one) {
        hi *= rational::int(2);
        if hi > rational::int(1 << 20) {
            return Err(Error::Precondition("Moran sum does not drop below 1".into()));
        }
    }
    while &hi - &lo > *tol {
        let mid = (&lo + &hi) / rational::int(2);
        let v = family.moran_sum(&mid);
        if v.lo() > &one {
            lo = mid;
        } else if v.hi() < &one {
            hi = mid;
        } else {
            // The root sits (numerically) at mid: bracket it tightly and stop.
            let d = tol / rational::int(4);
            let (a, b) = (&mid - &d, &mid + &d);
            if family.moran_sum(&a).lo() > &one && family.moran_sum(&b).hi() < &one {
                return Ok(Enclosure::new(a, b));
            }
            break;
        }
    }
    Ok(Enclosure::new(lo, hi))
}

/// Enclosure of `2^{2s} - 2^s - 1`, which vanishes at the dimension of `E_2`.
pub fn e2_residual(s: &ExactRational) -> Enclosure {
    let y = rigorous::exp_interval(&rigorous::ln2_enclosure().scale(s));
    let y2 = y.mul(&y);
    &(&y2 - &y) - &Enclosure::point(rational::int(1))
}

/// `sum_{i <= depth} a_i / m^i` for all digit strings with `a_i in {0, m-1}`, sorted.
pub fn cantor_points(m: u64, depth: u32) -> Result<Vec<ExactRational>> {
    if m < 3 || depth == 0 {
        return Err(Error::Precondition("need m >= 3 and depth >= 1".into()));
    }
    if depth >= 23 {
        return Err(Error::SizeGuard(format!("2^{depth} points")));
    }
    let den = num_traits::pow(BigInt::from(m), depth as usize);
    let mut out = Vec::with_capacity(1 << depth);
    for mask in 0u64..(1 << depth) {
        // digit i (1-based) is m-1 when bit depth-i of mask is set; keeps output sorted.
        let mut num = BigInt::zero();
        for i in 1..=depth {
            num *= BigInt::from(m);
            if mask >> (depth - i) & 1 == 1 {
                num += BigInt::from(m - 1);
            }
        }
        out.push(ExactRational::new(num, den.clone()));
    }
    Ok(out)
}

/// Finite truncations `sum_{j <= r} 2^{-K_j}` with all parts `>= 2` and
/// weight `<= depth`, sorted.
pub fn e2_points(depth: u32) -> Result<Vec<ExactRational>> {
    if depth < 2 {
        return Err(Error::Precondition("depth must be at least 2".into()));
    }
    // Compositions with parts >= 2 grow like the golden ratio to the power depth.
    if depth > 40 {
        return Err(Error::SizeGuard(format!("depth {depth}")));
    }
    let mut out: Vec<ExactRational> = compositions_up_to(depth as u64, 2, u32::MAX)
        .iter()
        .map(Composition::dyadic_value)
        .collect();
    if out.len() > POINT_LIMIT {
        return Err(Error::SizeGuard(format!("{} points", out.len())));
    }
    out.sort();
    Ok(out)
}

/// Least-squares box-counting estimate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimEstimate {
    pub value: f64,
    pub stderr: f64,
    pub eps_range: (f64, f64),
}

/// Number of boxes `[i eps, (i+1) eps)` hit by `points`.
pub fn box_count(points: &[ExactRational], eps: &ExactRational) -> usize {
    let boxes: HashSet<BigInt> = points.iter().map(|x| (x / eps).floor().to_integer()).collect();
    boxes.len()
}

/// Slope of `log N(eps)` against `log(1/eps)` over the schedule.
pub fn box_count_dim(points: &[ExactRational], schedule: &[ExactRational]) -> Result<DimEstimate> {
    if points.is_empty() || schedule.len() < 2 {
        return Err(Error::Precondition("need points and at least two scales".into()));
    }
    if schedule.iter().any(|e| !e.is_positive()) {
        return Err(Error::Precondition("scales must be positive".into()));
    }
    let data: Vec<(f64, f64)> = schedule
        .par_iter()
        .map(|e| {
            let n = box_count(points, e) as f64;
            (-rational::to_f64(e).ln(), n.ln())
        })
        .collect();
    if data.iter().all(|d| d.1 == data[0].1) {
        return Err(Error::DegenerateRegression("all box counts equal".into()));
    }
    let k = data.len() as f64;
    let mx = data.iter().map(|d| d.0).sum::<f64>() / k;
    let my = data.iter().map(|d| d.1).sum::<f64>() / k;
    let sxx: f64 = data.iter().map(|d| (d.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateRegression("all scales equal".into()));
    }
    let sxy: f64 = data.iter().map(|d| (d.0 - mx) * (d.1 - my)).sum();
    let slope = sxy / sxx;
    let stderr = if data.len() > 2 {
        let rss: f64 = data
            .iter()
            .map(|d| (d.1 - my - slope * (d.0 - mx)).powi(2))
            .sum();
        (rss / (k - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    let eps: Vec<f64> = schedule.iter().map(rational::to_f64).collect();
    let lo = eps.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = eps.iter().cloned().fold(0.0, f64::max);
    Ok(DimEstimate {
        value: slope,
        stderr,
        eps_range: (lo, hi),
    })
}

/// `base^{-k}` for `k` in `from..=to`.
pub fn power_schedule(base: u64, from: u32, to: u32) -> Vec<ExactRational> {
    (from..=to)
        .map(|k| ExactRational::new(BigInt::one(), num_traits::pow(BigInt::from(base), k as usize)))
        .collect()
}

/// The point `sum_j (n+1)/(n+2)^{K_j}` of the `1/(n+2)`-Cantor set minus its
/// endpoint set that corresponds to a sequence.
pub fn cantor_image(n: u32, t: &TailSpec) -> ExactRational {
    let b = rational::int(n as i64 + 2);
    let inv = |k: u64| rational::int(1) / num_traits::pow(b.clone(), k as usize);
    let head: ExactRational = t
        .prefix()
        .prefix_sums()
        .into_iter()
        .map(|k| inv(k) * rational::int(n as i64 + 1))
        .sum();
    let w = t.prefix().weight();
    match t.tail() {
        Tail::AllOnes => head + inv(w),
        Tail::AllTwos => head + inv(w) / rational::int(n as i64 + 3),
    }
}

/// One sampled pair for the jump-part image comparison.
#[derive(Clone, Debug)]
pub struct ImagePair {
    pub k: TailSpec,
    pub l: TailSpec,
    /// `c(k) - c(l)` of the Cantor-set images.
    pub cantor_diff: ExactRational,
    /// `H_n(tau(k)) - H_n(tau(l))`
    pub image_diff: Enclosure,
    /// `image_diff * (n+2)^{k_1 + ... + k_{r0}}`
    pub normalized: Enclosure,
}

/// Summary of [`hn_image_sample`].
#[derive(Clone, Debug)]
pub struct ImageSample {
    pub pairs: Vec<ImagePair>,
    /// Range of `image_diff / cantor_diff` over the pairs.
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// Range of the normalized image differences.
    pub min_normalized: f64,
    pub max_normalized: f64,
}

/// Samples ordered pairs `k ≻ l` of eventually constant sequences with prefix
/// weight `<= w` and compares `H_n` differences against Cantor-point differences.
pub fn hn_image_sample(n: u32, w: u64, budget: &Budget) -> Result<ImageSample> {
    check_level(n)?;
    let mut specs: Vec<TailSpec> = vec![TailSpec::all_ones(), TailSpec::all_twos()];
    for c in compositions_up_to(w, 1, u32::MAX) {
        specs.push(TailSpec::new(c.clone(), Tail::AllOnes));
        specs.push(TailSpec::new(c, Tail::AllTwos));
    }
    let mut seen = HashSet::new();
    specs.retain(|t| seen.insert(t.clone()));
    let values: Vec<Enclosure> = specs
        .par_iter()
        .map(|t| jump_part(n, &tau(t), budget))
        .collect::<Result<_>>()?;
    let base = rational::int(n as i64 + 2);
    let mut pairs = Vec::new();
    for (i, k) in specs.iter().enumerate() {
        for (j, l) in specs.iter().enumerate() {
            if lex_compare(k, l) != Ordering::Greater {
                continue;
            }
            let r0 = k.first_difference(l).expect("distinct") + 1;
            let weight: u64 = (0..r0).map(|p| k.entry(p) as u64).sum();
            let image_diff = &values[i] - &values[j];
            let normalized = image_diff.scale(&num_traits::pow(base.clone(), weight as usize));
            pairs.push(ImagePair {
                k: k.clone(),
                l: l.clone(),
                cantor_diff: cantor_image(n, k) - cantor_image(n, l),
                image_diff,
                normalized,
            });
        }
    }
    let ratio = |p: &ImagePair| {
        (
            rational::to_f64(&(p.image_diff.lo() / &p.cantor_diff)),
            rational::to_f64(&(p.image_diff.hi() / &p.cantor_diff)),
        )
    };
    let min_ratio = pairs.iter().map(|p| ratio(p).0).fold(f64::INFINITY, f64::min);
    let max_ratio = pairs.iter().map(|p| ratio(p).1).fold(0.0, f64::max);
    let min_normalized = pairs
        .iter()
        .map(|p| rational::to_f64(p.normalized.lo()))
        .fold(f64::INFINITY, f64::min);
    let max_normalized = pairs
        .iter()
        .map(|p| rational::to_f64(p.normalized.hi()))
        .fold(0.0, f64::max);
    Ok(ImageSample {
        pairs,
        min_ratio,
        max_ratio,
        min_normalized,
        max_normalized,
    })
}

/// Point-set CSV: one `num/den` per line under header `x`.
pub fn points_csv(points: &[ExactRational]) -> String {
    let mut s = String::from("x\n");
    for p in points {
        s.push_str(&rational::to_text(p));
        s.push('\n');
    }
    s
}

/// `{"value": .., "stderr": .., "eps_range": [lo, hi]}`
pub fn dim_json(d: &DimEstimate) -> String {
    serde_json::to_string(d).expect("estimate serializes")
}
