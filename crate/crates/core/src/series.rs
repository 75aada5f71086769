//! Truncated power series on `[0, 1]` with a certified bound on the omitted
//! tail, and the pipeline that evaluates iterated integrals with them.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::enclosure::Enclosure;
use crate::error::{check_level, Error, Result};
use crate::rational::{self, ExactRational};
use crate::rigorous;

/// Significant bits kept when a tail bound is rounded up.
pub const TAIL_BITS: u32 = 64;

/// Default truncation order.
pub const DEFAULT_ORDER: usize = 60;

/// A series `f` with non-negative coefficients such that
/// `0 <= f(u) - sum_{m <= M} c_m u^m <= tail_bound * u^{M+1}` on `[0, 1]`.
///
/// Coefficients are held as integer numerators over one shared denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertifiedSeries {
    num: Vec<BigInt>,
    den: BigInt,
    tail: ExactRational,
}

fn lcm_upto(b: u64) -> BigInt {
    (1..=b).fold(BigInt::one(), |acc, v| acc.lcm(&BigInt::from(v)))
}

fn round_tail(t: ExactRational) -> ExactRational {
    rational::round_up_significant(&t, TAIL_BITS)
}

impl CertifiedSeries {
    /// Builds a series from explicit coefficients (all `>= 0`) and a tail bound.
    pub fn from_coeffs(coeffs: &[ExactRational], tail: ExactRational) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Precondition("series needs at least one coefficient".into()));
        }
        if coeffs.iter().any(|c| c.is_negative()) || tail.is_negative() {
            return Err(Error::Precondition("series coefficients must be non-negative".into()));
        }
        let den = coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let num = coeffs
            .iter()
            .map(|c| c.numer() * (&den / c.denom()))
            .collect();
        Ok(CertifiedSeries { num, den, tail }.reduced())
    }

    fn reduced(mut self) -> Self {
        let mut g = self.den.clone();
        for v in &self.num {
            if g.is_one() {
                return self;
            }
            g = g.gcd(v);
        }
        if !g.is_one() {
            for v in self.num.iter_mut() {
                *v /= &g;
            }
            self.den /= &g;
        }
        self
    }

    /// The constant `c` at order `order`.
    pub fn constant(c: ExactRational, order: usize) -> Result<Self> {
        let mut v = vec![ExactRational::zero(); order + 1];
        v[0] = c;
        Self::from_coeffs(&v, ExactRational::zero())
    }

    /// `u^m` at order `order` (exact when `m <= order`, otherwise all tail).
    pub fn monomial(m: usize, order: usize) -> Self {
        let mut num = vec![BigInt::zero(); order + 1];
        let tail = if m <= order {
            num[m] = BigInt::one();
            ExactRational::zero()
        } else {
            ExactRational::one()
        };
        CertifiedSeries {
            num,
            den: BigInt::one(),
            tail,
        }
    }

    pub fn order(&self) -> usize {
        self.num.len() - 1
    }

    pub fn coeff(&self, m: usize) -> ExactRational {
        BigRational::new(self.num[m].clone(), self.den.clone())
    }

    pub fn coeffs(&self) -> Vec<ExactRational> {
        (0..self.num.len()).map(|m| self.coeff(m)).collect()
    }

    pub fn tail_bound(&self) -> &ExactRational {
        &self.tail
    }

    /// `(1 + t_n) * self`, truncated at the same order; spilled mass and
    /// `(n + 1) * tail` move into the tail.
    pub fn mul_one_plus_tn(&self, n: u32) -> Self {
        let big_m = self.order();
        let n = n as usize;
        // prefix[i] = sum_{j < i} num[j]
        let mut prefix = Vec::with_capacity(big_m + 2);
        prefix.push(BigInt::zero());
        for v in &self.num {
            let last = prefix.last().unwrap().clone();
            prefix.push(last + v);
        }
        let num: Vec<BigInt> = (0..=big_m)
            .map(|m| &prefix[m + 1] - &prefix[m.saturating_sub(n)])
            .collect();
        // Coefficient j contributes once for each l in 1..=n with j + l > M.
        let mut spill = BigInt::zero();
        for (j, v) in self.num.iter().enumerate() {
            let over = (j + n).saturating_sub(big_m).min(n);
            if over > 0 {
                spill += v * BigInt::from(over as u64);
            }
        }
        let tail = BigRational::new(spill, self.den.clone())
            + &self.tail * rational::int(n as i64 + 1);
        CertifiedSeries {
            num,
            den: self.den.clone(),
            tail: round_tail(tail),
        }
        .reduced()
    }

    /// `q * self` for a polynomial `q` with non-negative coefficients.
    pub fn mul_poly(&self, q: &[ExactRational]) -> Result<Self> {
        if q.iter().any(|c| c.is_negative()) {
            return Err(Error::Precondition("factor coefficients must be non-negative".into()));
        }
        let big_m = self.order();
        let qd = q.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let qn: Vec<BigInt> = q.iter().map(|c| c.numer() * (&qd / c.denom())).collect();
        let mut num = vec![BigInt::zero(); big_m + 1];
        let mut spill = BigInt::zero();
        for (j, v) in self.num.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            for (l, w) in qn.iter().enumerate() {
                if j + l <= big_m {
                    num[j + l] += v * w;
                } else {
                    spill += v * w;
                }
            }
        }
        let den = &self.den * &qd;
        let qsum: ExactRational = q.iter().sum();
        let tail = BigRational::new(spill, den.clone()) + &self.tail * qsum;
        Ok(CertifiedSeries {
            num,
            den,
            tail: round_tail(tail),
        }
        .reduced())
    }

    /// `u -> int_0^1 f(u x) dx`.
    pub fn integrate(&self) -> Self {
        self.integrate_times(1)
    }

    /// `k`-fold application of [`integrate`](Self::integrate):
    /// `c_m -> c_m / (m+1)^k`, `tail -> tail / (M+2)^k`.
    pub fn integrate_times(&self, k: u32) -> Self {
        if k == 0 {
            return self.clone();
        }
        let big_m = self.order();
        let l = num_traits::pow(lcm_upto(big_m as u64 + 1), k as usize);
        let num = self
            .num
            .iter()
            .enumerate()
            .map(|(m, v)| {
                if v.is_zero() {
                    BigInt::zero()
                } else {
                    v * (&l / num_traits::pow(BigInt::from(m as u64 + 1), k as usize))
                }
            })
            .collect();
        let tail = &self.tail
            / BigRational::from_integer(num_traits::pow(BigInt::from(big_m as u64 + 2), k as usize));
        CertifiedSeries {
            num,
            den: &self.den * l,
            tail: round_tail(tail),
        }
        .reduced()
    }

    /// `sum_{k >= q} I^k f` where `I` is [`integrate`](Self::integrate):
    /// `c_m -> c_m / (m (m+1)^{q-1})`. Requires `c_0 = 0` and `q >= 1`.
    pub fn integrate_geometric(&self, q: u32) -> Result<Self> {
        if q == 0 || !self.num[0].is_zero() {
            return Err(Error::Precondition(
                "geometric integral sum needs q >= 1 and a zero constant term".into(),
            ));
        }
        let big_m = self.order();
        let l = lcm_upto(big_m as u64 + 1);
        let lq = num_traits::pow(l.clone(), q as usize);
        // c_m * L^q / (m (m+1)^{q-1}); m divides L and (m+1)^{q-1} divides L^{q-1}.
        let num = self
            .num
            .iter()
            .enumerate()
            .map(|(m, v)| {
                if m == 0 || v.is_zero() {
                    BigInt::zero()
                } else {
                    let d = BigInt::from(m as u64)
                        * num_traits::pow(BigInt::from(m as u64 + 1), q as usize - 1);
                    v * (&lq / d)
                }
            })
            .collect();
        let tail = &self.tail
            / BigRational::from_integer(
                BigInt::from(big_m as u64 + 1)
                    * num_traits::pow(BigInt::from(big_m as u64 + 2), q as usize - 1),
            );
        Ok(CertifiedSeries {
            num,
            den: &self.den * lq,
            tail: round_tail(tail),
        }
        .reduced())
    }

    /// Sum of two series of equal order.
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.order(), other.order(), "adding series of different order");
        let den = self.den.lcm(&other.den);
        let a = &den / &self.den;
        let b = &den / &other.den;
        let num = self
            .num
            .iter()
            .zip(&other.num)
            .map(|(x, y)| x * &a + y * &b)
            .collect();
        CertifiedSeries {
            num,
            den,
            tail: round_tail(&self.tail + &other.tail),
        }
        .reduced()
    }

    /// Same function, represented to a lower order; dropped coefficients move into the tail.
    pub fn truncate(&self, order: usize) -> Self {
        if order >= self.order() {
            return self.clone();
        }
        let dropped: BigInt = self.num[order + 1..].iter().sum();
        CertifiedSeries {
            num: self.num[..=order].to_vec(),
            den: self.den.clone(),
            tail: round_tail(BigRational::new(dropped, self.den.clone()) + &self.tail),
        }
        .reduced()
    }

    /// Sum of stored coefficients.
    pub fn partial_sum(&self) -> ExactRational {
        BigRational::new(self.num.iter().sum(), self.den.clone())
    }

    /// `[sum c_m, sum c_m + tail]`.
    pub fn eval_at_one(&self) -> Enclosure {
        let s = self.partial_sum();
        let hi = &s + &self.tail;
        Enclosure::new(s, hi)
    }

    /// Enclosure of `f(u)` for rational `u` in `[0, 1]`.
    pub fn eval_at(&self, u: &ExactRational) -> Result<Enclosure> {
        if u.is_negative() || u > &rational::int(1) {
            return Err(Error::Precondition("evaluation point must lie in [0, 1]".into()));
        }
        let mut acc = ExactRational::zero();
        for m in (0..self.num.len()).rev() {
            acc = acc * u + self.coeff(m);
        }
        let t = &self.tail * num_traits::pow(u.clone(), self.order() + 1);
        let hi = &acc + t;
        Ok(Enclosure::new(acc, hi))
    }

    /// Deterministic JSON dump: `{"coeffs": ["num/den", ...], "tail_bound": "num/den"}`.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&SeriesDump::from(self)).expect("series serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let bad = |_| Error::Parse {
            what: "series dump",
            input: s.chars().take(80).collect(),
        };
        let d: SeriesDump = serde_json::from_str(s).map_err(bad)?;
        let coeffs = d
            .coeffs
            .iter()
            .map(|c| rational::parse(c))
            .collect::<Result<Vec<_>>>()?;
        Self::from_coeffs(&coeffs, rational::parse(&d.tail_bound)?)
    }
}

#[derive(Serialize, Deserialize)]
struct SeriesDump {
    coeffs: Vec<String>,
    tail_bound: String,
}

impl From<&CertifiedSeries> for SeriesDump {
    fn from(s: &CertifiedSeries) -> Self {
        SeriesDump {
            coeffs: s.coeffs().iter().map(rational::to_text).collect(),
            tail_bound: rational::to_text(&s.tail),
        }
    }
}

fn check_order(n: u32, order: usize) -> Result<()> {
    check_level(n)?;
    let min = n as usize + 1;
    if order < min {
        return Err(Error::OrderTooSmall { order, n, min });
    }
    Ok(())
}

/// `t_n(u) = u + u^2 + ... + u^n`, exact.
pub fn poly_tn(n: u32) -> Result<CertifiedSeries> {
    check_level(n)?;
    let mut c = vec![ExactRational::one(); n as usize + 1];
    c[0] = ExactRational::zero();
    CertifiedSeries::from_coeffs(&c, ExactRational::zero())
}

/// Coefficients of `exp(u + u^2/2 + ... + u^n/n)` from
/// `(m+1) c_{m+1} = sum_{l = max(m+1-n, 0)}^{m} c_l`.
fn en_coeffs(n: u32, order: usize) -> Vec<ExactRational> {
    let n = n as usize;
    let mut c = vec![ExactRational::zero(); order + 1];
    c[0] = ExactRational::one();
    for m in 0..order {
        let lo = (m + 1).saturating_sub(n);
        let s: ExactRational = c[lo..=m].iter().sum();
        c[m + 1] = s / rational::int(m as i64 + 1);
    }
    c
}

fn en_tail(n: u32, coeffs: &[ExactRational]) -> ExactRational {
    let total = rigorous::exp_harmonic(n);
    let partial: ExactRational = coeffs.iter().sum();
    round_tail(total.hi() - partial)
}

/// `e_n(u) = exp(u + u^2/2 + ... + u^n/n)` to order `order`.
pub fn series_en(n: u32, order: usize) -> Result<CertifiedSeries> {
    check_order(n, order)?;
    let c = en_coeffs(n, order);
    let tail = en_tail(n, &c);
    CertifiedSeries::from_coeffs(&c, tail)
}

/// `Delta_n = e_n - (1 + t_n)`.
pub fn series_delta(n: u32, order: usize) -> Result<CertifiedSeries> {
    check_order(n, order)?;
    let mut c = en_coeffs(n, order);
    let tail = en_tail(n, &c);
    for v in c.iter_mut().take(n as usize + 1) {
        *v -= ExactRational::one();
    }
    CertifiedSeries::from_coeffs(&c, tail)
}

/// Coefficients `a_m` of the all-twos tail function `g_n`.
pub fn gn_coeffs(n: u32, order: usize) -> Vec<ExactRational> {
    let n = n as usize;
    let mut a = vec![ExactRational::zero(); order + 1];
    a[0] = ExactRational::one();
    for m in 0..order {
        let lo = (m + 1).saturating_sub(n);
        let s: ExactRational = a[lo..=m].iter().sum();
        a[m + 1] = s / rational::int(((m + 1) * (m + 3)) as i64);
    }
    a
}

/// Upper bound on `a_m` for `m > n`: `2/(m(m+2)) * (1/(m+1-n) - 1/(m+1))`.
pub fn gn_coeff_upper(n: u32, m: usize) -> ExactRational {
    let (n, m) = (n as i64, m as i64);
    rational::rat(2, m * (m + 2)) * (rational::rat(1, m + 1 - n) - rational::rat(1, m + 1))
}

/// `g_n(u) = 1 + u/3 + ...`, the solution of `u^2 g'' + 3u g' + g = (1 + t_n) g`.
///
/// The tail is the smaller of two bounds: the coefficient upper estimate summed
/// in closed form, `n / ((M+2-n)(M+1)(M+2))`, and the majorant from the
/// recurrence, `n mu (1/(M+1) + 1/(M+2)) / 2` with `mu` the largest of the last
/// `n` stored coefficients.
pub fn series_gn(n: u32, order: usize) -> Result<CertifiedSeries> {
    check_order(n, order)?;
    let a = gn_coeffs(n, order);
    let (ni, mi) = (n as i64, order as i64);
    let telescoped = rational::rat(ni, (mi + 2 - ni) * (mi + 1) * (mi + 2));
    let mu = a[order + 1 - n as usize..]
        .iter()
        .max()
        .cloned()
        .unwrap_or_else(ExactRational::zero);
    let majorant = mu
        * rational::int(ni)
        * (rational::rat(1, mi + 1) + rational::rat(1, mi + 2))
        / rational::int(2);
    let tail = round_tail(rational::min(&telescoped, &majorant));
    CertifiedSeries::from_coeffs(&a, tail)
}

/// Generating function `A` of the total jump mass: the sum over all
/// compositions `k` of `I^{k_1} (1+t_n) I^{k_2} ... (1+t_n) I^{k_r} Delta_n`.
///
/// Coefficients satisfy `(m-1) A_m = Delta_m + sum_{l=1}^{n} A_{m-l}`; the
/// omitted mass is at most `(T_Delta + n R) / (M - n)` with `R` the sum of the
/// last `n` stored coefficients.
pub fn series_jump_total(n: u32, order: usize) -> Result<CertifiedSeries> {
    check_order(n, order)?;
    let delta = series_delta(n, order)?;
    let d = delta.coeffs();
    let nn = n as usize;
    let mut a = vec![ExactRational::zero(); order + 1];
    for m in 2..=order {
        let mut s = d[m].clone();
        for l in 1..=nn.min(m) {
            s += &a[m - l];
        }
        a[m] = s / rational::int(m as i64 - 1);
    }
    let r: ExactRational = a[order + 1 - nn..].iter().sum();
    let tail = (delta.tail_bound() + r * rational::int(n as i64))
        / rational::int(order as i64 - n as i64);
    CertifiedSeries::from_coeffs(&a, round_tail(tail))
}

/// Which seed function starts a pipeline.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Seed {
    One,
    En,
    Gn,
    DeltaN,
    /// `u^m`
    Monomial(u32),
}

/// An iterated integral: `steps` integration variables, a factor applied at
/// each variable index in `block_ends`, starting from `seed`.
///
/// The factor is `1 + t_n` unless `factor` supplies explicit non-negative
/// polynomial coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PipelinePlan {
    pub n: u32,
    pub block_ends: Vec<u64>,
    pub steps: u64,
    pub seed: Seed,
    pub factor: Option<Vec<ExactRational>>,
}

impl PipelinePlan {
    /// Plan whose integration count is the last block end.
    pub fn new(n: u32, block_ends: Vec<u64>, seed: Seed) -> Self {
        let steps = block_ends.last().copied().unwrap_or(0);
        PipelinePlan {
            n,
            block_ends,
            steps,
            seed,
            factor: None,
        }
    }

    pub fn with_steps(mut self, steps: u64) -> Self {
        self.steps = steps;
        self
    }

    pub fn with_factor(mut self, q: Vec<ExactRational>) -> Self {
        self.factor = Some(q);
        self
    }

    fn validate(&self) -> Result<()> {
        check_level(self.n)?;
        let mut prev = 0;
        for &b in &self.block_ends {
            if b <= prev || b > self.steps {
                return Err(Error::Precondition(format!(
                    "block ends must be strictly increasing within 1..={}",
                    self.steps
                )));
            }
            prev = b;
        }
        Ok(())
    }
}

type SeedKey = (Seed, u32, usize);

fn seed_memo() -> &'static Mutex<HashMap<SeedKey, Arc<CertifiedSeries>>> {
    static MEMO: OnceLock<Mutex<HashMap<SeedKey, Arc<CertifiedSeries>>>> = OnceLock::new();
    MEMO.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Seed series, memoized per `(seed, n, order)`.
pub fn seed_series(seed: Seed, n: u32, order: usize) -> Result<Arc<CertifiedSeries>> {
    let key = (seed, n, order);
    if let Some(s) = seed_memo().lock().unwrap().get(&key) {
        return Ok(Arc::clone(s));
    }
    // Computed outside the lock; a concurrent duplicate computes the same value.
    let s = Arc::new(match seed {
        Seed::One => CertifiedSeries::constant(ExactRational::one(), order)?,
        Seed::En => series_en(n, order)?,
        Seed::Gn => series_gn(n, order)?,
        Seed::DeltaN => series_delta(n, order)?,
        Seed::Monomial(m) => CertifiedSeries::monomial(m as usize, order),
    });
    let mut memo = seed_memo().lock().unwrap();
    Ok(Arc::clone(memo.entry(key).or_insert(s)))
}

/// Runs `plan` and returns the series before the final evaluation.
pub fn run_pipeline_series(plan: &PipelinePlan, order: usize) -> Result<CertifiedSeries> {
    plan.validate()?;
    let needs_order = matches!(plan.seed, Seed::En | Seed::Gn | Seed::DeltaN);
    if needs_order {
        check_order(plan.n, order)?;
    }
    let mut s = (*seed_series(plan.seed, plan.n, order)?).clone();
    // Walk variables from the innermost; integrations between factors are batched.
    let mut i = plan.steps;
    let mut ends = plan.block_ends.iter().rev().peekable();
    while i > 0 {
        if ends.peek() == Some(&&i) {
            ends.next();
            s = match &plan.factor {
                None => s.mul_one_plus_tn(plan.n),
                Some(q) => s.mul_poly(q)?,
            };
        }
        let next_end = ends.peek().map(|&&b| b).unwrap_or(0);
        let k = i - next_end;
        s = s.integrate_times(k as u32);
        i = next_end;
    }
    Ok(s)
}

/// Enclosure of the iterated integral described by `plan`.
pub fn run_pipeline(plan: &PipelinePlan, order: usize) -> Result<Enclosure> {
    Ok(run_pipeline_series(plan, order)?.eval_at_one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, to_f64};
    use crate::{tn_exact, DeformKey};
    use proptest::prelude::*;

    fn factorial(m: i64) -> ExactRational {
        rational::int((1..=m).product::<i64>().max(1))
    }

    #[test]
    fn poly_tn_examples() {
        assert_eq!(poly_tn(1).unwrap().coeffs(), vec![rat(0, 1), rat(1, 1)]);
        assert_eq!(
            poly_tn(3).unwrap().coeffs(),
            vec![rat(0, 1), rat(1, 1), rat(1, 1), rat(1, 1)]
        );
        assert_eq!(poly_tn(5).unwrap().eval_at_one(), Enclosure::point(rat(5, 1)));
        assert!(poly_tn(0).is_err());
    }

    #[test]
    fn en_examples() {
        let s = series_en(1, 20).unwrap();
        for m in 0..=20 {
            assert_eq!(s.coeff(m), rational::int(1) / factorial(m as i64));
        }
        let e = s.eval_at_one();
        assert!(e.contains(rigorous::exp_enclosure(&rat(1, 1)).lo()));
        assert!(e.width_f64() < 1e-15);
        for n in 1..=4 {
            assert_eq!(series_en(n, 10).unwrap().coeff(0), rat(1, 1));
        }
        assert!(matches!(series_en(3, 3), Err(Error::OrderTooSmall { .. })));
    }

    #[test]
    fn en_recurrence_identity() {
        for n in 1..=4u32 {
            let c = series_en(n, 40).unwrap().coeffs();
            for m in 0..40usize {
                let lo = (m + 1).saturating_sub(n as usize);
                let s: ExactRational = c[lo..=m].iter().sum();
                assert_eq!(&c[m + 1] * rational::int(m as i64 + 1), s);
            }
        }
    }

    #[test]
    fn gn_examples() {
        for n in 1..=4 {
            let a = gn_coeffs(n, 6);
            assert_eq!(a[0], rat(1, 1));
            assert_eq!(a[1], rat(1, 3));
        }
        assert_eq!(gn_coeffs(2, 4)[2], rat(1, 6));
        assert_eq!(gn_coeffs(1, 4)[2], rat(1, 24));
        assert_eq!(gn_coeffs(1, 4)[3], rat(1, 360));
        assert_eq!(gn_coeffs(1, 4)[4], rat(1, 8640));
        let g = series_gn(1, 40).unwrap().eval_at_one();
        assert!((g.mid_f64() - 1.377_896_895_4).abs() < 1e-9);
        assert!(g.width_f64() < 1e-20);
    }

    #[test]
    fn gn_ode_identity() {
        for n in 1..=4u32 {
            let a = gn_coeffs(n, 30);
            for m in 1..=30usize {
                let lo = m.saturating_sub(n as usize);
                let s: ExactRational = a[lo..=m].iter().sum();
                assert_eq!(&a[m] * rational::int(((m + 1) * (m + 1)) as i64), s);
            }
        }
    }

    #[test]
    fn gn_tail_dominates_continuation() {
        // The stored tail must bound the true remainder, approximated by a much longer expansion.
        for n in 1..=3u32 {
            let s = series_gn(n, 12).unwrap();
            let long: ExactRational = gn_coeffs(n, 120)[13..].iter().sum();
            assert!(&long <= s.tail_bound());
        }
    }

    #[test]
    fn delta_examples() {
        for n in 1..=4u32 {
            let s = series_delta(n, 20).unwrap();
            for m in 0..=n as usize {
                assert!(s.coeff(m).is_zero());
            }
            assert_eq!(s.coeff(n as usize + 1), rat(n as i64, n as i64 + 1));
        }
        let s = series_delta(1, 10).unwrap();
        assert_eq!(s.coeff(2), rat(1, 2));
        assert_eq!(s.coeff(3), rat(1, 6));
    }

    #[test]
    fn operator_examples() {
        let one = CertifiedSeries::constant(rat(1, 1), 2).unwrap();
        let m = one.mul_one_plus_tn(1);
        assert_eq!(m.coeffs(), vec![rat(1, 1), rat(1, 1), rat(0, 1)]);
        assert!(m.tail_bound().is_zero());
        let p = CertifiedSeries::from_coeffs(&[rat(1, 1), rat(1, 1)], rat(0, 1)).unwrap();
        assert_eq!(p.integrate().coeffs(), vec![rat(1, 1), rat(1, 2)]);
        assert_eq!(p.integrate().eval_at_one(), Enclosure::point(rat(3, 2)));
        let c = CertifiedSeries::constant(rat(1, 1), 5).unwrap();
        assert_eq!(c.integrate(), c);
    }

    #[test]
    fn tail_growth_is_bounded() {
        let s = series_en(2, 8).unwrap();
        let m = s.mul_one_plus_tn(2);
        let spilled: ExactRational = s.coeff(7) + s.coeff(8) * rational::int(2);
        assert!(m.tail_bound() >= &(s.tail_bound() * rational::int(3) + &spilled));
        assert!(m.tail_bound() <= &(s.tail_bound() * rational::int(3) + &spilled + rat(1, 1 << 40)));
    }

    #[test]
    fn fixed_point_identity() {
        for n in 1..=4u32 {
            let s = series_en(n, 60).unwrap();
            let t = s.mul_one_plus_tn(n).integrate();
            assert_eq!(t.coeffs(), s.coeffs());
        }
    }

    #[test]
    fn pipeline_examples() {
        let t = run_pipeline(&PipelinePlan::new(1, vec![2], Seed::One), 10).unwrap();
        assert_eq!(t, Enclosure::point(rat(5, 4)));
        let h = run_pipeline(&PipelinePlan::new(1, vec![], Seed::DeltaN).with_steps(1), 40).unwrap();
        let e = rigorous::exp_enclosure(&rat(1, 1));
        let want = &e - &Enclosure::point(rat(5, 2));
        assert!(h.intersects(&want) && h.width_f64() < 1e-30);
        let e1 = run_pipeline(&PipelinePlan::new(1, vec![], Seed::En), 40).unwrap();
        assert!(e1.contains_enclosure(&e.outward(200)) || e1.intersects(&e));
    }

    #[test]
    fn pipeline_matches_exact_values() {
        for n in 1..=3u32 {
            for c in crate::compositions::compositions_up_to(6, 1, 6) {
                let plan = PipelinePlan::new(n, c.prefix_sums(), Seed::One);
                let enc = run_pipeline(&plan, 30).unwrap();
                let exact = tn_exact(&DeformKey::new(n, c.clone())).unwrap();
                assert!(enc.contains(&exact), "{c} n={n}");
                assert!(enc.width_f64() < 1e-12);
            }
        }
    }

    #[test]
    fn jump_total_mass() {
        // A(1) is the total mass of all jumps; it matches summing jump integrals level by level.
        let a = series_jump_total(1, 60).unwrap().eval_at_one();
        assert!(a.width_f64() < 1e-6, "{}", a.width_f64());
        let mut levels = ExactRational::zero();
        for c in crate::compositions::compositions_up_to(10, 1, 10) {
            let plan = PipelinePlan::new(1, c.prefix_sums()[..c.len() - 1].to_vec(), Seed::DeltaN)
                .with_steps(c.weight());
            levels += run_pipeline(&plan, 30).unwrap().lo();
        }
        assert!(&levels < a.lo());
        assert!(to_f64(a.lo()) - to_f64(&levels) < 0.05);
    }

    #[test]
    fn geometric_integral_matches_finite_sums() {
        let d = series_delta(1, 20).unwrap();
        let g = d.integrate_geometric(2).unwrap();
        let mut acc = d.integrate_times(2);
        for k in 3..40 {
            acc = acc.add(&d.integrate_times(k)).truncate(20);
        }
        let ge = g.eval_at_one();
        let ae = acc.eval_at_one();
        assert!(ge.lo() >= ae.lo());
        assert!(to_f64(ge.lo()) - to_f64(ae.lo()) < 1e-9);
        assert!(d.integrate_geometric(0).is_err());
    }

    #[test]
    fn dump_round_trip() {
        let s = series_gn(2, 8).unwrap();
        let j = s.to_json();
        assert!(j.starts_with(r#"{"coeffs":["1/1","1/3""#));
        assert_eq!(CertifiedSeries::from_json(&j).unwrap(), s);
    }

    #[test]
    fn seed_memo_is_shared() {
        let a = seed_series(Seed::En, 2, 12).unwrap();
        let b = seed_series(Seed::En, 2, 12).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
    }

    #[test]
    fn affine_factor_pipeline_matches_subset_expansion() {
        // Compare against direct expansion over subsets for r-1 = 3 variables.
        let u = rat(1, 2);
        let m = 1u32;
        let plan = PipelinePlan::new(1, vec![1, 2, 3], Seed::Monomial(m))
            .with_factor(vec![rat(1, 1), u.clone()]);
        let got = run_pipeline(&plan, 10).unwrap();
        let want = crate::verify::subset_expansion_oracle(3, m, &u);
        assert_eq!(got, Enclosure::point(want));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn prop_operators_keep_nonnegativity(
            coeffs in prop::collection::vec(0i64..50, 4..10),
            n in 1u32..4,
            k in 1u32..4,
        ) {
            let c: Vec<ExactRational> = coeffs.iter().map(|&v| rat(v, 7)).collect();
            let s = CertifiedSeries::from_coeffs(&c, rat(1, 9)).unwrap();
            let t = s.mul_one_plus_tn(n).integrate_times(k);
            prop_assert!(t.coeffs().iter().all(|v| !v.is_negative()));
            prop_assert!(!t.tail_bound().is_negative());
        }

        #[test]
        fn prop_eval_encloses_exact_polynomial_product(
            coeffs in prop::collection::vec(0i64..20, 1..6),
            n in 1u32..4,
            num in 0i64..=8,
        ) {
            // s is an exact polynomial of degree < 6; at order 4 some mass spills into the tail.
            let c: Vec<ExactRational> = coeffs.iter().map(|&v| rat(v, 3)).collect();
            let full = CertifiedSeries::from_coeffs(&c, rat(0, 1)).unwrap();
            let u = rat(num, 8);
            let big = full.truncate(20);
            let padded = CertifiedSeries::from_coeffs(
                &(0..=20).map(|m| if m < c.len() { c[m].clone() } else { rat(0, 1) }).collect::<Vec<_>>(),
                rat(0, 1),
            ).unwrap();
            let exact = padded.mul_one_plus_tn(n).eval_at(&u).unwrap();
            prop_assert!(exact.width_f64() == 0.0);
            let small = big.truncate(4.min(big.order())).mul_one_plus_tn(n).eval_at(&u).unwrap();
            prop_assert!(small.contains(exact.lo()));
        }
    }
}
