use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::Zero;
use rayon::prelude::*;

use crate::compositions::{finite_expansion, tau_inverse, Composition};
use crate::enclosure::Enclosure;
use crate::error::{check_level, Error, Result};
use crate::rational::{self, ExactRational};
use crate::rigorous;
use crate::series::{
    run_pipeline, series_delta, series_jump_total, CertifiedSeries, PipelinePlan, Seed,
};

use super::{check_point, fn_enclosure, Budget};

/// A discontinuity point of `F_n`: the dyadic `sum_j 2^{-K_j}` of a composition.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct JumpSite {
    pub composition: Composition,
    pub point: ExactRational,
    pub weight: u64,
}

impl JumpSite {
    pub fn new(composition: Composition) -> Result<Self> {
        if composition.is_empty() {
            return Err(Error::EmptyComposition);
        }
        Ok(JumpSite {
            point: composition.dyadic_value(),
            weight: composition.weight(),
            composition,
        })
    }

    /// The site located at a dyadic `y` in `(0, 1)`.
    pub fn at(y: &ExactRational) -> Result<Self> {
        let c = finite_expansion(y).ok_or_else(|| {
            Error::Precondition(format!("{} is not a dyadic point of (0, 1)", rational::to_text(y)))
        })?;
        JumpSite::new(c)
    }
}

/// `h_n` at a site: factors at `K_1..K_{r-1}`, `K_r` integrations, seed `Delta_n`.
pub fn hn_value(n: u32, site: &JumpSite, order: usize) -> Result<Enclosure> {
    let sums = site.composition.prefix_sums();
    let plan = PipelinePlan::new(n, sums[..sums.len() - 1].to_vec(), Seed::DeltaN)
        .with_steps(site.weight);
    run_pipeline(&plan, order)
}

/// All sites of weight `1..=w`, by weight then lexicographically.
pub fn sites_up_to(w: u64) -> Vec<JumpSite> {
    crate::compositions::compositions_up_to(w, 1, u32::MAX)
        .into_iter()
        .map(|c| JumpSite::new(c).unwrap())
        .collect()
}

type SiteTable = Arc<Vec<(JumpSite, Enclosure)>>;

fn site_memo() -> &'static Mutex<HashMap<(u32, u64, usize), SiteTable>> {
    static MEMO: OnceLock<Mutex<HashMap<(u32, u64, usize), SiteTable>>> = OnceLock::new();
    MEMO.get_or_init(|| Mutex::new(HashMap::new()))
}

/// `h_n` at every site of weight `<= w`, sharing work between compositions
/// with a common suffix. Sorted by weight then lexicographically.
fn site_table(n: u32, w: u64, order: usize) -> Result<SiteTable> {
    check_level(n)?;
    if let Some(t) = site_memo().lock().unwrap().get(&(n, w, order)) {
        return Ok(Arc::clone(t));
    }
    let delta = series_delta(n, order)?;
    let mut rows: Vec<(JumpSite, Enclosure)> = (1..=w)
        .into_par_iter()
        .flat_map_iter(|last| {
            let mut out = Vec::new();
            let s = delta.integrate_times(last as u32);
            extend_sites(n, w, vec![last as u32], s, &mut out);
            out
        })
        .collect();
    rows.sort_by(|a, b| {
        (a.0.weight, a.0.composition.parts()).cmp(&(b.0.weight, b.0.composition.parts()))
    });
    let table = Arc::new(rows);
    site_memo()
        .lock()
        .unwrap()
        .insert((n, w, order), Arc::clone(&table));
    Ok(table)
}

/// `suffix` holds parts in reverse (innermost first); `s` is its integrand series.
fn extend_sites(
    n: u32,
    w: u64,
    suffix: Vec<u32>,
    s: CertifiedSeries,
    out: &mut Vec<(JumpSite, Enclosure)>,
) {
    let parts: Vec<u32> = suffix.iter().rev().copied().collect();
    let site = JumpSite::new(Composition::new(parts).unwrap()).unwrap();
    let weight = site.weight;
    out.push((site, s.eval_at_one()));
    if weight >= w {
        return;
    }
    let lifted = s.mul_one_plus_tn(n);
    for k in 1..=(w - weight) as u32 {
        let mut next = suffix.clone();
        next.push(k);
        extend_sites(n, w, next, lifted.integrate_times(k), out);
    }
}

/// Closed-form bound on the total jump mass of sites heavier than `w`:
/// `sum_{K > w} 2^{K-1} * 2n e^{(n+2)n} / (n+2)^K = e^{(n+2)n} (n+2) (2/(n+2))^{w+1}`.
pub fn enumeration_tail(n: u32, w: u64) -> ExactRational {
    let n = n as i64;
    let e = rigorous::exp_enclosure(&rational::int((n + 2) * n)).hi().clone();
    e * rational::int(n + 2) * num_traits::pow(rational::rat(2, n + 2), w as usize + 1)
}

/// Level sums `sum_{|k| = K} h_n(k)` for `K = 1..=w`.
pub fn jump_mass_by_weight(n: u32, w: u64, order: usize) -> Result<Vec<Enclosure>> {
    let table = site_table(n, w, order)?;
    let mut out = vec![Enclosure::point(ExactRational::zero()); w as usize];
    for (site, v) in table.iter() {
        let i = site.weight as usize - 1;
        out[i] = &out[i] + v;
    }
    Ok(out)
}

/// `H_n(x)` as the sum of `h_n` over sites of weight `<= budget.weight_cutoff`
/// strictly below `x`, plus the closed-form bound for heavier sites.
pub fn jump_part_enumerated(n: u32, x: &ExactRational, budget: &Budget) -> Result<Enclosure> {
    check_point(x)?;
    let table = site_table(n, budget.weight_cutoff, budget.order)?;
    let mut acc = Enclosure::point(ExactRational::zero());
    for (site, v) in table.iter() {
        if &site.point < x {
            acc = &acc + v;
        }
    }
    Ok(acc.widen_up(&enumeration_tail(n, budget.weight_cutoff)))
}

/// `B = Delta_n + (1 + t_n) A`: the integrand summed over every way to end or
/// continue a site after a completed block.
fn continuation_series(n: u32, order: usize) -> Result<Arc<CertifiedSeries>> {
    static MEMO: OnceLock<Mutex<HashMap<(u32, usize), Arc<CertifiedSeries>>>> = OnceLock::new();
    let memo = MEMO.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(b) = memo.lock().unwrap().get(&(n, order)) {
        return Ok(Arc::clone(b));
    }
    let a = series_jump_total(n, order)?;
    let b = Arc::new(series_delta(n, order)?.add(&a.mul_one_plus_tn(n)));
    memo.lock().unwrap().insert((n, order), Arc::clone(&b));
    Ok(b)
}

/// Sum over the sites below the dyadic point with expansion `parts`, with
/// `last` as the integrand of an extra level after the final part (or none).
fn cylinder_fold(
    n: u32,
    parts: &[u32],
    last: Option<CertifiedSeries>,
    order: usize,
) -> Result<Enclosure> {
    let b = continuation_series(n, order)?;
    let delta = series_delta(n, order)?;
    // Level j collects sites that agree with the expansion before position j
    // and have a larger part at j, plus (for j >= 1) the site ending right there.
    let sigma = |j: usize| -> Result<CertifiedSeries> {
        let psi = b.integrate_geometric(parts[j] + 1)?;
        Ok(if j == 0 {
            psi
        } else {
            delta.add(&psi.mul_one_plus_tn(n))
        })
    };
    let mut acc = last;
    for j in (0..parts.len()).rev() {
        let here = sigma(j)?;
        acc = Some(match acc {
            None => here,
            Some(inner) => {
                let mut t = inner.integrate_times(parts[j]);
                if j >= 1 {
                    t = t.mul_one_plus_tn(n);
                }
                here.add(&t)
            }
        });
    }
    Ok(acc.expect("at least one level").eval_at_one())
}

/// `H_n(x) = sum of h_n(y)` over sites `y < x`, by summing whole cylinders of
/// sites in closed form.
pub fn jump_part(n: u32, x: &ExactRational, budget: &Budget) -> Result<Enclosure> {
    check_point(x)?;
    let order = budget.order;
    if x == &rational::int(1) {
        return Ok(series_jump_total(n, order)?.eval_at_one());
    }
    if let Some(c) = finite_expansion(x) {
        return cylinder_fold(n, c.parts(), None, order);
    }
    let c = tau_inverse(x, budget.depth)?;
    let delta = series_delta(n, order)?;
    let b = continuation_series(n, order)?;
    let everything = delta.add(&b.integrate_geometric(1)?.mul_one_plus_tn(n));
    let lo = cylinder_fold(n, c.parts(), Some(delta), order)?;
    let hi = cylinder_fold(n, c.parts(), Some(everything), order)?;
    Ok(Enclosure::new(lo.lo().clone(), hi.hi().clone()))
}

/// `H_n(x+) = H_n(x) + h_n(x)` at a site, `H_n(x)` elsewhere.
pub fn right_limit(n: u32, x: &ExactRational, budget: &Budget) -> Result<Enclosure> {
    let h = jump_part(n, x, budget)?;
    match finite_expansion(x) {
        Some(c) => Ok(&h + &hn_value(n, &JumpSite::new(c)?, budget.order)?),
        None => Ok(h),
    }
}

/// `G_n(x) = F_n(x) + H_n(x)`.
pub fn continuous_part(n: u32, x: &ExactRational, budget: &Budget) -> Result<Enclosure> {
    Ok(&fn_enclosure(n, x, budget)? + &jump_part(n, x, budget)?)
}

/// Observed jump of `H_n` across a site, probed from the right.
#[derive(Clone, Debug)]
pub struct JumpDetection {
    pub site: JumpSite,
    pub left: Enclosure,
    pub right: Enclosure,
    /// `H_n(y + 2^-probe) - H_n(y)`
    pub difference: Enclosure,
    pub h: Enclosure,
    /// Upper bound on `|difference - h_n(y)|`.
    pub excess: ExactRational,
}

/// Compares `H_n(y + 2^{-probe_bits}) - H_n(y)` against `h_n(y)` at a dyadic site `y`.
pub fn detect_jump(n: u32, y: &ExactRational, probe_bits: u64, budget: &Budget) -> Result<JumpDetection> {
    let site = JumpSite::at(y)?;
    let right_x = y + rational::pow2_neg(probe_bits);
    check_point(&right_x)?;
    let left = jump_part(n, y, budget)?;
    let right = jump_part(n, &right_x, budget)?;
    let difference = &right - &left;
    let h = hn_value(n, &site, budget.order)?;
    let excess = rational::max(&(difference.hi() - h.lo()), &(h.hi() - difference.lo()));
    Ok(JumpDetection {
        site,
        left,
        right,
        difference,
        h,
        excess,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, to_f64};

    fn site(s: &str) -> JumpSite {
        JumpSite::new(s.parse().unwrap()).unwrap()
    }

    #[test]
    fn site_points() {
        assert_eq!(site("1").point, rat(1, 2));
        assert_eq!(site("2").point, rat(1, 4));
        assert_eq!(site("1,2").point, rat(5, 8));
        assert_eq!(JumpSite::at(&rat(5, 8)).unwrap(), site("1,2"));
        assert!(JumpSite::at(&rat(1, 3)).is_err());
        // The site of (k_1..k_r) is tau of (k_1..k_{r-1}, k_r + 1, 1, 1, ...).
        let t: crate::TailSpec = "1,3+1*".parse().unwrap();
        assert_eq!(crate::tau(&t), site("1,2").point);
    }

    #[test]
    fn hn_examples() {
        let h = hn_value(1, &site("1"), 60).unwrap();
        let want = &rigorous::exp_enclosure(&rat(1, 1)) - &Enclosure::point(rat(5, 2));
        assert!(h.intersects(&want));
        // h_1(1/4) = sum_{m >= 2} 1 / (m! (m+1)^2)
        let mut s = ExactRational::zero();
        let mut f = rat(1, 1);
        for m in 2..40i64 {
            f = if m == 2 { rat(1, 2) } else { f / rational::int(m) };
            s += &f / rational::int((m + 1) * (m + 1));
        }
        let h2 = hn_value(1, &site("2"), 60).unwrap();
        assert!(to_f64(&(h2.lo() - &s)).abs() < 1e-30 && h2.width_f64() < 1e-30);
        assert!((h2.mid_f64() - 0.067_902_6).abs() < 1e-6);
    }

    #[test]
    fn hn_sandwich() {
        for n in 1..=3u32 {
            let (ni, d) = (n as i64, n as i64 + 2);
            let upper_c = rigorous::exp_enclosure(&rational::int((n as i64 + 2) * n as i64)).hi()
                * rational::int(2 * ni);
            for s in sites_up_to(6) {
                let h = hn_value(n, &s, 40).unwrap();
                let scale = num_traits::pow(rational::int(d), s.weight as usize);
                assert!(h.lo() > &(rat(ni, ni + 1) / &scale));
                assert!(h.hi() < &(&upper_c / &scale));
            }
        }
    }

    #[test]
    fn site_table_matches_direct_pipeline() {
        let table = site_table(2, 6, 30).unwrap();
        assert_eq!(table.len(), 63);
        for (s, v) in table.iter().step_by(7) {
            assert_eq!(v, &hn_value(2, s, 30).unwrap());
        }
    }

    #[test]
    fn cylinder_sum_agrees_with_enumeration() {
        let b = Budget {
            weight_cutoff: 10,
            order: 40,
            ..Budget::default()
        };
        let levels = jump_mass_by_weight(1, 10, 40).unwrap();
        let below: ExactRational = levels.iter().map(|e| e.lo().clone()).sum();
        let total = series_jump_total(1, 40).unwrap().eval_at_one();
        let heavy = total.hi() - &below;
        for x in [rat(1, 2), rat(3, 4), rat(5, 8), rat(1, 4), rat(13, 16), rat(1, 3), rat(7, 10)] {
            let cyl = jump_part(1, &x, &b).unwrap();
            let en = jump_part_enumerated(1, &x, &b).unwrap();
            assert!(cyl.hi() >= en.lo(), "{x}");
            assert!(&(cyl.lo() - en.lo()) <= &heavy, "{x}");
            assert!(en.contains_enclosure(&Enclosure::new(en.lo().clone(), cyl.hi().clone())) || cyl.hi() <= en.hi());
        }
    }

    #[test]
    fn total_mass_is_h_at_one() {
        let b = Budget { order: 40, ..Budget::default() };
        let h1 = jump_part(1, &rat(1, 1), &b).unwrap();
        let hb = jump_part(1, &(rat(1, 1) - rational::pow2_neg(30)), &b).unwrap();
        assert!(hb.lo() <= h1.hi());
        assert!(to_f64(&(h1.lo() - hb.hi())) < 1e-6);
    }

    #[test]
    fn jump_part_increases_on_grid() {
        let b = Budget { order: 40, ..Budget::default() };
        let mut prev = Enclosure::point(ExactRational::zero());
        for j in 1..=32i64 {
            let h = jump_part(1, &rat(j, 32), &b).unwrap();
            assert!(prev.strictly_below(&h), "j={j}");
            prev = h;
        }
    }

    #[test]
    fn jump_detected_at_one_half() {
        let d = detect_jump(1, &rat(1, 2), 20, &Budget::default()).unwrap();
        assert!(to_f64(&d.excess) < 1e-5, "{}", to_f64(&d.excess));
        let r = right_limit(1, &rat(1, 2), &Budget::default()).unwrap();
        assert!(r.contains_enclosure(&(&d.left + &d.h)));
    }

    #[test]
    fn enumeration_tail_closed_form() {
        // e^3 * 3 * (2/3)^15 for n = 1, W = 14
        let t = to_f64(&enumeration_tail(1, 14));
        assert!((t - 3f64.exp() * 3.0 * (2.0f64 / 3.0).powi(15)).abs() < 1e-9);
    }

    #[test]
    fn mass_partial_sums_below_bound() {
        let levels = jump_mass_by_weight(1, 9, 30).unwrap();
        let total: ExactRational = levels.iter().map(|e| e.hi().clone()).sum();
        assert!(to_f64(&total) < 2.0 * 3f64.exp());
        for w in 1..levels.len() {
            assert!(levels[w].strictly_below(&levels[w - 1]));
        }
    }
}
