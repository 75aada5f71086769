use crate::compositions::{tau_expand, Tail, TailSpec};
use crate::deform::{tn_exact, DeformKey};
use crate::enclosure::Enclosure;
use crate::error::Result;
use crate::rational::{self, ExactRational};
use crate::rigorous;
use crate::series::{run_pipeline, seed_series, PipelinePlan, Seed};

use super::{check_point, Budget};

/// Enclosure of `eta_n` at an eventually constant sequence.
///
/// The integrand has a factor at every prefix sum of the (canonical) prefix and
/// the tail function `e_n` or `g_n` of the full product at the last one.
pub fn eta_tail(n: u32, t: &TailSpec, order: usize) -> Result<Enclosure> {
    let seed = match t.tail() {
        Tail::AllOnes => Seed::En,
        Tail::AllTwos => Seed::Gn,
    };
    if t.prefix().is_empty() {
        return Ok(seed_series(seed, n, order.max(n as usize + 1))?.eval_at_one());
    }
    let plan = PipelinePlan::new(n, t.prefix().prefix_sums(), seed);
    run_pipeline(&plan, order)
}

/// Enclosure of `F_n(x)` from the first `budget.depth` entries of the
/// sequence of `x`: below by `T_n(prefix)`, above by `eta_n(prefix, 1, 1, ...)`.
/// When the expansion is detected to end in a constant tail within the depth
/// the (tighter) exact `eta_n` enclosure is returned instead.
pub fn fn_enclosure(n: u32, x: &ExactRational, budget: &Budget) -> Result<Enclosure> {
    check_point(x)?;
    let (prefix, exact) = tau_expand(x, budget.depth)?;
    if let Some(t) = exact {
        // The exact tail value lies inside the prefix bracket; no need to form it.
        return eta_tail(n, &t, budget.order);
    }
    let hi = eta_tail(n, &TailSpec::new(prefix.clone(), Tail::AllOnes), budget.order)?;
    let lo = tn_exact(&DeformKey::new(n, prefix))?;
    Ok(Enclosure::new(lo, hi.hi().clone()))
}

/// Certified upper bound on the width of the bracket in [`fn_enclosure`] for a
/// prefix of weight `weight`: `(e^{1 + log n} - 1) e^{2n} / 2^weight`.
pub fn fn_gap_bound(n: u32, weight: u64) -> ExactRational {
    let one_plus_log = &rational::int(1) + rigorous::ln_enclosure(&rational::int(n as i64)).hi();
    let a = rigorous::exp_enclosure(&one_plus_log).hi() - rational::int(1);
    let b = rigorous::exp_enclosure(&rational::int(2 * n as i64)).hi().clone();
    a * b * rational::pow2_neg(weight)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compositions::tau;
    use crate::rational::rat;

    fn ts(s: &str) -> TailSpec {
        s.parse().unwrap()
    }

    #[test]
    fn eta_examples() {
        let e = rigorous::exp_enclosure(&rat(1, 1));
        let v = eta_tail(1, &ts("+1*"), 60).unwrap();
        assert!(v.intersects(&e) && v.width_f64() < 1e-40);
        let g = eta_tail(1, &ts("+2*"), 60).unwrap();
        assert!((g.mid_f64() - 1.377_896_895_4).abs() < 1e-9);
        let e32 = rigorous::exp_enclosure(&rat(3, 2));
        let v = eta_tail(2, &ts("+1*"), 60).unwrap();
        assert!(v.intersects(&e32));
        assert!((v.mid_f64() - 4.481_689_07).abs() < 1e-7);
    }

    #[test]
    fn canonical_forms_agree() {
        // (1, 1, 1, ...) written with a longer prefix gives the same value.
        let a = eta_tail(1, &ts("+1*"), 60).unwrap();
        let plan = PipelinePlan::new(1, vec![1, 2, 3], Seed::En);
        let b = run_pipeline(&plan, 60).unwrap();
        assert!(a.intersects(&b));
        let a = eta_tail(2, &ts("+2*"), 60).unwrap();
        let plan = PipelinePlan::new(2, vec![2, 4], Seed::Gn);
        assert!(a.intersects(&run_pipeline(&plan, 60).unwrap()));
    }

    #[test]
    fn fn_examples() {
        let b = Budget::default();
        let e = rigorous::exp_enclosure(&rat(1, 1));
        assert!(fn_enclosure(1, &rat(1, 1), &b).unwrap().intersects(&e));
        let third = fn_enclosure(1, &rat(1, 3), &Budget { depth: 8, ..b }).unwrap();
        assert!(third.intersects(&eta_tail(1, &ts("+2*"), 60).unwrap()));
        let half = fn_enclosure(1, &rat(1, 2), &Budget { depth: 4, ..b }).unwrap();
        let want = run_pipeline(&PipelinePlan::new(1, vec![2], Seed::En), 60).unwrap();
        assert!(half.intersects(&want));
        assert!(fn_enclosure(1, &rat(0, 1), &b).is_err());
        assert!(fn_enclosure(1, &rat(5, 4), &b).is_err());
    }

    #[test]
    fn bracket_width_within_gap_bound() {
        let b = Budget { depth: 10, ..Budget::default() };
        for x in [rat(2, 5), rat(5, 7), rat(1, 10)] {
            let (prefix, exact) = tau_expand(&x, b.depth).unwrap();
            assert!(exact.is_none());
            let f = fn_enclosure(1, &x, &b).unwrap();
            assert!(f.width() <= fn_gap_bound(1, prefix.weight()));
        }
    }

    #[test]
    fn consistency_with_eta_on_tail_specs() {
        let b = Budget::default();
        for s in ["2+1*", "3,1+2*", "2,2+2*", "1,2+1*", "+2*", "4+2*"] {
            let t = ts(s);
            let f = fn_enclosure(1, &tau(&t), &b).unwrap();
            assert!(f.intersects(&eta_tail(1, &t, 60).unwrap()), "{s}");
        }
    }

    #[test]
    fn strict_range_below_limit() {
        for n in 1..=3u32 {
            let top = rigorous::exp_harmonic(n);
            for s in ["2+1*", "1,2+1*", "+2*", "3+2*", "1,1,1,2+1*"] {
                let v = eta_tail(n, &ts(s), 60).unwrap();
                assert!(v.strictly_below(&top), "{s} n={n}");
            }
        }
    }
}
