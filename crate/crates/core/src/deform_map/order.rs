use std::cmp::Ordering;

use rayon::prelude::*;

use crate::compositions::{compositions_up_to, lex_compare, Composition, Tail, TailSpec};
use crate::enclosure::Enclosure;
use crate::error::{Error, Result};
use crate::rational::{self, ExactRational};
use crate::rigorous;

use super::eta_tail;

/// `(c_1, c_2)` with `c_1 = min(7/4 - zeta(2), 1/3)` and `c_2 = n e^{2n}`.
pub fn bilipschitz_constants(n: u32) -> (Enclosure, Enclosure) {
    let z = rigorous::zeta2_enclosure();
    let a = &Enclosure::point(rational::rat(7, 4)) - &z;
    let third = rational::rat(1, 3);
    let c1 = Enclosure::new(
        rational::min(a.lo(), &third),
        rational::min(a.hi(), &third),
    );
    let c2 = rigorous::exp_enclosure(&rational::int(2 * n as i64)).scale(&rational::int(n as i64));
    (c1, c2)
}

/// Normalized difference of `eta_n` at an ordered pair of all-twos sequences.
#[derive(Clone, Debug)]
pub struct BilipschitzCheck {
    /// `(eta_n(k) - eta_n(l)) * 2^{k_1 + ... + k_{r0}}`
    pub ratio: Enclosure,
    pub c1: Enclosure,
    pub c2: Enclosure,
    /// 1-based position of the first difference.
    pub r0: usize,
}

impl BilipschitzCheck {
    /// True when the ratio provably lies in `[c_1, c_2]`.
    pub fn holds(&self) -> bool {
        self.ratio.lo() >= self.c1.hi() && self.ratio.hi() <= self.c2.lo()
    }
}

/// Requires `k, l` in the all-entries-at-least-2 set with `k ≻ l`.
pub fn bilipschitz_ratio(n: u32, k: &TailSpec, l: &TailSpec, order: usize) -> Result<BilipschitzCheck> {
    if !k.classify().in_t2 || !l.classify().in_t2 {
        return Err(Error::Precondition("both sequences must have every entry >= 2".into()));
    }
    if lex_compare(k, l) != Ordering::Greater {
        return Err(Error::Precondition("the first sequence must precede the second".into()));
    }
    let r0 = k.first_difference(l).expect("distinct sequences") + 1;
    let weight: u64 = (0..r0).map(|i| k.entry(i) as u64).sum();
    let diff = &eta_tail(n, k, order)? - &eta_tail(n, l, order)?;
    let ratio = diff.scale(&ExactRational::from_integer(rational::pow2(weight)));
    let (c1, c2) = bilipschitz_constants(n);
    Ok(BilipschitzCheck { ratio, c1, c2, r0 })
}

/// Which pairs [`order_witness_search`] explores.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchDomain {
    /// Pairs not both inside the all-entries-at-least-2 set.
    Complement,
    /// Pairs inside the all-entries-at-least-2 set.
    WithinT2,
}

/// A certified order reversal: `k ≻ l` but `eta_n(k) < eta_n(l)`.
#[derive(Clone, Debug)]
pub struct Witness {
    pub k: TailSpec,
    pub l: TailSpec,
    pub eta_k: Enclosure,
    pub eta_l: Enclosure,
}

/// Eventually constant sequences with prefix weight `<= max_weight`, in a fixed order.
pub(crate) fn candidates(max_weight: u64, domain: SearchDomain) -> Vec<TailSpec> {
    let mut out = Vec::new();
    let mut seen = std::collections::HashSet::new();
    let mut push = |t: TailSpec| {
        if seen.insert(t.clone()) {
            out.push(t);
        }
    };
    let min_part = match domain {
        SearchDomain::WithinT2 => 2,
        SearchDomain::Complement => 1,
    };
    let mut prefixes = vec![Composition::empty()];
    prefixes.extend(compositions_up_to(max_weight, min_part, u32::MAX));
    for p in prefixes {
        if domain == SearchDomain::Complement {
            push(TailSpec::new(p.clone(), Tail::AllOnes));
        }
        push(TailSpec::new(p, Tail::AllTwos));
    }
    out
}

/// Searches pairs `k ≻ l` (prefix weight `<= max_weight`) for a certified
/// reversal `eta_n(k) < eta_n(l)`; the first in enumeration order is returned.
pub fn order_witness_search(
    n: u32,
    max_weight: u64,
    domain: SearchDomain,
    order: usize,
) -> Result<Option<Witness>> {
    let specs = candidates(max_weight, domain);
    let values: Vec<Enclosure> = specs
        .par_iter()
        .map(|t| eta_tail(n, t, order))
        .collect::<Result<_>>()?;
    for (i, k) in specs.iter().enumerate() {
        for (j, l) in specs.iter().enumerate() {
            if lex_compare(k, l) != Ordering::Greater {
                continue;
            }
            if domain == SearchDomain::Complement && k.classify().in_t2 && l.classify().in_t2 {
                continue;
            }
            if values[i].strictly_below(&values[j]) {
                return Ok(Some(Witness {
                    k: k.clone(),
                    l: l.clone(),
                    eta_k: values[i].clone(),
                    eta_l: values[j].clone(),
                }));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ts(s: &str) -> TailSpec {
        s.parse().unwrap()
    }

    #[test]
    fn constants() {
        let (c1, c2) = bilipschitz_constants(1);
        assert!((c1.mid_f64() - 0.105_066).abs() < 1e-6);
        assert!((c2.mid_f64() - 1f64.exp().powi(2)).abs() < 1e-12);
    }

    #[test]
    fn ratio_examples() {
        for (k, l) in [("2+2*", "3+2*"), ("2,2+2*", "2,3+2*"), ("+2*", "2,2,4+2*")] {
            let c = bilipschitz_ratio(1, &ts(k), &ts(l), 60).unwrap();
            assert!(c.holds(), "{k} {l}: {}", c.ratio.mid_f64());
        }
        assert!(bilipschitz_ratio(1, &ts("3+2*"), &ts("2+2*"), 60).is_err());
        assert!(bilipschitz_ratio(1, &ts("1+2*"), &ts("3+2*"), 60).is_err());
    }

    #[test]
    fn no_reversal_inside_t2() {
        for n in 1..=2 {
            assert!(order_witness_search(n, 6, SearchDomain::WithinT2, 40)
                .unwrap()
                .is_none());
        }
    }

    #[test]
    fn reversal_found_outside_t2() {
        let w = order_witness_search(1, 6, SearchDomain::Complement, 40)
            .unwrap()
            .expect("a reversal exists near a jump");
        assert_eq!(lex_compare(&w.k, &w.l), Ordering::Greater);
        assert!(w.eta_k.strictly_below(&w.eta_l));
        assert!(!(w.k.classify().in_t2 && w.l.classify().in_t2));
    }
}
