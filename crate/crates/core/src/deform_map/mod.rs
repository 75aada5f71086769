//! The maps `eta_n` and `F_n`, the jump function `h_n`, the decomposition
//! `F_n = G_n - H_n`, preimages, and order checks.

mod eta;
mod jump;
mod order;
mod preimage;

use serde::{Deserialize, Serialize};

pub use eta::{eta_tail, fn_enclosure, fn_gap_bound};
pub use jump::{
    continuous_part, detect_jump, hn_value, jump_mass_by_weight, jump_part, jump_part_enumerated,
    enumeration_tail, right_limit, sites_up_to, JumpDetection, JumpSite,
};
pub use order::{
    bilipschitz_constants, bilipschitz_ratio, order_witness_search, BilipschitzCheck, SearchDomain,
    Witness,
};
pub use preimage::{fn_preimage, Preimage};
pub(crate) use order::candidates;

use crate::enclosure::Enclosure;
use crate::error::{Error, Result};
use crate::rational::{self, ExactRational};
use crate::series::DEFAULT_ORDER;

/// Truncation budgets shared by the map evaluations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    /// Number of sequence entries read from a point's expansion.
    pub depth: usize,
    /// Largest site weight summed by the enumerated jump part.
    pub weight_cutoff: u64,
    /// Series truncation order.
    pub order: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            depth: 24,
            weight_cutoff: 14,
            order: DEFAULT_ORDER,
        }
    }
}

/// Which function a curve samples.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CurveKind {
    F,
    H,
    G,
}

impl std::str::FromStr for CurveKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fn" | "f" => Ok(CurveKind::F),
            "hn" | "h" => Ok(CurveKind::H),
            "gn" | "g" => Ok(CurveKind::G),
            _ => Err(Error::Parse {
                what: "curve function",
                input: s.to_string(),
            }),
        }
    }
}

pub(crate) fn check_point(x: &ExactRational) -> Result<()> {
    if x <= &rational::int(0) || x > &rational::int(1) {
        return Err(Error::OutOfUnitInterval(rational::to_text(x)));
    }
    Ok(())
}

/// Evaluates one curve on sorted points (in parallel, output in input order).
pub fn curve(
    kind: CurveKind,
    n: u32,
    xs: &[ExactRational],
    budget: &Budget,
) -> Result<Vec<(ExactRational, Enclosure)>> {
    use rayon::prelude::*;
    let mut sorted = xs.to_vec();
    sorted.sort();
    sorted.dedup();
    sorted
        .par_iter()
        .map(|x| {
            let v = match kind {
                CurveKind::F => fn_enclosure(n, x, budget)?,
                CurveKind::H => jump_part(n, x, budget)?,
                CurveKind::G => continuous_part(n, x, budget)?,
            };
            Ok((x.clone(), v))
        })
        .collect()
}

/// CSV with header `x,lo,hi`; `x` as `num/den`, bounds as outward-rounded decimals.
pub fn curve_csv(rows: &[(ExactRational, Enclosure)]) -> String {
    let mut out = String::from("x,lo,hi\n");
    for (x, e) in rows {
        out.push_str(&format!(
            "{},{},{}\n",
            rational::to_text(x),
            rational::to_decimal(e.lo(), 12, false),
            rational::to_decimal(e.hi(), 12, true)
        ));
    }
    out
}

/// `count` evenly spaced dyadic points `j / 2^bits` in `(0, 1]`, `bits` the
/// least exponent with `2^bits >= count`.
pub fn dyadic_grid(count: usize) -> Vec<ExactRational> {
    let bits = (count.max(1) as f64).log2().ceil() as u32;
    let den = 1i64 << bits;
    (1..=count as i64)
        .map(|j| rational::rat(j * den / count as i64, den))
        .filter(|x| x > &rational::int(0))
        .collect()
}
