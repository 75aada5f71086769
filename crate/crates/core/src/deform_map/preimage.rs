use crate::enclosure::Enclosure;
use crate::error::{Error, Result};
use crate::rational::{self, ExactRational};
use crate::rigorous;

use super::{fn_enclosure, Budget};

/// Result of a preimage search.
#[derive(Clone, Debug)]
pub struct Preimage {
    /// `[a, b]` with `F_n(a) < y0` certified and `F_n(b) < y0` excluded.
    pub bracket: Enclosure,
    /// Bracket end whose `F_n` enclosure is closest to `y0`.
    pub x: ExactRational,
    pub fx: Enclosure,
}

/// Resolution `2^-SCAN_BITS` of the initial left-to-right scan.
const SCAN_BITS: u64 = 8;

/// Approximates `inf { x : F_n(x) > y0 }` for `1 < y0 < e^{1 + 1/2 + ... + 1/n}`.
///
/// A coarse dyadic scan advances from the left while the `F_n` enclosure is
/// certainly below `y0`; the first cell where it is not is then bisected with
/// the same rule. `F_n` only jumps downward, so the bracket closes onto a
/// point where `F_n = y0`. Crossings narrower than the scan cell can be missed.
pub fn fn_preimage(n: u32, y0: &ExactRational, tol: &ExactRational, budget: &Budget) -> Result<Preimage> {
    let top = rigorous::exp_harmonic(n);
    if y0 <= &rational::int(1) || y0 >= top.lo() {
        return Err(Error::TargetOutOfRange(rational::to_text(y0)));
    }
    if tol <= &rational::int(0) {
        return Err(Error::Precondition("tolerance must be positive".into()));
    }
    let f = |x: &ExactRational| fn_enclosure(n, x, budget);
    let below = |e: &Enclosure| e.hi() < y0;
    let step = rational::pow2_neg(SCAN_BITS);

    let mut b = step.clone();
    let mut fb = f(&b)?;
    let (mut a, mut fa);
    if below(&fb) {
        loop {
            let next = &b + &step;
            let fnext = f(&next)?;
            if !below(&fnext) {
                a = b;
                fa = fb;
                b = next;
                fb = fnext;
                break;
            }
            b = next;
            fb = fnext;
            // F_n(1) = e^{H_n} > y0, so the scan stops by x = 1.
        }
    } else {
        // Below the first cell: F_n(2^-j) decreases to 1 as j grows.
        let mut j = SCAN_BITS + 1;
        loop {
            let c = rational::pow2_neg(j);
            let fc = f(&c)?;
            if below(&fc) {
                a = c;
                fa = fc;
                break;
            }
            b = c;
            fb = fc;
            j += 1;
            if j > 4096 {
                return Err(Error::TargetOutOfRange(rational::to_text(y0)));
            }
        }
    }
    while &b - &a > *tol {
        let m = (&a + &b) / rational::int(2);
        let fm = f(&m)?;
        if below(&fm) {
            a = m;
            fa = fm;
        } else {
            b = m;
            fb = fm;
        }
    }
    let dist = |e: &Enclosure| rational::max(&(e.hi() - y0), &(y0 - e.lo()));
    let (x, fx) = if dist(&fa) <= dist(&fb) {
        (a.clone(), fa)
    } else {
        (b.clone(), fb)
    };
    Ok(Preimage {
        bracket: Enclosure::new(a, b),
        x,
        fx,
    })
}
