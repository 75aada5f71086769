//! Index sequences, the dyadic map `tau`, the order `≻` and membership tests.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, pow2_neg, rat, ExactRational};

/// A finite sequence of positive integers with its cached weight.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Composition {
    parts: Vec<u32>,
    weight: u64,
}

impl Composition {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::ZeroPart);
        }
        let weight = parts.iter().map(|&p| p as u64).sum();
        Ok(Composition { parts, weight })
    }

    pub fn empty() -> Self {
        Composition::default()
    }

    /// `(c, c, ..., c)` with `len` entries.
    pub fn repeated(c: u32, len: usize) -> Result<Self> {
        Composition::new(vec![c; len])
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn weight(&self) -> u64 {
        self.weight
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Prefix sums `K_1 < K_2 < ... < K_r`.
    pub fn prefix_sums(&self) -> Vec<u64> {
        self.parts
            .iter()
            .scan(0u64, |acc, &p| {
                *acc += p as u64;
                Some(*acc)
            })
            .collect()
    }

    pub fn pushed(&self, part: u32) -> Result<Self> {
        let mut p = self.parts.clone();
        p.push(part);
        Composition::new(p)
    }

    pub fn concat(&self, other: &Composition) -> Composition {
        let mut p = self.parts.clone();
        p.extend_from_slice(&other.parts);
        Composition {
            parts: p,
            weight: self.weight + other.weight,
        }
    }

    pub fn truncated(&self, len: usize) -> Composition {
        Composition::new(self.parts[..len.min(self.len())].to_vec()).unwrap()
    }

    /// `sum_j 2^{-K_j}`: the dyadic point whose finite binary expansion has
    /// 1-bits exactly at the prefix sums.
    pub fn dyadic_value(&self) -> ExactRational {
        self.prefix_sums().into_iter().map(pow2_neg).sum()
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        f.write_str(&s.join(","))
    }
}

impl FromStr for Composition {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.is_empty() {
            return Ok(Composition::empty());
        }
        let parts = t
            .split(',')
            .map(|p| {
                p.trim().parse::<u32>().map_err(|_| Error::Parse {
                    what: "composition",
                    input: s.to_string(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Composition::new(parts)
    }
}

/// The constant tail of an eventually constant infinite sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tail {
    AllOnes,
    AllTwos,
}

impl Tail {
    pub fn value(self) -> u32 {
        match self {
            Tail::AllOnes => 1,
            Tail::AllTwos => 2,
        }
    }
}

impl FromStr for Tail {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "ones" | "1" | "+1*" => Ok(Tail::AllOnes),
            "twos" | "2" | "+2*" => Ok(Tail::AllTwos),
            _ => Err(Error::Parse {
                what: "tail",
                input: s.to_string(),
            }),
        }
    }
}

/// `prefix ++ (c, c, c, ...)` with `c` the tail value.
///
/// Stored canonically: trailing prefix parts equal to the tail value are
/// absorbed into the tail, so equal sequences compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TailSpec {
    prefix: Composition,
    tail: Tail,
}

impl TailSpec {
    pub fn new(prefix: Composition, tail: Tail) -> Self {
        let c = tail.value();
        let mut parts = prefix.parts;
        while parts.last() == Some(&c) {
            parts.pop();
        }
        TailSpec {
            prefix: Composition::new(parts).unwrap(),
            tail,
        }
    }

    pub fn all_ones() -> Self {
        TailSpec::new(Composition::empty(), Tail::AllOnes)
    }

    pub fn all_twos() -> Self {
        TailSpec::new(Composition::empty(), Tail::AllTwos)
    }

    pub fn prefix(&self) -> &Composition {
        &self.prefix
    }

    pub fn tail(&self) -> Tail {
        self.tail
    }

    /// Entry `i` (0-based) of the infinite sequence.
    pub fn entry(&self, i: usize) -> u32 {
        self.prefix
            .parts
            .get(i)
            .copied()
            .unwrap_or(self.tail.value())
    }

    /// First `len` entries of the infinite sequence.
    pub fn head(&self, len: usize) -> Composition {
        Composition::new((0..len).map(|i| self.entry(i)).collect()).unwrap()
    }

    /// Position (0-based) of the first entry where the sequences differ.
    pub fn first_difference(&self, other: &TailSpec) -> Option<usize> {
        let n = self.prefix.len().max(other.prefix.len()) + 1;
        (0..n).find(|&i| self.entry(i) != other.entry(i))
    }

    pub fn classify(&self) -> Membership {
        let in_t2 = self.tail == Tail::AllTwos && self.prefix.parts.iter().all(|&p| p >= 2);
        // Canonical AllOnes prefix is non-empty exactly when some entry is >= 2.
        let in_tr = self.tail == Tail::AllOnes && !self.prefix.is_empty();
        Membership {
            in_t: true,
            in_t2,
            in_tr,
        }
    }
}

impl fmt::Display for TailSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+{}*", self.prefix, self.tail.value())
    }
}

impl FromStr for TailSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let err = || Error::Parse {
            what: "tail spec",
            input: s.to_string(),
        };
        let t = s.trim();
        let idx = t.rfind('+').ok_or_else(err)?;
        let tail: Tail = t[idx..].parse().map_err(|_| err())?;
        let prefix: Composition = t[..idx].parse()?;
        Ok(TailSpec::new(prefix, tail))
    }
}

/// Membership flags for the distinguished subsets of sequences.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Membership {
    /// Every supported sequence is in the full set.
    pub in_t: bool,
    /// Every entry is at least 2.
    pub in_t2: bool,
    /// Eventually all ones with some entry at least 2.
    pub in_tr: bool,
}

pub fn classify(t: &TailSpec) -> Membership {
    t.classify()
}

/// Compares under `≻`, where a smaller entry at the first difference is larger.
pub fn lex_compare(k: &TailSpec, l: &TailSpec) -> Ordering {
    match k.first_difference(l) {
        None => Ordering::Equal,
        Some(i) => l.entry(i).cmp(&k.entry(i)),
    }
}

/// `tau(t) = sum_j 2^{-K_j}` over all prefix sums of the infinite sequence.
pub fn tau(t: &TailSpec) -> ExactRational {
    let sums = t.prefix.prefix_sums();
    let head: ExactRational = sums.iter().map(|&k| pow2_neg(k)).sum();
    let last = pow2_neg(t.prefix.weight());
    match t.tail {
        Tail::AllOnes => head + last,
        Tail::AllTwos => head + last / rational::int(3),
    }
}

fn check_unit(x: &ExactRational) -> Result<()> {
    if !x.is_positive() || x > &rational::int(1) {
        return Err(Error::OutOfUnitInterval(rational::to_text(x)));
    }
    Ok(())
}

/// Smallest `k >= 1` with `y * 2^k > 1`, for `y` in `(0, 1]`.
fn leading_part(y: &ExactRational) -> u32 {
    // y = a/b; need 2^k * a > b.
    let (a, b) = (y.numer(), y.denom());
    let mut k = (b.bits() as i64 - a.bits() as i64).max(0) as u32;
    if k == 0 {
        k = 1;
    }
    while (a << k as usize) <= *b {
        k += 1;
    }
    while k > 1 && (a << (k - 1) as usize) > *b {
        k -= 1;
    }
    k
}

/// First `depth` parts of the unique sequence with `tau = x`, reading the
/// binary expansion that has infinitely many 1-bits.
pub fn tau_inverse(x: &ExactRational, depth: usize) -> Result<Composition> {
    Ok(tau_expand(x, depth)?.0)
}

/// Like [`tau_inverse`], and additionally returns the exact [`TailSpec`] when
/// the remainder becomes a constant tail within `depth` parts.
pub fn tau_expand(x: &ExactRational, depth: usize) -> Result<(Composition, Option<TailSpec>)> {
    check_unit(x)?;
    if depth == 0 {
        return Err(Error::ZeroDepth);
    }
    let one = rational::int(1);
    let third = rat(1, 3);
    let mut y = x.clone();
    let mut parts = Vec::with_capacity(depth);
    let mut exact = None;
    loop {
        if exact.is_none() {
            if y == one {
                exact = Some(TailSpec::new(Composition::new(parts.clone())?, Tail::AllOnes));
            } else if y == third {
                exact = Some(TailSpec::new(Composition::new(parts.clone())?, Tail::AllTwos));
            }
        }
        if parts.len() == depth {
            break;
        }
        if let Some(t) = &exact {
            parts = t.head(depth).parts;
            break;
        }
        let k = leading_part(&y);
        parts.push(k);
        y = &y * ExactRational::from_integer(BigInt::one() << k as usize) - &one;
    }
    Ok((Composition::new(parts)?, exact))
}

/// Finite binary expansion of a dyadic `x` in `(0, 1)`: the composition
/// whose prefix sums are the 1-bit positions. `None` when `x` is not dyadic
/// or equals 1.
pub fn finite_expansion(x: &ExactRational) -> Option<Composition> {
    if !x.is_positive() || x >= &rational::int(1) {
        return None;
    }
    let d = x.denom();
    if !(d & (d - BigInt::one())).is_zero() {
        return None;
    }
    let l = d.bits() - 1;
    let num = x.numer();
    let mut parts = Vec::new();
    let mut last = 0u64;
    for bit in 1..=l {
        // bit position b counts from the binary point
        if num.bit(l - bit) {
            parts.push((bit - last) as u32);
            last = bit;
        }
    }
    Some(Composition::new(parts).unwrap())
}

/// A rational in `(0, 1]` with the exponent of its dyadic denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DyadicPoint {
    pub value: ExactRational,
    /// Least `l` with `2^l * value` an integer, if any.
    pub exponent: Option<u64>,
}

impl DyadicPoint {
    pub fn new(value: ExactRational) -> Result<Self> {
        check_unit(&value)?;
        let d = value.denom();
        let exponent = if (d & (d - BigInt::one())).is_zero() {
            Some(d.bits() - 1)
        } else {
            None
        };
        Ok(DyadicPoint { value, exponent })
    }

    pub fn from_tail_spec(t: &TailSpec) -> Self {
        DyadicPoint::new(tau(t)).expect("tau maps into (0, 1]")
    }

    pub fn is_dyadic(&self) -> bool {
        self.exponent.is_some()
    }
}

/// All compositions of weight exactly `w` with parts in `[min_part, max_part]`,
/// in lexicographic order of their parts.
pub fn compositions_of_weight(w: u64, min_part: u32, max_part: u32) -> Vec<Composition> {
    fn rec(rem: u64, lo: u32, hi: u32, cur: &mut Vec<u32>, out: &mut Vec<Composition>) {
        if rem == 0 {
            out.push(Composition::new(cur.clone()).unwrap());
            return;
        }
        for p in lo..=hi.min(rem as u32) {
            cur.push(p);
            rec(rem - p as u64, lo, hi, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if w == 0 {
        return out;
    }
    rec(w, min_part.max(1), max_part, &mut Vec::new(), &mut out);
    out
}

/// Compositions of weight `1..=w`, by weight then lexicographically.
pub fn compositions_up_to(w: u64, min_part: u32, max_part: u32) -> Vec<Composition> {
    (1..=w)
        .flat_map(|k| compositions_of_weight(k, min_part, max_part))
        .collect()
}

/// Exact `gcd`-free test that `x` has denominator dividing `3 * 2^k`.
pub fn denominator_divides_3_pow2(x: &ExactRational) -> bool {
    let mut d = x.denom().clone();
    let three = BigInt::from(3);
    if d.is_multiple_of(&three) {
        d /= &three;
    }
    (&d & (&d - BigInt::one())).is_zero()
}
