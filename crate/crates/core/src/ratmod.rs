//! Exact integer and rational primitives, and the gap operator on periodic
//! integer sets.
//!
//! A periodically extended set `{v + M·n | v ∈ values, n ∈ ℤ}` is stored as a
//! [`ResidueSet`] holding one period. The gap around zero of such a set is what
//! every closed-form gap function finally reduces to.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_integer::{Integer, Roots};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A non-negative reduced fraction `p/q`.
///
/// Gap queries only use values in `[0, 1]`; callers that need the unit interval
/// check it with [`Rational::is_unit`]. Closed-form results reuse the type for
/// values above one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rational {
    p: u64,
    q: u64,
}

impl Rational {
    pub const ZERO: Rational = Rational { p: 0, q: 1 };
    pub const ONE: Rational = Rational { p: 1, q: 1 };

    pub fn new(p: u64, q: u64) -> Result<Self> {
        reduce_fraction(p, q)
    }

    pub fn integer(n: u64) -> Self {
        Rational { p: n, q: 1 }
    }

    #[inline]
    pub fn numer(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn denom(&self) -> u64 {
        self.q
    }

    /// True for `0 ≤ p/q ≤ 1`.
    pub fn is_unit(&self) -> bool {
        self.p <= self.q
    }

    /// True for the integer congruence class, `0/1` and `1/1`.
    pub fn is_integer_class(&self) -> bool {
        self.q == 1 && self.p <= 1
    }

    pub fn to_f64(&self) -> f64 {
        self.p as f64 / self.q as f64
    }

    /// `self / other`, reduced. Fails when `other` is zero.
    pub fn checked_div(&self, other: Rational) -> Result<Rational> {
        let num = self.p as u128 * other.q as u128;
        let den = self.q as u128 * other.p as u128;
        reduce_wide(num, den)
    }

    pub fn checked_mul(&self, other: Rational) -> Result<Rational> {
        let num = self.p as u128 * other.p as u128;
        let den = self.q as u128 * other.q as u128;
        reduce_wide(num, den)
    }
}

fn reduce_wide(num: u128, den: u128) -> Result<Rational> {
    if den == 0 {
        return Err(Error::domain("zero denominator"));
    }
    let g = num.gcd(&den);
    let (p, q) = (num / g, den / g);
    match (u64::try_from(p), u64::try_from(q)) {
        (Ok(p), Ok(q)) => Ok(Rational { p, q }),
        _ => Err(Error::guard(format!("{p}/{q} does not fit in 64-bit terms"))),
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.p as u128 * other.q as u128).cmp(&(other.p as u128 * self.q as u128))
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q == 1 {
            write!(f, "{}", self.p)
        } else {
            write!(f, "{}/{}", self.p, self.q)
        }
    }
}

impl FromStr for Rational {
    type Err = Error;

    /// Accepts `p/q` or a bare non-negative integer. Decimal floats are rejected.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parse = |t: &str| {
            t.trim()
                .parse::<u64>()
                .map_err(|_| Error::domain(format!("cannot parse {s:?} as a rational p/q")))
        };
        match s.split_once('/') {
            Some((p, q)) => reduce_fraction(parse(p)?, parse(q)?),
            None => Ok(Rational::integer(parse(s)?)),
        }
    }
}

/// Reduces `p/q` by `gcd(p, q)`; `0/q` normalizes to `0/1`.
pub fn reduce_fraction(p: u64, q: u64) -> Result<Rational> {
    if q == 0 {
        return Err(Error::domain("denominator must be positive"));
    }
    let g = p.gcd(&q);
    Ok(Rational { p: p / g, q: q / g })
}

/// The congruence class `offset mod modulus`, offset kept in `[0, modulus)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PeriodicClass {
    offset: u64,
    modulus: u64,
}

impl PeriodicClass {
    pub fn new(offset: i64, modulus: u64) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::domain("modulus must be positive"));
        }
        let offset = (offset as i128).rem_euclid(modulus as i128) as u64;
        Ok(PeriodicClass { offset, modulus })
    }

    pub fn offset(&self) -> u64 {
        self.offset
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn contains(&self, v: i128) -> bool {
        v.rem_euclid(self.modulus as i128) as u64 == self.offset
    }
}

/// `{offset + stride·n mod modulus | n ∈ ℤ}` collapses to `offset mod gcd(stride, modulus)`.
pub fn absorb_period(offset: i64, stride: i64, modulus: u64) -> Result<PeriodicClass> {
    if modulus == 0 {
        return Err(Error::domain("modulus must be positive"));
    }
    let g = stride.unsigned_abs().gcd(&modulus);
    PeriodicClass::new(offset, g)
}

/// One period of a periodically extended integer set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueSet {
    modulus: u64,
    values: Vec<u64>,
}

impl ResidueSet {
    /// Reduces every value into `[0, modulus)`, then sorts and deduplicates.
    pub fn new<I>(modulus: u64, values: I) -> Result<Self>
    where
        I: IntoIterator<Item = i128>,
    {
        if modulus == 0 {
            return Err(Error::domain("modulus must be positive"));
        }
        let m = modulus as i128;
        let mut values: Vec<u64> = values
            .into_iter()
            .map(|v| v.rem_euclid(m) as u64)
            .collect();
        values.sort_unstable();
        values.dedup();
        Ok(ResidueSet { modulus, values })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Element-wise multiplication by `t`, which multiplies the period too.
    pub fn scaled(&self, t: u64) -> Result<Self> {
        let modulus = self
            .modulus
            .checked_mul(t)
            .ok_or_else(|| Error::guard("scaled modulus overflows u64"))?;
        ResidueSet::new(modulus, self.values.iter().map(|&v| v as i128 * t as i128))
    }
}

/// Width of the gap around zero in a periodically extended residue set.
///
/// With `zero_is_upper_boundary` set, an element equal to zero sits at `0+ε`
/// and bounds the gap from above. Otherwise the element at exactly zero is
/// removed (an excluded term, such as a perfect power) while its periodic
/// copies at `±modulus` stay.
pub fn residue_gap_around_zero(set: &ResidueSet, zero_is_upper_boundary: bool) -> Result<u64> {
    if set.is_empty() {
        return Err(Error::domain("gap of an empty residue set"));
    }
    let m = set.modulus;
    let values = set.values();
    if zero_is_upper_boundary {
        // Smallest element ≥ 0 minus largest element < 0 of the extension.
        let lo = values[0];
        let hi = values[values.len() - 1];
        return Ok(m - (hi - lo));
    }
    let nonzero: Vec<u64> = values.iter().copied().filter(|&v| v != 0).collect();
    match (nonzero.first(), nonzero.last()) {
        (Some(&lo), Some(&hi)) => Ok(lo + (m - hi)),
        // Only zero itself: the neighbors are one full period away on each side.
        _ => Ok(2 * m),
    }
}

/// Largest `k` with `k^α ≤ n`, in exact integer arithmetic.
pub fn integer_root(n: u128, alpha: u32) -> Result<u128> {
    if alpha < 2 {
        return Err(Error::domain(format!("root order {alpha} must be at least 2")));
    }
    Ok(n.nth_root(alpha))
}

/// `base^exp`, or a guard error when it leaves `u128`.
pub(crate) fn checked_pow(base: u128, exp: u32) -> Result<u128> {
    base.checked_pow(exp)
        .ok_or_else(|| Error::guard(format!("{base}^{exp} overflows 128-bit arithmetic")))
}

/// The Farey sequence `F_max_q`: reduced fractions in `[0, 1]` with denominator
/// at most `max_q`, ascending.
pub fn farey_sequence(max_q: u64) -> Result<Vec<Rational>> {
    if max_q == 0 {
        return Err(Error::domain("Farey order must be at least 1"));
    }
    let n = max_q;
    let mut out = vec![Rational::ZERO];
    let (mut a, mut b, mut c, mut d) = (0u64, 1u64, 1u64, n);
    while c <= n {
        out.push(Rational { p: c, q: d });
        let k = (n + b) / d;
        let (na, nb) = (c, d);
        let (nc, nd) = (k * c - a, k * d - b);
        a = na;
        b = nb;
        c = nc;
        d = nd;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(p: u64, q: u64) -> Rational {
        Rational::new(p, q).unwrap()
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(reduce_fraction(2, 4).unwrap(), r(1, 2));
        let z = reduce_fraction(0, 7).unwrap();
        assert_eq!((z.numer(), z.denom()), (0, 1));
        let t = reduce_fraction(3, 5).unwrap();
        assert_eq!((t.numer(), t.denom()), (3, 5));
        assert!(matches!(reduce_fraction(1, 0), Err(Error::Domain(_))));
    }

    #[test]
    fn parse_and_display() {
        assert_eq!("6/8".parse::<Rational>().unwrap(), r(3, 4));
        assert_eq!("1".parse::<Rational>().unwrap(), Rational::ONE);
        assert!("0.5".parse::<Rational>().is_err());
        assert!("1/0".parse::<Rational>().is_err());
        assert_eq!(r(2, 6).to_string(), "1/3");
        assert_eq!(Rational::integer(2).to_string(), "2");
    }

    #[test]
    fn absorb_examples() {
        let c = absorb_period(1, 4, 6).unwrap();
        assert_eq!((c.offset(), c.modulus()), (1, 2));
        let c = absorb_period(5, 3, 9).unwrap();
        assert_eq!((c.offset(), c.modulus()), (2, 3));
        let c = absorb_period(0, 7, 5).unwrap();
        assert_eq!((c.offset(), c.modulus()), (0, 1));
        assert!(absorb_period(0, 1, 0).is_err());
    }

    #[test]
    fn absorb_matches_enumeration() {
        for c in 1..20u64 {
            for b in -12..12i64 {
                for a in -5..5i64 {
                    let class = absorb_period(a, b, c).unwrap();
                    let enumerated = ResidueSet::new(
                        c,
                        (0..c as i128).map(|n| a as i128 + b as i128 * n),
                    )
                    .unwrap();
                    let expected = ResidueSet::new(
                        c,
                        (0..c as i128).filter(|v| class.contains(*v)),
                    )
                    .unwrap();
                    assert_eq!(enumerated, expected, "a={a} b={b} c={c}");
                }
            }
        }
    }

    #[test]
    fn residue_gap_examples() {
        let s = ResidueSet::new(20, [1, 5, 9]).unwrap();
        assert_eq!(residue_gap_around_zero(&s, true).unwrap(), 12);
        for a in 1..10 {
            let s = ResidueSet::new(a, [0]).unwrap();
            assert_eq!(residue_gap_around_zero(&s, true).unwrap(), a);
        }
        let s = ResidueSet::new(5, [0, 1, 2]).unwrap();
        assert_eq!(residue_gap_around_zero(&s, true).unwrap(), 3);
        let empty = ResidueSet::new(5, []).unwrap();
        assert!(residue_gap_around_zero(&empty, true).is_err());
    }

    #[test]
    fn residue_gap_without_epsilon_drops_zero() {
        // {k² mod 4} = {0, 1}: neighbors of zero are 1 and 1 − 4.
        let s = ResidueSet::new(4, (0..4).map(|k| k * k)).unwrap();
        assert_eq!(residue_gap_around_zero(&s, false).unwrap(), 4);
        let s = ResidueSet::new(1, [0]).unwrap();
        assert_eq!(residue_gap_around_zero(&s, false).unwrap(), 2);
    }

    #[test]
    fn integer_root_examples() {
        assert_eq!(integer_root(16, 2).unwrap(), 4);
        assert_eq!(integer_root(26, 3).unwrap(), 2);
        let k = integer_root(1_000_000_000_000_000_000, 2).unwrap();
        assert_eq!(k, 1_000_000_000);
        assert!(k * k <= 1_000_000_000_000_000_000);
        assert!((k + 1) * (k + 1) > 1_000_000_000_000_000_000);
        assert!(integer_root(5, 1).is_err());
    }

    #[test]
    fn farey_examples() {
        assert_eq!(farey_sequence(1).unwrap(), vec![Rational::ZERO, Rational::ONE]);
        assert_eq!(
            farey_sequence(3).unwrap(),
            vec![Rational::ZERO, r(1, 3), r(1, 2), r(2, 3), Rational::ONE]
        );
        assert_eq!(farey_sequence(5).unwrap().len(), 11);
        assert!(farey_sequence(0).is_err());
    }

    #[test]
    fn farey_length_matches_totient_sum() {
        for n in 1..60u64 {
            let phi_sum: u64 = (1..=n)
                .map(|q| (1..=q).filter(|p| p.gcd(&q) == 1).count() as u64)
                .sum();
            assert_eq!(farey_sequence(n).unwrap().len() as u64, 1 + phi_sum);
        }
    }

    proptest! {
        #[test]
        fn gap_is_homogeneous(
            modulus in 1u64..200,
            values in proptest::collection::vec(0i128..1000, 1..12),
            t in 1u64..50,
            eps in any::<bool>(),
        ) {
            let s = ResidueSet::new(modulus, values).unwrap();
            let base = residue_gap_around_zero(&s, eps).unwrap();
            let scaled = residue_gap_around_zero(&s.scaled(t).unwrap(), eps).unwrap();
            prop_assert_eq!(scaled, t * base);
        }

        #[test]
        fn absorb_is_idempotent(offset in -10_000i64..10_000, stride in -500i64..500, modulus in 1u64..500) {
            let c = absorb_period(offset, stride, modulus).unwrap();
            let again = absorb_period(c.offset() as i64, c.modulus() as i64, c.modulus()).unwrap();
            prop_assert_eq!(c, again);
        }

        #[test]
        fn integer_root_brackets(n in any::<u64>(), alpha in 2u32..8) {
            let n = n as u128;
            let k = integer_root(n, alpha).unwrap();
            prop_assert!(k.pow(alpha) <= n);
            prop_assert!((k + 1).checked_pow(alpha).is_none_or(|v| v > n));
        }

        #[test]
        fn farey_neighbors_are_unimodular(n in 1u64..80) {
            let f = farey_sequence(n).unwrap();
            for w in f.windows(2) {
                prop_assert!(w[0] < w[1]);
                let det = w[1].numer() as i128 * w[0].denom() as i128
                    - w[0].numer() as i128 * w[1].denom() as i128;
                prop_assert_eq!(det, 1);
            }
        }
    }
}
