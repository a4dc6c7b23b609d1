//! Exact limits of the scaled gap widths.
//!
//! Every evaluator returns a [`ClosedFormValue`] holding an exact rational and
//! the route that produced it. The `oracle_*` functions enumerate the
//! unreduced residue sets by brute force so each algebraic shortcut can be
//! checked against the set it was derived from.

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ratmod::{checked_pow, residue_gap_around_zero, Rational, ResidueSet};

/// Which evaluation route produced a [`ClosedFormValue`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormulaPath {
    /// Gap around the integers: right half-gap plus left half-gap.
    IntegerClass,
    /// `gcd(2, q)/q` for square roots of all integers.
    SqrtParity,
    /// `d/q` times the gap of a quadratic polynomial over `ℤ_a`.
    DilutedResidue,
    /// `(q/d) ≡ 0 mod a`: the polynomial is linear in `C` and fills `ℤ_a`.
    DilutedLinear,
    /// The `a = 2` split on `q mod 4`.
    DilutedMod4,
    /// `gcd(α, q^(α−1)) / q^(α−1)`.
    HigherOrder,
}

impl FormulaPath {
    pub fn tag(&self) -> &'static str {
        match self {
            FormulaPath::IntegerClass => "integer-class",
            FormulaPath::SqrtParity => "sqrt-parity",
            FormulaPath::DilutedResidue => "diluted-residue",
            FormulaPath::DilutedLinear => "diluted-linear",
            FormulaPath::DilutedMod4 => "diluted-mod4",
            FormulaPath::HigherOrder => "higher-order",
        }
    }
}

impl fmt::Display for FormulaPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// A point `x` and the sequence family `{(a·t + b)^(1/α)}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosedFormQuery {
    pub x: Rational,
    pub alpha: u32,
    pub a: u64,
    pub b: u64,
}

impl ClosedFormQuery {
    pub fn sqrt(x: Rational) -> Self {
        ClosedFormQuery {
            x,
            alpha: 2,
            a: 1,
            b: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosedFormValue {
    pub value: Rational,
    /// The gcd prefactor: `gcd(2, q)` or `gcd(α, q^(α−1))`; 1 at the integers.
    pub d: u64,
    /// Residue-gap multiplier over `ℤ_a`; 1 when nothing is diluted.
    pub gap_factor: u64,
    pub path: FormulaPath,
}

impl ClosedFormValue {
    fn new(value: Rational, d: u64, gap_factor: u64, path: FormulaPath) -> Self {
        ClosedFormValue {
            value,
            d,
            gap_factor,
            path,
        }
    }
}

fn check_unit(x: Rational) -> Result<()> {
    if x.is_unit() {
        Ok(())
    } else {
        Err(Error::domain(format!("{x} is outside [0, 1]")))
    }
}

fn check_dilution(a: u64, b: u64) -> Result<()> {
    if a == 0 {
        return Err(Error::domain("dilution a must be positive"));
    }
    if b >= a {
        return Err(Error::domain(format!("offset b = {b} must be below a = {a}")));
    }
    Ok(())
}

fn check_alpha(alpha: u32) -> Result<()> {
    if alpha < 2 {
        return Err(Error::domain(format!("root order {alpha} must be at least 2")));
    }
    Ok(())
}

/// Gap function of `{√n}`: 2 at the integers, `2/q` for even `q`, `1/q` for odd `q`.
pub fn gap_sqrt(x: Rational) -> Result<ClosedFormValue> {
    check_unit(x)?;
    let q = x.denom();
    if q == 1 {
        return Ok(ClosedFormValue::new(
            Rational::integer(2),
            1,
            1,
            FormulaPath::IntegerClass,
        ));
    }
    let d = q.gcd(&2);
    Ok(ClosedFormValue::new(
        Rational::new(d, q)?,
        d,
        1,
        FormulaPath::SqrtParity,
    ))
}

/// Gap function of `{√(a·t + b)}` at `x = p/q`.
///
/// Builds `{⌊(p² − b·q²)/(q·d)⌋ + (2/d)·C·p + (q/d)·C² mod a | C ∈ ℤ_a}`, takes its
/// gap around zero with zero counted as an upper boundary and multiplies by
/// `d/q`. Integer points go to [`gap_at_integer`].
pub fn gap_dilated(x: Rational, a: u64, b: u64) -> Result<ClosedFormValue> {
    check_unit(x)?;
    check_dilution(a, b)?;
    if x.denom() == 1 {
        return gap_at_integer(2, a, b);
    }
    let (p, q) = (x.numer() as i128, x.denom() as i128);
    let d = q.gcd(&2);
    let shifted = p * p - b as i128 * q * q;
    // Floor division keeps the remainder δ in [0, q·d); δ shares zero's gap and drops out.
    let base = shifted.div_euclid(q * d);
    let lin = (2 / d) * p;
    let quad = q / d;
    let set = ResidueSet::new(
        a,
        (0..a as i128).map(|c| base + lin * c + quad * c * c),
    )?;
    let gap_factor = residue_gap_around_zero(&set, true)?;
    let path = if quad % a as i128 == 0 {
        FormulaPath::DilutedLinear
    } else {
        FormulaPath::DilutedResidue
    };
    let value = Rational::new(d as u64 * gap_factor, q as u64)?;
    debug_assert!(value <= Rational::integer(4 * a));
    Ok(ClosedFormValue::new(value, d as u64, gap_factor, path))
}

/// The `a = 2` case split on `q mod 4`: `4/q`, `2/q` or `1/q`.
pub fn gap_dilated_case2(x: Rational) -> Result<ClosedFormValue> {
    check_unit(x)?;
    let q = x.denom();
    if q == 1 {
        return gap_at_integer(2, 2, 0);
    }
    let (num, d, factor) = match q % 4 {
        2 => (4, 2, 2),
        0 => (2, 2, 1),
        _ => (1, 1, 1),
    };
    Ok(ClosedFormValue::new(
        Rational::new(num, q)?,
        d,
        factor,
        FormulaPath::DilutedMod4,
    ))
}

/// Gap around the integers for `{√(a·t)}`: one plus the least positive residue
/// of `−k² mod a` over `k ≠ 0`, with residue zero read as `a`.
pub fn gap_dilated_at_zero(a: u64) -> Result<ClosedFormValue> {
    gap_at_integer(2, a, 0)
}

/// Least positive representative of `v mod a`, mapping the zero class to `a`.
fn least_positive(v: i128, a: u64) -> u64 {
    match v.rem_euclid(a as i128) as u64 {
        0 => a,
        r => r,
    }
}

/// Gap around the integers for `{(a·t + b)^(1/α)}`.
///
/// The right half-gap is the smallest `n − k^α` over admissible `n` above a
/// perfect power, the left half-gap the smallest `(k+1)^α − n` below one. A
/// residue of zero is a perfect power itself, which is excluded, so the next
/// term sits a full period `a` away.
pub fn gap_at_integer(alpha: u32, a: u64, b: u64) -> Result<ClosedFormValue> {
    check_alpha(alpha)?;
    check_dilution(a, b)?;
    let a_i = a as i128;
    let mut right = a;
    let mut left = a;
    for k in 0..a_i {
        let kp = pow_mod(k, alpha, a_i);
        right = right.min(least_positive(b as i128 - kp, a));
        left = left.min(least_positive(kp - b as i128, a));
    }
    let total = right + left;
    debug_assert!(total <= 2 * a * alpha as u64);
    Ok(ClosedFormValue::new(
        Rational::integer(total),
        1,
        total,
        FormulaPath::IntegerClass,
    ))
}

/// Higher-order gap function of `{n^(1/α)}`: `gcd(α, q^(α−1)) / q^(α−1)`,
/// doubled when `α ≥ 4` is even and `q ≡ 2 (mod 4)`.
///
/// The doubling comes from the 2-adic part of `{(p + kq)^α mod q^α}`: with
/// `s = v₂(α)` and `q/2` odd, the α-th powers of odd residues are spaced by
/// `2^min(s+2, α)` modulo `2^α`, one factor of two coarser than the linear term
/// `α·p^(α−1)·kq` alone suggests whenever `s + 2 ≤ α`.
pub fn gap_higher(x: Rational, alpha: u32) -> Result<ClosedFormValue> {
    check_alpha(alpha)?;
    check_unit(x)?;
    if x.denom() == 1 {
        return gap_at_integer(alpha, 1, 0);
    }
    let q_pow = checked_pow(x.denom() as u128, alpha - 1)?;
    let d = q_pow.gcd(&(alpha as u128));
    let factor = if alpha.is_multiple_of(2) && alpha >= 4 && x.denom() % 4 == 2 {
        2
    } else {
        1
    };
    let q_pow =
        u64::try_from(q_pow).map_err(|_| Error::guard("q^(α−1) does not fit in 64 bits"))?;
    Ok(ClosedFormValue::new(
        Rational::new(factor * d as u64, q_pow)?,
        d as u64,
        factor,
        FormulaPath::HigherOrder,
    ))
}

/// Dispatches a query to the evaluator that covers it.
///
/// Square roots with any dilution use [`gap_dilated`]; higher roots of all
/// integers use [`gap_higher`]. Diluted higher roots have no closed form here;
/// use [`oracle_unreduced_gap`] for them.
pub fn evaluate(query: &ClosedFormQuery) -> Result<ClosedFormValue> {
    check_alpha(query.alpha)?;
    check_dilution(query.a, query.b)?;
    match (query.alpha, query.a) {
        (2, 1) if query.b == 0 => gap_sqrt(query.x),
        (2, _) => gap_dilated(query.x, query.a, query.b),
        (alpha, _) if query.x.denom() == 1 => gap_at_integer(alpha, query.a, query.b),
        (alpha, 1) => gap_higher(query.x, alpha),
        (alpha, a) => Err(Error::domain(format!(
            "no closed form for root order {alpha} with dilution a = {a}; use the oracle"
        ))),
    }
}

/// Limits on brute-force enumeration in [`oracle_unreduced_gap`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleBounds {
    pub max_q: u64,
    pub max_a: u64,
    pub max_alpha: u32,
    /// Cap on the number of enumerated `k`, that is `a · q^(α−1)`.
    pub max_terms: u64,
}

impl Default for OracleBounds {
    fn default() -> Self {
        OracleBounds {
            max_q: 64,
            max_a: 64,
            max_alpha: 6,
            max_terms: 1 << 24,
        }
    }
}

fn pow_mod(base: i128, exp: u32, m: i128) -> i128 {
    let mut acc: i128 = 1 % m;
    let b = base.rem_euclid(m);
    for _ in 0..exp {
        acc = acc * b % m;
    }
    acc
}

/// Brute-force gap of the unreduced residue set, scaled back to the unit interval.
///
/// For `q ≥ 2` it enumerates `k ∈ ℤ_{a·q^(α−1)}` and collects
/// `Σ_{i=0}^{α} C(α,i)·p^(α−i)·(k·q)^i − b·q^α mod a·q^α`, whose gap around zero
/// divided by `q^α` is the limit. At the integers it collects `k^α − b mod a`
/// and drops the perfect powers instead.
pub fn oracle_unreduced_gap(
    x: Rational,
    alpha: u32,
    a: u64,
    b: u64,
    bounds: &OracleBounds,
) -> Result<Rational> {
    check_alpha(alpha)?;
    check_unit(x)?;
    check_dilution(a, b)?;
    let q = x.denom();
    if q > bounds.max_q || a > bounds.max_a || alpha > bounds.max_alpha {
        return Err(Error::guard(format!(
            "oracle limited to q ≤ {}, a ≤ {}, α ≤ {}",
            bounds.max_q, bounds.max_a, bounds.max_alpha
        )));
    }
    let q_pow_lo = checked_pow(q as u128, alpha - 1)?;
    let terms = q_pow_lo.saturating_mul(a as u128);
    if terms > bounds.max_terms as u128 {
        return Err(Error::guard(format!(
            "oracle would enumerate {terms} terms, limit is {}",
            bounds.max_terms
        )));
    }

    if q == 1 {
        let set = ResidueSet::new(
            a,
            (0..a as i128).map(|k| pow_mod(k, alpha, a as i128) - b as i128),
        )?;
        return Ok(Rational::integer(residue_gap_around_zero(&set, false)?));
    }

    let q_pow = q_pow_lo * q as u128;
    let modulus = q_pow * a as u128;
    let m = modulus as i128;
    let p = x.numer() as i128;
    let binom = binomials(alpha);
    let p_pows: Vec<i128> = (0..=alpha).map(|e| pow_mod(p, e, m)).collect();
    let values = (0..terms as i128).map(|k| {
        let kq = (k * q as i128) % m;
        let mut kq_pow: i128 = 1;
        let mut sum: i128 = 0;
        for i in 0..=alpha as usize {
            let term = binom[i] % m * p_pows[alpha as usize - i] % m * kq_pow % m;
            sum = (sum + term) % m;
            kq_pow = kq_pow * kq % m;
        }
        sum - b as i128 * q_pow as i128
    });
    let modulus_u64 =
        u64::try_from(modulus).map_err(|_| Error::guard("oracle modulus exceeds 64 bits"))?;
    let set = ResidueSet::new(modulus_u64, values)?;
    let gap = residue_gap_around_zero(&set, true)?;
    let q_pow_u64 = q_pow as u64;
    Rational::new(gap, q_pow_u64)
}

fn binomials(n: u32) -> Vec<i128> {
    let mut row = vec![1i128];
    for _ in 0..n {
        let mut next = vec![1i128; row.len() + 1];
        for i in 1..row.len() {
            next[i] = row[i - 1] + row[i];
        }
        row = next;
    }
    row
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratmod::farey_sequence;

    fn r(p: u64, q: u64) -> Rational {
        Rational::new(p, q).unwrap()
    }

    fn bounds() -> OracleBounds {
        OracleBounds::default()
    }

    #[test]
    fn sqrt_examples() {
        assert_eq!(gap_sqrt(Rational::ZERO).unwrap().value, Rational::integer(2));
        assert_eq!(gap_sqrt(Rational::ONE).unwrap().value, Rational::integer(2));
        assert_eq!(gap_sqrt(r(1, 2)).unwrap().value, Rational::ONE);
        assert_eq!(gap_sqrt(r(1, 3)).unwrap().value, r(1, 3));
        assert_eq!(gap_sqrt(r(3, 4)).unwrap().value, r(1, 2));
        assert_eq!(gap_sqrt(r(1, 3)).unwrap().path, FormulaPath::SqrtParity);
        assert!(gap_sqrt(Rational::integer(2)).is_err());
    }

    #[test]
    fn dilated_examples() {
        assert_eq!(gap_dilated(r(1, 3), 1, 0).unwrap().value, r(1, 3));
        assert_eq!(gap_dilated(r(1, 2), 2, 0).unwrap().value, Rational::integer(2));
        let v = gap_dilated(r(1, 2), 3, 0).unwrap();
        assert_eq!((v.value, v.gap_factor), (Rational::ONE, 1));
        // Both routes give 3 here; the figure caption for this point says 6.
        let v = gap_dilated(r(1, 2), 5, 0).unwrap();
        assert_eq!(v.value, Rational::integer(3));
        assert_eq!(oracle_unreduced_gap(r(1, 2), 2, 5, 0, &bounds()).unwrap(), Rational::integer(3));
        assert!(gap_dilated(r(1, 2), 3, 3).is_err());
        assert!(gap_dilated(r(1, 2), 0, 0).is_err());
    }

    #[test]
    fn five_dilution_residue_set() {
        // {(2C+1)² mod 20} = {1, 5, 9}; its gap is 12, over q² = 4.
        let set = ResidueSet::new(20, (0..10i128).map(|c| (2 * c + 1) * (2 * c + 1))).unwrap();
        assert_eq!(set.values(), &[1, 5, 9]);
        assert_eq!(residue_gap_around_zero(&set, true).unwrap(), 12);
    }

    #[test]
    fn case2_examples() {
        assert_eq!(gap_dilated_case2(r(1, 2)).unwrap().value, Rational::integer(2));
        assert_eq!(gap_dilated_case2(r(1, 4)).unwrap().value, r(1, 2));
        assert_eq!(gap_dilated_case2(r(1, 3)).unwrap().value, r(1, 3));
    }

    #[test]
    fn at_zero_examples() {
        let vals: Vec<u64> = (1..=4)
            .map(|a| gap_dilated_at_zero(a).unwrap().value.numer())
            .collect();
        assert_eq!(vals, vec![2, 2, 3, 4]);
    }

    #[test]
    fn at_zero_matches_oracle() {
        for alpha in 2..=4 {
            for a in 1..=30 {
                for b in 0..a {
                    let closed = gap_at_integer(alpha, a, b).unwrap().value;
                    let oracle = oracle_unreduced_gap(Rational::ZERO, alpha, a, b, &bounds()).unwrap();
                    assert_eq!(closed, oracle, "alpha={alpha} a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn higher_examples() {
        assert_eq!(gap_higher(r(1, 2), 2).unwrap().value, Rational::ONE);
        assert_eq!(gap_higher(r(1, 3), 3).unwrap().value, r(1, 3));
        assert_eq!(gap_higher(r(1, 2), 3).unwrap().value, r(1, 4));
        // (2C+1)^4 ≡ 1 (mod 16) for every C, so the set is a single point
        let v = gap_higher(r(1, 2), 4).unwrap();
        assert_eq!((v.value, v.d, v.gap_factor), (Rational::ONE, 4, 2));
        assert_eq!(oracle_unreduced_gap(r(1, 2), 4, 1, 0, &bounds()).unwrap(), Rational::ONE);
        assert_eq!(gap_higher(r(1, 6), 6).unwrap().value, r(2 * 6, 6u64.pow(5)));
        assert_eq!(gap_higher(r(1, 4), 4).unwrap().value, r(4, 64));
        assert!(gap_higher(r(1, 2), 1).is_err());
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(oracle_unreduced_gap(r(1, 3), 2, 1, 0, &bounds()).unwrap(), r(1, 3));
        assert_eq!(oracle_unreduced_gap(r(1, 2), 3, 1, 0, &bounds()).unwrap(), r(1, 4));
    }

    #[test]
    fn oracle_guards() {
        assert!(matches!(
            oracle_unreduced_gap(r(1, 65), 2, 1, 0, &bounds()),
            Err(Error::Guard(_))
        ));
        assert!(matches!(
            oracle_unreduced_gap(r(1, 3), 7, 1, 0, &bounds()),
            Err(Error::Guard(_))
        ));
        assert!(matches!(
            oracle_unreduced_gap(r(1, 63), 6, 1, 0, &bounds()),
            Err(Error::Guard(_))
        ));
    }

    #[test]
    fn offset_rule_matches_oracle() {
        for a in 1..=9u64 {
            for b in 0..a {
                for x in farey_sequence(9).unwrap() {
                    let closed = gap_dilated(x, a, b).unwrap().value;
                    let oracle = oracle_unreduced_gap(x, 2, a, b, &bounds()).unwrap();
                    assert_eq!(closed, oracle, "x={x} a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn linear_shortcut_gives_prefactor() {
        for a in 1..=6u64 {
            for x in farey_sequence(36).unwrap() {
                let q = x.denom();
                if q == 1 {
                    continue;
                }
                let d = q.gcd(&2);
                if (q / d) % a == 0 {
                    let v = gap_dilated(x, a, 0).unwrap();
                    assert_eq!(v.path, FormulaPath::DilutedLinear);
                    assert_eq!(v.value, r(d, q));
                    assert_eq!(v.gap_factor, 1);
                }
            }
        }
    }

    #[test]
    fn higher_matches_oracle_through_sixth_roots() {
        for alpha in 2..=6u32 {
            let max_q = if alpha == 6 { 8 } else { 10 };
            for x in farey_sequence(max_q).unwrap() {
                if x.denom() == 1 {
                    continue;
                }
                let oracle = oracle_unreduced_gap(x, alpha, 1, 0, &bounds()).unwrap();
                assert_eq!(gap_higher(x, alpha).unwrap().value, oracle, "α={alpha} x={x}");
            }
        }
    }

    #[test]
    fn dilution_never_narrows() {
        for a in [2, 3, 5] {
            for x in farey_sequence(20).unwrap() {
                let diluted = gap_dilated(x, a, 0).unwrap().value;
                let base = gap_sqrt(x).unwrap().value;
                assert!(diluted >= base, "x={x} a={a}");
            }
        }
    }

    #[test]
    fn sqrt_gap_depends_on_denominator_only() {
        for x in farey_sequence(50).unwrap() {
            let q = x.denom();
            if q == 1 {
                continue;
            }
            let v = gap_sqrt(x).unwrap().value;
            for p in 1..q {
                if p.gcd(&q) == 1 {
                    assert_eq!(gap_sqrt(r(p, q)).unwrap().value, v);
                }
            }
            // Thomae's function evaluated at 2x: one over the reduced denominator of 2p/q.
            let doubled = r((2 * x.numer()) % (2 * q), q);
            assert_eq!(v, r(1, doubled.denom()));
        }
    }

    #[test]
    fn evaluate_dispatch() {
        let q = ClosedFormQuery { x: r(1, 3), alpha: 3, a: 1, b: 0 };
        assert_eq!(evaluate(&q).unwrap().path, FormulaPath::HigherOrder);
        let q = ClosedFormQuery { x: r(1, 3), alpha: 2, a: 3, b: 1 };
        assert_eq!(evaluate(&q).unwrap().value, gap_dilated(r(1, 3), 3, 1).unwrap().value);
        let q = ClosedFormQuery { x: r(1, 3), alpha: 3, a: 2, b: 0 };
        assert!(matches!(evaluate(&q), Err(Error::Domain(_))));
        let q = ClosedFormQuery { x: Rational::ZERO, alpha: 3, a: 2, b: 0 };
        assert!(evaluate(&q).is_ok());
    }
}
