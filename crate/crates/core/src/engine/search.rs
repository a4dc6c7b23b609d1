use std::cmp::Ordering;

use num_bigint::BigUint;
use rayon::prelude::*;

use super::{GapMeasurement, Neighbor, SequenceSpec};
use crate::dd::Dd;
use crate::error::{Error, Result, Side};
use crate::ratmod::{checked_pow, Rational};

const TIE_RELATIVE: f64 = 1e-26;

#[derive(Debug, Clone, Copy)]
struct Candidate {
    radicand: u64,
    band: u64,
    root: Dd,
    offset: Dd,
}

impl Candidate {
    fn neighbor(&self) -> Neighbor {
        Neighbor {
            radicand: self.radicand,
            band: self.band,
            fraction: self.root - Dd::from_u128(self.band as u128),
            offset: self.offset,
        }
    }
}

/// `|A^α − n| / (q^α · Σ A^(α−1−i) r^i)` with the numerator `|t − n·q^α|`
/// computed exactly, so close neighbors lose no digits to cancellation.
fn offset(numerator: u128, q_pow: u128, a: Dd, r: Dd, alpha: u32) -> Dd {
    let mut sum = Dd::ZERO;
    let mut a_pow = Dd::ONE;
    let mut r_pow = r.powi(alpha - 1);
    let r_inv = r.recip();
    for _ in 0..alpha {
        sum = sum + a_pow * r_pow;
        a_pow = a_pow * a;
        r_pow = r_pow * r_inv;
    }
    Dd::from_u128(numerator) / (Dd::from_u128(q_pow) * sum)
}

fn root_of(n: u64, alpha: u32) -> Dd {
    Dd::from_u128(n as u128).nth_root(alpha)
}

/// Compares `n1^(1/α) − k1` against `n2^(1/α) − k2` exactly by refining
/// integer roots of `n·2^(α·bits)` until the enclosing intervals separate.
pub fn cmp_root_fractions(alpha: u32, n1: u64, k1: u64, n2: u64, k2: u64) -> Ordering {
    if n1 == n2 && k1 == k2 {
        return Ordering::Equal;
    }
    let mut bits = 64u32;
    while bits <= 1 << 14 {
        let interval = |n: u64, k: u64| {
            let scaled = BigUint::from(n) << (bits as usize * alpha as usize);
            let f = scaled.nth_root(alpha);
            let base = BigUint::from(k) << bits as usize;
            // root·2^bits ∈ [f, f + 1), fraction·2^bits ∈ [f − base, f − base + 1)
            (f, base)
        };
        let (f1, b1) = interval(n1, k1);
        let (f2, b2) = interval(n2, k2);
        let lo1 = &f1 + &b2;
        let lo2 = &f2 + &b1;
        if lo1 < lo2 {
            return Ordering::Less;
        }
        if lo2 < lo1 {
            return Ordering::Greater;
        }
        bits *= 2;
    }
    Ordering::Equal
}

/// Orders two candidates on the same side by distance from the center.
fn closer(alpha: u32, side: Side, x: Candidate, y: Candidate) -> Ordering {
    let diff = (x.offset - y.offset).abs();
    let scale = if x.offset > y.offset { x.offset } else { y.offset };
    if diff.to_f64() > TIE_RELATIVE * scale.to_f64() {
        return x.offset.total_cmp(&y.offset);
    }
    let frac = cmp_root_fractions(alpha, x.radicand, x.band, y.radicand, y.band);
    match side {
        // below the center: larger fraction is closer
        Side::Lower => frac.reverse(),
        Side::Upper => frac,
    }
}

fn pick(alpha: u32, side: Side, x: Option<Candidate>, y: Option<Candidate>) -> Option<Candidate> {
    match (x, y) {
        (Some(x), Some(y)) => Some(if closer(alpha, side, x, y) == Ordering::Greater {
            y
        } else {
            x
        }),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Largest `n ≤ m` with `n ≡ b (mod a)`, if it is at least `floor`.
fn class_at_or_below(m: u128, a: u64, b: u64, floor: u128) -> Option<u64> {
    let a = a as u128;
    let back = (m + a - b as u128 % a) % a;
    let n = m.checked_sub(back)?;
    (n >= floor).then_some(n as u64)
}

/// Smallest `n ≥ s` with `n ≡ b (mod a)`, if it is at most `ceil`.
fn class_at_or_above(s: u128, a: u64, b: u64, ceil: u128) -> Option<u64> {
    let a = a as u128;
    let fwd = (b as u128 + a - s % a) % a;
    let n = s + fwd;
    (n <= ceil).then_some(n as u64)
}

type Pair = (Option<Candidate>, Option<Candidate>);

fn reduce_bands<F>(spec: &SequenceSpec, bands: u64, per_band: F) -> Pair
where
    F: Fn(u64) -> Pair + Sync,
{
    let alpha = spec.alpha;
    let merge = |l: Pair, r: Pair| -> Pair {
        (
            pick(alpha, Side::Lower, l.0, r.0),
            pick(alpha, Side::Upper, l.1, r.1),
        )
    };
    (1..=bands)
        .into_par_iter()
        .fold(|| (None, None), |acc, k| merge(acc, per_band(k)))
        .reduce(|| (None, None), merge)
}

fn finish(spec: &SequenceSpec, center: Rational, pair: Pair) -> Result<GapMeasurement> {
    let unbounded = |side| Error::UnboundedGap {
        center,
        side,
        n_max: spec.n_max,
    };
    let lower = pair.0.ok_or_else(|| unbounded(Side::Lower))?.neighbor();
    let upper = pair.1.ok_or_else(|| unbounded(Side::Upper))?.neighbor();
    Ok(GapMeasurement {
        center,
        lower,
        upper,
        width: lower.offset + upper.offset,
        n_max: spec.n_max,
    })
}

pub(super) fn gap_at_rational(spec: &SequenceSpec, x: Rational) -> Result<GapMeasurement> {
    let (alpha, n_max) = (spec.alpha, spec.n_max as u128);
    let (p, q) = (x.numer() as u128, x.denom() as u128);
    let bands = spec.band_count();
    let top = (bands as u128 + 1)
        .checked_mul(q)
        .ok_or_else(|| Error::guard("band arithmetic overflows"))?;
    let top_pow = checked_pow(top, alpha)?;
    if top_pow > i128::MAX as u128 {
        return Err(Error::guard("band arithmetic overflows 128 bits"));
    }
    let q_pow = q.pow(alpha);
    let q_dd = Dd::from_u128(q);

    let result = reduce_bands(spec, bands, |k| {
        let k = k as u128;
        let band_lo = k.pow(alpha) + 1;
        let band_hi = ((k + 1).pow(alpha) - 1).min(n_max);
        if band_lo > band_hi {
            return (None, None);
        }
        let kqp = k * q + p;
        let t = kqp.pow(alpha);
        // q^α never divides t, so every n ≤ floor_t lies strictly below x
        let floor_t = t / q_pow;
        let centre = Dd::from_u128(kqp) / q_dd;
        let make = |n: u64| {
            let r = root_of(n, alpha);
            let nq = n as u128 * q_pow;
            let num = t.abs_diff(nq);
            Candidate {
                radicand: n,
                band: k as u64,
                root: r,
                offset: offset(num, q_pow, centre, r, alpha),
            }
        };
        let lower = class_at_or_below(floor_t.min(band_hi), spec.a, spec.b, band_lo).map(make);
        let upper = class_at_or_above((floor_t + 1).max(band_lo), spec.a, spec.b, band_hi).map(make);
        (lower, upper)
    });
    finish(spec, x, result)
}

pub(super) fn gap_at_integer(spec: &SequenceSpec) -> Result<GapMeasurement> {
    let (alpha, n_max) = (spec.alpha, spec.n_max as u128);
    let bands = spec.band_count();
    checked_pow(bands as u128 + 1, alpha)?;

    let result = reduce_bands(spec, bands, |k| {
        let k = k as u128;
        let floor_pow = k.pow(alpha);
        let ceil_pow = (k + 1).pow(alpha);
        let band_lo = floor_pow + 1;
        let band_hi = (ceil_pow - 1).min(n_max);
        if band_lo > band_hi {
            return (None, None);
        }
        let lower = class_at_or_below(band_hi, spec.a, spec.b, band_lo).map(|n| {
            let r = root_of(n, alpha);
            Candidate {
                radicand: n,
                band: k as u64,
                root: r,
                offset: offset(ceil_pow - n as u128, 1, Dd::from_u128(k + 1), r, alpha),
            }
        });
        let upper = class_at_or_above(band_lo, spec.a, spec.b, band_hi).map(|n| {
            let r = root_of(n, alpha);
            Candidate {
                radicand: n,
                band: k as u64,
                root: r,
                offset: offset(n as u128 - floor_pow, 1, Dd::from_u128(k), r, alpha),
            }
        });
        (lower, upper)
    });
    finish(spec, Rational::ZERO, result)
}

#[cfg(test)]
mod tests {
    use num_integer::Roots;

    use super::*;

    #[test]
    fn class_helpers() {
        assert_eq!(class_at_or_below(10, 3, 1, 0), Some(10));
        assert_eq!(class_at_or_below(9, 3, 1, 0), Some(7));
        assert_eq!(class_at_or_below(9, 3, 1, 8), None);
        assert_eq!(class_at_or_below(0, 3, 1, 0), None);
        assert_eq!(class_at_or_above(8, 3, 1, 20), Some(10));
        assert_eq!(class_at_or_above(8, 3, 1, 9), None);
        assert_eq!(class_at_or_above(7, 1, 0, 7), Some(7));
    }

    #[test]
    fn exact_fraction_order() {
        assert_eq!(cmp_root_fractions(2, 2, 1, 5, 2), Ordering::Greater);
        assert_eq!(cmp_root_fractions(2, 10, 3, 5, 2), Ordering::Less);
        assert_eq!(cmp_root_fractions(2, 7, 2, 7, 2), Ordering::Equal);
        assert_eq!(cmp_root_fractions(3, 9, 2, 28, 3), Ordering::Greater);
        // √99 − 9 ≈ 0.94987 and √24 − 4 ≈ 0.89898
        assert_eq!(cmp_root_fractions(2, 99, 9, 24, 4), Ordering::Greater);
    }

    #[test]
    fn exact_order_matches_floats_when_separated() {
        for n1 in 2..200u64 {
            for n2 in 2..200u64 {
                let (k1, k2) = (n1.sqrt(), n2.sqrt());
                if k1 * k1 == n1 || k2 * k2 == n2 {
                    continue;
                }
                let f1 = (n1 as f64).sqrt() - k1 as f64;
                let f2 = (n2 as f64).sqrt() - k2 as f64;
                if (f1 - f2).abs() > 1e-9 {
                    assert_eq!(cmp_root_fractions(2, n1, k1, n2, k2), f1.total_cmp(&f2));
                }
            }
        }
    }

    #[test]
    fn offset_matches_direct_difference() {
        let r = root_of(13, 2);
        let o = offset(13 * 4 - 49, 4, Dd::from_f64(3.5), r, 2);
        assert!((o.to_f64() - (13f64.sqrt() - 3.5)).abs() < 1e-15);
        let r = root_of(30, 3);
        let o = offset(30 - 27, 1, Dd::from_f64(3.0), r, 3);
        assert!((o.to_f64() - (30f64.cbrt() - 3.0)).abs() < 1e-15);
    }
}
