//! Finite-`N` gap measurements.
//!
//! The fractional parts `{n^(1/α)}` of admissible radicands `n = a·t + b ≤ N`
//! are never materialized for rational queries. Between consecutive perfect
//! powers `k^α < n < (k+1)^α` the fractional part increases with `n`, so the
//! neighbors of `x = p/q` inside band `k` sit on either side of the exact
//! threshold `(k·q + p)^α / q^α`. One integer division per band finds them and
//! a min/max over bands gives the bracketing pair, in `O(N^(1/α))`.

mod background;
mod estimate;
mod search;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::ratmod::{checked_pow, farey_sequence, integer_root, Rational};

pub use background::{background_scan, BackgroundOptions, BackgroundReport, HistogramBin, ScanMode};
pub use estimate::{min_n_estimate, min_n_residual};
pub use search::cmp_root_fractions;

/// The sequence family `{(a·t + b)^(1/α)}` truncated at radicands `≤ n_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SequenceSpec {
    pub alpha: u32,
    pub a: u64,
    pub b: u64,
    pub n_max: u64,
}

impl SequenceSpec {
    pub fn new(alpha: u32, a: u64, b: u64, n_max: u64) -> Result<Self> {
        if alpha < 2 {
            return Err(Error::domain(format!("root order {alpha} must be at least 2")));
        }
        if a == 0 {
            return Err(Error::domain("dilution a must be positive"));
        }
        if b >= a {
            return Err(Error::domain(format!("offset b = {b} must be below a = {a}")));
        }
        if n_max == 0 {
            return Err(Error::domain("N must be positive"));
        }
        Ok(SequenceSpec {
            alpha,
            a,
            b,
            n_max,
        })
    }

    /// `{√n | n ≤ n_max}`.
    pub fn square_roots(n_max: u64) -> Self {
        SequenceSpec {
            alpha: 2,
            a: 1,
            b: 0,
            n_max,
        }
    }

    pub fn with_n(&self, n_max: u64) -> Result<Self> {
        SequenceSpec::new(self.alpha, self.a, self.b, n_max)
    }

    pub fn is_perfect_power(&self, n: u64) -> bool {
        let k = integer_root(n as u128, self.alpha).unwrap_or(0);
        k.pow(self.alpha) == n as u128
    }

    /// `n ≥ 1`, `n ≡ b (mod a)`, `n ≤ N` and not a perfect α-th power.
    pub fn is_admissible(&self, n: u64) -> bool {
        n >= 1 && n <= self.n_max && n % self.a == self.b && !self.is_perfect_power(n)
    }

    /// Number of complete or partial passes across the unit interval, `⌊N^(1/α)⌋`.
    pub fn band_count(&self) -> u64 {
        integer_root(self.n_max as u128, self.alpha).unwrap_or(0) as u64
    }

    /// `α·N^((α−1)/α)`, which is `2√N` for square roots.
    pub fn scale(&self) -> Dd {
        let n = Dd::from_u128(self.n_max as u128);
        if self.alpha == 2 {
            return n.sqrt().mul_f64(2.0);
        }
        (n / n.nth_root(self.alpha)).mul_f64(self.alpha as f64)
    }

    /// Admissible radicands in increasing order.
    pub fn radicands(&self) -> impl Iterator<Item = u64> + '_ {
        let start = if self.b == 0 { self.a } else { self.b };
        (start..=self.n_max)
            .step_by(self.a as usize)
            .filter(move |&n| !self.is_perfect_power(n))
    }

    pub fn admissible_count(&self) -> u64 {
        let start = if self.b == 0 { self.a } else { self.b };
        if start > self.n_max {
            return 0;
        }
        let in_class = (self.n_max - start) / self.a + 1;
        let powers = (1..=self.band_count())
            .filter(|k| {
                let v = k.pow(self.alpha);
                v >= start && v % self.a == self.b
            })
            .count() as u64;
        in_class - powers
    }
}

/// One bracketing radicand of a gap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Neighbor {
    pub radicand: u64,
    /// `⌊radicand^(1/α)⌋`.
    pub band: u64,
    /// The fractional part `radicand^(1/α) − band`.
    pub fraction: Dd,
    /// Distance from the center, always positive.
    pub offset: Dd,
}

/// The gap of the finite set around one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapMeasurement {
    pub center: Rational,
    /// Fractional part just below the center (just below 1 for the integer gap).
    pub lower: Neighbor,
    /// Fractional part just above the center (just above 0 for the integer gap).
    pub upper: Neighbor,
    /// `lower.offset + upper.offset`, never a difference of two roots.
    pub width: Dd,
    pub n_max: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledApproximant {
    pub measurement: GapMeasurement,
    pub scale: Dd,
    pub scaled_width: Dd,
}

impl ScaledApproximant {
    fn new(spec: &SequenceSpec, measurement: GapMeasurement) -> Self {
        let scale = spec.scale();
        ScaledApproximant {
            measurement,
            scale,
            scaled_width: measurement.width * scale,
        }
    }
}

/// Exact neighbors and width of the gap around `0 < x < 1`.
///
/// Requires `N ≥ (q+1)^α` so every band residue has been visited at least once.
pub fn exact_gap_at(spec: &SequenceSpec, x: Rational) -> Result<GapMeasurement> {
    if x.denom() < 2 || !x.is_unit() {
        return Err(Error::domain(format!(
            "{x} is not strictly inside (0, 1); use exact_gap_at_integer"
        )));
    }
    let need = checked_pow(x.denom() as u128 + 1, spec.alpha)?;
    if (spec.n_max as u128) < need {
        return Err(Error::domain(format!(
            "N = {} is below (q+1)^α = {need} for x = {x}",
            spec.n_max
        )));
    }
    search::gap_at_rational(spec, x)
}

/// The wrap-around gap around the integers: `(1 − max fraction) + min fraction`.
pub fn exact_gap_at_integer(spec: &SequenceSpec) -> Result<GapMeasurement> {
    let need = checked_pow(2 * spec.a as u128, spec.alpha)?;
    if (spec.n_max as u128) < need {
        return Err(Error::domain(format!(
            "N = {} is below (2a)^α = {need}",
            spec.n_max
        )));
    }
    search::gap_at_integer(spec)
}

/// [`exact_gap_at`] or [`exact_gap_at_integer`], scaled by `α·N^((α−1)/α)`.
pub fn scaled_gap(spec: &SequenceSpec, x: Rational) -> Result<ScaledApproximant> {
    let measurement = if x.is_integer_class() {
        let mut m = exact_gap_at_integer(spec)?;
        m.center = x;
        m
    } else {
        exact_gap_at(spec, x)?
    };
    Ok(ScaledApproximant::new(spec, measurement))
}

/// Scaled gap at a real point, rounded to the dyadic rational `j/2^e` with odd
/// `j` and the largest `e ≤ 32` that keeps the band arithmetic in range.
pub fn scaled_gap_real(spec: &SequenceSpec, x: f64) -> Result<ScaledApproximant> {
    let x = dyadic_point(spec, x)?;
    let measurement = search::gap_at_rational(spec, x)?;
    Ok(ScaledApproximant::new(spec, measurement))
}

pub(crate) fn dyadic_point(spec: &SequenceSpec, x: f64) -> Result<Rational> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::domain(format!("real point {x} must lie in (0, 1)")));
    }
    let top = spec.band_count() as u128 + 1;
    let mut e = 32u32;
    while e >= 16 {
        let fits = (top << e)
            .checked_pow(spec.alpha)
            .is_some_and(|v| v < 1u128 << 126);
        if fits {
            break;
        }
        e -= 1;
    }
    if e < 16 {
        return Err(Error::guard("N too large for dyadic real-point queries"));
    }
    let q = 1u64 << e;
    let j = ((x * q as f64) as u64).clamp(1, q - 1) | 1;
    Rational::new(j, q)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub x: Rational,
    pub approximant: ScaledApproximant,
}

/// Scaled gaps at every point of the Farey sequence `F_max_q`, the two integer
/// endpoints carrying the wrap-around gap.
pub fn gap_profile(spec: &SequenceSpec, max_q: u64) -> Result<Vec<ProfilePoint>> {
    if max_q < 2 {
        return Err(Error::domain("profile needs max_q ≥ 2"));
    }
    let points = farey_sequence(max_q)?;
    points
        .par_iter()
        .map(|&x| {
            scaled_gap(spec, x).map(|approximant| ProfilePoint { x, approximant })
        })
        .collect()
}

/// Scaled gaps at one point along an ascending schedule of `N`.
pub fn convergence_series(
    template: &SequenceSpec,
    x: Rational,
    schedule: &[u64],
) -> Result<Vec<ScaledApproximant>> {
    if schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::domain("N schedule must be strictly ascending"));
    }
    schedule
        .iter()
        .map(|&n| scaled_gap(&template.with_n(n)?, x))
        .collect()
}

/// [`convergence_series`] at a real point (see [`scaled_gap_real`]).
pub fn convergence_series_real(
    template: &SequenceSpec,
    x: f64,
    schedule: &[u64],
) -> Result<Vec<ScaledApproximant>> {
    if schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::domain("N schedule must be strictly ascending"));
    }
    schedule
        .iter()
        .map(|&n| scaled_gap_real(&template.with_n(n)?, x))
        .collect()
}
