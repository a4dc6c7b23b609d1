//! Euclid's orchard: rays `m = c(x) + 2kx` through the lattice points `(k, m)`
//! cast point shadows on a screen at `k_max`. The lit segments between shadows,
//! scaled by `2(k_max + x)`, approach the gap function.
//!
//! With the parabolic intercept `c(x) = x²` the shadow of `(k, m)` sits at
//! `√(k² + m) − k`, so the shadows are exactly the fractional parts of `√n`.
//! The same structure is sometimes called Euler's orchard; this crate uses
//! Euclid's throughout.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closed_form::gap_dilated;
use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::ratmod::{farey_sequence, Rational};

/// Estimated shadow count above which scenes are refused.
pub const MAX_SHADOWS: f64 = 5e7;

/// A linear intercept coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Coefficient {
    /// `num / den`, checked exactly for rational shadows.
    Exact { num: i64, den: u64 },
    /// Any real; singular points are not detected.
    Real(Dd),
}

impl Coefficient {
    pub fn integer(n: i64) -> Self {
        Coefficient::Exact { num: n, den: 1 }
    }

    /// `√n` in double-double precision.
    pub fn sqrt(n: u64) -> Self {
        Coefficient::Real(Dd::from_u128(n as u128).sqrt())
    }

    pub fn to_dd(&self) -> Dd {
        match *self {
            Coefficient::Exact { num, den } => Dd::from_i128(num as i128) / Dd::from_u128(den as u128),
            Coefficient::Real(v) => v,
        }
    }

    fn exact(&self) -> Option<(i128, i128)> {
        match *self {
            Coefficient::Exact { num, den } => Some((num as i128, den as i128)),
            Coefficient::Real(_) => None,
        }
    }

    fn is_zero(&self) -> bool {
        match *self {
            Coefficient::Exact { num, .. } => num == 0,
            Coefficient::Real(v) => v.is_zero(),
        }
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Exact { num, den: 1 } => write!(f, "{num}"),
            Coefficient::Exact { num, den } => write!(f, "{num}/{den}"),
            Coefficient::Real(v) => write!(f, "{}", v.to_f64()),
        }
    }
}

/// Accepts `p/q`, an integer, `sqrt(n)` or a decimal.
impl FromStr for Coefficient {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::domain(format!("cannot parse coefficient {s:?}"));
        if let Some(inner) = s.strip_prefix("sqrt(").and_then(|r| r.strip_suffix(')')) {
            return Ok(Coefficient::sqrt(inner.trim().parse().map_err(|_| bad())?));
        }
        if let Some((p, q)) = s.split_once('/') {
            let num: i64 = p.trim().parse().map_err(|_| bad())?;
            let den: u64 = q.trim().parse().map_err(|_| bad())?;
            if den == 0 {
                return Err(bad());
            }
            let g = (num.unsigned_abs()).gcd(&den).max(1);
            return Ok(Coefficient::Exact {
                num: num / g as i64,
                den: den / g,
            });
        }
        if let Ok(n) = s.parse::<i64>() {
            return Ok(Coefficient::integer(n));
        }
        let v: f64 = s.parse().map_err(|_| bad())?;
        if !v.is_finite() {
            return Err(bad());
        }
        Ok(Coefficient::Real(Dd::from_f64(v)))
    }
}

/// The ray family `m = c(x) + 2kx`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Intercept {
    /// `c(x) = x²`.
    Parabolic,
    /// `c(x) = c1 + c2·x`.
    Linear { c1: Coefficient, c2: Coefficient },
    /// Piecewise-linear through `(x, c)` knots, slopes above `−2`.
    Tabulated(Vec<(f64, f64)>),
}

impl Intercept {
    fn tabulated_value(knots: &[(f64, f64)], x: f64) -> f64 {
        let i = knots
            .partition_point(|&(kx, _)| kx <= x)
            .clamp(1, knots.len() - 1);
        let ((x0, c0), (x1, c1)) = (knots[i - 1], knots[i]);
        c0 + (c1 - c0) * (x - x0) / (x1 - x0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
}

impl Window {
    pub const UNIT: Window = Window { lo: 0.0, hi: 1.0 };

    pub fn is_unit(&self) -> bool {
        self.lo == 0.0 && self.hi == 1.0
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrchardScene {
    /// Screen position, playing the role of `√N`.
    pub k_max: u64,
    pub intercept: Intercept,
    /// Only lattice points with `k² + m ≡ b (mod a)` cast shadows.
    pub a: u64,
    pub b: u64,
    pub window: Window,
}

impl OrchardScene {
    pub fn parabolic(k_max: u64) -> Self {
        OrchardScene {
            k_max,
            intercept: Intercept::Parabolic,
            a: 1,
            b: 0,
            window: Window::UNIT,
        }
    }

    pub fn linear(k_max: u64, c1: Coefficient, c2: Coefficient) -> Self {
        OrchardScene {
            intercept: Intercept::Linear { c1, c2 },
            ..OrchardScene::parabolic(k_max)
        }
    }

    pub fn with_dilution(self, a: u64, b: u64) -> Self {
        OrchardScene { a, b, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k_max == 0 {
            return Err(Error::domain("k_max must be at least 1"));
        }
        if self.a == 0 || self.b >= self.a {
            return Err(Error::domain(format!(
                "dilution needs a ≥ 1 and b < a, got a = {}, b = {}",
                self.a, self.b
            )));
        }
        let w = self.window;
        if !(w.lo >= 0.0 && w.lo < w.hi && w.hi <= 1.0) {
            return Err(Error::domain(format!("window ({}, {}) is not inside [0, 1]", w.lo, w.hi)));
        }
        match &self.intercept {
            Intercept::Parabolic => {}
            Intercept::Linear { c2, .. } => {
                if c2.to_dd().to_f64() <= -2.0 {
                    return Err(Error::domain("linear intercept needs c2 > −2"));
                }
            }
            Intercept::Tabulated(knots) => {
                if knots.len() < 2 {
                    return Err(Error::domain("tabulated intercept needs at least two knots"));
                }
                for pair in knots.windows(2) {
                    let ((x0, c0), (x1, c1)) = (pair[0], pair[1]);
                    if x1.partial_cmp(&x0) != Some(Ordering::Greater) || !c0.is_finite() || !c1.is_finite() {
                        return Err(Error::domain("tabulated knots must be finite with increasing x"));
                    }
                    if (c1 - c0) / (x1 - x0) <= -2.0 {
                        return Err(Error::domain("tabulated intercept slopes must exceed −2"));
                    }
                }
                if knots[0].0 > w.lo || knots[knots.len() - 1].0 < w.hi {
                    return Err(Error::domain("tabulated knots must cover the window"));
                }
            }
        }
        let estimate = self.k_max as f64 * (self.k_max as f64 + 3.0) * w.length() / self.a as f64;
        if estimate > MAX_SHADOWS {
            return Err(Error::guard(format!(
                "k_max = {} would cast about {estimate:.0} shadows",
                self.k_max
            )));
        }
        Ok(())
    }

    fn is_singular(&self) -> bool {
        matches!(&self.intercept, Intercept::Linear { c1, c2 } if c1.is_zero() && c2.is_zero())
    }

    fn passes_filter(&self, k: u64, m: i64) -> bool {
        let n = (k as i128) * (k as i128) + m as i128;
        n.rem_euclid(self.a as i128) == self.b as i128
    }

    /// `c(x) + 2kx` in double precision, for bracketing `m`.
    fn ray_f64(&self, k: u64, x: f64) -> f64 {
        let c = match &self.intercept {
            Intercept::Parabolic => x * x,
            Intercept::Linear { c1, c2 } => c1.to_dd().to_f64() + c2.to_dd().to_f64() * x,
            Intercept::Tabulated(knots) => Intercept::tabulated_value(knots, x),
        };
        c + 2.0 * k as f64 * x
    }

    /// The `x` where the ray through `(k, m)` meets the screen.
    fn solve(&self, k: u64, m: i64) -> Option<Dd> {
        match &self.intercept {
            Intercept::Parabolic => {
                let k = Dd::from_u128(k as u128);
                let mm = Dd::from_i128(m as i128);
                if m < 1 {
                    return None;
                }
                // √(k²+m) − k without cancellation
                Some(mm / ((k * k + mm).sqrt() + k))
            }
            Intercept::Linear { c1, c2 } => {
                Some(
                    (Dd::from_i128(m as i128) - c1.to_dd())
                        / (Dd::from_u128(2 * k as u128) + c2.to_dd()),
                )
            }
            Intercept::Tabulated(_) => {
                let target = m as f64;
                let (w_lo, w_hi) = (self.window.lo, self.window.hi);
                if self.ray_f64(k, w_lo) >= target || self.ray_f64(k, w_hi) <= target {
                    return None;
                }
                let (mut lo, mut hi) = (w_lo, w_hi);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if self.ray_f64(k, mid) < target {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                Some(Dd::from_f64(0.5 * (lo + hi)))
            }
        }
    }

    fn band_shadows(&self, k: u64) -> Vec<Shadow> {
        let (lo, hi) = (Dd::from_f64(self.window.lo), Dd::from_f64(self.window.hi));
        let m_lo = self.ray_f64(k, self.window.lo).floor() as i64 - 1;
        let m_hi = self.ray_f64(k, self.window.hi).ceil() as i64 + 1;
        (m_lo..=m_hi)
            .filter(|&m| self.passes_filter(k, m))
            .filter_map(|m| {
                let x = self.solve(k, m)?;
                (x > lo && x < hi).then_some(Shadow { x, k, m })
            })
            .collect()
    }

    /// Exact test whether the ray through some filtered lattice point hits `x`.
    /// `None` when the intercept is not given exactly.
    fn shadow_at_rational(&self, x: Rational) -> Option<bool> {
        let (p, q) = (x.numer() as i128, x.denom() as i128);
        match &self.intercept {
            Intercept::Parabolic => Some(false),
            Intercept::Linear { c1, c2 } => {
                let (n1, d1) = c1.exact()?;
                let (n2, d2) = c2.exact()?;
                // m·d1·d2·q = n1·d2·q + (2k·d2 + n2)·p·d1
                let den = d1 * d2 * q;
                Some((1..=self.k_max).any(|k| {
                    let num = n1 * d2 * q + (2 * k as i128 * d2 + n2) * p * d1;
                    num % den == 0 && self.passes_filter(k, (num / den) as i64)
                }))
            }
            Intercept::Tabulated(_) => None,
        }
    }

    fn rational_shadows(&self) -> Vec<Rational> {
        let mut out: Vec<Rational> = (1..=self.k_max)
            .into_par_iter()
            .flat_map_iter(|k| {
                self.band_shadows(k)
                    .into_iter()
                    .filter_map(move |s| Rational::new(s.m as u64, 2 * k).ok())
            })
            .collect();
        out.par_sort_unstable();
        out.dedup();
        out
    }
}

/// The shadow of lattice point `(k, m)` at screen coordinate `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Shadow {
    pub x: Dd,
    pub k: u64,
    pub m: i64,
}

/// A lit interval between consecutive shadows, or between a shadow and the
/// window edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IlluminationSegment {
    pub x_lo: Dd,
    pub x_hi: Dd,
    pub raw_length: Dd,
    /// `2(k_max + x_mid)·raw_length`.
    pub scaled_length: Dd,
    /// `None` at the window edge.
    pub lower: Option<Shadow>,
    pub upper: Option<Shadow>,
}

/// All shadows strictly inside the window, sorted by `x`.
pub fn shadow_points(scene: &OrchardScene) -> Result<Vec<Shadow>> {
    scene.validate()?;
    if scene.is_singular() {
        return Err(Error::SingularIntercept {
            rational_shadows: scene.rational_shadows(),
        });
    }
    let mut shadows: Vec<Shadow> = (1..=scene.k_max)
        .into_par_iter()
        .flat_map_iter(|k| scene.band_shadows(k))
        .collect();
    shadows.par_sort_unstable_by(|s, t| {
        s.x.total_cmp(&t.x)
            .then(s.k.cmp(&t.k))
            .then(s.m.cmp(&t.m))
    });
    Ok(shadows)
}

/// The window minus the shadows, as sorted segments of positive length.
pub fn illumination_pattern(scene: &OrchardScene) -> Result<Vec<IlluminationSegment>> {
    let shadows = shadow_points(scene)?;
    let two_k = Dd::from_u128(2 * scene.k_max as u128);
    let edges = std::iter::once((Dd::from_f64(scene.window.lo), None))
        .chain(shadows.iter().map(|s| (s.x, Some(*s))))
        .chain(std::iter::once((Dd::from_f64(scene.window.hi), None)))
        .collect::<Vec<_>>();
    Ok(edges
        .windows(2)
        .filter_map(|w| {
            let ((x_lo, lower), (x_hi, upper)) = (w[0], w[1]);
            let raw_length = x_hi - x_lo;
            if raw_length.is_zero() {
                return None;
            }
            let scale = two_k + x_lo + x_hi;
            Some(IlluminationSegment {
                x_lo,
                x_hi,
                raw_length,
                scaled_length: raw_length * scale,
                lower,
                upper,
            })
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PointStatus {
    /// Inside a segment bounded by shadows on both sides.
    Lit,
    /// A shadow falls exactly on the point.
    Singular,
    /// The containing segment touches the window edge.
    Boundary,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrchardComparison {
    pub x: Rational,
    pub status: PointStatus,
    /// Scaled length of the containing segment (the wrap-around pair at the
    /// endpoints of a full parabolic window).
    pub scaled_length: Option<Dd>,
    /// Unscaled length of the same segment or pair.
    pub raw_length: Option<Dd>,
    pub closed_form: Rational,
    pub relative_error: Option<f64>,
}

/// Pairs each Farey point of the window with its segment and the closed form.
pub fn compare_to_closed_form(scene: &OrchardScene, max_q: u64) -> Result<Vec<OrchardComparison>> {
    let parabolic = match &scene.intercept {
        Intercept::Parabolic => true,
        Intercept::Linear { .. } => false,
        Intercept::Tabulated(_) => {
            return Err(Error::domain("closed-form comparison needs a parabolic or linear intercept"))
        }
    };
    if !parabolic && scene.a != 1 {
        return Err(Error::domain("linear scenes are compared without dilution only"));
    }
    let segments = illumination_pattern(scene)?;
    let wrap = match (segments.first(), segments.last()) {
        (Some(first), Some(last)) if parabolic && scene.window.is_unit() && segments.len() > 1 => {
            Some((
                first.scaled_length + last.scaled_length,
                first.raw_length + last.raw_length,
            ))
        }
        _ => None,
    };
    let (lo, hi) = (scene.window.lo, scene.window.hi);
    farey_sequence(max_q)?
        .into_iter()
        .filter(|x| x.to_f64() >= lo && x.to_f64() <= hi)
        .map(|x| {
            let closed_form = gap_dilated(x, scene.a, scene.b)?.value;
            let point = |status, lengths: Option<(Dd, Dd)>| {
                let scaled_length = lengths.map(|l| l.0);
                let relative_error = scaled_length.map(|s| {
                    let cf = closed_form.to_f64();
                    (s.to_f64() - cf).abs() / cf
                });
                OrchardComparison {
                    x,
                    status,
                    scaled_length,
                    raw_length: lengths.map(|l| l.1),
                    closed_form,
                    relative_error,
                }
            };
            if x.is_integer_class() || x.to_f64() == lo || x.to_f64() == hi {
                return Ok(match wrap {
                    Some(w) if x.is_integer_class() => point(PointStatus::Lit, Some(w)),
                    _ => point(PointStatus::Boundary, None),
                });
            }
            if scene.shadow_at_rational(x) == Some(true) {
                return Ok(point(PointStatus::Singular, None));
            }
            let xd = Dd::from_u128(x.numer() as u128) / Dd::from_u128(x.denom() as u128);
            let i = segments.partition_point(|s| s.x_hi.total_cmp(&xd) != Ordering::Greater);
            Ok(match segments.get(i) {
                Some(s) if s.x_lo.total_cmp(&xd) == Ordering::Less => {
                    if s.lower.is_none() || s.upper.is_none() {
                        point(PointStatus::Boundary, Some((s.scaled_length, s.raw_length)))
                    } else {
                        point(PointStatus::Lit, Some((s.scaled_length, s.raw_length)))
                    }
                }
                _ => point(PointStatus::Singular, None),
            })
        })
        .collect()
}
