//! Width statistics away from rational spikes.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use std::sync::OnceLock;

use super::{scaled_gap_real, search::gap_at_integer as integer_gap, SequenceSpec};
use crate::error::{Error, Result};
use crate::ratmod::integer_root;

/// Default ceiling on `N` for full-sort scans.
pub const DEFAULT_MAX_SORT_N: u64 = 10_000_000;
/// Overrides the full-sort ceiling as a memory budget in MiB (8 bytes per point).
pub const MEMORY_ENV: &str = "GAPS_MAX_MEMORY_MB";
/// Sampled scans refuse when `samples · bands` exceeds this.
pub const MAX_SAMPLED_WORK: u128 = 20_000_000_000;

const GOLDEN: f64 = 0.618_033_988_749_894_9;
const BIN_WIDTH: f64 = 0.1;
const TAIL_WINDOW: (f64, f64) = (3.0, 30.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScanMode {
    /// Every admissible fractional part, sorted, all consecutive gaps.
    FullSort,
    /// Gaps around golden-ratio sample points.
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackgroundOptions {
    /// `None` picks full sort when `N` is under the ceiling.
    pub mode: Option<ScanMode>,
    pub sample_budget: usize,
    /// Full-sort ceiling; falls back to the environment, then the default.
    pub max_sort_n: Option<u64>,
    /// First golden-ratio multiple used for samples.
    pub seed_index: u64,
}

impl Default for BackgroundOptions {
    fn default() -> Self {
        BackgroundOptions {
            mode: None,
            sample_budget: 1000,
            max_sort_n: None,
            seed_index: 1,
        }
    }
}

impl BackgroundOptions {
    pub fn sort_limit(&self) -> u64 {
        if let Some(n) = self.max_sort_n {
            return n;
        }
        std::env::var(MEMORY_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<u64>().ok())
            .map(|mb| mb.saturating_mul(1 << 20) / 8)
            .unwrap_or(DEFAULT_MAX_SORT_N)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    /// Bin edges in scaled width.
    pub lo: f64,
    pub hi: f64,
    pub count: u64,
    /// `count / (total · (hi − lo))`.
    pub density: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackgroundReport {
    pub mode: ScanMode,
    pub n_max: u64,
    pub scale: f64,
    /// Number of widths measured, zeros included.
    pub count: u64,
    /// Widths that collapsed to zero in double precision.
    pub zero_widths: u64,
    pub mean_raw: f64,
    pub mean_scaled: f64,
    pub median_scaled: f64,
    pub p95_scaled: f64,
    /// Log-spaced bins, `0.1` decades wide, over nonzero scaled widths.
    pub bins: Vec<HistogramBin>,
    /// Slope of log density against log `t`, `t = width / mean` in `[3, 30]`.
    pub power_law_slope: Option<f64>,
    /// Decay rate of an exponential density fitted on the same window.
    pub exponential_rate: Option<f64>,
}

/// Histogram of scaled gap widths by full sort or golden-ratio sampling.
pub fn background_scan(spec: &SequenceSpec, options: &BackgroundOptions) -> Result<BackgroundReport> {
    let limit = options.sort_limit();
    let mode = options.mode.unwrap_or(if spec.n_max <= limit {
        ScanMode::FullSort
    } else {
        ScanMode::Sampled
    });
    let scale = spec.scale().to_f64();
    let raw = match mode {
        ScanMode::FullSort => {
            if spec.n_max > limit {
                return Err(Error::guard(format!(
                    "full sort of N = {} exceeds the limit {limit}; raise --max-sort-n or {MEMORY_ENV}, or use sampling",
                    spec.n_max
                )));
            }
            sorted_widths(spec)?
        }
        ScanMode::Sampled => sampled_widths(spec, options)?,
    };
    Ok(summarize(mode, spec.n_max, scale, raw))
}

/// `{n^(1/α)}` as `(n − k^α) / Σ n^(i/α) k^(α−1−i)`.
fn fraction(n: u64, k: u64, alpha: u32) -> f64 {
    let r = if alpha == 2 {
        (n as f64).sqrt()
    } else {
        (n as f64).powf(1.0 / alpha as f64)
    };
    let kf = k as f64;
    let mut sum = 0.0;
    let mut r_pow = 1.0;
    for i in 0..alpha {
        sum += r_pow * kf.powi((alpha - 1 - i) as i32);
        r_pow *= r;
    }
    (n - k.pow(alpha)) as f64 / sum
}

fn sorted_widths(spec: &SequenceSpec) -> Result<Vec<f64>> {
    let start = if spec.b == 0 { spec.a } else { spec.b };
    let count = if start > spec.n_max {
        0
    } else {
        (spec.n_max - start) / spec.a + 1
    };
    let mut fracs: Vec<f64> = (0..count)
        .into_par_iter()
        .filter_map(|t| {
            let n = start + t * spec.a;
            let k = integer_root(n as u128, spec.alpha).ok()? as u64;
            (k.pow(spec.alpha) != n).then(|| fraction(n, k, spec.alpha))
        })
        .collect();
    if fracs.len() < 2 {
        return Err(Error::domain(format!(
            "N = {} leaves fewer than two admissible points",
            spec.n_max
        )));
    }
    fracs.par_sort_unstable_by(f64::total_cmp);
    let mut widths: Vec<f64> = fracs.windows(2).map(|w| w[1] - w[0]).collect();
    widths.push(1.0 - fracs[fracs.len() - 1] + fracs[0]);
    Ok(widths)
}

fn sampled_widths(spec: &SequenceSpec, options: &BackgroundOptions) -> Result<Vec<f64>> {
    if options.sample_budget == 0 {
        return Err(Error::domain("sample budget must be positive"));
    }
    let work = options.sample_budget as u128 * spec.band_count() as u128;
    if work > MAX_SAMPLED_WORK {
        return Err(Error::guard(format!(
            "{} samples at N = {} exceed the work budget; lower --samples",
            options.sample_budget, spec.n_max
        )));
    }
    let wrap = OnceLock::new();
    (0..options.sample_budget as u64)
        .into_par_iter()
        .map(|j| {
            let x = golden_point(options.seed_index + j);
            match scaled_gap_real(spec, x) {
                Ok(s) => Ok(s.measurement.width.to_f64()),
                // nothing on one side: the point sits in the gap across the integers
                Err(Error::UnboundedGap { .. }) => wrap
                    .get_or_init(|| integer_gap(spec).map(|m| m.width.to_f64()))
                    .clone(),
                Err(e) => Err(e),
            }
        })
        .collect()
}

/// Fractional part of `j·φ`, kept away from the endpoints.
pub fn golden_point(j: u64) -> f64 {
    let x = (j as f64 * GOLDEN).fract();
    x.clamp(1e-9, 1.0 - 1e-9)
}

fn summarize(mode: ScanMode, n_max: u64, scale: f64, raw: Vec<f64>) -> BackgroundReport {
    let count = raw.len() as u64;
    let mean_raw = raw.iter().sum::<f64>() / count as f64;
    let mut scaled: Vec<f64> = raw.iter().map(|w| w * scale).collect();
    scaled.sort_unstable_by(f64::total_cmp);
    let quantile = |p: f64| scaled[((count - 1) as f64 * p).round() as usize];
    let zero_widths = scaled.iter().take_while(|&&w| w <= 0.0).count() as u64;
    let positive = &scaled[zero_widths as usize..];
    let mean_scaled = mean_raw * scale;

    BackgroundReport {
        mode,
        n_max,
        scale,
        count,
        zero_widths,
        mean_raw,
        mean_scaled,
        median_scaled: quantile(0.5),
        p95_scaled: quantile(0.95),
        bins: log_histogram(positive, 1.0),
        power_law_slope: tail_fit(positive, mean_scaled, |t| t.log10()),
        exponential_rate: tail_fit(positive, mean_scaled, |t| t).map(|s| -s / std::f64::consts::LOG10_E),
    }
}

/// Bins `0.1` decades wide; `values` sorted and positive.
fn log_histogram(values: &[f64], unit: f64) -> Vec<HistogramBin> {
    let Some((&first, &last)) = values.first().zip(values.last()) else {
        return Vec::new();
    };
    let index = |v: f64| ((v / unit).log10() / BIN_WIDTH).floor() as i64;
    let (lo_i, hi_i) = (index(first), index(last));
    let mut counts = vec![0u64; (hi_i - lo_i + 1) as usize];
    for &v in values {
        counts[(index(v) - lo_i) as usize] += 1;
    }
    let total = values.len() as f64;
    counts
        .into_iter()
        .enumerate()
        .map(|(i, count)| {
            let e = (lo_i + i as i64) as f64 * BIN_WIDTH;
            let (lo, hi) = (unit * 10f64.powf(e), unit * 10f64.powf(e + BIN_WIDTH));
            HistogramBin {
                lo,
                hi,
                count,
                density: count as f64 / (total * (hi - lo)),
            }
        })
        .collect()
}

/// Least-squares slope of `log10 density` against `abscissa(t)` over the tail
/// window of the histogram of `t = width / mean`.
fn tail_fit(values: &[f64], mean: f64, abscissa: impl Fn(f64) -> f64) -> Option<f64> {
    let bins = log_histogram(values, mean);
    let points: Vec<(f64, f64)> = bins
        .iter()
        .map(|b| (b.lo / mean, b.hi / mean, b))
        .filter(|(lo, hi, b)| b.count > 0 && *lo >= TAIL_WINDOW.0 * 0.999 && *hi <= TAIL_WINDOW.1 * 1.001)
        .map(|(lo, hi, b)| (abscissa((lo * hi).sqrt()), (b.density * mean).log10()))
        .collect();
    if points.len() < 3 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_full_sort() {
        let spec = SequenceSpec::square_roots(400);
        let r = background_scan(&spec, &BackgroundOptions::default()).unwrap();
        assert_eq!(r.mode, ScanMode::FullSort);
        assert_eq!(r.count, 400 - 20);
        assert!(!r.bins.is_empty());
        assert_eq!(r.zero_widths, 0);
        assert!(r.bins.iter().all(|b| b.lo > 0.0));
        assert!((r.mean_raw - 1.0 / 380.0).abs() < 1e-12);
    }

    #[test]
    fn fraction_is_accurate() {
        assert!((fraction(15, 3, 2) - (15f64.sqrt() - 3.0)).abs() < 1e-15);
        assert!((fraction(63, 3, 3) - (63f64.cbrt() - 3.0)).abs() < 1e-14);
    }

    #[test]
    fn guard_refuses_forced_sort() {
        let spec = SequenceSpec::square_roots(1000);
        let opts = BackgroundOptions {
            mode: Some(ScanMode::FullSort),
            max_sort_n: Some(999),
            ..Default::default()
        };
        assert!(matches!(background_scan(&spec, &opts), Err(Error::Guard(_))));
        let opts = BackgroundOptions {
            max_sort_n: Some(999),
            sample_budget: 50,
            ..Default::default()
        };
        let r = background_scan(&spec, &opts).unwrap();
        assert_eq!(r.mode, ScanMode::Sampled);
        assert_eq!(r.count, 50);
    }

    #[test]
    fn golden_points_in_unit_interval() {
        for j in 0..1000 {
            let x = golden_point(j);
            assert!(x > 0.0 && x < 1.0);
        }
    }

    #[test]
    fn exponential_fit_recovers_rate() {
        // quantiles of an exponential with mean 1
        let m = 200_000;
        let v: Vec<f64> = (1..m).map(|i| -(1.0 - i as f64 / m as f64).ln()).collect();
        let rate = tail_fit(&v, 1.0, |t| t).map(|s| -s / std::f64::consts::LOG10_E).unwrap();
        assert!((rate - 1.0).abs() < 0.05, "{rate}");
    }
}
