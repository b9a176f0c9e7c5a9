//! Least-squares extraction of growth rates, localization lengths, critical
//! times, and time averages from recorded series.

use crate::error::{Result, RotorError};
use crate::observables::MomentumLine;
use crate::scalar::Scalar;

/// Outcome of a one-parameter fit.
#[derive(Debug, Clone, Copy)]
pub struct FitResult<S> {
    /// The fitted parameter (ξ, γ, G, R, or t_c).
    pub value: S,
    /// Regression standard error of the parameter.
    pub stderr: S,
    /// Data window the fit used, `[t_lo, t_hi]` or `[p_lo, p_hi]`.
    pub window: (S, S),
    /// Coefficient of determination of the underlying regression.
    pub r_squared: S,
}

/// Default fit window for the quadratic growth rates.
pub const DEFAULT_QUADRATIC_WINDOW: (u64, u64) = (20, 100);

/// Default averaging window for saturated energies.
pub const DEFAULT_AVERAGING_WINDOW: (u64, u64) = (500, 1000);

/// Probability floor applied before taking logarithms of momentum tails.
pub const PROBABILITY_FLOOR: f64 = 1e-30;

const MIN_FIT_POINTS: usize = 10;

/// Plain linear regression `y = a + b x`; returns `(b, stderr_b, r²)`.
fn linear_regression<S: Scalar>(x: &[S], y: &[S]) -> Result<(S, S, S)> {
    let n = x.len();
    if n < 2 {
        return Err(RotorError::DegenerateFit("need at least two points"));
    }
    let nf = S::from_usize(n).unwrap();
    let mean_x = x.iter().copied().sum::<S>() / nf;
    let mean_y = y.iter().copied().sum::<S>() / nf;
    let mut sxx = S::zero();
    let mut sxy = S::zero();
    let mut syy = S::zero();
    for (&xi, &yi) in x.iter().zip(y) {
        let dx = xi - mean_x;
        let dy = yi - mean_y;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx <= S::zero() {
        return Err(RotorError::DegenerateFit("abscissa has zero variance"));
    }
    let slope = sxy / sxx;
    let sse = (syy - slope * sxy).max(S::zero());
    let r_squared = if syy > S::zero() {
        (S::one() - sse / syy).max(S::zero()).min(S::one())
    } else {
        S::one()
    };
    let stderr = if n > 2 {
        (sse / (S::from_usize(n - 2).unwrap() * sxx)).sqrt()
    } else {
        S::zero()
    };
    Ok((slope, stderr, r_squared))
}

fn select_window<S: Scalar>(time: &[u64], values: &[S], window: (u64, u64)) -> (Vec<u64>, Vec<S>) {
    time.iter()
        .zip(values)
        .filter(|(t, _)| **t >= window.0 && **t <= window.1)
        .map(|(t, v)| (*t, *v))
        .unzip()
}

/// Growth rate of a quadratically growing series: least-squares slope of the
/// values against `t²` over the window. An additive constant offset in the
/// data does not bias the slope.
pub fn fit_quadratic_rate<S: Scalar>(
    time: &[u64],
    values: &[S],
    window: (u64, u64),
) -> Result<FitResult<S>> {
    if time.len() != values.len() {
        return Err(RotorError::SeriesShape);
    }
    let (t, v) = select_window(time, values, window);
    if t.len() < 2 {
        return Err(RotorError::FitWindow {
            lo: window.0 as f64,
            hi: window.1 as f64,
            count: t.len(),
            min: 2,
        });
    }
    let x: Vec<S> = t
        .iter()
        .map(|&ti| {
            let tf = S::from_u64(ti).unwrap();
            tf * tf
        })
        .collect();
    let (slope, stderr, r_squared) = linear_regression(&x, &v)?;
    Ok(FitResult {
        value: slope,
        stderr,
        window: (
            S::from_u64(window.0).unwrap(),
            S::from_u64(window.1).unwrap(),
        ),
        r_squared,
    })
}

/// Exponential growth rate: least-squares slope of `ln(values)` against `t`
/// over the window. Values must be strictly positive.
pub fn fit_exponential_rate<S: Scalar>(
    time: &[u64],
    values: &[S],
    window: (u64, u64),
) -> Result<FitResult<S>> {
    if time.len() != values.len() {
        return Err(RotorError::SeriesShape);
    }
    let (t, v) = select_window(time, values, window);
    if t.len() < 2 {
        return Err(RotorError::FitWindow {
            lo: window.0 as f64,
            hi: window.1 as f64,
            count: t.len(),
            min: 2,
        });
    }
    if v.iter().any(|&x| !(x > S::zero())) {
        return Err(RotorError::DegenerateFit(
            "exponential fit needs positive values",
        ));
    }
    let x: Vec<S> = t.iter().map(|&ti| S::from_u64(ti).unwrap()).collect();
    let y: Vec<S> = v.iter().map(|&vi| vi.ln()).collect();
    let (slope, stderr, r_squared) = linear_regression(&x, &y)?;
    Ok(FitResult {
        value: slope,
        stderr,
        window: (
            S::from_u64(window.0).unwrap(),
            S::from_u64(window.1).unwrap(),
        ),
        r_squared,
    })
}

/// Localization length of exponentially decaying momentum tails:
/// `|ψ(p)|² ∝ exp(-|p|/ξ)`.
///
/// Points from both tails with `|p|` inside the window are pooled into one
/// regression of `ln |ψ(p)|²` against `|p|`; `ξ = -1/slope`. The central peak
/// `|p| < 5 ℏ_eff` is always excluded and probabilities are floored at
/// [`PROBABILITY_FLOOR`] before the logarithm.
pub fn fit_localization_length<S: Scalar>(
    distribution: &[MomentumLine<S>],
    window: (S, S),
    hbar_eff: S,
) -> Result<FitResult<S>> {
    let central = S::from_f64_lossy(5.0) * hbar_eff;
    let lo = window.0.max(central);
    let hi = window.1;
    let floor = S::from_f64_lossy(PROBABILITY_FLOOR);
    let mut x = Vec::new();
    let mut y = Vec::new();
    for line in distribution {
        let pa = line.momentum.abs();
        if pa >= lo && pa <= hi {
            let prob = line.probability.max(floor);
            if !(prob > S::zero()) {
                return Err(RotorError::DegenerateFit(
                    "non-positive probability after floor",
                ));
            }
            x.push(pa);
            y.push(prob.ln());
        }
    }
    if x.len() < MIN_FIT_POINTS {
        return Err(RotorError::FitWindow {
            lo: lo.to_f64(),
            hi: hi.to_f64(),
            count: x.len(),
            min: MIN_FIT_POINTS,
        });
    }
    let (slope, stderr, r_squared) = linear_regression(&x, &y)?;
    if !(slope < S::zero()) {
        return Err(RotorError::DegenerateFit("momentum tail is not decaying"));
    }
    let xi = -S::one() / slope;
    Ok(FitResult {
        value: xi,
        // first-order propagation of the slope error through ξ = -1/slope
        stderr: stderr / (slope * slope),
        window: (lo, hi),
        r_squared,
    })
}

/// Tuning knobs for [`detect_critical_time`].
#[derive(Debug, Clone, Copy)]
pub struct CriticalTimeOptions<S> {
    /// Multiple of the baseline plateau that counts as departed.
    pub threshold_factor: S,
    /// Number of consecutive kicks the series must stay above threshold.
    pub run_length: usize,
    /// Width of the centered moving average applied to both series.
    pub smooth_width: usize,
}

impl<S: Scalar> Default for CriticalTimeOptions<S> {
    fn default() -> Self {
        Self {
            threshold_factor: S::from_f64_lossy(2.0),
            run_length: 10,
            smooth_width: 10,
        }
    }
}

fn moving_average<S: Scalar>(values: &[S], width: usize) -> Vec<S> {
    let n = values.len();
    let w = width.max(1);
    let half = w / 2;
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half).min(n - 1);
            let count = S::from_usize(hi - lo + 1).unwrap();
            values[lo..=hi].iter().copied().sum::<S>() / count
        })
        .collect()
}

/// First kick at which the smoothed series exceeds `threshold_factor` times
/// the baseline plateau and stays there for `run_length` consecutive kicks.
///
/// The plateau is the mean of the smoothed baseline over its second half,
/// past the initial filling transient. Returns `None` when the series never
/// departs (the localized case).
pub fn detect_critical_time<S: Scalar>(
    time: &[u64],
    values: &[S],
    baseline: &[S],
    options: &CriticalTimeOptions<S>,
) -> Result<Option<FitResult<S>>> {
    if time.len() != values.len() || baseline.is_empty() {
        return Err(RotorError::SeriesShape);
    }
    let smoothed_base = moving_average(baseline, options.smooth_width);
    let tail = &smoothed_base[smoothed_base.len() / 2..];
    let plateau = tail.iter().copied().sum::<S>() / S::from_usize(tail.len()).unwrap();
    let threshold = options.threshold_factor * plateau;

    let smoothed = moving_average(values, options.smooth_width);
    let run = options.run_length.max(1);
    let mut streak = 0usize;
    for (i, &v) in smoothed.iter().enumerate() {
        if v > threshold {
            streak += 1;
            if streak >= run {
                let start = i + 1 - run;
                let half_width = S::from_usize(options.smooth_width).unwrap()
                    * S::from_f64_lossy(0.5);
                return Ok(Some(FitResult {
                    value: S::from_u64(time[start]).unwrap(),
                    stderr: half_width,
                    window: (
                        S::from_u64(time[start]).unwrap(),
                        S::from_u64(time[i]).unwrap(),
                    ),
                    r_squared: S::one(),
                }));
            }
        } else {
            streak = 0;
        }
    }
    Ok(None)
}

/// Arithmetic mean of the values with `window.0 <= t <= window.1`.
pub fn time_averaged_energy<S: Scalar>(
    time: &[u64],
    values: &[S],
    window: (u64, u64),
) -> Result<S> {
    if time.len() != values.len() {
        return Err(RotorError::SeriesShape);
    }
    let (t, v) = select_window(time, values, window);
    if t.is_empty() {
        return Err(RotorError::FitWindow {
            lo: window.0 as f64,
            hi: window.1 as f64,
            count: 0,
            min: 1,
        });
    }
    Ok(v.iter().copied().sum::<S>() / S::from_usize(v.len()).unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_rate_ignores_offset() {
        let time: Vec<u64> = (0..=120).collect();
        let a = 3.25;
        let b = 157.0;
        let values: Vec<f64> = time.iter().map(|&t| a * (t * t) as f64 + b).collect();
        let fit = fit_quadratic_rate(&time, &values, DEFAULT_QUADRATIC_WINDOW).unwrap();
        assert!((fit.value - a).abs() < 1e-8, "G = {}", fit.value);
        assert!(fit.r_squared > 1.0 - 1e-12);
    }

    #[test]
    fn exponential_rate_exact_recovery() {
        let time: Vec<u64> = (0..=100).collect();
        let values: Vec<f64> = time.iter().map(|&t| (0.3 * t as f64).exp()).collect();
        let fit = fit_exponential_rate(&time, &values, (10, 90)).unwrap();
        assert!((fit.value - 0.3).abs() < 1e-6);
        assert!(fit.stderr < 1e-10);
    }

    #[test]
    fn exponential_rate_rejects_nonpositive() {
        let time: Vec<u64> = (0..10).collect();
        let values = vec![1.0, 2.0, -1.0, 3.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0];
        assert!(fit_exponential_rate(&time, &values, (0, 9)).is_err());
    }

    #[test]
    fn localization_length_recovers_synthetic_exponential() {
        let xi = 5.0;
        let hbar = 1.0;
        let dist: Vec<MomentumLine<f64>> = (-200i64..200)
            .map(|n| {
                let p = n as f64 * hbar;
                MomentumLine {
                    index: n,
                    momentum: p,
                    probability: (-p.abs() / xi).exp(),
                }
            })
            .collect();
        let fit = fit_localization_length(&dist, (0.0, 150.0), hbar).unwrap();
        assert!((fit.value - xi).abs() / xi < 0.01, "ξ = {}", fit.value);
        assert!(fit.r_squared > 0.999);
        // central exclusion zone respected
        assert!(fit.window.0 >= 5.0 * hbar);
    }

    #[test]
    fn localization_length_needs_enough_points() {
        let dist: Vec<MomentumLine<f64>> = (-6i64..6)
            .map(|n| MomentumLine {
                index: n,
                momentum: n as f64,
                probability: (-(n as f64).abs()).exp(),
            })
            .collect();
        assert!(matches!(
            fit_localization_length(&dist, (0.0, 100.0), 1.0),
            Err(RotorError::FitWindow { .. })
        ));
    }

    #[test]
    fn critical_time_none_for_flat_series() {
        let time: Vec<u64> = (0..200).collect();
        let flat = vec![100.0f64; 200];
        let found =
            detect_critical_time(&time, &flat, &flat, &CriticalTimeOptions::default()).unwrap();
        assert!(found.is_none());
    }

    #[test]
    fn critical_time_finds_constructed_jump() {
        let time: Vec<u64> = (0..200).collect();
        let baseline = vec![100.0f64; 200];
        let jumped: Vec<f64> = time
            .iter()
            .map(|&t| if t < 50 { 100.0 } else { 300.0 })
            .collect();
        let found = detect_critical_time(&time, &jumped, &baseline, &CriticalTimeOptions::default())
            .unwrap()
            .expect("jump must be detected");
        // within a smoothing width of the constructed jump
        assert!(
            (found.value - 50.0).abs() <= 10.0,
            "t_c = {}",
            found.value
        );
    }

    #[test]
    fn time_average_of_constant_and_sinusoid() {
        let time: Vec<u64> = (0..1200).collect();
        let constant = vec![42.0f64; 1200];
        let avg = time_averaged_energy(&time, &constant, DEFAULT_AVERAGING_WINDOW).unwrap();
        assert_eq!(avg, 42.0);

        let m = 7.0;
        let amp = 3.0;
        let sin: Vec<f64> = time
            .iter()
            .map(|&t| m + amp * (0.37 * t as f64).sin())
            .collect();
        let avg = time_averaged_energy(&time, &sin, DEFAULT_AVERAGING_WINDOW).unwrap();
        assert!((avg - m).abs() < amp / 500.0 * 10.0, "avg = {avg}");
    }

    #[test]
    fn time_average_rejects_empty_window() {
        let time: Vec<u64> = (0..10).collect();
        let values = vec![1.0f64; 10];
        assert!(time_averaged_energy(&time, &values, (100, 200)).is_err());
    }
}
