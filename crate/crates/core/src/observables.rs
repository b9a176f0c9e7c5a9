//! Measured quantities: momentum moments, scrambling correlators,
//! autocorrelation, and the quasienergy spectrum.

use num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Result, RotorError};
use crate::params::SystemParams;
use crate::scalar::{two_pi, Scalar};
use crate::state::WaveState;

/// Momentum current `⟨p⟩ = Σ_n p_n |ψ_n|²`.
pub fn mean_momentum<S: Scalar>(state: &WaveState<S>) -> Result<S> {
    let mom = state.momentum_view()?;
    let grid = mom.grid();
    let mut acc = S::zero();
    for (bin, a) in mom.amplitudes().iter().enumerate() {
        acc += grid.momentum(bin) * a.norm_sqr();
    }
    Ok(acc)
}

/// Mean energy `⟨p²⟩ = Σ_n p_n² |ψ_n|²`.
pub fn mean_energy<S: Scalar>(state: &WaveState<S>) -> Result<S> {
    let mom = state.momentum_view()?;
    let grid = mom.grid();
    let mut acc = S::zero();
    for (bin, a) in mom.amplitudes().iter().enumerate() {
        let p = grid.momentum(bin);
        acc += p * p * a.norm_sqr();
    }
    Ok(acc)
}

/// One row of a momentum distribution: signed index, eigenvalue, probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumLine<S> {
    pub index: i64,
    pub momentum: S,
    pub probability: S,
}

/// `|ψ_n|²` for every ladder site, sorted by ascending index.
pub fn momentum_distribution<S: Scalar>(state: &WaveState<S>) -> Result<Vec<MomentumLine<S>>> {
    let mom = state.momentum_view()?;
    let grid = mom.grid();
    let mut lines: Vec<MomentumLine<S>> = mom
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(bin, a)| MomentumLine {
            index: grid.momentum_index(bin),
            momentum: grid.momentum(bin),
            probability: a.norm_sqr(),
        })
        .collect();
    lines.sort_by_key(|l| l.index);
    Ok(lines)
}

/// Variance form of the scrambling correlator:
/// `C(t) ≈ (ε/ℏ)² [⟨p²⟩ - ⟨p⟩²]`.
///
/// This is the headline quantity; the plotted rescaling `C ℏ²/ε²` is exactly
/// the momentum variance.
pub fn otoc_variance<S: Scalar>(state: &WaveState<S>, params: &SystemParams<S>) -> Result<S> {
    let mom = state.momentum_view()?;
    let p = mean_momentum(&mom)?;
    let p2 = mean_energy(&mom)?;
    let ratio = params.epsilon / params.hbar_value();
    Ok(ratio * ratio * (p2 - p * p))
}

/// Translation form of the scrambling correlator:
/// `C(t) = 1 - ⟨ψ(t)| e^{-iεp/ℏ} |ψ(t)⟩ = 1 - Σ_n |ψ_n|² e^{-iεn}`.
///
/// Kept as a diagnostic; its real part is half the variance form at leading
/// order in ε on zero-current states.
pub fn otoc_translation<S: Scalar>(
    state: &WaveState<S>,
    params: &SystemParams<S>,
) -> Result<Complex<S>> {
    let mom = state.momentum_view()?;
    let grid = mom.grid();
    let eps = params.epsilon;
    let mut acc = Complex::new(S::zero(), S::zero());
    for (bin, a) in mom.amplitudes().iter().enumerate() {
        let n = S::from_i64(grid.momentum_index(bin)).unwrap();
        acc += Complex::cis(-eps * n).scale(a.norm_sqr());
    }
    Ok(Complex::new(S::one(), S::zero()) - acc)
}

/// Autocorrelation `A(t_n) = ⟨ψ(t_0)|ψ(t_n)⟩`.
pub fn autocorrelation<S: Scalar>(
    state_t: &WaveState<S>,
    state_0: &WaveState<S>,
) -> Result<Complex<S>> {
    state_0.inner(state_t)
}

/// Probability density over quasienergies `ε_k = 2πk/T`, recovered from the
/// Fourier components of the autocorrelation sequence.
#[derive(Debug, Clone)]
pub struct QuasienergyDistribution<S> {
    /// Quasienergy grid on `[0, 2π)`, resolution `2π/T`.
    pub epsilon: Vec<S>,
    /// `|ψ_ε|² ≥ 0`, normalized to unit total weight.
    pub density: Vec<S>,
}

pub const MIN_SPECTRUM_WINDOW: usize = 256;

/// Discrete Fourier transform of `A(t_n)`, `n = 0..T-1`, onto the quasienergy
/// grid. Since `A(t) = Σ_ε |ψ_ε|² e^{-iεt}`, the weight at `ε_k` is
/// `(1/T) Σ_t A(t) e^{+iε_k t}`; on-grid tones are recovered exactly.
/// Rectangular window, no zero padding. Off-grid tones leak with a complex
/// phase, so the magnitude is taken before the final normalization to unit
/// weight.
pub fn quasienergy_spectrum<S: Scalar>(
    autocorr: &[Complex<S>],
) -> Result<QuasienergyDistribution<S>> {
    let t_window = autocorr.len();
    if t_window < MIN_SPECTRUM_WINDOW {
        return Err(RotorError::WindowTooShort {
            got: t_window,
            min: MIN_SPECTRUM_WINDOW,
        });
    }
    // e^{+iε_k t} is the inverse-transform kernel.
    let mut buf = autocorr.to_vec();
    FftPlanner::new()
        .plan_fft_inverse(t_window)
        .process(&mut buf);
    let inv_t = S::one() / S::from_usize(t_window).unwrap();
    let mut density: Vec<S> = buf.iter().map(|c| c.norm() * inv_t).collect();
    let total: S = density.iter().copied().sum();
    if total > S::zero() {
        for d in &mut density {
            *d /= total;
        }
    }
    let step = two_pi::<S>() * inv_t;
    let epsilon = (0..t_window)
        .map(|k| step * S::from_usize(k).unwrap())
        .collect();
    Ok(QuasienergyDistribution { epsilon, density })
}

/// One significant quasienergy peak.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPeak<S> {
    /// Bin of the peak's density maximum.
    pub bin: usize,
    /// Density summed over the peak's resolution window.
    pub weight: S,
}

impl<S: Scalar> QuasienergyDistribution<S> {
    /// Significant peaks of the density.
    ///
    /// Bins above `threshold_factor` times the median density (with a
    /// `1e-12·max` floor so rounding noise never qualifies when the median
    /// itself is numerically zero) are chained into clusters: gated bins at
    /// most `gap` apart, cyclically, belong to the same cluster. A cluster's
    /// weight is its summed density and its bin is the density maximum; this
    /// absorbs the leakage skirt of an off-grid tone and any satellite state
    /// inside one resolution cluster. Only clusters carrying at least a third
    /// of the strongest cluster's weight count as significant, so a single
    /// dominant quasienergy state reads as one peak even when minor Floquet
    /// overlaps dot the spectrum.
    pub fn peaks(&self, threshold_factor: S, gap: usize) -> Vec<SpectralPeak<S>> {
        let n = self.density.len();
        if n == 0 {
            return Vec::new();
        }
        let mut sorted = self.density.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = if n % 2 == 0 {
            (sorted[n / 2 - 1] + sorted[n / 2]) * S::from_f64_lossy(0.5)
        } else {
            sorted[n / 2]
        };
        let max = sorted[n - 1];
        let threshold = (threshold_factor * median).max(max * S::from_f64_lossy(1e-12));
        let gap = gap.max(1).min(n / 2);

        let gated: Vec<usize> = (0..n).filter(|&k| self.density[k] > threshold).collect();
        if gated.is_empty() {
            return Vec::new();
        }
        // chain gated bins into clusters, then merge across the wrap point
        let mut clusters: Vec<Vec<usize>> = Vec::new();
        for &k in &gated {
            match clusters.last_mut() {
                Some(cluster) if k - cluster.last().unwrap() <= gap => cluster.push(k),
                _ => clusters.push(vec![k]),
            }
        }
        if clusters.len() > 1 {
            let first_bin = clusters[0][0];
            let last_bin = *clusters.last().unwrap().last().unwrap();
            if n - last_bin + first_bin <= gap {
                let first = clusters.remove(0);
                clusters.last_mut().unwrap().extend(first);
            }
        }

        let mut peaks: Vec<SpectralPeak<S>> = clusters
            .into_iter()
            .map(|cluster| {
                let weight = cluster.iter().map(|&k| self.density[k]).sum();
                let bin = cluster
                    .into_iter()
                    .max_by(|&a, &b| self.density[a].partial_cmp(&self.density[b]).unwrap())
                    .unwrap();
                SpectralPeak { bin, weight }
            })
            .collect();
        let heaviest = peaks
            .iter()
            .map(|p| p.weight)
            .fold(S::zero(), |a, b| a.max(b));
        let cut = heaviest / S::from_f64_lossy(3.0);
        peaks.retain(|p| p.weight >= cut);
        peaks.sort_by_key(|p| p.bin);
        peaks
    }
}

/// Per-kick record of every observable the scenarios need.
#[derive(Debug, Clone, Default)]
pub struct TimeSeries<S> {
    pub time: Vec<u64>,
    pub p_mean: Vec<S>,
    pub p2_mean: Vec<S>,
    pub otoc_var: Vec<S>,
    pub otoc_trans: Vec<Complex<S>>,
    pub autocorr: Vec<Complex<S>>,
}

impl<S: Scalar> TimeSeries<S> {
    pub fn new() -> Self {
        Self {
            time: Vec::new(),
            p_mean: Vec::new(),
            p2_mean: Vec::new(),
            otoc_var: Vec::new(),
            otoc_trans: Vec::new(),
            autocorr: Vec::new(),
        }
    }

    pub fn with_capacity(n: usize) -> Self {
        Self {
            time: Vec::with_capacity(n),
            p_mean: Vec::with_capacity(n),
            p2_mean: Vec::with_capacity(n),
            otoc_var: Vec::with_capacity(n),
            otoc_trans: Vec::with_capacity(n),
            autocorr: Vec::with_capacity(n),
        }
    }

    pub fn len(&self) -> usize {
        self.time.len()
    }

    pub fn is_empty(&self) -> bool {
        self.time.is_empty()
    }

    /// Measures every observable of `state` against the reference `initial`
    /// state and appends one row at kick `t`.
    pub fn record(
        &mut self,
        t: u64,
        state: &WaveState<S>,
        initial: &WaveState<S>,
        params: &SystemParams<S>,
    ) -> Result<()> {
        if let Some(&last) = self.time.last() {
            if t <= last {
                return Err(RotorError::SeriesShape);
            }
        }
        let mom = state.momentum_view()?;
        self.time.push(t);
        self.p_mean.push(mean_momentum(&mom)?);
        self.p2_mean.push(mean_energy(&mom)?);
        self.otoc_var.push(otoc_variance(&mom, params)?);
        self.otoc_trans.push(otoc_translation(&mom, params)?);
        self.autocorr.push(autocorrelation(&mom, initial)?);
        Ok(())
    }

    pub fn check_shape(&self) -> Result<()> {
        let n = self.time.len();
        if self.p_mean.len() != n
            || self.p2_mean.len() != n
            || self.otoc_var.len() != n
            || self.otoc_trans.len() != n
            || self.autocorr.len() != n
        {
            return Err(RotorError::SeriesShape);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::AngularGrid;
    use crate::params::HbarEff;
    use crate::propagator::{resonance_state, Propagator};
    use crate::scalar::four_pi;
    use std::f64::consts::PI;

    fn resonant_params(k: f64, alpha: f64, phi: f64, g: f64) -> SystemParams<f64> {
        SystemParams::new(k, alpha, phi, g, HbarEff::Resonant).unwrap()
    }

    #[test]
    fn initial_state_moments() {
        let grid = AngularGrid::new(256, four_pi::<f64>()).unwrap();
        let state = WaveState::even_initial(&grid);
        assert!(mean_momentum(&state).unwrap().abs() < 1e-12);
        let p2 = mean_energy(&state).unwrap();
        assert!((p2 - 16.0 * PI * PI).abs() < 1e-10, "p2 = {p2}");
    }

    #[test]
    fn resonance_current_matches_law_at_t100() {
        // ⟨p⟩ = -α cos(φ) K t = -100√2 for K=1, α=2, φ=π/4, t=100.
        let params = resonant_params(1.0, 2.0, PI / 4.0, 10.0);
        let grid = AngularGrid::new(4096, params.hbar_value()).unwrap();
        let state = resonance_state(&params, 100, &grid).unwrap();
        let p = mean_momentum(&state).unwrap();
        assert!((p - (-141.4213562373095)).abs() < 1e-4, "p = {p}");
    }

    #[test]
    fn resonance_current_vanishes_at_phi_half_pi() {
        let params = resonant_params(1.0, 2.0, PI / 2.0, 10.0);
        let grid = AngularGrid::new(4096, params.hbar_value()).unwrap();
        for t in [10u64, 100] {
            let state = resonance_state(&params, t, &grid).unwrap();
            let p = mean_momentum(&state).unwrap();
            assert!(p.abs() < 1e-6, "t = {t}, p = {p}");
        }
    }

    #[test]
    fn resonance_energy_matches_law_at_t100() {
        // Coefficient (3/4 + 2α²)K² + (2/π)αKg sin φ + g²/2π² = 22.819222…
        let params = resonant_params(1.0, 2.0, PI / 4.0, 10.0);
        let grid = AngularGrid::new(4096, params.hbar_value()).unwrap();
        let state = resonance_state(&params, 100, &grid).unwrap();
        let p2 = mean_energy(&state).unwrap();
        let expect = 22.819222343687947 * 1e4 + 16.0 * PI * PI;
        assert!(
            ((p2 - expect) / expect).abs() < 1e-6,
            "p2 = {p2}, expect = {expect}"
        );
    }

    #[test]
    fn energy_constant_for_free_rotor() {
        let params = SystemParams::new(0.0, 0.0, 0.0, 0.0, HbarEff::Value(1.0)).unwrap();
        let grid = AngularGrid::<f64>::new(128, 1.0).unwrap();
        let prop = Propagator::new(&grid, &params).unwrap();
        let mut state = WaveState::even_initial(&grid);
        let e0 = mean_energy(&state).unwrap();
        for _ in 0..20 {
            state = prop.step(state).unwrap();
        }
        assert!((mean_energy(&state).unwrap() - e0).abs() < 1e-12);
    }

    #[test]
    fn distribution_sums_to_one_and_orders_indices() {
        let params = resonant_params(1.0, 2.0, 0.3, 4.0);
        let grid = AngularGrid::new(512, params.hbar_value()).unwrap();
        let state = resonance_state(&params, 30, &grid).unwrap();
        let dist = momentum_distribution(&state).unwrap();
        let total: f64 = dist.iter().map(|l| l.probability).sum();
        assert!((total - 1.0).abs() < 1e-10);
        for w in dist.windows(2) {
            assert_eq!(w[1].index, w[0].index + 1);
        }
        assert_eq!(dist[0].index, -256);
    }

    #[test]
    fn initial_distribution_weights() {
        let grid = AngularGrid::new(64, 1.0).unwrap();
        let dist = momentum_distribution::<f64>(&WaveState::even_initial(&grid)).unwrap();
        for line in dist {
            if line.index.abs() == 1 {
                assert!((line.probability - 0.5).abs() < 1e-13);
            } else {
                assert!(line.probability < 1e-12);
            }
        }
    }

    #[test]
    fn distribution_symmetric_at_phi_half_pi() {
        // Reflection θ → π-θ maps the φ=π/2 closed-form state onto ±ψ_{-n},
        // so the momentum distribution is exactly even; the φ=0 ratchet tilts
        // it to negative momenta instead.
        let grid = AngularGrid::new(2048, four_pi::<f64>()).unwrap();
        let sym = resonance_state(&resonant_params(1.0, 2.0, PI / 2.0, 10.0), 100, &grid).unwrap();
        let dist = momentum_distribution(&sym).unwrap();
        let n = dist.len();
        let mut max_asym = 0.0f64;
        // index n sits at position n + N/2 in the sorted vector
        for idx in 1..(n as i64 / 2) {
            let plus = dist[(idx + n as i64 / 2) as usize].probability;
            let minus = dist[(n as i64 / 2 - idx) as usize].probability;
            max_asym = max_asym.max((plus - minus).abs());
        }
        assert!(max_asym < 1e-8, "max asymmetry {max_asym}");

        let tilted = resonance_state(&resonant_params(1.0, 2.0, 0.0, 10.0), 100, &grid).unwrap();
        let p = mean_momentum(&tilted).unwrap();
        assert!((p - (-200.0)).abs() < 1e-4, "φ=0 current {p}");
    }

    #[test]
    fn otoc_variance_of_initial_state_is_epsilon_squared() {
        let params = resonant_params(1.0, 2.0, 0.3, 10.0);
        let grid = AngularGrid::new(128, params.hbar_value()).unwrap();
        let state = WaveState::even_initial(&grid);
        let c = otoc_variance(&state, &params).unwrap();
        let eps = params.epsilon;
        assert!((c - eps * eps).abs() < 1e-24, "c = {c:e}");
    }

    #[test]
    fn otoc_variance_matches_law_at_t100() {
        let params = resonant_params(1.0, 2.0, PI / 4.0, 10.0);
        let grid = AngularGrid::new(4096, params.hbar_value()).unwrap();
        let state = resonance_state(&params, 100, &grid).unwrap();
        let c = otoc_variance(&state, &params).unwrap();
        let eps_over = params.epsilon / (4.0 * PI);
        let expect = eps_over * eps_over * 20.81922234368795 * 1e4 + params.epsilon * params.epsilon;
        assert!(((c - expect) / expect).abs() < 1e-3, "c = {c:e}, expect = {expect:e}");
    }

    #[test]
    fn otoc_zero_epsilon() {
        let params = resonant_params(1.0, 2.0, 0.3, 10.0)
            .with_epsilon(0.0)
            .unwrap();
        let grid = AngularGrid::new(128, params.hbar_value()).unwrap();
        let state = WaveState::even_initial(&grid);
        assert_eq!(otoc_variance(&state, &params).unwrap(), 0.0);
        assert_eq!(otoc_translation(&state, &params).unwrap().norm(), 0.0);
    }

    #[test]
    fn otoc_translation_initial_state() {
        // Two modes at n = ±1: C = 1 - cos(ε) ≈ ε²/2.
        let params = resonant_params(1.0, 2.0, 0.3, 10.0)
            .with_epsilon(1e-5)
            .unwrap();
        let grid = AngularGrid::new(128, params.hbar_value()).unwrap();
        let state = WaveState::even_initial(&grid);
        let c = otoc_translation(&state, &params).unwrap();
        assert!((c.re - 5.000000413701855e-11).abs() < 1e-16, "re = {:e}", c.re);
        assert!(c.im.abs() < 1e-16);
    }

    #[test]
    fn otoc_translation_real_part_nonnegative() {
        let params = resonant_params(1.4, -1.0, 2.0, 6.0)
            .with_epsilon(0.3)
            .unwrap();
        let grid = AngularGrid::new(512, params.hbar_value()).unwrap();
        for t in [0u64, 7, 40] {
            let state = resonance_state(&params, t, &grid).unwrap();
            let c = otoc_translation(&state, &params).unwrap();
            assert!(c.re >= 0.0, "t = {t}, re = {}", c.re);
        }
    }

    #[test]
    fn autocorrelation_basics() {
        let params = resonant_params(1.0, 2.0, 0.9, 3.0);
        let grid = AngularGrid::new(256, params.hbar_value()).unwrap();
        let init = WaveState::even_initial(&grid);
        let a0 = autocorrelation(&init, &init).unwrap();
        assert!((a0.re - 1.0).abs() < 1e-13 && a0.im.abs() < 1e-13);
        for t in [5u64, 50] {
            let state = resonance_state(&params, t, &grid).unwrap();
            let a = autocorrelation(&state, &init).unwrap();
            assert!(a.norm() <= 1.0 + 1e-12, "t = {t}, |A| = {}", a.norm());
        }
    }

    #[test]
    fn autocorrelation_of_frozen_evolution_is_one() {
        // K → 0, g = 0 at resonance: the Floquet map is the identity.
        let params = resonant_params(0.0, 0.0, 0.0, 0.0);
        let grid = AngularGrid::new(64, params.hbar_value()).unwrap();
        let prop = Propagator::new(&grid, &params).unwrap();
        let init = WaveState::even_initial(&grid);
        let mut state = init.clone();
        for _ in 0..10 {
            state = prop.step(state).unwrap();
        }
        let a = autocorrelation(&state, &init).unwrap();
        assert!((a.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn spectrum_recovers_single_tone() {
        let t_window = 512usize;
        let k0 = 37usize;
        let eps0 = 2.0 * PI * k0 as f64 / t_window as f64;
        let series: Vec<Complex<f64>> = (0..t_window)
            .map(|t| Complex::cis(-eps0 * t as f64))
            .collect();
        let spec = quasienergy_spectrum(&series).unwrap();
        assert!((spec.density[k0] - 1.0).abs() < 1e-12);
        let rest: f64 = spec
            .density
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != k0)
            .map(|(_, d)| *d)
            .sum();
        assert!(rest < 1e-12);
        assert!((spec.epsilon[k0] - eps0).abs() < 1e-12);
    }

    #[test]
    fn spectrum_recovers_two_tone_weights() {
        let t_window = 1024usize;
        let (k1, k2) = (100usize, 700usize);
        let (w1, w2) = (0.7, 0.3);
        let series: Vec<Complex<f64>> = (0..t_window)
            .map(|t| {
                let t = t as f64;
                Complex::cis(-2.0 * PI * k1 as f64 / t_window as f64 * t).scale(w1)
                    + Complex::cis(-2.0 * PI * k2 as f64 / t_window as f64 * t).scale(w2)
            })
            .collect();
        let spec = quasienergy_spectrum(&series).unwrap();
        assert!((spec.density[k1] - w1).abs() < 1e-12);
        assert!((spec.density[k2] - w2).abs() < 1e-12);
        let peaks = spec.peaks(5.0, 8);
        let bins: Vec<usize> = peaks.iter().map(|p| p.bin).collect();
        assert_eq!(bins, vec![k1, k2]);
        assert!((peaks[0].weight - w1).abs() < 1e-12);
        assert!((peaks[1].weight - w2).abs() < 1e-12);
        let total: f64 = spec.density.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn spectrum_rejects_short_windows() {
        let series = vec![Complex::new(1.0f64, 0.0); 100];
        assert!(matches!(
            quasienergy_spectrum(&series),
            Err(RotorError::WindowTooShort { .. })
        ));
    }

    #[test]
    fn series_records_monotonically() {
        let params = resonant_params(1.0, 2.0, 0.4, 2.0);
        let grid = AngularGrid::new(128, params.hbar_value()).unwrap();
        let init = WaveState::even_initial(&grid);
        let mut series = TimeSeries::new();
        series.record(0, &init, &init, &params).unwrap();
        let state = resonance_state(&params, 1, &grid).unwrap();
        series.record(1, &state, &init, &params).unwrap();
        assert!(series.record(1, &state, &init, &params).is_err());
        series.check_shape().unwrap();
        assert_eq!(series.len(), 2);
        assert!((series.autocorr[0].re - 1.0).abs() < 1e-12);
    }
}
