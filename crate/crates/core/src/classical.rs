//! Classical limit machinery: Fourier decomposition of the nonlinear kick,
//! the generalized kicked-rotor map with state-dependent strengths, and the
//! hybrid quantum/classical co-evolution.

use num_complex::Complex;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::{Result, RotorError};
use crate::params::SystemParams;
use crate::propagator::{EvolutionReport, Propagator};
use crate::scalar::{two_pi, Scalar};
use crate::state::{Representation, WaveState};

/// Which kick potential enters the nonlinear potential `V(θ,t)` that the
/// classical map is driven by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KickPotentialVariant {
    /// The two-harmonic ratchet `K[sin θ + α sin(2θ + φ)]` of the quantum
    /// model (default; the phase-portrait parameters only exist here).
    #[default]
    Ratchet,
    /// The complex single wave `K[cos θ + i sin θ]`, whose map reduces to the
    /// standard kicked rotor `Δp = K sin θ` at `g = 0`.
    ComplexWave,
}

/// Harmonic kick strengths of the generalized rotor map.
///
/// From the Fourier components `V_n` of `V(θ) = g|ψ(θ)|² + V_K(θ)` against
/// the basis `e^{inθ}/√(2π)`:
///
/// `K_n^r = [Re V_n + Re V_{-n}]/√(2π)`,
/// `K_n^i = [Im V_n - Im V_{-n}]/√(2π)`,
///
/// so that `V(θ) = V_0^r/√(2π) + Σ_{n≥1} [K_n^r cos(nθ) - K_n^i sin(nθ)]`
/// for real potentials. (The relative sign in `K_n^i` is fixed by that
/// reconstruction identity.)
#[derive(Debug, Clone)]
pub struct FourierKickCoefficients<S> {
    /// `K_n^r` for `n = 1..=n_max` (index 0 holds `n = 1`).
    pub k_real: Vec<S>,
    /// `K_n^i` for `n = 1..=n_max`.
    pub k_imag: Vec<S>,
    /// `V_0^r`: recorded for bookkeeping, never enters the force.
    pub v0: S,
    /// Fraction of the force norm carried by harmonics above `n_max`;
    /// monitors the truncation.
    pub tail_force_fraction: S,
}

/// Default truncation order of the harmonic expansion.
pub const DEFAULT_N_MAX: usize = 64;

impl<S: Scalar> FourierKickCoefficients<S> {
    pub fn n_max(&self) -> usize {
        self.k_real.len()
    }

    /// Evaluates the truncated series
    /// `V_0^r/√(2π) + Σ_{n≥1} [K_n^r cos(nθ) - K_n^i sin(nθ)]`.
    pub fn reconstruct(&self, theta: S) -> S {
        let mut acc = self.v0 / two_pi::<S>().sqrt();
        let (sin1, cos1) = theta.sin_cos();
        let mut sin_n = sin1;
        let mut cos_n = cos1;
        for n in 0..self.k_real.len() {
            acc += self.k_real[n] * cos_n - self.k_imag[n] * sin_n;
            let next_sin = sin_n * cos1 + cos_n * sin1;
            let next_cos = cos_n * cos1 - sin_n * sin1;
            sin_n = next_sin;
            cos_n = next_cos;
        }
        acc
    }

    /// Kick force `Σ_n n [K_n^r sin(nθ) + K_n^i cos(nθ)]` at one angle.
    pub fn force(&self, theta: S) -> S {
        let mut acc = S::zero();
        let (sin1, cos1) = theta.sin_cos();
        let mut sin_n = sin1;
        let mut cos_n = cos1;
        for n in 0..self.k_real.len() {
            let nf = S::from_usize(n + 1).unwrap();
            acc += nf * (self.k_real[n] * sin_n + self.k_imag[n] * cos_n);
            let next_sin = sin_n * cos1 + cos_n * sin1;
            let next_cos = cos_n * cos1 - sin_n * sin1;
            sin_n = next_sin;
            cos_n = next_cos;
        }
        acc
    }
}

/// Harmonic strengths of `V(θ) = g|ψ(θ)|² + V_K(θ)` for the current quantum
/// state, with the ratchet kick potential.
pub fn fourier_kick_coefficients<S: Scalar>(
    state: &WaveState<S>,
    params: &SystemParams<S>,
    n_max: usize,
) -> Result<FourierKickCoefficients<S>> {
    fourier_kick_coefficients_with(state, params, n_max, KickPotentialVariant::Ratchet)
}

/// Same as [`fourier_kick_coefficients`] with an explicit potential variant.
pub fn fourier_kick_coefficients_with<S: Scalar>(
    state: &WaveState<S>,
    params: &SystemParams<S>,
    n_max: usize,
    variant: KickPotentialVariant,
) -> Result<FourierKickCoefficients<S>> {
    if state.representation() != Representation::Angle {
        return Err(RotorError::WrongRepresentation {
            expected: Representation::Angle,
            found: state.representation(),
        });
    }
    let grid = state.grid();
    let n_points = grid.n_points();
    if n_max == 0 || n_max > n_points / 2 {
        return Err(RotorError::HarmonicCutoff {
            n_max,
            limit: n_points / 2,
        });
    }
    let g = params.interaction_g;
    let k = params.kick_strength;
    let mut buf: Vec<Complex<S>> = state
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(j, a)| {
            let th = grid.theta(j);
            let nonlinear = g * a.norm_sqr();
            match variant {
                KickPotentialVariant::Ratchet => {
                    Complex::new(nonlinear + params.kick_potential(th), S::zero())
                }
                KickPotentialVariant::ComplexWave => {
                    Complex::new(nonlinear + k * th.cos(), k * th.sin())
                }
            }
        })
        .collect();
    grid.fft_forward().process(&mut buf);
    let sqrt_two_pi = two_pi::<S>().sqrt();
    let dft_scale = sqrt_two_pi / S::from_usize(n_points).unwrap();

    let full = n_points / 2 - 1;
    let mut weight_kept = S::zero();
    let mut weight_tail = S::zero();
    let mut k_real = Vec::with_capacity(n_max);
    let mut k_imag = Vec::with_capacity(n_max);
    for n in 1..=full {
        let plus = buf[grid.bin_of_index(n as i64)].scale(dft_scale);
        let minus = buf[grid.bin_of_index(-(n as i64))].scale(dft_scale);
        let kr = (plus.re + minus.re) / sqrt_two_pi;
        let ki = (plus.im - minus.im) / sqrt_two_pi;
        let nf = S::from_usize(n).unwrap();
        let w = nf * nf * (kr * kr + ki * ki);
        if n <= n_max {
            k_real.push(kr);
            k_imag.push(ki);
            weight_kept += w;
        } else {
            weight_tail += w;
        }
    }
    let total = weight_kept + weight_tail;
    let tail_force_fraction = if total > S::zero() {
        weight_tail / total
    } else {
        S::zero()
    };
    k_real.truncate(n_max);
    k_imag.truncate(n_max);
    Ok(FourierKickCoefficients {
        k_real,
        k_imag,
        v0: buf[0].re * dft_scale,
        tail_force_fraction,
    })
}

/// Ensemble of classical trajectories `(θ, p)`.
///
/// Angles stay wrapped to `[0, 2π)` after every drift; momenta are unbounded.
#[derive(Debug, Clone)]
pub struct ClassicalEnsemble<S> {
    pub theta: Vec<S>,
    pub p: Vec<S>,
    pub rng_seed: u64,
}

impl<S: Scalar> ClassicalEnsemble<S> {
    /// `n_traj` trajectories with θ uniform over `[0, 2π)` and `p = 0`,
    /// reproducible from the seed.
    pub fn new(n_traj: usize, seed: u64) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let theta = (0..n_traj)
            .map(|_| S::from_f64_lossy(rng.random::<f64>()) * two_pi::<S>())
            .collect();
        Self {
            theta,
            p: vec![S::zero(); n_traj],
            rng_seed: seed,
        }
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    /// Ensemble-averaged energy `⟨p²⟩_cl`.
    pub fn mean_energy(&self) -> S {
        if self.p.is_empty() {
            return S::zero();
        }
        self.p.iter().map(|&p| p * p).sum::<S>() / S::from_usize(self.p.len()).unwrap()
    }

    /// Snapshot of all `(θ, p)` points.
    pub fn phase_portrait(&self) -> Vec<(S, S)> {
        self.theta
            .iter()
            .zip(&self.p)
            .map(|(&th, &p)| (th, p))
            .collect()
    }
}

fn wrap_angle<S: Scalar>(x: S) -> S {
    let tp = two_pi::<S>();
    let w = x % tp;
    if w < S::zero() {
        w + tp
    } else {
        w
    }
}

/// One kick-and-drift step of the generalized rotor map:
/// `p ← p + Σ_n n [K_n^r sin(nθ) + K_n^i cos(nθ)]`, then `θ ← θ + p (mod 2π)`
/// with the freshly kicked momentum.
pub fn classical_step<S: Scalar>(
    ensemble: &mut ClassicalEnsemble<S>,
    coefficients: &FourierKickCoefficients<S>,
) {
    for (theta, p) in ensemble.theta.iter_mut().zip(ensemble.p.iter_mut()) {
        *p += coefficients.force(*theta);
        *theta = wrap_angle(*theta + *p);
    }
}

/// Per-kick record of the classical co-evolution.
#[derive(Debug, Clone, Default)]
pub struct EnsembleSeries<S> {
    pub time: Vec<u64>,
    pub p2_mean: Vec<S>,
    /// Largest truncated force fraction seen across all kicks.
    pub max_tail_force_fraction: S,
}

impl<S: Scalar> EnsembleSeries<S> {
    pub fn new() -> Self {
        Self {
            time: Vec::new(),
            p2_mean: Vec::new(),
            max_tail_force_fraction: S::zero(),
        }
    }
}

/// Co-evolves the quantum state and the classical ensemble.
///
/// Before each kick the harmonic strengths are recomputed from the current
/// (pre-kick) quantum state — exactly the density that drives the quantum
/// kick phase — and applied to the ensemble; the quantum state then advances
/// by one Floquet period. `series` receives `⟨p²⟩_cl` per kick (plus a `t=0`
/// row when empty) and survives an aborted run with its partial records;
/// `quantum_observer` sees the post-kick quantum state in the momentum
/// representation.
pub fn hybrid_evolve<S: Scalar>(
    state: &mut WaveState<S>,
    params: &SystemParams<S>,
    kicks: u64,
    n_max: usize,
    ensemble: &mut ClassicalEnsemble<S>,
    series: &mut EnsembleSeries<S>,
    mut quantum_observer: impl FnMut(u64, &WaveState<S>),
) -> Result<EvolutionReport> {
    let propagator = Propagator::new(state.grid(), params)?;
    if series.time.is_empty() {
        series.time.push(0);
        series.p2_mean.push(ensemble.mean_energy());
    }
    let offset = *series.time.last().unwrap();
    propagator.evolve_hooked(
        state,
        kicks,
        |t, pre_kick_state| {
            let coefficients = fourier_kick_coefficients(pre_kick_state, params, n_max)?;
            if coefficients.tail_force_fraction > series.max_tail_force_fraction {
                series.max_tail_force_fraction = coefficients.tail_force_fraction;
            }
            classical_step(ensemble, &coefficients);
            series.time.push(offset + t);
            series.p2_mean.push(ensemble.mean_energy());
            Ok(())
        },
        |t, post_state| quantum_observer(offset + t, post_state),
    )
}
