//! Exact one-kick Floquet map of the kicked nonlinear ratchet rotor.
//!
//! One period applies the kick phase in the angle representation and the free
//! phase in the momentum representation. Both factors are diagonal in their
//! basis, so the composition is exact for delta kicks: the kick leaves
//! `|ψ(θ)|²` pointwise invariant, which also makes the nonlinear phase exact
//! without any self-consistency iteration.

use std::time::Instant;

use num_complex::Complex;

use crate::error::{Result, RotorError};
use crate::grid::AngularGrid;
use crate::params::SystemParams;
use crate::scalar::{four_pi, Scalar};
use crate::state::{Representation, WaveState};

/// Diagnostics from an [`Propagator::evolve`] run.
#[derive(Debug, Clone, Copy)]
pub struct EvolutionReport {
    /// Number of kicks actually applied.
    pub kicks_applied: u64,
    /// `|norm - 1|` after the last kick.
    pub final_norm_drift: f64,
    /// True if the outer-band probability ever exceeded the warn threshold.
    pub aliasing_flag: bool,
    /// Wall-clock seconds spent evolving.
    pub wall_time: f64,
}

/// Guard thresholds for long evolutions.
#[derive(Debug, Clone, Copy)]
pub struct EvolveOptions {
    /// Fraction of the momentum band counted as "outer" by the aliasing guard.
    pub aliasing_band: f64,
    /// Outer-band probability that raises the aliasing flag.
    pub aliasing_warn: f64,
    /// Outer-band probability that aborts the run.
    pub aliasing_abort: f64,
    /// Norm drift that aborts the run.
    pub norm_abort: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            aliasing_band: 0.1,
            aliasing_warn: 1e-8,
            aliasing_abort: 1e-3,
            norm_abort: 1e-6,
        }
    }
}

const INPUT_NORM_TOL: f64 = 1e-8;

/// One-kick Floquet propagator `U = U_f U_K` with precomputed phase tables.
///
/// The ratchet part of the kick phase and the free phases are fixed by the
/// parameters and grid; only the nonlinear phase `exp(-i g |ψ|²/ℏ)` is
/// recomputed each kick. At the quantum resonance (`HbarEff::Resonant`) the
/// free factor is the exact identity and is skipped entirely.
pub struct Propagator<S: Scalar> {
    params: SystemParams<S>,
    grid: AngularGrid<S>,
    kick_fixed: Vec<Complex<S>>,
    free_phase: Option<Vec<Complex<S>>>,
    pub options: EvolveOptions,
}

impl<S: Scalar> Propagator<S> {
    pub fn new(grid: &AngularGrid<S>, params: &SystemParams<S>) -> Result<Self> {
        if grid.hbar_eff() != params.hbar_value() {
            return Err(RotorError::NonFiniteParam {
                name: "hbar_eff (grid/params mismatch)",
                value: grid.hbar_eff().to_f64(),
            });
        }
        let hbar = params.hbar_value();
        let kick_fixed = grid
            .theta_nodes()
            .map(|th| Complex::cis(-params.kick_potential(th) / hbar))
            .collect();
        let free_phase = if params.hbar.is_resonant() {
            None
        } else {
            let half = S::from_f64_lossy(0.5);
            Some(
                (0..grid.n_points())
                    .map(|bin| {
                        let n = S::from_i64(grid.momentum_index(bin)).unwrap();
                        Complex::cis(-n * n * hbar * half)
                    })
                    .collect(),
            )
        };
        Ok(Self {
            params: *params,
            grid: grid.clone(),
            kick_fixed,
            free_phase,
            options: EvolveOptions::default(),
        })
    }

    pub fn params(&self) -> &SystemParams<S> {
        &self.params
    }

    pub fn grid(&self) -> &AngularGrid<S> {
        &self.grid
    }

    /// Kick phase `ψ(θ) ← exp{-i[V_K(θ) + g|ψ(θ)|²]/ℏ} ψ(θ)`, in place.
    /// Requires the angle representation; leaves `|ψ(θ)|²` unchanged.
    pub fn kick_in_place(&self, state: &mut WaveState<S>) -> Result<()> {
        if state.representation() != Representation::Angle {
            return Err(RotorError::WrongRepresentation {
                expected: Representation::Angle,
                found: state.representation(),
            });
        }
        let g = self.params.interaction_g;
        if g == S::zero() {
            for (a, f) in state.amplitudes_mut().iter_mut().zip(&self.kick_fixed) {
                *a *= *f;
            }
        } else {
            let scale = -g / self.params.hbar_value();
            for (a, f) in state.amplitudes_mut().iter_mut().zip(&self.kick_fixed) {
                let nonlinear = Complex::cis(scale * a.norm_sqr());
                *a *= *f * nonlinear;
            }
        }
        Ok(())
    }

    /// Free phase `ψ_n ← exp(-i n² ℏ/2) ψ_n`, in place.
    /// Requires the momentum representation; exact identity at resonance.
    pub fn free_in_place(&self, state: &mut WaveState<S>) -> Result<()> {
        if state.representation() != Representation::Momentum {
            return Err(RotorError::WrongRepresentation {
                expected: Representation::Momentum,
                found: state.representation(),
            });
        }
        if let Some(phase) = &self.free_phase {
            for (a, f) in state.amplitudes_mut().iter_mut().zip(phase) {
                *a *= *f;
            }
        }
        Ok(())
    }

    /// The kick operator as a value-level map (angle in, angle out).
    pub fn kick(&self, state: WaveState<S>) -> Result<WaveState<S>> {
        state.check_normalized(INPUT_NORM_TOL)?;
        let mut state = state;
        self.kick_in_place(&mut state)?;
        Ok(state)
    }

    /// The free operator as a value-level map (momentum in, momentum out).
    pub fn free(&self, state: WaveState<S>) -> Result<WaveState<S>> {
        let mut state = state;
        self.free_in_place(&mut state)?;
        Ok(state)
    }

    /// One full Floquet period: kick, then free flight. Takes and returns the
    /// angle representation.
    pub fn step(&self, state: WaveState<S>) -> Result<WaveState<S>> {
        let mut state = self.kick(state)?;
        state.to_momentum_in_place()?;
        self.free_in_place(&mut state)?;
        state.to_angle_in_place()?;
        Ok(state)
    }

    /// Applies `kicks` Floquet periods, invoking `observer(t_n, state)` after
    /// each kick with the state in the momentum representation.
    ///
    /// Aborts with [`RotorError::NormDrift`] or [`RotorError::AliasingLimit`]
    /// if the respective guard fires; the observer has already seen every
    /// completed kick, so callers keep their partial records.
    pub fn evolve(
        &self,
        state: &mut WaveState<S>,
        kicks: u64,
        observer: impl FnMut(u64, &WaveState<S>),
    ) -> Result<EvolutionReport> {
        self.evolve_hooked(state, kicks, |_, _| Ok(()), observer)
    }

    /// [`Propagator::evolve`] with an extra hook that runs before each kick on
    /// the angle-representation state; co-evolving systems (the classical
    /// ensemble) tap the pre-kick density here.
    pub fn evolve_hooked(
        &self,
        state: &mut WaveState<S>,
        kicks: u64,
        mut pre_kick: impl FnMut(u64, &WaveState<S>) -> Result<()>,
        mut observer: impl FnMut(u64, &WaveState<S>),
    ) -> Result<EvolutionReport> {
        state.check_normalized(INPUT_NORM_TOL)?;
        if state.representation() != Representation::Angle {
            return Err(RotorError::WrongRepresentation {
                expected: Representation::Angle,
                found: state.representation(),
            });
        }
        let start = Instant::now();
        let mut aliasing_flag = false;
        let mut drift = (state.norm().to_f64() - 1.0).abs();
        for t in 1..=kicks {
            pre_kick(t, state)?;
            self.kick_in_place(state)?;
            state.to_momentum_in_place()?;
            self.free_in_place(state)?;

            drift = (state.norm().to_f64() - 1.0).abs();
            if drift > self.options.norm_abort {
                return Err(RotorError::NormDrift {
                    drift,
                    limit: self.options.norm_abort,
                    kicks: t,
                });
            }
            let outer = state
                .outer_band_probability(self.options.aliasing_band)?
                .to_f64();
            if outer > self.options.aliasing_abort {
                return Err(RotorError::AliasingLimit {
                    probability: outer,
                    limit: self.options.aliasing_abort,
                    kicks: t,
                });
            }
            if outer > self.options.aliasing_warn {
                aliasing_flag = true;
            }

            observer(t, state);
            state.to_angle_in_place()?;
        }
        Ok(EvolutionReport {
            kicks_applied: kicks,
            final_norm_drift: drift,
            aliasing_flag,
            wall_time: start.elapsed().as_secs_f64(),
        })
    }
}

/// Closed-form state after `t` kicks at the quantum resonance, starting from
/// the even state `cos(θ)/√π`:
///
/// `ψ(θ,t) = exp{-(i t/4π)[V_K(θ) + g cos²θ/π]} cos(θ)/√π`.
///
/// Rejects parameter sets that are not flagged resonant.
pub fn resonance_state<S: Scalar>(
    params: &SystemParams<S>,
    t: u64,
    grid: &AngularGrid<S>,
) -> Result<WaveState<S>> {
    if !params.hbar.is_resonant() {
        return Err(RotorError::NotResonant);
    }
    let inv_pi = S::one() / S::PI();
    let inv_sqrt_pi = inv_pi.sqrt();
    let tt = S::from_u64(t).unwrap();
    let scale = -tt / four_pi::<S>();
    let amplitudes = grid
        .theta_nodes()
        .map(|th| {
            let c = th.cos();
            let phase = scale * (params.kick_potential(th) + params.interaction_g * c * c * inv_pi);
            Complex::cis(phase).scale(c * inv_sqrt_pi)
        })
        .collect();
    WaveState::from_amplitudes(amplitudes, grid.clone(), Representation::Angle)
}

/// Overlap fidelity `|⟨a|b⟩|²`.
pub fn fidelity<S: Scalar>(a: &WaveState<S>, b: &WaveState<S>) -> Result<S> {
    Ok(a.inner(b)?.norm_sqr())
}
