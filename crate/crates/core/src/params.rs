//! Physical knobs of the kicked nonlinear ratchet rotor.

use crate::error::{Result, RotorError};
use crate::scalar::{four_pi, Scalar};

/// Effective Planck constant.
///
/// The quantum-resonant value `4π` is represented symbolically so the free
/// propagator can recognise it exactly instead of comparing floats; at
/// resonance every free-evolution phase is the identity and the fast path
/// must not be degraded by rounding in `4.0 * PI`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HbarEff<S: Scalar> {
    /// Exactly `4π`: the quantum resonance.
    Resonant,
    /// Any other value.
    Value(S),
}

impl<S: Scalar> HbarEff<S> {
    pub fn value(self) -> S {
        match self {
            HbarEff::Resonant => four_pi::<S>(),
            HbarEff::Value(v) => v,
        }
    }

    pub fn is_resonant(self) -> bool {
        matches!(self, HbarEff::Resonant)
    }
}

/// All physical parameters of one simulation.
///
/// `phi` is stored unwrapped (radians); it only ever enters through
/// trigonometric functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams<S: Scalar> {
    /// Kick strength K.
    pub kick_strength: S,
    /// Ratchet amplitude α of the second harmonic.
    pub ratchet_alpha: S,
    /// Ratchet phase φ in radians.
    pub ratchet_phi: S,
    /// Self-interaction strength g.
    pub interaction_g: S,
    /// Effective Planck constant.
    pub hbar: HbarEff<S>,
    /// Translation parameter ε of the scrambling diagnostics.
    pub epsilon: S,
}

impl<S: Scalar> SystemParams<S> {
    pub const DEFAULT_EPSILON: f64 = 1e-5;

    /// Builds a parameter set, validating finiteness and sign constraints.
    pub fn new(
        kick_strength: S,
        ratchet_alpha: S,
        ratchet_phi: S,
        interaction_g: S,
        hbar: HbarEff<S>,
    ) -> Result<Self> {
        let p = Self {
            kick_strength,
            ratchet_alpha,
            ratchet_phi,
            interaction_g,
            hbar,
            epsilon: S::from_f64_lossy(Self::DEFAULT_EPSILON),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_epsilon(mut self, epsilon: S) -> Result<Self> {
        if !(epsilon >= S::zero()) || !epsilon.is_finite() {
            return Err(RotorError::InvalidEpsilon(epsilon.to_f64()));
        }
        self.epsilon = epsilon;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("kick_strength", self.kick_strength),
            ("ratchet_alpha", self.ratchet_alpha),
            ("ratchet_phi", self.ratchet_phi),
            ("interaction_g", self.interaction_g),
        ] {
            if !v.is_finite() {
                return Err(RotorError::NonFiniteParam {
                    name,
                    value: v.to_f64(),
                });
            }
        }
        let h = self.hbar.value();
        if !(h > S::zero()) || !h.is_finite() {
            return Err(RotorError::InvalidHbar(h.to_f64()));
        }
        Ok(())
    }

    pub fn hbar_value(&self) -> S {
        self.hbar.value()
    }

    /// Ratchet kick potential `V_K(θ) = K [sin θ + α sin(2θ + φ)]`.
    pub fn kick_potential(&self, theta: S) -> S {
        let two = S::from_f64_lossy(2.0);
        self.kick_strength
            * (theta.sin() + self.ratchet_alpha * (two * theta + self.ratchet_phi).sin())
    }

    /// Derivative `V_K'(θ) = K [cos θ + 2α cos(2θ + φ)]`.
    pub fn kick_potential_deriv(&self, theta: S) -> S {
        let two = S::from_f64_lossy(2.0);
        self.kick_strength
            * (theta.cos() + two * self.ratchet_alpha * (two * theta + self.ratchet_phi).cos())
    }
}
