//! Closed-form predictions at the quantum resonance and the nonresonant
//! growth-rate law, plus an independent quadrature oracle.
//!
//! Nothing here touches the spectral propagator or its transforms, so
//! agreement between this module and the simulation is evidence rather than
//! tautology.

use crate::error::{Result, RotorError};
use crate::params::SystemParams;
use crate::scalar::{four_pi, two_pi, Scalar};

/// Bundle of the resonance-law values at one time.
#[derive(Debug, Clone, Copy)]
pub struct ResonancePrediction<S> {
    pub p_mean: S,
    pub p2_mean: S,
    pub otoc: S,
    pub growth_g: S,
    pub growth_r: S,
}

/// Directed current at resonance: `⟨p(t)⟩ = -α cos(φ) K t`.
pub fn predict_current<S: Scalar>(params: &SystemParams<S>, t: u64) -> S {
    -params.ratchet_alpha
        * params.ratchet_phi.cos()
        * params.kick_strength
        * S::from_u64(t).unwrap()
}

/// The `t²` coefficient of the mean energy:
/// `(3/4 + 2α²) K² + (2/π) α K g sin(φ) + g²/(2π²)`.
pub fn growth_rate_g<S: Scalar>(params: &SystemParams<S>) -> S {
    let k = params.kick_strength;
    let a = params.ratchet_alpha;
    let g = params.interaction_g;
    let pi = S::PI();
    let two = S::from_f64_lossy(2.0);
    (S::from_f64_lossy(0.75) + two * a * a) * k * k
        + two / pi * a * k * g * params.ratchet_phi.sin()
        + g * g / (two * pi * pi)
}

/// Mean energy at resonance: `⟨p²(t)⟩ = G t² + 16π²`.
pub fn predict_energy<S: Scalar>(params: &SystemParams<S>, t: u64) -> S {
    let tf = S::from_u64(t).unwrap();
    let offset = four_pi::<S>() * four_pi::<S>();
    growth_rate_g(params) * tf * tf + offset
}

/// The `t²` coefficient of the scrambling correlator:
/// `(ε/4π)² { [3/4 + α²(2 - cos²φ)] K² + (2/π) α K g sin(φ) + g²/(2π²) }`.
pub fn growth_rate_r<S: Scalar>(params: &SystemParams<S>) -> S {
    let k = params.kick_strength;
    let a = params.ratchet_alpha;
    let g = params.interaction_g;
    let pi = S::PI();
    let two = S::from_f64_lossy(2.0);
    let cos_phi = params.ratchet_phi.cos();
    let brace = (S::from_f64_lossy(0.75) + a * a * (two - cos_phi * cos_phi)) * k * k
        + two / pi * a * k * g * params.ratchet_phi.sin()
        + g * g / (two * pi * pi);
    let ratio = params.epsilon / four_pi::<S>();
    ratio * ratio * brace
}

/// Scrambling correlator at resonance: `C(t) = R t²` (the time-independent
/// initial-variance offset `ε²` is omitted, matching the quadratic law).
pub fn predict_otoc<S: Scalar>(params: &SystemParams<S>, t: u64) -> S {
    let tf = S::from_u64(t).unwrap();
    growth_rate_r(params) * tf * tf
}

/// All resonance laws at once.
pub fn predict<S: Scalar>(params: &SystemParams<S>, t: u64) -> ResonancePrediction<S> {
    ResonancePrediction {
        p_mean: predict_current(params, t),
        p2_mean: predict_energy(params, t),
        otoc: predict_otoc(params, t),
        growth_g: growth_rate_g(params),
        growth_r: growth_rate_r(params),
    }
}

/// Nonresonant exponential growth rate of the mean energy:
/// `γ = ln[1 + (g/(π ℏ_eff))²]`.
pub fn gamma_theory<S: Scalar>(interaction_g: S, hbar_eff: S) -> S {
    let x = interaction_g / (S::PI() * hbar_eff);
    x.mul_add(x, S::one()).ln()
}

/// Default node count for [`moment_oracle`].
pub const DEFAULT_QUADRATURE_NODES: usize = 1 << 14;

const RICHARDSON_TOL: f64 = 1e-10;

/// Independent check of the resonance moment laws by direct quadrature of the
/// closed-form state.
///
/// With `ψ(θ,t) = e^{-i S(θ) t} χ(θ)`, `χ = cos θ/√π` and
/// `ℏ S(θ) = V_K(θ) + g cos²θ/π` (ℏ = 4π), the momentum moments reduce to
/// periodic integrals of real integrands:
///
/// `⟨p⟩  = -ℏ t ∫ S'(θ) χ²(θ) dθ`
/// `⟨p²⟩ = ℏ² t² ∫ S'(θ)² χ²(θ) dθ + ℏ² ∫ χ'(θ)² dθ`
///
/// These are evaluated with the equispaced trapezoid rule (spectrally accurate
/// for smooth periodic integrands) at `nodes` and `nodes/2` points; the two
/// results must agree to within a refinement tolerance or the call fails.
pub fn moment_oracle<S: Scalar>(
    params: &SystemParams<S>,
    t: u64,
    nodes: usize,
) -> Result<(S, S)> {
    if !params.hbar.is_resonant() {
        return Err(RotorError::NotResonant);
    }
    let coarse = moment_quadrature(params, t, (nodes / 2).max(16));
    let fine = moment_quadrature(params, t, nodes.max(32));
    let scale = fine.1.abs().max(S::one()).to_f64();
    let residual =
        ((fine.0 - coarse.0).abs().to_f64() + (fine.1 - coarse.1).abs().to_f64()) / scale;
    if residual > RICHARDSON_TOL {
        return Err(RotorError::QuadratureNotConverged { nodes, residual });
    }
    Ok(fine)
}

fn moment_quadrature<S: Scalar>(params: &SystemParams<S>, t: u64, nodes: usize) -> (S, S) {
    let hbar = four_pi::<S>();
    let inv_pi = S::one() / S::PI();
    let tf = S::from_u64(t).unwrap();
    let dtheta = two_pi::<S>() / S::from_usize(nodes).unwrap();
    let two = S::from_f64_lossy(2.0);

    let mut int_sprime_chi2 = S::zero();
    let mut int_sprime2_chi2 = S::zero();
    let mut int_chiprime2 = S::zero();
    for j in 0..nodes {
        let th = dtheta * S::from_usize(j).unwrap();
        let c = th.cos();
        let s = th.sin();
        let chi2 = c * c * inv_pi;
        // ℏ S'(θ) = V_K'(θ) - (g/π) sin 2θ
        let hbar_sprime =
            params.kick_potential_deriv(th) - params.interaction_g * inv_pi * (two * th).sin();
        let sprime = hbar_sprime / hbar;
        int_sprime_chi2 += sprime * chi2;
        int_sprime2_chi2 += sprime * sprime * chi2;
        int_chiprime2 += s * s * inv_pi;
    }
    int_sprime_chi2 *= dtheta;
    int_sprime2_chi2 *= dtheta;
    int_chiprime2 *= dtheta;

    let p_mean = -hbar * tf * int_sprime_chi2;
    let p2_mean = hbar * hbar * (tf * tf * int_sprime2_chi2 + int_chiprime2);
    (p_mean, p2_mean)
}
