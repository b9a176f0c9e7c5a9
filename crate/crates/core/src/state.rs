//! Wavefunction container with dual angle/momentum representations.

use num_complex::Complex;

use crate::error::{Result, RotorError};
use crate::grid::AngularGrid;
use crate::scalar::{two_pi, Scalar};

/// Which basis the amplitude array currently lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    /// `amplitudes[j] = ψ(θ_j)`, normalized as `Σ_j |ψ(θ_j)|² Δθ = 1`.
    Angle,
    /// `amplitudes[bin] = ψ_n` against the basis `e^{inθ}/√(2π)`,
    /// normalized as `Σ_n |ψ_n|² = 1`, in FFT bin order.
    Momentum,
}

/// A normalized state on an [`AngularGrid`].
///
/// Angle amplitudes are continuum-valued (they carry the `Δθ` measure), so
/// `|ψ(θ_j)|²` is directly the nonlinear density entering the kick phase.
/// The two representations are related by a unitary scaled DFT that preserves
/// `Σ_n |ψ_n|² = Σ_j |ψ(θ_j)|² Δθ`.
#[derive(Debug, Clone)]
pub struct WaveState<S: Scalar> {
    amplitudes: Vec<Complex<S>>,
    grid: AngularGrid<S>,
    representation: Representation,
}

pub const NORM_TOLERANCE: f64 = 1e-10;

impl<S: Scalar> WaveState<S> {
    /// Wraps raw amplitudes without normalizing; callers must uphold the norm
    /// invariant themselves.
    pub fn from_amplitudes(
        amplitudes: Vec<Complex<S>>,
        grid: AngularGrid<S>,
        representation: Representation,
    ) -> Result<Self> {
        if amplitudes.len() != grid.n_points() {
            return Err(RotorError::GridMismatch(amplitudes.len(), grid.n_points()));
        }
        Ok(Self {
            amplitudes,
            grid,
            representation,
        })
    }

    /// The even-symmetry initial state `ψ(θ) = cos(θ)/√π`, in the angle
    /// representation. Its momentum content sits entirely at `n = ±1` with
    /// weight 1/2 each.
    pub fn even_initial(grid: &AngularGrid<S>) -> Self {
        let inv_sqrt_pi = S::one() / S::PI().sqrt();
        let amplitudes = grid
            .theta_nodes()
            .map(|th| Complex::new(th.cos() * inv_sqrt_pi, S::zero()))
            .collect();
        Self {
            amplitudes,
            grid: grid.clone(),
            representation: Representation::Angle,
        }
    }

    /// Plane-wave momentum eigenstate `ψ_m = δ_{m,n}`.
    pub fn plane_wave(grid: &AngularGrid<S>, n: i64) -> Self {
        let mut amplitudes = vec![Complex::new(S::zero(), S::zero()); grid.n_points()];
        amplitudes[grid.bin_of_index(n)] = Complex::new(S::one(), S::zero());
        Self {
            amplitudes,
            grid: grid.clone(),
            representation: Representation::Momentum,
        }
    }

    pub fn grid(&self) -> &AngularGrid<S> {
        &self.grid
    }

    pub fn representation(&self) -> Representation {
        self.representation
    }

    pub fn amplitudes(&self) -> &[Complex<S>] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex<S>] {
        &mut self.amplitudes
    }

    /// `Σ |ψ|²` with the representation's measure; 1 for a normalized state.
    pub fn norm_sqr(&self) -> S {
        let sum: S = self.amplitudes.iter().map(|a| a.norm_sqr()).sum();
        match self.representation {
            Representation::Angle => sum * self.grid.delta_theta(),
            Representation::Momentum => sum,
        }
    }

    pub fn norm(&self) -> S {
        self.norm_sqr().sqrt()
    }

    /// Rescales to unit norm.
    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > S::zero() {
            let inv = S::one() / n;
            for a in &mut self.amplitudes {
                *a = a.scale(inv);
            }
        }
    }

    pub fn check_normalized(&self, tol: f64) -> Result<()> {
        let norm = self.norm().to_f64();
        if (norm - 1.0).abs() > tol {
            return Err(RotorError::NotNormalized { norm, tol });
        }
        Ok(())
    }

    fn expect_representation(&self, expected: Representation) -> Result<()> {
        if self.representation != expected {
            return Err(RotorError::WrongRepresentation {
                expected,
                found: self.representation,
            });
        }
        Ok(())
    }

    /// In-place angle → momentum transform:
    /// `ψ_n = (√(2π)/N) Σ_j ψ(θ_j) e^{-inθ_j}`.
    pub fn to_momentum_in_place(&mut self) -> Result<()> {
        self.expect_representation(Representation::Angle)?;
        self.grid.fft_forward().process(&mut self.amplitudes);
        let n = S::from_usize(self.grid.n_points()).unwrap();
        let scale = two_pi::<S>().sqrt() / n;
        for a in &mut self.amplitudes {
            *a = a.scale(scale);
        }
        self.representation = Representation::Momentum;
        Ok(())
    }

    /// In-place momentum → angle transform:
    /// `ψ(θ_j) = (1/√(2π)) Σ_n ψ_n e^{inθ_j}`.
    pub fn to_angle_in_place(&mut self) -> Result<()> {
        self.expect_representation(Representation::Momentum)?;
        self.grid.fft_inverse().process(&mut self.amplitudes);
        let scale = S::one() / two_pi::<S>().sqrt();
        for a in &mut self.amplitudes {
            *a = a.scale(scale);
        }
        self.representation = Representation::Angle;
        Ok(())
    }

    /// Consuming angle → momentum transform.
    pub fn into_momentum(mut self) -> Result<Self> {
        self.to_momentum_in_place()?;
        Ok(self)
    }

    /// Consuming momentum → angle transform.
    pub fn into_angle(mut self) -> Result<Self> {
        self.to_angle_in_place()?;
        Ok(self)
    }

    /// A copy of this state in the momentum representation.
    pub fn momentum_view(&self) -> Result<Self> {
        match self.representation {
            Representation::Momentum => Ok(self.clone()),
            Representation::Angle => self.clone().into_momentum(),
        }
    }

    /// A copy of this state in the angle representation.
    pub fn angle_view(&self) -> Result<Self> {
        match self.representation {
            Representation::Angle => Ok(self.clone()),
            Representation::Momentum => self.clone().into_angle(),
        }
    }

    /// Inner product `⟨self|other⟩` with the representation's measure.
    /// Both states must live on the same grid; mismatched representations are
    /// reconciled by transforming a copy of `other`.
    pub fn inner(&self, other: &Self) -> Result<Complex<S>> {
        if !self.grid.same_grid(&other.grid) {
            return Err(RotorError::GridMismatch(
                self.grid.n_points(),
                other.grid.n_points(),
            ));
        }
        let tmp;
        let rhs = if other.representation == self.representation {
            other
        } else {
            tmp = match self.representation {
                Representation::Angle => other.angle_view()?,
                Representation::Momentum => other.momentum_view()?,
            };
            &tmp
        };
        let mut acc = Complex::new(S::zero(), S::zero());
        for (a, b) in self.amplitudes.iter().zip(rhs.amplitudes.iter()) {
            acc += a.conj() * b;
        }
        if self.representation == Representation::Angle {
            acc = acc.scale(self.grid.delta_theta());
        }
        Ok(acc)
    }

    /// Probability carried by the outer `band_fraction` of the momentum band
    /// (|n| ≥ (1 - band_fraction)·N/2). Used as the aliasing guard: a state
    /// whose tail reaches the band edge is about to wrap around.
    pub fn outer_band_probability(&self, band_fraction: f64) -> Result<S> {
        self.expect_representation(Representation::Momentum)?;
        let half = self.grid.n_points() as f64 / 2.0;
        let cut = ((1.0 - band_fraction) * half).floor() as i64;
        let mut acc = S::zero();
        for (bin, a) in self.amplitudes.iter().enumerate() {
            if self.grid.momentum_index(bin).abs() >= cut {
                acc += a.norm_sqr();
            }
        }
        Ok(acc)
    }
}
