//! Discretization of the angle coordinate and its conjugate momentum ladder.

use std::fmt;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::error::{Result, RotorError};
use crate::scalar::{two_pi, Scalar};

/// Uniform grid of `N` angle nodes `θ_j = 2πj/N` on `[0, 2π)` paired with the
/// momentum ladder `p_n = n ℏ_eff`, `n ∈ {-N/2, …, N/2-1}`.
///
/// The grid owns the FFT plans for its size, so it is cheap to clone and a
/// `WaveState` can always change representation through its own grid. Momentum
/// amplitudes are stored in FFT bin order (`n = 0, 1, …, N/2-1, -N/2, …, -1`);
/// [`AngularGrid::momentum_index`] maps a bin to its signed index.
#[derive(Clone)]
pub struct AngularGrid<S: Scalar> {
    inner: Arc<GridInner<S>>,
}

struct GridInner<S: Scalar> {
    n_points: usize,
    hbar_eff: S,
    forward: Arc<dyn Fft<S>>,
    inverse: Arc<dyn Fft<S>>,
}

pub const MIN_GRID_POINTS: usize = 8;

impl<S: Scalar> AngularGrid<S> {
    /// Builds a grid with `n_points` nodes (even, at least 8; powers of two
    /// give the fastest transforms) and the given effective Planck constant.
    pub fn new(n_points: usize, hbar_eff: S) -> Result<Self> {
        if n_points < MIN_GRID_POINTS || n_points % 2 != 0 {
            return Err(RotorError::InvalidGridSize(n_points));
        }
        if !(hbar_eff > S::zero()) || !hbar_eff.is_finite() {
            return Err(RotorError::InvalidHbar(hbar_eff.to_f64()));
        }
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n_points);
        let inverse = planner.plan_fft_inverse(n_points);
        Ok(Self {
            inner: Arc::new(GridInner {
                n_points,
                hbar_eff,
                forward,
                inverse,
            }),
        })
    }

    pub fn n_points(&self) -> usize {
        self.inner.n_points
    }

    pub fn hbar_eff(&self) -> S {
        self.inner.hbar_eff
    }

    /// Node spacing `Δθ = 2π/N`.
    pub fn delta_theta(&self) -> S {
        two_pi::<S>() / S::from_usize(self.inner.n_points).unwrap()
    }

    /// Angle node `θ_j = 2πj/N`.
    pub fn theta(&self, j: usize) -> S {
        debug_assert!(j < self.inner.n_points);
        two_pi::<S>() * S::from_usize(j).unwrap() / S::from_usize(self.inner.n_points).unwrap()
    }

    /// All angle nodes in order.
    pub fn theta_nodes(&self) -> impl Iterator<Item = S> + '_ {
        (0..self.inner.n_points).map(|j| self.theta(j))
    }

    /// Signed momentum index of FFT bin `bin`: `n = bin` for `bin < N/2`,
    /// `n = bin - N` otherwise (the `n = -N/2` mode sits on the negative side).
    pub fn momentum_index(&self, bin: usize) -> i64 {
        debug_assert!(bin < self.inner.n_points);
        let half = self.inner.n_points / 2;
        if bin < half {
            bin as i64
        } else {
            bin as i64 - self.inner.n_points as i64
        }
    }

    /// Momentum eigenvalue `p_n = n ℏ_eff` of FFT bin `bin`.
    pub fn momentum(&self, bin: usize) -> S {
        S::from_i64(self.momentum_index(bin)).unwrap() * self.inner.hbar_eff
    }

    /// FFT bin holding signed momentum index `n`.
    pub fn bin_of_index(&self, n: i64) -> usize {
        let np = self.inner.n_points as i64;
        debug_assert!(n >= -np / 2 && n < np / 2);
        n.rem_euclid(np) as usize
    }

    pub(crate) fn fft_forward(&self) -> &Arc<dyn Fft<S>> {
        &self.inner.forward
    }

    pub(crate) fn fft_inverse(&self) -> &Arc<dyn Fft<S>> {
        &self.inner.inverse
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.n_points == other.inner.n_points
                && self.inner.hbar_eff == other.inner.hbar_eff)
    }
}

impl<S: Scalar> fmt::Debug for AngularGrid<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AngularGrid")
            .field("n_points", &self.inner.n_points)
            .field("hbar_eff", &self.inner.hbar_eff)
            .finish()
    }
}
