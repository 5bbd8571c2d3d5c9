//! Discrete Fourier transforms over periodic grids and frequency-space
//! diagonal operators `F^H D F`.
//!
//! Convention: the forward transform is unnormalized,
//! `c_k = sum_j u_j exp(-2 pi i j k / N)`, and the inverse carries the `1/N`.
//! Mode `k` of the flattened coefficient vector matches entry `k` of the
//! eigenvalue tables in [`crate::grid`]. In 2D both axes are transformed,
//! with the same row-major flattening as node space.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::field::{ComplexField, Field, RealField};
use crate::grid::GridSpec;

/// Imaginary parts at or below this (relative to the output scale) are
/// treated as roundoff when a real result is expected.
pub const IMAG_RESIDUE_TOL: f64 = 1e-12;
/// A residue above this indicates a multiplier table without conjugate symmetry.
pub const IMAG_RESIDUE_GUARD: f64 = 1e-9;

/// Per-mode complex multipliers of a Fourier-diagonal operator.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDiagonal {
    grid: GridSpec,
    multipliers: Vec<Complex64>,
}

impl SpectralDiagonal {
    pub fn new(grid: &GridSpec, multipliers: Vec<Complex64>) -> Result<Self> {
        if multipliers.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: multipliers.len(),
            });
        }
        if let Some(i) = multipliers
            .iter()
            .position(|m| !(m.re.is_finite() && m.im.is_finite()))
        {
            return Err(Error::NonFinite(i));
        }
        Ok(Self {
            grid: grid.clone(),
            multipliers,
        })
    }

    pub fn from_real(grid: &GridSpec, multipliers: &[f64]) -> Result<Self> {
        Self::new(
            grid,
            multipliers.iter().map(|&m| Complex64::new(m, 0.0)).collect(),
        )
    }

    pub fn identity(grid: &GridSpec) -> Self {
        Self {
            grid: grid.clone(),
            multipliers: vec![Complex64::new(1.0, 0.0); grid.len()],
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn multipliers(&self) -> &[Complex64] {
        &self.multipliers
    }

    /// Pointwise product of multipliers, i.e. operator composition.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            grid: self.grid.clone(),
            multipliers: self
                .multipliers
                .iter()
                .zip(&other.multipliers)
                .map(|(a, b)| a * b)
                .collect(),
        })
    }

    /// True when `m[-k] = conj(m[k])` for every mode, so that the operator
    /// maps real fields to real fields.
    pub fn is_conjugate_symmetric(&self) -> bool {
        let scale = self
            .multipliers
            .iter()
            .fold(1.0f64, |s, m| s.max(m.norm()));
        (0..self.multipliers.len()).all(|k| {
            let mk = self.multipliers[k];
            let mm = self.multipliers[mirror_mode(&self.grid, k)];
            (mk - mm.conj()).norm() <= IMAG_RESIDUE_TOL * scale
        })
    }
}

/// Flat index of the mode with negated wavenumbers.
pub fn mirror_mode(grid: &GridSpec, k: usize) -> usize {
    let neg = |j: usize, n: usize| (n - j) % n;
    match grid.axes() {
        [x] => neg(k, x.n),
        [x, y] => neg(k / y.n, x.n) * y.n + neg(k % y.n, y.n),
        _ => unreachable!(),
    }
}

/// Planned forward and inverse transforms for one grid. Plans are immutable
/// and may be shared between threads.
#[derive(Clone)]
pub struct SpectralPlan {
    grid: GridSpec,
    forward: Vec<Arc<dyn Fft<f64>>>,
    inverse: Vec<Arc<dyn Fft<f64>>>,
}

impl std::fmt::Debug for SpectralPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralPlan")
            .field("grid", &self.grid)
            .finish_non_exhaustive()
    }
}

impl SpectralPlan {
    pub fn new(grid: &GridSpec) -> Self {
        let mut planner = FftPlanner::new();
        let forward = grid
            .axes()
            .iter()
            .map(|ax| planner.plan_fft_forward(ax.n))
            .collect();
        let inverse = grid
            .axes()
            .iter()
            .map(|ax| planner.plan_fft_inverse(ax.n))
            .collect();
        Self {
            grid: grid.clone(),
            forward,
            inverse,
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.grid.len() {
            return Err(Error::LengthMismatch {
                expected: self.grid.len(),
                got: len,
            });
        }
        Ok(())
    }

    fn transform(&self, buf: &mut [Complex64], plans: &[Arc<dyn Fft<f64>>]) {
        match plans {
            [px] => px.process(buf),
            [px, py] => {
                let (nx, ny) = (px.len(), py.len());
                // rows are contiguous
                py.process(buf);
                let mut cols = vec![Complex64::new(0.0, 0.0); nx * ny];
                for i in 0..nx {
                    for j in 0..ny {
                        cols[j * nx + i] = buf[i * ny + j];
                    }
                }
                px.process(&mut cols);
                for j in 0..ny {
                    for i in 0..nx {
                        buf[i * ny + j] = cols[j * nx + i];
                    }
                }
            }
            _ => unreachable!(),
        }
    }

    /// Unnormalized forward transform in place.
    pub fn forward_in_place(&self, buf: &mut [Complex64]) -> Result<()> {
        self.check_len(buf.len())?;
        self.transform(buf, &self.forward);
        Ok(())
    }

    /// Inverse transform in place, including the `1/N` factor.
    pub fn inverse_in_place(&self, buf: &mut [Complex64]) -> Result<()> {
        self.check_len(buf.len())?;
        self.transform(buf, &self.inverse);
        let s = 1.0 / buf.len() as f64;
        buf.iter_mut().for_each(|c| *c *= s);
        Ok(())
    }

    pub fn forward(&self, u: &ComplexField) -> Result<Vec<Complex64>> {
        if u.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        let mut buf = u.values().to_vec();
        self.forward_in_place(&mut buf)?;
        Ok(buf)
    }

    pub fn inverse(&self, coeffs: &[Complex64]) -> Result<ComplexField> {
        let mut buf = coeffs.to_vec();
        self.inverse_in_place(&mut buf)?;
        Ok(Field::from_raw(self.grid.clone(), buf))
    }

    /// Forward transform of real samples (embedded in complex storage).
    pub fn forward_real(&self, u: &[f64]) -> Result<Vec<Complex64>> {
        let mut buf: Vec<Complex64> = u.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.forward_in_place(&mut buf)?;
        Ok(buf)
    }

    /// Inverse transform whose result is known to be real; the imaginary
    /// residue is dropped.
    pub fn inverse_real(&self, mut coeffs: Vec<Complex64>) -> Result<Vec<f64>> {
        self.inverse_in_place(&mut coeffs)?;
        Ok(take_real(&coeffs))
    }

    /// `F^H diag(m) F u` for complex fields.
    pub fn apply_diagonal(&self, u: &ComplexField, d: &SpectralDiagonal) -> Result<ComplexField> {
        if d.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        let mut c = self.forward(u)?;
        c.iter_mut()
            .zip(d.multipliers())
            .for_each(|(c, m)| *c *= m);
        self.inverse(&c)
    }

    /// `F^H diag(m) F u` for real fields. The multipliers must be conjugate
    /// symmetric so that the result is real.
    pub fn apply_diagonal_real(&self, u: &RealField, d: &SpectralDiagonal) -> Result<RealField> {
        if d.grid() != &self.grid || u.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        if !d.is_conjugate_symmetric() {
            return Err(Error::NotConjugateSymmetric);
        }
        let mut c = self.forward_real(u.values())?;
        c.iter_mut()
            .zip(d.multipliers())
            .for_each(|(c, m)| *c *= m);
        Ok(Field::from_raw(self.grid.clone(), self.inverse_real(c)?))
    }

    /// Applies a real, mirror-symmetric multiplier table to a real field.
    /// This is the hot-loop path used by the Klein-Gordon steppers.
    pub fn apply_real_multipliers(&self, u: &[f64], m: &[f64]) -> Result<Vec<f64>> {
        self.check_len(m.len())?;
        let mut c = self.forward_real(u)?;
        c.iter_mut().zip(m).for_each(|(c, &m)| *c *= m);
        self.inverse_real(c)
    }
}

fn take_real(buf: &[Complex64]) -> Vec<f64> {
    if cfg!(debug_assertions) {
        let scale = buf.iter().fold(1.0f64, |s, c| s.max(c.re.abs()));
        let residue = buf.iter().fold(0.0f64, |s, c| s.max(c.im.abs()));
        debug_assert!(
            residue <= IMAG_RESIDUE_GUARD * scale,
            "imaginary residue {residue:e} exceeds guard; multipliers lack conjugate symmetry?"
        );
    }
    buf.iter().map(|c| c.re).collect()
}

pub fn dft_forward(u: &ComplexField) -> Result<Vec<Complex64>> {
    SpectralPlan::new(u.grid()).forward(u)
}

pub fn dft_inverse(grid: &GridSpec, coeffs: &[Complex64]) -> Result<ComplexField> {
    SpectralPlan::new(grid).inverse(coeffs)
}

pub fn apply_diagonal(u: &ComplexField, d: &SpectralDiagonal) -> Result<ComplexField> {
    SpectralPlan::new(u.grid()).apply_diagonal(u, d)
}
