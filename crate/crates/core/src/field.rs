//! Node-ordered samples over a [`GridSpec`] and the discrete `l^2` geometry.

use std::fmt::Debug;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::GridSpec;

/// Scalar types a field can hold: `f64` or `Complex64`.
pub trait Sample:
    Copy
    + Debug
    + Default
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<f64, Output = Self>
{
    fn to_complex(self) -> Complex64;
    fn modulus(self) -> f64;
    fn modulus_sqr(self) -> f64;
    fn is_finite_sample(self) -> bool;
}

impl Sample for f64 {
    #[inline]
    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
    #[inline]
    fn modulus(self) -> f64 {
        self.abs()
    }
    #[inline]
    fn modulus_sqr(self) -> f64 {
        self * self
    }
    fn is_finite_sample(self) -> bool {
        self.is_finite()
    }
}

impl Sample for Complex64 {
    #[inline]
    fn to_complex(self) -> Complex64 {
        self
    }
    #[inline]
    fn modulus(self) -> f64 {
        self.norm()
    }
    #[inline]
    fn modulus_sqr(self) -> f64 {
        self.norm_sqr()
    }
    fn is_finite_sample(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Field<T> {
    grid: GridSpec,
    values: Vec<T>,
}

pub type RealField = Field<f64>;
pub type ComplexField = Field<Complex64>;

impl<T: Sample> Field<T> {
    /// Checked constructor: length must match the grid and every sample must be finite.
    pub fn new(grid: GridSpec, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite_sample()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { grid, values })
    }

    pub(crate) fn from_raw(grid: GridSpec, values: Vec<T>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn zeros(grid: &GridSpec) -> Self {
        Self {
            values: vec![T::default(); grid.len()],
            grid: grid.clone(),
        }
    }

    pub fn constant(grid: &GridSpec, c: T) -> Self {
        Self {
            values: vec![c; grid.len()],
            grid: grid.clone(),
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite_sample())
    }

    pub fn map<U: Sample>(&self, f: impl Fn(T) -> U) -> Field<U> {
        Field {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Pointwise combination of two fields on the same grid.
    pub fn zip_with<U: Sample, V: Sample>(
        &self,
        other: &Field<U>,
        f: impl Fn(T, U) -> V,
    ) -> Result<Field<V>> {
        self.check_grid(other)?;
        Ok(Field {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn check_grid<U>(&self, other: &Field<U>) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    /// `<u, v> = h * sum_j u_j conj(v_j)`, with `h` the cell volume.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.check_grid(other)?;
        Ok(inner_raw(&self.values, &other.values, self.grid.cell_volume()))
    }

    pub fn norm_l2(&self) -> f64 {
        let s: f64 = self.values.iter().map(|v| v.modulus_sqr()).sum();
        (self.grid.cell_volume() * s).sqrt()
    }

    pub fn norm_inf(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.modulus()))
    }

    /// `<u, 1>`: the discrete integral of the field.
    pub fn integral(&self) -> T {
        let s = self
            .values
            .iter()
            .fold(T::default(), |acc, &v| acc + v);
        s * self.grid.cell_volume()
    }

    /// Squared forward-difference seminorm `||delta^+ u||^2`, summed over axes in 2D.
    pub fn forward_diff_seminorm_sqr(&self) -> f64 {
        let vol = self.grid.cell_volume();
        let v = &self.values;
        let mut total = 0.0;
        match self.grid.axes() {
            [x] => {
                let n = x.n;
                let s: f64 = (0..n).map(|j| (v[(j + 1) % n] - v[j]).modulus_sqr()).sum();
                total += s / (x.h * x.h);
            }
            [x, y] => {
                let (nx, ny) = (x.n, y.n);
                let mut sx = 0.0;
                let mut sy = 0.0;
                for i in 0..nx {
                    let ip = (i + 1) % nx;
                    for j in 0..ny {
                        let jp = (j + 1) % ny;
                        let c = v[i * ny + j];
                        sx += (v[ip * ny + j] - c).modulus_sqr();
                        sy += (v[i * ny + jp] - c).modulus_sqr();
                    }
                }
                total += sx / (x.h * x.h) + sy / (y.h * y.h);
            }
            _ => unreachable!(),
        }
        vol * total
    }

    pub fn forward_diff_seminorm(&self) -> f64 {
        self.forward_diff_seminorm_sqr().sqrt()
    }
}

impl Field<f64> {
    pub fn to_complex(&self) -> ComplexField {
        self.map(|v| Complex64::new(v, 0.0))
    }

    /// Real inner product `h * sum u_j v_j`.
    pub fn dot(&self, other: &Self) -> Result<f64> {
        self.check_grid(other)?;
        Ok(dot_raw(&self.values, &other.values, self.grid.cell_volume()))
    }
}

#[inline]
pub(crate) fn inner_raw<T: Sample>(u: &[T], v: &[T], vol: f64) -> Complex64 {
    let s = u
        .iter()
        .zip(v)
        .fold(Complex64::new(0.0, 0.0), |acc, (&a, &b)| {
            acc + a.to_complex() * b.to_complex().conj()
        });
    s * vol
}

#[inline]
pub(crate) fn dot_raw(u: &[f64], v: &[f64], vol: f64) -> f64 {
    vol * u.iter().zip(v).map(|(a, b)| a * b).sum::<f64>()
}

/// Free-function form of [`Field::inner`].
pub fn inner_l2<T: Sample>(u: &Field<T>, v: &Field<T>) -> Result<Complex64> {
    u.inner(v)
}
