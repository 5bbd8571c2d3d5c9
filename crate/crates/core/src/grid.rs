//! Uniform periodic grids and the eigenvalues of their discrete Laplacians.
//!
//! Nodes are `x_j = a + j h` for `j = 0..n`, with the right endpoint identified
//! with the left one. Two-dimensional grids are tensor products flattened in
//! row-major order: axis 0 varies slowest.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::field::{Field, Sample};

/// One periodic axis `[a, b)` with `n` nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub a: f64,
    pub b: f64,
    pub n: usize,
    pub h: f64,
}

impl Axis {
    pub fn new(a: f64, b: f64, n: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || b <= a {
            return Err(Error::InvalidGrid(format!("need a < b, got [{a}, {b}]")));
        }
        if n < 2 || !n.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "node count must be even and >= 2, got {n}"
            )));
        }
        Ok(Self {
            a,
            b,
            n,
            h: (b - a) / n as f64,
        })
    }

    #[inline]
    pub fn node(&self, j: usize) -> f64 {
        self.a + j as f64 * self.h
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    /// `-(4/h^2) sin^2(j pi / n)` for `j = 0..n`.
    pub fn fd_eigenvalues(&self) -> Vec<f64> {
        let c = 4.0 / (self.h * self.h);
        (0..self.n)
            .map(|j| {
                let s = (j as f64 * PI / self.n as f64).sin();
                -c * s * s
            })
            .collect()
    }

    /// `-(2 pi / (b - a))^2 k^2` with `k` the signed wavenumber in DFT order
    /// `0, 1, .., n/2, -n/2 + 1, .., -1`.
    pub fn spectral_eigenvalues(&self) -> Vec<f64> {
        let c = 2.0 * PI / self.length();
        (0..self.n)
            .map(|j| {
                let k = signed_wavenumber(j, self.n) as f64;
                -(c * k) * (c * k)
            })
            .collect()
    }
}

/// Signed wavenumber of DFT bin `j` on `n` points; bin `n/2` maps to `+n/2`.
pub fn signed_wavenumber(j: usize, n: usize) -> i64 {
    if j <= n / 2 {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    axes: Vec<Axis>,
}

impl GridSpec {
    /// Square grid `[a, b)^dim` with `n` nodes per axis.
    pub fn new(a: f64, b: f64, n: usize, dim: usize) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::InvalidGrid(format!("dimension must be 1 or 2, got {dim}")));
        }
        let axis = Axis::new(a, b, n)?;
        Ok(Self {
            axes: vec![axis; dim],
        })
    }

    pub fn from_axes(axes: Vec<Axis>) -> Result<Self> {
        if axes.is_empty() || axes.len() > 2 {
            return Err(Error::InvalidGrid(format!(
                "dimension must be 1 or 2, got {}",
                axes.len()
            )));
        }
        for ax in &axes {
            Axis::new(ax.a, ax.b, ax.n)?;
        }
        Ok(Self { axes })
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn axis(&self, i: usize) -> &Axis {
        &self.axes[i]
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|ax| ax.n).collect()
    }

    /// Total number of nodes (equal to the number of Fourier modes).
    pub fn len(&self) -> usize {
        self.axes.iter().map(|ax| ax.n).product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Quadrature weight of one node: `h` in 1D, `h_x h_y` in 2D.
    pub fn cell_volume(&self) -> f64 {
        self.axes.iter().map(|ax| ax.h).product()
    }

    /// Measure of the periodic domain.
    pub fn volume(&self) -> f64 {
        self.axes.iter().map(|ax| ax.length()).product()
    }

    /// Coordinates of the node with flat index `idx`.
    pub fn point(&self, idx: usize) -> [f64; 2] {
        match self.axes.as_slice() {
            [x] => [x.node(idx), 0.0],
            [x, y] => [x.node(idx / y.n), y.node(idx % y.n)],
            _ => unreachable!(),
        }
    }

    /// Evaluates `f` at every node; `f` receives a slice of length `dim`.
    pub fn sample<T: Sample>(&self, f: impl Fn(&[f64]) -> T) -> Field<T> {
        let d = self.dim();
        let values = (0..self.len())
            .map(|i| {
                let p = self.point(i);
                f(&p[..d])
            })
            .collect();
        Field::from_raw(self.clone(), values)
    }

    fn tensor_sum(&self, per_axis: impl Fn(&Axis) -> Vec<f64>) -> Vec<f64> {
        match self.axes.as_slice() {
            [x] => per_axis(x),
            [x, y] => {
                let lx = per_axis(x);
                let ly = per_axis(y);
                lx.iter()
                    .flat_map(|&a| ly.iter().map(move |&b| a + b))
                    .collect()
            }
            _ => unreachable!(),
        }
    }

    /// Eigenvalues of the periodic second-difference operator, one per mode
    /// in the flattened DFT ordering.
    pub fn fd_laplacian_eigenvalues(&self) -> Vec<f64> {
        self.tensor_sum(Axis::fd_eigenvalues)
    }

    /// Eigenvalues of the Fourier pseudo-spectral Laplacian.
    pub fn spectral_laplacian_eigenvalues(&self) -> Vec<f64> {
        self.tensor_sum(Axis::spectral_eigenvalues)
    }
}

pub fn make_grid(a: f64, b: f64, n: usize, dim: usize) -> Result<GridSpec> {
    GridSpec::new(a, b, n, dim)
}
