//! Closed-form per-mode blocks of the matrix functions `exp(V)` and
//! `phi(V) = int_0^1 exp((1 - xi) V) dxi`.
//!
//! For Klein-Gordon, `V = tau * S * M` decouples into one 2x2 block per
//! Fourier mode. With `mu = omega * sqrt(-lambda)` and `theta = tau * mu`
//! each block is
//!
//! ```text
//! exp = [ cos(theta)        sin(theta)/mu ]    phi = [ sin(theta)/theta        (1-cos(theta))/(tau mu^2) ]
//!       [ -mu sin(theta)    cos(theta)    ]          [ (cos(theta)-1)/tau      sin(theta)/theta          ]
//! ```
//!
//! For Schrodinger the linear flow is `exp(i tau lambda)` per mode and its
//! averaged counterpart is `(exp(i tau lambda) - 1)/(i tau lambda)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::GridSpec;

/// Below this value of `theta` the removable singularities are evaluated by
/// their Taylor series.
pub const SERIES_THRESHOLD: f64 = 1e-4;

/// `sin(x)/x`, equal to 1 at the origin.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < SERIES_THRESHOLD {
        sinc_series(x)
    } else {
        sinc_direct(x)
    }
}

/// `(1 - cos(x))/x^2`, equal to 1/2 at the origin.
pub fn cosc(x: f64) -> f64 {
    if x.abs() < SERIES_THRESHOLD {
        cosc_series(x)
    } else {
        cosc_direct(x)
    }
}

pub fn sinc_series(x: f64) -> f64 {
    let x2 = x * x;
    1.0 - x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0))
}

pub fn sinc_direct(x: f64) -> f64 {
    x.sin() / x
}

pub fn cosc_series(x: f64) -> f64 {
    let x2 = x * x;
    0.5 - x2 / 24.0 * (1.0 - x2 / 30.0 * (1.0 - x2 / 56.0))
}

/// Written through `sin(x/2)` to avoid the cancellation in `1 - cos(x)`.
pub fn cosc_direct(x: f64) -> f64 {
    let s = (0.5 * x).sin();
    2.0 * s * s / (x * x)
}

/// Per-mode 2x2 blocks of `exp(V)` (`e**`) and `phi(V)` (`p**`) for the
/// Klein-Gordon system.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpPhiTables {
    pub grid: GridSpec,
    pub tau: f64,
    pub omega: f64,
    pub e11: Vec<f64>,
    pub e12: Vec<f64>,
    pub e21: Vec<f64>,
    pub e22: Vec<f64>,
    pub p11: Vec<f64>,
    pub p12: Vec<f64>,
    pub p21: Vec<f64>,
    pub p22: Vec<f64>,
}

impl ExpPhiTables {
    pub fn exp_block(&self, k: usize) -> [[f64; 2]; 2] {
        [[self.e11[k], self.e12[k]], [self.e21[k], self.e22[k]]]
    }

    pub fn phi_block(&self, k: usize) -> [[f64; 2]; 2] {
        [[self.p11[k], self.p12[k]], [self.p21[k], self.p22[k]]]
    }

    pub fn len(&self) -> usize {
        self.e11.len()
    }

    pub fn is_empty(&self) -> bool {
        self.e11.is_empty()
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::InvalidTimeStep(tau));
    }
    Ok(())
}

pub fn build_kg_tables(
    grid: &GridSpec,
    lambda: &[f64],
    omega: f64,
    tau: f64,
) -> Result<ExpPhiTables> {
    check_tau(tau)?;
    if lambda.len() != grid.len() {
        return Err(Error::LengthMismatch {
            expected: grid.len(),
            got: lambda.len(),
        });
    }
    if let Some((mode, &value)) = lambda.iter().enumerate().find(|(_, &l)| l > 0.0) {
        return Err(Error::PositiveEigenvalue { mode, value });
    }
    let n = lambda.len();
    let mut t = ExpPhiTables {
        grid: grid.clone(),
        tau,
        omega,
        e11: Vec::with_capacity(n),
        e12: Vec::with_capacity(n),
        e21: Vec::with_capacity(n),
        e22: Vec::with_capacity(n),
        p11: Vec::with_capacity(n),
        p12: Vec::with_capacity(n),
        p21: Vec::with_capacity(n),
        p22: Vec::with_capacity(n),
    };
    for &l in lambda {
        let mu = omega.abs() * (-l).sqrt();
        let theta = tau * mu;
        let (s, c) = theta.sin_cos();
        let sc = sinc(theta);
        let cc = cosc(theta);
        t.e11.push(c);
        t.e12.push(tau * sc);
        t.e21.push(-mu * s);
        t.e22.push(c);
        t.p11.push(sc);
        t.p12.push(tau * cc);
        t.p21.push(-tau * mu * mu * cc);
        t.p22.push(sc);
    }
    Ok(t)
}

/// Per-mode multipliers of `exp(i tau D)` and of its average over one step.
#[derive(Debug, Clone, PartialEq)]
pub struct NlsTables {
    pub grid: GridSpec,
    pub tau: f64,
    pub exp_d: Vec<Complex64>,
    pub sigma: Vec<Complex64>,
}

pub fn build_nls_tables(grid: &GridSpec, lambda: &[f64], tau: f64) -> Result<NlsTables> {
    check_tau(tau)?;
    if lambda.len() != grid.len() {
        return Err(Error::LengthMismatch {
            expected: grid.len(),
            got: lambda.len(),
        });
    }
    let exp_d = lambda
        .iter()
        .map(|&l| Complex64::from_polar(1.0, tau * l))
        .collect();
    // (e^{i theta} - 1)/(i theta) = sinc(theta/2) e^{i theta/2}
    let sigma = lambda
        .iter()
        .map(|&l| {
            let half = 0.5 * tau * l;
            Complex64::from_polar(sinc(half), half)
        })
        .collect();
    Ok(NlsTables {
        grid: grid.clone(),
        tau,
        exp_d,
        sigma,
    })
}
