//! Dense reference computations for small grids.
//!
//! Everything here works on explicit matrices: circulant difference
//! operators, DFT matrices, matrix exponentials by scaling and squaring,
//! `phi` by Gauss-Legendre quadrature, and one-step solutions of the
//! integrators obtained by assembling and LU-solving the full coupled linear
//! system. Nothing depends on the FFT path or on the per-mode closed forms
//! it is used to check.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

/// Direct `O(N^2)` forward DFT, `c_k = sum_j x_j exp(-2 pi i jk/N)`.
pub fn naive_dft(x: &[Complex64]) -> Vec<Complex64> {
    let n = x.len();
    (0..n)
        .map(|k| {
            x.iter().enumerate().fold(Complex64::new(0.0, 0.0), |acc, (j, &v)| {
                let ang = -2.0 * PI * ((j * k) % n) as f64 / n as f64;
                acc + v * Complex64::from_polar(1.0, ang)
            })
        })
        .collect()
}

/// Periodic second-difference matrix with stencil `(1, -2, 1)/h^2`.
pub fn second_difference_matrix(n: usize, h: f64) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    let c = 1.0 / (h * h);
    for i in 0..n {
        m[(i, i)] = -2.0 * c;
        m[(i, (i + 1) % n)] += c;
        m[(i, (i + n - 1) % n)] += c;
    }
    m
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = m.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

/// Pseudo-spectral second-derivative matrix on `n` points of a period
/// `length`, assembled as `F^{-1} diag(-(2 pi k / L)^2) F` from explicit DFT
/// matrices.
pub fn spectral_laplacian_matrix(n: usize, length: f64) -> DMatrix<f64> {
    let w = |j: usize, k: usize, sign: f64| {
        Complex64::from_polar(1.0, sign * 2.0 * PI * ((j * k) % n) as f64 / n as f64)
    };
    let c = 2.0 * PI / length;
    let mut m = DMatrix::zeros(n, n);
    for r in 0..n {
        for s in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..n {
                let kk = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
                acc += w(r, k, 1.0) * (-(c * kk) * (c * kk)) * w(k, s, -1.0);
            }
            m[(r, s)] = acc.re / n as f64;
        }
    }
    m
}

/// Matrix exponential by scaling and squaring with a Taylor kernel.
pub fn expm_complex(a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    let norm1 = (0..n)
        .map(|j| a.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let s = if norm1 > 0.25 {
        (norm1 / 0.25).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a / Complex64::new(2f64.powi(s), 0.0);
    let mut term = CMatrix::identity(n, n);
    let mut sum = CMatrix::identity(n, n);
    for k in 1..=30 {
        term = &term * &scaled / Complex64::new(k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

pub fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    expm_complex(&a.map(|x| Complex64::new(x, 0.0))).map(|z| z.re)
}

/// Gauss-Legendre nodes and weights mapped to `[0, 1]`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 1..=n {
        let mut x = (PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((0.5 * (1.0 - x), 0.5 * w));
    }
    out
}

/// `int_0^1 exp((1 - xi) A) dxi` by `nodes`-point Gauss-Legendre quadrature.
pub fn phi_complex(a: &CMatrix, nodes: usize) -> CMatrix {
    let n = a.nrows();
    let mut acc = CMatrix::zeros(n, n);
    for (x, w) in gauss_legendre(nodes) {
        acc += expm_complex(&(a * Complex64::new(1.0 - x, 0.0))) * Complex64::new(w, 0.0);
    }
    acc
}

pub fn phi(a: &DMatrix<f64>, nodes: usize) -> DMatrix<f64> {
    phi_complex(&a.map(|x| Complex64::new(x, 0.0)), nodes).map(|z| z.re)
}

/// `V = tau S M` for the Klein-Gordon system, `z = (u, v)`.
pub fn kg_generator(b2: &DMatrix<f64>, omega: f64, tau: f64) -> DMatrix<f64> {
    let n = b2.nrows();
    let mut v = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        v[(i, n + i)] = tau;
        for j in 0..n {
            v[(n + i, j)] = tau * omega * omega * b2[(i, j)];
        }
    }
    v
}

/// Inputs for one dense Klein-Gordon step.
pub struct KgDenseInput<'a> {
    pub u: &'a [f64],
    pub v: &'a [f64],
    pub q: f64,
    pub u_prev: Option<&'a [f64]>,
    pub h: f64,
    pub omega: f64,
    pub tau: f64,
    pub c0: f64,
    pub g: &'a dyn Fn(f64) -> f64,
    pub gp: &'a dyn Fn(f64) -> f64,
}

pub struct DenseKgMatrices {
    pub exp_v: DMatrix<f64>,
    pub phi_v: DMatrix<f64>,
}

pub fn kg_dense_matrices(n: usize, h: f64, omega: f64, tau: f64) -> DenseKgMatrices {
    let v = kg_generator(&second_difference_matrix(n, h), omega, tau);
    DenseKgMatrices {
        exp_v: expm(&v),
        phi_v: phi(&v, 32),
    }
}

/// One linearly implicit SAV exponential step for Klein-Gordon, obtained by
/// solving the full `(2N + 1)`-dimensional linear system for
/// `(u^{n+1}, v^{n+1}, q^{n+1})`.
pub fn kg_esavs_dense_step(inp: &KgDenseInput, mats: &DenseKgMatrices) -> (Vec<f64>, Vec<f64>, f64) {
    let n = inp.u.len();
    let h = inp.h;
    let u_hat: Vec<f64> = match inp.u_prev {
        None => inp.u.to_vec(),
        Some(p) => inp.u.iter().zip(p).map(|(a, b)| 1.5 * a - 0.5 * b).collect(),
    };
    let s2 = h * u_hat.iter().map(|&x| (inp.g)(x)).sum::<f64>() + inp.c0;
    let s = s2.sqrt();
    let w = DVector::from_iterator(n, u_hat.iter().map(|&x| (inp.gp)(x) / s));
    let z = DVector::from_iterator(2 * n, inp.u.iter().chain(inp.v).copied());
    let ez = &mats.exp_v * &z;
    // tau phi(V) S (w q_half, 0) = -tau phi(V)[:, v-block] w q_half
    let c = mats.phi_v.columns(n, n) * &w * inp.tau;

    let dim = 2 * n + 1;
    let mut a = DMatrix::<f64>::identity(dim, dim);
    let mut rhs = DVector::<f64>::zeros(dim);
    for i in 0..2 * n {
        a[(i, 2 * n)] = 0.5 * c[i];
        rhs[i] = ez[i] - 0.5 * c[i] * inp.q;
    }
    // q' - h/2 <w, u'> = q - h/2 <w, u>
    let wu: f64 = w.iter().zip(inp.u).map(|(a, b)| a * b).sum();
    for j in 0..n {
        a[(2 * n, j)] = -0.5 * h * w[j];
    }
    rhs[2 * n] = inp.q - 0.5 * h * wu;
    let x = a.lu().solve(&rhs).expect("nonsingular step system");
    (
        x.rows(0, n).iter().copied().collect(),
        x.rows(n, n).iter().copied().collect(),
        x[2 * n],
    )
}

/// Fixed-point solution of the exponential AVF step for Klein-Gordon with
/// dense matrices. `dd(a, b)` is the divided difference of `G`.
pub fn kg_eavf_dense_step(
    u: &[f64],
    v: &[f64],
    tau: f64,
    mats: &DenseKgMatrices,
    dd: &dyn Fn(f64, f64) -> f64,
    tol: f64,
    max_iters: usize,
) -> (Vec<f64>, Vec<f64>, usize) {
    let n = u.len();
    let z = DVector::from_iterator(2 * n, u.iter().chain(v).copied());
    let ez = &mats.exp_v * &z;
    let pv = mats.phi_v.columns(n, n).into_owned();
    let update = |guess: &[f64]| -> DVector<f64> {
        let gbar = DVector::from_iterator(n, u.iter().zip(guess).map(|(&a, &b)| dd(a, b)));
        &ez - &pv * gbar * tau
    };
    let mut guess = u.to_vec();
    let mut iters = 0;
    loop {
        let next = update(&guess);
        iters += 1;
        let inc = next
            .rows(0, n)
            .iter()
            .zip(&guess)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        guess = next.rows(0, n).iter().copied().collect();
        if inc < tol || iters >= max_iters {
            break;
        }
    }
    let z_new = update(&guess);
    (
        z_new.rows(0, n).iter().copied().collect(),
        z_new.rows(n, n).iter().copied().collect(),
        iters,
    )
}

pub struct DenseNlsMatrices {
    pub exp_d: CMatrix,
    /// `int_0^1 exp(i tau D (1 - xi)) dxi`.
    pub sigma: CMatrix,
}

pub fn nls_dense_matrices(n: usize, length: f64, tau: f64) -> DenseNlsMatrices {
    let d = spectral_laplacian_matrix(n, length);
    let itd = d.map(|x| Complex64::new(0.0, tau * x));
    DenseNlsMatrices {
        exp_d: expm_complex(&itd),
        sigma: phi_complex(&itd, 32),
    }
}

/// One SAV exponential step for the Schrodinger equation, solving the full
/// real linear system for `(Re u', Im u', q')`.
pub fn nls_esavs_dense_step(
    u: &[Complex64],
    q: f64,
    u_prev: Option<&[Complex64]>,
    h: f64,
    beta: f64,
    tau: f64,
    c0: f64,
    mats: &DenseNlsMatrices,
) -> (Vec<Complex64>, f64) {
    let n = u.len();
    let u_hat: Vec<Complex64> = match u_prev {
        None => u.to_vec(),
        Some(p) => u.iter().zip(p).map(|(&a, &b)| a * 1.5 - b * 0.5).collect(),
    };
    let s2 = h * u_hat.iter().map(|z| z.norm_sqr().powi(2)).sum::<f64>() + c0;
    let s = s2.sqrt();
    let gamma: Vec<Complex64> = u_hat.iter().map(|&z| z * z.norm_sqr() / s).collect();
    let gv = DVector::from_vec(gamma.clone());
    let uv = DVector::from_vec(u.to_vec());
    let eu = &mats.exp_d * &uv;
    let pg = &mats.sigma * &gv * Complex64::new(0.0, beta * tau);

    // u' = E u + pg (q' + q)/2 ; q' = q + 2 h Re sum gamma conj(u' - u)
    let dim = 2 * n + 1;
    let mut a = DMatrix::<f64>::identity(dim, dim);
    let mut rhs = DVector::<f64>::zeros(dim);
    for i in 0..n {
        a[(i, 2 * n)] = -0.5 * pg[i].re;
        a[(n + i, 2 * n)] = -0.5 * pg[i].im;
        rhs[i] = eu[i].re + 0.5 * pg[i].re * q;
        rhs[n + i] = eu[i].im + 0.5 * pg[i].im * q;
        a[(2 * n, i)] = -2.0 * h * gamma[i].re;
        a[(2 * n, n + i)] = -2.0 * h * gamma[i].im;
    }
    let gu: f64 = gamma.iter().zip(u).map(|(g, z)| g.re * z.re + g.im * z.im).sum();
    rhs[2 * n] = q - 2.0 * h * gu;
    let x = a.lu().solve(&rhs).expect("nonsingular step system");
    (
        (0..n).map(|i| Complex64::new(x[i], x[n + i])).collect(),
        x[2 * n],
    )
}

/// Fixed-point exponential AVF step for the Schrodinger equation; the
/// segment average of `|w|^2 w` uses 32-point Gauss-Legendre quadrature.
pub fn nls_eavf_dense_step(
    u: &[Complex64],
    beta: f64,
    tau: f64,
    mats: &DenseNlsMatrices,
    tol: f64,
    max_iters: usize,
) -> (Vec<Complex64>, usize) {
    let n = u.len();
    let gl = gauss_legendre(32);
    let eu = &mats.exp_d * DVector::from_vec(u.to_vec());
    let ps = &mats.sigma * Complex64::new(0.0, beta * tau);
    let update = |guess: &[Complex64]| -> Vec<Complex64> {
        let avg = DVector::from_iterator(
            n,
            u.iter().zip(guess).map(|(&a, &b)| {
                gl.iter().fold(Complex64::new(0.0, 0.0), |acc, &(x, w)| {
                    let z = a * (1.0 - x) + b * x;
                    acc + z * z.norm_sqr() * w
                })
            }),
        );
        (&eu + &ps * avg).iter().copied().collect()
    };
    let mut guess = u.to_vec();
    let mut iters = 0;
    loop {
        let next = update(&guess);
        iters += 1;
        let inc = next
            .iter()
            .zip(&guess)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
        guess = next;
        if inc < tol || iters >= max_iters {
            break;
        }
    }
    (guess, iters)
}
