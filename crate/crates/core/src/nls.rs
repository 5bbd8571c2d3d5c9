//! Exponential SAV stepper for the cubic Schrodinger equation
//! `i u_t + Laplace(u) + beta |u|^2 u = 0` with Fourier pseudo-spectral
//! differentiation.
//!
//! With `gamma = |u_hat|^2 u_hat / sqrt(<|u_hat|^4, 1> + C0)` and the averaged
//! flow `phi = i beta tau F^H Sigma F`, the update
//! `u^{n+1} = exp(i tau D) u^n + phi gamma q^{n+1/2}` reduces to a 2x2 linear
//! system for `(<gamma, u^{n+1}>, <u^{n+1}, gamma>)`.
//!
//! Conserved quantity: `<-D u, u> - beta/2 q^2 - beta/2 C0`. The opposite
//! sign on the kinetic term (`<D u, u> + beta/2 q^2`) is conserved as well,
//! being the same functional negated; mixing the signs is not.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::dft::SpectralPlan;
use crate::error::{Error, Result};
use crate::field::{inner_raw, ComplexField, Field};
use crate::grid::GridSpec;
use crate::phi::{build_nls_tables, NlsTables};
use crate::stepper::TimeStepper;

pub type ComplexSampler = Arc<dyn Fn(&[f64]) -> Complex64 + Send + Sync>;

/// Relative threshold below which the 2x2 determinant is treated as zero.
pub const SINGULAR_TOL: f64 = 1e-14;

#[derive(Clone)]
pub struct NlsProblem {
    pub grid: GridSpec,
    pub beta: f64,
    pub initial: ComplexSampler,
    pub c0: f64,
}

impl fmt::Debug for NlsProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NlsProblem")
            .field("grid", &self.grid)
            .field("beta", &self.beta)
            .field("c0", &self.c0)
            .finish_non_exhaustive()
    }
}

impl NlsProblem {
    /// `<|u|^4, 1> + C0`.
    pub fn sav_radicand(&self, u: &ComplexField) -> f64 {
        quartic_integral(u) + self.c0
    }
}

pub fn quartic_integral(u: &ComplexField) -> f64 {
    let s: f64 = u.values().iter().map(|z| z.norm_sqr().powi(2)).sum();
    u.grid().cell_volume() * s
}

#[derive(Debug, Clone, PartialEq)]
pub struct NlsState {
    pub u: ComplexField,
    pub q: f64,
    pub u_prev: Option<ComplexField>,
    pub n: usize,
    pub t: f64,
}

pub fn nls_init(problem: &NlsProblem) -> Result<NlsState> {
    let u = problem.grid.sample(|p| (problem.initial)(p));
    if let Some(i) = u
        .values()
        .iter()
        .position(|z| !(z.re.is_finite() && z.im.is_finite()))
    {
        return Err(Error::NonFinite(i));
    }
    let r = problem.sav_radicand(&u);
    if r < 0.0 {
        return Err(Error::NegativeRadicand(r));
    }
    Ok(NlsState {
        u,
        q: r.sqrt(),
        u_prev: None,
        n: 0,
        t: 0.0,
    })
}

pub fn nls_predictor(state: &NlsState) -> ComplexField {
    match &state.u_prev {
        None => state.u.clone(),
        Some(prev) => state
            .u
            .zip_with(prev, |a, b| a * 1.5 - b * 0.5)
            .expect("state fields share one grid"),
    }
}

/// `<-D u, u>` evaluated in mode space, `D` the spectral Laplacian with
/// eigenvalues `lambda`.
pub fn kinetic_energy(plan: &SpectralPlan, lambda: &[f64], u: &ComplexField) -> Result<f64> {
    let c = plan.forward(u)?;
    let n = c.len() as f64;
    let s: f64 = c.iter().zip(lambda).map(|(c, &l)| -l * c.norm_sqr()).sum();
    Ok(u.grid().cell_volume() * s / n)
}

pub fn nls_modified_energy(
    state: &NlsState,
    problem: &NlsProblem,
    plan: &SpectralPlan,
    lambda: &[f64],
) -> Result<f64> {
    let k = kinetic_energy(plan, lambda, &state.u)?;
    Ok(k - 0.5 * problem.beta * state.q * state.q - 0.5 * problem.beta * problem.c0)
}

/// Discrete Hamiltonian `<-D u, u> - beta/2 <|u|^4, 1>`, with the same
/// sign convention as [`nls_modified_energy`].
pub fn nls_hamiltonian(
    u: &ComplexField,
    beta: f64,
    plan: &SpectralPlan,
    lambda: &[f64],
) -> Result<f64> {
    Ok(kinetic_energy(plan, lambda, u)? - 0.5 * beta * quartic_integral(u))
}

pub(crate) fn apply_multipliers(
    plan: &SpectralPlan,
    u: &[Complex64],
    m: impl Fn(usize) -> Complex64,
) -> Result<Vec<Complex64>> {
    let mut c = u.to_vec();
    plan.forward_in_place(&mut c)?;
    c.iter_mut().enumerate().for_each(|(k, c)| *c *= m(k));
    plan.inverse_in_place(&mut c)?;
    Ok(c)
}

pub fn nls_step(
    state: &NlsState,
    tables: &NlsTables,
    problem: &NlsProblem,
    plan: &SpectralPlan,
) -> Result<NlsState> {
    let grid = &problem.grid;
    if &tables.grid != grid || plan.grid() != grid || state.u.grid() != grid {
        return Err(Error::GridMismatch);
    }
    let tau = tables.tau;
    let vol = grid.cell_volume();
    let u = state.u.values();

    let u_hat = nls_predictor(state);
    let s2 = problem.sav_radicand(&u_hat);
    if s2 < 0.0 {
        return Err(Error::NegativeRadicand(s2));
    }
    let inv_s = if s2 > 0.0 { 1.0 / s2.sqrt() } else { 0.0 };
    let gamma: Vec<Complex64> = u_hat
        .values()
        .iter()
        .map(|&z| z * (z.norm_sqr() * inv_s))
        .collect();

    let ibt = Complex64::new(0.0, problem.beta * tau);
    let phi_gamma = apply_multipliers(plan, &gamma, |k| ibt * tables.sigma[k])?;
    let lin = apply_multipliers(plan, u, |k| tables.exp_d[k])?;

    let a = inner_raw(&gamma, &phi_gamma, vol);
    let a_bar = inner_raw(&phi_gamma, &gamma, vol);
    let gu = inner_raw(&gamma, u, vol);
    let ug = inner_raw(u, &gamma, vol);

    let c_b = state.q - 0.5 * (gu + ug);
    let b: Vec<Complex64> = lin
        .iter()
        .zip(&phi_gamma)
        .map(|(&l, &p)| l + p * c_b)
        .collect();
    let rhs1 = inner_raw(&gamma, &b, vol);
    let rhs2 = inner_raw(&b, &gamma, vol);

    let (x, y) = solve_pair(a, a_bar, rhs1, rhs2)?;

    let c_u = 0.5 * (x + y);
    let u_new: Vec<Complex64> = b
        .iter()
        .zip(&phi_gamma)
        .map(|(&b, &p)| b + p * c_u)
        .collect();
    let q_half = (0.5 * (x + y) + state.q - 0.5 * (gu + ug)).re;
    let q_new = 2.0 * q_half - state.q;

    let n = state.n + 1;
    Ok(NlsState {
        u: Field::new(grid.clone(), u_new)?,
        q: q_new,
        u_prev: Some(state.u.clone()),
        n,
        t: n as f64 * tau,
    })
}

/// Solves
///
/// ```text
/// (1 - a/2) x - a/2 y = r1
/// -a'/2 x + (1 - a'/2) y = r2
/// ```
///
/// with `a = <gamma, phi gamma>`, `a' = <phi gamma, gamma>`.
pub fn solve_pair(
    a: Complex64,
    a_bar: Complex64,
    r1: Complex64,
    r2: Complex64,
) -> Result<(Complex64, Complex64)> {
    let one = Complex64::new(1.0, 0.0);
    let m00 = one - 0.5 * a;
    let m01 = -0.5 * a;
    let m10 = -0.5 * a_bar;
    let m11 = one - 0.5 * a_bar;
    let det = m00 * m11 - m01 * m10;
    let scale = 1.0f64.max(m00.norm() * m11.norm()).max(m01.norm() * m10.norm());
    if !(det.norm() >= SINGULAR_TOL * scale) {
        return Err(Error::SingularSystem(det.norm()));
    }
    let x = (r1 * m11 - m01 * r2) / det;
    let y = (m00 * r2 - m10 * r1) / det;
    Ok((x, y))
}

#[derive(Debug, Clone)]
pub struct NlsEsavs {
    problem: NlsProblem,
    tables: NlsTables,
    plan: SpectralPlan,
    lambda: Vec<f64>,
}

impl NlsEsavs {
    pub fn new(problem: NlsProblem, tau: f64) -> Result<Self> {
        let lambda = problem.grid.spectral_laplacian_eigenvalues();
        let tables = build_nls_tables(&problem.grid, &lambda, tau)?;
        let plan = SpectralPlan::new(&problem.grid);
        Ok(Self {
            problem,
            tables,
            plan,
            lambda,
        })
    }

    pub fn problem(&self) -> &NlsProblem {
        &self.problem
    }

    pub fn tables(&self) -> &NlsTables {
        &self.tables
    }

    pub fn plan(&self) -> &SpectralPlan {
        &self.plan
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }
}

impl TimeStepper for NlsEsavs {
    type Sample = Complex64;
    type State = NlsState;

    fn grid(&self) -> &GridSpec {
        &self.problem.grid
    }

    fn tau(&self) -> f64 {
        self.tables.tau
    }

    fn init(&self) -> Result<NlsState> {
        nls_init(&self.problem)
    }

    fn step(&self, state: &NlsState) -> Result<(NlsState, usize)> {
        Ok((nls_step(state, &self.tables, &self.problem, &self.plan)?, 0))
    }

    fn solution<'a>(&self, state: &'a NlsState) -> &'a ComplexField {
        &state.u
    }

    fn time(&self, state: &NlsState) -> f64 {
        state.t
    }

    fn step_index(&self, state: &NlsState) -> usize {
        state.n
    }

    fn conserved_energy(&self, state: &NlsState) -> f64 {
        nls_modified_energy(state, &self.problem, &self.plan, &self.lambda)
            .expect("state lives on the integrator grid")
    }

    fn hamiltonian(&self, state: &NlsState) -> f64 {
        nls_hamiltonian(&state.u, self.problem.beta, &self.plan, &self.lambda)
            .expect("state lives on the integrator grid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use std::f64::consts::PI;

    fn constant(grid: GridSpec, c: Complex64, beta: f64, c0: f64) -> NlsProblem {
        NlsProblem {
            grid,
            beta,
            initial: Arc::new(move |_| c),
            c0,
        }
    }

    #[test]
    fn zero_initial_data() {
        let g = make_grid(0.0, 1.0, 8, 1).unwrap();
        let p = constant(g, Complex64::new(0.0, 0.0), 2.0, 9.0);
        let integ = NlsEsavs::new(p, 0.01).unwrap();
        let mut s = integ.init().unwrap();
        assert_eq!(s.q, 3.0);
        for _ in 0..10 {
            s = integ.step(&s).unwrap().0;
        }
        assert!(s.u.values().iter().all(|z| z.norm() == 0.0));
        assert_eq!(s.q, 3.0);
        assert_eq!(integ.conserved_energy(&s), -0.5 * 2.0 * 9.0 - 0.5 * 2.0 * 9.0);
    }

    #[test]
    fn zero_state_zero_energy() {
        let g = make_grid(0.0, 1.0, 8, 1).unwrap();
        let p = constant(g, Complex64::new(0.0, 0.0), 2.0, 0.0);
        let integ = NlsEsavs::new(p, 0.01).unwrap();
        assert_eq!(integ.conserved_energy(&integ.init().unwrap()), 0.0);
    }

    #[test]
    fn plane_wave_init_and_kinetic_energy() {
        let g = make_grid(0.0, 2.0 * PI, 16, 2).unwrap();
        let p = NlsProblem {
            grid: g,
            beta: -1.0,
            initial: Arc::new(|x| Complex64::from_polar(1.0, x[0] + x[1])),
            c0: 0.0,
        };
        let integ = NlsEsavs::new(p, 0.01).unwrap();
        let s = integ.init().unwrap();
        assert!((s.q - 2.0 * PI).abs() < 1e-12);
        let k = kinetic_energy(integ.plan(), integ.lambda(), &s.u).unwrap();
        let norm2 = s.u.norm_l2().powi(2);
        assert!((k - 2.0 * norm2).abs() < 1e-10 * norm2);
    }

    #[test]
    fn singular_pair_detected() {
        let a = Complex64::new(1.0, 0.3);
        let r = Complex64::new(1.0, 0.0);
        assert!(matches!(
            solve_pair(a, a.conj(), r, r),
            Err(Error::SingularSystem(_))
        ));
    }

    #[test]
    fn pair_solution_is_conjugate() {
        let a = Complex64::new(-0.2, 0.7);
        let r = Complex64::new(0.4, -1.1);
        let (x, y) = solve_pair(a, a.conj(), r, r.conj()).unwrap();
        assert!((x - y.conj()).norm() < 1e-15);
    }
}
