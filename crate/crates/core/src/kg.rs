//! Linearly implicit exponential SAV stepper for the Klein-Gordon equation.
//!
//! The equation is rewritten with `q = sqrt(<G(u), 1> + C0)` as
//!
//! ```text
//! u_t = v,   v_t = omega^2 Laplace(u) - G'(u) q / sqrt(<G(u),1> + C0),
//! q_t = <G'(u), u_t> / (2 sqrt(<G(u),1> + C0))
//! ```
//!
//! and discretized by second-order central differences in space. One step
//! applies the exact linear flow `exp(V)` and its average `phi(V)` mode by
//! mode, evaluates the nonlinearity at the extrapolation `(3u^n - u^{n-1})/2`,
//! and eliminates `q^{n+1/2}` through a single scalar equation. There is no
//! iteration. The quantity
//! `1/2 ||v||^2 + omega^2/2 ||delta^+ u||^2 + q^2 - C0` is conserved to roundoff.

use std::fmt;
use std::sync::Arc;

use crate::dft::SpectralPlan;
use crate::error::{Error, Result};
use crate::field::{dot_raw, Field, RealField};
use crate::grid::GridSpec;
use crate::phi::{build_kg_tables, ExpPhiTables};
use crate::potential::Potential;
use crate::stepper::TimeStepper;

pub type Sampler = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct KgProblem {
    pub grid: GridSpec,
    pub omega: f64,
    pub potential: Arc<dyn Potential>,
    pub initial_u: Sampler,
    pub initial_v: Sampler,
    pub c0: f64,
}

impl fmt::Debug for KgProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KgProblem")
            .field("grid", &self.grid)
            .field("omega", &self.omega)
            .field("potential", &self.potential)
            .field("c0", &self.c0)
            .finish_non_exhaustive()
    }
}

impl KgProblem {
    /// `<G(u), 1> + C0`.
    pub fn sav_radicand(&self, u: &RealField) -> f64 {
        let g = &self.potential;
        let s: f64 = u.values().iter().map(|&x| g.value(x)).sum();
        self.grid.cell_volume() * s + self.c0
    }

    pub fn potential_energy(&self, u: &RealField) -> f64 {
        self.sav_radicand(u) - self.c0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KgState {
    pub u: RealField,
    pub v: RealField,
    pub q: f64,
    /// `u^{n-1}`; absent before the first step.
    pub u_prev: Option<RealField>,
    pub n: usize,
    pub t: f64,
}

pub fn kg_init(problem: &KgProblem) -> Result<KgState> {
    let u = problem.grid.sample(|p| (problem.initial_u)(p));
    let v = problem.grid.sample(|p| (problem.initial_v)(p));
    for f in [&u, &v] {
        if let Some(i) = f.values().iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite(i));
        }
    }
    let r = problem.sav_radicand(&u);
    if r < 0.0 {
        return Err(Error::NegativeRadicand(r));
    }
    Ok(KgState {
        u,
        v,
        q: r.sqrt(),
        u_prev: None,
        n: 0,
        t: 0.0,
    })
}

/// `(3 u^n - u^{n-1}) / 2`, or `u^0` on the first step.
pub fn kg_predictor(state: &KgState) -> RealField {
    match &state.u_prev {
        None => state.u.clone(),
        Some(prev) => state
            .u
            .zip_with(prev, |a, b| 1.5 * a - 0.5 * b)
            .expect("state fields share one grid"),
    }
}

/// `1/2 ||v||^2 + omega^2/2 ||delta^+ u||^2 + q^2 - C0`.
pub fn kg_modified_energy(state: &KgState, problem: &KgProblem) -> f64 {
    let w2 = problem.omega * problem.omega;
    0.5 * state.v.norm_l2().powi(2) + 0.5 * w2 * state.u.forward_diff_seminorm_sqr()
        + state.q * state.q
        - problem.c0
}

/// `1/2 ||v||^2 + omega^2/2 ||delta^+ u||^2 + <G(u), 1>`.
pub fn kg_original_energy(state: &KgState, problem: &KgProblem) -> f64 {
    let w2 = problem.omega * problem.omega;
    0.5 * state.v.norm_l2().powi(2)
        + 0.5 * w2 * state.u.forward_diff_seminorm_sqr()
        + problem.potential_energy(&state.u)
}

/// One ESAVS step.
pub fn kg_step(
    state: &KgState,
    tables: &ExpPhiTables,
    problem: &KgProblem,
    plan: &SpectralPlan,
) -> Result<KgState> {
    let grid = &problem.grid;
    if &tables.grid != grid || plan.grid() != grid || state.u.grid() != grid {
        return Err(Error::GridMismatch);
    }
    let tau = tables.tau;
    let vol = grid.cell_volume();
    let pot = &problem.potential;

    let u_hat = kg_predictor(state);
    let gp: Vec<f64> = u_hat.values().iter().map(|&x| pot.derivative(x)).collect();
    let s2 = problem.sav_radicand(&u_hat);
    if s2 < 0.0 {
        return Err(Error::NegativeRadicand(s2));
    }
    // s2 == 0 only where G vanishes identically on the predictor, and then G' does too.
    let inv_s = if s2 > 0.0 { 1.0 / s2.sqrt() } else { 0.0 };

    let u = state.u.values();
    let v = state.v.values();
    let uh = plan.forward_real(u)?;
    let vh = plan.forward_real(v)?;
    let gh = plan.forward_real(&gp)?;

    let lin_u = plan.inverse_real(combine(&tables.e11, &uh, &tables.e12, &vh))?;
    let lin_v = plan.inverse_real(combine(&tables.e21, &uh, &tables.e22, &vh))?;
    let p12g = plan.inverse_real(scale(&tables.p12, &gh))?;
    let p22g = plan.inverse_real(scale(&tables.p22, &gh))?;

    // u^{n+1} + gamma <G'(u_hat), u^{n+1}> = g
    let gamma_coef = 0.25 * tau * inv_s * inv_s;
    let gamma: Vec<f64> = p12g.iter().map(|&p| gamma_coef * p).collect();
    let gp_u = dot_raw(&gp, u, vol);
    let g: Vec<f64> = lin_u
        .iter()
        .zip(&p12g)
        .zip(&gamma)
        .map(|((&l, &p), &gm)| l - tau * p * state.q * inv_s + gm * gp_u)
        .collect();

    let denom = 1.0 + dot_raw(&gp, &gamma, vol);
    if !(denom > 0.0 && denom.is_finite()) {
        return Err(Error::DegenerateDenominator(denom));
    }
    let gp_unew = dot_raw(&gp, &g, vol) / denom;
    let u_new: Vec<f64> = g
        .iter()
        .zip(&gamma)
        .map(|(&g, &gm)| g - gm * gp_unew)
        .collect();

    // q^{n+1} = q^n + tau <G'(u_hat), (u^{n+1} - u^n)/tau> / (2 s)
    let du: f64 = vol
        * gp
            .iter()
            .zip(&u_new)
            .zip(u)
            .map(|((&a, &b), &c)| a * (b - c))
            .sum::<f64>();
    let q_new = state.q + 0.5 * inv_s * du;
    let q_half = 0.5 * (q_new + state.q);

    let v_new: Vec<f64> = lin_v
        .iter()
        .zip(&p22g)
        .map(|(&l, &p)| l - tau * p * q_half * inv_s)
        .collect();

    let n = state.n + 1;
    Ok(KgState {
        u: Field::new(grid.clone(), u_new)?,
        v: Field::new(grid.clone(), v_new)?,
        q: q_new,
        u_prev: Some(state.u.clone()),
        n,
        t: n as f64 * tau,
    })
}

pub(crate) fn combine(
    a: &[f64],
    x: &[num_complex::Complex64],
    b: &[f64],
    y: &[num_complex::Complex64],
) -> Vec<num_complex::Complex64> {
    a.iter()
        .zip(x)
        .zip(b.iter().zip(y))
        .map(|((&a, &x), (&b, &y))| x * a + y * b)
        .collect()
}

pub(crate) fn scale(a: &[f64], x: &[num_complex::Complex64]) -> Vec<num_complex::Complex64> {
    a.iter().zip(x).map(|(&a, &x)| x * a).collect()
}

/// Klein-Gordon ESAVS integrator: problem, multiplier tables and FFT plan.
#[derive(Debug, Clone)]
pub struct KgEsavs {
    problem: KgProblem,
    tables: ExpPhiTables,
    plan: SpectralPlan,
}

impl KgEsavs {
    /// Builds tables from the finite-difference Laplacian of the problem grid.
    pub fn new(problem: KgProblem, tau: f64) -> Result<Self> {
        let lambda = problem.grid.fd_laplacian_eigenvalues();
        let tables = build_kg_tables(&problem.grid, &lambda, problem.omega, tau)?;
        Self::with_tables(problem, tables)
    }

    pub fn with_tables(problem: KgProblem, tables: ExpPhiTables) -> Result<Self> {
        if tables.grid != problem.grid {
            return Err(Error::GridMismatch);
        }
        let plan = SpectralPlan::new(&problem.grid);
        Ok(Self {
            problem,
            tables,
            plan,
        })
    }

    pub fn problem(&self) -> &KgProblem {
        &self.problem
    }

    pub fn tables(&self) -> &ExpPhiTables {
        &self.tables
    }

    pub fn plan(&self) -> &SpectralPlan {
        &self.plan
    }
}

impl TimeStepper for KgEsavs {
    type Sample = f64;
    type State = KgState;

    fn grid(&self) -> &GridSpec {
        &self.problem.grid
    }

    fn tau(&self) -> f64 {
        self.tables.tau
    }

    fn init(&self) -> Result<KgState> {
        kg_init(&self.problem)
    }

    fn step(&self, state: &KgState) -> Result<(KgState, usize)> {
        Ok((kg_step(state, &self.tables, &self.problem, &self.plan)?, 0))
    }

    fn solution<'a>(&self, state: &'a KgState) -> &'a RealField {
        &state.u
    }

    fn time(&self, state: &KgState) -> f64 {
        state.t
    }

    fn step_index(&self, state: &KgState) -> usize {
        state.n
    }

    fn conserved_energy(&self, state: &KgState) -> f64 {
        kg_modified_energy(state, &self.problem)
    }

    fn hamiltonian(&self, state: &KgState) -> f64 {
        kg_original_energy(state, &self.problem)
    }
}
