//! Exponential averaged-vector-field (EAVF) baseline.
//!
//! The nonlinearity is replaced by its average along the segment from `u^n`
//! to `u^{n+1}`, which makes the scheme fully implicit and conservative for
//! the discrete Hamiltonian itself. Each step is solved by fixed-point
//! iteration started from `u^n`, stopping once the max-norm increment drops
//! below the configured tolerance.

use num_complex::Complex64;

use crate::dft::SpectralPlan;
use crate::error::{Error, Result};
use crate::field::{ComplexField, Field};
use crate::grid::GridSpec;
use crate::kg::{combine, kg_init, kg_original_energy, scale, KgProblem, KgState};
use crate::nls::{apply_multipliers, nls_hamiltonian, nls_init, NlsProblem, NlsState};
use crate::phi::{build_kg_tables, build_nls_tables, ExpPhiTables, NlsTables};
use crate::potential::Potential;
use crate::stepper::TimeStepper;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointConfig {
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for FixedPointConfig {
    fn default() -> Self {
        Self {
            tol: 1e-14,
            max_iters: 200,
        }
    }
}

impl FixedPointConfig {
    pub fn new(tol: f64, max_iters: usize) -> Result<Self> {
        let cfg = Self { tol, max_iters };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidConfig(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidConfig("max_iters must be at least 1".into()));
        }
        Ok(())
    }
}

/// Pointwise divided difference `(G(b_j) - G(a_j)) / (b_j - a_j)`.
pub fn avf_gradient(potential: &dyn Potential, a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter()
        .zip(b)
        .map(|(&a, &b)| potential.divided_difference(a, b))
        .collect()
}

fn max_diff<T: crate::field::Sample>(a: &[T], b: &[T]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0, |m, (&x, &y)| m.max((x - y).modulus()))
}

/// One EAVF step for Klein-Gordon. Returns the new state and the number of
/// fixed-point sweeps.
pub fn eavf_step_kg(
    state: &KgState,
    tables: &ExpPhiTables,
    problem: &KgProblem,
    plan: &SpectralPlan,
    cfg: &FixedPointConfig,
) -> Result<(KgState, usize)> {
    cfg.validate()?;
    let grid = &problem.grid;
    if &tables.grid != grid || plan.grid() != grid || state.u.grid() != grid {
        return Err(Error::GridMismatch);
    }
    let tau = tables.tau;
    let pot = problem.potential.as_ref();
    let u = state.u.values();

    let uh = plan.forward_real(u)?;
    let vh = plan.forward_real(state.v.values())?;
    let lin_u = plan.inverse_real(combine(&tables.e11, &uh, &tables.e12, &vh))?;
    let lin_v = plan.inverse_real(combine(&tables.e21, &uh, &tables.e22, &vh))?;

    let sweep = |guess: &[f64]| -> Result<(Vec<f64>, Vec<num_complex::Complex64>)> {
        let gbar = avf_gradient(pot, u, guess);
        let gh = plan.forward_real(&gbar)?;
        let p12g = plan.inverse_real(scale(&tables.p12, &gh))?;
        let next = lin_u
            .iter()
            .zip(&p12g)
            .map(|(&l, &p)| l - tau * p)
            .collect();
        Ok((next, gh))
    };

    let mut guess = u.to_vec();
    let mut iters = 0;
    let mut increment = f64::INFINITY;
    while iters < cfg.max_iters {
        let (next, _) = sweep(&guess)?;
        iters += 1;
        increment = max_diff(&next, &guess);
        guess = next;
        if !increment.is_finite() {
            break;
        }
        if increment < cfg.tol {
            break;
        }
    }
    if !(increment < cfg.tol) {
        return Err(Error::NoConvergence { iters, increment });
    }

    // u and v from one consistent gradient evaluated at the converged iterate
    let (u_new, gh) = sweep(&guess)?;
    let p22g = plan.inverse_real(scale(&tables.p22, &gh))?;
    let v_new: Vec<f64> = lin_v
        .iter()
        .zip(&p22g)
        .map(|(&l, &p)| l - tau * p)
        .collect();

    let u_new = Field::new(grid.clone(), u_new)?;
    let q = problem.sav_radicand(&u_new).max(0.0).sqrt();
    let n = state.n + 1;
    Ok((
        KgState {
            u: u_new,
            v: Field::new(grid.clone(), v_new)?,
            q,
            u_prev: Some(state.u.clone()),
            n,
            t: n as f64 * tau,
        },
        iters,
    ))
}

#[derive(Debug, Clone)]
pub struct KgEavf {
    problem: KgProblem,
    tables: ExpPhiTables,
    plan: SpectralPlan,
    cfg: FixedPointConfig,
}

impl KgEavf {
    pub fn new(problem: KgProblem, tau: f64, cfg: FixedPointConfig) -> Result<Self> {
        cfg.validate()?;
        let lambda = problem.grid.fd_laplacian_eigenvalues();
        let tables = build_kg_tables(&problem.grid, &lambda, problem.omega, tau)?;
        let plan = SpectralPlan::new(&problem.grid);
        Ok(Self {
            problem,
            tables,
            plan,
            cfg,
        })
    }

    pub fn problem(&self) -> &KgProblem {
        &self.problem
    }

    pub fn tables(&self) -> &ExpPhiTables {
        &self.tables
    }
}

impl TimeStepper for KgEavf {
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
        eavf_step_kg(state, &self.tables, &self.problem, &self.plan, &self.cfg)
    }

    fn solution<'a>(&self, state: &'a KgState) -> &'a Field<f64> {
        &state.u
    }

    fn time(&self, state: &KgState) -> f64 {
        state.t
    }

    fn step_index(&self, state: &KgState) -> usize {
        state.n
    }

    fn conserved_energy(&self, state: &KgState) -> f64 {
        kg_original_energy(state, &self.problem)
    }

    fn hamiltonian(&self, state: &KgState) -> f64 {
        kg_original_energy(state, &self.problem)
    }
}

/// Gauss-Legendre nodes and weights on `[0, 1]`, 4 points (exact through degree 7).
const GAUSS4: [(f64, f64); 4] = [
    (0.069_431_844_202_973_71, 0.173_927_422_568_726_93),
    (0.330_009_478_207_571_9, 0.326_072_577_431_273_07),
    (0.669_990_521_792_428_1, 0.326_072_577_431_273_07),
    (0.930_568_155_797_026_3, 0.173_927_422_568_726_93),
];

/// `int_0^1 |w|^2 w dxi` along `w = (1 - xi) a + xi b`, pointwise.
pub fn avf_cubic(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter()
        .zip(b)
        .map(|(&a, &b)| {
            GAUSS4.iter().fold(Complex64::new(0.0, 0.0), |acc, &(x, w)| {
                let z = a * (1.0 - x) + b * x;
                acc + z * (z.norm_sqr() * w)
            })
        })
        .collect()
}

pub fn eavf_step_nls(
    state: &NlsState,
    tables: &NlsTables,
    problem: &NlsProblem,
    plan: &SpectralPlan,
    cfg: &FixedPointConfig,
) -> Result<(NlsState, usize)> {
    cfg.validate()?;
    let grid = &problem.grid;
    if &tables.grid != grid || plan.grid() != grid || state.u.grid() != grid {
        return Err(Error::GridMismatch);
    }
    let tau = tables.tau;
    let u = state.u.values();
    let lin = apply_multipliers(plan, u, |k| tables.exp_d[k])?;
    let ibt = Complex64::new(0.0, problem.beta * tau);

    let sweep = |guess: &[Complex64]| -> Result<Vec<Complex64>> {
        let gbar = avf_cubic(u, guess);
        let p = apply_multipliers(plan, &gbar, |k| ibt * tables.sigma[k])?;
        Ok(lin.iter().zip(&p).map(|(&l, &p)| l + p).collect())
    };

    let mut guess = u.to_vec();
    let mut iters = 0;
    let mut increment = f64::INFINITY;
    while iters < cfg.max_iters {
        let next = sweep(&guess)?;
        iters += 1;
        increment = max_diff(&next, &guess);
        guess = next;
        if !increment.is_finite() || increment < cfg.tol {
            break;
        }
    }
    if !(increment < cfg.tol) {
        return Err(Error::NoConvergence { iters, increment });
    }

    let u_new: ComplexField = Field::new(grid.clone(), guess)?;
    let q = problem.sav_radicand(&u_new).max(0.0).sqrt();
    let n = state.n + 1;
    Ok((
        NlsState {
            u: u_new,
            q,
            u_prev: Some(state.u.clone()),
            n,
            t: n as f64 * tau,
        },
        iters,
    ))
}

#[derive(Debug, Clone)]
pub struct NlsEavf {
    problem: NlsProblem,
    tables: NlsTables,
    plan: SpectralPlan,
    lambda: Vec<f64>,
    cfg: FixedPointConfig,
}

impl NlsEavf {
    pub fn new(problem: NlsProblem, tau: f64, cfg: FixedPointConfig) -> Result<Self> {
        cfg.validate()?;
        let lambda = problem.grid.spectral_laplacian_eigenvalues();
        let tables = build_nls_tables(&problem.grid, &lambda, tau)?;
        let plan = SpectralPlan::new(&problem.grid);
        Ok(Self {
            problem,
            tables,
            plan,
            lambda,
            cfg,
        })
    }
}

impl TimeStepper for NlsEavf {
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
        eavf_step_nls(state, &self.tables, &self.problem, &self.plan, &self.cfg)
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
        self.hamiltonian(state)
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
    use crate::potential::SineGordon;
    use std::sync::Arc;

    #[test]
    fn config_validation() {
        assert!(FixedPointConfig::new(0.0, 10).is_err());
        assert!(FixedPointConfig::new(1e-14, 0).is_err());
        assert_eq!(FixedPointConfig::default().tol, 1e-14);
    }

    #[test]
    fn zero_state_converges_in_one_sweep() {
        let grid = make_grid(-5.0, 5.0, 16, 1).unwrap();
        let p = KgProblem {
            grid,
            omega: 1.0,
            potential: Arc::new(SineGordon),
            initial_u: Arc::new(|_| 0.0),
            initial_v: Arc::new(|_| 0.0),
            c0: 1.0,
        };
        let integ = KgEavf::new(p, 0.1, FixedPointConfig::default()).unwrap();
        let s = integ.init().unwrap();
        let (s1, iters) = integ.step(&s).unwrap();
        assert_eq!(iters, 1);
        assert!(s1.u.values().iter().all(|&x| x == 0.0));
        assert!(s1.v.values().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn non_convergence_reported() {
        let grid = make_grid(-5.0, 5.0, 16, 1).unwrap();
        let p = KgProblem {
            grid,
            omega: 1.0,
            potential: Arc::new(SineGordon),
            initial_u: Arc::new(|x| (x[0]).sin()),
            initial_v: Arc::new(|_| 0.5),
            c0: 1.0,
        };
        let integ = KgEavf::new(p, 0.1, FixedPointConfig::new(1e-14, 2).unwrap()).unwrap();
        let s = integ.init().unwrap();
        assert!(matches!(
            integ.step(&s),
            Err(Error::NoConvergence { iters: 2, .. })
        ));
    }

    #[test]
    fn cubic_average_matches_closed_form_at_equal_points() {
        let a = [Complex64::new(0.3, -1.2)];
        let got = avf_cubic(&a, &a)[0];
        let want = a[0] * a[0].norm_sqr();
        assert!((got - want).norm() < 1e-15);
    }
}
