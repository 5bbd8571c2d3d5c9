//! The five benchmark problems and their default settings.

use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

use esav_core::grid::make_grid;
use esav_core::kg::KgProblem;
use esav_core::nls::NlsProblem;
use esav_core::potential::{Quartic, SineGordon};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{BenchError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemId {
    Sg1d,
    Sg2dRing,
    Kg2dCubic,
    Nls1dSoliton,
    Nls2dPlanewave,
}

impl ProblemId {
    pub const ALL: [ProblemId; 5] = [
        ProblemId::Sg1d,
        ProblemId::Sg2dRing,
        ProblemId::Kg2dCubic,
        ProblemId::Nls1dSoliton,
        ProblemId::Nls2dPlanewave,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ProblemId::Sg1d => "sg1d",
            ProblemId::Sg2dRing => "sg2d_ring",
            ProblemId::Kg2dCubic => "kg2d_cubic",
            ProblemId::Nls1dSoliton => "nls1d_soliton",
            ProblemId::Nls2dPlanewave => "nls2d_planewave",
        }
    }

    pub fn dim(self) -> usize {
        match self {
            ProblemId::Sg1d | ProblemId::Nls1dSoliton => 1,
            _ => 2,
        }
    }

    pub fn is_schrodinger(self) -> bool {
        matches!(self, ProblemId::Nls1dSoliton | ProblemId::Nls2dPlanewave)
    }

    pub fn has_exact_solution(self) -> bool {
        matches!(
            self,
            ProblemId::Sg1d | ProblemId::Nls1dSoliton | ProblemId::Nls2dPlanewave
        )
    }
}

impl fmt::Display for ProblemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProblemId {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        ProblemId::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| BenchError::config(format!("unknown problem `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Esavs,
    Eavfs,
}

impl Scheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Esavs => "esavs",
            Scheme::Eavfs => "eavfs",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "esavs" => Ok(Scheme::Esavs),
            "eavfs" => Ok(Scheme::Eavfs),
            _ => Err(BenchError::config(format!("unknown scheme `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transform {
    #[default]
    Identity,
    /// `sin(u/2)`, the display quantity for sine-Gordon kinks.
    SinHalf,
}

impl Transform {
    pub fn as_str(self) -> &'static str {
        match self {
            Transform::Identity => "identity",
            Transform::SinHalf => "sin_half",
        }
    }
}

impl FromStr for Transform {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identity" => Ok(Transform::Identity),
            "sin_half" => Ok(Transform::SinHalf),
            _ => Err(BenchError::config(format!("unknown transform `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SnapshotRequest {
    pub times: Vec<f64>,
    pub transform: Transform,
}

/// A fully resolved run description.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub id: ProblemId,
    /// Domain `[a, b]` along every axis.
    pub a: f64,
    pub b: f64,
    /// Nodes per axis.
    pub n: usize,
    pub tau: f64,
    pub t_end: f64,
    pub c0: f64,
    pub scheme: Scheme,
    /// Record diagnostics every this many steps (the final step is always
    /// recorded).
    pub output_every: usize,
    pub out_dir: Option<PathBuf>,
    pub snapshots: SnapshotRequest,
    pub fp_tol: f64,
    pub fp_max_iters: usize,
}

impl ProblemSpec {
    pub fn default_for(id: ProblemId) -> Self {
        let (a, b, n, tau, t_end, c0) = match id {
            ProblemId::Sg1d => (-20.0, 20.0, 400, 0.01, 1.0, 1.0),
            ProblemId::Sg2dRing => (-30.0, 10.0, 200, 0.1, 10.0, 0.0),
            ProblemId::Kg2dCubic => (-10.0, 10.0, 200, 0.1, 10.0, 0.0),
            ProblemId::Nls1dSoliton => (-40.0, 40.0, 4096, 0.01, 1.0, 0.0),
            ProblemId::Nls2dPlanewave => (0.0, 2.0 * PI, 64, 0.01, 1.0, 0.0),
        };
        let snapshots = match id {
            ProblemId::Sg2dRing => SnapshotRequest {
                times: vec![0.0, 2.5, 5.0, 7.5, 10.0],
                transform: Transform::SinHalf,
            },
            _ => SnapshotRequest::default(),
        };
        ProblemSpec {
            id,
            a,
            b,
            n,
            tau,
            t_end,
            c0,
            scheme: Scheme::Esavs,
            output_every: 1,
            out_dir: None,
            snapshots,
            fp_tol: 1e-14,
            fp_max_iters: 200,
        }
    }

    pub fn h(&self) -> f64 {
        (self.b - self.a) / self.n as f64
    }

    /// Sets `n` from a mesh width, which must divide the domain length.
    pub fn set_h(&mut self, h: f64) -> Result<()> {
        if !(h > 0.0) {
            return Err(BenchError::config(format!("h must be positive, got {h}")));
        }
        let len = self.b - self.a;
        let n = (len / h).round();
        if n < 2.0 || ((len / n) - h).abs() > 1e-9 * h {
            return Err(BenchError::config(format!("h = {h} does not divide [{}, {}]", self.a, self.b)));
        }
        self.n = n as usize;
        Ok(())
    }

    /// Number of steps; `t_end` must be a whole multiple of `tau`.
    pub fn steps(&self) -> Result<usize> {
        let s = (self.t_end / self.tau).round();
        if (s * self.tau - self.t_end).abs() > 1e-9 * self.t_end.max(1.0) {
            return Err(BenchError::config(format!(
                "t_end = {} is not a multiple of tau = {}",
                self.t_end, self.tau
            )));
        }
        Ok(s as usize)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(BenchError::config(m));
        if !(self.b > self.a) || !self.a.is_finite() || !self.b.is_finite() {
            return bad(format!("empty domain [{}, {}]", self.a, self.b));
        }
        if self.n < 2 || !self.n.is_multiple_of(2) {
            return bad(format!("n must be even and at least 2, got {}", self.n));
        }
        if !(self.tau > 0.0) || !self.tau.is_finite() {
            return bad(format!("tau must be positive, got {}", self.tau));
        }
        if !(self.t_end >= 0.0) || !self.t_end.is_finite() {
            return bad(format!("t_end must be nonnegative, got {}", self.t_end));
        }
        if !(self.c0 >= 0.0) || !self.c0.is_finite() {
            return bad(format!("c0 must be nonnegative, got {}", self.c0));
        }
        if self.output_every == 0 {
            return bad("output_every must be at least 1".into());
        }
        if !(self.fp_tol > 0.0) || self.fp_max_iters == 0 {
            return bad("fixed-point tolerance and iteration cap must be positive".into());
        }
        for &t in &self.snapshots.times {
            if !(0.0..=self.t_end).contains(&t) {
                return bad(format!("snapshot time {t} outside [0, {}]", self.t_end));
            }
        }
        if self.id.is_schrodinger() && self.snapshots.transform == Transform::SinHalf {
            return bad("sin_half applies to real fields only".into());
        }
        self.steps().map(|_| ())
    }

    pub fn grid(&self) -> Result<esav_core::GridSpec> {
        make_grid(self.a, self.b, self.n, self.id.dim())
            .map_err(|e| BenchError::config(e.to_string()))
    }

    pub fn file_stem(&self) -> String {
        format!("{}_{}", self.id, self.scheme)
    }
}

fn sech(x: f64) -> f64 {
    1.0 / x.cosh()
}

/// Ring-soliton profile `(4 - r) / 0.436` with `r` measured from `(-3, -7)`.
fn ring_arg(p: &[f64]) -> f64 {
    let r = ((p[0] + 3.0).powi(2) + (p[1] + 7.0).powi(2)).sqrt();
    (4.0 - r) / 0.436
}

/// Klein-Gordon problem for one of the three real catalog entries.
pub fn kg_problem(spec: &ProblemSpec) -> Result<KgProblem> {
    let grid = spec.grid()?;
    let (potential, initial_u, initial_v): (Arc<dyn esav_core::potential::Potential>, _, _) = match spec.id {
        ProblemId::Sg1d => (
            Arc::new(SineGordon),
            Arc::new(|_: &[f64]| 0.0) as esav_core::kg::Sampler,
            Arc::new(|p: &[f64]| 4.0 * sech(p[0])) as esav_core::kg::Sampler,
        ),
        ProblemId::Sg2dRing => (
            Arc::new(SineGordon),
            Arc::new(|p: &[f64]| 4.0 * ring_arg(p).exp().atan()) as _,
            Arc::new(|p: &[f64]| 4.13 / ring_arg(p).cosh()) as _,
        ),
        ProblemId::Kg2dCubic => (
            Arc::new(Quartic),
            Arc::new(|p: &[f64]| 2.0 * sech((p[0] * p[0] + p[1] * p[1]).cosh())) as _,
            Arc::new(|_: &[f64]| 0.0) as _,
        ),
        _ => return Err(BenchError::config(format!("{} is not a Klein-Gordon problem", spec.id))),
    };
    Ok(KgProblem { grid, omega: 1.0, potential, initial_u, initial_v, c0: spec.c0 })
}

pub fn nls_problem(spec: &ProblemSpec) -> Result<NlsProblem> {
    let grid = spec.grid()?;
    let (beta, initial): (f64, esav_core::nls::ComplexSampler) = match spec.id {
        ProblemId::Nls1dSoliton => (2.0, Arc::new(|p: &[f64]| nls1d_exact(p, 0.0))),
        ProblemId::Nls2dPlanewave => (-1.0, Arc::new(|p: &[f64]| nls2d_exact(p, 0.0))),
        _ => return Err(BenchError::config(format!("{} is not a Schrodinger problem", spec.id))),
    };
    Ok(NlsProblem { grid, beta, initial, c0: spec.c0 })
}

pub fn sg1d_exact(p: &[f64], t: f64) -> f64 {
    4.0 * (t * sech(p[0])).atan()
}

pub fn nls1d_exact(p: &[f64], t: f64) -> Complex64 {
    Complex64::from_polar(sech(p[0] - 4.0 * t), 2.0 * p[0] - 3.0 * t)
}

/// Plane wave with `A = 1`, `k = (1, 1)`, `beta = -1`, so the frequency is
/// `|k|^2 - beta |A|^2 = 3`.
pub fn nls2d_exact(p: &[f64], t: f64) -> Complex64 {
    Complex64::from_polar(1.0, p[0] + p[1] - 3.0 * t)
}
