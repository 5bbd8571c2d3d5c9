//! Refinement ladders and scheme comparisons built from single runs.

use std::fmt::Write as _;
use std::path::PathBuf;

use rayon::prelude::*;

use crate::catalog::{ProblemSpec, Scheme};
use crate::error::{BenchError, Result};
use crate::run::{run, RunOutput};

#[derive(Debug, Clone, PartialEq)]
pub struct LadderRow {
    pub level: usize,
    pub h: f64,
    pub tau: f64,
    pub err_l2: f64,
    pub err_inf: f64,
    pub order_l2: Option<f64>,
    pub order_inf: Option<f64>,
    pub iters: usize,
}

/// Halves `(h, tau)` jointly for Klein-Gordon and `tau` alone (space fixed)
/// for Schrodinger, starting from `base`.
pub fn ladder_specs(base: &ProblemSpec, levels: usize) -> Result<Vec<ProblemSpec>> {
    if levels < 2 {
        return Err(BenchError::config("a ladder needs at least two levels"));
    }
    if !base.id.has_exact_solution() {
        return Err(BenchError::config(format!("{} has no exact solution to measure against", base.id)));
    }
    (0..levels)
        .map(|k| {
            let mut s = base.clone();
            let f = 1usize << k;
            s.tau = base.tau / f as f64;
            if !base.id.is_schrodinger() {
                s.n = base.n * f;
            }
            s.validate()?;
            Ok(s)
        })
        .collect()
}

/// Runs each spec to its end time (independently, in parallel) and tabulates
/// final errors with observed orders between consecutive entries.
pub fn convergence_table(specs: &[ProblemSpec]) -> Result<Vec<LadderRow>> {
    let outputs: Vec<RunOutput> = specs
        .par_iter()
        .map(|s| {
            let mut s = s.clone();
            s.out_dir = None;
            s.snapshots.times.clear();
            s.output_every = s.steps()?.max(1);
            run(&s)
        })
        .collect::<Result<_>>()?;
    let mut rows: Vec<LadderRow> = Vec::with_capacity(outputs.len());
    for (level, o) in outputs.iter().enumerate() {
        let last = o.last();
        let (err_l2, err_inf) = match (last.err_l2, last.err_inf) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(BenchError::config(format!("{} has no exact solution", o.spec.id))),
        };
        let order = |prev: f64, cur: f64| -> Result<f64> {
            let v = esav_core::diagnostics::convergence_orders(&[prev, cur])
                .map_err(|e| BenchError::Invariant(e.to_string()))?;
            Ok(v[0])
        };
        let (order_l2, order_inf) = match rows.last() {
            Some(p) => (Some(order(p.err_l2, err_l2)?), Some(order(p.err_inf, err_inf)?)),
            None => (None, None),
        };
        rows.push(LadderRow {
            level,
            h: o.spec.h(),
            tau: o.spec.tau,
            err_l2,
            err_inf,
            order_l2,
            order_inf,
            iters: o.total_iters,
        });
    }
    Ok(rows)
}

pub fn render_ladder(rows: &[LadderRow]) -> String {
    let mut s = String::from("level,h,tau,err_l2,order_l2,err_inf,order_inf,iters\n");
    let o = |v: Option<f64>| v.map(|v| format!("{v:.4}")).unwrap_or_default();
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{:e},{},{:e},{},{}",
            r.level,
            r.h,
            r.tau,
            r.err_l2,
            o(r.order_l2),
            r.err_inf,
            o(r.order_inf),
            r.iters
        );
    }
    s
}

/// Builds the ladder, runs it and writes `<stem>_convergence.csv` into
/// `base.out_dir` if set.
pub fn convergence_driver(base: &ProblemSpec, levels: usize) -> Result<(Vec<LadderRow>, Option<PathBuf>)> {
    let rows = convergence_table(&ladder_specs(base, levels)?)?;
    let path = write_table(base, "convergence", &render_ladder(&rows))?;
    Ok((rows, path))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    pub scheme: Scheme,
    pub err_l2: Option<f64>,
    pub err_inf: Option<f64>,
    pub wall_seconds: f64,
    pub steps: usize,
    pub total_iters: usize,
    pub max_energy_deviation: f64,
    pub initial_energy: f64,
}

impl CompareRow {
    pub fn iters_per_step(&self) -> f64 {
        self.total_iters as f64 / self.steps.max(1) as f64
    }
}

/// Runs both schemes one after the other on the same spec. Diagnostics are
/// only taken at the end so the timing reflects stepping cost.
pub fn compare_driver(spec: &ProblemSpec) -> Result<(Vec<CompareRow>, Option<PathBuf>)> {
    let mut rows = Vec::new();
    for scheme in [Scheme::Esavs, Scheme::Eavfs] {
        let mut s = spec.clone();
        s.scheme = scheme;
        s.out_dir = None;
        s.snapshots.times.clear();
        s.output_every = s.steps()?.max(1);
        let o = run(&s)?;
        if scheme == Scheme::Esavs && o.total_iters != 0 {
            return Err(BenchError::Invariant(format!(
                "linearly implicit scheme reported {} iterations",
                o.total_iters
            )));
        }
        rows.push(CompareRow {
            scheme,
            err_l2: o.last().err_l2,
            err_inf: o.last().err_inf,
            wall_seconds: o.wall.as_secs_f64(),
            steps: o.steps,
            total_iters: o.total_iters,
            max_energy_deviation: o.max_energy_deviation(),
            initial_energy: o.initial_energy(),
        });
    }
    let path = write_table(spec, "compare", &render_compare(&rows))?;
    Ok((rows, path))
}

pub fn render_compare(rows: &[CompareRow]) -> String {
    let mut s = String::from("scheme,err_l2,err_inf,wall_s,steps,iters,iters_per_step,max_dE\n");
    let o = |v: Option<f64>| v.map(|v| format!("{v:e}")).unwrap_or_default();
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{:.6},{},{},{:.3},{:e}",
            r.scheme,
            o(r.err_l2),
            o(r.err_inf),
            r.wall_seconds,
            r.steps,
            r.total_iters,
            r.iters_per_step(),
            r.max_energy_deviation
        );
    }
    s
}

fn write_table(spec: &ProblemSpec, kind: &str, body: &str) -> Result<Option<PathBuf>> {
    let Some(dir) = &spec.out_dir else { return Ok(None) };
    std::fs::create_dir_all(dir).map_err(|e| BenchError::io(format!("creating {}", dir.display()), e))?;
    let path = dir.join(format!("{}_{kind}.csv", spec.file_stem()));
    std::fs::write(&path, body).map_err(|e| BenchError::io(format!("writing {}", path.display()), e))?;
    Ok(Some(path))
}
