//! Single-run driver: stepping loop, diagnostics rows, CSV and snapshots.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use esav_core::diagnostics::{error_norms, RunRecord};
use esav_core::eavf::{FixedPointConfig, KgEavf, NlsEavf};
use esav_core::kg::KgEsavs;
use esav_core::nls::NlsEsavs;
use esav_core::{Field, Sample, TimeStepper};
use num_complex::Complex64;

use crate::catalog::{self, ProblemId, ProblemSpec, Scheme, Transform};
use crate::error::{BenchError, Result};

pub const CSV_HEADER: &str = "t,E_mod,E_orig,err_l2,err_inf,iters";

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub spec: ProblemSpec,
    pub records: Vec<RunRecord>,
    pub steps: usize,
    pub total_iters: usize,
    /// Time spent in initialization and stepping, diagnostics included,
    /// file output excluded.
    pub wall: Duration,
    pub csv_path: Option<PathBuf>,
    pub snapshot_paths: Vec<PathBuf>,
}

impl RunOutput {
    pub fn last(&self) -> &RunRecord {
        self.records.last().expect("a run always has its t = 0 row")
    }

    pub fn max_energy_deviation(&self) -> f64 {
        esav_core::diagnostics::max_energy_deviation(&self.records).unwrap_or(0.0)
    }

    pub fn initial_energy(&self) -> f64 {
        self.records[0].e_mod
    }
}

/// Field samples that can be written to a snapshot file.
pub trait SnapshotSample: Sample {
    const COMPONENTS: usize;
    fn push(self, transform: Transform, out: &mut Vec<f64>);
}

impl SnapshotSample for f64 {
    const COMPONENTS: usize = 1;
    fn push(self, transform: Transform, out: &mut Vec<f64>) {
        out.push(match transform {
            Transform::Identity => self,
            Transform::SinHalf => (0.5 * self).sin(),
        });
    }
}

impl SnapshotSample for Complex64 {
    const COMPONENTS: usize = 2;
    fn push(self, _: Transform, out: &mut Vec<f64>) {
        out.push(self.re);
        out.push(self.im);
    }
}

type Exact<T> = fn(&[f64], f64) -> T;

/// Runs `spec` and writes its files when `spec.out_dir` is set.
pub fn run(spec: &ProblemSpec) -> Result<RunOutput> {
    spec.validate()?;
    let cfg = FixedPointConfig::new(spec.fp_tol, spec.fp_max_iters)
        .map_err(|e| BenchError::config(e.to_string()))?;
    let setup = |e: esav_core::Error| BenchError::config(e.to_string());
    let sg_exact: Option<Exact<f64>> = (spec.id == ProblemId::Sg1d).then_some(catalog::sg1d_exact);
    let nls_exact: Option<Exact<Complex64>> = match spec.id {
        ProblemId::Nls1dSoliton => Some(catalog::nls1d_exact),
        ProblemId::Nls2dPlanewave => Some(catalog::nls2d_exact),
        _ => None,
    };
    if spec.id.is_schrodinger() {
        let p = catalog::nls_problem(spec)?;
        match spec.scheme {
            Scheme::Esavs => drive(&NlsEsavs::new(p, spec.tau).map_err(setup)?, nls_exact, spec),
            Scheme::Eavfs => drive(&NlsEavf::new(p, spec.tau, cfg).map_err(setup)?, nls_exact, spec),
        }
    } else {
        let p = catalog::kg_problem(spec)?;
        match spec.scheme {
            Scheme::Esavs => drive(&KgEsavs::new(p, spec.tau).map_err(setup)?, sg_exact, spec),
            Scheme::Eavfs => drive(&KgEavf::new(p, spec.tau, cfg).map_err(setup)?, sg_exact, spec),
        }
    }
}

fn record<S: TimeStepper>(
    s: &S,
    st: &S::State,
    exact: Option<Exact<S::Sample>>,
    iters: Option<usize>,
) -> RunRecord {
    let t = s.time(st);
    let (err_l2, err_inf) = match exact {
        Some(f) => {
            let (a, b) = error_norms(s.solution(st), |p| f(p, t));
            (Some(a), Some(b))
        }
        None => (None, None),
    };
    RunRecord {
        t,
        e_mod: s.conserved_energy(st),
        e_orig: Some(s.hamiltonian(st)),
        err_l2,
        err_inf,
        iters,
    }
}

fn drive<S>(s: &S, exact: Option<Exact<S::Sample>>, spec: &ProblemSpec) -> Result<RunOutput>
where
    S: TimeStepper,
    S::Sample: SnapshotSample,
{
    let steps = spec.steps()?;
    let mut snap_steps: Vec<(usize, f64)> = spec
        .snapshots
        .times
        .iter()
        .map(|&t| ((t / spec.tau).round() as usize, t))
        .collect();
    snap_steps.sort_by_key(|&(k, _)| k);
    let mut snaps: Vec<(f64, Field<S::Sample>)> = Vec::new();

    let start = Instant::now();
    let fail = |step| move |source| BenchError::Solver { step, source };
    let mut st = s.init().map_err(fail(0))?;
    let mut records = vec![record(s, &st, exact, None)];
    let mut total_iters = 0;
    let mut since_last = 0;
    let take_snaps = |n: usize, st: &S::State, snaps: &mut Vec<(f64, Field<S::Sample>)>| {
        for &(_, t) in snap_steps.iter().filter(|&&(k, _)| k == n) {
            snaps.push((t, s.solution(st).clone()));
        }
    };
    take_snaps(0, &st, &mut snaps);
    for n in 1..=steps {
        let (next, iters) = s.step(&st).map_err(fail(n))?;
        st = next;
        if !s.solution(&st).all_finite() {
            return Err(BenchError::NonFinite(format!("solution after step {n}")));
        }
        total_iters += iters;
        since_last += iters;
        if n % spec.output_every == 0 || n == steps {
            records.push(record(s, &st, exact, Some(since_last)));
            since_last = 0;
        }
        take_snaps(n, &st, &mut snaps);
    }
    let wall = start.elapsed();

    for r in &records {
        let vals = [Some(r.t), Some(r.e_mod), r.e_orig, r.err_l2, r.err_inf];
        if vals.iter().flatten().any(|v| !v.is_finite()) {
            return Err(BenchError::NonFinite(format!("diagnostics at t = {}", r.t)));
        }
    }

    let mut out = RunOutput {
        spec: spec.clone(),
        records,
        steps,
        total_iters,
        wall,
        csv_path: None,
        snapshot_paths: Vec::new(),
    };
    if let Some(dir) = &spec.out_dir {
        fs::create_dir_all(dir).map_err(|e| BenchError::io(format!("creating {}", dir.display()), e))?;
        let path = dir.join(format!("{}.csv", spec.file_stem()));
        write_file(&path, render_csv(&out.records).as_bytes())?;
        out.csv_path = Some(path);
        for (t, field) in &snaps {
            let path = dir.join(format!("{}_t{:.4}.snap", spec.file_stem(), t));
            write_file(&path, &render_snapshot(spec, *t, field))?;
            out.snapshot_paths.push(path);
        }
    }
    Ok(out)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut f = fs::File::create(path).map_err(|e| BenchError::io(format!("creating {}", path.display()), e))?;
    f.write_all(bytes)
        .map_err(|e| BenchError::io(format!("writing {}", path.display()), e))
}

fn opt<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

pub fn render_csv(records: &[RunRecord]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in records {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            r.t,
            r.e_mod,
            opt(r.e_orig),
            opt(r.err_l2),
            opt(r.err_inf),
            opt(r.iters)
        );
    }
    s
}

/// Text header terminated by a line `end`, then row-major (axis 0 slowest)
/// little-endian f64 data; complex fields interleave real and imaginary parts.
pub fn render_snapshot<T: SnapshotSample>(spec: &ProblemSpec, t: f64, field: &Field<T>) -> Vec<u8> {
    let g = field.grid();
    let dims: Vec<String> = g.shape().iter().map(|n| n.to_string()).collect();
    let bounds: Vec<String> = g.axes().iter().flat_map(|a| [a.a.to_string(), a.b.to_string()]).collect();
    let transform = if T::COMPONENTS == 1 { spec.snapshots.transform } else { Transform::Identity };
    let mut head = String::new();
    let _ = writeln!(head, "esav-snapshot 1");
    let _ = writeln!(head, "problem {}", spec.id);
    let _ = writeln!(head, "scheme {}", spec.scheme);
    let _ = writeln!(head, "dims {}", dims.join(" "));
    let _ = writeln!(head, "bounds {}", bounds.join(" "));
    let _ = writeln!(head, "time {t}");
    let _ = writeln!(head, "transform {}", transform.as_str());
    let _ = writeln!(head, "components {}", T::COMPONENTS);
    let _ = writeln!(head, "end");
    let mut data = Vec::with_capacity(field.len() * T::COMPONENTS);
    for &v in field.values() {
        v.push(transform, &mut data);
    }
    let mut bytes = head.into_bytes();
    bytes.reserve(8 * data.len());
    for x in data {
        bytes.extend_from_slice(&x.to_le_bytes());
    }
    bytes
}

pub type SnapshotHeader = Vec<(String, String)>;

/// Parsed snapshot: header lines as key/value pairs and the data block.
pub fn read_snapshot(bytes: &[u8]) -> Result<(SnapshotHeader, Vec<f64>)> {
    let bad = || BenchError::config("malformed snapshot");
    let marker = b"\nend\n";
    let pos = bytes.windows(marker.len()).position(|w| w == marker).ok_or_else(bad)?;
    let head = std::str::from_utf8(&bytes[..pos]).map_err(|_| bad())?;
    let pairs = head
        .lines()
        .map(|l| {
            let (k, v) = l.split_once(' ').unwrap_or((l, ""));
            (k.to_string(), v.to_string())
        })
        .collect();
    let body = &bytes[pos + marker.len()..];
    if !body.len().is_multiple_of(8) {
        return Err(bad());
    }
    let data = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    Ok((pairs, data))
}
