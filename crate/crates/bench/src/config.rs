//! Flat TOML run configuration.
//!
//! ```toml
//! problem = "sg1d"        # sg1d | sg2d_ring | kg2d_cubic | nls1d_soliton | nls2d_planewave
//! scheme = "esavs"        # esavs | eavfs
//! a = -20.0               # domain [a, b] along each axis
//! b = 20.0
//! n = 400                 # nodes per axis (or give h instead)
//! tau = 0.01
//! t_end = 1.0
//! c0 = 1.0
//! output_every = 10       # steps between CSV rows
//! out_dir = "out"
//! snapshot_times = [0.0, 0.5]
//! snapshot_transform = "identity"   # identity | sin_half
//! fp_tol = 1e-14          # EAVFS fixed-point tolerance
//! fp_max_iters = 200
//! ```
//!
//! Every key is optional except `problem`; missing keys take the catalog
//! default. Command-line flags are applied on top of the file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::catalog::{ProblemId, ProblemSpec, Scheme, Transform};
use crate::error::{BenchError, Result};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub problem: Option<ProblemId>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scheme: Option<Scheme>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_every: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub snapshot_times: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub snapshot_transform: Option<Transform>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fp_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fp_max_iters: Option<usize>,
}

impl Settings {
    pub fn from_toml(text: &str) -> std::result::Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| BenchError::io(format!("reading {}", path.display()), e))?;
        Self::from_toml(&text).map_err(|source| BenchError::ConfigFile { path: path.to_owned(), source })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("settings always serialize")
    }

    /// Every field of a resolved spec, `h` omitted in favour of `n`.
    pub fn from_spec(spec: &ProblemSpec) -> Self {
        Settings {
            problem: Some(spec.id),
            scheme: Some(spec.scheme),
            a: Some(spec.a),
            b: Some(spec.b),
            n: Some(spec.n),
            h: None,
            tau: Some(spec.tau),
            t_end: Some(spec.t_end),
            c0: Some(spec.c0),
            output_every: Some(spec.output_every),
            out_dir: spec.out_dir.clone(),
            snapshot_times: Some(spec.snapshots.times.clone()),
            snapshot_transform: Some(spec.snapshots.transform),
            fp_tol: Some(spec.fp_tol),
            fp_max_iters: Some(spec.fp_max_iters),
        }
    }

    fn apply(&self, spec: &mut ProblemSpec) -> Result<()> {
        if self.n.is_some() && self.h.is_some() {
            return Err(BenchError::config("give either n or h, not both"));
        }
        macro_rules! set {
            ($($f:ident),*) => { $(if let Some(v) = self.$f.clone() { spec.$f = v; })* };
        }
        set!(scheme, a, b, n, tau, t_end, c0, output_every, fp_tol, fp_max_iters);
        if let Some(h) = self.h {
            spec.set_h(h)?;
        }
        if let Some(d) = &self.out_dir {
            spec.out_dir = Some(d.clone());
        }
        if let Some(t) = &self.snapshot_times {
            spec.snapshots.times = t.clone();
        }
        if let Some(t) = self.snapshot_transform {
            spec.snapshots.transform = t;
        }
        Ok(())
    }
}

/// Resolves layered settings (later layers win) against the catalog.
pub fn resolve(layers: &[&Settings]) -> Result<ProblemSpec> {
    let id = layers
        .iter()
        .rev()
        .find_map(|s| s.problem)
        .ok_or_else(|| BenchError::config("no problem given"))?;
    let mut spec = ProblemSpec::default_for(id);
    for s in layers {
        s.apply(&mut spec)?;
    }
    spec.validate()?;
    Ok(spec)
}
