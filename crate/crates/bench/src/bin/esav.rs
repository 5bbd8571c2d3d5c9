use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use esav_bench::config::{resolve, Settings};
use esav_bench::drivers::{compare_driver, convergence_driver, render_compare, render_ladder};
use esav_bench::{run, BenchError, ProblemId, Scheme, Transform};

#[derive(Parser)]
#[command(name = "esav", version, about = "Exponential SAV integrators: runs, convergence ladders, comparisons")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one problem and write its diagnostics CSV.
    Run(Common),
    /// Refinement ladder with observed orders.
    Converge {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 4)]
        levels: usize,
    },
    /// Both schemes on the same problem: errors, wall time, iterations.
    Compare(Common),
}

#[derive(Args)]
struct Common {
    /// sg1d, sg2d_ring, kg2d_cubic, nls1d_soliton or nls2d_planewave.
    #[arg(long, value_parser = parse::<ProblemId>)]
    problem: Option<ProblemId>,
    /// TOML file; flags given here override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_parser = parse::<Scheme>)]
    scheme: Option<Scheme>,
    /// Mesh width; must divide the domain length.
    #[arg(long, conflicts_with = "n")]
    h: Option<f64>,
    /// Nodes per axis.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long = "t-end")]
    t_end: Option<f64>,
    #[arg(long)]
    c0: Option<f64>,
    /// Steps between CSV rows.
    #[arg(long)]
    every: Option<usize>,
    /// Comma-separated snapshot times.
    #[arg(long, value_delimiter = ',')]
    snapshots: Option<Vec<f64>>,
    #[arg(long, value_parser = parse::<Transform>)]
    transform: Option<Transform>,
    #[arg(long = "fp-tol")]
    fp_tol: Option<f64>,
    #[arg(long = "fp-max-iters")]
    fp_max_iters: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse<T: std::str::FromStr<Err = BenchError>>(s: &str) -> Result<T, String> {
    s.parse().map_err(|e: BenchError| e.to_string())
}

impl Common {
    fn spec(&self) -> esav_bench::Result<esav_bench::ProblemSpec> {
        let file = match &self.config {
            Some(p) => Settings::load(p)?,
            None => Settings::default(),
        };
        let flags = Settings {
            problem: self.problem,
            scheme: self.scheme,
            n: self.n,
            h: self.h,
            tau: self.tau,
            t_end: self.t_end,
            c0: self.c0,
            output_every: self.every,
            out_dir: self.out.clone(),
            snapshot_times: self.snapshots.clone(),
            snapshot_transform: self.transform,
            fp_tol: self.fp_tol,
            fp_max_iters: self.fp_max_iters,
            ..Settings::default()
        };
        // an h in the file and an n on the command line (or the reverse) is fine
        let mut file = file;
        if flags.n.is_some() || flags.h.is_some() {
            file.n = None;
            file.h = None;
        }
        resolve(&[&file, &flags])
    }
}

fn execute(cli: Cli) -> esav_bench::Result<()> {
    match cli.command {
        Command::Run(c) => {
            let spec = c.spec()?;
            let out = run(&spec)?;
            let last = out.last();
            println!(
                "{} {}: {} steps, t = {}, E_mod = {:.15e}, max |dE| = {:.3e}, iters = {}, wall = {:.3}s",
                spec.id,
                spec.scheme,
                out.steps,
                last.t,
                last.e_mod,
                out.max_energy_deviation(),
                out.total_iters,
                out.wall.as_secs_f64()
            );
            if let (Some(l2), Some(li)) = (last.err_l2, last.err_inf) {
                println!("err_l2 = {l2:.4e}, err_inf = {li:.4e}");
            }
            for p in out.csv_path.iter().chain(&out.snapshot_paths) {
                println!("wrote {}", p.display());
            }
        }
        Command::Converge { common, levels } => {
            let spec = common.spec()?;
            let (rows, path) = convergence_driver(&spec, levels)?;
            print!("{}", render_ladder(&rows));
            if let Some(p) = path {
                println!("wrote {}", p.display());
            }
        }
        Command::Compare(c) => {
            let spec = c.spec()?;
            let (rows, path) = compare_driver(&spec)?;
            print!("{}", render_compare(&rows));
            if let Some(p) = path {
                println!("wrote {}", p.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::try_parse().unwrap_or_else(|e| {
        let _ = e.print();
        std::process::exit(if e.use_stderr() { 3 } else { 0 });
    });
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
