//! `onion`: generate point sets, peel them into convex layers, sweep
//! families, fit layer-number exponents and run the verification suites.
//!
//! Exit codes: 0 success, 1 a check failed, 2 usage or validation error.

mod lists;
mod manifest;
mod verify;

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use convex_layers::analysis::{fit_exponent_with, run_sweep, SweepRow, DEFAULT_DISCARD};
use convex_layers::constructions::{ConstructionKind, ConstructionSpec};
use convex_layers::geom::min_distance;
use convex_layers::io::{read_pset, read_sweep, write_layers, write_log_pairs, write_pset, write_sweep};
use convex_layers::peeling::{peel_with, PeelOptions};
use convex_layers::EPS_GEOM;

use manifest::{sibling, write_json, RunManifest};
use verify::Suite;

#[derive(Parser, Debug)]
#[command(name = "onion", version, about = "Convex-layer peeling toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
    /// Ambient dimension.
    #[arg(long, global = true)]
    dim: Option<usize>,
    /// Master seed; every random choice of the run derives from it.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Vertex margin: a point is extreme iff it lies farther than this from
    /// the hull of the others.
    #[arg(long, global = true, default_value_t = EPS_GEOM)]
    eps: f64,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    /// Output path; a `.manifest.json` is written next to it.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a point set as PSET v1 (plus a trace JSON for `recursive`).
    Generate {
        #[arg(long)]
        kind: ConstructionKind,
        /// Size parameter of the family.
        #[arg(long)]
        n: u64,
    },
    /// Peel a PSET file into LAYERS v1 and print a summary line.
    Peel {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Measure a family over sizes and seeds into a SWEEP v1 CSV.
    Sweep {
        #[arg(long)]
        kind: ConstructionKind,
        /// e.g. `256,1296,4096` or `2^8..2^16`.
        #[arg(long)]
        sizes: String,
        /// e.g. `1,2,3` or `1..10` (inclusive); defaults to `--seed`.
        #[arg(long)]
        seeds: Option<String>,
        /// Also write `log_n log_L` pairs here.
        #[arg(long)]
        log_out: Option<PathBuf>,
    },
    /// Run a verification suite and emit a JSON report.
    Verify {
        suite: Suite,
        /// Comma-separated net spacings (nets, tangent).
        #[arg(long, value_delimiter = ',')]
        delta: Option<Vec<f64>>,
        /// Size parameter (shells).
        #[arg(long)]
        n: Option<u64>,
        /// Random instances per dimension (push).
        #[arg(long, default_value_t = 100)]
        random: usize,
        /// Sampled directions per check (nets, tangent).
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        /// Sampled probes per contact point (tangent).
        #[arg(long, default_value_t = 1_000)]
        face_samples: usize,
        /// Family to sweep (bounds).
        #[arg(long, default_value = "random_ball")]
        kind: ConstructionKind,
        /// Sizes to sweep (bounds).
        #[arg(long, default_value = "1000,2000,5000,10000")]
        sizes: String,
        /// Seeds to sweep (bounds); defaults to `--seed`.
        #[arg(long)]
        seeds: Option<String>,
        /// Directory to store the generated nets with JSON sidecars (nets).
        #[arg(long)]
        save_nets: Option<PathBuf>,
    },
    /// Fit the layer-number exponent to a SWEEP v1 CSV; prints JSON.
    Fit {
        #[arg(long = "in")]
        input: PathBuf,
        /// Fraction of the smallest sizes to drop.
        #[arg(long, default_value_t = DEFAULT_DISCARD)]
        discard: f64,
        /// Fail (exit 1) unless the slope is within `--tol` of this value.
        #[arg(long, requires = "tol")]
        expect: Option<f64>,
        #[arg(long, requires = "expect")]
        tol: Option<f64>,
    },
}

/// Result of a command that ran to completion.
enum Status {
    Ok,
    CheckFailed,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::CheckFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn require_out(out: &Option<PathBuf>) -> Result<&Path> {
    out.as_deref().context("--out is required for this command")
}

fn require_dim(dim: Option<usize>) -> Result<usize> {
    dim.context("--dim is required for this command")
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("cannot create {}", path.display()))?,
    ))
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(
        File::open(path).with_context(|| format!("cannot open {}", path.display()))?,
    ))
}

fn seeds_or_default(seeds: &Option<String>, seed: u64) -> Result<Vec<u64>> {
    match seeds {
        Some(s) => lists::parse_list(s),
        None => Ok(vec![seed]),
    }
}

fn run(cli: Cli) -> Result<Status> {
    if !(cli.eps.is_finite() && cli.eps >= 0.0) {
        bail!("--eps must be finite and nonnegative, got {}", cli.eps);
    }
    if !matches!(cli.cmd, Command::Sweep { .. } | Command::Verify { .. }) {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.jobs)
            .build_global()
            .context("cannot start thread pool")?;
    }
    let mut manifest = RunManifest::new(cli.seed);
    match &cli.cmd {
        Command::Generate { kind, n } => {
            let out = require_out(&cli.out)?;
            let spec = ConstructionSpec::new(*kind, require_dim(cli.dim)?, *n, cli.seed);
            let c = spec.generate()?;
            let mut w = create(out)?;
            write_pset(&mut w, &c.points)?;
            w.flush()?;
            manifest.spec = Some(serde_json::to_value(spec)?);
            manifest.outputs.push(out.to_path_buf());
            if let Some(trace) = &c.trace {
                let path = sibling(out, "trace.json");
                write_json(&path, trace)?;
                manifest.outputs.push(path);
            }
            manifest.write_next_to(out)?;
            println!("wrote {} points to {}", c.points.len(), out.display());
        }
        Command::Peel { input } => {
            let out = require_out(&cli.out)?;
            let x = read_pset(open(input)?).with_context(|| format!("reading {}", input.display()))?;
            let opts = PeelOptions {
                eps: cli.eps,
                ..PeelOptions::default()
            };
            let layering = peel_with(&x, &opts)?;
            let mu = if x.len() >= 2 { min_distance(&x)? } else { f64::INFINITY };
            let mut w = create(out)?;
            write_layers(&mut w, &layering)?;
            w.flush()?;
            manifest.inputs.push(input.clone());
            manifest.outputs.push(out.to_path_buf());
            manifest.write_next_to(out)?;
            println!(
                "n={} L={} max_layer={} mu={}",
                x.len(),
                layering.layer_number(),
                layering.max_layer_size(),
                mu
            );
        }
        Command::Sweep {
            kind,
            sizes,
            seeds,
            log_out,
        } => {
            let out = require_out(&cli.out)?;
            let dim = require_dim(cli.dim)?;
            let sizes = lists::parse_list(sizes)?;
            let seeds = seeds_or_default(seeds, cli.seed)?;
            let rows = run_sweep(*kind, dim, &sizes, &seeds, cli.jobs, cli.eps)?;
            write_sweep(create(out)?, &rows)?;
            manifest.spec = Some(serde_json::json!({
                "kind": kind,
                "dim": dim,
                "sizes": sizes,
                "seeds": seeds,
            }));
            manifest.outputs.push(out.to_path_buf());
            if let Some(path) = log_out {
                let mut w = create(path)?;
                write_log_pairs(&mut w, &rows)?;
                w.flush()?;
                manifest.outputs.push(path.clone());
            }
            manifest.write_next_to(out)?;
            let refused = rows.iter().filter(|r| matches!(r, SweepRow::Refused { .. })).count();
            println!("{} rows ({} refused) to {}", rows.len(), refused, out.display());
        }
        Command::Verify {
            suite,
            delta,
            n,
            random,
            samples,
            face_samples,
            kind,
            sizes,
            seeds,
            save_nets,
        } => {
            let params = verify::Params {
                dims: cli.dim.map(|d| vec![d]),
                deltas: delta.clone(),
                n: *n,
                random: *random,
                samples: *samples,
                face_samples: *face_samples,
                kind: *kind,
                sizes: lists::parse_list(sizes)?,
                seeds: seeds_or_default(seeds, cli.seed)?,
                seed: cli.seed,
                eps: cli.eps,
                jobs: cli.jobs,
                save_nets: save_nets.clone(),
            };
            let report = if cli.jobs > 0 {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(cli.jobs)
                    .build()
                    .context("cannot start thread pool")?;
                pool.install(|| verify::run(*suite, &params))?
            } else {
                verify::run(*suite, &params)?
            };
            println!("{}", serde_json::to_string_pretty(&report)?);
            if let Some(out) = &cli.out {
                write_json(out, &report)?;
                manifest.outputs.push(out.clone());
                manifest.write_next_to(out)?;
            }
            if !report.pass {
                return Ok(Status::CheckFailed);
            }
        }
        Command::Fit {
            input,
            discard,
            expect,
            tol,
        } => {
            let rows = read_sweep(open(input)?).with_context(|| format!("reading {}", input.display()))?;
            let points: Vec<(f64, f64)> = rows
                .iter()
                .filter_map(|r| r.record())
                .map(|r| (r.n as f64, r.layers as f64))
                .collect();
            let fit = fit_exponent_with(&points, *discard)?;
            println!("{}", serde_json::to_string_pretty(&fit)?);
            if let Some(out) = &cli.out {
                write_json(out, &fit)?;
                manifest.inputs.push(input.clone());
                manifest.outputs.push(out.clone());
                manifest.write_next_to(out)?;
            }
            if let (Some(e), Some(t)) = (expect, tol) {
                if (fit.slope - e).abs() > *t {
                    eprintln!("slope {} is outside {} ± {}", fit.slope, e, t);
                    return Ok(Status::CheckFailed);
                }
            }
        }
    }
    Ok(Status::Ok)
}
