//! `skewpencil` command-line front end.
//!
//! Every subcommand prints JSON on stdout. Exit status: `0` on success, `1`
//! when a verification fails or a reduction does not converge, `2` when the
//! input cannot be read or parsed.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use skewpencil::corpus::{enumerate_structures, random_skew_pair, seeded_rng};
use skewpencil::json::{PairJson, PatternJson, StructureJson, TraceJson};
use skewpencil::{
    assemble, reduce, schedule_for, verify_direct_sum, verify_pairwise, Backend,
    CanonicalStructure, DecompositionReport, Error, GaussRational, Linearization, PairwiseReport,
    ReduceOptions,
};

#[derive(Debug, Parser)]
#[command(
    name = "skewpencil",
    version,
    about = "Miniversal deformations of skew-symmetric matrix pairs"
)]
pub struct Cli {
    /// Arithmetic used for rank decisions.
    #[arg(long, global = true, default_value = "exact")]
    pub backend: Backend,

    /// Off-pattern residual tolerance for `reduce`.
    #[arg(long, global = true, default_value_t = skewpencil::reduction::DEFAULT_TOL)]
    pub tol: f64,

    /// Seed for anything random (`corpus --perturbations`).
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the deformation pattern of a structure.
    Pattern { structure: PathBuf },
    /// Print the orbit codimension (number of independent stars).
    Codim { structure: PathBuf },
    /// Check the direct-sum decomposition globally and pairwise.
    Verify { structure: PathBuf },
    /// Reduce `canonical pair + perturbation` to pattern form.
    Reduce {
        /// Canonical structure of the base pair.
        #[arg(long)]
        base: PathBuf,
        /// Skew pair `(M, R)` added to the base pair.
        #[arg(long)]
        perturbation: PathBuf,
        #[arg(long, default_value_t = skewpencil::reduction::DEFAULT_MAX_ITER)]
        max_iter: usize,
        /// Pair whose tangent map drives each step.
        #[arg(long, default_value = "current")]
        linearization: Linearization,
    },
    /// Enumerate every canonical structure of dimension at most `--max-dim`.
    Corpus {
        #[arg(long, default_value_t = 6)]
        max_dim: usize,
        /// Random perturbations to attach to each structure.
        #[arg(long, default_value_t = 0)]
        perturbations: usize,
        /// Frobenius norm of each perturbation.
        #[arg(long, default_value_t = 1e-3)]
        norm: f64,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Input { path: String, source: Error },
    #[error("invalid option: {0}")]
    Usage(String),
    #[error(transparent)]
    Compute(#[from] Error),
    #[error("write failed: {0}")]
    Output(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } | CliError::Input { .. } | CliError::Usage(_) => 2,
            CliError::Compute(_) | CliError::Output(_) => 1,
        }
    }
}

fn read_input<T>(
    path: &Path,
    parse: impl FnOnce(&str) -> skewpencil::Result<T>,
) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse(&text).map_err(|source| CliError::Input {
        path: path.display().to_string(),
        source,
    })
}

fn read_structure(path: &Path) -> Result<CanonicalStructure, CliError> {
    read_input(path, skewpencil::json::parse_structure)
}

fn emit(out: &mut dyn Write, value: &impl Serialize) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(Error::from)?;
    writeln!(out, "{text}")?;
    Ok(())
}

#[derive(Serialize)]
struct VerifyOutput {
    structure: String,
    backend: &'static str,
    global: DecompositionReport,
    pairwise: PairwiseReport,
    ok: bool,
}

#[derive(Serialize)]
struct ScheduleOutput {
    m: u64,
    basin: f64,
}

#[derive(Serialize)]
struct ReduceOutput {
    structure: String,
    tol: f64,
    max_iter: usize,
    schedule: ScheduleOutput,
    trace: TraceJson,
}

#[derive(Serialize)]
struct CorpusEntry {
    index: usize,
    name: String,
    dim: usize,
    codim: usize,
    structure: StructureJson,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    perturbations: Vec<PairJson>,
}

#[derive(Serialize)]
struct CorpusOutput {
    max_dim: usize,
    seed: u64,
    count: usize,
    structures: Vec<CorpusEntry>,
}

fn verify(structure: &CanonicalStructure, backend: Backend) -> skewpencil::Result<VerifyOutput> {
    let pattern = assemble(structure);
    let (global, pairwise, name) = match backend {
        Backend::Exact => (
            verify_direct_sum(&structure.to_pair::<GaussRational>(), &pattern)?,
            verify_pairwise::<GaussRational>(structure)?,
            "exact",
        ),
        Backend::Float => (
            verify_direct_sum(&structure.to_pair::<num_complex::Complex64>(), &pattern)?,
            verify_pairwise::<num_complex::Complex64>(structure)?,
            "float",
        ),
    };
    let ok = global.direct_sum_ok && pairwise.all_ok;
    Ok(VerifyOutput {
        structure: structure.to_string(),
        backend: name,
        global,
        pairwise,
        ok,
    })
}

/// Executes one command, writing JSON to `out`. Returns the process exit code.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    if !(cli.tol.is_finite() && cli.tol >= 0.0) {
        return Err(CliError::Usage(format!(
            "--tol must be a finite non-negative number, got {}",
            cli.tol
        )));
    }
    match &cli.command {
        Command::Pattern { structure } => {
            let s = read_structure(structure)?;
            emit(out, &PatternJson::from_pattern(&assemble(&s)))?;
            Ok(0)
        }
        Command::Codim { structure } => {
            let s = read_structure(structure)?;
            writeln!(out, "{}", assemble(&s).param_count())?;
            Ok(0)
        }
        Command::Verify { structure } => {
            let s = read_structure(structure)?;
            let report = verify(&s, cli.backend)?;
            emit(out, &report)?;
            Ok(if report.ok { 0 } else { 1 })
        }
        Command::Reduce {
            base,
            perturbation,
            max_iter,
            linearization,
        } => {
            let s = read_structure(base)?;
            let pert = read_input(perturbation, skewpencil::json::parse_pair)?;
            let base_pair = s.to_pair::<num_complex::Complex64>();
            if pert.n() != base_pair.n() {
                return Err(CliError::Input {
                    path: perturbation.display().to_string(),
                    source: Error::DimensionMismatch(format!(
                        "perturbation of size {} for a structure of size {}",
                        pert.n(),
                        base_pair.n()
                    )),
                });
            }
            let pattern = assemble(&s);
            let schedule = match cli.backend {
                Backend::Exact => schedule_for(&s.to_pair::<GaussRational>(), &pattern)?,
                Backend::Float => schedule_for(&base_pair, &pattern)?,
            };
            let perturbed = base_pair.checked_add(&pert)?;
            let opts = ReduceOptions {
                tol: cli.tol,
                max_iter: *max_iter,
                linearization: *linearization,
            };
            let trace = reduce(&base_pair, &perturbed, &pattern, &opts)?;
            let converged = trace.converged;
            emit(
                out,
                &ReduceOutput {
                    structure: s.to_string(),
                    tol: cli.tol,
                    max_iter: *max_iter,
                    schedule: ScheduleOutput {
                        m: schedule.m(),
                        basin: schedule.basin(),
                    },
                    trace: TraceJson::from_trace(&trace, &pattern)?,
                },
            )?;
            Ok(if converged { 0 } else { 1 })
        }
        Command::Corpus {
            max_dim,
            perturbations,
            norm,
        } => {
            if !(norm.is_finite() && *norm >= 0.0) {
                return Err(CliError::Usage(format!(
                    "--norm must be finite and non-negative, got {norm}"
                )));
            }
            let structures = enumerate_structures(*max_dim);
            let entries: Vec<CorpusEntry> = structures
                .par_iter()
                .enumerate()
                .map(|(index, s)| {
                    let mut rng = seeded_rng(cli.seed.wrapping_add(index as u64));
                    CorpusEntry {
                        index,
                        name: s.to_string(),
                        dim: s.dim(),
                        codim: assemble(s).param_count(),
                        structure: StructureJson::from_structure(s),
                        perturbations: (0..*perturbations)
                            .map(|_| {
                                PairJson::from_pair(&random_skew_pair(s.dim(), *norm, &mut rng))
                            })
                            .collect(),
                    }
                })
                .collect();
            emit(
                out,
                &CorpusOutput {
                    max_dim: *max_dim,
                    seed: cli.seed,
                    count: entries.len(),
                    structures: entries,
                },
            )?;
            Ok(0)
        }
    }
}
