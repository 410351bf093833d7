use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use staircase::io::{read_matrix, write_matrix};
use staircase::{DecompositionDescriptor, Tolerance};
use staircase_cli::{
    analyze_consim, analyze_pair, generate, read_pair, read_report, report_json, report_text, verify, AnalysisReport,
    CliError, CliResult, ScrambleMode, Subject, EXIT_DIMENSION, EXIT_PARSE,
};

/// Regularizing decompositions under consimilarity and mixed equivalence.
#[derive(Parser)]
#[command(name = "staircase", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Singular Jordan structure of a square matrix under consimilarity.
    AnalyzeConsim {
        input: PathBuf,
        #[command(flatten)]
        opts: AnalyzeOpts,
    },
    /// Block structure of a matrix pair under mixed equivalence.
    AnalyzePair {
        first: PathBuf,
        second: PathBuf,
        #[command(flatten)]
        opts: AnalyzeOpts,
    },
    /// Assemble (and optionally scramble) an instance from a JSON descriptor.
    Generate {
        descriptor: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Scramble::None)]
        scramble: Scramble,
        /// Condition bound for general scrambles.
        #[arg(long, default_value_t = 100.0)]
        cond: f64,
        /// Attach a random nonsingular regular part of this size.
        #[arg(long, default_value_t = 0)]
        regular_size: usize,
        /// One path for a matrix, two for a pair.
        #[arg(long = "out", required = true, num_args = 1..=2)]
        out: Vec<PathBuf>,
    },
    /// Re-run the analysis a structured report describes and check it.
    Verify {
        report: PathBuf,
        #[arg(num_args = 1..=2, required = true)]
        inputs: Vec<PathBuf>,
    },
}

#[derive(Args)]
struct AnalyzeOpts {
    /// Rank tolerance; relative to the largest singular value unless --absolute.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long)]
    absolute: bool,
    /// Include the unitary transforms in the report.
    #[arg(long)]
    emit_transforms: bool,
    #[arg(long, value_enum, default_value_t = Format::Structured)]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Clone, Copy, ValueEnum)]
enum Scramble {
    None,
    Unitary,
    General,
}

impl AnalyzeOpts {
    fn tolerance(&self) -> CliResult<Tolerance> {
        let t = if self.absolute {
            Tolerance::absolute(self.tol)
        } else {
            Tolerance::relative(self.tol)
        };
        Ok(t?)
    }

    fn emit(&self, report: &AnalysisReport) -> CliResult<()> {
        let text = match self.format {
            Format::Text => report_text(report),
            Format::Structured => report_json(report)?,
        };
        write_or_print(self.output.as_deref(), &text)
    }
}

fn write_or_print(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::AnalyzeConsim { input, opts } => {
            let a = read_matrix(&input)?;
            let report = analyze_consim(&a, &opts.tolerance()?, opts.emit_transforms)?;
            opts.emit(&report)
        }
        Command::AnalyzePair { first, second, opts } => {
            let p = read_pair(&first, &second)?;
            let report = analyze_pair(&p, &opts.tolerance()?, opts.emit_transforms)?;
            opts.emit(&report)
        }
        Command::Generate {
            descriptor,
            seed,
            scramble,
            cond,
            regular_size,
            out,
        } => {
            let text = std::fs::read_to_string(&descriptor)?;
            let desc: DecompositionDescriptor = serde_json::from_str(&text)?;
            let mode = match scramble {
                Scramble::None => ScrambleMode::None,
                Scramble::Unitary => ScrambleMode::Unitary,
                Scramble::General => ScrambleMode::General,
            };
            let mats = generate(&desc, seed, mode, cond, regular_size)?;
            if mats.len() != out.len() {
                return Err(CliError {
                    code: EXIT_DIMENSION,
                    message: format!("descriptor yields {} matrices but {} --out paths were given", mats.len(), out.len()),
                });
            }
            for (m, path) in mats.iter().zip(&out) {
                write_matrix(path, m)?;
            }
            Ok(())
        }
        Command::Verify { report, inputs } => {
            let report = read_report(&report)?;
            let subject = match inputs.as_slice() {
                [a] => Subject::Matrix(read_matrix(a)?),
                [a, b] => Subject::Pair(read_pair(a, b)?),
                _ => {
                    return Err(CliError {
                        code: EXIT_PARSE,
                        message: "verify takes one or two input files".into(),
                    })
                }
            };
            print!("{}", verify(&report, &subject)?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("staircase: {}", e.message);
            ExitCode::from(e.code as u8)
        }
    }
}
