use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use gqm_core::Criterion;
use gqm_workbench::presets::{self, PRESETS};
use gqm_workbench::{
    emit_report, load_config, report, run_analysis, run_oracle, AnalysisConfig, ConfigError,
    OutputFormat, ORACLE_TOLERANCE, OUTPUT_DIR_VAR,
};

/// Decoherence analyses for finite-dimensional quantum systems.
///
/// Exit status: 0 decoherent (or oracle agreement), 2 not decoherent
/// (or oracle disagreement), 1 error.
#[derive(Parser)]
#[command(name = "gqm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an analysis and write its report.
    Analyze {
        /// Config file, or the name of a built-in model.
        config: String,
        #[arg(long)]
        criterion: Option<Criterion>,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        format: Option<OutputFormat>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a config and list every violation.
    Validate { config: String },
    /// List the built-in models.
    ListModels,
    /// Compare the path-sum and operator functionals of a lattice config.
    Oracle { config: String },
}

fn read_config(arg: &str) -> Result<AnalysisConfig, anyhow::Error> {
    let path = Path::new(arg);
    let text = if path.exists() {
        std::fs::read_to_string(path).with_context(|| format!("cannot read {arg}"))?
    } else if let Some(t) = presets::preset_text(arg) {
        t.to_string()
    } else {
        anyhow::bail!("{arg}: no such file or built-in model");
    };
    load_config(&text).with_context(|| format!("invalid config {arg}"))
}

fn destination(
    out: Option<PathBuf>,
    config: &AnalysisConfig,
    format: OutputFormat,
) -> Option<PathBuf> {
    out.or_else(|| config.output.path.as_ref().map(PathBuf::from))
        .or_else(|| {
            std::env::var_os(OUTPUT_DIR_VAR).map(|dir| {
                PathBuf::from(dir).join(format!("{}.{}", config.display_name(), format.extension()))
            })
        })
}

fn analyze(
    arg: &str,
    criterion: Option<Criterion>,
    epsilon: Option<f64>,
    format: Option<OutputFormat>,
    out: Option<PathBuf>,
) -> Result<ExitCode> {
    let mut config = read_config(arg)?;
    if let Some(c) = criterion {
        config.analysis.criterion = match c {
            Criterion::LinearPositivity => "lp".into(),
            other => other.to_string(),
        };
    }
    if let Some(e) = epsilon {
        config.analysis.epsilon = e;
    }
    let format = format.unwrap_or(config.output.format);
    let r = run_analysis(&config)?;
    match destination(out, &config, format) {
        Some(path) => {
            emit_report(&r, format, &path)?;
            eprintln!("wrote {}", path.display());
        }
        None => print!("{}", report::render(&r, format)?),
    }
    let v = &r.verdict;
    eprintln!(
        "{}: {} under {} at epsilon {:e} (max violation {:e})",
        config.display_name(),
        if v.decoherent {
            "decoherent"
        } else {
            "not decoherent"
        },
        v.criterion,
        v.epsilon,
        v.max_violation,
    );
    Ok(ExitCode::from(if v.decoherent { 0 } else { 2 }))
}

fn validate(arg: &str) -> Result<ExitCode> {
    match read_config(arg) {
        Ok(_) => {
            println!("{arg}: ok");
            Ok(ExitCode::SUCCESS)
        }
        Err(e) => match e.downcast_ref::<ConfigError>() {
            Some(ConfigError::Invalid(vs)) => {
                for v in vs {
                    println!("{v}");
                }
                Ok(ExitCode::from(1))
            }
            _ => Err(e),
        },
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Analyze {
            config,
            criterion,
            epsilon,
            format,
            out,
        } => analyze(&config, criterion, epsilon, format, out),
        Command::Validate { config } => validate(&config),
        Command::ListModels => {
            for (name, text) in PRESETS {
                let description = load_config(text)?.description.unwrap_or_default();
                println!("{name:<16}{description}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Oracle { config } => {
            let deviation = run_oracle(&read_config(&config)?)?;
            println!("{deviation:e}");
            Ok(ExitCode::from(if deviation <= ORACLE_TOLERANCE {
                0
            } else {
                2
            }))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap's own usage-error status is 2, which is reserved for verdicts
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
