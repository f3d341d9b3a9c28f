use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use mallows_core::limits::{j_bar, DEFAULT_TOLERANCE};
use mallows_core::sampling::sample_mallows;
use mallows_core::subsequence::lcs_with_witness;
use mallows_core::{Permutation, RngStream};
use mallows_sim::config::PartialConfig;
use mallows_sim::experiments::renewal_summary;
use mallows_sim::output::{emit, write_csv, write_report};
use mallows_sim::runner::map_indexed;
use mallows_sim::{run_experiment, ExperimentKind, OutputFormat, SimError, SimResult};

#[derive(Parser, Debug)]
#[command(
    name = "mallows-sim",
    version,
    about = "Mallows permutations, LCS and their limit laws"
)]
struct Cli {
    /// Master seed (required by every random command).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Write results here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// JSON experiment config; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Draw Mallows permutations, one per line.
    Sample {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: f64,
        #[arg(long, default_value_t = 1)]
        count: u64,
    },
    /// Longest common subsequence of two permutations such as "3,4,1,2,5".
    Lcs {
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        /// Also print one longest common subsequence.
        #[arg(long)]
        witness: bool,
    },
    /// The finite-beta constant J(beta) with its error estimate.
    Jbar {
        #[arg(long, allow_hyphen_values = true)]
        beta: f64,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
    },
    /// Renewal blocks of two coupled insertion processes.
    Renewal {
        #[arg(long)]
        q: Option<f64>,
        #[arg(long)]
        qprime: Option<f64>,
        #[arg(long)]
        blocks: Option<u64>,
        /// Per-block rows `j,x,y`.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// LCS / (n sqrt(1 - q)) against the weak-law constant.
    WeakLaw {
        #[arg(long)]
        n: Option<u64>,
        /// Defaults to 1 - 100/n.
        #[arg(long)]
        q: Option<f64>,
        #[arg(long)]
        replicas: Option<u64>,
    },
    /// LCS / sqrt(n) at q = 1 - beta/n against 2 J(beta).
    FiniteBeta {
        #[arg(long)]
        n: Option<u64>,
        #[arg(long, allow_hyphen_values = true)]
        beta: Option<f64>,
        #[arg(long)]
        replicas: Option<u64>,
    },
    /// Normality diagnostics of the standardized LCS.
    Clt {
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        q: Option<f64>,
        #[arg(long)]
        qprime: Option<f64>,
        #[arg(long)]
        replicas: Option<u64>,
        /// Renewal blocks used to estimate the centering and scale.
        #[arg(long)]
        blocks: Option<u64>,
    },
    /// Occupation frequencies of the product chain against its stationary law.
    Stationary {
        #[arg(long)]
        q: Option<f64>,
        #[arg(long)]
        qprime: Option<f64>,
        #[arg(long)]
        steps: Option<u64>,
    },
}

/// Format from `--format`, else from the output extension, else JSON.
fn resolve_format(cli: &Cli, path: Option<&Path>) -> OutputFormat {
    if let Some(f) = cli.format {
        return f.into();
    }
    match path.and_then(|p| p.extension()).and_then(|e| e.to_str()) {
        Some(e) if e.eq_ignore_ascii_case("csv") => OutputFormat::Csv,
        _ => OutputFormat::Json,
    }
}

fn require_seed(cli: &Cli) -> SimResult<u64> {
    cli.seed
        .ok_or_else(|| SimError::Config("--seed is required for random commands".into()))
}

fn write_text(path: Option<&Path>, text: &str) -> SimResult<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| SimError::Io {
            path: p.to_path_buf(),
            source,
        }),
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| SimError::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

fn run_sample(cli: &Cli, n: usize, q: f64, count: u64) -> SimResult<()> {
    let seed = require_seed(cli)?;
    let perms: Vec<Permutation> = map_indexed(cli.workers.unwrap_or(1), count, |i| {
        let mut rng = RngStream::new(seed, i);
        Ok(sample_mallows(n, q, &mut rng)?)
    })?;
    let mut text = String::new();
    for p in &perms {
        text.push_str(&p.to_string());
        text.push('\n');
    }
    write_text(cli.out.as_deref(), &text)
}

fn parse_perm(s: &str) -> SimResult<Permutation> {
    Ok(s.parse::<Permutation>()?)
}

fn run_lcs(cli: &Cli, a: &str, b: &str, witness: bool) -> SimResult<()> {
    let (len, w) = lcs_with_witness(&parse_perm(a)?, &parse_perm(b)?)?;
    let mut text = format!("{len}\n");
    if witness {
        let items: Vec<String> = w.iter().map(ToString::to_string).collect();
        text.push_str(&items.join(","));
        text.push('\n');
    }
    write_text(cli.out.as_deref(), &text)
}

fn run_jbar(cli: &Cli, beta: f64, tol: f64) -> SimResult<()> {
    let r = j_bar(beta, tol)?;
    let text = match resolve_format(cli, cli.out.as_deref()) {
        OutputFormat::Json => format!(
            "{}\n",
            serde_json::to_string_pretty(&serde_json::json!({
                "beta": beta,
                "tol": tol,
                "value": r.value,
                "abs_error_estimate": r.abs_error_estimate,
                "evaluations": r.evaluations,
            }))
            .expect("json")
        ),
        OutputFormat::Csv => format!(
            "beta,value,abs_error_estimate\n{beta},{},{}\n",
            r.value, r.abs_error_estimate
        ),
    };
    write_text(cli.out.as_deref(), &text)
}

fn run_kind(cli: &Cli, kind: ExperimentKind, flags: PartialConfig) -> SimResult<()> {
    let base = match &cli.config {
        Some(p) => PartialConfig::load(p)?,
        None => PartialConfig::default(),
    };
    let globals = PartialConfig {
        seed: cli.seed,
        workers: cli.workers,
        output_path: cli.out.clone(),
        ..flags
    };
    let cfg = base.overridden_by(globals).resolve(kind)?;
    let report = run_experiment(&cfg)?;
    let out = cfg.output_path.as_deref();
    let format = resolve_format(cli, out);

    if let Command::Renewal {
        csv: Some(path), ..
    } = &cli.command
    {
        emit(&report, path, OutputFormat::Csv)?;
    }
    match out {
        Some(path) => emit(&report, path, format)?,
        None => {
            let stdout = io::stdout().lock();
            let to_io = |source| SimError::Io {
                path: "<stdout>".into(),
                source,
            };
            if kind == ExperimentKind::Renewal && format == OutputFormat::Json {
                let s = serde_json::to_string_pretty(&renewal_summary(&report)).expect("json");
                write_text(None, &format!("{s}\n"))?;
            } else if format == OutputFormat::Csv {
                write_csv(&report.rows, stdout).map_err(|e| to_io(io::Error::other(e)))?;
            } else {
                write_report(&report, format, stdout).map_err(to_io)?;
            }
        }
    }
    Ok(())
}

fn run(cli: &Cli) -> SimResult<()> {
    match &cli.command {
        Command::Sample { n, q, count } => run_sample(cli, *n, *q, *count),
        Command::Lcs { a, b, witness } => run_lcs(cli, a, b, *witness),
        Command::Jbar { beta, tol } => run_jbar(cli, *beta, *tol),
        Command::Renewal {
            q, qprime, blocks, ..
        } => run_kind(
            cli,
            ExperimentKind::Renewal,
            PartialConfig {
                q: *q,
                q_prime: *qprime,
                blocks: *blocks,
                ..Default::default()
            },
        ),
        Command::WeakLaw { n, q, replicas } => run_kind(
            cli,
            ExperimentKind::WeakLaw,
            PartialConfig {
                n: *n,
                q: *q,
                replicas: *replicas,
                ..Default::default()
            },
        ),
        Command::FiniteBeta { n, beta, replicas } => run_kind(
            cli,
            ExperimentKind::FiniteBeta,
            PartialConfig {
                n: *n,
                beta: *beta,
                replicas: *replicas,
                ..Default::default()
            },
        ),
        Command::Clt {
            n,
            q,
            qprime,
            replicas,
            blocks,
        } => run_kind(
            cli,
            ExperimentKind::Clt,
            PartialConfig {
                n: *n,
                q: *q,
                q_prime: *qprime,
                replicas: *replicas,
                blocks: *blocks,
                ..Default::default()
            },
        ),
        Command::Stationary { q, qprime, steps } => run_kind(
            cli,
            ExperimentKind::Stationary,
            PartialConfig {
                n: steps.or(Some(mallows_sim::config::DEFAULT_STATIONARY_STEPS)),
                q: *q,
                q_prime: *qprime,
                ..Default::default()
            },
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
