mod io;

use std::collections::HashMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use svp_core::forgetting::{process_log, select_most_forgotten};
use svp_core::harness::{random_select, ExperimentConfig, RunReport, Task};
use svp_core::kcenters::greedy_kcenters;
use svp_core::learner::{make_synthetic, SyntheticParams};
use svp_core::ranking::{pearson, spearman};
use svp_core::scoring::{score, UncertaintyMethod};
use svp_core::tensor_io::{encode_tensor, write_labels_csv, write_matrix_csv};
use svp_core::{Matrix, ProbMatrix};

#[derive(Parser)]
#[command(name = "svp", version, about = "Data selection via proxy models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Confidence,
    Entropy,
    Margin,
}

impl From<Method> for UncertaintyMethod {
    fn from(m: Method) -> Self {
        match m {
            Method::Confidence => Self::LeastConfidence,
            Method::Entropy => Self::Entropy,
            Method::Margin => Self::Margin,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Uncertainty score per row of a probability matrix.
    Score {
        #[arg(long, value_enum)]
        method: Method,
        /// Probabilities, `.svpt` or CSV.
        #[arg(long)]
        probs: PathBuf,
        /// `.svpt` for a one-column tensor, CSV `example_id,score` otherwise.
        #[arg(long)]
        out: PathBuf,
    },
    /// Greedy k-centers selection over a feature matrix.
    #[command(group(ArgGroup::new("seed_points").required(true).args(["initial", "initial_size"])))]
    Kcenters {
        #[arg(long)]
        features: PathBuf,
        /// File listing the already-selected example ids.
        #[arg(long)]
        initial: Option<PathBuf>,
        /// Start from this many seeded-random examples instead.
        #[arg(long)]
        initial_size: Option<usize>,
        /// Points to add; defaults to every remaining example.
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long, env = "SVP_SEED", default_value_t = 0)]
        seed: u64,
        /// CSV `rank,example_id,min_dist`; initial points come first with no distance.
        #[arg(long)]
        out: PathBuf,
    },
    /// Forgetting-event counts from a training log.
    Forget {
        /// `.svpl` log, or CSV `example_id,epoch,correct`.
        #[arg(long)]
        log: PathBuf,
        /// CSV `example_id,never_learned,count`.
        #[arg(long)]
        out: PathBuf,
        /// Also print the ids of the M most forgotten examples.
        #[arg(long)]
        select: Option<usize>,
    },
    /// Spearman and Pearson correlation between two score files.
    Correlate {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        /// Inputs are priority orders of example ids (such as `kcenters`
        /// output) rather than per-example scores.
        #[arg(long)]
        ranks: bool,
    },
    /// Run an active-learning experiment from a JSON config.
    Al {
        #[arg(long)]
        config: PathBuf,
        /// Outcome JSON; overrides the config's `output`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a core-set selection experiment from a JSON config.
    Coreset {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a Gaussian mixture dataset.
    Synth {
        #[arg(long)]
        classes: usize,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        separation: f64,
        #[arg(long, default_value_t = 1.0)]
        noise: f64,
        #[arg(long)]
        train: usize,
        #[arg(long)]
        test: usize,
        #[arg(long, env = "SVP_SEED", default_value_t = 0)]
        seed: u64,
        /// Training features, `.svpt` or CSV.
        #[arg(long)]
        out_features: PathBuf,
        /// Training labels, CSV `example_id,label`.
        #[arg(long)]
        out_labels: PathBuf,
        #[arg(long, requires = "out_test_labels")]
        out_test_features: Option<PathBuf>,
        #[arg(long, requires = "out_test_features")]
        out_test_labels: Option<PathBuf>,
    },
}

fn write_matrix(path: &Path, m: &Matrix<f64>) -> Result<()> {
    if io::is_tensor(path) {
        io::write_bytes(path, &encode_tensor(m))
    } else {
        io::write_atomic(path, |w| Ok(write_matrix_csv(m, w)?))
    }
}

fn write_labels(path: &Path, labels: &[usize]) -> Result<()> {
    io::write_atomic(path, |w| Ok(write_labels_csv(labels, w)?))
}

fn run_score(method: Method, probs: &Path, out: &Path) -> Result<()> {
    let p = ProbMatrix::validate(io::read_matrix(probs)?).with_context(|| format!("{}", probs.display()))?;
    let s = score(method.into(), &p);
    if io::is_tensor(out) {
        io::write_bytes(out, &encode_tensor(&Matrix::new(s.len(), 1, s.to_vec())?))
    } else {
        io::write_atomic(out, |w| {
            let mut csv = csv::Writer::from_writer(w);
            csv.write_record(["example_id", "score"])?;
            for (i, v) in s.iter().enumerate() {
                csv.write_record([i.to_string(), v.to_string()])?;
            }
            csv.flush()?;
            Ok(())
        })
    }
}

fn run_kcenters(
    features: &Path,
    initial: Option<&Path>,
    initial_size: Option<usize>,
    budget: Option<usize>,
    seed: u64,
    out: &Path,
) -> Result<()> {
    let x = io::read_matrix(features)?;
    let n = x.rows();
    let start = match (initial, initial_size) {
        (Some(path), _) => io::read_ids(path)?,
        (None, Some(k)) => random_select(&(0..n).collect::<Vec<_>>(), k, seed)?,
        (None, None) => unreachable!("clap requires one of --initial / --initial-size"),
    };
    let budget = budget.unwrap_or(n.saturating_sub(start.len()));
    let result = greedy_kcenters(&x, &start, budget)?;
    io::write_atomic(out, |w| {
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(["rank", "example_id", "min_dist"])?;
        let initial_rows = start.iter().map(|&i| (i, String::new()));
        let added = result.order.iter().zip(&result.selection_dists).map(|(&i, d)| (i, d.to_string()));
        for (rank, (i, d)) in initial_rows.chain(added).enumerate() {
            csv.write_record([(rank + 1).to_string(), i.to_string(), d])?;
        }
        csv.flush()?;
        Ok(())
    })
}

fn run_forget(log: &Path, out: &Path, select: Option<usize>) -> Result<()> {
    let scores = process_log(&io::read_log(log)?);
    let picked = select.map(|m| select_most_forgotten(&scores, m)).transpose()?;
    io::write_atomic(out, |w| {
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(["example_id", "never_learned", "count"])?;
        for (i, s) in scores.iter().enumerate() {
            csv.write_record([i.to_string(), u8::from(s.never_learned).to_string(), s.count.to_string()])?;
        }
        csv.flush()?;
        Ok(())
    })?;
    if let Some(ids) = picked {
        let mut stdout = std::io::stdout().lock();
        for i in ids {
            writeln!(stdout, "{i}")?;
        }
    }
    Ok(())
}

/// Positions (1-based) of each id in two orderings of the same id set,
/// aligned by the first ordering.
fn aligned_positions(a: &[usize], b: &[usize]) -> Result<(Vec<f64>, Vec<f64>)> {
    let pos_a: HashMap<usize, usize> = a.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    let pos_b: HashMap<usize, usize> = b.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    if pos_a.len() != a.len() || pos_b.len() != b.len() {
        bail!("an ordering repeats an example id");
    }
    if a.len() != b.len() || a.iter().any(|i| !pos_b.contains_key(i)) {
        bail!("orderings must list the same example ids");
    }
    let ra = (1..=a.len()).map(|k| k as f64).collect();
    let rb = a.iter().map(|i| (pos_b[i] + 1) as f64).collect();
    Ok((ra, rb))
}

fn run_correlate(a: &Path, b: &Path, ranks: bool) -> Result<()> {
    let (x, y) = if ranks {
        aligned_positions(&io::read_ids(a)?, &io::read_ids(b)?)?
    } else {
        (io::read_scores(a)?, io::read_scores(b)?)
    };
    let s = spearman(&x, &y)?;
    let p = pearson(&x, &y)?;
    println!("spearman={s:.6} pearson={p:.6} n={}", x.len());
    Ok(())
}

fn write_report(report: &RunReport, out: &Path) -> Result<()> {
    io::write_bytes(out, report.outcome_json()?.as_bytes())?;
    io::write_bytes(&out.with_extension("rounds.csv"), report.rounds_csv()?.as_bytes())?;
    io::write_bytes(&out.with_extension("timing.json"), report.timing_json()?.as_bytes())
}

fn run_experiment(task: Task, config: &Path, out: Option<&Path>) -> Result<()> {
    let cfg = ExperimentConfig::from_path(config).with_context(|| format!("reading {}", config.display()))?;
    if cfg.task != task {
        bail!("{} is a {:?} config; use the matching subcommand", config.display(), cfg.task);
    }
    let base = config.parent().unwrap_or(Path::new(""));
    let report = cfg.run(base)?;
    let out = out.map(Path::to_path_buf).or_else(|| cfg.output.as_ref().map(|o| base.join(o)));
    match out {
        Some(path) => write_report(&report, &path)?,
        None => print!("{}", report.outcome_json()?),
    }
    eprintln!("target_error={} selection_seconds={:.3}", report.outcome.target_error, report.timing.selection_seconds);
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Score { method, probs, out } => run_score(method, &probs, &out),
        Command::Kcenters { features, initial, initial_size, budget, seed, out } => {
            run_kcenters(&features, initial.as_deref(), initial_size, budget, seed, &out)
        }
        Command::Forget { log, out, select } => run_forget(&log, &out, select),
        Command::Correlate { a, b, ranks } => run_correlate(&a, &b, ranks),
        Command::Al { config, out } => run_experiment(Task::Al, &config, out.as_deref()),
        Command::Coreset { config, out } => run_experiment(Task::Coreset, &config, out.as_deref()),
        Command::Synth {
            classes,
            dim,
            separation,
            noise,
            train,
            test,
            seed,
            out_features,
            out_labels,
            out_test_features,
            out_test_labels,
        } => {
            let params = SyntheticParams { classes, dim, separation, noise, train_size: train, test_size: test, seed };
            let data = make_synthetic(&params)?;
            write_matrix(&out_features, &data.train.features)?;
            write_labels(&out_labels, &data.train.labels)?;
            if let (Some(f), Some(l)) = (out_test_features, out_test_labels) {
                write_matrix(&f, &data.test.features)?;
                write_labels(&l, &data.test.labels)?;
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
