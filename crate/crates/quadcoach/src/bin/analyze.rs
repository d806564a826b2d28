use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use quadcoach::formats::{read_rows_file, read_samples_file, write_rows};
use quadcoach::report::{self, OutputFormat};
use quadcoach::synth::{cohort_rows, reported_cohorts, sample_with_moments, synthesize_cohort};
use quadcoach_core::analysis::{
    fisher_exact, kruskal_wallis, landing_table, likert_summary, mastery, session_counts, t_test,
};
use quadcoach_core::feedback::FeedbackCondition;

#[derive(Parser)]
#[command(
    name = "analyze",
    version,
    about = "Statistics over exported trial rows"
)]
struct Cli {
    /// Output as an aligned table or as CSV.
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Csv,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Table => OutputFormat::Table,
            Format::Csv => OutputFormat::Csv,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Mean (SD) landings per condition for trials 1-10, 11-20 and overall.
    LandingTable { rows: PathBuf },
    /// Per-participant improvement scores, one per line.
    Improvement {
        rows: PathBuf,
        #[arg(long, value_parser = parse_condition)]
        condition: FeedbackCondition,
        /// Count safe and unsafe landings instead of safe only.
        #[arg(long)]
        landed: bool,
    },
    /// Participants with and without any safe landing.
    Mastery { rows: PathBuf },
    /// Two-sided Fisher exact test on [[a, b], [c, d]].
    Fisher { a: u64, b: u64, c: u64, d: u64 },
    /// Pooled-variance two-sample t-test on two sample files.
    Ttest { file_a: PathBuf, file_b: PathBuf },
    /// Kruskal-Wallis H-test, one sample file per group.
    Kw {
        #[arg(required = true, num_args = 2..)]
        files: Vec<PathBuf>,
    },
    /// Collapsed modal survey answers per condition and item.
    Collapse { rows: PathBuf },
    /// Trial rows for cohorts matching the published landing table.
    SynthCohort {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Only this condition; all three when omitted.
        #[arg(long, value_parser = parse_condition)]
        condition: Option<FeedbackCondition>,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Samples with an exact mean and SD, one per line.
    Sample {
        #[arg(long, allow_hyphen_values = true)]
        mean: f64,
        #[arg(long)]
        sd: f64,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

fn parse_condition(s: &str) -> Result<FeedbackCondition, String> {
    FeedbackCondition::parse(s).ok_or_else(|| format!("unknown condition {s:?}"))
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn rows(path: &Path) -> Result<Vec<quadcoach_core::analysis::TrialRow>> {
    read_rows_file(path).with_context(|| format!("reading rows from {}", path.display()))
}

fn samples(path: &Path) -> Result<Vec<f64>> {
    read_samples_file(path).with_context(|| format!("reading samples from {}", path.display()))
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let format = OutputFormat::from(cli.format);
    let text = match cli.command {
        Command::LandingTable { rows: path } => {
            let table = landing_table(&rows(&path)?);
            for e in &table.excluded {
                eprintln!("warning: excluded session {}: {}", e.session_id, e.reason);
            }
            report::landing_table(&table, format)
        }
        Command::Improvement {
            rows: path,
            condition,
            landed,
        } => {
            let (counts, _) = session_counts(&rows(&path)?);
            let mut out = String::new();
            for c in counts.iter().filter(|c| c.condition == condition) {
                let score = if landed {
                    i64::from(c.landed_second) - i64::from(c.landed_first)
                } else {
                    i64::from(c.safe_second) - i64::from(c.safe_first)
                };
                out.push_str(&format!("{score}\n"));
            }
            out
        }
        Command::Mastery { rows: path } => {
            let (counts, _) = session_counts(&rows(&path)?);
            let all: Vec<_> = FeedbackCondition::ALL
                .iter()
                .map(|&c| mastery(c, &counts))
                .collect();
            report::mastery(&all, format)
        }
        Command::Fisher { a, b, c, d } => report::test_result(&fisher_exact(a, b, c, d)?, format),
        Command::Ttest { file_a, file_b } => {
            report::test_result(&t_test(&samples(&file_a)?, &samples(&file_b)?)?, format)
        }
        Command::Kw { files } => {
            let groups = files
                .iter()
                .map(|f| samples(f))
                .collect::<Result<Vec<_>>>()?;
            let refs: Vec<&[f64]> = groups.iter().map(Vec::as_slice).collect();
            report::test_result(&kruskal_wallis(&refs)?, format)
        }
        Command::Collapse { rows: path } => report::likert(&likert_summary(&rows(&path)?)?, format),
        Command::SynthCohort {
            seed,
            condition,
            out,
        } => {
            let mut all = Vec::new();
            for target in reported_cohorts() {
                if condition.is_some_and(|c| c != target.condition) {
                    continue;
                }
                let cohort = synthesize_cohort(&target, seed)?;
                all.extend(cohort_rows(&cohort, seed));
            }
            let mut w = output(out.as_deref())?;
            write_rows(&mut w, &all)?;
            w.flush()?;
            return Ok(());
        }
        Command::Sample {
            mean,
            sd,
            n,
            seed,
            out,
        } => {
            if n < 2 {
                bail!("--n must be at least 2");
            }
            let mut w = output(out.as_deref())?;
            for v in sample_with_moments(mean, sd, n, seed)? {
                writeln!(w, "{v}")?;
            }
            w.flush()?;
            return Ok(());
        }
    };
    let mut stdout = io::stdout().lock();
    stdout.write_all(text.as_bytes())?;
    Ok(())
}
