//! Command-line front end.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand};
use jsonsub::canonical::{canonicalize, CanonOptions};
use jsonsub::corpus::{self, CorpusOptions, Outcome};
use jsonsub::error::Error;
use jsonsub::json::JsonValue;
use jsonsub::schema::Schema;
use jsonsub::simplify::simplify;
use jsonsub::subtype::{Checker, Direction, Verdict};
use jsonsub::validator::validate;

/// Exit code for unreadable, unparsable or meta-invalid inputs.
const INPUT_ERROR: u8 = 3;
/// Exit code for unsupported features during canonicalization.
const UNSUPPORTED: u8 = 2;

#[derive(Parser)]
#[command(name = "jsonsub", version, about = "Subschema checking for JSON Schema draft-04")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether LHS is a subschema of RHS.
    Check {
        lhs: PathBuf,
        rhs: PathBuf,
        #[arg(long, default_value = "sub")]
        direction: Direction,
        #[command(flatten)]
        output: CheckFlags,
    },
    /// Decide whether LHS and RHS accept the same documents.
    Equiv {
        lhs: PathBuf,
        rhs: PathBuf,
        #[command(flatten)]
        output: CheckFlags,
    },
    /// Print the canonical form of a schema.
    Canonicalize { file: PathBuf },
    /// Print the simplified canonical form of a schema.
    Simplify { file: PathBuf },
    /// Validate a document against a schema.
    Validate { doc: PathBuf, schema: PathBuf },
    /// Compare same-named schema files of two directories.
    Corpus {
        old: PathBuf,
        new: PathBuf,
        #[arg(long, default_value = "sub")]
        direction: Direction,
        /// Seconds allowed per pair.
        #[arg(long)]
        time_budget: Option<f64>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Report destination; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(clap::Args)]
struct CheckFlags {
    /// Print one JSON object instead of text.
    #[arg(long)]
    json: bool,
    /// Seconds allowed for the check.
    #[arg(long)]
    time_budget: Option<f64>,
}

/// Prints a line; a closed pipe downstream is not an error.
fn emit(line: impl std::fmt::Display) {
    let _ = writeln!(std::io::stdout().lock(), "{line}");
}

fn budget(seconds: Option<f64>) -> Option<Duration> {
    seconds.filter(|s| s.is_finite() && *s >= 0.0).map(Duration::from_secs_f64)
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Check { lhs, rhs, direction, output } => check(&lhs, &rhs, direction, &output),
        Command::Equiv { lhs, rhs, output } => check(&lhs, &rhs, Direction::Equiv, &output),
        Command::Canonicalize { file } => transform(&file, false),
        Command::Simplify { file } => transform(&file, true),
        Command::Validate { doc, schema } => validate_cmd(&doc, &schema),
        Command::Corpus { old, new, direction, time_budget, jobs, out } => {
            let opts = CorpusOptions {
                direction,
                time_budget: budget(time_budget),
                jobs,
                checker: Checker::default(),
            };
            corpus_cmd(&old, &new, &opts, out.as_deref())
        }
    }
}

fn check(lhs: &Path, rhs: &Path, direction: Direction, flags: &CheckFlags) -> ExitCode {
    let (l, r) = (lhs.to_path_buf(), rhs.to_path_buf());
    let outcome = corpus::with_time_budget(budget(flags.time_budget), move |deadline| {
        corpus::check_files(&l, &r, direction, &Checker::default().with_deadline(deadline))
    });
    if flags.json {
        let line = serde_json::json!({
            "lhs": lhs.display().to_string(),
            "rhs": rhs.display().to_string(),
            "direction": corpus::direction_name(direction),
            "verdict": outcome.name(),
            "tag": outcome.tag(),
            "detail": outcome.detail(),
        });
        emit(line);
    } else {
        match &outcome {
            Outcome::Verdict(Verdict::Holds) => emit("Holds"),
            Outcome::Verdict(Verdict::DoesNotHold(w)) => emit(format!("DoesNotHold: {w}")),
            Outcome::Verdict(Verdict::Undecidable(tag, d)) => emit(format!("Undecidable [{tag}]: {d}")),
            Outcome::InputError(e) => eprintln!("input error: {e}"),
        }
    }
    ExitCode::from(outcome.exit_code() as u8)
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    match Verdict::from_error(e) {
        Some(_) => ExitCode::from(UNSUPPORTED),
        None => ExitCode::from(INPUT_ERROR),
    }
}

fn transform(file: &Path, simplified: bool) -> ExitCode {
    let result = Schema::from_file(file)
        .and_then(|s| canonicalize(&s, &CanonOptions::default()))
        .and_then(|c| if simplified { simplify(&c) } else { Ok(c) });
    match result {
        Ok(c) => {
            emit(c.to_json());
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e),
    }
}

fn read_json(path: &Path) -> Result<JsonValue, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    JsonValue::parse(&text)
}

fn validate_cmd(doc: &Path, schema: &Path) -> ExitCode {
    let result = read_json(doc).and_then(|d| Ok((d, read_json(schema)?)));
    let valid = result.and_then(|(d, s)| {
        let report = jsonsub::schema::validate_meta(&s);
        if !report.is_empty() {
            return Err(Error::MetaInvalid(report));
        }
        validate(&d, &s)
    });
    match valid {
        Ok(v) => {
            emit(serde_json::json!({ "valid": v }));
            ExitCode::from(if v { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(INPUT_ERROR)
        }
    }
}

fn corpus_cmd(old: &Path, new: &Path, opts: &CorpusOptions, out: Option<&Path>) -> ExitCode {
    let report = match corpus::run_corpus(old, new, opts) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(INPUT_ERROR);
        }
    };
    let written = match out {
        Some(path) => File::create(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
            .and_then(|f| {
                let mut w = BufWriter::new(f);
                report.write_jsonl(&mut w)?;
                w.flush().map_err(|e| Error::Io(e.to_string()))
            }),
        None => report.write_jsonl(&mut std::io::stdout().lock()),
    };
    match written {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(INPUT_ERROR)
        }
    }
}
