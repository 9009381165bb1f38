//! Pairwise checking of schema files and corpus reports.
//!
//! A corpus run pairs same-named `.json` files of two directories, skips
//! textually equal pairs and records one verdict per remaining pair. Records
//! come out in file-name order whatever the number of workers.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::mpsc;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::schema::Schema;
use crate::subtype::{Checker, Direction, Tag, Verdict};

/// Tag recorded for pairs whose files cannot be read, parsed or resolved.
pub const INPUT_ERROR: &str = "InputError";

/// Outcome of comparing two schema files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Verdict(Verdict),
    InputError(String),
}

impl Outcome {
    pub fn name(&self) -> &'static str {
        match self {
            Outcome::Verdict(v) => v.name(),
            Outcome::InputError(_) => INPUT_ERROR,
        }
    }

    pub fn tag(&self) -> Option<String> {
        match self {
            Outcome::Verdict(v) => v.tag().map(|t| t.name().to_string()),
            Outcome::InputError(_) => Some(INPUT_ERROR.to_string()),
        }
    }

    pub fn detail(&self) -> &str {
        match self {
            Outcome::Verdict(v) => v.detail(),
            Outcome::InputError(d) => d,
        }
    }

    /// Process exit code: 0 holds, 1 does not hold, 2 undecidable, 3 input
    /// error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Outcome::Verdict(Verdict::Holds) => 0,
            Outcome::Verdict(Verdict::DoesNotHold(_)) => 1,
            Outcome::Verdict(Verdict::Undecidable(..)) => 2,
            Outcome::InputError(_) => 3,
        }
    }
}

/// Loads a schema file, mapping unsupported features to a verdict.
pub fn load(path: &Path) -> std::result::Result<Schema, Outcome> {
    Schema::from_file(path).map_err(|e| error_outcome(&e))
}

fn error_outcome(e: &Error) -> Outcome {
    match Verdict::from_error(e) {
        Some(v) => Outcome::Verdict(v),
        None => Outcome::InputError(e.to_string()),
    }
}

/// Compares two schema files.
pub fn check_files(lhs: &Path, rhs: &Path, direction: Direction, checker: &Checker) -> Outcome {
    let (l, r) = match (load(lhs), load(rhs)) {
        (Ok(l), Ok(r)) => (l, r),
        (Err(o), _) | (_, Err(o)) => return o,
    };
    match checker.check(&l, &r, direction) {
        Ok(v) => Outcome::Verdict(v),
        Err(e) => error_outcome(&e),
    }
}

/// Runs `f` under a wall-clock budget. On expiry the worker thread is
/// abandoned and a capacity verdict returned.
pub fn with_time_budget(budget: Option<Duration>, f: impl FnOnce(Option<Instant>) -> Outcome + Send + 'static) -> Outcome {
    let Some(budget) = budget else {
        return f(None);
    };
    let deadline = Instant::now() + budget;
    let (tx, rx) = mpsc::channel();
    std::thread::spawn(move || {
        let _ = tx.send(f(Some(deadline)));
    });
    // Allow the checker a moment to notice its own deadline first.
    match rx.recv_timeout(budget + budget / 10 + Duration::from_millis(50)) {
        Ok(o) => o,
        Err(_) => Outcome::Verdict(Verdict::Undecidable(
            Tag::CapacityLimit,
            format!("time budget of {:.3}s exceeded", budget.as_secs_f64()),
        )),
    }
}

#[derive(Debug, Clone)]
pub struct CorpusOptions {
    pub direction: Direction,
    pub time_budget: Option<Duration>,
    pub jobs: usize,
    pub checker: Checker,
}

impl Default for CorpusOptions {
    fn default() -> Self {
        CorpusOptions {
            direction: Direction::Sub,
            time_budget: None,
            jobs: 1,
            checker: Checker::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairRecord {
    pub lhs: String,
    pub rhs: String,
    pub direction: String,
    pub verdict: String,
    pub tag: Option<String>,
    pub detail: String,
    pub elapsed_ms: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CorpusReport {
    pub records: Vec<PairRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Footer {
    pub pairs: usize,
    pub verdicts: BTreeMap<String, usize>,
    pub tags: BTreeMap<String, usize>,
    pub over_time_budget: usize,
}

impl CorpusReport {
    pub fn footer(&self) -> Footer {
        let mut verdicts = BTreeMap::new();
        let mut tags = BTreeMap::new();
        let mut over = 0;
        for r in &self.records {
            *verdicts.entry(r.verdict.clone()).or_insert(0) += 1;
            if let Some(t) = &r.tag {
                *tags.entry(t.clone()).or_insert(0) += 1;
            }
            if r.detail.starts_with("time budget") {
                over += 1;
            }
        }
        Footer {
            pairs: self.records.len(),
            verdicts,
            tags,
            over_time_budget: over,
        }
    }

    /// One JSON object per record followed by the footer object.
    pub fn write_jsonl(&self, out: &mut impl Write) -> Result<()> {
        let io = |e: std::io::Error| Error::Io(e.to_string());
        for r in &self.records {
            let line = serde_json::to_string(r).map_err(|e| Error::Io(e.to_string()))?;
            writeln!(out, "{line}").map_err(io)?;
        }
        let footer = serde_json::json!({ "footer": self.footer() });
        writeln!(out, "{footer}").map_err(io)
    }
}

fn json_files(dir: &Path) -> Result<BTreeMap<String, PathBuf>> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let mut out = BTreeMap::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::Io(e.to_string()))?.path();
        if path.is_file() && path.extension().is_some_and(|x| x == "json") {
            if let Some(name) = path.file_name().and_then(|n| n.to_str()) {
                out.insert(name.to_string(), path);
            }
        }
    }
    Ok(out)
}

/// Same-named pairs whose contents differ.
pub fn corpus_pairs(old_dir: &Path, new_dir: &Path) -> Result<Vec<(PathBuf, PathBuf)>> {
    let old = json_files(old_dir)?;
    let new = json_files(new_dir)?;
    let mut pairs = Vec::new();
    for (name, lhs) in old {
        let Some(rhs) = new.get(&name) else { continue };
        let same = match (std::fs::read(&lhs), std::fs::read(rhs)) {
            (Ok(a), Ok(b)) => a == b,
            _ => false,
        };
        if !same {
            pairs.push((lhs, rhs.clone()));
        }
    }
    Ok(pairs)
}

pub fn direction_name(d: Direction) -> &'static str {
    match d {
        Direction::Sub => "sub",
        Direction::Super => "super",
        Direction::Equiv => "equiv",
    }
}

fn record(lhs: &Path, rhs: &Path, opts: &CorpusOptions) -> PairRecord {
    let start = Instant::now();
    let (l, r, direction) = (lhs.to_path_buf(), rhs.to_path_buf(), opts.direction);
    let checker = opts.checker.clone();
    let outcome = with_time_budget(opts.time_budget, move |deadline| {
        check_files(&l, &r, direction, &checker.with_deadline(deadline))
    });
    PairRecord {
        lhs: lhs.display().to_string(),
        rhs: rhs.display().to_string(),
        direction: direction_name(opts.direction).to_string(),
        verdict: outcome.name().to_string(),
        tag: outcome.tag(),
        detail: outcome.detail().to_string(),
        elapsed_ms: start.elapsed().as_millis() as u64,
    }
}

/// Checks every differing same-named pair of the two directories.
pub fn run_corpus(old_dir: &Path, new_dir: &Path, opts: &CorpusOptions) -> Result<CorpusReport> {
    use rayon::prelude::*;
    let pairs = corpus_pairs(old_dir, new_dir)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs.max(1))
        .build()
        .map_err(|e| Error::Io(e.to_string()))?;
    let records = pool.install(|| pairs.par_iter().map(|(l, r)| record(l, r, opts)).collect());
    Ok(CorpusReport { records })
}
