//! Offline dataset export: trial rows plus trajectory files.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use quadcoach_core::analysis::TrialRow;
use thiserror::Error;

use crate::formats::{read_rows_file, rows_to_string, FormatError};
use crate::session::Session;
use crate::store::{Store, StoreError};

pub const ROWS_FILE: &str = "trials.jsonl";
pub const TRAJECTORY_DIR: &str = "trajectories";

#[derive(Debug, Error)]
pub enum ExportError {
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("{context}: {source}")]
    Io { context: String, source: io::Error },
    #[error("session {session}, trial {index}: feedback artifacts missing")]
    MissingArtifacts { session: String, index: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExportSummary {
    pub sessions: usize,
    pub rows: usize,
    pub trajectories: usize,
}

/// Name of an exported trajectory file.
pub fn exported_trajectory_name(session: &str, index: u32) -> String {
    format!("{session}-trial-{index:02}.jsonl")
}

/// Errors unless every completed trial carries all three artifacts.
pub fn check_artifacts(session: &Session) -> Result<(), ExportError> {
    for trial in &session.trials {
        let complete = trial.feedback.as_ref().is_some_and(|f| {
            !f.artifacts.text.body.trim().is_empty() && !f.artifacts.image.svg.is_empty()
        });
        if !complete {
            return Err(ExportError::MissingArtifacts {
                session: session.id.clone(),
                index: trial.index,
            });
        }
    }
    Ok(())
}

/// Rows of every stored session, in creation then trial order.
pub fn dataset_rows(store: &Store) -> Result<Vec<TrialRow>, ExportError> {
    let mut rows = Vec::new();
    for session in store.load_all()? {
        check_artifacts(&session)?;
        rows.extend(session.rows());
    }
    Ok(rows)
}

/// Writes `trials.jsonl` and `trajectories/` under `out`. Repeated runs
/// over the same store produce identical bytes.
pub fn export_dataset(store: &Store, out: &Path) -> Result<ExportSummary, ExportError> {
    let sessions = store.load_all()?;
    for session in &sessions {
        check_artifacts(session)?;
    }
    let trajectories = out.join(TRAJECTORY_DIR);
    fs::create_dir_all(&trajectories).map_err(io_err(&trajectories))?;
    let mut rows = Vec::new();
    let mut copied = 0;
    for session in &sessions {
        rows.extend(session.rows());
        for trial in &session.trials {
            let from = store.trajectory_path(&session.id, &trial.trajectory_file);
            let to = trajectories.join(exported_trajectory_name(&session.id, trial.index));
            fs::copy(&from, &to).map_err(io_err(&from))?;
            copied += 1;
        }
    }
    let rows_path = out.join(ROWS_FILE);
    fs::write(&rows_path, rows_to_string(&rows)).map_err(io_err(&rows_path))?;
    Ok(ExportSummary {
        sessions: sessions.len(),
        rows: rows.len(),
        trajectories: copied,
    })
}

/// Reads back an exported rows file.
pub fn import_rows(out: &Path) -> Result<Vec<TrialRow>, FormatError> {
    read_rows_file(&out.join(ROWS_FILE))
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> ExportError {
    let context: PathBuf = path.into();
    move |source| ExportError::Io {
        context: context.display().to_string(),
        source,
    }
}
