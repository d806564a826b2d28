//! Filesystem persistence.
//!
//! ```text
//! <root>/index.jsonl                       one line per session, in creation order
//! <root>/sessions/<id>/events.jsonl        append-only event log
//! <root>/sessions/<id>/trial-<nn>.jsonl    trajectory of each trial
//! ```

use std::fs::{self, File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use quadcoach_core::feedback::FeedbackCondition;
use quadcoach_core::sim::Trajectory;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formats::{read_trajectory, write_trajectory, FormatError};
use crate::session::{Session, SessionError, SessionEvent};

const INDEX_FILE: &str = "index.jsonl";
const SESSIONS_DIR: &str = "sessions";
const EVENTS_FILE: &str = "events.jsonl";

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("{context}: {source}")]
    Io { context: String, source: io::Error },
    #[error("{context}, line {line}: {source}")]
    Json {
        context: String,
        line: usize,
        source: serde_json::Error,
    },
    #[error("session {id}: {source}")]
    Replay { id: String, source: SessionError },
    #[error("session {0} already exists")]
    Exists(String),
    #[error(transparent)]
    Format(#[from] FormatError),
}

fn io_err(context: impl Into<String>) -> impl FnOnce(io::Error) -> StoreError {
    let context = context.into();
    move |source| StoreError::Io { context, source }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexEntry {
    pub id: String,
    pub condition: FeedbackCondition,
    pub created_at: f64,
}

#[derive(Debug, Clone)]
pub struct Store {
    root: PathBuf,
}

impl Store {
    /// Opens (creating if needed) a store rooted at `root`.
    pub fn open(root: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let root = root.into();
        fs::create_dir_all(root.join(SESSIONS_DIR))
            .map_err(io_err(format!("creating {}", root.display())))?;
        Ok(Self { root })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn session_dir(&self, id: &str) -> PathBuf {
        self.root.join(SESSIONS_DIR).join(id)
    }

    pub fn index(&self) -> Result<Vec<IndexEntry>, StoreError> {
        let path = self.root.join(INDEX_FILE);
        if !path.exists() {
            return Ok(Vec::new());
        }
        read_json_lines(&path)
    }

    /// Creates the session directory with its first event and registers it
    /// in the index. On failure nothing is left behind.
    pub fn create_session(
        &self,
        id: &str,
        condition: FeedbackCondition,
        at: f64,
    ) -> Result<Session, StoreError> {
        let dir = self.session_dir(id);
        if dir.exists() {
            return Err(StoreError::Exists(id.into()));
        }
        let staging = self.root.join(SESSIONS_DIR).join(format!(".staging-{id}"));
        let event = SessionEvent::Created {
            id: id.into(),
            condition,
            at,
        };
        let staged = (|| {
            fs::create_dir_all(&staging)?;
            let mut file = File::create(staging.join(EVENTS_FILE))?;
            write_line(&mut file, &event)?;
            file.sync_all()?;
            fs::rename(&staging, &dir)
        })();
        if let Err(e) = staged {
            let _ = fs::remove_dir_all(&staging);
            return Err(io_err(format!("creating session {id}"))(e));
        }
        let entry = IndexEntry {
            id: id.into(),
            condition,
            created_at: at,
        };
        if let Err(e) = append_line(&self.root.join(INDEX_FILE), &entry) {
            let _ = fs::remove_dir_all(&dir);
            return Err(io_err("updating the index")(e));
        }
        Ok(Session::new(id, condition, at))
    }

    pub fn append(&self, id: &str, event: &SessionEvent) -> Result<(), StoreError> {
        append_line(&self.session_dir(id).join(EVENTS_FILE), event)
            .map_err(io_err(format!("logging to session {id}")))
    }

    pub fn events(&self, id: &str) -> Result<Vec<SessionEvent>, StoreError> {
        read_json_lines(&self.session_dir(id).join(EVENTS_FILE))
    }

    pub fn load_session(&self, id: &str) -> Result<Session, StoreError> {
        let events = self.events(id)?;
        Session::from_events(&events).map_err(|source| StoreError::Replay {
            id: id.into(),
            source,
        })
    }

    /// Every indexed session, in creation order.
    pub fn load_all(&self) -> Result<Vec<Session>, StoreError> {
        self.index()?
            .iter()
            .map(|e| self.load_session(&e.id))
            .collect()
    }

    pub fn trajectory_file(index: u32) -> String {
        format!("trial-{index:02}.jsonl")
    }

    pub fn write_trajectory(
        &self,
        id: &str,
        index: u32,
        trajectory: &Trajectory,
    ) -> Result<String, StoreError> {
        let name = Self::trajectory_file(index);
        let path = self.session_dir(id).join(&name);
        let context = format!("writing {}", path.display());
        let mut file = io::BufWriter::new(File::create(&path).map_err(io_err(context.clone()))?);
        write_trajectory(&mut file, trajectory).map_err(io_err(context.clone()))?;
        file.flush().map_err(io_err(context))?;
        Ok(name)
    }

    pub fn trajectory_path(&self, id: &str, file: &str) -> PathBuf {
        self.session_dir(id).join(file)
    }

    pub fn read_trajectory(&self, id: &str, file: &str) -> Result<Trajectory, StoreError> {
        let path = self.trajectory_path(id, file);
        let reader = BufReader::new(
            File::open(&path).map_err(io_err(format!("opening {}", path.display())))?,
        );
        Ok(read_trajectory(reader)?)
    }
}

fn write_line(out: &mut impl Write, value: &impl Serialize) -> io::Result<()> {
    let mut line = serde_json::to_vec(value)?;
    line.push(b'\n');
    out.write_all(&line)
}

fn append_line(path: &Path, value: &impl Serialize) -> io::Result<()> {
    let mut file = OpenOptions::new().create(true).append(true).open(path)?;
    write_line(&mut file, value)?;
    file.sync_data()
}

fn read_json_lines<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>, StoreError> {
    let context = path.display().to_string();
    let file = File::open(path).map_err(io_err(context.clone()))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err(context.clone()))?;
        if line.trim().is_empty() {
            continue;
        }
        let value = serde_json::from_str(&line).map_err(|source| StoreError::Json {
            context: context.clone(),
            line: i + 1,
            source,
        })?;
        out.push(value);
    }
    Ok(out)
}
