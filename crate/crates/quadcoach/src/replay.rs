//! Re-simulates stored input logs and compares with the stored trajectories.

use std::fs;

use quadcoach_core::sim::{run_episode_with, ComponentSpecs, SimConfig};
use serde::Serialize;

use crate::formats::trajectory_to_string;
use crate::session::Session;
use crate::store::{Store, StoreError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReplayMismatch {
    pub session: String,
    pub index: u32,
    /// First differing line of the trajectory file, 1-based.
    pub line: usize,
}

/// Trials whose stored trajectory differs from a replay of their input
/// log. Serialized floats round-trip, so equal files mean bit-equal
/// trajectories.
pub fn verify_session(
    store: &Store,
    session: &Session,
    sim: &SimConfig,
    specs: &ComponentSpecs,
) -> Result<Vec<ReplayMismatch>, StoreError> {
    let mut out = Vec::new();
    for trial in &session.trials {
        let path = store.trajectory_path(&session.id, &trial.trajectory_file);
        let stored = fs::read_to_string(&path).map_err(|source| StoreError::Io {
            context: path.display().to_string(),
            source,
        })?;
        let replayed = trajectory_to_string(&run_episode_with(&trial.inputs, sim, specs));
        if stored != replayed {
            let line = stored
                .lines()
                .zip(replayed.lines())
                .take_while(|(a, b)| a == b)
                .count()
                + 1;
            out.push(ReplayMismatch {
                session: session.id.clone(),
                index: trial.index,
                line,
            });
        }
    }
    Ok(out)
}

pub fn verify_store(
    store: &Store,
    sim: &SimConfig,
    specs: &ComponentSpecs,
) -> Result<Vec<ReplayMismatch>, StoreError> {
    let mut out = Vec::new();
    for session in store.load_all()? {
        out.extend(verify_session(store, &session, sim, specs)?);
    }
    Ok(out)
}
