//! On-disk formats: trajectory and trial-row JSON-lines, sample lists,
//! specification files and template packs.

use std::fs;
use std::io::{self, BufRead, Write};
use std::path::Path;

use quadcoach_core::analysis::TrialRow;
use quadcoach_core::feedback::{TemplateError, TemplatePack};
use quadcoach_core::sim::{Trajectory, TrajectorySample};
use quadcoach_core::stl::{Footprint, SpecFileError, SpecSet};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const TRAJECTORY_FORMAT: &str = "quadcoach-trajectory";
pub const TRAJECTORY_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {source}")]
    Json {
        line: usize,
        source: serde_json::Error,
    },
    #[error("line {line}: {message}")]
    Invalid { line: usize, message: String },
    #[error("{path}: {source}")]
    Spec { path: String, source: SpecFileError },
    #[error("{path}: {source}")]
    Templates { path: String, source: TemplateError },
}

/// First line of a trajectory file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryHeader {
    pub format: String,
    pub version: u32,
    pub dt: f64,
    pub footprint: Footprint,
    pub samples: usize,
}

/// Header line, then one sample per line.
pub fn write_trajectory(mut out: impl Write, trajectory: &Trajectory) -> io::Result<()> {
    let header = TrajectoryHeader {
        format: TRAJECTORY_FORMAT.into(),
        version: TRAJECTORY_VERSION,
        dt: trajectory.dt,
        footprint: trajectory.footprint,
        samples: trajectory.len(),
    };
    serde_json::to_writer(&mut out, &header)?;
    out.write_all(b"\n")?;
    for sample in &trajectory.samples {
        serde_json::to_writer(&mut out, sample)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn trajectory_to_string(trajectory: &Trajectory) -> String {
    let mut buf = Vec::new();
    write_trajectory(&mut buf, trajectory).expect("writing to memory");
    String::from_utf8(buf).expect("serde_json writes UTF-8")
}

pub fn read_trajectory(input: impl BufRead) -> Result<Trajectory, FormatError> {
    let mut lines = numbered_lines(input);
    let (line, text) = lines.next().transpose()?.ok_or(FormatError::Invalid {
        line: 1,
        message: "missing header".into(),
    })?;
    let header: TrajectoryHeader =
        serde_json::from_str(&text).map_err(|source| FormatError::Json { line, source })?;
    if header.format != TRAJECTORY_FORMAT || header.version != TRAJECTORY_VERSION {
        return Err(FormatError::Invalid {
            line,
            message: format!(
                "unsupported trajectory format {} v{}",
                header.format, header.version
            ),
        });
    }
    let mut samples = Vec::with_capacity(header.samples);
    for item in lines {
        let (line, text) = item?;
        let sample: TrajectorySample =
            serde_json::from_str(&text).map_err(|source| FormatError::Json { line, source })?;
        samples.push(sample);
    }
    if samples.len() != header.samples {
        return Err(FormatError::Invalid {
            line: samples.len() + 1,
            message: format!(
                "header announces {} samples, found {}",
                header.samples,
                samples.len()
            ),
        });
    }
    Ok(Trajectory {
        dt: header.dt,
        footprint: header.footprint,
        samples,
    })
}

pub fn write_rows(mut out: impl Write, rows: &[TrialRow]) -> io::Result<()> {
    for row in rows {
        serde_json::to_writer(&mut out, row)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn rows_to_string(rows: &[TrialRow]) -> String {
    let mut buf = Vec::new();
    write_rows(&mut buf, rows).expect("writing to memory");
    String::from_utf8(buf).expect("serde_json writes UTF-8")
}

pub fn read_rows(input: impl BufRead) -> Result<Vec<TrialRow>, FormatError> {
    numbered_lines(input)
        .map(|item| {
            let (line, text) = item?;
            serde_json::from_str(&text).map_err(|source| FormatError::Json { line, source })
        })
        .collect()
}

pub fn read_rows_file(path: &Path) -> Result<Vec<TrialRow>, FormatError> {
    read_rows(io::BufReader::new(fs::File::open(path)?))
}

/// One number per line. Blank lines and `#` comments are skipped.
pub fn read_samples(input: impl BufRead) -> Result<Vec<f64>, FormatError> {
    numbered_lines(input)
        .map(|item| {
            let (line, text) = item?;
            let value: f64 =
                serde_json::from_str(&text).map_err(|source| FormatError::Json { line, source })?;
            Ok(value)
        })
        .collect()
}

pub fn read_samples_file(path: &Path) -> Result<Vec<f64>, FormatError> {
    read_samples(io::BufReader::new(fs::File::open(path)?))
}

pub fn load_specs(path: &Path) -> Result<SpecSet, FormatError> {
    let text = fs::read_to_string(path)?;
    SpecSet::parse(&text).map_err(|source| FormatError::Spec {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_templates(path: &Path) -> Result<TemplatePack, FormatError> {
    let text = fs::read_to_string(path)?;
    TemplatePack::parse(&text).map_err(|source| FormatError::Templates {
        path: path.display().to_string(),
        source,
    })
}

/// Non-blank, non-comment lines with their 1-based line numbers.
fn numbered_lines(
    input: impl BufRead,
) -> impl Iterator<Item = Result<(usize, String), FormatError>> {
    input
        .lines()
        .enumerate()
        .filter_map(|(i, line)| match line {
            Err(e) => Some(Err(e.into())),
            Ok(text) => {
                let trimmed = text.trim();
                (!trimmed.is_empty() && !trimmed.starts_with('#'))
                    .then(|| Ok((i + 1, trimmed.to_owned())))
            }
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use quadcoach_core::sim::{run_episode, SimConfig};

    #[test]
    fn trajectory_round_trip() {
        let traj = run_episode(&[], &SimConfig::default());
        let text = trajectory_to_string(&traj);
        assert_eq!(text.lines().count(), traj.len() + 1);
        assert_eq!(read_trajectory(text.as_bytes()).unwrap(), traj);
    }

    #[test]
    fn truncated_trajectory_is_rejected() {
        let traj = run_episode(&[], &SimConfig::default());
        let text = trajectory_to_string(&traj);
        let cut: String = text.lines().take(5).map(|l| format!("{l}\n")).collect();
        assert!(matches!(
            read_trajectory(cut.as_bytes()),
            Err(FormatError::Invalid { .. })
        ));
        assert!(matches!(
            read_trajectory("".as_bytes()),
            Err(FormatError::Invalid { line: 1, .. })
        ));
    }

    #[test]
    fn samples_skip_comments() {
        let values = read_samples("# improvement\n1\n\n2.5\n-3e1\n".as_bytes()).unwrap();
        assert_eq!(values, [1.0, 2.5, -30.0]);
        assert!(matches!(
            read_samples("1\nabc\n".as_bytes()),
            Err(FormatError::Json { line: 2, .. })
        ));
    }
}
