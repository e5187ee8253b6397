//! Episode logs: one JSON object per line.
//!
//! Each record has the fields `id`, `condition`, `scenario`, `frames`,
//! `transitions`, `events`, `labels` and `truncated`. Frames are
//! `{"t": .., "pose": null | {"p": [x, y, z], "theta": {"yaw", "roll", "pitch"}}}`;
//! states are written as `"sIJ"` and actions as `"aN"`.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::domain::Episode;
use crate::error::{Error, Result};

pub fn write_episodes<W: Write>(mut out: W, episodes: &[Episode]) -> std::io::Result<()> {
    for e in episodes {
        serde_json::to_writer(&mut out, e)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

/// Parses a log; blank lines are skipped. `origin` names the source in errors.
pub fn read_episodes<R: Read>(input: R, origin: &Path) -> Result<Vec<Episode>> {
    let mut episodes = Vec::new();
    for (n, line) in BufReader::new(input).lines().enumerate() {
        let line = line.map_err(|e| Error::io(origin, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let e = serde_json::from_str(&line).map_err(|e| Error::Format {
            path: origin.to_path_buf(),
            line: n + 1,
            message: e.to_string(),
        })?;
        episodes.push(e);
    }
    Ok(episodes)
}

pub fn save_episodes(path: &Path, episodes: &[Episode]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_episodes(BufWriter::new(file), episodes).map_err(|e| Error::io(path, e))
}

pub fn load_episodes(path: &Path) -> Result<Vec<Episode>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_episodes(file, path)
}
