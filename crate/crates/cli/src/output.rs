use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct Manifest<'a, P: Serialize> {
    pub command: &'a str,
    pub params: P,
    pub seed: Option<u64>,
    pub version: &'a str,
    pub timestamp: u64,
}

impl<'a, P: Serialize> Manifest<'a, P> {
    pub fn new(command: &'a str, params: P, seed: Option<u64>) -> Self {
        Self {
            command,
            params,
            seed,
            version: env!("CARGO_PKG_VERSION"),
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

/// Writes `body` to `out`, or to stdout when `out` is `None`. A file
/// destination also gets a JSON sidecar describing the run.
pub fn emit<P: Serialize>(
    body: &str,
    out: Option<&Path>,
    manifest: &Manifest<'_, P>,
) -> io::Result<()> {
    match out {
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(body.as_bytes())?;
            stdout.flush()
        }
        Some(path) => {
            fs::write(path, body)?;
            let mut json = serde_json::to_string_pretty(manifest).map_err(io::Error::other)?;
            json.push('\n');
            fs::write(manifest_path(path), json)
        }
    }
}
