//! Output sinks and the `#` header block carried by every CSV file.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::settings::Settings;
use crate::CliError;

pub const TOOL: &str = "stickbreak-lab";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Per-run context shared by all outputs of one command.
pub struct Run {
    pub command: &'static str,
    pub seed: u64,
    pub settings: Settings,
    stamp: Option<Instant>,
}

impl Run {
    pub fn new(command: &'static str, seed: u64, settings: Settings, stamp: bool) -> Self {
        Run { command, seed, settings, stamp: stamp.then(Instant::now) }
    }

    fn config_json(&self) -> String {
        serde_json::to_string(&self.settings.echo()).expect("string map serializes")
    }

    fn wall_clock(&self) -> Option<String> {
        self.stamp.map(|t| {
            let unix = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0);
            format!("unix {unix:.3}, elapsed {:.3} s", t.elapsed().as_secs_f64())
        })
    }

    /// The comment header; `extra` adds `# key: value` lines.
    pub fn header(&self, extra: &[(&str, String)]) -> String {
        let mut h = format!("# {TOOL} {VERSION}\n# command: {}\n# seed: {}\n# config: {}\n", self.command, self.seed, self.config_json());
        for (k, v) in extra {
            h.push_str(&format!("# {k}: {v}\n"));
        }
        if let Some(w) = self.wall_clock() {
            h.push_str(&format!("# wall_clock: {w}\n"));
        }
        h
    }

    /// A JSON document carrying the same provenance as the CSV header.
    pub fn document<T: Serialize>(&self, body: &T) -> Result<String, CliError> {
        let mut doc = serde_json::Map::new();
        doc.insert("tool".into(), TOOL.into());
        doc.insert("version".into(), VERSION.into());
        doc.insert("command".into(), self.command.into());
        doc.insert("seed".into(), self.seed.into());
        doc.insert("config".into(), serde_json::to_value(self.settings.echo()).map_err(json_err)?);
        if let Some(w) = self.wall_clock() {
            doc.insert("wall_clock".into(), w.into());
        }
        match serde_json::to_value(body).map_err(json_err)? {
            serde_json::Value::Object(m) => doc.extend(m),
            other => {
                doc.insert("result".into(), other);
            }
        }
        let mut s = serde_json::to_string_pretty(&doc).map_err(json_err)?;
        s.push('\n');
        Ok(s)
    }

    /// Writes a header plus the CSV body produced by `body`.
    pub fn write_csv<F>(&self, path: &str, extra: &[(&str, String)], body: F) -> Result<(), CliError>
    where
        F: FnOnce(&mut dyn Write) -> io::Result<()>,
    {
        let mut buf = self.header(extra).into_bytes();
        body(&mut buf).map_err(|e| CliError::Io(format!("formatting {path}: {e}")))?;
        write_bytes(path, &buf)
    }
}

fn json_err(e: serde_json::Error) -> CliError {
    CliError::Io(format!("serializing output: {e}"))
}

/// Writes to a file, or to stdout for `-`.
pub fn write_bytes(path: &str, bytes: &[u8]) -> Result<(), CliError> {
    let io_err = |e: io::Error| CliError::Io(format!("writing {path}: {e}"));
    if path == "-" {
        let mut out = io::stdout().lock();
        out.write_all(bytes).and_then(|_| out.flush()).map_err(io_err)
    } else {
        let mut f = BufWriter::new(File::create(path).map_err(io_err)?);
        f.write_all(bytes).and_then(|_| f.flush()).map_err(io_err)
    }
}
