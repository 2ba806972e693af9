//! Option resolution: built-in defaults, then the config file, then flags.

use std::collections::{BTreeMap, BTreeSet};
use std::str::FromStr;

use clap::CommandFactory;

use crate::args::Cli;
use crate::CliError;

/// Keys that only route output or size the thread pool; they never reach
/// the echoed configuration, so reruns to other paths stay comparable.
const PLUMBING: [&str; 6] = ["out", "report", "samples", "sup-out", "kolmogorov-out", "threads"];

/// Fully resolved string options of one command.
#[derive(Debug, Clone, Default)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

/// Long flag names accepted by `command`.
fn known_keys(command: &str) -> BTreeSet<String> {
    let cli = Cli::command();
    cli.find_subcommand(command)
        .map(|c| {
            c.get_arguments()
                .filter_map(|a| a.get_long())
                .filter(|l| !matches!(*l, "config" | "stamp" | "help" | "version"))
                .map(str::to_string)
                .collect()
        })
        .unwrap_or_default()
}

fn command_names() -> Vec<String> {
    Cli::command().get_subcommands().map(|c| c.get_name().to_string()).collect()
}

fn scalar_text(v: &serde_json::Value) -> Option<String> {
    match v {
        serde_json::Value::String(s) => Some(s.clone()),
        serde_json::Value::Number(n) => Some(n.to_string()),
        serde_json::Value::Bool(b) => Some(b.to_string()),
        _ => None,
    }
}

/// Config values as flag text: arrays become comma lists, nested arrays
/// `;`-separated rows.
fn value_text(key: &str, v: &serde_json::Value) -> Result<String, CliError> {
    let err = || CliError::Usage(format!("config key `{key}` must be a scalar or an array of scalars"));
    match v {
        serde_json::Value::Array(items) => {
            let nested = items.iter().any(|i| i.is_array());
            let parts: Vec<String> = items
                .iter()
                .map(|i| match i {
                    serde_json::Value::Array(row) => row.iter().map(|x| scalar_text(x).ok_or_else(err)).collect::<Result<Vec<_>, _>>().map(|r| r.join(",")),
                    x => scalar_text(x).ok_or_else(err),
                })
                .collect::<Result<_, _>>()?;
            Ok(parts.join(if nested { ";" } else { "," }))
        }
        x => scalar_text(x).ok_or_else(err),
    }
}

fn read_file(path: &str) -> Result<serde_json::Map<String, serde_json::Value>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read config file {path}: {e}")))?;
    let value: serde_json::Value = if path.ends_with(".json") {
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("config file {path}: {e}")))?
    } else {
        let t: toml::Table = text.parse().map_err(|e| CliError::Usage(format!("config file {path}: {e}")))?;
        serde_json::to_value(t).map_err(|e| CliError::Usage(format!("config file {path}: {e}")))?
    };
    match value {
        serde_json::Value::Object(m) => Ok(m),
        _ => Err(CliError::Usage(format!("config file {path} must hold a table of options"))),
    }
}

/// Options of `command` from a config file. Top-level keys must be known to
/// some command and apply where they are known; keys inside a `[command]`
/// section must be known to that command.
pub fn file_options(path: &str, command: &str) -> Result<BTreeMap<String, String>, CliError> {
    let commands = command_names();
    let all: BTreeSet<String> = commands.iter().flat_map(|c| known_keys(c)).collect();
    let mine = known_keys(command);
    let mut top = BTreeMap::new();
    let mut section = BTreeMap::new();
    for (raw, v) in read_file(path)? {
        let key = raw.replace('_', "-");
        if commands.contains(&key) {
            let serde_json::Value::Object(inner) = v else {
                return Err(CliError::Usage(format!("config section `{key}` must be a table")));
            };
            let allowed = known_keys(&key);
            for (raw_inner, iv) in inner {
                let k = raw_inner.replace('_', "-");
                if !allowed.contains(&k) {
                    return Err(CliError::Usage(format!("unknown config key `{k}` in section `{key}`")));
                }
                if key == command {
                    section.insert(k.clone(), value_text(&k, &iv)?);
                }
            }
        } else if !all.contains(&key) {
            return Err(CliError::Usage(format!("unknown config key `{key}`")));
        } else if mine.contains(&key) {
            top.insert(key.clone(), value_text(&key, &v)?);
        }
    }
    top.extend(section);
    Ok(top)
}

impl Settings {
    /// Merges file options under the flags given on the command line.
    pub fn resolve(command: &str, flags: serde_json::Value, config: Option<&str>) -> Result<Self, CliError> {
        let mut values = match config {
            Some(path) => file_options(path, command)?,
            None => BTreeMap::new(),
        };
        if let serde_json::Value::Object(m) = flags {
            for (k, v) in m {
                if let serde_json::Value::String(s) = v {
                    values.insert(k, s);
                }
            }
        }
        Ok(Settings { values })
    }

    /// Fills in defaults for keys not yet set.
    pub fn defaults(&mut self, pairs: &[(&str, &str)]) {
        for (k, v) in pairs {
            self.values.entry(k.to_string()).or_insert_with(|| v.to_string());
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn require(&self, key: &str, why: &str) -> Result<&str, CliError> {
        self.get(key).ok_or_else(|| CliError::Usage(format!("missing required option --{key} ({why})")))
    }

    pub fn parse<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        self.get(key).map(|s| parse_value(key, s)).transpose()
    }

    pub fn parse_required<T: FromStr>(&self, key: &str, why: &str) -> Result<T, CliError> {
        parse_value(key, self.require(key, why)?)
    }

    pub fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>, CliError> {
        self.get(key).map(|s| parse_list(key, s)).transpose()
    }

    /// Echo of every resolved option except output routing.
    pub fn echo(&self) -> BTreeMap<&str, &str> {
        self.values
            .iter()
            .filter(|(k, _)| !PLUMBING.contains(&k.as_str()))
            .map(|(k, v)| (k.as_str(), v.as_str()))
            .collect()
    }
}

/// Parses `s`; integer targets also accept integral floats such as `1e5`.
pub fn parse_value<T: FromStr>(key: &str, s: &str) -> Result<T, CliError> {
    let t = s.trim();
    t.parse()
        .ok()
        .or_else(|| {
            let x: f64 = t.parse().ok()?;
            (x.is_finite() && x.fract() == 0.0 && x.abs() < 9e15).then(|| format!("{}", x as i64).parse().ok())?
        })
        .ok_or_else(|| CliError::Usage(format!("invalid value `{s}` for --{key}")))
}

pub fn parse_list<T: FromStr>(key: &str, s: &str) -> Result<Vec<T>, CliError> {
    let items: Vec<T> = s.split(',').filter(|t| !t.trim().is_empty()).map(|t| parse_value(key, t)).collect::<Result<_, _>>()?;
    if items.is_empty() {
        return Err(CliError::Usage(format!("--{key} needs at least one value")));
    }
    Ok(items)
}

/// A comma list, or `start:stop:count` log-spaced.
pub fn parse_grid(key: &str, s: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [_] => parse_list(key, s),
        [lo, hi, n] => {
            let (lo, hi): (f64, f64) = (parse_value(key, lo)?, parse_value(key, hi)?);
            let n: usize = parse_value(key, n)?;
            if !(lo > 0.0 && hi > lo) || n < 2 {
                return Err(CliError::Usage(format!("--{key} start:stop:count needs 0 < start < stop and count >= 2")));
            }
            let (l0, l1) = (lo.log10(), hi.log10());
            Ok((0..n)
                .map(|k| match k {
                    0 => lo,
                    k if k == n - 1 => hi,
                    k => 10f64.powf(l0 + (l1 - l0) * k as f64 / (n - 1) as f64),
                })
                .collect())
        }
        _ => Err(CliError::Usage(format!("invalid value `{s}` for --{key}: expected a list or start:stop:count"))),
    }
}
