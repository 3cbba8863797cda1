//! Line-delimited JSON output: one header line carrying the timestamp and
//! resolved configuration, then result records tagged with the config hash.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::{Map, Value};

use crate::config::ExperimentConfig;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "FQT_OUT_DIR";

pub struct Emitter {
    sink: Box<dyn Write>,
    hash: String,
}

fn destination(cfg: &ExperimentConfig) -> Option<PathBuf> {
    if let Some(p) = &cfg.out {
        return Some(PathBuf::from(p));
    }
    std::env::var_os(OUT_DIR_ENV).map(|dir| {
        PathBuf::from(dir).join(format!("{}-{}.jsonl", cfg.subcommand, &cfg.hash()[..12]))
    })
}

impl Emitter {
    pub fn open(cfg: &ExperimentConfig) -> io::Result<Self> {
        let sink: Box<dyn Write> = match destination(cfg) {
            Some(path) => {
                if let Some(parent) = path.parent() {
                    if !parent.as_os_str().is_empty() {
                        std::fs::create_dir_all(parent)?;
                    }
                }
                Box::new(BufWriter::new(File::create(path)?))
            }
            None => Box::new(BufWriter::new(io::stdout())),
        };
        Ok(Emitter {
            sink,
            hash: cfg.hash(),
        })
    }

    pub fn header(&mut self, cfg: &ExperimentConfig) -> io::Result<()> {
        let ts = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let line = serde_json::json!({
            "type": "header",
            "timestamp_unix": ts,
            "tool": "fqt",
            "version": env!("CARGO_PKG_VERSION"),
            "config_hash": self.hash,
            "config": cfg,
            "tuning": cfg.tuning(),
        });
        writeln!(self.sink, "{line}")
    }

    /// Writes `{"type": kind, "config_hash": ..., <fields of data>}`.
    pub fn record<T: Serialize>(&mut self, kind: &str, data: &T) -> io::Result<()> {
        let mut obj = Map::new();
        obj.insert("type".into(), Value::from(kind));
        obj.insert("config_hash".into(), Value::from(self.hash.clone()));
        match serde_json::to_value(data).map_err(io::Error::other)? {
            Value::Object(m) => obj.extend(m),
            other => {
                obj.insert("value".into(), other);
            }
        }
        writeln!(self.sink, "{}", Value::Object(obj))
    }

    pub fn finish(mut self) -> io::Result<()> {
        self.sink.flush()
    }
}
