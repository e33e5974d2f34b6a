//! JSON and CSV reports, written atomically.
//!
//! Everything under `results` and every CSV is a pure function of the
//! config and seed; wall-clock data lives in the separate `run` block.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use bfree::exact::to_decimal;
use bfree::Interval;
use num_rational::BigRational;
use serde_json::{json, Map, Value};

use crate::config::RunConfig;
use crate::error::CliError;

pub fn exact(v: &BigRational, digits: usize) -> Value {
    json!({
        "num": v.numer().to_string(),
        "den": v.denom().to_string(),
        "decimal": to_decimal(v, digits),
    })
}

pub fn interval(iv: &Interval, digits: usize) -> Value {
    json!({
        "value": exact(&iv.value, digits),
        "halfwidth": exact(&iv.halfwidth, digits),
        "lo": to_decimal(&iv.lo(), digits),
        "hi": to_decimal(&iv.hi(), digits),
    })
}

pub fn point(coords: &[i64]) -> String {
    let parts: Vec<String> = coords.iter().map(|c| c.to_string()).collect();
    format!("({})", parts.join(","))
}

pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Table { name: name.into(), header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

pub struct Report {
    pub command: String,
    pub results: Map<String, Value>,
    pub tables: Vec<Table>,
    pub run: Map<String, Value>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report { command: command.into(), results: Map::new(), tables: Vec::new(), run: Map::new() }
    }

    pub fn set(&mut self, key: &str, value: Value) {
        self.results.insert(key.into(), value);
    }

    pub fn to_json(&self, config: &RunConfig, seed: u64) -> Value {
        json!({
            "command": self.command,
            "config": config,
            "config_hash": hex::encode(config.hash()),
            "seed": seed,
            "results": self.results,
            "run": self.run,
        })
    }

    /// Writes `<command>.json` and one `<command>_<table>.csv` per table;
    /// returns the paths written.
    pub fn write(&self, dir: &Path, config: &RunConfig, seed: u64) -> Result<Vec<PathBuf>, CliError> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        let mut body = serde_json::to_vec_pretty(&self.to_json(config, seed)).expect("report serializes");
        body.push(b'\n');
        let path = dir.join(format!("{}.json", self.command));
        write_atomic(&path, &body)?;
        written.push(path);
        for t in &self.tables {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&t.header)?;
            for r in &t.rows {
                w.write_record(r)?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Other(format!("csv: {e}")))?;
            let path = dir.join(format!("{}_{}.csv", self.command, t.name));
            write_atomic(&path, &bytes)?;
            written.push(path);
        }
        Ok(written)
    }
}

/// Write to a sibling temporary file, then rename over the target.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}
