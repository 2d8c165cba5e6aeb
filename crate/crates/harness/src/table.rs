//! Result tables and their on-disk form: `<name>.csv` (or `<name>.json`)
//! next to `<name>.meta.json`, which carries the provenance and a digest
//! of the table file.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::{hex_digest, ExperimentConfig};
use crate::error::{HarnessError, Result};

pub const CODE_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub config_hash: String,
    pub code_version: String,
    pub master_seed: u64,
    /// Seconds since the Unix epoch.
    pub started: f64,
    pub finished: f64,
}

impl Provenance {
    pub fn start(cfg: &ExperimentConfig) -> Self {
        let now = unix_now();
        Self {
            config_hash: cfg.hash(),
            code_version: CODE_VERSION.to_string(),
            master_seed: cfg.master_seed,
            started: now,
            finished: now,
        }
    }
}

fn unix_now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

/// Named numeric columns of equal length plus scalar results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    pub name: String,
    columns: Vec<(String, Vec<f64>)>,
    /// Fitted slopes, slack parameters, verdicts.
    pub summary: BTreeMap<String, Value>,
    pub provenance: Provenance,
}

impl ResultTable {
    pub fn new(name: &str, cfg: &ExperimentConfig, headers: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            columns: headers.iter().map(|h| (h.to_string(), Vec::new())).collect(),
            summary: BTreeMap::new(),
            provenance: Provenance::start(cfg),
        }
    }

    pub fn push_row(&mut self, row: &[f64]) {
        assert_eq!(row.len(), self.columns.len(), "row width of table {}", self.name);
        for ((_, col), &v) in self.columns.iter_mut().zip(row) {
            col.push(v);
        }
    }

    pub fn set(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("summary value serializes");
        self.summary.insert(key.to_string(), v);
    }

    pub fn finish(&mut self) {
        self.provenance.finished = unix_now();
    }

    pub fn headers(&self) -> Vec<&str> {
        self.columns.iter().map(|(h, _)| h.as_str()).collect()
    }

    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, |(_, c)| c.len())
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns.iter().find(|(h, _)| h == name).map(|(_, c)| c.as_slice())
    }

    pub fn summary_f64(&self, key: &str) -> Option<f64> {
        self.summary.get(key).and_then(Value::as_f64)
    }

    pub fn summary_bool(&self, key: &str) -> Option<bool> {
        self.summary.get(key).and_then(Value::as_bool)
    }

    /// CSV body with 17 significant digits and one header row.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| HarnessError::Config(format!("csv: {e}"));
        w.write_record(self.headers()).map_err(io)?;
        for r in 0..self.rows() {
            w.write_record(self.columns.iter().map(|(_, c)| format!("{:.16e}", c[r])))
                .map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| HarnessError::Config(format!("csv: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is ascii"))
    }

    /// Columns as a JSON object of arrays, in column order.
    pub fn to_json(&self) -> Value {
        let cols: serde_json::Map<String, Value> = self
            .columns
            .iter()
            .map(|(h, c)| (h.clone(), serde_json::to_value(c).expect("numbers serialize")))
            .collect();
        serde_json::json!({ "name": self.name, "columns": cols, "summary": self.summary })
    }

    /// Writes the table and its meta file into `dir`; returns both paths.
    pub fn write(&self, dir: &Path, format: Format, cfg: &ExperimentConfig) -> Result<(PathBuf, PathBuf)> {
        fs::create_dir_all(dir).map_err(|e| HarnessError::io(format!("creating {}", dir.display()), e))?;
        let body = match format {
            Format::Csv => self.to_csv()?,
            Format::Json => serde_json::to_string_pretty(&self.to_json()).expect("table serializes"),
        };
        let data_path = dir.join(format!("{}.{}", self.name, format.extension()));
        fs::write(&data_path, &body).map_err(|e| HarnessError::io(format!("writing {}", data_path.display()), e))?;
        let meta = TableMeta {
            experiment: self.name.clone(),
            format,
            data_file: data_path
                .file_name()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default(),
            data_sha256: hex_digest(body.as_bytes()),
            columns: self.headers().iter().map(|s| s.to_string()).collect(),
            rows: self.rows(),
            summary: self.summary.clone(),
            provenance: self.provenance.clone(),
            config: serde_json::to_value(cfg).expect("config serializes"),
        };
        let meta_path = dir.join(format!("{}.meta.json", self.name));
        let text = serde_json::to_string_pretty(&meta).expect("meta serializes");
        fs::write(&meta_path, text).map_err(|e| HarnessError::io(format!("writing {}", meta_path.display()), e))?;
        Ok((data_path, meta_path))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableMeta {
    pub experiment: String,
    pub format: Format,
    pub data_file: String,
    pub data_sha256: String,
    pub columns: Vec<String>,
    pub rows: usize,
    pub summary: BTreeMap<String, Value>,
    pub provenance: Provenance,
    pub config: Value,
}

/// Reads `<name>.meta.json` from `dir` and checks it against `cfg` and the
/// table file it describes.
pub fn read_meta(dir: &Path, name: &str, cfg: &ExperimentConfig) -> Result<TableMeta> {
    let meta_path = dir.join(format!("{name}.meta.json"));
    let text = fs::read_to_string(&meta_path)
        .map_err(|e| HarnessError::io(format!("reading {}", meta_path.display()), e))?;
    let meta: TableMeta =
        serde_json::from_str(&text).map_err(|e| HarnessError::Config(format!("{}: {e}", meta_path.display())))?;
    let expected = cfg.hash();
    if meta.provenance.config_hash != expected {
        return Err(HarnessError::Config(format!(
            "{}: config hash {} does not match {expected}",
            meta_path.display(),
            meta.provenance.config_hash
        )));
    }
    let data_path = dir.join(&meta.data_file);
    let body = fs::read(&data_path).map_err(|e| HarnessError::io(format!("reading {}", data_path.display()), e))?;
    if hex_digest(&body) != meta.data_sha256 {
        return Err(HarnessError::Config(format!(
            "{} does not match the digest recorded in its meta file",
            data_path.display()
        )));
    }
    Ok(meta)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> ResultTable {
        let cfg = ExperimentConfig::default();
        let mut t = ResultTable::new("demo", &cfg, &["eps", "dist"]);
        t.push_row(&[0.02, 1.0 / 3.0]);
        t.push_row(&[0.01, 0.0]);
        t.set("slope", 1.0);
        t
    }

    #[test]
    fn csv_has_seventeen_digits() {
        let csv = table().to_csv().unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("eps,dist"));
        assert_eq!(lines.next(), Some("2.0000000000000000e-2,3.3333333333333331e-1"));
        let parsed: f64 = "3.3333333333333331e-1".parse().unwrap();
        assert_eq!(parsed, 1.0 / 3.0);
    }

    #[test]
    #[should_panic]
    fn ragged_rows_are_rejected() {
        table().push_row(&[1.0]);
    }

    #[test]
    fn meta_round_trip_and_hash_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = ExperimentConfig::default();
        let t = table();
        t.write(dir.path(), Format::Csv, &cfg).unwrap();
        let meta = read_meta(dir.path(), "demo", &cfg).unwrap();
        assert_eq!(meta.rows, 2);
        assert_eq!(meta.summary["slope"], 1.0);
        let mut other = cfg.clone();
        other.master_seed = 5;
        assert!(matches!(read_meta(dir.path(), "demo", &other), Err(HarnessError::Config(_))));
        std::fs::write(dir.path().join("demo.csv"), "tampered").unwrap();
        assert!(read_meta(dir.path(), "demo", &cfg).is_err());
    }
}
