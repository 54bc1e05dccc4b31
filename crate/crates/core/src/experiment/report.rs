use std::path::{Path, PathBuf};

use serde::Serialize;

/// Provenance written next to every CSV report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportMeta {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    /// Everything needed to re-run the command.
    pub config: serde_json::Value,
}

impl ReportMeta {
    pub fn new(command: &str, seed: u64, config: &impl Serialize) -> crate::Result<Self> {
        Ok(Self {
            tool: "aquamodem".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            seed,
            config: serde_json::to_value(config)?,
        })
    }
}

/// Rows plus metadata, saved as `<name>.csv` and `<name>.json`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport<R> {
    pub meta: ReportMeta,
    pub rows: Vec<R>,
}

impl<R: Serialize> ExperimentReport<R> {
    pub fn new(meta: ReportMeta, rows: Vec<R>) -> Self {
        Self { meta, rows }
    }

    pub fn csv_string(&self) -> crate::Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.rows {
            w.serialize(r)?;
        }
        let bytes = w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn sidecar_path(csv_path: &Path) -> PathBuf {
        csv_path.with_extension("json")
    }

    /// Writes the CSV to `csv_path` and the metadata beside it.
    pub fn write(&self, csv_path: &Path) -> crate::Result<()> {
        std::fs::write(csv_path, self.csv_string()?)?;
        let mut meta = serde_json::to_string_pretty(&self.meta)?;
        meta.push('\n');
        std::fs::write(Self::sidecar_path(csv_path), meta)?;
        Ok(())
    }
}
