use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const CSV_HEADER: &str = "experiment,detector,K,M_r,snr_db,metric,value,stderr,trials,seed";

/// One measured metric at one sweep point.
///
/// `detector` names the detector, or the swept label (for example
/// `alpha=0.5`) for experiments without one. Parameters that do not apply
/// are left empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub experiment: String,
    pub detector: String,
    #[serde(rename = "K")]
    pub k: Option<usize>,
    #[serde(rename = "M_r")]
    pub m_r: Option<usize>,
    pub snr_db: Option<f64>,
    pub metric: String,
    pub value: f64,
    pub stderr: f64,
    pub trials: u64,
    pub seed: u64,
}

/// Streams rows to a CSV file, flushing after each row so that an
/// interrupted run keeps everything measured so far.
pub struct CsvSink<W: Write = File> {
    writer: csv::Writer<W>,
    path: PathBuf,
}

impl CsvSink<File> {
    pub fn create(path: &Path) -> Result<Self> {
        let file = File::create(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        CsvSink::from_writer(file, path)
    }
}

impl<W: Write> CsvSink<W> {
    /// Writes the header to `out`; `path` only labels errors.
    pub fn from_writer(mut out: W, path: &Path) -> Result<Self> {
        writeln!(out, "{CSV_HEADER}").map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let writer = csv::WriterBuilder::new()
            .has_headers(false)
            .from_writer(out);
        Ok(CsvSink {
            writer,
            path: path.to_path_buf(),
        })
    }

    pub fn push(&mut self, row: &ResultRow) -> Result<()> {
        if !row.value.is_finite() || !row.stderr.is_finite() {
            return Err(Error::invalid(
                "row",
                format!("non-finite value in {}/{}", row.experiment, row.metric),
            ));
        }
        let csv_err = |source| Error::Csv {
            path: self.path.clone(),
            source,
        };
        self.writer.serialize(row).map_err(csv_err)?;
        self.writer.flush().map_err(|source| Error::Io {
            path: self.path.clone(),
            source,
        })
    }
}

pub fn write_results(rows: &[ResultRow], path: &Path) -> Result<()> {
    let mut sink = CsvSink::create(path)?;
    rows.iter().try_for_each(|r| sink.push(r))
}

pub fn read_results(path: &Path) -> Result<Vec<ResultRow>> {
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut reader = csv::Reader::from_path(path).map_err(csv_err)?;
    let header = reader
        .headers()
        .map_err(csv_err)?
        .iter()
        .collect::<Vec<_>>()
        .join(",");
    if header != CSV_HEADER {
        return Err(Error::config(
            "header",
            format!("unexpected CSV header {header:?}"),
        ));
    }
    reader.deserialize().map(|r| r.map_err(csv_err)).collect()
}
