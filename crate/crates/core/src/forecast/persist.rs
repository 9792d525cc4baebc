use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::lstm::LstmModel;
use super::train::TrainReport;
use crate::error::{Error, Result};

pub const MODEL_FORMAT_VERSION: &str = "surgeflow-lstm/1";

#[derive(Serialize, Deserialize)]
struct ModelDocument {
    format_version: String,
    #[serde(flatten)]
    model: LstmModel,
}

impl LstmModel {
    pub fn to_json(&self) -> String {
        let doc = ModelDocument {
            format_version: MODEL_FORMAT_VERSION.to_string(),
            model: self.clone(),
        };
        serde_json::to_string_pretty(&doc).expect("model serializes")
    }

    pub fn from_json(text: &str, origin: &Path) -> Result<Self> {
        let doc: ModelDocument = serde_json::from_str(text).map_err(|source| Error::Json {
            path: origin.to_path_buf(),
            source,
        })?;
        if doc.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::config(
                "format_version",
                format!("expected {MODEL_FORMAT_VERSION}, found {}", doc.format_version),
            ));
        }
        doc.model.validate()?;
        Ok(doc.model)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        crate::io::write_atomic(path, self.to_json().as_bytes())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text, path)
    }
}

/// `epoch,train_loss,val_loss`, epochs numbered from 1.
pub fn write_history_csv(report: &TrainReport, path: &Path) -> Result<()> {
    let mut out = String::from("epoch,train_loss,val_loss\n");
    for (e, (t, v)) in report.train_loss.iter().zip(&report.val_loss).enumerate() {
        out.push_str(&format!("{},{},{}\n", e + 1, t, v));
    }
    crate::io::write_atomic(path, out.as_bytes())
}

pub fn read_history_csv(path: &Path) -> Result<TrainReport> {
    let rows = crate::io::csv_rows(path, &["epoch", "train_loss", "val_loss"])?;
    let mut report = TrainReport {
        train_loss: Vec::new(),
        val_loss: Vec::new(),
        train_pairs: 0,
        val_pairs: 0,
    };
    for (line, row) in rows {
        let parse = |k: usize| {
            row[k].trim().parse::<f64>().map_err(|e| Error::Parse {
                path: path.to_path_buf(),
                line,
                reason: format!("column {k}: {e}"),
            })
        };
        report.train_loss.push(parse(1)?);
        report.val_loss.push(parse(2)?);
    }
    Ok(report)
}
