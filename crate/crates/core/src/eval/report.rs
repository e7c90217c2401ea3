use std::collections::HashMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{DatasetName, EvalError, EvalRun};
use crate::metrics::MetricName;

/// One value of the metric × model × dataset grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub metric: MetricName,
    pub model: String,
    pub dataset: DatasetName,
    pub restricted: bool,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub runs: Vec<EvalRun>,
    /// Grouped by metric, then model, then dataset column.
    pub cells: Vec<Cell>,
    #[serde(default)]
    pub warnings: Vec<String>,
}

type RunKey = (String, DatasetName, bool);

fn key(r: &EvalRun) -> RunKey {
    (r.model_name.clone(), r.dataset_name.clone(), r.restricted)
}

fn column_label(dataset: &DatasetName, restricted: bool) -> String {
    if restricted {
        format!("{dataset} (restricted)")
    } else {
        dataset.to_string()
    }
}

/// Builds the report grid. A later run with the same model, dataset and
/// restriction replaces an earlier one. Models and datasets keep the order in
/// which they first appear.
pub fn compare(runs: Vec<EvalRun>) -> EvalReport {
    let mut warnings = Vec::new();
    let mut kept: Vec<EvalRun> = Vec::new();
    let mut slot: HashMap<RunKey, usize> = HashMap::new();
    for run in runs {
        let k = key(&run);
        if let Some(&i) = slot.get(&k) {
            let msg = format!(
                "duplicate run for model {} on {}; keeping the latest",
                k.0,
                column_label(&k.1, k.2)
            );
            log::warn!("{msg}");
            warnings.push(msg);
            kept[i] = run;
        } else {
            slot.insert(k, kept.len());
            kept.push(run);
        }
    }

    let mut models: Vec<&str> = Vec::new();
    let mut columns: Vec<(&DatasetName, bool)> = Vec::new();
    for r in &kept {
        if !models.contains(&r.model_name.as_str()) {
            models.push(&r.model_name);
        }
        if !columns.contains(&(&r.dataset_name, r.restricted)) {
            columns.push((&r.dataset_name, r.restricted));
        }
    }

    let mut cells = Vec::with_capacity(kept.len() * MetricName::ALL.len());
    for metric in MetricName::ALL {
        for model in &models {
            for (dataset, restricted) in &columns {
                let k = (model.to_string(), (*dataset).clone(), *restricted);
                if let Some(&i) = slot.get(&k) {
                    if let Some(value) = kept[i].metric(metric) {
                        cells.push(Cell {
                            metric,
                            model: model.to_string(),
                            dataset: (*dataset).clone(),
                            restricted: *restricted,
                            value,
                        });
                    }
                }
            }
        }
    }

    EvalReport {
        runs: kept,
        cells,
        warnings,
    }
}

impl EvalReport {
    pub fn from_json(json: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(json)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// One row per cell. Contains no timestamps, so identical runs give
    /// identical bytes.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["metric", "model", "dataset", "restricted", "value"])
            .expect("in-memory write");
        for c in &self.cells {
            w.write_record([
                c.metric.as_str(),
                &c.model,
                c.dataset.as_str(),
                if c.restricted { "true" } else { "false" },
                &c.value.to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
    }

    /// Aligned table: one row per (metric, model), one column per dataset.
    pub fn to_text(&self) -> String {
        let mut models: Vec<&str> = Vec::new();
        let mut columns: Vec<(&DatasetName, bool)> = Vec::new();
        for c in &self.cells {
            if !models.contains(&c.model.as_str()) {
                models.push(&c.model);
            }
            if !columns.contains(&(&c.dataset, c.restricted)) {
                columns.push((&c.dataset, c.restricted));
            }
        }
        let lookup: HashMap<(MetricName, &str, &DatasetName, bool), f64> = self
            .cells
            .iter()
            .map(|c| ((c.metric, c.model.as_str(), &c.dataset, c.restricted), c.value))
            .collect();

        let mut header = vec!["metric".to_string(), "model".to_string()];
        header.extend(columns.iter().map(|(d, r)| column_label(d, *r)));
        let mut rows = vec![header];
        for metric in MetricName::ALL {
            for model in &models {
                let mut row = vec![metric.to_string(), model.to_string()];
                let mut any = false;
                for (d, r) in &columns {
                    match lookup.get(&(metric, *model, *d, *r)) {
                        Some(v) => {
                            any = true;
                            row.push(format!("{v:.4}"));
                        }
                        None => row.push("-".into()),
                    }
                }
                if any {
                    rows.push(row);
                }
            }
        }

        let ncols = rows[0].len();
        let widths: Vec<usize> = (0..ncols)
            .map(|i| rows.iter().map(|r| r[i].chars().count()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for row in rows {
            let line: Vec<String> = row
                .iter()
                .zip(&widths)
                .enumerate()
                .map(|(i, (cell, w))| {
                    if i < 2 {
                        format!("{cell:<w$}")
                    } else {
                        format!("{cell:>w$}")
                    }
                })
                .collect();
            out.push_str(line.join("  ").trim_end());
            out.push('\n');
        }
        out
    }

    /// Writes report.csv, report.json and report.txt into `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<(), EvalError> {
        fs::create_dir_all(dir).map_err(|source| EvalError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        for (name, body) in [
            ("report.csv", self.to_csv()),
            ("report.json", self.to_json()),
            ("report.txt", self.to_text()),
        ] {
            let path = dir.join(name);
            fs::write(&path, body).map_err(|source| EvalError::Io { path, source })?;
        }
        Ok(())
    }

    /// Loads the runs of an existing report.json, or none if absent.
    pub fn load_runs(dir: &Path) -> Result<Vec<EvalRun>, EvalError> {
        let path = dir.join("report.json");
        match fs::read_to_string(&path) {
            Ok(s) => EvalReport::from_json(&s)
                .map(|r| r.runs)
                .map_err(|e| EvalError::Format {
                    path,
                    message: e.to_string(),
                }),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Vec::new()),
            Err(source) => Err(EvalError::Io { path, source }),
        }
    }
}
