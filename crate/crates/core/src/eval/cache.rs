use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{EvalError, ReferenceMode};
use crate::classifier::EmotionLabel;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CacheKey {
    pub model: String,
    pub pair_id: String,
    pub reference: ReferenceMode,
}

impl CacheKey {
    pub fn new(model: &str, pair_id: &str, reference: ReferenceMode) -> Self {
        CacheKey {
            model: model.to_string(),
            pair_id: pair_id.to_string(),
            reference,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheEntry {
    #[serde(flatten)]
    pub key: CacheKey,
    pub prediction: String,
    pub predicted: EmotionLabel,
}

/// Append-only JSONL store of per-pair predictions. Later lines win.
#[derive(Debug)]
pub struct EvalCache {
    path: Option<PathBuf>,
    entries: HashMap<CacheKey, CacheEntry>,
}

impl EvalCache {
    pub fn in_memory() -> Self {
        EvalCache {
            path: None,
            entries: HashMap::new(),
        }
    }

    /// Opens (or starts) the cache file at `path`. A truncated final line,
    /// as left by a crash mid-write, is ignored.
    pub fn open(path: &Path) -> Result<Self, EvalError> {
        let mut entries = HashMap::new();
        match File::open(path) {
            Ok(f) => {
                let lines: Vec<String> = BufReader::new(f)
                    .lines()
                    .collect::<Result<_, _>>()
                    .map_err(|source| io(path, source))?;
                let last = lines.len().saturating_sub(1);
                for (n, line) in lines.iter().enumerate() {
                    if line.trim().is_empty() {
                        continue;
                    }
                    match serde_json::from_str::<CacheEntry>(line) {
                        Ok(e) => {
                            entries.insert(e.key.clone(), e);
                        }
                        Err(_) if n == last => {
                            log::warn!("{}: ignoring truncated last line", path.display())
                        }
                        Err(e) => {
                            return Err(EvalError::Format {
                                path: path.to_path_buf(),
                                message: format!("line {}: {e}", n + 1),
                            })
                        }
                    }
                }
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
            Err(e) => return Err(io(path, e)),
        }
        Ok(EvalCache {
            path: Some(path.to_path_buf()),
            entries,
        })
    }

    pub fn get(&self, key: &CacheKey) -> Option<&CacheEntry> {
        self.entries.get(key)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn append(&mut self, batch: Vec<CacheEntry>) -> Result<(), EvalError> {
        if let Some(path) = &self.path {
            let mut f = OpenOptions::new()
                .create(true)
                .append(true)
                .open(path)
                .map_err(|e| io(path, e))?;
            let mut buf = Vec::new();
            for e in &batch {
                serde_json::to_writer(&mut buf, e).expect("cache entries serialize");
                buf.push(b'\n');
            }
            f.write_all(&buf).map_err(|e| io(path, e))?;
        }
        for e in batch {
            self.entries.insert(e.key.clone(), e);
        }
        Ok(())
    }
}

fn io(path: &Path, source: std::io::Error) -> EvalError {
    EvalError::Io {
        path: path.to_path_buf(),
        source,
    }
}
