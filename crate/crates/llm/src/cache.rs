//! Append-only JSON-lines store of raw responses.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::LlmError;

/// One query and its answer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub model: String,
    pub endpoint: String,
    pub run_id: String,
    pub ordinal: usize,
    pub prompt: String,
    pub response: String,
    /// RFC 3339, UTC.
    pub timestamp: String,
    pub temperature: f64,
    pub max_tokens: u32,
}

type Key = (String, String, usize);

fn key(model: &str, run_id: &str, ordinal: usize) -> Key {
    (model.to_string(), run_id.to_string(), ordinal)
}

/// Records keyed by (model, run id, sentence ordinal). Each record is one
/// line, so a crash can at worst leave a torn last line, which is skipped
/// on load.
#[derive(Debug)]
pub struct ResponseCache {
    path: PathBuf,
    entries: Mutex<HashMap<Key, RunRecord>>,
    file: Mutex<File>,
}

impl ResponseCache {
    pub fn open(path: impl AsRef<Path>) -> Result<Self, LlmError> {
        let path = path.as_ref().to_path_buf();
        let io = |e| LlmError::Cache(path.clone(), e);
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(io)?;
        }
        let mut entries = HashMap::new();
        if path.exists() {
            let reader = BufReader::new(File::open(&path).map_err(io)?);
            for line in reader.lines() {
                let line = line.map_err(io)?;
                if let Ok(r) = serde_json::from_str::<RunRecord>(&line) {
                    entries.entry(key(&r.model, &r.run_id, r.ordinal)).or_insert(r);
                }
            }
        }
        let mut file = OpenOptions::new().create(true).append(true).open(&path).map_err(io)?;
        // a torn last line must not swallow the next record
        if std::fs::metadata(&path).map_err(io)?.len() > 0 && !ends_with_newline(&path).map_err(io)? {
            file.write_all(b"\n").map_err(io)?;
        }
        Ok(ResponseCache {
            path,
            entries: Mutex::new(entries),
            file: Mutex::new(file),
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn get(&self, model: &str, run_id: &str, ordinal: usize) -> Option<RunRecord> {
        self.entries
            .lock()
            .expect("cache lock")
            .get(&key(model, run_id, ordinal))
            .cloned()
    }

    pub fn len(&self) -> usize {
        self.entries.lock().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Append `record` and flush it to disk. An existing record for the
    /// same key wins.
    pub fn put(&self, record: RunRecord) -> Result<(), LlmError> {
        let k = key(&record.model, &record.run_id, record.ordinal);
        let mut entries = self.entries.lock().expect("cache lock");
        if entries.contains_key(&k) {
            return Ok(());
        }
        let mut line = serde_json::to_string(&record).expect("records serialize");
        line.push('\n');
        let mut file = self.file.lock().expect("cache file lock");
        file.write_all(line.as_bytes())
            .and_then(|_| file.flush())
            .map_err(|e| LlmError::Cache(self.path.clone(), e))?;
        entries.insert(k, record);
        Ok(())
    }
}

fn ends_with_newline(path: &Path) -> std::io::Result<bool> {
    use std::io::{Read, Seek, SeekFrom};
    let mut f = File::open(path)?;
    f.seek(SeekFrom::End(-1))?;
    let mut b = [0u8; 1];
    f.read_exact(&mut b)?;
    Ok(b[0] == b'\n')
}
