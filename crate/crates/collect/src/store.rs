//! Append-only JSONL submission store.

use std::fs::{File, OpenOptions};
use std::io::{Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Submission {
    pub submission_id: u64,
    pub task_id: String,
    /// Bangla-script text exactly as typed.
    pub raw_input: String,
    pub ccp_text: String,
    /// RFC 3339.
    pub submitted_at: String,
    pub contributor: String,
}

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: line {line} is corrupt: {message}")]
    Corrupt { path: PathBuf, line: usize, message: String },
    #[error("{path}: line {line}: submission ids must increase")]
    OutOfOrder { path: PathBuf, line: usize },
}

/// What startup recovery found.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Recovery {
    pub records: usize,
    /// Bytes of a trailing partial or unreadable line that were cut off.
    pub truncated_bytes: u64,
}

struct Writer {
    file: File,
    next_id: u64,
}

pub struct SubmissionStore {
    path: PathBuf,
    writer: Mutex<Writer>,
    snapshot: RwLock<Arc<Vec<Submission>>>,
}

impl std::fmt::Debug for SubmissionStore {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SubmissionStore")
            .field("path", &self.path)
            .finish_non_exhaustive()
    }
}

/// Fields the caller supplies; id and time are assigned by the store.
#[derive(Debug, Clone)]
pub struct NewSubmission {
    pub task_id: String,
    pub raw_input: String,
    pub ccp_text: String,
    pub contributor: String,
}

impl SubmissionStore {
    /// Opens (or creates) the store. A trailing line that is incomplete or
    /// does not parse is cut off; damage anywhere else is an error.
    pub fn open(path: impl AsRef<Path>) -> Result<(Self, Recovery), StoreError> {
        let path = path.as_ref().to_path_buf();
        let io = |source| StoreError::Io {
            path: path.clone(),
            source,
        };
        let mut file = OpenOptions::new()
            .read(true)
            .append(true)
            .create(true)
            .open(&path)
            .map_err(io)?;
        let mut bytes = Vec::new();
        file.read_to_end(&mut bytes).map_err(io)?;

        let mut records: Vec<Submission> = Vec::new();
        let mut good_end = 0usize;
        let mut rest = &bytes[..];
        let mut line_no = 0;
        let mut damaged_tail = false;
        while !rest.is_empty() {
            line_no += 1;
            let (line, complete) = match rest.iter().position(|b| *b == b'\n') {
                Some(i) => (&rest[..i], true),
                None => (rest, false),
            };
            let consumed = line.len() + usize::from(complete);
            let is_last = consumed == rest.len();
            let parsed = std::str::from_utf8(line)
                .map_err(|e| e.to_string())
                .and_then(|s| serde_json::from_str::<Submission>(s).map_err(|e| e.to_string()));
            match parsed {
                Ok(sub) if complete => {
                    if records.last().is_some_and(|prev| prev.submission_id >= sub.submission_id) {
                        return Err(StoreError::OutOfOrder { path, line: line_no });
                    }
                    records.push(sub);
                    good_end += consumed;
                }
                Ok(_) => {
                    damaged_tail = true;
                    break;
                }
                Err(_) if line.is_empty() && complete => good_end += consumed,
                Err(message) if !is_last => {
                    return Err(StoreError::Corrupt {
                        path,
                        line: line_no,
                        message,
                    })
                }
                Err(_) => {
                    damaged_tail = true;
                    break;
                }
            }
            rest = &rest[consumed..];
        }

        let truncated_bytes = (bytes.len() - good_end) as u64;
        if damaged_tail {
            file.set_len(good_end as u64).map_err(io)?;
            file.seek(SeekFrom::End(0)).map_err(io)?;
        }
        let next_id = records.last().map_or(1, |s| s.submission_id + 1);
        let recovery = Recovery {
            records: records.len(),
            truncated_bytes,
        };
        Ok((
            SubmissionStore {
                path,
                writer: Mutex::new(Writer { file, next_id }),
                snapshot: RwLock::new(Arc::new(records)),
            },
            recovery,
        ))
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Current contents; later appends do not change the returned vector.
    pub fn snapshot(&self) -> Arc<Vec<Submission>> {
        self.snapshot.read().expect("snapshot lock").clone()
    }

    pub fn len(&self) -> usize {
        self.snapshot().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Assigns the next id and timestamp, writes one line and publishes the record.
    pub fn append(&self, new: NewSubmission) -> Result<Submission, StoreError> {
        let mut writer = self.writer.lock().expect("writer lock");
        let sub = Submission {
            submission_id: writer.next_id,
            task_id: new.task_id,
            raw_input: new.raw_input,
            ccp_text: new.ccp_text,
            submitted_at: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true),
            contributor: new.contributor,
        };
        let mut line = serde_json::to_string(&sub).expect("submission serializes");
        line.push('\n');
        let io = |source| StoreError::Io {
            path: self.path.clone(),
            source,
        };
        writer.file.write_all(line.as_bytes()).map_err(io)?;
        writer.file.flush().map_err(io)?;
        writer.next_id += 1;
        let mut snapshot = self.snapshot.write().expect("snapshot lock");
        let mut next = Vec::with_capacity(snapshot.len() + 1);
        next.extend(snapshot.iter().cloned());
        next.push(sub.clone());
        *snapshot = Arc::new(next);
        Ok(sub)
    }
}
