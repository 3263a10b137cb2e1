//! Source sentences offered to contributors and the assignment policy.

use std::collections::HashMap;
use std::io::BufRead;
use std::path::Path;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Task {
    pub task_id: String,
    pub bn: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub en: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskStatus {
    Open,
    Submitted,
}

#[derive(Debug, thiserror::Error)]
pub enum TaskError {
    #[error("tasks line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("tasks line {line}: duplicate task_id `{id}`")]
    Duplicate { line: usize, id: String },
    #[error("tasks line {line}: empty bn text")]
    EmptyText { line: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub fn read_tasks(reader: impl BufRead) -> Result<Vec<Task>, TaskError> {
    let mut tasks = Vec::new();
    let mut seen = HashMap::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let task: Task = serde_json::from_str(&line).map_err(|e| TaskError::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        if task.bn.trim().is_empty() {
            return Err(TaskError::EmptyText { line: line_no });
        }
        if seen.insert(task.task_id.clone(), line_no).is_some() {
            return Err(TaskError::Duplicate {
                line: line_no,
                id: task.task_id,
            });
        }
        tasks.push(task);
    }
    Ok(tasks)
}

pub fn load_tasks(path: impl AsRef<Path>) -> Result<Vec<Task>, TaskError> {
    let file = std::fs::File::open(path)?;
    read_tasks(std::io::BufReader::new(file))
}

/// Least-submitted first; ties go round-robin from just after the previous pick.
/// Tasks are never locked, so every task stays eligible.
#[derive(Debug, Clone)]
pub struct Scheduler {
    counts: Vec<u64>,
    cursor: usize,
}

impl Scheduler {
    pub fn new(task_count: usize) -> Self {
        Scheduler {
            counts: vec![0; task_count],
            cursor: 0,
        }
    }

    pub fn record_submission(&mut self, index: usize) {
        self.counts[index] += 1;
    }

    pub fn count(&self, index: usize) -> u64 {
        self.counts[index]
    }

    pub fn pick(&mut self) -> Option<usize> {
        let min = *self.counts.iter().min()?;
        let n = self.counts.len();
        let pick = (0..n).map(|k| (self.cursor + k) % n).find(|&i| self.counts[i] == min)?;
        self.cursor = (pick + 1) % n;
        Some(pick)
    }
}
