//! One JSON file per project, saved atomically with an optimistic revision check.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use creamkit::{validate_hta, CpcAssessment, TaskTree, Taxonomy};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Project {
    pub id: String,
    pub hta: TaskTree,
    #[serde(default)]
    pub assessments: BTreeMap<String, CpcAssessment>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub taxonomy_override: Option<Taxonomy>,
    #[serde(default)]
    pub notes: String,
    /// Revision the caller last saw; 0 for a new project.
    #[serde(default)]
    pub revision: u64,
}

impl Project {
    pub fn new(id: impl Into<String>, hta: TaskTree) -> Self {
        Project {
            id: id.into(),
            hta,
            assessments: BTreeMap::new(),
            taxonomy_override: None,
            notes: String::new(),
            revision: 0,
        }
    }

    /// Checks the project against its own override, or `fallback`.
    pub fn check(&self, fallback: &Taxonomy) -> Vec<String> {
        let mut problems = Vec::new();
        if !is_slug(&self.id) {
            problems.push(format!("id `{}` is not a slug (lowercase letters, digits, `-`, `_`)", self.id));
        }
        let taxonomy = match &self.taxonomy_override {
            Some(t) => {
                problems.extend(t.validate().into_iter().map(|i| format!("taxonomy_override.{i}")));
                t
            }
            None => fallback,
        };
        problems.extend(validate_hta(&self.hta, taxonomy).issues.into_iter().map(|i| format!("hta {i}")));
        for (name, a) in &self.assessments {
            if let Err(e) = a.check(taxonomy) {
                problems.push(format!("assessment `{name}`: {e}"));
            }
        }
        problems
    }
}

pub fn is_slug(id: &str) -> bool {
    !id.is_empty()
        && id.len() <= 64
        && id.bytes().all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'-' || b == b'_')
        && !id.starts_with(['-', '_'])
}

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("no project `{0}`")]
    Missing(String),
    #[error("project `{id}` is at revision {on_disk}, save was based on revision {base}")]
    Conflict { id: String, on_disk: u64, base: u64 },
    #[error("invalid project: {}", .0.join("; "))]
    Invalid(Vec<String>),
    #[error("project directory {path} is not writable: {source}")]
    Unwritable { path: PathBuf, source: io::Error },
    #[error("project file {path}: {message}")]
    Corrupt { path: PathBuf, message: String },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

#[derive(Debug)]
pub struct ProjectStore {
    dir: PathBuf,
    // serializes read-check-rename within this process
    write_lock: Mutex<()>,
}

impl ProjectStore {
    /// Opens (creating if needed) a project directory and checks it is writable.
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let dir = dir.into();
        let unwritable = |source| StoreError::Unwritable { path: dir.clone(), source };
        fs::create_dir_all(&dir).map_err(unwritable)?;
        tempfile::NamedTempFile::new_in(&dir).map_err(unwritable)?;
        Ok(ProjectStore { dir, write_lock: Mutex::new(()) })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path_of(&self, id: &str) -> PathBuf {
        self.dir.join(format!("{id}.json"))
    }

    pub fn load(&self, id: &str) -> Result<Project, StoreError> {
        if !is_slug(id) {
            return Err(StoreError::Missing(id.to_string()));
        }
        let path = self.path_of(id);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Err(StoreError::Missing(id.to_string())),
            Err(source) => return Err(StoreError::Io { path, source }),
        };
        serde_json::from_str(&text).map_err(|e| StoreError::Corrupt { path, message: e.to_string() })
    }

    /// Saves `project` as revision `project.revision + 1`. Fails with a
    /// conflict when the stored revision is already at or past that.
    pub fn save(&self, project: &Project, fallback: &Taxonomy) -> Result<Project, StoreError> {
        let problems = project.check(fallback);
        if !problems.is_empty() {
            return Err(StoreError::Invalid(problems));
        }
        let _guard = self.write_lock.lock().unwrap_or_else(|p| p.into_inner());
        let on_disk = match self.load(&project.id) {
            Ok(p) => p.revision,
            Err(StoreError::Missing(_)) => 0,
            Err(e) => return Err(e),
        };
        let mut saved = project.clone();
        saved.revision = project.revision + 1;
        if on_disk >= saved.revision {
            return Err(StoreError::Conflict { id: project.id.clone(), on_disk, base: project.revision });
        }
        let path = self.path_of(&project.id);
        let io_err = |source| StoreError::Io { path: path.clone(), source };
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir).map_err(io_err)?;
        let body = serde_json::to_string_pretty(&saved).expect("project serializes");
        tmp.write_all(body.as_bytes()).map_err(io_err)?;
        tmp.write_all(b"\n").map_err(io_err)?;
        tmp.as_file().sync_all().map_err(io_err)?;
        tmp.persist(&path).map_err(|e| io_err(e.error))?;
        Ok(saved)
    }
}
