//! On-disk layout:
//!
//! ```text
//! <data dir>/datasets/<id>.csv    uploaded text, verbatim
//! <data dir>/datasets/<id>.json   import options
//! <data dir>/sessions/<id>.json   session documents
//! ```
//!
//! Every file is written to a temporary sibling and renamed into place.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use itmap_core::document::SessionDocument;
use itmap_core::{AttrKind, Session, Workbench};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub id: String,
    pub name: String,
    pub kind: AttrKind,
    pub label_column: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct Store {
    root: PathBuf,
}

impl Store {
    pub fn open(root: impl Into<PathBuf>) -> io::Result<Self> {
        let root = root.into();
        fs::create_dir_all(root.join("datasets"))?;
        fs::create_dir_all(root.join("sessions"))?;
        Ok(Self { root })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn dataset_path(&self, id: &str, ext: &str) -> PathBuf {
        self.root.join("datasets").join(format!("{id}.{ext}"))
    }

    fn session_path(&self, id: u64) -> PathBuf {
        self.root.join("sessions").join(format!("{id}.json"))
    }

    pub fn save_dataset(&self, meta: &DatasetMeta, text: &str) -> io::Result<()> {
        write_atomic(&self.dataset_path(&meta.id, "csv"), text.as_bytes())?;
        let json = serde_json::to_vec_pretty(meta).map_err(io::Error::other)?;
        write_atomic(&self.dataset_path(&meta.id, "json"), &json)
    }

    pub fn save_session(&self, session: &Session) -> io::Result<()> {
        write_atomic(
            &self.session_path(session.id()),
            &session.to_document().to_bytes(),
        )
    }

    pub fn remove_session(&self, id: u64) -> io::Result<()> {
        match fs::remove_file(self.session_path(id)) {
            Err(e) if e.kind() != io::ErrorKind::NotFound => Err(e),
            _ => Ok(()),
        }
    }

    /// Rebuild a workbench from everything on disk.
    pub fn load(&self) -> io::Result<Workbench> {
        let mut wb = Workbench::new();
        for path in sorted_entries(&self.root.join("datasets"), "json")? {
            let meta: DatasetMeta =
                serde_json::from_slice(&fs::read(&path)?).map_err(io::Error::other)?;
            let text = fs::read_to_string(self.dataset_path(&meta.id, "csv"))?;
            let id = wb
                .import_csv(&text, meta.kind, meta.label_column, &meta.name)
                .map_err(io::Error::other)?;
            if id != meta.id {
                return Err(io::Error::other(format!(
                    "dataset {} does not match its content id {id}",
                    meta.id
                )));
            }
        }
        for path in sorted_entries(&self.root.join("sessions"), "json")? {
            let doc = SessionDocument::from_slice(&fs::read(&path)?)
                .map_err(|e| io::Error::other(format!("{}: {e}", path.display())))?;
            let session = Session::from_document(&doc)
                .map_err(|e| io::Error::other(format!("{}: {e}", path.display())))?;
            wb.insert_session(session);
        }
        Ok(wb)
    }
}

fn sorted_entries(dir: &Path, ext: &str) -> io::Result<Vec<PathBuf>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)?
        .map(|entry| entry.map(|e| e.path()))
        .collect::<io::Result<_>>()?;
    paths.retain(|p| p.extension().is_some_and(|e| e == ext));
    paths.sort();
    Ok(paths)
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let name = path
        .file_name()
        .ok_or_else(|| io::Error::other("path has no file name"))?
        .to_string_lossy();
    let tmp = path.with_file_name(format!(".{name}.tmp"));
    let mut file = fs::File::create(&tmp)?;
    file.write_all(bytes)?;
    file.sync_all()?;
    drop(file);
    fs::rename(&tmp, path)
}
