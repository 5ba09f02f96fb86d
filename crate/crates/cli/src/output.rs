//! All-or-nothing output staging: files are written to temporaries beside
//! their targets and renamed into place only once every stage output exists.

use std::io::Write;
use std::path::{Path, PathBuf};

use cospli::{Error, Result};
use tempfile::NamedTempFile;

#[derive(Default)]
pub struct Staged {
    files: Vec<(NamedTempFile, PathBuf)>,
}

impl Staged {
    pub fn new() -> Self {
        Self::default()
    }

    /// A fresh temporary next to `target`, to be renamed on commit.
    pub fn create(&mut self, target: &Path) -> Result<&mut NamedTempFile> {
        let dir = match target.parent() {
            Some(p) if !p.as_os_str().is_empty() => p,
            _ => Path::new("."),
        };
        let tmp = NamedTempFile::new_in(dir)?;
        #[cfg(unix)]
        {
            use std::os::unix::fs::PermissionsExt;
            tmp.as_file().set_permissions(std::fs::Permissions::from_mode(0o644))?;
        }
        self.files.push((tmp, target.to_path_buf()));
        Ok(&mut self.files.last_mut().expect("just pushed").0)
    }

    pub fn write(&mut self, target: &Path, bytes: &[u8]) -> Result<()> {
        self.create(target)?.write_all(bytes)?;
        Ok(())
    }

    /// Renames every staged file into place. If a rename fails, targets
    /// already committed by this call are removed again.
    pub fn commit(self) -> Result<()> {
        let mut done: Vec<PathBuf> = Vec::new();
        for (tmp, target) in self.files {
            if let Err(e) = tmp.as_file().sync_all().map_err(Error::from).and_then(|_| {
                tmp.persist(&target).map(|_| ()).map_err(|e| Error::Io(e.error))
            }) {
                for p in &done {
                    let _ = std::fs::remove_file(p);
                }
                return Err(e);
            }
            done.push(target);
        }
        Ok(())
    }
}

/// `path` with its extension replaced, for companion files.
pub fn companion(path: &Path, ext: &str) -> PathBuf {
    path.with_extension(ext)
}
