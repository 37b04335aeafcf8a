//! Output files are declared up front, rendered in memory and only then
//! written, each through a temporary file renamed into place.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::CliError;

#[derive(Debug, Default)]
pub struct Artifacts {
    declared: Vec<PathBuf>,
    rendered: Vec<(PathBuf, Vec<u8>)>,
}

impl Artifacts {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers an output path. Duplicate paths are a usage error.
    pub fn declare(&mut self, path: &Path) -> Result<(), CliError> {
        if self.declared.iter().any(|p| p == path) {
            return Err(CliError::Usage(format!("{} given for two outputs", path.display())));
        }
        self.declared.push(path.to_path_buf());
        Ok(())
    }

    pub fn set(&mut self, path: &Path, bytes: impl Into<Vec<u8>>) -> Result<(), CliError> {
        if !self.declared.iter().any(|p| p == path) {
            return Err(CliError::Internal(format!("{} was never declared", path.display())));
        }
        self.rendered.push((path.to_path_buf(), bytes.into()));
        Ok(())
    }

    /// Writes every rendered file; on failure removes the ones already placed.
    pub fn commit(self) -> Result<(), CliError> {
        let mut placed: Vec<PathBuf> = Vec::new();
        for (path, bytes) in &self.rendered {
            if let Err(e) = write_atomic(path, bytes) {
                for p in &placed {
                    let _ = fs::remove_file(p);
                }
                return Err(e);
            }
            placed.push(path.clone());
        }
        Ok(())
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Write(format!("{}: {e}", path.display()));
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&dir).map_err(io)?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nothing_written_until_commit() {
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a.json");
        let b = dir.path().join("sub/b.csv");
        let mut art = Artifacts::new();
        art.declare(&a).unwrap();
        art.declare(&b).unwrap();
        assert!(art.declare(&a).is_err());
        art.set(&a, "x").unwrap();
        art.set(&b, "y").unwrap();
        assert!(!a.exists());
        art.commit().unwrap();
        assert_eq!(fs::read_to_string(&a).unwrap(), "x");
        assert_eq!(fs::read_to_string(&b).unwrap(), "y");
    }

    #[test]
    fn failed_commit_rolls_back() {
        let dir = tempfile::tempdir().unwrap();
        let ok = dir.path().join("ok.json");
        // a regular file where a directory is needed
        let blocker = dir.path().join("blocker");
        fs::write(&blocker, "").unwrap();
        let bad = blocker.join("out.csv");
        let mut art = Artifacts::new();
        art.declare(&ok).unwrap();
        art.declare(&bad).unwrap();
        art.set(&ok, "1").unwrap();
        art.set(&bad, "2").unwrap();
        assert!(art.commit().is_err());
        assert!(!ok.exists());
    }
}
