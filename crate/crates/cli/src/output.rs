//! Output staging and the state directory lock.

use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{CliError, CliResult};

pub const LOCK_FILE: &str = ".lock";

/// Exclusive ownership of a state directory for one invocation.
#[derive(Debug)]
pub struct Lock {
    path: PathBuf,
}

impl Lock {
    pub fn acquire(dir: &Path) -> CliResult<Self> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        let path = dir.join(LOCK_FILE);
        match OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(mut f) => {
                let _ = writeln!(f, "{}", std::process::id());
                Ok(Lock { path })
            }
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => Err(CliError::Locked { dir: dir.to_path_buf() }),
            Err(e) => Err(CliError::io(&path, e)),
        }
    }
}

impl Drop for Lock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}

/// Files written to a private directory and moved into place on commit.
///
/// Without a commit the private directory is left behind, so a failed run
/// never replaces earlier results.
#[derive(Debug)]
pub struct Staging {
    target: PathBuf,
    tmp: PathBuf,
    files: Vec<String>,
    committed: bool,
}

impl Staging {
    pub fn new(target: &Path) -> CliResult<Self> {
        let tmp = target.join(format!(".partial-{}", std::process::id()));
        if tmp.exists() {
            fs::remove_dir_all(&tmp).map_err(|e| CliError::io(&tmp, e))?;
        }
        fs::create_dir_all(&tmp).map_err(|e| CliError::io(&tmp, e))?;
        Ok(Staging {
            target: target.to_path_buf(),
            tmp,
            files: Vec::new(),
            committed: false,
        })
    }

    /// Path a staged file will have after commit.
    pub fn final_path(&self, name: &str) -> PathBuf {
        self.target.join(name)
    }

    /// Register `name` and return where to write it before commit.
    pub fn staged_path(&mut self, name: &str) -> CliResult<PathBuf> {
        if !self.files.iter().any(|f| f == name) {
            self.files.push(name.to_string());
        }
        Ok(self.tmp.join(name))
    }

    pub fn create(&mut self, name: &str) -> CliResult<File> {
        let path = self.staged_path(name)?;
        File::create(&path).map_err(|e| CliError::io(&path, e))
    }

    pub fn write(&mut self, name: &str, bytes: impl AsRef<[u8]>) -> CliResult<()> {
        let path = self.tmp.join(name);
        let mut f = self.create(name)?;
        f.write_all(bytes.as_ref()).map_err(|e| CliError::io(&path, e))
    }

    pub fn commit(mut self) -> CliResult<Vec<PathBuf>> {
        let mut written = Vec::with_capacity(self.files.len());
        for name in &self.files {
            let from = self.tmp.join(name);
            let to = self.target.join(name);
            fs::rename(&from, &to).map_err(|e| CliError::io(&to, e))?;
            written.push(to);
        }
        fs::remove_dir_all(&self.tmp).map_err(|e| CliError::io(&self.tmp, e))?;
        self.committed = true;
        Ok(written)
    }
}

impl Drop for Staging {
    fn drop(&mut self) {
        if self.committed {
            return;
        }
        if self.files.is_empty() {
            let _ = fs::remove_dir_all(&self.tmp);
        } else {
            eprintln!("partial outputs kept in {}", self.tmp.display());
        }
    }
}
