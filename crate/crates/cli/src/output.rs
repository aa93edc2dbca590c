//! Staged output: files are written into a hidden directory next to the
//! target and renamed into place only once every artifact is complete.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use tempfile::TempDir;

use crate::error::{io_error, CliError};

pub struct Staging {
    dir: TempDir,
    target: PathBuf,
    files: Vec<String>,
}

impl Staging {
    pub fn new(target: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(target).map_err(|e| io_error(format!("cannot create {}", target.display()), e))?;
        let dir = tempfile::Builder::new()
            .prefix(".qlt-staging-")
            .tempdir_in(target)
            .map_err(|e| io_error("cannot create staging directory", e))?;
        Ok(Self { dir, target: target.to_path_buf(), files: Vec::new() })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        fs::write(self.dir.path().join(name), contents).map_err(|e| io_error(format!("cannot write {name}"), e))?;
        self.files.push(name.to_string());
        Ok(())
    }

    pub fn write_json(&mut self, name: &str, value: &impl Serialize) -> Result<(), CliError> {
        let text = json_sorted(value)?;
        self.write(name, &text)
    }

    /// Moves every staged file into the target directory. If a rename fails
    /// the files already moved are removed again.
    pub fn commit(self) -> Result<Vec<PathBuf>, CliError> {
        let mut done = Vec::new();
        for name in &self.files {
            let dest = self.target.join(name);
            if let Err(e) = fs::rename(self.dir.path().join(name), &dest) {
                for path in &done {
                    let _ = fs::remove_file(path);
                }
                return Err(io_error(format!("cannot move {name} into place"), e));
            }
            done.push(dest);
        }
        Ok(done)
    }
}

/// Pretty JSON with object keys in sorted order.
pub fn json_sorted(value: &impl Serialize) -> Result<String, CliError> {
    let value = serde_json::to_value(value).map_err(|e| io_error("cannot serialize report", e))?;
    let mut text = serde_json::to_string_pretty(&value).map_err(|e| io_error("cannot serialize report", e))?;
    text.push('\n');
    Ok(text)
}

/// CSV text from a header and rows of already formatted cells.
pub fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn cell(v: f64) -> String {
    let mut s = String::new();
    write!(s, "{v:e}").unwrap();
    s
}

pub fn opt_cell(v: Option<f64>) -> String {
    v.map(cell).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn commit_moves_files_and_drops_staging() {
        let root = tempfile::tempdir().unwrap();
        let mut s = Staging::new(root.path()).unwrap();
        s.write("a.csv", "x\n1\n").unwrap();
        s.commit().unwrap();
        let names: Vec<_> = fs::read_dir(root.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
        assert_eq!(names, vec![std::ffi::OsString::from("a.csv")]);
    }

    #[test]
    fn dropped_staging_leaves_nothing() {
        let root = tempfile::tempdir().unwrap();
        let mut s = Staging::new(root.path()).unwrap();
        s.write("a.csv", "x\n").unwrap();
        drop(s);
        assert_eq!(fs::read_dir(root.path()).unwrap().count(), 0);
    }

    #[test]
    fn json_keys_are_sorted() {
        #[derive(Serialize)]
        struct R {
            zeta: u8,
            alpha: u8,
        }
        let text = json_sorted(&R { zeta: 1, alpha: 2 }).unwrap();
        assert!(text.find("alpha").unwrap() < text.find("zeta").unwrap());
    }

    #[test]
    fn cells_round_trip() {
        for v in [0.0, 1.0 / 3.0, -2.5e-17, 1e300] {
            assert_eq!(cell(v).parse::<f64>().unwrap(), v);
        }
    }
}
