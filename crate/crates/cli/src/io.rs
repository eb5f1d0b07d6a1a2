//! File helpers.

use std::io::Write;
use std::path::Path;

use depbase::conllu::{parse_conllu_named, Treebank};

use crate::CliError;

/// Write `contents` to `path` through a temporary file in the same
/// directory, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let io = |e| CliError::Io(path.to_path_buf(), e);
    let dir = path
        .parent()
        .filter(|d| !d.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(io)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

pub fn read_treebank(path: &Path) -> Result<Treebank, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
    parse_conllu_named(&text, &path.display().to_string()).map_err(|e| CliError::Treebank(path.to_path_buf(), e))
}

/// File-name-safe form of a system or model name.
pub fn slug(name: &str) -> String {
    name.chars()
        .map(|c| match c {
            '*' => "star".to_string(),
            c if c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.' => c.to_string(),
            _ => "-".to_string(),
        })
        .collect()
}
