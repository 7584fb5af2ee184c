use std::io::Write;
use std::path::{Path, PathBuf};

use crate::CliError;

/// Directory for report files; reports go to stdout only when unset.
pub const OUTPUT_DIR_ENV: &str = "EURQSI_OUTPUT_DIR";

/// Writes `contents` to `dir/name` through a temporary file in the same directory,
/// so readers never see a partial report.
pub fn write_atomic(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", dir.display()));
    std::fs::create_dir_all(dir).map_err(io)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    let path = dir.join(name);
    tmp.persist(&path).map_err(|e| io(e.error))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn replaces_existing_file() {
        let dir = tempfile::tempdir().unwrap();
        write_atomic(dir.path(), "r.json", "old").unwrap();
        let p = write_atomic(dir.path(), "r.json", "new").unwrap();
        assert_eq!(std::fs::read_to_string(p).unwrap(), "new");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
