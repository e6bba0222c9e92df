use std::io::Write;
use std::path::Path;

use crate::error::ShapeError;

fn parent_of(path: &Path) -> &Path {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    }
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so readers never observe a partial file.
pub(crate) fn write_atomic(path: impl AsRef<Path>, bytes: &[u8]) -> Result<(), ShapeError> {
    let path = path.as_ref();
    let mut tmp = tempfile::NamedTempFile::new_in(parent_of(path)).map_err(|e| ShapeError::io(path, e))?;
    tmp.write_all(bytes).map_err(|e| ShapeError::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| ShapeError::io(path, e))?;
    tmp.persist(path).map_err(|e| ShapeError::io(path, e.error))?;
    Ok(())
}

/// Materializes `files` in a temporary sibling directory and renames it to
/// `dir`. An existing `dir` must be empty.
pub(crate) fn write_dir_atomic(dir: impl AsRef<Path>, files: &[(String, Vec<u8>)]) -> Result<(), ShapeError> {
    let dir = dir.as_ref();
    if dir.exists() {
        let mut entries = std::fs::read_dir(dir).map_err(|e| ShapeError::io(dir, e))?;
        if entries.next().is_some() {
            return Err(ShapeError::invalid(format!(
                "output directory {} is not empty",
                dir.display()
            )));
        }
        std::fs::remove_dir(dir).map_err(|e| ShapeError::io(dir, e))?;
    }
    let tmp = tempfile::Builder::new()
        .prefix(".shapevec-")
        .tempdir_in(parent_of(dir))
        .map_err(|e| ShapeError::io(dir, e))?;
    for (name, bytes) in files {
        let p = tmp.path().join(name);
        std::fs::write(&p, bytes).map_err(|e| ShapeError::io(&p, e))?;
    }
    let staged = tmp.keep();
    std::fs::rename(&staged, dir).map_err(|e| {
        let _ = std::fs::remove_dir_all(&staged);
        ShapeError::io(dir, e)
    })
}

/// Shape id made safe for use as a file name.
pub(crate) fn file_stem(id: &str) -> String {
    id.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.') {
                c
            } else {
                '_'
            }
        })
        .collect()
}
