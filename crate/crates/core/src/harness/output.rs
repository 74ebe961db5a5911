//! Atomic file output with metadata headers.

use std::io::Write;
use std::path::Path;

use crate::error::Result;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Writes `contents` to `path` via a temporary file in the same directory and a rename,
/// so readers never observe a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// `#`-prefixed metadata lines followed by the CSV body.
pub fn csv_with_header(body: &str, config_hash: &str, seed: u64) -> String {
    format!("# pppconc {VERSION}\n# config_sha256 {config_hash}\n# seed {seed}\n{body}")
}

/// The CSV without its `#` metadata lines.
pub fn csv_body(text: &str) -> String {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect()
}
