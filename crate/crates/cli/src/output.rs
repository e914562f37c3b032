//! CSV and JSON emitters shared by every subcommand.

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::Context;
use serde::{Deserialize, Serialize};

/// One emitted file, relative to the output directory.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: String,
    /// Data rows, excluding the header.
    pub rows: usize,
}

/// Round-trip exact decimal with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.16e}")
    }
}

/// Write a numeric CSV and return its manifest entry.
pub fn write_csv(root: &Path, rel: &str, header: &[&str], rows: &[Vec<f64>]) -> anyhow::Result<ManifestEntry> {
    let path = root.join(rel);
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let mut text = String::with_capacity(rows.len() * header.len() * 24);
    text.push_str(&header.join(","));
    text.push_str("\r\n");
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        let cells: Vec<String> = row.iter().map(|&x| fmt_f64(x)).collect();
        text.push_str(&cells.join(","));
        text.push_str("\r\n");
    }
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(ManifestEntry { path: rel.to_string(), rows: rows.len() })
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(root: &Path, rel: &str, value: &T) -> anyhow::Result<()> {
    let path = root.join(rel);
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let mut f = fs::File::create(&path).with_context(|| format!("writing {}", path.display()))?;
    serde_json::to_writer_pretty(&mut f, value)?;
    f.write_all(b"\n")?;
    Ok(())
}
