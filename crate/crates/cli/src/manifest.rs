use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use serde_json::{json, Value};

use greenprop::experiment::MANIFEST_FILE;

/// Writes the manifest header of a non-simulation command into `dir`.
pub fn write(dir: &Path, command: &str, args: Value, seeds: &[u64]) -> anyhow::Result<()> {
    fs::create_dir_all(dir)?;
    let path = dir.join(MANIFEST_FILE);
    if path.exists() {
        anyhow::bail!(greenprop::Error::config(format!("{} already exists", path.display())));
    }
    let mut w = BufWriter::new(File::create(path)?);
    let header = json!({
        "record": "command",
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "args": args,
        "seeds": seeds,
    });
    serde_json::to_writer(&mut w, &header)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// Appends one JSON line to the manifest in `dir`.
pub fn append(dir: &Path, value: &Value) -> anyhow::Result<()> {
    let mut f = fs::OpenOptions::new().append(true).open(dir.join(MANIFEST_FILE))?;
    serde_json::to_writer(&mut f, value)?;
    writeln!(f)?;
    Ok(())
}
