//! Output plumbing: the leading parameter echo, round-trip-safe float
//! formatting, and single-shot delivery to stdout or a file.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use crate::cmd::CliError;

/// `# key = value` comment lines, sorted by key. Stripping the `# ` prefix
/// yields a config file that reproduces the run.
pub fn echo_block(echo: &BTreeMap<String, String>) -> String {
    let mut out = String::new();
    for (key, value) in echo {
        out.push_str(&format!("# {key} = {value}\n"));
    }
    out
}

/// 17 significant digits: parses back to the identical double.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes the whole artifact in one shot — no concurrent or partial writes.
pub fn deliver(target: Option<&Path>, text: &str) -> Result<(), CliError> {
    match target {
        Some(path) => std::fs::write(path, text)?,
        None => {
            let stdout = std::io::stdout();
            stdout.lock().write_all(text.as_bytes())?;
        }
    }
    Ok(())
}
