//! Artifact writers and the register save/load round trip.
//!
//! All files are plain UTF-8. CSVs start with '#' metadata lines (tool
//! version, scenario, full parameter echo) followed by a header row. Floats
//! are written in shortest round-trip form so a rerun with the same config
//! and version is bit-identical; no wall-clock data is embedded.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{LatticeLayout, SimState};

/// Shortest exact decimal form; round-trips through parse.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

/// A CSV file under construction.
pub struct CsvWriter {
    buf: String,
    columns: usize,
}

impl CsvWriter {
    pub fn new(scenario: &str, params_json: &str, header: &[&str]) -> CsvWriter {
        let mut buf = String::new();
        let _ = writeln!(buf, "# tool: qmm {}", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(buf, "# scenario: {scenario}");
        let _ = writeln!(buf, "# params: {params_json}");
        let _ = writeln!(buf, "{}", header.join(","));
        CsvWriter {
            buf,
            columns: header.len(),
        }
    }

    pub fn comment(&mut self, line: &str) {
        debug_assert!(!line.contains('\n'));
        let _ = writeln!(self.buf, "# {line}");
    }

    pub fn row(&mut self, fields: &[String]) {
        debug_assert_eq!(fields.len(), self.columns);
        let _ = writeln!(self.buf, "{}", fields.join(","));
    }

    pub fn row_f64(&mut self, fields: &[f64]) {
        let rendered: Vec<String> = fields.iter().map(|&x| fmt_f64(x)).collect();
        self.row(&rendered);
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_text(path, &self.buf)
    }
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Pretty JSON with trailing newline. Non-finite floats serialize as null.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Parse(path.display().to_string(), e.to_string()))?;
    text.push('\n');
    write_text(path, &text)
}

/// Compact single-line JSON used for the parameter echo in CSV headers.
pub fn params_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("parameter echo serializes")
}

/// Writes the qubit register of the active span, one row per site.
pub fn save_register(
    path: &Path,
    state: &SimState,
    layout: &LatticeLayout,
    scenario: &str,
    params_json: &str,
) -> Result<()> {
    let mut csv = CsvWriter::new(scenario, params_json, &["site", "re_c0", "im_c0", "re_c1", "im_c1"]);
    csv.comment(&format!("saved_at_t: {}", fmt_f64(state.t)));
    for i in layout.active_start..layout.active_end {
        let j = i - layout.active_start;
        let (c0, c1) = (state.c0[j], state.c1[j]);
        csv.row(&[
            i.to_string(),
            fmt_f64(c0.re),
            fmt_f64(c0.im),
            fmt_f64(c1.re),
            fmt_f64(c1.im),
        ]);
    }
    csv.write(path)
}

const REGISTER_NORM_TOL: f64 = 1e-6;

/// Loads a register saved by [`save_register`] into a fresh state.
///
/// The file must cover exactly the active span of `layout`, in order. The
/// field starts at rest and the clock at zero; per-site norms are checked.
pub fn load_register(path: &Path, layout: &LatticeLayout) -> Result<SimState> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let name = path.display().to_string();
    let mut state = SimState::new(layout);
    let mut expected = layout.active_start;
    let mut saw_header = false;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !saw_header {
            // Header row; tolerate arbitrary column names but not data.
            if line.split(',').next().is_some_and(|c| c.parse::<usize>().is_err()) {
                saw_header = true;
                continue;
            }
            saw_header = true;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(Error::Parse(
                name,
                format!("line {}: expected 5 fields, got {}", lineno + 1, fields.len()),
            ));
        }
        let site: usize = fields[0].parse().map_err(|_| {
            Error::Parse(name.clone(), format!("line {}: bad site index", lineno + 1))
        })?;
        if site != expected {
            return Err(Error::Parse(
                name,
                format!("line {}: expected site {expected}, got {site}", lineno + 1),
            ));
        }
        let mut vals = [0.0f64; 4];
        for (k, f) in fields[1..].iter().enumerate() {
            vals[k] = f.parse().map_err(|_| {
                Error::Parse(name.clone(), format!("line {}: bad float '{f}'", lineno + 1))
            })?;
        }
        let c0 = C64::new(vals[0], vals[1]);
        let c1 = C64::new(vals[2], vals[3]);
        let norm = c0.norm_sqr() + c1.norm_sqr();
        if (norm - 1.0).abs() > REGISTER_NORM_TOL {
            return Err(Error::NormViolation(format!(
                "{name}: site {site} norm {norm} deviates beyond {REGISTER_NORM_TOL}"
            )));
        }
        let j = site - layout.active_start;
        state.c0[j] = c0;
        state.c1[j] = c1;
        expected += 1;
    }
    if expected != layout.active_end {
        return Err(Error::Parse(
            name,
            format!(
                "register covers sites {}..{expected}, layout needs {}..{}",
                layout.active_start, layout.active_start, layout.active_end
            ),
        ));
    }
    Ok(state)
}

/// Joins an output directory with a file name.
pub fn out_path(dir: &Path, file: &str) -> PathBuf {
    dir.join(file)
}
