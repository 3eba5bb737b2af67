//! CSV ingest and emit. Data files use shortest round-trip float text so
//! ingest -> emit -> ingest is the identity.

use std::path::{Path, PathBuf};

use nitrq_core::dynamics::{ChevronGrid, TimeTrace};
use nitrq_core::junction::{IVTrace, SweepDirection};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Series resistance of the bias line in source-voltage mode.
pub const DEFAULT_SERIES_OHM: f64 = 2e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum BiasMode {
    /// `bias_a` column holds the bias current.
    #[default]
    Current,
    /// `source_v` column holds the source voltage across the series resistor.
    SourceVoltage,
}

/// Shortest text that parses back to the same f64.
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub struct Table {
    pub path: PathBuf,
    pub headers: Vec<String>,
    /// (1-based line number, fields)
    pub rows: Vec<(u64, Vec<String>)>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.headers.iter().position(|h| h == name)
    }

    fn err(&self, line: u64, msg: impl std::fmt::Display) -> CliError {
        CliError::input(format!("{}:{line}: {msg}", self.path.display()))
    }

    pub fn f64_at(&self, row: &(u64, Vec<String>), col: usize) -> CliResult<f64> {
        let raw = row.1[col].trim();
        let v: f64 = raw
            .parse()
            .map_err(|_| self.err(row.0, format!("column {}: cannot parse {raw:?} as a number", self.headers[col])))?;
        if !v.is_finite() {
            return Err(self.err(row.0, format!("column {}: non-finite value", self.headers[col])));
        }
        Ok(v)
    }

    pub fn f64_column(&self, name: &str) -> CliResult<Vec<f64>> {
        let c = self.require(&[name])?[0];
        self.rows.iter().map(|r| self.f64_at(r, c)).collect()
    }

    /// Indices of the named columns, or an error naming all missing ones.
    pub fn require(&self, names: &[&str]) -> CliResult<Vec<usize>> {
        let missing: Vec<&str> = names.iter().copied().filter(|n| self.column(n).is_none()).collect();
        if !missing.is_empty() {
            return Err(CliError::input(format!(
                "{}: missing column(s) {} (found: {})",
                self.path.display(),
                missing.join(", "),
                self.headers.join(",")
            )));
        }
        Ok(names.iter().map(|n| self.column(n).unwrap()).collect())
    }

    /// Rejects columns outside `allowed`.
    pub fn only(&self, allowed: &[&str]) -> CliResult<()> {
        let extra: Vec<&str> = self
            .headers
            .iter()
            .map(String::as_str)
            .filter(|h| !allowed.contains(h))
            .collect();
        if extra.is_empty() {
            Ok(())
        } else {
            Err(CliError::input(format!(
                "{}: unexpected column(s) {} (expected {})",
                self.path.display(),
                extra.join(", "),
                allowed.join(",")
            )))
        }
    }
}

pub fn read_table(path: &Path) -> CliResult<Table> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::input(format!("cannot open {}: {e}", path.display())))?;
    let headers = rdr
        .headers()
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?
        .iter()
        .map(|h| h.to_string())
        .collect();
    let mut rows = vec![];
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            CliError::input(format!("{}:{line}: malformed row: {e}", path.display()))
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        rows.push((line, rec.iter().map(|s| s.to_string()).collect()));
    }
    if rows.is_empty() {
        return Err(CliError::input(format!("{}: no data rows", path.display())));
    }
    Ok(Table {
        path: path.to_path_buf(),
        headers,
        rows,
    })
}

fn writer(path: &Path) -> CliResult<csv::Writer<std::fs::File>> {
    csv::Writer::from_path(path).map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))
}

fn finish(mut w: csv::Writer<std::fs::File>, path: &Path) -> CliResult<()> {
    w.flush()
        .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))
}

fn put(w: &mut csv::Writer<std::fs::File>, fields: &[String], path: &Path) -> CliResult<()> {
    w.write_record(fields)
        .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))
}

/// Writes rows of numbers under the given header.
pub fn write_columns(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> CliResult<()> {
    let mut w = writer(path)?;
    put(&mut w, &header.iter().map(|s| s.to_string()).collect::<Vec<_>>(), path)?;
    for r in rows {
        put(&mut w, &r.into_iter().map(fmt_f64).collect::<Vec<_>>(), path)?;
    }
    finish(w, path)
}

/// Writes pre-formatted text rows.
pub fn write_text_rows(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> CliResult<()> {
    let mut w = writer(path)?;
    put(&mut w, &header.iter().map(|s| s.to_string()).collect::<Vec<_>>(), path)?;
    for r in rows {
        put(&mut w, &r, path)?;
    }
    finish(w, path)
}

/// Forward and reverse sweeps from one IV file, split by the `direction` column.
pub fn read_iv_csv(path: &Path, mode: BiasMode, series_ohm: f64) -> CliResult<(IVTrace, IVTrace)> {
    let t = read_table(path)?;
    let bias_col = match mode {
        BiasMode::Current => "bias_a",
        BiasMode::SourceVoltage => "source_v",
    };
    t.only(&[bias_col, "voltage_v", "direction"])?;
    let cols = t.require(&[bias_col, "voltage_v", "direction"])?;
    if !(series_ohm.is_finite() && series_ohm > 0.0) {
        return Err(CliError::input("series resistance must be > 0"));
    }
    let (mut fwd, mut rev) = ((vec![], vec![]), (vec![], vec![]));
    for row in &t.rows {
        let raw = t.f64_at(row, cols[0])?;
        let bias = match mode {
            BiasMode::Current => raw,
            BiasMode::SourceVoltage => raw / series_ohm,
        };
        let v = t.f64_at(row, cols[1])?;
        let target = match row.1[cols[2]].as_str() {
            "fwd" => &mut fwd,
            "rev" => &mut rev,
            other => return Err(t.err(row.0, format!("direction must be fwd or rev, got {other:?}"))),
        };
        target.0.push(bias);
        target.1.push(v);
    }
    let build = |(b, v): (Vec<f64>, Vec<f64>), d: SweepDirection| {
        IVTrace::new(b, v, d).map_err(|e| CliError::input(format!("{}: {} sweep: {e}", path.display(), d.tag())))
    };
    Ok((build(fwd, SweepDirection::Forward)?, build(rev, SweepDirection::Reverse)?))
}

pub fn write_iv_csv(path: &Path, traces: &[&IVTrace], mode: BiasMode, series_ohm: f64) -> CliResult<()> {
    let bias_col = match mode {
        BiasMode::Current => "bias_a",
        BiasMode::SourceVoltage => "source_v",
    };
    let rows = traces.iter().flat_map(|tr| {
        tr.bias_a.iter().zip(&tr.voltage_v).map(move |(&i, &v)| {
            let b = match mode {
                BiasMode::Current => i,
                BiasMode::SourceVoltage => i * series_ohm,
            };
            vec![fmt_f64(b), fmt_f64(v), tr.direction.tag().to_string()]
        })
    });
    write_text_rows(path, &[bias_col, "voltage_v", "direction"], rows)
}

pub fn read_trace(path: &Path) -> CliResult<TimeTrace> {
    let t = read_table(path)?;
    t.only(&["t_s", "y"])?;
    t.require(&["t_s", "y"])?;
    TimeTrace::new(t.f64_column("t_s")?, t.f64_column("y")?)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

pub fn write_trace(path: &Path, trace: &TimeTrace) -> CliResult<()> {
    write_columns(path, &["t_s", "y"], trace.t_s.iter().zip(&trace.y).map(|(t, y)| vec![*t, *y]))
}

pub fn is_chevron(path: &Path) -> CliResult<bool> {
    let t = read_table(path)?;
    Ok(t.column("detuning_mhz").is_some())
}

/// Long-format chevron; rows may come in any order but must fill a full grid.
pub fn read_chevron(path: &Path) -> CliResult<ChevronGrid> {
    let t = read_table(path)?;
    t.only(&["detuning_mhz", "duration_ns", "pe"])?;
    t.require(&["detuning_mhz", "duration_ns", "pe"])?;
    let d = t.f64_column("detuning_mhz")?;
    let tau = t.f64_column("duration_ns")?;
    let pe = t.f64_column("pe")?;
    let uniq = |v: &[f64]| {
        let mut u = v.to_vec();
        u.sort_by(f64::total_cmp);
        u.dedup();
        u
    };
    let (ds, ts) = (uniq(&d), uniq(&tau));
    if ds.len() * ts.len() != pe.len() {
        return Err(CliError::input(format!(
            "{}: {} rows do not form a {}x{} detuning/duration grid",
            path.display(),
            pe.len(),
            ds.len(),
            ts.len()
        )));
    }
    let mut grid = vec![vec![f64::NAN; ts.len()]; ds.len()];
    for i in 0..pe.len() {
        let a = ds.binary_search_by(|x| x.total_cmp(&d[i])).unwrap();
        let b = ts.binary_search_by(|x| x.total_cmp(&tau[i])).unwrap();
        if !grid[a][b].is_nan() {
            return Err(t.err(t.rows[i].0, "duplicate grid point"));
        }
        grid[a][b] = pe[i];
    }
    Ok(ChevronGrid {
        detunings_mhz: ds,
        durations_ns: ts,
        pe: grid,
    })
}

pub fn write_chevron(path: &Path, g: &ChevronGrid) -> CliResult<()> {
    let rows = g.detunings_mhz.iter().enumerate().flat_map(|(i, &d)| {
        g.durations_ns
            .iter()
            .zip(&g.pe[i])
            .map(move |(&t, &p)| vec![d, t, p])
    });
    write_columns(path, &["detuning_mhz", "duration_ns", "pe"], rows)
}

/// One junction of a wafer batch; `csv_path` is relative to the batch file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaferEntry {
    pub junction_id: String,
    pub diameter_um: f64,
    pub csv_path: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cycles: Option<u32>,
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_text_round_trips() {
        for x in [0.0, 1.0, -2.5e-9, 4.3e-3, 1e-4, 9.99e-5, 123456789.0, 1e300, 3.0e-6, 0.1 + 0.2] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_f64(3e-6), "3e-6");
        assert_eq!(fmt_f64(0.25), "0.25");
    }

    fn iv_file(header: &str, n: usize) -> tempfile::NamedTempFile {
        use std::io::Write;
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "{header}").unwrap();
        for (dir, sign) in [("fwd", 1.0), ("rev", -1.0)] {
            for k in 0..n {
                let x = sign * (-2.0 + 4.0 * k as f64 / (n - 1) as f64);
                writeln!(f, "{},{},{dir}", fmt_f64(x), fmt_f64(x * 1e-3)).unwrap();
            }
        }
        f
    }

    #[test]
    fn source_voltage_converts_through_series_resistor() {
        let f = iv_file("source_v,voltage_v,direction", 64);
        let (fwd, rev) = read_iv_csv(f.path(), BiasMode::SourceVoltage, DEFAULT_SERIES_OHM).unwrap();
        assert_eq!(*fwd.bias_a.last().unwrap(), 1e-6);
        assert_eq!(rev.bias_a[0], 1e-6);
        assert_eq!(fwd.bias_a[0], -1e-6);
    }

    #[test]
    fn missing_column_is_named() {
        let f = iv_file("bias_a,volts,direction", 64);
        let msg = read_iv_csv(f.path(), BiasMode::Current, DEFAULT_SERIES_OHM).unwrap_err().to_string();
        assert!(msg.contains("voltage_v"), "{msg}");
    }

    #[test]
    fn bad_direction_reports_line() {
        let f = iv_file("bias_a,voltage_v,direction", 64);
        let text = std::fs::read_to_string(f.path()).unwrap().replacen("fwd", "up", 1);
        std::fs::write(f.path(), text).unwrap();
        let msg = read_iv_csv(f.path(), BiasMode::Current, DEFAULT_SERIES_OHM).unwrap_err().to_string();
        assert!(msg.contains(":2:"), "{msg}");
    }
}
