//! Tabular action values over the 49 transition states, with the per-state
//! update counts and soft-max temperatures the learner anneals.
//!
//! On disk a table is a CSV matrix: a header row `state,a0,...,a9` followed by
//! one row per state in index order (`s00` .. `s66`). Counts and temperatures
//! live in a sidecar CSV with header `state,n,T`. Values are written with the
//! shortest representation that parses back to the same `f64`, so a table
//! survives a write/read cycle bit for bit.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::domain::{Action, TransitionState};
use crate::error::{Error, Result};

const ROWS: usize = TransitionState::COUNT;
const COLS: usize = Action::COUNT;

#[derive(Debug, Clone, PartialEq)]
pub struct QTable {
    values: Vec<f64>,
    visits: Vec<u64>,
    temperatures: Vec<f64>,
}

impl Default for QTable {
    fn default() -> Self {
        Self::zeros()
    }
}

impl QTable {
    /// All values 0, all counts 0, all temperatures 1.
    pub fn zeros() -> Self {
        Self {
            values: vec![0.0; ROWS * COLS],
            visits: vec![0; ROWS],
            temperatures: vec![1.0; ROWS],
        }
    }

    pub fn get(&self, s: TransitionState, a: Action) -> f64 {
        self.values[s.index() * COLS + a.index()]
    }

    pub fn set(&mut self, s: TransitionState, a: Action, value: f64) {
        self.values[s.index() * COLS + a.index()] = value;
    }

    pub fn row(&self, s: TransitionState) -> &[f64] {
        let start = s.index() * COLS;
        &self.values[start..start + COLS]
    }

    /// `max_a Q(s, a)`.
    pub fn max_value(&self, s: TransitionState) -> f64 {
        self.row(s)
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Highest-valued action; ties go to the lowest index.
    pub fn greedy_action(&self, s: TransitionState) -> Action {
        let row = self.row(s);
        let mut best = 0;
        for (i, &v) in row.iter().enumerate().skip(1) {
            if v > row[best] {
                best = i;
            }
        }
        Action::from_index(best).expect("row has ten entries")
    }

    pub fn visits(&self, s: TransitionState) -> u64 {
        self.visits[s.index()]
    }

    pub fn temperature(&self, s: TransitionState) -> f64 {
        self.temperatures[s.index()]
    }

    pub(crate) fn set_stats(&mut self, s: TransitionState, visits: u64, temperature: f64) {
        self.visits[s.index()] = visits;
        self.temperatures[s.index()] = temperature;
    }

    /// Number of cells with a nonzero value.
    pub fn nonzero_count(&self) -> usize {
        self.values.iter().filter(|v| **v != 0.0).count()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Smallest and largest value in the table.
    pub fn value_range(&self) -> (f64, f64) {
        self.values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }

    pub fn write_values_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["state".to_string()];
        header.extend(Action::ALL.iter().map(|a| a.symbol()));
        w.write_record(&header).map_err(csv_err)?;
        for s in TransitionState::all() {
            let mut record = vec![s.symbol()];
            record.extend(self.row(s).iter().map(|v| v.to_string()));
            w.write_record(&record).map_err(csv_err)?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }

    pub fn write_stats_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["state", "n", "T"]).map_err(csv_err)?;
        for s in TransitionState::all() {
            w.write_record([
                s.symbol(),
                self.visits(s).to_string(),
                self.temperature(s).to_string(),
            ])
            .map_err(csv_err)?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }

    /// Reads a value matrix; counts and temperatures are reset to their
    /// initial values.
    pub fn read_values_csv<R: Read>(input: R, origin: &Path) -> Result<Self> {
        let mut table = Self::zeros();
        let mut r = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(input);
        let header = r
            .headers()
            .map_err(|e| format_err(origin, 1, e.to_string()))?
            .clone();
        let expected: Vec<String> = std::iter::once("state".to_string())
            .chain(Action::ALL.iter().map(|a| a.symbol()))
            .collect();
        if header.iter().ne(expected.iter().map(String::as_str)) {
            return Err(format_err(
                origin,
                1,
                format!("expected header {}", expected.join(",")),
            ));
        }
        let mut seen = 0;
        for (i, record) in r.records().enumerate() {
            let line = i + 2;
            let record = record.map_err(|e| format_err(origin, line, e.to_string()))?;
            let expected_state = TransitionState::from_index(i)
                .ok_or_else(|| format_err(origin, line, "more than 49 state rows".into()))?;
            let state: TransitionState = record[0]
                .parse()
                .map_err(|e: Error| format_err(origin, line, e.to_string()))?;
            if state != expected_state {
                return Err(format_err(
                    origin,
                    line,
                    format!("expected row {expected_state}, found {state}"),
                ));
            }
            for a in Action::ALL {
                let cell = &record[a.index() + 1];
                let v: f64 = cell
                    .parse()
                    .map_err(|_| format_err(origin, line, format!("bad value {cell:?} for {a}")))?;
                if !v.is_finite() {
                    return Err(format_err(
                        origin,
                        line,
                        format!("non-finite value for {a}"),
                    ));
                }
                table.set(state, a, v);
            }
            seen += 1;
        }
        if seen != ROWS {
            return Err(format_err(
                origin,
                seen + 1,
                format!("expected 49 state rows, found {seen}"),
            ));
        }
        Ok(table)
    }

    /// Overwrites counts and temperatures from a sidecar table.
    pub fn read_stats_csv<R: Read>(&mut self, input: R, origin: &Path) -> Result<()> {
        let mut r = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(input);
        let header = r
            .headers()
            .map_err(|e| format_err(origin, 1, e.to_string()))?
            .clone();
        if header.iter().ne(["state", "n", "T"]) {
            return Err(format_err(origin, 1, "expected header state,n,T".into()));
        }
        let mut seen = [false; ROWS];
        for (i, record) in r.records().enumerate() {
            let line = i + 2;
            let record = record.map_err(|e| format_err(origin, line, e.to_string()))?;
            let state: TransitionState = record[0]
                .parse()
                .map_err(|e: Error| format_err(origin, line, e.to_string()))?;
            let n: u64 = record[1]
                .parse()
                .map_err(|_| format_err(origin, line, format!("bad count {:?}", &record[1])))?;
            let t: f64 = record[2].parse().map_err(|_| {
                format_err(origin, line, format!("bad temperature {:?}", &record[2]))
            })?;
            if !(t > 0.0 && t <= 1.0) {
                return Err(format_err(
                    origin,
                    line,
                    format!("temperature {t} outside (0,1]"),
                ));
            }
            self.set_stats(state, n, t);
            seen[state.index()] = true;
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            let s = TransitionState::from_index(missing).expect("index in range");
            return Err(format_err(origin, 0, format!("missing row for {s}")));
        }
        Ok(())
    }

    /// Writes `path` and, next to it, the `<stem>_stats.csv` sidecar.
    pub fn save(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_values_csv(file)?;
        let stats = stats_path(path);
        let file = File::create(&stats).map_err(|e| Error::io(&stats, e))?;
        self.write_stats_csv(file)
    }

    /// Loads a value matrix and, when present, its sidecar.
    pub fn load(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut table = Self::read_values_csv(file, path)?;
        let stats = stats_path(path);
        if stats.exists() {
            let file = File::open(&stats).map_err(|e| Error::io(&stats, e))?;
            table.read_stats_csv(file, &stats)?;
        }
        Ok(table)
    }
}

/// `q_after.csv` -> `q_after_stats.csv`.
pub fn stats_path(path: &Path) -> std::path::PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("q");
    path.with_file_name(format!("{stem}_stats.csv"))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

fn format_err(path: &Path, line: usize, message: String) -> Error {
    Error::Format {
        path: path.to_path_buf(),
        line,
        message,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(i: usize, j: usize) -> TransitionState {
        TransitionState::from_codes(i, j).unwrap()
    }

    #[test]
    fn greedy_tie_breaks_low() {
        let mut q = QTable::zeros();
        assert_eq!(q.greedy_action(s(0, 0)), Action::Wait);
        q.set(s(0, 0), Action::Blink, 2.0);
        q.set(s(0, 0), Action::Goodbye, 2.0);
        assert_eq!(q.greedy_action(s(0, 0)), Action::Blink);
        assert_eq!(q.max_value(s(0, 0)), 2.0);
    }

    #[test]
    fn csv_layout() {
        let mut q = QTable::zeros();
        q.set(s(0, 1), Action::Greet, 1.0);
        q.set(s(6, 6), Action::Goodbye, -0.25);
        let mut buf = Vec::new();
        q.write_values_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 50);
        assert_eq!(lines[0], "state,a0,a1,a2,a3,a4,a5,a6,a7,a8,a9");
        assert_eq!(lines[2], "s01,0,1,0,0,0,0,0,0,0,0");
        assert_eq!(lines[49], "s66,0,0,0,0,0,0,0,0,0,-0.25");
    }

    #[test]
    fn round_trip_with_stats() {
        let mut q = QTable::zeros();
        q.set(s(2, 3), Action::SmallTalk, 0.1 + 0.2);
        q.set(s(5, 5), Action::ExplainService, -1.0 / 3.0);
        q.set_stats(s(2, 3), 17, 0.98f64.powi(17));
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("q.csv");
        q.save(&path).unwrap();
        assert!(dir.path().join("q_stats.csv").exists());
        assert_eq!(QTable::load(&path).unwrap(), q);
    }

    #[test]
    fn rejects_malformed_tables() {
        let origin = Path::new("bad.csv");
        let mut buf = Vec::new();
        QTable::zeros().write_values_csv(&mut buf).unwrap();
        let good = String::from_utf8(buf).unwrap();

        let truncated: String = good.lines().take(10).map(|l| format!("{l}\n")).collect();
        assert!(QTable::read_values_csv(truncated.as_bytes(), origin).is_err());

        let bad_value = good.replacen("s01,0,0", "s01,zero,0", 1);
        assert!(QTable::read_values_csv(bad_value.as_bytes(), origin).is_err());

        let swapped = good.replacen("s01,", "s10,", 1);
        assert!(QTable::read_values_csv(swapped.as_bytes(), origin).is_err());

        let bad_header = good.replacen("a9", "a10", 1);
        assert!(QTable::read_values_csv(bad_header.as_bytes(), origin).is_err());

        assert!(QTable::read_values_csv(good.as_bytes(), origin).is_ok());
    }

    #[test]
    fn zeros_has_unit_temperatures() {
        let q = QTable::zeros();
        for st in TransitionState::all() {
            assert_eq!(q.temperature(st), 1.0);
            assert_eq!(q.visits(st), 0);
        }
        assert_eq!(q.nonzero_count(), 0);
    }
}
