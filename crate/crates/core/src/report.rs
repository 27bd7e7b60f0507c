//! Tabular reports (CSV or JSON) and the run manifest written beside them.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::exponents::{ConstantCheck, BUNDLED_TABLE};
use crate::params::GlobalParameters;

/// Significant digits printed for reals.
pub const DIGITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Parse(format!("unknown format {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i128),
    Real(f64),
    Text(String),
    Bool(bool),
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i128)
    }
}
impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v as i128)
    }
}
impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i128)
    }
}
impl From<u128> for Cell {
    fn from(v: u128) -> Self {
        Cell::Int(v as i128)
    }
}
impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v as i128)
    }
}
impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}
impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}
impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}
impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// `x` rounded to 12 significant digits, printed in the shortest form that
/// reads back to the rounded value.
pub fn fmt_real(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "NaN".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let rounded: f64 = format!("{:.*e}", DIGITS - 1, x).parse().expect("formatted float parses");
    let a = rounded.abs();
    if rounded == 0.0 || (1e-4..1e12).contains(&a) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Real(v) => fmt_real(*v),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => match i64::try_from(*v) {
                Ok(i) => Value::from(i),
                Err(_) => Value::from(v.to_string()),
            },
            Cell::Real(v) if v.is_finite() => fmt_real(*v).parse::<serde_json::Number>().map(Value::Number).unwrap_or(Value::Null),
            Cell::Real(_) => Value::Null,
            Cell::Text(s) => Value::from(s.clone()),
            Cell::Bool(b) => Value::from(*b),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(&self.columns).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::text)).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut m = Map::new();
                for (c, v) in self.columns.iter().zip(row) {
                    m.insert(c.clone(), v.json());
                }
                Value::Object(m)
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&rows).expect("values serialise");
        s.push('\n');
        s
    }

    pub fn render(&self, format: Format) -> Result<String> {
        if self.rows.is_empty() {
            return Err(Error::InvalidParameter {
                name: "rows".into(),
                reason: "report has no rows".into(),
            });
        }
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => Ok(self.to_json()),
        }
    }
}

pub fn constant_checks(rows: &[ConstantCheck]) -> Table {
    let mut t = Table::new(&["name", "computed", "paper_value", "tolerance", "pass"]);
    for r in rows {
        t.push(vec![
            r.name.clone().into(),
            r.computed.into(),
            r.paper_value.into(),
            r.tolerance.into(),
            r.pass.into(),
        ]);
    }
    t
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut s = String::with_capacity(64);
    for b in digest {
        let _ = write!(s, "{b:02x}");
    }
    s
}

/// Provenance of one run. The id hashes everything except the wall time
/// and the output path, so repeated runs with the same inputs share it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub id: String,
    pub command_line: Vec<String>,
    pub config: String,
    pub code_version: String,
    pub data_checksums: BTreeMap<String, String>,
    pub wall_time_secs: f64,
    pub accuracy_flags: BTreeMap<String, bool>,
}

impl RunManifest {
    pub fn new(command_line: &[String], params: &GlobalParameters) -> Self {
        let mut data_checksums = BTreeMap::new();
        data_checksums.insert("permissible_exponents".to_string(), sha256_hex(BUNDLED_TABLE.as_bytes()));
        let mut m = Self {
            id: String::new(),
            command_line: command_line.to_vec(),
            config: params.to_config(),
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            data_checksums,
            wall_time_secs: 0.0,
            accuracy_flags: BTreeMap::new(),
        };
        m.refresh_id();
        m
    }

    pub fn flag(&mut self, name: &str, ok: bool) {
        self.accuracy_flags.insert(name.to_string(), ok);
        self.refresh_id();
    }

    fn refresh_id(&mut self) {
        let mut words = Vec::new();
        let mut skip = false;
        for w in &self.command_line {
            if std::mem::take(&mut skip) || w.starts_with("--out=") {
                continue;
            }
            if w == "--out" {
                skip = true;
                continue;
            }
            words.push(w.as_str());
        }
        let mut basis = words.join("\u{1f}");
        basis.push('\u{1e}');
        basis.push_str(&self.config);
        basis.push_str(&self.code_version);
        for (k, v) in self.data_checksums.iter() {
            basis.push_str(k);
            basis.push_str(v);
        }
        for (k, v) in self.accuracy_flags.iter() {
            basis.push_str(&format!("{k}={v};"));
        }
        self.id = sha256_hex(basis.as_bytes())[..16].to_string();
    }

    pub fn sidecar_path(out: &Path) -> PathBuf {
        let mut s = out.as_os_str().to_owned();
        s.push(".manifest.json");
        PathBuf::from(s)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serialises");
        s.push('\n');
        s
    }
}

/// Writes the report to `out` (with its manifest beside it) or to stdout.
pub fn emit(table: &Table, format: Format, out: Option<&Path>, manifest: &RunManifest) -> Result<()> {
    let text = table.render(format)?;
    match out {
        Some(path) => {
            std::fs::write(path, text)?;
            std::fs::write(RunManifest::sidecar_path(path), manifest.to_json())?;
        }
        None => print!("{text}"),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn reals_survive_csv_and_json(x in prop::num::f64::NORMAL) {
            let text = fmt_real(x);
            let back: f64 = text.parse().unwrap();
            prop_assert!((back - x).abs() <= 5e-12 * x.abs());
            prop_assert_eq!(fmt_real(back), text.clone());
            let mut t = Table::new(&["x"]);
            t.push(vec![x.into()]);
            let json: Value = serde_json::from_str(&t.to_json()).unwrap();
            prop_assert_eq!(json[0]["x"].as_f64().unwrap(), back);
        }
    }

    #[test]
    fn twelve_digits() {
        assert_eq!(fmt_real(0.7122687), "0.7122687");
        assert_eq!(fmt_real(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_real(9.421555401726257e-9), "9.42155540173e-9");
        assert_eq!(fmt_real(1000.0), "1000");
        assert_eq!(fmt_real(f64::NAN), "NaN");
        assert_eq!(fmt_real(0.0), "0");
        for x in [std::f64::consts::PI, 6.02214076e23, -1.5e-300] {
            let back: f64 = fmt_real(x).parse().unwrap();
            assert!((back - x).abs() <= 5e-12 * x.abs());
        }
    }

    #[test]
    fn csv_and_json_shapes() {
        let mut t = Table::new(&["q", "a", "center", "halfwidth"]);
        t.push(vec![3u64.into(), 1u64.into(), (1.0 / 3.0).into(), 1e-7.into()]);
        let csv = t.render(Format::Csv).unwrap();
        assert_eq!(csv, "q,a,center,halfwidth\n3,1,0.333333333333,1e-7\n");
        let json: Value = serde_json::from_str(&t.render(Format::Json).unwrap()).unwrap();
        assert_eq!(json[0]["q"], 3);
        let keys: Vec<&String> = json[0].as_object().unwrap().keys().collect();
        assert_eq!(keys, ["q", "a", "center", "halfwidth"]);
        assert!(Table::new(&["x"]).render(Format::Csv).is_err());
    }

    #[test]
    fn manifest_ids_are_stable() {
        let p = GlobalParameters::new(1_000_000).unwrap();
        let argv = vec!["constants".to_string(), "verify".to_string()];
        let mut a = RunManifest::new(&argv, &p);
        let b = RunManifest::new(&argv, &p);
        assert_eq!(a.id, b.id);
        a.wall_time_secs = 3.0;
        a.refresh_id();
        assert_eq!(a.id, b.id);
        a.flag("series", false);
        assert_ne!(a.id, b.id);
        let elsewhere = RunManifest::new(&[argv.clone(), vec!["--out".into(), "x.csv".into()]].concat(), &p);
        assert_eq!(elsewhere.id, b.id);
        assert_eq!(
            RunManifest::sidecar_path(Path::new("out/arcs.csv")),
            PathBuf::from("out/arcs.csv.manifest.json")
        );
    }
}
