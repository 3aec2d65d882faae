//! File formats for panels, adjacency, targets, schemes, responses and stacks.
//!
//! Tabular records are read from CSV, JSON (a plain array) or TOML (an array
//! of `[[records]]` tables), chosen by file extension. CSV files may carry a
//! `# units: col unit, col unit` comment line; units that disagree with the
//! expected ones are rejected. Other `#` lines are comments.

use std::collections::HashMap;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laminate::PanelVars;
use crate::recovery::{split_target, TargetPolar};
use crate::stack::StackingSequence;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Toml,
    Csv,
}

impl Format {
    pub fn from_path(path: &Path) -> Result<Format> {
        match path.extension().and_then(|e| e.to_str()).map(|e| e.to_ascii_lowercase()).as_deref() {
            Some("json") => Ok(Format::Json),
            Some("toml") => Ok(Format::Toml),
            Some("csv") => Ok(Format::Csv),
            _ => Err(Error::Format(format!("cannot infer format of {}", path.display()))),
        }
    }
}

/// One panel of a design or target file. The thickness is given either as a
/// ply count or as `n0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanelRecord {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plies: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n0: Option<f64>,
    pub rho0k: f64,
    pub rho1: f64,
    #[serde(default)]
    pub phi1: f64,
}

impl PanelRecord {
    pub fn from_vars(id: impl Into<String>, v: &PanelVars, plies: Option<u32>) -> Self {
        PanelRecord {
            id: id.into(),
            plies,
            n0: Some(v.n0),
            rho0k: v.rho0k,
            rho1: v.rho1,
            phi1: v.phi1,
        }
    }

    pub fn n0(&self, n_ref: u32) -> Result<f64> {
        match (self.n0, self.plies) {
            (Some(n0), _) => Ok(n0),
            (None, Some(p)) => Ok(p as f64 / n_ref as f64),
            (None, None) => Err(Error::Format(format!("panel {} has neither plies nor n0", self.id))),
        }
    }

    pub fn ply_count(&self, n_ref: u32) -> Result<u32> {
        match self.plies {
            Some(p) => Ok(p),
            None => Ok((self.n0(n_ref)? * n_ref as f64).round() as u32),
        }
    }

    pub fn vars(&self, n_ref: u32) -> Result<PanelVars> {
        Ok(PanelVars::new(self.n0(n_ref)?, self.rho0k, self.rho1, self.phi1))
    }

    pub fn target(&self, n_ref: u32) -> Result<TargetPolar> {
        let (k, rho0) = split_target(self.rho0k);
        Ok(TargetPolar::new(k, rho0, self.rho1, self.phi1, self.ply_count(n_ref)? as usize))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub a: String,
    pub b: String,
}

/// A stack with an optional residual, in slash notation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StackRecord {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    pub stack: StackingSequence,
}

#[derive(Deserialize)]
struct TomlRecords<T> {
    records: Vec<T>,
}

#[derive(Serialize)]
struct TomlRecordsRef<'a, T> {
    records: &'a [T],
}

/// Column units declared in a `# units:` line.
pub fn declared_units(text: &str) -> HashMap<String, String> {
    let mut out = HashMap::new();
    for line in text.lines() {
        let Some(rest) = line.trim().strip_prefix('#').map(str::trim).and_then(|l| l.strip_prefix("units:")) else {
            continue;
        };
        let decl = rest.split(';').next().unwrap_or("");
        for item in decl.split(',') {
            let mut parts = item.split_whitespace();
            if let (Some(col), Some(unit)) = (parts.next(), parts.next()) {
                out.insert(col.to_string(), unit.to_string());
            }
        }
    }
    out
}

fn check_units(text: &str, expected: &[(&str, &str)]) -> Result<()> {
    let declared = declared_units(text);
    for (col, unit) in expected {
        if let Some(found) = declared.get(*col) {
            if found != unit {
                return Err(Error::Format(format!("column {col} is in {found}, expected {unit}")));
            }
        }
    }
    Ok(())
}

fn csv_error(e: csv::Error) -> Error {
    match e.position() {
        Some(p) => Error::Parse {
            line: p.line() as usize,
            column: 1,
            message: e.to_string(),
        },
        None => Error::Format(e.to_string()),
    }
}

/// Parse records from text. `units` lists the expected unit of each column.
pub fn parse_records<T: DeserializeOwned>(text: &str, format: Format, units: &[(&str, &str)]) -> Result<Vec<T>> {
    match format {
        Format::Json => serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }),
        Format::Toml => toml::from_str::<TomlRecords<T>>(text).map(|r| r.records).map_err(|e| Error::Format(e.to_string())),
        Format::Csv => {
            check_units(text, units)?;
            let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(text.as_bytes());
            reader.deserialize().map(|r| r.map_err(csv_error)).collect()
        }
    }
}

/// Render records; CSV output starts with a units line when `units` is given.
pub fn render_records<T: Serialize>(records: &[T], format: Format, units: &[(&str, &str)]) -> Result<String> {
    match format {
        Format::Json => serde_json::to_string_pretty(records).map(|s| s + "\n").map_err(|e| Error::Format(e.to_string())),
        Format::Toml => toml::to_string(&TomlRecordsRef { records }).map_err(|e| Error::Format(e.to_string())),
        Format::Csv => {
            let mut out = String::new();
            if !units.is_empty() {
                let decl: Vec<String> = units.iter().map(|(c, u)| format!("{c} {u}")).collect();
                out.push_str(&format!("# units: {}\n", decl.join(", ")));
            }
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in records {
                w.serialize(r).map_err(|e| Error::Format(e.to_string()))?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Format(e.to_string()))?;
            out.push_str(&String::from_utf8(bytes).map_err(|e| Error::Format(e.to_string()))?);
            Ok(out)
        }
    }
}

pub fn read_records<T: DeserializeOwned>(path: &Path, units: &[(&str, &str)]) -> Result<Vec<T>> {
    let text = std::fs::read_to_string(path)?;
    parse_records(&text, Format::from_path(path)?, units)
}

pub fn write_records<T: Serialize>(path: &Path, records: &[T], units: &[(&str, &str)]) -> Result<()> {
    std::fs::write(path, render_records(records, Format::from_path(path)?, units)?)?;
    Ok(())
}

pub const PANEL_UNITS: &[(&str, &str)] = &[("plies", "-"), ("n0", "-"), ("rho0k", "-"), ("rho1", "-"), ("phi1", "-")];
pub const STACK_UNITS: &[(&str, &str)] = &[("residual", "-"), ("stack", "deg")];

pub fn read_panels(path: &Path) -> Result<Vec<PanelRecord>> {
    read_records(path, PANEL_UNITS)
}

pub fn read_stacks(path: &Path) -> Result<Vec<StackRecord>> {
    read_records(path, STACK_UNITS)
}

/// Adjacency edges resolved against panel ids.
pub fn resolve_edges(edges: &[EdgeRecord], ids: &[String]) -> Result<Vec<(usize, usize)>> {
    let index: HashMap<&str, usize> = ids.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    edges
        .iter()
        .map(|e| match (index.get(e.a.as_str()), index.get(e.b.as_str())) {
            (Some(&a), Some(&b)) => Ok((a, b)),
            _ => Err(Error::DanglingEdge(e.a.clone(), e.b.clone())),
        })
        .collect()
}

/// Single JSON or TOML document, such as a scheme, response or material.
pub fn parse_document<T: DeserializeOwned>(text: &str, format: Format) -> Result<T> {
    match format {
        Format::Json => serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }),
        Format::Toml => toml::from_str(text).map_err(|e| Error::Format(e.to_string())),
        Format::Csv => Err(Error::Format("documents must be JSON or TOML".into())),
    }
}

pub fn read_document<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    parse_document(&text, Format::from_path(path)?)
}

pub fn render_document<T: Serialize>(value: &T, format: Format) -> Result<String> {
    match format {
        Format::Json => serde_json::to_string_pretty(value).map(|s| s + "\n").map_err(|e| Error::Format(e.to_string())),
        Format::Toml => toml::to_string(value).map_err(|e| Error::Format(e.to_string())),
        Format::Csv => Err(Error::Format("documents must be JSON or TOML".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::StructuralResponse;
    use crate::recovery::{BlendingScheme, SchemePanel};
    use proptest::prelude::*;

    const PANELS: &str = "# units: plies -, rho0k -\n# comment\nid,plies,rho0k,rho1,phi1\n7, 45, 0.7413, 0.0454, 0\n8,30,-0.0960,0.0254,0\n";

    #[test]
    fn csv_panels() {
        let p: Vec<PanelRecord> = parse_records(PANELS, Format::Csv, PANEL_UNITS).unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p[0].plies, Some(45));
        assert_eq!(p[1].target(150).unwrap().k, 1);
        assert!((p[0].vars(150).unwrap().n0 - 0.3).abs() < 1e-15);
    }

    #[test]
    fn unit_mismatch_is_rejected() {
        let text = PANELS.replace("rho0k -", "rho0k deg");
        assert!(matches!(parse_records::<PanelRecord>(&text, Format::Csv, PANEL_UNITS), Err(Error::Format(_))));
    }

    #[test]
    fn malformed_csv_reports_line() {
        let text = "id,plies,rho0k,rho1\na,x,0.1,0.1\n";
        assert!(matches!(parse_records::<PanelRecord>(text, Format::Csv, PANEL_UNITS), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn formats_round_trip() {
        let p: Vec<PanelRecord> = parse_records(PANELS, Format::Csv, PANEL_UNITS).unwrap();
        for f in [Format::Json, Format::Toml, Format::Csv] {
            let text = render_records(&p, f, PANEL_UNITS).unwrap();
            assert_eq!(parse_records::<PanelRecord>(&text, f, PANEL_UNITS).unwrap(), p);
        }
    }

    #[test]
    fn edges_resolve() {
        let ids = vec!["a".to_string(), "b".to_string()];
        let e = vec![EdgeRecord {
            a: "a".into(),
            b: "b".into(),
        }];
        assert_eq!(resolve_edges(&e, &ids).unwrap(), vec![(0, 1)]);
        let bad = vec![EdgeRecord {
            a: "a".into(),
            b: "z".into(),
        }];
        assert!(matches!(resolve_edges(&bad, &ids), Err(Error::DanglingEdge(..))));
    }

    #[test]
    fn documents_round_trip() {
        let scheme = BlendingScheme {
            covering: 2,
            panels: vec![
                SchemePanel {
                    id: "p".into(),
                    plies: 6,
                    parent: None,
                    shared: 0,
                },
                SchemePanel {
                    id: "c".into(),
                    plies: 4,
                    parent: Some("p".into()),
                    shared: 2,
                },
            ],
        };
        let response = StructuralResponse {
            lambda: 1.7,
            u: 120.0,
            eps_gen: vec![[1e-4; 8]],
            source: "fe".into(),
        };
        for f in [Format::Json, Format::Toml] {
            let s: BlendingScheme = parse_document(&render_document(&scheme, f).unwrap(), f).unwrap();
            assert_eq!(s, scheme);
            let r: StructuralResponse = parse_document(&render_document(&response, f).unwrap(), f).unwrap();
            assert_eq!(r, response);
        }
        assert!(parse_document::<BlendingScheme>("", Format::Csv).is_err());
    }

    #[test]
    fn format_from_extension() {
        assert_eq!(Format::from_path(Path::new("a/b.CSV")).unwrap(), Format::Csv);
        assert!(Format::from_path(Path::new("a/b.txt")).is_err());
    }

    proptest! {
        #[test]
        fn stacks_round_trip(angles in prop::collection::vec(-89..=90i32, 1..60), r in prop::option::of(0.0..1.0f64)) {
            let recs = vec![StackRecord { id: "x".into(), residual: r, stack: StackingSequence::new(angles).unwrap() }];
            for f in [Format::Json, Format::Toml, Format::Csv] {
                let text = render_records(&recs, f, STACK_UNITS).unwrap();
                prop_assert_eq!(&parse_records::<StackRecord>(&text, f, STACK_UNITS).unwrap(), &recs);
            }
        }
    }
}
