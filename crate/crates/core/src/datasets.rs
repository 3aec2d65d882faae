//! Bundled reference data: the T300/5208 ply, the optimised wing panels,
//! the fixed stiffener and vertical-wing properties, and the published
//! stacking sequences with their residuals.
//!
//! Every file is checked against a SHA-256 digest before it is parsed.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::io::{parse_document, parse_records, Format, PanelRecord, PANEL_UNITS};
use crate::material::PlyMaterial;
use crate::recovery::{BlendingScheme, Subproblem, TargetPolar};
use crate::stack::StackingSequence;

struct Bundled {
    name: &'static str,
    text: &'static str,
    sha256: &'static str,
}

const MATERIAL: Bundled = Bundled {
    name: "t300_5208.json",
    text: include_str!("../data/t300_5208.json"),
    sha256: "58a979c980365a63b1a6b4ee53e02aa81285b90c008d53ed30dcfd0cbc97574c",
};
const PANELS: Bundled = Bundled {
    name: "panels.csv",
    text: include_str!("../data/panels.csv"),
    sha256: "a41aa227b9327d277b05eac5bcc4d294c8e47e796324533bd1eb8b9f95d6ce3e",
};
const FIXED: Bundled = Bundled {
    name: "fixed.csv",
    text: include_str!("../data/fixed.csv"),
    sha256: "cf2dc3fe36fc950be8ea1016e1b46b33f6c5d4ed0282fd895c9faefde64d641d",
};
const STACKS: Bundled = Bundled {
    name: "stacks.csv",
    text: include_str!("../data/stacks.csv"),
    sha256: "cc787083a98ac3ebb841e30048cc401b239921729be4932b340f83edbe9b0a56",
};
const TOTALS: Bundled = Bundled {
    name: "skin_totals.csv",
    text: include_str!("../data/skin_totals.csv"),
    sha256: "dda902a7e198c1211ff5e7f9337f3401432b2896ffcb7e44a4e324918752256c",
};

const ALL: [&Bundled; 5] = [&MATERIAL, &PANELS, &FIXED, &STACKS, &TOTALS];

/// The four wing skins, each recovered as one blended sub-problem.
pub const SKINS: [&str; 4] = ["fw-dorsal", "fw-ventral", "rw-dorsal", "rw-ventral"];

/// Covering plies shared by every stack of a published skin.
pub const SKIN_COVERING: usize = 2;

pub fn sha256_hex(text: &str) -> String {
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

/// Check `text` against an expected digest.
pub fn check_digest(name: &str, text: &str, expected: &str) -> Result<()> {
    let found = sha256_hex(text);
    if found != expected {
        return Err(Error::ChecksumMismatch {
            name: name.to_string(),
            expected: expected.to_string(),
            found,
        });
    }
    Ok(())
}

fn checked(b: &Bundled) -> Result<&'static str> {
    check_digest(b.name, b.text, b.sha256)?;
    Ok(b.text)
}

/// `(name, digest)` of every bundled file, after checking it.
pub fn verify_all() -> Result<Vec<(&'static str, &'static str)>> {
    ALL.iter().map(|b| checked(b).map(|_| (b.name, b.sha256))).collect()
}

pub fn material() -> Result<PlyMaterial> {
    parse_document(checked(&MATERIAL)?, Format::Json)
}

/// Panel targets after the continuous step, with ply counts.
pub fn panels() -> Result<Vec<PanelRecord>> {
    parse_records(checked(&PANELS)?, Format::Csv, PANEL_UNITS)
}

/// Stringer, vertical-wing skin and spar-web properties, given by `n0`.
pub fn fixed() -> Result<Vec<PanelRecord>> {
    parse_records(checked(&FIXED)?, Format::Csv, PANEL_UNITS)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PublishedStack {
    /// One of [`SKINS`] or `stand-alone`.
    pub group: String,
    pub id: String,
    pub residual: f64,
    /// `gaps` when empty slots of the published listing were dropped.
    #[serde(default)]
    pub flag: String,
    pub stack: StackingSequence,
}

impl PublishedStack {
    pub fn cleaned(&self) -> bool {
        self.flag == "gaps"
    }
}

pub fn published_stacks() -> Result<Vec<PublishedStack>> {
    parse_records(checked(&STACKS)?, Format::Csv, &[("residual", "-"), ("stack", "deg")])
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
struct TotalRecord {
    group: String,
    total: f64,
}

/// Published summed residual of each skin.
pub fn skin_totals() -> Result<Vec<(String, f64)>> {
    let rows: Vec<TotalRecord> = parse_records(checked(&TOTALS)?, Format::Csv, &[("total", "-")])?;
    Ok(rows.into_iter().map(|r| (r.group, r.total)).collect())
}

/// Target of a published stack: the panel table for numbered panels, the
/// fixed properties otherwise.
pub fn target_for(id: &str, n_ref: u32) -> Result<TargetPolar> {
    let records = if id.parse::<u32>().is_ok() { panels()? } else { fixed()? };
    records
        .iter()
        .find(|r| r.id == id)
        .ok_or_else(|| Error::Format(format!("no bundled target for {id}")))?
        .target(n_ref)
}

/// Published stacks of one group, in listing order.
pub fn group_stacks(group: &str) -> Result<Vec<PublishedStack>> {
    let all: Vec<PublishedStack> = published_stacks()?.into_iter().filter(|s| s.group == group).collect();
    if all.is_empty() {
        return Err(Error::Format(format!("unknown group {group}")));
    }
    Ok(all)
}

/// Blending scheme reconstructed from the published stacks of a skin.
pub fn skin_scheme(group: &str) -> Result<BlendingScheme> {
    let stacks: Vec<(String, StackingSequence)> = group_stacks(group)?.into_iter().map(|s| (s.id, s.stack)).collect();
    BlendingScheme::infer(&stacks, SKIN_COVERING)
}

/// Recovery sub-problem of a skin, with targets in scheme order.
pub fn skin_subproblem(group: &str, n_ref: u32) -> Result<Subproblem> {
    let scheme = skin_scheme(group)?;
    let targets = scheme.panels.iter().map(|p| target_for(&p.id, n_ref)).collect::<Result<_>>()?;
    Ok(Subproblem { targets, scheme })
}
