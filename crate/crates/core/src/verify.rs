//! Checks of the library against the bundled reference data.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::criteria::max_feasibility;
use crate::datasets::{self, SKINS};
use crate::error::Result;
use crate::material::ply_reduced_stiffness;
use crate::recovery::{is_blended, residuals, BlendMode, NormKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub computed: f64,
    pub reference: f64,
    /// Meaning depends on `rule`.
    pub tolerance: f64,
    pub rule: Rule,
    pub passed: bool,
    /// Informational checks do not affect the report status.
    pub hard: bool,
    /// Where the reference value comes from.
    pub source: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    /// `|computed - reference| <= tolerance * |reference|`
    Relative,
    /// `|computed - reference| <= tolerance`
    Absolute,
    /// `computed <= reference`
    AtMost,
    /// `computed >= reference`
    AtLeast,
    /// within a factor `tolerance` of the reference, or below 1e-4
    Factor,
    /// within `max(0.01, tolerance * reference)`
    Band,
}

impl Check {
    pub fn new(name: impl Into<String>, computed: f64, reference: f64, tolerance: f64, rule: Rule, source: &str) -> Self {
        let diff = (computed - reference).abs();
        let passed = match rule {
            Rule::Relative => diff <= tolerance * reference.abs(),
            Rule::Absolute => diff <= tolerance,
            Rule::AtMost => computed <= reference,
            Rule::AtLeast => computed >= reference,
            Rule::Factor => computed < 1e-4 || (computed >= reference / tolerance && computed <= reference * tolerance),
            Rule::Band => diff <= (tolerance * reference.abs()).max(0.01),
        };
        Check {
            name: name.into(),
            computed,
            reference,
            tolerance,
            rule,
            passed,
            hard: true,
            source: source.to_string(),
        }
    }

    pub fn informational(mut self) -> Self {
        self.hard = false;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Section {
    Material,
    Feasibility,
    StandAlone,
    Skins,
    Blending,
}

impl Section {
    pub const ALL: [Section; 5] = [Section::Material, Section::Feasibility, Section::StandAlone, Section::Skins, Section::Blending];
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed || !c.hard)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| c.hard && !c.passed).collect()
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let status = match (c.passed, c.hard) {
                (true, _) => "pass",
                (false, true) => "FAIL",
                (false, false) => "info",
            };
            writeln!(f, "{status:4}  {:44} computed {:>12.6e}  reference {:>12.6e}  ({})", c.name, c.computed, c.reference, c.source)?;
        }
        let hard = self.checks.iter().filter(|c| c.hard).count();
        write!(f, "{} of {hard} checks passed", hard - self.failures().len())
    }
}

const PLY: &str = "published ply polar moduli";
const PANELS: &str = "published panel optimum";
const STACKS: &str = "published stack residuals";

fn material_checks(out: &mut Vec<Check>) -> Result<()> {
    let m = datasets::material()?;
    let p = ply_reduced_stiffness(&m)?.polar();
    let r = &m.polar_q;
    for (name, c, e) in [("ply T0", p.t0, r.t0), ("ply T1", p.t1, r.t1), ("ply R0", p.r0, r.r0), ("ply R1", p.r1, r.r1)] {
        out.push(Check::new(name, c, e, 1e-3, Rule::Relative, PLY));
    }
    out.push(Check::new("ply Phi0 (deg)", p.phi0, 0.0, 0.01, Rule::Absolute, PLY));
    out.push(Check::new("ply Phi1 (deg)", p.phi1, 0.0, 0.01, Rule::Absolute, PLY));
    Ok(())
}

fn feasibility_checks(out: &mut Vec<Check>) -> Result<()> {
    let m = datasets::material()?;
    let vars = datasets::panels()?.iter().map(|p| p.vars(m.n_ref)).collect::<Result<Vec<_>>>()?;
    let (_, g) = max_feasibility(&vars).unwrap_or((0, f64::NAN));
    out.push(Check::new("max feasibility over panels", g, -0.2893, 1e-3, Rule::Absolute, "published constraint value"));
    out.push(Check::new("largest feasibility value is non-positive", g, 0.0, 0.0, Rule::AtMost, PANELS));
    Ok(())
}

fn stand_alone_checks(out: &mut Vec<Check>) -> Result<()> {
    let m = datasets::material()?;
    for s in datasets::group_stacks("stand-alone")? {
        let t = datasets::target_for(&s.id, m.n_ref)?;
        let r = residuals(&s.stack, &m, &t, NormKind::Frobenius);
        out.push(Check::new(format!("residual {}", s.id), r.total, s.residual, 5.0, Rule::Factor, STACKS));
    }
    Ok(())
}

fn skin_checks(out: &mut Vec<Check>) -> Result<()> {
    let m = datasets::material()?;
    let totals = datasets::skin_totals()?;
    let (mut matched, mut count) = (0usize, 0usize);
    for group in SKINS {
        let (mut sum, mut alt) = (0.0, 0.0);
        for s in datasets::group_stacks(group)? {
            let t = datasets::target_for(&s.id, m.n_ref)?;
            let r = residuals(&s.stack, &m, &t, NormKind::Frobenius).total;
            alt += residuals(&s.stack, &m, &t, NormKind::PolarModuli).total;
            sum += r;
            let c = Check::new(format!("{group} panel {} residual", s.id), r, s.residual, 0.1, Rule::Band, STACKS).informational();
            matched += c.passed as usize;
            count += 1;
            out.push(c);
        }
        let reported = totals.iter().find(|(g, _)| g == group).map_or(f64::NAN, |(_, t)| *t);
        out.push(Check::new(format!("{group} total"), sum, reported, 0.1, Rule::Relative, STACKS));
        out.push(Check::new(format!("{group} total, polar-moduli norm"), alt, reported, 0.1, Rule::Relative, STACKS).informational());
    }
    out.push(Check::new("fraction of skin panels within band", matched as f64 / count as f64, 0.9, 0.0, Rule::AtLeast, STACKS));
    Ok(())
}

fn blending_checks(out: &mut Vec<Check>) -> Result<()> {
    for group in SKINS {
        let stacks = datasets::group_stacks(group)?;
        let scheme = datasets::skin_scheme(group)?;
        let mode = BlendMode::Scheme {
            covering: scheme.covering,
        };
        let pairs = scheme.nested_pairs();
        let find = |id: &str| stacks.iter().find(|s| s.id == id).map(|s| &s.stack);
        let blended = pairs
            .iter()
            .filter(|&&(p, c)| match (find(&scheme.panels[p].id), find(&scheme.panels[c].id)) {
                (Some(a), Some(b)) => is_blended(a, b, mode).blended,
                _ => false,
            })
            .count();
        out.push(Check::new(format!("{group} nested pairs blended"), blended as f64, pairs.len() as f64, 0.0, Rule::AtLeast, "published skin stacks"));
    }
    Ok(())
}

/// Run the selected sections against the bundled data.
pub fn verify(sections: &[Section]) -> Result<VerificationReport> {
    datasets::verify_all()?;
    let mut checks = Vec::new();
    for s in sections {
        match s {
            Section::Material => material_checks(&mut checks)?,
            Section::Feasibility => feasibility_checks(&mut checks)?,
            Section::StandAlone => stand_alone_checks(&mut checks)?,
            Section::Skins => skin_checks(&mut checks)?,
            Section::Blending => blending_checks(&mut checks)?,
        }
    }
    Ok(VerificationReport { checks })
}
