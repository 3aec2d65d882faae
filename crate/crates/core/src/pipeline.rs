//! End-to-end run: ply-count discretisation, blended stack recovery and a
//! re-check of the constraints on the recovered laminates.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::criteria::{blend_aggregate, delta_n_gap, g_feas, Edge};
use crate::discrete::{solve_discrete, DesignVector, DiscreteConfig, DiscreteSolution};
use crate::error::{Error, Result};
use crate::io::{self, EdgeRecord, PanelRecord, StackRecord, PANEL_UNITS, STACK_UNITS};
use crate::laminate::{laminate_homogenized, panel_from_laminate, ExtractOptions, PanelVars};
use crate::material::PlyMaterial;
use crate::recovery::{is_blended, recover, BlendMode, BlendingScheme, RecoveryResult, SearchConfig, Subproblem, TargetPolar};

/// Project file: inputs, output directory and solver settings. Relative
/// paths are taken from the project file's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectConfig {
    /// Bundled T300/5208 when absent.
    #[serde(default)]
    pub material: Option<PathBuf>,
    pub panels: PathBuf,
    pub adjacency: PathBuf,
    /// Scheme built from the adjacency when absent.
    #[serde(default)]
    pub scheme: Option<PathBuf>,
    pub output: PathBuf,
    #[serde(default = "default_covering")]
    pub covering: usize,
    #[serde(default)]
    pub discrete: DiscreteConfig,
    #[serde(default)]
    pub search: SearchConfig,
}

fn default_covering() -> usize {
    2
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineInput {
    pub material: PlyMaterial,
    pub ids: Vec<String>,
    pub panels: Vec<PanelVars>,
    pub edges: Vec<Edge>,
    pub scheme: Option<BlendingScheme>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub covering: usize,
    pub tolerance: f64,
}

/// Constraints evaluated on the laminates actually recovered.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recheck {
    /// Recovered membrane variables, discrete thickness.
    pub panels: Vec<PanelVars>,
    pub max_feasibility: f64,
    /// Macroscopic blending on the recovered values; reported, not enforced.
    pub max_blend: f64,
    pub max_ply_drop: f64,
    pub edges: usize,
    pub edges_blended: usize,
    /// Feasibility, ply-drop and ply-continuity all hold.
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineOutput {
    pub ids: Vec<String>,
    pub discrete: DiscreteSolution,
    pub scheme: BlendingScheme,
    pub recovery: RecoveryResult,
    pub recheck: Recheck,
}

impl ProjectConfig {
    pub fn load(path: &Path) -> Result<(ProjectConfig, PipelineInput)> {
        let cfg: ProjectConfig = io::read_document(path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        let rel = |p: &Path| if p.is_absolute() { p.to_path_buf() } else { base.join(p) };
        let material = match &cfg.material {
            Some(p) => io::read_document(&rel(p))?,
            None => crate::datasets::material()?,
        };
        let records: Vec<PanelRecord> = io::read_records(&rel(&cfg.panels), PANEL_UNITS)?;
        let edges: Vec<EdgeRecord> = io::read_records(&rel(&cfg.adjacency), &[])?;
        let scheme = cfg.scheme.as_ref().map(|p| io::read_document(&rel(p))).transpose()?;
        let input = PipelineInput::from_records(material, &records, &edges, scheme)?;
        let output = rel(&cfg.output);
        Ok((ProjectConfig { output, ..cfg }, input))
    }

    pub fn pipeline(&self) -> PipelineConfig {
        PipelineConfig {
            covering: self.covering,
            tolerance: self.discrete.tolerance,
        }
    }
}

impl PipelineInput {
    pub fn from_records(material: PlyMaterial, records: &[PanelRecord], edges: &[EdgeRecord], scheme: Option<BlendingScheme>) -> Result<Self> {
        material.validate()?;
        let ids: Vec<String> = records.iter().map(|r| r.id.clone()).collect();
        let panels = records.iter().map(|r| r.vars(material.n_ref)).collect::<Result<_>>()?;
        let edges = io::resolve_edges(edges, &ids)?;
        Ok(PipelineInput {
            material,
            ids,
            panels,
            edges,
            scheme,
        })
    }
}

fn scheme_for(input: &PipelineInput, plies: &[u32], covering: usize) -> Result<BlendingScheme> {
    let plies: Vec<usize> = plies.iter().map(|&p| p as usize).collect();
    let Some(scheme) = &input.scheme else {
        return BlendingScheme::from_adjacency(&input.ids, &plies, &input.edges, covering);
    };
    for p in &scheme.panels {
        let j = input
            .ids
            .iter()
            .position(|id| *id == p.id)
            .ok_or_else(|| Error::InvalidScheme(format!("scheme panel {} is not a design panel", p.id)))?;
        if p.plies != plies[j] {
            return Err(Error::InvalidScheme(format!("scheme gives {} plies to {}, discretisation gives {}", p.plies, p.id, plies[j])));
        }
    }
    if scheme.panels.len() != input.ids.len() {
        return Err(Error::InvalidScheme("scheme does not cover every panel".into()));
    }
    scheme.validate()?;
    Ok(scheme.clone())
}

fn recheck(input: &PipelineInput, discrete: &DiscreteConfig, cfg: &PipelineConfig, scheme: &BlendingScheme, rec: &RecoveryResult, plies: &[u32]) -> Result<Recheck> {
    let n_ref = discrete.n_ref;
    let mut panels = vec![PanelVars::new(0.0, 0.0, 0.0, 0.0); input.ids.len()];
    let mut stacks = vec![None; input.ids.len()];
    for (id, stack) in rec.ids.iter().zip(&rec.stacks) {
        let j = input.ids.iter().position(|x| x == id).expect("scheme ids checked");
        let lam = laminate_homogenized(stack, &input.material);
        let opts = ExtractOptions {
            unchecked: true,
            ..Default::default()
        };
        let v = panel_from_laminate(&lam, n_ref, opts)?.vars;
        panels[j] = PanelVars {
            n0: plies[j] as f64 / n_ref as f64,
            ..v
        };
        stacks[j] = Some(stack);
    }
    let max_feasibility = panels.iter().map(|p| g_feas(p).g).fold(f64::NEG_INFINITY, f64::max);
    let max_blend = blend_aggregate(&panels, &input.edges, n_ref as f64)?.value;
    let max_ply_drop = input
        .edges
        .iter()
        .map(|&(p, q)| delta_n_gap(plies[p], plies[q], discrete.dn_min, n_ref))
        .fold(f64::NEG_INFINITY, f64::max);
    let mode = BlendMode::Scheme {
        covering: scheme.covering,
    };
    let edges_blended = input
        .edges
        .iter()
        .filter(|&&(p, q)| {
            let (a, b) = (stacks[p].expect("every panel recovered"), stacks[q].expect("every panel recovered"));
            let (thick, thin) = if a.plies() >= b.plies() { (a, b) } else { (b, a) };
            is_blended(thick, thin, mode).blended
        })
        .count();
    let satisfied = max_feasibility <= cfg.tolerance && max_ply_drop <= cfg.tolerance && edges_blended == input.edges.len();
    Ok(Recheck {
        panels,
        max_feasibility,
        max_blend,
        max_ply_drop,
        edges: input.edges.len(),
        edges_blended,
        satisfied,
    })
}

/// Discretise, recover and re-check. Errors carry the failing stage.
pub fn run_pipeline(input: &PipelineInput, discrete: &DiscreteConfig, search: &SearchConfig, cfg: &PipelineConfig) -> Result<PipelineOutput> {
    let xi_c = DesignVector::continuous(input.panels.clone());
    let sol = solve_discrete(&xi_c, &input.edges, discrete).map_err(|e| e.in_stage("discretize"))?;
    let plies = sol.report.plies.clone();

    let stage = |e: Error| e.in_stage("recover");
    let scheme = scheme_for(input, &plies, cfg.covering).map_err(stage)?;
    let targets = scheme
        .panels
        .iter()
        .map(|p| {
            let j = input.ids.iter().position(|id| *id == p.id).expect("scheme ids checked");
            TargetPolar::from_panel(&sol.design.panels[j], discrete.n_ref)
        })
        .collect();
    let sub = Subproblem {
        targets,
        scheme: scheme.clone(),
    };
    let recovery = recover(&sub, &input.material, search).map_err(stage)?;

    let recheck = recheck(input, discrete, cfg, &scheme, &recovery, &plies).map_err(|e| e.in_stage("verify"))?;
    Ok(PipelineOutput {
        ids: input.ids.clone(),
        discrete: sol,
        scheme,
        recovery,
        recheck,
    })
}

#[derive(Serialize)]
struct ResidualRow<'a> {
    id: &'a str,
    r1: f64,
    r2: f64,
    r3: f64,
    r4: f64,
    r5: f64,
    r6: f64,
    total: f64,
}

/// Write `discrete.csv`, `stacks.csv`, `residuals.csv`, `scheme.json` and
/// `report.json` into `dir`.
pub fn write_artifacts(out: &PipelineOutput, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let discrete: Vec<PanelRecord> = out
        .ids
        .iter()
        .zip(&out.discrete.design.panels)
        .zip(&out.discrete.report.plies)
        .map(|((id, v), &n)| PanelRecord {
            n0: None,
            ..PanelRecord::from_vars(id.clone(), v, Some(n))
        })
        .collect();
    io::write_records(&dir.join("discrete.csv"), &discrete, PANEL_UNITS)?;
    let rec = &out.recovery;
    let stacks: Vec<StackRecord> = rec
        .ids
        .iter()
        .zip(&rec.stacks)
        .zip(&rec.residuals)
        .map(|((id, s), r)| StackRecord {
            id: id.clone(),
            residual: Some(r.total),
            stack: s.clone(),
        })
        .collect();
    io::write_records(&dir.join("stacks.csv"), &stacks, STACK_UNITS)?;
    let rows: Vec<ResidualRow> = rec
        .ids
        .iter()
        .zip(&rec.residuals)
        .map(|(id, r)| ResidualRow {
            id,
            r1: r.r[0],
            r2: r.r[1],
            r3: r.r[2],
            r4: r.r[3],
            r5: r.r[4],
            r6: r.r[5],
            total: r.total,
        })
        .collect();
    io::write_records(&dir.join("residuals.csv"), &rows, &[])?;
    std::fs::write(dir.join("scheme.json"), io::render_document(&out.scheme, io::Format::Json)?)?;
    std::fs::write(dir.join("report.json"), io::render_document(out, io::Format::Json)?)?;
    Ok(())
}
