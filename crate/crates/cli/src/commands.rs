use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use polarblend::criteria::g_feas;
use polarblend::discrete::{solve_discrete, DesignVector, DiscreteConfig};
use polarblend::io::{self, EdgeRecord, PanelRecord, StackRecord, PANEL_UNITS, STACK_UNITS};
use polarblend::pipeline::{run_pipeline, write_artifacts, ProjectConfig};
use polarblend::recovery::{self, is_blended, BlendMode, BlendingScheme, NormKind, ResidualBreakdown, SearchConfig, Subproblem, TargetPolar};
use polarblend::verify::{verify, Section};
use polarblend::{laminate_homogenized, panel_from_laminate, polar_from_quad, quad_from_polar, Error, ExtractOptions, PlyMaterial, PolarQuad, QuadTensor, StackingSequence};
use serde::Serialize;

use crate::output::{self, csv, json, print};
use crate::{Global, Mode, Norm, SectionArg, Status};

const DEFAULT_TOLERANCE: f64 = 1e-3;

fn norm_kind(n: Norm) -> NormKind {
    match n {
        Norm::Frobenius => NormKind::Frobenius,
        Norm::PolarModuli => NormKind::PolarModuli,
    }
}

fn numbers(text: &str, count: &[usize], what: &str) -> Result<Vec<f64>> {
    let v: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|e| anyhow!("{what}: `{}` is not a number ({e})", s.trim())))
        .collect::<Result<_>>()?;
    if !count.contains(&v.len()) {
        bail!("{what}: expected {count:?} comma-separated values, got {}", v.len());
    }
    Ok(v)
}

fn load_material(path: Option<&Path>) -> Result<PlyMaterial> {
    let m: PlyMaterial = match path {
        Some(p) => io::read_document(p).with_context(|| format!("reading material {}", p.display()))?,
        None => polarblend::datasets::material()?,
    };
    m.validate()?;
    Ok(m)
}

fn parse_stack(text: &str) -> Result<StackingSequence> {
    text.parse().with_context(|| format!("stack `{text}`"))
}

fn read_stack_file(path: &Path) -> Result<Vec<StackingSequence>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match line.parse() {
            Ok(s) => out.push(s),
            Err(Error::Parse { column, message, .. }) => {
                return Err(Error::Parse {
                    line: i + 1,
                    column,
                    message,
                })
                .with_context(|| format!("in {}", path.display()))
            }
            Err(e) => return Err(e.into()),
        }
    }
    if out.is_empty() {
        bail!("{} holds no stacks", path.display());
    }
    Ok(out)
}

#[derive(Serialize)]
struct AnalyzeRow {
    stack: String,
    plies: usize,
    thickness: f64,
    t0: f64,
    t1: f64,
    r0: f64,
    r1: f64,
    phi0: f64,
    phi1: f64,
    n0: f64,
    rho0k: f64,
    rho1: f64,
    phi1_scaled: f64,
    k: u8,
    orthotropy_offset_deg: f64,
    phi0_degenerate: bool,
    phi1_degenerate: bool,
    residual: Option<f64>,
}

#[derive(Serialize)]
struct AnalyzeDetail {
    #[serde(flatten)]
    row: AnalyzeRow,
    a: [[f64; 3]; 3],
    b: [[f64; 3]; 3],
    d: [[f64; 3]; 3],
    c: [[f64; 3]; 3],
    h: [[f64; 2]; 2],
    b_polar: PolarQuad,
    d_polar: PolarQuad,
    c_polar: PolarQuad,
    residuals: Option<ResidualBreakdown>,
}

fn rows3(t: &QuadTensor) -> [[f64; 3]; 3] {
    let m = t.matrix();
    [0, 1, 2].map(|i| [m[(i, 0)], m[(i, 1)], m[(i, 2)]])
}

pub fn analyze(g: &Global, stack: Option<String>, file: Option<PathBuf>, material: Option<PathBuf>, target: Option<String>, norm: Norm) -> Result<Status> {
    let m = load_material(material.as_deref())?;
    let stacks = match (stack, file) {
        (Some(s), _) => vec![parse_stack(&s)?],
        (None, Some(f)) => read_stack_file(&f)?,
        (None, None) => bail!("give a stack or --file"),
    };
    let target = target.map(|t| numbers(&t, &[2, 3], "--target")).transpose()?;
    let mut details = Vec::new();
    for s in &stacks {
        let lam = laminate_homogenized(s, &m);
        let opts = ExtractOptions {
            unchecked: true,
            ..Default::default()
        };
        let ex = panel_from_laminate(&lam, m.n_ref, opts)?;
        let res = target.as_ref().map(|t| {
            let (k, rho0) = recovery::split_target(t[0]);
            let tp = TargetPolar::new(k, rho0, t[1], t.get(2).copied().unwrap_or(0.0), s.plies());
            recovery::residuals(s, &m, &tp, norm_kind(norm))
        });
        let a = &lam.a_polar;
        let h = lam.h_shear;
        details.push(AnalyzeDetail {
            row: AnalyzeRow {
                stack: s.to_string(),
                plies: s.plies(),
                thickness: lam.thickness,
                t0: a.t0,
                t1: a.t1,
                r0: a.r0,
                r1: a.r1,
                phi0: a.phi0,
                phi1: a.phi1,
                n0: ex.vars.n0,
                rho0k: ex.vars.rho0k,
                rho1: ex.vars.rho1,
                phi1_scaled: ex.vars.phi1,
                k: ex.k,
                orthotropy_offset_deg: ex.orthotropy_offset_deg,
                phi0_degenerate: ex.phi0_degenerate,
                phi1_degenerate: ex.phi1_degenerate,
                residual: res.map(|r| r.total),
            },
            a: rows3(&lam.a),
            b: rows3(&lam.b),
            d: rows3(&lam.d),
            c: rows3(&lam.c),
            h: [[h[(0, 0)], h[(0, 1)]], [h[(1, 0)], h[(1, 1)]]],
            b_polar: lam.b_polar,
            d_polar: lam.d_polar,
            c_polar: lam.c_polar,
            residuals: res,
        });
    }
    print(
        g.format,
        || {
            let mut out = String::new();
            for (d, s) in details.iter().zip(&stacks) {
                let lam = laminate_homogenized(s, &m);
                let r = &d.row;
                out.push_str(&format!("stack {} ({} plies, {:.3} mm)\n", r.stack, r.plies, r.thickness));
                for (name, t) in [("A*", &lam.a), ("B*", &lam.b), ("D*", &lam.d), ("C*", &lam.c)] {
                    out.push_str(&output::matrix(name, t));
                }
                out.push_str(&format!("H* (MPa)\n  {:>12.4} {:>12.4}\n  {:>12.4} {:>12.4}\n", d.h[0][0], d.h[0][1], d.h[1][0], d.h[1][1]));
                out.push_str("polar       T0          T1          R0          R1        Phi0     Phi1\n");
                for (name, p) in [("A*", &lam.a_polar), ("B*", &lam.b_polar), ("D*", &lam.d_polar), ("C*", &lam.c_polar)] {
                    out.push_str(&format!("  {name}  {:>11.3} {:>11.3} {:>11.3} {:>11.3} {:>8.3} {:>8.3}\n", p.t0, p.t1, p.r0, p.r1, p.phi0, p.phi1));
                }
                out.push_str(&format!(
                    "n0 {:.4}  rho0K {:.4}  rho1 {:.4}  phi1 {:.4}  K {}\n",
                    r.n0, r.rho0k, r.rho1, r.phi1_scaled, r.k
                ));
                out.push_str(&format!(
                    "orthotropy offset {:.4} deg; Phi0 degenerate {}; Phi1 degenerate {}\n",
                    r.orthotropy_offset_deg, r.phi0_degenerate, r.phi1_degenerate
                ));
                if let Some(res) = &d.residuals {
                    let terms: Vec<String> = res.r.iter().map(|v| format!("{v:.3e}")).collect();
                    out.push_str(&format!("residual {:.3e}  terms {}\n", res.total, terms.join(" ")));
                }
            }
            out
        },
        || json(&details),
        || csv(&details.iter().map(|d| &d.row).collect::<Vec<_>>()),
    )?;
    Ok(Status::Pass)
}

#[derive(Serialize)]
struct PolarRow {
    t0: f64,
    t1: f64,
    r0: f64,
    r1: f64,
    phi0: f64,
    phi1: f64,
    l1111: f64,
    l2222: f64,
    l1122: f64,
    l1112: f64,
    l2212: f64,
    l1212: f64,
}

pub fn polar(g: &Global, components: Option<String>, inverse: Option<String>, rotate: f64) -> Result<Status> {
    let p = match (components, inverse) {
        (Some(c), _) => {
            let v = numbers(&c, &[6], "--components")?;
            polar_from_quad(&QuadTensor::from_components(v[0], v[1], v[2], v[3], v[4], v[5]))
        }
        (None, Some(i)) => {
            let v = numbers(&i, &[6], "--inverse")?;
            PolarQuad {
                t0: v[0],
                t1: v[1],
                r0: v[2],
                r1: v[3],
                phi0: v[4],
                phi1: v[5],
            }
        }
        (None, None) => bail!("give --components or --inverse"),
    };
    let p = p.rotated(rotate);
    let l = quad_from_polar(&p, 0.0);
    let row = PolarRow {
        t0: p.t0,
        t1: p.t1,
        r0: p.r0,
        r1: p.r1,
        phi0: p.phi0,
        phi1: p.phi1,
        l1111: l.l1111(),
        l2222: l.l2222(),
        l1122: l.l1122(),
        l1112: l.l1112(),
        l2212: l.l2212(),
        l1212: l.l1212(),
    };
    print(
        g.format,
        || {
            format!(
                "T0 {:.4}  T1 {:.4}  R0 {:.4}  R1 {:.4}  Phi0 {:.4}  Phi1 {:.4}\n{}",
                p.t0,
                p.t1,
                p.r0,
                p.r1,
                p.phi0,
                p.phi1,
                output::matrix("tensor", &l)
            )
        },
        || json(&row),
        || csv(&[&row]),
    )?;
    Ok(Status::Pass)
}

#[derive(Serialize)]
struct FeasibilityRow {
    id: String,
    g: f64,
    satisfied: bool,
}

pub fn feasibility(g: &Global, input: &Path) -> Result<Status> {
    let tol = g.tolerance.unwrap_or(DEFAULT_TOLERANCE);
    let panels = io::read_panels(input).with_context(|| format!("reading {}", input.display()))?;
    let rows: Vec<FeasibilityRow> = panels
        .iter()
        .map(|r| {
            let v = g_feas(&r.vars(150)?);
            Ok(FeasibilityRow {
                id: r.id.clone(),
                g: v.g,
                satisfied: v.g <= tol,
            })
        })
        .collect::<Result<_>>()?;
    let ok = rows.iter().all(|r| r.satisfied);
    print(
        g.format,
        || {
            let mut s: String = rows.iter().map(|r| format!("{:>8}  {:>9.4}  {}\n", r.id, r.g, if r.satisfied { "ok" } else { "VIOLATED" })).collect();
            let max = rows.iter().map(|r| r.g).fold(f64::NEG_INFINITY, f64::max);
            s.push_str(&format!("max {max:.4} over {} panels\n", rows.len()));
            s
        },
        || json(&rows),
        || csv(&rows),
    )?;
    Ok(if ok { Status::Pass } else { Status::Fail })
}

#[derive(Serialize)]
struct BlendRow {
    blended: bool,
    witness: Option<Vec<usize>>,
}

pub fn blend_check(g: &Global, parent: &str, thinner: &str, mode: Mode, covering: usize) -> Result<Status> {
    let (p, t) = (parse_stack(parent)?, parse_stack(thinner)?);
    let mode = match mode {
        Mode::General => BlendMode::General,
        Mode::Scheme => BlendMode::Scheme { covering },
    };
    let check = is_blended(&p, &t, mode);
    let row = BlendRow {
        blended: check.blended,
        witness: check.witness.clone(),
    };
    print(
        g.format,
        || match &check.witness {
            Some(w) => format!("blended; thinner plies sit at {w:?} of the thicker stack\n"),
            None => "not blended\n".to_string(),
        },
        || json(&row),
        || {
            #[derive(Serialize)]
            struct Flat {
                blended: bool,
                witness: String,
            }
            let witness = check.witness.as_ref().map_or(String::new(), |w| w.iter().map(|i| i.to_string()).collect::<Vec<_>>().join("/"));
            csv(&[Flat {
                blended: check.blended,
                witness,
            }])
        },
    )?;
    Ok(if check.blended { Status::Pass } else { Status::Fail })
}

fn read_edges(path: &Path, ids: &[String]) -> Result<Vec<(usize, usize)>> {
    let edges: Vec<EdgeRecord> = io::read_records(path, &[]).with_context(|| format!("reading {}", path.display()))?;
    Ok(io::resolve_edges(&edges, ids)?)
}

pub fn discretize(g: &Global, input: &Path, adjacency: &Path, dn_min: u32, n_ref: u32, output: Option<PathBuf>) -> Result<Status> {
    let records = io::read_panels(input).with_context(|| format!("reading {}", input.display()))?;
    let ids: Vec<String> = records.iter().map(|r| r.id.clone()).collect();
    let edges = read_edges(adjacency, &ids)?;
    let defaults = DiscreteConfig::default();
    let cfg = DiscreteConfig {
        dn_min,
        n_ref,
        budget: g.budget.map_or(defaults.budget, |b| b as usize),
        seed: g.seed.unwrap_or(defaults.seed),
        tolerance: g.tolerance.unwrap_or(defaults.tolerance),
        ..defaults
    };
    let panels = records.iter().map(|r| r.vars(n_ref)).collect::<polarblend::Result<Vec<_>>>()?;
    let sol = solve_discrete(&DesignVector::continuous(panels), &edges, &cfg)?;
    let out: Vec<PanelRecord> = ids
        .iter()
        .zip(&sol.design.panels)
        .zip(&sol.report.plies)
        .map(|((id, v), &n)| PanelRecord {
            n0: None,
            ..PanelRecord::from_vars(id.clone(), v, Some(n))
        })
        .collect();
    if let Some(path) = &output {
        io::write_records(path, &out, PANEL_UNITS).with_context(|| format!("writing {}", path.display()))?;
    }
    let r = &sol.report;
    print(
        g.format,
        || {
            let mut s: String = out.iter().map(|p| format!("{:>8}  N {:>4}  rho0K {:>8.4}  rho1 {:>7.4}\n", p.id, p.plies.unwrap_or(0), p.rho0k, p.rho1)).collect();
            s.push_str(&format!(
                "objective {:.6e}  evaluations {}  max feasibility {:.4}  max blending {:.4}  max ply-drop {:.4e}\n",
                r.objective, r.evaluations, r.max_feasibility, r.max_blend, r.max_ply_drop
            ));
            for v in &r.violations {
                s.push_str(&format!("violated {:?} on {:?}: {:.4e}\n", v.kind, v.panels.iter().map(|&i| &ids[i]).collect::<Vec<_>>(), v.value));
            }
            s.push_str(if r.feasible { "feasible\n" } else { "INFEASIBLE\n" });
            s
        },
        || json(&sol),
        || csv(&out),
    )?;
    Ok(if r.feasible { Status::Pass } else { Status::Fail })
}

pub struct RecoverArgs {
    pub targets: PathBuf,
    pub scheme: Option<PathBuf>,
    pub adjacency: Option<PathBuf>,
    pub covering: usize,
    pub step: u32,
    pub restarts: usize,
    pub nref: u32,
    pub norm: Norm,
    pub output: Option<PathBuf>,
}

#[derive(Serialize)]
struct RecoverRow {
    id: String,
    plies: usize,
    r1: f64,
    r2: f64,
    r3: f64,
    r4: f64,
    r5: f64,
    r6: f64,
    total: f64,
    stack: String,
}

pub fn recover(g: &Global, a: RecoverArgs) -> Result<Status> {
    let m = load_material(None)?;
    let records = io::read_panels(&a.targets).with_context(|| format!("reading {}", a.targets.display()))?;
    let ids: Vec<String> = records.iter().map(|r| r.id.clone()).collect();
    let targets = records.iter().map(|r| r.target(a.nref)).collect::<polarblend::Result<Vec<_>>>()?;
    let schemes: Vec<BlendingScheme> = match (&a.scheme, &a.adjacency) {
        (Some(p), _) => vec![io::read_document(p).with_context(|| format!("reading {}", p.display()))?],
        (None, Some(p)) => {
            let edges = read_edges(p, &ids)?;
            let plies: Vec<usize> = targets.iter().map(|t| t.plies).collect();
            vec![BlendingScheme::from_adjacency(&ids, &plies, &edges, a.covering)?]
        }
        (None, None) => ids.iter().zip(&targets).map(|(id, t)| BlendingScheme::single(id.clone(), t.plies)).collect(),
    };
    let defaults = SearchConfig::default();
    let cfg = SearchConfig {
        step_deg: a.step,
        restarts: a.restarts,
        budget: g.budget.unwrap_or(defaults.budget),
        seed: g.seed.unwrap_or(defaults.seed),
        norm: norm_kind(a.norm),
        ..defaults
    };
    let mut rows = Vec::new();
    for scheme in schemes {
        let sub_targets = scheme
            .panels
            .iter()
            .map(|p| {
                ids.iter()
                    .position(|id| *id == p.id)
                    .map(|j| targets[j])
                    .ok_or_else(|| anyhow!("scheme panel {} has no target", p.id))
            })
            .collect::<Result<Vec<_>>>()?;
        let res = recovery::recover(
            &Subproblem {
                targets: sub_targets,
                scheme,
            },
            &m,
            &cfg,
        )?;
        for ((id, s), r) in res.ids.iter().zip(&res.stacks).zip(&res.residuals) {
            rows.push(RecoverRow {
                id: id.clone(),
                plies: s.plies(),
                r1: r.r[0],
                r2: r.r[1],
                r3: r.r[2],
                r4: r.r[3],
                r5: r.r[4],
                r6: r.r[5],
                total: r.total,
                stack: s.to_string(),
            });
        }
    }
    if let Some(path) = &a.output {
        let recs: Vec<StackRecord> = rows
            .iter()
            .map(|r| {
                Ok(StackRecord {
                    id: r.id.clone(),
                    residual: Some(r.total),
                    stack: r.stack.parse()?,
                })
            })
            .collect::<polarblend::Result<_>>()?;
        io::write_records(path, &recs, STACK_UNITS).with_context(|| format!("writing {}", path.display()))?;
    }
    print(
        g.format,
        || {
            let mut s: String = rows.iter().map(|r| format!("{:>8}  {:>4} plies  residual {:.3e}  {}\n", r.id, r.plies, r.total, r.stack)).collect();
            s.push_str(&format!("total {:.4e}\n", rows.iter().map(|r| r.total).sum::<f64>()));
            s
        },
        || json(&rows),
        || csv(&rows),
    )?;
    Ok(Status::Pass)
}

pub fn pipeline(g: &Global, config: &Path) -> Result<Status> {
    let (mut project, input) = ProjectConfig::load(config).with_context(|| format!("loading project {}", config.display()))?;
    if let Some(seed) = g.seed {
        project.discrete.seed = seed;
        project.search.seed = seed;
    }
    if let Some(b) = g.budget {
        project.discrete.budget = b as usize;
        project.search.budget = b;
    }
    if let Some(t) = g.tolerance {
        project.discrete.tolerance = t;
    }
    let out = run_pipeline(&input, &project.discrete, &project.search, &project.pipeline())?;
    write_artifacts(&out, &project.output).with_context(|| format!("writing artifacts to {}", project.output.display()))?;
    let rc = &out.recheck;
    print(
        g.format,
        || {
            let mut s = String::new();
            for ((id, st), r) in out.recovery.ids.iter().zip(&out.recovery.stacks).zip(&out.recovery.residuals) {
                s.push_str(&format!("{:>8}  {:>4} plies  residual {:.3e}  {}\n", id, st.plies(), r.total, st));
            }
            s.push_str(&format!(
                "discrete objective {:.4e}; recovered max feasibility {:.4}, max blending {:.4}, max ply-drop {:.4e}, {}/{} edges ply-continuous\n",
                out.discrete.report.objective, rc.max_feasibility, rc.max_blend, rc.max_ply_drop, rc.edges_blended, rc.edges
            ));
            s.push_str(&format!("artifacts in {}\n", project.output.display()));
            s.push_str(if rc.satisfied { "constraints satisfied\n" } else { "CONSTRAINTS VIOLATED\n" });
            s
        },
        || json(&out),
        || {
            #[derive(Serialize)]
            struct Row<'a> {
                id: &'a str,
                plies: usize,
                residual: f64,
                stack: String,
            }
            let rows: Vec<Row> = out
                .recovery
                .ids
                .iter()
                .zip(&out.recovery.stacks)
                .zip(&out.recovery.residuals)
                .map(|((id, s), r)| Row {
                    id,
                    plies: s.plies(),
                    residual: r.total,
                    stack: s.to_string(),
                })
                .collect();
            csv(&rows)
        },
    )?;
    Ok(if rc.satisfied { Status::Pass } else { Status::Fail })
}

pub fn verify_paper(g: &Global, sections: &[SectionArg]) -> Result<Status> {
    let selected: Vec<Section> = if sections.is_empty() {
        Section::ALL.to_vec()
    } else {
        sections
            .iter()
            .map(|s| match s {
                SectionArg::Material => Section::Material,
                SectionArg::Feasibility => Section::Feasibility,
                SectionArg::StandAlone => Section::StandAlone,
                SectionArg::Skins => Section::Skins,
                SectionArg::Blending => Section::Blending,
            })
            .collect()
    };
    let report = verify(&selected)?;
    print(g.format, || format!("{report}\n"), || json(&report), || csv(&report.checks))?;
    Ok(if report.passed() { Status::Pass } else { Status::Fail })
}
