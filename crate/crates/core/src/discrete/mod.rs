//! Rounding a continuous panel design to integer ply counts.
//!
//! The discrete problem keeps `rho0K` and `rho1` continuous and forces each
//! `n0` onto the lattice `N / N_ref`. Once every ply count is fixed, the
//! remaining problem is convex, so the solver searches the integer lattice
//! stochastically and solves each continuous subproblem exactly by
//! projection.

mod projection;

use std::collections::{HashMap, HashSet, VecDeque};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::criteria::{delta_n_gap, g_blend_pair, g_feas, Edge};
use crate::error::{Error, Result};
use crate::laminate::PanelVars;

/// Whether a design vector holds continuous or rounded ply counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Continuous,
    Discrete,
}

/// Panel variables of every optimisation region, in a fixed order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignVector {
    pub panels: Vec<PanelVars>,
    pub role: Role,
}

impl DesignVector {
    pub fn continuous(panels: Vec<PanelVars>) -> Self {
        DesignVector {
            panels,
            role: Role::Continuous,
        }
    }

    pub fn discrete(panels: Vec<PanelVars>) -> Self {
        DesignVector {
            panels,
            role: Role::Discrete,
        }
    }

    pub fn len(&self) -> usize {
        self.panels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.panels.is_empty()
    }

    /// Ply counts `n0 * N_ref`, rounded to the nearest integer.
    pub fn plies(&self, n_ref: u32) -> Vec<u32> {
        self.panels.iter().map(|p| p.plies(n_ref)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DiscreteConfig {
    /// Smallest allowed non-zero ply-count difference between neighbours.
    pub dn_min: u32,
    pub n_ref: u32,
    /// Number of distinct ply-count vectors evaluated.
    pub budget: usize,
    pub seed: u64,
    /// Largest single-move change of a ply count.
    pub radius: u32,
    /// Constraint tolerance used in the report.
    pub tolerance: f64,
}

impl Default for DiscreteConfig {
    fn default() -> Self {
        DiscreteConfig {
            dn_min: 4,
            n_ref: 150,
            budget: 20_000,
            seed: 0,
            radius: 8,
            tolerance: 1e-3,
        }
    }
}

impl DiscreteConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dn_min < 1 {
            return Err(Error::InvalidConfig("dn_min must be at least 1".into()));
        }
        if self.n_ref < 1 {
            return Err(Error::InvalidConfig("n_ref must be at least 1".into()));
        }
        if self.radius < 1 {
            return Err(Error::InvalidConfig("radius must be at least 1".into()));
        }
        if !(self.tolerance >= 0.0) {
            return Err(Error::InvalidConfig("tolerance must be non-negative".into()));
        }
        Ok(())
    }

    /// Smallest ply count allowed by the `n0` lower bound.
    pub fn min_plies(&self) -> u32 {
        ceil_plies(PanelVars::N0_MIN, self.n_ref).max(1)
    }
}

fn ceil_plies(n0: f64, n_ref: u32) -> u32 {
    // absorb representation error, so that 0.2 * 150 stays 30
    (n0 * n_ref as f64 - 1e-9).ceil().max(0.0) as u32
}

/// `ceil(n0 N_ref) / N_ref`.
pub fn round_up_plies(n0: f64, n_ref: u32) -> f64 {
    ceil_plies(n0, n_ref) as f64 / n_ref as f64
}

/// Squared distance between two design vectors over `(n0, rho0K, rho1)`.
pub fn discrete_objective(xi: &DesignVector, xi_c: &DesignVector) -> Result<f64> {
    if xi.len() != xi_c.len() {
        return Err(Error::DimensionMismatch(format!("{} panels vs {}", xi.len(), xi_c.len())));
    }
    Ok(xi
        .panels
        .iter()
        .zip(&xi_c.panels)
        .map(|(a, b)| (a.n0 - b.n0).powi(2) + (a.rho0k - b.rho0k).powi(2) + (a.rho1 - b.rho1).powi(2))
        .sum())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstraintKind {
    Feasibility,
    Blend0,
    Blend1,
    PlyDrop,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ConstraintKind,
    /// Panel index, or the two panel indices of an edge.
    pub panels: Vec<usize>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteReport {
    pub objective: f64,
    pub plies: Vec<u32>,
    pub evaluations: usize,
    pub feasible: bool,
    pub max_feasibility: f64,
    pub max_blend: f64,
    pub max_ply_drop: f64,
    pub violations: Vec<Violation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteSolution {
    pub design: DesignVector,
    pub report: DiscreteReport,
}

/// Check a design against every constraint of the discrete problem.
pub fn check_design(xi: &DesignVector, xi_c: &DesignVector, edges: &[Edge], cfg: &DiscreteConfig, evaluations: usize) -> Result<DiscreteReport> {
    check_edges(edges, xi.len())?;
    let n_ref = cfg.n_ref as f64;
    let plies = xi.plies(cfg.n_ref);
    let mut violations = Vec::new();
    let mut max_feasibility = f64::NEG_INFINITY;
    for (j, p) in xi.panels.iter().enumerate() {
        let g = g_feas(p).g;
        max_feasibility = max_feasibility.max(g);
        if g > cfg.tolerance {
            violations.push(Violation {
                kind: ConstraintKind::Feasibility,
                panels: vec![j],
                value: g,
            });
        }
    }
    let (mut max_blend, mut max_ply_drop) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for &(p, q) in edges {
        let a = PanelVars {
            n0: plies[p] as f64 / n_ref,
            ..xi.panels[p]
        };
        let b = PanelVars {
            n0: plies[q] as f64 / n_ref,
            ..xi.panels[q]
        };
        let pair = g_blend_pair(&a, &b, n_ref);
        for (kind, g) in [(ConstraintKind::Blend0, pair.g0), (ConstraintKind::Blend1, pair.g1)] {
            max_blend = max_blend.max(g);
            if g > cfg.tolerance {
                violations.push(Violation {
                    kind,
                    panels: vec![p, q],
                    value: g,
                });
            }
        }
        let gap = delta_n_gap(plies[p], plies[q], cfg.dn_min, cfg.n_ref);
        max_ply_drop = max_ply_drop.max(gap);
        if gap > 0.0 {
            violations.push(Violation {
                kind: ConstraintKind::PlyDrop,
                panels: vec![p, q],
                value: gap,
            });
        }
    }
    let (lo, hi) = (cfg.min_plies(), cfg.n_ref);
    let in_bounds = plies.iter().all(|n| (lo..=hi).contains(n));
    Ok(DiscreteReport {
        objective: discrete_objective(xi, xi_c)?,
        feasible: violations.is_empty() && in_bounds,
        plies,
        evaluations,
        max_feasibility,
        max_blend,
        max_ply_drop,
        violations,
    })
}

fn check_edges(edges: &[Edge], len: usize) -> Result<()> {
    for &(p, q) in edges {
        if p >= len || q >= len {
            return Err(Error::DanglingEdge(p.to_string(), q.to_string()));
        }
    }
    Ok(())
}

/// Evaluated lattice point: total ply-drop violation, then distance.
#[derive(Debug, Clone)]
struct Eval {
    violation: f64,
    objective: f64,
    rho: Vec<f64>,
}

impl Eval {
    fn better_than(&self, other: &Eval) -> bool {
        (self.violation, self.objective) < (other.violation, other.objective)
    }

    fn no_worse_than(&self, other: &Eval) -> bool {
        (self.violation, self.objective) <= (other.violation, other.objective)
    }
}

struct Problem<'a> {
    xi_c: &'a DesignVector,
    edges: &'a [Edge],
    cfg: &'a DiscreteConfig,
    rho_c: Vec<f64>,
    phi1: Vec<f64>,
    lo: u32,
    hi: u32,
    neighbours: Vec<Vec<usize>>,
}

impl Problem<'_> {
    fn evaluate(&self, plies: &[u32]) -> Eval {
        let n_ref = self.cfg.n_ref as f64;
        let violation: f64 = self
            .edges
            .iter()
            .map(|&(p, q)| delta_n_gap(plies[p], plies[q], self.cfg.dn_min, self.cfg.n_ref).max(0.0))
            .sum();
        let n_term: f64 = plies
            .iter()
            .zip(&self.xi_c.panels)
            .map(|(&n, p)| (n as f64 / n_ref - p.n0).powi(2))
            .sum();
        let proj = projection::Projector::new(plies, &self.phi1, self.edges);
        let rho = proj.project(&self.rho_c);
        let r_term: f64 = rho.iter().zip(&self.rho_c).map(|(a, b)| (a - b).powi(2)).sum();
        Eval {
            violation,
            objective: n_term + r_term,
            rho,
        }
    }

    fn design(&self, plies: &[u32], rho: &[f64]) -> DesignVector {
        let n_ref = self.cfg.n_ref as f64;
        DesignVector::discrete(
            self.xi_c
                .panels
                .iter()
                .enumerate()
                .map(|(j, p)| PanelVars {
                    n0: plies[j] as f64 / n_ref,
                    rho0k: rho[2 * j],
                    rho1: rho[2 * j + 1],
                    phi1: p.phi1,
                })
                .collect(),
        )
    }

    fn lattice_size(&self) -> u128 {
        let per = (self.hi - self.lo + 1) as u128;
        let mut total: u128 = 1;
        for _ in 0..self.xi_c.len() {
            total = total.saturating_mul(per);
            if total > u64::MAX as u128 {
                break;
            }
        }
        total
    }

    fn clamp(&self, n: i64) -> u32 {
        n.clamp(self.lo as i64, self.hi as i64) as u32
    }

    /// Random neighbour of `plies`.
    fn propose(&self, plies: &[u32], rng: &mut ChaCha8Rng) -> Vec<u32> {
        let mut out = plies.to_vec();
        let j = rng.gen_range(0..plies.len());
        let mut delta = rng.gen_range(1..=self.cfg.radius) as i64;
        if rng.gen_bool(0.5) {
            delta = -delta;
        }
        match rng.gen_range(0..4) {
            // one panel
            0 => out[j] = self.clamp(plies[j] as i64 + delta),
            // snap onto a neighbour's count, or one minimum drop away from it
            1 if !self.neighbours[j].is_empty() => {
                let k = self.neighbours[j][rng.gen_range(0..self.neighbours[j].len())];
                let offset = match rng.gen_range(0..3) {
                    0 => 0,
                    1 => self.cfg.dn_min as i64,
                    _ => -(self.cfg.dn_min as i64),
                };
                out[j] = self.clamp(plies[k] as i64 + offset);
            }
            // a connected group of equal counts moves together
            2 => {
                for k in self.group(plies, j) {
                    out[k] = self.clamp(plies[k] as i64 + delta);
                }
            }
            // every panel
            _ => {
                for k in 0..out.len() {
                    out[k] = self.clamp(plies[k] as i64 + delta.signum());
                }
            }
        }
        out
    }

    fn group(&self, plies: &[u32], start: usize) -> Vec<usize> {
        let mut seen = HashSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(j) = queue.pop_front() {
            for &k in &self.neighbours[j] {
                if plies[k] == plies[start] && seen.insert(k) {
                    queue.push_back(k);
                }
            }
        }
        let mut out: Vec<usize> = seen.into_iter().collect();
        out.sort_unstable();
        out
    }

    fn random_point(&self, rng: &mut ChaCha8Rng) -> Vec<u32> {
        (0..self.xi_c.len()).map(|_| rng.gen_range(self.lo..=self.hi)).collect()
    }
}

/// Round `xi_c` to integer ply counts at minimal distance while satisfying
/// feasibility, blending (at the rounded counts) and minimum ply-drop
/// constraints. The search is deterministic for a given seed; when no
/// feasible point is found within the budget the best point found is
/// returned with its violations listed in the report.
pub fn solve_discrete(xi_c: &DesignVector, edges: &[Edge], cfg: &DiscreteConfig) -> Result<DiscreteSolution> {
    cfg.validate()?;
    check_edges(edges, xi_c.len())?;
    if let Some(j) = xi_c.panels.iter().position(|p| !p.within_bounds()) {
        return Err(Error::InvalidConfig(format!("panel {j} is outside the variable bounds")));
    }
    let mut neighbours = vec![Vec::new(); xi_c.len()];
    for &(p, q) in edges {
        if p != q {
            neighbours[p].push(q);
            neighbours[q].push(p);
        }
    }
    let problem = Problem {
        xi_c,
        edges,
        cfg,
        rho_c: xi_c.panels.iter().flat_map(|p| [p.rho0k, p.rho1]).collect(),
        phi1: xi_c.panels.iter().map(|p| p.phi1).collect(),
        lo: cfg.min_plies(),
        hi: cfg.n_ref,
        neighbours,
    };
    let start: Vec<u32> = xi_c.panels.iter().map(|p| problem.clamp(ceil_plies(p.n0, cfg.n_ref) as i64)).collect();

    if cfg.budget == 0 || xi_c.is_empty() {
        let design = DesignVector::discrete(
            xi_c.panels
                .iter()
                .zip(&start)
                .map(|(p, &n)| PanelVars {
                    n0: n as f64 / cfg.n_ref as f64,
                    ..*p
                })
                .collect(),
        );
        let report = check_design(&design, xi_c, edges, cfg, 0)?;
        return Ok(DiscreteSolution { design, report });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let lattice = problem.lattice_size();
    let mut cache: HashMap<Vec<u32>, Eval> = HashMap::new();
    let first = problem.evaluate(&start);
    cache.insert(start.clone(), first.clone());
    let (mut best_pt, mut best) = (start.clone(), first.clone());
    let (mut cur_pt, mut cur) = (start.clone(), first);
    let stall_limit = 40 + 10 * xi_c.len();
    let mut stall = 0usize;
    let mut steps = 0usize;
    let step_cap = cfg.budget.saturating_mul(100).max(10_000);
    let mut restart = 0u64;

    while cache.len() < cfg.budget && (cache.len() as u128) < lattice && steps < step_cap {
        steps += 1;
        let cand = problem.propose(&cur_pt, &mut rng);
        let eval = match cache.get(&cand) {
            Some(e) => e.clone(),
            None => {
                let e = problem.evaluate(&cand);
                cache.insert(cand.clone(), e.clone());
                e
            }
        };
        if eval.better_than(&best) {
            best = eval.clone();
            best_pt = cand.clone();
        }
        if eval.better_than(&cur) {
            stall = 0;
        } else {
            stall += 1;
        }
        if eval.no_worse_than(&cur) {
            cur = eval;
            cur_pt = cand;
        }
        if stall >= stall_limit {
            stall = 0;
            restart += 1;
            // alternate between the start point, a kick from the incumbent
            // and an unexplored lattice point
            cur_pt = match restart % 3 {
                0 => start.clone(),
                1 => {
                    let mut p = best_pt.clone();
                    for _ in 0..3 {
                        p = problem.propose(&p, &mut rng);
                    }
                    p
                }
                _ => {
                    let mut p = problem.random_point(&mut rng);
                    for _ in 0..64 {
                        if !cache.contains_key(&p) {
                            break;
                        }
                        p = problem.random_point(&mut rng);
                    }
                    p
                }
            };
            cur = match cache.get(&cur_pt) {
                Some(e) => e.clone(),
                None => {
                    let e = problem.evaluate(&cur_pt);
                    cache.insert(cur_pt.clone(), e.clone());
                    if e.better_than(&best) {
                        best = e.clone();
                        best_pt = cur_pt.clone();
                    }
                    e
                }
            };
        }
    }

    let design = problem.design(&best_pt, &best.rho);
    let report = check_design(&design, xi_c, edges, cfg, cache.len())?;
    Ok(DiscreteSolution { design, report })
}
