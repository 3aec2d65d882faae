use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::residual::residual_terms;
use super::scheme::{assemble_stacks, assemble_tails, Layout};
use super::{residuals, BlendingScheme, NormKind, ResidualBreakdown, TargetPolar};
use crate::error::{Error, Result};
use crate::material::PlyMaterial;
use crate::polar::{quad_from_polar, QuadTensor};
use crate::stack::{coefficients_unchecked, StackingSequence};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    /// Orientation grid step (deg); must divide 180.
    pub step_deg: u32,
    pub population: usize,
    /// Number of elite solutions offspring are drawn from.
    pub kernel: usize,
    /// Residual evaluations per independent run.
    pub budget: u64,
    pub seed: u64,
    /// Independent runs with separate random streams, best one kept.
    pub restarts: usize,
    /// Generations without improvement before the population is reseeded.
    pub stall_generations: usize,
    pub norm: NormKind,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            step_deg: 1,
            population: 100,
            kernel: 20,
            budget: 1_000_000,
            seed: 0,
            restarts: 1,
            stall_generations: 200,
            norm: NormKind::Frobenius,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.step_deg == 0 || 180 % self.step_deg != 0 {
            return Err(Error::InvalidConfig(format!("grid step {} does not divide 180", self.step_deg)));
        }
        if self.population == 0 || self.kernel == 0 || self.restarts == 0 || self.stall_generations == 0 {
            return Err(Error::InvalidConfig("population, kernel, restarts and stall_generations must be positive".into()));
        }
        Ok(())
    }

    /// Grid orientations, from `-90 + step` to 90.
    pub fn grid(&self) -> Vec<i32> {
        let step = self.step_deg as i32;
        (1..=180 / step).map(|i| -90 + i * step).collect()
    }
}

/// Laminates recovered together, with targets in scheme panel order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Subproblem {
    pub targets: Vec<TargetPolar>,
    pub scheme: BlendingScheme,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryResult {
    pub ids: Vec<String>,
    pub stacks: Vec<StackingSequence>,
    pub residuals: Vec<ResidualBreakdown>,
    pub total: f64,
    pub orientations: Vec<i32>,
    /// Evaluations used by the run that produced the result.
    pub evaluations: u64,
    /// `(evaluation, best total)` at every improvement of that run.
    pub history: Vec<(u64, f64)>,
}

/// Grid-indexed residual evaluation of a whole scheme.
struct Evaluator<'a> {
    scheme: &'a BlendingScheme,
    layout: Layout,
    targets: &'a [TargetPolar],
    material: &'a PlyMaterial,
    norm: NormKind,
    /// Voigt components of the ply stiffness at each grid orientation.
    table: Vec<[f64; 6]>,
    coeffs: Vec<Vec<(f64, f64)>>,
}

impl Evaluator<'_> {
    fn total(&self, x: &[u16], tails: &mut Vec<Vec<i32>>) -> f64 {
        // tails hold grid indices here, stored as i32
        let vars: Vec<i32> = x.iter().map(|&v| v as i32).collect();
        assemble_tails(&vars, self.scheme, &self.layout, tails);
        let cover = &vars[..self.scheme.covering];
        let mut sum = 0.0;
        for (j, tail) in tails.iter().enumerate() {
            let n = self.scheme.panels[j].plies as f64;
            let (mut a, mut b, mut d) = ([0.0; 6], [0.0; 6], [0.0; 6]);
            for (k, &g) in cover.iter().chain(tail.iter()).enumerate() {
                let q = &self.table[g as usize];
                let (bk, dk) = self.coeffs[j][k];
                for m in 0..6 {
                    a[m] += q[m];
                    b[m] += bk * q[m];
                    d[m] += dk * q[m];
                }
            }
            let tensor = |v: [f64; 6], s: f64| QuadTensor::from_components(v[0] * s, v[1] * s, v[2] * s, v[3] * s, v[4] * s, v[5] * s);
            let a = tensor(a, 1.0 / n);
            let b = tensor(b, 1.0 / (n * n));
            let d = tensor(d, 1.0 / (n * n * n));
            let c = QuadTensor(a.0 - d.0);
            let r = residual_terms(&a.polar(), self.norm.apply(&b), self.norm.apply(&c), &self.material.polar_q, &self.targets[j]);
            sum += r.total;
        }
        sum
    }
}

struct Run {
    best: Vec<u16>,
    total: f64,
    evaluations: u64,
    history: Vec<(u64, f64)>,
}

fn run(eval: &Evaluator, cfg: &SearchConfig, stream: u64) -> Run {
    let n = eval.layout.independent;
    let g = eval.table.len() as u16;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(stream);
    let mut tails = Vec::new();
    let mut evaluations = 0u64;
    let random = |rng: &mut ChaCha8Rng| -> Vec<u16> { (0..n).map(|_| rng.gen_range(0..g)).collect() };

    let first = random(&mut rng);
    if cfg.budget == 0 {
        let total = eval.total(&first, &mut tails);
        return Run {
            best: first,
            total,
            evaluations: 0,
            history: Vec::new(),
        };
    }
    // elite archive, sorted by total
    let mut kernel: Vec<(f64, Vec<u16>)> = Vec::with_capacity(cfg.kernel + 1);
    let mut history = Vec::new();
    let mut best = (f64::INFINITY, first.clone());
    let mut stall = 0usize;
    let mut pending = vec![first];

    let insert = |kernel: &mut Vec<(f64, Vec<u16>)>, total: f64, x: Vec<u16>| {
        if kernel.len() == cfg.kernel && total >= kernel[kernel.len() - 1].0 {
            return;
        }
        if kernel.iter().any(|(t, y)| *t == total && *y == x) {
            return;
        }
        let pos = kernel.partition_point(|(t, _)| *t <= total);
        kernel.insert(pos, (total, x));
        kernel.truncate(cfg.kernel);
    };

    'search: loop {
        // a generation: fresh random points first, then offspring of the kernel
        while pending.len() < cfg.population && kernel.len() < cfg.kernel.min(2) + pending.len() {
            pending.push(random(&mut rng));
        }
        let mut improved = false;
        for i in 0..cfg.population {
            let x = if i < pending.len() {
                std::mem::take(&mut pending[i])
            } else {
                offspring(&kernel, n, g, &mut rng)
            };
            if evaluations == cfg.budget {
                break 'search;
            }
            let total = eval.total(&x, &mut tails);
            evaluations += 1;
            if total < best.0 {
                best = (total, x.clone());
                history.push((evaluations, total));
                improved = true;
            }
            insert(&mut kernel, total, x);
        }
        pending.clear();
        if improved {
            stall = 0;
        } else {
            stall += 1;
        }
        if best.0 < 1e-24 {
            break;
        }
        if stall >= cfg.stall_generations {
            // reseed around nothing but the incumbent
            stall = 0;
            kernel.truncate(1);
            pending = (0..cfg.population / 2).map(|_| random(&mut rng)).collect();
        }
    }
    Run {
        best: best.1,
        total: best.0,
        evaluations,
        history,
    }
}

fn offspring(kernel: &[(f64, Vec<u16>)], n: usize, g: u16, rng: &mut ChaCha8Rng) -> Vec<u16> {
    let pick = |rng: &mut ChaCha8Rng| {
        let u: f64 = rng.gen();
        ((u * u) * kernel.len() as f64) as usize
    };
    let mut x = kernel[pick(rng)].1.clone();
    if n == 0 {
        return x;
    }
    if kernel.len() > 1 && rng.gen_bool(0.15) {
        let other = &kernel[pick(rng)].1;
        for (xi, oi) in x.iter_mut().zip(other) {
            if rng.gen_bool(0.5) {
                *xi = *oi;
            }
        }
    }
    let mut changes = 1;
    while changes < n && rng.gen_bool(0.5) {
        changes += 1;
    }
    for _ in 0..changes {
        let i = rng.gen_range(0..n);
        x[i] = if rng.gen_bool(0.7) {
            let reach = (g / 30).max(3) as i32;
            let mut step = rng.gen_range(1..=reach);
            if rng.gen_bool(0.5) {
                step = -step;
            }
            (x[i] as i32 + step).rem_euclid(g as i32) as u16
        } else {
            rng.gen_range(0..g)
        };
    }
    x
}

/// Search the orientation grid for the blended family of stacks with the
/// lowest summed residual. Blending holds by construction through the
/// scheme. The run is deterministic for a given seed, and the best total is
/// non-increasing in the budget.
pub fn recover(sub: &Subproblem, material: &PlyMaterial, cfg: &SearchConfig) -> Result<RecoveryResult> {
    cfg.validate()?;
    let layout = sub.scheme.layout()?;
    if sub.targets.len() != sub.scheme.panels.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} targets for {} scheme panels",
            sub.targets.len(),
            sub.scheme.panels.len()
        )));
    }
    for (t, p) in sub.targets.iter().zip(&sub.scheme.panels) {
        if t.plies != p.plies {
            return Err(Error::DimensionMismatch(format!("panel {} has {} plies but its target asks for {}", p.id, p.plies, t.plies)));
        }
    }
    let grid = cfg.grid();
    let table = grid
        .iter()
        .map(|&a| {
            let q = quad_from_polar(&material.polar_q, a as f64);
            [q.l1111(), q.l2222(), q.l1122(), q.l1112(), q.l2212(), q.l1212()]
        })
        .collect();
    let coeffs = sub
        .scheme
        .panels
        .iter()
        .map(|p| {
            let n = p.plies as i64;
            (1..=n)
                .map(|k| {
                    let (b, d, _) = coefficients_unchecked(k, n);
                    (b as f64, d as f64)
                })
                .collect()
        })
        .collect();
    let eval = Evaluator {
        scheme: &sub.scheme,
        layout,
        targets: &sub.targets,
        material,
        norm: cfg.norm,
        table,
        coeffs,
    };

    let runs: Vec<Run> = if cfg.restarts == 1 {
        vec![run(&eval, cfg, 0)]
    } else {
        std::thread::scope(|s| {
            let handles: Vec<_> = (0..cfg.restarts).map(|r| s.spawn({
                let eval = &eval;
                move || run(eval, cfg, r as u64)
            })).collect();
            handles.into_iter().map(|h| h.join().expect("search thread panicked")).collect()
        })
    };
    // lowest total wins, earlier stream on ties
    let best = runs
        .into_iter()
        .reduce(|a, b| if b.total < a.total { b } else { a })
        .expect("at least one run");

    let orientations: Vec<i32> = best.best.iter().map(|&i| grid[i as usize]).collect();
    let stacks = assemble_stacks(&orientations, &sub.scheme)?;
    let res: Vec<ResidualBreakdown> = stacks
        .iter()
        .zip(&sub.targets)
        .map(|(s, t)| residuals(s, material, t, cfg.norm))
        .collect();
    Ok(RecoveryResult {
        ids: sub.scheme.panels.iter().map(|p| p.id.clone()).collect(),
        total: res.iter().map(|r| r.total).sum(),
        stacks,
        residuals: res,
        orientations,
        evaluations: best.evaluations,
        history: best.history,
    })
}
