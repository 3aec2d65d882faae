//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use clarabel::algebra::CscMatrix;
use clarabel::solver::{DefaultSettingsBuilder, DefaultSolver, IPSolver, SolverStatus, SupportedConeT};
use polarblend::discrete::{DesignVector, DiscreteConfig};
use polarblend::recovery::TargetPolar;
use polarblend::PlyMaterial;

/// Nearest `(rho0K, rho1)` vector under the discrete-problem constraints for
/// fixed ply counts, solved as a conic program. All panels must have
/// `phi1 = 0`, so that the blending constraints are linear.
pub fn conic_projection(rho_c: &[f64], plies: &[u32], edges: &[(usize, usize)]) -> Vec<f64> {
    let n = rho_c.len();
    let p = CscMatrix::new(n, n, (0..=n).collect(), (0..n).collect(), vec![2.0; n]);
    let q: Vec<f64> = rho_c.iter().map(|r| -2.0 * r).collect();

    let mut zero_rows: Vec<(Vec<f64>, f64)> = Vec::new();
    let mut nonneg_rows: Vec<(Vec<f64>, f64)> = Vec::new();
    for i in 0..n {
        let lo = if i % 2 == 0 { -1.0 } else { 0.0 };
        let mut up = vec![0.0; n];
        up[i] = 1.0;
        nonneg_rows.push((up, 1.0));
        let mut down = vec![0.0; n];
        down[i] = -1.0;
        nonneg_rows.push((down, -lo));
    }
    for &(a, b) in edges {
        let (na, nb) = (plies[a] as f64, plies[b] as f64);
        let r = (na - nb).abs();
        for h in 0..2 {
            let mut row = vec![0.0; n];
            row[2 * a + h] = na;
            row[2 * b + h] = -nb;
            if r == 0.0 {
                zero_rows.push((row, 0.0));
            } else {
                let neg: Vec<f64> = row.iter().map(|v| -v).collect();
                nonneg_rows.push((row, r));
                nonneg_rows.push((neg, r));
            }
        }
    }
    // 2 rho1² <= rho0K + 1  <=>  |(2√2 rho1, rho0K)| <= rho0K + 2
    let mut soc_rows: Vec<(Vec<f64>, f64)> = Vec::new();
    for j in 0..n / 2 {
        let mut r0 = vec![0.0; n];
        r0[2 * j] = -1.0;
        soc_rows.push((r0.clone(), 2.0));
        let mut r1 = vec![0.0; n];
        r1[2 * j + 1] = -2.0 * 2f64.sqrt();
        soc_rows.push((r1, 0.0));
        soc_rows.push((r0, 0.0));
    }

    let mut cones = Vec::new();
    if !zero_rows.is_empty() {
        cones.push(SupportedConeT::ZeroConeT(zero_rows.len()));
    }
    cones.push(SupportedConeT::NonnegativeConeT(nonneg_rows.len()));
    for _ in 0..n / 2 {
        cones.push(SupportedConeT::SecondOrderConeT(3));
    }
    let rows: Vec<(Vec<f64>, f64)> = zero_rows.into_iter().chain(nonneg_rows).chain(soc_rows).collect();
    let dense: Vec<Vec<f64>> = rows.iter().map(|(r, _)| r.clone()).collect();
    let a = CscMatrix::from(dense.iter().map(|r| r.iter()));
    let b: Vec<f64> = rows.iter().map(|(_, v)| *v).collect();

    let settings = DefaultSettingsBuilder::default()
        .verbose(false)
        .tol_gap_abs(1e-13)
        .tol_gap_rel(1e-13)
        .tol_feas(1e-13)
        .tol_ktratio(1e-10)
        .max_iter(500)
        .build()
        .unwrap();
    let mut solver = DefaultSolver::new(&p, &q, &a, &b, &cones, settings);
    solver.solve();
    assert!(
        matches!(solver.solution.status, SolverStatus::Solved | SolverStatus::AlmostSolved),
        "conic oracle failed: {:?}",
        solver.solution.status
    );
    solver.solution.x.clone()
}

/// Exhaustive optimum of the discrete problem: every ply-count vector in the
/// lattice that satisfies the minimum-drop rule, each with its exact conic
/// projection.
pub fn brute_force_discrete(xi_c: &DesignVector, edges: &[(usize, usize)], cfg: &DiscreteConfig) -> Option<(f64, Vec<u32>)> {
    let lo = (0.2 * cfg.n_ref as f64 - 1e-9).ceil() as u32;
    let hi = cfg.n_ref;
    let rho_c: Vec<f64> = xi_c.panels.iter().flat_map(|p| [p.rho0k, p.rho1]).collect();
    let k = xi_c.panels.len();
    let mut plies = vec![lo; k];
    let mut best: Option<(f64, Vec<u32>)> = None;
    loop {
        let drops_ok = edges.iter().all(|&(a, b)| {
            let d = plies[a].abs_diff(plies[b]);
            d == 0 || d >= cfg.dn_min
        });
        if drops_ok {
            let n_term: f64 = plies
                .iter()
                .zip(&xi_c.panels)
                .map(|(&n, p)| (n as f64 / cfg.n_ref as f64 - p.n0).powi(2))
                .sum();
            if best.as_ref().is_none_or(|(b, _)| n_term < *b) {
                let rho = conic_projection(&rho_c, &plies, edges);
                let r_term: f64 = rho.iter().zip(&rho_c).map(|(a, b)| (a - b).powi(2)).sum();
                let total = n_term + r_term;
                if best.as_ref().is_none_or(|(b, _)| total < *b) {
                    best = Some((total, plies.clone()));
                }
            }
        }
        // odometer increment
        let mut i = 0;
        loop {
            if i == k {
                return best;
            }
            if plies[i] < hi {
                plies[i] += 1;
                break;
            }
            plies[i] = lo;
            i += 1;
        }
    }
}

type M3 = [[f64; 3]; 3];

/// Cartesian ply stiffness in Voigt form with engineering shear, built from
/// the polar moduli.
fn ply_matrix(t0: f64, t1: f64, r0: f64, r1: f64) -> M3 {
    let q11 = t0 + 2.0 * t1 + r0 + 4.0 * r1;
    let q22 = t0 + 2.0 * t1 + r0 - 4.0 * r1;
    let q12 = -t0 + 2.0 * t1 - r0;
    let q66 = t0 - r0;
    [[q11, q12, 0.0], [q12, q22, 0.0], [0.0, 0.0, q66]]
}

/// Classical rotation of the reduced stiffness into the laminate frame.
fn rotate(q: &M3, deg: f64) -> M3 {
    let (s, c) = deg.to_radians().sin_cos();
    let (c2, s2, cs) = (c * c, s * s, c * s);
    let t = [[c2, s2, 2.0 * cs], [s2, c2, -2.0 * cs], [-cs, cs, c2 - s2]];
    // Qbar = T^-1 Q R T R^-1, with R the Reuter matrix
    let t_inv = [[c2, s2, -2.0 * cs], [s2, c2, 2.0 * cs], [cs, -cs, c2 - s2]];
    let r = [1.0, 1.0, 2.0];
    let mut tr = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            tr[i][j] = r[i] * t[i][j] / r[j];
        }
    }
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                for l in 0..3 {
                    out[i][j] += t_inv[i][k] * q[k][l] * tr[l][j];
                }
            }
        }
    }
    out
}

fn frob(m: &M3) -> f64 {
    m.iter().flatten().map(|v| v * v).sum::<f64>().sqrt()
}

fn circ(x: f64, y: f64, period: f64) -> f64 {
    let mut d = (x - y) % period;
    if d < 0.0 {
        d += period;
    }
    d.min(period - d)
}

/// Six-term residual total of a stack, computed through explicit ply
/// coordinates and classical rotations.
pub fn oracle_residual(angles: &[i32], m: &PlyMaterial, target: &TargetPolar) -> f64 {
    let p = &m.polar_q;
    let q = ply_matrix(p.t0, p.t1, p.r0, p.r1);
    let n = angles.len() as f64;
    let (mut a, mut b, mut d) = ([[0.0; 3]; 3], [[0.0; 3]; 3], [[0.0; 3]; 3]);
    for (k, &theta) in angles.iter().enumerate() {
        let qb = rotate(&q, theta as f64);
        let (z0, z1) = (k as f64 - n / 2.0, k as f64 + 1.0 - n / 2.0);
        for i in 0..3 {
            for j in 0..3 {
                a[i][j] += qb[i][j] * (z1 - z0) / n;
                b[i][j] += qb[i][j] * (z1 * z1 - z0 * z0) / (n * n);
                d[i][j] += qb[i][j] * 4.0 * (z1.powi(3) - z0.powi(3)) / (n * n * n);
            }
        }
    }
    let mut c = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = a[i][j] - d[i][j];
        }
    }
    let norm_m = (p.t0 * p.t0 + 2.0 * p.t1 * p.t1 + p.r0 * p.r0 + 4.0 * p.r1 * p.r1).sqrt();

    // membrane polar set; A66 is the engineering-shear entry, equal to L1212
    let (a11, a22, a12, a16, a26, a66) = (a[0][0], a[1][1], a[0][1], a[0][2], a[1][2], a[2][2]);
    let t0 = (a11 + a22 - 2.0 * a12 + 4.0 * a66) / 8.0;
    let (x0, y0) = ((a11 + a22 - 2.0 * a12 - 4.0 * a66) / 8.0, (a16 - a26) / 2.0);
    let (x1, y1) = ((a11 - a22) / 8.0, (a16 + a26) / 4.0);
    let r0 = x0.hypot(y0);
    let r1 = x1.hypot(y1);
    let deg0 = r0 < 1e-9 * t0;
    let deg1 = r1 < 1e-9 * t0;
    // angles in units of 90 degrees
    let phi0 = if deg0 { 0.0 } else { y0.atan2(x0).to_degrees() / 4.0 / 90.0 };
    let phi1 = if deg1 { 0.0 } else { y1.atan2(x1).to_degrees() / 2.0 / 90.0 };
    let k = target.k as f64;
    let r3 = if deg0 {
        0.0
    } else if deg1 {
        circ(2.0 * (phi0 - target.phi1), k, 2.0)
    } else {
        circ(2.0 * (phi0 - phi1), k, 2.0)
    };
    let r6 = if deg1 { 0.0 } else { circ(phi1, target.phi1, 2.0) };
    let r = [
        frob(&b) / norm_m,
        frob(&c) / norm_m,
        r3,
        (r0 / p.r0 - target.rho0).abs(),
        (r1 / p.r1 - target.rho1).abs(),
        r6,
    ];
    r.iter().map(|v| v * v).sum()
}

/// Minimum residual over every stack of `n` plies drawn from `grid`.
pub fn brute_force_recovery(n: usize, grid: &[i32], m: &PlyMaterial, target: &TargetPolar) -> (f64, Vec<i32>) {
    let mut idx = vec![0usize; n];
    let mut best = (f64::INFINITY, Vec::new());
    loop {
        let angles: Vec<i32> = idx.iter().map(|&i| grid[i]).collect();
        let r = oracle_residual(&angles, m, target);
        if r < best.0 {
            best = (r, angles);
        }
        let mut pos = 0;
        loop {
            if pos == n {
                return best;
            }
            idx[pos] += 1;
            if idx[pos] < grid.len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}
