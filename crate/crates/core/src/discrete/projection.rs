//! Euclidean projection of the anisotropy variables onto the constraint set
//! left once every panel's ply count is fixed.
//!
//! With integer ply counts and fixed polar angles the set is convex: a box,
//! one parabolic region per panel (`rho0K >= 2 rho1² - 1`) and one ellipse
//! (or slab) per edge and harmonic. Dykstra's alternating projections
//! converge to the exact projection onto the intersection.

use crate::criteria::Edge;
use crate::polar::sin_cos_deg;

/// Variables are stored interleaved: `x[2j] = rho0K_j`, `x[2j + 1] = rho1_j`.
#[derive(Debug, Clone)]
enum Set {
    Box,
    Feasible(usize),
    /// `|n_p x_i u_p - n_q x_k u_q| <= r` on coordinates `(i, k)`.
    Blend {
        i: usize,
        k: usize,
        shape: PairShape,
    },
}

#[derive(Debug, Clone)]
struct PairShape {
    /// eigenvalues and eigenvectors (columns) of MᵀM
    lambda: [f64; 2],
    v: [[f64; 2]; 2],
    r: f64,
}

impl PairShape {
    fn new(np: f64, nq: f64, up: (f64, f64), uq: (f64, f64)) -> Self {
        let cos = up.0 * uq.0 + up.1 * uq.1;
        let (a, b, d) = (np * np, -np * nq * cos, nq * nq);
        let mean = (a + d) / 2.0;
        let half = ((a - d) / 2.0).hypot(b);
        let (l0, l1) = (mean + half, (mean - half).max(0.0));
        let v0 = if b == 0.0 {
            if a >= d {
                [1.0, 0.0]
            } else {
                [0.0, 1.0]
            }
        } else {
            let (x, y) = (l0 - d, b);
            let n = x.hypot(y);
            [x / n, y / n]
        };
        let v1 = [-v0[1], v0[0]];
        // rank-one case: the null direction is exact
        let l1 = if l1 <= 1e-13 * l0 { 0.0 } else { l1 };
        PairShape {
            lambda: [l0, l1],
            v: [v0, v1],
            r: (np - nq).abs(),
        }
    }

    fn project(&self, z: [f64; 2]) -> [f64; 2] {
        let y = [
            self.v[0][0] * z[0] + self.v[0][1] * z[1],
            self.v[1][0] * z[0] + self.v[1][1] * z[1],
        ];
        let q = |mu: f64| -> f64 {
            (0..2)
                .map(|i| self.lambda[i] * y[i] * y[i] / ((1.0 + mu * self.lambda[i]).powi(2)))
                .sum()
        };
        let r2 = self.r * self.r;
        if q(0.0) <= r2 {
            return z;
        }
        let yy = if self.r == 0.0 {
            [
                if self.lambda[0] == 0.0 { y[0] } else { 0.0 },
                if self.lambda[1] == 0.0 { y[1] } else { 0.0 },
            ]
        } else {
            let mu = if self.lambda[1] == 0.0 {
                ((self.lambda[0].sqrt() * y[0].abs() / self.r) - 1.0) / self.lambda[0]
            } else {
                solve_multiplier(&q, r2)
            };
            [
                y[0] / (1.0 + mu * self.lambda[0]),
                y[1] / (1.0 + mu * self.lambda[1]),
            ]
        };
        [
            self.v[0][0] * yy[0] + self.v[1][0] * yy[1],
            self.v[0][1] * yy[0] + self.v[1][1] * yy[1],
        ]
    }
}

/// Root of the decreasing function `q(mu) = r2` for `mu > 0`.
fn solve_multiplier(q: &dyn Fn(f64) -> f64, r2: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, 1.0);
    while q(hi) > r2 {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if q(mid) > r2 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Nearest point of `{(a, b) : a >= 2 b² - 1}` to `(a, b)`.
pub(crate) fn project_feasible(a: f64, b: f64) -> (f64, f64) {
    if a >= 2.0 * b * b - 1.0 {
        return (a, b);
    }
    // stationary points of |(2t² - 1, t) - (a, b)|²: 8t³ - (3 + 4a) t - b = 0
    let p = -(3.0 + 4.0 * a) / 8.0;
    let q = -b / 8.0;
    let dist = |t: f64| (2.0 * t * t - 1.0 - a).powi(2) + (t - b).powi(2);
    let best = depressed_cubic_roots(p, q)
        .into_iter()
        .map(|t| polish(t, p, q))
        .min_by(|x, y| dist(*x).total_cmp(&dist(*y)))
        .unwrap_or(b);
    (2.0 * best * best - 1.0, best)
}

fn polish(mut t: f64, p: f64, q: f64) -> f64 {
    for _ in 0..3 {
        let f = t * t * t + p * t + q;
        let df = 3.0 * t * t + p;
        if df == 0.0 {
            break;
        }
        let next = t - f / df;
        if !next.is_finite() {
            break;
        }
        t = next;
    }
    t
}

/// Real roots of `t³ + p t + q = 0`.
fn depressed_cubic_roots(p: f64, q: f64) -> Vec<f64> {
    let disc = (q / 2.0).powi(2) + (p / 3.0).powi(3);
    if disc > 0.0 {
        let s = disc.sqrt();
        vec![(-q / 2.0 + s).cbrt() + (-q / 2.0 - s).cbrt()]
    } else if p == 0.0 {
        vec![0.0]
    } else {
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        (0..3)
            .map(|k| m * (theta - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos())
            .collect()
    }
}

fn project_box(x: &mut [f64]) {
    for (i, v) in x.iter_mut().enumerate() {
        let lo = if i % 2 == 0 { -1.0 } else { 0.0 };
        *v = v.clamp(lo, 1.0);
    }
}

/// Projection problem for one vector of ply counts.
pub(crate) struct Projector {
    sets: Vec<Set>,
    len: usize,
}

impl Projector {
    /// `plies[j]` is the ply count of panel `j`, `phi1[j]` its normalised
    /// polar angle.
    pub fn new(plies: &[u32], phi1: &[f64], edges: &[Edge]) -> Self {
        let mut sets = vec![Set::Box];
        sets.extend((0..plies.len()).map(Set::Feasible));
        for &(p, q) in edges {
            let (np, nq) = (plies[p] as f64, plies[q] as f64);
            for (harm, m) in [(0, 4.0), (1, 2.0)] {
                let (sp, cp) = sin_cos_deg(m * 90.0 * phi1[p]);
                let (sq, cq) = sin_cos_deg(m * 90.0 * phi1[q]);
                sets.push(Set::Blend {
                    i: 2 * p + harm,
                    k: 2 * q + harm,
                    shape: PairShape::new(np, nq, (cp, sp), (cq, sq)),
                });
            }
        }
        Projector {
            sets,
            len: 2 * plies.len(),
        }
    }

    /// Nearest point of the intersection to `x0`.
    pub fn project(&self, x0: &[f64]) -> Vec<f64> {
        assert_eq!(x0.len(), self.len);
        let mut x = x0.to_vec();
        if self.contains(&x, 0.0) {
            return x;
        }
        // Dykstra increments, one per set on the coordinates it touches
        let mut inc: Vec<Vec<f64>> = self
            .sets
            .iter()
            .map(|s| match s {
                Set::Box => vec![0.0; self.len],
                _ => vec![0.0; 2],
            })
            .collect();
        for cycle in 0..200_000 {
            let mut change = 0.0;
            for (set, y) in self.sets.iter().zip(inc.iter_mut()) {
                match set {
                    Set::Box => {
                        let z: Vec<f64> = x.iter().zip(y.iter()).map(|(a, b)| a + b).collect();
                        let mut p = z.clone();
                        project_box(&mut p);
                        for i in 0..self.len {
                            let ny = z[i] - p[i];
                            change += (ny - y[i]).powi(2) + (p[i] - x[i]).powi(2);
                            y[i] = ny;
                            x[i] = p[i];
                        }
                    }
                    Set::Feasible(j) => {
                        let (i0, i1) = (2 * j, 2 * j + 1);
                        let z = [x[i0] + y[0], x[i1] + y[1]];
                        let (a, b) = project_feasible(z[0], z[1]);
                        change += update(&mut x, y, [i0, i1], z, [a, b]);
                    }
                    Set::Blend { i, k, shape } => {
                        let z = [x[*i] + y[0], x[*k] + y[1]];
                        let p = shape.project(z);
                        change += update(&mut x, y, [*i, *k], z, p);
                    }
                }
            }
            if change < 1e-30 && cycle > 0 {
                break;
            }
        }
        x
    }

    /// Whether `x` satisfies every set to within `tol`.
    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.sets.iter().all(|s| match s {
            Set::Box => x.iter().enumerate().all(|(i, v)| {
                let lo = if i % 2 == 0 { -1.0 } else { 0.0 };
                *v >= lo - tol && *v <= 1.0 + tol
            }),
            Set::Feasible(j) => 2.0 * x[2 * j + 1].powi(2) - 1.0 - x[2 * j] <= tol,
            Set::Blend { i, k, shape } => {
                let y0 = shape.v[0][0] * x[*i] + shape.v[0][1] * x[*k];
                let y1 = shape.v[1][0] * x[*i] + shape.v[1][1] * x[*k];
                let q = shape.lambda[0] * y0 * y0 + shape.lambda[1] * y1 * y1;
                q <= shape.r * shape.r + tol
            }
        })
    }
}

fn update(x: &mut [f64], y: &mut [f64], idx: [usize; 2], z: [f64; 2], p: [f64; 2]) -> f64 {
    let mut change = 0.0;
    for m in 0..2 {
        let ny = z[m] - p[m];
        change += (ny - y[m]).powi(2) + (p[m] - x[idx[m]]).powi(2);
        y[m] = ny;
        x[idx[m]] = p[m];
    }
    change
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn feasible_points_are_fixed() {
        assert_eq!(project_feasible(0.5, 0.3), (0.5, 0.3));
        assert_eq!(project_feasible(-1.0, 0.0), (-1.0, 0.0));
    }

    #[test]
    fn projection_onto_parabola_vertex() {
        let (a, b) = project_feasible(-2.0, 0.0);
        assert_abs_diff_eq!(a, -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(b, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn slab_projection() {
        // |10 a - 8 b| <= 2
        let s = PairShape::new(10.0, 8.0, (1.0, 0.0), (1.0, 0.0));
        let p = s.project([0.5, 0.25]);
        assert_abs_diff_eq!(10.0 * p[0] - 8.0 * p[1], 2.0, epsilon = 1e-12);
        // moved along the normal (10, -8)
        let d = [p[0] - 0.5, p[1] - 0.25];
        assert_abs_diff_eq!(d[0] * 8.0 + d[1] * 10.0, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn equal_counts_force_equal_values() {
        let s = PairShape::new(6.0, 6.0, (1.0, 0.0), (1.0, 0.0));
        let p = s.project([0.2, 0.6]);
        assert_abs_diff_eq!(p[0], 0.4, epsilon = 1e-12);
        assert_abs_diff_eq!(p[1], 0.4, epsilon = 1e-12);
    }

    proptest! {
        #[test]
        fn parabola_projection_is_optimal(a in -3.0..1.0f64, b in -1.5..1.5f64) {
            let (pa, pb) = project_feasible(a, b);
            prop_assert!(pa >= 2.0 * pb * pb - 1.0 - 1e-12);
            let d = (pa - a).powi(2) + (pb - b).powi(2);
            // no sampled boundary point is closer
            for i in 0..=400 {
                let t = -2.0 + i as f64 * 0.01;
                let e = (2.0 * t * t - 1.0 - a).powi(2) + (t - b).powi(2);
                prop_assert!(d <= e + 1e-12);
            }
        }

        #[test]
        fn ellipse_projection_lands_on_the_set(z0 in -2.0..2.0f64, z1 in -2.0..2.0f64, f in -1.0..1.0f64, np in 1u32..20, nq in 1u32..20) {
            let (s, c) = sin_cos_deg(360.0 * f);
            let shape = PairShape::new(np as f64, nq as f64, (1.0, 0.0), (c, s));
            let p = shape.project([z0, z1]);
            let v = [np as f64 * p[0] - nq as f64 * p[1] * c, -(nq as f64) * p[1] * s];
            let norm = v[0].hypot(v[1]);
            prop_assert!(norm <= shape.r + 1e-9 * (1.0 + shape.r));
        }
    }
}
