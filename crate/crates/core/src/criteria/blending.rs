use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::Edge;
use crate::error::{Error, Result};
use crate::laminate::PanelVars;
use crate::polar::sin_cos_deg;

/// Partial derivatives of one blending constraint with respect to the
/// variables of each panel, ordered `(n0, rho, phi1)` where `rho` is `rho0K`
/// for `g0` and `rho1` for `g1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairGradient {
    pub p: [f64; 3],
    pub q: [f64; 3],
}

/// Blending constraints between two adjacent panels, in squared-ply units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlendingPair {
    pub g0: f64,
    pub g1: f64,
    pub grad_g0: PairGradient,
    pub grad_g1: PairGradient,
}

/// One harmonic of the blending constraint:
/// `|N_p rho_p e^{i m Phi1_p} - N_q rho_q e^{i m Phi1_q}|² - (N_p - N_q)²`.
fn harmonic(np: f64, rp: f64, php: f64, nq: f64, rq: f64, phq: f64, m: f64, n_ref: f64) -> (f64, PairGradient) {
    // m * Phi1 in degrees, with Phi1 = 90 phi1
    let (sp, cp) = sin_cos_deg(m * 90.0 * php);
    let (sq, cq) = sin_cos_deg(m * 90.0 * phq);
    let x = np * rp * cp - nq * rq * cq;
    let y = np * rp * sp - nq * rq * sq;
    let dn = np - nq;
    let g = x * x + y * y - dn * dn;
    // d(m Phi1)/d phi1 in radians
    let w = m * PI / 2.0;
    let side = |n: f64, r: f64, c: f64, s: f64, sign: f64| {
        [
            sign * 2.0 * n_ref * (x * r * c + y * r * s - dn),
            sign * 2.0 * n * (x * c + y * s),
            sign * 2.0 * n * r * w * (y * c - x * s),
        ]
    };
    let grad = PairGradient {
        p: side(np, rp, cp, sp, 1.0),
        q: side(nq, rq, cq, sq, -1.0),
    };
    (g, grad)
}

/// Blending constraints between two panels whose ply counts are
/// `n0 * n_ref`. The harmonics use `4 Phi1` for the `rho0K` term and `2 Phi1`
/// for the `rho1` term of each panel.
pub fn g_blend_pair(p: &PanelVars, q: &PanelVars, n_ref: f64) -> BlendingPair {
    let (np, nq) = (p.n0 * n_ref, q.n0 * n_ref);
    let (g0, grad_g0) = harmonic(np, p.rho0k, p.phi1, nq, q.rho0k, q.phi1, 4.0, n_ref);
    let (g1, grad_g1) = harmonic(np, p.rho1, p.phi1, nq, q.rho1, q.phi1, 2.0, n_ref);
    BlendingPair { g0, g1, grad_g0, grad_g1 }
}

/// Grouped blending constraint over a panel graph.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlendAggregate {
    /// Largest `g0` or `g1` over all edges; `-inf` when there are no edges.
    pub value: f64,
    /// Edge index and harmonic (0 or 1) attaining the maximum.
    pub worst: Option<(usize, u8)>,
}

pub fn blend_aggregate(panels: &[PanelVars], edges: &[Edge], n_ref: f64) -> Result<BlendAggregate> {
    let mut out = BlendAggregate {
        value: f64::NEG_INFINITY,
        worst: None,
    };
    for (e, &(i, j)) in edges.iter().enumerate() {
        let (Some(p), Some(q)) = (panels.get(i), panels.get(j)) else {
            return Err(Error::DanglingEdge(i.to_string(), j.to_string()));
        };
        let pair = g_blend_pair(p, q, n_ref);
        for (h, g) in [(0u8, pair.g0), (1, pair.g1)] {
            if g > out.value || out.worst.is_none() {
                out.value = g;
                out.worst = Some((e, h));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn panel(n: f64, rho0k: f64, rho1: f64, phi1: f64) -> PanelVars {
        PanelVars::new(n / 10.0, rho0k, rho1, phi1)
    }

    #[test]
    fn identical_panels() {
        let p = PanelVars::new(0.43, -0.3, 0.4, 0.2);
        let b = g_blend_pair(&p, &p, 150.0);
        assert_eq!((b.g0, b.g1), (0.0, 0.0));
    }

    #[test]
    fn hand_computed_pair() {
        let p = panel(10.0, 0.5, 0.2, 0.0);
        let q = panel(8.0, 0.25, 0.2, 0.0);
        let b = g_blend_pair(&p, &q, 10.0);
        assert_relative_eq!(b.g0, 5.0, epsilon = 1e-12);
        assert_relative_eq!(b.g1, -3.84, epsilon = 1e-12);
        let q = panel(8.0, 0.25, 0.2, 0.5);
        assert_relative_eq!(g_blend_pair(&p, &q, 10.0).g0, 45.0, epsilon = 1e-12);
    }

    #[test]
    fn aggregate_takes_the_worst_edge() {
        let panels = [panel(10.0, 0.5, 0.2, 0.0), panel(8.0, 0.25, 0.2, 0.0), panel(8.0, 0.25, 0.2, 0.0)];
        let agg = blend_aggregate(&panels, &[(1, 2), (0, 1)], 10.0).unwrap();
        assert_relative_eq!(agg.value, 5.0, epsilon = 1e-12);
        assert_eq!(agg.worst, Some((1, 0)));
        let same = blend_aggregate(&panels[1..], &[(0, 1)], 10.0).unwrap();
        assert_eq!(same.value, 0.0);
        let none = blend_aggregate(&panels, &[], 10.0).unwrap();
        assert_eq!(none.value, f64::NEG_INFINITY);
        assert_eq!(none.worst, None);
        assert!(matches!(blend_aggregate(&panels, &[(0, 3)], 10.0), Err(Error::DanglingEdge(..))));
    }

    fn any_panel() -> impl Strategy<Value = PanelVars> {
        (0.2..1.0f64, -1.0..1.0f64, 0.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b, c, d)| PanelVars::new(a, b, c, d))
    }

    proptest! {
        #[test]
        fn symmetric_in_its_arguments(p in any_panel(), q in any_panel()) {
            let a = g_blend_pair(&p, &q, 150.0);
            let b = g_blend_pair(&q, &p, 150.0);
            prop_assert!((a.g0 - b.g0).abs() <= 1e-9 * a.g0.abs().max(1.0));
            prop_assert!((a.g1 - b.g1).abs() <= 1e-9 * a.g1.abs().max(1.0));
        }

        #[test]
        fn zero_angle_reduction(p in any_panel(), q in any_panel()) {
            let p = PanelVars { phi1: 0.0, ..p };
            let q = PanelVars { phi1: 0.0, ..q };
            let (np, nq) = (p.n0 * 150.0, q.n0 * 150.0);
            let b = g_blend_pair(&p, &q, 150.0);
            let g0 = (np * p.rho0k - nq * q.rho0k).powi(2) - (np - nq).powi(2);
            let g1 = (np * p.rho1 - nq * q.rho1).powi(2) - (np - nq).powi(2);
            prop_assert_eq!(b.g0, g0);
            prop_assert_eq!(b.g1, g1);
        }

        #[test]
        fn gradients_match_differences(p in any_panel(), q in any_panel()) {
            let b = g_blend_pair(&p, &q, 150.0);
            let h = 1e-6;
            for which in 0..2 {
                for var in 0..3 {
                    let bump = |v: &PanelVars, s: f64| {
                        let mut v = *v;
                        match var {
                            0 => v.n0 += s,
                            1 if which == 0 => v.rho0k += s,
                            1 => v.rho1 += s,
                            _ => v.phi1 += s,
                        }
                        v
                    };
                    let pick = |x: BlendingPair| if which == 0 { x.g0 } else { x.g1 };
                    let grad = if which == 0 { b.grad_g0 } else { b.grad_g1 };
                    let fd_p = (pick(g_blend_pair(&bump(&p, h), &q, 150.0)) - pick(g_blend_pair(&bump(&p, -h), &q, 150.0))) / (2.0 * h);
                    let fd_q = (pick(g_blend_pair(&p, &bump(&q, h), 150.0)) - pick(g_blend_pair(&p, &bump(&q, -h), 150.0))) / (2.0 * h);
                    let scale = 150.0 * 150.0;
                    prop_assert!((fd_p - grad.p[var]).abs() <= 1e-6 * scale, "p {which} {var}: {fd_p} vs {}", grad.p[var]);
                    prop_assert!((fd_q - grad.q[var]).abs() <= 1e-6 * scale, "q {which} {var}: {fd_q} vs {}", grad.q[var]);
                }
            }
        }
    }
}
