use serde::{Deserialize, Serialize};

use super::TargetPolar;
use crate::laminate::laminate_homogenized;
use crate::material::PlyMaterial;
use crate::polar::{PolarQuad, QuadTensor};
use crate::stack::StackingSequence;

/// Tensor norm used for the coupling and homogeneity residuals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormKind {
    /// Frobenius norm of the 3×3 Voigt matrix.
    #[default]
    Frobenius,
    /// `sqrt(T0² + 2T1² + R0² + 4R1²)` of the tensor's own polar set.
    PolarModuli,
}

impl NormKind {
    pub fn apply(self, t: &QuadTensor) -> f64 {
        match self {
            NormKind::Frobenius => t.frobenius(),
            NormKind::PolarModuli => t.polar().moduli_norm(),
        }
    }
}

/// Six dimensionless residuals of a stack against its targets.
///
/// `r[0]`, `r[1]`: coupling and homogeneity norms over the ply norm `M`;
/// `r[2]`: orthotropy-type mismatch; `r[3]`, `r[4]`: anisotropic moduli
/// mismatch; `r[5]`: orientation mismatch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualBreakdown {
    pub r: [f64; 6],
    /// Sum of squares of the six residuals.
    pub total: f64,
    /// Ply polar norm `M` (MPa).
    pub norm_m: f64,
    pub phi0_degenerate: bool,
    pub phi1_degenerate: bool,
}

/// Distance between `x` and `y` on a circle of the given period.
pub fn circular_distance(x: f64, y: f64, period: f64) -> f64 {
    let d = (x - y).rem_euclid(period);
    d.min(period - d)
}

/// Residuals from the membrane polar set and the `B*`, `C*` norms.
pub(crate) fn residual_terms(a: &PolarQuad, b_norm: f64, c_norm: f64, ply: &PolarQuad, target: &TargetPolar) -> ResidualBreakdown {
    let norm_m = ply.moduli_norm();
    let phi0_degenerate = a.phi0_degenerate();
    let phi1_degenerate = a.phi1_degenerate();
    let phi0 = a.phi0 / 90.0;
    let phi1 = a.phi1 / 90.0;
    let k = target.k as f64;
    let r3 = if phi0_degenerate {
        // both parities describe the same tensor when R0 vanishes
        0.0
    } else if phi1_degenerate {
        circular_distance(2.0 * (phi0 - target.phi1), k, 2.0)
    } else {
        circular_distance(2.0 * (phi0 - phi1), k, 2.0)
    };
    let r6 = if phi1_degenerate {
        0.0
    } else {
        circular_distance(phi1, target.phi1, 2.0)
    };
    let r = [
        b_norm / norm_m,
        c_norm / norm_m,
        r3,
        (a.r0 / ply.r0 - target.rho0).abs(),
        (a.r1 / ply.r1 - target.rho1).abs(),
        r6,
    ];
    ResidualBreakdown {
        r,
        total: r.iter().map(|x| x * x).sum(),
        norm_m,
        phi0_degenerate,
        phi1_degenerate,
    }
}

pub fn residuals(stack: &StackingSequence, material: &PlyMaterial, target: &TargetPolar, norm: NormKind) -> ResidualBreakdown {
    let lam = laminate_homogenized(stack, material);
    residual_terms(&lam.a_polar, norm.apply(&lam.b), norm.apply(&lam.c), &material.polar_q, target)
}
