//! Stacking-sequence recovery: polar residuals, ply-continuity checks,
//! blending schemes and the stochastic search for blended stacks that match
//! macroscopic targets.

mod residual;
mod scheme;
mod search;

use serde::{Deserialize, Serialize};

use crate::laminate::PanelVars;

pub use residual::{circular_distance, residuals, NormKind, ResidualBreakdown};
pub use scheme::{assemble_stacks, is_blended, BlendCheck, BlendMode, BlendingScheme, SchemePanel};
pub use search::{recover, RecoveryResult, SearchConfig, Subproblem};

/// Macroscopic targets of one laminate, with the signed anisotropy split
/// into a parity and a magnitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TargetPolar {
    pub k: u8,
    pub rho0: f64,
    pub rho1: f64,
    pub phi1: f64,
    pub plies: usize,
}

impl TargetPolar {
    pub fn new(k: u8, rho0: f64, rho1: f64, phi1: f64, plies: usize) -> Self {
        TargetPolar {
            k,
            rho0,
            rho1,
            phi1,
            plies,
        }
    }

    /// Targets of a panel whose ply count is `n0 * n_ref` (rounded).
    pub fn from_panel(p: &PanelVars, n_ref: u32) -> Self {
        let (k, rho0) = split_target(p.rho0k);
        TargetPolar {
            k,
            rho0,
            rho1: p.rho1,
            phi1: p.phi1,
            plies: p.plies(n_ref) as usize,
        }
    }

    /// Signed form `(-1)^K rho0`.
    pub fn rho0k(&self) -> f64 {
        if self.k == 0 {
            self.rho0
        } else {
            -self.rho0
        }
    }
}

/// `(K, rho0)` with `K = 1` for negative `rho0K`.
pub fn split_target(rho0k: f64) -> (u8, f64) {
    if rho0k >= 0.0 {
        (0, rho0k)
    } else {
        (1, -rho0k)
    }
}
