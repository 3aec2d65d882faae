use serde::{Deserialize, Serialize};

use crate::laminate::PanelVars;

/// Value and gradient `(d/d rho0K, d/d rho1)` of the feasibility constraint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityValue {
    pub g: f64,
    pub gradient: [f64; 2],
}

impl FeasibilityValue {
    pub fn satisfied(&self) -> bool {
        self.g <= 0.0
    }
}

/// `2 rho1² - 1 - rho0K`: the only bound of the orthotropic membrane domain
/// not already covered by the box bounds on the variables.
pub fn g_feas(p: &PanelVars) -> FeasibilityValue {
    FeasibilityValue {
        g: 2.0 * p.rho1 * p.rho1 - 1.0 - p.rho0k,
        gradient: [-1.0, 4.0 * p.rho1],
    }
}

/// Worst feasibility value over a panel set, with its index.
pub fn max_feasibility(panels: &[PanelVars]) -> Option<(usize, f64)> {
    panels
        .iter()
        .map(|p| g_feas(p).g)
        .enumerate()
        .fold(None, |best, (i, g)| match best {
            Some((_, b)) if b >= g => best,
            _ => Some((i, g)),
        })
}
