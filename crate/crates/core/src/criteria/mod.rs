//! Constraint functions and the mass objective of the macroscopic problem.
//!
//! Every constraint follows the `g <= 0` convention. Structural responses
//! (buckling eigenvalue, tip displacement, generalised strains) come from an
//! external finite-element analysis and are inputs here.

mod blending;
mod feasibility;
mod mass;
mod strength;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use blending::{blend_aggregate, g_blend_pair, BlendAggregate, BlendingPair, PairGradient};
pub use feasibility::{g_feas, max_feasibility, FeasibilityValue};
pub use mass::{delta_n_gap, mass_objective, MassValue};
pub use strength::{g_tsai_hill, g_tsai_hill_with, laminate_strength_matrix, ElementStrain, LaminateStrength, TsaiHill};

/// Undirected panel adjacency, as pairs of panel indices.
pub type Edge = (usize, usize);

/// Safety factors of the strength and buckling criteria.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SafetyFactors {
    /// Multiplies the laminate failure index (1.33 × 1.5²).
    pub strength: f64,
    /// Divides the buckling eigenvalue (1.5 × 1.1).
    pub buckling: f64,
}

impl Default for SafetyFactors {
    fn default() -> Self {
        SafetyFactors {
            strength: 1.33 * 1.5 * 1.5,
            buckling: 1.5 * 1.1,
        }
    }
}

/// Responses of one finite-element analysis, used as constraint inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructuralResponse {
    /// First positive buckling eigenvalue.
    pub lambda: f64,
    /// Tip vertical displacement (mm).
    pub u: f64,
    /// Generalised strains per checked element, ordered
    /// (membrane xx, yy, xy; curvature xx, yy, xy; shear xz, yz).
    pub eps_gen: Vec<[f64; 8]>,
    pub source: String,
}

impl StructuralResponse {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0) {
            return Err(Error::InvalidConfig(format!("buckling eigenvalue must be positive, got {}", self.lambda)));
        }
        if self.eps_gen.iter().flatten().any(|e| !e.is_finite()) {
            return Err(Error::InvalidConfig("non-finite generalised strain".into()));
        }
        Ok(())
    }
}

/// Tip displacement constraint, `u / (0.15 b) - 1`, with `b` the span (mm).
pub fn g_disp(u: f64, b: f64) -> Result<f64> {
    if !(b > 0.0) {
        return Err(Error::InvalidConfig(format!("span must be positive, got {b}")));
    }
    Ok(u / (0.15 * b) - 1.0)
}

/// Buckling constraint `1 - lambda / 1.65`.
pub fn g_buck(lambda: f64) -> Result<f64> {
    g_buck_with(lambda, &SafetyFactors::default())
}

pub fn g_buck_with(lambda: f64, factors: &SafetyFactors) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidConfig(format!("buckling eigenvalue must be positive, got {lambda}")));
    }
    Ok(1.0 - lambda / factors.buckling)
}
