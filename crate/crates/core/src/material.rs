//! Elementary-layer material data.
//!
//! In-plane stiffness polar parameters can be recomputed from the engineering
//! constants, but the out-of-plane shear and strength polar sets are carried as
//! data: they are taken verbatim from the material file.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polar::{polar_from_quad, PolarQuad, PolarShear, QuadTensor};

/// Polar parameters of the ply strength tensors (4th-order in-plane part and
/// 2nd-order out-of-plane shear part).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrengthPolar {
    pub gamma0: f64,
    pub gamma1: f64,
    pub lambda0: f64,
    pub lambda1: f64,
    /// deg
    pub omega0: f64,
    /// deg
    pub omega1: f64,
    pub gamma_hat: f64,
    pub lambda_hat: f64,
    /// deg
    pub omega_hat: f64,
}

impl StrengthPolar {
    pub fn in_plane(&self) -> PolarQuad {
        PolarQuad {
            t0: self.gamma0,
            t1: self.gamma1,
            r0: self.lambda0,
            r1: self.lambda1,
            phi0: self.omega0,
            phi1: self.omega1,
        }
    }

    pub fn shear(&self) -> PolarShear {
        PolarShear {
            t: self.gamma_hat,
            r: self.lambda_hat,
            phi: self.omega_hat,
        }
    }
}

/// Limit stresses used by the Tsai-Hill criterion (MPa).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitStresses {
    pub x: f64,
    pub y: f64,
    pub s12: f64,
    pub s23: f64,
    pub s13: f64,
}

/// Elementary layer: engineering constants (MPa), polar sets, density
/// (kg/mm³), thickness (mm) and the reference ply count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlyMaterial {
    pub name: String,
    pub e1: f64,
    pub e2: f64,
    pub g12: f64,
    pub g23: f64,
    pub g13: f64,
    pub nu12: f64,
    pub nu23: f64,
    pub nu13: f64,
    pub polar_q: PolarQuad,
    pub polar_qhat: PolarShear,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strength: Option<StrengthPolar>,
    pub rho_ply: f64,
    pub t_ply: f64,
    pub n_ref: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limits: Option<LimitStresses>,
}

impl PlyMaterial {
    /// Carbon-epoxy T300/5208 pre-preg.
    pub fn t300_5208() -> Self {
        PlyMaterial {
            name: "T300/5208".into(),
            e1: 181_000.0,
            e2: 10_300.0,
            g12: 7_170.0,
            g23: 3_780.0,
            g13: 7_170.0,
            nu12: 0.27,
            nu23: 0.42,
            nu13: 0.27,
            polar_q: PolarQuad {
                t0: 26_898.96,
                t1: 24_710.25,
                r0: 19_728.96,
                r1: 21_426.38,
                phi0: 0.0,
                phi1: 0.0,
            },
            polar_qhat: PolarShear {
                t: 5_398.38,
                r: 1_771.61,
                phi: 90.0,
            },
            strength: Some(StrengthPolar {
                gamma0: 7_531.02,
                gamma1: 2_113.80,
                lambda0: 3_586.81,
                lambda1: 1_603.36,
                omega0: 45.0,
                omega1: 0.0,
                gamma_hat: 10_633.53,
                lambda_hat: 484.30,
                omega_hat: 90.0,
            }),
            rho_ply: 1.6e-6,
            t_ply: 0.125,
            n_ref: 150,
            limits: Some(LimitStresses {
                x: 1500.0,
                y: 246.0,
                s12: 68.0,
                s23: 36.0,
                s13: 68.0,
            }),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let moduli = [self.e1, self.e2, self.g12, self.g23, self.g13];
        if moduli.iter().any(|m| !(m.is_finite() && *m > 0.0)) {
            return Err(Error::InvalidMaterial("all moduli must be positive".into()));
        }
        if !(self.nu12 > 0.0 && self.nu12 < (self.e1 / self.e2).sqrt()) {
            return Err(Error::InvalidMaterial(format!(
                "nu12 = {} must lie in (0, sqrt(E1/E2))",
                self.nu12
            )));
        }
        let q = &self.polar_q;
        if !(q.t0 > 0.0 && q.t1 > 0.0) {
            return Err(Error::InvalidMaterial("T0 and T1 must be positive".into()));
        }
        if q.r0 < 0.0 || q.r1 < 0.0 || self.polar_qhat.r < 0.0 {
            return Err(Error::InvalidMaterial("polar R moduli must be non-negative".into()));
        }
        if self.n_ref < 1 {
            return Err(Error::InvalidMaterial("N_ref must be at least 1".into()));
        }
        if !(self.t_ply > 0.0 && self.rho_ply > 0.0) {
            return Err(Error::InvalidMaterial("ply thickness and density must be positive".into()));
        }
        Ok(())
    }

    /// Norm built from the in-plane polar moduli, sqrt(T0² + 2T1² + R0² + 4R1²) (MPa).
    pub fn polar_norm(&self) -> f64 {
        let q = &self.polar_q;
        (q.t0 * q.t0 + 2.0 * q.t1 * q.t1 + q.r0 * q.r0 + 4.0 * q.r1 * q.r1).sqrt()
    }

    /// Polar set recomputed from the engineering constants.
    pub fn polar_from_constants(&self) -> Result<PolarQuad> {
        Ok(polar_from_quad(&ply_reduced_stiffness(self)?))
    }
}

/// Plane-stress reduced stiffness of the ply in its material frame.
pub fn ply_reduced_stiffness(m: &PlyMaterial) -> Result<QuadTensor> {
    let nu21 = m.nu12 * m.e2 / m.e1;
    let denom = 1.0 - m.nu12 * nu21;
    if !(denom > 0.0) {
        return Err(Error::InvalidMaterial(format!(
            "1 - nu12*nu21 = {denom} is not positive"
        )));
    }
    let q11 = m.e1 / denom;
    let q22 = m.e2 / denom;
    let q12 = m.nu12 * m.e2 / denom;
    Ok(QuadTensor::from_components(q11, q22, q12, 0.0, 0.0, m.g12))
}
