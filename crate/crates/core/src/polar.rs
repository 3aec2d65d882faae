//! Cartesian (Voigt) and polar representations of plane tensors.
//!
//! A fourth-order elasticity-like plane tensor is stored as the symmetric 3×3
//! matrix
//!
//! ```text
//! | L1111 L1122 L1112 |
//! | L1122 L2222 L2212 |
//! | L1112 L2212 L1212 |
//! ```
//!
//! and described in polar form by two isotropic moduli `T0`, `T1`, two
//! anisotropic moduli `R0`, `R1` and two angles `Phi0` (period 90°) and
//! `Phi1` (period 180°). A second-order symmetric plane tensor is described by
//! `T`, `R` and `Phi` (period 180°). Angles are in degrees throughout.

use nalgebra::{Matrix2, Matrix3};
use serde::{Deserialize, Serialize};

/// Relative threshold (w.r.t. the isotropic part) below which an anisotropic
/// modulus is treated as zero and its polar angle as undefined.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// Wrap an angle (deg) into `(-period/2, period/2]`.
pub fn wrap_deg(angle: f64, period: f64) -> f64 {
    let half = period / 2.0;
    let mut a = angle.rem_euclid(period);
    if a > half {
        a -= period;
    }
    a
}

/// `(sin, cos)` of an angle in degrees, exact at multiples of 90°.
pub fn sin_cos_deg(deg: f64) -> (f64, f64) {
    let r = deg.rem_euclid(360.0);
    if r == 0.0 {
        (0.0, 1.0)
    } else if r == 90.0 {
        (1.0, 0.0)
    } else if r == 180.0 {
        (0.0, -1.0)
    } else if r == 270.0 {
        (-1.0, 0.0)
    } else {
        r.to_radians().sin_cos()
    }
}

/// Symmetric 3×3 Voigt matrix of a plane fourth-order tensor (MPa).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadTensor(pub Matrix3<f64>);

impl QuadTensor {
    pub fn zeros() -> Self {
        QuadTensor(Matrix3::zeros())
    }

    pub fn from_components(l1111: f64, l2222: f64, l1122: f64, l1112: f64, l2212: f64, l1212: f64) -> Self {
        QuadTensor(Matrix3::new(
            l1111, l1122, l1112, //
            l1122, l2222, l2212, //
            l1112, l2212, l1212,
        ))
    }

    pub fn l1111(&self) -> f64 {
        self.0[(0, 0)]
    }
    pub fn l2222(&self) -> f64 {
        self.0[(1, 1)]
    }
    pub fn l1122(&self) -> f64 {
        self.0[(0, 1)]
    }
    pub fn l1112(&self) -> f64 {
        self.0[(0, 2)]
    }
    pub fn l2212(&self) -> f64 {
        self.0[(1, 2)]
    }
    pub fn l1212(&self) -> f64 {
        self.0[(2, 2)]
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn frobenius(&self) -> f64 {
        self.0.norm()
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (self.0 - self.0.transpose()).amax() <= tol * self.0.amax().max(1.0)
    }

    pub fn polar(&self) -> PolarQuad {
        polar_from_quad(self)
    }
}

/// Polar parameters of a plane fourth-order tensor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarQuad {
    pub t0: f64,
    pub t1: f64,
    pub r0: f64,
    pub r1: f64,
    /// deg, modulo 90
    pub phi0: f64,
    /// deg, modulo 180
    pub phi1: f64,
}

impl PolarQuad {
    pub fn isotropic(t0: f64, t1: f64) -> Self {
        PolarQuad {
            t0,
            t1,
            r0: 0.0,
            r1: 0.0,
            phi0: 0.0,
            phi1: 0.0,
        }
    }

    /// `true` when `R0` is negligible and `Phi0` carries no information.
    pub fn phi0_degenerate(&self) -> bool {
        self.r0 <= DEGENERACY_TOL * self.t0.abs().max(f64::MIN_POSITIVE)
    }

    /// `true` when `R1` is negligible and `Phi1` carries no information.
    pub fn phi1_degenerate(&self) -> bool {
        self.r1 <= DEGENERACY_TOL * self.t0.abs().max(f64::MIN_POSITIVE)
    }

    pub fn is_isotropic(&self) -> bool {
        self.phi0_degenerate() && self.phi1_degenerate()
    }

    /// Distance (deg) of `Phi0 - Phi1` from the nearest multiple of 45°, and
    /// that multiple's parity `K` (0 or 1).
    pub fn orthotropy_offset(&self) -> (u8, f64) {
        let diff = self.phi0 - self.phi1;
        let k = (diff / 45.0).round();
        let offset = diff - 45.0 * k;
        let parity = (k as i64).rem_euclid(2) as u8;
        (parity, offset)
    }

    /// Same tensor seen in a frame rotated by `deg`.
    pub fn rotated(&self, deg: f64) -> Self {
        PolarQuad {
            phi0: wrap_deg(self.phi0 + deg, 90.0),
            phi1: wrap_deg(self.phi1 + deg, 180.0),
            ..*self
        }
    }

    /// sqrt(T0² + 2T1² + R0² + 4R1²)
    pub fn moduli_norm(&self) -> f64 {
        (self.t0 * self.t0 + 2.0 * self.t1 * self.t1 + self.r0 * self.r0 + 4.0 * self.r1 * self.r1).sqrt()
    }
}

/// Polar parameters of a symmetric second-order plane tensor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarShear {
    pub t: f64,
    pub r: f64,
    /// deg, modulo 180
    pub phi: f64,
}

pub fn polar_from_quad(l: &QuadTensor) -> PolarQuad {
    let (a, b, c) = (l.l1111(), l.l2222(), l.l1122());
    let (e, f, g) = (l.l1112(), l.l2212(), l.l1212());
    let t0 = (a + b - 2.0 * c + 4.0 * g) / 8.0;
    let t1 = (a + b + 2.0 * c) / 8.0;
    // R0 e^{i4Phi0} and R1 e^{i2Phi1}
    let z0_re = (a + b - 2.0 * c - 4.0 * g) / 8.0;
    let z0_im = (e - f) / 2.0;
    let z1_re = (a - b) / 8.0;
    let z1_im = (e + f) / 4.0;
    let r0 = z0_re.hypot(z0_im);
    let r1 = z1_re.hypot(z1_im);
    let scale = DEGENERACY_TOL * t0.abs().max(f64::MIN_POSITIVE);
    let phi0 = if r0 <= scale {
        0.0
    } else {
        wrap_deg(z0_im.atan2(z0_re).to_degrees() / 4.0, 90.0)
    };
    let phi1 = if r1 <= scale {
        0.0
    } else {
        wrap_deg(z1_im.atan2(z1_re).to_degrees() / 2.0, 180.0)
    };
    PolarQuad {
        t0,
        t1,
        r0,
        r1,
        phi0,
        phi1,
    }
}

/// Cartesian components of `p` in a frame where every polar angle is
/// shifted by `rotation_deg`.
pub fn quad_from_polar(p: &PolarQuad, rotation_deg: f64) -> QuadTensor {
    let (s4, c4) = sin_cos_deg(4.0 * (p.phi0 + rotation_deg));
    let (s2, c2) = sin_cos_deg(2.0 * (p.phi1 + rotation_deg));
    quad_from_harmonics(p.t0, p.t1, p.r0 * c4, p.r0 * s4, p.r1 * c2, p.r1 * s2)
}

/// Assemble a Voigt matrix from the isotropic moduli and the Cartesian parts
/// of `R0 e^{i4Phi0}` and `R1 e^{i2Phi1}`.
pub(crate) fn quad_from_harmonics(t0: f64, t1: f64, r0c: f64, r0s: f64, r1c: f64, r1s: f64) -> QuadTensor {
    QuadTensor::from_components(
        t0 + 2.0 * t1 + r0c + 4.0 * r1c,
        t0 + 2.0 * t1 + r0c - 4.0 * r1c,
        -t0 + 2.0 * t1 - r0c,
        r0s + 2.0 * r1s,
        -r0s + 2.0 * r1s,
        t0 - r0c,
    )
}

pub fn shear_from_polar(p: &PolarShear, rotation_deg: f64) -> Matrix2<f64> {
    let (s, c) = sin_cos_deg(2.0 * (p.phi + rotation_deg));
    Matrix2::new(p.t + p.r * c, p.r * s, p.r * s, p.t - p.r * c)
}

pub fn polar_from_shear(z: &Matrix2<f64>) -> PolarShear {
    let t = (z[(0, 0)] + z[(1, 1)]) / 2.0;
    let re = (z[(0, 0)] - z[(1, 1)]) / 2.0;
    let im = (z[(0, 1)] + z[(1, 0)]) / 2.0;
    let r = re.hypot(im);
    let phi = if r <= DEGENERACY_TOL * t.abs().max(f64::MIN_POSITIVE) {
        0.0
    } else {
        wrap_deg(im.atan2(re).to_degrees() / 2.0, 180.0)
    };
    PolarShear { t, r, phi }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::material::{ply_reduced_stiffness, PlyMaterial};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn t300_polar() -> PolarQuad {
        PlyMaterial::t300_5208().polar_q
    }

    #[test]
    fn t300_polar_from_constants() {
        let q = ply_reduced_stiffness(&PlyMaterial::t300_5208()).unwrap();
        let p = polar_from_quad(&q);
        assert_relative_eq!(p.t0, 26_898.96, max_relative = 1e-3);
        assert_relative_eq!(p.t1, 24_710.25, max_relative = 1e-3);
        assert_relative_eq!(p.r0, 19_728.96, max_relative = 1e-3);
        assert_relative_eq!(p.r1, 21_426.38, max_relative = 1e-3);
        assert_eq!(p.phi0, 0.0);
        assert_eq!(p.phi1, 0.0);
    }

    #[test]
    fn rotation_by_90_swaps_axes() {
        let p = t300_polar();
        let q0 = quad_from_polar(&p, 0.0);
        let q90 = quad_from_polar(&p, 90.0);
        assert_relative_eq!(q90.l1111(), q0.l2222(), max_relative = 1e-12);
        assert_relative_eq!(q90.l2222(), q0.l1111(), max_relative = 1e-12);
        assert_relative_eq!(q90.l1212(), q0.l1212(), max_relative = 1e-12);
    }

    #[test]
    fn rotation_by_45() {
        let q = quad_from_polar(&t300_polar(), 45.0);
        // T0 + 2T1 - R0 with both cosine harmonics at their 45° values
        assert_relative_eq!(q.l1111(), 26_898.96 + 49_420.50 - 19_728.96, max_relative = 1e-12);
        assert_relative_eq!(q.l1111(), 56_590.50, max_relative = 1e-9);
    }

    #[test]
    fn zero_rotation_round_trip() {
        let p = t300_polar();
        let back = polar_from_quad(&quad_from_polar(&p, 0.0));
        assert_relative_eq!(back.t0, p.t0, max_relative = 1e-12);
        assert_relative_eq!(back.r1, p.r1, max_relative = 1e-12);
        assert!(back.phi0.abs() < 1e-12 && back.phi1.abs() < 1e-12);
    }

    #[test]
    fn isotropic_tensor() {
        let iso = quad_from_polar(&PolarQuad::isotropic(100.0, 40.0), 17.0);
        let p = polar_from_quad(&iso);
        assert_eq!(p.r0, 0.0);
        assert_eq!(p.r1, 0.0);
        assert_eq!((p.phi0, p.phi1), (0.0, 0.0));
        assert_relative_eq!(p.t0, 100.0, max_relative = 1e-14);
        assert_relative_eq!(p.t1, 40.0, max_relative = 1e-14);
        assert!(p.is_isotropic());
    }

    #[test]
    fn table_shear_polar() {
        let qhat = PlyMaterial::t300_5208().polar_qhat;
        let z = shear_from_polar(&qhat, 0.0);
        assert_relative_eq!(z[(0, 0)], 3_626.77, max_relative = 1e-5);
        assert_relative_eq!(z[(1, 1)], 7_170.0, max_relative = 1e-5);
        assert!(z[(0, 1)].abs() < 1e-9);
    }

    #[test]
    fn isotropic_shear() {
        let z = shear_from_polar(&PolarShear { t: 5.0, r: 0.0, phi: 33.0 }, 0.0);
        assert_eq!(z, Matrix2::new(5.0, 0.0, 0.0, 5.0));
    }

    #[test]
    fn wrapping() {
        assert_eq!(wrap_deg(90.0, 180.0), 90.0);
        assert_eq!(wrap_deg(-90.0, 180.0), 90.0);
        assert_eq!(wrap_deg(-45.0, 90.0), 45.0);
        assert_eq!(wrap_deg(100.0, 180.0), -80.0);
    }

    #[test]
    fn orthotropy_parity() {
        let p = PolarQuad {
            phi0: 45.0,
            phi1: 0.0,
            ..t300_polar()
        };
        assert_eq!(p.orthotropy_offset(), (1, 0.0));
        let p = PolarQuad {
            phi0: -44.5,
            phi1: 90.0,
            ..t300_polar()
        };
        let (k, off) = p.orthotropy_offset();
        assert_eq!(k, 1);
        assert_relative_eq!(off, 0.5, epsilon = 1e-12);
    }

    fn symmetric3() -> impl Strategy<Value = QuadTensor> {
        prop::array::uniform6(-1e5..1e5f64)
            .prop_map(|c| QuadTensor::from_components(c[0], c[1], c[2], c[3], c[4], c[5]))
    }

    proptest! {
        #[test]
        fn quad_round_trip(l in symmetric3()) {
            let back = quad_from_polar(&polar_from_quad(&l), 0.0);
            let scale = l.frobenius().max(1.0);
            prop_assert!((back.0 - l.0).norm() <= 1e-9 * scale);
        }

        #[test]
        fn quad_invariants_under_rotation(l in symmetric3(), rot in -180.0..180.0f64) {
            let p = polar_from_quad(&l);
            let q = polar_from_quad(&quad_from_polar(&p, rot));
            let scale = p.moduli_norm().max(1.0);
            prop_assert!((q.t0 - p.t0).abs() <= 1e-9 * scale);
            prop_assert!((q.t1 - p.t1).abs() <= 1e-9 * scale);
            prop_assert!((q.r0 - p.r0).abs() <= 1e-9 * scale);
            prop_assert!((q.r1 - p.r1).abs() <= 1e-9 * scale);
            if !p.phi0_degenerate() && !p.phi1_degenerate()
                && p.r0 > 1e-6 * scale && p.r1 > 1e-6 * scale {
                // Phi0 - Phi1 is invariant modulo 90°
                let d = wrap_deg((q.phi0 - q.phi1) - (p.phi0 - p.phi1), 90.0);
                prop_assert!(d.abs() < 1e-6, "d = {}", d);
            }
        }

        #[test]
        fn shear_round_trip(a in -1e4..1e4f64, b in -1e4..1e4f64, c in -1e4..1e4f64, rot in -90.0..90.0f64) {
            let z = Matrix2::new(a, c, c, b);
            let p = polar_from_shear(&z);
            let back = shear_from_polar(&p, 0.0);
            prop_assert!((back - z).norm() <= 1e-9 * z.norm().max(1.0));
            let rotated = polar_from_shear(&shear_from_polar(&p, rot));
            prop_assert!((rotated.t - p.t).abs() <= 1e-9 * z.norm().max(1.0));
            prop_assert!((rotated.r - p.r).abs() <= 1e-9 * z.norm().max(1.0));
        }
    }
}
