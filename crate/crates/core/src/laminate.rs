//! Thickness-normalised laminate matrices of a stack of identical plies and
//! the dimensionless membrane variables derived from them.

use std::collections::BTreeMap;

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::material::PlyMaterial;
use crate::polar::{polar_from_shear, quad_from_polar, shear_from_polar, PolarQuad, PolarShear, QuadTensor};
use crate::stack::{coefficients_unchecked, StackingSequence};

/// Integer laminate weights accumulated per distinct orientation.
///
/// Keeping the sums in integer arithmetic makes reversal symmetry and the
/// vanishing of `B*` (symmetric stacks) or `C*` (uniform stacks) exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AngleWeight {
    pub angle: i32,
    pub count: i64,
    pub b: i64,
    pub d: i64,
    pub c: i64,
}

pub fn angle_weights(angles: &[i32]) -> Vec<AngleWeight> {
    let n = angles.len() as i64;
    let mut map: BTreeMap<i32, AngleWeight> = BTreeMap::new();
    for (i, &angle) in angles.iter().enumerate() {
        let (b, d, c) = coefficients_unchecked(i as i64 + 1, n);
        let w = map.entry(angle).or_insert(AngleWeight {
            angle,
            count: 0,
            b: 0,
            d: 0,
            c: 0,
        });
        w.count += 1;
        w.b += b;
        w.d += d;
        w.c += c;
    }
    map.into_values().collect()
}

/// Normalised FSDT matrices `A*`, `B*`, `D*`, `C*` (MPa) and `H*` of a laminate.
#[derive(Debug, Clone, PartialEq)]
pub struct LaminateHomog {
    pub a: QuadTensor,
    pub b: QuadTensor,
    pub d: QuadTensor,
    pub c: QuadTensor,
    pub h_shear: Matrix2<f64>,
    /// Total thickness (mm).
    pub thickness: f64,
    pub plies: usize,
    pub a_polar: PolarQuad,
    pub b_polar: PolarQuad,
    pub d_polar: PolarQuad,
    pub c_polar: PolarQuad,
    pub h_polar: PolarShear,
    /// In-plane polar set of the elementary layer.
    pub ply_polar: PolarQuad,
}

/// Thickness-normalised blocks of any ply tensor pair (in-plane 4th order,
/// out-of-plane 2nd order) homogenised through the stacking coefficients.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Blocks {
    pub a: QuadTensor,
    pub b: QuadTensor,
    pub d: QuadTensor,
    pub c: QuadTensor,
    pub h: Matrix2<f64>,
}

pub(crate) fn homogenize(stack: &StackingSequence, quad: &PolarQuad, shear: &PolarShear) -> Blocks {
    let n = stack.plies();
    let weights = angle_weights(stack.angles());
    let nf = n as f64;
    let (n2, n3) = (nf * nf, nf * nf * nf);
    let n_sq = (n as i64) * (n as i64);
    let mut a = nalgebra::Matrix3::zeros();
    let mut b = nalgebra::Matrix3::zeros();
    let mut d = nalgebra::Matrix3::zeros();
    let mut h = Matrix2::zeros();
    for w in &weights {
        let q = quad_from_polar(quad, w.angle as f64).0;
        // A* shares the N³ denominator of D* so that C* = A* - D* vanishes
        // exactly for uniform stacks.
        a += q * (w.count * n_sq) as f64;
        b += q * w.b as f64;
        d += q * w.d as f64;
        h += shear_from_polar(shear, w.angle as f64) * w.count as f64;
    }
    let a = QuadTensor(a / n3);
    let d = QuadTensor(d / n3);
    Blocks {
        c: QuadTensor(a.0 - d.0),
        a,
        b: QuadTensor(b / n2),
        d,
        h: h / nf,
    }
}

pub fn laminate_homogenized(stack: &StackingSequence, material: &PlyMaterial) -> LaminateHomog {
    let Blocks { a, b, d, c, h } = homogenize(stack, &material.polar_q, &material.polar_qhat);
    LaminateHomog {
        a_polar: a.polar(),
        b_polar: b.polar(),
        d_polar: d.polar(),
        c_polar: c.polar(),
        h_polar: polar_from_shear(&h),
        a,
        b,
        d,
        c,
        h_shear: h,
        thickness: stack.plies() as f64 * material.t_ply,
        plies: stack.plies(),
        ply_polar: material.polar_q,
    }
}

/// Dimensionless design variables of one panel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PanelVars {
    pub n0: f64,
    pub rho0k: f64,
    pub rho1: f64,
    /// Φ1 / 90°, in (-1, 1].
    #[serde(default)]
    pub phi1: f64,
}

impl PanelVars {
    pub const N0_MIN: f64 = 0.2;
    pub const N0_MAX: f64 = 1.0;

    pub fn new(n0: f64, rho0k: f64, rho1: f64, phi1: f64) -> Self {
        PanelVars { n0, rho0k, rho1, phi1 }
    }

    pub fn within_bounds(&self) -> bool {
        (Self::N0_MIN..=Self::N0_MAX).contains(&self.n0)
            && (-1.0..=1.0).contains(&self.rho0k)
            && (0.0..=1.0).contains(&self.rho1)
    }

    /// Ply count represented by `n0`, rounded to the nearest integer.
    pub fn plies(&self, n_ref: u32) -> u32 {
        (self.n0 * n_ref as f64).round().max(0.0) as u32
    }

    pub fn phi1_deg(&self) -> f64 {
        self.phi1 * 90.0
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ExtractOptions {
    /// Allowed distance (deg) of `Phi0 - Phi1` from a multiple of 45°.
    pub orthotropy_tol_deg: f64,
    /// Skip the orthotropy check and extract regardless.
    pub unchecked: bool,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        ExtractOptions {
            orthotropy_tol_deg: 0.5,
            unchecked: false,
        }
    }
}

/// Panel variables together with the flags raised while extracting them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PanelExtraction {
    pub vars: PanelVars,
    pub k: u8,
    pub orthotropy_offset_deg: f64,
    pub phi0_degenerate: bool,
    pub phi1_degenerate: bool,
}

pub fn panel_from_laminate(lam: &LaminateHomog, n_ref: u32, opts: ExtractOptions) -> Result<PanelExtraction> {
    let ap = &lam.a_polar;
    let ply = &lam.ply_polar;
    let n0 = lam.plies as f64 / n_ref as f64;
    let ratio = |num: f64, den: f64| if den > 0.0 { num / den } else { 0.0 };
    let rho0 = ratio(ap.r0, ply.r0);
    let rho1 = ratio(ap.r1, ply.r1);
    let phi0_degenerate = ap.phi0_degenerate();
    let phi1_degenerate = ap.phi1_degenerate();

    let (k, offset, phi1) = if phi0_degenerate {
        (0, 0.0, if phi1_degenerate { 0.0 } else { ap.phi1 / 90.0 })
    } else if phi1_degenerate {
        // Φ1 is free; K follows from the direction of Φ0 alone.
        let k = if crate::polar::sin_cos_deg(4.0 * ap.phi0).1 >= 0.0 { 0 } else { 1 };
        (k, 0.0, 0.0)
    } else {
        let (k, offset) = ap.orthotropy_offset();
        if offset.abs() > opts.orthotropy_tol_deg && !opts.unchecked {
            return Err(Error::NotOrthotropic { offset_deg: offset });
        }
        (k, offset, ap.phi1 / 90.0)
    };
    let rho0k = if k == 0 { rho0 } else { -rho0 };
    Ok(PanelExtraction {
        vars: PanelVars {
            n0,
            rho0k,
            rho1,
            phi1,
        },
        k,
        orthotropy_offset_deg: offset,
        phi0_degenerate,
        phi1_degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn mat() -> PlyMaterial {
        PlyMaterial::t300_5208()
    }

    fn stack(s: &str) -> StackingSequence {
        s.parse().unwrap()
    }

    #[test]
    fn uniform_stack() {
        for n in [1, 2, 7, 150] {
            let lam = laminate_homogenized(&StackingSequence::uniform(0, n).unwrap(), &mat());
            let q = quad_from_polar(&mat().polar_q, 0.0);
            assert!((lam.a.0 - q.0).amax() <= 1e-10 * q.0.amax());
            assert!((lam.d.0 - q.0).amax() <= 1e-10 * q.0.amax());
            assert_eq!(lam.b.0, nalgebra::Matrix3::zeros());
            assert_eq!(lam.c.0, nalgebra::Matrix3::zeros());
            assert_relative_eq!(lam.thickness, n as f64 * 0.125);
            assert_relative_eq!(lam.a_polar.r0, mat().polar_q.r0, max_relative = 1e-12);
            assert_relative_eq!(lam.a_polar.r1, mat().polar_q.r1, max_relative = 1e-12);
        }
    }

    #[test]
    fn quasi_isotropic_membrane() {
        let lam = laminate_homogenized(&stack("[0/90/45/-45]s"), &mat());
        assert!(lam.a_polar.r0 < 1e-9 * lam.a_polar.t0);
        assert!(lam.a_polar.r1 < 1e-9 * lam.a_polar.t0);
        assert_eq!(lam.b.0, nalgebra::Matrix3::zeros());
        let p = panel_from_laminate(&lam, 150, ExtractOptions::default()).unwrap();
        assert!(p.vars.rho0k.abs() < 1e-9 && p.vars.rho1.abs() < 1e-9);
    }

    #[test]
    fn rib_stack() {
        let lam = laminate_homogenized(&stack("[(±45)_11]_S"), &mat());
        assert!(lam.a_polar.r1 < 1e-9 * lam.a_polar.t0);
        assert_relative_eq!(lam.a_polar.r0, mat().polar_q.r0, max_relative = 1e-12);
        assert_relative_eq!(lam.a_polar.phi0, 45.0, epsilon = 1e-9);
        assert_eq!(lam.b.0, nalgebra::Matrix3::zeros());
        let p = panel_from_laminate(&lam, 150, ExtractOptions::default()).unwrap();
        assert!(p.phi1_degenerate);
        assert_eq!(p.k, 1);
        assert_relative_eq!(p.vars.rho0k, -1.0, epsilon = 1e-12);
        assert_eq!(p.vars.rho1, 0.0_f64.max(p.vars.rho1));
        assert!(p.vars.rho1 < 1e-9);
        assert_eq!(p.vars.phi1, 0.0);
    }

    #[test]
    fn zero_plies_panel() {
        let lam = laminate_homogenized(&StackingSequence::uniform(0, 150).unwrap(), &mat());
        let p = panel_from_laminate(&lam, 150, ExtractOptions::default()).unwrap();
        assert_relative_eq!(p.vars.n0, 1.0);
        assert_relative_eq!(p.vars.rho0k, 1.0, max_relative = 1e-12);
        assert_relative_eq!(p.vars.rho1, 1.0, max_relative = 1e-12);
        assert_eq!(p.vars.phi1, 0.0);
        assert_eq!(p.k, 0);
    }

    #[test]
    fn non_orthotropic_membrane_rejected() {
        // two directions with unequal weights put Phi0 and Phi1 about 2° apart
        let lam = laminate_homogenized(&stack("0/0/30"), &mat());
        match panel_from_laminate(&lam, 150, ExtractOptions::default()) {
            Err(Error::NotOrthotropic { offset_deg }) => assert!(offset_deg.abs() > 0.5),
            other => panic!("unexpected {other:?}"),
        }
        let opts = ExtractOptions {
            unchecked: true,
            ..Default::default()
        };
        assert!(panel_from_laminate(&lam, 150, opts).is_ok());
    }

    #[test]
    fn single_ply_has_no_coupling() {
        let lam = laminate_homogenized(&stack("37"), &mat());
        assert_eq!(lam.b.0, nalgebra::Matrix3::zeros());
        assert_eq!(lam.c.0, nalgebra::Matrix3::zeros());
        assert_eq!(lam.a, lam.d);
    }

    #[test]
    fn shear_matrix_of_uniform_stack() {
        let lam = laminate_homogenized(&StackingSequence::uniform(0, 4).unwrap(), &mat());
        assert_relative_eq!(lam.h_shear[(0, 0)], 3_626.77, max_relative = 1e-5);
        assert_relative_eq!(lam.h_shear[(1, 1)], 7_170.0, max_relative = 1e-5);
    }

    fn any_stack() -> impl Strategy<Value = StackingSequence> {
        prop::collection::vec(-89..=90i32, 1..60).prop_map(|a| StackingSequence::new(a).unwrap())
    }

    proptest! {
        #[test]
        fn reversal_symmetry(s in any_stack()) {
            let m = mat();
            let fwd = laminate_homogenized(&s, &m);
            let rev = laminate_homogenized(&s.reversed(), &m);
            prop_assert_eq!(fwd.a, rev.a);
            prop_assert_eq!(fwd.d, rev.d);
            prop_assert_eq!(fwd.c, rev.c);
            prop_assert_eq!(fwd.b.0, -rev.b.0);
        }

        #[test]
        fn symmetric_stack_is_uncoupled(s in any_stack()) {
            let lam = laminate_homogenized(&s.symmetric(), &mat());
            prop_assert_eq!(lam.b.0, nalgebra::Matrix3::zeros());
        }

        #[test]
        fn homogeneity_tensor_definition(s in any_stack()) {
            let lam = laminate_homogenized(&s, &mat());
            prop_assert_eq!(lam.c.0, lam.a.0 - lam.d.0);
            // same tensor through the c_k coefficients
            let n = s.plies() as f64;
            let mut via_c = nalgebra::Matrix3::zeros();
            for w in angle_weights(s.angles()) {
                via_c += quad_from_polar(&mat().polar_q, w.angle as f64).0 * w.c as f64;
            }
            via_c /= n * n * n;
            prop_assert!((via_c - lam.c.0).amax() <= 1e-9 * lam.a.0.amax());
        }

        #[test]
        fn uniform_membrane_polar(angle in -89..=90i32, n in 1usize..200) {
            let m = mat();
            let one = laminate_homogenized(&StackingSequence::uniform(angle, 1).unwrap(), &m);
            let many = laminate_homogenized(&StackingSequence::uniform(angle, n).unwrap(), &m);
            prop_assert!((one.a_polar.r0 - many.a_polar.r0).abs() <= 1e-9 * m.polar_q.r0);
            prop_assert!((one.a_polar.r1 - many.a_polar.r1).abs() <= 1e-9 * m.polar_q.r1);
            prop_assert!((one.a_polar.t0 - many.a_polar.t0).abs() <= 1e-9 * m.polar_q.t0);
            prop_assert_eq!(many.c.0, nalgebra::Matrix3::zeros());
        }
    }
}
