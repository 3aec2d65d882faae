use nalgebra::{Matrix2, SMatrix, SVector};
use serde::{Deserialize, Serialize};

use super::SafetyFactors;
use crate::error::{Error, Result};
use crate::laminate::homogenize;
use crate::material::PlyMaterial;
use crate::polar::QuadTensor;
use crate::stack::StackingSequence;

/// Laminate strength tensor blocks, homogenised from the ply strength polar
/// parameters with the same weights as the stiffness matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct LaminateStrength {
    pub a: QuadTensor,
    pub b: QuadTensor,
    pub d: QuadTensor,
    pub c: QuadTensor,
    pub h_shear: Matrix2<f64>,
    /// mm
    pub thickness: f64,
}

impl LaminateStrength {
    /// 8×8 strength matrix acting on generalised strains ordered
    /// (membrane xx, yy, xy; curvature xx, yy, xy; shear xz, yz): blocks
    /// `h A`, `h²/2 B`, `h³/12 D` and `h H`.
    pub fn matrix(&self) -> SMatrix<f64, 8, 8> {
        let h = self.thickness;
        let mut g = SMatrix::<f64, 8, 8>::zeros();
        g.fixed_view_mut::<3, 3>(0, 0).copy_from(&(self.a.0 * h));
        let coupling = self.b.0 * (h * h / 2.0);
        g.fixed_view_mut::<3, 3>(0, 3).copy_from(&coupling);
        g.fixed_view_mut::<3, 3>(3, 0).copy_from(&coupling.transpose());
        g.fixed_view_mut::<3, 3>(3, 3).copy_from(&(self.d.0 * (h * h * h / 12.0)));
        g.fixed_view_mut::<2, 2>(6, 6).copy_from(&(self.h_shear * h));
        g
    }
}

pub fn laminate_strength_matrix(stack: &StackingSequence, material: &PlyMaterial) -> Result<LaminateStrength> {
    let strength = material.strength.as_ref().ok_or(Error::MissingStrength)?;
    let blocks = homogenize(stack, &strength.in_plane(), &strength.shear());
    Ok(LaminateStrength {
        a: blocks.a,
        b: blocks.b,
        d: blocks.d,
        c: blocks.c,
        h_shear: blocks.h,
        thickness: stack.plies() as f64 * material.t_ply,
    })
}

/// Generalised strain of one checked element with its laminate data.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementStrain {
    pub eps: SVector<f64, 8>,
    pub strength: SMatrix<f64, 8, 8>,
    /// mm
    pub thickness: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TsaiHill {
    pub g: f64,
    /// Index of the element with the largest failure index.
    pub argmax: usize,
    /// Thickness-averaged failure index of that element, before the safety factor.
    pub index: f64,
}

/// Thickness-averaged Tsai-Hill constraint with the default safety factor.
pub fn g_tsai_hill(elements: &[ElementStrain]) -> Result<TsaiHill> {
    g_tsai_hill_with(elements, &SafetyFactors::default())
}

pub fn g_tsai_hill_with(elements: &[ElementStrain], factors: &SafetyFactors) -> Result<TsaiHill> {
    let mut best: Option<(usize, f64)> = None;
    for (i, e) in elements.iter().enumerate() {
        if !(e.thickness > 0.0) {
            return Err(Error::InvalidConfig(format!("element {i} has non-positive thickness")));
        }
        let fi = e.eps.dot(&(e.strength * e.eps)) / e.thickness;
        if best.is_none_or(|(_, b)| fi > b) {
            best = Some((i, fi));
        }
    }
    let (argmax, index) = best.ok_or(Error::EmptyElementSet)?;
    Ok(TsaiHill {
        g: factors.strength * index - 1.0,
        argmax,
        index,
    })
}
