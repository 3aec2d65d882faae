use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laminate::PanelVars;
use crate::material::PlyMaterial;

/// Dimensionless mass and its gradient with respect to each panel's `n0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MassValue {
    pub value: f64,
    pub gradient: Vec<f64>,
}

/// `(2 / m_ref) (m0 + N_ref t ρ Σ A_j n0_j)`, areas in mm², masses in kg.
pub fn mass_objective(panels: &[PanelVars], areas: &[f64], m0: f64, m_ref: f64, material: &PlyMaterial) -> Result<MassValue> {
    if panels.len() != areas.len() {
        return Err(Error::DimensionMismatch(format!("{} panels but {} areas", panels.len(), areas.len())));
    }
    if !(m_ref > 0.0) {
        return Err(Error::InvalidConfig(format!("reference mass must be positive, got {m_ref}")));
    }
    if let Some(a) = areas.iter().find(|a| !(**a >= 0.0)) {
        return Err(Error::InvalidConfig(format!("panel area must be non-negative, got {a}")));
    }
    let k = 2.0 * material.n_ref as f64 * material.t_ply * material.rho_ply / m_ref;
    let skin: f64 = panels.iter().zip(areas).map(|(p, a)| a * p.n0).sum();
    Ok(MassValue {
        value: 2.0 * m0 / m_ref + k * skin,
        gradient: areas.iter().map(|a| k * a).collect(),
    })
}

/// Minimum ply-drop constraint between two panels, in `n0` units:
/// `|Δn0| (ΔN_min / N_ref - |Δn0|)`. Non-positive when the panels have the
/// same ply count or differ by at least `dn_min` plies.
pub fn delta_n_gap(n_p: u32, n_q: u32, dn_min: u32, n_ref: u32) -> f64 {
    let d = n_p.abs_diff(n_q) as f64 / n_ref as f64;
    d * (dn_min as f64 / n_ref as f64 - d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn panel(n0: f64) -> PanelVars {
        PanelVars::new(n0, 0.0, 0.0, 0.0)
    }

    #[test]
    fn empty_design_is_the_fixed_mass() {
        let m = PlyMaterial::t300_5208();
        let v = mass_objective(&[], &[], 250.0, 1000.0, &m).unwrap();
        assert_eq!(v.value, 0.5);
        assert!(v.gradient.is_empty());
    }

    #[test]
    fn one_square_metre_panel() {
        let m = PlyMaterial::t300_5208();
        let v = mass_objective(&[panel(1.0)], &[1e6], 0.0, 1e4, &m).unwrap();
        assert_relative_eq!(v.value, 0.006, max_relative = 1e-12);
    }

    #[test]
    fn argument_checks() {
        let m = PlyMaterial::t300_5208();
        assert!(mass_objective(&[panel(1.0)], &[], 0.0, 1.0, &m).is_err());
        assert!(mass_objective(&[panel(1.0)], &[1.0], 0.0, 0.0, &m).is_err());
        assert!(mass_objective(&[panel(1.0)], &[-1.0], 0.0, 1.0, &m).is_err());
    }

    #[test]
    fn ply_drop_gap() {
        assert_eq!(delta_n_gap(40, 40, 4, 150), 0.0);
        assert!(delta_n_gap(40, 42, 4, 150) > 0.0);
        assert_eq!(delta_n_gap(44, 40, 4, 150), 0.0);
        assert!(delta_n_gap(40, 50, 4, 150) < 0.0);
    }

    proptest! {
        #[test]
        fn linear_in_thickness(n0 in prop::collection::vec(0.2..1.0f64, 1..20)) {
            let m = PlyMaterial::t300_5208();
            let areas: Vec<f64> = (0..n0.len()).map(|i| 1e5 * (i + 1) as f64).collect();
            let p: Vec<_> = n0.iter().map(|&x| panel(x)).collect();
            let q: Vec<_> = n0.iter().map(|&x| panel(2.0 * x)).collect();
            let a = mass_objective(&p, &areas, 0.0, 1e3, &m).unwrap().value;
            let b = mass_objective(&q, &areas, 0.0, 1e3, &m).unwrap().value;
            prop_assert!((b - 2.0 * a).abs() <= 1e-12 * b);
        }

        #[test]
        fn gradient_matches_differences(n0 in prop::collection::vec(0.2..1.0f64, 1..10), j in 0usize..10) {
            let m = PlyMaterial::t300_5208();
            let j = j % n0.len();
            let areas: Vec<f64> = (0..n0.len()).map(|i| 3e5 + 1e5 * i as f64).collect();
            let eval = |d: f64| {
                let p: Vec<_> = n0.iter().enumerate().map(|(i, &x)| panel(if i == j { x + d } else { x })).collect();
                mass_objective(&p, &areas, 120.0, 1e3, &m).unwrap()
            };
            let h = 1e-6;
            let fd = (eval(h).value - eval(-h).value) / (2.0 * h);
            let an = eval(0.0).gradient[j];
            prop_assert!((fd - an).abs() <= 1e-6 * an.abs());
        }
    }
}
