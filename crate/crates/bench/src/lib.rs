//! Shared fixtures for the benchmarks.

use polarblend::criteria::Edge;
use polarblend::discrete::DesignVector;
use polarblend::recovery::{BlendingScheme, Subproblem, TargetPolar};
use polarblend::{PanelVars, StackingSequence};

/// Quasi-isotropic 24-ply stack.
pub fn qi24() -> StackingSequence {
    "[(0/45/-45/90)_3]s".parse().expect("valid stack")
}

/// A chain of panels thinning from 0.6 to about 0.3, with its adjacency.
pub fn chain(len: usize) -> (DesignVector, Vec<Edge>) {
    let panels = (0..len)
        .map(|i| {
            let t = i as f64 / len.max(2) as f64;
            PanelVars::new(0.6 - 0.3 * t, 0.35 - 0.1 * t, 0.25, 0.3 * t)
        })
        .collect();
    let edges = (1..len).map(|i| (i - 1, i)).collect();
    (DesignVector::continuous(panels), edges)
}

/// Two nested panels of 16 and 12 plies sharing a covering of 2.
pub fn two_panel_subproblem() -> Subproblem {
    let ids = vec!["thick".to_string(), "thin".to_string()];
    let scheme = BlendingScheme::from_adjacency(&ids, &[16, 12], &[(0, 1)], 2).expect("valid scheme");
    Subproblem {
        targets: vec![TargetPolar::new(0, 0.4, 0.2, 0.0, 16), TargetPolar::new(0, 0.3, 0.25, 0.1, 12)],
        scheme,
    }
}
