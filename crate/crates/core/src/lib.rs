//! Polar-formalism design tools for blended composite laminates.
//!
//! The crate covers both levels of a two-level laminate design strategy:
//!
//! * macroscopic: laminate homogenisation, polar invariants, the dimensionless
//!   panel variables `(n0, rho0K, rho1, phi1)` and every constraint evaluated on
//!   them ([`criteria`]), plus the rounding of a continuous design to integer
//!   ply counts ([`discrete`]);
//! * mesoscopic: residual-based recovery of blended stacking sequences that
//!   match the macroscopic targets ([`recovery`]).
//!
//! Bundled reference data, file formats, the end-to-end pipeline and the
//! verification report live in [`datasets`], [`io`], [`pipeline`] and
//! [`verify`].

pub mod criteria;
pub mod datasets;
pub mod discrete;
pub mod error;
pub mod io;
pub mod laminate;
pub mod material;
pub mod pipeline;
pub mod polar;
pub mod recovery;
pub mod stack;
pub mod verify;

pub use error::{Error, Result};
pub use laminate::{laminate_homogenized, panel_from_laminate, ExtractOptions, LaminateHomog, PanelExtraction, PanelVars};
pub use material::{ply_reduced_stiffness, PlyMaterial, StrengthPolar};
pub use polar::{polar_from_quad, polar_from_shear, quad_from_polar, shear_from_polar, PolarQuad, PolarShear, QuadTensor};
pub use stack::{stacking_coefficients, StackingSequence};
