//! The covariant transform for the Schrödinger-type representation, its
//! adjoint, and analyzers for the image space.

mod analysis;
mod stack;
mod transform;

use serde::{Deserialize, Serialize};

use crate::representations::RepresentationContext;
use crate::signals::{ComplexField2D, Discretization, Hbar};

pub use analysis::{
    analyze, cauchy_riemann_residuals, characterize, parabolic_residual, structural_residuals, to_complex_chart,
    AnalysisReport, CharacterizeConfig, Characterization, ComplexChart, Convergence, Residuals, SliceNorms, Tolerances,
    NOISE_FLOOR,
};
pub use stack::{SliceStack, StackMeta};
pub use transform::{
    contravariant, covariant_direct, covariant_fast, metamorphism, orthogonality_defect, intertwining_residual,
    PointTransform, MAX_WINDOW_POINTS,
};

/// ħ plus the default quadrature window for exact-family signals.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TransformContext {
    pub hbar: Hbar,
    pub disc: Discretization,
}

impl TransformContext {
    pub fn new(hbar: Hbar, disc: Discretization) -> Self {
        Self { hbar, disc }
    }

    pub fn rep(&self) -> RepresentationContext {
        RepresentationContext { hbar: self.hbar }
    }
}

/// Values `[W_φ f](x, y)` on one slice `(b, r)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TransformResult {
    pub field: ComplexField2D,
    pub fiducial: String,
    pub hbar: Hbar,
}
