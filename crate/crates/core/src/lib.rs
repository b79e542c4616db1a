//! SSR (shear-squeeze-rotation) group arithmetic, its Schrödinger-type and
//! quasi-regular representations, and the metamorphism covariant transform
//! with its inverse and image-space analyzers.

pub mod error;
pub mod fiducial;
pub mod group;
pub mod metamorph;
pub mod representations;
pub mod signals;
pub mod verify;

pub use error::{Error, Result};
pub use group::{AlgebraVector, Basis, GroupElement, HomogeneousPoint, Matrix4};
