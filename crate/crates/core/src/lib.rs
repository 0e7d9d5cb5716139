//! Curvature variations and desingularization obstructions for Einstein
//! orbifolds with singularities modelled on ℝ⁴/Γ.
//!
//! The pipeline is: closed-form fields ([`deformations`]) are evaluated on
//! jet scalars ([`jets`]) to obtain exact curvature and its first and second
//! variations ([`curvature`]); the resulting tensors are integrated over
//! spheres ([`quadrature`]) to form the preserved quantities and obstruction
//! integrals of [`obstructions`].

pub mod curvature;
pub mod deformations;
pub mod flat_model;
pub mod jets;
pub mod obstructions;
pub mod poly;
pub mod quadrature;
pub mod tensor;
