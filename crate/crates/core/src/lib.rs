//! Projection pencils of quadrics over indefinite inner-product spaces.
//!
//! A quadric is the zero set of `⟨x, g x⟩` for an operator `g` that is
//! self-adjoint with respect to a fixed nondegenerate symmetric form. Given a
//! projection `p` and a regular p-quadric `g₀`, the members
//! `g_t⁻¹ = g₀⁻¹ − t p` form a projection pencil, and the maps
//! `l_λ = √(id − λ g₀)` on `Im p` (identity on `Ker p`) carry the base member
//! onto the others while preserving the Ivory property
//! `δ(x, l_λ y) = δ(l_λ x, y)`.
//!
//! The crate builds these objects numerically and provides residual checks
//! for each identity involved.

// `!(x <= tol)` is used on purpose so that NaN residuals fail.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bilinear;
pub mod error;
pub mod exec;
pub mod gallery;
pub mod ivory;
mod linalg;
pub mod pencil;
pub mod policy;
pub mod quadric;

pub use bilinear::{
    delta_metric, make_projection, principal_sqrt, pseudo_inverse, restrict, sqrt_on_subspace,
    InnerProduct, LinearMap, Projection, ProjectivePoint,
};
pub use error::{Error, Result};
pub use exec::Execution;
pub use gallery::{GalleryScene, SceneKind};
pub use ivory::IvoryFamily;
pub use linalg::{inertia, linspace};
pub use pencil::{intersect_conics, ConicIntersection, Interval, ProjectionPencil};
pub use policy::NumericPolicy;
pub use quadric::{Chart, DualPullback, Quadric};
