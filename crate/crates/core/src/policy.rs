use crate::error::{Error, Result};

/// Every numerical threshold used by the library, in one place.
///
/// All values are relative unless noted otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericPolicy {
    /// Symmetry of Gram matrices and self-adjointness of operators.
    pub self_adjoint: f64,
    /// Idempotence of projections.
    pub idempotence: f64,
    /// Up-to-scale equality of points and quadrics.
    pub projective: f64,
    /// Singular-value cutoff for rank decisions and pseudo-inversion.
    pub rank: f64,
    /// Eigenvalue floor of a Gram matrix (relative to the largest).
    pub form_floor: f64,
    /// Largest accepted condition number of a basis.
    pub condition: f64,
    /// Invariance residual of a subspace under restriction.
    pub invariance: f64,
    /// Residual of S·S against the input of a square root.
    pub sqrt_residual: f64,
    /// Eigenvalues closer than this (relative) are treated as one cluster.
    pub eigen_cluster: f64,
    /// Distance (relative) of a parameter from a singular parameter.
    pub singular_parameter: f64,
    /// Membership of a point on a quadric.
    pub membership: f64,
    /// Rank-deficiency test for line pairs.
    pub line_pair: f64,
    /// Vanishing of ⟨x,x⟩ (relative to ‖H‖·‖x‖²).
    pub isotropic: f64,
    /// Identity checks (sandwich, Ivory, orthogonality, invariance).
    pub identity: f64,
    /// Affine diagonal comparisons.
    pub affine: f64,
    /// Relative error accepted for the finite-difference derivative.
    pub derivative: f64,
    /// Central-difference step.
    pub fd_step: f64,
}

impl Default for NumericPolicy {
    fn default() -> Self {
        Self {
            self_adjoint: 1e-10,
            idempotence: 1e-12,
            projective: 1e-9,
            rank: 1e-10,
            form_floor: 1e-12,
            condition: 1e12,
            invariance: 1e-10,
            sqrt_residual: 1e-10,
            eigen_cluster: 1e-7,
            singular_parameter: 1e-10,
            membership: 1e-9,
            line_pair: 1e-8,
            isotropic: 1e-12,
            identity: 1e-9,
            affine: 1e-8,
            derivative: 1e-5,
            fd_step: 1e-5,
        }
    }
}

impl NumericPolicy {
    const NAMES: [&'static str; 17] = [
        "self_adjoint",
        "idempotence",
        "projective",
        "rank",
        "form_floor",
        "condition",
        "invariance",
        "sqrt_residual",
        "eigen_cluster",
        "singular_parameter",
        "membership",
        "line_pair",
        "isotropic",
        "identity",
        "affine",
        "derivative",
        "fd_step",
    ];

    fn slot(&mut self, name: &str) -> Option<&mut f64> {
        Some(match name {
            "self_adjoint" => &mut self.self_adjoint,
            "idempotence" => &mut self.idempotence,
            "projective" => &mut self.projective,
            "rank" => &mut self.rank,
            "form_floor" => &mut self.form_floor,
            "condition" => &mut self.condition,
            "invariance" => &mut self.invariance,
            "sqrt_residual" => &mut self.sqrt_residual,
            "eigen_cluster" => &mut self.eigen_cluster,
            "singular_parameter" => &mut self.singular_parameter,
            "membership" => &mut self.membership,
            "line_pair" => &mut self.line_pair,
            "isotropic" => &mut self.isotropic,
            "identity" => &mut self.identity,
            "affine" => &mut self.affine,
            "derivative" => &mut self.derivative,
            "fd_step" => &mut self.fd_step,
            _ => return None,
        })
    }

    /// Overrides one threshold by name. Values must be finite and positive.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::DegenerateParameter(format!(
                "tolerance `{name}` must be finite and positive, got {value}"
            )));
        }
        let slot = self
            .slot(name)
            .ok_or_else(|| Error::UnknownTolerance(name.to_string()))?;
        *slot = value;
        Ok(())
    }

    /// All thresholds as (name, value) pairs in a fixed order.
    pub fn entries(&self) -> Vec<(&'static str, f64)> {
        let mut copy = *self;
        Self::NAMES
            .iter()
            .map(|&name| (name, *copy.slot(name).expect("known name")))
            .collect()
    }
}
