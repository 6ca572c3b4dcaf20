//! Preset scenes: confocal conics in the Euclidean and Minkowski planes and
//! confocal cone families in the elliptic and hyperbolic planes.

use nalgebra::{DMatrix, DVector};

use crate::bilinear::{InnerProduct, Projection};
use crate::error::{Error, Result};
use crate::ivory::IvoryFamily;
use crate::pencil::{is_p_quadric, ProjectionPencil};
use crate::policy::NumericPolicy;
use crate::quadric::Quadric;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SceneKind {
    Euclidean,
    Minkowski,
    Elliptic,
    Hyperbolic,
    Custom,
}

impl SceneKind {
    pub fn name(self) -> &'static str {
        match self {
            SceneKind::Euclidean => "euclidean",
            SceneKind::Minkowski => "minkowski",
            SceneKind::Elliptic => "elliptic",
            SceneKind::Hyperbolic => "hyperbolic",
            SceneKind::Custom => "custom",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "euclidean" => SceneKind::Euclidean,
            "minkowski" => SceneKind::Minkowski,
            "elliptic" => SceneKind::Elliptic,
            "hyperbolic" => SceneKind::Hyperbolic,
            "custom" => SceneKind::Custom,
            _ => return None,
        })
    }
}

/// A ready-to-use triple `(⟨·,·⟩, p, g₀)` with its defining parameters.
#[derive(Debug, Clone)]
pub struct GalleryScene {
    pub kind: SceneKind,
    pub ip: InnerProduct,
    pub p: Projection,
    pub g0: Quadric,
    pub params: Vec<(String, f64)>,
}

fn diag(xs: &[f64]) -> DMatrix<f64> {
    DMatrix::from_diagonal(&DVector::from_column_slice(xs))
}

fn nonzero(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value.abs() > 1e-12 {
        Ok(())
    } else {
        Err(Error::DegenerateParameter(format!("{name} = {value} must be nonzero")))
    }
}

impl GalleryScene {
    /// Confocal conics `x₁²/(c²+λ) + x₂²/λ = 1`, based at `λ = λ₀`.
    ///
    /// Members `t` of the pencil are the conics with `λ = λ₀ − t`.
    pub fn euclidean(c: f64, lambda0: f64) -> Result<Self> {
        nonzero("c", c)?;
        nonzero("lambda0", lambda0)?;
        nonzero("c^2 + lambda0", c * c + lambda0)?;
        let ip = InnerProduct::euclidean(3);
        let g0 = diag(&[1.0 / (c * c + lambda0), 1.0 / lambda0, -1.0]);
        Self::assemble(
            SceneKind::Euclidean,
            ip,
            Projection::coordinate(3, &[0, 1])?,
            g0,
            vec![("c".into(), c), ("lambda0".into(), lambda0)],
        )
    }

    /// Conics `x₁²/(σ−t) + x₂²/(τ+t) = 1` of the Minkowski plane with
    /// product `diag(1, −1, 1)`.
    pub fn minkowski(sigma: f64, tau: f64) -> Result<Self> {
        nonzero("sigma", sigma)?;
        nonzero("tau", tau)?;
        nonzero("sigma + tau", sigma + tau)?;
        let ip = InnerProduct::diagonal(&[1.0, -1.0, 1.0])?;
        let g0 = diag(&[1.0 / sigma, -1.0 / tau, -1.0]);
        Self::assemble(
            SceneKind::Minkowski,
            ip,
            Projection::coordinate(3, &[0, 1])?,
            g0,
            vec![("sigma".into(), sigma), ("tau".into(), tau)],
        )
    }

    /// Cones `x₁²/(c²−t) + x₂²/(c²−t−β²) ± x₃²/(c²−t+γ²) = 0` with `p = id`.
    ///
    /// The elliptic case uses the positive definite product and requires
    /// `β² + γ² = 1`; the hyperbolic case uses `diag(1, 1, −1)`, which puts
    /// the minus sign on the last term, and requires `β² − γ² = −1`.
    pub fn curved(c: f64, beta: f64, gamma: f64, kind: SceneKind) -> Result<Self> {
        let (b2, g2, c2) = (beta * beta, gamma * gamma, c * c);
        let (sign, constraint) = match kind {
            SceneKind::Elliptic => (1.0, b2 + g2 - 1.0),
            SceneKind::Hyperbolic => (-1.0, b2 - g2 + 1.0),
            other => {
                return Err(Error::DegenerateParameter(format!(
                    "curved scenes are elliptic or hyperbolic, not {}",
                    other.name()
                )))
            }
        };
        if !(constraint.abs() <= 1e-9) {
            return Err(Error::DegenerateParameter(format!(
                "beta and gamma violate the {} constraint (defect {constraint:.3e})",
                kind.name()
            )));
        }
        nonzero("c^2", c2)?;
        nonzero("c^2 - beta^2", c2 - b2)?;
        nonzero("c^2 + gamma^2", c2 + g2)?;
        let ip = InnerProduct::diagonal(&[1.0, 1.0, sign])?;
        let g0 = diag(&[1.0 / c2, 1.0 / (c2 - b2), 1.0 / (c2 + g2)]);
        Self::assemble(
            kind,
            ip,
            Projection::identity(3),
            g0,
            vec![("c".into(), c), ("beta".into(), beta), ("gamma".into(), gamma)],
        )
    }

    /// A user-supplied scene; `g0` must be a regular p-quadric.
    pub fn custom(ip: InnerProduct, p: Projection, g0: DMatrix<f64>) -> Result<Self> {
        Self::assemble(SceneKind::Custom, ip, p, g0, Vec::new())
    }

    fn assemble(
        kind: SceneKind,
        ip: InnerProduct,
        p: Projection,
        g0: DMatrix<f64>,
        params: Vec<(String, f64)>,
    ) -> Result<Self> {
        let policy = NumericPolicy::default();
        let g0 = Quadric::new(&ip, g0, &policy)?;
        if !g0.is_regular() {
            return Err(Error::SingularQuadric);
        }
        if !is_p_quadric(&g0, &p, policy.invariance) {
            return Err(Error::NotPQuadric);
        }
        Ok(Self {
            kind,
            ip,
            p,
            g0,
            params,
        })
    }

    /// The same scene with base representative `s·g₀`.
    ///
    /// With `p = id` this is a projective equivalence that reparametrizes the
    /// pencil by `t ↦ s t`; otherwise it would break `g₀ = −id` on `Ker p`
    /// and is refused.
    pub fn rescaled(&self, s: f64) -> Result<Self> {
        if self.p.rank() != self.p.dim() {
            return Err(Error::NotPQuadric);
        }
        let mut scene = self.clone();
        scene.g0 = self.g0.scaled(s)?;
        scene.params.push(("scale".into(), s));
        Ok(scene)
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.iter().find(|(k, _)| k == name).map(|&(_, v)| v)
    }

    pub fn pencil(&self, policy: &NumericPolicy) -> Result<ProjectionPencil> {
        ProjectionPencil::new(&self.ip, &self.p, &self.g0, policy)
    }

    pub fn family(&self, target: f64, policy: &NumericPolicy) -> Result<IvoryFamily> {
        IvoryFamily::build_toward(&self.ip, &self.p, &self.g0, target, policy)
    }
}

pub fn euclidean_scene(c: f64, lambda0: f64) -> Result<GalleryScene> {
    GalleryScene::euclidean(c, lambda0)
}

pub fn minkowski_scene(sigma: f64, tau: f64) -> Result<GalleryScene> {
    GalleryScene::minkowski(sigma, tau)
}

pub fn curved_scene(c: f64, beta: f64, gamma: f64, kind: SceneKind) -> Result<GalleryScene> {
    GalleryScene::curved(c, beta, gamma, kind)
}

/// Squared focal distance `c_α²` of the conic whose dual pullback is
/// `α Φ + β·id`, where `Φ = diag(c²+λ, λ, −1)` is a confocal dual pullback.
///
/// The result is read off the matrix after normalizing its last diagonal
/// entry to `−1`; it does not depend on `λ`.
pub fn foci_scaling(c: f64, alpha: f64, beta: f64) -> Result<f64> {
    nonzero("alpha", alpha)?;
    if !((alpha - beta).abs() > 1e-12 * alpha.abs().max(beta.abs())) {
        return Err(Error::DegenerateParameter("alpha must differ from beta".into()));
    }
    let lambda = 1.0;
    let phi = diag(&[c * c + lambda, lambda, -1.0]);
    let m = phi * alpha + DMatrix::identity(3, 3) * beta;
    let m = &m / -m[(2, 2)];
    Ok(m[(0, 0)] - m[(1, 1)])
}

/// The absolute of the Euclidean plane: coordinate matrix `diag(1, 1, 0)`.
pub fn absolute_quadric() -> Quadric {
    Quadric::from_coordinate_matrix(
        &InnerProduct::euclidean(3),
        diag(&[1.0, 1.0, 0.0]),
        &NumericPolicy::default(),
    )
    .expect("diagonal form is symmetric")
}
