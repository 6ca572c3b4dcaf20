//! The family `l_λ = √(id − λ g₀)` on `Im p` (identity on `Ker p`) and the
//! identities it satisfies.

use nalgebra::{DMatrix, DVector};

use crate::bilinear::{principal_sqrt, restrict, InnerProduct, Projection, ProjectivePoint};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::linalg::{check_len, checked_inverse, real_spectrum};
use crate::pencil::{is_p_quadric, Interval, ProjectionPencil};
use crate::policy::NumericPolicy;
use crate::quadric::{Chart, Quadric};

/// The smooth family of maps carrying the base member of a projection
/// pencil onto the other members of its type component.
#[derive(Debug, Clone)]
pub struct IvoryFamily {
    pencil: ProjectionPencil,
    restricted: DMatrix<f64>,
    spectrum: Vec<f64>,
    domain: Interval,
    target: f64,
    l: DMatrix<f64>,
}

impl IvoryFamily {
    /// Builds the family and its endpoint `l = l_1`, so that
    /// `g₀ = p − (l′)²`.
    pub fn build(ip: &InnerProduct, p: &Projection, g0: &Quadric, policy: &NumericPolicy) -> Result<Self> {
        Self::build_toward(ip, p, g0, 1.0, policy)
    }

    /// Builds the family with endpoint `l = l_target`, for pencils in which
    /// `λ = 1` is not admissible.
    ///
    /// The representative of `g₀` is rescaled so that `g₀ = −id` on `Ker p`.
    pub fn build_toward(
        ip: &InnerProduct,
        p: &Projection,
        g0: &Quadric,
        target: f64,
        policy: &NumericPolicy,
    ) -> Result<Self> {
        if !g0.is_regular() {
            return Err(Error::SingularQuadric);
        }
        if !is_p_quadric(g0, p, policy.invariance) {
            return Err(Error::NotPQuadric);
        }
        let g0 = g0.clone();
        let restricted = restrict(g0.operator(), p.image_basis(), policy.invariance)
            .map_err(|_| Error::NotPQuadric)?;
        let spectrum = real_spectrum(&restricted, policy.eigen_cluster)?;
        let size = restricted.norm().max(f64::MIN_POSITIVE);
        let mut domain = Interval {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        };
        for &mu in &spectrum {
            if mu > policy.rank * size {
                domain.hi = domain.hi.min(1.0 / mu);
            } else if mu < -policy.rank * size {
                domain.lo = domain.lo.max(1.0 / mu);
            }
        }
        let pencil = ProjectionPencil::new(ip, p, &g0, policy)?;
        let mut family = Self {
            pencil,
            restricted,
            spectrum,
            domain,
            target,
            l: DMatrix::identity(p.dim(), p.dim()),
        };
        if !domain.contains(target) {
            return Err(Error::SqrtDomain(format!(
                "endpoint {target} outside the admissible interval ({}, {})",
                domain.lo, domain.hi
            )));
        }
        family.l = family.l_lambda(target)?;
        Ok(family)
    }

    pub fn inner_product(&self) -> &InnerProduct {
        self.pencil.inner_product()
    }

    pub fn projection(&self) -> &Projection {
        self.pencil.projection()
    }

    /// The base quadric with its p-normalized representative.
    pub fn base(&self) -> &Quadric {
        self.pencil.base()
    }

    pub fn pencil(&self) -> &ProjectionPencil {
        &self.pencil
    }

    fn policy(&self) -> &NumericPolicy {
        self.pencil.policy()
    }

    /// Eigenvalues of `g₀` on `Im p`, ascending.
    pub fn spectrum(&self) -> &[f64] {
        &self.spectrum
    }

    /// The open interval of `λ` with `id − λ g₀` positive on `Im p`.
    pub fn domain(&self) -> Interval {
        self.domain
    }

    /// The endpoint parameter of [`IvoryFamily::l`].
    pub fn target(&self) -> f64 {
        self.target
    }

    /// Distance from `{0, target}` to the boundary of the domain.
    pub fn margin(&self) -> f64 {
        [0.0, self.target]
            .iter()
            .map(|&x| (x - self.domain.lo).min(self.domain.hi - x))
            .fold(f64::INFINITY, f64::min)
    }

    /// `l_target`.
    pub fn l(&self) -> &DMatrix<f64> {
        &self.l
    }

    pub fn admissible(&self, lambda: f64) -> bool {
        self.domain.contains(lambda)
    }

    fn require(&self, lambda: f64) -> Result<()> {
        if self.admissible(lambda) {
            Ok(())
        } else {
            Err(Error::OutOfDomain {
                lambda,
                lo: self.domain.lo,
                hi: self.domain.hi,
            })
        }
    }

    /// `l_λ`: the principal root of `id − λ g₀` on `Im p`, identity on `Ker p`.
    pub fn l_lambda(&self, lambda: f64) -> Result<DMatrix<f64>> {
        self.require(lambda)?;
        let n = self.projection().dim();
        if lambda == 0.0 {
            return Ok(DMatrix::identity(n, n));
        }
        let m = self.restricted.nrows();
        let shifted = DMatrix::identity(m, m) - &self.restricted * lambda;
        let root = principal_sqrt(&shifted, self.policy())?;
        self.projection().lift(&root)
    }

    /// `l′_λ = l_λ p + (id − p)`.
    pub fn l_prime(&self, lambda: f64) -> Result<DMatrix<f64>> {
        let l = self.l_lambda(lambda)?;
        let p = self.projection();
        Ok(l * p.matrix() + p.complement())
    }

    /// The pencil member `g_λ` with `g_λ⁻¹ = g₀⁻¹ − λ p`.
    pub fn g_lambda(&self, lambda: f64) -> Result<Quadric> {
        Ok(self.pencil.member(lambda)?.quadric)
    }

    /// Relative residuals of `g_λ⁻¹ = l′_λ g₀⁻¹ l′_λ` and of
    /// `g_λ⁻¹ = g₀⁻¹ − λ p`, where `g_λ⁻¹` is the inverse of the member.
    pub fn sandwich_residuals(&self, lambda: f64) -> Result<(f64, f64)> {
        let member_inv = self.g_lambda(lambda)?.inverse_operator(self.policy())?;
        let lp = self.l_prime(lambda)?;
        let g0_inv = self.base().inverse_operator(self.policy())?;
        let sandwich = &lp * &g0_inv * &lp;
        let pencil = self.pencil.inverse_dual(lambda);
        let scale = member_inv.norm();
        Ok((
            (&member_inv - sandwich).norm() / scale,
            (&member_inv - pencil).norm() / scale,
        ))
    }

    /// Residual of `p − (l′_λ)² = λ g₀ p + g₀ (id − p)`, which reads
    /// `g₀ = p − (l′)²` at `λ = 1`.
    pub fn construction_residual(&self, lambda: f64) -> Result<f64> {
        let lp = self.l_prime(lambda)?;
        let p = self.projection();
        let g0 = self.base().operator();
        let lhs = p.matrix() - &lp * &lp;
        let rhs = g0 * p.matrix() * lambda + g0 * p.complement();
        Ok((lhs - rhs).norm() / g0.norm())
    }

    fn on_base(&self, x: &ProjectivePoint) -> Result<()> {
        check_len(x.coords(), self.projection().dim())?;
        if self.base().contains(x, self.policy().membership) {
            Ok(())
        } else {
            Err(Error::NotOnQuadric)
        }
    }

    /// `|δ(x, l′_λ y) − δ(l′_λ x, y)|` for points `x, y` of the base quadric.
    pub fn verify_ivory_delta(&self, lambda: f64, x: &ProjectivePoint, y: &ProjectivePoint) -> Result<f64> {
        let lp = self.l_prime(lambda)?;
        self.ivory_delta_with(&lp, x, y)
    }

    fn ivory_delta_with(&self, lp: &DMatrix<f64>, x: &ProjectivePoint, y: &ProjectivePoint) -> Result<f64> {
        self.on_base(x)?;
        self.on_base(y)?;
        let ip = self.inner_product();
        let tol = self.policy().isotropic;
        // Points normalize by positive factors, which leaves δ intact.
        let lx = ProjectivePoint::new(lp * x.coords())?;
        let ly = ProjectivePoint::new(lp * y.coords())?;
        Ok((ip.delta_with(x, &ly, tol)? - ip.delta_with(&lx, y, tol)?).abs())
    }

    /// Largest Ivory residual over all `λ` and point pairs.
    pub fn ivory_delta_sweep(
        &self,
        lambdas: &[f64],
        pairs: &[(ProjectivePoint, ProjectivePoint)],
        exec: Execution,
    ) -> Result<f64> {
        let maps = exec.map(lambdas, |&lambda| self.l_prime(lambda));
        let mut worst = 0.0f64;
        for lp in maps {
            let lp = lp?;
            let r = exec.try_max_of(pairs, |(x, y)| self.ivory_delta_with(&lp, x, y))?;
            worst = worst.max(r.unwrap_or(0.0));
        }
        Ok(worst)
    }

    /// `|ρ²(x − l′_λ y) − ρ²(y − l′_λ x)|` with `ρ²(w) = ⟨w, w⟩`, for points
    /// normalized to the affine chart.
    ///
    /// The chart must be adapted to the projection: its axis vector spans
    /// part of `Ker p` and `Im p` lies in the hyperplane at infinity, so the
    /// maps preserve the chart and the differences are spatial vectors.
    pub fn verify_ivory_affine(
        &self,
        lambda: f64,
        x: &ProjectivePoint,
        y: &ProjectivePoint,
        chart: Chart,
    ) -> Result<f64> {
        let Chart::Affine(axis) = chart else {
            return Err(Error::ChartFailure("an affine chart is required".into()));
        };
        let p = self.projection().matrix();
        if axis >= p.nrows() {
            return Err(Error::ChartFailure(format!("chart axis {axis} out of range")));
        }
        let scale = p.norm().max(1.0);
        if p.column(axis).norm() > 1e-12 * scale || p.row(axis).norm() > 1e-12 * scale {
            return Err(Error::ChartFailure("chart is not adapted to the projection".into()));
        }
        let to_chart = |pt: &ProjectivePoint| -> Result<DVector<f64>> {
            pt.affine(axis, 1e-12)
                .ok_or_else(|| Error::ChartFailure("point at infinity of the chart".into()))
        };
        let (xa, ya) = (to_chart(x)?, to_chart(y)?);
        self.on_base(x)?;
        self.on_base(y)?;
        let lp = self.l_prime(lambda)?;
        let ip = self.inner_product();
        let d1 = ip.norm_sq(&(&xa - &lp * &ya))?;
        let d2 = ip.norm_sq(&(&ya - &lp * &xa))?;
        Ok((d1 - d2).abs())
    }

    /// Relative deviation of the central difference of `λ ↦ l_λ u` from
    /// `−½ g_λ l_λ u`, for `u ∈ Im p`.
    pub fn path_derivative_check(&self, lambda: f64, u: &DVector<f64>, h: f64) -> Result<f64> {
        check_len(u, self.projection().dim())?;
        if (self.projection().complement() * u).norm() > self.policy().invariance * u.norm() {
            return Err(Error::NotInImage);
        }
        if !(h > 0.0) {
            return Err(Error::DegenerateParameter(format!("step {h}")));
        }
        self.require(lambda - h)?;
        self.require(lambda + h)?;
        let forward = self.l_lambda(lambda + h)? * u;
        let backward = self.l_lambda(lambda - h)? * u;
        let d = (forward - backward) / (2.0 * h);
        let g = self.g_lambda(lambda)?;
        let expected = g.operator() * (self.l_lambda(lambda)? * u) * -0.5;
        Ok((&d - expected).norm() / d.norm())
    }

    /// Largest normalized `|⟨v, g_μ v⟩|` over `v = l′_λ u`, `λ` in the grid,
    /// for a common point `u` of the base and the member `Ψ = g_μ`.
    pub fn psi_invariance_check(&self, mu: f64, grid: &[f64], u: &DVector<f64>) -> Result<f64> {
        self.psi_invariance_check_with(mu, grid, u, Execution::default())
    }

    pub fn psi_invariance_check_with(
        &self,
        mu: f64,
        grid: &[f64],
        u: &DVector<f64>,
        exec: Execution,
    ) -> Result<f64> {
        if mu == 0.0 {
            return Err(Error::DegenerateParameter("Ψ must differ from the base".into()));
        }
        let psi = self.g_lambda(mu)?;
        let point = ProjectivePoint::new(u.clone())?;
        let tol = self.policy().membership;
        if !(self.base().contains(&point, tol) && psi.contains(&point, tol)) {
            return Err(Error::NotOnBothQuadrics);
        }
        let worst = exec.try_max_of(grid, |&lambda| {
            let v = self.l_prime(lambda)? * u;
            Ok::<_, Error>(psi.membership_residual(&v))
        })?;
        Ok(worst.unwrap_or(0.0))
    }

    /// `|δ(l′_λ x, l′_λ y) − δ(x, y)|`, which vanishes when `x` and `y` span
    /// a line of `Im p` contained in the base quadric.
    pub fn isometry_residual(&self, lambda: f64, x: &ProjectivePoint, y: &ProjectivePoint) -> Result<f64> {
        self.on_base(x)?;
        self.on_base(y)?;
        let lp = self.l_prime(lambda)?;
        let ip = self.inner_product();
        let tol = self.policy().isotropic;
        let lx = ProjectivePoint::new(&lp * x.coords())?;
        let ly = ProjectivePoint::new(&lp * y.coords())?;
        Ok((ip.delta_with(&lx, &ly, tol)? - ip.delta_with(x, y, tol)?).abs())
    }
}

/// `‖(p − l′²)⁻¹ − l′ (p − l′²)⁻¹ l′ − p‖ / ‖p‖` with `l′ = l p + (id − p)`.
pub fn conjugation_identity_residual(
    ip: &InnerProduct,
    p: &Projection,
    l: &DMatrix<f64>,
    policy: &NumericPolicy,
) -> Result<f64> {
    if !ip.is_self_adjoint(l, policy.self_adjoint) {
        return Err(Error::NotSelfAdjoint);
    }
    restrict(l, p.image_basis(), policy.invariance)?;
    let pm = p.matrix();
    let lp = l * pm + p.complement();
    let form = pm - &lp * &lp;
    let inv = checked_inverse(&form, policy).ok_or(Error::SingularForm)?;
    let residual = &inv - &lp * &inv * &lp - pm;
    let scale = pm.norm();
    Ok(residual.norm() / if scale > 0.0 { scale } else { 1.0 })
}
