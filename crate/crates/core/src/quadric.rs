//! Quadrics `{x : ⟨x, g x⟩ = 0}` for self-adjoint operators `g`.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{DMatrix, DVector};

use crate::bilinear::{pseudo_inverse, InnerProduct, LinearMap, ProjectivePoint};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::linalg::{check_len, check_square, checked_inverse, condition_number, symmetrize};
use crate::policy::NumericPolicy;

/// Number of sweep directions used by [`Quadric::sample_points`].
pub const SWEEP_DIRECTIONS: usize = 720;
const SCAN_STEPS: usize = 256;
const BISECTION_WIDTH: f64 = 1e-12;

/// Where sampled points of a conic are looked for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chart {
    /// The affine chart where the given coordinate equals 1.
    Affine(usize),
    /// The line at infinity where the given coordinate vanishes.
    Ideal(usize),
}

impl Chart {
    /// The chart `x₃ = 1` of the projective plane.
    pub fn standard() -> Self {
        Chart::Affine(2)
    }
}

/// A quadric given by a self-adjoint operator `g`; its coordinate matrix
/// (the Gram matrix of `⟨x, g y⟩`) is `T = H g`.
///
/// The representative is stored as supplied: rescaling by a negative factor
/// matters for the p-quadric normalization `g = −id on Ker p`. Comparisons
/// are always made up to scale.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadric {
    ip: InnerProduct,
    g: DMatrix<f64>,
    coord: DMatrix<f64>,
    regular: bool,
}

impl Quadric {
    pub fn new(ip: &InnerProduct, g: LinearMap, policy: &NumericPolicy) -> Result<Self> {
        check_square(&g, ip.dim())?;
        if g.iter().any(|v| !v.is_finite()) {
            return Err(Error::DegenerateInput("non-finite operator entry".into()));
        }
        if g.norm() == 0.0 {
            return Err(Error::DegenerateInput("zero operator".into()));
        }
        if !ip.is_self_adjoint(&g, policy.self_adjoint) {
            return Err(Error::NotSelfAdjoint);
        }
        Ok(Self::from_symmetric(ip, symmetrize(&(ip.gram() * &g)), policy))
    }

    /// Quadric with the given coordinate matrix `T`, i.e. `g = H⁻¹ T`.
    pub fn from_coordinate_matrix(
        ip: &InnerProduct,
        t: DMatrix<f64>,
        policy: &NumericPolicy,
    ) -> Result<Self> {
        check_square(&t, ip.dim())?;
        if t.norm() == 0.0 {
            return Err(Error::DegenerateInput("zero coordinate matrix".into()));
        }
        let skew = crate::linalg::asymmetry(&t);
        if skew > policy.self_adjoint {
            return Err(Error::NotSymmetric(skew));
        }
        Ok(Self::from_symmetric(ip, symmetrize(&t), policy))
    }

    /// Regular quadric whose inverse operator is `g_inv`.
    pub fn from_inverse_dual(
        ip: &InnerProduct,
        g_inv: &LinearMap,
        policy: &NumericPolicy,
    ) -> Result<Self> {
        check_square(g_inv, ip.dim())?;
        if !ip.is_self_adjoint(g_inv, policy.self_adjoint) {
            return Err(Error::NotSelfAdjoint);
        }
        let g = checked_inverse(g_inv, policy).ok_or(Error::SingularQuadric)?;
        Ok(Self::from_computed(ip, &g, policy))
    }

    /// Wraps an operator obtained by arithmetic on self-adjoint operators,
    /// absorbing the rounding-level asymmetry of its coordinate matrix.
    pub(crate) fn from_computed(ip: &InnerProduct, g: &DMatrix<f64>, policy: &NumericPolicy) -> Self {
        Self::from_symmetric(ip, symmetrize(&(ip.gram() * g)), policy)
    }

    fn from_symmetric(ip: &InnerProduct, coord: DMatrix<f64>, policy: &NumericPolicy) -> Self {
        let g = ip.gram_inverse() * &coord;
        let regular = condition_number(&coord) * policy.rank <= 1.0;
        Self {
            ip: ip.clone(),
            g,
            coord,
            regular,
        }
    }

    pub fn inner_product(&self) -> &InnerProduct {
        &self.ip
    }

    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    /// The self-adjoint operator `g`.
    pub fn operator(&self) -> &DMatrix<f64> {
        &self.g
    }

    /// The symmetric matrix `T = H g`.
    pub fn coordinate_matrix(&self) -> &DMatrix<f64> {
        &self.coord
    }

    /// Coordinate matrix scaled so its largest absolute entry is 1.
    pub fn normalized_coordinate_matrix(&self) -> DMatrix<f64> {
        &self.coord / self.coord.amax()
    }

    pub fn is_regular(&self) -> bool {
        self.regular
    }

    /// `g⁻¹`, the inverse-dual operator.
    pub fn inverse_operator(&self, policy: &NumericPolicy) -> Result<DMatrix<f64>> {
        if !self.regular {
            return Err(Error::SingularQuadric);
        }
        checked_inverse(&self.g, policy).ok_or(Error::SingularQuadric)
    }

    /// The same quadric with representative `c·g`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c.is_finite() && c != 0.0) {
            return Err(Error::DegenerateParameter(format!("scale {c}")));
        }
        Ok(Self {
            ip: self.ip.clone(),
            g: &self.g * c,
            coord: &self.coord * c,
            regular: self.regular,
        })
    }

    /// `⟨x, g x⟩`.
    pub fn evaluate(&self, x: &DVector<f64>) -> f64 {
        x.dot(&(&self.coord * x))
    }

    /// Tests `|⟨x, g x⟩| ≤ tol·‖T‖·‖x‖²`.
    pub fn contains(&self, x: &ProjectivePoint, tol: f64) -> bool {
        let x = x.coords();
        x.len() == self.dim() && self.evaluate(x).abs() <= tol * self.coord.norm() * x.norm_squared()
    }

    /// Relative size of `⟨x, g x⟩`, the quantity compared in [`Quadric::contains`].
    pub fn membership_residual(&self, x: &DVector<f64>) -> f64 {
        self.evaluate(x).abs() / (self.coord.norm() * x.norm_squared())
    }

    /// `g x`, which spans the conjugate direction of the tangent hyperplane
    /// `{w : ⟨w, g x⟩ = 0}` at a point `x` of the quadric.
    pub fn gradient(&self, x: &DVector<f64>, tol: f64) -> Result<DVector<f64>> {
        check_len(x, self.dim())?;
        let gx = &self.g * x;
        if gx.norm() <= tol * self.g.norm() * x.norm() {
            return Err(Error::ZeroGradient);
        }
        Ok(gx)
    }

    /// Pullback of the dual quadric: the pseudo-inverse of `T`.
    pub fn dual_pullback(&self, rank_tol: f64) -> DualPullback {
        DualPullback {
            form: pseudo_inverse(&self.coord, rank_tol),
        }
    }

    /// The quadric with inverse-dual operator `k g⁻¹ k*`.
    pub fn dual_k_image(&self, k: &LinearMap, policy: &NumericPolicy) -> Result<Self> {
        let g_inv = self.inverse_operator(policy)?;
        let image = k * g_inv * self.ip.adjoint(k)?;
        Self::from_inverse_dual(&self.ip, &image, policy)
    }

    /// Equality of the coordinate matrices up to a nonzero scale.
    pub fn projectively_equal(&self, other: &Self, tol: f64) -> bool {
        if self.dim() != other.dim() {
            return false;
        }
        let a = &self.coord / self.coord.norm();
        let b = &other.coord / other.coord.norm();
        (&a - &b).norm().min((&a + &b).norm()) <= tol
    }

    /// Real points of the quadric on the projective line through `a` and
    /// `b`, each with multiplicity 1 or 2 (tangency). Returns `None` when
    /// the whole line lies on the quadric.
    pub fn points_on_line(
        &self,
        a: &DVector<f64>,
        b: &DVector<f64>,
        tol: f64,
    ) -> Option<Vec<(DVector<f64>, u8)>> {
        let ta = &self.coord * a;
        let alpha = a.dot(&ta);
        let beta = b.dot(&ta);
        let gamma = b.dot(&(&self.coord * b));
        let scale = self.coord.norm() * a.norm() * b.norm();
        binary_quadratic_roots(alpha, beta, gamma, scale, tol).map(|roots| {
            roots
                .into_iter()
                .map(|((u, v), m)| (a * u + b * v, m))
                .collect()
        })
    }

    /// Up to `count` real points of a conic, found by root isolation along
    /// lines of a sweep.
    ///
    /// In an affine chart the sweep consists of `min(⌈count/2⌉, 720)`
    /// equally spaced directions out of 720 through the chart origin; on the
    /// ideal line the sweep is over the line itself. Points come in sweep
    /// order.
    pub fn sample_points(&self, count: usize, chart: Chart) -> Result<Vec<ProjectivePoint>> {
        self.sample_points_with(count, chart, Execution::default())
    }

    pub fn sample_points_with(
        &self,
        count: usize,
        chart: Chart,
        exec: Execution,
    ) -> Result<Vec<ProjectivePoint>> {
        if self.dim() != 3 {
            return Err(Error::UnsupportedDimension(self.dim()));
        }
        let axis = match chart {
            Chart::Affine(a) | Chart::Ideal(a) => a,
        };
        if axis >= 3 {
            return Err(Error::ChartFailure(format!("chart axis {axis} out of range")));
        }
        let (i, j) = match axis {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        let unit = |k: usize| DVector::from_fn(3, |r, _| if r == k { 1.0 } else { 0.0 });
        let (ei, ej, origin) = (unit(i), unit(j), unit(axis));
        let mut points = Vec::new();
        match chart {
            Chart::Affine(_) => {
                let lines = count.div_ceil(2).min(SWEEP_DIRECTIONS);
                let ks: Vec<usize> = (0..lines).map(|n| n * SWEEP_DIRECTIONS / lines).collect();
                let per_line = exec.map(&ks, |&k| {
                    let theta = k as f64 * PI / SWEEP_DIRECTIONS as f64;
                    let d = &ei * theta.cos() + &ej * theta.sin();
                    let at = |phi: f64| &origin * phi.cos() + &d * phi.sin();
                    let f = |phi: f64| self.evaluate(&at(phi));
                    let edge = FRAC_PI_2 - 1e-9;
                    isolate_roots(f, -edge, edge, SCAN_STEPS)
                        .into_iter()
                        .map(at)
                        .collect::<Vec<_>>()
                });
                points.extend(per_line.into_iter().flatten());
            }
            Chart::Ideal(_) => {
                let at = |theta: f64| &ei * theta.cos() + &ej * theta.sin();
                let f = |theta: f64| self.evaluate(&at(theta));
                // The form is π-periodic along the line; scan the half-open
                // interval and catch a root sitting exactly at the seam.
                let mut roots = isolate_roots(f, 0.0, PI, SWEEP_DIRECTIONS);
                if let Some(&last) = roots.last() {
                    if PI - last < BISECTION_WIDTH {
                        roots.pop();
                    }
                }
                points.extend(roots.into_iter().map(at));
            }
        }
        points
            .into_iter()
            .take(count)
            .map(ProjectivePoint::new)
            .collect()
    }
}

/// Roots of `f` on `[lo, hi]` located by a uniform sign scan and refined by
/// bisection. Roots without a sign change (tangencies) are found only when
/// they land exactly on a scan node.
pub(crate) fn isolate_roots(f: impl Fn(f64) -> f64, lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    let node = |k: usize| lo + (hi - lo) * k as f64 / steps as f64;
    let values: Vec<f64> = (0..=steps).map(|k| f(node(k))).collect();
    let mut roots = Vec::new();
    for k in 0..steps {
        let (fa, fb) = (values[k], values[k + 1]);
        if fa == 0.0 {
            roots.push(node(k));
        } else if fa * fb < 0.0 {
            roots.push(bisect(&f, node(k), node(k + 1), fa));
        }
    }
    if values[steps] == 0.0 {
        roots.push(node(steps));
    }
    roots
}

fn bisect(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, mut fa: f64) -> f64 {
    while b - a > BISECTION_WIDTH {
        let mid = 0.5 * (a + b);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

/// Real solutions `(u : v)` of `α u² + 2β uv + γ v² = 0` with multiplicity.
/// `None` means the form vanishes identically.
pub(crate) fn binary_quadratic_roots(
    alpha: f64,
    beta: f64,
    gamma: f64,
    scale: f64,
    tol: f64,
) -> Option<Vec<((f64, f64), u8)>> {
    let size = alpha.abs().max(beta.abs()).max(gamma.abs());
    if size <= tol * scale {
        return None;
    }
    let disc = beta * beta - alpha * gamma;
    if disc.abs() <= tol * size * size {
        // Double root: the kernel of [[α, β], [β, γ]].
        let root = if alpha.abs() >= gamma.abs() {
            (-beta, alpha)
        } else {
            (gamma, -beta)
        };
        return Some(vec![(root, 2)]);
    }
    if disc < 0.0 {
        return Some(Vec::new());
    }
    let q = -(beta + beta.signum() * disc.sqrt());
    let q = if beta == 0.0 { -disc.sqrt() } else { q };
    Some(vec![((q, alpha), 1), ((gamma, q), 1)])
}

/// The pullback of a dual quadric: a symmetric form supported on the image
/// of the defining coordinate matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DualPullback {
    form: DMatrix<f64>,
}

impl DualPullback {
    pub fn form(&self) -> &DMatrix<f64> {
        &self.form
    }

    /// Applies the pullback construction to this form again.
    pub fn pullback(&self, rank_tol: f64) -> DualPullback {
        DualPullback {
            form: pseudo_inverse(&self.form, rank_tol),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn diag(xs: &[f64]) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_column_slice(xs))
    }

    fn pt(xs: &[f64]) -> ProjectivePoint {
        ProjectivePoint::from_slice(xs).unwrap()
    }

    fn worked() -> Quadric {
        let ip = InnerProduct::diagonal(&[1.0, -1.0, 1.0]).unwrap();
        Quadric::new(&ip, diag(&[-3.0, -8.0, -1.0]), &NumericPolicy::default()).unwrap()
    }

    fn euclid(t: &[f64]) -> Quadric {
        Quadric::from_coordinate_matrix(&InnerProduct::euclidean(3), diag(t), &NumericPolicy::default())
            .unwrap()
    }

    #[test]
    fn evaluate_examples() {
        let q = worked();
        let x = DVector::from_column_slice(&[1.0, 1.0, 5f64.sqrt()]);
        assert!(q.evaluate(&x).abs() < 1e-14);
        let mink = Quadric::new(
            &InnerProduct::diagonal(&[1.0, -1.0, 1.0]).unwrap(),
            diag(&[0.5, -1.0, -1.0]),
            &NumericPolicy::default(),
        )
        .unwrap();
        let r = (2.0f64 / 3.0).sqrt();
        assert!(mink.evaluate(&DVector::from_column_slice(&[r, r, 1.0])).abs() < 1e-15);
        let y = DVector::from_column_slice(&[0.3, -1.2, 2.0]);
        assert_relative_eq!(q.evaluate(&(&y * 2.5)), 6.25 * q.evaluate(&y), epsilon = 1e-12);
    }

    #[test]
    fn contains_examples() {
        let q = worked();
        let x = pt(&[1.0, 0.375f64.sqrt(), 0.0]);
        assert!(q.contains(&x, 1e-9));
        assert!(!q.contains(&pt(&[1.0, 0.0, 0.0]), 1e-9));
        let scaled = ProjectivePoint::new(x.coords() * -7.0).unwrap();
        assert!(q.contains(&scaled, 1e-9));
    }

    #[test]
    fn rejects_non_self_adjoint() {
        let ip = InnerProduct::diagonal(&[1.0, -1.0, 1.0]).unwrap();
        let mut g = DMatrix::zeros(3, 3);
        g[(0, 1)] = 1.0;
        assert_eq!(Quadric::new(&ip, g, &NumericPolicy::default()), Err(Error::NotSelfAdjoint));
    }

    #[test]
    fn dual_pullback_examples() {
        let lam = 0.7;
        let c2 = 2.0;
        let q = euclid(&[1.0 / (c2 + lam), 1.0 / lam, -1.0]);
        assert_relative_eq!(*q.dual_pullback(1e-10).form(), diag(&[c2 + lam, lam, -1.0]), epsilon = 1e-14);
        let omega = euclid(&[1.0, 1.0, 0.0]);
        assert_relative_eq!(*omega.dual_pullback(1e-10).form(), diag(&[1.0, 1.0, 0.0]), epsilon = 1e-15);
        let id = euclid(&[1.0, 1.0, 1.0]);
        assert_relative_eq!(*id.dual_pullback(1e-10).form(), DMatrix::identity(3, 3), epsilon = 1e-15);
    }

    #[test]
    fn dual_k_image_examples() {
        let policy = NumericPolicy::default();
        let q = worked();
        let same = q.dual_k_image(&DMatrix::identity(3, 3), &policy).unwrap();
        assert!(same.projectively_equal(&q, 1e-12));
        let scaled = q.dual_k_image(&(DMatrix::identity(3, 3) * 3.0), &policy).unwrap();
        assert!(scaled.projectively_equal(&q, 1e-12));
        let image = q.dual_k_image(&diag(&[2.0, 3.0, 1.0]), &policy).unwrap();
        assert_relative_eq!(
            image.inverse_operator(&policy).unwrap(),
            diag(&[-4.0 / 3.0, -9.0 / 8.0, -1.0]),
            epsilon = 1e-14
        );
        let singular = euclid(&[1.0, 1.0, 0.0]);
        assert_eq!(
            singular.dual_k_image(&DMatrix::identity(3, 3), &policy),
            Err(Error::SingularQuadric)
        );
    }

    #[test]
    fn gradient_examples() {
        let q = worked();
        let s = 0.375f64.sqrt();
        let g = q.gradient(&DVector::from_column_slice(&[1.0, s, 0.0]), 1e-12).unwrap();
        assert_relative_eq!(g, DVector::from_column_slice(&[-3.0, -8.0 * s, 0.0]), epsilon = 1e-15);
        let id = euclid(&[1.0, 1.0, 1.0]);
        let u = DVector::from_column_slice(&[0.6, 0.8, 0.0]);
        assert_relative_eq!(id.gradient(&u, 1e-12).unwrap(), u, epsilon = 1e-15);
        let omega = euclid(&[1.0, 1.0, 0.0]);
        assert_eq!(
            omega.gradient(&DVector::from_column_slice(&[0.0, 0.0, 1.0]), 1e-12),
            Err(Error::ZeroGradient)
        );
    }

    fn has_point(points: &[ProjectivePoint], target: &[f64]) -> bool {
        let target = pt(target);
        points.iter().any(|p| p.approx_eq(&target, 1e-10))
    }

    #[test]
    fn sample_ellipse_axis_intercepts() {
        let q = euclid(&[0.5, 1.0, -1.0]);
        let points = q.sample_points(4, Chart::standard()).unwrap();
        assert_eq!(points.len(), 4);
        let r2 = 2f64.sqrt();
        for target in [[r2, 0.0, 1.0], [-r2, 0.0, 1.0], [0.0, 1.0, 1.0], [0.0, -1.0, 1.0]] {
            assert!(has_point(&points, &target), "missing {target:?}");
        }
        for p in &points {
            assert!(q.membership_residual(p.coords()) <= 1e-10);
        }
    }

    #[test]
    fn sample_hyperbola_vertices() {
        let q = euclid(&[2.0, -2.0, -1.0]);
        let points = q.sample_points(2, Chart::standard()).unwrap();
        let r = 0.5f64.sqrt();
        assert!(has_point(&points, &[r, 0.0, 1.0]));
        assert!(has_point(&points, &[-r, 0.0, 1.0]));
        let many = q.sample_points(400, Chart::standard()).unwrap();
        assert!(many.len() > 100 && many.len() <= 400);
    }

    #[test]
    fn sample_ideal_line() {
        let ellipse = euclid(&[0.5, 1.0, -1.0]);
        assert!(ellipse.sample_points(10, Chart::Ideal(2)).unwrap().is_empty());
        let hyperbola = euclid(&[1.0, -4.0, -1.0]);
        let at_infinity = hyperbola.sample_points(10, Chart::Ideal(2)).unwrap();
        assert_eq!(at_infinity.len(), 2);
        assert!(has_point(&at_infinity, &[2.0, 1.0, 0.0]));
        assert!(has_point(&at_infinity, &[2.0, -1.0, 0.0]));
    }

    #[test]
    fn sample_requires_plane() {
        let q = Quadric::new(&InnerProduct::euclidean(4), DMatrix::identity(4, 4), &NumericPolicy::default())
            .unwrap();
        assert_eq!(q.sample_points(4, Chart::standard()), Err(Error::UnsupportedDimension(4)));
    }

    #[test]
    fn gradient_is_conjugate_to_sampled_tangent() {
        let q = euclid(&[0.25, 1.0 / 3.0, -1.0]);
        let points = q.sample_points(1440, Chart::standard()).unwrap();
        let affine: Vec<_> = points.iter().map(|p| p.affine(2, 1e-12).unwrap()).collect();
        // Points come in pairs per direction; neighbours two apart share a branch.
        for k in 0..affine.len() - 2 {
            let (a, b) = (&affine[k], &affine[k + 2]);
            let secant = (b - a) / (b - a).norm();
            let mid = (a + b) * 0.5;
            let grad = q.gradient(&mid, 1e-12).unwrap();
            assert!(secant.dot(&grad).abs() / grad.norm() < 1e-2);
            let g = q.gradient(a, 1e-12).unwrap();
            assert!(secant.dot(&g).abs() / g.norm() < 1e-2);
        }
        // Tighter check with a symmetric secant.
        let a = &affine[4];
        let (prev, next) = (&affine[2], &affine[6]);
        let tangent = next - prev;
        let g = q.gradient(a, 1e-12).unwrap();
        assert!(tangent.dot(&g).abs() / (tangent.norm() * g.norm()) < 1e-6);
    }

    #[test]
    fn binary_roots() {
        let r = binary_quadratic_roots(1.0, 0.0, -4.0, 1.0, 1e-12).unwrap();
        let ratios: Vec<f64> = r.iter().map(|((u, v), _)| u / v).collect();
        assert!(ratios.iter().any(|x| (x - 2.0).abs() < 1e-15));
        assert!(ratios.iter().any(|x| (x + 2.0).abs() < 1e-15));
        let double = binary_quadratic_roots(1.0, -1.0, 1.0, 1.0, 1e-12).unwrap();
        assert_eq!(double.len(), 1);
        assert_eq!(double[0].1, 2);
        assert!(binary_quadratic_roots(1.0, 0.0, 1.0, 1.0, 1e-12).unwrap().is_empty());
        assert!(binary_quadratic_roots(0.0, 0.0, 0.0, 1.0, 1e-12).is_none());
    }
}
