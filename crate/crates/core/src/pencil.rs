//! Projection pencils `g_t⁻¹ = g₀⁻¹ − t p` and conic intersection.

use nalgebra::{DMatrix, DVector};

use crate::bilinear::{InnerProduct, Projection, ProjectivePoint};
use crate::error::{Error, Result};
use crate::linalg::{checked_inverse, cross, inertia, svd_sorted};
use crate::policy::NumericPolicy;
use crate::quadric::{binary_quadratic_roots, isolate_roots, Quadric};

/// An open interval, possibly unbounded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, t: f64) -> bool {
        self.lo < t && t < self.hi
    }

    /// A finite point inside the interval.
    pub fn interior_point(&self) -> f64 {
        match (self.lo.is_finite(), self.hi.is_finite()) {
            (true, true) => 0.5 * (self.lo + self.hi),
            (true, false) => self.lo + 1.0,
            (false, true) => self.hi - 1.0,
            (false, false) => 0.0,
        }
    }
}

/// A member `g_t` of a pencil.
#[derive(Debug, Clone, PartialEq)]
pub struct PencilMember {
    pub t: f64,
    pub quadric: Quadric,
}

/// The pencil of quadrics with inverse-dual operators `g₀⁻¹ − t p`.
#[derive(Debug, Clone)]
pub struct ProjectionPencil {
    ip: InnerProduct,
    p: Projection,
    g0: Quadric,
    g0_inv: DMatrix<f64>,
    singular: Vec<f64>,
    components: Vec<Interval>,
    policy: NumericPolicy,
}

impl ProjectionPencil {
    pub fn new(ip: &InnerProduct, p: &Projection, g0: &Quadric, policy: &NumericPolicy) -> Result<Self> {
        if p.dim() != ip.dim() {
            return Err(Error::DimensionMismatch {
                expected: ip.dim(),
                found: p.dim(),
            });
        }
        if g0.dim() != ip.dim() {
            return Err(Error::DimensionMismatch {
                expected: ip.dim(),
                found: g0.dim(),
            });
        }
        let g0_inv = g0.inverse_operator(policy)?;
        let singular = singular_parameters_of(g0.operator(), p, policy)?;
        let components = components_between(&singular, policy.singular_parameter);
        Ok(Self {
            ip: ip.clone(),
            p: p.clone(),
            g0: g0.clone(),
            g0_inv,
            singular,
            components,
            policy: *policy,
        })
    }

    pub fn inner_product(&self) -> &InnerProduct {
        &self.ip
    }

    pub fn projection(&self) -> &Projection {
        &self.p
    }

    pub fn base(&self) -> &Quadric {
        &self.g0
    }

    pub fn policy(&self) -> &NumericPolicy {
        &self.policy
    }

    /// `g₀⁻¹ − t p`.
    pub fn inverse_dual(&self, t: f64) -> DMatrix<f64> {
        &self.g0_inv - self.p.matrix() * t
    }

    /// The distinguished singular member at infinity, whose inverse-dual
    /// operator is `p` itself.
    pub fn member_at_infinity(&self) -> DMatrix<f64> {
        self.p.matrix().clone()
    }

    fn near_singular(&self, t: f64) -> Option<f64> {
        self.singular
            .iter()
            .copied()
            .find(|&s| (t - s).abs() <= self.policy.singular_parameter * s.abs().max(1.0))
    }

    pub fn member(&self, t: f64) -> Result<PencilMember> {
        if !t.is_finite() || self.near_singular(t).is_some() {
            return Err(Error::SingularParameter(t));
        }
        if t == 0.0 {
            return Ok(PencilMember {
                t,
                quadric: self.g0.clone(),
            });
        }
        let inv = self.inverse_dual(t);
        let g = checked_inverse(&inv, &self.policy).ok_or(Error::SingularParameter(t))?;
        Ok(PencilMember {
            t,
            quadric: Quadric::from_computed(&self.ip, &g, &self.policy),
        })
    }

    /// Real roots of `det(g₀⁻¹ − t p)`, with multiplicity, ascending.
    pub fn singular_parameters(&self) -> &[f64] {
        &self.singular
    }

    /// Open intervals of regular parameters, ascending.
    pub fn type_components(&self) -> &[Interval] {
        &self.components
    }

    /// Index of the type component containing `t`.
    pub fn component_of(&self, t: f64) -> Result<usize> {
        if self.near_singular(t).is_some() {
            return Err(Error::SingularParameter(t));
        }
        self.components
            .iter()
            .position(|c| c.contains(t))
            .ok_or(Error::SingularParameter(t))
    }

    /// Whether two regular parameters give members of the same type.
    pub fn same_type(&self, t1: f64, t2: f64) -> Result<bool> {
        Ok(self.component_of(t1)? == self.component_of(t2)?)
    }

    /// Inertia of the coordinate matrix of `g_t`.
    pub fn member_inertia(&self, t: f64) -> Result<(usize, usize, usize)> {
        let member = self.member(t)?;
        Ok(inertia(member.quadric.coordinate_matrix(), self.policy.rank))
    }

    /// Fits `q⁻¹ ≈ λ g₀⁻¹ + μ p`; returns `(λ, μ)` when the relative
    /// residual is at most `tol`.
    pub fn contains_quadric(&self, q: &Quadric, tol: f64) -> Option<(f64, f64)> {
        let (coeffs, residual) = self.fit(q).ok()?;
        (residual <= tol).then_some(coeffs)
    }

    /// Coefficients and relative residual of the least-squares fit used by
    /// [`ProjectionPencil::contains_quadric`].
    pub fn fit(&self, q: &Quadric) -> Result<((f64, f64), f64)> {
        let target = q.inverse_operator(&self.policy)?;
        let n = self.ip.dim();
        let mut design = DMatrix::zeros(n * n, 2);
        design.set_column(0, &DVector::from_column_slice(self.g0_inv.as_slice()));
        design.set_column(1, &DVector::from_column_slice(self.p.matrix().as_slice()));
        let rhs = DVector::from_column_slice(target.as_slice());
        let sol = design
            .clone()
            .svd(true, true)
            .solve(&rhs, 1e-14)
            .map_err(|e| Error::DegenerateInput(e.to_string()))?;
        let residual = (&design * &sol - &rhs).norm() / rhs.norm();
        Ok(((sol[0], sol[1]), residual))
    }

    /// `|⟨p g₀ x, g_t x⟩| / (‖g₀ x‖ ‖g_t x‖)` at a common point `x` of the
    /// base and the member `t ≠ 0`.
    pub fn orthogonality_check(&self, t: f64, x: &ProjectivePoint, tol: f64) -> Result<f64> {
        if t == 0.0 {
            return Err(Error::DegenerateParameter("member must differ from the base".into()));
        }
        let member = self.member(t)?;
        if !self.g0.contains(x, tol) || !member.quadric.contains(x, tol) {
            return Err(Error::NotAnIntersectionPoint);
        }
        let x = x.coords();
        let g0x = self.g0.operator() * x;
        let gtx = member.quadric.operator() * x;
        let value = self.ip.inner(&(self.p.matrix() * &g0x), &gtx)?;
        Ok(value.abs() / (g0x.norm() * gtx.norm()))
    }

    /// The same pencil with base `g_{t0}`; its parameter `s` corresponds to
    /// `t0 + s` here.
    pub fn rebased(&self, t0: f64) -> Result<Self> {
        let member = self.member(t0)?;
        Self::new(&self.ip, &self.p, &member.quadric, &self.policy)
    }

    /// Curvilinear quadrangles cut out by members `a.0, a.1` and `b.0, b.1`.
    ///
    /// Corners are `x = A₀∩B₀`, `y = A₀∩B₁`, `x' = A₁∩B₀`, `y' = A₁∩B₁`.
    /// Corresponding corners are paired by the sign pattern of their affine
    /// coordinates in the chart `coords[axis] = 1`, which identifies them for
    /// pencils centred at the chart origin with the coordinate axes as
    /// common axes (all gallery scenes). Corners on a coordinate axis are
    /// skipped as ambiguous.
    pub fn quadrangles(&self, a: (f64, f64), b: (f64, f64), axis: usize) -> Result<Vec<Quadrangle>> {
        if self.ip.dim() != 3 {
            return Err(Error::UnsupportedDimension(self.ip.dim()));
        }
        let q = |t: f64| self.member(t).map(|m| m.quadric);
        let (a0, a1, b0, b1) = (q(a.0)?, q(a.1)?, q(b.0)?, q(b.1)?);
        let corners = |u: &Quadric, v: &Quadric| -> Result<Vec<DVector<f64>>> {
            Ok(intersect_conics(u, v, &self.policy)?
                .into_iter()
                .filter_map(|c| c.point.affine(axis, 1e-9))
                .collect())
        };
        let xs = corners(&a0, &b0)?;
        let ys = corners(&a0, &b1)?;
        let xps = corners(&a1, &b0)?;
        let yps = corners(&a1, &b1)?;
        let others: Vec<usize> = (0..3).filter(|&i| i != axis).collect();
        let pattern = |v: &DVector<f64>| -> Option<(bool, bool)> {
            let (s, t) = (v[others[0]], v[others[1]]);
            let tiny = 1e-9 * v.norm();
            (s.abs() > tiny && t.abs() > tiny).then_some((s > 0.0, t > 0.0))
        };
        let partner = |v: &DVector<f64>, pool: &[DVector<f64>]| -> Option<DVector<f64>> {
            let key = pattern(v)?;
            let mut found = pool.iter().filter(|w| pattern(w) == Some(key));
            let first = found.next()?;
            found.next().is_none().then(|| first.clone())
        };
        let rho2 = |w: DVector<f64>| self.ip.norm_sq(&w);
        let mut out = Vec::new();
        for x in &xs {
            let Some(xp) = partner(x, &xps) else { continue };
            for y in &ys {
                let Some(yp) = partner(y, &yps) else { continue };
                out.push(Quadrangle {
                    diagonal_xy: rho2(x - &yp)?,
                    diagonal_yx: rho2(&xp - y)?,
                    x: x.clone(),
                    y: y.clone(),
                    x_prime: xp.clone(),
                    y_prime: yp,
                });
            }
        }
        Ok(out)
    }
}

/// Four corners of a curvilinear quadrangle in affine coordinates together
/// with the signed squared lengths `ρ²(x − y')` and `ρ²(x' − y)` of its
/// diagonals.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadrangle {
    pub x: DVector<f64>,
    pub y: DVector<f64>,
    pub x_prime: DVector<f64>,
    pub y_prime: DVector<f64>,
    pub diagonal_xy: f64,
    pub diagonal_yx: f64,
}

impl Quadrangle {
    /// `|ρ²(x−y') − ρ²(x'−y)| / max(1, |ρ²|)`.
    pub fn residual(&self) -> f64 {
        (self.diagonal_xy - self.diagonal_yx).abs()
            / self.diagonal_xy.abs().max(self.diagonal_yx.abs()).max(1.0)
    }
}

fn singular_parameters_of(g0: &DMatrix<f64>, p: &Projection, policy: &NumericPolicy) -> Result<Vec<f64>> {
    // det(g₀⁻¹ − t p) = det g₀⁻¹ · det(id − t g₀ p), and in the basis adapted
    // to Im p ⊕ Ker p the operator g₀ p has the block form [[G₁₁, 0], [G₂₁, 0]],
    // so the roots are 1/ν for the nonzero eigenvalues ν of G₁₁.
    let m = p.rank();
    if m == 0 {
        return Ok(Vec::new());
    }
    let adapted = p.adapted_inverse() * g0 * p.adapted_basis();
    let block = adapted.view((0, 0), (m, m)).into_owned();
    let scale = block.norm().max(f64::MIN_POSITIVE);
    let mut roots = Vec::new();
    for z in block.complex_eigenvalues().iter() {
        let real = z.im.abs() <= policy.eigen_cluster * scale;
        if real && z.re.abs() > policy.rank * scale {
            roots.push(1.0 / z.re);
        }
    }
    roots.sort_by(f64::total_cmp);
    Ok(roots)
}

fn components_between(singular: &[f64], tol: f64) -> Vec<Interval> {
    let mut cuts: Vec<f64> = Vec::new();
    for &s in singular {
        if cuts.last().is_none_or(|&c| (s - c).abs() > tol * s.abs().max(1.0)) {
            cuts.push(s);
        }
    }
    let mut bounds = vec![f64::NEG_INFINITY];
    bounds.extend(cuts);
    bounds.push(f64::INFINITY);
    bounds.windows(2).map(|w| Interval { lo: w[0], hi: w[1] }).collect()
}

/// Whether `q` is a p-quadric: `Im p` is invariant under `g` and `g = −id`
/// on `Ker p`. The stored representative is tested as is; see
/// [`p_normalization`] for the scale that makes a multiple pass.
pub fn is_p_quadric(q: &Quadric, p: &Projection, tol: f64) -> bool {
    passes(q.operator(), p, tol)
}

fn passes(g: &DMatrix<f64>, p: &Projection, tol: f64) -> bool {
    if g.nrows() != p.dim() {
        return false;
    }
    let pm = p.matrix();
    let comp = p.complement();
    let scale = g.norm();
    let invariant = (pm * g * pm - g * pm).norm() <= tol * scale;
    let kernel = (g * &comp + &comp).norm() <= tol * scale;
    invariant && kernel
}

/// The scalar `s` for which `s·g` satisfies the p-quadric conditions, if any.
///
/// The scale is the least-squares solution of `s G (I−P) = −(I−P)`; when
/// `p = id` the condition on the kernel is void and `s = 1`.
pub fn p_normalization(q: &Quadric, p: &Projection, tol: f64) -> Option<f64> {
    if q.dim() != p.dim() {
        return None;
    }
    let g = q.operator();
        let comp = p.complement();
    let s = if p.rank() == p.dim() {
        1.0
    } else {
        let gc = g * &comp;
        let denom = gc.norm_squared();
        if denom == 0.0 {
            return None;
        }
        -gc.dot(&comp) / denom
    };
    passes(&(g * s), p, tol).then_some(s)
}

/// A real common point of two conics. Multiplicity 2 marks a tangency.
#[derive(Debug, Clone, PartialEq)]
pub struct ConicIntersection {
    pub point: ProjectivePoint,
    pub multiplicity: u8,
}

const PENCIL_SCAN: usize = 720;

/// Real common points of two conics.
///
/// A degenerate member of the line pencil `cos θ T₁ + sin θ T₂` is located
/// by a sign scan of its determinant, split into its two lines, and each
/// line is intersected with the first conic. The determinant is odd under
/// `θ ↦ θ + π`, so at least one such member is always found; every real
/// degenerate member contains all real common points, and the candidates of
/// all members found are merged.
pub fn intersect_conics(q1: &Quadric, q2: &Quadric, policy: &NumericPolicy) -> Result<Vec<ConicIntersection>> {
    if q1.dim() != 3 || q2.dim() != 3 {
        return Err(Error::UnsupportedDimension(q1.dim().max(q2.dim())));
    }
    let t1 = q1.coordinate_matrix() / q1.coordinate_matrix().norm();
    let t2 = q2.coordinate_matrix() / q2.coordinate_matrix().norm();
    if !(t1.iter().chain(t2.iter()).all(|v| v.is_finite())) {
        return Err(Error::DegenerateInput("zero coordinate matrix".into()));
    }
    if (&t1 - &t2).norm().min((&t1 + &t2).norm()) <= policy.projective {
        return Err(Error::IdenticalQuadrics);
    }
    let member = |theta: f64| &t1 * theta.cos() + &t2 * theta.sin();
    let f = |theta: f64| member(theta).determinant();
    let mut thetas = isolate_roots(f, 0.0, std::f64::consts::PI, PENCIL_SCAN);
    if thetas.is_empty() {
        thetas.push(0.0);
    }
    let mut found: Vec<ConicIntersection> = Vec::new();
    for theta in thetas {
        let d = member(theta);
        for cand in split_and_intersect(&d, &t1, &t2, policy)? {
            let x = polish(&cand.0, &t1, &t2);
            let point = ProjectivePoint::new(x)?;
            if !(q1.contains(&point, policy.membership) && q2.contains(&point, policy.membership)) {
                continue;
            }
            match found.iter_mut().find(|f| f.point.approx_eq(&point, 1e-7)) {
                Some(existing) => existing.multiplicity = existing.multiplicity.max(cand.1),
                None => found.push(ConicIntersection {
                    point,
                    multiplicity: cand.1,
                }),
            }
        }
    }
    Ok(found)
}

/// Candidates `(x, multiplicity)` from one degenerate member `d`.
fn split_and_intersect(
    d: &DMatrix<f64>,
    t1: &DMatrix<f64>,
    t2: &DMatrix<f64>,
    policy: &NumericPolicy,
) -> Result<Vec<(DVector<f64>, u8)>> {
    let (s, v) = svd_sorted(d);
    let tol = policy.line_pair;
    let mut lines: Vec<DVector<f64>> = Vec::new();
    let mut out = Vec::new();
    if s[1] <= tol * s[0] {
        // Double line: the row space of d.
        let (_, u) = svd_sorted(&d.transpose());
        lines.push(u.column(0).into_owned());
    } else {
        let adj = adjugate(d);
        let i = (0..3)
            .max_by(|&a, &b| adj[(a, a)].abs().total_cmp(&adj[(b, b)].abs()))
            .expect("three indices");
        let bii = adj[(i, i)];
        if bii < 0.0 {
            let vertex = adj.column(i) / (-bii).sqrt();
            let mut best: Option<(f64, DMatrix<f64>)> = None;
            for sign in [1.0, -1.0] {
                let c = d + skew(&(&vertex * sign));
                let (cs, _) = svd_sorted(&c);
                let ratio = cs[1] / cs[0];
                if best.as_ref().is_none_or(|(r, _)| ratio < *r) {
                    best = Some((ratio, c));
                }
            }
            let (_, c) = best.expect("two candidates");
            let (r, col) = argmax_abs(&c);
            lines.push(c.row(r).transpose());
            lines.push(c.column(col).into_owned());
        } else {
            // Conjugate complex lines: their real vertex is the only real
            // point of the member.
            let vertex = v.column(2).into_owned();
            out.push((vertex, 2));
        }
    }
    let t1n = t1.norm();
    for line in &lines {
        let (a, b) = line_span(line);
        let roots = binary_quadratic_roots(
            a.dot(&(t1 * &a)),
            b.dot(&(t1 * &a)),
            b.dot(&(t1 * &b)),
            t1n,
            1e-12,
        );
        let roots = match roots {
            Some(r) => r,
            // The line is a component of the first conic: use the second.
            None => binary_quadratic_roots(
                a.dot(&(t2 * &a)),
                b.dot(&(t2 * &a)),
                b.dot(&(t2 * &b)),
                t2.norm(),
                1e-12,
            )
            .ok_or_else(|| Error::DegenerateInput("conics share a line".into()))?,
        };
        for ((u, w), m) in roots {
            out.push((&a * u + &b * w, m));
        }
    }
    // A point reached from both lines is the vertex of the pair, where the
    // member touches the conic twice.
    let mut merged: Vec<(DVector<f64>, u8)> = Vec::new();
    for (x, m) in out {
        let p = x.normalize();
        match merged.iter_mut().find(|(y, _)| {
            let q = y.normalize();
            (&p - &q).norm().min((&p + &q).norm()) < 1e-7
        }) {
            Some(existing) => existing.1 = existing.1.max(m).max(2),
            None => merged.push((x, m)),
        }
    }
    Ok(merged)
}

fn adjugate(d: &DMatrix<f64>) -> DMatrix<f64> {
    let cof = |r: usize, c: usize| {
        let rows: Vec<usize> = (0..3).filter(|&i| i != r).collect();
        let cols: Vec<usize> = (0..3).filter(|&i| i != c).collect();
        let m = d[(rows[0], cols[0])] * d[(rows[1], cols[1])] - d[(rows[0], cols[1])] * d[(rows[1], cols[0])];
        if (r + c).is_multiple_of(2) {
            m
        } else {
            -m
        }
    };
    DMatrix::from_fn(3, 3, |r, c| cof(c, r))
}

fn skew(p: &DVector<f64>) -> DMatrix<f64> {
    DMatrix::from_row_slice(3, 3, &[0.0, p[2], -p[1], -p[2], 0.0, p[0], p[1], -p[0], 0.0])
}

fn argmax_abs(m: &DMatrix<f64>) -> (usize, usize) {
    let mut best = (0, 0);
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            if m[(r, c)].abs() > m[best].abs() {
                best = (r, c);
            }
        }
    }
    best
}

/// Two orthonormal points spanning the projective line `{x : ℓ·x = 0}`.
fn line_span(line: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
    let l = line.normalize();
    let k = (0..3)
        .min_by(|&a, &b| l[a].abs().total_cmp(&l[b].abs()))
        .expect("three coordinates");
    let e = DVector::from_fn(3, |r, _| if r == k { 1.0 } else { 0.0 });
    let a = cross(&l, &e).normalize();
    let b = cross(&l, &a).normalize();
    (a, b)
}

/// Newton refinement of a common point on the unit sphere, using minimum
/// norm steps; skipped where the Jacobian is rank deficient (tangency).
fn polish(x: &DVector<f64>, t1: &DMatrix<f64>, t2: &DMatrix<f64>) -> DVector<f64> {
    let mut x = x.normalize();
    for _ in 0..8 {
        let f = DVector::from_column_slice(&[
            x.dot(&(t1 * &x)),
            x.dot(&(t2 * &x)),
            0.5 * (x.norm_squared() - 1.0),
        ]);
        if f.amax() < 1e-16 {
            break;
        }
        let j = DMatrix::from_rows(&[
            (t1 * &x * 2.0).transpose(),
            (t2 * &x * 2.0).transpose(),
            x.transpose(),
        ]);
        let (s, _) = svd_sorted(&j);
        if s[2] < 1e-6 * s[0] {
            break;
        }
        let Some(step) = j.try_inverse() else { break };
        let next = &x - step * f;
        x = next.normalize();
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn diag(xs: &[f64]) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_column_slice(xs))
    }

    fn policy() -> NumericPolicy {
        NumericPolicy::default()
    }

    fn pencil(h: &[f64], g0: &[f64], axes: &[usize]) -> ProjectionPencil {
        let ip = InnerProduct::diagonal(h).unwrap();
        let p = Projection::coordinate(h.len(), axes).unwrap();
        let g0 = Quadric::new(&ip, diag(g0), &policy()).unwrap();
        ProjectionPencil::new(&ip, &p, &g0, &policy()).unwrap()
    }

    fn minkowski() -> ProjectionPencil {
        pencil(&[1.0, -1.0, 1.0], &[0.5, -1.0, -1.0], &[0, 1])
    }

    fn euclidean() -> ProjectionPencil {
        pencil(&[1.0, 1.0, 1.0], &[0.5, 1.0, -1.0], &[0, 1])
    }

    fn conic(t: &[f64]) -> Quadric {
        Quadric::from_coordinate_matrix(&InnerProduct::euclidean(3), diag(t), &policy()).unwrap()
    }

    #[test]
    fn member_examples() {
        let pen = minkowski();
        // x₁²/1.5 + x₂²/1.5 = 1 as a coordinate matrix, up to scale.
        let m = pen.member(0.5).unwrap();
        let expected = conic(&[1.0 / 1.5, 1.0 / 1.5, -1.0]);
        assert!(m.quadric.projectively_equal(&expected, 1e-12));
        assert_eq!(pen.member(0.0).unwrap().quadric, *pen.base());
        let e = euclidean().member(-2.0).unwrap();
        assert!(e.quadric.projectively_equal(&conic(&[0.25, 1.0 / 3.0, -1.0]), 1e-12));
        assert!(matches!(pen.member(2.0), Err(Error::SingularParameter(_))));
    }

    #[test]
    fn singular_parameter_examples() {
        assert_eq!(euclidean().singular_parameters().len(), 2);
        let e = euclidean();
        assert_relative_eq!(e.singular_parameters()[0], 1.0, epsilon = 1e-14);
        assert_relative_eq!(e.singular_parameters()[1], 2.0, epsilon = 1e-14);
        let m = minkowski();
        assert_relative_eq!(m.singular_parameters()[0], -1.0, epsilon = 1e-14);
        assert_relative_eq!(m.singular_parameters()[1], 2.0, epsilon = 1e-14);
        let elliptic = pencil(&[1.0, 1.0, 1.0], &[4.0, -4.0, 0.75], &[0, 1, 2]);
        let s = elliptic.singular_parameters();
        assert_eq!(s.len(), 3);
        for (got, want) in s.iter().zip([-0.25, 0.25, 4.0 / 3.0]) {
            assert_relative_eq!(*got, want, epsilon = 1e-13);
        }
    }

    #[test]
    fn components_examples() {
        let m = minkowski();
        let c = m.type_components();
        assert_eq!(c.len(), 3);
        assert_eq!(c[0].lo, f64::NEG_INFINITY);
        assert_relative_eq!(c[1].lo, -1.0, epsilon = 1e-14);
        assert_relative_eq!(c[1].hi, 2.0, epsilon = 1e-14);
        assert!(m.same_type(0.0, 1.5).unwrap());
        assert!(!m.same_type(0.0, 2.5).unwrap());
        assert!(m.same_type(0.0, 2.0).is_err());
        assert_eq!(components_between(&[], 1e-10).len(), 1);
    }

    #[test]
    fn contains_quadric_examples() {
        let pen = euclidean();
        let m = pen.member(0.7).unwrap();
        let (l, mu) = pen.contains_quadric(&m.quadric, 1e-9).unwrap();
        assert_relative_eq!(mu / l, -0.7, epsilon = 1e-12);
        let identity = conic(&[1.0, 1.0, 1.0]);
        assert!(pen.contains_quadric(&identity, 1e-9).is_none());
        assert!(pen.fit(&identity).unwrap().1 >= 1e-3);
        let scaled = pen.base().scaled(5.0).unwrap();
        let (l, mu) = pen.contains_quadric(&scaled, 1e-9).unwrap();
        assert_relative_eq!(l, 0.2, epsilon = 1e-12);
        assert!(mu.abs() < 1e-12);
    }

    #[test]
    fn p_quadric_examples() {
        let ip = InnerProduct::diagonal(&[1.0, -1.0, 1.0]).unwrap();
        let p = Projection::coordinate(3, &[0, 1]).unwrap();
        let q = |d: &[f64]| Quadric::new(&ip, diag(d), &policy()).unwrap();
        assert!(is_p_quadric(&q(&[0.5, -1.0, -1.0]), &p, 1e-12));
        assert!(!is_p_quadric(&q(&[0.5, -1.0, 1.0]), &p, 1e-12));
        // Only a positive multiple of a p-quadric is accepted with scale 1.
        assert_eq!(p_normalization(&q(&[1.0, -2.0, 2.0]), &p, 1e-12), Some(-0.5));
        let id = Projection::identity(3);
        let general = Quadric::new(
            &InnerProduct::euclidean(3),
            DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 0.0, 2.0, -1.0, 3.0, 0.0, 3.0, 4.0]),
            &policy(),
        )
        .unwrap();
        assert!(is_p_quadric(&general, &id, 1e-12));
        assert!(!is_p_quadric(&q(&[1.0, -2.0, 2.0]), &p, 1e-12));
    }

    #[test]
    fn orthogonality_examples() {
        let pen = minkowski();
        let r = (2.0f64 / 3.0).sqrt();
        let x = ProjectivePoint::from_slice(&[r, r, 1.0]).unwrap();
        assert!(pen.orthogonality_check(1.0, &x, 1e-9).unwrap() <= 1e-10);
        let on_base_only = ProjectivePoint::from_slice(&[2f64.sqrt(), 0.0, 1.0]).unwrap();
        assert_eq!(
            pen.orthogonality_check(1.0, &on_base_only, 1e-9),
            Err(Error::NotAnIntersectionPoint)
        );
    }

    #[test]
    fn intersect_four_points() {
        let a = conic(&[0.5, 1.0, -1.0]);
        let b = conic(&[1.0, 0.5, -1.0]);
        let pts = intersect_conics(&a, &b, &policy()).unwrap();
        assert_eq!(pts.len(), 4);
        let r = (2.0f64 / 3.0).sqrt();
        for (s1, s2) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
            let target = ProjectivePoint::from_slice(&[s1 * r, s2 * r, 1.0]).unwrap();
            assert!(pts.iter().any(|p| p.point.approx_eq(&target, 1e-12)));
        }
        assert!(pts.iter().all(|p| p.multiplicity == 1));
    }

    #[test]
    fn intersect_disjoint_and_identical() {
        let a = conic(&[1.0, 1.0, -1.0]);
        let b = conic(&[1.0, 1.0, -4.0]);
        assert!(intersect_conics(&a, &b, &policy()).unwrap().is_empty());
        assert_eq!(intersect_conics(&a, &a.scaled(-2.0).unwrap(), &policy()), Err(Error::IdenticalQuadrics));
    }

    #[test]
    fn intersect_tangent_circles() {
        let a = conic(&[1.0, 1.0, -1.0]);
        // (x₁ − 2x₃)² + x₂² − x₃² = x₁² + x₂² − 4x₁x₃ + 3x₃².
        let t = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, -2.0, 0.0, 1.0, 0.0, -2.0, 0.0, 3.0]);
        let b = Quadric::from_coordinate_matrix(&InnerProduct::euclidean(3), t, &policy()).unwrap();
        let pts = intersect_conics(&a, &b, &policy()).unwrap();
        assert_eq!(pts.len(), 1);
        assert!(pts[0]
            .point
            .approx_eq(&ProjectivePoint::from_slice(&[1.0, 0.0, 1.0]).unwrap(), 1e-7));
        assert_eq!(pts[0].multiplicity, 2);
    }

    #[test]
    fn intersect_general_position() {
        // Circle and a rotated, shifted ellipse meeting in four points.
        let a = conic(&[1.0, 1.0, -4.0]);
        let t = DMatrix::from_row_slice(3, 3, &[1.0, 0.3, 0.2, 0.3, 0.25, -0.1, 0.2, -0.1, -2.0]);
        let b = Quadric::from_coordinate_matrix(&InnerProduct::euclidean(3), t, &policy()).unwrap();
        let pts = intersect_conics(&a, &b, &policy()).unwrap();
        assert!(!pts.is_empty());
        for p in &pts {
            assert!(a.membership_residual(p.point.coords()) < 1e-13);
            assert!(b.membership_residual(p.point.coords()) < 1e-13);
        }
    }

    #[test]
    fn quadrangles_in_euclidean_gallery() {
        let pen = euclidean();
        let quads = pen.quadrangles((0.0, -2.0), (1.2, 1.6), 2).unwrap();
        assert_eq!(quads.len(), 16);
        for q in &quads {
            assert!(q.residual() <= 1e-8, "residual {}", q.residual());
        }
    }
}
