//! Real linear algebra over a fixed, possibly indefinite, inner product.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{
    asymmetry, check_len, check_square, checked_inverse, cluster, condition_number,
    least_squares, real_spectrum, svd_sorted, symmetrize,
};
use crate::policy::NumericPolicy;

/// Operators on the ambient space are plain square matrices.
pub type LinearMap = DMatrix<f64>;

/// A nonsingular symmetric bilinear form `⟨x, y⟩ = xᵀ H y`.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerProduct {
    gram: DMatrix<f64>,
    gram_inv: DMatrix<f64>,
    signature: (usize, usize),
}

impl InnerProduct {
    /// Validates symmetry and nondegeneracy of `gram`.
    ///
    /// The stored matrix is the exact symmetric part of the input, so
    /// `H = Hᵀ` holds bit for bit.
    pub fn new(gram: DMatrix<f64>, policy: &NumericPolicy) -> Result<Self> {
        let n = gram.nrows();
        check_square(&gram, n)?;
        if n == 0 {
            return Err(Error::DegenerateForm);
        }
        let skew = asymmetry(&gram);
        if skew > policy.self_adjoint {
            return Err(Error::NotSymmetric(skew));
        }
        let gram = symmetrize(&gram);
        let eig = gram.clone().symmetric_eigen();
        let largest = eig.eigenvalues.amax();
        if largest == 0.0 || eig.eigenvalues.iter().any(|v| v.abs() <= policy.form_floor * largest) {
            return Err(Error::DegenerateForm);
        }
        let positive = eig.eigenvalues.iter().filter(|&&v| v > 0.0).count();
        let gram_inv = gram.clone().try_inverse().ok_or(Error::DegenerateForm)?;
        Ok(Self {
            gram,
            gram_inv,
            signature: (positive, n - positive),
        })
    }

    /// Diagonal form with the given entries.
    pub fn diagonal(entries: &[f64]) -> Result<Self> {
        Self::new(
            DMatrix::from_diagonal(&DVector::from_column_slice(entries)),
            &NumericPolicy::default(),
        )
    }

    /// The standard positive definite product on `R^dim`.
    pub fn euclidean(dim: usize) -> Self {
        Self::diagonal(&vec![1.0; dim]).expect("identity is nondegenerate")
    }

    pub fn dim(&self) -> usize {
        self.gram.nrows()
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn gram_inverse(&self) -> &DMatrix<f64> {
        &self.gram_inv
    }

    /// Positive and negative inertia of `H`.
    pub fn signature(&self) -> (usize, usize) {
        self.signature
    }

    pub fn inner(&self, x: &DVector<f64>, y: &DVector<f64>) -> Result<f64> {
        check_len(x, self.dim())?;
        check_len(y, self.dim())?;
        Ok(x.dot(&(&self.gram * y)))
    }

    pub fn norm_sq(&self, x: &DVector<f64>) -> Result<f64> {
        self.inner(x, x)
    }

    /// `L* = H⁻¹ Lᵀ H`, characterised by `⟨L* x, y⟩ = ⟨x, L y⟩`.
    pub fn adjoint(&self, l: &LinearMap) -> Result<LinearMap> {
        check_square(l, self.dim())?;
        Ok(&self.gram_inv * l.transpose() * &self.gram)
    }

    /// Tests `‖HL − LᵀH‖ ≤ tol·‖HL‖` in the Frobenius norm.
    pub fn is_self_adjoint(&self, l: &LinearMap, tol: f64) -> bool {
        if check_square(l, self.dim()).is_err() {
            return false;
        }
        let hl = &self.gram * l;
        (&hl - hl.transpose()).norm() <= tol * hl.norm()
    }

    fn is_isotropic(&self, x: &DVector<f64>, value: f64, tol: f64) -> bool {
        value.abs() <= tol * self.gram.norm() * x.norm_squared()
    }

    /// `δ(x, y) = ⟨x,y⟩ / √|⟨x,x⟩⟨y,y⟩|`, with the isotropy threshold of
    /// the default policy.
    pub fn delta(&self, x: &ProjectivePoint, y: &ProjectivePoint) -> Result<f64> {
        self.delta_with(x, y, NumericPolicy::default().isotropic)
    }

    /// `δ(x, y)` with an explicit relative isotropy threshold.
    pub fn delta_with(&self, x: &ProjectivePoint, y: &ProjectivePoint, tol: f64) -> Result<f64> {
        let (x, y) = (x.coords(), y.coords());
        let xx = self.norm_sq(x)?;
        let yy = self.norm_sq(y)?;
        if self.is_isotropic(x, xx, tol) || self.is_isotropic(y, yy, tol) {
            return Err(Error::IsotropicPoint);
        }
        Ok(self.inner(x, y)? / (xx * yy).abs().sqrt())
    }
}

/// `δ(x, y)` for the given inner product.
pub fn delta_metric(ip: &InnerProduct, x: &ProjectivePoint, y: &ProjectivePoint) -> Result<f64> {
    ip.delta(x, y)
}

/// A point of projective space, stored with a representative whose largest
/// absolute coordinate is 1. The normalizing factor is positive, so the sign
/// of the supplied representative is kept.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectivePoint {
    coords: DVector<f64>,
}

impl ProjectivePoint {
    pub fn new(coords: DVector<f64>) -> Result<Self> {
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::DegenerateInput("non-finite coordinate".into()));
        }
        let scale = coords.amax();
        if scale <= f64::MIN_POSITIVE {
            return Err(Error::ZeroVector);
        }
        Ok(Self {
            coords: coords / scale,
        })
    }

    pub fn from_slice(coords: &[f64]) -> Result<Self> {
        Self::new(DVector::from_column_slice(coords))
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Representative with `coords[axis] = 1`, or `None` when that
    /// coordinate vanishes relative to `tol`.
    pub fn affine(&self, axis: usize, tol: f64) -> Option<DVector<f64>> {
        let w = *self.coords.get(axis)?;
        if w.abs() <= tol {
            None
        } else {
            Some(&self.coords / w)
        }
    }

    /// Equality up to a nonzero real scale.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        if self.dim() != other.dim() {
            return false;
        }
        let a = self.coords.normalize();
        let b = other.coords.normalize();
        (&a - &b).norm().min((&a + &b).norm()) <= tol
    }
}

/// An idempotent operator with an explicit decomposition `V = Im p ⊕ Ker p`.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    map: DMatrix<f64>,
    image: DMatrix<f64>,
    kernel: DMatrix<f64>,
    adapted_inv: DMatrix<f64>,
}

impl Projection {
    /// Builds the projection onto `span(image)` along `span(kernel)`.
    /// Basis vectors are the columns of the two matrices.
    pub fn from_basis_matrices(
        image: DMatrix<f64>,
        kernel: DMatrix<f64>,
        policy: &NumericPolicy,
    ) -> Result<Self> {
        let n = image.nrows().max(kernel.nrows());
        if image.ncols() + kernel.ncols() != n || (image.ncols() > 0 && image.nrows() != n)
            || (kernel.ncols() > 0 && kernel.nrows() != n)
        {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: image.ncols() + kernel.ncols(),
            });
        }
        if n == 0 {
            return Err(Error::DegenerateBasis(f64::INFINITY));
        }
        let m = image.ncols();
        let image = if m == 0 { DMatrix::zeros(n, 0) } else { image };
        let kernel = if kernel.ncols() == 0 { DMatrix::zeros(n, 0) } else { kernel };
        let mut adapted = DMatrix::zeros(n, n);
        adapted.view_mut((0, 0), (n, m)).copy_from(&image);
        adapted.view_mut((0, m), (n, n - m)).copy_from(&kernel);
        let cond = condition_number(&adapted);
        if !(cond <= policy.condition) {
            return Err(Error::DegenerateBasis(cond));
        }
        let adapted_inv = adapted.clone().try_inverse().ok_or(Error::DegenerateBasis(cond))?;
        let mut selector = DMatrix::zeros(n, n);
        for i in 0..m {
            selector[(i, i)] = 1.0;
        }
        let map = &adapted * selector * &adapted_inv;
        Ok(Self {
            map,
            image,
            kernel,
            adapted_inv,
        })
    }

    /// Builds the projection from lists of basis vectors.
    pub fn from_bases(
        image: &[DVector<f64>],
        kernel: &[DVector<f64>],
        policy: &NumericPolicy,
    ) -> Result<Self> {
        let n = image.first().or(kernel.first()).map_or(0, |v| v.len());
        let stack = |vs: &[DVector<f64>]| -> Result<DMatrix<f64>> {
            for v in vs {
                check_len(v, n)?;
            }
            Ok(if vs.is_empty() {
                DMatrix::zeros(n, 0)
            } else {
                DMatrix::from_columns(vs)
            })
        };
        Self::from_basis_matrices(stack(image)?, stack(kernel)?, policy)
    }

    /// Recovers the decomposition of an explicitly given idempotent matrix.
    pub fn from_matrix(p: DMatrix<f64>, policy: &NumericPolicy) -> Result<Self> {
        let n = p.nrows();
        check_square(&p, n)?;
        let scale = p.norm();
        if scale > 0.0 {
            let residual = (&p * &p - &p).norm() / scale;
            if residual > policy.idempotence {
                return Err(Error::NotIdempotent(residual));
            }
        }
        let (s, v) = svd_sorted(&p);
        let rank = s.iter().filter(|&&x| x > policy.rank * s[0].max(f64::MIN_POSITIVE)).count();
        let (_, u) = svd_sorted(&p.transpose());
        let image = u.columns(0, rank).into_owned();
        let kernel = v.columns(rank, n - rank).into_owned();
        Self::from_basis_matrices(image, kernel, policy)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_basis_matrices(DMatrix::identity(n, n), DMatrix::zeros(n, 0), &NumericPolicy::default())
            .expect("standard basis")
    }

    /// Coordinate projection keeping the listed axes, e.g. `diag(1,1,0)`.
    pub fn coordinate(n: usize, axes: &[usize]) -> Result<Self> {
        let unit = |i: usize| DVector::from_fn(n, |r, _| if r == i { 1.0 } else { 0.0 });
        if axes.iter().any(|&a| a >= n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: axes.iter().copied().max().unwrap_or(0) + 1,
            });
        }
        let image: Vec<_> = axes.iter().map(|&a| unit(a)).collect();
        let kernel: Vec<_> = (0..n).filter(|i| !axes.contains(i)).map(unit).collect();
        Self::from_bases(&image, &kernel, &NumericPolicy::default())
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.map
    }

    /// Columns span `Im p`.
    pub fn image_basis(&self) -> &DMatrix<f64> {
        &self.image
    }

    /// Columns span `Ker p`.
    pub fn kernel_basis(&self) -> &DMatrix<f64> {
        &self.kernel
    }

    pub fn rank(&self) -> usize {
        self.image.ncols()
    }

    pub fn dim(&self) -> usize {
        self.map.nrows()
    }

    /// `id − p`.
    pub fn complement(&self) -> DMatrix<f64> {
        DMatrix::identity(self.dim(), self.dim()) - &self.map
    }

    /// The basis `[image | kernel]` as columns.
    pub fn adapted_basis(&self) -> DMatrix<f64> {
        let n = self.dim();
        let m = self.rank();
        let mut b = DMatrix::zeros(n, n);
        b.view_mut((0, 0), (n, m)).copy_from(&self.image);
        b.view_mut((0, m), (n, n - m)).copy_from(&self.kernel);
        b
    }

    pub fn adapted_inverse(&self) -> &DMatrix<f64> {
        &self.adapted_inv
    }

    /// Extends an operator given on `Im p` (in image-basis coordinates) by
    /// the identity on `Ker p`.
    pub fn lift(&self, on_image: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        let n = self.dim();
        let m = self.rank();
        check_square(on_image, m)?;
        let mut block = DMatrix::identity(n, n);
        block.view_mut((0, 0), (m, m)).copy_from(on_image);
        Ok(self.adapted_basis() * block * &self.adapted_inv)
    }
}

/// Projection from explicit bases, with the default policy.
pub fn make_projection(image: &[DVector<f64>], kernel: &[DVector<f64>]) -> Result<Projection> {
    Projection::from_bases(image, kernel, &NumericPolicy::default())
}

/// Coordinate matrix of `L` on the span of the columns of `basis`.
pub fn restrict(l: &LinearMap, basis: &DMatrix<f64>, tol: f64) -> Result<DMatrix<f64>> {
    check_square(l, basis.nrows())?;
    let k = basis.ncols();
    if k == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    let image = l * basis;
    let coords = least_squares(basis, &image);
    let scale = (l.norm() * basis.norm()).max(f64::MIN_POSITIVE);
    let residual = (&image - basis * &coords).norm() / scale;
    if residual > tol {
        return Err(Error::NotInvariant(residual));
    }
    Ok(coords)
}

/// Principal square root of `M` restricted to the span of `basis`, in
/// basis coordinates.
pub fn sqrt_on_subspace(
    m: &LinearMap,
    basis: &DMatrix<f64>,
    policy: &NumericPolicy,
) -> Result<DMatrix<f64>> {
    let restricted = restrict(m, basis, policy.invariance)?;
    principal_sqrt(&restricted, policy)
}

/// Principal square root of a matrix with real, positive, semisimple
/// spectrum.
///
/// The spectrum and the eigenvector structure are checked first; the root
/// itself comes from the Denman–Beavers iteration, which produces a primary
/// matrix function and hence commutes with the input.
pub fn principal_sqrt(a: &DMatrix<f64>, policy: &NumericPolicy) -> Result<DMatrix<f64>> {
    let k = a.nrows();
    check_square(a, k)?;
    if k == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    let scale = a.norm();
    if scale == 0.0 {
        return Err(Error::SqrtDomain("zero matrix".into()));
    }
    let values = real_spectrum(a, policy.eigen_cluster)?;
    if values[0] <= policy.rank * scale {
        return Err(Error::SqrtDomain(format!(
            "nonpositive eigenvalue {:.6e}",
            values[0]
        )));
    }
    check_semisimple(a, &values, scale, policy)?;

    let identity = DMatrix::<f64>::identity(k, k);
    let mut y = a.clone();
    let mut z = identity.clone();
    for _ in 0..100 {
        let y_inv = y.clone().try_inverse().ok_or_else(|| Error::SqrtDomain("iteration broke down".into()))?;
        let z_inv = z.clone().try_inverse().ok_or_else(|| Error::SqrtDomain("iteration broke down".into()))?;
        let next = (&y + z_inv) * 0.5;
        z = (&z + y_inv) * 0.5;
        let step = (&next - &y).norm();
        y = next;
        if step <= 1e-15 * y.norm() {
            break;
        }
    }
    let residual = (&y * &y - a).norm() / scale;
    if residual > policy.sqrt_residual {
        return Err(Error::SqrtDomain(format!(
            "square root residual {residual:.3e} exceeds tolerance"
        )));
    }
    Ok(y)
}

fn check_semisimple(
    a: &DMatrix<f64>,
    sorted: &[f64],
    scale: f64,
    policy: &NumericPolicy,
) -> Result<()> {
    let k = a.nrows();
    let mut vectors = DMatrix::zeros(k, k);
    let mut col = 0;
    for run in cluster(sorted, policy.eigen_cluster * scale) {
        let size = run.len();
        let mean = run.iter().sum::<f64>() / size as f64;
        let spread = run[size - 1] - run[0];
        let shifted = a - DMatrix::identity(k, k) * mean;
        let (s, v) = svd_sorted(&shifted);
        let null_tol = 10.0 * (policy.eigen_cluster * scale + spread);
        if s[k - size] > null_tol {
            return Err(Error::SqrtDomain(format!(
                "defective eigenvalue {mean:.6e} of multiplicity {size}"
            )));
        }
        vectors
            .view_mut((0, col), (k, size))
            .copy_from(&v.columns(k - size, size));
        col += size;
    }
    let cond = condition_number(&vectors);
    if !(cond <= policy.condition.sqrt()) {
        return Err(Error::SqrtDomain(format!(
            "eigenvectors nearly dependent (condition {cond:.3e})"
        )));
    }
    Ok(())
}

/// Moore–Penrose pseudo-inverse of a symmetric matrix: the inverse on the
/// column space, zero on its coordinate-orthogonal complement.
///
/// Eigenvalues below `rank_tol` times the largest one count as zero. The
/// input is symmetrized first.
pub fn pseudo_inverse(t: &DMatrix<f64>, rank_tol: f64) -> DMatrix<f64> {
    let n = t.nrows();
    let eig = symmetrize(t).symmetric_eigen();
    let largest = eig.eigenvalues.amax();
    let mut result = DMatrix::zeros(n, n);
    if largest == 0.0 {
        return result;
    }
    for (i, &v) in eig.eigenvalues.iter().enumerate() {
        if v.abs() > rank_tol * largest {
            let q = eig.eigenvectors.column(i);
            result += q * q.transpose() / v;
        }
    }
    symmetrize(&result)
}

/// Inverse with the rank threshold of `policy`.
pub fn inverse(m: &DMatrix<f64>, policy: &NumericPolicy) -> Option<DMatrix<f64>> {
    checked_inverse(m, policy)
}
