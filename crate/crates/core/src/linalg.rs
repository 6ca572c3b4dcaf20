//! Small dense helpers shared by the geometric modules.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::policy::NumericPolicy;

pub(crate) fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Frobenius norm of `m - m^T` relative to the norm of `m`.
pub(crate) fn asymmetry(m: &DMatrix<f64>) -> f64 {
    let scale = m.norm();
    if scale == 0.0 {
        0.0
    } else {
        (m - m.transpose()).norm() / scale
    }
}

pub(crate) fn check_square(m: &DMatrix<f64>, n: usize) -> Result<()> {
    if m.nrows() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: m.nrows(),
        });
    }
    if m.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: m.ncols(),
        });
    }
    Ok(())
}

pub(crate) fn check_len(v: &DVector<f64>, n: usize) -> Result<()> {
    if v.len() == n {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected: n,
            found: v.len(),
        })
    }
}

/// Singular values in descending order together with the matching right
/// singular vectors as columns.
pub(crate) fn svd_sorted(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.ncols();
    if m.nrows() < n {
        // Pad so the decomposition yields a full set of right vectors.
        let mut padded = DMatrix::zeros(n, n);
        padded.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
        return svd_sorted(&padded);
    }
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let values = order.iter().map(|&i| svd.singular_values[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        vectors.set_column(col, &v_t.row(i).transpose());
    }
    (values, vectors)
}

pub(crate) fn condition_number(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 1.0;
    }
    let (s, _) = svd_sorted(m);
    let smallest = *s.last().expect("nonempty");
    if smallest == 0.0 {
        f64::INFINITY
    } else {
        s[0] / smallest
    }
}

/// Inverse of a square matrix, refusing numerically singular input.
pub(crate) fn checked_inverse(m: &DMatrix<f64>, policy: &NumericPolicy) -> Option<DMatrix<f64>> {
    if condition_number(m) * policy.rank > 1.0 {
        return None;
    }
    m.clone().try_inverse()
}

/// Least-squares solution of `a x = b`.
pub(crate) fn least_squares(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a.clone()
        .svd(true, true)
        .solve(b, 1e-14 * a.norm().max(f64::MIN_POSITIVE))
        .expect("both factors were requested")
}

/// Counts of positive, negative and (numerically) zero eigenvalues of a
/// symmetric matrix.
pub fn inertia(sym: &DMatrix<f64>, rel_tol: f64) -> (usize, usize, usize) {
    let eig = symmetrize(sym).symmetric_eigen();
    let scale = eig.eigenvalues.amax();
    let mut counts = (0, 0, 0);
    for &v in eig.eigenvalues.iter() {
        if v.abs() <= rel_tol * scale {
            counts.2 += 1;
        } else if v > 0.0 {
            counts.0 += 1;
        } else {
            counts.1 += 1;
        }
    }
    counts
}

/// Real eigenvalues of a square matrix, sorted ascending. Fails when an
/// eigenvalue has a significant imaginary part.
pub(crate) fn real_spectrum(m: &DMatrix<f64>, rel_tol: f64) -> Result<Vec<f64>> {
    if m.is_empty() {
        return Ok(Vec::new());
    }
    let scale = m.norm().max(f64::MIN_POSITIVE);
    let mut values = Vec::with_capacity(m.nrows());
    for z in m.complex_eigenvalues().iter() {
        if z.im.abs() > rel_tol * scale {
            return Err(Error::SqrtDomain(format!(
                "nonreal eigenvalue {:.6e}{:+.6e}i",
                z.re, z.im
            )));
        }
        values.push(z.re);
    }
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Groups sorted values into runs whose consecutive gaps are at most `gap`.
pub(crate) fn cluster(sorted: &[f64], gap: f64) -> Vec<Vec<f64>> {
    let mut clusters: Vec<Vec<f64>> = Vec::new();
    for &v in sorted {
        match clusters.last_mut() {
            Some(run) if v - run[run.len() - 1] <= gap => run.push(v),
            _ => clusters.push(vec![v]),
        }
    }
    clusters
}

pub(crate) fn cross(a: &DVector<f64>, b: &DVector<f64>) -> DVector<f64> {
    DVector::from_vec(vec![
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ])
}

/// `count` evenly spaced points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..count)
            .map(|i| a + (b - a) * i as f64 / (count - 1) as f64)
            .collect(),
    }
}
