#![allow(dead_code)]

use ivory_core::gallery::{curved_scene, euclidean_scene, minkowski_scene};
use ivory_core::{
    GalleryScene, InnerProduct, NumericPolicy, Projection, ProjectivePoint, Quadric, SceneKind,
};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn diag(xs: &[f64]) -> DMatrix<f64> {
    DMatrix::from_diagonal(&DVector::from_column_slice(xs))
}

pub fn random_vector(dim: usize, rng: &mut impl Rng) -> DVector<f64> {
    DVector::from_fn(dim, |_, _| rng.random_range(-1.0..1.0))
}

/// A basis `B` that is orthonormal for `H = B⁻ᵀ D B⁻¹` with `D = diag(±1)`.
pub struct Frame {
    pub ip: InnerProduct,
    pub basis: DMatrix<f64>,
    pub basis_inv: DMatrix<f64>,
    pub signs: Vec<f64>,
}

impl Frame {
    pub fn random(dim: usize, mixed: bool, rng: &mut impl Rng) -> Self {
        loop {
            let basis = DMatrix::from_fn(dim, dim, |r, c| {
                rng.random_range(-0.5..0.5) + if r == c { 1.0 } else { 0.0 }
            });
            let sv = basis.singular_values();
            if sv.max() / sv.min() > 20.0 {
                continue;
            }
            let mut signs: Vec<f64> = (0..dim)
                .map(|_| if mixed && rng.random_bool(0.5) { -1.0 } else { 1.0 })
                .collect();
            if mixed && signs.iter().all(|&s| s > 0.0) {
                signs[rng.random_range(0..dim)] = -1.0;
            }
            let basis_inv = basis.clone().try_inverse().unwrap();
            let gram = basis_inv.transpose() * diag(&signs) * &basis_inv;
            let gram = (&gram + gram.transpose()) * 0.5;
            let ip = InnerProduct::new(gram, &NumericPolicy::default()).unwrap();
            return Self {
                ip,
                basis,
                basis_inv,
                signs,
            };
        }
    }

    pub fn dim(&self) -> usize {
        self.signs.len()
    }

    /// The projection onto the first `m` frame vectors along the rest.
    pub fn projection(&self, m: usize) -> Projection {
        let n = self.dim();
        Projection::from_basis_matrices(
            self.basis.columns(0, m).into_owned(),
            self.basis.columns(m, n - m).into_owned(),
            &NumericPolicy::default(),
        )
        .unwrap()
    }

    /// `B · diag(on_image, fill, …, fill) · B⁻¹`.
    pub fn lift(&self, on_image: &[f64], fill: f64) -> DMatrix<f64> {
        let mut d = vec![fill; self.dim()];
        d[..on_image.len()].copy_from_slice(on_image);
        &self.basis * diag(&d) * &self.basis_inv
    }

    /// A regular p-quadric whose spectrum on `Im p` avoids `[0.9, ∞)` and
    /// a neighbourhood of zero, so that `[0, 1]` is admissible.
    pub fn p_quadric(&self, m: usize, rng: &mut impl Rng) -> Quadric {
        let mu: Vec<f64> = (0..m)
            .map(|_| {
                let v = rng.random_range(0.2..0.9);
                if rng.random_bool(0.5) {
                    v
                } else {
                    -2.0 * v
                }
            })
            .collect();
        Quadric::new(&self.ip, self.lift(&mu, -1.0), &NumericPolicy::default()).unwrap()
    }
}

/// Real zeros of the form `F` on random lines of the span of `basis`,
/// returned in ambient coordinates.
pub fn isotropic_points(
    form: &DMatrix<f64>,
    basis: &DMatrix<f64>,
    count: usize,
    rng: &mut impl Rng,
) -> Vec<DVector<f64>> {
    let m = form.nrows();
    let q = |a: &DVector<f64>, b: &DVector<f64>| (a.transpose() * form * b)[(0, 0)];
    let mut out = Vec::new();
    let mut attempts = 0;
    while out.len() < count && attempts < 200 * count {
        attempts += 1;
        let a = random_vector(m, rng);
        let b = random_vector(m, rng);
        let (alpha, beta, gamma) = (q(&a, &a), 2.0 * q(&a, &b), q(&b, &b));
        let disc = beta * beta - 4.0 * alpha * gamma;
        if disc <= 1e-6 * (beta * beta + (4.0 * alpha * gamma).abs()) || gamma.abs() < 1e-6 {
            continue;
        }
        let s = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let root = (-beta + s * disc.sqrt()) / (2.0 * gamma);
        let v = basis * (a + b * root);
        if v.norm() > 1e-6 {
            out.push(v);
        }
    }
    out
}

/// Points of the quadric inside `Im p`, scaled by random nonzero factors.
pub fn base_points_in_image(
    q: &Quadric,
    p: &Projection,
    count: usize,
    rng: &mut impl Rng,
) -> Vec<DVector<f64>> {
    let b = p.image_basis();
    let form = b.transpose() * q.coordinate_matrix() * b;
    let form = (&form + form.transpose()) * 0.5;
    isotropic_points(&form, b, count, rng)
        .into_iter()
        .map(|v| {
            let s = rng.random_range(0.5..2.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            v * s
        })
        .collect()
}

pub fn non_isotropic(ip: &InnerProduct, v: &DVector<f64>) -> bool {
    ip.norm_sq(v).unwrap().abs() > 1e-3 * ip.gram().norm() * v.norm_squared()
}

pub fn point(v: &DVector<f64>) -> ProjectivePoint {
    ProjectivePoint::new(v.clone()).unwrap()
}

/// A gallery scene with the family endpoint and the `Ψ = g_μ` choices used
/// throughout the tests.
pub struct Setup {
    pub name: &'static str,
    pub scene: GalleryScene,
    pub target: f64,
    pub psi: [f64; 3],
}

pub fn galleries() -> Vec<Setup> {
    let h = 0.5f64.sqrt();
    vec![
        Setup {
            name: "euclidean",
            scene: euclidean_scene(1.0, 1.0).unwrap(),
            target: -2.0,
            psi: [1.2, 1.5, 1.8],
        },
        Setup {
            name: "minkowski",
            scene: minkowski_scene(2.0, 1.0).unwrap(),
            target: 1.0,
            psi: [0.5, 1.0, 1.5],
        },
        Setup {
            name: "elliptic",
            scene: curved_scene(0.5, h, h, SceneKind::Elliptic)
                .unwrap()
                .rescaled(0.2)
                .unwrap(),
            target: 1.0,
            psi: [1.5, 2.5, 3.25],
        },
        Setup {
            name: "hyperbolic",
            scene: curved_scene(2f64.sqrt(), h, 1.5f64.sqrt(), SceneKind::Hyperbolic).unwrap(),
            target: 1.0,
            psi: [1.6, 1.75, 1.9],
        },
    ]
}

/// Galleries whose base quadric meets `Im p` in real non-isotropic points.
pub fn ivory_galleries() -> Vec<Setup> {
    let mut out = vec![
        Setup {
            name: "euclidean",
            scene: euclidean_scene(2.0, -1.0).unwrap(),
            target: 1.0,
            psi: [0.0; 3],
        },
        Setup {
            name: "minkowski",
            scene: minkowski_scene(3.0, -2.0).unwrap(),
            target: 1.0,
            psi: [0.0; 3],
        },
    ];
    out.extend(galleries().into_iter().skip(2));
    out
}
