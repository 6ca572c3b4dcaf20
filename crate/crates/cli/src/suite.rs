//! The verification suite run by `ivory verify`.

use ivory_core::ivory::conjugation_identity_residual;
use ivory_core::{
    intersect_conics, linspace, Chart, Execution, GalleryScene, IvoryFamily, NumericPolicy,
    ProjectionPencil, ProjectivePoint, Quadric, SceneKind,
};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{ConfigError, SceneConfig};
use crate::report::{Record, Report, Reproducibility};

/// Point pairs drawn for the Ivory checks.
const PAIRS: usize = 100;
/// Directions `u ∈ Im p` drawn for the path-derivative checks.
const DIRECTIONS: usize = 5;
/// Affine radius beyond which sampled points are discarded.
const AFFINE_RADIUS: f64 = 10.0;
/// Relative size of `⟨x, x⟩` below which a point counts as near-isotropic.
const ISOTROPY_MARGIN: f64 = 1e-3;
/// Candidate Ψ members scanned for real common points with the base.
const PSI_CANDIDATES: usize = 96;

pub fn run_suite(config: &SceneConfig) -> Result<Report, ConfigError> {
    run_suite_with(config, Execution::default())
}

pub fn run_suite_with(config: &SceneConfig, exec: Execution) -> Result<Report, ConfigError> {
    let policy = config.policy()?;
    let scene = config.build_scene()?;
    let target = config.target(&scene, &policy);
    let grid = config.grid(target);
    let mut suite = Suite {
        scene: &scene,
        policy,
        exec,
        rng: ChaCha8Rng::seed_from_u64(config.seed),
        records: Vec::new(),
    };
    suite.p_quadric();
    if let Some(pencil) = suite.pencil() {
        suite.singular_parameters(&pencil);
        suite.type_components(&pencil);
        suite.orthogonality(&pencil);
        if scene.kind == SceneKind::Euclidean {
            suite.identity_absent(&pencil);
        }
    }
    if let Some(family) = suite.family(target) {
        let inside: Vec<f64> = grid.iter().copied().filter(|&l| family.admissible(l)).collect();
        for &lambda in grid.iter().filter(|&&l| !family.admissible(l)) {
            let d = family.domain();
            suite.records.push(Record::failure(
                "lambda_domain",
                "admissible parameters of the square root",
                format!("OutOfDomain: λ = {lambda} outside ({}, {})", d.lo, d.hi),
            ));
        }
        suite.conjugation(&family);
        suite.sandwich(&family, &inside);
        suite.ivory_delta(&family, &inside);
        suite.ivory_affine(&family, &inside);
        suite.path_derivative(&family, &inside, target);
        suite.psi_invariance(&family, &inside);
    }
    let reproducibility = Reproducibility {
        seed: config.seed,
        tolerances: suite
            .policy
            .entries()
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect(),
        version: env!("CARGO_PKG_VERSION").to_string(),
    };
    Ok(Report::new(
        config.scene_name().to_string(),
        suite.records,
        reproducibility,
    ))
}

struct Suite<'a> {
    scene: &'a GalleryScene,
    policy: NumericPolicy,
    exec: Execution,
    rng: ChaCha8Rng,
    records: Vec<Record>,
}

fn fmt_list(xs: &[f64]) -> String {
    let items: Vec<String> = xs.iter().map(|x| format!("{x}")).collect();
    format!("[{}]", items.join(", "))
}

impl Suite<'_> {
    fn push(&mut self, record: Record) {
        self.records.push(record);
    }

    fn non_isotropic(&self, v: &DVector<f64>) -> bool {
        let ip = &self.scene.ip;
        ip.norm_sq(v).is_ok_and(|n| n.abs() > ISOTROPY_MARGIN * ip.gram().norm() * v.norm_squared())
    }

    fn p_quadric(&mut self) {
        let g = self.scene.g0.operator();
        let p = self.scene.p.matrix();
        let comp = self.scene.p.complement();
        let invariance = (p * g * p - g * p).norm();
        let kernel = (g * &comp + &comp).norm();
        let residual = invariance.max(kernel) / g.norm();
        self.push(Record::at_most(
            "p_quadric",
            "p-quadric definition",
            residual,
            self.policy.invariance,
        ));
    }

    fn pencil(&mut self) -> Option<ProjectionPencil> {
        match self.scene.pencil(&self.policy) {
            Ok(pen) => {
                self.push(
                    Record::at_most("pencil", "projection pencil", 0.0, 0.0)
                        .with_detail(format!("dimension {}, rank p = {}", pen.inner_product().dim(), pen.projection().rank())),
                );
                Some(pen)
            }
            Err(e) => {
                self.push(Record::failure("pencil", "projection pencil", e.to_string()));
                None
            }
        }
    }

    fn singular_parameters(&mut self, pen: &ProjectionPencil) {
        let anchor = "singular members of the pencil";
        let g0_inv = match self.scene.g0.inverse_operator(&self.policy) {
            Ok(m) => m,
            Err(e) => return self.push(Record::failure("singular_parameters", anchor, e.to_string())),
        };
        let p = self.scene.p.matrix();
        let residual = pen
            .singular_parameters()
            .iter()
            .map(|&s| {
                let scale = g0_inv.norm().max(p.norm() * s.abs());
                (&g0_inv - p * s).determinant().abs() / scale.powi(g0_inv.nrows() as i32)
            })
            .fold(0.0, f64::max);
        let comps: Vec<String> = pen
            .type_components()
            .iter()
            .map(|iv| format!("({}, {})", iv.lo, iv.hi))
            .collect();
        self.push(Record::at_most("singular_parameters", anchor, residual, 1e-8).with_detail(format!(
            "singular parameters {}; type components {}",
            fmt_list(pen.singular_parameters()),
            comps.join(" ")
        )));
    }

    fn type_components(&mut self, pen: &ProjectionPencil) {
        let mut changes = 0usize;
        let mut failure = None;
        for iv in pen.type_components() {
            let (lo, hi) = window(iv.lo, iv.hi);
            let pad = (hi - lo) / 202.0;
            let mut first = None;
            for t in linspace(lo + pad, hi - pad, 100) {
                match pen.member_inertia(t) {
                    Ok(i) if first.is_none() => first = Some(i),
                    Ok(i) => changes += usize::from(Some(i) != first),
                    Err(e) => failure = Some(format!("t = {t}: {e}")),
                }
            }
        }
        let record = match failure {
            Some(msg) => Record::failure("type_components", "constant type on components", msg),
            None => Record::at_most("type_components", "constant type on components", changes as f64, 0.0)
                .with_detail("inertia changes inside components on 100-point grids"),
        };
        self.push(record);
    }

    fn orthogonality(&mut self, pen: &ProjectionPencil) {
        let (check, anchor) = ("orthogonality", "orthogonal intersection of members");
        if pen.inner_product().dim() != 3 {
            return self.push(Record::skipped(check, anchor, "conic intersection needs dimension 3"));
        }
        let mut ts = vec![0.0];
        for iv in pen.type_components() {
            let (lo, hi) = window(iv.lo, iv.hi);
            ts.extend([lo + (hi - lo) / 3.0, lo + 2.0 * (hi - lo) / 3.0]);
        }
        ts.sort_by(f64::total_cmp);
        ts.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        let mut worst = 0.0f64;
        let mut points = 0;
        for (i, &t1) in ts.iter().enumerate() {
            for &t2 in &ts[i + 1..] {
                let run = || -> ivory_core::Result<Vec<f64>> {
                    let q1 = pen.member(t1)?.quadric;
                    let q2 = pen.member(t2)?.quadric;
                    let based = pen.rebased(t1)?;
                    intersect_conics(&q1, &q2, &self.policy)?
                        .iter()
                        .map(|c| based.orthogonality_check(t2 - t1, &c.point, self.policy.membership))
                        .collect()
                };
                match run() {
                    Ok(rs) => {
                        points += rs.len();
                        worst = rs.into_iter().fold(worst, f64::max);
                    }
                    Err(e) => {
                        return self.push(Record::failure(check, anchor, format!("members {t1}, {t2}: {e}")))
                    }
                }
            }
        }
        if points == 0 {
            return self.push(Record::skipped(check, anchor, "no real intersections between sampled members"));
        }
        self.push(
            Record::at_most(check, anchor, worst, self.policy.identity)
                .with_detail(format!("{points} intersection points of {} members", ts.len())),
        );
    }

    fn identity_absent(&mut self, pen: &ProjectionPencil) {
        let (check, anchor) = ("identity_quadric", "non-confocality of the id-pencil");
        let ip = pen.inner_product();
        let n = ip.dim();
        let fit = Quadric::new(ip, DMatrix::identity(n, n), &self.policy).and_then(|q| pen.fit(&q));
        match fit {
            Ok((_, residual)) => {
                let verdict = if residual >= 1e-3 { "absent" } else { "present" };
                self.push(Record::at_least(check, anchor, residual, 1e-3).with_detail(verdict));
            }
            Err(e) => self.push(Record::failure(check, anchor, e.to_string())),
        }
    }

    fn family(&mut self, target: f64) -> Option<IvoryFamily> {
        let anchor = "connecting family l_λ";
        match self.scene.family(target, &self.policy) {
            Ok(fam) => {
                let d = fam.domain();
                self.push(Record::at_most("family", anchor, 0.0, 0.0).with_detail(format!(
                    "target {target}, domain ({}, {}), margin {}",
                    d.lo,
                    d.hi,
                    fam.margin()
                )));
                Some(fam)
            }
            Err(e) => {
                self.push(Record::failure("family", anchor, e.to_string()));
                None
            }
        }
    }

    fn conjugation(&mut self, fam: &IvoryFamily) {
        let (check, anchor) = ("conjugation_identity", "conjugation identity for p − l′²");
        match conjugation_identity_residual(&self.scene.ip, &self.scene.p, fam.l(), &self.policy) {
            Ok(r) => self.push(Record::at_most(check, anchor, r, self.policy.identity)),
            Err(e) => self.push(Record::failure(check, anchor, e.to_string())),
        }
    }

    fn sandwich(&mut self, fam: &IvoryFamily, grid: &[f64]) {
        let (check, anchor) = ("sandwich_identity", "g_λ⁻¹ = l′ g₀⁻¹ l′ = g₀⁻¹ − λp");
        let worst = self.exec.try_max_of(grid, |&lambda| {
            fam.sandwich_residuals(lambda).map(|(a, b)| a.max(b))
        });
        match worst {
            Ok(w) => self.push(
                Record::at_most(check, anchor, w.unwrap_or(0.0), self.policy.identity)
                    .with_detail(format!("{} grid points", grid.len())),
            ),
            Err(e) => self.push(Record::failure(check, anchor, e.to_string())),
        }
    }

    /// Real points of the base quadric inside `Im p`, found on random lines.
    fn base_points_in_image(&mut self, count: usize) -> Vec<DVector<f64>> {
        let b = self.scene.p.image_basis();
        let m = b.ncols();
        let form = b.transpose() * self.scene.g0.coordinate_matrix() * b;
        let form = (&form + form.transpose()) * 0.5;
        let q = |x: &DVector<f64>, y: &DVector<f64>| (x.transpose() * &form * y)[(0, 0)];
        let mut out = Vec::new();
        for _ in 0..40 * count {
            if out.len() == count {
                break;
            }
            let x = DVector::from_fn(m, |_, _| self.rng.random_range(-1.0..1.0));
            let y = DVector::from_fn(m, |_, _| self.rng.random_range(-1.0..1.0));
            let (alpha, beta, gamma) = (q(&x, &x), 2.0 * q(&x, &y), q(&y, &y));
            let disc = beta * beta - 4.0 * alpha * gamma;
            if !(disc > 1e-9 * (beta * beta + (4.0 * alpha * gamma).abs())) || gamma.abs() < 1e-9 {
                continue;
            }
            let sign = if self.rng.random_bool(0.5) { 1.0 } else { -1.0 };
            let s = (-beta + sign * disc.sqrt()) / (2.0 * gamma);
            out.push(b * (x + y * s));
        }
        out
    }

    fn random_pairs(&mut self, n: usize) -> Vec<(usize, usize)> {
        (0..PAIRS)
            .map(|_| (self.rng.random_range(0..n), self.rng.random_range(0..n)))
            .collect()
    }

    fn ivory_delta(&mut self, fam: &IvoryFamily, grid: &[f64]) {
        let (check, anchor) = ("ivory_delta", "Ivory property δ(x, l′y) = δ(l′x, y)");
        let maps: Vec<DMatrix<f64>> = match grid.iter().map(|&l| fam.l_prime(l)).collect() {
            Ok(m) => m,
            Err(e) => return self.push(Record::failure(check, anchor, format!("{e}"))),
        };
        let pool: Vec<DVector<f64>> = self
            .base_points_in_image(4 * PAIRS)
            .into_iter()
            .filter(|x| self.non_isotropic(x) && maps.iter().all(|lp| self.non_isotropic(&(lp * x))))
            .collect();
        if pool.is_empty() {
            return self.push(Record::skipped(
                check,
                anchor,
                "the base has no real non-isotropic points in Im p",
            ));
        }
        let pairs: Vec<(ProjectivePoint, ProjectivePoint)> = self
            .random_pairs(pool.len())
            .into_iter()
            .map(|(i, j)| (point(&pool[i]), point(&pool[j])))
            .collect();
        match fam.ivory_delta_sweep(grid, &pairs, self.exec) {
            Ok(w) => self.push(
                Record::at_most(check, anchor, w, self.policy.identity)
                    .with_detail(format!("{} pairs on base ∩ Im p, {} grid points", pairs.len(), grid.len())),
            ),
            Err(e) => self.push(Record::failure(check, anchor, e.to_string())),
        }
    }

    fn ivory_affine(&mut self, fam: &IvoryFamily, grid: &[f64]) {
        let (check, anchor) = ("ivory_affine", "diagonals of curvilinear quadrangles");
        let p = self.scene.p.matrix();
        let n = p.nrows();
        if self.scene.p.rank() == n {
            return self.push(Record::skipped(check, anchor, "p = id has no affine chart"));
        }
        if n != 3 {
            return self.push(Record::skipped(check, anchor, "point sampling needs dimension 3"));
        }
        let Some(axis) = (0..n).find(|&k| p.column(k).norm() <= 1e-12 && p.row(k).norm() <= 1e-12) else {
            return self.push(Record::skipped(check, anchor, "no coordinate chart adapted to p"));
        };
        let chart = Chart::Affine(axis);
        let pool: Vec<ProjectivePoint> = match self.scene.g0.sample_points_with(400, chart, self.exec) {
            Ok(pts) => pts
                .into_iter()
                .filter(|x| x.affine(axis, 1e-12).is_some_and(|a| a.norm() <= AFFINE_RADIUS))
                .collect(),
            Err(e) => return self.push(Record::failure(check, anchor, e.to_string())),
        };
        if pool.is_empty() {
            return self.push(Record::skipped(check, anchor, "the base has no real affine points"));
        }
        let pairs = self.random_pairs(pool.len());
        let mut worst = 0.0f64;
        for &lambda in grid {
            let r = self.exec.try_max_of(&pairs, |&(i, j)| {
                fam.verify_ivory_affine(lambda, &pool[i], &pool[j], chart)
            });
            match r {
                Ok(w) => worst = worst.max(w.unwrap_or(0.0)),
                Err(e) => return self.push(Record::failure(check, anchor, format!("λ = {lambda}: {e}"))),
            }
        }
        self.push(
            Record::at_most(check, anchor, worst, self.policy.identity)
                .with_detail(format!("{} affine pairs, {} grid points", pairs.len(), grid.len())),
        );
    }

    fn path_derivative(&mut self, fam: &IvoryFamily, grid: &[f64], target: f64) {
        let anchor = "d/dλ l_λ u = −½ g_λ l_λ u";
        let p = self.scene.p.matrix();
        let n = p.nrows();
        let dirs: Vec<DVector<f64>> = (0..DIRECTIONS)
            .map(|_| p * DVector::from_fn(n, |_, _| self.rng.random_range(-1.0..1.0)))
            .collect();
        let h = self.policy.fd_step;
        let usable: Vec<f64> = grid
            .iter()
            .copied()
            .filter(|&l| fam.admissible(l - h) && fam.admissible(l + h))
            .collect();
        let mut worst = 0.0f64;
        for &lambda in &usable {
            for u in &dirs {
                match fam.path_derivative_check(lambda, u, h) {
                    Ok(r) => worst = worst.max(r),
                    Err(e) => {
                        return self.push(Record::failure("path_derivative", anchor, format!("λ = {lambda}: {e}")))
                    }
                }
            }
        }
        self.push(
            Record::at_most("path_derivative", anchor, worst, self.policy.derivative)
                .with_detail(format!("h = {h}, {} λ values, {} directions", usable.len(), dirs.len())),
        );

        let mid = 0.5 * target;
        let (coarse, fine) = (0.02, 0.01);
        if !(fam.admissible(mid - coarse) && fam.admissible(mid + coarse)) {
            return self.push(Record::skipped(
                "path_derivative_order",
                anchor,
                "the domain is too narrow around target/2",
            ));
        }
        let mut ratios = Vec::new();
        for u in &dirs {
            let r = fam
                .path_derivative_check(mid, u, coarse)
                .and_then(|a| fam.path_derivative_check(mid, u, fine).map(|b| a / b));
            match r {
                Ok(r) => ratios.push(r),
                Err(e) => return self.push(Record::failure("path_derivative_order", anchor, e.to_string())),
            }
        }
        let worst = ratios.iter().map(|r| (r - 4.0).abs()).fold(0.0, f64::max);
        self.push(
            Record::at_most("path_derivative_order", anchor, worst, 0.5)
                .with_detail(format!("error ratios for h = {coarse} → {fine}: {}", fmt_list(&ratios))),
        );
    }

    fn psi_invariance(&mut self, fam: &IvoryFamily, grid: &[f64]) {
        let (check, anchor) = ("psi_invariance", "l′_λ maps base ∩ Ψ into Ψ");
        if self.scene.ip.dim() != 3 {
            return self.push(Record::skipped(check, anchor, "conic intersection needs dimension 3"));
        }
        let pen = fam.pencil();
        let sing = pen.singular_parameters();
        let span: Vec<f64> = sing.iter().copied().chain([0.0, fam.target()]).collect();
        let lo = span.iter().copied().fold(f64::INFINITY, f64::min) - 2.0;
        let hi = span.iter().copied().fold(f64::NEG_INFINITY, f64::max) + 2.0;
        let found: Vec<(f64, Vec<DVector<f64>>)> = linspace(lo, hi, PSI_CANDIDATES)
            .into_iter()
            .filter(|&mu| mu.abs() > 1e-3 && sing.iter().all(|s| (s - mu).abs() > 1e-3 * (1.0 + s.abs())))
            .filter_map(|mu| {
                let psi = pen.member(mu).ok()?.quadric;
                let pts = intersect_conics(&self.scene.g0, &psi, &self.policy).ok()?;
                (!pts.is_empty()).then(|| (mu, pts.into_iter().map(|c| c.point.coords().clone()).collect()))
            })
            .collect();
        if found.is_empty() {
            return self.push(Record::skipped(check, anchor, "no member meets the base in real points"));
        }
        let picks = [0, found.len() / 2, found.len() - 1];
        let mut seen = Vec::new();
        for &k in &picks {
            if seen.contains(&k) {
                continue;
            }
            seen.push(k);
            let (mu, pts) = &found[k];
            let mut worst = 0.0f64;
            for u in pts {
                match fam.psi_invariance_check_with(*mu, grid, u, self.exec) {
                    Ok(r) => worst = worst.max(r),
                    Err(e) => return self.push(Record::failure(check, anchor, format!("μ = {mu}: {e}"))),
                }
            }
            self.push(
                Record::at_most(check, anchor, worst, self.policy.identity)
                    .with_detail(format!("μ = {mu}, {} common points, {} grid points", pts.len(), grid.len())),
            );
        }
    }
}

/// A finite window of a parameter interval: infinite ends are cut 10 units
/// beyond the finite one.
fn window(lo: f64, hi: f64) -> (f64, f64) {
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => (lo, hi),
        (true, false) => (lo, lo + 10.0),
        (false, true) => (hi - 10.0, hi),
        (false, false) => (-10.0, 10.0),
    }
}

fn point(v: &DVector<f64>) -> ProjectivePoint {
    ProjectivePoint::new(v.clone()).expect("sampled points are nonzero")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(text: &str) -> Report {
        run_suite(&SceneConfig::parse(text).unwrap()).unwrap()
    }

    #[test]
    fn minkowski_default_passes() {
        let report = run(r#"{"scene": "minkowski"}"#);
        assert!(report.pass, "{}", report.to_json());
    }

    #[test]
    fn euclidean_reports_identity_absent() {
        let report = run(r#"{"scene": "euclidean", "parameters": {"target": -2}}"#);
        assert!(report.pass, "{}", report.to_json());
        let rec = report.records.iter().find(|r| r.check == "identity_quadric").unwrap();
        assert_eq!(rec.detail, "absent");
    }

    #[test]
    fn grid_outside_domain_fails() {
        let report = run(r#"{"scene": "minkowski", "lambda_grid": [0, 0.5, 2.5]}"#);
        assert!(!report.pass);
        assert!(report
            .records
            .iter()
            .any(|r| r.check == "lambda_domain" && r.detail.starts_with("OutOfDomain")));
    }

    #[test]
    fn reports_are_deterministic() {
        let text = r#"{"scene": "hyperbolic", "seed": 7}"#;
        let a = run(text).to_json();
        let cfg = SceneConfig::parse(text).unwrap();
        let b = run_suite_with(&cfg, Execution::Sequential).unwrap().to_json();
        assert_eq!(a, b);
    }
}
