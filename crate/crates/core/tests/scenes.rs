mod common;

use common::{base_points_in_image, diag, non_isotropic, point, rng, Frame};
use ivory_core::{
    linspace, Error, Execution, InnerProduct, IvoryFamily, NumericPolicy, Projection, Quadric,
};
use nalgebra::DMatrix;
use rand::Rng;

fn policy() -> NumericPolicy {
    NumericPolicy::default()
}

#[test]
fn random_scenes_satisfy_the_family_identities() {
    let mut rng = rng(21);
    for trial in 0..60 {
        let dim = 3 + trial % 4;
        let frame = Frame::random(dim, trial % 3 != 0, &mut rng);
        let m = rng.random_range(1..=dim);
        let p = frame.projection(m);
        let g0 = frame.p_quadric(m, &mut rng);
        let fam = IvoryFamily::build(&frame.ip, &p, &g0, &policy()).unwrap();
        assert!(fam.domain().contains(0.0) && fam.domain().contains(1.0));
        for lambda in linspace(0.0, 1.0, 9) {
            let (sandwich, pencil) = fam.sandwich_residuals(lambda).unwrap();
            assert!(sandwich <= 1e-9 && pencil <= 1e-9, "trial {trial}: {sandwich} {pencil}");
            assert!(fam.construction_residual(lambda).unwrap() <= 1e-9);
        }
    }
}

#[test]
fn random_scenes_have_the_ivory_property_on_the_image() {
    let mut rng = rng(22);
    let mut checked = 0;
    for trial in 0..40 {
        let dim = 3 + trial % 4;
        let frame = Frame::random(dim, true, &mut rng);
        let m = rng.random_range(2..=dim);
        let p = frame.projection(m);
        let g0 = frame.p_quadric(m, &mut rng);
        let fam = IvoryFamily::build(&frame.ip, &p, &g0, &policy()).unwrap();
        let pool = base_points_in_image(&g0, &p, 40, &mut rng);
        let lambdas = [0.3, 0.7, 1.0];
        let maps: Vec<DMatrix<f64>> = lambdas.iter().map(|&lam| fam.l_prime(lam).unwrap()).collect();
        let usable: Vec<_> = pool
            .iter()
            .filter(|x| {
                non_isotropic(&frame.ip, x) && maps.iter().all(|lp| non_isotropic(&frame.ip, &(lp * *x)))
            })
            .collect();
        let mut pairs = Vec::new();
        for x in &usable {
            for y in &usable {
                pairs.push((point(x), point(y)));
            }
        }
        pairs.truncate(50);
        if pairs.is_empty() {
            continue;
        }
        for exec in [Execution::Sequential, Execution::Parallel] {
            let worst = fam.ivory_delta_sweep(&lambdas, &pairs, exec).unwrap();
            assert!(worst <= 1e-9, "trial {trial}: {worst}");
        }
        checked += pairs.len();
    }
    assert!(checked > 500, "only {checked} pairs");
}

#[test]
fn family_maps_are_isometries_on_rulings() {
    // Frame signs (+, −, +, −) and g₀ = diag(0.5, −0.8, −0.6, 0.4) in the
    // frame give ⟨w, g₀ w⟩ coefficients (0.5, 0.8, −0.6, −0.4); the planes
    // pairing coordinates 1,3 and 2,4 each carry an isotropic vector, and
    // together they span a line of the quadric.
    let mut rng = rng(23);
    let mut frame = Frame::random(4, true, &mut rng);
    frame.signs = vec![1.0, -1.0, 1.0, -1.0];
    let gram = frame.basis_inv.transpose() * diag(&frame.signs) * &frame.basis_inv;
    frame.ip = InnerProduct::new((&gram + gram.transpose()) * 0.5, &policy()).unwrap();
    let g0 = Quadric::new(&frame.ip, frame.lift(&[0.5, -0.8, -0.6, 0.4], 0.0), &policy()).unwrap();
    let p = Projection::identity(4);
    let fam = IvoryFamily::build(&frame.ip, &p, &g0, &policy()).unwrap();
    let k = [0.5f64, 0.8, 0.6, 0.4];
    let u1 = &frame.basis * nalgebra::DVector::from_vec(vec![k[2].sqrt(), 0.0, k[0].sqrt(), 0.0]);
    let u2 = &frame.basis * nalgebra::DVector::from_vec(vec![0.0, k[3].sqrt(), 0.0, k[1].sqrt()]);
    let mut checked = 0;
    for _ in 0..200 {
        let (a, b, c, d): (f64, f64, f64, f64) = rng.random();
        let x = &u1 * (a - 0.5) + &u2 * (b - 0.5);
        let y = &u1 * (c - 0.5) + &u2 * (d - 0.5);
        if !(non_isotropic(&frame.ip, &x) && non_isotropic(&frame.ip, &y)) {
            continue;
        }
        for lambda in [0.25, 0.5, 1.0] {
            let lp = fam.l_prime(lambda).unwrap();
            if !(non_isotropic(&frame.ip, &(&lp * &x)) && non_isotropic(&frame.ip, &(&lp * &y))) {
                continue;
            }
            let r = fam.isometry_residual(lambda, &point(&x), &point(&y)).unwrap();
            assert!(r <= 1e-9, "{r}");
            checked += 1;
        }
    }
    assert!(checked > 100);
}

#[test]
fn psi_invariance_in_a_three_dimensional_image() {
    // p = id in dimension 3 with g₀ = diag(0.5, −0.5, 0.25): the cone
    // x² − y² + z²/2 = 0 meets Ψ = g_μ in real points for μ in (2, 4).
    let ip = InnerProduct::euclidean(3);
    let g0 = Quadric::new(&ip, diag(&[0.5, -0.5, 0.25]), &policy()).unwrap();
    let fam = IvoryFamily::build(&ip, &Projection::identity(3), &g0, &policy()).unwrap();
    let grid = linspace(0.0, 1.0, 40);
    let mut checked = 0;
    for mu in [2.25, 2.75, 3.25, 3.75] {
        let psi = fam.g_lambda(mu).unwrap();
        for c in ivory_core::intersect_conics(&g0, &psi, &policy()).unwrap() {
            for exec in [Execution::Sequential, Execution::Parallel] {
                let r = fam.psi_invariance_check_with(mu, &grid, c.point.coords(), exec).unwrap();
                assert!(r <= 1e-9, "μ={mu}: {r}");
            }
            checked += 1;
        }
    }
    assert!(checked >= 4);
}

#[test]
fn out_of_domain_requests_are_refused() {
    let ip = InnerProduct::euclidean(3);
    let p = Projection::coordinate(3, &[0, 1]).unwrap();
    let g0 = Quadric::new(&ip, diag(&[0.5, -2.0, -1.0]), &policy()).unwrap();
    let fam = IvoryFamily::build(&ip, &p, &g0, &policy()).unwrap();
    let hi = fam.domain().hi;
    assert!(matches!(fam.l_lambda(hi + 0.1), Err(Error::OutOfDomain { .. })));
    assert!(matches!(
        IvoryFamily::build_toward(&ip, &p, &g0, 3.0, &policy()),
        Err(Error::SqrtDomain(_))
    ));
    let identity = DMatrix::<f64>::identity(3, 3);
    assert!(fam.l_lambda(0.0).unwrap() == identity);
}
