mod common;

use common::{random_point, random_tangent, rng};
use manifold_mom::estimators::{
    intrinsic_mean_gradient, intrinsic_mean_sphere, SolverConfig, SubsetEstimator,
};
use manifold_mom::manifold::{distance, exp, Chart};
use manifold_mom::pga::{
    mssr, mssr_profile, pga, project_to_submanifold, rpga, tangent_coordinates, SpdCoordinates,
    TangentFrame,
};
use manifold_mom::samplers::{sample_spd_lognormal, sample_vmf, SpdLogNormalParams, VmfParams};
use manifold_mom::{Error, Manifold, MetricKind, Point64, TangentVector64};
use nalgebra::{DMatrix, DVector, SymmetricEigen};

fn dist(p: &Point64, q: &Point64) -> f64 {
    distance(p, q, MetricKind::Intrinsic).unwrap()
}

fn identity() -> Point64 {
    Point64::spd(DMatrix::identity(3, 3)).unwrap()
}

fn anisotropic(kappa: f64) -> SpdLogNormalParams {
    let sigma = DMatrix::from_diagonal(&DVector::from_fn(6, |i, _| 1.0 + 19.0 * i as f64 / 5.0));
    SpdLogNormalParams::new(3, kappa, sigma).unwrap()
}

fn spd_mean(points: &[Point64]) -> Point64 {
    intrinsic_mean_gradient(points, &SolverConfig::damped())
        .unwrap()
        .estimate
}

/// Symmetric matrix function by eigen-decomposition, written independently of the crate.
fn sym_fn(a: &DMatrix<f64>, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
    let e = SymmetricEigen::new(a.clone());
    &e.eigenvectors * DMatrix::from_diagonal(&e.eigenvalues.map(f)) * e.eigenvectors.transpose()
}

/// Whitened log coordinates `(d11, d22, d33, √2 o12, √2 o13, √2 o23)` of `x` at `c`.
fn oracle_coords(c: &DMatrix<f64>, x: &DMatrix<f64>) -> DVector<f64> {
    let is = sym_fn(c, |l| 1.0 / l.sqrt());
    let w = sym_fn(&(&is * x * &is), f64::ln);
    let r = std::f64::consts::SQRT_2;
    DVector::from_vec(vec![
        w[(0, 0)],
        w[(1, 1)],
        w[(2, 2)],
        r * w[(0, 1)],
        r * w[(0, 2)],
        r * w[(1, 2)],
    ])
}

fn assert_same_up_to_sign(a: &DVector<f64>, b: &DVector<f64>, tol: f64) {
    let d = (a - b).amax().min((a + b).amax());
    assert!(d <= tol, "directions differ by {d}: {a} vs {b}");
}

#[test]
fn tangent_coordinates_examples() {
    let e = std::f64::consts::E;
    let x = Point64::spd(DMatrix::from_diagonal(&DVector::from_vec(vec![
        e, 1.0, 1.0,
    ])))
    .unwrap();
    let c = tangent_coordinates(&identity(), &x).unwrap();
    let want = DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    assert!((c - want).amax() < 1e-14);

    let mut r = rng(3);
    for manifold in [
        Manifold::Sphere { dim: 4 },
        Manifold::PlanarShape { landmarks: 6 },
        Manifold::Spd { n: 3 },
    ] {
        for _ in 0..50 {
            let p = random_point(manifold, &mut r);
            let q = random_point(manifold, &mut r);
            let c = tangent_coordinates(&p, &q).unwrap();
            assert_eq!(c.len(), manifold.intrinsic_dim());
            assert!((c.norm() - dist(&p, &q)).abs() < 1e-9);
            assert!(tangent_coordinates(&p, &p).unwrap().amax() < 1e-12);
        }
    }
}

#[test]
fn frame_round_trips_coordinates() {
    let mut r = rng(8);
    for manifold in [
        Manifold::Sphere { dim: 3 },
        Manifold::PlanarShape { landmarks: 5 },
        Manifold::Spd { n: 3 },
    ] {
        let p = random_point(manifold, &mut r);
        for coords in [SpdCoordinates::Whitened, SpdCoordinates::Raw] {
            let frame = TangentFrame::new(&p, coords);
            let v = random_tangent(&p, 0.7, &mut r);
            let q = exp(&v);
            let c = frame.coordinates(&q).unwrap();
            let back: TangentVector64 = frame.tangent(&c);
            assert!((back.vec() - v.vec()).amax() < 1e-9);
        }
    }
}

#[test]
fn rank_one_data_recovers_the_direction() {
    let c = identity();
    let mut r = rng(5);
    let v = random_tangent(&c, 1.0, &mut r);
    let ts = [-0.9, -0.5, -0.2, 0.1, 0.3, 0.4, 0.8];
    let mean_t: f64 = ts.iter().sum::<f64>() / ts.len() as f64;
    let ts: Vec<f64> = ts.iter().map(|t| t - mean_t).collect();
    let points: Vec<Point64> = ts.iter().map(|&t| exp(&v.scale(t))).collect();
    let basis = pga(&points, &c, 3, SpdCoordinates::Whitened).unwrap();
    let var = ts.iter().map(|t| t * t).sum::<f64>() / ts.len() as f64;
    assert!((basis.eigenvalues[0] - var).abs() < 1e-12);
    assert!(basis.eigenvalues[1].abs() < 1e-14 && basis.degenerate);
    let d = &basis.directions()[0];
    assert!((d.vec() - v.vec()).amax().min((d.vec() + v.vec()).amax()) < 1e-10);
}

#[test]
fn pga_matches_brute_force_covariance() {
    let xs = sample_spd_lognormal::<f64>(&anisotropic(0.05), 20, 14);
    let center = spd_mean(&xs);
    let basis = pga(&xs, &center, 6, SpdCoordinates::Whitened).unwrap();
    let mut cov = DMatrix::zeros(6, 6);
    for x in &xs {
        let z = oracle_coords(center.coords(), x.coords());
        cov += &z * z.transpose();
    }
    cov /= xs.len() as f64;
    let e = SymmetricEigen::new(cov.clone());
    let mut order: Vec<usize> = (0..6).collect();
    order.sort_by(|&a, &b| e.eigenvalues[b].total_cmp(&e.eigenvalues[a]));
    for (k, &j) in order.iter().enumerate() {
        assert!((basis.eigenvalues[k] - e.eigenvalues[j]).abs() < 1e-10);
        assert_same_up_to_sign(
            &basis.coordinates[k],
            &e.eigenvectors.column(j).into_owned(),
            1e-8,
        );
    }
    assert!((&basis.covariance - &cov).amax() < 1e-12);
}

#[test]
fn directions_are_orthonormal_and_eigenvalues_sum_to_trace() {
    let xs = sample_spd_lognormal::<f64>(&anisotropic(0.1), 60, 2);
    let center = spd_mean(&xs);
    let cfg = SolverConfig::default();
    for basis in [
        pga(&xs, &center, 6, SpdCoordinates::Whitened).unwrap(),
        pga(&xs, &center, 6, SpdCoordinates::Raw).unwrap(),
        rpga(
            &xs,
            15,
            6,
            SubsetEstimator::damped_gradient(),
            SpdCoordinates::Whitened,
            &cfg,
        )
        .unwrap(),
    ] {
        let w = DMatrix::from_columns(&basis.coordinates);
        assert!((w.transpose() * &w - DMatrix::identity(6, 6)).amax() < 1e-10);
        assert!(basis.eigenvalues.windows(2).all(|p| p[0] >= p[1]));
        let sum: f64 = basis.eigenvalues.iter().sum();
        assert!((sum - basis.covariance.trace()).abs() < 1e-10);
    }
    // Whitened directions are orthonormal in the metric at the centre.
    let basis = pga(&xs, &center, 6, SpdCoordinates::Whitened).unwrap();
    let chart = Chart::new(basis.center());
    let dirs = basis.directions();
    let g = DMatrix::from_fn(6, 6, |i, j| chart.inner(dirs[i].vec(), dirs[j].vec()));
    assert!((g - DMatrix::identity(6, 6)).amax() < 1e-10);
}

#[test]
fn degenerate_inputs() {
    let c = identity();
    let same = vec![c.clone(); 6];
    let basis = pga(&same, &c, 2, SpdCoordinates::Whitened).unwrap();
    assert!(basis.degenerate);
    assert!(basis.eigenvalues.iter().all(|l| l.abs() < 1e-14));
    let robust = rpga(
        &same,
        3,
        2,
        SubsetEstimator::damped_gradient(),
        SpdCoordinates::Whitened,
        &SolverConfig::default(),
    )
    .unwrap();
    assert!(
        dist(robust.center(), &c) < 1e-12,
        "{}",
        dist(robust.center(), &c)
    );
    assert!(robust.covariance.amax() < 1e-14);
    assert!(pga(&same, &c, 7, SpdCoordinates::Whitened).is_err());
    assert!(matches!(
        pga(&[], &c, 1, SpdCoordinates::Whitened),
        Err(Error::EmptyInput)
    ));
}

#[test]
fn rpga_requires_groups_of_two() {
    let xs = sample_spd_lognormal::<f64>(&anisotropic(0.1), 10, 1);
    let err = rpga(
        &xs,
        10,
        3,
        SubsetEstimator::damped_gradient(),
        SpdCoordinates::Whitened,
        &SolverConfig::default(),
    );
    assert!(matches!(err, Err(Error::GroupTooSmall { .. })), "{err:?}");
    assert!(rpga(
        &xs,
        5,
        3,
        SubsetEstimator::damped_gradient(),
        SpdCoordinates::Whitened,
        &SolverConfig::default()
    )
    .is_ok());
}

#[test]
fn rpga_with_one_group_is_pga_at_the_mean() {
    let cfg = SolverConfig::default().with_seed(4);
    let xs = sample_spd_lognormal::<f64>(&anisotropic(0.1), 30, 9);
    let robust = rpga(
        &xs,
        1,
        6,
        SubsetEstimator::damped_gradient(),
        SpdCoordinates::Whitened,
        &cfg,
    )
    .unwrap();
    let center = intrinsic_mean_gradient(
        &xs,
        &SolverConfig {
            step_size: 0.5,
            ..cfg
        },
    )
    .unwrap()
    .estimate;
    let plain = pga(&xs, &center, 6, SpdCoordinates::Whitened).unwrap();
    assert!(dist(robust.center(), &center) < 1e-12);
    assert!((&robust.covariance - &plain.covariance).amax() < 1e-12);
    for (a, b) in robust.coordinates.iter().zip(&plain.coordinates) {
        assert!((a - b).amax() < 1e-9);
    }
}

#[test]
fn projections() {
    let cfg = SolverConfig::default();
    let xs = sample_spd_lognormal::<f64>(&anisotropic(0.1), 40, 31);
    let center = spd_mean(&xs);
    let basis = pga(&xs, &center, 6, SpdCoordinates::Whitened).unwrap();

    let p = project_to_submanifold(&basis, 2, &center, &cfg).unwrap();
    assert!(p.residual < 1e-12 && p.coefficients.iter().all(|a| a.abs() < 1e-9));

    let v1 = &basis.directions()[0];
    let on = exp(&v1.scale(0.6));
    let p = project_to_submanifold(&basis, 1, &on, &cfg).unwrap();
    assert!(p.residual <= 1e-8);
    assert!((p.coefficients[0] - 0.6).abs() < 1e-8);
    let p = project_to_submanifold(&basis, 3, &on, &cfg).unwrap();
    assert!(p.residual <= 1e-8 && (p.coefficients[0] - 0.6).abs() < 1e-8);
    assert!(p.coefficients[1].abs() < 1e-8 && p.coefficients[2].abs() < 1e-8);

    let mut r = rng(12);
    for _ in 0..20 {
        let x = random_point(Manifold::Spd { n: 3 }, &mut r);
        let p = project_to_submanifold(&basis, 1, &x, &cfg).unwrap();
        assert!(p.converged);
        let c = tangent_coordinates(&center, &x).unwrap();
        let a = basis.coordinates[0].dot(&c);
        let linear = exp(&v1.scale(a));
        assert!(p.residual <= dist(&linear, &x) + 1e-12);
        assert!(p.residual <= dist(&center, &x) + 1e-9);
        assert!((dist(&p.point, &x) - p.residual).abs() < 1e-9);
    }
}

#[test]
fn mssr_properties() {
    let cfg = SolverConfig::default();
    let xs = sample_spd_lognormal::<f64>(&anisotropic(0.1), 25, 6);
    let center = spd_mean(&xs);
    let basis = pga(&xs, &center, 6, SpdCoordinates::Whitened).unwrap();

    let profile = mssr_profile(&xs, &basis, 6, &cfg).unwrap();
    for w in profile.windows(2) {
        assert!(w[1] <= w[0] + 1e-8, "{profile:?}");
    }
    assert!(profile[5] < 1e-12, "full basis residual {}", profile[5]);
    assert!((mssr(&xs, &basis, 3, &cfg).unwrap() - profile[2]).abs() < 1e-15);
    assert!(mssr(&xs, &basis, 0, &cfg).is_err());

    // Data on a two-dimensional geodesic submanifold.
    let dirs = basis.directions();
    let mut r = rng(2);
    let on: Vec<Point64> = (0..15)
        .map(|_| {
            let a: f64 = rand::Rng::random_range(&mut r, -0.8..0.8);
            let b: f64 = rand::Rng::random_range(&mut r, -0.8..0.8);
            exp(&dirs[0].scale(a).try_add(&dirs[1].scale(b)).unwrap())
        })
        .collect();
    assert!(mssr(&on, &basis, 2, &cfg).unwrap() < 1e-12);
}

#[test]
fn sphere_pga_is_rotation_equivariant() {
    let north = Point64::sphere(&[0.0, 0.0, 1.0]).unwrap();
    let xs = sample_vmf(&VmfParams::new(north, 10.0).unwrap(), 40, 3);
    // Stretch along the first axis so the principal directions are well separated.
    let xs: Vec<Point64> = xs
        .iter()
        .map(|x| {
            let c = x.coords();
            let y = DMatrix::from_column_slice(3, 1, &[2.0 * c[0], 0.7 * c[1], c[2]]);
            Point64::new(Manifold::Sphere { dim: 2 }, &y / y.norm()).unwrap()
        })
        .collect();
    let rot = nalgebra::Rotation3::from_euler_angles(0.3, -1.1, 2.0).into_inner();
    let rot = DMatrix::from_column_slice(3, 3, rot.as_slice());
    let rotated: Vec<Point64> = xs
        .iter()
        .map(|x| Point64::new(x.manifold(), &rot * x.coords()).unwrap())
        .collect();

    let cfg = SolverConfig::default();
    let c = intrinsic_mean_sphere(&xs, &cfg).unwrap().estimate;
    let rc = intrinsic_mean_sphere(&rotated, &cfg).unwrap().estimate;
    assert!((&rot * c.coords() - rc.coords()).amax() < 1e-8);

    let a = pga(&xs, &c, 2, SpdCoordinates::Whitened).unwrap();
    let b = pga(&rotated, &rc, 2, SpdCoordinates::Whitened).unwrap();
    for (va, vb) in a.directions().iter().zip(&b.directions()) {
        let ra = DVector::from_column_slice((&rot * va.vec()).as_slice());
        let vb = DVector::from_column_slice(vb.vec().as_slice());
        assert_same_up_to_sign(&ra, &vb, 1e-8);
    }
    for (la, lb) in a.eigenvalues.iter().zip(&b.eigenvalues) {
        assert!((la - lb).abs() < 1e-10);
    }
}
