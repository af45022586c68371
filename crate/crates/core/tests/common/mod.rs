//! Independent reference implementations used as test oracles: distance
//! formulas written from their textbook definitions, chart-free
//! parametrisations and a derivative-free minimiser.

#![allow(dead_code)]

use manifold_mom::samplers::{sample_spd_lognormal, sample_vmf, SpdLogNormalParams, VmfParams};
use manifold_mom::{Manifold, Point64};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Great-circle distance from the chord, `2 asin(‖p − q‖/2)` (accurate for
/// nearby points, unlike `arccos pᵀq`).
pub fn sphere_dist(p: &DVector<f64>, q: &DVector<f64>) -> f64 {
    2.0 * ((p - q).norm() / 2.0).min(1.0).asin()
}

/// Shape distance `arccos |⟨p, q⟩_ℂ|`, evaluated as the chord form of
/// [`sphere_dist`] after rotating `q` by the phase of `⟨p, q⟩_ℂ`.
pub fn shape_dist(p: &DVector<f64>, q: &DVector<f64>) -> f64 {
    let (mut re, mut im) = (0.0, 0.0);
    for k in 0..p.len() / 2 {
        let (a, b) = (p[2 * k], p[2 * k + 1]);
        let (c, d) = (q[2 * k], q[2 * k + 1]);
        // conj(a + ib)(c + id)
        re += a * c + b * d;
        im += a * d - b * c;
    }
    let r = re.hypot(im);
    if r == 0.0 {
        return std::f64::consts::FRAC_PI_2;
    }
    // Multiply q by conj(z)/|z|.
    let (cr, ci) = (re / r, -im / r);
    let mut aligned = q.clone();
    for k in 0..p.len() / 2 {
        let (c, d) = (q[2 * k], q[2 * k + 1]);
        aligned[2 * k] = c * cr - d * ci;
        aligned[2 * k + 1] = c * ci + d * cr;
    }
    sphere_dist(p, &aligned)
}

/// Affine-invariant distance via the Cholesky-reduced generalised eigenproblem.
pub fn spd_dist(p: &DMatrix<f64>, q: &DMatrix<f64>) -> f64 {
    let l = p.clone().cholesky().expect("positive definite").l();
    let li = l.clone().try_inverse().expect("invertible");
    let m = &li * q * li.transpose();
    let m = (&m + m.transpose()) * 0.5;
    m.symmetric_eigenvalues()
        .iter()
        .map(|x| x.ln().powi(2))
        .sum::<f64>()
        .sqrt()
}

pub fn oracle_dist(manifold: Manifold, p: &DMatrix<f64>, q: &DMatrix<f64>) -> f64 {
    let v = |m: &DMatrix<f64>| DVector::from_column_slice(m.as_slice());
    match manifold {
        Manifold::Sphere { .. } => sphere_dist(&v(p), &v(q)),
        Manifold::PlanarShape { .. } => shape_dist(&v(p), &v(q)),
        Manifold::Spd { .. } => spd_dist(p, q),
    }
}

pub fn chord(p: &DMatrix<f64>, q: &DMatrix<f64>) -> f64 {
    (p - q).norm()
}

/// Nelder–Mead simplex minimisation.
pub fn nelder_mead(
    f: &dyn Fn(&[f64]) -> f64,
    x0: &[f64],
    scale: f64,
    iters: usize,
) -> (Vec<f64>, f64) {
    let n = x0.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = (0..=n)
        .map(|i| {
            let mut x = x0.to_vec();
            if i > 0 {
                x[i - 1] += scale;
            }
            let fx = f(&x);
            (x, fx)
        })
        .collect();
    for _ in 0..iters {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[n].1 - simplex[0].1;
        let size = simplex
            .iter()
            .map(|(x, _)| dist(x, &simplex[0].0))
            .fold(0.0, f64::max);
        if size < 1e-10 || (spread.abs() <= 1e-16 * (1.0 + simplex[0].1.abs()) && size < 1e-7) {
            break;
        }
        let centroid: Vec<f64> = (0..n)
            .map(|j| simplex[..n].iter().map(|(x, _)| x[j]).sum::<f64>() / n as f64)
            .collect();
        let lerp = |t: f64| -> Vec<f64> {
            (0..n)
                .map(|j| centroid[j] + t * (simplex[n].0[j] - centroid[j]))
                .collect()
        };
        let xr = lerp(-1.0);
        let fr = f(&xr);
        if fr < simplex[0].1 {
            let xe = lerp(-2.0);
            let fe = f(&xe);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            let xc = if fr < simplex[n].1 {
                lerp(-0.5)
            } else {
                lerp(0.5)
            };
            let fc = f(&xc);
            if fc < simplex[n].1.min(fr) {
                simplex[n] = (xc, fc);
            } else {
                let best = simplex[0].0.clone();
                for s in simplex.iter_mut().skip(1) {
                    s.0 = (0..n).map(|j| best[j] + 0.5 * (s.0[j] - best[j])).collect();
                    s.1 = f(&s.0);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    simplex.swap_remove(0)
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Ambient coordinates of a point from unconstrained parameters around `base`:
/// normalisation (sphere), centring + normalisation (shape), `L Lᵀ` with `L`
/// lower-triangular (SPD; `base` ignored).
pub fn param_point(manifold: Manifold, base: &DMatrix<f64>, t: &[f64]) -> DMatrix<f64> {
    match manifold {
        Manifold::Sphere { .. } => {
            let x = base + DMatrix::from_column_slice(base.len(), 1, t);
            let n = x.norm();
            x / n
        }
        Manifold::PlanarShape { landmarks } => {
            let mut x = base + DMatrix::from_column_slice(base.len(), 1, t);
            let (mut cx, mut cy) = (0.0, 0.0);
            for k in 0..landmarks {
                cx += x[2 * k] / landmarks as f64;
                cy += x[2 * k + 1] / landmarks as f64;
            }
            for k in 0..landmarks {
                x[2 * k] -= cx;
                x[2 * k + 1] -= cy;
            }
            let n = x.norm();
            x / n
        }
        Manifold::Spd { n } => {
            let mut l = DMatrix::zeros(n, n);
            let mut k = 0;
            for i in 0..n {
                for j in 0..=i {
                    l[(i, j)] = t[k];
                    k += 1;
                }
            }
            &l * l.transpose()
        }
    }
}

/// Parameters reproducing `x` under [`param_point`] (zero offsets on embedded
/// manifolds, the Cholesky factor on SPD).
pub fn start_params(manifold: Manifold, x: &DMatrix<f64>) -> Vec<f64> {
    match manifold {
        Manifold::Spd { n } => {
            let l = x.clone().cholesky().expect("positive definite").l();
            (0..n)
                .flat_map(|i| (0..=i).map(move |j| (i, j)))
                .map(|(i, j)| l[(i, j)])
                .collect()
        }
        _ => vec![0.0; x.len()],
    }
}

/// Multi-start minimisation of `loss(x)` over the manifold, started from each
/// of `starts` and restarted from its own optimum until the value settles.
pub fn oracle_minimum(
    manifold: Manifold,
    starts: &[DMatrix<f64>],
    loss: &dyn Fn(&DMatrix<f64>) -> f64,
) -> (DMatrix<f64>, f64) {
    let mut best: Option<(DMatrix<f64>, f64)> = None;
    for s in starts {
        let mut base = s.clone();
        let mut value = loss(&base);
        for round in 0..4 {
            let b = base.clone();
            let f = |t: &[f64]| loss(&param_point(manifold, &b, t));
            let scale = if round == 0 { 0.05 } else { 1e-4 };
            let (t, v) = nelder_mead(&f, &start_params(manifold, &b), scale, 5_000);
            let improved = value - v;
            if v <= value {
                base = param_point(manifold, &b, &t);
                value = v;
            }
            if round > 0 && improved < 1e-15 {
                break;
            }
        }
        if best.as_ref().is_none_or(|(_, v)| value < *v) {
            best = Some((base, value));
        }
    }
    best.expect("at least one start")
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_unit(rng: &mut ChaCha8Rng, len: usize) -> DVector<f64> {
    let v = DVector::from_fn(len, |_, _| rng.sample::<f64, _>(rand_distr::StandardNormal));
    let n = v.norm();
    v / n
}

/// A random point on `manifold` (uniform on the sphere, a random preshape, or
/// a log-normal SPD matrix with unit log-scale).
pub fn random_point(manifold: Manifold, rng: &mut ChaCha8Rng) -> Point64 {
    match manifold {
        Manifold::Sphere { dim } => Point64::sphere(random_unit(rng, dim + 1).as_slice()).unwrap(),
        Manifold::PlanarShape { landmarks } => {
            let v = random_unit(rng, 2 * landmarks);
            manifold_mom::manifold::project_to_manifold(
                manifold,
                &DMatrix::from_column_slice(2 * landmarks, 1, v.as_slice()),
            )
            .unwrap()
        }
        Manifold::Spd { n } => {
            let a = DMatrix::from_fn(n, n, |_, _| {
                rng.sample::<f64, _>(rand_distr::StandardNormal)
            });
            let s = (&a + a.transpose()) * 0.5;
            let e = s.symmetric_eigen();
            let m = &e.eigenvectors
                * DMatrix::from_diagonal(&e.eigenvalues.map(f64::exp))
                * e.eigenvectors.transpose();
            Point64::spd((&m + m.transpose()) * 0.5).unwrap()
        }
    }
}

/// A random tangent vector at `p` with metric norm `norm`.
pub fn random_tangent(
    p: &Point64,
    norm: f64,
    rng: &mut ChaCha8Rng,
) -> manifold_mom::TangentVector64 {
    let (r, c) = p.manifold().ambient_shape();
    let a = DMatrix::from_fn(r, c, |_, _| {
        rng.sample::<f64, _>(rand_distr::StandardNormal)
    });
    let t = manifold_mom::manifold::project_tangent(p, &a).unwrap();
    let n = t.norm();
    t.scale(norm / n)
}

/// A point at geodesic distance `< radius` from `p`, uniformly random in distance.
pub fn random_in_ball(p: &Point64, radius: f64, rng: &mut ChaCha8Rng) -> Point64 {
    let r = radius * rng.random::<f64>();
    random_tangent(p, r.max(1e-300), rng).exp()
}

/// A clustered 5-point sample on `manifold` for oracle comparisons.
pub fn cluster(manifold: Manifold, seed: u64) -> Vec<Point64> {
    let mut r = rng(seed);
    match manifold {
        Manifold::Sphere { .. } => {
            let mu = random_point(manifold, &mut r);
            sample_vmf(&VmfParams::new(mu, 8.0).unwrap(), 5, seed)
        }
        Manifold::PlanarShape { .. } => {
            let c = random_point(manifold, &mut r);
            (0..5).map(|_| random_in_ball(&c, 0.4, &mut r)).collect()
        }
        Manifold::Spd { n } => {
            let params = SpdLogNormalParams::isotropic(n, 0.3).unwrap();
            sample_spd_lognormal(&params, 5, seed)
        }
    }
}
