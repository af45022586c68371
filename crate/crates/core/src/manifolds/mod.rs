//! Manifold-specific constants: dimensions, injectivity radii and the
//! Lipschitz constants of the log maps on geodesic balls.

pub(crate) mod shape;
pub(crate) mod spd;
pub(crate) mod sphere;

use crate::error::{Error, Result};
use crate::manifold::{Chart, Manifold, Point};
use crate::Real;

/// Constant table for one manifold.
///
/// `log_p` is `log_lipschitz_k`-Lipschitz on the geodesic ball of radius
/// `log_lipschitz_radius` about any base point `p`, measured in the ambient
/// norm on the sphere and shape space and in the metric norm `‖·‖_p` on SPD.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManifoldSpec {
    pub manifold: Manifold,
    pub intrinsic_dim: usize,
    pub ambient_dim: usize,
    pub log_lipschitz_k: f64,
    pub log_lipschitz_radius: f64,
    pub injectivity_radius: f64,
}

pub fn spec_of(manifold: Manifold) -> ManifoldSpec {
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
    let (k, radius, inj) = match manifold {
        Manifold::Sphere { .. } => (2.0, FRAC_PI_2, PI),
        Manifold::PlanarShape { .. } => (2.0, FRAC_PI_4, FRAC_PI_2),
        Manifold::Spd { .. } => (1.0, f64::INFINITY, f64::INFINITY),
    };
    ManifoldSpec {
        manifold,
        intrinsic_dim: manifold.intrinsic_dim(),
        ambient_dim: manifold.ambient_dim(),
        log_lipschitz_k: k,
        log_lipschitz_radius: radius,
        injectivity_radius: inj,
    }
}

/// Both sides of the Lipschitz inequality `‖log_p q₁ − log_p q₂‖ ≤ K d(q₁, q₂)`.
///
/// Fails with [`Error::OutOfBall`] if `q₁` or `q₂` is farther from `p` than the
/// manifold's Lipschitz radius.
pub fn lipschitz_witness<T: Real>(p: &Point<T>, q1: &Point<T>, q2: &Point<T>) -> Result<(T, T)> {
    for q in [q1, q2] {
        if q.manifold() != p.manifold() {
            return Err(Error::ManifoldMismatch(p.manifold(), q.manifold()));
        }
    }
    let spec = spec_of(p.manifold());
    let chart = Chart::new(p);
    for q in [q1, q2] {
        let d = chart.distance(q);
        if d.as_f64() > spec.log_lipschitz_radius {
            return Err(Error::OutOfBall {
                distance: d.as_f64(),
                radius: spec.log_lipschitz_radius,
            });
        }
    }
    let diff = chart.log(q1)? - chart.log(q2)?;
    let lhs = match p.manifold() {
        Manifold::Spd { .. } => chart.norm(&diff),
        _ => diff.norm(),
    };
    let rhs = T::lit(spec.log_lipschitz_k) * Chart::new(q1).distance(q2);
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{dvector, DMatrix};
    use std::f64::consts::{E, FRAC_PI_2, FRAC_PI_4, PI};

    #[test]
    fn constant_tables() {
        let s = spec_of(Manifold::Sphere { dim: 2 });
        assert_eq!(
            (s.intrinsic_dim, s.ambient_dim, s.log_lipschitz_k),
            (2, 3, 2.0)
        );
        assert_eq!(
            (s.log_lipschitz_radius, s.injectivity_radius),
            (FRAC_PI_2, PI)
        );
        let s = spec_of(Manifold::Spd { n: 3 });
        assert_eq!(
            (s.intrinsic_dim, s.ambient_dim, s.log_lipschitz_k),
            (6, 9, 1.0)
        );
        assert!(s.log_lipschitz_radius.is_infinite());
        let s = spec_of(Manifold::PlanarShape { landmarks: 72 });
        assert_eq!((s.intrinsic_dim, s.log_lipschitz_k), (140, 2.0));
        assert_eq!(
            (s.log_lipschitz_radius, s.injectivity_radius),
            (FRAC_PI_4, FRAC_PI_2)
        );
    }

    #[test]
    fn sphere_witness() {
        let p = Point::<f64>::sphere(&[1.0, 0.0, 0.0]).unwrap();
        let q1 = Point::sphere(&[0.0, 1.0, 0.0]).unwrap();
        let q2 = Point::sphere(&[0.0, 0.0, 1.0]).unwrap();
        let (lhs, rhs) = lipschitz_witness(&p, &q1, &q2).unwrap();
        assert!((lhs - 2.221441469079183).abs() < 1e-14);
        assert!((rhs - PI).abs() < 1e-14);
        assert_eq!(lipschitz_witness(&p, &q1, &q1).unwrap(), (0.0, 0.0));
        let far = Point::sphere(&[-1.0, 0.1, 0.0].map(|x: f64| x / 1.01f64.sqrt())).unwrap();
        assert!(matches!(
            lipschitz_witness(&p, &q1, &far),
            Err(Error::OutOfBall { .. })
        ));
    }

    #[test]
    fn spd_witness_is_tight_at_identity() {
        let d =
            |v: [f64; 3]| Point::spd(DMatrix::from_diagonal(&dvector![v[0], v[1], v[2]])).unwrap();
        let (lhs, rhs) =
            lipschitz_witness(&d([1.0; 3]), &d([E, 1.0, 1.0]), &d([1.0, E, 1.0])).unwrap();
        assert!((lhs - 2f64.sqrt()).abs() < 1e-12);
        assert!((rhs - 2f64.sqrt()).abs() < 1e-12);
    }
}
