//! Constants and tail bounds of the median-of-means estimator, and the
//! geodesic-distance distribution of the von Mises–Fisher law.
//!
//! With `m` subset estimators of which each deviates from the truth by more
//! than `ε` with probability at most `η`, the geometric median `μ*` satisfies
//!
//! ```text
//! P(ρ(μ*, μ) > C̄_α ε) ≤ exp(−m φ(α, η)),
//! φ(α, η) = (1−α) ln((1−α)/(1−η)) + α ln(α/η),
//! ```
//!
//! for any `η < α < ½`, where `C̄_α` depends on whether `ρ` is an extrinsic
//! (chordal) or intrinsic (geodesic) distance. Everything here works in `f64`.

use std::f64::consts::{FRAC_PI_2, PI};

use log::warn;

use crate::error::{Error, Result};

fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

/// `C̄_α = (1−α) / (√(1−2α) cos ψ̄ − α sin ψ̄)` for the extrinsic median.
///
/// `psi_bar ∈ [0, π/2)` is the worst-case angle between the embedded manifold
/// and the chords through the true mean; `alpha` must lie in
/// `(0, cot ψ̄ tan(ψ̄/2))`, which is `(0, ½)` at `ψ̄ = 0`.
pub fn c_alpha_extrinsic(alpha: f64, psi_bar: f64) -> Result<f64> {
    if !(0.0..std::f64::consts::FRAC_PI_2).contains(&psi_bar) {
        return Err(domain(format!("psi_bar = {psi_bar} is outside [0, π/2)")));
    }
    // cot ψ tan(ψ/2) = cos ψ / (1 + cos ψ), continuous at ψ = 0.
    let upper = psi_bar.cos() / (1.0 + psi_bar.cos());
    if !(alpha > 0.0 && alpha < upper) {
        return Err(Error::InadmissibleAlpha {
            alpha,
            reason: format!("must lie in (0, {upper})"),
        });
    }
    let denom = (1.0 - 2.0 * alpha).sqrt() * psi_bar.cos() - alpha * psi_bar.sin();
    if denom <= 0.0 {
        return Err(Error::InadmissibleAlpha {
            alpha,
            reason: "denominator is not positive".into(),
        });
    }
    Ok((1.0 - alpha) / denom)
}

/// `C̄_α = K (1−α) / √(1−2α)` for the intrinsic median, `K` the log-map
/// Lipschitz constant.
pub fn c_alpha_intrinsic(alpha: f64, lipschitz_k: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(Error::InadmissibleAlpha {
            alpha,
            reason: "must lie in (0, 1/2)".into(),
        });
    }
    if !(lipschitz_k >= 1.0) {
        return Err(domain(format!(
            "Lipschitz constant {lipschitz_k} is below 1"
        )));
    }
    Ok(lipschitz_k * (1.0 - alpha) / (1.0 - 2.0 * alpha).sqrt())
}

/// Bernoulli Kullback–Leibler divergence `KL(α ‖ η)`, for `0 < η < α < 1`.
pub fn phi(alpha: f64, eta: f64) -> Result<f64> {
    if !(eta > 0.0 && eta < alpha && alpha < 1.0) {
        return Err(domain(format!(
            "need 0 < eta < alpha < 1, got alpha = {alpha}, eta = {eta}"
        )));
    }
    Ok((1.0 - alpha) * ((1.0 - alpha) / (1.0 - eta)).ln() + alpha * (alpha / eta).ln())
}

/// `exp(−m φ(α, η))`.
pub fn theorem_bound(m: usize, alpha: f64, eta: f64) -> Result<f64> {
    if m == 0 {
        return Err(domain("m must be at least 1"));
    }
    Ok((-(m as f64) * phi(alpha, eta)?).exp())
}

fn chebyshev(factor: f64, epsilon: f64, m: usize, n: usize, second_moment: f64) -> Result<f64> {
    if !(epsilon > 0.0) {
        return Err(domain(format!("epsilon = {epsilon} is not positive")));
    }
    if m == 0 || m > n {
        return Err(domain(format!("need 1 <= m <= n, got m = {m}, n = {n}")));
    }
    if !(second_moment >= 0.0) {
        return Err(domain(format!("second moment {second_moment} is negative")));
    }
    let eta = factor / (epsilon * epsilon) * (m as f64 / n as f64) * second_moment;
    if eta >= 1.0 {
        warn!("Chebyshev bound is vacuous (eta = {eta}); clamped to 1");
    }
    Ok(eta.min(1.0))
}

/// Chebyshev bound on `P(ρ(μⱼ, μ) ≥ ε)` for an extrinsic subset mean:
/// `(4/ε²)(m/n) E ρ²(μ, x)`, clamped to 1.
pub fn eta_chebyshev_extrinsic(
    epsilon: f64,
    m: usize,
    n: usize,
    second_moment: f64,
) -> Result<f64> {
    chebyshev(4.0, epsilon, m, n, second_moment)
}

/// Chebyshev bound for an intrinsic subset mean: `(K²/ε²)(m/n) E d²(μ, x)`, clamped to 1.
pub fn eta_chebyshev_intrinsic(
    epsilon: f64,
    m: usize,
    n: usize,
    lipschitz_k: f64,
    second_moment: f64,
) -> Result<f64> {
    if !(lipschitz_k >= 1.0) {
        return Err(domain(format!(
            "Lipschitz constant {lipschitz_k} is below 1"
        )));
    }
    chebyshev(lipschitz_k * lipschitz_k, epsilon, m, n, second_moment)
}

// Gauss–Kronrod 7/15 nodes on [-1, 1] (non-negative half) and weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One G7/K15 panel: Kronrod estimate and `|K15 − G7|`.
fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for i in 0..7 {
        let dx = h * XGK[i];
        let pair = f(c - dx) + f(c + dx);
        kronrod += WGK[i] * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Adaptive bisection of G7/K15 panels of a non-negative integrand until each
/// panel's error estimate is below `rel_tol` times its value or below `abs_tol`.
fn integrate_positive(f: &impl Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> f64 {
    fn recurse(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: (f64, f64), depth: u32) -> f64 {
        let (value, err) = gk15(f, a, b);
        if err <= tol.0 * value.abs() || err <= tol.1 || depth == 0 {
            return value;
        }
        let mid = 0.5 * (a + b);
        recurse(f, a, mid, tol, depth - 1) + recurse(f, mid, b, tol, depth - 1)
    }
    if a >= b {
        return 0.0;
    }
    recurse(f, a, b, (rel_tol.max(50.0 * f64::EPSILON), abs_tol), 30)
}

/// `∫ₐᵇ f` over panels with breakpoints `scale·2^k`, so a peak of width
/// `scale` at the origin is resolved however narrow it is. Panels whose error
/// is below `abs_tol` are accepted as they are.
fn integrate_graded(f: &impl Fn(f64) -> f64, a: f64, b: f64, scale: f64, abs_tol: f64) -> f64 {
    let mut total = 0.0;
    let mut lo = a;
    let mut edge = scale;
    while lo < b {
        while edge <= lo {
            edge *= 2.0;
        }
        let hi = edge.min(b);
        total += integrate_positive(f, lo, hi, 1e-13, abs_tol);
        lo = hi;
    }
    total
}

fn check_vmf(kappa: f64, d: usize) -> Result<()> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(domain(format!("kappa = {kappa} is not positive")));
    }
    if d == 0 {
        return Err(domain("sphere dimension must be at least 1"));
    }
    Ok(())
}

/// `P(d(x, μ) ≤ ε)` for `x ~ vMF(μ, κ)` on the sphere `S^d`.
///
/// The colatitude `θ = d(x, μ)` has density proportional to
/// `e^{κ cos θ} sin^{d−1} θ` on `[0, π]`. Both the mass below and above `ε`
/// are integrated adaptively, so the result is accurate near 0 and near 1.
pub fn vmf_geodesic_cdf(epsilon: f64, kappa: f64, d: usize) -> Result<f64> {
    check_vmf(kappa, d)?;
    if !(0.0..=PI).contains(&epsilon) {
        return Err(domain(format!("epsilon = {epsilon} is outside [0, π]")));
    }
    // Scaled by e^{-κ} so the integrand never exceeds 1; the mass sits
    // within a few multiples of 1/√κ of the origin.
    let power = (d - 1) as i32;
    // cos θ − 1 = −2 sin²(θ/2), without cancellation near the peak.
    let density = |t: f64| (-2.0 * kappa * (0.5 * t).sin().powi(2)).exp() * t.sin().powi(power);
    let width = kappa.sqrt().recip().min(1.0);
    // The density peaks near θ = √((d−1)/κ); its height times the width
    // sizes the total mass, which fixes a negligible absolute error.
    let mass = density(((d - 1) as f64 / kappa).sqrt().min(FRAC_PI_2)) * width;
    let abs_tol = 1e-22 * mass;
    let below = integrate_graded(&density, 0.0, epsilon, width / 8.0, abs_tol);
    let above = integrate_graded(&density, epsilon, PI, width / 8.0, abs_tol);
    Ok((below / (below + above)).clamp(0.0, 1.0))
}

/// Geodesic radius `r` with `P(d(x, μ) ≤ r) = level`, by bisection on [`vmf_geodesic_cdf`].
pub fn vmf_confidence_radius(level: f64, kappa: f64, d: usize) -> Result<f64> {
    check_vmf(kappa, d)?;
    if !(level > 0.0 && level < 1.0) {
        return Err(domain(format!("level = {level} is outside (0, 1)")));
    }
    let (mut lo, mut hi) = (0.0, PI);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if vmf_geodesic_cdf(mid, kappa, d)? < level {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn c_alpha_values() {
        close(c_alpha_extrinsic(1e-12, 0.0).unwrap(), 1.0, 1e-11);
        close(
            c_alpha_extrinsic(0.25, 0.0).unwrap(),
            1.0606601717798212,
            1e-14,
        );
        close(
            c_alpha_extrinsic(0.25, PI / 6.0).unwrap(),
            1.5388642136260058,
            1e-14,
        );
        close(c_alpha_intrinsic(1e-12, 1.0).unwrap(), 1.0, 1e-11);
        close(
            c_alpha_intrinsic(0.25, 2.0).unwrap(),
            2.1213203435596424,
            1e-14,
        );
        close(
            c_alpha_intrinsic(0.4, 1.0).unwrap(),
            1.341640786499874,
            1e-14,
        );
    }

    #[test]
    fn c_alpha_rejects_inadmissible_alpha() {
        assert!(matches!(
            c_alpha_extrinsic(0.5, 0.0),
            Err(Error::InadmissibleAlpha { .. })
        ));
        // cot(π/3) tan(π/6) = 1/3.
        assert!(matches!(
            c_alpha_extrinsic(0.34, PI / 3.0),
            Err(Error::InadmissibleAlpha { .. })
        ));
        assert!(c_alpha_extrinsic(0.33, PI / 3.0).is_ok());
        assert!(matches!(
            c_alpha_intrinsic(0.0, 1.0),
            Err(Error::InadmissibleAlpha { .. })
        ));
    }

    #[test]
    fn phi_and_bound_values() {
        close(phi(0.5, 0.1).unwrap(), 0.5108256237659907, 1e-15);
        close(phi(0.3, 0.05).unwrap(), 0.3237606860825891, 1e-15);
        assert!(phi(0.3, 0.3 - 1e-9).unwrap() < 1e-15);
        close(theorem_bound(10, 0.5, 0.1).unwrap(), 0.0060466176, 1e-10);
        close(
            theorem_bound(30, 0.3, 0.05).unwrap(),
            6.050281999793334e-05,
            1e-17,
        );
        assert!(theorem_bound(0, 0.5, 0.1).is_err());
        assert!(phi(0.1, 0.2).is_err());
    }

    #[test]
    fn chebyshev_values() {
        assert_eq!(eta_chebyshev_extrinsic(0.5, 5, 60, 0.0).unwrap(), 0.0);
        close(
            eta_chebyshev_extrinsic(0.5, 5, 60, 0.04).unwrap(),
            0.16 / 3.0,
            1e-15,
        );
        assert_eq!(eta_chebyshev_extrinsic(0.01, 5, 60, 0.04).unwrap(), 1.0);
        close(
            eta_chebyshev_intrinsic(0.5, 5, 60, 2.0, 0.04).unwrap(),
            0.16 / 3.0,
            1e-15,
        );
        close(
            eta_chebyshev_intrinsic(0.5, 15, 60, 1.0, 0.1).unwrap(),
            0.1,
            1e-15,
        );
        assert!(eta_chebyshev_extrinsic(0.5, 61, 60, 0.1).is_err());
    }

    #[test]
    fn vmf_cdf_matches_closed_form_on_s2() {
        let closed =
            |e: f64, k: f64| (1.0 - (k * (e.cos() - 1.0)).exp()) / (1.0 - (-2.0 * k).exp());
        for &k in &[0.5, 5.0, 30.0, 200.0] {
            for &e in &[0.0, 0.01, 0.2, 0.7, 1.5, 3.0, PI] {
                close(vmf_geodesic_cdf(e, k, 2).unwrap(), closed(e, k), 1e-12);
            }
        }
        close(
            vmf_geodesic_cdf(0.2, 30.0, 2).unwrap(),
            0.4500911076570846,
            1e-12,
        );
    }

    #[test]
    fn vmf_cdf_high_dimension_values() {
        close(vmf_geodesic_cdf(0.3, 20.0, 7).unwrap(), 0.035142, 1e-6);
        close(vmf_geodesic_cdf(0.5, 30.0, 7).unwrap(), 0.637706, 1e-6);
    }

    #[test]
    fn confidence_radius() {
        close(
            vmf_confidence_radius(0.95, 30.0, 2).unwrap(),
            0.45070034055861236,
            1e-11,
        );
        close(
            vmf_confidence_radius(0.95, 20.0, 7).unwrap(),
            0.8337891499192196,
            1e-11,
        );
        assert!(vmf_confidence_radius(1e-12, 30.0, 2).unwrap() < 1e-5);
        assert!(vmf_confidence_radius(1.0 - 1e-15, 1.0, 2).unwrap() > 3.0);
        assert!(vmf_confidence_radius(1.0, 30.0, 2).is_err());
    }
}
