//! Blocking probabilities for the finite-buffer loss system.
//!
//! The buffer with `L` slots at offered load `a = λs` erlangs blocks like an
//! `M/GI/L/0` queue: exactly Erlang-B for Poisson arrivals, approximately a
//! scaled Erlang-B or a diffusion formula otherwise. Non-integer slot counts
//! arise from the variability scaling `u = 1/max(c², 1)`, so the Erlang-B
//! function is extended to real `L` by the continued integral
//! `1/B(x, a) = ∫₀^∞ e^{−u} (1 + u/a)^x du`, which satisfies the same
//! recurrence as the integer formula.

use crate::allocator::CachingTimeLaw;
use crate::numeric::{adaptive_simpson, integrate_tail, integrate_with_breakpoints, normal_hazard_lower};
use crate::{Error, Result};

/// Erlang-B blocking probability `B(L, a)` for real `L ≥ 0`, `a ≥ 0`.
///
/// Integer `L` uses the stable recurrence from `B(0, a) = 1`; fractional `L`
/// starts the same recurrence from the continued-integral base on `(0, 1)`.
pub fn erlang_b(l: f64, a: f64) -> f64 {
    debug_assert!(l >= 0.0 && a >= 0.0, "erlang_b needs nonnegative arguments");
    if l <= 0.0 {
        return 1.0;
    }
    if a <= 0.0 {
        return 0.0;
    }
    let steps = l.floor() as u64;
    let frac = l - steps as f64;
    let mut b = if frac > 1e-12 {
        fractional_base(frac, a)
    } else {
        1.0
    };
    let offset = if frac > 1e-12 { frac } else { 0.0 };
    for k in 0..steps {
        let level = offset + (k + 1) as f64;
        b = a * b / (level + a * b);
    }
    b.clamp(0.0, 1.0)
}

/// `B(f, a)` for `0 < f < 1` via `1/B = ∫₀^∞ e^{−u} (1 + u/a)^f du`.
fn fractional_base(f: f64, a: f64) -> f64 {
    1.0 / continued_integral(f, a)
}

/// `∫₀^∞ e^{−u} (1 + u/a)^x du` over doubling windows with a relative
/// tolerance (the integrand peaks near `u = x − a` and can reach huge
/// magnitudes, so an absolute tolerance would stall the quadrature).
fn continued_integral(x: f64, a: f64) -> f64 {
    let g = |u: f64| (-u).exp() * (1.0 + u / a).powf(x);
    let mut total = 0.0f64;
    let mut lo = 0.0f64;
    let mut width = 1.0f64;
    for _ in 0..64 {
        let hi = lo + width;
        // coarse magnitude estimate sets the adaptive tolerance
        let mut rough = 0.0;
        for k in 0..=32 {
            let w = if k == 0 || k == 32 { 0.5 } else { 1.0 };
            rough += w * g(lo + (hi - lo) * k as f64 / 32.0);
        }
        rough *= (hi - lo) / 32.0;
        let tol = 1e-13 * rough.abs().max(total.abs()).max(1.0);
        let piece = adaptive_simpson(&g, lo, hi, tol);
        total += piece;
        // stop only past the integrand's peak
        if hi > x && piece.abs() < 1e-13 * total.abs().max(1.0) {
            break;
        }
        lo = hi;
        width *= 2.0;
    }
    total
}

/// Direct-sum Erlang-B, `a^L/L! / Σ_{l≤L} a^l/l!`, with explicit factorials.
///
/// Independent of the recurrence; the factorial overflows past `L = 170`.
pub fn erlang_b_direct(l: u32, a: f64) -> Result<f64> {
    if l > 170 {
        return Err(Error::Domain(format!("direct sum overflows beyond L = 170, got {l}")));
    }
    if a <= 0.0 {
        return Ok(if l == 0 { 1.0 } else { 0.0 });
    }
    let factorial = |n: u32| -> f64 { (1..=n).map(|k| k as f64).product() };
    if !a.powi(l as i32).is_finite() {
        return Err(Error::Domain(format!("a^L overflows for a = {a}, L = {l}")));
    }
    let mut denom = 0.0;
    for k in 0..=l {
        denom += a.powi(k as i32) / factorial(k);
    }
    Ok(a.powi(l as i32) / factorial(l) / denom)
}

/// The continued-Erlang-B integral evaluated directly (no recurrence):
/// `1/B(L, a) = ∫₀^∞ e^{−u} (1 + u/a)^L du`.
///
/// A third route for validation; accurate for moderate `L` where the
/// integrand stays in range.
pub fn erlang_b_integral(l: f64, a: f64) -> f64 {
    1.0 / continued_integral(l, a)
}

/// Diffusion approximation
/// `B̃(L, a, z) = √(z/a) · φ(η)/Φ(η)` with `η = (L − a)/√(az)`.
pub fn diffusion_blocking(l: f64, a: f64, z: f64) -> Result<f64> {
    if !(a > 0.0) || !(z > 0.0) {
        return Err(Error::Domain(format!(
            "diffusion approximation needs a > 0 and z > 0, got a = {a}, z = {z}"
        )));
    }
    let eta = (l - a) / (a * z).sqrt();
    let b = (z / a).sqrt() * normal_hazard_lower(eta);
    Ok(b.clamp(0.0, 1.0))
}

/// Asymptotic peakedness `z_G = 1 + (c² − 1)/s · ∫₀^∞ [1 − G(x)]² dx` from
/// an arbitrary caching-time survival function.
///
/// `s` must equal `∫ (1 − G)` within 1e−6 (consistency check).
pub fn peakedness_from_survival<F: Fn(f64) -> f64>(
    survival: F,
    s: f64,
    c2: f64,
    breakpoints: &[f64],
) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::Domain(format!("mean caching time must be positive, got {s}")));
    }
    let head = breakpoints
        .iter()
        .copied()
        .filter(|b| b.is_finite())
        .fold(1.0f64, f64::max);
    let mean = integrate_with_breakpoints(&|x| survival(x), 0.0, head, breakpoints, 1e-9)
        + integrate_tail(&|x| survival(x), head, 1e-10);
    if (mean - s).abs() > 1e-6 * (1.0 + s.abs()) {
        return Err(Error::Domain(format!(
            "inconsistent caching-time law: integral of survival is {mean}, stated mean is {s}"
        )));
    }
    if (c2 - 1.0).abs() < 1e-15 {
        return Ok(1.0);
    }
    let sq = |x: f64| {
        let sv = survival(x);
        sv * sv
    };
    let sq_int = integrate_with_breakpoints(&sq, 0.0, head, breakpoints, 1e-9)
        + integrate_tail(&sq, head, 1e-10);
    Ok(1.0 + (c2 - 1.0) / s * sq_int)
}

/// Peakedness of the caching-time law produced by a policy assignment.
pub fn peakedness(law: &CachingTimeLaw, c2: f64) -> Result<f64> {
    let s = law.mean();
    if (c2 - 1.0).abs() < 1e-15 {
        return Ok(1.0);
    }
    if !(s > 0.0) {
        return Err(Error::Domain(format!("mean caching time must be positive, got {s}")));
    }
    let sq = law.survival_sq_integral();
    if sq.is_infinite() {
        return Err(Error::Domain(
            "caching-time law has unbounded second-moment tail (items held forever)".into(),
        ));
    }
    Ok(1.0 + (c2 - 1.0) / s * sq)
}

/// Upper bound `B(uL, ua)` with `u = 1/max(c², 1)`; exact Erlang-B for
/// `c² ≤ 1`.
pub fn blocking_upper_bound(l: f64, a: f64, c2: f64) -> f64 {
    let u = 1.0 / c2.max(1.0);
    erlang_b(u * l, u * a)
}

/// Heavy-traffic approximation `1 − L/a`, valid only for `a > L`.
pub fn heavy_traffic_blocking(l: f64, a: f64) -> Result<f64> {
    if !(a > l) {
        return Err(Error::Domain(format!(
            "heavy-traffic approximation needs offered load above capacity, got L = {l}, a = {a}"
        )));
    }
    Ok(1.0 - l / a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::allocator::FlowModel;
    use crate::presets;

    #[test]
    fn erlang_b_spot_values() {
        assert_eq!(erlang_b(1.0, 1.0), 0.5);
        assert_eq!(erlang_b(0.0, 3.0), 1.0);
        assert_eq!(erlang_b(5.0, 0.0), 0.0);
        // B(5,1) = (1/120) / sum_{l<=5} 1/l!
        let expect = (1.0 / 120.0)
            / (1.0 + 1.0 + 0.5 + 1.0 / 6.0 + 1.0 / 24.0 + 1.0 / 120.0);
        assert!((erlang_b(5.0, 1.0) - expect).abs() < 1e-14);
        // B(5,5) = 3125/10970 exactly
        assert!((erlang_b(5.0, 5.0) - 3125.0 / 10970.0).abs() < 1e-14);
    }

    #[test]
    fn recurrence_matches_direct_sum() {
        for l in [1u32, 5, 20, 60, 120, 170] {
            for a in [0.5, 1.0, 10.0, 50.0] {
                let rec = erlang_b(l as f64, a);
                let direct = erlang_b_direct(l, a).unwrap();
                assert!(
                    (rec - direct).abs() <= 1e-12,
                    "L={l}, a={a}: recurrence {rec} vs direct {direct}"
                );
            }
        }
        let rec = erlang_b(100.0, 100.0);
        let direct = erlang_b_direct(100, 100.0).unwrap();
        assert!((rec - direct).abs() <= 1e-12);
        assert!(erlang_b_direct(171, 1.0).is_err());
        // a^L overflow is reported, not silently NaN
        assert!(erlang_b_direct(170, 100.0).is_err());
    }

    #[test]
    fn continued_b_matches_recurrence_at_integers() {
        for l in [1.0, 2.0, 5.0, 10.0, 20.0] {
            for a in [1.0, 5.0, 20.0] {
                let rec = erlang_b(l, a);
                let int = erlang_b_integral(l, a);
                assert!(
                    (rec - int).abs() <= 1e-10,
                    "L={l}, a={a}: recurrence {rec} vs integral {int}"
                );
            }
        }
    }

    #[test]
    fn fractional_arguments_interpolate_monotonically() {
        for a in [0.5, 2.0, 10.0] {
            let mut prev = 1.0;
            for i in 0..=40 {
                let l = i as f64 * 0.25;
                let b = erlang_b(l, a);
                assert!(b <= prev + 1e-12, "B not decreasing in L at L={l}, a={a}");
                prev = b;
            }
            // continuity across the integer boundary
            assert!((erlang_b(1.0 - 1e-9, a) - erlang_b(1.0, a)).abs() < 1e-6);
        }
        // increasing in a at fixed L
        for l in [0.5, 1.0, 7.0] {
            let mut prev = 0.0;
            for i in 1..=30 {
                let a = i as f64 * 0.5;
                let b = erlang_b(l, a);
                assert!(b >= prev - 1e-12);
                prev = b;
            }
        }
        // fractional base agrees with the direct continued integral
        for a in [1.0, 5.0] {
            for f in [0.25, 0.5, 0.75] {
                assert!((erlang_b(f, a) - erlang_b_integral(f, a)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn diffusion_spot_values() {
        let b = diffusion_blocking(100.0, 100.0, 1.0).unwrap();
        let expect = 0.1 * crate::numeric::norm_pdf(0.0) / 0.5;
        assert!((b - expect).abs() < 1e-12);
        assert!(diffusion_blocking(400.0, 100.0, 1.0).unwrap() < 1e-12);
        assert!(diffusion_blocking(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn hayward_identity() {
        for (l, a, z) in [(10.0, 8.0, 2.0), (50.0, 60.0, 0.5), (5.0, 5.0, 4.0)] {
            let lhs = diffusion_blocking(l, a, z).unwrap();
            let rhs = diffusion_blocking(l / z, a / z, 1.0).unwrap();
            assert!((lhs - rhs).abs() < 1e-12, "Hayward identity failed at {l}, {a}, {z}");
        }
    }

    #[test]
    fn diffusion_close_to_erlang_in_hayward_regime() {
        let mut prev = f64::INFINITY;
        for l in [50.0, 100.0, 200.0] {
            let b_exact = erlang_b(l, l);
            let b_diff = diffusion_blocking(l, l, 1.0).unwrap();
            let rel = (b_diff - b_exact).abs() / b_exact;
            assert!(rel <= 0.08, "L={l}: relative error {rel}");
            assert!(rel < prev, "error should shrink with L");
            prev = rel;
        }
    }

    #[test]
    fn peakedness_examples() {
        // c2 = 1: always 1
        let z = peakedness_from_survival(|x: f64| (-x).exp(), 1.0, 1.0, &[]).unwrap();
        assert_eq!(z, 1.0);
        // c2 = 0, exponential caching time: integral of survival^2 = s/2
        let z = peakedness_from_survival(|x: f64| (-x).exp(), 1.0, 0.0, &[]).unwrap();
        assert!((z - 0.5).abs() < 1e-6);
        // c2 = 2, deterministic caching time t: integral = t = s
        let t = 0.7;
        let z =
            peakedness_from_survival(|x: f64| if x < t { 1.0 } else { 0.0 }, t, 2.0, &[t]).unwrap();
        assert!((z - 2.0).abs() < 1e-6);
        // inconsistent (G, s) pair is rejected
        assert!(peakedness_from_survival(|x: f64| (-x).exp(), 2.0, 0.0, &[]).is_err());
    }

    #[test]
    fn peakedness_of_policy_law_stays_in_range() {
        let model = FlowModel::new(presets::flow("pi2").unwrap()).unwrap();
        let alloc = model.allocate(0.7).unwrap();
        let stats = model.policy_stats(&alloc.policies).unwrap();
        for c2 in [0.0, 0.5, 2.0, 4.0] {
            let z = peakedness(&stats.law, c2).unwrap();
            assert!(
                z >= c2.min(1.0) - 1e-9 && z <= c2.max(1.0) + 1e-9,
                "c2={c2}: z={z} outside range"
            );
        }
        assert_eq!(peakedness(&stats.law, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn upper_bound_examples() {
        assert!((blocking_upper_bound(10.0, 10.0, 2.0) - erlang_b(5.0, 5.0)).abs() < 1e-14);
        assert_eq!(blocking_upper_bound(7.0, 3.0, 1.0), erlang_b(7.0, 3.0));
        assert_eq!(blocking_upper_bound(7.0, 3.0, 0.5), erlang_b(7.0, 3.0));
    }

    #[test]
    fn heavy_traffic_examples() {
        assert!((heavy_traffic_blocking(1.0, 10.0).unwrap() - 0.9).abs() < 1e-15);
        assert!((heavy_traffic_blocking(1.0, 2.0).unwrap() - 0.5).abs() < 1e-15);
        // documented gap against exact Erlang-B at moderate load
        assert!((erlang_b(1.0, 2.0) - 2.0 / 3.0).abs() < 1e-14);
        assert!(heavy_traffic_blocking(2.0, 2.0).is_err());
        // vanishes as the load approaches capacity
        assert!(heavy_traffic_blocking(10.0, 10.0 + 1e-9).unwrap() < 1e-9);
    }

    #[test]
    fn derivative_identity_in_s() {
        // d/ds B(uL, u lambda s) = u lambda B (uL/(u lambda s) - 1 + B)
        let (l, lambda, c2) = (10.0f64, 10.0f64, 2.0f64);
        let u = 1.0 / c2.max(1.0);
        for s in [0.3, 0.6, 1.0, 1.5] {
            let b = |s: f64| erlang_b(u * l, u * lambda * s);
            let h = 1e-5;
            let fd = (b(s + h) - b(s - h)) / (2.0 * h);
            let bb = b(s);
            let analytic = u * lambda * bb * (u * l / (u * lambda * s) - 1.0 + bb);
            assert!(
                (fd - analytic).abs() <= 1e-6 * (1.0 + analytic.abs()),
                "s={s}: finite diff {fd} vs analytic {analytic}"
            );
        }
    }
}
