//! Finite-buffer hit-ratio optimization.
//!
//! With `L` buffer slots the achievable hit ratio at mean caching time `s`
//! is `r(L, s) = r̆(s)·[1 − B(uL, uλs)]`, the overall rate-cost frontier
//! discounted by blocking, with `u = 1/max(c², 1)`. This module maximizes
//! that objective over `s` (it is quasi-concave for `L ≤ 1000`), exposes the
//! stationarity residual and the demand-limited / buffer-limited regime
//! thresholds, and verifies the quasi-concavity discriminant in exact
//! rational arithmetic.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::cell::Cell;

use crate::allocator::OverallCurve;
use crate::blocking::blocking_upper_bound;
use crate::numeric::{bisect_nondecreasing, golden_max};
use crate::{Error, Result};

/// Operating regime of the optimal point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// Large buffer: hit ratio near its demand-probability ceiling `1 − q`.
    DemandLimited,
    /// Small buffer: `s* ≈ L/λ`, throughput set by the buffer alone.
    BufferLimited,
    /// Interior stationary point between the two regimes.
    Interior,
    /// The search hit the top of the frontier, `s* = s_sup`.
    SupSaturated,
}

/// Result of the finite-buffer maximization.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FiniteOptResult {
    /// Optimal mean caching time (always finite).
    pub s_star: f64,
    /// Hit ratio at the optimum, blocking included.
    pub r_star: f64,
    /// Effective throughput `λ·B·r*` in bits per second.
    pub throughput: f64,
    pub regime: Regime,
    /// Stationarity residual at `s*` (meaningful for interior optima).
    pub residual: f64,
    /// Objective evaluations spent.
    pub iterations: u32,
    /// False above the exactly-verified quasi-concavity range (`L > 1000`),
    /// where a grid scan replaces pure golden-section search.
    pub quasi_concavity_verified: bool,
}

/// `r(L, s) = r̆(s)·[1 − B(uL, uλs)]`.
pub fn finite_hit_ratio(curve: &OverallCurve, lambda: f64, c2: f64, l: f64, s: f64) -> Result<f64> {
    if !(s >= 0.0) || s > curve.s_sup * (1.0 + 1e-12) {
        return Err(Error::Domain(format!(
            "mean caching time {s} outside [0, {}]",
            curve.s_sup
        )));
    }
    Ok(objective(curve, lambda, c2, l, s))
}

fn objective(curve: &OverallCurve, lambda: f64, c2: f64, l: f64, s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    curve.r_breve(s) * (1.0 - blocking_upper_bound(l, lambda * s, c2))
}

/// `r̆'(s)` by central finite differences on the overall curve, clamped
/// nonnegative (the frontier is nondecreasing).
fn r_breve_derivative(curve: &OverallCurve, s: f64) -> f64 {
    let h = 1e-6 * (1.0 + s.abs());
    let lo = (s - h).max(0.0);
    let d = (curve.r_breve(s + h) - curve.r_breve(lo)) / (s + h - lo);
    d.max(0.0)
}

/// Left-hand side of the stationarity equation,
/// `r̆'(s) − [L/(s(1−B)) − uλ]·B·r̆(s)`; a sign change brackets interior
/// optima.
pub fn stationarity_residual(curve: &OverallCurve, lambda: f64, c2: f64, l: f64, s: f64) -> f64 {
    let u = 1.0 / c2.max(1.0);
    let b = blocking_upper_bound(l, lambda * s, c2);
    r_breve_derivative(curve, s) - (l / (s * (1.0 - b)) - u * lambda) * b * curve.r_breve(s)
}

/// Maximizes `r(L, s)` over `s ∈ (0, s_sup]`; returns the leftmost
/// maximizer (the frontier can be exactly flat past the optimum, in which
/// case any longer caching time buys nothing).
pub fn optimize(
    curve: &OverallCurve,
    lambda: f64,
    c2: f64,
    file_size_bits: f64,
    l: f64,
) -> Result<FiniteOptResult> {
    if !(l >= 1.0) {
        return Err(Error::BadConfig(format!("buffer size must be at least 1 slot, got {l}")));
    }
    if !(lambda > 0.0) {
        return Err(Error::BadConfig(format!("arrival rate must be positive, got {lambda}")));
    }
    let evals = Cell::new(0u32);
    let f = |s: f64| {
        evals.set(evals.get() + 1);
        objective(curve, lambda, c2, l, s)
    };

    // Search domain: the frontier top, or a geometric expansion until the
    // objective has decreased over two consecutive doublings (the optimum
    // is always finite even when s_sup is not).
    let hi = if curve.s_sup.is_finite() {
        curve.s_sup
    } else {
        let mut hi = (l / lambda).max(1.0);
        let mut prev = f(hi);
        let mut decreases = 0;
        for _ in 0..60 {
            hi *= 2.0;
            let cur = f(hi);
            decreases = if cur < prev { decreases + 1 } else { 0 };
            prev = cur;
            if decreases >= 2 {
                break;
            }
        }
        hi
    };

    let quasi_concavity_verified = l <= 1000.0;
    let (mut s_best, mut f_best) = if quasi_concavity_verified {
        golden_max(&f, 0.0, hi, 1e-8 * hi, 200)
    } else {
        // Beyond the verified range: dense scan, then local refinement.
        let n = 4096;
        let mut best = (hi, f(hi));
        for i in 1..n {
            let s = hi * i as f64 / n as f64;
            let v = f(s);
            if v > best.1 {
                best = (s, v);
            }
        }
        let cell = hi / n as f64;
        golden_max(&f, (best.0 - cell).max(0.0), best.0 + cell, 1e-8 * hi, 200)
    };

    // Pull a plateau optimum to its left edge: on the rising side the
    // objective is nondecreasing, so bisection on f itself applies.
    let plateau_target = f_best * (1.0 - 1e-9) - 1e-12;
    if f(0.0) < plateau_target {
        let s_left = bisect_nondecreasing(&f, plateau_target, 0.0, s_best);
        if s_left < s_best {
            s_best = s_left;
            f_best = f(s_best);
        }
    }
    if curve.s_sup.is_finite() && s_best >= curve.s_sup - 1e-6 * hi {
        s_best = curve.s_sup;
        f_best = f(s_best);
    }

    let residual = if s_best > 0.0 && s_best < curve.s_sup {
        stationarity_residual(curve, lambda, c2, l, s_best)
    } else {
        0.0
    };
    let regime = if curve.s_sup.is_finite() && s_best >= curve.s_sup {
        Regime::SupSaturated
    } else if f_best >= 0.98 * curve.r_sup {
        Regime::DemandLimited
    } else if s_best <= 2.0 * l / lambda {
        Regime::BufferLimited
    } else {
        Regime::Interior
    };
    Ok(FiniteOptResult {
        s_star: s_best,
        r_star: f_best,
        throughput: lambda * file_size_bits * f_best,
        regime,
        residual,
        iterations: evals.get(),
        quasi_concavity_verified,
    })
}

/// Regime boundaries of the finite-buffer optimum.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RegimeThresholds {
    /// Arrival rates at or below this always saturate the frontier.
    pub lambda_threshold: f64,
    /// Buffer sizes at or above this saturate the frontier at rate `λ`.
    pub l_threshold: f64,
    /// True when `s_sup = ∞` and the thresholds refer to the truncated
    /// numeric domain instead.
    pub truncated: bool,
}

/// `λ_threshold = r̆'(s_sup)` and the large-buffer bound
/// `L_threshold = min{λ²s_sup/r̆'(s_sup) + 1/u,
///                    max{(1/2u)·ln(λe²/(u·s_sup)) − (1/u)·ln r̆'(s_sup),
///                        λ·s_sup·e²}}`.
pub fn regime_thresholds(curve: &OverallCurve, lambda: f64, c2: f64) -> RegimeThresholds {
    let truncated = !curve.s_sup.is_finite();
    let s_sup = if truncated { curve.s_max() } else { curve.s_sup };
    let rp = curve.derivative_at_sup();
    let u = 1.0 / c2.max(1.0);
    let e2 = std::f64::consts::E * std::f64::consts::E;
    let branch_a = lambda * lambda * s_sup / rp + 1.0 / u;
    let branch_b = (0.5 / u) * (lambda * e2 / (u * s_sup)).ln() - rp.ln() / u;
    let l_threshold = branch_a.min(branch_b.max(lambda * s_sup * e2));
    RegimeThresholds { lambda_threshold: rp, l_threshold, truncated }
}

/// Closed-form predictions for the two extreme regimes.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Asymptotics {
    /// Large buffer: `r ≈ 1 − q`.
    pub large_buffer_hit_ratio: f64,
    /// Large buffer: `R ≈ λB(1 − q)` bits/s.
    pub large_buffer_throughput: f64,
    /// Small buffer: `s* ≈ L/λ`.
    pub small_buffer_s: f64,
    /// Small buffer: `r ≈ (L/λ)·r̆'(0)`.
    pub small_buffer_hit_ratio: f64,
    /// Small buffer: `R ≈ L·B·r̆'(0)` bits/s, independent of `λ`.
    pub small_buffer_throughput: f64,
}

/// Regime predictions from the endpoint derivatives of the overall curve.
pub fn asymptotic_performance(
    curve: &OverallCurve,
    lambda: f64,
    file_size_bits: f64,
    l: f64,
) -> Asymptotics {
    let d0 = curve.derivative_at_zero();
    Asymptotics {
        large_buffer_hit_ratio: curve.r_sup,
        large_buffer_throughput: lambda * file_size_bits * curve.r_sup,
        small_buffer_s: l / lambda,
        small_buffer_hit_ratio: (l / lambda) * d0,
        small_buffer_throughput: l * file_size_bits * d0,
    }
}

fn factorial(n: u32) -> BigInt {
    let mut acc = BigInt::from(1u32);
    for k in 2..=n {
        acc *= k;
    }
    acc
}

fn check_qc_args(big_l: u32, l: u32) -> Result<()> {
    if big_l < 6 {
        return Err(Error::Domain(format!("discriminant defined for L >= 6, got {big_l}")));
    }
    if l < 1 || l > big_l - 5 {
        return Err(Error::Domain(format!(
            "discriminant index must satisfy 1 <= l <= L-5 = {}, got {l}",
            big_l - 5
        )));
    }
    Ok(())
}

/// Integer with the sign of `Δ_L(l)`: the discriminant scaled by `(L+l)!`.
///
/// With `n = L + l`, `1/[(L−i)!(l+i)!] = C(n, l+i)/n!` and
/// `1/[(L−1)!·l!] = n·C(n−1, l)/n!`, so
/// `n!·Δ_L(l) = Σᵢ [i(i+1)−2L]·C(n, l+i) + 2n(L−l−1)·C(n−1, l)`,
/// all in exact integer arithmetic.
fn qc_scaled_sum(big_l: u32, l: u32) -> BigInt {
    let n = big_l + l;
    let m = big_l - l - 1;
    // c = C(n, l+1), then advance C(n, k+1) = C(n, k)·(n−k)/(k+1).
    let mut c = BigInt::from(1u32);
    for j in 0..=l {
        c = c * (n - j) / (j + 1);
    }
    let mut sum = BigInt::zero();
    for i in 1..=m {
        let coeff = i as i64 * (i as i64 + 1) - 2 * big_l as i64;
        sum += coeff * &c;
        let k = l + i;
        c = c * (n - k) / (k + 1);
    }
    // 2n(L−l−1)·C(n−1, l)
    let mut tail = BigInt::from(1u32);
    for j in 0..l {
        tail = tail * (n - 1 - j) / (j + 1);
    }
    sum + 2u64 as i64 * (n as i64) * (big_l as i64 - l as i64 - 1) * tail
}

/// The quasi-concavity discriminant
/// `Δ_L(l) = Σ_{i=1}^{L−l−1} [i(i+1)−2L]/[(L−i)!(l+i)!] + 2(L−l−1)/[(L−1)!·l!]`
/// in exact rational arithmetic.
pub fn qc_discriminant(big_l: u32, l: u32) -> Result<BigRational> {
    check_qc_args(big_l, l)?;
    Ok(BigRational::new(qc_scaled_sum(big_l, l), factorial(big_l + l)))
}

/// Coefficients `a_0 .. a_{2L−1}` of the quasi-concavity polynomial
/// `d_L(s)`, by the explicit case formula (an independent route from
/// [`qc_discriminant`]; the identity `a_{L+l} = Δ_L(l)` is a cross-check).
/// Indices above `2L−4` carry no mass and are zero.
pub fn qc_coefficients(big_l: u32) -> Result<Vec<BigRational>> {
    if big_l < 6 {
        return Err(Error::Domain(format!("coefficient formula applies for L >= 6, got {big_l}")));
    }
    let lb = big_l as i64;
    let mut out = Vec::with_capacity(2 * big_l as usize);
    let rat = |num: BigInt, den: BigInt| BigRational::new(num, den);
    for n in 0..2 * big_l {
        let ni = n as i64;
        let a = if n == 0 {
            rat(BigInt::from(lb * lb - lb), BigInt::from(1))
        } else if n == 1 {
            rat(BigInt::from(2 * lb * lb - 4 * lb), BigInt::from(1))
        } else if n <= big_l - 1 {
            // 2^n·[(n²+n)/4 + L² − (n+1)L]/n!
            let num = BigInt::from(ni * ni + ni + 4 * (lb * lb - (ni + 1) * lb))
                * BigInt::from(2u32).pow(n);
            rat(num, BigInt::from(4) * factorial(n))
        } else if n == big_l {
            let num = BigInt::from(2u32).pow(big_l - 2) * (lb - 3) + (lb - 1);
            rat(num, factorial(big_l - 1))
        } else if n <= 2 * big_l - 5 {
            // Σ_{i=n−L+1}^{L−1} [(n−L−i)(n−L−i−1)−2L]/[i!(n−i)!]
            //   + (4L−2n−2)/[(L−1)!(n−L)!]
            let mut acc = BigRational::zero();
            for i in (n - big_l + 1)..=(big_l - 1) {
                let d = ni - lb - i as i64;
                let coeff = d * (d - 1) - 2 * lb;
                acc += rat(BigInt::from(coeff), factorial(i) * factorial(n - i));
            }
            acc + rat(
                BigInt::from(4 * lb - 2 * ni - 2),
                factorial(big_l - 1) * factorial(n - big_l),
            )
        } else if n == 2 * big_l - 4 {
            rat(BigInt::from(2), factorial(big_l - 1) * factorial(big_l - 2))
        } else {
            BigRational::zero()
        };
        out.push(a);
    }
    Ok(out)
}

/// Outcome of the exhaustive discriminant sweep.
#[derive(Debug, Clone)]
pub struct QcVerifyReport {
    /// Number of `(L, l)` pairs checked.
    pub checked: u64,
    /// Smallest `(L, l)` with `Δ_L(l) < 0`, if any.
    pub witness: Option<(u32, u32)>,
}

/// Checks `Δ_L(l) ≥ 0` for all `6 ≤ L ≤ max_big_l`, `1 ≤ l ≤ L−5`,
/// in exact integer arithmetic (only the sign is needed).
pub fn qc_verify(max_big_l: u32) -> Result<QcVerifyReport> {
    if max_big_l < 6 {
        return Err(Error::BadConfig(format!("sweep needs max L >= 6, got {max_big_l}")));
    }
    let results: Vec<(u64, Option<(u32, u32)>)> = (6..=max_big_l)
        .into_par_iter()
        .map(|big_l| {
            let mut first_neg = None;
            let mut count = 0u64;
            for l in 1..=big_l - 5 {
                count += 1;
                if qc_scaled_sum(big_l, l).is_negative() {
                    first_neg = Some((big_l, l));
                    break;
                }
            }
            (count, first_neg)
        })
        .collect();
    let checked = results.iter().map(|(c, _)| c).sum();
    let witness = results.iter().filter_map(|(_, w)| *w).min();
    Ok(QcVerifyReport { checked, witness })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::allocator::FlowModel;
    use crate::presets;
    use num_traits::One;

    fn pi2_curve() -> OverallCurve {
        FlowModel::new(presets::flow("pi2").unwrap()).unwrap().overall_curve()
    }

    #[test]
    fn finite_hit_ratio_limits() {
        let curve = pi2_curve();
        assert_eq!(finite_hit_ratio(&curve, 10.0, 1.0, 5.0, 0.0).unwrap(), 0.0);
        // huge buffer: blocking vanishes, the frontier is recovered
        let r = finite_hit_ratio(&curve, 10.0, 1.0, 1e4, 0.5).unwrap();
        assert!((r - curve.r_breve(0.5)).abs() < 1e-12);
        assert!(finite_hit_ratio(&curve, 10.0, 1.0, 5.0, 2.0).is_err());
    }

    #[test]
    fn finite_hit_ratio_heavy_traffic_consistency() {
        // L=1, s=0.3: exactly r̆(0.3)(1 − B(1,3)) = 0.4·0.25 = 0.1,
        // within a third of the coarse heavy-traffic surrogate (L/λs)·r̆.
        let curve = pi2_curve();
        let r = finite_hit_ratio(&curve, 10.0, 1.0, 1.0, 0.3).unwrap();
        assert!((r - 0.1).abs() < 1e-9, "r = {r}");
        let surrogate = (1.0 / 3.0) * curve.r_breve(0.3);
        assert!((r - surrogate).abs() / surrogate < 0.35);
    }

    #[test]
    fn large_buffer_saturates_the_frontier() {
        let curve = pi2_curve();
        let res = optimize(&curve, 10.0, 1.0, 1000.0, 100.0).unwrap();
        assert!((res.s_star - 1.1).abs() < 1e-3, "s* = {}", res.s_star);
        assert!(res.r_star > 0.98, "r* = {}", res.r_star);
        assert_eq!(res.regime, Regime::SupSaturated);
    }

    #[test]
    fn small_buffer_stops_at_the_plateau_edge() {
        // L=1, λ=10: the objective is exactly flat on s ∈ [0.1, 0.7];
        // the leftmost maximizer is s* = 0.1 = L/λ.
        let curve = pi2_curve();
        let res = optimize(&curve, 10.0, 1.0, 1000.0, 1.0).unwrap();
        assert!((res.s_star - 0.1).abs() < 1e-4, "s* = {}", res.s_star);
        assert!((res.r_star - 0.1).abs() < 1e-6);
        assert_eq!(res.regime, Regime::BufferLimited);
        // small-buffer consistency: |s* − L/λ|/(L/λ) well within 15%
        assert!((res.s_star - 0.1).abs() / 0.1 < 0.15);
    }

    #[test]
    fn low_rate_saturates_for_any_buffer() {
        // λ at or below r̆'(s_sup) = 0.5 always pushes s* to s_sup.
        let curve = pi2_curve();
        for l in [1.0, 5.0, 50.0] {
            let res = optimize(&curve, 0.4, 1.0, 1000.0, l).unwrap();
            assert_eq!(res.regime, Regime::SupSaturated, "L = {l}");
        }
        let th = regime_thresholds(&curve, 0.4, 1.0);
        assert!((th.lambda_threshold - 0.5).abs() < 1e-3);
    }

    #[test]
    fn buffer_threshold_saturates() {
        let curve = pi2_curve();
        let th = regime_thresholds(&curve, 10.0, 1.0);
        assert!(!th.truncated);
        let l = th.l_threshold.ceil();
        let res = optimize(&curve, 10.0, 1.0, 1000.0, l).unwrap();
        assert_eq!(res.regime, Regime::SupSaturated, "L_th = {l}");
    }

    #[test]
    fn threshold_formula_spot_value() {
        // u=1, s_sup=1, λ=1, r̆'(s_sup)=1 → min{2, max{1, e²}} = 2
        let curve = OverallCurve {
            vertices: vec![(0.0, 0.0), (1.0, 1.0)],
            r_sup: 1.0,
            s_sup: 1.0,
        };
        let th = regime_thresholds(&curve, 1.0, 1.0);
        assert!((th.lambda_threshold - 1.0).abs() < 1e-12);
        assert!((th.l_threshold - 2.0).abs() < 1e-9, "L_th = {}", th.l_threshold);
    }

    #[test]
    fn stationarity_signs() {
        let curve = pi2_curve();
        // near zero the frontier slope dominates
        assert!(stationarity_residual(&curve, 10.0, 1.0, 5.0, 1e-3) > 0.0);
        // near the top with a tiny buffer, blocking dominates
        assert!(stationarity_residual(&curve, 10.0, 1.0, 1.0, 1.05) < 0.0);
    }

    #[test]
    fn asymptotics_spot_values() {
        let curve = pi2_curve();
        let a = asymptotic_performance(&curve, 10.0, 1000.0, 1.0);
        assert!((a.small_buffer_throughput - 2000.0).abs() < 2.0);
        assert!((a.small_buffer_s - 0.1).abs() < 1e-12);
        assert!((a.large_buffer_hit_ratio - 1.0).abs() < 1e-9);
        assert!((a.large_buffer_throughput - 10000.0).abs() < 1e-6);
        let pi1 = FlowModel::new(presets::flow("pi1").unwrap()).unwrap().overall_curve();
        let a1 = asymptotic_performance(&pi1, 10.0, 1000.0, 1.0);
        assert!((a1.large_buffer_hit_ratio - 0.9).abs() < 1e-9);
    }

    #[test]
    fn unbounded_frontier_still_yields_finite_optimum() {
        // π₁ has s_sup = ∞ (the Pareto tail); the optimum must be finite.
        let curve = FlowModel::new(presets::flow("pi1").unwrap()).unwrap().overall_curve();
        assert!(curve.s_sup.is_infinite());
        let res = optimize(&curve, 10.0, 1.0, 1000.0, 10.0).unwrap();
        assert!(res.s_star.is_finite() && res.s_star > 0.0);
        assert!(res.r_star > 0.0 && res.r_star < 0.9);
    }

    #[test]
    fn objective_is_unimodal_on_grids() {
        for name in ["pi1", "pi2", "pi3"] {
            let curve = FlowModel::new(presets::flow(name).unwrap()).unwrap().overall_curve();
            let hi = if curve.s_sup.is_finite() { curve.s_sup } else { curve.s_max() };
            for l in [1.0, 5.0, 10.0, 30.0, 100.0] {
                let vals: Vec<f64> = (0..=512)
                    .map(|i| objective(&curve, 10.0, 1.0, l, hi * i as f64 / 512.0))
                    .collect();
                let mut falls = 0;
                let mut rising = true;
                for w in vals.windows(2) {
                    let d = w[1] - w[0];
                    if d > 1e-12 {
                        assert!(rising, "{name}, L={l}: rise after a fall");
                    } else if d < -1e-12 {
                        if rising {
                            falls += 1;
                        }
                        rising = false;
                    }
                }
                assert!(falls <= 1, "{name}, L={l}: {falls} slope sign changes");
            }
        }
    }

    #[test]
    fn discriminant_spot_values() {
        let d = qc_discriminant(6, 1).unwrap();
        assert_eq!(d, BigRational::new(BigInt::from(1), BigInt::from(60)));
        assert!(qc_discriminant(6, 2).is_err());
        assert!(qc_discriminant(5, 1).is_err());
    }

    #[test]
    fn coefficients_spot_values_and_identity() {
        let a = qc_coefficients(6).unwrap();
        assert_eq!(a.len(), 12);
        assert_eq!(a[0], BigRational::from(BigInt::from(30)));
        assert_eq!(a[1], BigRational::from(BigInt::from(48)));
        // a_{2L−4} = 2/((L−1)!(L−2)!) = 1/1440 for L=6
        assert_eq!(a[8], BigRational::new(BigInt::from(1), BigInt::from(1440)));
        // a_{L+1} equals the discriminant by an independent summation
        assert_eq!(a[7], qc_discriminant(6, 1).unwrap());
        assert!(a[9].is_zero() && a[11].is_zero());
        for big_l in [6u32, 10, 20, 50] {
            let a = qc_coefficients(big_l).unwrap();
            for (n, coeff) in a.iter().enumerate().take(big_l as usize + 1) {
                assert!(!coeff.is_negative(), "L={big_l}: a_{n} negative");
            }
            for l in 1..=big_l - 5 {
                assert_eq!(
                    a[(big_l + l) as usize],
                    qc_discriminant(big_l, l).unwrap(),
                    "identity fails at L={big_l}, l={l}"
                );
            }
        }
    }

    #[test]
    fn discriminant_sweep_small_range() {
        let report = qc_verify(60).unwrap();
        assert_eq!(report.witness, None);
        // Σ_{L=6}^{60} (L−5) pairs
        assert_eq!(report.checked, (1..=55).sum::<u64>());
        // sanity: the scaled sum has the same sign as the rational value
        let one_sixtieth = BigRational::new(BigInt::from(1), BigInt::from(60));
        assert_eq!(qc_discriminant(6, 1).unwrap(), one_sixtieth);
        assert!(BigRational::one() > one_sixtieth);
    }
}
