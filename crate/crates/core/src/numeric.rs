//! Shared numeric helpers: adaptive quadrature, monotone bisection,
//! golden-section search, normal-distribution ratios, and a monotone-chain
//! lower convex hull.

/// Adaptive Simpson quadrature on a finite interval.
///
/// `tol` is an absolute tolerance on the whole interval; subintervals get a
/// proportional share. Recursion is capped, so pathological integrands
/// degrade to a coarse estimate instead of overflowing the stack.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let c = 0.5 * (a + b);
    let (fa, fb, fc) = (f(a), f(b), f(c));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fc + fb);
    simpson_rec(f, a, b, fa, fb, fc, whole, tol, 50)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fb: f64,
    fc: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let c = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + c), 0.5 * (c + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (c - a) / 6.0 * (fa + 4.0 * flm + fc);
    let right = (b - c) / 6.0 * (fc + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_rec(f, a, c, fa, fc, flm, left, 0.5 * tol, depth - 1)
            + simpson_rec(f, c, b, fc, fb, frm, right, 0.5 * tol, depth - 1)
    }
}

/// Quadrature over `[a, b]` split at the given breakpoints (kinks, atoms).
pub fn integrate_with_breakpoints<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    tol: f64,
) -> f64 {
    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|x| x.is_finite() && *x > a && *x < b)
        .collect();
    cuts.sort_by(|p, q| p.partial_cmp(q).unwrap());
    cuts.dedup();
    let mut total = 0.0;
    let mut lo = a;
    let n = cuts.len() + 1;
    for &cut in cuts.iter().chain(std::iter::once(&b)) {
        total += adaptive_simpson(f, lo, cut, tol / n as f64);
        lo = cut;
    }
    total
}

/// Integrates a nonnegative decaying integrand on `[a, ∞)` by doubling
/// windows until a window's contribution drops below `tol`.
pub fn integrate_tail<F: Fn(f64) -> f64>(f: &F, a: f64, tol: f64) -> f64 {
    let mut lo = a;
    let mut width = 1.0_f64.max(a.abs());
    let mut total = 0.0;
    for _ in 0..64 {
        let piece = adaptive_simpson(f, lo, lo + width, tol);
        total += piece;
        if piece.abs() < tol {
            break;
        }
        lo += width;
        width *= 2.0;
    }
    total
}

/// Smallest `x` in `[lo, hi]` with `f(x) >= target`, for nondecreasing `f`.
///
/// Requires `f(hi) >= target`; the returned point satisfies the inequality
/// and its left neighbour (at bisection resolution) does not.
pub fn bisect_nondecreasing<F: Fn(f64) -> f64>(f: &F, target: f64, lo: f64, hi: f64) -> f64 {
    let (mut lo, mut hi) = (lo, hi);
    debug_assert!(f(hi) >= target);
    if f(lo) >= target {
        return lo;
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section maximization of a unimodal function on `[lo, hi]`.
/// Returns the abscissa and value of the best point seen.
pub fn golden_max<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, tol: f64, max_iter: u32) -> (f64, f64) {
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..max_iter {
        if (b - a).abs() <= tol {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x);
    if fc > fx && fc >= fd {
        (c, fc)
    } else if fd > fx {
        (d, fd)
    } else {
        (x, fx)
    }
}

/// Standard normal density.
pub fn norm_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Standard normal cumulative distribution, via the complementary error
/// function so the lower tail does not cancel.
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// The ratio φ(x)/Φ(x), stable deep in the lower tail where both terms
/// underflow (asymptotic Mills-ratio expansion for x << 0).
pub fn normal_hazard_lower(x: f64) -> f64 {
    if x < -8.0 {
        let inv2 = 1.0 / (x * x);
        -x / (1.0 - inv2 * (1.0 - 3.0 * inv2))
    } else {
        norm_pdf(x) / norm_cdf(x)
    }
}

/// Lower convex hull of points sorted by strictly increasing x
/// (Andrew's monotone chain, lower half only). Collinear interior points
/// are dropped so the vertex list is minimal.
pub fn lower_hull(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(points.len().min(64));
    for &p in points {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            // keep b only if (a, b, p) turns strictly left (convex from below)
            let cross = (b.0 - a.0) * (p.1 - a.1) - (p.0 - a.0) * (b.1 - a.1);
            if cross <= 1e-15 * (1.0 + p.1.abs()) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull
}

/// Piecewise-linear interpolation on a vertex list sorted by x.
/// Clamps outside the vertex range.
pub fn interp(vertices: &[(f64, f64)], x: f64) -> f64 {
    match vertices {
        [] => 0.0,
        [v] => v.1,
        _ => {
            if x <= vertices[0].0 {
                return vertices[0].1;
            }
            if x >= vertices[vertices.len() - 1].0 {
                return vertices[vertices.len() - 1].1;
            }
            let i = vertices.partition_point(|v| v.0 <= x);
            let (a, b) = (vertices[i - 1], vertices[i]);
            if b.0 == a.0 {
                a.1
            } else {
                a.1 + (b.1 - a.1) * (x - a.0) / (b.0 - a.0)
            }
        }
    }
}

/// Mean, batch-means standard error pair.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

impl Estimate {
    /// Batch-means estimate from per-batch averages.
    pub fn from_batches(batch_means: &[f64]) -> Self {
        let n = batch_means.len();
        if n == 0 {
            return Self { value: f64::NAN, stderr: f64::NAN };
        }
        let mean = batch_means.iter().sum::<f64>() / n as f64;
        if n < 2 {
            return Self { value: mean, stderr: f64::NAN };
        }
        let var = batch_means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
        Self { value: mean, stderr: (var / n as f64).sqrt() }
    }

    /// |value - other| measured in combined standard errors.
    pub fn sigma_distance(&self, other: f64) -> f64 {
        (self.value - other).abs() / self.stderr.max(f64::MIN_POSITIVE)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_integrates_polynomials_exactly() {
        let f = |x: f64| 3.0 * x * x;
        assert!((adaptive_simpson(&f, 0.0, 2.0, 1e-12) - 8.0).abs() < 1e-12);
    }

    #[test]
    fn tail_integration_of_exponential() {
        let f = |x: f64| (-x).exp();
        assert!((integrate_tail(&f, 0.0, 1e-12) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn bisect_finds_leftmost_crossing() {
        // step function: 0 for x < 1, 1 for x >= 1
        let f = |x: f64| if x >= 1.0 { 1.0 } else { 0.0 };
        let x = bisect_nondecreasing(&f, 0.5, 0.0, 2.0);
        assert!((x - 1.0).abs() < 1e-12);
    }

    #[test]
    fn golden_finds_parabola_max() {
        let f = |x: f64| -(x - 0.3) * (x - 0.3);
        let (x, _) = golden_max(&f, 0.0, 1.0, 1e-10, 200);
        assert!((x - 0.3).abs() < 1e-7);
    }

    #[test]
    fn hull_drops_interior_points() {
        let pts = [(0.0, 0.0), (0.5, 0.6), (1.0, 1.0), (2.0, 4.0)];
        let hull = lower_hull(&pts);
        assert_eq!(hull, vec![(0.0, 0.0), (1.0, 1.0), (2.0, 4.0)]);
    }

    #[test]
    fn normal_hazard_matches_direct_ratio() {
        for &x in &[-7.9, -3.0, 0.0, 2.0] {
            let direct = norm_pdf(x) / norm_cdf(x);
            assert!((normal_hazard_lower(x) - direct).abs() / direct < 1e-9);
        }
        // deep tail: finite and ~ -x
        let h = normal_hazard_lower(-40.0);
        assert!(h.is_finite() && (h - 40.0).abs() < 0.1);
    }
}
