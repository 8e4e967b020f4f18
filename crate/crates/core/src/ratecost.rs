//! Per-class rate-cost analysis.
//!
//! A static policy caches every item of a class for at most `t` seconds. Its
//! hit ratio is the demanded mass arriving within `t`, and its storage cost
//! is the mean caching time `E{W}`. Sweeping `t` traces the rate-cost curve
//! `s(r)`; randomizing between static policies achieves the lower convex
//! envelope `s̆(r)`, which is the optimal frontier. This module computes the
//! curve, its closed forms for the base families, curvature, the envelope,
//! and extracts the (possibly randomized) policy attaining a target hit
//! ratio.

use crate::numeric::interp;
use crate::rdi::{BaseFamily, RdiSpec};
use crate::{Error, Result};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// How long one admitted item may stay in the buffer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CacheDuration {
    /// Do not cache at all.
    Skip,
    /// Evict after this many seconds unless requested earlier.
    Until { t: f64 },
    /// Cache until requested (no deadline).
    Forever,
}

impl CacheDuration {
    fn from_time(t: f64) -> Self {
        if t <= 0.0 {
            CacheDuration::Skip
        } else if t.is_infinite() {
            CacheDuration::Forever
        } else {
            CacheDuration::Until { t }
        }
    }

    /// The deadline as a float (`0` for skip, `+∞` for forever).
    pub fn as_time(&self) -> f64 {
        match *self {
            CacheDuration::Skip => 0.0,
            CacheDuration::Until { t } => t,
            CacheDuration::Forever => f64::INFINITY,
        }
    }
}

/// A per-class randomized caching policy: a finite mixture of maximum
/// caching times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CachePolicyRepr", into = "CachePolicyRepr")]
pub struct CachePolicy {
    atoms: Vec<(CacheDuration, f64)>,
}

#[derive(Serialize, Deserialize)]
struct CachePolicyRepr {
    atoms: Vec<(CacheDuration, f64)>,
}

impl TryFrom<CachePolicyRepr> for CachePolicy {
    type Error = Error;
    fn try_from(r: CachePolicyRepr) -> Result<Self> {
        CachePolicy::new(r.atoms)
    }
}

impl From<CachePolicy> for CachePolicyRepr {
    fn from(p: CachePolicy) -> Self {
        CachePolicyRepr { atoms: p.atoms }
    }
}

impl CachePolicy {
    pub fn new(atoms: Vec<(CacheDuration, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidSpec("policy needs at least one atom".into()));
        }
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        if atoms.iter().any(|a| a.1 < 0.0) || (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidSpec(format!(
                "policy weights must be nonnegative and sum to 1, got {total}"
            )));
        }
        let mut times: Vec<f64> = atoms.iter().map(|a| a.0.as_time()).collect();
        times.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if times.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidSpec("policy atoms must have distinct times".into()));
        }
        Ok(CachePolicy { atoms })
    }

    pub fn deterministic(duration: CacheDuration) -> Self {
        CachePolicy { atoms: vec![(duration, 1.0)] }
    }

    pub fn skip() -> Self {
        Self::deterministic(CacheDuration::Skip)
    }

    pub fn atoms(&self) -> &[(CacheDuration, f64)] {
        &self.atoms
    }

    /// Draws a maximum caching time.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> CacheDuration {
        let mut u: f64 = rng.gen();
        for &(d, w) in &self.atoms {
            if u < w {
                return d;
            }
            u -= w;
        }
        self.atoms[self.atoms.len() - 1].0
    }
}

/// Hit ratio of the static policy with deadline `t`: the demanded mass
/// arriving at or before `t`.
pub fn hit_ratio(spec: &RdiSpec, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t.is_infinite() {
        return 1.0 - spec.undemand_prob();
    }
    spec.demand_cdf(t)
}

/// Mean caching time of the static policy with deadline `t`:
/// `E{W} = ∫₀ᵗ x dP(x) + t (q + 1 − P(t))`.
///
/// For `t = ∞` (cache until requested) this is `ν + q·t_sup`, which is
/// infinite when never-requested items would occupy the buffer forever.
pub fn mean_caching_time(spec: &RdiSpec, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t.is_infinite() {
        let m = spec.moments();
        if m.undemand_prob > 0.0 {
            return m.mean_delay + m.undemand_prob * m.t_sup;
        }
        return m.mean_delay;
    }
    spec.partial_first_moment(t) + t * (1.0 - spec.cdf(t) + spec.undemand_prob())
}

/// Normalized rate-cost function `s(r)`: the mean caching time of the
/// cheapest static policy with hit ratio `r`.
pub fn rate_cost(spec: &RdiSpec, r: f64) -> Result<f64> {
    let q = spec.undemand_prob();
    let r_sup = 1.0 - q;
    if r > r_sup + 1e-12 {
        return Err(Error::Infeasible { requested: r, supremum: r_sup });
    }
    if r <= 0.0 {
        return Ok(0.0);
    }
    let t = spec.quantile((r + q).min(1.0))?;
    Ok(mean_caching_time(spec, t))
}

/// Closed-form `s(r)` for the base families (no transforms, no mixtures).
pub fn rate_cost_closed_form(family: &BaseFamily, r: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::Domain(format!("hit ratio {r} outside [0, 1]")));
    }
    match *family {
        BaseFamily::Exponential { rate } => Ok(r / rate),
        BaseFamily::Uniform { lo, hi } => {
            let d = hi - lo;
            Ok(-0.5 * d * r * r + d * r + lo)
        }
        BaseFamily::Triangular { lo, hi, mode } => {
            let rise = (hi - lo) * (mode - lo);
            let fall = (hi - lo) * (hi - mode);
            let split = (mode - lo) / (hi - lo);
            if r <= split {
                Ok(rise.sqrt() * (r.sqrt() - r.powf(1.5) / 3.0) + lo)
            } else {
                Ok((lo + hi + mode) / 3.0 - fall.sqrt() * (1.0 - r).powf(1.5) / 3.0)
            }
        }
        BaseFamily::Pareto { shape, scale } => {
            if (shape - 1.0).abs() < 1e-12 {
                Ok(scale * (1.0 / (1.0 - r)).ln() + scale)
            } else {
                let g = (1.0 - r).powf((shape - 1.0) / shape);
                Ok(scale / (1.0 - shape) * g - scale / (1.0 - shape) + scale)
            }
        }
        BaseFamily::Arcsine { width } => {
            let half_pi_r = std::f64::consts::FRAC_PI_2 * r;
            let sin2 = half_pi_r.sin() * half_pi_r.sin();
            Ok(width
                * ((1.0 - r) * sin2 + 0.5 * r
                    - (std::f64::consts::PI * r).sin() / (2.0 * std::f64::consts::PI)))
        }
        _ => Err(Error::Domain("no closed form for this family".into())),
    }
}

/// Second derivative `s''(r) = −[p²(t) + (1−r) p'(t)] / p³(t)` at
/// `t = P⁻¹(r + q)`.
pub fn curvature(spec: &RdiSpec, r: f64) -> Result<f64> {
    let q = spec.undemand_prob();
    let t = spec.quantile(r + q)?;
    let p = spec.pdf(t);
    if p <= 1e-300 {
        return Err(Error::Domain(format!("density vanishes at t = {t}; curvature singular")));
    }
    let dp = spec.pdf_derivative(t);
    Ok(-(p * p + (1.0 - r) * dp) / (p * p * p))
}

/// One sampled point of the rate-cost curve; `t` is the static deadline
/// attaining it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub r: f64,
    pub s: f64,
    pub t: f64,
}

/// Shape of the optimal frontier (Theorem-style trichotomy).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    /// Concave curve: envelope is the single chord from the origin, slope α.
    LinearAlpha,
    /// Convex curve: the curve is its own envelope.
    SelfConvex,
    /// Mixed curvature: numeric hull only.
    General,
}

/// Lower convex envelope of the rate-cost curve, as a minimal vertex list
/// starting at the origin. Each vertex carries the deadline attaining it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    vertices: Vec<CurvePoint>,
}

impl Envelope {
    fn from_points(points: &[CurvePoint]) -> Self {
        let mut all = Vec::with_capacity(points.len() + 1);
        all.push(CurvePoint { r: 0.0, s: 0.0, t: 0.0 });
        all.extend(points.iter().copied().filter(|p| p.r > 1e-15 && p.s.is_finite()));
        let mut hull: Vec<CurvePoint> = Vec::new();
        for p in all {
            while hull.len() >= 2 {
                let a = hull[hull.len() - 2];
                let b = hull[hull.len() - 1];
                let cross = (b.r - a.r) * (p.s - a.s) - (p.r - a.r) * (b.s - a.s);
                if cross <= 1e-14 * (1.0 + p.s.abs()) {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p);
        }
        Envelope { vertices: hull }
    }

    pub fn vertices(&self) -> &[CurvePoint] {
        &self.vertices
    }

    /// Largest hit ratio on the envelope.
    pub fn r_max(&self) -> f64 {
        self.vertices.last().map_or(0.0, |v| v.r)
    }

    /// Cost at the largest hit ratio.
    pub fn s_max(&self) -> f64 {
        self.vertices.last().map_or(0.0, |v| v.s)
    }

    /// Envelope value `s̆(r)` by linear interpolation.
    pub fn value(&self, r: f64) -> f64 {
        let pts: Vec<(f64, f64)> = self.vertices.iter().map(|v| (v.r, v.s)).collect();
        interp(&pts, r)
    }

    /// Segment slopes (marginal costs), nondecreasing.
    pub fn slopes(&self) -> Vec<f64> {
        self.vertices
            .windows(2)
            .map(|w| (w[1].s - w[0].s) / (w[1].r - w[0].r))
            .collect()
    }

    /// Marginal cost of the first unit of hit ratio.
    pub fn initial_marginal_cost(&self) -> f64 {
        self.slopes().first().copied().unwrap_or(f64::INFINITY)
    }

    /// Marginal cost at saturation (slope of the last segment).
    pub fn saturation_marginal_cost(&self) -> f64 {
        self.slopes().last().copied().unwrap_or(f64::INFINITY)
    }

    /// The set of hit ratios maximizing `β·r − s̆(r)`, as an interval.
    /// A `β` strictly between two segment slopes pins a vertex; a `β` equal
    /// to a slope leaves the whole segment optimal.
    pub fn rate_for_price(&self, beta: f64) -> (f64, f64) {
        let slopes = self.slopes();
        if slopes.is_empty() {
            return (0.0, 0.0);
        }
        let tol = |m: f64| 1e-12 * (1.0 + m.abs());
        // first segment whose slope exceeds beta
        let mut lo = 0.0;
        let mut hi = 0.0;
        let mut fixed = false;
        for (i, &m) in slopes.iter().enumerate() {
            if (m - beta).abs() <= tol(m) {
                // whole segment optimal
                if !fixed {
                    lo = self.vertices[i].r;
                    fixed = true;
                }
                hi = self.vertices[i + 1].r;
            } else if m < beta {
                lo = self.vertices[i + 1].r;
                hi = self.vertices[i + 1].r;
            } else {
                break;
            }
        }
        if !fixed && hi < lo {
            hi = lo;
        }
        (lo, hi.max(lo))
    }
}

/// The sampled rate-cost curve of one class, with its envelope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateCostCurve {
    pub points: Vec<CurvePoint>,
    /// Supremum of achievable hit ratios, `1 − q`.
    pub r_sup: f64,
    /// Cost supremum `ν + q·t_sup`; `+∞` for heavy tails or undemanded
    /// items with unbounded delay support.
    pub s_sup: f64,
    /// True when `s_sup = ∞` and the samples stop short of `r_sup`.
    pub truncated: bool,
    pub envelope: Envelope,
    pub classification: Classification,
}

impl RateCostCurve {
    /// Samples `s(r)` on a grid of at least `grid` points, refining until
    /// the envelope is stable to 1e−6, and classifies the result.
    pub fn compute(spec: &RdiSpec, grid: usize) -> Result<Self> {
        let m = spec.moments();
        let q = m.undemand_prob;
        let r_sup = 1.0 - q;
        let s_sup = if m.mean_delay.is_infinite() || (q > 0.0 && m.t_sup.is_infinite()) {
            f64::INFINITY
        } else if q > 0.0 {
            m.mean_delay + q * m.t_sup
        } else {
            m.mean_delay
        };
        let truncated = s_sup.is_infinite();
        let r_max = if truncated { r_sup - 1e-4 } else { r_sup };

        let mut n = grid.max(64);
        let mut curve = Self::sample_once(spec, n, q, r_max, s_sup)?;
        // refine until the envelope stops moving
        for _ in 0..2 {
            let prev = curve.clone();
            n *= 2;
            curve = Self::sample_once(spec, n, q, r_max, s_sup)?;
            let drift = (0..=256)
                .map(|i| {
                    let r = r_max * i as f64 / 256.0;
                    (curve.value(r) - prev.value(r)).abs()
                })
                .fold(0.0, f64::max);
            if drift < 1e-6 {
                break;
            }
        }
        let envelope = curve;

        let points = envelope_points(spec, n, q, r_max)?;
        let classification = classify(&points, &envelope, r_sup, s_sup, truncated);
        Ok(RateCostCurve { points, r_sup, s_sup, truncated, envelope, classification })
    }

    fn sample_once(spec: &RdiSpec, n: usize, q: f64, r_max: f64, s_sup: f64) -> Result<Envelope> {
        let mut points = envelope_points(spec, n, q, r_max)?;
        if s_sup.is_finite() {
            // make sure the exact endpoint is present
            if points.last().map_or(true, |p| p.r < 1.0 - q - 1e-12) {
                let t = spec.quantile(1.0)?;
                points.push(CurvePoint { r: 1.0 - q, s: s_sup, t });
            }
        }
        Ok(Envelope::from_points(&points))
    }

    /// Envelope value `s̆(r)`.
    pub fn value(&self, r: f64) -> f64 {
        self.envelope.value(r)
    }

    /// Chord slope of a one-segment envelope (`α`), if applicable.
    pub fn alpha(&self) -> Option<f64> {
        if self.classification == Classification::LinearAlpha {
            Some(self.envelope.saturation_marginal_cost())
        } else {
            None
        }
    }

    /// Extracts the cheapest policy with hit ratio exactly `r_target`.
    ///
    /// Where the envelope touches the curve the policy is a deterministic
    /// deadline; on a chord it is the two-point mixture of the bracketing
    /// vertices, with the origin vertex rendered as a skip atom.
    pub fn policy_for(&self, spec: &RdiSpec, r_target: f64) -> Result<CachePolicy> {
        let q = spec.undemand_prob();
        if r_target > self.r_sup + 1e-9 {
            return Err(Error::Infeasible { requested: r_target, supremum: self.r_sup });
        }
        if r_target <= 1e-15 {
            return Ok(CachePolicy::skip());
        }
        let r_target = r_target.min(self.r_sup);
        let verts = self.envelope.vertices();
        let last = verts.last().expect("envelope has at least the origin");
        if r_target >= last.r - 1e-12 {
            // at or beyond the last sampled vertex: deterministic saturation
            let t = if r_target >= self.r_sup - 1e-12 && self.s_sup.is_finite() {
                spec.quantile(1.0)?
            } else {
                spec.quantile(r_target + q)?
            };
            return Ok(CachePolicy::deterministic(CacheDuration::from_time(t)));
        }
        let s_env = self.envelope.value(r_target);
        let s_curve = rate_cost(spec, r_target)?;
        if s_curve - s_env <= 1e-7 * (1.0 + s_env.abs()) {
            let t = spec.quantile(r_target + q)?;
            return Ok(CachePolicy::deterministic(CacheDuration::from_time(t)));
        }
        // bracketing vertices
        let i = verts.partition_point(|v| v.r <= r_target);
        let (lo, hi) = (verts[i - 1], verts[i]);
        let theta = (hi.r - r_target) / (hi.r - lo.r);
        let mut atoms = Vec::new();
        if theta > 1e-12 {
            atoms.push((CacheDuration::from_time(lo.t), theta));
        }
        if 1.0 - theta > 1e-12 {
            atoms.push((CacheDuration::from_time(hi.t), 1.0 - theta));
        }
        CachePolicy::new(atoms)
    }
}

fn envelope_points(spec: &RdiSpec, n: usize, q: f64, r_max: f64) -> Result<Vec<CurvePoint>> {
    let mut points: Vec<CurvePoint> = Vec::with_capacity(n);
    for i in 1..=n {
        let r = r_max * i as f64 / n as f64;
        let t = spec.quantile(r + q)?;
        let r_ach = hit_ratio(spec, t);
        let s = mean_caching_time(spec, t);
        if points.last().map_or(true, |p| r_ach > p.r + 1e-12) {
            points.push(CurvePoint { r: r_ach, s, t });
        }
    }
    Ok(points)
}

fn classify(
    points: &[CurvePoint],
    envelope: &Envelope,
    r_sup: f64,
    s_sup: f64,
    truncated: bool,
) -> Classification {
    let max_gap = points
        .iter()
        .map(|p| (p.s - envelope.value(p.r)).abs() / (1.0 + p.s.abs()))
        .fold(0.0, f64::max);
    if !truncated && envelope.vertices().len() == 2 {
        let last = envelope.vertices()[1];
        if (last.r - r_sup).abs() < 1e-9 && (last.s - s_sup).abs() < 1e-6 * (1.0 + s_sup.abs()) {
            return Classification::LinearAlpha;
        }
    }
    if max_gap <= 1e-9 {
        Classification::SelfConvex
    } else {
        Classification::General
    }
}

/// Convenience wrapper: curve + envelope at the default 2048-point grid.
pub fn convex_envelope(spec: &RdiSpec) -> Result<RateCostCurve> {
    RateCostCurve::compute(spec, 2048)
}

/// Convenience wrapper for policy extraction at the default grid.
pub fn policy_for_target(spec: &RdiSpec, r_target: f64) -> Result<CachePolicy> {
    let curve = convex_envelope(spec)?;
    curve.policy_for(spec, r_target)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdi::Transform;

    fn exp1() -> RdiSpec {
        RdiSpec::base(BaseFamily::Exponential { rate: 1.0 }).unwrap()
    }

    fn uniform01() -> RdiSpec {
        RdiSpec::base(BaseFamily::Uniform { lo: 0.0, hi: 1.0 }).unwrap()
    }

    fn tri021() -> RdiSpec {
        RdiSpec::base(BaseFamily::Triangular { lo: 0.0, hi: 2.0, mode: 1.0 }).unwrap()
    }

    #[test]
    fn hit_ratio_examples() {
        assert!((hit_ratio(&exp1(), 1.0) - (1.0 - (-1.0f64).exp())).abs() < 1e-12);
        assert_eq!(hit_ratio(&exp1(), 0.0), 0.0);
        assert!((hit_ratio(&uniform01(), 0.5) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn mean_caching_time_examples() {
        assert!((mean_caching_time(&uniform01(), 0.5) - 0.375).abs() < 1e-12);
        assert_eq!(mean_caching_time(&exp1(), 0.0), 0.0);
        // exponential: E{W} at hit ratio r equals r / rate
        let t = 0.7f64;
        let r = hit_ratio(&exp1(), t);
        assert!((mean_caching_time(&exp1(), t) - r).abs() < 1e-12);
    }

    #[test]
    fn rate_cost_examples() {
        assert!((rate_cost(&exp1(), 0.5).unwrap() - 0.5).abs() < 1e-10);
        assert!((rate_cost(&uniform01(), 0.5).unwrap() - 0.375).abs() < 1e-10);
        let pareto = RdiSpec::base(BaseFamily::Pareto { shape: 1.0, scale: 1.0 }).unwrap();
        let r = 1.0 - (-1.0f64).exp();
        assert!((rate_cost(&pareto, r).unwrap() - 2.0).abs() < 1e-9);
        assert!(rate_cost(&exp1(), 1.5).is_err());
    }

    #[test]
    fn closed_forms_match_numeric() {
        let families = [
            BaseFamily::Exponential { rate: 1.0 },
            BaseFamily::Uniform { lo: 0.0, hi: 1.0 },
            BaseFamily::Triangular { lo: 0.0, hi: 2.0, mode: 1.0 },
            BaseFamily::Pareto { shape: 2.0, scale: 1.0 },
            BaseFamily::Pareto { shape: 1.0, scale: 1.0 },
            BaseFamily::Arcsine { width: 2.0 },
        ];
        for fam in families {
            let spec = RdiSpec::base(fam.clone()).unwrap();
            for i in 1..100 {
                let r = i as f64 / 100.0;
                let closed = rate_cost_closed_form(&fam, r).unwrap();
                let numeric = rate_cost(&spec, r).unwrap();
                assert!(
                    (closed - numeric).abs() < 1e-8,
                    "{fam:?} at r={r}: closed {closed} vs numeric {numeric}"
                );
            }
        }
    }

    #[test]
    fn closed_form_spot_values() {
        let tri = BaseFamily::Triangular { lo: 0.0, hi: 2.0, mode: 1.0 };
        let expect = 2.0f64.sqrt() * (0.5f64.sqrt() - 0.5f64.powf(1.5) / 3.0);
        assert!((rate_cost_closed_form(&tri, 0.5).unwrap() - expect).abs() < 1e-12);
        let arc = BaseFamily::Arcsine { width: 2.0 };
        assert!((rate_cost_closed_form(&arc, 1.0).unwrap() - 1.0).abs() < 1e-12);
        let uni = BaseFamily::Uniform { lo: 0.5, hi: 1.5 };
        assert!((rate_cost_closed_form(&uni, 1e-12).unwrap() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn curvature_examples() {
        // exponential is flat
        for r in [0.1, 0.5, 0.9] {
            assert!(curvature(&exp1(), r).unwrap().abs() < 1e-9);
        }
        // uniform(0,1): p=1, p'=0 => s'' = -1
        assert!((curvature(&uniform01(), 0.5).unwrap() + 1.0).abs() < 1e-9);
        // pareto(2,1) is convex
        let pareto = RdiSpec::base(BaseFamily::Pareto { shape: 2.0, scale: 1.0 }).unwrap();
        assert!(curvature(&pareto, 0.5).unwrap() > 0.0);
    }

    #[test]
    fn tradeoff_identity() {
        for spec in [exp1(), uniform01(), tri021()] {
            for i in 1..50 {
                let t = i as f64 * 0.1;
                let r = hit_ratio(&spec, t);
                if r <= 0.0 || r >= 1.0 - spec.undemand_prob() {
                    continue;
                }
                let s = rate_cost(&spec, r).unwrap();
                assert!((s - mean_caching_time(&spec, t)).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn envelope_classification() {
        let uni = RateCostCurve::compute(&uniform01(), 512).unwrap();
        assert_eq!(uni.classification, Classification::LinearAlpha);
        assert!((uni.alpha().unwrap() - 0.5).abs() < 1e-9);

        let exp = RateCostCurve::compute(&exp1(), 512).unwrap();
        assert_eq!(exp.classification, Classification::LinearAlpha);
        assert!((exp.alpha().unwrap() - 1.0).abs() < 1e-9);

        let arc =
            RateCostCurve::compute(&RdiSpec::base(BaseFamily::Arcsine { width: 2.0 }).unwrap(), 512)
                .unwrap();
        assert_eq!(arc.classification, Classification::General);
        // envelope strictly below the curve somewhere in the interior
        let gap = arc
            .points
            .iter()
            .map(|p| p.s - arc.value(p.r))
            .fold(0.0, f64::max);
        assert!(gap > 1e-3, "arcsine envelope gap {gap}");

        // pareto(2,1): s is convex but t_inf = 1 > 0, so the envelope is an
        // origin chord up to its tangency point and the curve beyond it
        let pareto = RateCostCurve::compute(
            &RdiSpec::base(BaseFamily::Pareto { shape: 2.0, scale: 1.0 }).unwrap(),
            512,
        )
        .unwrap();
        assert_eq!(pareto.classification, Classification::General);
        let pareto_gap = pareto
            .points
            .iter()
            .map(|p| p.s - pareto.value(p.r))
            .fold(0.0, f64::max);
        assert!(pareto_gap > 1e-3, "pareto envelope gap {pareto_gap}");

        // decreasing density with support from 0: the curve is its own
        // envelope
        let hyper = RdiSpec::base(BaseFamily::Mixture {
            components: vec![
                crate::rdi::MixtureComponent {
                    weight: 0.5,
                    spec: RdiSpec::base(BaseFamily::Exponential { rate: 1.0 }).unwrap(),
                },
                crate::rdi::MixtureComponent {
                    weight: 0.5,
                    spec: RdiSpec::base(BaseFamily::Exponential { rate: 5.0 }).unwrap(),
                },
            ],
        })
        .unwrap();
        let hyper_curve = RateCostCurve::compute(&hyper, 512).unwrap();
        assert_eq!(hyper_curve.classification, Classification::SelfConvex);
    }

    #[test]
    fn envelope_is_convex_and_below_curve() {
        for spec in [
            tri021(),
            RdiSpec::base(BaseFamily::Arcsine { width: 2.0 }).unwrap(),
            RdiSpec::new(
                BaseFamily::Arcsine { width: 2.0 },
                vec![
                    Transform::DensityScale { keep: 0.8 },
                    Transform::RateShift { mass: 0.2, at: 1.0 },
                ],
            )
            .unwrap(),
        ] {
            let curve = RateCostCurve::compute(&spec, 1024).unwrap();
            let slopes = curve.envelope.slopes();
            for w in slopes.windows(2) {
                assert!(w[1] >= w[0] - 1e-9, "non-convex envelope: {slopes:?}");
            }
            for p in &curve.points {
                assert!(curve.value(p.r) <= p.s + 1e-9);
            }
            assert_eq!(curve.envelope.vertices()[0], CurvePoint { r: 0.0, s: 0.0, t: 0.0 });
        }
    }

    #[test]
    fn policy_extraction() {
        // uniform: chord => time-sharing between skip and full caching
        let uni = RateCostCurve::compute(&uniform01(), 2048).unwrap();
        let pol = uni.policy_for(&uniform01(), 0.5).unwrap();
        assert_eq!(pol.atoms().len(), 2);
        let mut r_mix = 0.0;
        let mut s_mix = 0.0;
        for &(d, w) in pol.atoms() {
            r_mix += w * hit_ratio(&uniform01(), d.as_time());
            s_mix += w * mean_caching_time(&uniform01(), d.as_time());
        }
        assert!((r_mix - 0.5).abs() < 1e-8);
        assert!((s_mix - uni.value(0.5)).abs() < 1e-8);
        assert!((uni.value(0.5) - 0.25).abs() < 1e-8);

        // exponential: curve == envelope => deterministic ln 2
        let exp = RateCostCurve::compute(&exp1(), 2048).unwrap();
        let pol = exp.policy_for(&exp1(), 0.5).unwrap();
        assert_eq!(pol.atoms().len(), 1);
        match pol.atoms()[0].0 {
            CacheDuration::Until { t } => assert!((t - 2.0f64.ln()).abs() < 1e-9),
            other => panic!("expected deterministic deadline, got {other:?}"),
        }

        // r = 0 => skip
        let pol = exp.policy_for(&exp1(), 0.0).unwrap();
        assert_eq!(pol.atoms(), &[(CacheDuration::Skip, 1.0)]);
    }

    #[test]
    fn transform_cost_identities() {
        let base = tri021();
        let base_curve = |r: f64| rate_cost(&base, r).unwrap();
        // time scaling: s_new(r) = s(r) / xi
        let xi = 0.5;
        let scaled =
            RdiSpec::new(base.base_family().clone(), vec![Transform::TimeScale { factor: xi }])
                .unwrap();
        for i in 1..20 {
            let r = i as f64 / 20.0;
            assert!((rate_cost(&scaled, r).unwrap() - base_curve(r) / xi).abs() < 1e-8);
        }
        // time shift: s_new(r) = s(r) + xi
        let shifted =
            RdiSpec::new(base.base_family().clone(), vec![Transform::TimeShift { shift: 1.0 }])
                .unwrap();
        for i in 1..20 {
            let r = i as f64 / 20.0;
            assert!((rate_cost(&shifted, r).unwrap() - (base_curve(r) + 1.0)).abs() < 1e-8);
        }
        // density scaling: s_new(r) = xi s(r/xi) + (1-xi) P^{-1}(r/xi + q)
        let keep = 0.6;
        let thinned =
            RdiSpec::new(base.base_family().clone(), vec![Transform::DensityScale { keep }])
                .unwrap();
        for i in 1..12 {
            let r = keep * i as f64 / 12.0;
            let expect = keep * base_curve(r / keep) + (1.0 - keep) * base.quantile(r / keep).unwrap();
            assert!((rate_cost(&thinned, r).unwrap() - expect).abs() < 1e-8);
        }
    }

    #[test]
    fn stochastic_order_raises_rate() {
        // pointwise larger cdf (stochastically earlier requests) gives a
        // higher hit ratio at every storage cost
        let fast = RdiSpec::base(BaseFamily::Exponential { rate: 2.0 }).unwrap();
        let slow = exp1();
        for i in 1..10 {
            let s = i as f64 * 0.05;
            // invert s(r) on each curve: exponential r(s) = rate * s
            let r_fast = 2.0 * s;
            let r_slow = s;
            assert!((rate_cost(&fast, r_fast).unwrap() - s).abs() < 1e-9);
            assert!((rate_cost(&slow, r_slow).unwrap() - s).abs() < 1e-9);
            assert!(r_fast >= r_slow);
        }
    }

    #[test]
    fn corollary_linearity_dichotomy() {
        // exponential: linear within 1e-8
        let exp_curve = RateCostCurve::compute(&exp1(), 512).unwrap();
        for p in &exp_curve.points {
            assert!((p.s - p.r).abs() < 1e-8);
        }
        // others: best line through the origin misses by > 1e-3
        for spec in [
            uniform01(),
            tri021(),
            RdiSpec::base(BaseFamily::Pareto { shape: 2.0, scale: 1.0 }).unwrap(),
            RdiSpec::base(BaseFamily::Arcsine { width: 2.0 }).unwrap(),
        ] {
            let curve = RateCostCurve::compute(&spec, 512).unwrap();
            let slope = curve
                .points
                .iter()
                .map(|p| p.s / p.r)
                .sum::<f64>()
                / curve.points.len() as f64;
            let dev = curve
                .points
                .iter()
                .map(|p| (p.s - slope * p.r).abs())
                .fold(0.0, f64::max);
            assert!(dev > 1e-3, "{spec:?} deviation {dev}");
        }
    }

    #[test]
    fn atom_gives_flat_curve_segment() {
        // an atom at x=1 makes hits in its range free: s(r) is flat there
        let spec = RdiSpec::new(
            BaseFamily::Arcsine { width: 2.0 },
            vec![Transform::DensityScale { keep: 0.8 }, Transform::RateShift { mass: 0.2, at: 1.0 }],
        )
        .unwrap();
        let r_lo = hit_ratio(&spec, 1.0 - 1e-9);
        let r_hi = hit_ratio(&spec, 1.0);
        assert!((r_hi - r_lo - 0.2).abs() < 1e-6);
        let s_lo = rate_cost(&spec, r_lo + 1e-6).unwrap();
        let s_hi = rate_cost(&spec, r_hi).unwrap();
        assert!((s_hi - s_lo).abs() < 1e-5, "flat segment violated: {s_lo} vs {s_hi}");
    }

    #[test]
    fn rate_for_price_intervals() {
        let uni = RateCostCurve::compute(&uniform01(), 1024).unwrap();
        // envelope is one chord of slope 0.5
        let (lo, hi) = uni.envelope.rate_for_price(0.25);
        assert_eq!((lo, hi), (0.0, 0.0));
        let (lo, hi) = uni.envelope.rate_for_price(0.5);
        assert!(lo.abs() < 1e-12 && (hi - 1.0).abs() < 1e-9);
        let (lo, hi) = uni.envelope.rate_for_price(2.0);
        assert!((lo - 1.0).abs() < 1e-9 && (hi - 1.0).abs() < 1e-9);
    }
}
