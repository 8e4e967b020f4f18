//! Multi-class storage allocation.
//!
//! A content flow mixes several classes, each with its own request-delay law
//! and rate-cost envelope. Minimizing total storage cost at a target overall
//! hit ratio equalizes marginal costs across classes: every class operates
//! where its envelope slope equals a shadow price `β`. Because the envelopes
//! are piecewise linear, the aggregate map `β ↦ Σ πᵢ rᵢ*(β)` is a step
//! function and the overall cost curve `s*(r)` is exactly piecewise linear;
//! both are built from the pooled envelope segments sorted by slope.

use crate::numeric::{integrate_tail, integrate_with_breakpoints, interp};
use crate::ratecost::{
    hit_ratio, mean_caching_time, CacheDuration, CachePolicy, Classification, RateCostCurve,
};
use crate::rdi::RdiSpec;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// A weighted set of content classes plus the arrival-process description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FlowSpecRepr", into = "FlowSpecRepr")]
pub struct FlowSpec {
    pub classes: Vec<FlowClass>,
    /// Content arrival rate, items per second.
    pub lambda: f64,
    /// File size in bits.
    pub file_size_bits: f64,
    /// Asymptotic variability of the arrival process (1 for Poisson).
    pub c2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowClass {
    /// Probability that an arriving item belongs to this class.
    pub pi: f64,
    pub spec: RdiSpec,
}

#[derive(Serialize, Deserialize)]
struct FlowSpecRepr {
    classes: Vec<FlowClass>,
    lambda: f64,
    file_size_bits: f64,
    #[serde(default = "default_c2")]
    c2: f64,
}

fn default_c2() -> f64 {
    1.0
}

impl TryFrom<FlowSpecRepr> for FlowSpec {
    type Error = Error;
    fn try_from(r: FlowSpecRepr) -> Result<Self> {
        FlowSpec::new(r.classes, r.lambda, r.file_size_bits, r.c2)
    }
}

impl From<FlowSpec> for FlowSpecRepr {
    fn from(f: FlowSpec) -> Self {
        FlowSpecRepr {
            classes: f.classes,
            lambda: f.lambda,
            file_size_bits: f.file_size_bits,
            c2: f.c2,
        }
    }
}

impl FlowSpec {
    pub fn new(classes: Vec<FlowClass>, lambda: f64, file_size_bits: f64, c2: f64) -> Result<Self> {
        if classes.is_empty() {
            return Err(Error::InvalidSpec("flow needs at least one class".into()));
        }
        let total: f64 = classes.iter().map(|c| c.pi).sum();
        if classes.iter().any(|c| c.pi < 0.0) || (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidSpec(format!(
                "class probabilities must be nonnegative and sum to 1, got {total}"
            )));
        }
        if !(lambda > 0.0) {
            return Err(Error::InvalidSpec(format!("arrival rate must be positive, got {lambda}")));
        }
        if !(file_size_bits > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "file size must be positive, got {file_size_bits}"
            )));
        }
        if !(c2 >= 0.0) {
            return Err(Error::InvalidSpec(format!("c2 must be nonnegative, got {c2}")));
        }
        Ok(FlowSpec { classes, lambda, file_size_bits, c2 })
    }

    /// Mean undemand probability `Σ πᵢ qᵢ`.
    pub fn mean_undemand(&self) -> f64 {
        self.classes.iter().map(|c| c.pi * c.spec.undemand_prob()).sum()
    }

    /// Largest achievable overall hit ratio, `Σ πᵢ (1 − qᵢ)`.
    pub fn feasible_r_sup(&self) -> f64 {
        1.0 - self.mean_undemand()
    }
}

/// A flow with each class's rate-cost curve and envelope precomputed.
#[derive(Debug, Clone)]
pub struct FlowModel {
    flow: FlowSpec,
    curves: Vec<RateCostCurve>,
}

/// Result of the joint rate-cost allocation at one target.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Allocation {
    /// Shadow price: marginal storage cost per unit hit ratio.
    pub beta: f64,
    /// Per-class optimal hit ratios `rᵢ*`.
    pub class_rates: Vec<f64>,
    /// Per-class policies attaining them.
    pub policies: Vec<CachePolicy>,
    /// Achieved overall hit ratio `Σ πᵢ rᵢ*`.
    pub total_rate: f64,
    /// Minimum total cost `Σ πᵢ s̆ᵢ(rᵢ*)`.
    pub total_cost: f64,
}

/// One pooled envelope segment, tagged with its owning class.
#[derive(Debug, Clone, Copy)]
struct Segment {
    class: usize,
    slope: f64,
    /// Hit-ratio extent within the class.
    dr: f64,
    /// Class hit ratio at the segment start.
    r_from: f64,
}

/// The overall cost-rate frontier `s*(r)` (equivalently `r̆(s)`), exact
/// piecewise-linear.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverallCurve {
    /// `(r, s)` vertices, starting at the origin, convex in `r`.
    pub vertices: Vec<(f64, f64)>,
    /// Supremum of achievable overall hit ratios.
    pub r_sup: f64,
    /// Total cost supremum (`+∞` when any class has unbounded cost).
    pub s_sup: f64,
}

impl OverallCurve {
    /// Minimum total cost at overall hit ratio `r`.
    pub fn s_star(&self, r: f64) -> f64 {
        interp(&self.vertices, r)
    }

    /// Maximum overall hit ratio at total cost budget `s` (`r̆(s)`).
    pub fn r_breve(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        let swapped: Vec<(f64, f64)> = self.vertices.iter().map(|&(r, c)| (c, r)).collect();
        interp(&swapped, s)
    }

    /// `r̆'(0)`: hit ratio bought per unit cost at zero budget.
    pub fn derivative_at_zero(&self) -> f64 {
        match self.vertices.get(1) {
            Some(&(r, s)) if s > 0.0 => r / s,
            _ => f64::INFINITY,
        }
    }

    /// `r̆'` at the cost supremum: slope of the last (most expensive) segment.
    pub fn derivative_at_sup(&self) -> f64 {
        let n = self.vertices.len();
        if n < 2 {
            return 0.0;
        }
        let (r0, s0) = self.vertices[n - 2];
        let (r1, s1) = self.vertices[n - 1];
        if s1 > s0 {
            (r1 - r0) / (s1 - s0)
        } else {
            f64::INFINITY
        }
    }

    /// Largest finite cost on the curve (`s_sup` for bounded flows, the
    /// truncation point otherwise).
    pub fn s_max(&self) -> f64 {
        self.vertices.last().map_or(0.0, |v| v.1)
    }
}

/// Hit ratio, caching-time law, and mean cost of an arbitrary per-class
/// policy assignment.
#[derive(Debug, Clone)]
pub struct PolicyStats {
    pub hit_ratio: f64,
    pub mean_caching_time: f64,
    pub law: CachingTimeLaw,
}

/// The mixture law of the realized caching time `W = min(X, t)` under a
/// per-class randomized policy.
#[derive(Debug, Clone)]
pub struct CachingTimeLaw {
    classes: Vec<(f64, RdiSpec, CachePolicy)>,
}

impl CachingTimeLaw {
    /// `G(x) = P(W ≤ x)`, right-continuous, `G(∞) = 1` unless some item is
    /// held forever.
    pub fn cdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        let mut g = 0.0;
        for (pi, spec, policy) in &self.classes {
            for &(d, w) in policy.atoms() {
                let t = d.as_time();
                let demand_below = spec.demand_cdf(x.min(t));
                let full = if x >= t { 1.0 - spec.demand_cdf(t) } else { 0.0 };
                g += pi * w * (demand_below + full);
            }
        }
        g.min(1.0)
    }

    /// `P(W > x)`.
    pub fn survival(&self, x: f64) -> f64 {
        (1.0 - self.cdf(x)).max(0.0)
    }

    /// `E{W} = ∫ (1 − G)`, computed in closed form per atom.
    pub fn mean(&self) -> f64 {
        self.classes
            .iter()
            .map(|(pi, spec, policy)| {
                pi * policy
                    .atoms()
                    .iter()
                    .map(|&(d, w)| w * mean_caching_time(spec, d.as_time()))
                    .sum::<f64>()
            })
            .sum()
    }

    /// `∫₀^∞ [1 − G(x)]² dx`, used by the peakedness formula. Infinite when
    /// an undemanded item can be held forever.
    pub fn survival_sq_integral(&self) -> f64 {
        let mut upper = 0.0f64;
        for (pi, spec, policy) in &self.classes {
            if *pi == 0.0 {
                continue;
            }
            for &(d, w) in policy.atoms() {
                if w == 0.0 {
                    continue;
                }
                match d {
                    CacheDuration::Forever => {
                        if spec.undemand_prob() > 0.0 {
                            return f64::INFINITY;
                        }
                        let t_sup = spec.moments().t_sup;
                        if t_sup.is_infinite() {
                            upper = f64::INFINITY;
                        } else {
                            upper = upper.max(t_sup);
                        }
                    }
                    CacheDuration::Until { t } => upper = upper.max(t),
                    CacheDuration::Skip => {}
                }
            }
        }
        let f = |x: f64| {
            let sv = self.survival(x);
            sv * sv
        };
        let bps = self.breakpoints();
        if upper.is_finite() {
            integrate_with_breakpoints(&f, 0.0, upper, &bps, 1e-9)
        } else {
            let head = 1.0f64.max(bps.iter().copied().filter(|b| b.is_finite()).fold(0.0, f64::max));
            integrate_with_breakpoints(&f, 0.0, head, &bps, 1e-9) + integrate_tail(&f, head, 1e-10)
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        let mut bps = Vec::new();
        for (_, spec, policy) in &self.classes {
            for &(d, _) in policy.atoms() {
                if let CacheDuration::Until { t } = d {
                    bps.push(t);
                }
            }
            for &(loc, _) in spec.atoms() {
                bps.push(loc);
            }
            let m = spec.moments();
            bps.push(m.t_inf);
            if m.t_sup.is_finite() {
                bps.push(m.t_sup);
            }
        }
        bps
    }
}

impl FlowModel {
    /// Builds the per-class curves and envelopes (2048-point grids).
    pub fn new(flow: FlowSpec) -> Result<Self> {
        let curves = flow
            .classes
            .iter()
            .map(|c| RateCostCurve::compute(&c.spec, 2048))
            .collect::<Result<Vec<_>>>()?;
        Ok(FlowModel { flow, curves })
    }

    pub fn flow(&self) -> &FlowSpec {
        &self.flow
    }

    pub fn curves(&self) -> &[RateCostCurve] {
        &self.curves
    }

    /// Pooled envelope segments in ascending slope order (stable in class
    /// index for ties).
    fn segments(&self) -> Vec<Segment> {
        let mut segs = Vec::new();
        for (i, curve) in self.curves.iter().enumerate() {
            let verts = curve.envelope.vertices();
            for w in verts.windows(2) {
                let dr = w[1].r - w[0].r;
                if dr <= 0.0 {
                    continue;
                }
                let slope = (w[1].s - w[0].s) / dr;
                segs.push(Segment { class: i, slope, dr, r_from: w[0].r });
            }
        }
        segs.sort_by(|a, b| {
            a.slope
                .partial_cmp(&b.slope)
                .unwrap()
                .then(a.class.cmp(&b.class))
        });
        segs
    }

    /// Solves the joint allocation at overall target `r_target` by locating
    /// the shadow price on the monotone map `β ↦ Σ πᵢ rᵢ*(β)`.
    pub fn allocate(&self, r_target: f64) -> Result<Allocation> {
        let n = self.flow.classes.len();
        let sup = self.flow.feasible_r_sup();
        let reachable: f64 = self
            .curves
            .iter()
            .zip(&self.flow.classes)
            .map(|(c, cl)| cl.pi * c.envelope.r_max())
            .sum();
        if r_target > reachable + 1e-12 {
            return Err(Error::Infeasible { requested: r_target, supremum: sup });
        }
        if r_target <= 0.0 {
            return self.finish_allocation(0.0, vec![0.0; n]);
        }

        // the aggregate map is a step function of beta jumping at segment
        // slopes: bisect over the sorted slope list for the marginal slope
        let segs = self.segments();
        let pis: Vec<f64> = self.flow.classes.iter().map(|c| c.pi).collect();
        let take_below = |beta: f64, strict: bool| -> f64 {
            segs.iter()
                .filter(|s| if strict { s.slope < beta } else { s.slope <= beta })
                .map(|s| pis[s.class] * s.dr)
                .sum()
        };
        let slopes: Vec<f64> = segs.iter().map(|s| s.slope).collect();
        let (mut lo, mut hi) = (0usize, slopes.len() - 1);
        if take_below(slopes[hi], false) < r_target - 1e-12 {
            // numeric slack at the very top
            hi = slopes.len() - 1;
        } else {
            while lo < hi {
                let mid = (lo + hi) / 2;
                if take_below(slopes[mid], false) >= r_target - 1e-12 {
                    hi = mid;
                } else {
                    lo = mid + 1;
                }
            }
        }
        let beta = slopes[hi];

        // everything strictly cheaper than beta is fully taken; the classes
        // owning beta-slope segments share the remainder in proportion to
        // their weighted extents
        let mut rates = vec![0.0f64; n];
        for s in segs.iter().filter(|s| s.slope < beta - 1e-15 * (1.0 + beta.abs())) {
            rates[s.class] = rates[s.class].max(s.r_from + s.dr);
        }
        let base: f64 = rates.iter().zip(&pis).map(|(r, pi)| r * pi).sum();
        let marginal: Vec<&Segment> = segs
            .iter()
            .filter(|s| (s.slope - beta).abs() <= 1e-15 * (1.0 + beta.abs()))
            .collect();
        let pool: f64 = marginal.iter().map(|s| pis[s.class] * s.dr).sum();
        let need = (r_target - base).clamp(0.0, pool);
        let frac = if pool > 0.0 { need / pool } else { 0.0 };
        for s in &marginal {
            rates[s.class] = rates[s.class].max(s.r_from + frac * s.dr);
        }
        self.finish_allocation(beta, rates)
    }

    fn finish_allocation(&self, beta: f64, rates: Vec<f64>) -> Result<Allocation> {
        let mut policies = Vec::with_capacity(rates.len());
        let mut total_rate = 0.0;
        let mut total_cost = 0.0;
        for ((curve, class), &r) in self.curves.iter().zip(&self.flow.classes).zip(&rates) {
            policies.push(curve.policy_for(&class.spec, r)?);
            total_rate += class.pi * r;
            total_cost += class.pi * curve.value(r);
        }
        Ok(Allocation { beta, class_rates: rates, policies, total_rate, total_cost })
    }

    /// Greedy linear-program solution, valid when every class envelope is a
    /// single chord (slope `αᵢ`): fill classes in ascending `αᵢ`.
    pub fn allocate_lp(&self, r_target: f64) -> Result<Allocation> {
        let alphas: Vec<f64> = self
            .curves
            .iter()
            .map(|c| {
                if c.classification == Classification::LinearAlpha {
                    Ok(c.envelope.saturation_marginal_cost())
                } else {
                    Err(Error::Domain(
                        "allocate_lp needs all-concave classes; use allocate".into(),
                    ))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let sup = self.flow.feasible_r_sup();
        if r_target > sup + 1e-12 {
            return Err(Error::Infeasible { requested: r_target, supremum: sup });
        }
        let mut order: Vec<usize> = (0..alphas.len()).collect();
        order.sort_by(|&a, &b| alphas[a].partial_cmp(&alphas[b]).unwrap().then(a.cmp(&b)));
        let mut rates = vec![0.0; alphas.len()];
        let mut remaining = r_target.max(0.0);
        let mut beta = 0.0;
        for &i in &order {
            if remaining <= 0.0 {
                break;
            }
            let cap = self.curves[i].r_sup;
            let pi = self.flow.classes[i].pi;
            let take = (remaining / pi.max(1e-300)).min(cap);
            rates[i] = take;
            remaining -= pi * take;
            beta = alphas[i];
        }
        self.finish_allocation(beta, rates)
    }

    /// The exact overall frontier from the pooled envelope segments.
    pub fn overall_curve(&self) -> OverallCurve {
        let mut vertices = vec![(0.0, 0.0)];
        let mut r = 0.0;
        let mut s = 0.0;
        for seg in self.segments() {
            let pi = self.flow.classes[seg.class].pi;
            if pi * seg.dr == 0.0 {
                continue;
            }
            r += pi * seg.dr;
            s += pi * seg.dr * seg.slope;
            let last = *vertices.last().expect("nonempty");
            // merge collinear extensions
            let prev_slope = if vertices.len() >= 2 {
                let a = vertices[vertices.len() - 2];
                (last.1 - a.1) / (last.0 - a.0)
            } else {
                f64::NAN
            };
            if (prev_slope - seg.slope).abs() <= 1e-12 * (1.0 + seg.slope.abs()) {
                *vertices.last_mut().expect("nonempty") = (r, s);
            } else {
                vertices.push((r, s));
            }
        }
        let s_sup = if self.curves.iter().any(|c| c.s_sup.is_infinite()) {
            f64::INFINITY
        } else {
            self.curves
                .iter()
                .zip(&self.flow.classes)
                .map(|(c, cl)| cl.pi * c.s_sup)
                .sum()
        };
        OverallCurve { vertices, r_sup: self.flow.feasible_r_sup(), s_sup }
    }

    /// `r̆'(0)` and `r̆'` at the cost supremum (reciprocals of the cheapest
    /// and most expensive pooled marginal costs).
    pub fn endpoint_derivatives(&self) -> (f64, f64) {
        let curve = self.overall_curve();
        (curve.derivative_at_zero(), curve.derivative_at_sup())
    }

    /// Evaluates an arbitrary per-class policy assignment.
    pub fn policy_stats(&self, policies: &[CachePolicy]) -> Result<PolicyStats> {
        if policies.len() != self.flow.classes.len() {
            return Err(Error::BadConfig(format!(
                "expected {} policies, got {}",
                self.flow.classes.len(),
                policies.len()
            )));
        }
        let mut r = 0.0;
        let mut s = 0.0;
        for (class, policy) in self.flow.classes.iter().zip(policies) {
            for &(d, w) in policy.atoms() {
                let t = d.as_time();
                r += class.pi * w * hit_ratio(&class.spec, t);
                s += class.pi * w * mean_caching_time(&class.spec, t);
            }
        }
        let law = CachingTimeLaw {
            classes: self
                .flow
                .classes
                .iter()
                .zip(policies)
                .map(|(c, p)| (c.pi, c.spec.clone(), p.clone()))
                .collect(),
        };
        Ok(PolicyStats { hit_ratio: r, mean_caching_time: s, law })
    }
}
