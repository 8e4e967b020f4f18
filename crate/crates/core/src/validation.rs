//! The machine-checkable acceptance criteria.
//!
//! Each criterion exercises one analytic claim end to end — closed forms
//! against quadrature, theory against simulation, exact arithmetic against
//! hand values — and reports a pass/fail verdict with the measured numbers.
//! `run_all` executes the full suite (several minutes; the discriminant
//! sweep and the multi-million-arrival simulations dominate).

use serde::Serialize;
use std::time::Instant;

use crate::allocator::FlowModel;
use crate::blocking::{self, erlang_b};
use crate::controller::{self, SimEnvironment};
use crate::finite_opt;
use crate::presets;
use crate::ratecost::{self, rate_cost, rate_cost_closed_form, CachePolicy, RateCostCurve};
use crate::rdi::RdiSpec;
use crate::simulator::{self, ArrivalProcess, SimConfig};
use crate::Result;

/// Verdict for one criterion.
#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CriterionResult {
    fn new(id: &'static str, passed: bool, detail: String) -> Self {
        CriterionResult { id, passed, detail }
    }
}

/// Shared fixtures: the three preset flows with their curves.
pub struct Suite {
    pi1: FlowModel,
    pi2: FlowModel,
    pi3: FlowModel,
}

impl Suite {
    pub fn new() -> Result<Self> {
        Ok(Suite {
            pi1: FlowModel::new(presets::flow("pi1")?)?,
            pi2: FlowModel::new(presets::flow("pi2")?)?,
            pi3: FlowModel::new(presets::flow("pi3")?)?,
        })
    }

    fn model(&self, name: &str) -> &FlowModel {
        match name {
            "pi1" => &self.pi1,
            "pi2" => &self.pi2,
            _ => &self.pi3,
        }
    }
}

fn single_class_config(spec: RdiSpec, policy: CachePolicy, n: u64, seed: u64) -> SimConfig {
    let flow = crate::allocator::FlowSpec::new(
        vec![crate::allocator::FlowClass { pi: 1.0, spec }],
        10.0,
        1000.0,
        1.0,
    )
    .expect("single-class flow");
    SimConfig {
        flow,
        policies: vec![policy],
        arrivals: ArrivalProcess::Poisson { lambda: 10.0 },
        buffer: None,
        n_arrivals: n,
        seed,
        warmup_fraction: 0.1,
        record_caching_times: false,
    }
}

/// Fraction of arrivals that actually enter the buffer under a policy
/// assignment: skip atoms bypass the loss system entirely, so the
/// simulator's blocking probability (reported over all arrivals) is the
/// loss-model blocking times this fraction.
fn cached_fraction(flow: &crate::allocator::FlowSpec, policies: &[CachePolicy]) -> f64 {
    flow.classes
        .iter()
        .zip(policies)
        .map(|(class, policy)| {
            let caching: f64 = policy
                .atoms()
                .iter()
                .filter(|(d, _)| d.as_time() > 0.0)
                .map(|(_, w)| w)
                .sum();
            class.pi * caching
        })
        .sum()
}

/// A1 — closed-form curves of the five base families match the quadrature
/// route to 1e−8 on a 512-point grid, in under a second.
pub fn a1() -> CriterionResult {
    let t0 = Instant::now();
    let mut worst = 0.0f64;
    for name in ["p1", "p2", "p3", "p4", "p5"] {
        let spec = presets::class_spec(name).unwrap();
        let family = spec.base_family().clone();
        for i in 1..=512 {
            let r = 0.999 * i as f64 / 512.0;
            let numeric = rate_cost(&spec, r).unwrap();
            let closed = rate_cost_closed_form(&family, r).unwrap();
            worst = worst.max((numeric - closed).abs());
        }
    }
    let dt = t0.elapsed().as_secs_f64();
    CriterionResult::new(
        "A1",
        worst <= 1e-8 && dt < 1.0,
        format!("max |numeric − closed| = {worst:.2e} over 5×512 points in {dt:.2} s"),
    )
}

/// A2 — the transform laws of the derived classes p6–p10 hold pointwise to
/// 1e−8 against the base curves.
pub fn a2() -> CriterionResult {
    let mut worst = 0.0f64;
    let check = |worst: &mut f64, got: f64, expect: f64| {
        *worst = worst.max((got - expect).abs());
    };
    let p1 = presets::class_spec("p1").unwrap();
    let p2 = presets::class_spec("p2").unwrap();
    let p3 = presets::class_spec("p3").unwrap();
    let p4 = presets::class_spec("p4").unwrap();
    // density scaling ξ=0.6 on p1 and ξ=0.4 on p4:
    // s_new(r) = ξ·s(r/ξ) + (1−ξ)·P⁻¹(r/ξ)
    for (base, thinned, keep) in [(&p1, "p6", 0.6), (&p4, "p9", 0.4)] {
        let spec = presets::class_spec(thinned).unwrap();
        for i in 1..40 {
            let r = keep * 0.98 * i as f64 / 40.0;
            let expect = keep * rate_cost(base, r / keep).unwrap()
                + (1.0 - keep) * base.quantile(r / keep).unwrap();
            check(&mut worst, rate_cost(&spec, r).unwrap(), expect);
        }
    }
    // time scaling ξ=0.5 on p2: s_new(r) = s(r)/ξ
    let p7 = presets::class_spec("p7").unwrap();
    for i in 1..40 {
        let r = 0.99 * i as f64 / 40.0;
        check(&mut worst, rate_cost(&p7, r).unwrap(), rate_cost(&p2, r).unwrap() / 0.5);
    }
    // time shift ξ=1 on p3: s_new(r) = s(r) + ξ
    let p8 = presets::class_spec("p8").unwrap();
    for i in 1..40 {
        let r = 0.99 * i as f64 / 40.0;
        check(&mut worst, rate_cost(&p8, r).unwrap(), rate_cost(&p3, r).unwrap() + 1.0);
    }
    // rate shift (ξ=0.2, ζ=1) after density scaling 0.8 on p5:
    // below the atom the curve is the inner one; past it,
    // s_new(r) = s(r−ξ) + ξ·[ζ − P⁻¹(r−ξ+q)]
    let inner = RdiSpec::new(
        crate::rdi::BaseFamily::Arcsine { width: 2.0 },
        vec![crate::rdi::Transform::DensityScale { keep: 0.8 }],
    )
    .unwrap();
    let p10 = presets::class_spec("p10").unwrap();
    let (xi, zeta) = (0.2, 1.0);
    for i in 1..60 {
        let r = 0.99 * i as f64 / 60.0;
        // inside the cdf jump caused by the atom the deterministic-policy
        // curve is flat (the threshold overshoots), so the pointwise
        // identity applies on either side of it only
        if r > 0.4 + 1e-9 && r < 0.6 - 1e-9 {
            continue;
        }
        let t_new = p10.quantile(r).unwrap();
        let expect = if t_new < zeta {
            rate_cost(&inner, r).unwrap()
        } else {
            // the inner never-mass q = 0.2 equals the shifted mass ξ, so
            // the threshold P⁻¹(r − ξ + q) is the inner quantile at r
            rate_cost(&inner, r - xi).unwrap() + xi * (zeta - inner.quantile(r).unwrap())
        };
        check(&mut worst, rate_cost(&p10, r).unwrap(), expect);
    }
    CriterionResult::new("A2", worst <= 1e-8, format!("max identity gap = {worst:.2e}"))
}

/// A3 — Erlang-B: three independent routes agree; `B(1,1) = 0.5` exactly.
pub fn a3() -> CriterionResult {
    let mut worst_direct = 0.0f64;
    for l in [1u32, 5, 20, 60, 120, 170] {
        for a in [0.5, 1.0, 10.0, 50.0] {
            let d = (erlang_b(l as f64, a) - blocking::erlang_b_direct(l, a).unwrap()).abs();
            worst_direct = worst_direct.max(d);
        }
    }
    let mut worst_integral = 0.0f64;
    for l in [1.0, 2.0, 5.0, 10.0, 20.0] {
        for a in [1.0, 5.0, 20.0] {
            let d = (erlang_b(l, a) - blocking::erlang_b_integral(l, a)).abs();
            worst_integral = worst_integral.max(d);
        }
    }
    let exact = erlang_b(1.0, 1.0) == 0.5;
    CriterionResult::new(
        "A3",
        worst_direct <= 1e-12 && worst_integral <= 1e-10 && exact,
        format!(
            "recurrence vs direct {worst_direct:.2e}, vs integral {worst_integral:.2e}, B(1,1)=0.5 {exact}"
        ),
    )
}

/// A4 — linearity dichotomy: the exponential curve is a line through the
/// origin to 1e−8; every other base family misses its best such line by
/// more than 1e−3.
pub fn a4() -> CriterionResult {
    let exp_curve = RateCostCurve::compute(&presets::class_spec("p1").unwrap(), 512).unwrap();
    let exp_dev = exp_curve
        .points
        .iter()
        .map(|p| (p.s - p.r).abs())
        .fold(0.0f64, f64::max);
    let mut min_nonlin = f64::INFINITY;
    for name in ["p2", "p3", "p4", "p5"] {
        let curve = RateCostCurve::compute(&presets::class_spec(name).unwrap(), 512).unwrap();
        let pts: Vec<(f64, f64)> = curve
            .points
            .iter()
            .filter(|p| p.s.is_finite())
            .map(|p| (p.r, p.s))
            .collect();
        // best line through the origin: minimize max |s − m·r| over m
        let dev = |m: f64| pts.iter().map(|(r, s)| (s - m * r).abs()).fold(0.0f64, f64::max);
        let (mut lo, mut hi) = (0.0, 10.0 * pts.last().unwrap().1 / pts.last().unwrap().0);
        for _ in 0..200 {
            let m1 = lo + (hi - lo) / 3.0;
            let m2 = hi - (hi - lo) / 3.0;
            if dev(m1) < dev(m2) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        min_nonlin = min_nonlin.min(dev(0.5 * (lo + hi)));
    }
    CriterionResult::new(
        "A4",
        exp_dev <= 1e-8 && min_nonlin > 1e-3,
        format!("exponential deviation {exp_dev:.2e}; smallest non-exponential miss {min_nonlin:.2e}"),
    )
}

/// A5 — infinite-buffer simulation matches theory for every class at the
/// half-demand operating point, 10⁶ Poisson arrivals each.
pub fn a5() -> CriterionResult {
    let mut detail = String::new();
    let mut passed = true;
    for i in 1..=10 {
        let t0 = Instant::now();
        let name = format!("p{i}");
        let spec = presets::class_spec(&name).unwrap();
        let q = spec.undemand_prob();
        let r = 0.5 * (1.0 - q);
        let t = spec.quantile(q + r).unwrap();
        let theory_r = ratecost::hit_ratio(&spec, t);
        let theory_s = ratecost::mean_caching_time(&spec, t);
        let cfg = single_class_config(
            spec,
            CachePolicy::deterministic(crate::ratecost::CacheDuration::Until { t }),
            1_000_000,
            1000 + i as u64,
        );
        let rep = simulator::run(&cfg).unwrap();
        let sr = rep.hit_ratio.sigma_distance(theory_r);
        let ss = rep.mean_caching_time.sigma_distance(theory_s);
        let dt = t0.elapsed().as_secs_f64();
        let ok = sr <= 3.0 && ss <= 3.0 && dt < 30.0;
        passed &= ok;
        detail.push_str(&format!("{name}:{sr:.1}σ/{ss:.1}σ "));
    }
    CriterionResult::new("A5", passed, format!("hit/cost sigma distances — {detail}"))
}

/// A6 — cross-flow storage savings at r = 0.7 and hit-ratio gains at
/// s = 0.8 match the reference percentages.
pub fn a6(suite: &Suite) -> CriterionResult {
    let c1 = suite.pi1.overall_curve();
    let c2 = suite.pi2.overall_curve();
    let c3 = suite.pi3.overall_curve();
    let (s1, s2, s3) = (c1.s_star(0.7), c2.s_star(0.7), c3.s_star(0.7));
    let save_vs_pi1 = 1.0 - s2 / s1;
    let save_vs_pi3 = 1.0 - s2 / s3;
    let (r1, r2, r3) = (c1.r_breve(0.8), c2.r_breve(0.8), c3.r_breve(0.8));
    let gain_vs_pi1 = r2 / r1 - 1.0;
    let gain_vs_pi3 = r2 / r3 - 1.0;
    let passed = (save_vs_pi1 - 0.364).abs() <= 0.015
        && (save_vs_pi3 - 0.518).abs() <= 0.015
        && (gain_vs_pi1 - 1.34).abs() <= 0.05
        && (gain_vs_pi3 - 1.67).abs() <= 0.05;
    CriterionResult::new(
        "A6",
        passed,
        format!(
            "savings {:.1}%/{:.1}% (ref 36.4/51.8), gains {:.0}%/{:.0}% (ref 134/167)",
            100.0 * save_vs_pi1,
            100.0 * save_vs_pi3,
            100.0 * gain_vs_pi1,
            100.0 * gain_vs_pi3
        ),
    )
}

/// A7 — feasibility suprema of the three flows and the vertical asymptotes
/// of the truncated overall curves.
pub fn a7(suite: &Suite) -> CriterionResult {
    let sups = [
        suite.pi1.flow().feasible_r_sup(),
        suite.pi2.flow().feasible_r_sup(),
        suite.pi3.flow().feasible_r_sup(),
    ];
    let sups_ok = (sups[0] - 0.9).abs() < 1e-12
        && (sups[1] - 1.0).abs() < 1e-12
        && (sups[2] - 0.8).abs() < 1e-12;
    let asymptote = |model: &FlowModel, sup: f64| {
        // the curve representation truncates an unbounded cost axis, so the
        // asymptote shows up as an unbounded cost supremum, a final segment
        // of near-zero marginal hit ratio, and a truncation point
        // essentially at the feasibility supremum
        let c = model.overall_curve();
        let last_r = c.vertices.last().map_or(0.0, |v| v.0);
        c.s_sup.is_infinite()
            && c.derivative_at_sup() < 1e-2
            && (sup - last_r).abs() < 1e-3
    };
    let asy_ok = asymptote(&suite.pi1, 0.9) && asymptote(&suite.pi3, 0.8);
    CriterionResult::new(
        "A7",
        sups_ok && asy_ok,
        format!("sups {sups:?}, asymptotes at 0.9/0.8 detected: {asy_ok}"),
    )
}

/// A8 — Poisson finite-buffer blocking is Erlang-B, flow π₂, L = 10.
pub fn a8(suite: &Suite) -> CriterionResult {
    let mut detail = String::new();
    let mut passed = true;
    let curve = suite.pi2.overall_curve();
    for (k, s) in [0.3, 0.6, 1.0].iter().enumerate() {
        let r = curve.r_breve(*s);
        let alloc = suite.pi2.allocate(r).unwrap();
        let p_cached = cached_fraction(suite.pi2.flow(), &alloc.policies);
        let cfg = SimConfig {
            flow: suite.pi2.flow().clone(),
            policies: alloc.policies,
            arrivals: ArrivalProcess::Poisson { lambda: 10.0 },
            buffer: Some(10),
            n_arrivals: 600_000,
            seed: 2000 + k as u64,
            warmup_fraction: 0.1,
            record_caching_times: false,
        };
        let rep = simulator::run(&cfg).unwrap();
        let b = erlang_b(10.0, 10.0 * s) * p_cached;
        let sigma = rep.blocking_prob.sigma_distance(b);
        passed &= sigma <= 3.0;
        detail.push_str(&format!("s={s}: {sigma:.1}σ "));
    }
    CriterionResult::new("A8", passed, format!("blocking vs Erlang-B — {detail}"))
}

/// A9 — diffusion approximation quality for non-Poisson arrivals,
/// flow π₁, L = 10, s = 1.
pub fn a9(suite: &Suite) -> CriterionResult {
    let curve = suite.pi1.overall_curve();
    let r = curve.r_breve(1.0);
    let alloc = suite.pi1.allocate(r).unwrap();
    let stats = suite.pi1.policy_stats(&alloc.policies).unwrap();
    let mut detail = String::new();
    let mut passed = true;
    for (arrivals, c2, tol, tag) in [
        (ArrivalProcess::Deterministic { lambda: 10.0 }, 0.0, 0.06, "D"),
        (ArrivalProcess::h2_burst(10.0), 2.0, 0.12, "H2"),
    ] {
        // the peakedness formula is consistent under Bernoulli thinning, so
        // the full-stream law and c² describe the thinned loss system
        let z = blocking::peakedness(&stats.law, c2).unwrap();
        let b_cond =
            blocking::diffusion_blocking(10.0, 10.0 * stats.mean_caching_time, z).unwrap();
        // predicted hit ratio over all arrivals: only cached arrivals can be
        // blocked, and a blocked arrival is a miss
        let diff = stats.hit_ratio * (1.0 - b_cond);
        let cfg = SimConfig {
            flow: suite.pi1.flow().clone(),
            policies: alloc.policies.clone(),
            arrivals,
            buffer: Some(10),
            n_arrivals: 1_000_000,
            seed: 3000,
            warmup_fraction: 0.1,
            record_caching_times: false,
        };
        let rep = simulator::run(&cfg).unwrap();
        let rel = (rep.hit_ratio.value - diff).abs() / rep.hit_ratio.value;
        passed &= rel <= tol;
        detail.push_str(&format!("{tag}: {:.2}% (tol {:.0}%) ", 100.0 * rel, 100.0 * tol));
    }
    CriterionResult::new("A9", passed, format!("hit-ratio error vs diffusion — {detail}"))
}

/// A10 — finite-buffer optimum across the three buffer regimes, flow π₂.
pub fn a10(suite: &Suite) -> CriterionResult {
    let curve = suite.pi2.overall_curve();
    let big = finite_opt::optimize(&curve, 10.0, 1.0, 1000.0, 100.0).unwrap();
    let big_ok = (big.s_star - 1.1).abs() <= 0.05 && (big.r_star - 1.0).abs() <= 0.02;
    let small = finite_opt::optimize(&curve, 10.0, 1.0, 1000.0, 1.0).unwrap();
    let asym = finite_opt::asymptotic_performance(&curve, 10.0, 1000.0, 1.0);
    let small_ok = (small.s_star - 0.1).abs() <= 0.02
        && (asym.small_buffer_throughput - 2000.0).abs() / 2000.0 <= 0.10;
    let mid = finite_opt::optimize(&curve, 10.0, 1.0, 1000.0, 20.0).unwrap();
    let r_target = curve.r_breve(mid.s_star);
    let alloc = suite.pi2.allocate(r_target).unwrap();
    let cfg = SimConfig {
        flow: suite.pi2.flow().clone(),
        policies: alloc.policies,
        arrivals: ArrivalProcess::Poisson { lambda: 10.0 },
        buffer: Some(20),
        n_arrivals: 1_000_000,
        seed: 4000,
        warmup_fraction: 0.1,
        record_caching_times: false,
    };
    let rep = simulator::run(&cfg).unwrap();
    let mid_rel = (rep.hit_ratio.value - mid.r_star).abs() / mid.r_star;
    let mid_ok = mid_rel <= 0.02;
    CriterionResult::new(
        "A10",
        big_ok && small_ok && mid_ok,
        format!(
            "L=100: s*={:.3}, r*={:.3}; L=1: s*={:.3}, R_pred={:.0}; L=20: sim vs theory {:.2}%",
            big.s_star,
            big.r_star,
            small.s_star,
            asym.small_buffer_throughput,
            100.0 * mid_rel
        ),
    )
}

/// A11 — throughput-vs-rate slopes: `B·(1−q)` bits in the demand-limited
/// regime (L = 200) and near-flat in the buffer-limited regime (L = 1).
pub fn a11(suite: &Suite) -> CriterionResult {
    let curve = suite.pi2.overall_curve();
    let slope = |ls: &[(f64, f64)]| {
        let n = ls.len() as f64;
        let mx = ls.iter().map(|p| p.0).sum::<f64>() / n;
        let my = ls.iter().map(|p| p.1).sum::<f64>() / n;
        ls.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
            / ls.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>()
    };
    let big: Vec<(f64, f64)> = (1..=10)
        .map(|k| {
            let lambda = 10.0 * k as f64;
            (lambda, finite_opt::optimize(&curve, lambda, 1.0, 1000.0, 200.0).unwrap().throughput)
        })
        .collect();
    let s_big = slope(&big);
    let small: Vec<(f64, f64)> = (2..=10)
        .map(|k| {
            let lambda = 10.0 * k as f64;
            (lambda, finite_opt::optimize(&curve, lambda, 1.0, 1000.0, 1.0).unwrap().throughput)
        })
        .collect();
    let s_small = slope(&small);
    let passed = (s_big - 1000.0).abs() / 1000.0 <= 0.05 && s_small.abs() <= 0.10 * 1000.0;
    CriterionResult::new(
        "A11",
        passed,
        format!("L=200 slope {s_big:.0} bits (ref 1000 ± 5%); L=1 slope {s_small:.1} bits (flatness bound 100)"),
    )
}

/// A12 — the quasi-concavity discriminant sweep in exact arithmetic.
pub fn a12() -> CriterionResult {
    let t0 = Instant::now();
    let spot = finite_opt::qc_discriminant(6, 1).unwrap()
        == num_rational::BigRational::new(1.into(), 60.into());
    let mut identity = true;
    for big_l in [6u32, 20, 35, 50] {
        let a = finite_opt::qc_coefficients(big_l).unwrap();
        for l in 1..=big_l - 5 {
            identity &= a[(big_l + l) as usize] == finite_opt::qc_discriminant(big_l, l).unwrap();
        }
    }
    let sweep = finite_opt::qc_verify(1000).unwrap();
    let dt = t0.elapsed().as_secs_f64();
    CriterionResult::new(
        "A12",
        spot && identity && sweep.witness.is_none() && dt < 600.0,
        format!(
            "Δ_6(1)=1/60 {spot}; coefficient identity L≤50 {identity}; {} pairs all ≥ 0, witness {:?}, {dt:.0} s",
            sweep.checked, sweep.witness
        ),
    )
}

/// A13 — both online controllers reach their offline oracles.
pub fn a13(suite: &Suite) -> CriterionResult {
    let target = 10.0 * 1000.0 * suite.pi2.overall_curve().s_star(0.7);
    let mut env = SimEnvironment::new(
        suite.pi2.flow().clone(),
        ArrivalProcess::Poisson { lambda: 10.0 },
        None,
        5000,
    )
    .unwrap();
    let state = controller::run_infinite(&mut env, target, 50, 20_000).unwrap();
    let s_err = (state.history.last().unwrap().1 / target - 1.0).abs();
    let inf_ok = state.converged && state.history.len() <= 50 && s_err <= 0.02;

    let oracle = finite_opt::optimize(&suite.pi2.overall_curve(), 10.0, 1.0, 1000.0, 10.0).unwrap();
    let mut env = SimEnvironment::new(
        suite.pi2.flow().clone(),
        ArrivalProcess::Poisson { lambda: 10.0 },
        Some(10),
        5001,
    )
    .unwrap();
    let state = controller::run_finite(&mut env, 80, 40_000).unwrap();
    let r_hat = state.history.last().unwrap().1;
    let fin_err = (r_hat - oracle.throughput).abs() / oracle.throughput;
    let fin_ok = fin_err <= 0.03;
    CriterionResult::new(
        "A13",
        inf_ok && fin_ok,
        format!(
            "infinite: converged in {} epochs, Ŝ error {:.1}%; finite: R̂ {:.0} vs oracle {:.0} ({:.1}%)",
            state.history.len().min(50),
            100.0 * s_err,
            r_hat,
            oracle.throughput,
            100.0 * fin_err
        ),
    )
}

/// A14 — empirical unimodality of r(L, s) on 512-point grids.
pub fn a14(suite: &Suite) -> CriterionResult {
    let mut passed = true;
    let mut worst = String::new();
    for name in ["pi1", "pi2", "pi3"] {
        let curve = suite.model(name).overall_curve();
        let hi = if curve.s_sup.is_finite() { curve.s_sup } else { curve.s_max() };
        for l in [1.0, 5.0, 10.0, 30.0, 100.0] {
            let vals: Vec<f64> = (1..=512)
                .map(|i| {
                    finite_opt::finite_hit_ratio(&curve, 10.0, 1.0, l, hi * i as f64 / 512.0)
                        .unwrap()
                })
                .collect();
            let mut rising = true;
            let mut ok = true;
            for w in vals.windows(2) {
                let d = w[1] - w[0];
                if d > 1e-12 && !rising {
                    ok = false;
                }
                if d < -1e-12 {
                    rising = false;
                }
            }
            if !ok {
                passed = false;
                worst.push_str(&format!("{name}/L={l} "));
            }
        }
    }
    CriterionResult::new(
        "A14",
        passed,
        if passed { "slope changes sign at most once on all 15 grids".into() } else { format!("violations: {worst}") },
    )
}

/// Runs every criterion in order.
pub fn run_all() -> Result<Vec<CriterionResult>> {
    let suite = Suite::new()?;
    Ok(vec![
        a1(),
        a2(),
        a3(),
        a4(),
        a5(),
        a6(&suite),
        a7(&suite),
        a8(&suite),
        a9(&suite),
        a10(&suite),
        a11(&suite),
        a12(),
        a13(&suite),
        a14(&suite),
    ])
}
