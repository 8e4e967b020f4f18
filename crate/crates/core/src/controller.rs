//! Online shadow-price adaptation ("arithmetic caching").
//!
//! Each cache node knows the per-class rate-cost envelopes (derivable from
//! the request-delay metadata carried by the content) but neither the
//! arrival rate, the class mix, nor the arrival variability. It prices
//! storage with a single scalar β, maps β to per-class policies locally,
//! measures its own cost or throughput over an epoch, and nudges β:
//! an integral step toward a storage-cost target with an infinite buffer,
//! or a doubling-then-golden-section search for the throughput maximum
//! with a finite buffer.

use serde::{Deserialize, Serialize};

use crate::ratecost::{CachePolicy, RateCostCurve};
use crate::rdi::RdiSpec;
use crate::{Error, Result};

/// Measurements a cache node can take locally over one epoch. No arrival
/// rate, class mix, or variability appears here.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    /// Measured mean storage cost Ŝ in bits (occupancy × file size).
    pub storage_cost: f64,
    pub storage_stderr: f64,
    /// Measured effective throughput R̂ in bits/second.
    pub throughput: f64,
    pub throughput_stderr: f64,
    /// Measured hit ratio (diagnostic only).
    pub hit_ratio: f64,
}

/// The world as the controller sees it: install policies, measure an epoch.
///
/// Implementations must not leak flow aggregates (λ, π, c²) — the
/// decentralization contract is that the controller works without them.
pub trait CacheEnvironment {
    /// Per-class request-delay specs, known locally from content metadata.
    fn class_specs(&self) -> &[RdiSpec];
    /// Per-class rate-cost envelopes derived from those specs.
    fn class_curves(&self) -> &[RateCostCurve];
    /// Runs one epoch of `window` arrivals under the given policies.
    fn run_epoch(&mut self, policies: &[CachePolicy], window: u64) -> Result<EpochStats>;
}

/// Slope-regularization width of the β → r map. Envelope segments with
/// marginal cost within ±μ/2 (relative) of β are filled proportionally, so
/// the map is continuous and the integral step can settle mid-segment. A
/// narrow ramp makes dŜ/dβ so steep near a segment price that the integral
/// step oscillates; 0.2 keeps the closed loop stable at the default step.
const PRICE_RAMP: f64 = 0.2;

/// Per-class hit-ratio targets for shadow price β: take every envelope
/// segment cheaper than β, and a proportional share of segments priced
/// at β within the regularization ramp.
pub fn beta_to_rates(curves: &[RateCostCurve], beta: f64) -> Vec<f64> {
    curves
        .iter()
        .map(|curve| {
            let verts = curve.envelope.vertices();
            let mut r = 0.0;
            for w in verts.windows(2) {
                let dr = w[1].r - w[0].r;
                if dr <= 0.0 {
                    continue;
                }
                let slope = (w[1].s - w[0].s) / dr;
                let fill = if slope <= 0.0 {
                    1.0
                } else {
                    ((beta - slope * (1.0 - 0.5 * PRICE_RAMP)) / (slope * PRICE_RAMP))
                        .clamp(0.0, 1.0)
                };
                r += dr * fill;
            }
            r
        })
        .collect()
}

/// Policies attaining the β-priced rates.
pub fn beta_to_policy(
    specs: &[RdiSpec],
    curves: &[RateCostCurve],
    beta: f64,
) -> Result<Vec<CachePolicy>> {
    if !(beta >= 0.0) {
        return Err(Error::BadConfig(format!("shadow price must be nonnegative, got {beta}")));
    }
    beta_to_rates(curves, beta)
        .iter()
        .zip(specs.iter().zip(curves))
        .map(|(&r, (spec, curve))| curve.policy_for(spec, r))
        .collect()
}

/// Trace of one controller run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ControllerState {
    /// Final shadow price.
    pub beta: f64,
    /// Final step size.
    pub delta_beta: f64,
    /// Arrivals per measurement epoch at the end of the run.
    pub window: u64,
    /// One `(β, measurement)` pair per epoch: Ŝ for the infinite-buffer
    /// controller, R̂ for the finite-buffer one.
    pub history: Vec<(f64, f64)>,
    pub converged: bool,
}

/// Infinite-buffer controller: drives measured storage cost Ŝ to
/// `target_storage` (bits) with the integral step
/// `β ← β + (1 − Ŝ/target)·δ_β`.
///
/// Converged when Ŝ is within 2% of target on two consecutive epochs.
pub fn run_infinite<E: CacheEnvironment>(
    env: &mut E,
    target_storage: f64,
    max_epochs: u32,
    window: u64,
) -> Result<ControllerState> {
    if !(target_storage >= 0.0) {
        return Err(Error::BadConfig(format!(
            "storage target must be nonnegative, got {target_storage}"
        )));
    }
    let mut beta = 1.0;
    let mut history = Vec::new();
    if target_storage == 0.0 {
        // nothing to cache: the all-skip fixed point
        let specs = env.class_specs().to_vec();
        let curves = env.class_curves().to_vec();
        let policies = beta_to_policy(&specs, &curves, 0.0)?;
        let stats = env.run_epoch(&policies, window)?;
        return Ok(ControllerState {
            beta: 0.0,
            delta_beta: 0.0,
            window,
            history: vec![(0.0, stats.storage_cost)],
            converged: stats.storage_cost == 0.0,
        });
    }
    let specs = env.class_specs().to_vec();
    let curves = env.class_curves().to_vec();
    let mut streak = 0;
    let mut delta = 0.1 * beta;
    for _ in 0..max_epochs {
        let policies = beta_to_policy(&specs, &curves, beta)?;
        let stats = env.run_epoch(&policies, window)?;
        history.push((beta, stats.storage_cost));
        let err = stats.storage_cost / target_storage - 1.0;
        if err.abs() <= 0.02 {
            streak += 1;
            if streak >= 2 {
                return Ok(ControllerState {
                    beta,
                    delta_beta: delta,
                    window,
                    history,
                    converged: true,
                });
            }
        } else {
            streak = 0;
        }
        delta = 0.1 * beta;
        beta = (beta - err * delta).max(1e-6);
    }
    Ok(ControllerState { beta, delta_beta: delta, window, history, converged: false })
}

/// Finite-buffer controller: maximizes measured throughput R̂(β).
///
/// Phase 1 doubles β until R̂ decreases (bracketing the maximum); phase 2
/// runs golden-section search on the bracket. Each noisy comparison is
/// accepted only when the confidence intervals separate; otherwise the
/// measurement window doubles and both points are re-measured.
pub fn run_finite<E: CacheEnvironment>(
    env: &mut E,
    max_epochs: u32,
    window: u64,
) -> Result<ControllerState> {
    let specs = env.class_specs().to_vec();
    let curves = env.class_curves().to_vec();
    let mut history = Vec::new();
    let mut epochs = 0u32;
    let mut window = window;

    let measure = |env: &mut E,
                       beta: f64,
                       window: u64,
                       epochs: &mut u32,
                       history: &mut Vec<(f64, f64)>|
     -> Result<(f64, f64)> {
        let policies = beta_to_policy(&specs, &curves, beta)?;
        let stats = env.run_epoch(&policies, window)?;
        *epochs += 1;
        history.push((beta, stats.throughput));
        Ok((stats.throughput, stats.throughput_stderr))
    };

    // Phase 1: doubling. Compare R̂(2^k) against R̂(2^{k+1}) with CI
    // separation; stop at the first accepted decrease.
    let mut beta_lo = 1.0f64;
    let mut beta_hi;
    let (mut r_prev, mut se_prev) = measure(env, beta_lo, window, &mut epochs, &mut history)?;
    let mut k = 1u32;
    loop {
        beta_hi = 2f64.powi(k as i32);
        let (mut r_cur, mut se_cur) = measure(env, beta_hi, window, &mut epochs, &mut history)?;
        let mut separated = (r_cur - r_prev).abs() > 2.0 * (se_cur + se_prev);
        while !separated && epochs < max_epochs && window < 1 << 22 {
            window *= 2;
            let (rp, sp) = measure(env, beta_lo, window, &mut epochs, &mut history)?;
            let (rc, sc) = measure(env, beta_hi, window, &mut epochs, &mut history)?;
            r_prev = rp;
            se_prev = sp;
            r_cur = rc;
            se_cur = sc;
            separated = (r_cur - r_prev).abs() > 2.0 * (se_cur + se_prev);
        }
        if r_cur < r_prev {
            break; // maximum bracketed in (beta_lo/2, beta_hi)
        }
        if epochs >= max_epochs || k >= 30 {
            // plateau: measurements never separated downward; treat the
            // last bracket as good enough
            break;
        }
        beta_lo = beta_hi;
        r_prev = r_cur;
        se_prev = se_cur;
        k += 1;
    }
    let (mut a, mut b) = ((beta_lo / 2.0).max(1e-3), beta_hi);

    // Phase 2: golden-section on the bracket with measured values.
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, _) = measure(env, c, window, &mut epochs, &mut history)?;
    let (mut fd, _) = measure(env, d, window, &mut epochs, &mut history)?;
    while epochs < max_epochs && (b - a) > 0.05 * b {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = measure(env, c, window, &mut epochs, &mut history)?.0;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = measure(env, d, window, &mut epochs, &mut history)?.0;
        }
    }
    let beta = 0.5 * (a + b);
    measure(env, beta, window, &mut epochs, &mut history)?;
    Ok(ControllerState {
        beta,
        delta_beta: 0.0,
        window,
        history,
        converged: true,
    })
}

/// A [`CacheEnvironment`] backed by the discrete-event simulator. The
/// flow internals stay private to honor the decentralization contract.
pub struct SimEnvironment {
    config: crate::simulator::SimConfig,
    specs: Vec<RdiSpec>,
    curves: Vec<RateCostCurve>,
    epoch: u64,
}

impl SimEnvironment {
    pub fn new(
        flow: crate::allocator::FlowSpec,
        arrivals: crate::simulator::ArrivalProcess,
        buffer: Option<u32>,
        seed: u64,
    ) -> Result<Self> {
        let specs: Vec<RdiSpec> = flow.classes.iter().map(|c| c.spec.clone()).collect();
        let curves = specs
            .iter()
            .map(|s| RateCostCurve::compute(s, 2048))
            .collect::<Result<Vec<_>>>()?;
        let n = flow.classes.len();
        let config = crate::simulator::SimConfig {
            flow,
            policies: vec![CachePolicy::skip(); n],
            arrivals,
            buffer,
            n_arrivals: 10_000,
            seed,
            warmup_fraction: 0.1,
            record_caching_times: false,
        };
        Ok(SimEnvironment { config, specs, curves, epoch: 0 })
    }
}

impl CacheEnvironment for SimEnvironment {
    fn class_specs(&self) -> &[RdiSpec] {
        &self.specs
    }

    fn class_curves(&self) -> &[RateCostCurve] {
        &self.curves
    }

    fn run_epoch(&mut self, policies: &[CachePolicy], window: u64) -> Result<EpochStats> {
        self.config.policies = policies.to_vec();
        self.config.n_arrivals = window.max(10_000);
        self.config.seed = self.config.seed.wrapping_add(self.epoch.wrapping_mul(0x9E37_79B9));
        self.epoch += 1;
        let rep = crate::simulator::run(&self.config)?;
        let file_bits = self.config.flow.file_size_bits;
        let lambda = self.config.arrivals.lambda();
        Ok(EpochStats {
            storage_cost: rep.mean_occupancy.value * file_bits,
            storage_stderr: rep.mean_occupancy.stderr * file_bits,
            throughput: rep.effective_throughput,
            throughput_stderr: lambda * file_bits * rep.hit_ratio.stderr,
            hit_ratio: rep.hit_ratio.value,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::allocator::FlowModel;
    use crate::presets;
    use crate::ratecost::CacheDuration;
    use crate::simulator::ArrivalProcess;

    fn pi2_env(buffer: Option<u32>) -> SimEnvironment {
        SimEnvironment::new(
            presets::flow("pi2").unwrap(),
            ArrivalProcess::Poisson { lambda: 10.0 },
            buffer,
            42,
        )
        .unwrap()
    }

    #[test]
    fn price_extremes_map_to_skip_and_saturation() {
        let env = pi2_env(None);
        let skip = beta_to_policy(env.class_specs(), env.class_curves(), 1e-9).unwrap();
        assert!(skip
            .iter()
            .all(|p| p.atoms() == [(CacheDuration::Skip, 1.0)]));
        let full = beta_to_rates(env.class_curves(), 1e6);
        for (r, curve) in full.iter().zip(env.class_curves()) {
            assert!((r - curve.r_sup).abs() < 1e-9, "r = {r} vs sup {}", curve.r_sup);
        }
    }

    #[test]
    fn priced_rates_are_monotone_and_continuous_in_beta() {
        let env = pi2_env(None);
        let mut prev: Option<Vec<f64>> = None;
        let mut beta = 0.05;
        while beta < 8.0 {
            // step (1%) well inside the ramp width, so per-step jumps stay
            // a fraction of any one segment
            let rates = beta_to_rates(env.class_curves(), beta);
            if let Some(p) = &prev {
                for (a, b) in p.iter().zip(&rates) {
                    assert!(b + 1e-12 >= *a, "rate decreased at beta = {beta}");
                    // continuity: one small β step cannot jump a whole class
                    assert!(b - a < 0.35, "jump {} at beta = {beta}", b - a);
                }
            }
            prev = Some(rates);
            beta *= 1.01;
        }
    }

    #[test]
    fn infinite_controller_reaches_storage_target() {
        // offline oracle: S = λ·B·s*(0.7) = 10·1000·0.6 = 6000 bits
        let model = FlowModel::new(presets::flow("pi2").unwrap()).unwrap();
        let target = 10.0 * 1000.0 * model.overall_curve().s_star(0.7);
        let mut env = pi2_env(None);
        let state = run_infinite(&mut env, target, 50, 20_000).unwrap();
        assert!(state.converged, "history: {:?}", state.history);
        let (_, s_hat) = *state.history.last().unwrap();
        assert!((s_hat / target - 1.0).abs() <= 0.02);
        // the converged price should sit near the offline shadow price 1
        let offline_beta = model.allocate(0.7).unwrap().beta;
        assert!(
            (state.beta - offline_beta).abs() / offline_beta < 0.25,
            "beta {} vs offline {}",
            state.beta,
            offline_beta
        );
    }

    #[test]
    fn zero_target_yields_all_skip() {
        let mut env = pi2_env(None);
        let state = run_infinite(&mut env, 0.0, 10, 10_000).unwrap();
        assert!(state.converged);
        assert_eq!(state.beta, 0.0);
        assert_eq!(state.history.last().unwrap().1, 0.0);
    }

    #[test]
    fn finite_controller_approaches_offline_optimum() {
        let model = FlowModel::new(presets::flow("pi2").unwrap()).unwrap();
        let oracle =
            crate::finite_opt::optimize(&model.overall_curve(), 10.0, 1.0, 1000.0, 10.0).unwrap();
        let mut env = pi2_env(Some(10));
        let state = run_finite(&mut env, 60, 20_000).unwrap();
        let best = state.history.iter().map(|h| h.1).fold(f64::MIN, f64::max);
        assert!(
            best >= 0.95 * oracle.throughput,
            "best measured {best} vs oracle {}",
            oracle.throughput
        );
        let (_, final_r) = *state.history.last().unwrap();
        assert!(
            final_r >= 0.93 * oracle.throughput,
            "final {final_r} vs oracle {}",
            oracle.throughput
        );
    }
}
