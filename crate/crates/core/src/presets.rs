//! The standard content classes `p1`..`p10` and flows `pi1`..`pi3`.
//!
//! The first five classes are the base families; the rest are built from
//! them with the transforms (a thinned exponential, a compressed uniform, a
//! shifted triangular, a thinned Pareto, and a thinned arcsine with part of
//! the never-mass moved to an atom at 1). The flows mix them with equal
//! weights; arrival defaults are rate 10 items/s, 1000-bit files, Poisson
//! variability.

use crate::allocator::{FlowClass, FlowSpec};
use crate::rdi::{BaseFamily, RdiSpec, Transform};
use crate::{Error, Result};

/// Default arrival rate for the preset flows, items per second.
pub const DEFAULT_LAMBDA: f64 = 10.0;
/// Default file size, bits.
pub const DEFAULT_FILE_SIZE_BITS: f64 = 1000.0;

/// One of the named content classes `"p1"`..`"p10"`.
pub fn class_spec(name: &str) -> Result<RdiSpec> {
    match name {
        "p1" => RdiSpec::base(BaseFamily::Exponential { rate: 1.0 }),
        "p2" => RdiSpec::base(BaseFamily::Uniform { lo: 0.0, hi: 1.0 }),
        "p3" => RdiSpec::base(BaseFamily::Triangular { lo: 0.0, hi: 2.0, mode: 1.0 }),
        "p4" => RdiSpec::base(BaseFamily::Pareto { shape: 1.0, scale: 1.0 }),
        "p5" => RdiSpec::base(BaseFamily::Arcsine { width: 2.0 }),
        "p6" => RdiSpec::new(
            BaseFamily::Exponential { rate: 1.0 },
            vec![Transform::DensityScale { keep: 0.6 }],
        ),
        "p7" => RdiSpec::new(
            BaseFamily::Uniform { lo: 0.0, hi: 1.0 },
            vec![Transform::TimeScale { factor: 0.5 }],
        ),
        "p8" => RdiSpec::new(
            BaseFamily::Triangular { lo: 0.0, hi: 2.0, mode: 1.0 },
            vec![Transform::TimeShift { shift: 1.0 }],
        ),
        "p9" => RdiSpec::new(
            BaseFamily::Pareto { shape: 1.0, scale: 1.0 },
            vec![Transform::DensityScale { keep: 0.4 }],
        ),
        "p10" => RdiSpec::new(
            BaseFamily::Arcsine { width: 2.0 },
            vec![
                Transform::DensityScale { keep: 0.8 },
                Transform::RateShift { mass: 0.2, at: 1.0 },
            ],
        ),
        other => Err(Error::BadConfig(format!("unknown content class preset: {other}"))),
    }
}

/// All ten classes in order.
pub fn all_classes() -> Vec<RdiSpec> {
    (1..=10)
        .map(|i| class_spec(&format!("p{i}")).expect("preset classes are valid"))
        .collect()
}

/// Class weights of the named flow over `p1`..`p10`.
pub fn flow_weights(name: &str) -> Result<[f64; 10]> {
    match name {
        "pi1" => Ok([0.1; 10]),
        "pi2" => Ok([0.2, 0.2, 0.2, 0.0, 0.0, 0.0, 0.2, 0.2, 0.0, 0.0]),
        "pi3" => Ok([0.0, 0.0, 0.0, 0.0, 0.0, 0.2, 0.2, 0.2, 0.2, 0.2]),
        other => Err(Error::BadConfig(format!("unknown flow preset: {other}"))),
    }
}

/// One of the named flows `"pi1"`..`"pi3"` with default arrival parameters.
/// Zero-weight classes are omitted.
pub fn flow(name: &str) -> Result<FlowSpec> {
    flow_with(name, DEFAULT_LAMBDA, DEFAULT_FILE_SIZE_BITS, 1.0)
}

/// A named flow with explicit arrival rate, file size, and variability.
pub fn flow_with(name: &str, lambda: f64, file_size_bits: f64, c2: f64) -> Result<FlowSpec> {
    let weights = flow_weights(name)?;
    let classes = all_classes()
        .into_iter()
        .zip(weights)
        .filter(|(_, w)| *w > 0.0)
        .map(|(spec, pi)| FlowClass { pi, spec })
        .collect();
    FlowSpec::new(classes, lambda, file_size_bits, c2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classes_have_expected_moments() {
        let expect_q = [0.0, 0.0, 0.0, 0.0, 0.0, 0.4, 0.0, 0.0, 0.6, 0.0];
        for (i, spec) in all_classes().iter().enumerate() {
            let m = spec.moments();
            assert!(
                (m.undemand_prob - expect_q[i]).abs() < 1e-12,
                "p{}: q = {}",
                i + 1,
                m.undemand_prob
            );
        }
        // p7 is uniform on [0, 2], p8 triangular on [1, 3]
        let p7 = class_spec("p7").unwrap();
        assert!((p7.moments().t_sup - 2.0).abs() < 1e-12);
        assert!((p7.moments().mean_delay - 1.0).abs() < 1e-12);
        let p8 = class_spec("p8").unwrap();
        assert_eq!(p8.moments().t_inf, 1.0);
        assert!((p8.moments().mean_delay - 2.0).abs() < 1e-12);
        // p10 keeps all demand: the thinned-out mass returns as an atom at 1
        let p10 = class_spec("p10").unwrap();
        assert!(p10.undemand_prob().abs() < 1e-12);
        assert_eq!(p10.atoms(), &[(1.0, 0.2)]);
    }

    #[test]
    fn feasible_sups_of_flows() {
        assert!((flow("pi1").unwrap().feasible_r_sup() - 0.9).abs() < 1e-12);
        assert!((flow("pi2").unwrap().feasible_r_sup() - 1.0).abs() < 1e-12);
        assert!((flow("pi3").unwrap().feasible_r_sup() - 0.8).abs() < 1e-12);
    }

    #[test]
    fn unknown_presets_are_rejected() {
        assert!(class_spec("p11").is_err());
        assert!(flow("pi4").is_err());
    }
}
