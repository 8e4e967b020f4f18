//! Request-delay distributions.
//!
//! The request delay of a content item is the time between its broadcast and
//! the user's request for it; with probability `q` the item is never
//! requested at all. A [`RdiSpec`] is a base family plus an ordered stack of
//! transforms (time scaling/shifting, demand-mass scaling, rate shifts that
//! move never-mass onto a point mass). The stack is normalized at
//! construction into a canonical form — affine-mapped continuous parts, an
//! explicit atom list, and the never-mass — so that pdf/cdf/quantile and the
//! partial first moment stay closed-form wherever the family admits one.

use crate::{Error, Result};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// One of the supported base request-delay families.
///
/// All continuous families carry zero never-mass; never-mass enters through
/// `DensityScale` transforms or mixture components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum BaseFamily {
    /// Rate-`rate` exponential on `[0, ∞)`.
    Exponential { rate: f64 },
    /// Uniform on `[lo, hi]`.
    Uniform { lo: f64, hi: f64 },
    /// Triangular on `[lo, hi]` with the given mode.
    Triangular { lo: f64, hi: f64, mode: f64 },
    /// Pareto with tail index `shape` on `[scale, ∞)`.
    Pareto { shape: f64, scale: f64 },
    /// Arcsine on `(0, width)` (density diverges at both ends).
    Arcsine { width: f64 },
    /// Deterministic request delay.
    PointMass { at: f64 },
    /// Weighted mixture of complete specs.
    Mixture { components: Vec<MixtureComponent> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureComponent {
    pub weight: f64,
    pub spec: RdiSpec,
}

/// A transform applied to the distribution below it in the stack.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Transform {
    /// `X -> X / factor`: compressing the time axis by `factor` divides
    /// every quantile by `factor`. Requires `factor > 0`.
    TimeScale { factor: f64 },
    /// `X -> X + shift` for demanded items. Requires `shift >= 0`.
    TimeShift { shift: f64 },
    /// Keep the item demanded with probability `keep`, otherwise it is never
    /// requested. Requires `0 < keep <= 1`.
    DensityScale { keep: f64 },
    /// Move `mass` of the never-probability onto a point mass at `at`.
    /// Requires `0 <= mass <= q` of the inner spec and `at >= 0`.
    RateShift { mass: f64, at: f64 },
}

/// Summary moments of a request-delay distribution.
///
/// `mean_delay` is the unconditional first moment over the demanded mass,
/// `∫ x dP(x)` on `[0, ∞)`; it is `+∞` for heavy-tailed families
/// (e.g. Pareto with shape ≤ 1) and downstream logic branches on
/// `is_infinite()` rather than on a large float.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    /// Probability that the item is never requested.
    pub undemand_prob: f64,
    /// `∫₀^∞ x dP(x)` (may be `+∞`).
    pub mean_delay: f64,
    /// Essential infimum of the demanded support.
    pub t_inf: f64,
    /// Essential supremum of the demanded support (may be `+∞`).
    pub t_sup: f64,
}

/// Outcome of sampling a request delay.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RequestDelay {
    /// The item is requested after this many seconds.
    At(f64),
    /// The item is never requested.
    Never,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum ContinuousKind {
    Exponential { rate: f64 },
    Uniform { lo: f64, hi: f64 },
    Triangular { lo: f64, hi: f64, mode: f64 },
    Pareto { shape: f64, scale: f64 },
    Arcsine { width: f64 },
}

/// An affinely mapped continuous family: the part contributes
/// `weight / scale * pdf_base((x - shift) / scale)` to the density.
#[derive(Debug, Clone, PartialEq)]
struct ContinuousPart {
    weight: f64,
    kind: ContinuousKind,
    scale: f64,
    shift: f64,
}

/// A validated request-delay distribution.
///
/// Immutable after construction; every accessor is reentrant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RdiSpecRepr", into = "RdiSpecRepr")]
pub struct RdiSpec {
    base: BaseFamily,
    transforms: Vec<Transform>,
    #[serde(skip)]
    parts: Vec<ContinuousPart>,
    /// `(location, weight)` pairs, sorted by location.
    #[serde(skip)]
    atoms: Vec<(f64, f64)>,
    #[serde(skip)]
    never: f64,
}

/// Wire shape: `{"base": {...}, "transforms": [...]}`.
#[derive(Serialize, Deserialize)]
struct RdiSpecRepr {
    base: BaseFamily,
    #[serde(default)]
    transforms: Vec<Transform>,
}

impl TryFrom<RdiSpecRepr> for RdiSpec {
    type Error = Error;
    fn try_from(repr: RdiSpecRepr) -> Result<Self> {
        RdiSpec::new(repr.base, repr.transforms)
    }
}

impl From<RdiSpec> for RdiSpecRepr {
    fn from(spec: RdiSpec) -> Self {
        RdiSpecRepr { base: spec.base, transforms: spec.transforms }
    }
}

impl ContinuousKind {
    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSpec(msg));
        match *self {
            ContinuousKind::Exponential { rate } if !(rate > 0.0) => {
                bad(format!("exponential rate must be positive, got {rate}"))
            }
            ContinuousKind::Uniform { lo, hi } if !(lo >= 0.0 && hi > lo) => {
                bad(format!("uniform needs 0 <= lo < hi, got [{lo}, {hi}]"))
            }
            ContinuousKind::Triangular { lo, hi, mode }
                if !(lo >= 0.0 && hi > lo && mode >= lo && mode <= hi) =>
            {
                bad(format!("triangular needs lo <= mode <= hi, got [{lo}, {hi}] mode {mode}"))
            }
            ContinuousKind::Pareto { shape, scale } if !(shape > 0.0 && scale > 0.0) => {
                bad(format!("pareto needs positive shape and scale, got {shape}, {scale}"))
            }
            ContinuousKind::Arcsine { width } if !(width > 0.0) => {
                bad(format!("arcsine width must be positive, got {width}"))
            }
            _ => Ok(()),
        }
    }

    /// cdf of the standardized family (no never-mass).
    fn cdf(&self, x: f64) -> f64 {
        match *self {
            ContinuousKind::Exponential { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-rate * x).exp_m1()
                }
            }
            ContinuousKind::Uniform { lo, hi } => ((x - lo) / (hi - lo)).clamp(0.0, 1.0),
            ContinuousKind::Triangular { lo, hi, mode } => {
                if x <= lo {
                    0.0
                } else if x >= hi {
                    1.0
                } else if x <= mode {
                    (x - lo) * (x - lo) / ((hi - lo) * (mode - lo))
                } else {
                    1.0 - (hi - x) * (hi - x) / ((hi - lo) * (hi - mode))
                }
            }
            ContinuousKind::Pareto { shape, scale } => {
                if x <= scale {
                    0.0
                } else {
                    1.0 - (scale / x).powf(shape)
                }
            }
            ContinuousKind::Arcsine { width } => {
                if x <= 0.0 {
                    0.0
                } else if x >= width {
                    1.0
                } else {
                    2.0 / std::f64::consts::PI * (x / width).sqrt().asin()
                }
            }
        }
    }

    fn pdf(&self, x: f64) -> f64 {
        match *self {
            ContinuousKind::Exponential { rate } => {
                if x < 0.0 {
                    0.0
                } else {
                    rate * (-rate * x).exp()
                }
            }
            ContinuousKind::Uniform { lo, hi } => {
                if x < lo || x > hi {
                    0.0
                } else {
                    1.0 / (hi - lo)
                }
            }
            ContinuousKind::Triangular { lo, hi, mode } => {
                if x < lo || x > hi {
                    0.0
                } else if x <= mode {
                    2.0 * (x - lo) / ((hi - lo) * (mode - lo))
                } else {
                    2.0 * (hi - x) / ((hi - lo) * (hi - mode))
                }
            }
            ContinuousKind::Pareto { shape, scale } => {
                if x < scale {
                    0.0
                } else {
                    shape * scale.powf(shape) / x.powf(shape + 1.0)
                }
            }
            ContinuousKind::Arcsine { width } => {
                if x <= 0.0 || x >= width {
                    0.0
                } else {
                    1.0 / (std::f64::consts::PI * (x * (width - x)).sqrt())
                }
            }
        }
    }

    /// d/dx pdf, where the density is differentiable.
    fn pdf_derivative(&self, x: f64) -> f64 {
        match *self {
            ContinuousKind::Exponential { rate } => {
                if x < 0.0 {
                    0.0
                } else {
                    -rate * rate * (-rate * x).exp()
                }
            }
            ContinuousKind::Uniform { .. } => 0.0,
            ContinuousKind::Triangular { lo, hi, mode } => {
                if x < lo || x > hi {
                    0.0
                } else if x <= mode {
                    2.0 / ((hi - lo) * (mode - lo))
                } else {
                    -2.0 / ((hi - lo) * (hi - mode))
                }
            }
            ContinuousKind::Pareto { shape, scale } => {
                if x < scale {
                    0.0
                } else {
                    -(shape + 1.0) * shape * scale.powf(shape) / x.powf(shape + 2.0)
                }
            }
            ContinuousKind::Arcsine { width } => {
                if x <= 0.0 || x >= width {
                    0.0
                } else {
                    let g = x * (width - x);
                    -(width - 2.0 * x) / (2.0 * std::f64::consts::PI * g.powf(1.5))
                }
            }
        }
    }

    fn quantile(&self, z: f64) -> f64 {
        let z = z.clamp(0.0, 1.0);
        match *self {
            ContinuousKind::Exponential { rate } => {
                if z >= 1.0 {
                    f64::INFINITY
                } else {
                    -(-z).ln_1p() / rate
                }
            }
            ContinuousKind::Uniform { lo, hi } => lo + z * (hi - lo),
            ContinuousKind::Triangular { lo, hi, mode } => {
                let split = (mode - lo) / (hi - lo);
                if z <= split {
                    lo + (z * (hi - lo) * (mode - lo)).sqrt()
                } else {
                    hi - ((1.0 - z) * (hi - lo) * (hi - mode)).sqrt()
                }
            }
            ContinuousKind::Pareto { shape, scale } => {
                if z >= 1.0 {
                    f64::INFINITY
                } else {
                    scale * (1.0 - z).powf(-1.0 / shape)
                }
            }
            ContinuousKind::Arcsine { width } => {
                let s = (std::f64::consts::FRAC_PI_2 * z).sin();
                width * s * s
            }
        }
    }

    /// `∫₀^x u p(u) du` of the standardized family.
    fn partial_first_moment(&self, x: f64) -> f64 {
        match *self {
            ContinuousKind::Exponential { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    1.0 / rate - (-rate * x).exp() * (x + 1.0 / rate)
                }
            }
            ContinuousKind::Uniform { lo, hi } => {
                let x = x.clamp(lo, hi);
                (x * x - lo * lo) / (2.0 * (hi - lo))
            }
            ContinuousKind::Triangular { lo, hi, mode } => {
                let c = x.clamp(lo, hi);
                // ∫ u * 2(u-lo)/d1 du on the rising branch, mirrored on the fall
                let d1 = (hi - lo) * (mode - lo);
                let d2 = (hi - lo) * (hi - mode);
                let rise = |u: f64| (2.0 * u.powi(3) / 3.0 - lo * u * u) / d1;
                let fall = |u: f64| (hi * u * u - 2.0 * u.powi(3) / 3.0) / d2;
                if c <= mode {
                    rise(c) - rise(lo)
                } else {
                    (rise(mode) - rise(lo)) + (fall(c) - fall(mode))
                }
            }
            ContinuousKind::Pareto { shape, scale } => {
                if x <= scale {
                    0.0
                } else if (shape - 1.0).abs() < 1e-12 {
                    scale * (x / scale).ln()
                } else {
                    shape * scale / (shape - 1.0) * (1.0 - (scale / x).powf(shape - 1.0))
                }
            }
            ContinuousKind::Arcsine { width } => {
                let x = x.clamp(0.0, width);
                0.5 * width * self.cdf(x) - (x * (width - x)).sqrt() / std::f64::consts::PI
            }
        }
    }

    /// Unconditional mean, `+∞` for Pareto with shape ≤ 1.
    fn mean(&self) -> f64 {
        match *self {
            ContinuousKind::Exponential { rate } => 1.0 / rate,
            ContinuousKind::Uniform { lo, hi } => 0.5 * (lo + hi),
            ContinuousKind::Triangular { lo, hi, mode } => (lo + hi + mode) / 3.0,
            ContinuousKind::Pareto { shape, scale } => {
                if shape <= 1.0 {
                    f64::INFINITY
                } else {
                    shape * scale / (shape - 1.0)
                }
            }
            ContinuousKind::Arcsine { width } => 0.5 * width,
        }
    }

    fn support(&self) -> (f64, f64) {
        match *self {
            ContinuousKind::Exponential { .. } => (0.0, f64::INFINITY),
            ContinuousKind::Uniform { lo, hi } => (lo, hi),
            ContinuousKind::Triangular { lo, hi, .. } => (lo, hi),
            ContinuousKind::Pareto { scale, .. } => (scale, f64::INFINITY),
            ContinuousKind::Arcsine { width } => (0.0, width),
        }
    }
}

impl ContinuousPart {
    fn to_local(&self, x: f64) -> f64 {
        (x - self.shift) / self.scale
    }

    fn pdf(&self, x: f64) -> f64 {
        self.weight / self.scale * self.kind.pdf(self.to_local(x))
    }

    fn pdf_derivative(&self, x: f64) -> f64 {
        self.weight / (self.scale * self.scale) * self.kind.pdf_derivative(self.to_local(x))
    }

    /// Demanded mass of this part at or below `x`.
    fn mass_below(&self, x: f64) -> f64 {
        self.weight * self.kind.cdf(self.to_local(x))
    }

    /// `∫₀^x u dP(u)` restricted to this part.
    fn partial_first_moment(&self, x: f64) -> f64 {
        let y = self.to_local(x);
        self.weight * (self.scale * self.kind.partial_first_moment(y) + self.shift * self.kind.cdf(y))
    }

    fn mean(&self) -> f64 {
        let m = self.kind.mean();
        if m.is_infinite() {
            f64::INFINITY
        } else {
            self.weight * (self.scale * m + self.shift)
        }
    }

    fn support(&self) -> (f64, f64) {
        let (lo, hi) = self.kind.support();
        (self.scale * lo + self.shift, self.scale * hi + self.shift)
    }
}

impl RdiSpec {
    /// Validates the base family and transform stack and normalizes them.
    pub fn new(base: BaseFamily, transforms: Vec<Transform>) -> Result<Self> {
        let (mut parts, mut atoms, mut never) = Self::canonicalize_base(&base)?;
        for t in &transforms {
            match *t {
                Transform::TimeScale { factor } => {
                    if !(factor > 0.0) {
                        return Err(Error::InvalidSpec(format!(
                            "time-scale factor must be positive, got {factor}"
                        )));
                    }
                    for p in &mut parts {
                        p.scale /= factor;
                        p.shift /= factor;
                    }
                    for a in &mut atoms {
                        a.0 /= factor;
                    }
                }
                Transform::TimeShift { shift } => {
                    if !(shift >= 0.0) {
                        return Err(Error::InvalidSpec(format!(
                            "time shift must be nonnegative, got {shift}"
                        )));
                    }
                    for p in &mut parts {
                        p.shift += shift;
                    }
                    for a in &mut atoms {
                        a.0 += shift;
                    }
                }
                Transform::DensityScale { keep } => {
                    if !(keep > 0.0 && keep <= 1.0) {
                        return Err(Error::InvalidSpec(format!(
                            "density-scale keep probability must be in (0, 1], got {keep}"
                        )));
                    }
                    for p in &mut parts {
                        p.weight *= keep;
                    }
                    for a in &mut atoms {
                        a.1 *= keep;
                    }
                    never = 1.0 - keep * (1.0 - never);
                }
                Transform::RateShift { mass, at } => {
                    if !(mass >= 0.0 && mass <= never + 1e-12) {
                        return Err(Error::InvalidSpec(format!(
                            "rate-shift mass {mass} exceeds available never-mass {never}"
                        )));
                    }
                    if !(at >= 0.0) {
                        return Err(Error::InvalidSpec(format!(
                            "rate-shift location must be nonnegative, got {at}"
                        )));
                    }
                    never = (never - mass).max(0.0);
                    atoms.push((at, mass));
                }
            }
        }
        atoms.retain(|a| a.1 > 0.0);
        atoms.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        // merge atoms sharing a location
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
        for (loc, w) in atoms {
            match merged.last_mut() {
                Some(last) if (last.0 - loc).abs() <= 1e-12 * (1.0 + loc.abs()) => last.1 += w,
                _ => merged.push((loc, w)),
            }
        }
        let spec = RdiSpec { base, transforms, parts, atoms: merged, never };
        let total = spec.parts.iter().map(|p| p.weight).sum::<f64>()
            + spec.atoms.iter().map(|a| a.1).sum::<f64>()
            + spec.never;
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidSpec(format!("total mass {total} != 1")));
        }
        Ok(spec)
    }

    /// Convenience constructor for a bare base family.
    pub fn base(base: BaseFamily) -> Result<Self> {
        Self::new(base, Vec::new())
    }

    fn canonicalize_base(base: &BaseFamily) -> Result<(Vec<ContinuousPart>, Vec<(f64, f64)>, f64)> {
        match base {
            BaseFamily::Exponential { rate } => {
                let kind = ContinuousKind::Exponential { rate: *rate };
                kind.validate()?;
                Ok((vec![ContinuousPart { weight: 1.0, kind, scale: 1.0, shift: 0.0 }], vec![], 0.0))
            }
            BaseFamily::Uniform { lo, hi } => {
                let kind = ContinuousKind::Uniform { lo: *lo, hi: *hi };
                kind.validate()?;
                Ok((vec![ContinuousPart { weight: 1.0, kind, scale: 1.0, shift: 0.0 }], vec![], 0.0))
            }
            BaseFamily::Triangular { lo, hi, mode } => {
                let kind = ContinuousKind::Triangular { lo: *lo, hi: *hi, mode: *mode };
                kind.validate()?;
                Ok((vec![ContinuousPart { weight: 1.0, kind, scale: 1.0, shift: 0.0 }], vec![], 0.0))
            }
            BaseFamily::Pareto { shape, scale } => {
                let kind = ContinuousKind::Pareto { shape: *shape, scale: *scale };
                kind.validate()?;
                Ok((vec![ContinuousPart { weight: 1.0, kind, scale: 1.0, shift: 0.0 }], vec![], 0.0))
            }
            BaseFamily::Arcsine { width } => {
                let kind = ContinuousKind::Arcsine { width: *width };
                kind.validate()?;
                Ok((vec![ContinuousPart { weight: 1.0, kind, scale: 1.0, shift: 0.0 }], vec![], 0.0))
            }
            BaseFamily::PointMass { at } => {
                if !(*at >= 0.0) {
                    return Err(Error::InvalidSpec(format!(
                        "point mass location must be nonnegative, got {at}"
                    )));
                }
                Ok((vec![], vec![(*at, 1.0)], 0.0))
            }
            BaseFamily::Mixture { components } => {
                if components.is_empty() {
                    return Err(Error::InvalidSpec("mixture needs at least one component".into()));
                }
                let wsum: f64 = components.iter().map(|c| c.weight).sum();
                if components.iter().any(|c| c.weight < 0.0) || (wsum - 1.0).abs() > 1e-9 {
                    return Err(Error::InvalidSpec(format!(
                        "mixture weights must be nonnegative and sum to 1, got sum {wsum}"
                    )));
                }
                let mut parts = Vec::new();
                let mut atoms = Vec::new();
                let mut never = 0.0;
                for c in components {
                    for p in &c.spec.parts {
                        let mut p = p.clone();
                        p.weight *= c.weight;
                        parts.push(p);
                    }
                    for &(loc, w) in &c.spec.atoms {
                        atoms.push((loc, w * c.weight));
                    }
                    never += c.weight * c.spec.never;
                }
                Ok((parts, atoms, never))
            }
        }
    }

    /// Probability that the item is never requested (`q`).
    pub fn undemand_prob(&self) -> f64 {
        self.never
    }

    /// Point masses on `[0, ∞)` as `(location, weight)` pairs, sorted.
    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    /// Continuous density at `x ≥ 0` (atoms excluded; see [`Self::atoms`]).
    pub fn pdf(&self, x: f64) -> f64 {
        debug_assert!(x >= 0.0, "pdf queried at negative delay");
        if x < 0.0 {
            return 0.0;
        }
        self.parts.iter().map(|p| p.pdf(x)).sum()
    }

    /// Derivative of the continuous density, where defined.
    pub fn pdf_derivative(&self, x: f64) -> f64 {
        self.parts.iter().map(|p| p.pdf_derivative(x)).sum()
    }

    /// Full cdf including the never-mass: `cdf(0⁻) = q`, `cdf(∞) = 1`.
    /// Atoms at or below `x` are included (right-continuity).
    pub fn cdf(&self, x: f64) -> f64 {
        let cont: f64 = self.parts.iter().map(|p| p.mass_below(x)).sum();
        let atom: f64 = self.atoms.iter().take_while(|a| a.0 <= x).map(|a| a.1).sum();
        (self.never + cont + atom).min(1.0)
    }

    /// Demanded mass at or below `x`, i.e. `cdf(x) − q`.
    pub fn demand_cdf(&self, x: f64) -> f64 {
        self.cdf(x) - self.never
    }

    /// `∫₀^x u dP(u)` over the demanded mass (atoms at or below `x`
    /// included).
    pub fn partial_first_moment(&self, x: f64) -> f64 {
        let cont: f64 = self.parts.iter().map(|p| p.partial_first_moment(x)).sum();
        let atom: f64 = self.atoms.iter().take_while(|a| a.0 <= x).map(|a| a.0 * a.1).sum();
        cont + atom
    }

    /// Generalized inverse `inf { x : cdf(x) >= z }` for `q <= z <= 1`.
    pub fn quantile(&self, z: f64) -> Result<f64> {
        if z > 1.0 + 1e-12 {
            return Err(Error::Domain(format!("quantile probability {z} > 1")));
        }
        if z < self.never - 1e-12 {
            return Err(Error::Domain(format!(
                "request below undemand mass: z = {z} < q = {}",
                self.never
            )));
        }
        let z = z.clamp(self.never, 1.0);
        if z <= self.never {
            // leftmost support point
            return Ok(self.t_inf());
        }
        // single continuous part and no atoms: closed form
        if self.atoms.is_empty() && self.parts.len() == 1 {
            let p = &self.parts[0];
            let local = p.kind.quantile((z - self.never) / p.weight);
            return Ok(p.scale * local + p.shift);
        }
        if (z - 1.0).abs() < 1e-15 {
            let sup = self.t_sup();
            if sup.is_infinite() {
                // fall through to bisection against an expanding bracket
            } else {
                return Ok(sup);
            }
        }
        let mut hi = 1.0_f64.max(self.t_inf() * 2.0);
        let sup = self.t_sup();
        if sup.is_finite() {
            hi = sup;
        } else {
            let mut guard = 0;
            while self.cdf(hi) < z && guard < 200 {
                hi *= 2.0;
                guard += 1;
            }
        }
        Ok(crate::numeric::bisect_nondecreasing(&|x| self.cdf(x), z, 0.0, hi))
    }

    fn t_inf(&self) -> f64 {
        let mut t = f64::INFINITY;
        for p in &self.parts {
            if p.weight > 0.0 {
                t = t.min(p.support().0);
            }
        }
        if let Some(a) = self.atoms.first() {
            t = t.min(a.0);
        }
        if t.is_finite() {
            t.max(0.0)
        } else {
            0.0
        }
    }

    fn t_sup(&self) -> f64 {
        let mut t = 0.0_f64;
        for p in &self.parts {
            if p.weight > 0.0 {
                t = t.max(p.support().1);
            }
        }
        if let Some(a) = self.atoms.last() {
            t = t.max(a.0);
        }
        t
    }

    /// Undemand probability, mean delay, and support bounds.
    pub fn moments(&self) -> Moments {
        let cont_mean: f64 = self.parts.iter().map(|p| p.mean()).sum();
        let atom_mean: f64 = self.atoms.iter().map(|a| a.0 * a.1).sum();
        Moments {
            undemand_prob: self.never,
            mean_delay: cont_mean + atom_mean,
            t_inf: self.t_inf(),
            t_sup: if self.parts.is_empty() && self.atoms.is_empty() {
                0.0
            } else {
                self.t_sup()
            },
        }
    }

    /// Draws a request delay: `Never` with probability `q`, else from the
    /// conditional distribution on `[0, ∞)`.
    pub fn sample_request_delay<R: Rng + ?Sized>(&self, rng: &mut R) -> RequestDelay {
        let mut u: f64 = rng.gen();
        if u < self.never {
            return RequestDelay::Never;
        }
        u -= self.never;
        for p in &self.parts {
            if u < p.weight {
                let v: f64 = rng.gen();
                let local = p.kind.quantile(v);
                return RequestDelay::At(p.scale * local + p.shift);
            }
            u -= p.weight;
        }
        for &(loc, w) in &self.atoms {
            if u < w {
                return RequestDelay::At(loc);
            }
            u -= w;
        }
        // float round-off at the top of the cdf: fall back to the last atom
        // or the heaviest part
        if let Some(&(loc, _)) = self.atoms.last() {
            return RequestDelay::At(loc);
        }
        let p = &self.parts[self.parts.len() - 1];
        let v: f64 = rng.gen();
        RequestDelay::At(p.scale * p.kind.quantile(v) + p.shift)
    }

    /// The base family this spec was built from.
    pub fn base_family(&self) -> &BaseFamily {
        &self.base
    }

    /// The transform stack this spec was built from.
    pub fn transforms(&self) -> &[Transform] {
        &self.transforms
    }

    /// True if the demanded part has no continuous density (pure atoms).
    pub fn is_atomic(&self) -> bool {
        self.parts.is_empty()
    }
}
