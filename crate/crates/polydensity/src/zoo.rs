//! Synthetic target distributions and constructive structural approximations.

use crate::cheb;
use crate::empirical::Sampler;
use crate::poly::{ChebPoly, PiecewisePolynomial};
use crate::quadrature;
use crate::rng::SeedStream;
use crate::special::{normal_cdf, normal_pdf, normal_quantile};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

type DensityFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type CdfFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type QuantileFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A synthetic target: a density evaluator, an exact CDF (or quadrature
/// fallback), point atoms, and a seeded sampler.
#[derive(Clone)]
pub struct TargetDistribution {
    name: String,
    domain: (f64, f64),
    density: DensityFn,
    /// CDF of the continuous part only; reaches `1 - total atom mass`.
    cdf: Option<CdfFn>,
    /// Inverse of the continuous-part CDF, when a closed form exists.
    quantile: Option<QuantileFn>,
    atoms: Vec<(f64, f64)>,
    nonsmooth: Vec<f64>,
}

impl std::fmt::Debug for TargetDistribution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TargetDistribution")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("atoms", &self.atoms)
            .finish()
    }
}

impl TargetDistribution {
    fn validated(self) -> Result<Self> {
        let atom_mass: f64 = self.atoms.iter().map(|a| a.1).sum();
        let (lo, hi) = self.domain;
        let density = self.density.clone();
        let total = quadrature::integrate(
            move |x| density(x),
            lo,
            hi,
            &self.nonsmooth,
            1e-9,
            2_000_000,
        )?;
        if (total + atom_mass - 1.0).abs() > 1e-8 {
            return Err(Error::InvalidParams(format!(
                "target `{}` has total mass {}",
                self.name,
                total + atom_mass
            )));
        }
        for &(loc, mass) in &self.atoms {
            if !(lo..hi).contains(&loc) || mass < 0.0 {
                return Err(Error::InvalidParams(format!(
                    "atom ({loc}, {mass}) invalid for domain [{lo}, {hi})"
                )));
            }
        }
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    /// Pointwise density of the continuous part; zero outside the domain.
    pub fn density(&self, x: f64) -> f64 {
        if x < self.domain.0 || x > self.domain.1 {
            0.0
        } else {
            (self.density)(x)
        }
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn nonsmooth_points(&self) -> &[f64] {
        &self.nonsmooth
    }

    /// CDF of the continuous part, `P[X < x, X non-atomic]`.
    pub fn cont_cdf(&self, x: f64) -> f64 {
        let (lo, hi) = self.domain;
        if x <= lo {
            return 0.0;
        }
        let x = x.min(hi);
        match &self.cdf {
            Some(f) => f(x),
            None => {
                let density = self.density.clone();
                quadrature::integrate(move |y| density(y), lo, x, &self.nonsmooth, 1e-9, 2_000_000)
                    .unwrap_or(f64::NAN)
            }
        }
    }

    /// Left-continuous CDF of the whole measure, `P[X < x]`.
    pub fn cdf(&self, x: f64) -> f64 {
        let atom: f64 = self
            .atoms
            .iter()
            .filter(|a| a.0 < x)
            .map(|a| a.1)
            .sum();
        self.cont_cdf(x) + atom
    }

    /// Mass of `[a, b)`.
    pub fn mass_between(&self, a: f64, b: f64) -> f64 {
        self.cdf(b) - self.cdf(a)
    }

    fn draw_continuous(&self, u: f64) -> f64 {
        if let Some(q) = &self.quantile {
            return q(u);
        }
        let (mut a, mut b) = self.domain;
        for _ in 0..60 {
            let mid = 0.5 * (a + b);
            if self.cont_cdf(mid) < u {
                a = mid;
            } else {
                b = mid;
            }
        }
        0.5 * (a + b)
    }
}

impl Sampler for TargetDistribution {
    fn domain(&self) -> (f64, f64) {
        self.domain
    }

    fn draw(&self, rng: &mut SeedStream) -> Result<f64> {
        let u = rng.next_f64();
        let mut acc = 0.0;
        for &(loc, mass) in &self.atoms {
            acc += mass;
            if u < acc {
                return Ok(loc);
            }
        }
        // Map the remaining uniform mass onto the continuous part.
        Ok(self.draw_continuous(u - acc))
    }
}

/// Target families. Serializes as `{"kind": ..., "params": {...}}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum TargetKind {
    Uniform,
    Triangle,
    TruncatedGaussian {
        mean: f64,
        std_dev: f64,
    },
    GaussianMixture {
        components: Vec<(f64, f64, f64)>,
    },
    TruncatedLaplace {
        location: f64,
        scale: f64,
    },
    HalfCircle,
    TruncatedExponential {
        rate: f64,
    },
    ConvexDecreasing,
    KMonotonePower {
        k: u32,
    },
    AtomMixture {
        base: Box<TargetKind>,
        atoms: Vec<(f64, f64)>,
    },
    PiecewisePoly {
        hypothesis: PiecewisePolynomial,
    },
    HardInstance {
        k: usize,
        epsilon: f64,
        signs: Vec<i8>,
    },
}

/// A target spec as read from experiment configs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TargetSpec {
    #[serde(flatten)]
    pub kind: TargetKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<(f64, f64)>,
}

impl TargetSpec {
    pub fn build(&self) -> Result<TargetDistribution> {
        make_target_with(self.kind.clone(), self.truncation)
    }
}

pub fn make_target(kind: TargetKind) -> Result<TargetDistribution> {
    make_target_with(kind, None)
}

pub fn make_target_with(
    kind: TargetKind,
    truncation: Option<(f64, f64)>,
) -> Result<TargetDistribution> {
    if let Some((a, b)) = truncation {
        if !(a < b) {
            return Err(Error::InvalidParams(format!(
                "truncation [{a}, {b}) is empty"
            )));
        }
    }
    match kind {
        TargetKind::Uniform => {
            let (a, b) = truncation.unwrap_or((-1.0, 1.0));
            let len = b - a;
            TargetDistribution {
                name: "uniform".into(),
                domain: (a, b),
                density: Arc::new(move |_| 1.0 / len),
                cdf: Some(Arc::new(move |x| (x - a) / len)),
                quantile: Some(Arc::new(move |u| a + u * len)),
                atoms: vec![],
                nonsmooth: vec![],
            }
            .validated()
        }
        TargetKind::Triangle => TargetDistribution {
            name: "triangle".into(),
            domain: (-1.0, 1.0),
            density: Arc::new(|x| (1.0 + x) / 2.0),
            cdf: Some(Arc::new(|x| (1.0 + x) * (1.0 + x) / 4.0)),
            quantile: Some(Arc::new(|u| 2.0 * u.sqrt() - 1.0)),
            atoms: vec![],
            nonsmooth: vec![],
        }
        .validated(),
        TargetKind::TruncatedGaussian { mean, std_dev } => {
            if std_dev <= 0.0 {
                return Err(Error::InvalidParams("std_dev must be positive".into()));
            }
            let (a, b) = truncation.unwrap_or((-1.0, 1.0));
            let phi_a = normal_cdf((a - mean) / std_dev);
            let z = normal_cdf((b - mean) / std_dev) - phi_a;
            TargetDistribution {
                name: "truncated_gaussian".into(),
                domain: (a, b),
                density: Arc::new(move |x| normal_pdf((x - mean) / std_dev) / (std_dev * z)),
                cdf: Some(Arc::new(move |x| {
                    (normal_cdf((x - mean) / std_dev) - phi_a) / z
                })),
                quantile: Some(Arc::new(move |u| {
                    mean + std_dev * normal_quantile((phi_a + u * z).clamp(1e-300, 1.0 - 1e-16))
                })),
                atoms: vec![],
                nonsmooth: vec![],
            }
            .validated()
        }
        TargetKind::GaussianMixture { components } => {
            if components.is_empty() || components.iter().any(|c| c.0 < 0.0 || c.2 <= 0.0) {
                return Err(Error::InvalidParams("bad mixture components".into()));
            }
            let (a, b) = truncation.unwrap_or((-1.0, 1.0));
            let z: f64 = components
                .iter()
                .map(|&(w, mu, s)| w * (normal_cdf((b - mu) / s) - normal_cdf((a - mu) / s)))
                .sum();
            if z <= 1e-12 {
                return Err(Error::InvalidParams(
                    "mixture has no mass on the domain".into(),
                ));
            }
            let comps = components.clone();
            let comps2 = components;
            TargetDistribution {
                name: "gaussian_mixture".into(),
                domain: (a, b),
                density: Arc::new(move |x| {
                    comps
                        .iter()
                        .map(|&(w, mu, s)| w * normal_pdf((x - mu) / s) / s)
                        .sum::<f64>()
                        / z
                }),
                cdf: Some(Arc::new(move |x| {
                    comps2
                        .iter()
                        .map(|&(w, mu, s)| {
                            w * (normal_cdf((x - mu) / s) - normal_cdf((a - mu) / s))
                        })
                        .sum::<f64>()
                        / z
                })),
                quantile: None,
                atoms: vec![],
                nonsmooth: vec![],
            }
            .validated()
        }
        TargetKind::TruncatedLaplace { location, scale } => {
            if scale <= 0.0 {
                return Err(Error::InvalidParams("scale must be positive".into()));
            }
            let (a, b) = truncation.unwrap_or((-1.0, 1.0));
            let raw_cdf = move |x: f64| {
                if x < location {
                    0.5 * ((x - location) / scale).exp()
                } else {
                    1.0 - 0.5 * (-(x - location) / scale).exp()
                }
            };
            let z = raw_cdf(b) - raw_cdf(a);
            TargetDistribution {
                name: "truncated_laplace".into(),
                domain: (a, b),
                density: Arc::new(move |x| {
                    (-(x - location).abs() / scale).exp() / (2.0 * scale * z)
                }),
                cdf: Some(Arc::new(move |x| (raw_cdf(x) - raw_cdf(a)) / z)),
                quantile: None,
                atoms: vec![],
                nonsmooth: if (a..b).contains(&location) {
                    vec![location]
                } else {
                    vec![]
                },
            }
            .validated()
        }
        TargetKind::HalfCircle => TargetDistribution {
            name: "half_circle".into(),
            domain: (-1.0, 1.0),
            density: Arc::new(|x| 2.0 / std::f64::consts::PI * (1.0 - x * x).max(0.0).sqrt()),
            cdf: Some(Arc::new(|x| {
                let x = x.clamp(-1.0, 1.0);
                (x * (1.0 - x * x).sqrt() + x.asin()) / std::f64::consts::PI + 0.5
            })),
            quantile: None,
            atoms: vec![],
            nonsmooth: vec![],
        }
        .validated(),
        TargetKind::TruncatedExponential { rate } => {
            if rate <= 0.0 {
                return Err(Error::InvalidParams("rate must be positive".into()));
            }
            let (a, b) = truncation.unwrap_or((0.0, 1.0));
            let z = (-rate * a).exp() - (-rate * b).exp();
            TargetDistribution {
                name: "truncated_exponential".into(),
                domain: (a, b),
                density: Arc::new(move |x| rate * (-rate * x).exp() / z),
                cdf: Some(Arc::new(move |x| ((-rate * a).exp() - (-rate * x).exp()) / z)),
                quantile: Some(Arc::new(move |u| {
                    -((-rate * a).exp() - u * z).ln() / rate
                })),
                atoms: vec![],
                nonsmooth: vec![],
            }
            .validated()
        }
        TargetKind::ConvexDecreasing => TargetDistribution {
            name: "convex_decreasing".into(),
            domain: (0.0, 1.0),
            density: Arc::new(|x| 3.0 * (1.0 - x) * (1.0 - x)),
            cdf: Some(Arc::new(|x| 1.0 - (1.0 - x).powi(3))),
            quantile: Some(Arc::new(|u| 1.0 - (1.0 - u).cbrt())),
            atoms: vec![],
            nonsmooth: vec![],
        }
        .validated(),
        TargetKind::KMonotonePower { k } => {
            let kf = k as f64;
            TargetDistribution {
                name: format!("k_monotone_power_{k}"),
                domain: (0.0, 1.0),
                density: Arc::new(move |x| (kf + 1.0) * (1.0 - x).powi(k as i32)),
                cdf: Some(Arc::new(move |x| 1.0 - (1.0 - x).powi(k as i32 + 1))),
                quantile: Some(Arc::new(move |u| 1.0 - (1.0 - u).powf(1.0 / (kf + 1.0)))),
                atoms: vec![],
                nonsmooth: vec![],
            }
            .validated()
        }
        TargetKind::AtomMixture { base, atoms } => {
            let base = make_target_with(*base, truncation)?;
            atom_mixture(base, atoms)
        }
        TargetKind::PiecewisePoly { hypothesis } => piecewise_poly_target(hypothesis),
        TargetKind::HardInstance { k, epsilon, signs } => {
            make_hard_instance(k, epsilon, &signs)
        }
    }
}

/// Mixes point atoms into a continuous base target, rescaling its density.
pub fn atom_mixture(
    base: TargetDistribution,
    mut atoms: Vec<(f64, f64)>,
) -> Result<TargetDistribution> {
    atoms.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let atom_mass: f64 = atoms.iter().map(|a| a.1).sum();
    if atoms.iter().any(|a| a.1 < 0.0) || atom_mass > 1.0 + 1e-12 {
        return Err(Error::InvalidParams("atom masses invalid".into()));
    }
    let keep = 1.0 - atom_mass;
    let density = base.density.clone();
    let cdf = base.cdf.clone();
    let quantile = base.quantile.clone();
    let mut nonsmooth = base.nonsmooth.clone();
    nonsmooth.extend(atoms.iter().map(|a| a.0));
    TargetDistribution {
        name: format!("{}+atoms", base.name),
        domain: base.domain,
        density: Arc::new(move |x| keep * density(x)),
        cdf: cdf.map(|f| -> CdfFn { Arc::new(move |x| keep * f(x)) }),
        quantile: quantile.map(|q| -> QuantileFn {
            // Continuous draws arrive with u in [0, keep).
            Arc::new(move |u| q((u / keep).clamp(0.0, 1.0 - 1e-16)))
        }),
        atoms,
        nonsmooth,
    }
    .validated()
}

/// Wraps a piecewise polynomial distribution as a sampling target.
pub fn piecewise_poly_target(pp: PiecewisePolynomial) -> Result<TargetDistribution> {
    if !pp.is_distribution() {
        return Err(Error::NotADistribution);
    }
    let nonsmooth = pp.breakpoints().to_vec();
    let domain = pp.domain();
    let pp = Arc::new(pp);
    let pp_density = pp.clone();
    let pp_cdf = pp.clone();
    TargetDistribution {
        name: "piecewise_poly".into(),
        domain,
        density: Arc::new(move |x| pp_density.eval(x)),
        cdf: Some(Arc::new(move |x| pp_cdf.cdf(x))),
        quantile: None,
        atoms: vec![],
        nonsmooth,
    }
    .validated()
}

/// The piecewise-constant hard-instance density as a piecewise polynomial:
/// a `1/10` uniform floor mixed with per-block halves of density
/// `(1 ± signs[i] * epsilon) / (2k)` over `[0, 2k)`.
pub fn hard_instance_pp(k: usize, epsilon: f64, signs: &[i8]) -> Result<PiecewisePolynomial> {
    if signs.len() != k || k == 0 {
        return Err(Error::InvalidParams(format!(
            "need exactly k = {k} signs, got {}",
            signs.len()
        )));
    }
    if !(0.0..0.5).contains(&epsilon) {
        return Err(Error::InvalidParams(
            "hard instance epsilon must lie in (0, 1/2)".into(),
        ));
    }
    if signs.iter().any(|&s| s != 1 && s != -1) {
        return Err(Error::InvalidParams("signs must be +1 or -1".into()));
    }
    let kf = k as f64;
    let mut breakpoints = Vec::with_capacity(2 * k + 1);
    let mut pieces = Vec::with_capacity(2 * k);
    for j in 0..2 * k {
        let a = j as f64;
        let b = a + 1.0;
        let block = j / 2;
        let sign = signs[block] as f64 * if j % 2 == 0 { 1.0 } else { -1.0 };
        let density = 0.1 / (2.0 * kf) + 0.9 * (1.0 + sign * epsilon) / (2.0 * kf);
        breakpoints.push(a);
        pieces.push(ChebPoly::constant_mass((a, b), density));
    }
    breakpoints.push(2.0 * kf);
    PiecewisePolynomial::new(breakpoints, pieces).into_distribution()
}

/// [`hard_instance_pp`] wrapped as a sampling target with exact CDF.
pub fn make_hard_instance(k: usize, epsilon: f64, signs: &[i8]) -> Result<TargetDistribution> {
    let mut t = piecewise_poly_target(hard_instance_pp(k, epsilon, signs)?)?;
    t.name = format!("hard_instance_k{k}");
    Ok(t)
}

/// Output of the log-concave piecewise-linear construction, with the level
/// points of the geometric-decay stage kept for inspection.
pub struct LogConcaveDecomposition {
    pub approx: PiecewisePolynomial,
    pub mode: f64,
    /// Stage-(a) level points walking left (downhill) from the mode.
    pub levels_left: Vec<f64>,
    /// Stage-(a) level points walking right (downhill) from the mode.
    pub levels_right: Vec<f64>,
}

/// Piecewise-linear approximation of a log-concave density.
///
/// Two-stage construction: geometric level sets `f(x_i) = max(f(x_0)(1-eps)^i,
/// f(end))` found by bisection on each monotone side of the mode, then greedy
/// grouping of consecutive intervals into super-intervals while the density
/// drops by at most `(1-eps)^(1/sqrt(eps))` and interval lengths shrink by at
/// most `1 - sqrt(eps)`; each super-interval is replaced by its secant line.
/// Regions beyond the last super-interval get the zero function. The result
/// is renormalized to total mass 1.
pub fn decompose_log_concave(f: &TargetDistribution, eps: f64) -> Result<PiecewisePolynomial> {
    Ok(decompose_log_concave_detailed(f, eps)?.approx)
}

struct LinearPiece {
    interval: (f64, f64),
    value_lo: f64,
    value_hi: f64,
}

pub fn decompose_log_concave_detailed(
    f: &TargetDistribution,
    eps: f64,
) -> Result<LogConcaveDecomposition> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::InvalidParams("eps must lie in (0, 0.5)".into()));
    }
    if !f.atoms().is_empty() {
        return Err(Error::NotLogConcaveDetected("target has atoms".into()));
    }
    let (dlo, dhi) = f.domain();
    // Targets carry finite domains (truncation happens at construction), so
    // the whole domain plays the role of the 1-eps core interval; the level
    // construction below cuts negligible tails by itself.
    let (core_lo, core_hi) = (dlo, dhi);

    // Mode by ternary search on the density.
    let mut a = core_lo;
    let mut b = core_hi;
    while b - a > 1e-10 * (dhi - dlo) {
        let m1 = a + (b - a) / 3.0;
        let m2 = b - (b - a) / 3.0;
        if f.density(m1) < f.density(m2) {
            a = m1;
        } else {
            b = m2;
        }
    }
    let mode = 0.5 * (a + b);

    check_unimodal(f, core_lo, core_hi, mode)?;

    let cap = (4.0 / eps.sqrt() * (1.0 / eps).ln()).ceil() as usize;
    let right = decompose_side(f, mode, core_hi, eps, cap)?;
    let left = decompose_side(f, mode, core_lo, eps, cap)?;

    // Assemble pieces left-to-right; `decompose_side` walks away from the
    // mode, so the left side comes back reversed.
    let span = dhi - dlo;
    let mut linear: Vec<LinearPiece> = Vec::new();
    for p in left.pieces.iter().rev() {
        linear.push(LinearPiece {
            interval: (p.interval.1.min(p.interval.0), p.interval.0.max(p.interval.1)),
            value_lo: p.value_hi,
            value_hi: p.value_lo,
        });
    }
    for p in right.pieces {
        linear.push(LinearPiece {
            interval: p.interval,
            value_lo: p.value_lo,
            value_hi: p.value_hi,
        });
    }
    if linear.is_empty() {
        return Err(Error::NotLogConcaveDetected("empty decomposition".into()));
    }

    // Snap hairline gaps at the ends (mode search tolerance) onto the domain.
    if linear[0].interval.0 - dlo <= 1e-6 * span {
        linear[0].interval.0 = dlo;
    }
    let last_idx = linear.len() - 1;
    if dhi - linear[last_idx].interval.1 <= 1e-6 * span {
        linear[last_idx].interval.1 = dhi;
    }

    // Zero tails out to the full domain.
    let first = linear.first().map(|p| p.interval.0).unwrap_or(mode);
    let last = linear.last().map(|p| p.interval.1).unwrap_or(mode);
    let mut all: Vec<LinearPiece> = Vec::new();
    if first - dlo > 1e-12 * span {
        all.push(LinearPiece {
            interval: (dlo, first),
            value_lo: 0.0,
            value_hi: 0.0,
        });
    }
    all.extend(linear);
    if dhi - last > 1e-12 * span {
        all.push(LinearPiece {
            interval: (last, dhi),
            value_lo: 0.0,
            value_hi: 0.0,
        });
    }

    // Merge consecutive collinear pieces (a constant density comes out as a
    // single piece).
    let mut merged: Vec<LinearPiece> = Vec::new();
    for p in all {
        if let Some(prev) = merged.last_mut() {
            let slope_prev = (prev.value_hi - prev.value_lo)
                / (prev.interval.1 - prev.interval.0);
            let slope_p = (p.value_hi - p.value_lo) / (p.interval.1 - p.interval.0);
            let scale = prev.value_hi.abs().max(p.value_lo.abs()).max(1e-30);
            if (prev.value_hi - p.value_lo).abs() <= 1e-9 * scale
                && (slope_prev - slope_p).abs() <= 1e-9 * (slope_prev.abs() + 1.0)
            {
                prev.interval.1 = p.interval.1;
                prev.value_hi = p.value_hi;
                continue;
            }
        }
        merged.push(p);
    }

    let mut breakpoints = Vec::with_capacity(merged.len() + 1);
    let mut pieces = Vec::with_capacity(merged.len());
    for p in &merged {
        let (pa, pb) = p.interval;
        breakpoints.push(pa);
        // Line through (pa, value_lo) and (pb, value_hi), as a mapped piece.
        let half = 0.5 * (pb - pa);
        let mid = 0.5 * (p.value_lo + p.value_hi);
        let slope_half = 0.5 * (p.value_hi - p.value_lo);
        pieces.push(ChebPoly::new(
            (pa, pb),
            vec![mid * half, slope_half * half],
            true,
        ));
    }
    breakpoints.push(merged.last().unwrap().interval.1);
    let approx = PiecewisePolynomial::new(breakpoints, pieces).normalized()?;
    Ok(LogConcaveDecomposition {
        approx,
        mode,
        levels_left: left.level_points,
        levels_right: right.level_points,
    })
}

fn check_unimodal(f: &TargetDistribution, lo: f64, hi: f64, mode: f64) -> Result<()> {
    let n = 512;
    let peak = f.density(mode).max(1e-300);
    let mut prev = f.density(lo);
    let mut x_prev = lo;
    for k in 1..=n {
        let x = lo + (hi - lo) * k as f64 / n as f64;
        let v = f.density(x);
        let rising = x <= mode;
        let tol = 1e-9 * peak;
        if (rising && v < prev - tol && x_prev >= lo) || (!rising && v > prev + tol && x_prev >= mode)
        {
            return Err(Error::NotLogConcaveDetected(format!(
                "density not unimodal near x = {x}"
            )));
        }
        prev = v;
        x_prev = x;
    }
    Ok(())
}

struct SideDecomposition {
    /// Super-interval secants walking away from the mode: intervals are
    /// (nearer point, farther point) in walk order.
    pieces: Vec<LinearPiece>,
    level_points: Vec<f64>,
}

/// Decomposes one monotone side: the density decreases walking from `start`
/// (the mode) toward `end`.
fn decompose_side(
    f: &TargetDistribution,
    start: f64,
    end: f64,
    eps: f64,
    cap: usize,
) -> Result<SideDecomposition> {
    if (end - start).abs() < 1e-13 * (1.0 + end.abs()) {
        return Ok(SideDecomposition {
            pieces: vec![],
            level_points: vec![],
        });
    }
    let c = f.density(start);
    let fend = f.density(end).max(0.0);
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::NotLogConcaveDetected(
            "density vanishes at the mode".into(),
        ));
    }
    let decay = 1.0 - eps;
    let r = ((2.0 / eps).ln() / -decay.ln()).ceil() as usize;
    let s = if fend >= c * decay {
        // The side never drops a full (1-eps) level: one interval reaching the end.
        1
    } else {
        ((fend.max(1e-300) / c).ln() / decay.ln()).ceil() as usize
    };
    let t_prime = r.min(s);

    // Stage (a): level points.
    let mut xs = vec![start];
    for i in 1..=t_prime {
        let level = (c * decay.powi(i as i32)).max(fend);
        let prev = *xs.last().unwrap();
        if level >= f.density(prev) {
            // Reached the end level early (flat stretch).
            xs.push(end);
            break;
        }
        if i == s {
            xs.push(end);
            break;
        }
        xs.push(bisect_level(f, prev, end, level)?);
    }
    if xs.len() == 1 {
        xs.push(end);
    }

    // Stage (b): greedy grouping into super-intervals.
    let num_intervals = xs.len() - 1;
    let len = |j: usize| (xs[j + 1] - xs[j]).abs();
    let mut pieces = Vec::new();
    let mut i = 0; // index into xs: last closed super-interval ends at xs[i]
    let group_decay = decay.powf(1.0 / eps.sqrt());
    while i < num_intervals && pieces.len() < cap {
        let mut j = i + 1; // at least one interval per super-interval
        while j < num_intervals
            && f.density(xs[j + 1]) >= f.density(xs[i]) * group_decay
            && len(j) >= (1.0 - eps.sqrt()) * len(i)
        {
            j += 1;
        }
        pieces.push(LinearPiece {
            interval: (xs[i], xs[j]),
            value_lo: f.density(xs[i]),
            value_hi: f.density(xs[j]),
        });
        i = j;
    }

    Ok(SideDecomposition {
        pieces,
        level_points: xs,
    })
}

fn bisect_level(f: &TargetDistribution, from: f64, to: f64, level: f64) -> Result<f64> {
    let (mut a, mut b) = (from, to);
    let fa = f.density(a);
    let fb = f.density(b);
    if (fa - level) * (fb - level) > 0.0 && (fa - level).abs() > 1e-12 * fa.abs() {
        return Err(Error::NotLogConcaveDetected(format!(
            "level {level} not bracketed on [{from}, {to}]"
        )));
    }
    let sign = if fa >= level { 1.0 } else { -1.0 };
    for _ in 0..100 {
        if (b - a).abs() <= 1e-12 * (1.0 + b.abs()) {
            break;
        }
        let mid = 0.5 * (a + b);
        if sign * (f.density(mid) - level) >= 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// Window constant of the Gaussian Taylor window `mu ± C sigma sqrt(ln(1/eps))`.
const GAUSSIAN_WINDOW_C: f64 = 1.3;

/// Three-piece approximation of `N(mu, sigma^2)`: a degree-`d` Taylor
/// expansion about the mean on a `±C sigma sqrt(ln(1/eps))` window with
/// `d = ceil(6 ln(1/eps))`, zero outside, renormalized to mass 1.
pub fn approximate_gaussian(mu: f64, sigma: f64, eps: f64) -> Result<PiecewisePolynomial> {
    let d = (6.0 * (1.0 / eps).ln()).ceil() as usize;
    approximate_gaussian_with_degree(mu, sigma, eps, d)
}

/// Same construction with an explicit Taylor degree (the window stays tied
/// to `eps`).
pub fn approximate_gaussian_with_degree(
    mu: f64,
    sigma: f64,
    eps: f64,
    d: usize,
) -> Result<PiecewisePolynomial> {
    if sigma <= 0.0 || !(0.0 < eps && eps < 0.3) {
        return Err(Error::InvalidParams(
            "need sigma > 0 and eps in (0, 0.3)".into(),
        ));
    }
    let w = GAUSSIAN_WINDOW_C * sigma * (1.0 / eps).ln().sqrt();
    let pad = sigma.max(0.5 * w);
    let (lo, hi) = (mu - w - pad, mu + w + pad);

    // Truncated Taylor series of the pdf about mu, evaluated stably term by term.
    let taylor = move |u: f64| {
        let z = u * u / (2.0 * sigma * sigma);
        let mut term = 1.0;
        let mut sum = 1.0;
        for n in 1..=(d / 2) {
            term *= -z / n as f64;
            sum += term;
        }
        sum / (sigma * (2.0 * std::f64::consts::PI).sqrt())
    };

    let half = 0.5 * (2.0 * w);
    let mut coeffs = cheb::cheb_fit(d + 1, |x| taylor(x * w) * half);
    // The series is even about mu; odd coefficients are rounding noise.
    for (i, c) in coeffs.iter_mut().enumerate() {
        if i % 2 == 1 {
            *c = 0.0;
        }
    }

    let center = ChebPoly::new((mu - w, mu + w), coeffs, true);
    let left = ChebPoly::new((lo, mu - w), vec![0.0], true);
    let right = ChebPoly::new((mu + w, hi), vec![0.0], true);
    PiecewisePolynomial::new(vec![lo, mu - w, mu + w, hi], vec![left, center, right]).normalized()
}
