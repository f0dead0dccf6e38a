//! Named reference laws with closed forms: each entry carries the base
//! distribution with exact quantile, CDF and density, plus whatever closed
//! mean densities, log-distance functionals and Lévy exponents the family
//! admits. The generic engines never need these entries to run; the entries
//! exist so every closed form can be pinned against the quadrature route in
//! the verification suite, and so the CLI has stable law names.
//!
//! The seven families:
//!
//! | name               | base law                                         |
//! |--------------------|--------------------------------------------------|
//! | `uniform`          | U\[0,1\]                                         |
//! | `exp-ratio-w`      | `G_1/G'_1`, density `(1+x)^{-2}`                 |
//! | `arcsine`          | beta(1/2, 1/2)                                   |
//! | `rho-half`         | `G_{1/2}/G'_{1/2}`, density `x^{-1/2}(1+x)^{-1}/π` |
//! | `tilted-arcsine-p` | `p²G_{1/2} / (p²G_{1/2} + q²G'_{1/2})`           |
//! | `bfry-g`           | `1/𝔾_α`, the BFRY subordinator base              |
//! | `lamperti`         | `Z_α = (S_α/S'_α)^α`                             |

use crate::config::QuadConfig;
use crate::dist::{ClosedForms, Continuous, DistSpec, EdgeBehavior, Ev};
use crate::error::{Error, Result};
use crate::mc;
use crate::mean::MeanLaw;
use crate::operators;
use crate::special::{ln_gamma, sin_pi};
use crate::stats::{self, VerifyReport};
use crate::subordinators::{self, BfryParams};
use std::f64::consts::PI;
use std::sync::Arc;

/// Parameters for the families that need them.
#[derive(Debug, Clone, Copy)]
pub struct CatalogParams {
    /// Index of the `bfry-g` and `lamperti` families.
    pub alpha: f64,
    /// Mean parameter of the tilted arcsine family.
    pub p: f64,
}

impl Default for CatalogParams {
    fn default() -> Self {
        CatalogParams { alpha: 0.5, p: 0.5 }
    }
}

/// A closed-form mean density, when the family has one.
#[derive(Clone)]
pub enum ClosedMeanDensity {
    /// Valid for every order θ > 0.
    AnyOrder(Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>),
    /// Valid at θ = 1 only.
    OrderOne(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
    /// Valid at one specific order.
    AtOrder {
        theta: f64,
        density: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    },
}

impl ClosedMeanDensity {
    /// Evaluate at the given order if the closed form covers it.
    pub fn eval(&self, theta: f64, x: f64) -> Option<f64> {
        match self {
            ClosedMeanDensity::AnyOrder(f) => Some(f(theta, x)),
            ClosedMeanDensity::OrderOne(f) if theta == 1.0 => Some(f(x)),
            ClosedMeanDensity::AtOrder { theta: t, density } if *t == theta => Some(density(x)),
            _ => None,
        }
    }
}

/// One catalog entry: the law plus its closed forms and provenance notes.
#[derive(Clone)]
pub struct CatalogEntry {
    pub name: String,
    pub dist: DistSpec,
    pub closed_mean_density: Option<ClosedMeanDensity>,
    pub closed_log_distance: Option<Ev>,
    pub closed_levy: Option<Ev>,
    pub notes: String,
}

/// Stable public names, in CLI listing order.
pub const NAMES: [&str; 7] = [
    "uniform",
    "exp-ratio-w",
    "arcsine",
    "rho-half",
    "tilted-arcsine-p",
    "bfry-g",
    "lamperti",
];

/// Fetch an entry by name; `tilted-arcsine-p` reads `params.p`, `bfry-g` and
/// `lamperti` read `params.alpha`.
pub fn get_entry(name: &str, params: &CatalogParams) -> Result<CatalogEntry> {
    match name {
        "uniform" => Ok(uniform_entry()),
        "exp-ratio-w" => Ok(exp_ratio_entry()),
        "arcsine" => Ok(arcsine_entry()),
        "rho-half" => Ok(rho_half_entry()),
        "tilted-arcsine-p" => tilted_arcsine_entry(params.p),
        "bfry-g" => Ok(bfry_g_entry(BfryParams::new(params.alpha)?)),
        "lamperti" => lamperti_entry(params.alpha),
        other => Err(Error::UnknownEntry(other.to_string())),
    }
}

// ---------------------------------------------------------------------------
// closed mean densities exposed as free functions
// ---------------------------------------------------------------------------

/// Density of `M_1(F_U)` on (0, 1): `(e/π) sin(πy) y^{-y} (1-y)^{-(1-y)}`.
pub fn uniform_mean_density(y: f64) -> f64 {
    if y <= 0.0 || y >= 1.0 {
        return 0.0;
    }
    let ln_val = 1.0 - y * y.ln() - (1.0 - y) * (1.0 - y).ln();
    sin_pi(y) / PI * ln_val.exp()
}

/// Density of `M_1(F_W)` on (0, ∞): `(1/π) sin(πx/(1+x)) x^{-x/(1+x)}`.
pub fn exp_ratio_mean_density(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let r = x / (1.0 + x);
    sin_pi(r) / PI * (-r * x.ln()).exp()
}

/// Density of `M_θ(F_arcsine)`: the beta(θ+1/2, θ+1/2) density, with the
/// normalizer written through the gamma duplication identity.
pub fn arcsine_mean_density(theta: f64, x: f64) -> Result<f64> {
    if !(theta > 0.0) {
        return Err(Error::invalid(format!("theta = {theta} must be positive")));
    }
    if x <= 0.0 || x >= 1.0 {
        return Ok(0.0);
    }
    let ln_norm = ln_gamma(2.0 * theta + 1.0) - 2.0 * ln_gamma(theta + 0.5);
    Ok((ln_norm + (theta - 0.5) * (x.ln() + (1.0 - x).ln())).exp())
}

/// Density of `M_θ(ρ_{1/2})`:
/// `Γ(θ+1)/(Γ(θ+1/2)Γ(1/2)) · x^{θ-1/2} (1+x)^{-(θ+1)}`.
pub fn rho_half_mean_density(theta: f64, x: f64) -> Result<f64> {
    if !(theta > 0.0) {
        return Err(Error::invalid(format!("theta = {theta} must be positive")));
    }
    if x <= 0.0 {
        return Ok(0.0);
    }
    let ln_norm = ln_gamma(theta + 1.0) - ln_gamma(theta + 0.5) - ln_gamma(0.5);
    Ok((ln_norm + (theta - 0.5) * x.ln() - (theta + 1.0) * x.ln_1p()).exp())
}

/// Density of `M_θ(F_{B_{1/2,p}})` for the tilted arcsine base:
/// `pq Γ(θ+1)/(Γ(θ+1/2)Γ(1/2)) · [y(1-y)]^{θ-1/2} / [p²(1-y)+q²y]^{θ+1}`.
///
/// The `θ+1` power on the bracket is forced by three independent routes: the
/// tilt map applied to the `ρ_{1/2}` mean density, the reduction to the
/// beta(θ+1/2, θ+1/2) density at `p = 1/2`, and normalization; the
/// verification suite pins all three.
pub fn tilted_arcsine_density(theta: f64, p: f64, y: f64) -> Result<f64> {
    if !(theta > 0.0) {
        return Err(Error::invalid(format!("theta = {theta} must be positive")));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::invalid(format!("p = {p} must lie in (0, 1)")));
    }
    if y <= 0.0 || y >= 1.0 {
        return Ok(0.0);
    }
    let q = 1.0 - p;
    let ln_norm = (p * q).ln() + ln_gamma(theta + 1.0) - ln_gamma(theta + 0.5) - ln_gamma(0.5);
    let denom = p * p * (1.0 - y) + q * q * y;
    Ok((ln_norm + (theta - 0.5) * (y.ln() + (1.0 - y).ln()) - (theta + 1.0) * denom.ln()).exp())
}

// ---------------------------------------------------------------------------
// the entries
// ---------------------------------------------------------------------------

/// `Φ_U` on all of [0, ∞), via the primitive `Q(s) = s log|s| - s`:
/// `∫_0^1 log|y-x| dx = Q(y) - Q(y-1)`.
fn phi_uniform(y: f64) -> f64 {
    fn q(s: f64) -> f64 {
        if s == 0.0 {
            0.0
        } else {
            s * s.abs().ln() - s
        }
    }
    q(y) - q(y - 1.0)
}

fn uniform_entry() -> CatalogEntry {
    let closed = ClosedForms {
        log_distance: Some(Arc::new(phi_uniform)),
        log_distance_deriv: Some(Arc::new(|y: f64| (y / (y - 1.0)).abs().ln())),
        levy: Some(Arc::new(|l: f64| {
            if l == 0.0 {
                0.0
            } else {
                (1.0 + 1.0 / l) * l.ln_1p() - 1.0
            }
        })),
    };
    let dist = DistSpec::from_parts(
        "uniform".into(),
        (0.0, 1.0),
        Some(Continuous {
            cdf: Arc::new(|x: f64| x.clamp(0.0, 1.0)),
            quantile: Arc::new(|v: f64| v),
            density: Some(Arc::new(|_| 1.0)),
            splits_v: Vec::new(),
            lo_exponent: 0.0,
            hi_edge: EdgeBehavior::Finite(0.0),
        }),
        1.0,
        Vec::new(),
        closed,
    )
    .expect("uniform law is well formed");
    CatalogEntry {
        name: "uniform".into(),
        closed_log_distance: dist.closed.log_distance.clone(),
        closed_levy: dist.closed.levy.clone(),
        dist,
        closed_mean_density: Some(ClosedMeanDensity::OrderOne(Arc::new(uniform_mean_density))),
        notes: "uniform base; order-one mean density (e/π)sin(πy)y^{-y}(1-y)^{-(1-y)}".into(),
    }
}

/// `ψ_W(λ) = λ log λ / (λ-1)`; the singularity at λ = 1 is removable and is
/// bridged by the series `1 + d/2 - d²/6 + d³/12` for `d = λ-1`, which keeps
/// full accuracy where the direct quotient loses eight digits.
fn psi_exp_ratio(l: f64) -> f64 {
    if l == 0.0 {
        return 0.0;
    }
    let d = l - 1.0;
    if d.abs() < 1e-4 {
        1.0 + d / 2.0 - d * d / 6.0 + d * d * d / 12.0
    } else {
        l * l.ln() / d
    }
}

fn exp_ratio_entry() -> CatalogEntry {
    let closed = ClosedForms {
        log_distance: Some(Arc::new(|x: f64| {
            if x == 0.0 {
                0.0
            } else {
                x / (1.0 + x) * x.ln()
            }
        })),
        log_distance_deriv: Some(Arc::new(|x: f64| {
            let o = 1.0 + x;
            x.ln() / (o * o) + 1.0 / o
        })),
        levy: Some(Arc::new(psi_exp_ratio)),
    };
    let dist = DistSpec::from_parts(
        "exp-ratio-w".into(),
        (0.0, f64::INFINITY),
        Some(Continuous {
            cdf: Arc::new(|x: f64| if x <= 0.0 { 0.0 } else { x / (1.0 + x) }),
            quantile: Arc::new(|v: f64| v / (1.0 - v)),
            density: Some(Arc::new(|x: f64| (1.0 + x).powi(-2))),
            splits_v: Vec::new(),
            lo_exponent: 0.0,
            hi_edge: EdgeBehavior::Tail(2.0),
        }),
        1.0,
        Vec::new(),
        closed,
    )
    .expect("exp-ratio law is well formed");
    CatalogEntry {
        name: "exp-ratio-w".into(),
        closed_log_distance: dist.closed.log_distance.clone(),
        closed_levy: dist.closed.levy.clone(),
        dist,
        closed_mean_density: Some(ClosedMeanDensity::OrderOne(Arc::new(
            exp_ratio_mean_density,
        ))),
        notes: "ratio of two unit exponentials; tilting at c=1 lands on the uniform mean".into(),
    }
}

/// `Φ` of the arcsine law: `-log 4` on the support (the interval's
/// equilibrium measure), `log(z + √(z²-1)) - log 4` with `z = 2y-1` above it.
fn phi_arcsine(y: f64) -> f64 {
    let z = 2.0 * y - 1.0;
    if z.abs() <= 1.0 {
        -(4.0f64).ln()
    } else {
        (z.abs() + (z * z - 1.0).sqrt()).ln() - (4.0f64).ln()
    }
}

fn arcsine_entry() -> CatalogEntry {
    let closed = ClosedForms {
        log_distance: Some(Arc::new(phi_arcsine)),
        log_distance_deriv: Some(Arc::new(|y: f64| {
            let z = 2.0 * y - 1.0;
            if z.abs() <= 1.0 {
                0.0
            } else {
                2.0 * z.signum() / (z * z - 1.0).sqrt()
            }
        })),
        levy: Some(Arc::new(|l: f64| {
            2.0 * ((1.0 + (1.0 + l).sqrt()) / 2.0).ln()
        })),
    };
    let dist = DistSpec::from_parts(
        "arcsine".into(),
        (0.0, 1.0),
        Some(Continuous {
            cdf: Arc::new(|x: f64| 2.0 / PI * x.clamp(0.0, 1.0).sqrt().asin()),
            quantile: Arc::new(|v: f64| {
                let s = (0.5 * PI * v).sin();
                s * s
            }),
            density: Some(Arc::new(|x: f64| 1.0 / (PI * (x * (1.0 - x)).sqrt()))),
            splits_v: Vec::new(),
            lo_exponent: -0.5,
            hi_edge: EdgeBehavior::Finite(-0.5),
        }),
        1.0,
        Vec::new(),
        closed,
    )
    .expect("arcsine law is well formed");
    CatalogEntry {
        name: "arcsine".into(),
        closed_log_distance: dist.closed.log_distance.clone(),
        closed_levy: dist.closed.levy.clone(),
        dist,
        closed_mean_density: Some(ClosedMeanDensity::AnyOrder(Arc::new(|theta, x| {
            arcsine_mean_density(theta, x).unwrap_or(f64::NAN)
        }))),
        notes: "beta(1/2,1/2); its order-θ mean is beta(θ+1/2, θ+1/2)".into(),
    }
}

fn rho_half_entry() -> CatalogEntry {
    let closed = ClosedForms {
        log_distance: Some(Arc::new(|x: f64| x.ln_1p())),
        log_distance_deriv: Some(Arc::new(|x: f64| 1.0 / (1.0 + x))),
        levy: Some(Arc::new(|l: f64| 2.0 * l.sqrt().ln_1p())),
    };
    let dist = DistSpec::from_parts(
        "rho-half".into(),
        (0.0, f64::INFINITY),
        Some(Continuous {
            cdf: Arc::new(|x: f64| 2.0 / PI * x.max(0.0).sqrt().atan()),
            quantile: Arc::new(|v: f64| {
                let t = (0.5 * PI * v).tan();
                t * t
            }),
            density: Some(Arc::new(|x: f64| 1.0 / (PI * x.sqrt() * (1.0 + x)))),
            splits_v: Vec::new(),
            lo_exponent: -0.5,
            hi_edge: EdgeBehavior::Tail(1.5),
        }),
        1.0,
        Vec::new(),
        closed,
    )
    .expect("rho-half law is well formed");
    CatalogEntry {
        name: "rho-half".into(),
        closed_log_distance: dist.closed.log_distance.clone(),
        closed_levy: dist.closed.levy.clone(),
        dist,
        closed_mean_density: Some(ClosedMeanDensity::AnyOrder(Arc::new(|theta, x| {
            rho_half_mean_density(theta, x).unwrap_or(f64::NAN)
        }))),
        notes: "gamma(1/2) ratio; Linnik-type GGC with Laplace transform (1+√λ)^{-2θ}".into(),
    }
}

fn tilted_arcsine_entry(p: f64) -> Result<CatalogEntry> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::invalid(format!("p = {p} must lie in (0, 1)")));
    }
    let q = 1.0 - p;
    let c = p * p / (q * q);
    let closed = ClosedForms {
        log_distance: Some(Arc::new(move |y: f64| {
            (p * p * (1.0 - y) + q * q * y).ln()
        })),
        log_distance_deriv: Some(Arc::new(move |y: f64| {
            (q * q - p * p) / (p * p * (1.0 - y) + q * q * y)
        })),
        levy: Some(Arc::new(move |l: f64| {
            2.0 * (q + p * (1.0 + l).sqrt()).ln()
        })),
    };
    let dist = DistSpec::from_parts(
        format!("tilted-arcsine(p={p})"),
        (0.0, 1.0),
        Some(Continuous {
            cdf: Arc::new(move |y: f64| {
                let y = y.clamp(0.0, 1.0);
                if y >= 1.0 {
                    return 1.0;
                }
                2.0 / PI * (y / (c * (1.0 - y))).sqrt().atan()
            }),
            quantile: Arc::new(move |v: f64| {
                let t = (0.5 * PI * v).tan();
                let ct = c * t * t;
                ct / (1.0 + ct)
            }),
            density: Some(Arc::new(move |y: f64| {
                p * q / (PI * (y * (1.0 - y)).sqrt() * (p * p * (1.0 - y) + q * q * y))
            })),
            splits_v: Vec::new(),
            lo_exponent: -0.5,
            hi_edge: EdgeBehavior::Finite(-0.5),
        }),
        1.0,
        Vec::new(),
        closed,
    )?;
    Ok(CatalogEntry {
        name: "tilted-arcsine-p".into(),
        closed_log_distance: dist.closed.log_distance.clone(),
        closed_levy: dist.closed.levy.clone(),
        dist,
        closed_mean_density: Some(ClosedMeanDensity::AnyOrder(Arc::new(move |theta, y| {
            tilted_arcsine_density(theta, p, y).unwrap_or(f64::NAN)
        }))),
        notes: format!(
            "tilt of the gamma(1/2) ratio at c = p²/q², p = {p}; its order-θ mean is the \
             one-dimensional Poisson-Dirichlet(1/2, θ) projection"
        ),
    })
}

fn bfry_g_entry(params: BfryParams) -> CatalogEntry {
    let alpha = params.alpha();
    let dist = subordinators::bfry_base(&params);
    CatalogEntry {
        name: "bfry-g".into(),
        closed_log_distance: dist.closed.log_distance.clone(),
        closed_levy: dist.closed.levy.clone(),
        dist,
        closed_mean_density: Some(ClosedMeanDensity::AtOrder {
            theta: 1.0 - alpha,
            // M_{1-α} of this base is U^{-1/α}, density α x^{-α-1} on (1, ∞)
            density: Arc::new(move |x: f64| {
                if x <= 1.0 {
                    0.0
                } else {
                    alpha * x.powf(-alpha - 1.0)
                }
            }),
        }),
        notes: format!(
            "reciprocal-𝔾 base of the BFRY subordinator at alpha = {alpha}; its order-(1-α) \
             mean is U^(-1/α)"
        ),
    }
}

fn lamperti_entry(alpha: f64) -> Result<CatalogEntry> {
    let params = BfryParams::new(alpha)?; // same (0,1) validation
    let alpha = params.alpha();
    let dist = DistSpec::from_parts(
        format!("lamperti(alpha={alpha})"),
        (0.0, f64::INFINITY),
        Some(Continuous {
            cdf: Arc::new(move |z: f64| subordinators::lamperti_cdf(alpha, z).unwrap_or(0.0)),
            quantile: Arc::new(move |v: f64| {
                subordinators::lamperti_quantile(alpha, v).unwrap_or(0.0)
            }),
            density: Some(Arc::new(move |z: f64| {
                subordinators::lamperti_density(alpha, z).unwrap_or(0.0)
            })),
            splits_v: Vec::new(),
            lo_exponent: 0.0,
            hi_edge: EdgeBehavior::Tail(2.0),
        }),
        1.0,
        Vec::new(),
        ClosedForms::default(),
    )?;
    Ok(CatalogEntry {
        name: "lamperti".into(),
        closed_log_distance: None,
        closed_levy: None,
        dist,
        closed_mean_density: None,
        notes: format!("stable-ratio law (S/S')^α at alpha = {alpha}"),
    })
}

// ---------------------------------------------------------------------------
// the gamma-ratio scaling identity (orders above -1/2)
// ---------------------------------------------------------------------------

/// Monte Carlo verification of the identity
/// `G_{θ+1/2}/G_{1/2} = β_{θ+1/2,1/2} · G_{θ+1}/G_{1/2}` in law for every
/// `θ > -1/2`, together with (for θ > 0) the representation of the left side
/// as the order-(1+θ) mean of the zero-inflated gamma-ratio base, evaluated
/// through the generic density engine.
pub fn gamma_ratio_identity_check(
    theta: f64,
    n: usize,
    seed: u64,
    cfg: &QuadConfig,
) -> Result<Vec<VerifyReport>> {
    if !(theta > -0.5) {
        return Err(Error::invalid(format!("theta = {theta} must exceed -1/2")));
    }
    let lhs = mc::sample_named(
        NamedLawRatio {
            num: theta + 0.5,
            den: 0.5,
        }
        .into(),
        n,
        seed,
    )?;
    let beta = mc::sample_named(
        mc::NamedLaw::Beta {
            a: theta + 0.5,
            b: 0.5,
        },
        n,
        seed ^ 0x9e3779b97f4a7c15,
    )?;
    let upper = mc::sample_named(
        NamedLawRatio {
            num: theta + 1.0,
            den: 0.5,
        }
        .into(),
        n,
        seed ^ 0x2545f4914f6cdd1d,
    )?;
    let rhs = mc::SampleBatch {
        seed,
        n,
        values: beta
            .values
            .iter()
            .zip(&upper.values)
            .map(|(b, u)| b * u)
            .collect(),
        law_tag: format!("beta({},{}) * gamma-ratio({},0.5)", theta + 0.5, 0.5, theta + 1.0),
        truncation_error_bound: 0.0,
    };
    let mut reports = vec![stats::ks_two_sample(&lhs, &rhs, 0.012)?];

    if theta > 0.0 {
        // engine route: the left side is M_{1+θ} of the gamma-ratio base
        // mixed with an atom at zero of weight (1/2)/(1+θ)
        let sigma = (theta + 0.5) / (1.0 + theta);
        let law = operators::beta_scale(1.0 + theta, sigma, &rho_half_entry().dist)?;
        let table = mean_cdf_table(&law, cfg)?;
        reports.push(stats::ks_statistic(&lhs, |x| table.cdf(x), Some(0.012))?);
    }
    Ok(reports)
}

/// CDF table of a mean law on `[0, ∞)` through the rational map
/// `x = t/(1-t)`, for use as a sampling/KS oracle.
pub fn mean_cdf_table(law: &MeanLaw, cfg: &QuadConfig) -> Result<mc::CdfTable> {
    let map = |t: f64| t / (1.0 - t);
    let cfg = *cfg;
    let law2 = law.clone();
    mc::CdfTable::build(
        move |t: f64| {
            if t <= 0.0 || t >= 1.0 {
                return Ok(0.0);
            }
            let om = 1.0 - t;
            let x = t / om;
            let d = crate::mean::mean_density(&law2, x, &cfg)?;
            Ok(d / (om * om))
        },
        map,
        768,
        2e-4,
    )
}

struct NamedLawRatio {
    num: f64,
    den: f64,
}

impl From<NamedLawRatio> for mc::NamedLaw {
    fn from(r: NamedLawRatio) -> Self {
        mc::NamedLaw::GammaRatio {
            num: r.num,
            den: r.den,
        }
    }
}
