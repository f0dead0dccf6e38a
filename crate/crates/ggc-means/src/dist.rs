//! Base distributions on `[0, ∞)` and the two functionals every density
//! formula in the library consumes:
//!
//! * `Φ_F(t) = E[log|t - X|, X ≠ t]`, the log-distance functional, and
//! * `ψ_F(λ) = E[log(1 + λX)]`, the Lévy exponent of the associated
//!   gamma-convolution laws.
//!
//! A [`DistSpec`] is an immutable value: a continuous component described by
//! its CDF together with its quantile map, an optional density, and a finite
//! list of atoms. All Lebesgue–Stieltjes integrals are pulled back through the
//! quantile map, `∫ g dF = mass · ∫_0^1 g(Q(v)) dv`, which makes one adaptive
//! engine serve every law in the catalog (the quantile absorbs edge
//! singularities and infinite tails) and gives the exact inverse-CDF sampler
//! for free.
//!
//! Distributions may carry closed forms for Φ, Φ′ and ψ. The public
//! [`expected_log_distance`] and [`levy_exponent`] always integrate; the
//! density engines use the closed forms when present, and the verification
//! suite pins the two routes against each other.

use crate::config::QuadConfig;
use crate::error::{Error, Result};
use crate::quad;
use std::fmt;
use std::sync::Arc;

/// Shared evaluator type for CDFs, densities, quantiles and closed forms.
pub type Ev = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A point mass: location and weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub location: f64,
    pub weight: f64,
}

/// Density behavior at the upper end of the support.
#[derive(Debug, Clone, Copy)]
pub(crate) enum EdgeBehavior {
    /// Finite upper endpoint: density ~ (hi - x)^p.
    Finite(f64),
    /// Infinite support: density ~ x^{-beta} with beta > 1.
    Tail(f64),
}

/// The absolutely continuous component, normalized to total mass one.
#[derive(Clone)]
pub(crate) struct Continuous {
    /// CDF of the component, rising from 0 at `support.0` to 1 at `support.1`.
    pub cdf: Ev,
    /// Inverse of `cdf`; the integration chart and the sampler.
    pub quantile: Ev,
    /// Density of the component, when known.
    pub density: Option<Ev>,
    /// Points in quantile space where the integrand may lose smoothness
    /// (tabulated-CDF nodes).
    pub splits_v: Vec<f64>,
    /// Density ~ (x - lo)^p at the lower endpoint.
    pub lo_exponent: f64,
    pub hi_edge: EdgeBehavior,
}

/// Closed forms carried by a law and propagated through transforms.
#[derive(Clone, Default)]
pub(crate) struct ClosedForms {
    pub log_distance: Option<Ev>,
    pub log_distance_deriv: Option<Ev>,
    pub levy: Option<Ev>,
}

/// An immutable base distribution `F_X` on `[0, ∞)`.
#[derive(Clone)]
pub struct DistSpec {
    pub(crate) label: String,
    /// Closed support hull; the upper bound may be `f64::INFINITY`.
    pub(crate) support: (f64, f64),
    pub(crate) continuous: Option<Continuous>,
    pub(crate) continuous_mass: f64,
    /// Sorted by location.
    pub(crate) atoms: Vec<Atom>,
    pub(crate) closed: ClosedForms,
}

impl fmt::Debug for DistSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DistSpec")
            .field("label", &self.label)
            .field("support", &self.support)
            .field("continuous_mass", &self.continuous_mass)
            .field("atoms", &self.atoms)
            .finish()
    }
}

impl DistSpec {
    /// Degenerate law concentrated at `location`.
    pub fn point_mass(location: f64) -> Self {
        DistSpec {
            label: format!("point-mass({location})"),
            support: (location, location),
            continuous: None,
            continuous_mass: 0.0,
            atoms: vec![Atom {
                location,
                weight: 1.0,
            }],
            closed: ClosedForms {
                log_distance: Some(Arc::new(move |t: f64| (t - location).abs().ln())),
                log_distance_deriv: Some(Arc::new(move |t: f64| 1.0 / (t - location))),
                levy: Some(Arc::new(move |l: f64| (l * location).ln_1p())),
            },
        }
    }

    /// Law with a continuous part given by monotone `(x, F)` pairs joined by
    /// linear interpolation. `F` must rise from 0 to 1 across the table.
    pub fn tabulated(label: impl Into<String>, points: &[(f64, f64)]) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::invalid("tabulated CDF needs at least two points"));
        }
        for w in points.windows(2) {
            if !(w[1].0 > w[0].0) || w[1].1 < w[0].1 {
                return Err(Error::invalid(format!(
                    "tabulated CDF must be strictly increasing in x and non-decreasing in F \
                     near x = {}",
                    w[1].0
                )));
            }
        }
        let (lo, f_lo) = points[0];
        let (hi, f_hi) = *points.last().unwrap();
        if lo < 0.0 {
            return Err(Error::invalid("support must lie in [0, inf)"));
        }
        if f_lo.abs() > 1e-12 || (f_hi - 1.0).abs() > 1e-12 {
            return Err(Error::invalid("tabulated CDF must span [0, 1]"));
        }
        let pts: Vec<(f64, f64)> = points.to_vec();
        let pts2 = pts.clone();
        let pts3 = pts.clone();
        let cdf: Ev = Arc::new(move |x: f64| piecewise_cdf(&pts, x));
        let quantile: Ev = Arc::new(move |v: f64| piecewise_quantile(&pts2, v));
        let density: Ev = Arc::new(move |x: f64| piecewise_slope(&pts3, x));
        let splits_v = points[1..points.len() - 1].iter().map(|p| p.1).collect();
        let d = DistSpec {
            label: label.into(),
            support: (lo, hi),
            continuous: Some(Continuous {
                cdf,
                quantile,
                density: Some(density),
                splits_v,
                lo_exponent: 0.0,
                hi_edge: EdgeBehavior::Finite(0.0),
            }),
            continuous_mass: 1.0,
            atoms: Vec::new(),
            closed: ClosedForms::default(),
        };
        d.validate()?;
        Ok(d)
    }

    /// Law from density and CDF closures on `[lo, hi]` (`hi` may be infinite).
    /// The quantile map is derived by bisection; prefer the catalog
    /// constructors, which carry exact quantiles.
    pub fn from_density_cdf(
        label: impl Into<String>,
        lo: f64,
        hi: f64,
        density: impl Fn(f64) -> f64 + Send + Sync + 'static,
        cdf: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        let cdf: Ev = Arc::new(cdf);
        let quantile = numeric_quantile(cdf.clone(), lo, hi);
        let d = DistSpec {
            label: label.into(),
            support: (lo, hi),
            continuous: Some(Continuous {
                cdf,
                quantile,
                density: Some(Arc::new(density)),
                splits_v: Vec::new(),
                lo_exponent: 0.0,
                hi_edge: if hi.is_finite() {
                    EdgeBehavior::Finite(0.0)
                } else {
                    EdgeBehavior::Tail(2.0)
                },
            }),
            continuous_mass: 1.0,
            atoms: Vec::new(),
            closed: ClosedForms::default(),
        };
        d.validate()?;
        Ok(d)
    }

    /// Internal constructor for fully specified laws.
    pub(crate) fn from_parts(
        label: String,
        support: (f64, f64),
        continuous: Option<Continuous>,
        continuous_mass: f64,
        mut atoms: Vec<Atom>,
        closed: ClosedForms,
    ) -> Result<Self> {
        atoms.sort_by(|a, b| a.location.total_cmp(&b.location));
        let d = DistSpec {
            label,
            support,
            continuous,
            continuous_mass,
            atoms,
            closed,
        };
        d.validate()?;
        Ok(d)
    }

    fn validate(&self) -> Result<()> {
        let (lo, hi) = self.support;
        if !(lo >= 0.0) || !(hi >= lo) {
            return Err(Error::invalid(format!(
                "support [{lo}, {hi}] must satisfy 0 <= lo <= hi"
            )));
        }
        let atom_mass: f64 = self.atoms.iter().map(|a| a.weight).sum();
        if (atom_mass + self.continuous_mass - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!(
                "atom mass {atom_mass} + continuous mass {} != 1",
                self.continuous_mass
            )));
        }
        for a in &self.atoms {
            if !(a.weight > 0.0 && a.weight <= 1.0) {
                return Err(Error::invalid(format!("atom weight {} not in (0,1]", a.weight)));
            }
            if a.location < lo - 1e-12 || a.location > hi + 1e-12 {
                return Err(Error::invalid(format!(
                    "atom at {} outside support [{lo}, {hi}]",
                    a.location
                )));
            }
        }
        if self.continuous_mass > 0.0 {
            let c = self
                .continuous
                .as_ref()
                .ok_or_else(|| Error::invalid("positive continuous mass without a CDF"))?;
            // spot-check monotonicity and the quantile/cdf pairing
            let mut prev = -1e-9;
            for i in 0..=16 {
                let v = i as f64 / 16.0;
                let v = v.clamp(1e-9, 1.0 - 1e-9);
                let x = (c.quantile)(v);
                let f = (c.cdf)(x);
                if f < prev - 1e-9 {
                    return Err(Error::invalid("continuous CDF is not monotone"));
                }
                prev = f;
                if (f - v).abs() > 1e-7 {
                    return Err(Error::invalid(format!(
                        "quantile/CDF mismatch at v = {v}: cdf(Q(v)) = {f}"
                    )));
                }
            }
        } else if self.atoms.is_empty() {
            return Err(Error::invalid("distribution carries no mass"));
        }
        Ok(())
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Support hull `[lo, hi]`; `hi` may be infinite.
    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn continuous_mass(&self) -> f64 {
        self.continuous_mass
    }

    pub fn has_density(&self) -> bool {
        self.continuous_mass == 0.0
            || self
                .continuous
                .as_ref()
                .map(|c| c.density.is_some())
                .unwrap_or(false)
    }

    /// Weight of the atom exactly at `x`, if any. Ties are decided by exact
    /// floating-point equality of the stored location.
    pub fn atom_at(&self, x: f64) -> Option<f64> {
        self.atoms
            .iter()
            .find(|a| a.location == x)
            .map(|a| a.weight)
    }

    /// Largest jump of the CDF.
    pub fn max_jump(&self) -> f64 {
        self.atoms.iter().fold(0.0, |m, a| m.max(a.weight))
    }

    /// Right-continuous CDF including atoms.
    pub fn cdf(&self, x: f64) -> f64 {
        let mut f = 0.0;
        if let Some(c) = &self.continuous {
            if self.continuous_mass > 0.0 {
                f += self.continuous_mass * clamp01((c.cdf)(clamp_range(x, self.support)));
            }
        }
        for a in &self.atoms {
            if a.location <= x {
                f += a.weight;
            }
        }
        clamp01(f)
    }

    /// Survival function `1 - F(x)`, accumulated from above so that small
    /// values keep relative accuracy where the sine factors need them.
    pub fn sf(&self, x: f64) -> f64 {
        let mut s = 0.0;
        if let Some(c) = &self.continuous {
            if self.continuous_mass > 0.0 {
                s += self.continuous_mass
                    * (1.0 - clamp01((c.cdf)(clamp_range(x, self.support))));
            }
        }
        for a in &self.atoms {
            if a.location > x {
                s += a.weight;
            }
        }
        s.clamp(0.0, 1.0)
    }

    /// Density of the absolutely continuous part (mass-weighted), when known.
    /// Returns 0 outside the support; `None` when the law carries no density.
    pub fn density(&self, x: f64) -> Option<f64> {
        if self.continuous_mass == 0.0 {
            return Some(0.0);
        }
        let c = self.continuous.as_ref()?;
        let d = c.density.as_ref()?;
        if x < self.support.0 || x > self.support.1 {
            return Some(0.0);
        }
        Some(self.continuous_mass * d(x))
    }

    /// Density estimate for the pad primitive: exact density when carried, a
    /// CDF difference quotient when numeric differentiation is enabled, and
    /// otherwise the exact-mass average over `[a, b]`.
    pub(crate) fn density_estimate(&self, t: f64, a: f64, b: f64, cfg: &QuadConfig) -> f64 {
        if let Some(d) = self.density(t.clamp(a, b)) {
            return d;
        }
        let c = match &self.continuous {
            Some(c) => c,
            None => return 0.0,
        };
        if cfg.allow_numeric_density {
            let h = 1e-6 * (1.0 + t.abs());
            let lo = clamp_range(t - h, self.support);
            let hi = clamp_range(t + h, self.support);
            if hi > lo {
                return self.continuous_mass * ((c.cdf)(hi) - (c.cdf)(lo)) / (hi - lo);
            }
        }
        self.continuous_mass * ((c.cdf)(b) - (c.cdf)(a)) / (b - a)
    }
}

fn clamp01(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

fn clamp_range(x: f64, (lo, hi): (f64, f64)) -> f64 {
    x.clamp(lo, hi)
}

fn piecewise_cdf(pts: &[(f64, f64)], x: f64) -> f64 {
    if x <= pts[0].0 {
        return 0.0;
    }
    if x >= pts[pts.len() - 1].0 {
        return 1.0;
    }
    let i = pts.partition_point(|p| p.0 <= x);
    let (x0, f0) = pts[i - 1];
    let (x1, f1) = pts[i];
    f0 + (f1 - f0) * (x - x0) / (x1 - x0)
}

fn piecewise_quantile(pts: &[(f64, f64)], v: f64) -> f64 {
    if v <= 0.0 {
        return pts[0].0;
    }
    if v >= 1.0 {
        return pts[pts.len() - 1].0;
    }
    let i = pts.partition_point(|p| p.1 <= v).min(pts.len() - 1);
    let (x0, f0) = pts[i - 1];
    let (x1, f1) = pts[i];
    if f1 == f0 {
        x0
    } else {
        x0 + (x1 - x0) * (v - f0) / (f1 - f0)
    }
}

fn piecewise_slope(pts: &[(f64, f64)], x: f64) -> f64 {
    if x < pts[0].0 || x > pts[pts.len() - 1].0 {
        return 0.0;
    }
    let i = pts
        .partition_point(|p| p.0 <= x)
        .clamp(1, pts.len() - 1);
    let (x0, f0) = pts[i - 1];
    let (x1, f1) = pts[i];
    (f1 - f0) / (x1 - x0)
}

/// Quantile by bisection on the CDF, for laws built from raw closures.
pub(crate) fn numeric_quantile(cdf: Ev, lo: f64, hi: f64) -> Ev {
    Arc::new(move |v: f64| {
        let v = clamp01(v);
        let mut a = lo;
        let mut b = if hi.is_finite() {
            hi
        } else {
            // grow a bracket
            let mut b = lo.max(1.0);
            let mut n = 0;
            while cdf(b) < v && n < 2000 {
                b *= 2.0;
                n += 1;
            }
            b
        };
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if !(m > a && m < b) {
                break;
            }
            if cdf(m) < v {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    })
}

/// Integrate `g` against the continuous part of `dist` (mass-weighted),
/// optionally excluding the x-interval `exclude` and seeding splits at the
/// given x-locations.
pub(crate) fn integrate_df<G>(
    dist: &DistSpec,
    g: &G,
    cfg: &QuadConfig,
    x_splits: &[f64],
    exclude: Option<(f64, f64)>,
) -> Result<f64>
where
    G: Fn(f64) -> Result<f64> + ?Sized,
{
    let mass = dist.continuous_mass;
    if mass == 0.0 {
        return Ok(0.0);
    }
    let c = dist.continuous.as_ref().expect("mass without continuous part");
    let to_v = |x: f64| clamp01((c.cdf)(clamp_range(x, dist.support)));
    let q = c.quantile.clone();
    let f = move |v: f64| -> Result<f64> { g(q(v)) };

    let mut splits: Vec<f64> = c.splits_v.clone();
    splits.extend(x_splits.iter().map(|&x| to_v(x)));

    let total = match exclude {
        None => quad::adaptive(&f, 0.0, 1.0, cfg, &splits)?,
        Some((a, b)) => {
            let (va, vb) = (to_v(a), to_v(b));
            let half = cfg.scaled(0.5);
            let left = quad::adaptive(&f, 0.0, va, &half, &splits)?;
            let right = quad::adaptive(&f, vb, 1.0, &half, &splits)?;
            left + right
        }
    };
    Ok(mass * total)
}

/// `Φ_F(t) = E[log|t - X|, X ≠ t]`, by adaptive quadrature.
///
/// The log singularity is split at `t`; the `singularity_pad` window around it
/// is integrated against the analytic primitive of `log|t - x|` with the
/// density frozen at `t`. This function always integrates; closed forms
/// attached to catalog laws are used by the density engines and are checked
/// against this route in the verification suite.
pub fn expected_log_distance(dist: &DistSpec, t: f64, cfg: &QuadConfig) -> Result<f64> {
    cfg.validate()?;
    if !(t >= 0.0) {
        return Err(Error::invalid(format!("t = {t} must be nonnegative")));
    }
    // atoms, with the indicator excluding an atom exactly at t
    let mut total = 0.0;
    for a in &dist.atoms {
        if a.location != t {
            total += a.weight * (t - a.location).abs().ln();
        }
    }
    if dist.continuous_mass == 0.0 {
        return Ok(total);
    }
    let (lo, hi) = dist.support;
    let pad = cfg.singularity_pad;
    let a = lo.max(t - pad);
    let b = hi.min(t + pad);
    let g = move |x: f64| -> Result<f64> {
        let d = (t - x).abs();
        if d == 0.0 {
            // can only happen at pad width zero; treat as excluded
            return Ok(0.0);
        }
        Ok(d.ln())
    };
    if a < b {
        // singular window overlaps the support: pad + excluded quadrature
        let rho = dist.density_estimate(t, a, b, cfg);
        let pad_part = rho * (log_primitive(t - a) - log_primitive(t - b));
        let rest = integrate_df(dist, &g, cfg, &[], Some((a, b)))?;
        total += pad_part + rest;
    } else {
        total += integrate_df(dist, &g, cfg, &[t], None)?;
    }
    if !total.is_finite() {
        return Err(Error::NonConvergence(format!(
            "log-distance integral not finite at t = {t}"
        )));
    }
    Ok(total)
}

/// Antiderivative of `log|s|`: `s log|s| - s`, with the removable value 0 at 0.
fn log_primitive(s: f64) -> f64 {
    if s == 0.0 {
        0.0
    } else {
        s * s.abs().ln() - s
    }
}

/// `ψ_F(λ) = E[log(1 + λX)]`, by adaptive quadrature; 0 at λ = 0.
///
/// Returns [`Error::Divergent`] when the tail test detects an infinite
/// integral, which is exactly the case where the mean functional fails to
/// exist.
pub fn levy_exponent(dist: &DistSpec, lambda: f64, cfg: &QuadConfig) -> Result<f64> {
    cfg.validate()?;
    if !(lambda >= 0.0) {
        return Err(Error::invalid(format!("lambda = {lambda} must be nonnegative")));
    }
    if lambda == 0.0 {
        return Ok(0.0);
    }
    let mut total = 0.0;
    for a in &dist.atoms {
        total += a.weight * (lambda * a.location).ln_1p();
    }
    if dist.continuous_mass == 0.0 {
        return Ok(total);
    }
    if dist.support.1.is_infinite() && tail_diverges(dist, lambda) {
        return Err(Error::Divergent(format!(
            "E[log(1 + {lambda} X)] has a non-integrable tail for `{}`",
            dist.label
        )));
    }
    let g = move |x: f64| -> Result<f64> { Ok((lambda * x).ln_1p()) };
    total += integrate_df(dist, &g, cfg, &[1.0 / lambda], None)?;
    Ok(total)
}

/// Dyadic tail test for `∫ log(1 + λx) dF`: compares consecutive blocks of
/// `log(1+λ 2^k) · F((2^k, 2^{k+1}])`. A convergent integral has geometrically
/// shrinking blocks; a sustained ratio near one means divergence.
fn tail_diverges(dist: &DistSpec, lambda: f64) -> bool {
    let block = |k0: i32, k1: i32| -> f64 {
        let mut s = 0.0;
        for k in k0..k1 {
            let x0 = (2.0f64).powi(k);
            let x1 = (2.0f64).powi(k + 1);
            let mass = (dist.sf(x0) - dist.sf(x1)).max(0.0);
            s += (lambda * x0).ln_1p() * mass;
        }
        s
    };
    let s1 = block(25, 50);
    let s2 = block(50, 75);
    s2 > 1e-13 && s2 >= 0.5 * s1
}

/// True iff `ψ_F(1)` converges numerically, i.e. the Dirichlet mean and its
/// gamma convolution exist.
pub fn check_existence(dist: &DistSpec, cfg: &QuadConfig) -> bool {
    levy_exponent(dist, 1.0, cfg).is_ok()
}

/// Law of `X · Y_σ` for a Bernoulli(σ) mixer `Y_σ`: the continuous part and
/// every atom are scaled by σ and the complementary mass lands in an atom at
/// zero. σ = 1 returns the law unchanged.
pub fn mix_with_atom(dist: &DistSpec, sigma: f64) -> Result<DistSpec> {
    if !(sigma > 0.0 && sigma <= 1.0) {
        return Err(Error::invalid(format!("sigma = {sigma} must lie in (0, 1]")));
    }
    if sigma == 1.0 {
        return Ok(dist.clone());
    }
    let mut atoms: Vec<Atom> = dist
        .atoms
        .iter()
        .map(|a| Atom {
            location: a.location,
            weight: sigma * a.weight,
        })
        .collect();
    match atoms.iter_mut().find(|a| a.location == 0.0) {
        Some(zero) => zero.weight += 1.0 - sigma,
        None => atoms.push(Atom {
            location: 0.0,
            weight: 1.0 - sigma,
        }),
    }

    let base = dist.closed.clone();
    let closed = ClosedForms {
        log_distance: base.log_distance.clone().map(|phi| -> Ev {
            Arc::new(move |x: f64| sigma * phi(x) + (1.0 - sigma) * x.ln())
        }),
        log_distance_deriv: base.log_distance_deriv.clone().map(|d| -> Ev {
            Arc::new(move |x: f64| sigma * d(x) + (1.0 - sigma) / x)
        }),
        levy: base.levy.clone().map(|psi| -> Ev {
            Arc::new(move |l: f64| sigma * psi(l))
        }),
    };

    DistSpec::from_parts(
        format!("mix({}, sigma={sigma})", dist.label),
        (0.0, dist.support.1),
        dist.continuous.clone(),
        sigma * dist.continuous_mass,
        atoms,
        closed,
    )
}

/// Law of `scale·X + shift`.
pub fn affine_transform(dist: &DistSpec, scale: f64, shift: f64) -> Result<DistSpec> {
    if !(scale > 0.0) {
        return Err(Error::invalid(format!("scale = {scale} must be positive")));
    }
    if !(shift >= 0.0) {
        return Err(Error::invalid(format!("shift = {shift} must be nonnegative")));
    }
    let atoms = dist
        .atoms
        .iter()
        .map(|a| Atom {
            location: scale * a.location + shift,
            weight: a.weight,
        })
        .collect();
    let continuous = dist.continuous.as_ref().map(|c| {
        let cdf0 = c.cdf.clone();
        let q0 = c.quantile.clone();
        let den0 = c.density.clone();
        Continuous {
            cdf: Arc::new(move |x: f64| cdf0((x - shift) / scale)),
            quantile: Arc::new(move |v: f64| scale * q0(v) + shift),
            density: den0.map(|d| -> Ev { Arc::new(move |x: f64| d((x - shift) / scale) / scale) }),
            splits_v: c.splits_v.clone(),
            lo_exponent: c.lo_exponent,
            hi_edge: c.hi_edge,
        }
    });
    let closed = ClosedForms {
        log_distance: dist.closed.log_distance.clone().map(|phi| -> Ev {
            Arc::new(move |t: f64| scale.ln() + phi((t - shift) / scale))
        }),
        log_distance_deriv: dist.closed.log_distance_deriv.clone().map(|d| -> Ev {
            Arc::new(move |t: f64| d((t - shift) / scale) / scale)
        }),
        levy: dist.closed.levy.clone().map(|psi| -> Ev {
            // E log(1 + λ(aX+b)) = log(1+λb) + ψ(aλ / (1+λb))
            Arc::new(move |l: f64| (l * shift).ln_1p() + psi(scale * l / (1.0 + l * shift)))
        }),
    };
    DistSpec::from_parts(
        format!("affine({}, {scale}, {shift})", dist.label),
        (
            scale * dist.support.0 + shift,
            scale * dist.support.1 + shift,
        ),
        continuous,
        dist.continuous_mass,
        atoms,
        closed,
    )
}

// ---------------------------------------------------------------------------
// internal closed-form-first evaluators used by the density engines
// ---------------------------------------------------------------------------

pub(crate) fn log_distance_eval(dist: &DistSpec, t: f64, cfg: &QuadConfig) -> Result<f64> {
    if let Some(phi) = &dist.closed.log_distance {
        return Ok(phi(t));
    }
    expected_log_distance(dist, t, cfg)
}

pub(crate) fn levy_eval(dist: &DistSpec, lambda: f64, cfg: &QuadConfig) -> Result<f64> {
    if lambda == 0.0 {
        return Ok(0.0);
    }
    if let Some(psi) = &dist.closed.levy {
        return Ok(psi(lambda));
    }
    levy_exponent(dist, lambda, cfg)
}

/// `Φ′(t)`: closed form when carried, otherwise a Cauchy principal-value
/// quadrature with symmetric excision around `t` plus atom terms.
pub(crate) fn log_distance_deriv_eval(dist: &DistSpec, t: f64, cfg: &QuadConfig) -> Result<f64> {
    if let Some(d) = &dist.closed.log_distance_deriv {
        return Ok(d(t));
    }
    let mut total = 0.0;
    for a in &dist.atoms {
        if a.location != t {
            total += a.weight / (t - a.location);
        }
    }
    if dist.continuous_mass == 0.0 {
        return Ok(total);
    }
    let (lo, hi) = dist.support;
    if t <= lo || t >= hi {
        // no excision needed; integrand 1/(t-x) is one-signed on the support
        let g = move |x: f64| -> Result<f64> { Ok(1.0 / (t - x)) };
        return Ok(total + integrate_df(dist, &g, cfg, &[], None)?);
    }
    let den = dist
        .continuous
        .as_ref()
        .and_then(|c| c.density.clone())
        .ok_or_else(|| {
            Error::MissingDensity(format!(
                "principal-value derivative of the log-distance functional needs a density \
                 for `{}`",
                dist.label
            ))
        })?;
    let mass = dist.continuous_mass;
    let h = 0.25 * (t - lo).min(hi - t);
    // symmetric window: ∫_0^h [ρ(t-s) - ρ(t+s)] / s ds is regular
    let window = quad::adaptive(
        &|s: f64| -> Result<f64> {
            if s == 0.0 {
                return Ok(0.0);
            }
            Ok(mass * (den(t - s) - den(t + s)) / s)
        },
        0.0,
        h,
        &cfg.scaled(0.5),
        &[],
    )?;
    let g = move |x: f64| -> Result<f64> { Ok(1.0 / (t - x)) };
    let outer = integrate_df(dist, &g, &cfg.scaled(0.5), &[], Some((t - h, t + h)))?;
    Ok(total + window + outer)
}

#[cfg(test)]
pub(crate) mod testlaws {
    use super::*;

    /// Uniform[0, 1] with exact quantile and closed forms.
    pub fn uniform() -> DistSpec {
        DistSpec::from_parts(
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
            ClosedForms::default(),
        )
        .unwrap()
    }

    /// Density (1+x)^{-2} on [0, inf): the ratio of two unit exponentials.
    pub fn exp_ratio() -> DistSpec {
        DistSpec::from_parts(
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
            ClosedForms::default(),
        )
        .unwrap()
    }

    /// Density 1/(x log^2 x) on [e, inf): log(1+X) is not integrable.
    pub fn log_divergent() -> DistSpec {
        DistSpec::from_parts(
            "log-divergent".into(),
            (std::f64::consts::E, f64::INFINITY),
            Some(Continuous {
                cdf: Arc::new(|x: f64| {
                    if x <= std::f64::consts::E {
                        0.0
                    } else {
                        1.0 - 1.0 / x.ln()
                    }
                }),
                quantile: Arc::new(|v: f64| (1.0 / (1.0 - v)).exp()),
                density: Some(Arc::new(|x: f64| 1.0 / (x * x.ln() * x.ln()))),
                splits_v: Vec::new(),
                lo_exponent: 0.0,
                hi_edge: EdgeBehavior::Tail(1.0),
            }),
            1.0,
            Vec::new(),
            ClosedForms::default(),
        )
        .unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::testlaws::*;
    use super::*;

    fn cfg() -> QuadConfig {
        QuadConfig::default()
    }

    #[test]
    fn log_distance_of_point_mass() {
        let d = DistSpec::point_mass(2.0);
        assert_eq!(expected_log_distance(&d, 3.0, &cfg()).unwrap(), 0.0);
        // the indicator excludes the atom itself
        assert_eq!(expected_log_distance(&d, 2.0, &cfg()).unwrap(), 0.0);
    }

    #[test]
    fn log_distance_of_uniform_matches_closed_form() {
        let u = uniform();
        let closed = |y: f64| y * y.ln() + (1.0 - y) * (1.0 - y).ln() - 1.0;
        for &t in &[0.05, 0.3, 0.5, 0.77, 0.95] {
            let v = expected_log_distance(&u, t, &cfg()).unwrap();
            assert!((v - closed(t)).abs() < 1e-10, "t={t}: {v} vs {}", closed(t));
        }
        // outside the support the integrand is smooth
        let v = expected_log_distance(&u, 2.0, &cfg()).unwrap();
        let exact = 2.0f64 * 2.0f64.ln() - 1.0f64.ln() - 1.0; // ∫_0^1 ln(2-x) dx
        assert!((v - exact).abs() < 1e-11);
    }

    #[test]
    fn log_distance_of_exp_ratio_at_one_is_zero() {
        // Φ_W(1) = (1/2) log 1 = 0
        let w = exp_ratio();
        let v = expected_log_distance(&w, 1.0, &cfg()).unwrap();
        assert!(v.abs() < 1e-9, "{v}");
    }

    #[test]
    fn levy_exponent_values() {
        let c = cfg();
        let pm = DistSpec::point_mass(3.0);
        assert!((levy_exponent(&pm, 1.0, &c).unwrap() - 4.0f64.ln()).abs() < 1e-14);
        let u = uniform();
        assert!((levy_exponent(&u, 1.0, &c).unwrap() - (2.0 * 2.0f64.ln() - 1.0)).abs() < 1e-11);
        let w = exp_ratio();
        // ψ_W(λ) = λ log λ / (λ - 1)
        assert!((levy_exponent(&w, 2.0, &c).unwrap() - 2.0 * 2.0f64.ln()).abs() < 1e-9);
        assert_eq!(levy_exponent(&u, 0.0, &c).unwrap(), 0.0);
    }

    #[test]
    fn existence_check() {
        let c = cfg();
        assert!(check_existence(&uniform(), &c));
        assert!(check_existence(&exp_ratio(), &c));
        assert!(!check_existence(&log_divergent(), &c));
        assert!(matches!(
            levy_exponent(&log_divergent(), 1.0, &c),
            Err(Error::Divergent(_))
        ));
    }

    #[test]
    fn mix_with_atom_cdf_and_log_distance() {
        let c = cfg();
        let u = uniform();
        let m = mix_with_atom(&u, 0.5).unwrap();
        assert!((m.cdf(0.3) - 0.65).abs() < 1e-15);
        assert_eq!(m.atom_at(0.0), Some(0.5));
        // Φ_mix(x) = σ Φ_U(x) + (1-σ) log x at x = 0.5
        let got = expected_log_distance(&m, 0.5, &c).unwrap();
        let want = 0.5 * (0.5f64.ln() - 1.0) + 0.5 * 0.5f64.ln();
        assert!((got - want).abs() < 1e-10, "{got} vs {want}");
        // σ = 1 is the identity
        let same = mix_with_atom(&u, 1.0).unwrap();
        assert_eq!(same.atoms().len(), 0);
        assert_eq!(same.cdf(0.3), u.cdf(0.3));
    }

    #[test]
    fn mixing_scales_the_levy_exponent() {
        let c = cfg();
        let u = uniform();
        for &sigma in &[0.25, 0.5, 0.9] {
            let m = mix_with_atom(&u, sigma).unwrap();
            for &l in &[0.5, 1.0, 3.0] {
                let lhs = levy_exponent(&m, l, &c).unwrap();
                let rhs = sigma * levy_exponent(&u, l, &c).unwrap();
                assert!((lhs - rhs).abs() < 1e-10, "sigma={sigma} l={l}");
            }
        }
    }

    #[test]
    fn affine_composes_and_shifts_the_exponent() {
        let c = cfg();
        let u = uniform();
        let a = affine_transform(&u, 2.0, 0.0).unwrap();
        let ab = affine_transform(&a, 3.0, 0.0).unwrap();
        let direct = affine_transform(&u, 6.0, 0.0).unwrap();
        for i in 0..=20 {
            let x = 6.0 * i as f64 / 20.0;
            assert!((ab.cdf(x) - direct.cdf(x)).abs() < 1e-12);
        }
        // ψ_{cX}(λ) = ψ_X(cλ)
        let lhs = levy_exponent(&a, 1.5, &c).unwrap();
        let rhs = levy_exponent(&u, 3.0, &c).unwrap();
        assert!((lhs - rhs).abs() < 1e-10);
        // point mass maps exactly
        let p = affine_transform(&DistSpec::point_mass(1.0), 2.0, 3.0).unwrap();
        assert_eq!(p.atom_at(5.0), Some(1.0));
        assert!(affine_transform(&u, 0.0, 0.0).is_err());
    }

    #[test]
    fn determinism_bit_for_bit() {
        let c = cfg();
        let w = exp_ratio();
        let a = expected_log_distance(&w, 0.7, &c).unwrap();
        let b = expected_log_distance(&w, 0.7, &c).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
        let a = levy_exponent(&w, 1.3, &c).unwrap();
        let b = levy_exponent(&w, 1.3, &c).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn tabulated_roundtrip_against_uniform() {
        let c = cfg();
        let pts: Vec<(f64, f64)> = (0..=8).map(|i| (i as f64 / 8.0, i as f64 / 8.0)).collect();
        let t = DistSpec::tabulated("tab-uniform", &pts).unwrap();
        let u = uniform();
        let v = expected_log_distance(&t, 0.37, &c).unwrap();
        let w = expected_log_distance(&u, 0.37, &c).unwrap();
        assert!((v - w).abs() < 1e-9, "{v} vs {w}");
        assert!((levy_exponent(&t, 1.0, &c).unwrap() - levy_exponent(&u, 1.0, &c).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn principal_value_derivative_matches_closed_form() {
        let c = cfg();
        let u = uniform();
        // Φ_U'(t) = log(t / (1 - t))
        for &t in &[0.2, 0.5, 0.8] {
            let pv = log_distance_deriv_eval(&u, t, &c).unwrap();
            let closed = (t / (1.0 - t)).ln();
            assert!((pv - closed).abs() < 1e-8, "t={t}: {pv} vs {closed}");
        }
        let w = exp_ratio();
        for &t in &[0.5, 1.0, 2.5] {
            let pv = log_distance_deriv_eval(&w, t, &c).unwrap();
            let closed = t.ln() / ((1.0 + t) * (1.0 + t)) + 1.0 / (1.0 + t);
            assert!((pv - closed).abs() < 1e-8, "t={t}: {pv} vs {closed}");
        }
    }
}
