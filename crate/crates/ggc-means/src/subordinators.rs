//! Finite-dimensional distributions of GGC subordinators, and the BFRY
//! family.
//!
//! A GGC(θ, F) subordinator restricted to `[0, 1/θ]` has independent
//! increments over any disjoint partition, and each increment over a cell of
//! length `|C_i|` is the GGC of order `σ_i = θ|C_i|`; its density is the
//! closed gamma mixture from [`crate::operators::ggc_density`]. The joint
//! density is just the product of the marginals, so the FDD surface returns
//! the marginals and a trivial product reducer.
//!
//! The BFRY subordinator (Laplace transform `((1+λ)^α - λ^α)^t`) is the
//! GGC(1-α, F) subordinator built from the base `F` of `1/𝔾_α`, where `𝔾_α`
//! is derived from Lamperti's stable-ratio law `Z_{1-α}`. For this family
//! everything is closed: the base CDF is an inverse-cotangent expression, the
//! log-distance functional `R_α` has a two-branch logarithmic form, and the
//! order-σ scaled mean densities come out in elementary terms, so the FDD
//! marginals need a single quadrature.

use crate::config::QuadConfig;
use crate::dist::{ClosedForms, Continuous, DistSpec, EdgeBehavior};
use crate::error::{Error, Result};
use crate::operators;
use crate::quad;
use crate::special::{sin_pi, sin_pi_theta_cdf};
use std::f64::consts::PI;
use std::sync::Arc;

/// A GGC(θ, F) subordinator watched on the order-one horizon `[0, 1/θ]`.
#[derive(Debug, Clone)]
pub struct SubordinatorSpec {
    theta: f64,
    base: DistSpec,
}

impl SubordinatorSpec {
    pub fn new(theta: f64, base: DistSpec) -> Result<Self> {
        if !(theta > 0.0) {
            return Err(Error::invalid(format!("theta = {theta} must be positive")));
        }
        if !crate::dist::check_existence(&base, &QuadConfig::default()) {
            return Err(Error::Divergent(format!(
                "no GGC subordinator for `{}`: the Levy exponent diverges",
                base.label()
            )));
        }
        Ok(SubordinatorSpec { theta, base })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn base(&self) -> &DistSpec {
        &self.base
    }

    /// Time horizon carrying total order one: `1/θ`.
    pub fn horizon(&self) -> f64 {
        1.0 / self.theta
    }
}

/// A disjoint partition of the horizon into labelled cells.
#[derive(Debug, Clone)]
pub struct Partition {
    cells: Vec<PartitionCell>,
}

#[derive(Debug, Clone)]
pub struct PartitionCell {
    pub label: String,
    pub length: f64,
}

impl Partition {
    /// Cells `C1..Ck` with the given lengths (all positive).
    pub fn from_lengths(lengths: &[f64]) -> Result<Self> {
        if lengths.is_empty() {
            return Err(Error::invalid("partition needs at least one cell"));
        }
        if lengths.iter().any(|&l| !(l > 0.0)) {
            return Err(Error::invalid("cell lengths must be positive"));
        }
        Ok(Partition {
            cells: lengths
                .iter()
                .enumerate()
                .map(|(i, &length)| PartitionCell {
                    label: format!("C{}", i + 1),
                    length,
                })
                .collect(),
        })
    }

    pub fn cells(&self) -> &[PartitionCell] {
        &self.cells
    }

    /// Per-cell orders `σ_i = rate · |C_i|`; the cells must tile the full
    /// horizon, i.e. the orders must sum to one.
    pub fn sigmas(&self, rate: f64) -> Result<Vec<f64>> {
        let sigmas: Vec<f64> = self.cells.iter().map(|c| rate * c.length).collect();
        let sum: f64 = sigmas.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!(
                "partition orders sum to {sum}, expected 1 (cells must tile the horizon)"
            )));
        }
        Ok(sigmas)
    }
}

/// Per-cell marginal densities of the subordinator FDD at the given points:
/// cell `i` contributes `g_{σ_i, F}(x_i)`. Independence of increments makes
/// the joint density the product of these values.
pub fn fdd_densities(
    spec: &SubordinatorSpec,
    partition: &Partition,
    points: &[f64],
    cfg: &QuadConfig,
) -> Result<Vec<f64>> {
    let sigmas = partition.sigmas(spec.theta)?;
    if points.len() != sigmas.len() {
        return Err(Error::invalid(format!(
            "{} evaluation points for {} cells",
            points.len(),
            sigmas.len()
        )));
    }
    sigmas
        .iter()
        .zip(points)
        .map(|(&sigma, &x)| operators::ggc_density(sigma, &spec.base, x, cfg))
        .collect()
}

/// Joint FDD density from the per-cell marginals (independent increments).
pub fn joint_density(marginals: &[f64]) -> f64 {
    marginals.iter().product()
}

// ---------------------------------------------------------------------------
// Lamperti's stable-ratio law
// ---------------------------------------------------------------------------

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid(format!("alpha = {alpha} must lie in (0, 1)")));
    }
    Ok(())
}

/// Density of `Z_α = (S_α/S'_α)^α` for i.i.d. positive α-stable factors:
/// `sin(πα)/(πα) · 1/(y² + 2y cos(πα) + 1)` on `(0, ∞)`.
pub fn lamperti_density(alpha: f64, y: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !(y > 0.0) {
        return Err(Error::invalid(format!("y = {y} must be positive")));
    }
    let s = sin_pi(alpha);
    Ok(s / (PI * alpha) / (y * y + 2.0 * y * crate::special::cos_pi(alpha) + 1.0))
}

/// CDF of the Lamperti law: `1 - cot⁻¹((z + cos πα)/sin πα)/(πα)` with the
/// principal inverse cotangent in `(0, π)`.
pub fn lamperti_cdf(alpha: f64, z: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if z <= 0.0 {
        return Ok(0.0);
    }
    let g = (z + crate::special::cos_pi(alpha)) / sin_pi(alpha);
    Ok(1.0 - arccot(g) / (PI * alpha))
}

/// Quantile of the Lamperti law: `sin(παv) / sin(πα(1-v))`.
pub fn lamperti_quantile(alpha: f64, v: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::invalid(format!("v = {v} must lie in [0, 1]")));
    }
    Ok(sin_pi(alpha * v) / sin_pi(alpha * (1.0 - v)))
}

/// Principal inverse cotangent, valued in `(0, π)`.
fn arccot(g: f64) -> f64 {
    0.5 * PI - g.atan()
}

// ---------------------------------------------------------------------------
// the BFRY base law 1/𝔾_α and its closed functionals
// ---------------------------------------------------------------------------

/// Validated index of the BFRY family.
#[derive(Debug, Clone, Copy)]
pub struct BfryParams {
    alpha: f64,
}

impl BfryParams {
    pub fn new(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(BfryParams { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// The subordinator order is `1 - α`, so the unit-order horizon is
    /// `1/(1-α)`.
    pub fn horizon(&self) -> f64 {
        1.0 / (1.0 - self.alpha)
    }
}

/// `log D(w)` for `D(w) = w^{2α} - 2 w^α cos(πα) + 1`, computed on whichever
/// side of `w = 1` keeps the `log1p` argument small.
fn ln_d(alpha: f64, w: f64) -> f64 {
    let c = crate::special::cos_pi(alpha);
    let wa = w.powf(alpha);
    if wa <= 1.0 {
        (wa * wa - 2.0 * wa * c).ln_1p()
    } else {
        2.0 * alpha * w.ln() + (1.0 / (wa * wa) - 2.0 * c / wa).ln_1p()
    }
}

/// `log(1 - (1-x)^α)` for `x` in `(0, 1]`, via `expm1` so that small `x`
/// keeps full accuracy.
fn ln_one_minus_pow(alpha: f64, x: f64) -> f64 {
    (-f64::exp_m1(alpha * f64::ln_1p(-x))).ln()
}

/// CDF of `1/𝔾_α` on `(1, ∞)`:
/// `cot⁻¹((cos(π(1-α)) + (x-1)^{-α}) / sin(π(1-α))) / (π(1-α))`.
fn invg_cdf(alpha: f64, x: f64) -> f64 {
    if x <= 1.0 {
        return 0.0;
    }
    let b = 1.0 - alpha;
    let g = (crate::special::cos_pi(b) + (x - 1.0).powf(-alpha)) / sin_pi(b);
    arccot(g) / (PI * b)
}

/// Quantile of `1/𝔾_α`: `1 + [sin(π(1-α)v) / sin(π(1-α)(1-v))]^{1/α}`.
fn invg_quantile(alpha: f64, v: f64) -> f64 {
    let b = 1.0 - alpha;
    1.0 + (sin_pi(b * v) / sin_pi(b * (1.0 - v))).powf(1.0 / alpha)
}

/// Density of `1/𝔾_α`: `K (x-1)^{α-1} / D(x-1)` with
/// `K = α sin(πα)/((1-α)π)`.
fn invg_density(alpha: f64, x: f64) -> f64 {
    if x <= 1.0 {
        return 0.0;
    }
    let w = x - 1.0;
    let k = alpha * sin_pi(alpha) / ((1.0 - alpha) * PI);
    k * ((alpha - 1.0) * w.ln() - ln_d(alpha, w)).exp()
}

/// Lévy exponent of the order-one BFRY base:
/// `ψ(λ) = -log((1+λ)^α - λ^α) / (1-α)`, so that the GGC of order `1-α` has
/// Laplace transform `(1+λ)^α - λ^α`.
fn invg_levy(alpha: f64, lambda: f64) -> f64 {
    if lambda == 0.0 {
        return 0.0;
    }
    // (1+λ)^α - λ^α = λ^α expm1(α log1p(1/λ)), stable for large λ
    let ln_diff = alpha * lambda.ln() + f64::exp_m1(alpha * f64::ln_1p(1.0 / lambda)).ln();
    -ln_diff / (1.0 - alpha)
}

/// The distribution of `1/𝔾_α` on `(1, ∞)` with all closed forms attached:
/// the GGC(1-α, ·) base of the BFRY subordinator.
pub fn bfry_base(params: &BfryParams) -> DistSpec {
    let alpha = params.alpha;
    let closed = ClosedForms {
        log_distance: Some(Arc::new(move |x: f64| bfry_log_distance_unchecked(alpha, x))),
        log_distance_deriv: Some(Arc::new(move |x: f64| bfry_log_distance_deriv(alpha, x))),
        levy: Some(Arc::new(move |l: f64| invg_levy(alpha, l))),
    };
    DistSpec::from_parts(
        format!("bfry-g(alpha={alpha})"),
        (1.0, f64::INFINITY),
        Some(Continuous {
            cdf: Arc::new(move |x: f64| invg_cdf(alpha, x)),
            quantile: Arc::new(move |v: f64| invg_quantile(alpha, v)),
            density: Some(Arc::new(move |x: f64| invg_density(alpha, x))),
            splits_v: Vec::new(),
            lo_exponent: alpha - 1.0,
            hi_edge: EdgeBehavior::Tail(1.0 + alpha),
        }),
        1.0,
        Vec::new(),
        closed,
    )
    .expect("bfry base law is well formed")
}

/// The log-distance functional `R_α(x) = Φ_{F_{1/𝔾_α}}(x)`:
///
/// * `x > 1`:   `[2 log x - log D(x-1)] / (2(1-α))`
/// * `0 < x ≤ 1`: `log(x / (1 - (1-x)^α)) / (1-α)`
///
/// Both branches vanish at `x = 1`.
pub fn bfry_log_distance(params: &BfryParams, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::invalid(format!("x = {x} must be positive")));
    }
    Ok(bfry_log_distance_unchecked(params.alpha, x))
}

fn bfry_log_distance_unchecked(alpha: f64, x: f64) -> f64 {
    if x > 1.0 {
        (2.0 * x.ln() - ln_d(alpha, x - 1.0)) / (2.0 * (1.0 - alpha))
    } else if x == 1.0 {
        0.0
    } else {
        (x.ln() - ln_one_minus_pow(alpha, x)) / (1.0 - alpha)
    }
}

fn bfry_log_distance_deriv(alpha: f64, x: f64) -> f64 {
    if x > 1.0 {
        let w = x - 1.0;
        let wa = w.powf(alpha);
        let d = (ln_d(alpha, w)).exp();
        (1.0 / x - alpha * wa / w * (wa - crate::special::cos_pi(alpha)) / d) / (1.0 - alpha)
    } else {
        let om = -f64::exp_m1(alpha * f64::ln_1p(-x)); // 1 - (1-x)^α
        (1.0 / x - alpha * (1.0 - x).powf(alpha - 1.0) / om) / (1.0 - alpha)
    }
}

/// Closed density of the scaled mean `M_1(F_{Y_σ/𝔾_α}) = β_{σ,1-σ} M_σ(F_{1/𝔾_α})`:
///
/// * `0 < x ≤ 1`: `(x^{-σα/(1-α)-1}/π) sin(πσ) [1-(1-x)^α]^{σ/(1-α)}`
/// * `x > 1`:     `(x^{-σα/(1-α)-1}/π) sin(πσ F_{𝔾_α}(1/x)) D(x-1)^{σ/(2(1-α))}`
///
/// The two branches meet continuously at `x = 1`.
pub fn bfry_scaled_mean_density(params: &BfryParams, sigma: f64, x: f64) -> Result<f64> {
    let alpha = params.alpha;
    if !(sigma > 0.0 && sigma <= 1.0) {
        return Err(Error::invalid(format!("sigma = {sigma} must lie in (0, 1]")));
    }
    if !(x > 0.0) {
        return Err(Error::invalid(format!("x = {x} must be positive")));
    }
    let lead_exp = (-sigma * alpha / (1.0 - alpha) - 1.0) * x.ln();
    if x <= 1.0 {
        let s = sin_pi(sigma);
        let ln_val = lead_exp + sigma / (1.0 - alpha) * ln_one_minus_pow(alpha, x);
        Ok(s / PI * ln_val.exp())
    } else {
        // sin(πσ F_𝔾(1/x)) with F_𝔾(1/x) = 1 - F_{1/𝔾}(x); the complement is
        // computed directly from the inverse-cotangent CDF, so the sine stays
        // accurate as x → 1⁺ where F_𝔾(1/x) → 1.
        let f_invg = invg_cdf(alpha, x);
        let s = sin_pi_theta_cdf(sigma, 1.0 - f_invg, f_invg);
        let ln_val = lead_exp + sigma / (2.0 * (1.0 - alpha)) * ln_d(alpha, x - 1.0);
        Ok(s / PI * ln_val.exp())
    }
}

/// One FDD marginal of the BFRY subordinator: the density of `Σ_α(C)` for a
/// cell of order `σ`, `∫_0^∞ e^{-x/w} w^{-1} f_{α,σ}(w) dw`.
///
/// Evaluated through the substitution `w = x/s`, which turns the mixture into
/// `∫_0^∞ e^{-s} f_{α,σ}(x/s) s^{-1} ds` and keeps the live region of the
/// integrand under the quadrature nodes for every magnitude of `x`.
pub fn bfry_fdd_marginal(params: &BfryParams, sigma: f64, x: f64, cfg: &QuadConfig) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::invalid(format!("x = {x} must be positive")));
    }
    let g = |s: f64| -> Result<f64> {
        if s <= 0.0 {
            return Ok(0.0);
        }
        Ok((-s).exp() / s * bfry_scaled_mean_density(params, sigma, x / s)?)
    };
    // e^{-60} ≈ 1e-26 bounds the truncated tail. Below s = x the mixing
    // variable exceeds one and the integrand is tame; above it the small-w
    // branch behaves like s^{-σ}, which the power-stripping engine absorbs.
    let split = x.min(60.0);
    let half = cfg.scaled(0.5);
    let left = quad::adaptive(&g, 0.0, split, &half, &[])?;
    let right = if split < 60.0 {
        quad::adaptive_endpoint_powers(
            &|s: f64| Ok(g(s)? * (s - split).powf(sigma)),
            split,
            60.0,
            -sigma,
            0.0,
            &half,
        )?
    } else {
        0.0
    };
    Ok(left + right)
}

/// All FDD marginals of the BFRY subordinator over a partition of
/// `(0, 1/(1-α)]`; cell `i` has order `σ_i = (1-α)|C_i|` and the joint
/// density is the product of the returned values.
pub fn bfry_fdd(
    params: &BfryParams,
    partition: &Partition,
    points: &[f64],
    cfg: &QuadConfig,
) -> Result<Vec<f64>> {
    let sigmas = partition.sigmas(1.0 - params.alpha)?;
    if points.len() != sigmas.len() {
        return Err(Error::invalid(format!(
            "{} evaluation points for {} cells",
            points.len(),
            sigmas.len()
        )));
    }
    sigmas
        .iter()
        .zip(points)
        .map(|(&sigma, &x)| bfry_fdd_marginal(params, sigma, x, cfg))
        .collect()
}

/// Mass of the order-σ scaled mean density over its full support; the
/// endpoint powers at 0 and the slow tail are removed by substitution, so
/// this serves as the normalization oracle for [`bfry_scaled_mean_density`].
pub fn bfry_scaled_mean_mass(params: &BfryParams, sigma: f64, cfg: &QuadConfig) -> Result<f64> {
    let alpha = params.alpha;
    // (0, 1]: f(x) ~ x^{σ-1} at 0; strip the power
    let low = quad::adaptive_endpoint_powers(
        &|t: f64| {
            Ok(bfry_scaled_mean_density(params, sigma, t)? * t.powf(1.0 - sigma))
        },
        0.0,
        1.0,
        sigma - 1.0,
        0.0,
        &cfg.scaled(0.5),
    )?;
    // (1, ∞): x = 1 + (r/(1-r))^{1/α} regularizes both the (x-1)^α approach
    // at 1 and the x^{-1-α·(…)} tail
    let high = quad::adaptive(
        &|r: f64| {
            if r <= 0.0 || r >= 1.0 {
                return Ok(0.0);
            }
            let ln_w = (r.ln() - f64::ln_1p(-r)) / alpha;
            let w = ln_w.exp();
            let x = 1.0 + w;
            let jac = w / (alpha * r * (1.0 - r));
            Ok(bfry_scaled_mean_density(params, sigma, x)? * jac)
        },
        0.0,
        1.0,
        &cfg.scaled(0.5),
        &[0.5],
    )?;
    Ok(low + high)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::expected_log_distance;
    use crate::dist::testlaws::uniform;

    fn cfg() -> QuadConfig {
        QuadConfig::default()
    }

    #[test]
    fn lamperti_closed_values_and_symmetry() {
        let v = lamperti_density(0.5, 1.0).unwrap();
        assert!((v - 1.0 / PI).abs() < 1e-15, "{v}");
        // f(1/y)/y² = f(y): the ratio law is inversion-invariant
        for &a in &[0.3, 0.5, 0.7] {
            for &y in &[0.2, 0.9, 3.5] {
                let lhs = lamperti_density(a, 1.0 / y).unwrap() / (y * y);
                let rhs = lamperti_density(a, y).unwrap();
                assert!((lhs - rhs).abs() < 1e-14, "a={a} y={y}");
            }
        }
    }

    #[test]
    fn lamperti_cdf_quantile_density_are_consistent() {
        for &a in &[0.3, 0.5, 0.7] {
            for &v in &[0.1, 0.5, 0.9] {
                let z = lamperti_quantile(a, v).unwrap();
                let back = lamperti_cdf(a, z).unwrap();
                assert!((back - v).abs() < 1e-12, "a={a} v={v}: {back}");
            }
            let h = 1e-6;
            for &z in &[0.4, 1.0, 2.5] {
                let d = (lamperti_cdf(a, z + h).unwrap() - lamperti_cdf(a, z - h).unwrap())
                    / (2.0 * h);
                let f = lamperti_density(a, z).unwrap();
                assert!((d - f).abs() < 1e-7, "a={a} z={z}");
            }
        }
    }

    #[test]
    fn lamperti_mass_is_one() {
        let v = quad::adaptive_to_inf(
            &|y: f64| lamperti_density(0.5, y.max(1e-300)),
            0.0,
            &cfg(),
            &[1.0],
        )
        .unwrap();
        assert!((v - 1.0).abs() < 1e-8, "{v}");
    }

    #[test]
    fn bfry_base_cdf_limits_and_density() {
        for &a in &[0.3, 0.5, 0.7] {
            let p = BfryParams::new(a).unwrap();
            let d = bfry_base(&p);
            assert!(d.cdf(1.0 + 1e-12) < 1e-3);
            // the survival function decays like the analytic power tail
            // sin(π(1-α)) (x-1)^{-α} / (π(1-α))
            let x: f64 = 1e6;
            let tail = sin_pi(1.0 - a) * (x - 1.0).powf(-a) / (PI * (1.0 - a));
            assert!(
                (d.sf(x) - tail).abs() < 0.01 * tail,
                "a={a}: sf={} tail={tail}",
                d.sf(x)
            );
            assert!(d.cdf(1e12) > 1.0 - 1e-3);
            // density is the CDF derivative
            let h = 1e-6;
            for &x in &[1.3, 2.0, 5.0] {
                let num = (d.cdf(x + h) - d.cdf(x - h)) / (2.0 * h);
                let den = d.density(x).unwrap();
                assert!((num - den).abs() < 1e-6 * (1.0 + den), "a={a} x={x}");
            }
        }
        // α = 1/2: 1/𝔾 is 1 + the gamma ratio, so the density at 2 is 1/(2π)
        let p = BfryParams::new(0.5).unwrap();
        let d = bfry_base(&p);
        assert!((d.density(2.0).unwrap() - 1.0 / (2.0 * PI)).abs() < 1e-14);
    }

    #[test]
    fn log_distance_closed_form_spot_values() {
        let p = BfryParams::new(0.5).unwrap();
        // both branches vanish at 1
        assert_eq!(bfry_log_distance(&p, 1.0).unwrap(), 0.0);
        let v = bfry_log_distance(&p, 0.5).unwrap();
        let want = 2.0 * (0.5 / (1.0 - 0.5f64.sqrt())).ln();
        assert!((v - want).abs() < 1e-14, "{v} vs {want}");
        let v = bfry_log_distance(&p, 2.0).unwrap();
        assert!((v - 2.0f64.ln()).abs() < 1e-14, "{v}");
    }

    #[test]
    fn log_distance_matches_direct_quadrature() {
        let c = cfg();
        for &a in &[0.3, 0.5, 0.7] {
            let p = BfryParams::new(a).unwrap();
            let d = bfry_base(&p);
            for &x in &[0.5, 2.0] {
                let closed = bfry_log_distance(&p, x).unwrap();
                let direct = expected_log_distance(&d, x, &c).unwrap();
                assert!(
                    (closed - direct).abs() < 1e-7,
                    "a={a} x={x}: {closed} vs {direct}"
                );
            }
        }
    }

    #[test]
    fn scaled_mean_density_is_continuous_at_one() {
        for &a in &[0.3, 0.5, 0.7] {
            let p = BfryParams::new(a).unwrap();
            for &s in &[0.25, 0.5, 1.0] {
                let eps = 1e-8;
                let below = bfry_scaled_mean_density(&p, s, 1.0 - eps).unwrap();
                let above = bfry_scaled_mean_density(&p, s, 1.0 + eps).unwrap();
                // the branches approach each other like (x-1)^α
                let tol = 5.0 * eps.powf(a) + 1e-12;
                assert!(
                    (below - above).abs() < tol,
                    "a={a} s={s}: {below} vs {above}"
                );
            }
        }
    }

    #[test]
    fn scaled_mean_density_normalizes() {
        let c = cfg();
        for &a in &[0.3, 0.7] {
            let p = BfryParams::new(a).unwrap();
            for &s in &[0.5, 1.0] {
                let m = bfry_scaled_mean_mass(&p, s, &c).unwrap();
                assert!((m - 1.0).abs() < 1e-7, "a={a} s={s}: {m}");
            }
        }
    }

    #[test]
    fn scaled_mean_density_agrees_with_generic_route() {
        // the closed two-branch form must equal the order-one scaled-mean
        // formula driven by R_α and the base CDF
        let c = cfg();
        for &a in &[0.3, 0.5] {
            let p = BfryParams::new(a).unwrap();
            let d = bfry_base(&p);
            for &s in &[0.5, 1.0 - a, 1.0] {
                for &x in &[0.3, 0.9, 1.5, 4.0] {
                    let closed = bfry_scaled_mean_density(&p, s, x).unwrap();
                    let generic = operators::scaled_mean_density(s, &d, x, &c).unwrap();
                    assert!(
                        (closed - generic).abs() < 1e-10 * (1.0 + closed),
                        "a={a} s={s} x={x}: {closed} vs {generic}"
                    );
                }
            }
        }
    }

    #[test]
    fn cdfid_identity_at_order_one_minus_alpha() {
        // sin(π(1-α) F_𝔾(1/x)) = sin(π(1-α)) / sqrt(D(x-1)) for x > 1
        for &a in &[0.3, 0.5, 0.7] {
            for &x in &[1.2, 2.0, 7.0] {
                let q = 1.0 - invg_cdf(a, x);
                let lhs = sin_pi((1.0 - a) * q);
                let rhs = sin_pi(1.0 - a) * (-0.5 * ln_d(a, x - 1.0)).exp();
                assert!((lhs - rhs).abs() < 1e-12, "a={a} x={x}: {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn fdd_marginal_laplace_transform() {
        // ∫ f_{α,σ}(w)/(1+λw) dw = ((1+λ)^α - λ^α)^{σ/(1-α)}, the Laplace
        // transform of the marginal by Fubini
        let c = cfg();
        for &(a, s, l) in &[(0.5, 0.5, 1.0), (0.5, 1.0, 1.0), (0.3, 0.25, 2.0), (0.7, 0.75, 0.5)] {
            let p = BfryParams::new(a).unwrap();
            let low = quad::adaptive_endpoint_powers(
                &|w: f64| {
                    Ok(bfry_scaled_mean_density(&p, s, w)? / (1.0 + l * w) * w.powf(1.0 - s))
                },
                0.0,
                1.0,
                s - 1.0,
                0.0,
                &c,
            )
            .unwrap();
            let high = quad::adaptive_to_inf(
                &|w: f64| Ok(bfry_scaled_mean_density(&p, s, w)? / (1.0 + l * w)),
                1.0,
                &c,
                &[2.0],
            )
            .unwrap();
            let want = ((1.0 + l).powf(a) - l.powf(a)).powf(s / (1.0 - a));
            let got = low + high;
            assert!((got - want).abs() < 1e-7, "a={a} s={s} l={l}: {got} vs {want}");
        }
        // at σ = 1-α (a unit-length cell) and λ = 1 this is the subordinator
        // transform at t = 1: √2 - 1 for α = 1/2
        let p = BfryParams::new(0.5).unwrap();
        let want = 2.0f64.sqrt() - 1.0;
        let got = ((1.0f64 + 1.0).powf(0.5) - 1.0).powf(0.5 / 0.5);
        assert!((got - want).abs() < 1e-15);
        let _ = p;
    }

    #[test]
    fn fdd_marginals_product_and_partition_validation() {
        let c = cfg();
        let spec = SubordinatorSpec::new(1.0, uniform()).unwrap();
        let part = Partition::from_lengths(&[0.5, 0.5]).unwrap();
        let m = fdd_densities(&spec, &part, &[1.0, 1.0], &c).unwrap();
        assert_eq!(m.len(), 2);
        assert!((m[0] - m[1]).abs() < 1e-12); // equal cells, equal marginals
        assert!((joint_density(&m) - m[0] * m[1]).abs() < 1e-15);
        // a partition that does not tile the horizon is rejected
        let bad = Partition::from_lengths(&[0.5, 0.25]).unwrap();
        assert!(fdd_densities(&spec, &bad, &[1.0, 1.0], &c).is_err());
        // single degenerate cell: the marginal is the order-one GGC density
        let single = Partition::from_lengths(&[1.0]).unwrap();
        let m1 = fdd_densities(&spec, &single, &[1.0], &c).unwrap();
        let g1 = operators::ggc_density(1.0, &uniform(), 1.0, &c).unwrap();
        assert!((m1[0] - g1).abs() < 1e-12);
    }

    #[test]
    fn bfry_fdd_marginal_partial_mass_matches_fubini() {
        // ∫_0^X marginal dx = ∫ f_{α,σ}(w)(1 - e^{-X/w}) dw: the left side
        // exercises the marginal pointwise, the right side is one quadrature
        let c = cfg();
        let p = BfryParams::new(0.5).unwrap();
        let sigma = 0.5;
        let big_x = 5.0;
        let lhs = quad::adaptive(
            &|x: f64| {
                if x <= 0.0 {
                    return Ok(0.0);
                }
                bfry_fdd_marginal(&p, sigma, x, &QuadConfig::with_tol(1e-9, 1e-8))
            },
            0.0,
            big_x,
            &QuadConfig::with_tol(1e-7, 1e-7),
            &[1.0],
        )
        .unwrap();
        let weight = |w: f64| -> Result<f64> {
            Ok(-f64::exp_m1(-big_x / w))
        };
        let rhs_low = quad::adaptive_endpoint_powers(
            &|w: f64| {
                Ok(bfry_scaled_mean_density(&p, sigma, w)? * weight(w)? * w.powf(1.0 - sigma))
            },
            0.0,
            1.0,
            sigma - 1.0,
            0.0,
            &c,
        )
        .unwrap();
        let rhs_high = quad::adaptive_to_inf(
            &|w: f64| Ok(bfry_scaled_mean_density(&p, sigma, w)? * weight(w)?),
            1.0,
            &c,
            &[big_x],
        )
        .unwrap();
        let rhs = rhs_low + rhs_high;
        assert!((lhs - rhs).abs() < 1e-5, "{lhs} vs {rhs}");
    }

    #[test]
    fn bfry_fdd_requires_matching_points() {
        let c = cfg();
        let p = BfryParams::new(0.5).unwrap();
        let part = Partition::from_lengths(&[1.0, 1.0]).unwrap();
        assert!(bfry_fdd(&p, &part, &[1.0], &c).is_err());
        let m = bfry_fdd(&p, &part, &[1.0, 2.0], &c).unwrap();
        assert_eq!(m.len(), 2);
        assert!(m.iter().all(|&v| v > 0.0));
    }

    #[test]
    fn lamperti_rejects_bad_arguments() {
        assert!(lamperti_density(1.0, 1.0).is_err());
        assert!(lamperti_density(0.5, 0.0).is_err());
        assert!(BfryParams::new(0.0).is_err());
    }
}
