//! The two law-to-law transforms: beta scaling and exponential tilting
//! (Esscher transform), as exact density maps.
//!
//! Beta scaling multiplies `M_{θσ}(F_X)` by an independent
//! `beta(θσ, θ(1-σ))` factor; the product is again a Dirichlet mean,
//! `M_θ(F_{X·Y_σ})`, whose base is `F_X` mixed with an atom at zero. At
//! order one this gives a fully closed density
//! `ξ(x) = (x^{σ-1}/π) sin(π F_{XY_σ}(x)) e^{-σ Φ_X(x)}` and, through the
//! gamma mixture, the closed density of the GGC `G_σ M_σ(F_X)` that the
//! subordinator marginals are built from.
//!
//! Tilting the density of `T_θ = G_θ M_θ(F_X)` by `e^{-t}` (after scaling by
//! `c`) lands in the mean family of `A_c = cX/(cX+1)`; the maps between the
//! two densities, their Lévy exponents and their log-distance functionals are
//! all closed and implemented here, together with the pushforward
//! construction of `F_{A_c}` used by the independent-quadrature checks.

use crate::config::QuadConfig;
use crate::dist::{self, Atom, ClosedForms, Continuous, DistSpec, EdgeBehavior, Ev};
use crate::error::{Error, Result};
use crate::mean::{self, MeanLaw};
use crate::quad;
use crate::special::{ln_gamma, sin_pi};
use std::f64::consts::PI;
use std::sync::Arc;

/// The scaled mean `β_{θσ, θ(1-σ)} · M_{θσ}(F_X)`, kept with its parameters.
///
/// By the beta-scaling identity this equals `M_θ(F_{X·Y_σ})` in law;
/// [`ScaledMeanLaw::as_mean_law`] performs that conversion.
#[derive(Debug, Clone)]
pub struct ScaledMeanLaw {
    sigma: f64,
    order: f64,
    base: DistSpec,
}

impl ScaledMeanLaw {
    pub fn new(order: f64, sigma: f64, base: DistSpec) -> Result<Self> {
        if !(order > 0.0) {
            return Err(Error::invalid(format!("order = {order} must be positive")));
        }
        if !(sigma > 0.0 && sigma <= 1.0) {
            return Err(Error::invalid(format!("sigma = {sigma} must lie in (0, 1]")));
        }
        Ok(ScaledMeanLaw { sigma, order, base })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn order(&self) -> f64 {
        self.order
    }

    /// The reduced order θσ of the mean being scaled.
    pub fn reduced_order(&self) -> f64 {
        self.order * self.sigma
    }

    pub fn base(&self) -> &DistSpec {
        &self.base
    }

    /// The equivalent plain mean law `M_θ(F_{X·Y_σ})`.
    pub fn as_mean_law(&self) -> Result<MeanLaw> {
        MeanLaw::new(self.order, dist::mix_with_atom(&self.base, self.sigma)?)
    }
}

/// Beta scaling: the law of `β_{θσ,θ(1-σ)} · M_{θσ}(F_X)`, returned as the
/// order-θ mean of the mixed base. The GGC identity
/// `GGC(θσ, F_X) = GGC(θ, F_{XY_σ})` rides on the same mixed base.
pub fn beta_scale(theta: f64, sigma: f64, base: &DistSpec) -> Result<MeanLaw> {
    ScaledMeanLaw::new(theta, sigma, base.clone())?.as_mean_law()
}

/// Closed density of `M_1(F_{X·Y_σ}) = β_{σ,1-σ} M_σ(F_X)` at `x > 0`:
/// `(x^{σ-1}/π) sin(π σ (1 - F_X(x))) e^{-σ Φ_X(x)}`, with the sine factor
/// collapsing to `sin(π(1-σ))` below the support of `X` and to 0 above it.
pub fn scaled_mean_density(sigma: f64, base: &DistSpec, x: f64, cfg: &QuadConfig) -> Result<f64> {
    if !(sigma > 0.0 && sigma <= 1.0) {
        return Err(Error::invalid(format!("sigma = {sigma} must lie in (0, 1]")));
    }
    if !(x > 0.0) {
        return Err(Error::invalid(format!("x = {x} must be positive")));
    }
    let s = sin_pi(sigma * base.sf(x));
    if s == 0.0 {
        return Ok(0.0);
    }
    let phi = dist::log_distance_eval(base, x, cfg)?;
    Ok(x.powf(sigma - 1.0) * s * (-sigma * phi).exp() / PI)
}

/// Density of the GGC `G_σ M_σ(F_X) = G_1 M_1(F_{XY_σ})` at `x > 0`, as the
/// gamma mixture `(1/π)∫ e^{-x/y} y^{σ-2} sin(π F_{XY_σ}(y)) e^{-σΦ_X(y)} dy`.
pub fn ggc_density(sigma: f64, base: &DistSpec, x: f64, cfg: &QuadConfig) -> Result<f64> {
    if !(sigma > 0.0 && sigma <= 1.0) {
        return Err(Error::invalid(format!("sigma = {sigma} must lie in (0, 1]")));
    }
    if !(x > 0.0) {
        return Err(Error::invalid(format!("x = {x} must be positive")));
    }
    // degenerate base δ_c: the mean collapses and the GGC is just c·G_σ
    if base.continuous_mass() == 0.0 && base.atoms().len() == 1 {
        let c = base.atoms()[0].location;
        if c <= 0.0 {
            return Err(Error::invalid("GGC of a point mass at 0 is degenerate"));
        }
        let ln = (sigma - 1.0) * (x / c).ln() - x / c - ln_gamma(sigma) - c.ln();
        return Ok(ln.exp());
    }
    let hi = base.support().1;
    let f = |y: f64| -> Result<f64> {
        if y <= 0.0 || x / y > 700.0 {
            return Ok(0.0);
        }
        let s = sin_pi(sigma * base.sf(y));
        if s == 0.0 {
            return Ok(0.0);
        }
        let phi = dist::log_distance_eval(base, y, cfg)?;
        Ok((-x / y).exp() * y.powf(sigma - 2.0) * s * (-sigma * phi).exp() / PI)
    };
    let mut splits = vec![base.support().0, x];
    splits.extend(base.atoms().iter().map(|a| a.location));
    let v = if hi.is_finite() {
        quad::adaptive(&f, 0.0, hi, cfg, &splits)?
    } else {
        quad::adaptive_to_inf(&f, 0.0, cfg, &splits)?
    };
    Ok(v)
}

/// The law of `A_c = cX/(cX+1)` on `[0, 1)`, built by exact pushforward:
/// CDF composed with the inverse map, density by change of variables, and the
/// closed forms carried over (`Φ_{A_c}` needs `ψ_X(c)`, computed here once by
/// quadrature when no closed `ψ` is attached).
pub fn tilt_base(base: &DistSpec, c: f64, cfg: &QuadConfig) -> Result<DistSpec> {
    if !(c > 0.0) {
        return Err(Error::invalid(format!("c = {c} must be positive")));
    }
    let fwd = move |x: f64| c * x / (c * x + 1.0);
    let inv = move |y: f64| y / (c * (1.0 - y));
    let (lo, hi) = base.support();
    let new_lo = fwd(lo);
    let new_hi = if hi.is_finite() { fwd(hi) } else { 1.0 };

    let atoms: Vec<Atom> = base
        .atoms()
        .iter()
        .map(|a| Atom {
            location: fwd(a.location),
            weight: a.weight,
        })
        .collect();

    let continuous = match (&base.continuous, base.continuous_mass() > 0.0) {
        (Some(cont), true) => {
            let cdf0 = cont.cdf.clone();
            let q0 = cont.quantile.clone();
            let den0 = cont.density.clone();
            let hi_edge = match cont.hi_edge {
                EdgeBehavior::Finite(p) => EdgeBehavior::Finite(p),
                // x^{-beta} tail maps to (1-y)^{beta-2} at the new upper edge
                EdgeBehavior::Tail(beta) => EdgeBehavior::Finite(beta - 2.0),
            };
            Some(Continuous {
                cdf: Arc::new(move |y: f64| {
                    if y >= 1.0 {
                        1.0
                    } else {
                        cdf0(inv(y))
                    }
                }),
                quantile: Arc::new(move |v: f64| fwd(q0(v))),
                density: den0.map(|d| -> Ev {
                    Arc::new(move |y: f64| {
                        if y >= 1.0 {
                            0.0
                        } else {
                            let om = 1.0 - y;
                            d(inv(y)) / (c * om * om)
                        }
                    })
                }),
                splits_v: cont.splits_v.clone(),
                lo_exponent: cont.lo_exponent,
                hi_edge,
            })
        }
        _ => None,
    };

    // ψ_X(c) enters every closed form below
    let psi_c = dist::levy_eval(base, c, cfg)?;
    let closed = ClosedForms {
        log_distance: base.closed.log_distance.clone().map(|phi| -> Ev {
            Arc::new(move |y: f64| phi(inv(y)) - psi_c + (c * (1.0 - y)).ln())
        }),
        log_distance_deriv: base.closed.log_distance_deriv.clone().map(|d| -> Ev {
            Arc::new(move |y: f64| {
                let om = 1.0 - y;
                d(inv(y)) / (c * om * om) - 1.0 / om
            })
        }),
        levy: base.closed.levy.clone().map(|psi| -> Ev {
            Arc::new(move |l: f64| psi(c * (1.0 + l)) - psi_c)
        }),
    };

    DistSpec::from_parts(
        format!("tilt({}, c={c})", base.label()),
        (new_lo, new_hi),
        continuous,
        base.continuous_mass(),
        atoms,
        closed,
    )
}

/// Density of `M_θ(F_{A_c})` at `y ∈ (0, 1)`, mapped from the density of
/// `M_θ(F_X)`: `(1/c) e^{θψ_X(c)} (1-y)^{θ-2} ξ_{θF_X}(y/(c(1-y)))`.
pub fn tilt_density_forward(
    theta: f64,
    c: f64,
    base: &DistSpec,
    y: f64,
    cfg: &QuadConfig,
) -> Result<f64> {
    if !(c > 0.0) {
        return Err(Error::invalid(format!("c = {c} must be positive")));
    }
    if !(y > 0.0 && y < 1.0) {
        return Err(Error::invalid(format!("y = {y} must lie in (0, 1)")));
    }
    let law = MeanLaw::new(theta, base.clone())?;
    let psi_c = dist::levy_eval(base, c, cfg)?;
    let om = 1.0 - y;
    let xi = mean::mean_density(&law, y / (c * om), cfg)?;
    Ok(xi * (theta * psi_c).exp() * om.powf(theta - 2.0) / c)
}

/// Inverse of the tilt map: the density of `M_θ(F_X)` at `x`, recovered from
/// the density of `M_θ(F_{A_c})` (which is computed independently on the
/// pushforward law, making the round trip a genuine two-route identity):
/// `c e^{-θψ_X(c)} (cx+1)^{θ-2} ξ_{θF_{A_c}}(cx/(cx+1))`.
pub fn tilt_density_inverse(
    theta: f64,
    c: f64,
    base: &DistSpec,
    x: f64,
    cfg: &QuadConfig,
) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::invalid(format!("x = {x} must be positive")));
    }
    let tilted = tilt_base(base, c, cfg)?;
    let law = MeanLaw::new(theta, tilted)?;
    let psi_c = dist::levy_eval(base, c, cfg)?;
    let cx1 = c * x + 1.0;
    let xi = mean::mean_density(&law, c * x / cx1, cfg)?;
    Ok(xi * c * (-theta * psi_c).exp() * cx1.powf(theta - 2.0))
}

/// Lévy exponent of the tilted GGC: `θ[ψ_X(c(1+λ)) - ψ_X(c)]`, which equals
/// `θ ψ_{A_c}(λ)`.
pub fn tilted_levy(theta: f64, c: f64, base: &DistSpec, lambda: f64, cfg: &QuadConfig) -> Result<f64> {
    if !(theta > 0.0) {
        return Err(Error::invalid(format!("theta = {theta} must be positive")));
    }
    if !(c > 0.0) {
        return Err(Error::invalid(format!("c = {c} must be positive")));
    }
    if !(lambda >= 0.0) {
        return Err(Error::invalid(format!("lambda = {lambda} must be nonnegative")));
    }
    if lambda == 0.0 {
        return Ok(0.0);
    }
    let a = dist::levy_eval(base, c * (1.0 + lambda), cfg)?;
    let b = dist::levy_eval(base, c, cfg)?;
    Ok(theta * (a - b))
}

/// Density of `M_1(F_{A_c Y_σ}) = β_{σ,1-σ} M_σ(F_{A_c})` at `y ∈ (0, 1)`:
/// tilting and beta scaling commute, and the composite keeps a closed form
/// `e^{σψ_X(c)} y^{σ-1} / (π c^σ (1-y)^σ) · sin(πF_{XY_σ}(z)) e^{-σΦ_X(z)}`
/// with `z = y/(c(1-y))`.
pub fn tilt_scale_density(
    sigma: f64,
    c: f64,
    base: &DistSpec,
    y: f64,
    cfg: &QuadConfig,
) -> Result<f64> {
    if !(sigma > 0.0 && sigma <= 1.0) {
        return Err(Error::invalid(format!("sigma = {sigma} must lie in (0, 1]")));
    }
    if !(c > 0.0) {
        return Err(Error::invalid(format!("c = {c} must be positive")));
    }
    if !(y > 0.0 && y < 1.0) {
        return Err(Error::invalid(format!("y = {y} must lie in (0, 1)")));
    }
    let om = 1.0 - y;
    let z = y / (c * om);
    let s = sin_pi(sigma * base.sf(z));
    if s == 0.0 {
        return Ok(0.0);
    }
    let psi_c = dist::levy_eval(base, c, cfg)?;
    let phi_z = dist::log_distance_eval(base, z, cfg)?;
    Ok((sigma * psi_c).exp() * y.powf(sigma - 1.0) / (PI * c.powf(sigma) * om.powf(sigma))
        * s
        * (-sigma * phi_z).exp())
}

/// `Φ_{A_c}(y) = Φ_X(y/(c(1-y))) - ψ_X(c) + log(c(1-y))` for `y ∈ (0, 1)`.
pub fn tilted_log_distance(c: f64, base: &DistSpec, y: f64, cfg: &QuadConfig) -> Result<f64> {
    if !(c > 0.0) {
        return Err(Error::invalid(format!("c = {c} must be positive")));
    }
    if !(y > 0.0 && y < 1.0) {
        return Err(Error::invalid(format!("y = {y} must lie in (0, 1)")));
    }
    let om = 1.0 - y;
    let phi = dist::log_distance_eval(base, y / (c * om), cfg)?;
    let psi_c = dist::levy_eval(base, c, cfg)?;
    Ok(phi - psi_c + (c * om).ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::testlaws::{exp_ratio, uniform};
    use crate::dist::{expected_log_distance, levy_exponent};
    use std::f64::consts::E;

    fn cfg() -> QuadConfig {
        QuadConfig::default()
    }

    #[test]
    fn beta_scale_at_sigma_one_is_identity() {
        let law = beta_scale(2.0, 1.0, &uniform()).unwrap();
        assert_eq!(law.theta(), 2.0);
        assert!(law.base().atoms().is_empty());
    }

    #[test]
    fn beta_scale_reduces_the_levy_exponent() {
        // θψ_{F_{XYσ}}(λ) = θσ ψ_{F_X}(λ)
        let c = cfg();
        let law = beta_scale(2.0, 0.5, &uniform()).unwrap();
        let lhs = 2.0 * levy_exponent(law.base(), 1.3, &c).unwrap();
        let rhs = 1.0 * levy_exponent(&uniform(), 1.3, &c).unwrap();
        assert!((lhs - rhs).abs() < 1e-10);
        let s = ScaledMeanLaw::new(2.0, 0.5, uniform()).unwrap();
        assert_eq!(s.reduced_order(), 1.0);
    }

    #[test]
    fn scaled_density_reduces_to_plain_mean_at_sigma_one() {
        let c = cfg();
        let v = scaled_mean_density(1.0, &uniform(), 0.5, &c).unwrap();
        assert!((v - 2.0 * E / PI).abs() < 1e-10, "{v}");
    }

    #[test]
    fn scaled_density_of_exp_ratio_matches_closed_form() {
        // (1/π) sin(πσ/(1+x)) x^{σ/(1+x)-1} at σ = 1/2, x = 1
        let c = cfg();
        let v = scaled_mean_density(0.5, &exp_ratio(), 1.0, &c).unwrap();
        let want = (PI / 4.0).sin() / PI;
        assert!((v - want).abs() < 1e-10, "{v} vs {want}");
        // branch continuity across the support edge of a bounded base
        let u = uniform();
        let below = scaled_mean_density(0.5, &u, 1.0 - 1e-9, &c).unwrap();
        let above = scaled_mean_density(0.5, &u, 1.0 + 1e-9, &c).unwrap();
        assert!((below - above).abs() < 1e-4, "{below} vs {above}");
    }

    #[test]
    fn ggc_density_of_point_mass_is_exponential() {
        let c = cfg();
        let pm = DistSpec::point_mass(1.0);
        for &x in &[0.1, 0.5, 1.0, 3.0] {
            let v = ggc_density(1.0, &pm, x, &c).unwrap();
            assert!((v - (-x).exp()).abs() < 1e-9, "x={x}: {v}");
        }
    }

    #[test]
    fn ggc_density_frozen_values() {
        // gamma mixture over the order-one scaled mean of U, σ = 1/2; values
        // frozen from an independent high-precision quadrature
        let c = cfg();
        let v = ggc_density(0.5, &uniform(), 0.25, &c).unwrap();
        assert!((v - 0.865_613_623_385_083_5).abs() < 1e-8, "{v}");
        let v = ggc_density(0.5, &uniform(), 1.0, &c).unwrap();
        assert!((v - 0.101_165_966_705_232_57).abs() < 1e-8, "{v}");
        let v = ggc_density(0.5, &exp_ratio(), 1.0, &c).unwrap();
        assert!((v - 0.166_794_481_177_857_9).abs() < 1e-8, "{v}");
    }

    #[test]
    fn tilt_forward_of_exp_ratio_gives_the_uniform_mean() {
        // A_1 of the exponential ratio is uniform; ψ_W(1) = 1
        let c = cfg();
        let v = tilt_density_forward(1.0, 1.0, &exp_ratio(), 0.5, &c).unwrap();
        assert!((v - 2.0 * E / PI).abs() < 1e-8, "{v}");
    }

    #[test]
    fn tilt_round_trip_reproduces_the_mean_density() {
        let c = cfg();
        let u = uniform();
        for &x in &[0.3, 0.8, 1.7] {
            let direct = mean::mean_density(&MeanLaw::new(1.0, exp_ratio()).unwrap(), x, &c).unwrap();
            let via = tilt_density_inverse(1.0, 1.0, &exp_ratio(), x, &c).unwrap();
            assert!((via - direct).abs() < 1e-8, "x={x}: {via} vs {direct}");
        }
        for &x in &[0.25, 0.6] {
            let direct = mean::mean_density(&MeanLaw::new(2.0, u.clone()).unwrap(), x, &c).unwrap();
            let via = tilt_density_inverse(2.0, 0.5, &u, x, &c).unwrap();
            assert!((via - direct).abs() < 1e-8, "x={x}: {via} vs {direct}");
        }
    }

    #[test]
    fn tilted_levy_connects_exp_ratio_to_uniform() {
        let c = cfg();
        let v = tilted_levy(1.0, 1.0, &exp_ratio(), 1.0, &c).unwrap();
        let want = 2.0 * 2.0f64.ln() - 1.0; // ψ_U(1)
        assert!((v - want).abs() < 1e-9, "{v} vs {want}");
        assert_eq!(tilted_levy(1.0, 1.0, &exp_ratio(), 0.0, &c).unwrap(), 0.0);
        // and it equals the Lévy exponent of the pushforward law
        let tilted = tilt_base(&exp_ratio(), 1.0, &c).unwrap();
        let via = levy_exponent(&tilted, 1.0, &c).unwrap();
        assert!((v - via).abs() < 1e-8, "{v} vs {via}");
    }

    #[test]
    fn tilt_scale_reduces_to_forward_at_sigma_one() {
        let c = cfg();
        for &y in &[0.2, 0.5, 0.8] {
            let a = tilt_scale_density(1.0, 2.0, &exp_ratio(), y, &c).unwrap();
            let b = tilt_density_forward(1.0, 2.0, &exp_ratio(), y, &c).unwrap();
            assert!((a - b).abs() < 1e-9, "y={y}: {a} vs {b}");
        }
    }

    #[test]
    fn tilt_scale_connects_exp_ratio_to_uniform() {
        let c = cfg();
        let a = tilt_scale_density(0.5, 1.0, &exp_ratio(), 0.5, &c).unwrap();
        let b = scaled_mean_density(0.5, &uniform(), 0.5, &c).unwrap();
        assert!((a - b).abs() < 1e-8, "{a} vs {b}");
    }

    #[test]
    fn tilted_log_distance_of_point_mass() {
        // A_1 of δ_1 is δ_{1/2}: Φ(y) = log|y - 1/2| = log|2y-1| - log 2
        let c = cfg();
        let pm = DistSpec::point_mass(1.0);
        let v = tilted_log_distance(1.0, &pm, 0.75, &c).unwrap();
        let want = 0.5f64.ln() - 2.0f64.ln();
        assert!((v - want).abs() < 1e-12, "{v} vs {want}");
    }

    #[test]
    fn tilted_log_distance_matches_direct_quadrature() {
        let c = cfg();
        for &cc in &[0.5, 2.0] {
            let pushed = tilt_base(&exp_ratio(), cc, &c).unwrap();
            for &y in &[0.2, 0.5, 0.8] {
                let closed = tilted_log_distance(cc, &exp_ratio(), y, &c).unwrap();
                let direct = expected_log_distance(&pushed, y, &c).unwrap();
                assert!((closed - direct).abs() < 1e-7, "c={cc} y={y}: {closed} vs {direct}");
            }
        }
    }
}
