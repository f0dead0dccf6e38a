//! Distribution of the Dirichlet mean `M_θ(F_X)`: inversion-formula CDF and
//! density for every order `θ > 0`.
//!
//! Everything is driven by the kernel
//! `Δ_θ(t|F) = (1/π) sin(πθF(t)) e^{-θΦ_F(t)}`:
//!
//! * CDF:                `∫_0^x (x-t)^{θ-1} Δ_θ(t) dt`
//! * density, θ = 1:     `Δ_1(x)`
//! * density, θ > 1:     `(θ-1) ∫_0^x (x-t)^{θ-2} Δ_θ(t) dt`
//! * density, 0 < θ < 1: `(1/π) ∫_0^x (x-t)^{θ-1} d_θ(t) dt` with
//!   `d_θ = d/dt [sin(πθF(t)) e^{-θΦ(t)}]` expanded by the product rule into
//!   `θ[πF'(t)cos(πθF(t)) - Φ'(t)sin(πθF(t))]e^{-θΦ(t)}`.
//!
//! All formulas require `θ · (largest jump of F) < 1`. The Abel kernels have
//! integrable endpoint singularities at `t = x`, and an atom of `F` at `a`
//! puts a factor `|t-a|^{-θw}` inside `e^{-θΦ}`; both are removed exactly by
//! the endpoint-power substitutions in [`crate::quad`], with the atom's log
//! term subtracted from `Φ` before exponentiating. The general-θ branch needs
//! `F` absolutely continuous on `[0, x]` (the derivative kernel has no
//! distributional meaning across an atom), so atoms at or below `x` are
//! rejected there.

use crate::config::QuadConfig;
use crate::dist::{self, DistSpec};
use crate::error::{Error, Result};
use crate::quad;
use crate::special::{cos_pi_theta_cdf, sin_pi_theta_cdf};
use rayon::prelude::*;
use std::f64::consts::PI;

/// The pair `(θ, F_X)` identifying the Dirichlet mean `M_θ(F_X)`.
#[derive(Debug, Clone)]
pub struct MeanLaw {
    theta: f64,
    base: DistSpec,
}

impl MeanLaw {
    /// Validates `θ > 0` and that the mean exists (`ψ_F(1) < ∞`).
    pub fn new(theta: f64, base: DistSpec) -> Result<Self> {
        if !(theta > 0.0) {
            return Err(Error::invalid(format!("theta = {theta} must be positive")));
        }
        if !dist::check_existence(&base, &QuadConfig::default()) {
            return Err(Error::Divergent(format!(
                "mean of order {theta} does not exist for `{}`",
                base.label()
            )));
        }
        Ok(MeanLaw { theta, base })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn base(&self) -> &DistSpec {
        &self.base
    }

    /// The mean lives in the convex hull of the base support.
    pub fn support(&self) -> (f64, f64) {
        self.base.support()
    }
}

/// The pair `(θ, F_X)` identifying the GGC random variable
/// `T_θ = G_θ · M_θ(F_X)`.
#[derive(Debug, Clone)]
pub struct GgcLaw {
    theta: f64,
    base: DistSpec,
}

impl GgcLaw {
    pub fn new(theta: f64, base: DistSpec) -> Result<Self> {
        let m = MeanLaw::new(theta, base)?;
        Ok(GgcLaw {
            theta: m.theta,
            base: m.base,
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn base(&self) -> &DistSpec {
        &self.base
    }

    /// Lévy exponent of `T_θ`: `θ ψ_F(λ)`.
    pub fn levy_exponent(&self, lambda: f64, cfg: &QuadConfig) -> Result<f64> {
        Ok(self.theta * dist::levy_eval(&self.base, lambda, cfg)?)
    }

    /// `E[e^{-λ T_θ}] = e^{-θ ψ_F(λ)}`.
    pub fn laplace_transform(&self, lambda: f64, cfg: &QuadConfig) -> Result<f64> {
        Ok((-self.levy_exponent(lambda, cfg)?).exp())
    }
}

fn jump_guard(theta: f64, base: &DistSpec) -> Result<()> {
    let jump = base.max_jump();
    if theta * jump >= 1.0 {
        return Err(Error::JumpTooLarge { theta, jump });
    }
    Ok(())
}

/// The kernel `Δ_θ(t|F) = (1/π) sin(πθF(t)) e^{-θΦ_F(t)}` of the inversion
/// formulas. Uses a closed form for `Φ` when the law carries one.
pub fn mean_kernel(theta: f64, base: &DistSpec, t: f64, cfg: &QuadConfig) -> Result<f64> {
    if !(theta > 0.0) {
        return Err(Error::invalid(format!("theta = {theta} must be positive")));
    }
    if !(t >= 0.0) {
        return Err(Error::invalid(format!("t = {t} must be nonnegative")));
    }
    jump_guard(theta, base)?;
    let s = sin_pi_theta_cdf(theta, base.cdf(t), base.sf(t));
    if s == 0.0 {
        return Ok(0.0);
    }
    let phi = dist::log_distance_eval(base, t, cfg)?;
    Ok(s * (-theta * phi).exp() / PI)
}

/// Segment bookkeeping for the Abel integrals: a stripped endpoint is an atom
/// (or kernel) power handled analytically by the substitution engine.
struct Strip {
    location: f64,
    weight: f64,
}

/// `∫_0^x (x-t)^{kernel_pow} Δ_θ(t|F) dt`, split at atoms and support edges,
/// with endpoint powers (kernel at `t = x`, `|t-a|^{-θw}` at atoms) removed
/// analytically.
fn abel_integral(
    theta: f64,
    base: &DistSpec,
    x: f64,
    kernel_pow: f64,
    cfg: &QuadConfig,
) -> Result<f64> {
    let (lo, hi) = base.support();
    // F(t) = 0 (hence Δ = 0) below the first mass point
    let mut start = lo.min(x);
    if let Some(a) = base.atoms().first() {
        start = start.min(a.location);
    }
    if start >= x {
        return Ok(0.0);
    }

    let mut cuts = vec![start, x];
    for a in base.atoms() {
        if a.location > start && a.location < x {
            cuts.push(a.location);
        }
    }
    if lo > start && lo < x {
        cuts.push(lo);
    }
    if hi.is_finite() && hi > start && hi < x {
        cuts.push(hi);
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let nseg = cuts.len() - 1;
    let seg_cfg = cfg.scaled(1.0 / nseg as f64);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let mut strips: Vec<Strip> = Vec::new();
        let mut p = 0.0;
        if let Some(wa) = base.atom_at(a) {
            p = -theta * wa;
            strips.push(Strip {
                location: a,
                weight: wa,
            });
        }
        let mut q = 0.0;
        let mut kernel_stripped = false;
        if b == x {
            if let Some(wb) = base.atom_at(b) {
                q += -theta * wb;
                strips.push(Strip {
                    location: b,
                    weight: wb,
                });
            }
            if kernel_pow < 0.0 {
                q += kernel_pow;
                kernel_stripped = true;
            }
        } else if let Some(wb) = base.atom_at(b) {
            q = -theta * wb;
            strips.push(Strip {
                location: b,
                weight: wb,
            });
        }
        if p <= -1.0 || q <= -1.0 {
            return Err(Error::NonConvergence(format!(
                "non-integrable endpoint (p = {p}, q = {q}) in the order-{theta} kernel \
                 integral at x = {x}"
            )));
        }

        let f = |t: f64| -> Result<f64> {
            let s = sin_pi_theta_cdf(theta, base.cdf(t), base.sf(t));
            let kern = if kernel_stripped || kernel_pow == 0.0 {
                1.0
            } else {
                (x - t).powf(kernel_pow)
            };
            if s == 0.0 {
                return Ok(0.0);
            }
            let mut phi = dist::log_distance_eval(base, t, &seg_cfg)?;
            for st in &strips {
                phi -= st.weight * (t - st.location).abs().ln();
            }
            Ok(kern * s * (-theta * phi).exp() / PI)
        };
        total += quad::adaptive_endpoint_powers(&f, a, b, p, q, &seg_cfg)?;
    }
    Ok(total)
}

/// CDF of `M_θ(F_X)` at `x` by the inversion formula.
///
/// Values are clamped to `[0, 1]` only within `1e-6` of the bounds; a larger
/// excursion is reported as [`Error::NotADistribution`] since it signals a
/// defect upstream rather than quadrature noise.
pub fn mean_cdf(law: &MeanLaw, x: f64, cfg: &QuadConfig) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::invalid(format!("x = {x} must be nonnegative")));
    }
    jump_guard(law.theta, &law.base)?;
    let (lo, hi) = law.support();
    if x <= lo {
        return Ok(0.0);
    }
    if hi.is_finite() && x >= hi {
        return Ok(1.0);
    }
    let v = abel_integral(law.theta, &law.base, x, law.theta - 1.0, cfg)?;
    if v < -1e-6 || v > 1.0 + 1e-6 {
        return Err(Error::NotADistribution {
            what: "mean CDF",
            value: v,
        });
    }
    Ok(v.clamp(0.0, 1.0))
}

/// Density of `M_θ(F_X)` at `x`.
///
/// Returns 0 outside the convex hull of the base support, and `+∞` at `x = 0`
/// when the base has an atom at zero (the density grows like `x^{θw_0 - 1}`
/// there); profile builders flag such points instead of failing.
pub fn mean_density(law: &MeanLaw, x: f64, cfg: &QuadConfig) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::invalid(format!("x = {x} must be nonnegative")));
    }
    let theta = law.theta;
    let base = &law.base;
    jump_guard(theta, base)?;
    let (lo, hi) = law.support();
    if x < lo || x > hi {
        return Ok(0.0);
    }
    if x == 0.0 && base.atom_at(0.0).is_some() {
        return Ok(f64::INFINITY);
    }
    if theta == 1.0 {
        return mean_kernel(1.0, base, x, cfg);
    }
    if theta > 1.0 {
        return Ok((theta - 1.0) * abel_integral(theta, base, x, theta - 2.0, cfg)?);
    }
    general_branch(theta, base, x, cfg)
}

/// Density for `0 < θ < 1` (also valid at `θ = 1`, which the consistency
/// tests exercise): `(1/π) ∫_0^x (x-t)^{θ-1} d_θ(t) dt`.
pub(crate) fn general_branch(
    theta: f64,
    base: &DistSpec,
    x: f64,
    cfg: &QuadConfig,
) -> Result<f64> {
    if let Some(a) = base.atoms().iter().find(|a| a.location <= x) {
        return Err(Error::MissingDensity(format!(
            "the derivative-kernel density formula needs an absolutely continuous base on \
             [0, {x}], but `{}` has an atom at {}",
            base.label(),
            a.location
        )));
    }
    let (lo, _) = base.support();
    let a = lo.min(x);
    if a >= x {
        return Ok(0.0);
    }
    let p = base
        .continuous
        .as_ref()
        .map(|c| if a == lo { c.lo_exponent } else { 0.0 })
        .unwrap_or(0.0);
    let q = theta - 1.0;
    let f = |t: f64| -> Result<f64> {
        let rho = match base.density(t) {
            Some(d) => d,
            None => {
                if cfg.allow_numeric_density {
                    let h = 1e-6 * (1.0 + t.abs());
                    base.density_estimate(t, t - h, t + h, cfg)
                } else {
                    return Err(Error::MissingDensity(format!(
                        "derivative-kernel density formula needs a density for `{}`",
                        base.label()
                    )));
                }
            }
        };
        let cdf = base.cdf(t);
        let sf = base.sf(t);
        let sin = sin_pi_theta_cdf(theta, cdf, sf);
        let cos = cos_pi_theta_cdf(theta, cdf, sf);
        let phi = dist::log_distance_eval(base, t, cfg)?;
        let dphi = if sin == 0.0 {
            0.0
        } else {
            dist::log_distance_deriv_eval(base, t, cfg)?
        };
        // strip the density edge power: rho(t) ~ (t-a)^p near the support edge
        let strip = if p != 0.0 { (t - a).powf(-p) } else { 1.0 };
        Ok(theta * strip * (PI * rho * cos - dphi * sin) * (-theta * phi).exp() / PI)
    };
    quad::adaptive_endpoint_powers(&f, a, x, p, q, cfg)
}

/// A density (optionally with CDF) tabulated on a grid.
#[derive(Debug, Clone)]
pub struct DensityProfile {
    pub label: String,
    pub theta: f64,
    pub grid: Vec<f64>,
    pub pdf: Vec<f64>,
    pub cdf: Option<Vec<f64>>,
    /// Indices of grid points where the density is not finite (support-edge
    /// blow-ups); recorded rather than treated as failures.
    pub non_finite: Vec<usize>,
}

impl DensityProfile {
    /// Structural invariants: nonnegative ordinates, a monotone CDF column,
    /// and agreement of the trapezoid mass with the CDF increment to 1e-4.
    pub fn validate(&self) -> Result<()> {
        if self.grid.len() != self.pdf.len() {
            return Err(Error::invalid("grid/pdf length mismatch"));
        }
        if self.grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("profile grid must be strictly increasing"));
        }
        if self.pdf.iter().any(|&v| v < -1e-12) {
            return Err(Error::invalid("negative density ordinate"));
        }
        if let Some(cdf) = &self.cdf {
            if cdf.len() != self.grid.len() {
                return Err(Error::invalid("grid/cdf length mismatch"));
            }
            if cdf.windows(2).any(|w| w[1] < w[0] - 1e-12) {
                return Err(Error::invalid("CDF column is not monotone"));
            }
            if self.non_finite.is_empty() && self.grid.len() >= 2 {
                let mut trapz = 0.0;
                for i in 1..self.grid.len() {
                    trapz += 0.5 * (self.pdf[i] + self.pdf[i - 1])
                        * (self.grid[i] - self.grid[i - 1]);
                }
                let mass = cdf[cdf.len() - 1] - cdf[0];
                // trapezoid error scales with grid spacing; only meaningful
                // for reasonably fine grids
                let h = self.grid.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
                if self.grid.len() >= 64 && (trapz - mass).abs() > 1e-4 + h * h {
                    return Err(Error::invalid(format!(
                        "trapezoid mass {trapz} vs CDF increment {mass}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Tabulate the mean density (and optionally CDF) on `grid`, in parallel.
/// Point evaluations are pure, so the result does not depend on thread count.
pub fn density_profile(
    law: &MeanLaw,
    grid: &[f64],
    with_cdf: bool,
    cfg: &QuadConfig,
) -> Result<DensityProfile> {
    let pdf: Vec<f64> = grid
        .par_iter()
        .map(|&x| mean_density(law, x, cfg))
        .collect::<Result<_>>()?;
    let cdf = if with_cdf {
        Some(
            grid.par_iter()
                .map(|&x| mean_cdf(law, x, cfg))
                .collect::<Result<_>>()?,
        )
    } else {
        None
    };
    let non_finite = pdf
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_finite())
        .map(|(i, _)| i)
        .collect();
    let profile = DensityProfile {
        label: law.base().label().to_string(),
        theta: law.theta(),
        grid: grid.to_vec(),
        pdf,
        cdf,
        non_finite,
    };
    Ok(profile)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::testlaws::{exp_ratio, uniform};
    use crate::dist::mix_with_atom;
    use std::f64::consts::E;

    fn cfg() -> QuadConfig {
        QuadConfig::default()
    }

    #[test]
    fn kernel_at_uniform_midpoint() {
        // Δ_1(1/2 | U) = 2e/π, through the quadrature route for Φ
        let v = mean_kernel(1.0, &uniform(), 0.5, &cfg()).unwrap();
        assert!((v - 2.0 * E / PI).abs() < 1e-10, "{v}");
    }

    #[test]
    fn kernel_vanishes_above_the_support() {
        let v = mean_kernel(1.0, &uniform(), 1.5, &cfg()).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn kernel_on_mixed_law_matches_frozen_oracle() {
        // θ = 1/2, base U·Y_{1/2}, t = 0.3; expected value evaluated from the
        // closed forms Φ_mix = σΦ_U + (1-σ)log t and F_mix = σF_U + (1-σ)
        let m = mix_with_atom(&uniform(), 0.5).unwrap();
        let v = mean_kernel(0.5, &m, 0.3, &cfg()).unwrap();
        assert!((v - 0.548_571_157_317_664_4).abs() < 1e-10, "{v}");
    }

    #[test]
    fn kernel_rejects_large_jumps() {
        let pm = crate::dist::DistSpec::point_mass(1.0);
        assert!(matches!(
            mean_kernel(1.0, &pm, 0.5, &cfg()),
            Err(Error::JumpTooLarge { .. })
        ));
    }

    #[test]
    fn cdf_total_mass_and_symmetry() {
        let law = MeanLaw::new(1.0, uniform()).unwrap();
        assert_eq!(mean_cdf(&law, 1.0, &cfg()).unwrap(), 1.0);
        let v = mean_cdf(&law, 0.5, &cfg()).unwrap();
        assert!((v - 0.5).abs() < 1e-9, "{v}");
        // M_2(F_U) is also symmetric about 1/2
        let law2 = MeanLaw::new(2.0, uniform()).unwrap();
        let v2 = mean_cdf(&law2, 0.5, &cfg()).unwrap();
        assert!((v2 - 0.5).abs() < 1e-8, "{v2}");
    }

    #[test]
    fn density_spot_values() {
        let c = cfg();
        let u = MeanLaw::new(1.0, uniform()).unwrap();
        let v = mean_density(&u, 0.5, &c).unwrap();
        assert!((v - 2.0 * E / PI).abs() < 1e-9, "{v}");

        let w = MeanLaw::new(1.0, exp_ratio()).unwrap();
        let v = mean_density(&w, 1.0, &c).unwrap();
        assert!((v - 1.0 / PI).abs() < 1e-9, "{v}");

        // order 2, uniform base, frozen against an independent double-quadrature oracle
        let u2 = MeanLaw::new(2.0, uniform()).unwrap();
        let v = mean_density(&u2, 0.5, &c).unwrap();
        assert!((v - 2.226_272_445_767_298).abs() < 1e-8, "{v}");

        // order 1/2 through the derivative kernel, same oracle
        let uh = MeanLaw::new(0.5, uniform()).unwrap();
        let v = mean_density(&uh, 0.5, &c).unwrap();
        assert!((v - 1.414_810_285_245_748_7).abs() < 1e-8, "{v}");
    }

    #[test]
    fn density_vanishes_outside_hull_and_blows_up_at_zero_atom() {
        let c = cfg();
        let u = MeanLaw::new(1.5, uniform()).unwrap();
        assert_eq!(mean_density(&u, 1.2, &c).unwrap(), 0.0);
        let m = MeanLaw::new(1.0, mix_with_atom(&uniform(), 0.5).unwrap()).unwrap();
        assert_eq!(mean_density(&m, 0.0, &c).unwrap(), f64::INFINITY);
    }

    #[test]
    fn general_branch_agrees_at_theta_one() {
        let c = cfg();
        for &x in &[0.2, 0.5, 0.8] {
            let general = general_branch(1.0, &uniform(), x, &c).unwrap();
            let direct = mean_kernel(1.0, &uniform(), x, &c).unwrap();
            assert!((general - direct).abs() < 1e-7, "x={x}: {general} vs {direct}");
        }
    }

    #[test]
    fn general_branch_refuses_atoms_in_range() {
        let m = mix_with_atom(&uniform(), 0.5).unwrap();
        let law = MeanLaw::new(0.5, m).unwrap();
        assert!(matches!(
            mean_density(&law, 0.5, &cfg()),
            Err(Error::MissingDensity(_))
        ));
    }

    #[test]
    fn cdf_derivative_matches_density() {
        let c = cfg();
        let law = MeanLaw::new(1.5, uniform()).unwrap();
        let h = 1e-4;
        for &x in &[0.3, 0.5, 0.7] {
            let d = (mean_cdf(&law, x + h, &c).unwrap() - mean_cdf(&law, x - h, &c).unwrap())
                / (2.0 * h);
            let f = mean_density(&law, x, &c).unwrap();
            assert!((d - f).abs() < 1e-5, "x={x}: {d} vs {f}");
        }
    }

    #[test]
    fn cdf_of_mixed_law_reaches_one() {
        // atom at zero: Δ has a t^{-θw} singularity at the origin, stripped
        // by the segment engine; the total mass must still be exactly one
        let c = cfg();
        let m = mix_with_atom(&uniform(), 0.6).unwrap();
        let law = MeanLaw::new(1.0, m).unwrap();
        let v = mean_cdf(&law, 1.0, &c).unwrap();
        assert!((v - 1.0).abs() < 1e-8, "{v}");
        let half = mean_cdf(&law, 0.35, &c).unwrap();
        assert!(half > 0.0 && half < 1.0);
    }

    #[test]
    fn profile_builder_and_invariants() {
        let c = cfg();
        let law = MeanLaw::new(1.0, uniform()).unwrap();
        let grid: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
        let p = density_profile(&law, &grid, true, &c).unwrap();
        p.validate().unwrap();
        assert!(p.non_finite.is_empty());
        assert!((p.pdf[50] - 2.0 * E / PI).abs() < 1e-9);
    }
}
