//! Monte Carlo samplers used as the independent oracle for every
//! identity-in-law.
//!
//! Dirichlet means are drawn by stick-breaking with an explicit truncation
//! bound: after `K` sticks the unassigned mass has expectation
//! `(θ/(θ+1))^K`, the truncation level is chosen so this is below the
//! requested `trunc_eps`, and the remainder is assigned to one extra draw
//! from the base. The bound is recorded on the batch and folded into the KS
//! thresholds downstream.
//!
//! Reproducibility contract: generators are counter-based ChaCha streams.
//! A batch of size `n` is split into fixed 8192-element chunks, chunk `i`
//! drawing from stream `i` of the batch seed, so identical `(seed, law, n)`
//! give bit-identical batches on any thread count.

use crate::config::QuadConfig;
use crate::dist::DistSpec;
use crate::error::{Error, Result};
use crate::mean::{GgcLaw, MeanLaw};
use crate::quad;
use crate::special::sin_pi;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Distribution;
use rayon::prelude::*;
use std::f64::consts::PI;

const CHUNK: usize = 8192;

/// Stream `stream` of the generator family keyed by `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// A batch of Monte Carlo draws with its provenance.
#[derive(Debug, Clone)]
pub struct SampleBatch {
    pub seed: u64,
    pub n: usize,
    pub values: Vec<f64>,
    pub law_tag: String,
    /// Expected unassigned stick-breaking mass; 0 for exact samplers.
    pub truncation_error_bound: f64,
}

impl SampleBatch {
    fn validate(self) -> Result<Self> {
        if self.values.len() != self.n {
            return Err(Error::invalid("batch length mismatch"));
        }
        if self.values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::invalid(format!(
                "batch `{}` contains a non-finite or negative draw",
                self.law_tag
            )));
        }
        Ok(self)
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.n as f64
    }
}

/// Draw `n` values in parallel over fixed per-chunk streams.
fn batch_with<F>(law_tag: String, seed: u64, n: usize, trunc: f64, draw: F) -> Result<SampleBatch>
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    if n == 0 {
        return Err(Error::invalid("sample count must be positive"));
    }
    let mut values = vec![0.0f64; n];
    values
        .par_chunks_mut(CHUNK)
        .enumerate()
        .for_each(|(i, chunk)| {
            let mut rng = stream_rng(seed, i as u64);
            for v in chunk.iter_mut() {
                *v = draw(&mut rng);
            }
        });
    SampleBatch {
        seed,
        n,
        values,
        law_tag,
        truncation_error_bound: trunc,
    }
    .validate()
}

/// One draw from a base distribution: atoms by cumulative weight, the
/// continuous part through its quantile map (one uniform per draw).
pub fn draw_dist(dist: &DistSpec, rng: &mut ChaCha8Rng) -> f64 {
    let u: f64 = rng.random();
    let mass = dist.continuous_mass();
    if u < mass {
        let c = dist
            .continuous
            .as_ref()
            .expect("continuous mass without component");
        return (c.quantile)(u / mass);
    }
    let mut acc = mass;
    for a in dist.atoms() {
        acc += a.weight;
        if u < acc {
            return a.location;
        }
    }
    dist.atoms().last().map(|a| a.location).unwrap_or(0.0)
}

/// i.i.d. draws from a base distribution.
pub fn sample_dist(dist: &DistSpec, n: usize, seed: u64) -> Result<SampleBatch> {
    batch_with(format!("dist({})", dist.label()), seed, n, 0.0, |rng| {
        draw_dist(dist, rng)
    })
}

/// Truncation level for stick-breaking: smallest `K` with
/// `(θ/(θ+1))^K ≤ trunc_eps`.
fn stick_count(theta: f64, trunc_eps: f64) -> usize {
    let ratio = theta / (theta + 1.0);
    (trunc_eps.ln() / ratio.ln()).ceil().max(1.0) as usize
}

/// Draws of the Dirichlet mean `M_θ(F_X)` by stick-breaking.
pub fn sample_mean(law: &MeanLaw, n: usize, seed: u64, trunc_eps: f64) -> Result<SampleBatch> {
    if !(trunc_eps > 0.0 && trunc_eps < 1.0) {
        return Err(Error::invalid(format!(
            "trunc_eps = {trunc_eps} must lie in (0, 1)"
        )));
    }
    let theta = law.theta();
    let base = law.base();
    let k = stick_count(theta, trunc_eps);
    let bound = (theta / (theta + 1.0)).powi(k as i32);
    let inv_theta = 1.0 / theta;
    batch_with(
        format!("mean(theta={theta}, {})", base.label()),
        seed,
        n,
        bound,
        move |rng| {
            let mut remaining = 1.0f64;
            let mut acc = 0.0f64;
            for _ in 0..k {
                // stick fraction ~ beta(1, θ) by inverse CDF
                let u: f64 = rng.random();
                let v = -f64::exp_m1(inv_theta * f64::ln_1p(-u));
                acc += v * remaining * draw_dist(base, rng);
                remaining *= 1.0 - v;
            }
            // park the residual mass on one more base draw
            acc + remaining * draw_dist(base, rng)
        },
    )
}

/// Draws of the GGC `T_θ = G_θ · M_θ(F_X)`.
pub fn sample_ggc(law: &GgcLaw, n: usize, seed: u64, trunc_eps: f64) -> Result<SampleBatch> {
    let theta = law.theta();
    let mean_law = MeanLaw::new(theta, law.base().clone())?;
    let base = law.base();
    let k = stick_count(theta, trunc_eps);
    let bound = (theta / (theta + 1.0)).powi(k as i32);
    let gamma = rand_distr::Gamma::new(theta, 1.0)
        .map_err(|e| Error::invalid(format!("gamma sampler: {e}")))?;
    let inv_theta = 1.0 / theta;
    let _ = mean_law;
    batch_with(
        format!("ggc(theta={theta}, {})", base.label()),
        seed,
        n,
        bound,
        move |rng| {
            let g: f64 = gamma.sample(rng);
            let mut remaining = 1.0f64;
            let mut acc = 0.0f64;
            for _ in 0..k {
                let u: f64 = rng.random();
                let v = -f64::exp_m1(inv_theta * f64::ln_1p(-u));
                acc += v * remaining * draw_dist(base, rng);
                remaining *= 1.0 - v;
            }
            g * (acc + remaining * draw_dist(base, rng))
        },
    )
}

/// Exact samplers for the named reference variables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NamedLaw {
    Gamma { shape: f64 },
    Beta { a: f64, b: f64 },
    Uniform,
    /// Positive α-stable normalized by `E[e^{-λS}] = e^{-λ^α}`.
    Stable { alpha: f64 },
    /// `Z_α = (S_α/S'_α)^α`.
    Lamperti { alpha: f64 },
    /// `Σ_α = G_{1-α}/U^{1/α}`, the unit-time BFRY variable.
    BfrySigma { alpha: f64 },
    /// `G_a / G_b` for independent gammas.
    GammaRatio { num: f64, den: f64 },
}

impl NamedLaw {
    fn tag(&self) -> String {
        match self {
            NamedLaw::Gamma { shape } => format!("gamma({shape})"),
            NamedLaw::Beta { a, b } => format!("beta({a},{b})"),
            NamedLaw::Uniform => "uniform".into(),
            NamedLaw::Stable { alpha } => format!("stable({alpha})"),
            NamedLaw::Lamperti { alpha } => format!("lamperti({alpha})"),
            NamedLaw::BfrySigma { alpha } => format!("bfry-sigma({alpha})"),
            NamedLaw::GammaRatio { num, den } => format!("gamma-ratio({num},{den})"),
        }
    }
}

/// Kanter's representation of the positive stable law:
/// `S = (A(U)/E)^{(1-α)/α}` with
/// `A(u) = sin(απu)^{α/(1-α)} sin((1-α)πu) / sin(πu)^{1/(1-α)}`.
fn draw_stable(alpha: f64, rng: &mut ChaCha8Rng) -> f64 {
    let u: f64 = rng.random();
    let e: f64 = -f64::ln(1.0 - rng.random::<f64>());
    let ln_a = alpha / (1.0 - alpha) * sin_pi(alpha * u).ln() + sin_pi((1.0 - alpha) * u).ln()
        - 1.0 / (1.0 - alpha) * sin_pi(u).ln();
    ((1.0 - alpha) / alpha * (ln_a - e.ln())).exp()
}

/// Exact draws (no truncation) of a named law.
pub fn sample_named(law: NamedLaw, n: usize, seed: u64) -> Result<SampleBatch> {
    let check_alpha = |alpha: f64| -> Result<()> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::invalid(format!("alpha = {alpha} must lie in (0, 1)")));
        }
        Ok(())
    };
    match law {
        NamedLaw::Gamma { shape } => {
            let g = rand_distr::Gamma::new(shape, 1.0)
                .map_err(|e| Error::invalid(format!("gamma sampler: {e}")))?;
            batch_with(law.tag(), seed, n, 0.0, move |rng| g.sample(rng))
        }
        NamedLaw::Beta { a, b } => {
            let d = rand_distr::Beta::new(a, b)
                .map_err(|e| Error::invalid(format!("beta sampler: {e}")))?;
            batch_with(law.tag(), seed, n, 0.0, move |rng| d.sample(rng))
        }
        NamedLaw::Uniform => batch_with(law.tag(), seed, n, 0.0, |rng| rng.random()),
        NamedLaw::Stable { alpha } => {
            check_alpha(alpha)?;
            batch_with(law.tag(), seed, n, 0.0, move |rng| draw_stable(alpha, rng))
        }
        NamedLaw::Lamperti { alpha } => {
            check_alpha(alpha)?;
            batch_with(law.tag(), seed, n, 0.0, move |rng| {
                (draw_stable(alpha, rng) / draw_stable(alpha, rng)).powf(alpha)
            })
        }
        NamedLaw::BfrySigma { alpha } => {
            check_alpha(alpha)?;
            let g = rand_distr::Gamma::new(1.0 - alpha, 1.0)
                .map_err(|e| Error::invalid(format!("gamma sampler: {e}")))?;
            batch_with(law.tag(), seed, n, 0.0, move |rng| {
                let gv: f64 = g.sample(rng);
                let u: f64 = rng.random();
                gv / u.powf(1.0 / alpha)
            })
        }
        NamedLaw::GammaRatio { num, den } => {
            let gn = rand_distr::Gamma::new(num, 1.0)
                .map_err(|e| Error::invalid(format!("gamma sampler: {e}")))?;
            let gd = rand_distr::Gamma::new(den, 1.0)
                .map_err(|e| Error::invalid(format!("gamma sampler: {e}")))?;
            batch_with(law.tag(), seed, n, 0.0, move |rng| {
                let a: f64 = gn.sample(rng);
                let b: f64 = gd.sample(rng);
                a / b
            })
        }
    }
}

/// A tabulated CDF built by integrating a density along a parameter map
/// `t ∈ [0,1] → x`; supports interpolation, inversion, and inverse-CDF
/// sampling. Used to turn closed-form densities into sampling oracles.
#[derive(Debug, Clone)]
pub struct CdfTable {
    xs: Vec<f64>,
    cdf: Vec<f64>,
}

impl CdfTable {
    /// `integrand(t)` must equal `density(x(t)) · dx/dt`; `map(t)` gives the
    /// grid. Mass is accumulated cell by cell with a fixed Kronrod rule and
    /// normalized at the end (the raw mass must already be within `mass_tol`
    /// of one).
    pub fn build<F, M>(integrand: F, map: M, cells: usize, mass_tol: f64) -> Result<Self>
    where
        F: Fn(f64) -> Result<f64>,
        M: Fn(f64) -> f64,
    {
        if cells < 8 {
            return Err(Error::invalid("CDF table needs at least 8 cells"));
        }
        let mut xs = Vec::with_capacity(cells + 1);
        let mut cdf = Vec::with_capacity(cells + 1);
        let cfg = QuadConfig {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_subdivisions: 40,
            ..QuadConfig::default()
        };
        let mut acc = 0.0;
        xs.push(map(0.0));
        cdf.push(0.0);
        for i in 0..cells {
            let t0 = i as f64 / cells as f64;
            let t1 = (i + 1) as f64 / cells as f64;
            acc += quad::adaptive(&integrand, t0, t1, &cfg, &[])?;
            xs.push(map(t1));
            cdf.push(acc);
        }
        if (acc - 1.0).abs() > mass_tol {
            return Err(Error::NotADistribution {
                what: "tabulated density mass",
                value: acc,
            });
        }
        for c in cdf.iter_mut() {
            *c /= acc;
        }
        Ok(CdfTable { xs, cdf })
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= self.xs[0] {
            return 0.0;
        }
        if x >= *self.xs.last().unwrap() {
            return 1.0;
        }
        let i = self.xs.partition_point(|&v| v <= x);
        let (x0, x1) = (self.xs[i - 1], self.xs[i]);
        let (c0, c1) = (self.cdf[i - 1], self.cdf[i]);
        c0 + (c1 - c0) * (x - x0) / (x1 - x0)
    }

    pub fn quantile(&self, v: f64) -> f64 {
        let v = v.clamp(0.0, 1.0);
        let i = self.cdf.partition_point(|&c| c <= v).clamp(1, self.cdf.len() - 1);
        let (c0, c1) = (self.cdf[i - 1], self.cdf[i]);
        let (x0, x1) = (self.xs[i - 1], self.xs[i]);
        if c1 == c0 {
            x0
        } else {
            x0 + (x1 - x0) * (v - c0) / (c1 - c0)
        }
    }

    /// Inverse-CDF draws from the tabulated law.
    pub fn sample(&self, n: usize, seed: u64, tag: impl Into<String>) -> Result<SampleBatch> {
        batch_with(tag.into(), seed, n, 0.0, |rng| {
            self.quantile(rng.random())
        })
    }
}

/// Empirical Laplace transform of a batch at one argument.
pub fn empirical_laplace(batch: &SampleBatch, lambda: f64) -> f64 {
    batch
        .values
        .iter()
        .map(|&x| (-lambda * x).exp())
        .sum::<f64>()
        / batch.n as f64
}
