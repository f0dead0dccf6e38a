//! Statistical comparison of Monte Carlo batches against closed forms:
//! one- and two-sample Kolmogorov–Smirnov distances, empirical
//! Laplace-transform errors, and moment checks, all reported through
//! [`VerifyReport`].

use crate::error::{Error, Result};
use crate::mc::SampleBatch;
use std::fmt;

/// What a [`VerifyReport`] measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StatisticKind {
    Ks,
    LaplaceRelErr,
    MomentRelErr,
    /// Deterministic numerical identity: absolute (sup) error.
    AbsErr,
}

impl fmt::Display for StatisticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            StatisticKind::Ks => "ks",
            StatisticKind::LaplaceRelErr => "laplace-relerr",
            StatisticKind::MomentRelErr => "moment-relerr",
            StatisticKind::AbsErr => "abs-err",
        };
        f.write_str(s)
    }
}

/// Outcome of one verification check; `passed` is exactly
/// `value <= threshold`.
#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub statistic_kind: StatisticKind,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
    pub n: usize,
    pub seed: Option<u64>,
    pub laws: String,
}

impl VerifyReport {
    pub fn new(
        statistic_kind: StatisticKind,
        value: f64,
        threshold: f64,
        n: usize,
        seed: Option<u64>,
        laws: impl Into<String>,
    ) -> Self {
        VerifyReport {
            statistic_kind,
            value,
            threshold,
            passed: value <= threshold,
            n,
            seed,
            laws: laws.into(),
        }
    }

    pub fn line(&self) -> String {
        format!(
            "{} {} = {:.6e} (threshold {:.3e}, n = {}) {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.statistic_kind,
            self.value,
            self.threshold,
            self.n,
            self.laws,
        )
    }
}

fn sorted(values: &[f64]) -> Result<Vec<f64>> {
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::invalid("NaN in sample"));
    }
    let mut s = values.to_vec();
    s.sort_by(f64::total_cmp);
    Ok(s)
}

/// One-sample Kolmogorov–Smirnov distance of a batch against a CDF.
///
/// The default threshold is the 1% asymptotic critical value `1.63/√n`,
/// inflated by twice the batch's truncation bias bound so that a biased
/// sampler cannot buy a pass.
pub fn ks_statistic<F>(batch: &SampleBatch, cdf: F, threshold: Option<f64>) -> Result<VerifyReport>
where
    F: Fn(f64) -> f64,
{
    let xs = sorted(&batch.values)?;
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    // walk tie groups: the empirical CDF jumps by the whole group mass
    let mut i = 0usize;
    while i < xs.len() {
        let x = xs[i];
        let mut j = i + 1;
        while j < xs.len() && xs[j] == x {
            j += 1;
        }
        let f = cdf(x);
        if !(0.0..=1.0 + 1e-9).contains(&f) {
            return Err(Error::invalid(format!("reference CDF({x}) = {f}")));
        }
        // compare the pre-jump empirical level against the left limit of the
        // reference, so atoms in the reference law are handled correctly
        let f_minus = cdf(f64::next_down(x));
        d = d.max(f_minus - i as f64 / n).max(j as f64 / n - f);
        i = j;
    }
    let thr = threshold
        .unwrap_or_else(|| (1.63 / n.sqrt()).max(2.0 * batch.truncation_error_bound));
    Ok(VerifyReport::new(
        StatisticKind::Ks,
        d,
        thr,
        batch.n,
        Some(batch.seed),
        format!("{} vs reference cdf", batch.law_tag),
    ))
}

/// Two-sample Kolmogorov–Smirnov distance.
pub fn ks_two_sample(a: &SampleBatch, b: &SampleBatch, threshold: f64) -> Result<VerifyReport> {
    let xa = sorted(&a.values)?;
    let xb = sorted(&b.values)?;
    let (na, nb) = (xa.len(), xb.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < na && j < nb {
        if xa[i] <= xb[j] {
            i += 1;
        } else {
            j += 1;
        }
        d = d.max((i as f64 / na as f64 - j as f64 / nb as f64).abs());
    }
    Ok(VerifyReport::new(
        StatisticKind::Ks,
        d,
        threshold,
        na.min(nb),
        Some(a.seed),
        format!("{} vs {}", a.law_tag, b.law_tag),
    ))
}

/// Worst relative error of the empirical Laplace transform against a closed
/// form over the given arguments. Default threshold 1%.
pub fn laplace_check<F>(
    batch: &SampleBatch,
    closed_form: F,
    lambdas: &[f64],
    threshold: Option<f64>,
) -> Result<VerifyReport>
where
    F: Fn(f64) -> f64,
{
    if lambdas.iter().any(|&l| !(l > 0.0)) {
        return Err(Error::invalid("Laplace arguments must be positive"));
    }
    let mut worst = 0.0f64;
    for &l in lambdas {
        let emp = crate::mc::empirical_laplace(batch, l);
        let want = closed_form(l);
        if !(want > 0.0) {
            return Err(Error::invalid(format!(
                "closed-form Laplace transform at {l} is {want}"
            )));
        }
        worst = worst.max((emp - want).abs() / want);
    }
    Ok(VerifyReport::new(
        StatisticKind::LaplaceRelErr,
        worst,
        threshold.unwrap_or(0.01),
        batch.n,
        Some(batch.seed),
        format!("{} vs closed laplace transform", batch.law_tag),
    ))
}

/// Relative error of the batch mean against a target value.
pub fn moment_check(batch: &SampleBatch, target: f64, threshold: f64) -> VerifyReport {
    let rel = (batch.mean() - target).abs() / target.abs().max(f64::MIN_POSITIVE);
    VerifyReport::new(
        StatisticKind::MomentRelErr,
        rel,
        threshold,
        batch.n,
        Some(batch.seed),
        format!("mean of {} vs {target}", batch.law_tag),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mc::{sample_named, NamedLaw};

    #[test]
    fn ks_accepts_the_true_law_and_rejects_a_wrong_one() {
        let b = sample_named(NamedLaw::Uniform, 10_000, 21).unwrap();
        let ok = ks_statistic(&b, |x| x.clamp(0.0, 1.0), None).unwrap();
        assert!(ok.passed, "{}", ok.line());
        // negative control: uniform draws against the arcsine CDF; the sup
        // distance between the two CDFs is ~0.105, far above noise
        let arcsine = |x: f64| 2.0 / std::f64::consts::PI * x.clamp(0.0, 1.0).sqrt().asin();
        let bad = ks_statistic(&b, arcsine, None).unwrap();
        assert!(!bad.passed);
        assert!(bad.value > 0.1, "{}", bad.value);
    }

    #[test]
    fn ks_of_degenerate_batch_against_its_step_cdf() {
        let b = SampleBatch {
            seed: 0,
            n: 100,
            values: vec![2.0; 100],
            law_tag: "point".into(),
            truncation_error_bound: 0.0,
        };
        let r = ks_statistic(&b, |x| if x >= 2.0 { 1.0 } else { 0.0 }, None).unwrap();
        assert!(r.value <= 1.0 / 100.0 + 1e-12);
    }

    #[test]
    fn two_sample_ks_on_identical_and_shifted_batches() {
        let a = sample_named(NamedLaw::Gamma { shape: 1.0 }, 20_000, 5).unwrap();
        let b = sample_named(NamedLaw::Gamma { shape: 1.0 }, 20_000, 6).unwrap();
        let r = ks_two_sample(&a, &b, 0.012).unwrap();
        assert!(r.passed, "{}", r.line());
        let c = sample_named(NamedLaw::Gamma { shape: 2.0 }, 20_000, 7).unwrap();
        let r = ks_two_sample(&a, &c, 0.012).unwrap();
        assert!(!r.passed);
    }

    #[test]
    fn laplace_check_on_exponential() {
        let b = sample_named(NamedLaw::Gamma { shape: 1.0 }, 200_000, 9).unwrap();
        let r = laplace_check(&b, |l| 1.0 / (1.0 + l), &[0.5, 1.0, 2.0], None).unwrap();
        assert!(r.passed, "{}", r.line());
    }

    #[test]
    fn report_invariant() {
        let r = VerifyReport::new(StatisticKind::AbsErr, 2.0, 1.0, 1, None, "x");
        assert!(!r.passed);
        let r = VerifyReport::new(StatisticKind::AbsErr, 0.5, 1.0, 1, None, "x");
        assert!(r.passed);
    }
}
