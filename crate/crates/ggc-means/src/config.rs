use crate::error::{Error, Result};

/// Tolerances and budgets for the adaptive quadrature engines.
///
/// The defaults leave roughly an order of magnitude of headroom over the
/// 1e-6..1e-8 tolerances used by the verification suite, so that check
/// failures point at formulas rather than at quadrature noise.
#[derive(Debug, Clone, Copy)]
pub struct QuadConfig {
    /// Absolute tolerance on each integral.
    pub abs_tol: f64,
    /// Relative tolerance on each integral.
    pub rel_tol: f64,
    /// Bisection budget for one adaptive integral.
    pub max_subdivisions: u32,
    /// Half-width of the interval excluded around a logarithmic singularity;
    /// the excluded part is integrated against the analytic primitive of
    /// log|t - x| with the density frozen at the singular point.
    pub singularity_pad: f64,
    /// Permit estimating a missing density by differencing the CDF. Off by
    /// default: differentiation noise would silently corrupt the derivative
    /// kernels, so callers must opt in.
    pub allow_numeric_density: bool,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            max_subdivisions: 400,
            singularity_pad: 1e-12,
            allow_numeric_density: false,
        }
    }
}

impl QuadConfig {
    /// A config with the given absolute tolerance and matching relative one.
    pub fn with_tol(abs_tol: f64, rel_tol: f64) -> Self {
        QuadConfig {
            abs_tol,
            rel_tol,
            ..QuadConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) || !(self.singularity_pad > 0.0) {
            return Err(Error::invalid("quadrature tolerances must be positive"));
        }
        if self.max_subdivisions < 10 {
            return Err(Error::invalid("max_subdivisions must be at least 10"));
        }
        Ok(())
    }

    /// Same budget, tolerance scaled by `factor` (used to split a tolerance
    /// across the segments of a composite integral).
    pub(crate) fn scaled(&self, factor: f64) -> Self {
        QuadConfig {
            abs_tol: self.abs_tol * factor,
            ..*self
        }
    }
}
