pub mod catalog;
pub mod config;
pub mod dist;
pub mod error;
pub mod mc;
pub mod mean;
pub mod operators;
pub mod quad;
pub mod special;
pub mod stats;
pub mod subordinators;

pub use config::QuadConfig;
pub use dist::{
    affine_transform, check_existence, expected_log_distance, levy_exponent, mix_with_atom, Atom,
    DistSpec,
};
pub use error::{Error, Result};
pub use mean::{mean_cdf, mean_density, mean_kernel, DensityProfile, GgcLaw, MeanLaw};
pub use operators::{
    beta_scale, ggc_density, scaled_mean_density, tilt_base, tilt_density_forward,
    tilt_density_inverse, tilt_scale_density, tilted_levy, tilted_log_distance, ScaledMeanLaw,
};
pub use subordinators::{
    bfry_base, bfry_fdd, bfry_fdd_marginal, bfry_log_distance, bfry_scaled_mean_density,
    fdd_densities, joint_density, lamperti_cdf, lamperti_density, lamperti_quantile, BfryParams,
    Partition, SubordinatorSpec,
};
pub use mc::{
    sample_dist, sample_ggc, sample_mean, sample_named, CdfTable, NamedLaw, SampleBatch,
};
pub use stats::{ks_statistic, ks_two_sample, laplace_check, StatisticKind, VerifyReport};
pub use catalog::{
    arcsine_mean_density, gamma_ratio_identity_check, get_entry, rho_half_mean_density,
    tilted_arcsine_density, CatalogEntry, CatalogParams, ClosedMeanDensity,
};
