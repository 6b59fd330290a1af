//! Discretised log-Gaussian Cox pipeline: Ornstein-Uhlenbeck latent field,
//! Poisson log-linear baseline regression, minimum-contrast estimation of
//! the field parameters, and Langevin sampling of the field conditional on
//! the observed counts.

mod contrast;
mod field;
mod mu0;
mod state;
mod synthetic;

pub use contrast::{
    fit_contrast, minimum_contrast, pair_corr_statistic, pair_corr_theoretical,
};
pub use field::{
    field_from_gammas, s_closed_form, simulate_counts, simulate_field, simulate_field_with,
    DailyCounts, LatentField, OuParams,
};
pub use mu0::{fit_mu0, fit_mu0_full, weekly_averages, Mu0Fit, Mu0Model, PERIOD_DAYS};
pub use state::{
    conditional_logpdf_and_grad, gap_intensity_posterior, influence_days, mala_step, run_mala,
    GapIntensityPosterior, MalaRun, MalaState,
};
pub use synthetic::{default_mu0, generate, SyntheticConfig, SyntheticSeries, DEFAULT_GAP};
