//! Rolling correlation, random-matrix and principal-component diagnostics for
//! multivariate return panels.
//!
//! The crate is `#![no_std]` and only needs `alloc`. File formats, caching,
//! parallel execution and the command line live in the `corrscope` crate.
//!
//! The analysis chain is
//!
//! ```text
//! PricePanel -> ReturnPanel -> WindowView -> CorrelationMatrix
//!            -> SpectralDecomposition -> pca diagnostics
//! ```
//!
//! with [`nulls`] providing shuffled and Gaussian reference ensembles for the
//! same `(N, T)` shape.
//!
//! Ranks (`k`) are 1-based in every function that takes one as a parameter,
//! matching the usual "first principal component" wording. Storage is always
//! 0-based, so rank `k` lives at index `k - 1`.

#![no_std]

extern crate alloc;

pub mod correlation;
pub mod eigen;
pub mod error;
pub mod matrix;
pub mod nulls;
pub mod panel;
pub mod pca;
pub mod spectral;
pub mod stats;

pub use correlation::{coefficient_moments, correlation_matrix, CoefficientMoments, CorrelationMatrix};
pub use error::{Error, Result};
pub use matrix::Matrix;
pub use nulls::{
    abs_corr_percentile99, pr_baseline_stats, random_scree_profile, shuffle_panel, simulate_gaussian_panel,
    synthetic_factor_panel, FactorSpec, NullConfig, NullEnsemble, NullEnsembleStats, NullKind,
};
pub use panel::{
    compute_log_returns, roll_windows, standardize_window, subset_by_class, AssetClass, AssetMeta, PricePanel,
    ReturnPanel, WindowView, Windows,
};
pub use pca::{
    adjusted_component_correlations, asset_component_correlations, kaiser_guttman_count, participation,
    scree_significant_count, self_correlation_deltas, variance_fractions, AssetComponentCorrelations,
    ParticipationSeries, SignificanceCounts, VarianceProfile,
};
pub use spectral::{eigendecompose, eigenvector_zscores, mp_bounds, mp_density, MPBounds, SpectralDecomposition};

pub use chrono::NaiveDate;
