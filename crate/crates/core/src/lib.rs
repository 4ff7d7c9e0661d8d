//! Thresholding estimators for non-parametric orthogonal regression.
//!
//! The crate covers the classical componentwise rules — hard, soft,
//! non-negative garrote, firm, adaptive lasso — plus scaled soft
//! thresholding, which multiplies the soft rule by a truncated expansion
//! of the ideal rescaling and thereby bridges soft and hard thresholding
//! as the order grows. For each rule it provides the degrees-of-freedom
//! formulas (split into the active-set term and the threshold-crossing
//! excess), SURE-based model selection, the Gaussian closed form for the
//! hard-thresholding DOF, and a seeded Monte Carlo harness that estimates
//! risk, SURE and empirical DOF curves over threshold grids.
//!
//! Quick tour:
//!
//! ```
//! use threshbridge::{OrthogonalDesign, ThresholdRule, sure};
//!
//! let design = OrthogonalDesign::trig(8)?;
//! let y = design.synthesize(&[1.0, 0.4, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0])?;
//! let bhat = design.analyze(&y)?;
//! let rule = ThresholdRule::scaled_soft(0.2, 5)?;
//! let report = sure(&rule, &bhat, 0.01)?;
//! assert!(report.residual >= 0.0);
//! # Ok::<(), threshbridge::Error>(())
//! ```

pub mod design;
pub mod error;
pub mod experiment;
pub mod gauss;
pub mod io;
pub mod risk;
pub mod rules;
pub mod select;

pub use design::{GRAM_TOLERANCE, OrthogonalDesign, Provenance};
pub use error::{Error, Result};
pub use experiment::{
    DEFAULT_SEED, ExperimentConfig, McSummary, MethodSummary, Preset, SigmaMode, SweepPoint,
    empirical_dof, fine_lambda_grid, run_model_selection, run_sweep, selection_lambda_grid,
    sweep_lambda_grid,
};
pub use risk::{
    DofBreakdown, SureReport, dof, estimate_sigma_mad, estimate_sigma2, ht_dof_theoretical, sure,
};
pub use rules::{Family, ThresholdRule, hard_jump, ideal_scaling, taylor_scaling};
pub use select::{
    SelectionResult, active_set, actual_risk, grid_select, selection_error, universal_threshold,
};
