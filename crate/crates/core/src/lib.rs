//! Calibration of symmetric log-concave additive-noise mechanisms.

pub mod calibrate;
pub mod error;
pub mod experiments;
pub mod format;
pub mod mech;
pub mod noise;
pub mod optimize;
pub mod postprocess;
pub mod quad;
pub mod specfun;

pub use calibrate::{
    gaussian_scale, oracle_delta, privacy_profile, scale_for_budget, scale_for_budget_with, threshold_t,
    CalibrationConfig, CalibrationResult, PrivacyBudget, SensitivitySpec,
};
pub use error::{Error, Result};
pub use mech::{calibrate_vector, VectorMechanism};
pub use noise::{LogConcaveNoise, NoiseFamily};

/// Guide chapters, compiled and run as doctests so the book stays in sync.
#[cfg(doctest)]
pub mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/families.md")]
    pub mod families {}
    #[doc = include_str!("../../../book/src/calibration.md")]
    pub mod calibration {}
    #[doc = include_str!("../../../book/src/vector.md")]
    pub mod vector {}
    #[doc = include_str!("../../../book/src/postprocessing.md")]
    pub mod postprocessing {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    pub mod experiments {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
    #[doc = include_str!("../../../README.md")]
    pub mod readme {}
}
