//! Verification toolkit for Gabor orthonormal bases with compactly supported
//! piecewise-constant windows.
//!
//! Everything is generic over [`Scalar`] (implemented for `f32` and `f64`);
//! the aliases below fix the scalar for the common cases.
//!
//! ```
//! use gabortile::{GaborSystem64, OnbConfig, ShiftSet64, StepWindow64};
//!
//! let sys = GaborSystem64::new(
//!     StepWindow64::indicator(0.0, 1.0).unwrap(),
//!     ShiftSet64::integers(),
//!     ShiftSet64::integers(),
//!     6.0,
//!     6.0,
//! )
//! .unwrap();
//! let report = gabortile::verify_onb(&sys, &OnbConfig::default()).unwrap();
//! assert!(report.verdict);
//! ```

// `!(a > b)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod gabor;
pub mod io;
pub mod liuwang;
pub mod scalar;
pub mod shiftsets;
pub mod tiling;
pub mod windows;

pub use error::{Error, Result};
pub use gabor::{
    adaptive_parseval_defect, analysis_coefficient, build_h, gram_report, inner_product,
    parseval_defect, step_test_family, verify_h_tiling, verify_onb, Atom, GaborSystem, GramReport,
    HFunction, OnbConfig, OnbReport, ParsevalReport,
};
pub use liuwang::{
    difference_zero_set_check, liu_wang_conditions, nonnegative_structure, spectral_pair_check,
    tiling_pair_check, LiuWangConfig, LiuWangReport, NonnegativeReport, PairKind, PairReport,
    SpectralConfig,
};
pub use scalar::Scalar;
pub use shiftsets::{
    detect_periodic_form, difference_set, flc_check, uniform_density, DensityEstimate, FlcReport,
    PeriodicForm, Perturbation, Progression, ShiftSet,
};
pub use tiling::{
    ap_decomposition, density_from_tiling, sup_norm_check, tiling_sum, Grid, SpectralDensity,
    SupNormReport, TileFunction, TilingReport,
};
pub use windows::{modulated_overlap, StepWindow, SupportSet};

pub type StepWindow64 = StepWindow<f64>;
pub type StepWindow32 = StepWindow<f32>;
pub type SupportSet64 = SupportSet<f64>;
pub type SupportSet32 = SupportSet<f32>;
pub type ShiftSet64 = ShiftSet<f64>;
pub type ShiftSet32 = ShiftSet<f32>;
pub type GaborSystem64 = GaborSystem<f64>;
pub type GaborSystem32 = GaborSystem<f32>;
pub type Grid64 = Grid<f64>;
pub type Grid32 = Grid<f32>;
pub type HFunction64 = HFunction<f64>;
pub type HFunction32 = HFunction<f32>;
