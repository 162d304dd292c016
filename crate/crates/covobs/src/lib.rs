//! Covariant position/momentum observables on a discretized line.
//!
//! The crate models measurement statistics that transform correctly under
//! translations and boosts: probability measures with both a density and an
//! atomic part, their convolutions and characteristic functions, smeared
//! position/momentum observables and their sharpness classification, a
//! window-based limit of resolution, covariant phase-space joints with a
//! resolution-product bound, state distinguishability preorders driven by
//! characteristic-function supports, and rotation-invariant smearings in
//! three dimensions.
//!
//! Everything lives on centered dyadic grids ([`GridSpec`]) whose conjugate
//! (frequency) grid satisfies `dx * dp * n = 2*pi` exactly, so transforms
//! reduce to sign-flipped FFTs with no trigonometric phase error.

pub mod charfn;
pub mod distinction;
pub mod error;
pub(crate) mod fft;
pub mod grid;
pub mod measure;
pub mod observable;
pub mod phasespace;
pub mod r3;
pub mod resolution;

pub use charfn::{char_fn, sinc_measure, CharFn};
pub use distinction::{
    compare, is_maximal_class, verify_separation, witness_states, DistinctionVerdict, Relation,
    SeparationReport,
};
pub use error::{Error, Result};
pub use grid::{position_distribution, momentum_distribution, GridSpec, MixedState, WaveFunction};
pub use measure::{convolve, make_dirac, make_gaussian, make_uniform, mix, Cdf, Measure1D};
pub use observable::{
    covariance_battery, covariance_battery_with_fault, dilation_classification, effect_sup,
    is_regular_effect, outcome_distribution, scaling_residual, Axis, BatteryReport, DilationClass,
    IntervalUnion, Observable1D,
};
pub use phasespace::{
    joint_density, margin_measures, product_report, random_generator_corpus,
    resolution_product_check, weyl_apply, JointDensity, PhaseSpaceObservable, PhaseWindow,
    ProductReport,
};
pub use r3::{
    radial_maxwell, radial_shell, rotation_covariance_test, rotation_covariance_test_with_fault,
    sample_measure, sharpness_check, smeared_output, RotInvMeasure3D, RotationReport,
    SampleCloud3D,
};
pub use resolution::{is_alpha_regular, limit_of_resolution, trivial_resolution, ResolutionReport};
