//! Bell-CHSH analysis of elliptically polarized maximally entangled photon
//! pairs: Jones calculus, outcome probabilities and the Bell parameter,
//! phase-compensation settings for three analyzer schemes, a coincidence
//! count simulator and a fringe-based phase estimator.
//!
//! The numeric core is generic over [`Real`] (`f32` or `f64`); the `*64`
//! aliases below fix the common double-precision case.

pub mod bell;
pub mod compensation;
pub mod error;
pub mod estimation;
pub mod jones;
pub mod optimize;
pub mod poisson;
pub mod scalar;
pub mod sim;
pub mod states;

pub use bell::{
    bell_parameter, correlation, effective_phase, maximize_bell_numeric, maximize_bell_numeric_with,
    optimal_settings_closed, outcome_probs, rotating_analyzer_probs, AnalyzerSettings, EffectivePhaseInputs,
    OutcomeProbs,
};
pub use compensation::{
    diagonal_scan_config, experimental_chain, experimental_settings, fixed_pair_settings, fringe_model, fringe_offset,
    rotating_scheme_arcsin_argument, rotating_scheme_diagonal_scan, rotating_scheme_settings, scheme_settings,
    settings_to_f64, signed_pair_phase, verify_compensation, AnalysisChain, ChainConfig, CompensatedAnalyzers,
    CompensationReport, DeviceSettings, ExperimentalSettings, FixedPairSettings, RotatingCompSettings, ScanConfig,
    SchemeChain, SchemeKind,
};
pub use error::Error;
pub use estimation::{
    angular_distance, estimate_phase, harmonic_fit, locate_extrema, phase_from_fringe_maximum, FringeFit,
    PhaseEstimate, Setpoints, MIN_VISIBILITY,
};
pub use jones::{
    compose, decompose, named_element, waveplate, ElementKind, JonesMatrix, UnitaryDecomposition, WaveplateParams,
};
pub use optimize::{maximize_periodic, MaximizerConfig, Maximum};
pub use scalar::{wrap_centered, wrap_phase, wrap_turn, Cplx, Real};
pub use sim::{
    closed_grid, expected_counts, point_seed, scan_fringe, simulate_counts, uniform_grid, CountRecord, FringeData,
    FringePoint, Sampling, SourceModel,
};
pub use states::{apply_local, bell_coefficients, make_state, BellCoefficients, Family, TwoQubitState};

pub type JonesMatrix64 = JonesMatrix<f64>;
pub type WaveplateParams64 = WaveplateParams<f64>;
pub type UnitaryDecomposition64 = UnitaryDecomposition<f64>;
pub type TwoQubitState64 = TwoQubitState<f64>;
pub type BellCoefficients64 = BellCoefficients<f64>;
pub type OutcomeProbs64 = OutcomeProbs<f64>;
pub type AnalyzerSettings64 = AnalyzerSettings<f64>;
pub type EffectivePhaseInputs64 = EffectivePhaseInputs<f64>;
pub type RotatingCompSettings64 = RotatingCompSettings<f64>;
pub type FixedPairSettings64 = FixedPairSettings<f64>;
pub type ExperimentalSettings64 = ExperimentalSettings<f64>;
pub type DeviceSettings64 = DeviceSettings<f64>;
pub type CompensationReport64 = CompensationReport<f64>;
pub type FringeFit64 = FringeFit<f64>;
