//! Random-matrix Monte Carlo: sampling, diagonalization, the fidelity
//! estimator and spectral calibration.

pub mod calibration;
pub mod eigen;
pub mod ensemble;
pub mod estimator;
pub mod rng;

pub use calibration::{spectral_calibration, CalibrationReport};
pub use eigen::{diagonalize, EigenSystem};
pub use ensemble::{sample_pair, SampledPair, SelfAdjoint};
pub use estimator::{estimate_curve, SimulationConfig};
