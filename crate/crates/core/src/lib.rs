//! Ensemble-averaged fidelity amplitude for perturbed Gaussian ensembles.

pub mod error;
pub mod goe;
pub mod gue;
pub mod linear_response;
pub mod model;
pub mod runner;
pub mod sim;
pub mod special;

pub use error::{FidelityError, Result};
