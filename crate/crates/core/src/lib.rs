//! Entanglement entropy from the full counting statistics of charge
//! transfer through a driven quantum point contact.
//!
//! The crate is organized around two independent routes to the same
//! number:
//!
//! * the *noise route*: cumulants of transmitted charge ([`entropy`],
//!   [`models`], [`schedule`]) or the spectral density recovered from the
//!   generating function ([`spectral`]);
//! * the *lattice route*: an exact free-fermion simulation of two chains
//!   joined by a switchable bond ([`lattice`]), whose correlation-matrix
//!   spectrum gives the entropy directly.
//!
//! [`verify`] runs both routes against each other.

pub mod entropy;
pub mod error;
pub mod lattice;
pub mod models;
pub mod quad;
pub mod schedule;
pub mod series;
pub mod special;
pub mod spectral;
pub mod verify;

pub use entropy::{
    entropy_from_cumulants, entropy_gaussian, series_convergence_report, ConvergenceReport,
    CountingStatistics, EntropyEstimate,
};
pub use error::{Error, Result};
pub use models::{cumulants_from_log_series, lambda_star, log_chi, model_cumulants, FcsModel};
pub use schedule::{PulseTrain, SwitchingSchedule};
pub use series::FormalSeries;
pub use special::{alpha_closed_form, alpha_via_integral, bernoulli, binary_entropy, BernoulliTable};
pub use spectral::{Normalization, SpectralMeasure};
