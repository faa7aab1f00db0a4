//! Identification of a Robin coefficient on the inner circle from Neumann
//! data and boundary measurements on the outer circle.

pub mod coefficient;
pub mod experiment;
pub mod solver;

pub use coefficient::{NeumannData, RobinCoefficient, TrigSeries};
pub use experiment::{stability_experiment, StabilityRecord};
pub use solver::{recover_q, solve_forward, HarmonicSolution};
