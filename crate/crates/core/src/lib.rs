//! Poisson kernel of the annulus `{s < |z| < 1}`, logarithmic estimates for
//! Hardy-Sobolev functions from their size on a boundary arc, and a spectral
//! Robin solver for stability experiments on the coefficient inverse problem.
//!
//! The numerical core is generic over `f32`/`f64` through [`scalar::Real`];
//! the aliases below fix the scalar to `f64`.

pub mod analytic;
pub mod boundary;
pub mod config;
pub mod error;
pub mod estimates;
pub mod families;
pub mod kernel;
pub mod laurent;
pub mod linalg;
pub mod plot;
pub mod quadrature;
pub mod robin;
pub mod runner;
pub mod scalar;

pub use error::{Error, Result};

pub type Geometry = kernel::AnnulusGeometry<f64>;
pub type Truncation = kernel::KernelTruncation<f64>;
pub type Kernel = kernel::KernelAtRadius<f64>;
pub type Constants = kernel::KernelConstants<f64>;
pub type Laurent = laurent::LaurentFunction<f64>;
pub type Primitive = laurent::RadialPrimitive<f64>;
pub type Arc = boundary::BoundaryArc<f64>;
pub type Grid = boundary::BoundaryGrid<f64>;
pub type Hll = estimates::HllConstant<f64>;
pub type Bootstrap = estimates::BootstrapState<f64>;
pub type Optimality = estimates::OptimalityTable<f64>;
pub type Interior = analytic::InteriorBound<f64>;
pub type Series = robin::TrigSeries<f64>;
pub type Coefficient = robin::RobinCoefficient<f64>;
pub type Neumann = robin::NeumannData<f64>;
pub type Solution = robin::HarmonicSolution<f64>;
