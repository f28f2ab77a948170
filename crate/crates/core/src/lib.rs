//! Sparse recovery with orthogonal matching pursuit and its K-fold variants.
//!
//! The crate covers greedy recovery ([`pursuit`]), the CoSaMP and IHT
//! baselines ([`baselines`]), restricted isometry constants ([`rip`]), the
//! error-bound constants built on them ([`bounds`]) and a reproducible
//! benchmark harness ([`bench`]).

pub mod baselines;
pub mod bench;
pub mod bounds;
pub mod error;
pub mod linalg;
pub mod model;
pub mod pursuit;
pub mod rip;

pub use error::{Error, Result};
pub use linalg::{DenseMatrix, DenseVector};
pub use model::{MeasurementMatrix, NoiseSpec, Signal, SupportSet};
pub use pursuit::{hybrid_omp, komp, omp, PursuitOptions, PursuitResult, SelectionRule, StopReason};
