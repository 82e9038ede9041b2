//! Numerics for statistical stability of circle rotations and circle
//! diffeomorphisms: transport distances between invariant measures,
//! discrepancy, linear response through the homological equation, and
//! grid discretizations.

pub mod arithmetic;
pub mod error;
pub mod experiments;
pub mod fourier;
pub mod invariant;
pub mod maps;
pub mod measures;
mod numeric;
pub mod response;

pub use arithmetic::{
    canonicalize, circle_dist, continued_fraction, continued_fraction_exact,
    diophantine_type_estimate, golden_mean, CirclePoint, Convergent, DiophantineProfile, ExactReal,
};
pub use error::{Error, Result};
pub use experiments::{ExperimentConfig, MeasureKind, ScalingRecord};
pub use fourier::FourierSeries;
pub use maps::{CircleMapSpec, ConjugacyDiffeo};
pub use measures::{wasserstein, AtomicMeasure, FourierDensity, Lebesgue};
