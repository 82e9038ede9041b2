//! Probability measures on the circle: atomic and absolutely continuous
//! measures, circular transport distance, discrepancy and bounded-variation
//! observables.

mod atomic;
mod continuous;
mod discrepancy;
mod observable;
mod wasserstein;

pub use atomic::{cesaro_average, pushforward, Atom, AtomicMeasure, ATOM_CAP, MASS_TOL, MERGE_TOL};
pub use continuous::{ContinuousMeasure, FourierDensity, Lebesgue, PushforwardLebesgue};
pub use discrepancy::{discrepancy, rotation_orbit, star_discrepancy, Discrepancy, EXACT_LIMIT};
pub use observable::{
    dk_check, dk_suite, lacunary_lower_bound, lacunary_observable, periodic_average_exact,
    random_observable, BVObservable, DkCase, DkReport, DkSuiteReport, TrigTerm,
};
pub use wasserstein::{wasserstein, MeasureRef};
