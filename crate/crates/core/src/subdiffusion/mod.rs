//! Monte Carlo for stable subordinators, their inverses and time-changed SDEs.

mod density;
mod inverse;
mod io;
mod sde;
mod stable;

pub use density::{empirical_density, empirical_density_field, histogram, holder_ratio, wasserstein1, ESCAPE_LIMIT};
pub use inverse::{build_inverse_path, InversePath, InverseSampler, SubordinatorPath};
pub use io::{read_ensemble, write_ensemble, write_summary_csv, ENSEMBLE_MAGIC};
pub use sde::{
    mean_var, path_rng, simulate_from_density, simulate_inverse_ensemble, simulate_time_changed_sde, CoefFn, CoefficientSpec,
    PathEnsemble,
};
pub use stable::{sample_stable_increment, sample_standard, standard_median};
