//! Potential-outcome generation, complete randomization, exact enumeration
//! oracles and the Monte Carlo harness.

mod exact;
mod monte_carlo;
mod science;

pub use exact::{enumerate_assignments, ExactMoments, ENUMERATION_LIMIT};
pub use monte_carlo::{
    replicate_rng, run_monte_carlo, true_model, EffectTerm, Engine, Estimator, MeanSpec, Method,
    MetricRow, RunManifest, SimulationConfig, SimulationResult, SCHEMA,
};
pub use science::{assign, gen_science_table, mu_from_effects, reveal, DesignSpec, Dgp, ScienceTable};
