//! Design-based analysis of 2^K factorial experiments.

pub mod best_arm;
pub mod design;
pub mod error;
pub mod estimation;
pub mod normal;
pub mod report;
pub mod screening;
pub mod simulation;
pub mod targets;

pub use best_arm::{best_arm_estimate, BestArmConfig, Eta, TieReport};
pub use design::{
    contrast_matrix, contrast_value, effect_transform, FactorSet, FactorialEffects, Heredity,
    TreatmentLevel, WorkingModel,
};
pub use error::{Error, Result};
pub use estimation::{ArmSummary, ArmTable, EffectEstimate, Estimate, FactorialDataset, WeightVector};
pub use report::{analyze, AnalysisReport, EstimateMethod, EstimateRecord};
pub use screening::{forward_screen, SStep, ScreeningConfig, ScreeningTrace, Strategy};
pub use simulation::{run_monte_carlo, SimulationConfig, SimulationResult};
pub use targets::TargetSpec;
