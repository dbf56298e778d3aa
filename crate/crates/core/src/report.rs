//! End-to-end analysis of one dataset: screen, then estimate each target.

use serde::Serialize;

use crate::best_arm::{best_arm_estimate, TieReport};
use crate::design::WorkingModel;
use crate::error::Result;
use crate::estimation::{
    efficiency_bound, plug_in_estimate, rls_estimate, ArmSummary, ArmTable, EfficiencyDiagnostics, Estimate,
};
use crate::screening::{forward_screen, ScreeningConfig, ScreeningTrace, Strategy};
use crate::simulation::SCHEMA;
use crate::targets::TargetSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateMethod {
    Plugin,
    Rls,
    RlsUnder,
    RlsOver,
}

impl EstimateMethod {
    pub fn for_strategy(strategy: Strategy) -> Self {
        match strategy {
            Strategy::Full => EstimateMethod::Rls,
            Strategy::Under(_) => EstimateMethod::RlsUnder,
            Strategy::Over(_) => EstimateMethod::RlsOver,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            EstimateMethod::Plugin => "plugin",
            EstimateMethod::Rls => "rls",
            EstimateMethod::RlsUnder => "rls_under",
            EstimateMethod::RlsOver => "rls_over",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EstimateRecord {
    pub target: String,
    pub gamma_hat: f64,
    pub se: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    /// Model the estimator projected onto; the saturated model for plug-in.
    pub model: WorkingModel,
    pub method: EstimateMethod,
}

impl EstimateRecord {
    fn new(target: &str, estimate: &Estimate, model: &WorkingModel, method: EstimateMethod) -> Self {
        EstimateRecord {
            target: target.to_string(),
            gamma_hat: estimate.gamma_hat,
            se: estimate.se(),
            ci_lo: estimate.ci_lo,
            ci_hi: estimate.ci_hi,
            model: model.clone(),
            method,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BestArmRecord {
    pub target: String,
    pub method: EstimateMethod,
    pub report: TieReport,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EfficiencyRecord {
    pub target: String,
    #[serde(flatten)]
    pub diagnostics: EfficiencyDiagnostics,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub schema: &'static str,
    pub k: u32,
    pub units: usize,
    pub arms: Vec<ArmSummary>,
    pub screening: ScreeningConfig,
    pub trace: ScreeningTrace,
    pub estimates: Vec<EstimateRecord>,
    pub best_arm: Vec<BestArmRecord>,
    pub efficiency: Vec<EfficiencyRecord>,
}

/// Runs forward screening, then plug-in and restricted least squares
/// estimates for every target.
pub fn analyze(arms: &ArmTable, config: &ScreeningConfig, targets: &[TargetSpec]) -> Result<AnalysisReport> {
    let k = arms.k();
    for t in targets {
        t.validate(k)?;
    }
    let trace = forward_screen(arms, config)?;
    let model = &trace.model;
    let full = WorkingModel::full(k);
    let rls_method = EstimateMethod::for_strategy(config.strategy);
    let alpha = config.alpha_ci;

    let mut estimates = Vec::new();
    let mut best_arm = Vec::new();
    let mut efficiency = Vec::new();
    for t in targets {
        let label = t.to_string();
        if let Some(cfg) = t.best_arm_config(k, alpha) {
            best_arm.push(BestArmRecord {
                target: label.clone(),
                method: EstimateMethod::Plugin,
                report: best_arm_estimate(arms, &full, &cfg)?,
            });
            best_arm.push(BestArmRecord {
                target: label,
                method: rls_method,
                report: best_arm_estimate(arms, model, &cfg)?,
            });
            continue;
        }
        let f = t.weights(k)?;
        let plug = plug_in_estimate(&f, arms, alpha)?;
        estimates.push(EstimateRecord::new(&label, &plug, &full, EstimateMethod::Plugin));
        let rls = rls_estimate(&f, model, arms, alpha)?;
        estimates.push(EstimateRecord::new(&label, &rls.estimate, model, rls_method));
        efficiency.push(EfficiencyRecord { target: label, diagnostics: efficiency_bound(&f, model, arms)? });
    }

    Ok(AnalysisReport {
        schema: SCHEMA,
        k,
        units: arms.total_units(),
        arms: arms.arms().to_vec(),
        screening: config.clone(),
        trace,
        estimates,
        best_arm,
        efficiency,
    })
}
