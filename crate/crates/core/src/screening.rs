//! Forward factorial screening: alternate a heredity step that proposes the
//! next level of interactions with a sparsity step that tests them.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::design::{heredity_closure, heredity_expand, FactorSet, Heredity, WorkingModel};
use crate::error::{Error, Result};
use crate::estimation::{t_statistic, wls_effects, ArmTable, EffectEstimate, DEFAULT_ALPHA};
use crate::normal::normal_quantile;

/// Sparsity step applied to each level's candidates.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum SStep {
    /// Marginal t-tests with a Bonferroni-adjusted normal threshold.
    #[default]
    BonferroniT,
    /// Hard thresholding `|τ̂| ≥ λ`; `None` derives `λ` per level.
    Lasso { lambda: Option<f64> },
}

impl FromStr for SStep {
    type Err = Error;

    /// Accepts `t`, `lasso` or `lasso:<λ>`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "t" | "bonferroni" | "bonferroni_t" => Ok(SStep::BonferroniT),
            "lasso" => Ok(SStep::Lasso { lambda: None }),
            _ => {
                let value = s
                    .strip_prefix("lasso:")
                    .ok_or_else(|| Error::InvalidConfig(format!("unknown s-step {s:?}")))?;
                let lambda: f64 = value
                    .parse()
                    .map_err(|_| Error::InvalidConfig(format!("invalid lasso threshold {value:?}")))?;
                Ok(SStep::Lasso { lambda: Some(lambda) })
            }
        }
    }
}

impl fmt::Display for SStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SStep::BonferroniT => f.write_str("t"),
            SStep::Lasso { lambda: None } => f.write_str("lasso"),
            SStep::Lasso { lambda: Some(l) } => write!(f, "lasso:{l}"),
        }
    }
}

impl TryFrom<String> for SStep {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<SStep> for String {
    fn from(s: SStep) -> String {
        s.to_string()
    }
}

/// What to do with levels beyond `d*`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Strategy {
    /// Test every level up to `D`.
    #[default]
    Full,
    /// Stop after level `d*`.
    Under(u32),
    /// Test through `d*`, then add the heredity closure up to `D` untested.
    Over(u32),
}

impl Strategy {
    pub fn cutoff(self) -> Option<u32> {
        match self {
            Strategy::Full => None,
            Strategy::Under(d) | Strategy::Over(d) => Some(d),
        }
    }
}

impl FromStr for Strategy {
    type Err = Error;

    /// Accepts `full`, `under:<d>` or `over:<d>`.
    fn from_str(s: &str) -> Result<Self> {
        if s == "full" {
            return Ok(Strategy::Full);
        }
        let bad = || Error::InvalidConfig(format!("unknown strategy {s:?}"));
        let (kind, depth) = s.split_once(':').ok_or_else(bad)?;
        let depth: u32 = depth.parse().map_err(|_| bad())?;
        match kind {
            "under" => Ok(Strategy::Under(depth)),
            "over" => Ok(Strategy::Over(depth)),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::Full => f.write_str("full"),
            Strategy::Under(d) => write!(f, "under:{d}"),
            Strategy::Over(d) => write!(f, "over:{d}"),
        }
    }
}

impl TryFrom<String> for Strategy {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Strategy> for String {
    fn from(s: Strategy) -> String {
        s.to_string()
    }
}

/// Screening parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScreeningConfig {
    /// Maximum interaction depth `D`.
    pub depth: u32,
    /// Per-level significance levels; a single value applies to every level.
    pub alphas: Vec<f64>,
    pub heredity: Heredity,
    pub s_step: SStep,
    pub strategy: Strategy,
    /// Level of the downstream confidence intervals.
    pub alpha_ci: f64,
}

impl Default for ScreeningConfig {
    fn default() -> Self {
        ScreeningConfig {
            depth: 2,
            alphas: vec![DEFAULT_ALPHA],
            heredity: Heredity::Strong,
            s_step: SStep::BonferroniT,
            strategy: Strategy::Full,
            alpha_ci: DEFAULT_ALPHA,
        }
    }
}

impl ScreeningConfig {
    pub fn with_depth(depth: u32) -> Self {
        ScreeningConfig { depth, ..Default::default() }
    }

    /// `α_d` for level `d >= 1`.
    pub fn alpha(&self, d: u32) -> f64 {
        let i = (d.max(1) - 1) as usize;
        self.alphas.get(i).or(self.alphas.last()).copied().unwrap_or(DEFAULT_ALPHA)
    }

    pub fn validate(&self, k: u32) -> Result<()> {
        let mut problems = Vec::new();
        if self.depth < 1 || self.depth > k {
            problems.push(format!("depth {} must lie in 1..={k}", self.depth));
        }
        if self.alphas.is_empty() {
            problems.push("alphas must not be empty".to_string());
        } else if self.alphas.len() != 1 && self.alphas.len() != self.depth as usize {
            problems.push(format!(
                "expected 1 or {} alphas, found {}",
                self.depth,
                self.alphas.len()
            ));
        }
        for &a in &self.alphas {
            if !(a > 0.0 && a <= 1.0) {
                problems.push(format!("alpha {a} must lie in (0, 1]"));
            }
        }
        if !(self.alpha_ci > 0.0 && self.alpha_ci < 1.0) {
            problems.push(format!("alpha_ci {} must lie in (0, 1)", self.alpha_ci));
        }
        if let SStep::Lasso { lambda: Some(l) } = self.s_step {
            if !(l >= 0.0 && l.is_finite()) {
                problems.push(format!("lasso threshold {l} must be finite and non-negative"));
            }
        }
        if let Some(d) = self.strategy.cutoff() {
            if d > self.depth {
                problems.push(format!("strategy depth {d} exceeds depth {}", self.depth));
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(problems.join("; ")))
        }
    }
}

/// Bonferroni threshold `Φ^{-1}(1 - min(α/m, 1)/2)` on `|t|`.
pub fn bonferroni_threshold(alpha: f64, m: usize) -> Result<f64> {
    if m == 0 {
        return Ok(f64::INFINITY);
    }
    let level = (alpha / m as f64).min(1.0);
    normal_quantile(1.0 - level / 2.0)
}

fn passes_t(e: &EffectEstimate, threshold: f64) -> bool {
    let t = t_statistic(e.tau_hat, e.se).abs();
    t > 0.0 && t >= threshold
}

/// Candidates whose `|t|` reaches the Bonferroni threshold for `m` tests.
pub fn bonferroni_t_select(candidates: &[EffectEstimate], alpha: f64, m: usize) -> Result<Vec<FactorSet>> {
    let threshold = bonferroni_threshold(alpha, m)?;
    Ok(candidates.iter().filter(|e| passes_t(e, threshold)).map(|e| e.set).collect())
}

/// Closed-form lasso selection under an orthogonal design: `|τ̂| ≥ λ`.
pub fn lasso_select(candidates: &[EffectEstimate], lambda: f64) -> Vec<FactorSet> {
    candidates.iter().filter(|e| e.tau_hat.abs() >= lambda).map(|e| e.set).collect()
}

/// `λ = Φ^{-1}(1 - min(α/m, 1)/2) · median(se)`.
pub fn default_lasso_lambda(candidates: &[EffectEstimate], alpha: f64, m: usize) -> Result<f64> {
    if candidates.is_empty() {
        return Ok(0.0);
    }
    let mut ses: Vec<f64> = candidates.iter().map(|e| e.se).collect();
    ses.sort_by(f64::total_cmp);
    let n = ses.len();
    let median = if n % 2 == 1 { ses[n / 2] } else { 0.5 * (ses[n / 2 - 1] + ses[n / 2]) };
    Ok(bonferroni_threshold(alpha, m)? * median)
}

/// How a level's members were chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LevelMode {
    Tested,
    /// Added by heredity closure without testing.
    Heredity,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CandidateRecord {
    pub set: FactorSet,
    pub tau_hat: f64,
    pub se: f64,
    /// Threshold applied to `|t|` (t-tests) or `|τ̂|` (lasso); absent when untested.
    pub threshold: Option<f64>,
    pub selected: bool,
}

impl CandidateRecord {
    pub fn t_stat(&self) -> f64 {
        t_statistic(self.tau_hat, self.se)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelTrace {
    /// Interaction order; 0 marks a single saturated pass over every effect.
    pub level: u32,
    pub mode: LevelMode,
    pub alpha: Option<f64>,
    /// Number of new candidates tested.
    pub tests: usize,
    pub candidates: Vec<CandidateRecord>,
}

impl LevelTrace {
    pub fn selected(&self) -> impl Iterator<Item = FactorSet> + '_ {
        self.candidates.iter().filter(|c| c.selected).map(|c| c.set)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScreeningTrace {
    pub levels: Vec<LevelTrace>,
    pub model: WorkingModel,
}

impl ScreeningTrace {
    pub fn level(&self, d: u32) -> Option<&LevelTrace> {
        self.levels.iter().find(|l| l.level == d)
    }
}

fn at_level(level: u32) -> impl Fn(Error) -> Error {
    move |e| Error::AtLevel { level, source: Box::new(e) }
}

/// Runs the configured S-step on one batch of candidate estimates.
fn s_step_records(
    estimates: &[EffectEstimate],
    s_step: SStep,
    alpha: f64,
    m: usize,
) -> Result<Vec<CandidateRecord>> {
    let (threshold, by_t) = match s_step {
        SStep::BonferroniT => (bonferroni_threshold(alpha, m)?, true),
        SStep::Lasso { lambda: Some(l) } => (l, false),
        SStep::Lasso { lambda: None } => (default_lasso_lambda(estimates, alpha, m)?, false),
    };
    Ok(estimates
        .iter()
        .map(|e| CandidateRecord {
            set: e.set,
            tau_hat: e.tau_hat,
            se: e.se,
            threshold: Some(threshold),
            selected: if by_t { passes_t(e, threshold) } else { e.tau_hat.abs() >= threshold },
        })
        .collect())
}

/// Forward screening over levels `1..=D`, honouring the configured strategy.
pub fn forward_screen(arms: &ArmTable, config: &ScreeningConfig) -> Result<ScreeningTrace> {
    let k = arms.k();
    config.validate(k)?;
    let mut model = WorkingModel::intercept_only();
    let mut prev = vec![FactorSet::EMPTY];
    let mut levels = Vec::new();
    let tested_depth = config.strategy.cutoff().unwrap_or(config.depth);

    for d in 1..=tested_depth {
        let alpha = config.alpha(d);
        let candidates = if prev.is_empty() {
            Vec::new()
        } else {
            heredity_expand(&prev, d, config.heredity, k)
        };
        let m = candidates.len();
        let records = if m == 0 {
            Vec::new()
        } else {
            let mut trial = model.clone();
            trial.extend(candidates.iter().copied());
            let fit = wls_effects(arms, &trial).map_err(at_level(d))?;
            let estimates: Vec<EffectEstimate> = trial
                .level_slice(d)
                .iter()
                .filter_map(|&s| fit.estimate(s).copied())
                .collect();
            s_step_records(&estimates, config.s_step, alpha, m).map_err(at_level(d))?
        };
        prev = records.iter().filter(|c| c.selected).map(|c| c.set).collect();
        model.extend(prev.iter().copied());
        levels.push(LevelTrace { level: d, mode: LevelMode::Tested, alpha: Some(alpha), tests: m, candidates: records });
    }

    if let Strategy::Over(d_star) = config.strategy {
        let closure = heredity_closure(&prev, d_star, config.depth - d_star, config.heredity, k);
        let mut extended = model.clone();
        extended.extend(closure.iter().flatten().copied());
        let fit = if extended.len() > model.len() {
            Some(wls_effects(arms, &extended).map_err(at_level(d_star + 1))?)
        } else {
            None
        };
        for (i, slice) in closure.into_iter().enumerate() {
            let candidates = slice
                .into_iter()
                .map(|set| {
                    let e = fit.as_ref().and_then(|f| f.estimate(set)).copied();
                    CandidateRecord {
                        set,
                        tau_hat: e.map_or(0.0, |e| e.tau_hat),
                        se: e.map_or(0.0, |e| e.se),
                        threshold: None,
                        selected: true,
                    }
                })
                .collect();
            levels.push(LevelTrace {
                level: d_star + 1 + i as u32,
                mode: LevelMode::Heredity,
                alpha: None,
                tests: 0,
                candidates,
            });
        }
        model = extended;
    }

    Ok(ScreeningTrace { levels, model })
}

/// Tests all `Q - 1` non-intercept effects of the saturated fit in one pass,
/// with Bonferroni divisor `Q - 1` (or one global lasso threshold) and no
/// heredity constraint. Uses `α_1`.
pub fn saturated_screen(arms: &ArmTable, config: &ScreeningConfig) -> Result<ScreeningTrace> {
    let k = arms.k();
    config.validate(k)?;
    let full = WorkingModel::full(k);
    let fit = wls_effects(arms, &full)?;
    let estimates: Vec<EffectEstimate> = fit.estimates()[1..].to_vec();
    let alpha = config.alpha(1);
    let m = estimates.len();
    let candidates = s_step_records(&estimates, config.s_step, alpha, m)?;
    let model = WorkingModel::from_sets(candidates.iter().filter(|c| c.selected).map(|c| c.set))?;
    Ok(ScreeningTrace {
        levels: vec![LevelTrace { level: 0, mode: LevelMode::Tested, alpha: Some(alpha), tests: m, candidates }],
        model,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::{satisfies_heredity, TreatmentLevel};
    use crate::estimation::{FactorialDataset, Unit};

    fn set(f: &[u32]) -> FactorSet {
        FactorSet::from_factors(f.iter().copied()).unwrap()
    }

    fn est(set: FactorSet, tau_hat: f64, se: f64) -> EffectEstimate {
        EffectEstimate { set, tau_hat, se }
    }

    /// Two units per arm with outcomes `mu(z) ± spread`.
    fn arms_from(k: u32, mu: impl Fn(TreatmentLevel) -> f64, spread: f64) -> ArmTable {
        let units = (0..1usize << k).flat_map(|r| {
            let z = TreatmentLevel::from_row(r, k);
            let m = mu(z);
            [Unit { z, y: m - spread }, Unit { z, y: m + spread }]
        });
        FactorialDataset::from_units(k, units).unwrap().summarize()
    }

    #[test]
    fn bonferroni_examples() {
        let s = set(&[1]);
        assert_eq!(bonferroni_t_select(&[est(s, 10.0, 1.0)], 0.05, 5).unwrap(), vec![s]);
        assert!(bonferroni_t_select(&[est(s, 0.0, 1.0)], 0.05, 1).unwrap().is_empty());
        assert!(bonferroni_t_select(&[est(s, 0.0, 0.0)], 1.0, 1).unwrap().is_empty());
        assert_eq!(bonferroni_t_select(&[est(s, 2.0, 1.0)], 0.05, 1).unwrap(), vec![s]);
        assert!(bonferroni_t_select(&[est(s, 1.95, 1.0)], 0.05, 1).unwrap().is_empty());
        assert_eq!(bonferroni_t_select(&[est(s, 1e-9, 0.0)], 0.05, 1).unwrap(), vec![s]);
    }

    #[test]
    fn lasso_examples() {
        let c = [est(set(&[1]), 0.3, 1.0), est(set(&[2]), 0.1, 1.0), est(set(&[3]), 0.0, 1.0)];
        assert_eq!(lasso_select(&c, 0.0).len(), 3);
        assert!(lasso_select(&c, 0.31).is_empty());
        assert_eq!(lasso_select(&c, 0.2), vec![set(&[1])]);
    }

    #[test]
    fn parses_flags() {
        assert_eq!("t".parse::<SStep>().unwrap(), SStep::BonferroniT);
        assert_eq!("lasso:0.5".parse::<SStep>().unwrap(), SStep::Lasso { lambda: Some(0.5) });
        assert!("lasso:x".parse::<SStep>().is_err());
        assert_eq!("over:1".parse::<Strategy>().unwrap(), Strategy::Over(1));
        assert_eq!("under:2".parse::<Strategy>().unwrap().to_string(), "under:2");
        assert!("sideways:1".parse::<Strategy>().is_err());
    }

    #[test]
    fn validation_lists_problems() {
        let cfg = ScreeningConfig {
            depth: 4,
            alphas: vec![0.05, 2.0],
            strategy: Strategy::Over(5),
            ..Default::default()
        };
        let msg = cfg.validate(3).unwrap_err().to_string();
        assert!(msg.contains("depth 4"));
        assert!(msg.contains("alpha 2"));
        assert!(msg.contains("strategy depth 5"));
        assert!(ScreeningConfig::default().validate(2).is_ok());
    }

    #[test]
    fn constant_outcome_selects_intercept_only() {
        let arms = arms_from(3, |_| 7.0, 0.0);
        let trace = forward_screen(&arms, &ScreeningConfig::with_depth(3)).unwrap();
        assert_eq!(trace.model, WorkingModel::intercept_only());
        assert_eq!(trace.levels.len(), 3);
        assert!(trace.levels[1].candidates.is_empty());
    }

    #[test]
    fn recovers_strong_hierarchy() {
        let mu = |z: TreatmentLevel| {
            let g = |f: u32| if z.get(f) { 1.0 } else { -1.0 };
            2.0 * g(1) + 2.0 * g(2) + 1.5 * g(1) * g(2)
        };
        let arms = arms_from(4, mu, 0.1);
        let trace = forward_screen(&arms, &ScreeningConfig::with_depth(3)).unwrap();
        let expected = WorkingModel::from_sets([set(&[1]), set(&[2]), set(&[1, 2])]).unwrap();
        assert_eq!(trace.model, expected);
        assert!(satisfies_heredity(&trace.model, Heredity::Strong));
        assert_eq!(trace.level(2).unwrap().tests, 1);
    }

    #[test]
    fn over_selection_adds_untested_closure() {
        let mu = |z: TreatmentLevel| {
            let g = |f: u32| if z.get(f) { 1.0 } else { -1.0 };
            3.0 * g(1) + 3.0 * g(2)
        };
        let arms = arms_from(3, mu, 0.1);
        let cfg = ScreeningConfig { strategy: Strategy::Over(1), ..ScreeningConfig::with_depth(2) };
        let trace = forward_screen(&arms, &cfg).unwrap();
        assert!(trace.model.contains(set(&[1, 2])));
        let last = trace.levels.last().unwrap();
        assert_eq!(last.mode, LevelMode::Heredity);
        assert!(last.candidates.iter().all(|c| c.threshold.is_none()));

        let under = ScreeningConfig { strategy: Strategy::Under(1), ..cfg };
        let trace = forward_screen(&arms, &under).unwrap();
        assert_eq!(trace.levels.len(), 1);
        assert!(!trace.model.contains(set(&[1, 2])));
    }

    #[test]
    fn replication_errors_carry_level() {
        let ds = FactorialDataset::from_units(1, [Unit { z: "0".parse().unwrap(), y: 1.0 }]).unwrap();
        let err = forward_screen(&ds.summarize(), &ScreeningConfig::with_depth(1)).unwrap_err();
        assert!(matches!(err, Error::AtLevel { level: 1, .. }));
        assert!(err.is_replication());
    }

    #[test]
    fn saturated_pass_ignores_heredity() {
        let mu = |z: TreatmentLevel| {
            let g = |f: u32| if z.get(f) { 1.0 } else { -1.0 };
            3.0 * g(1) * g(2)
        };
        let arms = arms_from(3, mu, 0.1);
        let trace = saturated_screen(&arms, &ScreeningConfig::default()).unwrap();
        assert_eq!(trace.model, WorkingModel::from_sets([set(&[1, 2])]).unwrap());
        assert_eq!(trace.levels[0].tests, 7);
        let forward = forward_screen(&arms, &ScreeningConfig::default()).unwrap();
        assert_eq!(forward.model, WorkingModel::intercept_only());
    }
}
