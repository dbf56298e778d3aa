use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::best_arm::{best_arm_estimate, canonical_arms, BestArmConfig, TieReport};
use crate::design::{
    arm_count, check_factor_count, satisfies_heredity, sets_of_level, FactorSet, FactorialEffects,
    TreatmentLevel, WorkingModel,
};
use crate::error::{Error, Result};
use crate::estimation::{plug_in_estimate, rls_estimate, ArmSummary, ArmTable, Estimate, WeightVector};
use crate::screening::{forward_screen, saturated_screen, SStep, ScreeningConfig};
use crate::targets::TargetSpec;

use super::science::{assign, gen_science_table, reveal, shifted_exp, DesignSpec, Dgp, ScienceTable};

/// Schema tag shared by every machine-readable output.
pub const SCHEMA: &str = "factorial-screen/1";

/// Screening procedure compared by the harness.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ForwardBonferroni,
    ForwardLasso,
    NaiveBonferroni,
    NaiveLasso,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::ForwardBonferroni,
        Method::ForwardLasso,
        Method::NaiveBonferroni,
        Method::NaiveLasso,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::ForwardBonferroni => "forward-bonferroni",
            Method::ForwardLasso => "forward-lasso",
            Method::NaiveBonferroni => "naive-bonferroni",
            Method::NaiveLasso => "naive-lasso",
        }
    }

    pub fn is_forward(self) -> bool {
        matches!(self, Method::ForwardBonferroni | Method::ForwardLasso)
    }

    fn s_step(self, lambda: Option<f64>) -> SStep {
        match self {
            Method::ForwardBonferroni | Method::NaiveBonferroni => SStep::BonferroniT,
            Method::ForwardLasso | Method::NaiveLasso => SStep::Lasso { lambda },
        }
    }

    /// Runs this procedure's screen.
    pub fn screen(self, arms: &ArmTable, base: &ScreeningConfig, lambda: Option<f64>) -> Result<WorkingModel> {
        let config = ScreeningConfig { s_step: self.s_step(lambda), ..base.clone() };
        let trace = if self.is_forward() {
            forward_screen(arms, &config)?
        } else {
            saturated_screen(arms, &config)?
        };
        Ok(trace.model)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    Plugin,
    Rls,
}

impl Estimator {
    pub fn name(self) -> &'static str {
        match self {
            Estimator::Plugin => "plugin",
            Estimator::Rls => "rls",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EffectTerm {
    pub set: FactorSet,
    #[serde(default = "one")]
    pub scale: f64,
}

fn one() -> f64 {
    1.0
}

/// Arm means as a function of the grid's effect size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeanSpec {
    /// Every effect of level `1..=depth` among `factors`, all equal to the
    /// effect size.
    Hierarchy { factors: Vec<u32>, depth: u32 },
    /// Listed effects, each `scale × effect size`.
    Effects { terms: Vec<EffectTerm> },
    /// Explicit arm means, row-indexed, multiplied by the effect size.
    Arms { means: Vec<f64> },
}

impl Default for MeanSpec {
    fn default() -> Self {
        MeanSpec::Hierarchy { factors: (1..=5).collect(), depth: 2 }
    }
}

impl MeanSpec {
    fn problems(&self, k: u32) -> Vec<String> {
        let mut out = Vec::new();
        match self {
            MeanSpec::Hierarchy { factors, depth } => {
                if let Some(f) = factors.iter().find(|&&f| f == 0 || f > k) {
                    out.push(format!("mean.factors: factor {f} outside 1..={k}"));
                }
                if *depth as usize > factors.len() {
                    out.push(format!("mean.depth {depth} exceeds the {} listed factors", factors.len()));
                }
            }
            MeanSpec::Effects { terms } => {
                for t in terms {
                    if !t.set.fits(k) {
                        out.push(format!("mean.terms: set {} uses a factor above {k}", t.set));
                    }
                    if !t.scale.is_finite() {
                        out.push(format!("mean.terms: scale {} is not finite", t.scale));
                    }
                }
            }
            MeanSpec::Arms { means } => {
                if k <= 20 && means.len() != arm_count(k) {
                    out.push(format!("mean.means: expected {} values, found {}", arm_count(k), means.len()));
                }
                if means.iter().any(|m| !m.is_finite()) {
                    out.push("mean.means: values must be finite".into());
                }
            }
        }
        out
    }

    /// `μ(z)` at the given effect size plus a constant `intercept`.
    pub fn arm_means(&self, k: u32, size: f64, intercept: f64) -> Result<Vec<f64>> {
        check_factor_count(k)?;
        let mut mu = match self {
            MeanSpec::Hierarchy { factors, depth } => {
                let mask = FactorSet::from_factors(factors.iter().copied())?.mask();
                let terms: Vec<(FactorSet, f64)> = (1..=*depth)
                    .flat_map(|d| sets_of_level(k, d))
                    .filter(|s| s.mask() & !mask == 0)
                    .map(|s| (s, size))
                    .collect();
                super::mu_from_effects(&terms, k)?
            }
            MeanSpec::Effects { terms } => {
                let terms: Vec<(FactorSet, f64)> = terms.iter().map(|t| (t.set, t.scale * size)).collect();
                super::mu_from_effects(&terms, k)?
            }
            MeanSpec::Arms { means } => {
                if means.len() != arm_count(k) {
                    return Err(Error::LengthMismatch { expected: arm_count(k), found: means.len() });
                }
                means.iter().map(|m| m * size).collect()
            }
        };
        mu.iter_mut().for_each(|m| *m += intercept);
        Ok(mu)
    }
}

/// How replicates obtain observed data.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    /// Draws each replicate's observed outcomes directly from their exact
    /// joint law under a freshly generated science table, without
    /// materializing the table.
    #[default]
    Streaming,
    /// Generates one science table per grid point and re-randomizes the
    /// assignment in every replicate.
    Materialized,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationConfig {
    pub k: u32,
    pub seed: u64,
    pub replications: usize,
    /// Units per arm, one grid axis.
    pub n0: Vec<usize>,
    /// Effect sizes, the other grid axis.
    pub effect_sizes: Vec<f64>,
    pub intercept: f64,
    pub mean: MeanSpec,
    pub dgp: Dgp,
    /// Demean the noise so the finite-population means equal `μ` exactly.
    pub centered: bool,
    pub engine: Engine,
    pub screening: ScreeningConfig,
    /// Fixed lasso threshold; derived per level when absent.
    pub lasso_lambda: Option<f64>,
    pub methods: Vec<Method>,
    /// Defaults to the all-high arm when empty.
    pub targets: Vec<TargetSpec>,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig {
            k: 8,
            seed: 20_240_601,
            replications: 1000,
            n0: vec![2, 4, 6, 8],
            effect_sizes: vec![0.1, 0.2, 0.4, 0.8],
            intercept: 0.0,
            mean: MeanSpec::default(),
            dgp: Dgp::ShiftedExponential,
            centered: true,
            engine: Engine::Streaming,
            screening: ScreeningConfig::default(),
            lasso_lambda: None,
            methods: Method::ALL.to_vec(),
            targets: Vec::new(),
        }
    }
}

impl SimulationConfig {
    pub fn resolved_targets(&self) -> Vec<TargetSpec> {
        if self.targets.is_empty() {
            vec![TargetSpec::Arm(TreatmentLevel::all_high(self.k.clamp(1, 20)))]
        } else {
            self.targets.clone()
        }
    }

    /// Checks every field, reporting all problems at once.
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        let k_ok = check_factor_count(self.k).is_ok();
        if !k_ok {
            problems.push(format!("k {} outside 1..=20", self.k));
        }
        if self.k > 16 {
            problems.push(format!("k {} exceeds the simulation limit of 16", self.k));
        }
        if self.replications == 0 {
            problems.push("replications must be at least 1".into());
        }
        if self.n0.is_empty() {
            problems.push("n0 must list at least one value".into());
        }
        if let Some(n) = self.n0.iter().find(|&&n| n < 2) {
            problems.push(format!("n0 {n} is below 2; variance estimation needs two units per arm"));
        }
        if self.effect_sizes.is_empty() {
            problems.push("effect_sizes must list at least one value".into());
        }
        if self.effect_sizes.iter().any(|s| !s.is_finite()) || !self.intercept.is_finite() {
            problems.push("effect_sizes and intercept must be finite".into());
        }
        if self.methods.is_empty() {
            problems.push("methods must list at least one method".into());
        }
        if let Some(l) = self.lasso_lambda {
            if !(l >= 0.0 && l.is_finite()) {
                problems.push(format!("lasso_lambda {l} must be finite and non-negative"));
            }
        }
        if k_ok {
            problems.extend(self.mean.problems(self.k));
            if let Err(e) = self.screening.validate(self.k) {
                problems.push(format!("screening: {e}"));
            }
            for t in self.resolved_targets() {
                if let Err(e) = t.validate(self.k) {
                    problems.push(e.to_string());
                }
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(problems.join("; ")))
        }
    }
}

/// One tidy output row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub n0: usize,
    pub effect_size: f64,
    pub target: String,
    pub method: String,
    pub estimator: String,
    pub metric: String,
    pub value: f64,
    pub mc_se: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunManifest {
    pub schema: &'static str,
    pub version: &'static str,
    pub seed: u64,
    pub grid_points: usize,
    pub replicates_per_point: usize,
    pub config: SimulationConfig,
    /// Settings that are harness defaults rather than fixed by the method.
    pub labeled_defaults: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimulationResult {
    pub rows: Vec<MetricRow>,
    pub manifest: RunManifest,
}

impl SimulationResult {
    /// Looks up one metric; `target` and `estimator` are `-` for screening rows.
    pub fn find(
        &self,
        n0: usize,
        effect_size: f64,
        method: Method,
        estimator: &str,
        target: &str,
        metric: &str,
    ) -> Option<&MetricRow> {
        self.rows.iter().find(|r| {
            r.n0 == n0
                && r.effect_size == effect_size
                && r.method == method.name()
                && r.estimator == estimator
                && r.target == target
                && r.metric == metric
        })
    }
}

/// SplitMix64 finalizer, used to derive independent stream keys.
fn mix(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generator for replicate `r` of grid point `g`.
pub fn replicate_rng(seed: u64, grid_index: usize, replicate: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, grid_index as u64));
    rng.set_stream(replicate as u64);
    rng
}

enum ResolvedTarget {
    Weight { label: String, f: WeightVector },
    Best { label: String, config: BestArmConfig, arms: Vec<usize> },
}

impl ResolvedTarget {
    fn label(&self) -> &str {
        match self {
            ResolvedTarget::Weight { label, .. } | ResolvedTarget::Best { label, .. } => label,
        }
    }
}

struct GridPoint {
    index: usize,
    n0: usize,
    size: f64,
    mu: Vec<f64>,
    m_star: WorkingModel,
    table: Option<(ScienceTable, Vec<f64>)>,
}

/// Effects of `mu` that are not numerically zero, plus the intercept.
pub fn true_model(mu: &[f64]) -> Result<WorkingModel> {
    let effects = FactorialEffects::from_arm_values(mu)?;
    let k = effects.k();
    let scale = mu.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    let sets = crate::design::canonical_sets(k)
        .into_iter()
        .filter(|&s| s.is_empty() || effects.get(s).abs() > 1e-12 * scale);
    WorkingModel::from_sets(sets)
}

#[derive(Clone, Copy, Debug)]
struct TargetOutcome {
    gamma_hat: f64,
    truth: f64,
    estimate: Estimate,
    reject: bool,
    tie: Option<(bool, usize)>,
}

struct MethodOutcome {
    perfect: bool,
    violation: bool,
    size: usize,
    /// Per target, `[plugin, rls]`.
    targets: Vec<[TargetOutcome; 2]>,
}

/// Observed arm summaries and the finite-population means for one replicate.
fn draw_streaming(cfg: &SimulationConfig, point: &GridPoint, rng: &mut ChaCha8Rng) -> Result<(ArmTable, Vec<f64>)> {
    let k = cfg.k;
    let q = arm_count(k);
    let n0 = point.n0;
    let n_total = q * n0;
    let mu = &point.mu;
    let mut ybar = mu.clone();
    let mut arms = Vec::with_capacity(q);
    let mut ys = vec![0.0; n0];
    match cfg.dgp {
        Dgp::Constant => {
            for (r, &m) in mu.iter().enumerate() {
                ys.iter_mut().for_each(|y| *y = m);
                arms.push(ArmSummary::from_outcomes(TreatmentLevel::from_row(r, k), &ys));
            }
        }
        Dgp::ShiftedExponential => {
            // Column z holds n0 observed and N - n0 unobserved Exp(1) draws;
            // only the sum of the latter matters and it is Gamma(N - n0, 1).
            let hidden = Gamma::new((n_total - n0) as f64, 1.0)
                .map_err(|e| Error::InvalidConfig(e.to_string()))?;
            for r in 0..q {
                let mut obs_sum = 0.0;
                for y in ys.iter_mut() {
                    let e: f64 = rng.sample(Exp1);
                    obs_sum += e;
                    *y = e;
                }
                let col_mean = (obs_sum + hidden.sample(rng)) / n_total as f64;
                let shift = if cfg.centered { col_mean } else { 1.0 };
                ys.iter_mut().for_each(|y| *y += mu[r] - shift);
                if !cfg.centered {
                    ybar[r] = mu[r] + col_mean - 1.0;
                }
                arms.push(ArmSummary::from_outcomes(TreatmentLevel::from_row(r, k), &ys));
            }
        }
        Dgp::SharpNull => {
            // Units are exchangeable, so a fixed arm-by-block assignment has
            // the law of a random one.
            let eps: Vec<f64> = (0..n_total).map(|_| shifted_exp(rng)).collect();
            let eps_mean = eps.iter().sum::<f64>() / n_total as f64;
            let shift = if cfg.centered { eps_mean } else { 0.0 };
            for r in 0..q {
                for (y, e) in ys.iter_mut().zip(&eps[r * n0..(r + 1) * n0]) {
                    *y = e - shift + mu[r];
                }
                if !cfg.centered {
                    ybar[r] = mu[r] + eps_mean;
                }
                arms.push(ArmSummary::from_outcomes(TreatmentLevel::from_row(r, k), &ys));
            }
        }
    }
    Ok((ArmTable::from_summaries(k, arms)?, ybar))
}

fn draw(cfg: &SimulationConfig, point: &GridPoint, rng: &mut ChaCha8Rng) -> Result<(ArmTable, Vec<f64>)> {
    match &point.table {
        None => draw_streaming(cfg, point, rng),
        Some((table, ybar)) => {
            let design = DesignSpec::uniform(cfg.k, point.n0)?;
            let z = assign(&design, rng)?;
            Ok((reveal(table, &z)?.summarize(), ybar.clone()))
        }
    }
}

fn outcome(estimate: Estimate, truth: f64, tie: Option<(bool, usize)>) -> Result<TargetOutcome> {
    Ok(TargetOutcome {
        gamma_hat: estimate.gamma_hat,
        truth,
        reject: estimate.rejects_zero()?,
        estimate,
        tie,
    })
}

fn best_outcome(report: &TieReport, ybar: &[f64], candidate_rows: &[usize]) -> Result<TargetOutcome> {
    let values: Vec<f64> = candidate_rows.iter().map(|&r| ybar[r]).collect();
    let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tol = 1e-9 * best.abs().max(1.0);
    let top: Vec<usize> = (0..values.len()).filter(|&l| values[l] >= best - tol).collect();
    outcome(report.estimate, best, Some((report.tie == top, report.tie.len())))
}

fn run_replicate(
    cfg: &SimulationConfig,
    point: &GridPoint,
    targets: &[ResolvedTarget],
    replicate: usize,
) -> Result<Vec<MethodOutcome>> {
    let mut rng = replicate_rng(cfg.seed, point.index, replicate);
    let (arms, ybar) = draw(cfg, point, &mut rng)?;
    let alpha = cfg.screening.alpha_ci;
    let full = WorkingModel::full(cfg.k);

    let plugin: Vec<TargetOutcome> = targets
        .iter()
        .map(|t| match t {
            ResolvedTarget::Weight { f, .. } => outcome(plug_in_estimate(f, &arms, alpha)?, f.dot(&ybar), None),
            ResolvedTarget::Best { config, arms: rows, .. } => {
                best_outcome(&best_arm_estimate(&arms, &full, config)?, &ybar, rows)
            }
        })
        .collect::<Result<_>>()?;

    cfg.methods
        .iter()
        .map(|&method| {
            let model = method.screen(&arms, &cfg.screening, cfg.lasso_lambda)?;
            let targets = targets
                .iter()
                .zip(&plugin)
                .map(|(t, &p)| {
                    let rls = match t {
                        ResolvedTarget::Weight { f, .. } => {
                            outcome(rls_estimate(f, &model, &arms, alpha)?.estimate, f.dot(&ybar), None)?
                        }
                        ResolvedTarget::Best { config, arms: rows, .. } => {
                            best_outcome(&best_arm_estimate(&arms, &model, config)?, &ybar, rows)?
                        }
                    };
                    Ok([p, rls])
                })
                .collect::<Result<_>>()?;
            Ok(MethodOutcome {
                perfect: model == point.m_star,
                violation: !satisfies_heredity(&model, cfg.screening.heredity),
                size: model.len(),
                targets,
            })
        })
        .collect()
}

/// Mean and Monte Carlo standard error.
fn summarize(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let v: Vec<f64> = values.collect();
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn indicator(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

fn resolve_targets(cfg: &SimulationConfig) -> Result<Vec<ResolvedTarget>> {
    cfg.resolved_targets()
        .into_iter()
        .map(|t| {
            let label = t.to_string();
            match t.best_arm_config(cfg.k, cfg.screening.alpha_ci) {
                Some(config) => {
                    let k0 = match config.candidates {
                        crate::best_arm::Candidates::Constrained { k0 } => k0,
                        crate::best_arm::Candidates::Weights { .. } => cfg.k,
                    };
                    let arms = canonical_arms(cfg.k, k0).iter().map(|z| z.row()).collect();
                    Ok(ResolvedTarget::Best { label, config, arms })
                }
                None => Ok(ResolvedTarget::Weight { f: t.weights(cfg.k)?, label }),
            }
        })
        .collect()
}

fn grid_rows(cfg: &SimulationConfig, point: &GridPoint, targets: &[ResolvedTarget], outcomes: &[Vec<MethodOutcome>]) -> Vec<MetricRow> {
    let mut rows = Vec::new();
    let mut push = |target: &str, method: Method, estimator: &str, metric: &str, (value, mc_se): (f64, f64)| {
        rows.push(MetricRow {
            n0: point.n0,
            effect_size: point.size,
            target: target.to_string(),
            method: method.name().to_string(),
            estimator: estimator.to_string(),
            metric: metric.to_string(),
            value,
            mc_se,
        });
    };
    for (mi, &method) in cfg.methods.iter().enumerate() {
        let per = || outcomes.iter().map(move |o| &o[mi]);
        push("-", method, "-", "perfect_screening", summarize(per().map(|o| indicator(o.perfect))));
        push("-", method, "-", "heredity_violation", summarize(per().map(|o| indicator(o.violation))));
        push("-", method, "-", "model_size", summarize(per().map(|o| o.size as f64)));
        for (ti, target) in targets.iter().enumerate() {
            for (ei, estimator) in [Estimator::Plugin, Estimator::Rls].iter().enumerate() {
                let t = || per().map(move |o| o.targets[ti][ei]);
                let name = estimator.name();
                let label = target.label();
                push(label, method, name, "power", summarize(t().map(|o| indicator(o.reject))));
                push(label, method, name, "coverage", summarize(t().map(|o| indicator(o.estimate.covers(o.truth)))));
                push(label, method, name, "ci_length", summarize(t().map(|o| o.estimate.ci_width())));
                push(label, method, name, "variance", summarize(t().map(|o| o.estimate.variance)));
                push(label, method, name, "bias", summarize(t().map(|o| o.gamma_hat - o.truth)));
                if matches!(target, ResolvedTarget::Best { .. }) {
                    push(label, method, name, "tie_recovery", summarize(t().map(|o| indicator(o.tie.is_some_and(|x| x.0)))));
                    push(label, method, name, "tie_size", summarize(t().map(|o| o.tie.map_or(0.0, |x| x.1 as f64))));
                }
            }
        }
    }
    rows
}

/// Runs every grid point. Replicates execute in parallel; results are
/// reduced in replicate order, so output is independent of scheduling.
pub fn run_monte_carlo(cfg: &SimulationConfig) -> Result<SimulationResult> {
    cfg.validate()?;
    let targets = resolve_targets(cfg)?;
    let mut rows = Vec::new();
    let mut index = 0usize;
    for &n0 in &cfg.n0 {
        for &size in &cfg.effect_sizes {
            let mu = cfg.mean.arm_means(cfg.k, size, cfg.intercept)?;
            let table = match cfg.engine {
                Engine::Streaming => None,
                Engine::Materialized => {
                    let mut rng = replicate_rng(cfg.seed, index, usize::MAX);
                    let table = gen_science_table(&mu, n0 * arm_count(cfg.k), cfg.dgp, cfg.centered, &mut rng)?;
                    let ybar = table.column_means();
                    Some((table, ybar))
                }
            };
            let point = GridPoint { index, n0, size, m_star: true_model(&mu)?, mu, table };
            let outcomes = (0..cfg.replications)
                .into_par_iter()
                .map(|r| run_replicate(cfg, &point, &targets, r))
                .collect::<Result<Vec<_>>>()?;
            rows.extend(grid_rows(cfg, &point, &targets, &outcomes));
            index += 1;
        }
    }
    let manifest = RunManifest {
        schema: SCHEMA,
        version: env!("CARGO_PKG_VERSION"),
        seed: cfg.seed,
        grid_points: index,
        replicates_per_point: cfg.replications,
        config: cfg.clone(),
        labeled_defaults: vec![
            "replications, n0 grid and effect-size grid are harness defaults".into(),
            "effect structure: main effects and interactions among the listed factors share one size".into(),
            "lasso threshold, when unset, is the Bonferroni normal quantile times the median standard error".into(),
            "best-arm tie threshold 'auto' is twice the Bonferroni quantile times the largest standard error".into(),
        ],
    };
    Ok(SimulationResult { rows, manifest })
}
