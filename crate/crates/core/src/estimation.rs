//! Arm summaries, factorial-effect regression, and plug-in / restricted
//! least squares estimators of weighted causal parameters `γ = fᵀȲ`.
//!
//! All estimators here are linear in the arm means `Ŷ`, so every quantity is
//! computed through the fast effect transform rather than by forming the
//! regression design matrix.

use serde::{Deserialize, Serialize};

use crate::design::{
    arm_count, check_factor_count, factors_for_len, FactorSet, FactorialEffects, TreatmentLevel,
    WorkingModel,
};
use crate::error::{Error, Result};
use crate::normal::z_critical;

/// Default confidence-interval level `α`.
pub const DEFAULT_ALPHA: f64 = 0.05;

/// Per-arm sample statistics.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArmSummary {
    pub z: TreatmentLevel,
    pub n: usize,
    /// Sample mean; zero when the arm is empty.
    pub mean: f64,
    /// Sample variance with divisor `n - 1`; absent when `n < 2`.
    pub var: Option<f64>,
}

impl ArmSummary {
    pub fn from_outcomes(z: TreatmentLevel, ys: &[f64]) -> Self {
        let n = ys.len();
        if n == 0 {
            return ArmSummary { z, n, mean: 0.0, var: None };
        }
        let mean = ys.iter().sum::<f64>() / n as f64;
        let var = (n >= 2).then(|| {
            ys.iter().map(|y| (y - mean) * (y - mean)).sum::<f64>() / (n - 1) as f64
        });
        ArmSummary { z, n, mean, var }
    }

    /// Entry of `V̂_Ŷ`: `Ŝ(z,z) / N(z)`.
    pub fn var_of_mean(&self) -> Option<f64> {
        self.var.map(|v| v / self.n as f64)
    }
}

/// One observed unit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Unit {
    pub z: TreatmentLevel,
    pub y: f64,
}

/// Observed `(Z_i, Y_i)` pairs from a 2^K experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct FactorialDataset {
    k: u32,
    units: Vec<Unit>,
}

impl FactorialDataset {
    pub fn new(k: u32) -> Result<Self> {
        check_factor_count(k)?;
        Ok(FactorialDataset { k, units: Vec::new() })
    }

    pub fn from_units(k: u32, units: impl IntoIterator<Item = Unit>) -> Result<Self> {
        let mut ds = FactorialDataset::new(k)?;
        for u in units {
            ds.push(u.z, u.y)?;
        }
        Ok(ds)
    }

    pub fn push(&mut self, z: TreatmentLevel, y: f64) -> Result<()> {
        if z.k() != self.k {
            return Err(Error::InvalidTreatment(format!("{z} has {} factors, expected {}", z.k(), self.k)));
        }
        if !y.is_finite() {
            return Err(Error::NonFiniteOutcome { unit: self.units.len(), value: y });
        }
        self.units.push(Unit { z, y });
        Ok(())
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn units(&self) -> &[Unit] {
        &self.units
    }

    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }

    /// Per-arm counts, means and variances.
    pub fn summarize(&self) -> ArmTable {
        let q = arm_count(self.k);
        let mut groups: Vec<Vec<f64>> = vec![Vec::new(); q];
        for u in &self.units {
            groups[u.z.row()].push(u.y);
        }
        let arms = groups
            .iter()
            .enumerate()
            .map(|(r, ys)| ArmSummary::from_outcomes(TreatmentLevel::from_row(r, self.k), ys))
            .collect();
        ArmTable { k: self.k, arms }
    }
}

/// Arm summaries indexed by row `r(z)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ArmTable {
    k: u32,
    arms: Vec<ArmSummary>,
}

pub fn summarize(dataset: &FactorialDataset) -> ArmTable {
    dataset.summarize()
}

impl ArmTable {
    /// Assembles a table from row-ordered summaries.
    pub fn from_summaries(k: u32, arms: Vec<ArmSummary>) -> Result<Self> {
        check_factor_count(k)?;
        if arms.len() != arm_count(k) {
            return Err(Error::LengthMismatch { expected: arm_count(k), found: arms.len() });
        }
        for (r, a) in arms.iter().enumerate() {
            if a.z.k() != k || a.z.row() != r {
                return Err(Error::InvalidTreatment(format!("summary for {} at row {r}", a.z)));
            }
        }
        Ok(ArmTable { k, arms })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn q(&self) -> usize {
        self.arms.len()
    }

    pub fn arms(&self) -> &[ArmSummary] {
        &self.arms
    }

    pub fn arm(&self, z: TreatmentLevel) -> &ArmSummary {
        &self.arms[z.row()]
    }

    pub fn total_units(&self) -> usize {
        self.arms.iter().map(|a| a.n).sum()
    }

    /// `Ŷ`, row-indexed.
    pub fn means(&self) -> Vec<f64> {
        self.arms.iter().map(|a| a.mean).collect()
    }

    /// Diagonal of `V̂_Ŷ`; `None` where the arm has fewer than two units.
    pub fn var_of_means(&self) -> Vec<Option<f64>> {
        self.arms.iter().map(ArmSummary::var_of_mean).collect()
    }

    /// Whether every arm can support variance estimation.
    pub fn is_inference_ready(&self) -> bool {
        self.arms.iter().all(|a| a.n >= 2)
    }

    /// Fails unless every arm selected by `used` has at least `min_n` units.
    fn require(&self, min_n: usize, used: impl Fn(usize) -> bool) -> Result<()> {
        let missing: Vec<String> = self
            .arms
            .iter()
            .enumerate()
            .filter(|(r, a)| used(*r) && a.n == 0)
            .map(|(_, a)| a.z.to_string())
            .collect();
        if !missing.is_empty() {
            return Err(Error::MissingArms(missing));
        }
        let thin: Vec<String> = self
            .arms
            .iter()
            .enumerate()
            .filter(|(r, a)| used(*r) && a.n < min_n)
            .map(|(_, a)| a.z.to_string())
            .collect();
        if !thin.is_empty() {
            return Err(Error::InsufficientReplication(thin));
        }
        Ok(())
    }

    /// `V̂_Ŷ` with zeros for arms the caller has verified are unused.
    fn var_of_means_or_zero(&self) -> Vec<f64> {
        self.arms.iter().map(|a| a.var_of_mean().unwrap_or(0.0)).collect()
    }
}

/// A weighting vector `f` over arms, row-indexed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        factors_for_len(values.len())?;
        Ok(WeightVector(values))
    }

    /// Canonical basis vector `e(z)`.
    pub fn arm(z: TreatmentLevel) -> Self {
        let mut v = vec![0.0; arm_count(z.k())];
        v[z.row()] = 1.0;
        WeightVector(v)
    }

    /// Contrast column `g_K`.
    pub fn contrast(set: FactorSet, k: u32) -> Result<Self> {
        check_factor_count(k)?;
        set.check(k)?;
        Ok(WeightVector(
            (0..arm_count(k))
                .map(|r| crate::design::contrast_value(set, TreatmentLevel::from_row(r, k)) as f64)
                .collect(),
        ))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_values(self) -> Vec<f64> {
        self.0
    }

    pub fn k(&self) -> u32 {
        self.0.len().trailing_zeros()
    }

    pub fn nonzero_count(&self) -> usize {
        self.0.iter().filter(|&&x| x != 0.0).count()
    }

    pub fn norm_squared(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum()
    }

    pub fn dot(&self, other: &[f64]) -> f64 {
        self.0.iter().zip(other).map(|(a, b)| a * b).sum()
    }

    /// Rows carrying weight, ignoring round-off residue from projections.
    fn support(&self) -> Vec<bool> {
        let scale = self.0.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let tol = 1e-12 * scale;
        self.0.iter().map(|x| x.abs() > tol).collect()
    }

    fn check_len(&self, q: usize) -> Result<()> {
        if self.0.len() == q {
            Ok(())
        } else {
            Err(Error::LengthMismatch { expected: q, found: self.0.len() })
        }
    }
}

/// Estimated factorial effect with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EffectEstimate {
    pub set: FactorSet,
    pub tau_hat: f64,
    pub se: f64,
}

/// `estimate / se`, with `se = 0` mapped to `±∞` (nonzero estimate) or `0`.
pub fn t_statistic(estimate: f64, se: f64) -> f64 {
    if se > 0.0 {
        estimate / se
    } else if estimate == 0.0 {
        0.0
    } else {
        f64::INFINITY.copysign(estimate)
    }
}

impl EffectEstimate {
    pub fn t_stat(&self) -> f64 {
        t_statistic(self.tau_hat, self.se)
    }
}

/// Symmetric covariance matrix, row-major.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Covariance {
    dim: usize,
    values: Vec<f64>,
}

impl Covariance {
    pub(crate) fn from_fn(dim: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut values = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in i..dim {
                let v = f(i, j);
                values[i * dim + j] = v;
                values[j * dim + i] = v;
            }
        }
        Covariance { dim, values }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.dim + j]
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.values.chunks(self.dim.max(1)).map(<[f64]>::to_vec).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }
}

/// Unsaturated WLS fit of `Y_i ~ g_{i,M}` with weights `1/N_i`.
#[derive(Clone, Debug)]
pub struct WlsFit {
    model: WorkingModel,
    estimates: Vec<EffectEstimate>,
    // Q^{-1} Gᵀ V̂_Ŷ; the covariance of τ̂_A and τ̂_B is entry A△B over Q.
    variance_effects: FactorialEffects,
}

impl WlsFit {
    pub fn model(&self) -> &WorkingModel {
        &self.model
    }

    /// Estimates in model order.
    pub fn estimates(&self) -> &[EffectEstimate] {
        &self.estimates
    }

    pub fn estimate(&self, set: FactorSet) -> Option<&EffectEstimate> {
        self.model.position(set).map(|i| &self.estimates[i])
    }

    pub fn covariance_between(&self, a: FactorSet, b: FactorSet) -> f64 {
        let q = arm_count(self.variance_effects.k()) as f64;
        self.variance_effects.get(a.symmetric_difference(b)) / q
    }

    /// `Σ̂(M) = Q^{-2} G(·,M)ᵀ V̂_Ŷ G(·,M)`.
    pub fn covariance(&self) -> Covariance {
        let sets = self.model.sets();
        Covariance::from_fn(sets.len(), |i, j| self.covariance_between(sets[i], sets[j]))
    }
}

/// `τ̂(M) = Q^{-1} G(·,M)ᵀ Ŷ`; only needs every arm observed once.
pub fn wls_coefficients(arms: &ArmTable, model: &WorkingModel) -> Result<Vec<(FactorSet, f64)>> {
    model.check(arms.k)?;
    arms.require(1, |_| true)?;
    let effects = FactorialEffects::from_arm_values(&arms.means())?;
    Ok(model.iter().map(|s| (s, effects.get(s))).collect())
}

/// WLS effect estimates and the direct covariance estimator `Σ̂(M)`.
pub fn wls_effects(arms: &ArmTable, model: &WorkingModel) -> Result<WlsFit> {
    model.check(arms.k)?;
    arms.require(2, |_| true)?;
    let effects = FactorialEffects::from_arm_values(&arms.means())?;
    let variance_effects = FactorialEffects::from_arm_values(&arms.var_of_means_or_zero())?;
    let q = arms.q() as f64;
    // g_K(z)^2 = 1, so every coefficient shares the same variance.
    let se = (variance_effects.get(FactorSet::EMPTY) / q).max(0.0).sqrt();
    let estimates = model
        .iter()
        .map(|set| EffectEstimate { set, tau_hat: effects.get(set), se })
        .collect();
    Ok(WlsFit { model: model.clone(), estimates, variance_effects })
}

/// EHW covariance with the HC2 correction, in the arm-level form
/// `Q^{-2} G(·,M)ᵀ V̂'_Ŷ G(·,M)`.
pub fn ehw_hc2_covariance(arms: &ArmTable, model: &WorkingModel) -> Result<Covariance> {
    model.check(arms.k)?;
    arms.require(2, |_| true)?;
    let means = arms.means();
    let fitted = FactorialEffects::from_arm_values(&means)?
        .restricted(model)
        .to_arm_values();
    let adjusted: Vec<f64> = arms
        .arms
        .iter()
        .zip(&fitted)
        .map(|(a, fit)| {
            let n = a.n as f64;
            let resid = a.mean - fit;
            let s_prime = a.var.unwrap_or(0.0) + n / (n - 1.0) * resid * resid;
            s_prime / n
        })
        .collect();
    let effects = FactorialEffects::from_arm_values(&adjusted)?;
    let q = arms.q() as f64;
    let sets = model.sets();
    Ok(Covariance::from_fn(sets.len(), |i, j| {
        effects.get(sets[i].symmetric_difference(sets[j])) / q
    }))
}

/// Point estimate, variance estimate and Wald interval for one parameter.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub gamma_hat: f64,
    pub variance: f64,
    pub alpha: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

impl Estimate {
    pub fn wald(gamma_hat: f64, variance: f64, alpha: f64) -> Result<Self> {
        let variance = variance.max(0.0);
        let half = z_critical(alpha)? * variance.sqrt();
        Ok(Estimate {
            gamma_hat,
            variance,
            alpha,
            ci_lo: gamma_hat - half,
            ci_hi: gamma_hat + half,
        })
    }

    pub fn se(&self) -> f64 {
        self.variance.sqrt()
    }

    pub fn ci_width(&self) -> f64 {
        self.ci_hi - self.ci_lo
    }

    pub fn covers(&self, value: f64) -> bool {
        self.ci_lo <= value && value <= self.ci_hi
    }

    /// Whether the level-α Wald test rejects `γ = 0`.
    pub fn rejects_zero(&self) -> Result<bool> {
        Ok(t_statistic(self.gamma_hat, self.se()).abs() > z_critical(self.alpha)?)
    }
}

fn quadratic_form(w: &[f64], diag: &[f64]) -> f64 {
    w.iter().zip(diag).map(|(a, d)| a * a * d).sum()
}

/// Plug-in estimator `γ̂ = fᵀŶ` with `v̂² = Σ f(z)² Ŝ(z,z)/N(z)`.
pub fn plug_in_estimate(f: &WeightVector, arms: &ArmTable, alpha: f64) -> Result<Estimate> {
    f.check_len(arms.q())?;
    let support = f.support();
    arms.require(2, |r| support[r])?;
    let gamma_hat = f.dot(&arms.means());
    let variance = quadratic_form(f.values(), &arms.var_of_means_or_zero());
    Estimate::wald(gamma_hat, variance, alpha)
}

/// `f[M] = Q^{-1} G(·,M) G(·,M)ᵀ f`.
pub fn project_weight(f: &WeightVector, model: &WorkingModel) -> Result<WeightVector> {
    let k = factors_for_len(f.values().len())?;
    model.check(k)?;
    let projected = FactorialEffects::from_arm_values(f.values())?
        .restricted(model)
        .to_arm_values();
    Ok(WeightVector(projected))
}

/// Restricted least squares fit `Ŷ_R = Q^{-1} G(·,M) G(·,M)ᵀ Ŷ`.
pub fn rls_fitted_means(arms: &ArmTable, model: &WorkingModel) -> Result<Vec<f64>> {
    model.check(arms.k)?;
    arms.require(1, |_| true)?;
    Ok(FactorialEffects::from_arm_values(&arms.means())?
        .restricted(model)
        .to_arm_values())
}

/// RLS estimate together with the projected weight it used.
#[derive(Clone, Debug, PartialEq)]
pub struct RlsEstimate {
    pub estimate: Estimate,
    pub projected: WeightVector,
}

/// `γ̂_R = f[M]ᵀŶ`, `v̂_R² = f[M]ᵀ V̂_Ŷ f[M]`.
pub fn rls_estimate(
    f: &WeightVector,
    model: &WorkingModel,
    arms: &ArmTable,
    alpha: f64,
) -> Result<RlsEstimate> {
    f.check_len(arms.q())?;
    let projected = project_weight(f, model)?;
    let support = projected.support();
    arms.require(2, |r| support[r])?;
    let gamma_hat = projected.dot(&arms.means());
    let variance = quadratic_form(projected.values(), &arms.var_of_means_or_zero());
    Ok(RlsEstimate { estimate: Estimate::wald(gamma_hat, variance, alpha)?, projected })
}

/// Joint RLS estimate of `Γ = Fᵀ Ȳ`.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorEstimate {
    pub gamma_hats: Vec<f64>,
    /// `F[M]ᵀ V̂_Ŷ F[M]`.
    pub covariance: Covariance,
    pub projected: Vec<WeightVector>,
}

pub fn rls_vector_estimate(
    weights: &[WeightVector],
    model: &WorkingModel,
    arms: &ArmTable,
) -> Result<VectorEstimate> {
    if weights.is_empty() {
        return Err(Error::InvalidConfig("at least one weight vector is required".into()));
    }
    let projected = weights
        .iter()
        .map(|f| {
            f.check_len(arms.q())?;
            project_weight(f, model)
        })
        .collect::<Result<Vec<_>>>()?;
    let supports: Vec<Vec<bool>> = projected.iter().map(WeightVector::support).collect();
    arms.require(2, |r| supports.iter().any(|s| s[r]))?;
    let means = arms.means();
    let v = arms.var_of_means_or_zero();
    let gamma_hats = projected.iter().map(|p| p.dot(&means)).collect();
    let covariance = Covariance::from_fn(projected.len(), |i, j| {
        projected[i]
            .values()
            .iter()
            .zip(projected[j].values())
            .zip(&v)
            .map(|((a, b), d)| a * b * d)
            .sum()
    });
    Ok(VectorEstimate { gamma_hats, covariance, projected })
}

/// How much a working model can shrink the variance of `γ̂`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EfficiencyDiagnostics {
    /// `‖f[M]‖² / ‖f‖²`.
    pub projected_norm_ratio: f64,
    /// Nonzero entries of `f`.
    pub nonzero_weights: usize,
    pub model_size: usize,
    pub q: usize,
    /// Condition number of the diagonal `V̂_Ŷ`.
    pub condition_number: f64,
    /// `κ(V̂_Ŷ) s* |M| / Q`.
    pub bound: f64,
    /// `v̂_R² / v̂²` on the data at hand.
    pub variance_ratio: f64,
}

pub fn efficiency_bound(
    f: &WeightVector,
    model: &WorkingModel,
    arms: &ArmTable,
) -> Result<EfficiencyDiagnostics> {
    f.check_len(arms.q())?;
    arms.require(2, |_| true)?;
    let projected = project_weight(f, model)?;
    let v = arms.var_of_means_or_zero();
    let (lo, hi) = v
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    let condition_number = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    let s_star = f.nonzero_count();
    let q = arms.q();
    let plug = quadratic_form(f.values(), &v);
    let rls = quadratic_form(projected.values(), &v);
    Ok(EfficiencyDiagnostics {
        projected_norm_ratio: projected.norm_squared() / f.norm_squared(),
        nonzero_weights: s_star,
        model_size: model.len(),
        q,
        condition_number,
        bound: condition_number * (s_star * model.len()) as f64 / q as f64,
        variance_ratio: if plug > 0.0 { rls / plug } else { f64::NAN },
    })
}
