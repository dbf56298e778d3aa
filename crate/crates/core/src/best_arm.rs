//! Inference on the best of several weighted parameters by averaging over the
//! set of near-ties, which tempers the winner's-curse bias of the maximum.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::design::{arm_count, check_factor_count, TreatmentLevel, WorkingModel};
use crate::error::{Error, Result};
use crate::estimation::{rls_vector_estimate, ArmTable, Estimate, WeightVector, DEFAULT_ALPHA};
use crate::normal::normal_quantile;

/// Arms with at most `k0` factors at the high level, in row order.
pub fn canonical_arms(k: u32, k0: u32) -> Vec<TreatmentLevel> {
    (0..arm_count(k))
        .map(|r| TreatmentLevel::from_row(r, k))
        .filter(|z| z.high_count() <= k0)
        .collect()
}

/// Basis vectors `e(z)` for every arm with at most `k0` high factors.
pub fn canonical_weights(k: u32, k0: u32) -> Result<Vec<WeightVector>> {
    check_factor_count(k)?;
    if k0 > k {
        return Err(Error::InvalidConfig(format!("constraint {k0} exceeds K = {k}")));
    }
    Ok(canonical_arms(k, k0).into_iter().map(WeightVector::arm).collect())
}

/// Indices (0-based) within `eta` of the maximum, boundary inclusive.
pub fn tie_set(gamma_hats: &[f64], eta: f64) -> Vec<usize> {
    let max = gamma_hats.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    gamma_hats
        .iter()
        .enumerate()
        .filter(|(_, &g)| max - g <= eta)
        .map(|(i, _)| i)
        .collect()
}

/// `η = 2 Φ^{-1}(1 - 0.05/(2L)) max_l se_l`.
pub fn default_eta(ses: &[f64]) -> Result<f64> {
    if ses.is_empty() {
        return Err(Error::InvalidConfig("at least one standard error is required".into()));
    }
    let max_se = ses.iter().copied().fold(0.0, f64::max);
    if max_se == 0.0 {
        return Ok(0.0);
    }
    Ok(2.0 * normal_quantile(1.0 - 0.05 / (2.0 * ses.len() as f64))? * max_se)
}

/// Tie threshold: derived from the standard errors, or fixed.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub enum Eta {
    #[default]
    Auto,
    Fixed(f64),
}

impl Serialize for Eta {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Eta::Auto => serializer.serialize_str("auto"),
            Eta::Fixed(v) => serializer.serialize_f64(*v),
        }
    }
}

impl<'de> Deserialize<'de> for Eta {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Number(v) => Ok(Eta::Fixed(v)),
            Raw::Text(s) if s == "auto" => Ok(Eta::Auto),
            Raw::Text(s) => s
                .parse()
                .map(Eta::Fixed)
                .map_err(|_| serde::de::Error::custom(format!("invalid eta {s:?}"))),
        }
    }
}

/// The candidate parameters to compare.
#[derive(Clone, Debug, PartialEq)]
pub enum Candidates {
    /// Arm means `e(z)` for arms with at most `k0` high factors.
    Constrained { k0: u32 },
    Weights { weights: Vec<WeightVector>, labels: Vec<String> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct BestArmConfig {
    pub candidates: Candidates,
    pub eta: Eta,
    pub alpha_ci: f64,
}

impl BestArmConfig {
    pub fn constrained(k0: u32) -> Self {
        BestArmConfig { candidates: Candidates::Constrained { k0 }, eta: Eta::Auto, alpha_ci: DEFAULT_ALPHA }
    }

    fn resolve(&self, k: u32) -> Result<(Vec<WeightVector>, Vec<String>)> {
        match &self.candidates {
            Candidates::Constrained { k0 } => {
                let weights = canonical_weights(k, *k0)?;
                let labels = canonical_arms(k, *k0).iter().map(ToString::to_string).collect();
                Ok((weights, labels))
            }
            Candidates::Weights { weights, labels } => {
                if weights.is_empty() {
                    return Err(Error::InvalidConfig("no candidate weight vectors".into()));
                }
                let labels = if labels.len() == weights.len() {
                    labels.clone()
                } else {
                    (1..=weights.len()).map(|l| format!("f{l}")).collect()
                };
                Ok((weights.clone(), labels))
            }
        }
    }
}

/// Outcome of tie-averaged best-parameter inference.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TieReport {
    pub labels: Vec<String>,
    /// RLS estimates `f_l[M]ᵀŶ`.
    pub gamma_hats: Vec<f64>,
    pub ses: Vec<f64>,
    /// Candidate indices by decreasing estimate.
    pub order: Vec<usize>,
    pub eta: f64,
    pub tie: Vec<usize>,
    pub tie_labels: Vec<String>,
    /// Tie-averaged estimate of the best value with its Wald interval.
    pub estimate: Estimate,
    pub model_size: usize,
}

pub fn best_arm_estimate(arms: &ArmTable, model: &WorkingModel, config: &BestArmConfig) -> Result<TieReport> {
    let (weights, labels) = config.resolve(arms.k())?;
    let joint = rls_vector_estimate(&weights, model, arms)?;
    let ses: Vec<f64> = joint.covariance.diagonal().iter().map(|v| v.max(0.0).sqrt()).collect();
    let eta = match config.eta {
        Eta::Auto => default_eta(&ses)?,
        Eta::Fixed(v) if v >= 0.0 => v,
        Eta::Fixed(v) => return Err(Error::InvalidConfig(format!("eta {v} must be non-negative"))),
    };
    let gamma_hats = joint.gamma_hats;
    let tie = tie_set(&gamma_hats, eta);
    let n = tie.len() as f64;
    let y_best = tie.iter().map(|&l| gamma_hats[l]).sum::<f64>() / n;
    let variance = tie
        .iter()
        .flat_map(|&i| tie.iter().map(move |&j| (i, j)))
        .map(|(i, j)| joint.covariance.get(i, j))
        .sum::<f64>()
        / (n * n);
    let mut order: Vec<usize> = (0..gamma_hats.len()).collect();
    order.sort_by(|&a, &b| gamma_hats[b].total_cmp(&gamma_hats[a]).then(a.cmp(&b)));
    Ok(TieReport {
        tie_labels: tie.iter().map(|&l| labels[l].clone()).collect(),
        labels,
        estimate: Estimate::wald(y_best, variance, config.alpha_ci)?,
        gamma_hats,
        ses,
        order,
        eta,
        tie,
        model_size: model.len(),
    })
}
