//! Target parameters `γ = fᵀȲ` named by arm, contrast, explicit weights, or
//! the best-arm rule.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::best_arm::{BestArmConfig, Candidates, Eta};
use crate::design::{FactorSet, TreatmentLevel};
use crate::error::{Error, Result};
use crate::estimation::WeightVector;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum TargetSpec {
    /// Mean of one arm, `e(z)`.
    Arm(TreatmentLevel),
    /// Contrast column `g_K`.
    Contrast(FactorSet),
    /// Explicit row-indexed weights.
    Custom(Vec<f64>),
    /// Best of the arms with at most `k0` high factors (all arms by default).
    BestArm {
        #[serde(default)]
        k0: Option<u32>,
        #[serde(default)]
        eta: Eta,
    },
}

impl TargetSpec {
    pub fn is_best_arm(&self) -> bool {
        matches!(self, TargetSpec::BestArm { .. })
    }

    /// Checks that the target fits a `K`-factor design.
    pub fn validate(&self, k: u32) -> Result<()> {
        match self {
            TargetSpec::BestArm { k0, eta } => {
                if k0.is_some_and(|k0| k0 > k) {
                    return Err(Error::InvalidConfig(format!("target {self}: k0 exceeds K = {k}")));
                }
                if let Eta::Fixed(v) = eta {
                    if v.is_nan() || *v < 0.0 {
                        return Err(Error::InvalidConfig(format!("target {self}: eta must be non-negative")));
                    }
                }
                Ok(())
            }
            _ => self.weights(k).map(|_| ()),
        }
    }

    /// The weight vector `f`; best-arm targets have none.
    pub fn weights(&self, k: u32) -> Result<WeightVector> {
        let context = |e: Error| Error::InvalidConfig(format!("target {self}: {e}"));
        match self {
            TargetSpec::Arm(z) if z.k() == k => Ok(WeightVector::arm(*z)),
            TargetSpec::Arm(z) => Err(context(Error::InvalidTreatment(format!("{z} has {} factors", z.k())))),
            TargetSpec::Contrast(set) => WeightVector::contrast(*set, k).map_err(context),
            TargetSpec::Custom(values) => {
                if values.len() != 1 << k {
                    return Err(context(Error::LengthMismatch { expected: 1 << k, found: values.len() }));
                }
                if values.iter().any(|v| !v.is_finite()) || values.iter().all(|&v| v == 0.0) {
                    return Err(context(Error::InvalidConfig("weights must be finite and not all zero".into())));
                }
                WeightVector::from_values(values.clone()).map_err(context)
            }
            TargetSpec::BestArm { .. } => Err(Error::InvalidConfig(format!("target {self} has no single weight vector"))),
        }
    }

    pub fn best_arm_config(&self, k: u32, alpha_ci: f64) -> Option<BestArmConfig> {
        match self {
            TargetSpec::BestArm { k0, eta } => Some(BestArmConfig {
                candidates: Candidates::Constrained { k0: k0.unwrap_or(k) },
                eta: *eta,
                alpha_ci,
            }),
            _ => None,
        }
    }
}

impl fmt::Display for TargetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TargetSpec::Arm(z) => write!(f, "arm:{z}"),
            TargetSpec::Contrast(set) => {
                let factors: Vec<String> = set.factors().map(|x| x.to_string()).collect();
                write!(f, "contrast:{}", factors.join(","))
            }
            TargetSpec::Custom(values) => {
                let vs: Vec<String> = values.iter().map(|x| x.to_string()).collect();
                write!(f, "custom:{}", vs.join(","))
            }
            TargetSpec::BestArm { k0, eta } => {
                f.write_str("best_arm")?;
                match (k0, eta) {
                    (None, Eta::Auto) => Ok(()),
                    (Some(k0), Eta::Auto) => write!(f, ":{k0}"),
                    (None, Eta::Fixed(e)) => write!(f, ":all:{e}"),
                    (Some(k0), Eta::Fixed(e)) => write!(f, ":{k0}:{e}"),
                }
            }
        }
    }
}

impl FromStr for TargetSpec {
    type Err = Error;

    /// Accepts `arm:101`, `contrast:1,2`, `contrast:` (intercept),
    /// `custom:w1,...,wQ` and `best_arm[:k0|all[:eta]]`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::InvalidConfig(format!("invalid target {s:?}: {why}"));
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        match kind {
            "arm" => rest.parse().map(TargetSpec::Arm).map_err(|_| bad("expected a 0/1 string")),
            "contrast" => {
                let factors = rest
                    .split(',')
                    .filter(|t| !t.trim().is_empty())
                    .map(|t| t.trim().parse::<u32>().map_err(|_| bad("expected factor indices")))
                    .collect::<Result<Vec<_>>>()?;
                let set = FactorSet::from_factors(factors.iter().copied())?;
                if set.level() as usize != factors.len() {
                    return Err(bad("repeated factor index"));
                }
                Ok(TargetSpec::Contrast(set))
            }
            "custom" => rest
                .split(',')
                .map(|t| t.trim().parse::<f64>().map_err(|_| bad("expected numbers")))
                .collect::<Result<Vec<_>>>()
                .map(TargetSpec::Custom),
            "best_arm" => {
                let mut parts = rest.split(':').filter(|p| !p.is_empty());
                let k0 = match parts.next() {
                    None | Some("all") => None,
                    Some(p) => Some(p.parse().map_err(|_| bad("expected k0"))?),
                };
                let eta = match parts.next() {
                    None | Some("auto") => Eta::Auto,
                    Some(p) => Eta::Fixed(p.parse().map_err(|_| bad("expected eta"))?),
                };
                if parts.next().is_some() {
                    return Err(bad("too many fields"));
                }
                Ok(TargetSpec::BestArm { k0, eta })
            }
            _ => Err(bad("unknown kind")),
        }
    }
}
