use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::design::{arm_count, check_factor_count, FactorSet, FactorialEffects, TreatmentLevel};
use crate::error::{Error, Result};
use crate::estimation::{Covariance, FactorialDataset, Unit, WeightVector};

/// `μ = G τ` for the listed effects, zero elsewhere.
pub fn mu_from_effects(effects: &[(FactorSet, f64)], k: u32) -> Result<Vec<f64>> {
    check_factor_count(k)?;
    let mut tau = FactorialEffects::from_fn(k, |_| 0.0)?;
    for &(set, value) in effects {
        set.check(k)?;
        tau.set(set, tau.get(set) + value);
    }
    Ok(tau.to_arm_values())
}

/// Noise structure of generated potential outcomes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dgp {
    /// `Y_i(z) = ε_i(z) + μ(z)` with independent `ε ~ Exp(1) - 1`.
    #[default]
    ShiftedExponential,
    /// `Y_i(z) = ε_i + μ(z)`: one `Exp(1) - 1` draw per unit shared by all arms.
    SharpNull,
    /// `Y_i(z) = μ(z)`.
    Constant,
}

/// `N x Q` matrix of potential outcomes, unit-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ScienceTable {
    k: u32,
    n: usize,
    values: Vec<f64>,
}

impl ScienceTable {
    pub fn new(k: u32, n: usize, values: Vec<f64>) -> Result<Self> {
        check_factor_count(k)?;
        let q = arm_count(k);
        if values.len() != n * q {
            return Err(Error::LengthMismatch { expected: n * q, found: values.len() });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteOutcome { unit: i / q, value: values[i] });
        }
        Ok(ScienceTable { k, n, values })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn q(&self) -> usize {
        arm_count(self.k)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `Y_i(z)` for the arm at row `r`.
    pub fn get(&self, unit: usize, row: usize) -> f64 {
        self.values[unit * self.q() + row]
    }

    pub fn unit(&self, i: usize) -> &[f64] {
        let q = self.q();
        &self.values[i * q..(i + 1) * q]
    }

    /// `Ȳ`, row-indexed.
    pub fn column_means(&self) -> Vec<f64> {
        let q = self.q();
        let mut sums = vec![0.0; q];
        for i in 0..self.n {
            for (s, y) in sums.iter_mut().zip(self.unit(i)) {
                *s += y;
            }
        }
        sums.iter().map(|s| s / self.n as f64).collect()
    }

    /// Finite-population covariance `S` with divisor `N - 1`.
    pub fn covariance(&self) -> Covariance {
        let means = self.column_means();
        let denom = (self.n.max(2) - 1) as f64;
        Covariance::from_fn(self.q(), |a, b| {
            (0..self.n)
                .map(|i| (self.get(i, a) - means[a]) * (self.get(i, b) - means[b]))
                .sum::<f64>()
                / denom
        })
    }

    /// Diagonal of `D_Ŷ = diag{S(z,z) / N(z)}`.
    pub fn d_yhat(&self, design: &DesignSpec) -> Result<Vec<f64>> {
        design.check(self)?;
        let s = self.covariance();
        Ok((0..self.q()).map(|r| s.get(r, r) / design.counts[r] as f64).collect())
    }

    /// True factorial effects `Q^{-1} Gᵀ Ȳ`.
    pub fn effects(&self) -> FactorialEffects {
        FactorialEffects::from_arm_values(&self.column_means()).expect("Q is a valid arm count")
    }

    /// `γ = fᵀ Ȳ`.
    pub fn gamma(&self, f: &WeightVector) -> Result<f64> {
        if f.values().len() != self.q() {
            return Err(Error::LengthMismatch { expected: self.q(), found: f.values().len() });
        }
        Ok(f.dot(&self.column_means()))
    }
}

/// `Exp(1) - 1` draws.
pub(crate) fn shifted_exp<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let e: f64 = rng.sample(Exp1);
    e - 1.0
}

/// Draws an `N x Q` science table around the arm means `mu`. When `centered`,
/// noise is demeaned so that `Ȳ = μ` exactly.
pub fn gen_science_table<R: Rng + ?Sized>(
    mu: &[f64],
    n: usize,
    dgp: Dgp,
    centered: bool,
    rng: &mut R,
) -> Result<ScienceTable> {
    let k = crate::design::factors_for_len(mu.len())?;
    let q = mu.len();
    let mut values = vec![0.0; n * q];
    match dgp {
        Dgp::Constant => {
            for row in values.chunks_mut(q) {
                row.copy_from_slice(mu);
            }
        }
        Dgp::ShiftedExponential => {
            for v in values.iter_mut() {
                *v = shifted_exp(rng);
            }
            if centered && n > 0 {
                for r in 0..q {
                    let mean = (0..n).map(|i| values[i * q + r]).sum::<f64>() / n as f64;
                    for i in 0..n {
                        values[i * q + r] -= mean;
                    }
                }
            }
            for row in values.chunks_mut(q) {
                for (v, m) in row.iter_mut().zip(mu) {
                    *v += m;
                }
            }
        }
        Dgp::SharpNull => {
            let mut eps: Vec<f64> = (0..n).map(|_| shifted_exp(rng)).collect();
            if centered && n > 0 {
                let mean = eps.iter().sum::<f64>() / n as f64;
                eps.iter_mut().for_each(|e| *e -= mean);
            }
            for (row, e) in values.chunks_mut(q).zip(&eps) {
                for (v, m) in row.iter_mut().zip(mu) {
                    *v = e + m;
                }
            }
        }
    }
    ScienceTable::new(k, n, values)
}

/// Arm sizes `N(z)` for complete randomization, row-indexed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignSpec {
    pub counts: Vec<usize>,
}

impl DesignSpec {
    pub fn new(counts: Vec<usize>) -> Result<Self> {
        crate::design::factors_for_len(counts.len())?;
        Ok(DesignSpec { counts })
    }

    /// `n0` units in each of the `2^K` arms.
    pub fn uniform(k: u32, n0: usize) -> Result<Self> {
        check_factor_count(k)?;
        Ok(DesignSpec { counts: vec![n0; arm_count(k)] })
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn k(&self) -> u32 {
        self.counts.len().trailing_zeros()
    }

    /// Number of distinct assignments `N! / Π N(z)!`.
    pub fn assignment_count(&self) -> f64 {
        let ln_fact = |n: usize| (1..=n).map(|i| (i as f64).ln()).sum::<f64>();
        let ln = ln_fact(self.total()) - self.counts.iter().map(|&c| ln_fact(c)).sum::<f64>();
        ln.exp().round()
    }

    fn check(&self, science: &ScienceTable) -> Result<()> {
        if self.counts.len() != science.q() {
            return Err(Error::LengthMismatch { expected: science.q(), found: self.counts.len() });
        }
        if self.total() != science.n() {
            return Err(Error::LengthMismatch { expected: science.n(), found: self.total() });
        }
        Ok(())
    }
}

/// A uniformly random permutation of the multiset of arm labels.
pub fn assign<R: Rng + ?Sized>(design: &DesignSpec, rng: &mut R) -> Result<Vec<TreatmentLevel>> {
    let k = crate::design::factors_for_len(design.counts.len())?;
    let mut z: Vec<TreatmentLevel> = design
        .counts
        .iter()
        .enumerate()
        .flat_map(|(r, &c)| std::iter::repeat(TreatmentLevel::from_row(r, k)).take(c))
        .collect();
    z.shuffle(rng);
    Ok(z)
}

/// Observed data `Y_i = Y_i(Z_i)`.
pub fn reveal(science: &ScienceTable, assignment: &[TreatmentLevel]) -> Result<FactorialDataset> {
    if assignment.len() != science.n() {
        return Err(Error::LengthMismatch { expected: science.n(), found: assignment.len() });
    }
    let units = assignment.iter().enumerate().map(|(i, &z)| {
        debug_assert_eq!(z.k(), science.k());
        Unit { z, y: science.get(i, z.row()) }
    });
    FactorialDataset::from_units(science.k(), units)
}
