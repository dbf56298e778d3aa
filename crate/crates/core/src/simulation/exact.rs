use serde::Serialize;

use crate::design::{FactorSet, FactorialEffects, WorkingModel};
use crate::error::{Error, Result};
use crate::estimation::Covariance;

use super::science::{DesignSpec, ScienceTable};

/// Largest number of assignments [`enumerate_assignments`] will visit.
pub const ENUMERATION_LIMIT: f64 = 1e6;

/// Exact randomization moments over every distinct assignment.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExactMoments {
    pub assignments: usize,
    /// `E[Ŷ]`.
    pub mean_yhat: Vec<f64>,
    /// `Cov(Ŷ)`.
    pub cov_yhat: Covariance,
    /// `E[V̂_Ŷ]` diagonal; absent when some arm has fewer than two units.
    pub mean_vhat: Option<Vec<f64>>,
    /// `E[τ̂(M)]` for each requested model, in model order.
    pub mean_tau: Vec<Vec<(FactorSet, f64)>>,
}

/// Calls `visit` with the arm row of every unit, once per distinct assignment.
fn for_each_assignment(counts: &[usize], mut visit: impl FnMut(&[usize])) {
    let n: usize = counts.iter().sum();
    let mut remaining = counts.to_vec();
    let mut rows = vec![0usize; n];
    // Depth-first over units; `next[i]` is the next arm to try for unit i.
    let mut next = vec![0usize; n + 1];
    let mut i = 0usize;
    loop {
        if i == n {
            visit(&rows);
            if n == 0 {
                return;
            }
            i -= 1;
            remaining[rows[i]] += 1;
            continue;
        }
        let start = next[i];
        match (start..counts.len()).find(|&r| remaining[r] > 0) {
            Some(r) => {
                rows[i] = r;
                remaining[r] -= 1;
                next[i] = r + 1;
                i += 1;
                next[i] = 0;
            }
            None => {
                if i == 0 {
                    return;
                }
                i -= 1;
                remaining[rows[i]] += 1;
            }
        }
    }
}

struct Draw {
    yhat: Vec<f64>,
    vhat: Option<Vec<f64>>,
}

fn draw(science: &ScienceTable, counts: &[usize], rows: &[usize]) -> Draw {
    let q = counts.len();
    let mut sum = vec![0.0; q];
    for (i, &r) in rows.iter().enumerate() {
        sum[r] += science.get(i, r);
    }
    let yhat: Vec<f64> = sum.iter().zip(counts).map(|(s, &c)| s / c as f64).collect();
    let vhat = counts.iter().all(|&c| c >= 2).then(|| {
        let mut ss = vec![0.0; q];
        for (i, &r) in rows.iter().enumerate() {
            let d = science.get(i, r) - yhat[r];
            ss[r] += d * d;
        }
        ss.iter().zip(counts).map(|(s, &c)| s / ((c - 1) * c) as f64).collect()
    });
    Draw { yhat, vhat }
}

/// Exact `E[Ŷ]`, `Cov(Ŷ)`, `E[V̂_Ŷ]` and `E[τ̂(M)]` under complete
/// randomization, by visiting every assignment. Two passes keep the
/// covariance free of cancellation error.
pub fn enumerate_assignments(
    science: &ScienceTable,
    design: &DesignSpec,
    models: &[WorkingModel],
) -> Result<ExactMoments> {
    if design.counts.len() != science.q() || design.total() != science.n() {
        return Err(Error::LengthMismatch { expected: science.n(), found: design.total() });
    }
    if design.counts.contains(&0) {
        return Err(Error::InvalidConfig("every arm needs at least one unit".into()));
    }
    let count = design.assignment_count();
    if count > ENUMERATION_LIMIT {
        return Err(Error::InstanceTooLarge { count, limit: ENUMERATION_LIMIT });
    }
    for m in models {
        m.check(science.k())?;
    }
    let q = science.q();
    let counts = &design.counts;

    let mut visited = 0usize;
    let mut sum_y = vec![0.0; q];
    let mut sum_v = vec![0.0; q];
    let mut has_v = true;
    for_each_assignment(counts, |rows| {
        let d = draw(science, counts, rows);
        visited += 1;
        sum_y.iter_mut().zip(&d.yhat).for_each(|(s, y)| *s += y);
        match d.vhat {
            Some(v) => sum_v.iter_mut().zip(&v).for_each(|(s, x)| *s += x),
            None => has_v = false,
        }
    });
    let total = visited as f64;
    let mean_yhat: Vec<f64> = sum_y.iter().map(|s| s / total).collect();

    let mut cross = vec![0.0; q * q];
    for_each_assignment(counts, |rows| {
        let d = draw(science, counts, rows);
        let dev: Vec<f64> = d.yhat.iter().zip(&mean_yhat).map(|(y, m)| y - m).collect();
        for a in 0..q {
            for b in a..q {
                cross[a * q + b] += dev[a] * dev[b];
            }
        }
    });
    let cov_yhat = Covariance::from_fn(q, |a, b| cross[a * q + b] / total);

    // τ̂(M) is linear in Ŷ, so its mean is the transform of E[Ŷ].
    let effects = FactorialEffects::from_arm_values(&mean_yhat)?;
    let mean_tau = models
        .iter()
        .map(|m| m.iter().map(|s| (s, effects.get(s))).collect())
        .collect();

    Ok(ExactMoments {
        assignments: visited,
        mean_yhat,
        cov_yhat,
        mean_vhat: has_v.then(|| sum_v.iter().map(|s| s / total).collect()),
        mean_tau,
    })
}
