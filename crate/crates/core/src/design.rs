//! Bit-level representation of 2^K factorial designs.
//!
//! A [`FactorSet`] names one factorial effect (bit `k-1` set iff factor `k`
//! participates) and a [`TreatmentLevel`] names one arm (bit `k-1` set iff
//! `z_k = 1`). Arm-indexed vectors are laid out by the lexicographic row index
//! `r(z) = sum_k z_k 2^(K-k)`, i.e. `z_1` is the most significant digit, so the
//! 2^3 design lists arms as `000, 001, 010, ..., 111`.
//!
//! Effects are listed in canonical order: by level, then by mask. For K = 3
//! that is `∅, {1}, {2}, {3}, {1,2}, {1,3}, {2,3}, {1,2,3}`.
//!
//! Internally the effect transform works on "codes": the bit-reversed mask of
//! a set, which lines up with the row index of arms so that a plain Hadamard
//! butterfly over row-indexed data lands effect `K` at `code(K)`.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest supported number of factors.
pub const MAX_FACTORS: u32 = 20;

/// Largest K for which [`ContrastMatrix::to_dense`] materializes the matrix.
pub const MAX_DENSE_FACTORS: u32 = 12;

pub(crate) fn check_factor_count(k: u32) -> Result<()> {
    if (1..=MAX_FACTORS).contains(&k) {
        Ok(())
    } else {
        Err(Error::FactorCount { k, max: MAX_FACTORS })
    }
}

/// Number of arms `Q = 2^K`.
pub fn arm_count(k: u32) -> usize {
    1usize << k
}

/// Infers K from an arm-indexed vector length.
pub(crate) fn factors_for_len(len: usize) -> Result<u32> {
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::LengthMismatch {
            expected: len.next_power_of_two().max(2),
            found: len,
        });
    }
    let k = len.trailing_zeros();
    check_factor_count(k)?;
    Ok(k)
}

#[inline]
fn reverse_low_bits(bits: u32, k: u32) -> usize {
    debug_assert!((1..=32).contains(&k));
    (bits.reverse_bits() >> (32 - k)) as usize
}

/// A subset of factors indexing one factorial effect. The empty set is the
/// intercept.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct FactorSet(u32);

impl FactorSet {
    pub const EMPTY: FactorSet = FactorSet(0);

    pub const fn from_mask(mask: u32) -> Self {
        FactorSet(mask)
    }

    /// Builds a set from 1-based factor indices.
    pub fn from_factors<I: IntoIterator<Item = u32>>(factors: I) -> Result<Self> {
        let mut mask = 0u32;
        for f in factors {
            if f == 0 || f > MAX_FACTORS {
                return Err(Error::FactorIndex {
                    index: f,
                    k: MAX_FACTORS,
                });
            }
            mask |= 1 << (f - 1);
        }
        Ok(FactorSet(mask))
    }

    pub fn singleton(factor: u32) -> Self {
        debug_assert!((1..=MAX_FACTORS).contains(&factor));
        FactorSet(1 << (factor - 1))
    }

    pub const fn mask(self) -> u32 {
        self.0
    }

    /// Interaction order `|K|`.
    pub const fn level(self) -> u32 {
        self.0.count_ones()
    }

    pub const fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, factor: u32) -> bool {
        (1..=32).contains(&factor) && self.0 & (1 << (factor - 1)) != 0
    }

    /// Factor indices in ascending order, 1-based.
    pub fn factors(self) -> impl Iterator<Item = u32> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let bit = rest.trailing_zeros();
                rest &= rest - 1;
                Some(bit + 1)
            }
        })
    }

    pub fn is_subset_of(self, other: FactorSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: FactorSet) -> FactorSet {
        FactorSet(self.0 | other.0)
    }

    /// Symmetric difference; `g_A(z) g_B(z) = g_{A△B}(z)`.
    pub fn symmetric_difference(self, other: FactorSet) -> FactorSet {
        FactorSet(self.0 ^ other.0)
    }

    /// All subsets with one factor removed.
    pub fn parents(self) -> impl Iterator<Item = FactorSet> {
        let mask = self.0;
        self.factors().map(move |f| FactorSet(mask & !(1 << (f - 1))))
    }

    /// Whether every factor index is at most `k`.
    pub fn fits(self, k: u32) -> bool {
        k >= 32 || self.0 >> k == 0
    }

    pub(crate) fn check(self, k: u32) -> Result<()> {
        if self.fits(k) {
            Ok(())
        } else {
            Err(Error::FactorIndex {
                index: 32 - self.0.leading_zeros(),
                k,
            })
        }
    }

    #[inline]
    pub(crate) fn code(self, k: u32) -> usize {
        reverse_low_bits(self.0, k)
    }

    #[inline]
    pub(crate) fn from_code(code: usize, k: u32) -> Self {
        FactorSet(reverse_low_bits(code as u32, k) as u32)
    }
}

impl Ord for FactorSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.level()
            .cmp(&other.level())
            .then(self.0.cmp(&other.0))
    }
}

impl PartialOrd for FactorSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for FactorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for FactorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, factor) in self.factors().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{factor}")?;
        }
        f.write_str("}")
    }
}

impl Serialize for FactorSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.factors())
    }
}

impl<'de> Deserialize<'de> for FactorSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let factors = Vec::<u32>::deserialize(deserializer)?;
        let set = FactorSet::from_factors(factors.iter().copied()).map_err(serde::de::Error::custom)?;
        if set.level() as usize != factors.len() {
            return Err(serde::de::Error::custom(format!(
                "repeated factor index in {factors:?}"
            )));
        }
        Ok(set)
    }
}

/// One treatment combination `z ∈ {0,1}^K`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct TreatmentLevel {
    bits: u32,
    k: u8,
}

impl TreatmentLevel {
    pub fn new(bits: u32, k: u32) -> Result<Self> {
        check_factor_count(k)?;
        if bits >> k != 0 {
            return Err(Error::InvalidTreatment(format!("bits {bits:#b} exceed K = {k}")));
        }
        Ok(TreatmentLevel { bits, k: k as u8 })
    }

    /// The arm at lexicographic row `row`.
    pub fn from_row(row: usize, k: u32) -> Self {
        debug_assert!(row < arm_count(k));
        TreatmentLevel {
            bits: reverse_low_bits(row as u32, k) as u32,
            k: k as u8,
        }
    }

    /// The arm with every factor at its high level.
    pub fn all_high(k: u32) -> Self {
        TreatmentLevel {
            bits: (arm_count(k) - 1) as u32,
            k: k as u8,
        }
    }

    pub fn bits(self) -> u32 {
        self.bits
    }

    pub fn k(self) -> u32 {
        self.k as u32
    }

    /// Lexicographic row index `r(z)`.
    #[inline]
    pub fn row(self) -> usize {
        reverse_low_bits(self.bits, self.k as u32)
    }

    /// Level of factor `factor` (1-based).
    pub fn get(self, factor: u32) -> bool {
        self.bits & (1 << (factor - 1)) != 0
    }

    /// Number of factors at the high level.
    pub fn high_count(self) -> u32 {
        self.bits.count_ones()
    }
}

impl fmt::Display for TreatmentLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for factor in 1..=self.k() {
            f.write_str(if self.get(factor) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for TreatmentLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "z({self})")
    }
}

impl FromStr for TreatmentLevel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let k = s.len() as u32;
        if check_factor_count(k).is_err() {
            return Err(Error::InvalidTreatment(s.to_string()));
        }
        let mut bits = 0u32;
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => bits |= 1 << i,
                _ => return Err(Error::InvalidTreatment(s.to_string())),
            }
        }
        TreatmentLevel::new(bits, k)
    }
}

impl Serialize for TreatmentLevel {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for TreatmentLevel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `g_K(z) = prod_{k in K} (2 z_k - 1)`, evaluated by parity.
#[inline]
pub fn contrast_value(set: FactorSet, z: TreatmentLevel) -> i8 {
    if (set.level() + (set.mask() & z.bits).count_ones()) % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Every subset of `[K]` in canonical (level, mask) order.
pub fn canonical_sets(k: u32) -> Vec<FactorSet> {
    let mut out = Vec::with_capacity(arm_count(k));
    for level in 0..=k {
        out.extend(sets_of_level(k, level));
    }
    out
}

/// Subsets of `[K]` with exactly `level` factors, ascending by mask.
pub fn sets_of_level(k: u32, level: u32) -> impl Iterator<Item = FactorSet> {
    let limit: u64 = 1u64 << k;
    let mut next: Option<u64> = if level > k {
        None
    } else {
        Some((1u64 << level) - 1)
    };
    std::iter::from_fn(move || {
        let cur = next?;
        if cur >= limit {
            next = None;
            return None;
        }
        // Gosper's hack: next larger integer with the same popcount.
        next = if cur == 0 {
            None
        } else {
            let c = cur & cur.wrapping_neg();
            let r = cur + c;
            Some((((r ^ cur) >> 2) / c) | r)
        };
        Some(FactorSet(cur as u32))
    })
}

/// An ordered collection of factor sets defining an unsaturated regression.
/// Always contains the intercept, first.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct WorkingModel {
    sets: Vec<FactorSet>,
}

impl Default for WorkingModel {
    fn default() -> Self {
        Self::intercept_only()
    }
}

impl WorkingModel {
    pub fn intercept_only() -> Self {
        WorkingModel {
            sets: vec![FactorSet::EMPTY],
        }
    }

    /// The saturated model over all `2^K` effects.
    pub fn full(k: u32) -> Self {
        WorkingModel {
            sets: canonical_sets(k),
        }
    }

    /// Builds a model from arbitrary sets; the intercept is added if absent.
    /// Repeating a set is an error.
    pub fn from_sets<I: IntoIterator<Item = FactorSet>>(sets: I) -> Result<Self> {
        let mut sets: Vec<FactorSet> = sets.into_iter().collect();
        sets.sort_unstable();
        for pair in sets.windows(2) {
            if pair[0] == pair[1] {
                return Err(Error::DuplicateSet(pair[0].to_string()));
            }
        }
        if sets.first() != Some(&FactorSet::EMPTY) {
            sets.insert(0, FactorSet::EMPTY);
        }
        Ok(WorkingModel { sets })
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn sets(&self) -> &[FactorSet] {
        &self.sets
    }

    pub fn iter(&self) -> impl Iterator<Item = FactorSet> + '_ {
        self.sets.iter().copied()
    }

    pub fn contains(&self, set: FactorSet) -> bool {
        self.sets.binary_search(&set).is_ok()
    }

    pub fn position(&self, set: FactorSet) -> Option<usize> {
        self.sets.binary_search(&set).ok()
    }

    /// Inserts `set`, returning false if it was already present.
    pub fn insert(&mut self, set: FactorSet) -> bool {
        match self.sets.binary_search(&set) {
            Ok(_) => false,
            Err(pos) => {
                self.sets.insert(pos, set);
                true
            }
        }
    }

    pub fn extend<I: IntoIterator<Item = FactorSet>>(&mut self, sets: I) {
        for set in sets {
            self.insert(set);
        }
    }

    /// Members of level `d`, contiguous thanks to the canonical order.
    pub fn level_slice(&self, d: u32) -> &[FactorSet] {
        let start = self.sets.partition_point(|s| s.level() < d);
        let end = self.sets.partition_point(|s| s.level() <= d);
        &self.sets[start..end]
    }

    pub fn max_level(&self) -> u32 {
        self.sets.last().map_or(0, |s| s.level())
    }

    pub fn check(&self, k: u32) -> Result<()> {
        self.sets.iter().try_for_each(|s| s.check(k))
    }
}

impl fmt::Debug for WorkingModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.sets.iter()).finish()
    }
}

impl fmt::Display for WorkingModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, s) in self.sets.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{s}")?;
        }
        f.write_str("]")
    }
}

impl Serialize for WorkingModel {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.sets.iter())
    }
}

impl<'de> Deserialize<'de> for WorkingModel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let sets = Vec::<FactorSet>::deserialize(deserializer)?;
        WorkingModel::from_sets(sets).map_err(serde::de::Error::custom)
    }
}

/// The `Q x Q` contrast matrix `G`. Entries are evaluated on demand; rows
/// follow `r(z)` and columns the canonical effect order.
#[derive(Clone, Debug)]
pub struct ContrastMatrix {
    k: u32,
    columns: Vec<FactorSet>,
}

impl ContrastMatrix {
    pub fn new(k: u32) -> Result<Self> {
        check_factor_count(k)?;
        Ok(ContrastMatrix {
            k,
            columns: canonical_sets(k),
        })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn q(&self) -> usize {
        arm_count(self.k)
    }

    pub fn columns(&self) -> &[FactorSet] {
        &self.columns
    }

    pub fn entry(&self, row: usize, col: usize) -> i8 {
        contrast_value(self.columns[col], TreatmentLevel::from_row(row, self.k))
    }

    pub fn row(&self, z: TreatmentLevel) -> Vec<i8> {
        self.columns.iter().map(|&s| contrast_value(s, z)).collect()
    }

    /// Column `g_K` as a row-indexed vector.
    pub fn column(&self, set: FactorSet) -> Vec<i8> {
        (0..self.q())
            .map(|r| contrast_value(set, TreatmentLevel::from_row(r, self.k)))
            .collect()
    }

    /// Dense row-major copy; only for `K <= MAX_DENSE_FACTORS`.
    pub fn to_dense(&self) -> Result<Vec<Vec<i8>>> {
        if self.k > MAX_DENSE_FACTORS {
            return Err(Error::FactorCount {
                k: self.k,
                max: MAX_DENSE_FACTORS,
            });
        }
        Ok((0..self.q())
            .map(|r| self.row(TreatmentLevel::from_row(r, self.k)))
            .collect())
    }
}

pub fn contrast_matrix(k: u32) -> Result<ContrastMatrix> {
    ContrastMatrix::new(k)
}

/// In-place unnormalized Walsh-Hadamard butterfly.
pub(crate) fn fwht(data: &mut [f64]) {
    let n = data.len();
    debug_assert!(n.is_power_of_two());
    let mut half = 1;
    while half < n {
        for block in data.chunks_exact_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        half *= 2;
    }
}

#[inline]
fn parity_sign(code: usize) -> f64 {
    if code.count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// All `2^K` factorial effects of an arm-indexed vector, stored by code.
#[derive(Clone, Debug, PartialEq)]
pub struct FactorialEffects {
    k: u32,
    by_code: Vec<f64>,
}

impl FactorialEffects {
    /// `Q^{-1} G^T v` via a fast Walsh-Hadamard transform.
    pub fn from_arm_values(v: &[f64]) -> Result<Self> {
        let k = factors_for_len(v.len())?;
        let mut buf = v.to_vec();
        fwht(&mut buf);
        let inv_q = 1.0 / buf.len() as f64;
        for (code, x) in buf.iter_mut().enumerate() {
            *x *= parity_sign(code) * inv_q;
        }
        Ok(FactorialEffects { k, by_code: buf })
    }

    /// Effects equal to `value(set)` for every set.
    pub fn from_fn(k: u32, mut value: impl FnMut(FactorSet) -> f64) -> Result<Self> {
        check_factor_count(k)?;
        let by_code = (0..arm_count(k))
            .map(|code| value(FactorSet::from_code(code, k)))
            .collect();
        Ok(FactorialEffects { k, by_code })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    #[inline]
    pub fn get(&self, set: FactorSet) -> f64 {
        self.by_code[set.code(self.k)]
    }

    pub fn set(&mut self, set: FactorSet, value: f64) {
        let code = set.code(self.k);
        self.by_code[code] = value;
    }

    /// Effects listed in canonical (level, mask) order.
    pub fn canonical(&self) -> Vec<f64> {
        canonical_sets(self.k).into_iter().map(|s| self.get(s)).collect()
    }

    /// Keeps only the effects in `model`.
    pub fn restricted(&self, model: &WorkingModel) -> Self {
        let mut by_code = vec![0.0; self.by_code.len()];
        for set in model.iter().filter(|s| s.fits(self.k)) {
            let code = set.code(self.k);
            by_code[code] = self.by_code[code];
        }
        FactorialEffects { k: self.k, by_code }
    }

    /// `G tau`: the arm-indexed vector with these effects.
    pub fn to_arm_values(&self) -> Vec<f64> {
        let mut buf: Vec<f64> = self
            .by_code
            .iter()
            .enumerate()
            .map(|(code, &t)| parity_sign(code) * t)
            .collect();
        fwht(&mut buf);
        buf
    }
}

/// `Q^{-1} G^T v` in canonical effect order.
pub fn effect_transform(v: &[f64]) -> Result<Vec<f64>> {
    Ok(FactorialEffects::from_arm_values(v)?.canonical())
}

/// Weak or strong effect heredity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Heredity {
    Weak,
    #[default]
    Strong,
}

impl FromStr for Heredity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "weak" => Ok(Heredity::Weak),
            "strong" => Ok(Heredity::Strong),
            _ => Err(Error::InvalidConfig(format!("unknown heredity {s:?}"))),
        }
    }
}

impl fmt::Display for Heredity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Heredity::Weak => "weak",
            Heredity::Strong => "strong",
        })
    }
}

/// Level-`d` subsets of `[K]` admitted by heredity given the selected
/// level-`(d-1)` sets `prev`. Level one admits every singleton.
pub fn heredity_expand(prev: &[FactorSet], d: u32, mode: Heredity, k: u32) -> Vec<FactorSet> {
    if d == 0 || d > k {
        return Vec::new();
    }
    if d == 1 {
        return (1..=k).map(FactorSet::singleton).collect();
    }
    let parents: HashSet<u32> = prev
        .iter()
        .filter(|s| s.level() == d - 1 && s.fits(k))
        .map(|s| s.mask())
        .collect();
    let mut out: Vec<FactorSet> = Vec::new();
    for &p in &parents {
        for bit in 0..k {
            let child = p | (1 << bit);
            if child != p {
                out.push(FactorSet(child));
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    if mode == Heredity::Strong {
        out.retain(|c| c.parents().all(|p| parents.contains(&p.mask())));
    }
    out
}

/// Repeatedly applies [`heredity_expand`] starting from the level-`base_level`
/// slice `base`, returning the slices for levels `base_level+1 ..= base_level+depth`.
pub fn heredity_closure(
    base: &[FactorSet],
    base_level: u32,
    depth: u32,
    mode: Heredity,
    k: u32,
) -> Vec<Vec<FactorSet>> {
    let mut out = Vec::with_capacity(depth as usize);
    let mut current: Vec<FactorSet> = base.to_vec();
    for step in 1..=depth {
        let d = base_level + step;
        // Level one is reachable only from the intercept.
        let next = if d == 1 && !current.contains(&FactorSet::EMPTY) {
            Vec::new()
        } else {
            heredity_expand(&current, d, mode, k)
        };
        out.push(next.clone());
        current = next;
    }
    out
}

/// Whether every interaction in `model` has the parents `mode` requires.
pub fn satisfies_heredity(model: &WorkingModel, mode: Heredity) -> bool {
    model.iter().filter(|s| s.level() >= 2).all(|s| {
        let mut parents = s.parents().map(|p| model.contains(p));
        match mode {
            Heredity::Weak => parents.any(|x| x),
            Heredity::Strong => parents.all(|x| x),
        }
    })
}
