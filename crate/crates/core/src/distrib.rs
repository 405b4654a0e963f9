//! Discrete distributions over string keys, rank discounting, binning of
//! continuous article fields, and pairwise smoothing.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::divergence::compensated_sum;

/// Tolerance on `Σ mass = 1`.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DistribError {
    #[error("rank must be >= 1, got {0}")]
    RankOutOfRange(usize),
    #[error("cutoff must be >= 1 when present")]
    InvalidCutoff,
    #[error("empty distribution")]
    EmptyDistribution,
    #[error("no context")]
    NoContext,
    #[error("degenerate binning: bin_count must be >= 2, got {0}")]
    DegenerateBinning(usize),
    #[error("invalid binning range [{lo}, {hi}]")]
    InvalidRange { lo: f64, hi: f64 },
    #[error("invalid mass {mass} for key '{key}'")]
    InvalidMass { key: String, mass: f64 },
    #[error("masses sum to {0}, expected 1")]
    NotNormalized(f64),
    #[error("smoothing alpha must lie in [0, 0.5), got {0}")]
    InvalidAlpha(f64),
}

/// Normalized probability mass over string keys.
///
/// Keys with zero mass may be present; they are part of the domain.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Distribution {
    masses: BTreeMap<String, f64>,
}

impl Distribution {
    /// Validates non-negative finite masses summing to one.
    pub fn from_masses<K, I>(masses: I) -> Result<Self, DistribError>
    where
        K: Into<String>,
        I: IntoIterator<Item = (K, f64)>,
    {
        let mut map = BTreeMap::new();
        for (key, mass) in masses {
            let key = key.into();
            if !mass.is_finite() || mass < 0.0 {
                return Err(DistribError::InvalidMass { key, mass });
            }
            *map.entry(key).or_insert(0.0) += mass;
        }
        if map.is_empty() {
            return Err(DistribError::EmptyDistribution);
        }
        let total = compensated_sum(map.values().copied());
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(DistribError::NotNormalized(total));
        }
        Ok(Self { masses: map })
    }

    /// Normalizes non-negative weights into a distribution.
    pub fn from_weights<K, I>(weights: I) -> Result<Self, DistribError>
    where
        K: Into<String>,
        I: IntoIterator<Item = (K, f64)>,
    {
        let mut map = BTreeMap::new();
        for (key, w) in weights {
            let key = key.into();
            if !w.is_finite() || w < 0.0 {
                return Err(DistribError::InvalidMass { key, mass: w });
            }
            *map.entry(key).or_insert(0.0) += w;
        }
        let total = compensated_sum(map.values().copied());
        if total <= 0.0 {
            return Err(DistribError::EmptyDistribution);
        }
        for w in map.values_mut() {
            *w /= total;
        }
        Ok(Self { masses: map })
    }

    /// Positional masses keyed `k000`, `k001`, ... Handy for tests and tools.
    pub fn from_slice(masses: &[f64]) -> Result<Self, DistribError> {
        Self::from_masses(
            masses
                .iter()
                .enumerate()
                .map(|(i, &m)| (format!("k{i:03}"), m)),
        )
    }

    pub fn mass(&self, key: &str) -> f64 {
        self.masses.get(key).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.masses.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.masses.iter().map(|(k, &m)| (k.as_str(), m))
    }

    pub fn total(&self) -> f64 {
        compensated_sum(self.masses.values().copied())
    }

    /// `(key, self mass, other mass)` over the sorted union of both domains.
    pub fn aligned<'a>(&'a self, other: &'a Distribution) -> Vec<(&'a str, f64, f64)> {
        let mut out = Vec::with_capacity(self.len().max(other.len()));
        let mut left = self.masses.iter().peekable();
        let mut right = other.masses.iter().peekable();
        loop {
            match (left.peek(), right.peek()) {
                (Some((lk, &lm)), Some((rk, &rm))) => match lk.cmp(rk) {
                    std::cmp::Ordering::Less => {
                        out.push((lk.as_str(), lm, 0.0));
                        left.next();
                    }
                    std::cmp::Ordering::Greater => {
                        out.push((rk.as_str(), 0.0, rm));
                        right.next();
                    }
                    std::cmp::Ordering::Equal => {
                        out.push((lk.as_str(), lm, rm));
                        left.next();
                        right.next();
                    }
                },
                (Some((lk, &lm)), None) => {
                    out.push((lk.as_str(), lm, 0.0));
                    left.next();
                }
                (None, Some((rk, &rm))) => {
                    out.push((rk.as_str(), 0.0, rm));
                    right.next();
                }
                (None, None) => break,
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Discount {
    None,
    Mrr,
    Ndcg,
}

impl Discount {
    pub fn as_str(self) -> &'static str {
        match self {
            Discount::None => "none",
            Discount::Mrr => "mrr",
            Discount::Ndcg => "ndcg",
        }
    }
}

impl fmt::Display for Discount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Discount {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "none" => Ok(Discount::None),
            "mrr" => Ok(Discount::Mrr),
            "ndcg" => Ok(Discount::Ndcg),
            other => Err(format!(
                "unknown weighting '{other}' (expected none, mrr or ndcg)"
            )),
        }
    }
}

/// Discount scheme plus an optional top-`n` cutoff (`None` is @N).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankWeighting {
    scheme: Discount,
    cutoff: Option<usize>,
}

impl RankWeighting {
    pub fn new(scheme: Discount, cutoff: Option<usize>) -> Result<Self, DistribError> {
        if cutoff == Some(0) {
            return Err(DistribError::InvalidCutoff);
        }
        Ok(Self { scheme, cutoff })
    }

    pub fn uncut(scheme: Discount) -> Self {
        Self {
            scheme,
            cutoff: None,
        }
    }

    pub fn scheme(&self) -> Discount {
        self.scheme
    }

    pub fn cutoff(&self) -> Option<usize> {
        self.cutoff
    }

    pub fn without_cutoff(&self) -> Self {
        Self::uncut(self.scheme)
    }
}

/// Weight of 1-based `rank` under `scheme`.
pub fn rank_weight(scheme: Discount, rank: usize) -> Result<f64, DistribError> {
    if rank == 0 {
        return Err(DistribError::RankOutOfRange(rank));
    }
    Ok(match scheme {
        Discount::None => 1.0,
        Discount::Mrr => 1.0 / rank as f64,
        Discount::Ndcg => 1.0 / ((rank + 1) as f64).log2(),
    })
}

/// Keys an item contributes to, each with a multiplicity (1 for plain
/// categorical membership, a mention count for count-valued fields).
pub type KeyCounts = Vec<(String, f64)>;

/// Rank-weighted distribution over the keys of `items`.
///
/// Each key of item `i` receives `w(rank_i) · multiplicity`; the total is
/// normalized by the sum over all keys, so multi-key items keep `Σ = 1`.
/// Items without keys contribute to neither numerator nor denominator.
pub fn build_distribution<T, I, F>(
    items: I,
    key_fn: F,
    weighting: &RankWeighting,
) -> Result<Distribution, DistribError>
where
    I: IntoIterator<Item = (T, usize)>,
    F: Fn(&T) -> KeyCounts,
{
    let mut numerators: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for (item, rank) in items {
        let w = rank_weight(weighting.scheme, rank)?;
        if weighting.cutoff.is_some_and(|n| rank > n) {
            continue;
        }
        for (key, multiplicity) in key_fn(&item) {
            if !multiplicity.is_finite() || multiplicity < 0.0 {
                return Err(DistribError::InvalidMass {
                    key,
                    mass: multiplicity,
                });
            }
            if multiplicity > 0.0 {
                numerators.entry(key).or_default().push(w * multiplicity);
            }
        }
    }
    if numerators.is_empty() {
        return Err(DistribError::EmptyDistribution);
    }
    // Per-key sums are order-independent given the same multiset of ranks.
    let per_key: Vec<(String, f64)> = numerators
        .into_iter()
        .map(|(k, mut ws)| {
            ws.sort_by(f64::total_cmp);
            (k, compensated_sum(ws))
        })
        .collect();
    Distribution::from_weights(per_key)
}

/// Recency-discounted distribution over a reading history; position 1 is the
/// most recent article.
pub fn history_distribution<T, F>(
    history: &[T],
    key_fn: F,
    weighting: &RankWeighting,
) -> Result<Distribution, DistribError>
where
    T: Clone,
    F: Fn(&T) -> KeyCounts,
{
    if history.is_empty() {
        return Err(DistribError::NoContext);
    }
    build_distribution(
        history.iter().cloned().enumerate().map(|(i, a)| (a, i + 1)),
        key_fn,
        weighting,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BinnedField {
    Activation,
    Complexity,
}

/// Equal-width bins over `[lo, hi]`; the top edge falls in the last bin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Binning {
    field: BinnedField,
    bin_count: usize,
    lo: f64,
    hi: f64,
}

impl Binning {
    pub const DEFAULT_BINS: usize = 10;

    pub fn new(
        field: BinnedField,
        bin_count: usize,
        lo: f64,
        hi: f64,
    ) -> Result<Self, DistribError> {
        if bin_count < 2 {
            return Err(DistribError::DegenerateBinning(bin_count));
        }
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(DistribError::InvalidRange { lo, hi });
        }
        Ok(Self {
            field,
            bin_count,
            lo,
            hi,
        })
    }

    pub fn activation(bin_count: usize) -> Result<Self, DistribError> {
        Self::new(BinnedField::Activation, bin_count, 0.0, 1.0)
    }

    pub fn complexity(bin_count: usize) -> Result<Self, DistribError> {
        Self::new(BinnedField::Complexity, bin_count, 0.0, 100.0)
    }

    pub fn field(&self) -> BinnedField {
        self.field
    }

    pub fn bin_count(&self) -> usize {
        self.bin_count
    }

    /// Values outside the range are clamped to the edge bins.
    pub fn bin_index(&self, x: f64) -> usize {
        let scaled = (x - self.lo) / (self.hi - self.lo) * self.bin_count as f64;
        if scaled.is_nan() || scaled <= 0.0 {
            return 0;
        }
        (scaled.floor() as usize).min(self.bin_count - 1)
    }

    pub fn key(&self, x: f64) -> String {
        bin_key(self.bin_index(x))
    }
}

pub fn bin_key(index: usize) -> String {
    format!("bin_{index}")
}

/// Mixing weight for pairwise smoothing, in `[0, 0.5)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Smoothing(f64);

impl Smoothing {
    pub const DEFAULT_ALPHA: f64 = 0.001;

    pub fn new(alpha: f64) -> Result<Self, DistribError> {
        if !(alpha.is_finite() && (0.0..0.5).contains(&alpha)) {
            return Err(DistribError::InvalidAlpha(alpha));
        }
        Ok(Self(alpha))
    }

    pub fn none() -> Self {
        Self(0.0)
    }

    pub fn alpha(&self) -> f64 {
        self.0
    }
}

impl Default for Smoothing {
    fn default() -> Self {
        Self(Self::DEFAULT_ALPHA)
    }
}

impl TryFrom<f64> for Smoothing {
    type Error = DistribError;

    fn try_from(alpha: f64) -> Result<Self, Self::Error> {
        Self::new(alpha)
    }
}

impl From<Smoothing> for f64 {
    fn from(s: Smoothing) -> f64 {
        s.0
    }
}

/// Mixes each distribution with the other on the union domain:
/// `P̄ = (1−α)P + αQ`, `Q̄ = (1−α)Q + αP`, then renormalizes.
///
/// Swapping the inputs swaps the outputs exactly.
pub fn smooth_pair(
    p: &Distribution,
    q: &Distribution,
    smoothing: Smoothing,
) -> (Distribution, Distribution) {
    let alpha = smoothing.alpha();
    let aligned = p.aligned(q);
    let mix = |own: f64, other: f64| (1.0 - alpha) * own + alpha * other;
    let p_bar: Vec<(&str, f64)> = aligned
        .iter()
        .map(|&(k, pm, qm)| (k, mix(pm, qm)))
        .collect();
    let q_bar: Vec<(&str, f64)> = aligned
        .iter()
        .map(|&(k, pm, qm)| (k, mix(qm, pm)))
        .collect();
    (renormalize(p_bar), renormalize(q_bar))
}

fn renormalize(masses: Vec<(&str, f64)>) -> Distribution {
    let total = compensated_sum(masses.iter().map(|&(_, m)| m));
    Distribution {
        masses: masses
            .into_iter()
            .map(|(k, m)| (k.to_owned(), m / total))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn categorical(items: &[(&str, usize)]) -> Vec<(String, usize)> {
        items.iter().map(|&(k, r)| (k.to_owned(), r)).collect()
    }

    #[allow(clippy::ptr_arg)]
    fn key_of(k: &String) -> KeyCounts {
        vec![(k.clone(), 1.0)]
    }

    #[test]
    fn rank_weights() {
        assert_eq!(rank_weight(Discount::Mrr, 2).unwrap(), 0.5);
        assert_eq!(rank_weight(Discount::Ndcg, 3).unwrap(), 0.5);
        assert_eq!(rank_weight(Discount::None, 17).unwrap(), 1.0);
        assert_eq!(
            rank_weight(Discount::Mrr, 0),
            Err(DistribError::RankOutOfRange(0))
        );
    }

    #[test]
    fn mrr_distribution_hand_example() {
        let items = categorical(&[("X", 1), ("Y", 2), ("X", 3)]);
        let d = build_distribution(items, key_of, &RankWeighting::uncut(Discount::Mrr)).unwrap();
        assert!((d.mass("X") - 8.0 / 11.0).abs() < 1e-12);
        assert!((d.mass("Y") - 3.0 / 11.0).abs() < 1e-12);
    }

    #[test]
    fn ndcg_and_uniform_hand_examples() {
        let items = categorical(&[("X", 1), ("Y", 2), ("X", 3)]);
        let d = build_distribution(items.clone(), key_of, &RankWeighting::uncut(Discount::Ndcg))
            .unwrap();
        assert!((d.mass("X") - 0.70392).abs() < 1e-5);
        assert!((d.mass("Y") - 0.29608).abs() < 1e-5);
        let d = build_distribution(items, key_of, &RankWeighting::uncut(Discount::None)).unwrap();
        assert!((d.mass("X") - 2.0 / 3.0).abs() < 1e-15);
        assert!((d.mass("Y") - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn keyless_items_are_excluded() {
        let items = vec![(Some("X"), 1), (None, 2), (Some("Y"), 3)];
        let d = build_distribution(
            items,
            |k: &Option<&str>| k.iter().map(|k| (k.to_string(), 1.0)).collect(),
            &RankWeighting::uncut(Discount::Mrr),
        )
        .unwrap();
        // weights 1 and 1/3 only
        assert!((d.mass("X") - 0.75).abs() < 1e-15);
        let err = build_distribution(
            vec![((), 1)],
            |_: &()| Vec::new(),
            &RankWeighting::uncut(Discount::Mrr),
        );
        assert_eq!(err, Err(DistribError::EmptyDistribution));
    }

    #[test]
    fn cutoff_drops_tail() {
        let items = categorical(&[("X", 1), ("Y", 2), ("Z", 3)]);
        let w = RankWeighting::new(Discount::Mrr, Some(2)).unwrap();
        let d = build_distribution(items, key_of, &w).unwrap();
        assert_eq!(d.mass("Z"), 0.0);
        assert!((d.mass("X") - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(
            RankWeighting::new(Discount::Mrr, Some(0)),
            Err(DistribError::InvalidCutoff)
        );
    }

    #[test]
    fn history_examples() {
        let w = RankWeighting::uncut(Discount::Mrr);
        let d = history_distribution(&["X".to_string()], key_of, &w).unwrap();
        assert_eq!(d.mass("X"), 1.0);
        let d = history_distribution(&["X".to_string(), "X".to_string()], key_of, &w).unwrap();
        assert_eq!(d.mass("X"), 1.0);
        let d = history_distribution(&["X".to_string(), "Y".to_string()], key_of, &w).unwrap();
        assert!((d.mass("X") - 2.0 / 3.0).abs() < 1e-15);
        assert!((d.mass("Y") - 1.0 / 3.0).abs() < 1e-15);
        let empty: [String; 0] = [];
        assert_eq!(
            history_distribution(&empty, key_of, &w),
            Err(DistribError::NoContext)
        );
    }

    #[test]
    fn smoothing_hand_example() {
        let p = Distribution::from_slice(&[1.0, 0.0]).unwrap();
        let q = Distribution::from_slice(&[0.5, 0.5]).unwrap();
        let (pb, qb) = smooth_pair(&p, &q, Smoothing::new(0.01).unwrap());
        assert!((pb.mass("k000") - 0.995).abs() < 1e-15);
        assert!((pb.mass("k001") - 0.005).abs() < 1e-15);
        assert!((qb.mass("k000") - 0.505).abs() < 1e-15);
        assert!((qb.mass("k001") - 0.495).abs() < 1e-15);
    }

    #[test]
    fn smoothing_fixed_point_and_zero_alpha() {
        let p = Distribution::from_slice(&[0.3, 0.7]).unwrap();
        let (pb, qb) = smooth_pair(&p, &p, Smoothing::new(0.2).unwrap());
        for (k, m) in p.iter() {
            assert!((pb.mass(k) - m).abs() < 1e-15);
            assert!((qb.mass(k) - m).abs() < 1e-15);
        }
        let a = Distribution::from_masses([("a", 1.0)]).unwrap();
        let b = Distribution::from_masses([("b", 1.0)]).unwrap();
        let (ab, bb) = smooth_pair(&a, &b, Smoothing::none());
        assert_eq!(ab.len(), 2);
        assert_eq!(ab.mass("b"), 0.0);
        assert_eq!(bb.mass("a"), 0.0);
    }

    #[test]
    fn binning_edges() {
        let b = Binning::activation(10).unwrap();
        assert_eq!(b.key(0.0), "bin_0");
        assert_eq!(b.key(0.05), "bin_0");
        assert_eq!(b.key(0.1), "bin_1");
        assert_eq!(b.key(1.0), "bin_9");
        let c = Binning::complexity(10).unwrap();
        assert_eq!(c.key(100.0), "bin_9");
        assert_eq!(c.key(55.0), "bin_5");
        assert_eq!(
            Binning::complexity(1),
            Err(DistribError::DegenerateBinning(1))
        );
        assert!(Binning::new(BinnedField::Activation, 4, 1.0, 1.0).is_err());
    }

    #[test]
    fn alpha_range() {
        assert!(Smoothing::new(0.5).is_err());
        assert!(Smoothing::new(-0.1).is_err());
        assert_eq!(Smoothing::default().alpha(), 0.001);
    }

    #[test]
    fn from_masses_validates() {
        assert!(matches!(
            Distribution::from_slice(&[0.5, 0.6]),
            Err(DistribError::NotNormalized(_))
        ));
        assert!(matches!(
            Distribution::from_slice(&[1.5, -0.5]),
            Err(DistribError::InvalidMass { .. })
        ));
    }
}
