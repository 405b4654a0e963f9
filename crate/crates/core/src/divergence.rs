//! Discrete divergences between two distributions, in bits.
//!
//! | Function | Formula |
//! |----------|---------|
//! | [`kl`] | KL(P‖Q) = Σ P(x) log₂(P(x)/Q(x)) |
//! | [`js`] | √JS, JS(P,Q) = ½KL(P‖M) + ½KL(Q‖M), M = ½(P+Q) |
//! | [`f_divergence`] | Σ Q(x) f(P(x)/Q(x)) with the KL or JS generator |
//!
//! JS is reported as the square root of the base-2 formulation, which is a
//! metric bounded by `[0, 1]`. KL is unbounded and asymmetric.
//!
//! Both operands are aligned on the union of their keys; a key missing from
//! one side has mass zero there. Terms are visited in lexicographic key order
//! and accumulated with Neumaier summation.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distrib::Distribution;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DivergenceError {
    /// P has mass where Q has none; KL is infinite. Smooth the pair first.
    #[error("unsmoothed zero: P({key}) = {p} but Q({key}) = 0")]
    UnsmoothedZero { key: String, p: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DivergenceKind {
    Kl,
    Js,
}

impl DivergenceKind {
    pub const ALL: [DivergenceKind; 2] = [DivergenceKind::Kl, DivergenceKind::Js];

    pub fn as_str(self) -> &'static str {
        match self {
            DivergenceKind::Kl => "kl",
            DivergenceKind::Js => "js",
        }
    }
}

impl fmt::Display for DivergenceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DivergenceKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "kl" => Ok(DivergenceKind::Kl),
            "js" => Ok(DivergenceKind::Js),
            other => Err(format!("unknown divergence '{other}' (expected kl or js)")),
        }
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

pub(crate) fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut acc = CompensatedSum::default();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

/// KL(P‖Q) in bits. `0 · log(0/q) = 0`.
pub fn kl(p: &Distribution, q: &Distribution) -> Result<f64, DivergenceError> {
    let mut acc = CompensatedSum::default();
    for (key, pm, qm) in p.aligned(q) {
        if pm == 0.0 {
            continue;
        }
        if qm == 0.0 {
            return Err(DivergenceError::UnsmoothedZero {
                key: key.to_owned(),
                p: pm,
            });
        }
        acc.add(pm * (pm / qm).log2());
    }
    Ok(acc.value().max(0.0))
}

/// Square-root Jensen–Shannon divergence with base-2 logarithms, in `[0, 1]`.
///
/// Each term is symmetric in (P, Q) as evaluated, so `js(p, q) == js(q, p)`
/// holds bit for bit.
pub fn js(p: &Distribution, q: &Distribution) -> f64 {
    let mut acc = CompensatedSum::default();
    for (_, pm, qm) in p.aligned(q) {
        let m = 0.5 * (pm + qm);
        if m == 0.0 {
            continue;
        }
        let left = if pm > 0.0 { pm * (pm / m).log2() } else { 0.0 };
        let right = if qm > 0.0 { qm * (qm / m).log2() } else { 0.0 };
        acc.add(0.5 * (left + right));
    }
    acc.value().clamp(0.0, 1.0).sqrt()
}

/// KL generator `t log₂ t`.
pub fn f_kl(t: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else {
        t * t.log2()
    }
}

/// JS generator `½[(t+1) log₂(2/(t+1)) + t log₂ t]`.
pub fn f_js(t: f64) -> f64 {
    0.5 * ((t + 1.0) * (2.0 / (t + 1.0)).log2() + f_kl(t))
}

/// Generic discrete f-divergence `Σ Q(x) f(P(x)/Q(x))`.
///
/// Keys with `Q(x) = 0` take the limit `lim_{q→0} q·f(p/q)`: infinite for KL
/// when `p > 0` (reported as [`DivergenceError::UnsmoothedZero`]) and `p/2`
/// for JS. For [`DivergenceKind::Js`] the square root of the sum is returned
/// so the result matches [`js`].
pub fn f_divergence(
    p: &Distribution,
    q: &Distribution,
    kind: DivergenceKind,
) -> Result<f64, DivergenceError> {
    let mut acc = CompensatedSum::default();
    for (key, pm, qm) in p.aligned(q) {
        if qm == 0.0 {
            if pm == 0.0 {
                continue;
            }
            match kind {
                DivergenceKind::Kl => {
                    return Err(DivergenceError::UnsmoothedZero {
                        key: key.to_owned(),
                        p: pm,
                    })
                }
                DivergenceKind::Js => acc.add(0.5 * pm),
            }
            continue;
        }
        let t = pm / qm;
        let f = match kind {
            DivergenceKind::Kl => f_kl(t),
            DivergenceKind::Js => f_js(t),
        };
        acc.add(qm * f);
    }
    let total = acc.value().max(0.0);
    Ok(match kind {
        DivergenceKind::Kl => total,
        DivergenceKind::Js => total.min(1.0).sqrt(),
    })
}

/// Dispatch to the direct implementation for `kind`.
pub fn divergence(
    kind: DivergenceKind,
    p: &Distribution,
    q: &Distribution,
) -> Result<f64, DivergenceError> {
    match kind {
        DivergenceKind::Kl => kl(p, q),
        DivergenceKind::Js => Ok(js(p, q)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(masses: &[f64]) -> Distribution {
        Distribution::from_slice(masses).unwrap()
    }

    #[test]
    fn kl_identity_is_zero() {
        let p = dist(&[0.2, 0.3, 0.5]);
        assert_eq!(kl(&p, &p).unwrap(), 0.0);
    }

    #[test]
    fn kl_hand_values_show_asymmetry() {
        let p = dist(&[0.5, 0.5]);
        let q = dist(&[0.25, 0.75]);
        assert!((kl(&p, &q).unwrap() - 0.2075).abs() < 1e-4);
        assert!((kl(&q, &p).unwrap() - 0.1887).abs() < 1e-4);
    }

    #[test]
    fn kl_rejects_unsmoothed_zero() {
        let p = dist(&[1.0, 0.0]);
        let q = dist(&[0.0, 1.0]);
        assert!(matches!(
            kl(&p, &q),
            Err(DivergenceError::UnsmoothedZero { ref key, .. }) if key == "k000"
        ));
        // zero mass in P never needs Q support
        assert!(kl(&q, &dist(&[0.5, 0.5])).is_ok());
    }

    #[test]
    fn js_hand_values() {
        let p = dist(&[0.5, 0.5]);
        assert_eq!(js(&p, &p), 0.0);
        assert_eq!(js(&dist(&[1.0, 0.0]), &dist(&[0.0, 1.0])), 1.0);
        assert!((js(&p, &dist(&[0.25, 0.75])) - 0.2209).abs() < 1e-4);
    }

    #[test]
    fn js_handles_disjoint_keys() {
        let p = Distribution::from_masses([("a", 1.0)]).unwrap();
        let q = Distribution::from_masses([("b", 1.0)]).unwrap();
        assert_eq!(js(&p, &q), 1.0);
    }

    #[test]
    fn js_generator_vanishes_at_one() {
        assert_eq!(f_js(1.0), 0.0);
        assert_eq!(f_kl(1.0), 0.0);
    }

    #[test]
    fn f_divergence_matches_direct_on_hand_pair() {
        let p = dist(&[0.5, 0.5]);
        let q = dist(&[0.25, 0.75]);
        let direct = kl(&p, &q).unwrap();
        let generic = f_divergence(&p, &q, DivergenceKind::Kl).unwrap();
        assert!((direct - generic).abs() < 1e-12);
        let direct = js(&p, &q);
        let generic = f_divergence(&p, &q, DivergenceKind::Js).unwrap();
        assert!((direct - generic).abs() < 1e-12);
    }

    #[test]
    fn f_divergence_js_limit_at_zero_q() {
        let generic = f_divergence(&dist(&[1.0, 0.0]), &dist(&[0.0, 1.0]), DivergenceKind::Js);
        assert!((generic.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let values = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(compensated_sum(values), 2.0);
    }

    #[test]
    fn kind_parses() {
        assert_eq!("JS".parse::<DivergenceKind>().unwrap(), DivergenceKind::Js);
        assert!("hellinger".parse::<DivergenceKind>().is_err());
    }
}
