//! Which direction `l` maximizes the directional constant, as a function
//! of `(n, q)`.
//!
//! With `x = (q - 1)(n - 1)`: tangential directions win for `0 < x < 1`,
//! the radial direction wins on `x ∈ [2K₀-1, 2K₀]` for `K₀ ≥ 1`, at `q = 1`
//! and at `q = ∞`. The open intervals `(2K₀, 2K₀+1)` are not covered.

use serde::{Deserialize, Serialize};

use crate::geometry::QNorm;

/// Slack used when `q` sits on an interval endpoint up to rounding.
const ENDPOINT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "regime", rename_all = "snake_case")]
pub enum Regime {
    Tangential,
    /// `k0` is the interval index; `None` for `q = ∞`.
    Radial { k0: Option<u64> },
    /// `q` lies strictly between the radial intervals `k0` and `k0 + 1`.
    Gap { k0: u64 },
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Self::Tangential => "Tangential",
            Self::Radial { .. } => "Radial",
            Self::Gap { .. } => "Gap",
        }
    }
}

/// Position of `q` relative to the regime endpoints; `n ≥ 3` is assumed.
pub fn classify_regime(n: usize, q: QNorm) -> Regime {
    let Some(q) = q.as_finite() else {
        return Regime::Radial { k0: None };
    };
    let x = (q - 1.0) * (n as f64 - 1.0);
    if x <= ENDPOINT_TOLERANCE {
        return Regime::Radial { k0: Some(0) };
    }
    if x < 1.0 - ENDPOINT_TOLERANCE {
        return Regime::Tangential;
    }
    let k = ((x + 1.0) / 2.0 + ENDPOINT_TOLERANCE).floor();
    if x <= 2.0 * k + ENDPOINT_TOLERANCE {
        Regime::Radial { k0: Some(k as u64) }
    } else {
        Regime::Gap { k0: k as u64 }
    }
}

/// A maximal interval of `q` values sharing one regime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeInterval {
    pub regime: Regime,
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl RegimeInterval {
    /// Interval notation such as `[1.25, 1.5]` or `(1.5, 1.75)`.
    pub fn notation(&self) -> String {
        format!(
            "{}{}, {}{}",
            if self.lo_closed { '[' } else { '(' },
            self.lo,
            self.hi,
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

/// Decomposition of `(1, q_max]` into regime intervals, in increasing order.
/// The endpoint `q = 1` itself is radial.
pub fn regime_intervals(n: usize, q_max: f64) -> Vec<RegimeInterval> {
    let step = 1.0 / (n as f64 - 1.0);
    let mut out = Vec::new();
    if !(q_max > 1.0) {
        return out;
    }
    let mut push = |regime, lo: f64, hi: f64, lo_closed, hi_closed| {
        if lo >= q_max {
            return false;
        }
        let (hi, hi_closed) = if hi > q_max { (q_max, true) } else { (hi, hi_closed) };
        out.push(RegimeInterval {
            regime,
            lo,
            hi,
            lo_closed,
            hi_closed,
        });
        true
    };
    if !push(Regime::Tangential, 1.0, 1.0 + step, false, false) {
        return out;
    }
    for k in 1u64.. {
        let kf = k as f64;
        let r_lo = 1.0 + (2.0 * kf - 1.0) * step;
        let r_hi = 1.0 + 2.0 * kf * step;
        if !push(Regime::Radial { k0: Some(k) }, r_lo, r_hi, true, true) {
            break;
        }
        if !push(Regime::Gap { k0: k }, r_hi, r_hi + step, false, false) {
            break;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn classification_examples() {
        assert_eq!(classify_regime(3, QNorm::Finite(2.0)), Regime::Radial { k0: Some(1) });
        assert_eq!(classify_regime(3, QNorm::Finite(1.2)), Regime::Tangential);
        assert_eq!(classify_regime(4, QNorm::Finite(1.45)), Regime::Radial { k0: Some(1) });
        assert_eq!(classify_regime(5, QNorm::Finite(1.3)), Regime::Radial { k0: Some(1) });
        assert_eq!(classify_regime(5, QNorm::Finite(1.55)), Regime::Gap { k0: 1 });
        assert_eq!(classify_regime(4, QNorm::Infinity), Regime::Radial { k0: None });
        assert_eq!(classify_regime(6, QNorm::Finite(1.0)), Regime::Radial { k0: Some(0) });
        for n in 3..10 {
            assert_eq!(classify_regime(n, QNorm::critical(n)), Regime::Radial { k0: Some(1) });
            let q = 1.0 + 4.0 / (n as f64 - 1.0);
            assert_eq!(classify_regime(n, QNorm::Finite(q)), Regime::Radial { k0: Some(2) });
            let q = 1.0 + 3.0 / (n as f64 - 1.0);
            assert_eq!(classify_regime(n, QNorm::Finite(q)), Regime::Radial { k0: Some(2) });
        }
    }

    #[test]
    fn interval_listing() {
        let iv = regime_intervals(5, 3.0);
        let text: Vec<String> = iv.iter().map(|i| format!("{} {}", i.regime.name(), i.notation())).collect();
        assert_eq!(
            &text[..4],
            ["Tangential (1, 1.25)", "Radial [1.25, 1.5]", "Gap (1.5, 1.75)", "Radial [1.75, 2]"]
        );
        assert_eq!(iv.last().unwrap().hi, 3.0);
        assert!(regime_intervals(3, 1.0).is_empty());
    }

    proptest! {
        #[test]
        fn listing_agrees_with_classifier(n in 3usize..9, q in 1.0001f64..6.0) {
            let iv = regime_intervals(n, 6.0);
            let Some(hit) = iv.iter().find(|i| (i.lo < q || i.lo_closed && i.lo == q) && (q < i.hi || i.hi_closed && q == i.hi)) else {
                return Ok(());
            };
            prop_assert_eq!(hit.regime.name(), classify_regime(n, QNorm::Finite(q)).name());
        }
    }
}
