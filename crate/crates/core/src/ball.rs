//! Sharp pointwise gradient constants on the unit ball `B^n`.
//!
//! For `x = ρ e_n` and `l_α = sin α e_{n-1} + cos α e_n`, finite `q`:
//!
//! ```text
//! 𝐂(x; l) = 2(n-1) (1-ρ²)^{-(n(q-1)+1)/q} C^{1/q},
//! C = ∫_{S^{n-1}} (1 + ρ² - 2ρ⟨η, l_α⟩)^{(n-1)(q-1)} |η_n|^q dσ(η).
//! ```
//!
//! `C` is available by quadrature, as a double power series in
//! `(2ρ/(1+ρ²))²`, and for `α ∈ {0, π/2}` through `3F2` / `2F1`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::geometry::{check_dimension, BallConfig, QNorm};
use crate::quadrature::{maximize_1d, sphere_integral_singular, LineCusp, SingularIntegrand};
use crate::regime::{classify_regime, Regime};
use crate::special::{
    hypergeometric, ln_gamma_pos, non_positive_integer, CompensatedSum, HypergeometricSpec,
    SeriesOptions, StoppingRule, DEFAULT_MAX_TERMS,
};

/// Default Gauss order per axis.
pub const DEFAULT_ORDER: usize = 128;

/// How a constant was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    Quadrature,
    Series,
    ClosedFormRadial,
    ClosedFormTangential,
    SupFormula,
    NumericSup,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Self::Quadrature => "Quadrature",
            Self::Series => "Series",
            Self::ClosedFormRadial => "ClosedFormRadial",
            Self::ClosedFormTangential => "ClosedFormTangential",
            Self::SupFormula => "SupFormula",
            Self::NumericSup => "NumericSup",
        }
    }
}

/// Work done and estimated error of a computation.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Series terms summed.
    pub terms: Option<usize>,
    /// Gauss order per axis, or grid size for maximizations.
    pub nodes: Option<usize>,
    /// Absolute error estimate of `value`.
    pub error_estimate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantResult {
    pub value: f64,
    pub method: Method,
    pub diagnostics: Diagnostics,
    /// Maximizing direction when the result is a supremum over directions.
    pub direction_alpha: Option<f64>,
}

/// Reflection `η_n → -η_n` maps `α` to `π - α` and leaves `C` unchanged.
fn fold_alpha(alpha: f64) -> f64 {
    alpha.min(PI - alpha).max(0.0)
}

fn finite_q(q: QNorm) -> Result<f64> {
    q.as_finite()
        .ok_or_else(|| Error::InvalidParameter("this route requires a finite q".into()))
}

fn check_q(q: f64) -> Result<()> {
    if !(q >= 1.0 && q.is_finite()) {
        return Err(Error::InvalidParameter(format!("q must be finite and ≥ 1, got {q}")));
    }
    Ok(())
}

fn check_rho(rho: f64) -> Result<()> {
    if !(0.0..1.0).contains(&rho) {
        return Err(domain(format!("rho must lie in [0, 1), got {rho}")));
    }
    Ok(())
}

/// `γ = (n-1)(q-1)`.
fn gamma_exp(n: usize, q: f64) -> f64 {
    (n as f64 - 1.0) * (q - 1.0)
}

/// `𝐂 = 2(n-1)(1-ρ²)^{-(n(q-1)+1)/q} C^{1/q}` evaluated in log space.
fn constant_from_integral(n: usize, q: f64, rho: f64, ln_c: f64) -> f64 {
    let nf = n as f64;
    let ln_one_minus = (-rho * rho).ln_1p();
    ((2.0 * (nf - 1.0)).ln() - (nf * (q - 1.0) + 1.0) / q * ln_one_minus + ln_c / q).exp()
}

/// Relative error of `C` propagated to `𝐂 ∝ C^{1/q}`.
fn propagate(value: f64, c: f64, c_err: f64, q: f64) -> f64 {
    if c == 0.0 {
        return 0.0;
    }
    value * (c_err / c).abs() / q
}

/// Break points towards `w = 1` for integrands carrying a power of
/// `1 + ρ² - 2ρw`, whose branch point lies `(1-ρ)²/(2ρ)` beyond `w = 1`.
pub(crate) fn peak_splits(rho: f64) -> Vec<f64> {
    let mut splits = Vec::new();
    if rho > 0.25 {
        let mut step = (1.0 - rho).powi(2) / (2.0 * rho);
        while step < 0.5 {
            splits.push(1.0 - step);
            step *= 4.0;
        }
    }
    splits
}

/// `C` by Gauss-Jacobi quadrature in coordinates centred at `l_α`.
fn integral_c(n: usize, q: f64, rho: f64, alpha: f64, order: usize) -> Result<f64> {
    let alpha = fold_alpha(alpha);
    let (s, c) = (alpha.sin(), alpha.cos());
    let gamma = gamma_exp(n, q);
    let splits = if gamma != 0.0 { peak_splits(rho) } else { Vec::new() };
    let spec = SingularIntegrand {
        f: |u: f64, w: f64| {
            let base = ((1.0 - rho).powi(2) + 2.0 * rho * (1.0 - w)).max(0.0);
            let dir = (w * c - u * s).abs();
            base.powf(gamma) * dir.powf(q)
        },
        cusp: Some(LineCusp {
            a: -s,
            b: c,
            d: 0.0,
            power: q,
        }),
        pole_power: 0.0,
        splits,
    };
    sphere_integral_singular(n, &spec, order)
}

/// `𝐂(x; l_α)` from the integral representation by quadrature.
pub fn c_integral_quadrature(cfg: &BallConfig, order: usize) -> Result<ConstantResult> {
    let q = finite_q(cfg.q)?;
    let c = integral_c(cfg.n, q, cfg.rho, cfg.alpha, order)?;
    let coarse = integral_c(cfg.n, q, cfg.rho, cfg.alpha, (order / 2).max(8))?;
    let value = constant_from_integral(cfg.n, q, cfg.rho, c.ln());
    Ok(ConstantResult {
        value,
        method: Method::Quadrature,
        diagnostics: Diagnostics {
            terms: None,
            nodes: Some(order),
            error_estimate: propagate(value, c, c - coarse, q),
        },
        direction_alpha: None,
    })
}

/// `C` as the double series, divided by `Γ(n/2) Γ((q+1)/2) (1+ρ²)^γ / √π`.
///
/// The inner sum over `j` is the mean of `((q+1)/2)_j / (1/2)_j` under a
/// binomial law `Bin(k, cos²α)`; its probability vector is advanced in `k`
/// by the recurrence `p_{k+1}(j) = sin²α p_k(j) + cos²α p_k(j-1)`.
fn series_sum(n: usize, q: f64, rho: f64, alpha: f64, opts: SeriesOptions) -> Result<SumOutcome> {
    let nf = n as f64;
    let snap = |x: f64| non_positive_integer(x).map_or(x, |m| -(m as f64));
    let a = snap((nf - 1.0) * (1.0 - q) / 2.0);
    let b = snap((1.0 - (nf - 1.0) * (q - 1.0)) / 2.0);
    let c = (q + nf) / 2.0;
    let w = 2.0 * rho / (1.0 + rho * rho);
    let w2 = w * w;
    let alpha = fold_alpha(alpha);
    let (sin2, cos2) = (alpha.sin().powi(2), alpha.cos().powi(2));

    // outer coefficient (a)_k (b)_k / (k! Γ(k+c)) · w^{2k}
    let mut outer = (-ln_gamma_pos(c)).exp();
    // binomial probabilities p(j) on the window [j_lo, j_lo + len)
    let mut probs = vec![1.0];
    let mut j_lo = 0usize;
    // h_j = ((q+1)/2)_j / (1/2)_j
    let mut h = vec![1.0];

    let mut acc = CompensatedSum::default();
    let mut rule = StoppingRule::new(opts.rel_tol);
    for k in 0..opts.max_terms {
        while h.len() < j_lo + probs.len() {
            let j = (h.len() - 1) as f64;
            let last = h[h.len() - 1];
            h.push(last * (2.0 * j + q + 1.0) / (2.0 * j + 1.0));
        }
        let mut mean = CompensatedSum::default();
        for (i, p) in probs.iter().enumerate() {
            mean.add(p * h[j_lo + i]);
        }
        let term = outer * mean.value();
        acc.add(term);
        if outer == 0.0 || w2 == 0.0 {
            return Ok(SumOutcome {
                sum: acc.value(),
                terms: k + 1,
                terminated: true,
                tail: 0.0,
            });
        }
        let (stop, tail) = rule.update(term, acc.value());
        if stop {
            return Ok(SumOutcome {
                sum: acc.value(),
                terms: k + 1,
                terminated: false,
                tail,
            });
        }

        let kf = k as f64;
        outer *= (a + kf) * (b + kf) / ((kf + 1.0) * (kf + c)) * w2;
        advance_binomial(&mut probs, &mut j_lo, sin2, cos2);
    }
    Err(Error::Truncated {
        partial_sum: acc.value(),
        terms: opts.max_terms,
    })
}

struct SumOutcome {
    sum: f64,
    terms: usize,
    terminated: bool,
    tail: f64,
}

fn advance_binomial(probs: &mut Vec<f64>, j_lo: &mut usize, sin2: f64, cos2: f64) {
    let len = probs.len();
    let mut next = vec![0.0; len + 1];
    for (i, p) in probs.iter().enumerate() {
        next[i] += sin2 * p;
        next[i + 1] += cos2 * p;
    }
    let peak = next.iter().cloned().fold(0.0, f64::max);
    let cut = peak * 1e-40;
    let first = next.iter().position(|p| *p > cut).unwrap_or(0);
    let last = next.iter().rposition(|p| *p > cut).unwrap_or(len);
    *j_lo += first;
    *probs = next[first..=last].to_vec();
}

/// `𝐂(x; l_α)` from the double series.
pub fn c_series(cfg: &BallConfig, rel_tol: f64) -> Result<ConstantResult> {
    let q = finite_q(cfg.q)?;
    let opts = SeriesOptions {
        rel_tol,
        max_terms: DEFAULT_MAX_TERMS,
    };
    let out = series_sum(cfg.n, q, cfg.rho, cfg.alpha, opts)?;
    let nf = cfg.n as f64;
    let ln_pref = ln_gamma_pos(nf / 2.0) + ln_gamma_pos((q + 1.0) / 2.0)
        + gamma_exp(cfg.n, q) * (cfg.rho * cfg.rho).ln_1p()
        - 0.5 * PI.ln();
    if !(out.sum > 0.0) {
        return Err(Error::Internal(format!("non-positive series value {}", out.sum)));
    }
    let value = constant_from_integral(cfg.n, q, cfg.rho, ln_pref + out.sum.ln());
    Ok(ConstantResult {
        value,
        method: Method::Series,
        diagnostics: Diagnostics {
            terms: Some(out.terms),
            nodes: None,
            error_estimate: if out.terminated { 0.0 } else { propagate(value, out.sum, out.tail, q) },
        },
        direction_alpha: None,
    })
}

/// Prefactor shared by both closed forms, `ln` of the bracket raised to `q`.
fn closed_prefactor_ln(n: usize, q: f64, rho: f64) -> f64 {
    let nf = n as f64;
    ln_gamma_pos(nf / 2.0) + ln_gamma_pos((q + 1.0) / 2.0) - 0.5 * PI.ln()
        - ln_gamma_pos((q + nf) / 2.0)
        + gamma_exp(n, q) * (rho * rho).ln_1p()
        - (nf * (q - 1.0) + 1.0) * (-rho * rho).ln_1p()
}

fn closed_form(n: usize, q: f64, rho: f64, radial: bool) -> Result<ConstantResult> {
    check_dimension(n)?;
    check_q(q)?;
    check_rho(rho)?;
    let nf = n as f64;
    let a = (nf - 1.0) * (1.0 - q) / 2.0;
    let b = (1.0 - (nf - 1.0) * (q - 1.0)) / 2.0;
    let c = (q + nf) / 2.0;
    let z = (2.0 * rho / (1.0 + rho * rho)).powi(2);
    let spec = if radial {
        HypergeometricSpec::new(vec![a, b, (q + 1.0) / 2.0], vec![0.5, c], z)?
    } else {
        HypergeometricSpec::new(vec![a, b], vec![c], z)?
    };
    let f = hypergeometric(&spec, SeriesOptions::default())?;
    if !(f.value > 0.0) {
        return Err(Error::Internal(format!("non-positive hypergeometric value {}", f.value)));
    }
    let ln = (2.0 * (nf - 1.0)).ln() + (closed_prefactor_ln(n, q, rho) + f.value.ln()) / q;
    let value = ln.exp();
    Ok(ConstantResult {
        value,
        method: if radial { Method::ClosedFormRadial } else { Method::ClosedFormTangential },
        diagnostics: Diagnostics {
            terms: Some(f.terms),
            nodes: None,
            error_estimate: propagate(value, f.value, f.error_estimate, q),
        },
        direction_alpha: Some(if radial { 0.0 } else { PI / 2.0 }),
    })
}

/// `𝐂(x; ±x/|x|)` through `3F2(a, b, (q+1)/2; 1/2, (q+n)/2; 4ρ²/(1+ρ²)²)`.
pub fn c_radial_closed(n: usize, q: f64, rho: f64) -> Result<ConstantResult> {
    closed_form(n, q, rho, true)
}

/// `𝐂(x; t)` for `t ⊥ x` through `2F1(a, b; (q+n)/2; 4ρ²/(1+ρ²)²)`.
pub fn c_tangential_closed(n: usize, q: f64, rho: f64) -> Result<ConstantResult> {
    closed_form(n, q, rho, false)
}

/// `q = 1`: `2(n-1)Γ(n/2) / (√π Γ((n+1)/2) (1-ρ²))`, for every direction.
pub fn c_unit_q_closed(n: usize, rho: f64) -> Result<f64> {
    check_dimension(n)?;
    check_rho(rho)?;
    let nf = n as f64;
    let ln = (2.0 * (nf - 1.0)).ln() + ln_gamma_pos(nf / 2.0)
        - 0.5 * PI.ln()
        - ln_gamma_pos((nf + 1.0) / 2.0)
        - (-rho * rho).ln_1p();
    Ok(ln.exp())
}

/// `q = n/(n-1)`, where every direction gives the same value.
pub fn c_critical_closed(n: usize, rho: f64) -> Result<f64> {
    check_dimension(n)?;
    check_rho(rho)?;
    let nf = n as f64;
    let bracket = ln_gamma_pos(nf / 2.0) + ln_gamma_pos((2.0 * nf - 1.0) / (2.0 * nf - 2.0))
        + (rho * rho).ln_1p()
        - 0.5 * PI.ln()
        - ln_gamma_pos(nf * nf / (2.0 * nf - 2.0));
    let ln = (2.0 * (nf - 1.0)).ln() - (2.0 * nf - 1.0) / nf * (-rho * rho).ln_1p()
        + (nf - 1.0) / nf * bracket;
    Ok(ln.exp())
}

/// `q = (n+1)/(n-1)`: the radial `3F2` has two terms.
pub fn c_two_term_closed(n: usize, rho: f64) -> Result<f64> {
    check_dimension(n)?;
    check_rho(rho)?;
    let nf = n as f64;
    let lg = ln_gamma_pos;
    let sqrt_pi = PI.sqrt();
    let first = (lg(nf / 2.0) + lg(nf / (nf - 1.0)) - lg((nf * nf + 1.0) / (2.0 * nf - 2.0))).exp()
        / sqrt_pi
        * (1.0 + rho * rho).powi(2);
    let second = 4.0
        * (lg(nf / 2.0) + lg((2.0 * nf - 1.0) / (nf - 1.0))
            - lg((nf * nf + 2.0 * nf - 1.0) / (2.0 * nf - 2.0)))
        .exp()
        / sqrt_pi
        * rho
        * rho;
    let ln = (2.0 * (nf - 1.0)).ln() - (3.0 * nf - 1.0) / (nf + 1.0) * (-rho * rho).ln_1p()
        + (nf - 1.0) / (nf + 1.0) * (first + second).ln();
    Ok(ln.exp())
}

/// Grid size of the sup over `β` for `q = ∞`.
pub const SUP_GRID: usize = 512;

/// Objective whose maximum over `β ∈ [0, 2π]` is `C_∞(ρ e_n; l_α)`.
pub fn infinity_objective(n: usize, rho: f64, alpha: f64) -> impl Fn(f64) -> f64 {
    let r2 = rho * rho;
    let w = 2.0 * rho / (1.0 + r2);
    let shrink = (1.0 - r2) / (1.0 + r2);
    let (sa, ca) = (alpha.sin(), alpha.cos());
    move |beta: f64| {
        let num = shrink * sa * beta.sin() + (beta.cos() - w) * ca;
        num.abs() / (1.0 + r2 - 2.0 * rho * beta.cos()).powi(n as i32)
    }
}

/// `𝐂(x; l_α)` for `q = ∞`: `2(n-1)(1+ρ²)(1-ρ²)^{n-2} C_∞`.
pub fn c_infinity(n: usize, rho: f64, alpha: f64) -> Result<ConstantResult> {
    check_dimension(n)?;
    check_rho(rho)?;
    if !(0.0..=PI).contains(&alpha) {
        return Err(domain("alpha must lie in [0, π]"));
    }
    let (_, sup) = maximize_1d(infinity_objective(n, rho, alpha), 0.0, 2.0 * PI, SUP_GRID, 1e-13)?;
    let nf = n as f64;
    let value = 2.0 * (nf - 1.0) * (1.0 + rho * rho) * (1.0 - rho * rho).powi(n as i32 - 2) * sup;
    Ok(ConstantResult {
        value,
        method: Method::SupFormula,
        diagnostics: Diagnostics {
            terms: None,
            nodes: Some(SUP_GRID),
            error_estimate: value * 1e-14,
        },
        direction_alpha: Some(alpha),
    })
}

/// `2(n-1)(1+ρ)^{n-2} / (1-ρ)^n`.
pub fn c_infinity_closed(n: usize, rho: f64) -> Result<f64> {
    check_dimension(n)?;
    check_rho(rho)?;
    let nf = n as f64;
    Ok(2.0 * (nf - 1.0) * (1.0 + rho).powi(n as i32 - 2) / (1.0 - rho).powi(n as i32))
}

/// `𝐂(x; l_α)` by the default route: the series for finite `q` (quadrature
/// if the series cannot converge within the term cap), the sup for `q = ∞`.
pub fn c_directional(cfg: &BallConfig, order: usize, rel_tol: f64) -> Result<ConstantResult> {
    match cfg.q {
        QNorm::Infinity => c_infinity(cfg.n, cfg.rho, cfg.alpha),
        QNorm::Finite(_) => match c_series(cfg, rel_tol) {
            Err(Error::Truncated { .. }) => c_integral_quadrature(cfg, order),
            other => other,
        },
    }
}

/// Points of the `α` grid for suprema in the gap regime.
pub const GAP_GRID: usize = 257;

/// `𝐂(x) = sup_l 𝐂(x; l)`.
pub fn sharp_constant_ball(n: usize, q: QNorm, rho: f64) -> Result<ConstantResult> {
    check_dimension(n)?;
    check_rho(rho)?;
    match classify_regime(n, q) {
        Regime::Radial { k0: None } => c_infinity(n, rho, 0.0),
        Regime::Radial { .. } => c_radial_closed(n, finite_q(q)?, rho),
        Regime::Tangential => c_tangential_closed(n, finite_q(q)?, rho),
        Regime::Gap { .. } => gap_supremum(n, finite_q(q)?, rho),
    }
}

fn gap_supremum(n: usize, q: f64, rho: f64) -> Result<ConstantResult> {
    let failure = std::cell::RefCell::new(None);
    let objective = |alpha: f64| {
        let cfg = BallConfig {
            n,
            q: QNorm::Finite(q),
            rho,
            alpha,
        };
        match c_series(&cfg, 1e-13) {
            Ok(r) => r.value,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    };
    let (alpha, value) = maximize_1d(objective, 0.0, PI / 2.0, GAP_GRID, 1e-9)?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(ConstantResult {
        value,
        method: Method::NumericSup,
        diagnostics: Diagnostics {
            terms: None,
            nodes: Some(GAP_GRID),
            error_estimate: value * 1e-12,
        },
        direction_alpha: Some(alpha),
    })
}
