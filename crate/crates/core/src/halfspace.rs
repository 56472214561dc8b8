//! Sharp pointwise gradient constants on the upper half-space `H^n`.
//!
//! For `x = x_n e_n` and `l_α = sin α e_{n-1} + cos α e_n`, finite `q`:
//!
//! ```text
//! 𝐂(x; l) = (n-1) c_n x_n^{-(n(q-1)+1)/q} C^{1/q},
//! C = 2^{-(n-1)(2q-1)} ω_{n-1} ∫_{S^{n-1}} |ζ_n|^q |ζ - l_α|^{2(n-1)(q-1)} dσ(ζ),
//! ```
//!
//! with `c_n` the kernel normalization and `ω_{n-1}` the area of `S^{n-1}`.
//! The integral over `R^{n-1}` that this sphere integral comes from is kept
//! as an independent check.

use std::cell::RefCell;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::ball::{ConstantResult, Diagnostics, Method};
use crate::error::{domain, Error, Result};
use crate::geometry::{check_dimension, HalfSpaceConfig, QNorm};
use crate::kernels::{halfspace_normalization, kernel_halfspace_gradient};
use crate::quadrature::{
    cached_rule, inner_cusp_integral, maximize_1d, piece_nodes, sphere_area, sphere_integral_singular, Grade,
    LineCusp, SingularIntegrand,
};
use crate::regime::{classify_regime, Regime};
use crate::special::{hypergeometric, ln_gamma_pos, CompensatedSum, HypergeometricSpec, SeriesOptions};

/// A half-space constant at a given height together with its power law
/// `value(x_n) = value(1) x_n^{-scale_exponent}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfSpaceConstant {
    pub value: f64,
    pub method: Method,
    pub diagnostics: Diagnostics,
    pub direction_alpha: Option<f64>,
    pub scale_exponent: f64,
    /// Set when a truncation check disagrees beyond `1e-8` relative.
    pub accuracy_warning: bool,
}

impl HalfSpaceConstant {
    /// The same constant at another height.
    pub fn at_height(&self, x_n: f64, new_x_n: f64) -> f64 {
        self.value * (x_n / new_x_n).powf(self.scale_exponent)
    }

    pub fn as_constant_result(&self) -> ConstantResult {
        ConstantResult {
            value: self.value,
            method: self.method,
            diagnostics: self.diagnostics,
            direction_alpha: self.direction_alpha,
        }
    }
}

/// `(n(q-1)+1)/q`, and `n` for `q = ∞`.
pub fn scale_exponent(n: usize, q: QNorm) -> f64 {
    let nf = n as f64;
    match q {
        QNorm::Infinity => nf,
        QNorm::Finite(q) => (nf * (q - 1.0) + 1.0) / q,
    }
}

fn finite_q(q: QNorm) -> Result<f64> {
    let q = q
        .as_finite()
        .ok_or_else(|| Error::InvalidParameter("this route requires a finite q".into()))?;
    check_q(q)?;
    Ok(q)
}

fn check_q(q: f64) -> Result<()> {
    if !(q >= 1.0 && q.is_finite()) {
        return Err(Error::InvalidParameter(format!("q must be finite and ≥ 1, got {q}")));
    }
    Ok(())
}

fn check_height(x_n: f64) -> Result<()> {
    if !(x_n > 0.0 && x_n.is_finite()) {
        return Err(domain(format!("x_n must be positive, got {x_n}")));
    }
    Ok(())
}

fn fold_alpha(alpha: f64) -> f64 {
    alpha.min(PI - alpha).max(0.0)
}

fn gamma_exp(n: usize, q: f64) -> f64 {
    (n as f64 - 1.0) * (q - 1.0)
}

/// `(n-1) c_n x_n^{-(n(q-1)+1)/q} C^{1/q}` in log space.
fn constant_from_integral(n: usize, q: f64, x_n: f64, ln_c: f64) -> f64 {
    let nf = n as f64;
    let prefactor = ((nf - 1.0) * halfspace_normalization(n)).ln();
    (prefactor - (nf * (q - 1.0) + 1.0) / q * x_n.ln() + ln_c / q).exp()
}

fn finish(
    n: usize,
    q: f64,
    x_n: f64,
    c: f64,
    coarse: Option<f64>,
    method: Method,
    nodes: Option<usize>,
) -> HalfSpaceConstant {
    let value = constant_from_integral(n, q, x_n, c.ln());
    let rel = coarse.map_or(0.0, |k| ((c - k) / c).abs());
    HalfSpaceConstant {
        value,
        method,
        diagnostics: Diagnostics {
            terms: None,
            nodes,
            error_estimate: value * rel / q,
        },
        direction_alpha: None,
        scale_exponent: scale_exponent(n, QNorm::Finite(q)),
        accuracy_warning: rel > 1e-8,
    }
}

/// `C` from the sphere form `|ζ_n|^q (2 - 2⟨ζ, l_α⟩)^γ`, in coordinates
/// with the pole at `l_α`.
pub fn ch_integral_c(n: usize, q: f64, alpha: f64, order: usize) -> Result<f64> {
    check_dimension(n)?;
    check_q(q)?;
    let alpha = fold_alpha(alpha);
    let (s, c) = (alpha.sin(), alpha.cos());
    let gamma = gamma_exp(n, q);
    let spec = SingularIntegrand {
        f: |u: f64, w: f64| (2.0 * (1.0 - w)).max(0.0).powf(gamma) * (w * c - u * s).abs().powf(q),
        cusp: Some(LineCusp {
            a: -s,
            b: c,
            d: 0.0,
            power: q,
        }),
        pole_power: gamma,
        splits: Vec::new(),
    };
    let nf = n as f64;
    let scale = -(nf - 1.0) * (2.0 * q - 1.0) * 2f64.ln();
    Ok(sphere_integral_singular(n, &spec, order)? * scale.exp() * sphere_area(n - 1))
}

/// `C` from the form `2^{-(n-1)q} ∫ |⟨η, l_α⟩|^q (1 + η_n)^γ dS(η)`, with
/// the pole at `-e_n`. Equal to [`ch_integral_c`] by `|ζ - l|² = 2 - 2⟨ζ, l⟩`
/// after a reflection; kept as a cross-check. Unlike the other routes it
/// does not fold `α` into `[0, π/2]`.
pub fn ch_integral_c_pole_form(n: usize, q: f64, alpha: f64, order: usize) -> Result<f64> {
    check_dimension(n)?;
    check_q(q)?;
    let (s, c) = (alpha.sin(), alpha.cos());
    let gamma = gamma_exp(n, q);
    // v = -η_n
    let spec = SingularIntegrand {
        f: |u: f64, v: f64| (1.0 - v).max(0.0).powf(gamma) * (u * s - v * c).abs().powf(q),
        cusp: Some(LineCusp {
            a: s,
            b: -c,
            d: 0.0,
            power: q,
        }),
        pole_power: gamma,
        splits: Vec::new(),
    };
    let scale = -(n as f64 - 1.0) * q * 2f64.ln();
    Ok(sphere_integral_singular(n, &spec, order)? * scale.exp() * sphere_area(n - 1))
}

/// `𝐂(x; l_α)` by quadrature of the sphere form.
pub fn ch_integral_sphere(cfg: &HalfSpaceConfig, order: usize) -> Result<HalfSpaceConstant> {
    let q = finite_q(cfg.q)?;
    let c = ch_integral_c(cfg.n, q, cfg.alpha, order)?;
    let coarse = ch_integral_c(cfg.n, q, cfg.alpha, (order / 2).max(8))?;
    Ok(finish(cfg.n, q, cfg.x_n, c, Some(coarse), Method::Quadrature, Some(order)))
}

/// `∫_{R^{n-1}} f(y') dV(y')` about the foot point of `x = x_n e_n` for
/// integrands containing `|⟨∇P(x, y'), l_α⟩|^s` and decaying like that
/// factor does.
///
/// Polar coordinates `y' = r (c e_{n-1} + √(1-c²) e_{n-2})` with
/// `r = x_n tan(θ/2)`. In these variables the zero set of the gradient
/// component is `c sin α sin θ = cos α cos θ`: it is crossed by the inner
/// `c` integral for `θ` between `π/2 ∓ α`, and those two points are where
/// the outer integrand fails to be smooth.
pub(crate) fn euclidean_cusp_integral(
    n: usize,
    x_n: f64,
    alpha: f64,
    s: f64,
    order: usize,
    f: impl Fn(&[f64]) -> f64,
) -> Result<f64> {
    check_dimension(n)?;
    check_height(x_n)?;
    if !(0.0..=PI / 2.0).contains(&alpha) {
        return Err(domain("alpha must be folded into [0, π/2]"));
    }
    let nf = n as f64;
    let (sa, ca) = (alpha.sin(), alpha.cos());
    let m = (nf - 4.0) / 2.0;
    // behaviour (π - θ)^tail at the far end, θ^(n-2) at the foot point
    let tail = (2.0 * nf - 2.0) * s - nf;
    let foot = nf - 2.0;
    const AXIS: f64 = 1e-14;

    // (lo, hi, exponent at hi, exponent at lo, grade, inner cusp)
    let half = PI / 2.0;
    let pieces: Vec<(f64, f64, f64, f64, Grade, bool)> = if sa < AXIS {
        vec![
            (0.0, half, s, foot, Grade::None, false),
            (half, PI, tail, s, Grade::None, false),
        ]
    } else if ca < AXIS {
        vec![(0.0, PI, tail + s, foot + s, Grade::None, true)]
    } else {
        vec![
            (0.0, half - alpha, 0.0, foot, Grade::Hi, false),
            (half - alpha, half + alpha, 0.0, 0.0, Grade::Both, true),
            (half + alpha, PI, tail, 0.0, Grade::Lo, false),
        ]
    };

    let y = RefCell::new(vec![0.0; n - 1]);
    let mut acc = CompensatedSum::default();
    for (lo, hi, ea, eb, grade, inner_cusp) in pieces {
        for node in piece_nodes(lo, hi, ea, eb, grade, order)? {
            let theta = node.x;
            let tau = if hi == PI && theta > half {
                1.0 / (0.5 * node.to_hi).tan()
            } else {
                (0.5 * theta).tan()
            };
            let r = x_n * tau;
            let jac = r.powi(n as i32 - 2) * x_n * (1.0 + tau * tau) / 2.0;
            let g = |c: f64| {
                let mut y = y.borrow_mut();
                y.fill(0.0);
                y[n - 2] = r * c;
                y[n - 3] = r * (1.0 - c * c).max(0.0).sqrt();
                f(&y)
            };
            let inner = if inner_cusp {
                let c_star = ca * (1.0 - tau * tau) / (2.0 * tau * sa);
                inner_cusp_integral(m, c_star, s, order, &g)?
            } else {
                cached_rule(m, m, order)?.integrate(g)
            };
            let mut ln = jac.ln();
            if ea != 0.0 {
                ln -= ea * node.to_hi.ln();
            }
            if eb != 0.0 {
                ln -= eb * node.from_lo.ln();
            }
            if inner != 0.0 {
                acc.add(node.weight * ln.exp() * inner);
            }
        }
    }
    let area = if n == 3 { 2.0 } else { sphere_area(n - 3) };
    Ok(area * acc.value())
}

/// `∫_{R^{n-1}} |⟨∇P(x, y'), l_α⟩|^q dV(y')` with the analytic kernel gradient.
fn euclidean_integral(n: usize, q: f64, x_n: f64, alpha: f64, order: usize) -> Result<f64> {
    let alpha = fold_alpha(alpha);
    let mut x = vec![0.0; n];
    x[n - 1] = x_n;
    let mut l = vec![0.0; n];
    l[n - 2] = alpha.sin();
    l[n - 1] = alpha.cos();
    euclidean_cusp_integral(n, x_n, alpha, q, order, |y: &[f64]| {
        let g = kernel_halfspace_gradient(&x, y).map_or(f64::NAN, |g| {
            g.iter().zip(&l).map(|(a, b)| a * b).sum::<f64>()
        });
        g.abs().powf(q)
    })
}

/// `𝐂(x; l_α)` straight from the integral over `R^{n-1}`; used as an
/// independent check of the sphere form.
pub fn ch_integral_euclidean(cfg: &HalfSpaceConfig, order: usize) -> Result<HalfSpaceConstant> {
    let q = finite_q(cfg.q)?;
    let integral = euclidean_integral(cfg.n, q, cfg.x_n, cfg.alpha, order)?;
    let coarse = euclidean_integral(cfg.n, q, cfg.x_n, cfg.alpha, (order / 2).max(8))?;
    // the integral already carries (n-1)c_n and x_n, so C = integral / ((n-1)c_n)^q x_n^{n(q-1)+1}
    let value = integral.powf(1.0 / q);
    let rel = ((integral - coarse) / integral).abs();
    Ok(HalfSpaceConstant {
        value,
        method: Method::Quadrature,
        diagnostics: Diagnostics {
            terms: None,
            nodes: Some(order),
            error_estimate: value * rel / q,
        },
        direction_alpha: None,
        scale_exponent: scale_exponent(cfg.n, cfg.q),
        accuracy_warning: rel > 1e-8,
    })
}

/// The two closed forms share `a = (n-1)(1-q)/2`, `b = (1-(n-1)(q-1))/2`
/// and `c = (q+n)/2`.
fn closed_form(n: usize, q: f64, x_n: f64, radial: bool) -> Result<HalfSpaceConstant> {
    check_dimension(n)?;
    check_q(q)?;
    check_height(x_n)?;
    let nf = n as f64;
    let a = (nf - 1.0) * (1.0 - q) / 2.0;
    let b = (1.0 - (nf - 1.0) * (q - 1.0)) / 2.0;
    let c = (q + nf) / 2.0;
    let spec = if radial {
        HypergeometricSpec::new(vec![a, b, (q + 1.0) / 2.0], vec![0.5, c], 1.0)?
    } else {
        HypergeometricSpec::new(vec![a, b], vec![c], 1.0)?
    };
    let series = hypergeometric(&spec, SeriesOptions::default())?;
    let ln_pre = ln_gamma_pos((q + 1.0) / 2.0) + ln_gamma_pos(nf / 2.0) + sphere_area(n - 1).ln()
        - 0.5 * PI.ln()
        - q * (nf - 1.0) * 2f64.ln()
        - ln_gamma_pos(c);
    let integral = ln_pre.exp() * series.value;
    let method = if radial {
        Method::ClosedFormRadial
    } else {
        Method::ClosedFormTangential
    };
    let mut out = finish(n, q, x_n, integral, None, method, None);
    out.diagnostics.terms = Some(series.terms);
    out.diagnostics.error_estimate = out.value * (series.error_estimate / series.value).abs() / q;
    out.direction_alpha = Some(if radial { 0.0 } else { PI / 2.0 });
    Ok(out)
}

/// `𝐂(x; ±e_n)` through `3F2(a, b, (q+1)/2; 1/2, (q+n)/2; 1)`.
pub fn ch_closed_radial(n: usize, q: f64, x_n: f64) -> Result<HalfSpaceConstant> {
    closed_form(n, q, x_n, true)
}

/// `𝐂(x; l)` for `l ⊥ e_n` through `2F1(a, b; (q+n)/2; 1)`.
pub fn ch_closed_tangential(n: usize, q: f64, x_n: f64) -> Result<HalfSpaceConstant> {
    closed_form(n, q, x_n, false)
}

/// `q = 1`: `2Γ(n/2) / (√π Γ((n-1)/2) x_n)` in every direction.
pub fn ch_unit_q_closed(n: usize, x_n: f64) -> Result<f64> {
    check_dimension(n)?;
    check_height(x_n)?;
    let nf = n as f64;
    Ok(2.0 * (ln_gamma_pos(nf / 2.0) - ln_gamma_pos((nf - 1.0) / 2.0)).exp() / (PI.sqrt() * x_n))
}

/// `q = n/(n-1)`: direction independent, with
/// `C = 2^{1-n} π^{(n-1)/2} Γ((2n-1)/(2n-2)) / Γ(n²/(2n-2))`.
pub fn ch_critical_closed(n: usize, x_n: f64) -> Result<f64> {
    check_dimension(n)?;
    check_height(x_n)?;
    let nf = n as f64;
    let q = nf / (nf - 1.0);
    let ln_c = (1.0 - nf) * 2f64.ln() + 0.5 * (nf - 1.0) * PI.ln()
        + ln_gamma_pos((2.0 * nf - 1.0) / (2.0 * nf - 2.0))
        - ln_gamma_pos(nf * nf / (2.0 * nf - 2.0));
    Ok(constant_from_integral(n, q, x_n, ln_c))
}

/// `q = 2`, radial direction:
/// `(n-1) c_n x_n^{-(n+1)/2} (4π^{(n-1)/2} Γ((n+3)/2) Γ((3n-3)/2) / (Γ((n-1)/2) Γ(2n)))^{1/2}`.
pub fn ch_q2_radial_closed(n: usize, x_n: f64) -> Result<f64> {
    check_dimension(n)?;
    check_height(x_n)?;
    let nf = n as f64;
    let ln_c = 4f64.ln() + 0.5 * (nf - 1.0) * PI.ln() + ln_gamma_pos((nf + 3.0) / 2.0)
        + ln_gamma_pos((3.0 * nf - 3.0) / 2.0)
        - ln_gamma_pos((nf - 1.0) / 2.0)
        - ln_gamma_pos(2.0 * nf);
    Ok(constant_from_integral(n, 2.0, x_n, ln_c))
}

/// `q = ∞`: `(n-1) c_n / x_n^n`, attained at `l = ±e_n`.
pub fn ch_infinity(n: usize, x_n: f64) -> Result<HalfSpaceConstant> {
    check_dimension(n)?;
    check_height(x_n)?;
    let value = (n as f64 - 1.0) * halfspace_normalization(n) / x_n.powi(n as i32);
    Ok(HalfSpaceConstant {
        value,
        method: Method::ClosedFormRadial,
        diagnostics: Diagnostics::default(),
        direction_alpha: Some(0.0),
        scale_exponent: n as f64,
        accuracy_warning: false,
    })
}

/// Objective whose maximum over `θ ∈ [-π/2, π/2]` is the `q = ∞` constant
/// in direction `l_α`, relative to `(n-1) c_n / x_n^n`. Here `θ` is the
/// signed polar angle of `ξ` in the upper hemisphere within the plane of
/// `e_n` and `l_α`; `⟨e_n - 2ξ_n ξ, l_α⟩ = -cos(2θ - α)`.
pub fn infinity_objective_halfspace(n: usize, alpha: f64) -> impl Fn(f64) -> f64 {
    move |theta: f64| (2.0 * theta - alpha).cos().abs() * theta.cos().powi(2 * n as i32 - 2)
}

/// Grid size for the directional `q = ∞` maximization.
pub const SUP_GRID: usize = 512;

/// `𝐂(x; l_α)` for `q = ∞` by maximizing over the hemisphere.
pub fn ch_infinity_directional(n: usize, x_n: f64, alpha: f64) -> Result<HalfSpaceConstant> {
    check_dimension(n)?;
    check_height(x_n)?;
    if !(0.0..=PI).contains(&alpha) {
        return Err(domain("alpha must lie in [0, π]"));
    }
    let (_, sup) = maximize_1d(infinity_objective_halfspace(n, alpha), -PI / 2.0, PI / 2.0, SUP_GRID, 1e-13)?;
    let base = ch_infinity(n, x_n)?;
    Ok(HalfSpaceConstant {
        value: base.value * sup,
        method: Method::SupFormula,
        diagnostics: Diagnostics {
            terms: None,
            nodes: Some(SUP_GRID),
            error_estimate: base.value * 1e-14,
        },
        direction_alpha: Some(alpha),
        ..base
    })
}

/// `𝐂(x; l_α)` by the default route: the sphere form for finite `q`, the
/// hemisphere maximization for `q = ∞`.
pub fn ch_directional(cfg: &HalfSpaceConfig, order: usize) -> Result<HalfSpaceConstant> {
    match cfg.q {
        QNorm::Infinity => ch_infinity_directional(cfg.n, cfg.x_n, cfg.alpha),
        QNorm::Finite(_) => ch_integral_sphere(cfg, order),
    }
}

/// Which hypergeometric closed form reproduced a quadrature value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FormMatch {
    #[serde(rename = "3F2")]
    ThreeFTwo,
    #[serde(rename = "2F1")]
    TwoFOne,
    /// Both agree, which happens when they coincide.
    Both,
    Neither,
}

/// Outcome of comparing the `α = 0` and `α = π/2` quadratures with the
/// `3F2(…; 1)` and `2F1(…; 1)` closed forms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdjudicationReport {
    pub n: usize,
    pub q: f64,
    pub tolerance: f64,
    /// Constants per unit `x_n`.
    pub quadrature_radial: f64,
    pub quadrature_tangential: f64,
    pub form_3f2: f64,
    pub form_2f1: f64,
    pub radial_match: FormMatch,
    pub tangential_match: FormMatch,
    /// Each direction is matched by exactly one form.
    pub resolved: bool,
    /// The attribution `3F2 ↔ l = ±e_n`, `2F1 ↔ l ⊥ e_n` holds.
    pub radial_is_3f2: bool,
    /// The opposite attribution `2F1 ↔ l = ±e_n`, `3F2 ↔ l ⊥ e_n` holds.
    pub swapped_attribution_holds: bool,
    pub verdict: String,
}

/// Adjudication tolerance, relative.
pub const ADJUDICATION_TOLERANCE: f64 = 1e-8;

/// Computes both directions by quadrature and reports which closed form
/// matches each.
pub fn adjudicate_halfspace_forms(n: usize, q: f64, order: usize) -> Result<AdjudicationReport> {
    check_dimension(n)?;
    check_q(q)?;
    let tol = ADJUDICATION_TOLERANCE;
    let at = |alpha: f64| -> Result<f64> {
        Ok(ch_integral_sphere(&HalfSpaceConfig::new(n, QNorm::Finite(q), 1.0, alpha)?, order)?.value)
    };
    let quadrature_radial = at(0.0)?;
    let quadrature_tangential = at(PI / 2.0)?;
    let form_3f2 = ch_closed_radial(n, q, 1.0)?.value;
    let form_2f1 = ch_closed_tangential(n, q, 1.0)?.value;
    let close = |a: f64, b: f64| ((a - b) / b).abs() < tol;
    let classify = |v: f64| match (close(v, form_3f2), close(v, form_2f1)) {
        (true, true) => FormMatch::Both,
        (true, false) => FormMatch::ThreeFTwo,
        (false, true) => FormMatch::TwoFOne,
        (false, false) => FormMatch::Neither,
    };
    let radial_match = classify(quadrature_radial);
    let tangential_match = classify(quadrature_tangential);
    let single = |m: FormMatch| matches!(m, FormMatch::ThreeFTwo | FormMatch::TwoFOne);
    let resolved = single(radial_match) && single(tangential_match);
    let radial_is_3f2 =
        resolved && radial_match == FormMatch::ThreeFTwo && tangential_match == FormMatch::TwoFOne;
    let swapped_attribution_holds =
        resolved && radial_match == FormMatch::TwoFOne && tangential_match == FormMatch::ThreeFTwo;
    let verdict = if radial_match == FormMatch::Both && tangential_match == FormMatch::Both {
        "degenerate: forms coincide".to_string()
    } else if radial_is_3f2 {
        "radial direction matches 3F2, tangential direction matches 2F1".to_string()
    } else if swapped_attribution_holds {
        "radial direction matches 2F1, tangential direction matches 3F2".to_string()
    } else {
        format!("unresolved: radial {radial_match:?}, tangential {tangential_match:?}")
    };
    Ok(AdjudicationReport {
        n,
        q,
        tolerance: tol,
        quadrature_radial,
        quadrature_tangential,
        form_3f2,
        form_2f1,
        radial_match,
        tangential_match,
        resolved,
        radial_is_3f2,
        swapped_attribution_holds,
        verdict,
    })
}

/// Points of the `α` grid for suprema in the gap regime.
pub const GAP_GRID: usize = 65;

/// `𝐂(x) = sup_l 𝐂(x; l)`.
pub fn sharp_constant_halfspace(n: usize, q: QNorm, x_n: f64, order: usize) -> Result<HalfSpaceConstant> {
    check_dimension(n)?;
    check_height(x_n)?;
    match classify_regime(n, q) {
        Regime::Radial { k0: None } => ch_infinity(n, x_n),
        Regime::Radial { .. } => ch_closed_radial(n, finite_q(q)?, x_n),
        Regime::Tangential => ch_closed_tangential(n, finite_q(q)?, x_n),
        Regime::Gap { .. } => gap_supremum(n, finite_q(q)?, x_n, order),
    }
}

fn gap_supremum(n: usize, q: f64, x_n: f64, order: usize) -> Result<HalfSpaceConstant> {
    let failure = RefCell::new(None);
    let objective = |alpha: f64| match ch_integral_c(n, q, alpha, order) {
        Ok(c) => c,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };
    let (alpha, c) = maximize_1d(objective, 0.0, PI / 2.0, GAP_GRID, 1e-7)?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let mut out = finish(n, q, x_n, c, None, Method::NumericSup, Some(GAP_GRID));
    out.diagnostics.error_estimate = out.value * 1e-12;
    out.direction_alpha = Some(alpha);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn cfg(n: usize, q: f64, x_n: f64, alpha: f64) -> HalfSpaceConfig {
        HalfSpaceConfig::new(n, QNorm::Finite(q), x_n, alpha).unwrap()
    }

    #[test]
    fn unit_q_examples() {
        let r = ch_integral_sphere(&cfg(3, 1.0, 2.0, 0.3), 64).unwrap();
        assert_relative_eq!(r.value, 0.5, max_relative = 1e-13);
        assert_relative_eq!(ch_unit_q_closed(3, 2.0).unwrap(), 0.5, max_relative = 1e-15);
        let vals: Vec<f64> = [0.0, PI / 4.0, PI / 2.0]
            .iter()
            .map(|&a| ch_integral_sphere(&cfg(4, 1.0, 1.0, a), 64).unwrap().value)
            .collect();
        for v in &vals {
            assert_relative_eq!(*v, vals[0], max_relative = 1e-10);
        }
        let e = ch_integral_euclidean(&cfg(3, 1.0, 1.0, 0.0), 64).unwrap();
        assert_relative_eq!(e.value, 1.0, max_relative = 1e-10);
        for n in 3..7 {
            let r = ch_closed_radial(n, 1.0, 1.3).unwrap().value;
            let t = ch_closed_tangential(n, 1.0, 1.3).unwrap().value;
            assert_relative_eq!(r, ch_unit_q_closed(n, 1.3).unwrap(), max_relative = 1e-14);
            assert_relative_eq!(t, r, max_relative = 1e-14);
        }
    }

    #[test]
    fn q2_radial_values() {
        // mpmath evaluations of the closed expression
        let expected = [0.412025815491402219, 0.533821907562882794, 0.680575163955858808];
        for (n, want) in (3..=5).zip(expected) {
            assert_relative_eq!(ch_q2_radial_closed(n, 1.0).unwrap(), want, max_relative = 1e-14);
            let quad = ch_integral_sphere(&cfg(n, 2.0, 1.0, 0.0), 64).unwrap().value;
            assert_relative_eq!(quad, want, max_relative = 1e-12);
            assert_relative_eq!(ch_closed_radial(n, 2.0, 1.0).unwrap().value, want, max_relative = 1e-13);
        }
        let sharp = sharp_constant_halfspace(3, QNorm::Finite(2.0), 1.0, 64).unwrap();
        assert_relative_eq!(sharp.value, expected[0], max_relative = 1e-13);
    }

    #[test]
    fn integral_values() {
        // mpmath quadrature of the sphere form
        let cases = [
            (3, 1.2, 0.97864643665920166, 1.04221245047425344),
            (3, 2.0, 2.0 * PI / 15.0, PI / 10.0),
            (4, 1.2, 0.571306621329003, 0.594598636841518),
            (4, 2.0, 0.192765710958777, 0.115659426575266),
        ];
        for (n, q, radial, tangential) in cases {
            assert_relative_eq!(ch_integral_c(n, q, 0.0, 128).unwrap(), radial, max_relative = 1e-12);
            assert_relative_eq!(ch_integral_c(n, q, PI / 2.0, 128).unwrap(), tangential, max_relative = 1e-12);
        }
    }

    #[test]
    fn critical_exponent_is_direction_free() {
        for n in 3..=5 {
            let want = ch_critical_closed(n, 1.0).unwrap();
            let q = n as f64 / (n as f64 - 1.0);
            for alpha in [0.0, 0.6, PI / 2.0] {
                let got = ch_integral_sphere(&cfg(n, q, 1.0, alpha), 128).unwrap().value;
                assert_relative_eq!(got, want, max_relative = 1e-11);
            }
            assert_relative_eq!(ch_closed_radial(n, q, 1.0).unwrap().value, want, max_relative = 1e-12);
            assert_relative_eq!(ch_closed_tangential(n, q, 1.0).unwrap().value, want, max_relative = 1e-12);
        }
    }

    #[test]
    fn pole_form_agrees() {
        for (n, q, alpha) in [(3, 1.5, 0.4), (4, 2.0, 1.2), (5, 1.2, PI / 2.0), (3, 3.0, 0.0)] {
            let a = ch_integral_c(n, q, alpha, 96).unwrap();
            let b = ch_integral_c_pole_form(n, q, alpha, 96).unwrap();
            assert_relative_eq!(a, b, max_relative = 1e-11);
        }
    }

    #[test]
    fn routes_agree() {
        for (n, q, alpha) in [(3, 1.5, 0.0), (3, 2.0, PI / 4.0), (4, 1.2, PI / 2.0), (5, 3.0, 0.9)] {
            let s = ch_integral_sphere(&cfg(n, q, 1.0, alpha), 64).unwrap().value;
            let e = ch_integral_euclidean(&cfg(n, q, 1.0, alpha), 64).unwrap();
            assert_relative_eq!(s, e.value, max_relative = 1e-10);
            assert!(!e.accuracy_warning);
        }
    }

    #[test]
    fn infinity_examples() {
        assert_relative_eq!(ch_infinity(3, 1.0).unwrap().value, 2.0 / PI, max_relative = 1e-15);
        assert_relative_eq!(ch_infinity(4, 2.0).unwrap().value, ch_infinity(4, 1.0).unwrap().value / 16.0, max_relative = 1e-15);
        let d = ch_infinity_directional(3, 1.0, 0.0).unwrap();
        assert_relative_eq!(d.value, 2.0 / PI, max_relative = 1e-14);
        for k in 0..=32 {
            let alpha = PI / 2.0 * k as f64 / 32.0;
            for n in 3..=5 {
                let v = ch_infinity_directional(n, 1.0, alpha).unwrap().value;
                assert!(v <= ch_infinity(n, 1.0).unwrap().value * (1.0 + 1e-14));
            }
        }
    }

    #[test]
    fn adjudication() {
        for (n, q) in [(3, 1.2), (3, 2.0), (4, 1.2), (4, 2.0)] {
            let r = adjudicate_halfspace_forms(n, q, 128).unwrap();
            assert!(r.resolved, "{r:?}");
            assert!(r.radial_is_3f2 && !r.swapped_attribution_holds, "{r:?}");
        }
        let r = adjudicate_halfspace_forms(3, 1.0, 64).unwrap();
        assert_eq!(r.verdict, "degenerate: forms coincide");
    }

    #[test]
    fn gap_supremum_reports_direction() {
        let r = sharp_constant_halfspace(5, QNorm::Finite(1.55), 1.0, 64).unwrap();
        assert_eq!(r.method, Method::NumericSup);
        let alpha = r.direction_alpha.unwrap();
        assert!((0.0..=PI / 2.0).contains(&alpha));
        let radial = ch_closed_radial(5, 1.55, 1.0).unwrap().value;
        let tangential = ch_closed_tangential(5, 1.55, 1.0).unwrap().value;
        assert!(r.value >= radial.max(tangential) * (1.0 - 1e-12));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn power_law_in_height(n in 3usize..6, q in 1.0f64..3.5, alpha in 0.0f64..PI, x_n in 0.1f64..5.0) {
            let one = ch_integral_sphere(&cfg(n, q, 1.0, alpha), 32).unwrap();
            let here = ch_integral_sphere(&cfg(n, q, x_n, alpha), 32).unwrap();
            let want = one.at_height(1.0, x_n);
            prop_assert!(((here.value - want) / want).abs() < 1e-12);
        }

        #[test]
        fn reflection_symmetry(n in 3usize..6, q in 1.0f64..3.5, alpha in 0.0f64..PI) {
            let a = ch_integral_c_pole_form(n, q, alpha, 64).unwrap();
            let b = ch_integral_c_pole_form(n, q, PI - alpha, 64).unwrap();
            prop_assert!(((a - b) / a).abs() < 1e-11, "{a} {b}");
        }
    }
}
