//! Gauss-Jacobi rules, integration over `S^{n-1}` of functions of two
//! coordinates, 1-D maximization and integration over `R^{n-1}`.
//!
//! Sphere integrals use the normalized measure `σ` with `σ(S^{n-1}) = 1`.

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::rc::Rc;

use crate::error::{domain, Error, Result};
use crate::geometry::check_dimension;
use crate::special::{ln_gamma_pos, CompensatedSum};

/// Weight function of a Gauss rule on `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RuleKind {
    /// Weight 1.
    Legendre,
    /// Weight `(1-x)^a (1+x)^b`, `a, b > -1`.
    Jacobi { a: f64, b: f64 },
}

impl RuleKind {
    fn exponents(self) -> (f64, f64) {
        match self {
            Self::Legendre => (0.0, 0.0),
            Self::Jacobi { a, b } => (a, b),
        }
    }

    /// `∫_{-1}^{1}` of the weight function.
    pub fn total_mass(self) -> f64 {
        let (a, b) = self.exponents();
        ((a + b + 1.0) * 2f64.ln() + ln_gamma_pos(a + 1.0) + ln_gamma_pos(b + 1.0)
            - ln_gamma_pos(a + b + 2.0))
        .exp()
    }
}

/// Gauss nodes (increasing) and positive weights.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub kind: RuleKind,
}

impl QuadratureRule {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// `Σ w_i f(x_i)`, compensated.
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        let mut acc = CompensatedSum::default();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc.add(w * f(*x));
        }
        acc.value()
    }
}

/// Builds the `order`-point Gauss rule for `kind`.
///
/// Nodes are the eigenvalues of the symmetric Jacobi matrix (implicit QL),
/// polished by Newton steps on the three-term recurrence; weights follow
/// from the Christoffel formula in terms of `P_{N-1}` at the nodes.
pub fn gauss_rule(kind: RuleKind, order: usize) -> Result<QuadratureRule> {
    if order < 1 {
        return Err(Error::InvalidParameter("quadrature order must be positive".into()));
    }
    let (a, b) = kind.exponents();
    if !(a > -1.0 && b > -1.0) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "Jacobi exponents must exceed -1, got ({a}, {b})"
        )));
    }
    let n = order;
    let (mut diag, mut off) = jacobi_matrix(a, b, n);
    let (alpha, beta_sqrt) = (diag.clone(), off.clone());
    let mass = kind.total_mass();
    tridiagonal_eigenvalues(&mut diag, &mut off)?;
    diag.sort_by(f64::total_cmp);

    let mut nodes = diag;
    for x in nodes.iter_mut() {
        for _ in 0..4 {
            let (p, dp, _) = orthonormal_eval(&alpha, &beta_sqrt, mass, *x);
            if dp == 0.0 || !dp.is_finite() {
                break;
            }
            let step = p / dp;
            let next = *x - step;
            if next.abs() >= 1.0 {
                break;
            }
            *x = next;
            if step.abs() <= 1e-17 {
                break;
            }
        }
    }
    for w in nodes.windows(2) {
        if !(w[0] < w[1]) {
            return Err(Error::Internal(format!(
                "Gauss nodes not strictly increasing for {kind:?}, order {order}"
            )));
        }
    }

    // Christoffel function: w_i = 1 / Σ_{k<N} p_k(x_i)² for orthonormal p_k.
    let weights: Vec<f64> = nodes
        .iter()
        .map(|&x| 1.0 / orthonormal_eval(&alpha, &beta_sqrt, mass, x).2)
        .collect();
    if weights.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
        return Err(Error::Internal(format!(
            "non-positive Gauss weight for {kind:?}, order {order}"
        )));
    }
    Ok(QuadratureRule {
        nodes,
        weights,
        kind,
    })
}

fn jacobi_matrix(a: f64, b: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let ab = a + b;
    let diag = (0..n)
        .map(|k| {
            let k = k as f64;
            if k == 0.0 {
                (b - a) / (ab + 2.0)
            } else {
                (b * b - a * a) / ((2.0 * k + ab) * (2.0 * k + ab + 2.0))
            }
        })
        .collect();
    let off = (1..n)
        .map(|k| {
            let k = k as f64;
            let beta = if k == 1.0 {
                4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab).powi(2) * (3.0 + ab))
            } else {
                let s = 2.0 * k + ab;
                4.0 * k * (k + a) * (k + b) * (k + ab) / (s * s * (s + 1.0) * (s - 1.0))
            };
            beta.sqrt()
        })
        .collect();
    (diag, off)
}

/// Eigenvalues of a symmetric tridiagonal matrix, overwriting `d`.
fn tridiagonal_eigenvalues(d: &mut [f64], e: &mut Vec<f64>) -> Result<()> {
    let n = d.len();
    e.push(0.0);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::Internal("QL iteration failed to converge".into()));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    e.pop();
    Ok(())
}

/// `(p_N, p_N', Σ_{k<N} p_k²)` for the orthonormal polynomials of the
/// recurrence `b_{k+1} p_{k+1} = (x - a_k) p_k - b_k p_{k-1}`.
fn orthonormal_eval(alpha: &[f64], beta_sqrt: &[f64], mass: f64, x: f64) -> (f64, f64, f64) {
    let n = alpha.len();
    let mut p_prev = 0.0;
    let mut d_prev = 0.0;
    let mut p = 1.0 / mass.sqrt();
    let mut d = 0.0;
    let mut squares = CompensatedSum::default();
    for k in 0..n {
        squares.add(p * p);
        // b_N is not part of the matrix; any positive value keeps the zeros.
        let b_next = if k + 1 < n { beta_sqrt[k] } else { 1.0 };
        let b_k = if k > 0 { beta_sqrt[k - 1] } else { 0.0 };
        let p_next = ((x - alpha[k]) * p - b_k * p_prev) / b_next;
        let d_next = ((x - alpha[k]) * d + p - b_k * d_prev) / b_next;
        p_prev = p;
        d_prev = d;
        p = p_next;
        d = d_next;
    }
    (p, d, squares.value())
}

thread_local! {
    static RULES: RefCell<HashMap<(usize, u64, u64), Rc<QuadratureRule>>> =
        RefCell::new(HashMap::new());
}

/// Memoized Jacobi rule; rules are immutable once built.
pub(crate) fn cached_rule(a: f64, b: f64, order: usize) -> Result<Rc<QuadratureRule>> {
    let key = (order, a.to_bits(), b.to_bits());
    if let Some(rule) = RULES.with(|r| r.borrow().get(&key).cloned()) {
        return Ok(rule);
    }
    let rule = Rc::new(gauss_rule(RuleKind::Jacobi { a, b }, order)?);
    RULES.with(|r| r.borrow_mut().insert(key, rule.clone()));
    Ok(rule)
}

/// A node of a rule mapped to `[lo, hi]`, with the distances to both ends
/// computed without cancellation.
#[derive(Debug, Clone, Copy)]
pub(crate) struct MappedNode {
    pub x: f64,
    pub from_lo: f64,
    pub to_hi: f64,
    pub weight: f64,
}

/// Nodes for `∫_lo^hi (hi-x)^a (x-lo)^b g(x) dx`; the weights already carry
/// the Jacobi factor, so only `g` needs to be supplied.
pub(crate) fn mapped_nodes(lo: f64, hi: f64, a: f64, b: f64, order: usize) -> Result<Vec<MappedNode>> {
    let rule = cached_rule(a, b, order)?;
    let half = 0.5 * (hi - lo);
    let scale = half.powf(1.0 + a + b);
    Ok(rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&t, &w)| {
            let from_lo = half * (1.0 + t);
            let to_hi = half * (1.0 - t);
            let x = if t < 0.0 { lo + from_lo } else { hi - to_hi };
            MappedNode {
                x,
                from_lo,
                to_hi,
                weight: w * scale,
            }
        })
        .collect())
}

/// `(n-2)/(2π)`, the normalization of the two-coordinate disk reduction.
fn disk_normalization(n: usize) -> f64 {
    (n as f64 - 2.0) / (2.0 * PI)
}

/// `∫_{S^{n-1}} f(η_{n-1}, η_n) dσ(η)` via `u = t √(1-v²)` and Gauss-Jacobi
/// in both variables, with the outer axis split at `v = 0`.
pub fn sphere_integral_2coord(n: usize, f: impl Fn(f64, f64) -> f64, order: usize) -> Result<f64> {
    check_dimension(n)?;
    let e = (n as f64 - 3.0) / 2.0;
    let m = n as f64 / 2.0 - 2.0;
    let inner = cached_rule(m, m, order)?;
    let mut acc = CompensatedSum::default();
    // [-1, 0]: (1+v)^e absorbed; [0, 1]: (1-v)^e absorbed.
    for (lo, hi, a, b) in [(-1.0, 0.0, 0.0, e), (0.0, 1.0, e, 0.0)] {
        for node in mapped_nodes(lo, hi, a, b, order)? {
            let v = node.x;
            let smooth = if lo < 0.0 { (1.0 - v).powf(e) } else { (1.0 + v).powf(e) };
            let r = ((1.0 - v) * (1.0 + v)).sqrt();
            let s = inner.integrate(|t| f(t * r, v));
            acc.add(node.weight * smooth * s);
        }
    }
    Ok(disk_normalization(n) * acc.value())
}

/// Zero set `a u + b v = d` of an affine function whose `|·|^power` is a
/// factor of a sphere integrand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineCusp {
    pub a: f64,
    pub b: f64,
    pub d: f64,
    pub power: f64,
}

/// Integrand description for [`sphere_integral_singular`].
pub struct SingularIntegrand<F> {
    /// Full integrand in `(u, v) = (η_{n-1}, η_n)`, including the factors below.
    pub f: F,
    /// `f` contains `|a u + b v - d|^power`.
    pub cusp: Option<LineCusp>,
    /// `f` contains `(1 - v)^pole_power`.
    pub pole_power: f64,
    /// Additional break points of the `v` axis in `(-1, 1)`.
    pub splits: Vec<f64>,
}

/// Clustering of nodes towards piece ends where the integrand has an
/// additive algebraic singularity that cannot be absorbed into a weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Grade {
    None,
    Lo,
    Hi,
    Both,
}

/// A node of a piece together with `1 - x` and `1 + x` computed from the
/// distances to the piece ends.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PieceNode {
    pub x: f64,
    pub one_minus: f64,
    pub one_plus: f64,
    pub from_lo: f64,
    pub to_hi: f64,
    pub weight: f64,
}

/// Nodes for `∫_lo^hi (hi-x)^a (x-lo)^b g(x) dx`. Graded ends must carry a
/// zero exponent; they are resolved by `x - lo ∝ y²` (one end) or a cubic
/// smoothstep (both ends).
pub(crate) fn piece_nodes(
    lo: f64,
    hi: f64,
    a: f64,
    b: f64,
    grade: Grade,
    order: usize,
) -> Result<Vec<PieceNode>> {
    let len = hi - lo;
    let finish = |x: f64, from_lo: f64, to_hi: f64, weight: f64| PieceNode {
        x,
        one_minus: (1.0 - hi) + to_hi,
        one_plus: (1.0 + lo) + from_lo,
        from_lo,
        to_hi,
        weight,
    };
    let nodes = match grade {
        Grade::None => mapped_nodes(lo, hi, a, b, order)?
            .into_iter()
            .map(|nd| finish(nd.x, nd.from_lo, nd.to_hi, nd.weight))
            .collect(),
        Grade::Lo => {
            debug_assert_eq!(b, 0.0);
            // x = lo + L y², hi - x = L (1-y)(1+y)
            mapped_nodes(0.0, 1.0, a, 0.0, order)?
                .into_iter()
                .map(|nd| {
                    let y = nd.x;
                    let from_lo = len * y * y;
                    let to_hi = len * nd.to_hi * (1.0 + y);
                    let w = nd.weight * 2.0 * len.powf(a + 1.0) * (1.0 + y).powf(a) * y;
                    let x = if y < 0.7 { lo + from_lo } else { hi - to_hi };
                    finish(x, from_lo, to_hi, w)
                })
                .collect()
        }
        Grade::Hi => {
            debug_assert_eq!(a, 0.0);
            mapped_nodes(0.0, 1.0, b, 0.0, order)?
                .into_iter()
                .map(|nd| {
                    let y = nd.x;
                    let to_hi = len * y * y;
                    let from_lo = len * nd.to_hi * (1.0 + y);
                    let w = nd.weight * 2.0 * len.powf(b + 1.0) * (1.0 + y).powf(b) * y;
                    let x = if y < 0.7 { hi - to_hi } else { lo + from_lo };
                    finish(x, from_lo, to_hi, w)
                })
                .collect()
        }
        Grade::Both => {
            debug_assert!(a == 0.0 && b == 0.0);
            mapped_nodes(0.0, 1.0, 0.0, 0.0, order)?
                .into_iter()
                .map(|nd| {
                    let (s, r) = (nd.from_lo, nd.to_hi);
                    let from_lo = len * s * s * (3.0 - 2.0 * s);
                    let to_hi = len * r * r * (3.0 - 2.0 * r);
                    let w = nd.weight * 6.0 * len * s * r;
                    let x = if s < 0.5 { lo + from_lo } else { hi - to_hi };
                    finish(x, from_lo, to_hi, w)
                })
                .collect()
        }
    };
    Ok(nodes)
}

fn is_non_negative_integer(x: f64) -> bool {
    x >= 0.0 && x.fract() == 0.0
}

/// `∫_{-1}^{1} (1-t²)^m g(t) dt` where `g` contains `|t - t*|^s`.
///
/// The cusp is absorbed on both sides. When `t*` is close to `±1` the piece
/// on the far side is split geometrically towards `t*`, because there the
/// weight `(1∓t)^m` of the opposite end sits just beyond the cusp.
pub(crate) fn inner_cusp_integral(
    m: f64,
    t_star: f64,
    s: f64,
    order: usize,
    g: &impl Fn(f64) -> f64,
) -> Result<f64> {
    let mut acc = CompensatedSum::default();
    let smooth_weight = is_non_negative_integer(m);
    // (lo, hi, a, b): cusp exponents where an end is t*, m where it is ±1
    let mut pieces: Vec<(f64, f64, f64, f64)> = Vec::new();
    for left in [true, false] {
        let gap = 1.0 - t_star.abs();
        let near_far_end = if left { t_star > 0.0 } else { t_star < 0.0 };
        if smooth_weight || !near_far_end || gap >= 0.25 {
            pieces.push(if left { (-1.0, t_star, s, m) } else { (t_star, 1.0, m, s) });
            continue;
        }
        let sign = if left { -1.0 } else { 1.0 };
        let mut cuts = vec![t_star];
        let mut step = gap;
        while (t_star + sign * step).abs() < 0.5 || (t_star + sign * step) * sign < 0.0 {
            cuts.push(t_star + sign * step);
            step *= 4.0;
            if t_star + sign * step <= -0.5 && left || t_star + sign * step >= 0.5 && !left {
                break;
            }
        }
        cuts.push(sign);
        for (k, w) in cuts.windows(2).enumerate() {
            let (p0, p1) = (w[0], w[1]);
            let last = k + 2 == cuts.len();
            let (lo, hi) = if left { (p1, p0) } else { (p0, p1) };
            let cusp_exp = if k == 0 { s } else { 0.0 };
            let end_exp = if last { m } else { 0.0 };
            pieces.push(if left { (lo, hi, cusp_exp, end_exp) } else { (lo, hi, end_exp, cusp_exp) });
        }
    }
    for (lo, hi, a, b) in pieces {
        if !(hi > lo) {
            continue;
        }
        for nd in piece_nodes(lo, hi, a, b, Grade::None, order)? {
            let mut ln = m * (nd.one_minus.ln() + nd.one_plus.ln());
            if a != 0.0 {
                ln -= a * nd.to_hi.ln();
            }
            if b != 0.0 {
                ln -= b * nd.from_lo.ln();
            }
            let val = g(nd.x);
            if val != 0.0 {
                acc.add(nd.weight * ln.exp() * val);
            }
        }
    }
    Ok(acc.value())
}

/// `∫_{S^{n-1}} f(η_{n-1}, η_n) dσ` for integrands with a non-smooth factor
/// `|a u + b v - d|^s` and a power `(1-v)^γ` at the pole.
///
/// In the reduction `u = t √(1-v²)` both factors are divided out of `f` and
/// absorbed into Gauss-Jacobi weights: the cusp becomes a break point
/// `t*(v)` of the inner variable (or of `v` itself when `a = 0`), and the
/// `v` axis is split, with graded nodes, where the line meets the circle.
pub fn sphere_integral_singular<F>(n: usize, spec: &SingularIntegrand<F>, order: usize) -> Result<f64>
where
    F: Fn(f64, f64) -> f64,
{
    check_dimension(n)?;
    let e = (n as f64 - 3.0) / 2.0;
    let m = n as f64 / 2.0 - 2.0;
    let pole = spec.pole_power;
    if !(pole > -1.0 - e) {
        return Err(domain("pole power makes the integral diverge"));
    }

    let mut cusp = spec.cusp;
    let mut vertical = None;
    if let Some(c) = cusp {
        if !(c.power >= 0.0) {
            return Err(domain("cusp power must be non-negative"));
        }
        let scale = c.a.abs() + c.b.abs() + c.d.abs();
        if c.power == 0.0 || scale == 0.0 {
            cusp = None;
        } else if c.a.abs() <= 1e-15 * scale {
            if c.b.abs() <= 1e-15 * scale {
                cusp = None;
            } else {
                vertical = Some(c.d / c.b);
            }
        }
    }

    let mut tangencies = Vec::new();
    if let (Some(c), None) = (cusp, vertical) {
        // (a² + b²) v² - 2bd v + d² - a² = 0
        let qa = c.a * c.a + c.b * c.b;
        let qb = -2.0 * c.b * c.d;
        let qc = c.d * c.d - c.a * c.a;
        let disc = qb * qb - 4.0 * qa * qc;
        if disc > 0.0 {
            let r1 = (-qb - disc.sqrt().copysign(qb)) / 2.0;
            for root in [r1 / qa, if r1 != 0.0 { qc / r1 } else { 0.0 }] {
                if root.abs() < 1.0 - 1e-14 {
                    tangencies.push(root);
                }
            }
        }
    }

    let mut points = vec![-1.0, 1.0];
    points.extend(spec.splits.iter().copied().filter(|s| s.abs() < 1.0));
    points.extend(tangencies.iter().copied());
    if let Some(vs) = vertical {
        if vs.abs() < 1.0 {
            points.push(vs);
        }
    }
    points.sort_by(f64::total_cmp);
    points.dedup_by(|x, y| (*x - *y).abs() < 1e-14);
    let near = |p: f64, q: f64| (p - q).abs() < 1e-14;
    let is_tangency = |p: f64| tangencies.iter().any(|&r| near(p, r));
    let is_vertical = |p: f64| vertical.is_some_and(|vs| near(p, vs));

    let mut acc = CompensatedSum::default();
    for piece in points.windows(2) {
        let (lo, hi) = (piece[0], piece[1]);
        let at_top = hi == 1.0;
        let at_bottom = lo == -1.0;
        let mid = 0.5 * (lo + hi);
        let inner_cusp = match (cusp, vertical) {
            (Some(c), None) => ((c.d - c.b * mid) / (c.a * (1.0 - mid * mid).sqrt())).abs() < 1.0,
            _ => false,
        };
        let power = cusp.map_or(0.0, |c| c.power);

        let mut ea = if at_top { e + pole } else { 0.0 };
        let mut eb = if at_bottom { e } else { 0.0 };
        if inner_cusp {
            // |a| √(1-v²) |t - t*| carries (1∓v)^{s/2} into the outer weight
            if at_top {
                ea += power / 2.0;
            }
            if at_bottom {
                eb += power / 2.0;
            }
        }
        if is_vertical(hi) || (at_top && vertical.is_some_and(|vs| near(vs, 1.0))) {
            ea += power;
        }
        if is_vertical(lo) || (at_bottom && vertical.is_some_and(|vs| near(vs, -1.0))) {
            eb += power;
        }
        let grade = match (is_tangency(lo), is_tangency(hi)) {
            (false, false) => Grade::None,
            (true, false) if eb == 0.0 => Grade::Lo,
            (false, true) if ea == 0.0 => Grade::Hi,
            (true, true) if ea == 0.0 && eb == 0.0 => Grade::Both,
            _ => Grade::None,
        };

        for node in piece_nodes(lo, hi, ea, eb, grade, order)? {
            let v = node.x;
            let chord = (node.one_minus * node.one_plus).sqrt();
            let f_t = |t: f64| (spec.f)(t * chord, v);
            let inner = match cusp {
                Some(c) if inner_cusp => {
                    let t_star = (c.d - c.b * v) / (c.a * chord);
                    inner_cusp_integral(m, t_star, c.power, order, &f_t)?
                }
                _ => cached_rule(m, m, order)?.integrate(f_t),
            };
            // measure (1-v²)^e over the absorbed outer weight
            let mut ln = e * (node.one_minus.ln() + node.one_plus.ln());
            if ea != 0.0 {
                ln -= ea * node.to_hi.ln();
            }
            if eb != 0.0 {
                ln -= eb * node.from_lo.ln();
            }
            acc.add(node.weight * ln.exp() * inner);
        }
    }
    Ok(disk_normalization(n) * acc.value())
}

/// Grid scan followed by golden-section refinement of the best bracket.
///
/// Returns `(argmax, max)`.
pub fn maximize_1d(
    g: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    grid: usize,
    refine_tol: f64,
) -> Result<(f64, f64)> {
    if !(lo < hi) {
        return Err(Error::InvalidParameter(format!("empty interval [{lo}, {hi}]")));
    }
    if grid < 16 {
        return Err(Error::InvalidParameter("grid must have at least 16 points".into()));
    }
    let step = (hi - lo) / (grid - 1) as f64;
    let at = |i: usize| if i == grid - 1 { hi } else { lo + step * i as f64 };
    let (mut best_i, mut best) = (0, g(lo));
    for i in 1..grid {
        let val = g(at(i));
        if val > best {
            best = val;
            best_i = i;
        }
    }
    let mut a = at(best_i.saturating_sub(1));
    let mut b = at((best_i + 1).min(grid - 1));
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    let tol = refine_tol.max(1e-15 * (hi - lo));
    while (b - a).abs() > tol {
        if gc >= gd {
            b = d;
            d = c;
            gd = gc;
            c = b - ratio * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + ratio * (b - a);
            gd = g(d);
        }
    }
    let candidate = 0.5 * (a + b);
    let val = g(candidate);
    let mut out = (at(best_i), best);
    for (x, v) in [(c, gc), (d, gd), (candidate, val)] {
        if v > out.1 {
            out = (x, v);
        }
    }
    Ok(out)
}

/// Value of an integral over `R^{n-1}` with a truncation-based accuracy check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialIntegral {
    pub value: f64,
    /// Difference to the same rule at half the order.
    pub error_estimate: f64,
    /// Set when the two orders disagree beyond `1e-8` relative.
    pub accuracy_warning: bool,
}

/// `|S^{k}|`, the unnormalized area of the unit `k`-sphere.
pub fn sphere_area(k: usize) -> f64 {
    let d = (k + 1) as f64;
    2.0 * (0.5 * d * PI.ln() - ln_gamma_pos(0.5 * d)).exp()
}

/// `∫_{R^{n-1}} h(r, ψ) dV` around the foot point of `x = x_n e_n`, where
/// `r = |y' - x'|` and `ψ` is the angle between `y' - x'` and `e_{n-1}`.
///
/// The radius is mapped by `r = x_n tan(θ/2)` onto `[0, π)`; the angle
/// variable is `cos ψ` with Gauss-Jacobi weight `(1 - cos²ψ)^{(n-4)/2}`.
pub fn radial_halfspace_integral(
    n: usize,
    x_n: f64,
    h: impl Fn(f64, f64) -> f64,
    order: usize,
) -> Result<RadialIntegral> {
    check_dimension(n)?;
    if !(x_n > 0.0) {
        return Err(domain("x_n must be positive"));
    }
    let eval = |order: usize| -> Result<f64> {
        let k = (n as f64 - 4.0) / 2.0;
        let angular = cached_rule(k, k, order.max(2))?;
        let radial = gauss_rule(RuleKind::Legendre, order.max(2))?;
        let area = if n == 3 { 2.0 } else { sphere_area(n - 3) };
        let mut acc = CompensatedSum::default();
        for (t, w) in radial.nodes.iter().zip(&radial.weights) {
            let theta = 0.5 * PI * (1.0 + t);
            let half = 0.5 * theta;
            let r = x_n * half.tan();
            let dr = x_n / (2.0 * half.cos().powi(2));
            let ang = angular.integrate(|c| h(r, c.clamp(-1.0, 1.0).acos()));
            acc.add(w * 0.5 * PI * dr * r.powi(n as i32 - 2) * ang);
        }
        Ok(area * acc.value())
    };
    let value = eval(order)?;
    let coarse = eval(order / 2)?;
    let error_estimate = (value - coarse).abs();
    Ok(RadialIntegral {
        value,
        error_estimate,
        accuracy_warning: error_estimate > 1e-8 * value.abs().max(1e-300),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use crate::special::gamma;

    #[test]
    fn legendre_examples() {
        let r = gauss_rule(RuleKind::Legendre, 2).unwrap();
        assert_relative_eq!(r.integrate(|x| x * x), 2.0 / 3.0, max_relative = 1e-15);
        let r = gauss_rule(RuleKind::Legendre, 64).unwrap();
        let exact = std::f64::consts::E - 1.0 / std::f64::consts::E;
        assert!((r.integrate(f64::exp) - exact).abs() < 1e-14);
    }

    #[test]
    fn chebyshev_mass() {
        for m in [2, 7, 33, 128] {
            let r = gauss_rule(RuleKind::Jacobi { a: -0.5, b: -0.5 }, m).unwrap();
            assert_relative_eq!(r.integrate(|_| 1.0), PI, max_relative = 1e-13);
            // Chebyshev nodes are known in closed form
            for (i, x) in r.nodes.iter().enumerate() {
                let exact = -((2 * i + 1) as f64 * PI / (2 * m) as f64).cos();
                assert!((x - exact).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn rules_are_exact_and_well_formed() {
        for &(a, b) in &[(0.0, 0.0), (0.5, -0.5), (2.2, 0.0), (-0.5, 1.7), (0.0, 3.5)] {
            for order in [2, 5, 16, 128, 300] {
                let kind = RuleKind::Jacobi { a, b };
                let r = gauss_rule(kind, order).unwrap();
                assert!(r.weights.iter().all(|w| *w > 0.0));
                assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
                assert!(r.nodes[0] > -1.0 && r.nodes[order - 1] < 1.0);
                let mass: f64 = r.weights.iter().sum();
                assert_relative_eq!(mass, kind.total_mass(), max_relative = 1e-12);
            }
            // Moments ∫(1-x)^a(1+x)^b (1+x)^k = 2^{a+b+k+1} B(a+1, b+k+1)
            let r = gauss_rule(RuleKind::Jacobi { a, b }, 6).unwrap();
            for k in 0..12 {
                let kf = k as f64;
                let exact = 2f64.powf(a + b + kf + 1.0) * gamma(a + 1.0).unwrap()
                    * gamma(b + kf + 1.0).unwrap()
                    / gamma(a + b + kf + 2.0).unwrap();
                assert_relative_eq!(r.integrate(|x| (1.0 + x).powi(k)), exact, max_relative = 1e-12);
            }
        }
        assert!(gauss_rule(RuleKind::Jacobi { a: -1.0, b: 0.0 }, 4).is_err());
    }

    #[test]
    fn sphere_reduction_examples() {
        for n in 3..8 {
            let one = sphere_integral_2coord(n, |_, _| 1.0, 32).unwrap();
            assert_relative_eq!(one, 1.0, max_relative = 1e-13);
            let m2 = sphere_integral_2coord(n, |_, v| v * v, 32).unwrap();
            assert_relative_eq!(m2, 1.0 / n as f64, max_relative = 1e-13);
            let u2 = sphere_integral_2coord(n, |u, _| u * u, 32).unwrap();
            assert_relative_eq!(u2, 1.0 / n as f64, max_relative = 1e-13);
        }
        let abs_v = sphere_integral_2coord(3, |_, v| v.abs(), 32).unwrap();
        assert_relative_eq!(abs_v, 0.5, max_relative = 1e-14);
        assert!(sphere_integral_2coord(2, |_, _| 1.0, 8).is_err());
    }

    #[test]
    fn sphere_reduction_matches_marginal() {
        // ∫ f(v) dσ = Γ(n/2)/(√π Γ((n-1)/2)) ∫ f(v) (1-v²)^{(n-3)/2} dv
        for n in 3..7 {
            let nf = n as f64;
            let k = (nf - 3.0) / 2.0;
            let c = gamma(nf / 2.0).unwrap() / (PI.sqrt() * gamma((nf - 1.0) / 2.0).unwrap());
            let f = |v: f64| (2.0 * v).cos() + v.abs().powf(1.3);
            let marginal = c * [(-1.0, 0.0, 0.0, k), (0.0, 1.0, k, 0.0)]
                .iter()
                .map(|&(lo, hi, a, b)| {
                    mapped_nodes(lo, hi, a, b, 200)
                        .unwrap()
                        .iter()
                        .map(|nd| {
                            let other = if lo < 0.0 { 1.0 - nd.x } else { 1.0 + nd.x };
                            nd.weight * other.powf(k) * f(nd.x)
                        })
                        .sum::<f64>()
                })
                .sum::<f64>();
            let direct = sphere_integral_2coord(n, |_, v| f(v), 200).unwrap();
            assert_relative_eq!(direct, marginal, max_relative = 1e-12);
        }
    }

    #[test]
    fn singular_integrator_matches_reduction() {
        let f = |u: f64, v: f64| (1.0 + 0.3 * u - 0.2 * v).powi(2);
        for n in 3..6 {
            let plain = sphere_integral_2coord(n, f, 64).unwrap();
            let spec = SingularIntegrand {
                f,
                cusp: None,
                pole_power: 0.0,
                splits: vec![0.3, 0.9],
            };
            let split = sphere_integral_singular(n, &spec, 64).unwrap();
            assert_relative_eq!(plain, split, max_relative = 1e-13);
        }
    }

    #[test]
    fn singular_integrator_absorbs_cusps() {
        // ∫|v|^q dσ = Γ(n/2)Γ((q+1)/2)/(√π Γ((q+n)/2)), any orientation.
        for n in 3..6 {
            let nf = n as f64;
            for q in [1.0, 1.3, 2.5] {
                let exact = gamma(nf / 2.0).unwrap() * gamma((q + 1.0) / 2.0).unwrap()
                    / (PI.sqrt() * gamma((q + nf) / 2.0).unwrap());
                for alpha in [0.0, 0.4, 1.1, PI / 2.0] {
                    let (s, c) = (f64::sin(alpha), f64::cos(alpha));
                    let spec = SingularIntegrand {
                        f: |u: f64, v: f64| (c * v - s * u).abs().powf(q),
                        cusp: Some(LineCusp { a: -s, b: c, d: 0.0, power: q }),
                        pole_power: 0.0,
                        splits: vec![],
                    };
                    let got = sphere_integral_singular(n, &spec, 64).unwrap();
                    assert_relative_eq!(got, exact, max_relative = 1e-12);
                }
                // pole power: ∫(1-v)^γ dσ against the marginal Beta integral
                let g = q - 0.7;
                let spec = SingularIntegrand {
                    f: |_: f64, v: f64| (1.0 - v).powf(g),
                    cusp: None,
                    pole_power: g,
                    splits: vec![],
                };
                let got = sphere_integral_singular(n, &spec, 64).unwrap();
                let k = (nf - 3.0) / 2.0;
                let c = gamma(nf / 2.0).unwrap() / (PI.sqrt() * gamma((nf - 1.0) / 2.0).unwrap());
                let exact = c * 2f64.powf(g + 2.0 * k + 1.0) * gamma(k + g + 1.0).unwrap()
                    * gamma(k + 1.0).unwrap()
                    / gamma(2.0 * k + g + 2.0).unwrap();
                assert_relative_eq!(got, exact, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn singular_integrator_offset_line() {
        // An offset line, checked against a brute-force high-order reduction
        // with the line's chord split by hand.
        let (a, b, d, q) = (0.6, 0.5, 0.3, 1.5);
        let f = |u: f64, v: f64| (a * u + b * v - d).abs().powf(q) * (1.0 + u * v);
        let spec = SingularIntegrand {
            f,
            cusp: Some(LineCusp { a, b, d, power: q }),
            pole_power: 0.0,
            splits: vec![],
        };
        let lo = sphere_integral_singular(4, &spec, 48).unwrap();
        let hi = sphere_integral_singular(4, &spec, 96).unwrap();
        assert_relative_eq!(lo, hi, max_relative = 1e-12);
        let crude = sphere_integral_2coord(4, f, 400).unwrap();
        assert_relative_eq!(lo, crude, max_relative = 1e-6);
    }

    #[test]
    fn maximize_examples() {
        let (x, v) = maximize_1d(f64::cos, 0.0, PI, 512, 1e-12).unwrap();
        assert_eq!((x, v), (0.0, 1.0));
        let (x, _) = maximize_1d(|b| -(b - 1.0) * (b - 1.0), 0.0, 2.0, 64, 1e-10).unwrap();
        assert!((x - 1.0).abs() < 1e-8);
        let (rho, n) = (0.5_f64, 3);
        let w = 2.0 * rho / (1.0 + rho * rho);
        let g = |b: f64| (b.cos() - w).abs() / (1.0 + rho * rho - 2.0 * rho * b.cos()).powi(n);
        let (_, v) = maximize_1d(g, 0.0, 2.0 * PI, 512, 1e-12).unwrap();
        assert_relative_eq!(v, 12.8, max_relative = 1e-13);
        assert!(maximize_1d(f64::cos, 1.0, 1.0, 32, 1e-9).is_err());
    }

    #[test]
    fn radial_integral_basics() {
        let zero = radial_halfspace_integral(4, 1.0, |_, _| 0.0, 64).unwrap();
        assert_eq!(zero.value, 0.0);
        // Gaussian: ∫_{R^{n-1}} e^{-r²} dV = π^{(n-1)/2}
        for n in 3..6 {
            let g = radial_halfspace_integral(n, 1.0, |r, _| (-r * r).exp(), 128).unwrap();
            assert_relative_eq!(g.value, PI.powf((n as f64 - 1.0) / 2.0), max_relative = 1e-10);
            assert!(!g.accuracy_warning);
        }
        assert_relative_eq!(sphere_area(2), 4.0 * PI, max_relative = 1e-14);
    }
}
