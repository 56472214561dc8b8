//! Poisson–Szegő kernels of the ball and the half-space, their gradients,
//! and the boundary data on which the directional estimates are attained.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::ball::{c_directional, c_infinity, peak_splits};
use crate::error::{domain, Error, Result};
use crate::geometry::{
    canonicalize_ball, canonicalize_halfspace, check_dimension, dot, norm, BallConfig,
    HalfSpaceConfig, QNorm,
};
use crate::halfspace::{ch_infinity_directional, ch_integral_sphere, euclidean_cusp_integral};
use crate::quadrature::{
    cached_rule, maximize_1d, sphere_integral_singular, LineCusp, SingularIntegrand,
};
use crate::special::{ln_gamma_pos, CompensatedSum};

const UNIT_TOLERANCE: f64 = 1e-10;

fn check_ball_pair(x: &[f64], zeta: &[f64]) -> Result<()> {
    if x.len() != zeta.len() {
        return Err(domain("x and ζ must have the same dimension"));
    }
    check_dimension(x.len())?;
    if !(norm(x) < 1.0) {
        return Err(domain("x must lie in the open unit ball"));
    }
    if (norm(zeta) - 1.0).abs() > UNIT_TOLERANCE {
        return Err(domain("ζ must lie on the unit sphere"));
    }
    Ok(())
}

/// `P(x, ζ) = ((1 - |x|²) / |x - ζ|²)^{n-1}`.
pub fn kernel_ball(x: &[f64], zeta: &[f64]) -> Result<f64> {
    check_ball_pair(x, zeta)?;
    let n = x.len() as i32;
    let d2: f64 = x.iter().zip(zeta).map(|(a, b)| (a - b).powi(2)).sum();
    Ok(((1.0 - dot(x, x)) / d2).powi(n - 1))
}

/// `∇_x P(x, ζ) = -2(n-1)(1-|x|²)^{n-2} (x|x-ζ|² + (1-|x|²)(x-ζ)) / |x-ζ|^{2n}`.
pub fn kernel_ball_gradient(x: &[f64], zeta: &[f64]) -> Result<Vec<f64>> {
    check_ball_pair(x, zeta)?;
    let n = x.len() as i32;
    let s = 1.0 - dot(x, x);
    let d2: f64 = x.iter().zip(zeta).map(|(a, b)| (a - b).powi(2)).sum();
    let scale = -2.0 * (n - 1) as f64 * s.powi(n - 2) / d2.powi(n);
    Ok(x.iter()
        .zip(zeta)
        .map(|(xi, zi)| scale * (xi * d2 + s * (xi - zi)))
        .collect())
}

/// `c_n = 2^{n-2} Γ(n/2) / π^{n/2}`.
pub fn halfspace_normalization(n: usize) -> f64 {
    let nf = n as f64;
    ((nf - 2.0) * 2f64.ln() + ln_gamma_pos(nf / 2.0) - 0.5 * nf * PI.ln()).exp()
}

fn check_halfspace_pair(x: &[f64], y: &[f64]) -> Result<()> {
    check_dimension(x.len())?;
    if y.len() + 1 != x.len() {
        return Err(domain("y' must have dimension n - 1"));
    }
    if !(x[x.len() - 1] > 0.0) {
        return Err(domain("x must lie in the upper half-space"));
    }
    Ok(())
}

/// `P(x, y') = c_n (x_n / (|x' - y'|² + x_n²))^{n-1}`.
pub fn kernel_halfspace(x: &[f64], y: &[f64]) -> Result<f64> {
    check_halfspace_pair(x, y)?;
    let n = x.len();
    let x_n = x[n - 1];
    let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum::<f64>() + x_n * x_n;
    Ok(halfspace_normalization(n) * (x_n / d2).powi(n as i32 - 1))
}

/// `∇_x P(x, y') = (n-1) c_n (x_n^{n-2} e_n / |y-x|^{2n-2} + 2 x_n^{n-1} (y-x) / |y-x|^{2n})`
/// with `y = (y', 0)`.
pub fn kernel_halfspace_gradient(x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    check_halfspace_pair(x, y)?;
    let n = x.len();
    let ni = n as i32;
    let x_n = x[n - 1];
    let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum::<f64>() + x_n * x_n;
    let k = (n as f64 - 1.0) * halfspace_normalization(n);
    let radial = k * 2.0 * x_n.powi(ni - 1) / d2.powi(ni);
    let mut g: Vec<f64> = y.iter().zip(x).map(|(yi, xi)| radial * (yi - xi)).collect();
    g.push(k * x_n.powi(ni - 2) / d2.powi(ni - 1) - radial * x_n);
    Ok(g)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Geometry {
    Ball,
    HalfSpace,
}

/// Where boundary data lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundaryDomain {
    /// `S^{n-1}`, points of length `n`.
    Sphere(usize),
    /// `R^{n-1}`, points of length `n - 1`.
    Euclidean(usize),
}

/// A thread-safe function on boundary points.
pub type Evaluator = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Boundary data `φ` together with its domain.
#[derive(Clone)]
pub struct BoundaryFunction {
    pub domain: BoundaryDomain,
    pub evaluator: Evaluator,
    pub p_norm_hint: Option<f64>,
}

impl BoundaryFunction {
    pub fn eval(&self, point: &[f64]) -> f64 {
        (self.evaluator)(point)
    }
}

impl std::fmt::Debug for BoundaryFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BoundaryFunction")
            .field("domain", &self.domain)
            .field("p_norm_hint", &self.p_norm_hint)
            .finish_non_exhaustive()
    }
}

fn finite_exponent(q: QNorm) -> Result<f64> {
    let q = q.as_finite().ok_or_else(|| {
        Error::InvalidParameter("q = ∞ is attained only in the limit; use the cap sequence".into())
    })?;
    if !(q >= 1.0) {
        return Err(Error::InvalidParameter(format!("q must be ≥ 1, got {q}")));
    }
    Ok(q)
}

/// `φ_l = |⟨∇P(x, ·), l⟩|^{q-1} sign⟨∇P(x, ·), l⟩`, which turns Hölder's
/// inequality into an equality. For `q = 1` this is the sign alone.
pub fn extremal_boundary_function(
    geometry: Geometry,
    x: &[f64],
    l: &[f64],
    q: QNorm,
) -> Result<BoundaryFunction> {
    let q = finite_exponent(q)?;
    let n = x.len();
    let (x, l) = (x.to_vec(), l.to_vec());
    let power = q - 1.0;
    let shape = move |g: f64| {
        if g == 0.0 {
            0.0
        } else if power == 0.0 {
            g.signum()
        } else {
            g.abs().powf(power).copysign(g)
        }
    };
    match geometry {
        Geometry::Ball => {
            canonicalize_ball(&x, &l)?;
            Ok(BoundaryFunction {
                domain: BoundaryDomain::Sphere(n),
                evaluator: Arc::new(move |zeta: &[f64]| match kernel_ball_gradient(&x, zeta) {
                    Ok(g) => shape(dot(&g, &l)),
                    Err(_) => f64::NAN,
                }),
                p_norm_hint: None,
            })
        }
        Geometry::HalfSpace => {
            canonicalize_halfspace(&x, &l)?;
            Ok(BoundaryFunction {
                domain: BoundaryDomain::Euclidean(n - 1),
                evaluator: Arc::new(move |y: &[f64]| match kernel_halfspace_gradient(&x, y) {
                    Ok(g) => shape(dot(&g, &l)),
                    Err(_) => f64::NAN,
                }),
                p_norm_hint: None,
            })
        }
    }
}

/// Canonical `x = ρ e_n` and `l = sin α e_{n-1} + cos α e_n`.
fn canonical_vectors(n: usize, last: f64, alpha: f64) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    x[n - 1] = last;
    let mut l = vec![0.0; n];
    l[n - 2] = alpha.sin();
    l[n - 1] = alpha.cos();
    (x, l)
}

/// Point of `S^{n-1}` with `(ζ_{n-1}, ζ_n) = (u, v)`.
fn sphere_point(n: usize, u: f64, v: f64, out: &mut [f64]) {
    out.fill(0.0);
    out[0] = (1.0 - u * u - v * v).max(0.0).sqrt();
    out[n - 2] = u;
    out[n - 1] = v;
}

/// `⟨∇u(x), l⟩ / (𝐂(x; l) ‖φ_l‖_p)` for the extremal data `φ_l`; it equals
/// one exactly when the directional constant is attained.
pub fn sharpness_ratio(geometry: Geometry, x: &[f64], l: &[f64], q: QNorm, order: usize) -> Result<f64> {
    match geometry {
        Geometry::Ball => {
            let p = canonicalize_ball(x, l)?;
            sharpness_ratio_ball(&p.with_q(q)?, order)
        }
        Geometry::HalfSpace => {
            let p = canonicalize_halfspace(x, l)?;
            sharpness_ratio_halfspace(&p.with_q(q)?, order)
        }
    }
}

/// Hölder conjugate norm of `φ_l` given `∫ |φ_l|^p`; `p = ∞` when `q = 1`.
fn p_norm(q: f64, integral: f64) -> f64 {
    if q == 1.0 {
        1.0
    } else {
        integral.powf((q - 1.0) / q)
    }
}

pub fn sharpness_ratio_ball(cfg: &BallConfig, order: usize) -> Result<f64> {
    let q = finite_exponent(cfg.q)?;
    let n = cfg.n;
    let (x, l) = canonical_vectors(n, cfg.rho, cfg.alpha);
    let phi = extremal_boundary_function(Geometry::Ball, &x, &l, cfg.q)?;
    let (sa, ca) = (cfg.alpha.sin(), cfg.alpha.cos());
    let r2 = cfg.rho * cfg.rho;
    let cusp = LineCusp {
        a: (1.0 - r2) * sa,
        b: (1.0 + r2) * ca,
        d: 2.0 * cfg.rho * ca,
        power: q,
    };
    let buffer = std::cell::RefCell::new(vec![0.0; n]);
    let integrate = |with_gradient: bool| -> Result<f64> {
        let spec = SingularIntegrand {
            f: |u: f64, v: f64| {
                let mut zeta = buffer.borrow_mut();
                sphere_point(n, u, v, &mut zeta);
                let value = phi.eval(&zeta);
                if with_gradient {
                    let g = kernel_ball_gradient(&x, &zeta).map_or(f64::NAN, |g| dot(&g, &l));
                    g * value
                } else if q == 1.0 {
                    0.0
                } else {
                    value.abs().powf(q / (q - 1.0))
                }
            },
            cusp: Some(cusp),
            pole_power: 0.0,
            splits: peak_splits(cfg.rho),
        };
        sphere_integral_singular(n, &spec, order)
    };
    let derivative = integrate(true)?;
    let norm_p = p_norm(q, if q == 1.0 { 0.0 } else { integrate(false)? });
    let constant = c_directional(cfg, order, 1e-14)?.value;
    Ok(derivative / (constant * norm_p))
}

pub fn sharpness_ratio_halfspace(cfg: &HalfSpaceConfig, order: usize) -> Result<f64> {
    let q = finite_exponent(cfg.q)?;
    let n = cfg.n;
    // l ↦ -l and the reflection y_{n-1} ↦ -y_{n-1} leave the ratio unchanged
    let cfg = HalfSpaceConfig {
        alpha: cfg.alpha.min(PI - cfg.alpha),
        ..*cfg
    };
    let (x, l) = canonical_vectors(n, cfg.x_n, cfg.alpha);
    let phi = extremal_boundary_function(Geometry::HalfSpace, &x, &l, cfg.q)?;
    let derivative = euclidean_cusp_integral(n, cfg.x_n, cfg.alpha, q, order, |y: &[f64]| {
        let g = kernel_halfspace_gradient(&x, y).map_or(f64::NAN, |g| dot(&g, &l));
        g * phi.eval(y)
    })?;
    let norm_p = if q == 1.0 {
        1.0
    } else {
        let integral = euclidean_cusp_integral(n, cfg.x_n, cfg.alpha, q, order, |y: &[f64]| {
            phi.eval(y).abs().powf(q / (q - 1.0))
        })?;
        p_norm(q, integral)
    };
    let constant = ch_integral_sphere(&cfg, order)?.value;
    Ok(derivative / (constant * norm_p))
}

/// Approach to equality for `q = ∞` through normalized indicators of caps
/// shrinking onto a maximizer of `|⟨∇P(x, ·), l⟩|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapSequence {
    /// Cap radii: geodesic on the sphere, in units of `x_n` on `R^{n-1}`.
    pub radii: Vec<f64>,
    pub ratios: Vec<f64>,
    /// Supremum of `|⟨∇P(x, ·), l⟩|` found by the maximization.
    pub supremum: f64,
    /// The constant the ratios are taken against.
    pub constant: f64,
    /// Ratios increase with shrinking radius and never exceed one beyond
    /// rounding.
    pub monotone: bool,
}

/// Cap radii `1/i`.
pub const CAP_INDICES: [usize; 3] = [4, 16, 64];

fn finish_caps(radii: Vec<f64>, ratios: Vec<f64>, supremum: f64, constant: f64) -> CapSequence {
    let monotone = ratios.windows(2).all(|w| w[1] >= w[0] - 1e-13)
        && ratios.iter().all(|&r| r <= 1.0 + 1e-10);
    CapSequence {
        radii,
        ratios,
        supremum,
        constant,
        monotone,
    }
}

/// Mean of `g` over a cap of radius `h` in a tangent frame: `t` is the
/// distance from the centre with density `jac(t)`, `τ` the cosine to the
/// in-plane direction with density `(1-τ²)^{(n-4)/2}`.
fn cap_mean(n: usize, h: f64, order: usize, jac: impl Fn(f64) -> f64, g: impl Fn(f64, f64) -> f64) -> Result<f64> {
    let m = (n as f64 - 4.0) / 2.0;
    let radial = cached_rule(0.0, 0.0, order)?;
    let angular = cached_rule(m, m, order)?;
    let mut num = CompensatedSum::default();
    let mut den = CompensatedSum::default();
    for (s, w) in radial.nodes.iter().zip(&radial.weights) {
        let t = 0.5 * h * (1.0 + s);
        let wt = w * jac(t);
        for (tau, wa) in angular.nodes.iter().zip(&angular.weights) {
            num.add(wt * wa * g(t, *tau));
            den.add(wt * wa);
        }
    }
    Ok(num.value() / den.value())
}

/// Cap sequence for the ball at `x = ρ e_n`, `l = l_α`.
pub fn infinity_caps_ball(n: usize, rho: f64, alpha: f64, order: usize) -> Result<CapSequence> {
    BallConfig::new(n, QNorm::Infinity, rho, alpha)?;
    let (x, l) = canonical_vectors(n, rho, alpha);
    let zeta = std::cell::RefCell::new(vec![0.0; n]);
    let gradient = |u: f64, v: f64| {
        let mut z = zeta.borrow_mut();
        sphere_point(n, u, v, &mut z);
        kernel_ball_gradient(&x, &z).map_or(f64::NAN, |g| dot(&g, &l).abs())
    };
    let (beta, supremum) = maximize_1d(|b: f64| gradient(b.sin(), b.cos()), 0.0, 2.0 * PI, 512, 1e-13)?;
    let centre = (beta.sin(), beta.cos());
    let tangent = (centre.1, -centre.0);
    let constant = c_infinity(n, rho, alpha)?.value;
    let mut radii = Vec::new();
    let mut ratios = Vec::new();
    for i in CAP_INDICES {
        let h = 1.0 / i as f64;
        let mean = cap_mean(n, h, order, |t| t.sin().powi(n as i32 - 2), |t, tau| {
            let (c, s) = (t.cos(), t.sin());
            gradient(c * centre.0 + s * tau * tangent.0, c * centre.1 + s * tau * tangent.1)
        })?;
        radii.push(h);
        ratios.push(mean / constant);
    }
    Ok(finish_caps(radii, ratios, supremum, constant))
}

/// Cap sequence for the half-space at `x = x_n e_n`, `l = l_α`, with disks
/// of radius `x_n / i` in `R^{n-1}`.
pub fn infinity_caps_halfspace(n: usize, x_n: f64, alpha: f64, order: usize) -> Result<CapSequence> {
    HalfSpaceConfig::new(n, QNorm::Infinity, x_n, alpha)?;
    let (x, l) = canonical_vectors(n, x_n, alpha);
    let y = std::cell::RefCell::new(vec![0.0; n - 1]);
    let gradient = |a: f64, b: f64| {
        let mut y = y.borrow_mut();
        y.fill(0.0);
        y[n - 2] = a;
        y[n - 3] = b;
        kernel_halfspace_gradient(&x, &y).map_or(f64::NAN, |g| dot(&g, &l).abs())
    };
    let edge = PI * (1.0 - 1e-9);
    let (theta, supremum) =
        maximize_1d(|t: f64| gradient(x_n * (0.5 * t).tan(), 0.0), -edge, edge, 512, 1e-13)?;
    let centre = x_n * (0.5 * theta).tan();
    let constant = ch_infinity_directional(n, x_n, alpha)?.value;
    let mut radii = Vec::new();
    let mut ratios = Vec::new();
    for i in CAP_INDICES {
        let h = x_n / i as f64;
        let mean = cap_mean(n, h, order, |t| t.powi(n as i32 - 2), |t, tau| {
            gradient(centre + t * tau, t * (1.0 - tau * tau).max(0.0).sqrt())
        })?;
        radii.push(h);
        ratios.push(mean / constant);
    }
    Ok(finish_caps(radii, ratios, supremum, constant))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{radial_halfspace_integral, sphere_integral_2coord};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn ball_kernel_examples() {
        let z = [0.0, 0.6, 0.8];
        assert_eq!(kernel_ball(&[0.0; 3], &z).unwrap(), 1.0);
        assert_relative_eq!(kernel_ball(&[0.0, 0.0, 0.5], &[0.0, 0.0, 1.0]).unwrap(), 9.0, max_relative = 1e-15);
        let g = kernel_ball_gradient(&[0.0; 3], &z).unwrap();
        for (gi, zi) in g.iter().zip(z) {
            assert_relative_eq!(*gi, 4.0 * zi, epsilon = 1e-15);
        }
        assert!(kernel_ball(&[0.0, 0.0, 1.0], &z).is_err());
        assert!(kernel_ball(&[0.0, 0.0, 0.1], &[0.0, 0.0, 1.1]).is_err());
    }

    #[test]
    fn ball_kernel_normalization() {
        for n in 3..=6 {
            for rho in [0.0, 0.3, 0.7] {
                let x = canonical_vectors(n, rho, 0.0).0;
                let total = sphere_integral_2coord(
                    n,
                    |u, v| {
                        let mut zeta = vec![0.0; n];
                        sphere_point(n, u, v, &mut zeta);
                        kernel_ball(&x, &zeta).unwrap()
                    },
                    96,
                );
                assert_relative_eq!(total.unwrap(), 1.0, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn halfspace_kernel_examples() {
        assert_relative_eq!(halfspace_normalization(3), 1.0 / PI, max_relative = 1e-15);
        assert_relative_eq!(kernel_halfspace(&[0.0, 0.0, 1.0], &[0.0, 0.0]).unwrap(), 1.0 / PI, max_relative = 1e-15);
        assert!(kernel_halfspace(&[0.0, 0.0, 0.0], &[0.0, 0.0]).is_err());
        assert!(kernel_halfspace_gradient(&[0.0, 0.0, -1.0], &[0.0, 0.0]).is_err());
        for n in 3..=6 {
            for x_n in [0.5, 1.0, 3.0] {
                let mut x = vec![0.0; n];
                x[n - 1] = x_n;
                let total = radial_halfspace_integral(
                    n,
                    x_n,
                    |r, psi| {
                        let mut y = vec![0.0; n - 1];
                        y[n - 2] = r * psi.cos();
                        y[0] += r * psi.sin();
                        kernel_halfspace(&x, &y).unwrap()
                    },
                    96,
                )
                .unwrap();
                assert_relative_eq!(total.value, 1.0, max_relative = 1e-9);
            }
        }
    }

    fn unit(v: Vec<f64>) -> Vec<f64> {
        let len = norm(&v);
        v.into_iter().map(|c| c / len).collect()
    }

    fn relative_gap(a: &[f64], b: &[f64]) -> f64 {
        let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        norm(&diff) / norm(a).max(norm(b))
    }

    fn central_difference(f: impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
        (0..x.len())
            .map(|i| {
                let (mut up, mut down) = (x.to_vec(), x.to_vec());
                up[i] += h;
                down[i] -= h;
                (f(&up) - f(&down)) / (2.0 * h)
            })
            .collect()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn ball_gradient_matches_differences(
            n in 3usize..6,
            raw_x in prop::collection::vec(-1.0f64..1.0, 6),
            raw_z in prop::collection::vec(-1.0f64..1.0, 6),
            radius in 0.0f64..0.8,
        ) {
            let dir = unit(raw_x[..n].to_vec());
            let zeta = unit(raw_z[..n].to_vec());
            prop_assume!(dir.iter().all(|c| c.is_finite()) && zeta.iter().all(|c| c.is_finite()));
            let x: Vec<f64> = dir.iter().map(|c| c * radius).collect();
            let g = kernel_ball_gradient(&x, &zeta).unwrap();
            let fd = central_difference(|p| kernel_ball(p, &zeta).unwrap(), &x, 1e-6);
            prop_assert!(relative_gap(&g, &fd) < 1e-7, "{g:?} vs {fd:?}");
        }

        #[test]
        fn halfspace_gradient_matches_differences(
            n in 3usize..6,
            raw_x in prop::collection::vec(-2.0f64..2.0, 6),
            raw_y in prop::collection::vec(-2.0f64..2.0, 5),
            x_n in 0.2f64..3.0,
        ) {
            let mut x = raw_x[..n].to_vec();
            x[n - 1] = x_n;
            let y = raw_y[..n - 1].to_vec();
            let g = kernel_halfspace_gradient(&x, &y).unwrap();
            let fd = central_difference(|p| kernel_halfspace(p, &y).unwrap(), &x, 1e-6 * x_n);
            prop_assert!(relative_gap(&g, &fd) < 1e-7, "{g:?} vs {fd:?}");
        }
    }

    #[test]
    fn extremal_shapes() {
        let (x, l) = canonical_vectors(3, 0.4, 0.7);
        let z = unit(vec![0.3, -0.5, 0.2]);
        let g = dot(&kernel_ball_gradient(&x, &z).unwrap(), &l);
        let two = extremal_boundary_function(Geometry::Ball, &x, &l, QNorm::Finite(2.0)).unwrap();
        assert_relative_eq!(two.eval(&z), g, max_relative = 1e-15);
        let one = extremal_boundary_function(Geometry::Ball, &x, &l, QNorm::Finite(1.0)).unwrap();
        assert_eq!(one.eval(&z).abs(), 1.0);
        let (x, l) = canonical_vectors(4, 1.5, 0.2);
        let h = extremal_boundary_function(Geometry::HalfSpace, &x, &l, QNorm::Finite(1.0)).unwrap();
        assert_eq!(h.eval(&[0.3, 2.0, -1.0]).abs(), 1.0);
        assert_eq!(h.domain, BoundaryDomain::Euclidean(3));
        assert!(extremal_boundary_function(Geometry::Ball, &x, &l, QNorm::Infinity).is_err());
    }

    #[test]
    fn sharpness_examples() {
        let ball = |n, q, rho, alpha| {
            sharpness_ratio_ball(&BallConfig::new(n, QNorm::Finite(q), rho, alpha).unwrap(), 64).unwrap()
        };
        assert!((ball(3, 2.0, 0.5, 0.0) - 1.0).abs() < 1e-6);
        assert!((ball(4, 1.5, 0.3, PI / 2.0) - 1.0).abs() < 1e-6);
        assert!((ball(3, 1.0, 0.6, 1.1) - 1.0).abs() < 1e-6);
        let cfg = HalfSpaceConfig::new(3, QNorm::Finite(2.0), 1.0, 0.0).unwrap();
        assert!((sharpness_ratio_halfspace(&cfg, 64).unwrap() - 1.0).abs() < 1e-5);
        let (x, l) = canonical_vectors(4, 0.3, 2.0);
        let r = sharpness_ratio(Geometry::Ball, &x, &l, QNorm::Finite(3.0), 64).unwrap();
        assert!((r - 1.0).abs() < 1e-6);
    }

    #[test]
    fn p_norm_identity() {
        // ‖φ_l‖_p^p = ∫ |⟨∇P, l⟩|^q
        let cfg = BallConfig::new(3, QNorm::Finite(1.5), 0.5, 0.9).unwrap();
        let (x, l) = canonical_vectors(3, cfg.rho, cfg.alpha);
        let phi = extremal_boundary_function(Geometry::Ball, &x, &l, cfg.q).unwrap();
        let direct = sphere_integral_2coord(
            3,
            |u, v| {
                let mut z = vec![0.0; 3];
                sphere_point(3, u, v, &mut z);
                phi.eval(&z).abs().powf(3.0)
            },
            256,
        )
        .unwrap();
        let c = c_directional(&cfg, 128, 1e-14).unwrap().value;
        // 𝐂 = (∫|G|^q)^{1/q}
        assert_relative_eq!(direct, c.powf(1.5), max_relative = 1e-6);
    }

    /// `1 - ratio` falls like the squared radius.
    fn assert_defect_shrinks(caps: &CapSequence) {
        let d: Vec<f64> = caps.ratios.iter().map(|r| 1.0 - r).collect();
        for w in d.windows(2) {
            assert!(w[1] > 0.0 && w[0] / w[1] > 8.0, "{caps:?}");
        }
    }

    #[test]
    fn cap_sequences() {
        for (n, rho, alpha) in [(3, 0.5, 0.0), (4, 0.3, 1.0)] {
            let caps = infinity_caps_ball(n, rho, alpha, 32).unwrap();
            assert_relative_eq!(caps.supremum, caps.constant, max_relative = 1e-10);
            assert!(caps.monotone, "{caps:?}");
            assert_defect_shrinks(&caps);
        }
        for (n, alpha) in [(3, 0.0), (5, 0.8)] {
            let caps = infinity_caps_halfspace(n, 1.0, alpha, 32).unwrap();
            assert_relative_eq!(caps.supremum, caps.constant, max_relative = 1e-10);
            assert!(caps.monotone, "{caps:?}");
            assert_defect_shrinks(&caps);
        }
    }
}
