//! Exponents, problem configurations, reduction of `(x, l)` to canonical
//! parameters, and uniform sampling on spheres.

use std::f64::consts::PI;
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// The exponent `q ∈ [1, ∞]` conjugate to the boundary-data exponent `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum QNorm {
    Finite(f64),
    Infinity,
}

impl QNorm {
    pub fn finite(q: f64) -> Result<Self> {
        if q.is_finite() && q >= 1.0 {
            Ok(Self::Finite(q))
        } else if q == f64::INFINITY {
            Ok(Self::Infinity)
        } else {
            Err(Error::InvalidParameter(format!("q must lie in [1, ∞], got {q}")))
        }
    }

    /// `q = n/(n-1)`, where the constant does not depend on the direction.
    pub fn critical(n: usize) -> Self {
        Self::Finite(n as f64 / (n as f64 - 1.0))
    }

    /// Parses a decimal, `inf`, or `critical` (resolved as `n/(n-1)`).
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        match text.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(Self::Infinity),
            "critical" => Ok(Self::critical(n)),
            other => {
                let q: f64 = other
                    .parse()
                    .map_err(|_| Error::InvalidParameter(format!("cannot parse q from {text:?}")))?;
                Self::finite(q)
            }
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Self::Finite(q) => q,
            Self::Infinity => f64::INFINITY,
        }
    }

    pub fn as_finite(self) -> Option<f64> {
        match self {
            Self::Finite(q) => Some(q),
            Self::Infinity => None,
        }
    }

    /// Conjugate exponent `p` with `1/p + 1/q = 1`.
    pub fn conjugate(self) -> f64 {
        match self {
            Self::Infinity => 1.0,
            Self::Finite(1.0) => f64::INFINITY,
            Self::Finite(q) => q / (q - 1.0),
        }
    }
}

impl fmt::Display for QNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(q) => write!(f, "{q}"),
            Self::Infinity => f.write_str("inf"),
        }
    }
}

pub(crate) fn check_dimension(n: usize) -> Result<()> {
    if n < 3 {
        return Err(domain(format!("dimension must be at least 3, got {n}")));
    }
    Ok(())
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..=PI).contains(&alpha) {
        return Err(domain(format!("alpha must lie in [0, π], got {alpha}")));
    }
    Ok(())
}

/// A ball problem `(n, q, ρ, α)` with `x = ρ e_n` and `l = l_α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallConfig {
    pub n: usize,
    pub q: QNorm,
    pub rho: f64,
    pub alpha: f64,
}

impl BallConfig {
    pub fn new(n: usize, q: QNorm, rho: f64, alpha: f64) -> Result<Self> {
        check_dimension(n)?;
        if !(0.0..1.0).contains(&rho) {
            return Err(domain(format!("rho must lie in [0, 1), got {rho}")));
        }
        check_alpha(alpha)?;
        Ok(Self { n, q, rho, alpha })
    }
}

/// A half-space problem `(n, q, x_n, α)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfSpaceConfig {
    pub n: usize,
    pub q: QNorm,
    pub x_n: f64,
    pub alpha: f64,
}

impl HalfSpaceConfig {
    pub fn new(n: usize, q: QNorm, x_n: f64, alpha: f64) -> Result<Self> {
        check_dimension(n)?;
        if !(x_n > 0.0 && x_n.is_finite()) {
            return Err(domain(format!("x_n must be positive, got {x_n}")));
        }
        check_alpha(alpha)?;
        Ok(Self { n, q, x_n, alpha })
    }
}

/// Canonical ball parameters before an exponent is attached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallPoint {
    pub n: usize,
    pub rho: f64,
    pub alpha: f64,
}

impl BallPoint {
    pub fn with_q(self, q: QNorm) -> Result<BallConfig> {
        BallConfig::new(self.n, q, self.rho, self.alpha)
    }
}

/// Canonical half-space parameters before an exponent is attached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfSpacePoint {
    pub n: usize,
    pub x_n: f64,
    pub alpha: f64,
}

impl HalfSpacePoint {
    pub fn with_q(self, q: QNorm) -> Result<HalfSpaceConfig> {
        HalfSpaceConfig::new(self.n, q, self.x_n, self.alpha)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn check_unit(l: &[f64]) -> Result<()> {
    let len = norm(l);
    if (len - 1.0).abs() >= 1e-12 || !len.is_finite() {
        return Err(domain(format!("direction must be a unit vector, |l| = {len}")));
    }
    Ok(())
}

fn clamped_acos(c: f64) -> f64 {
    c.clamp(-1.0, 1.0).acos()
}

/// Reduces `(x, l)` to `(ρ, α)` with `ρ = |x|` and `α` the angle between
/// `l` and `x/|x|`.
pub fn canonicalize_ball(x: &[f64], l: &[f64]) -> Result<BallPoint> {
    if x.len() != l.len() {
        return Err(domain("x and l must have the same dimension"));
    }
    check_dimension(x.len())?;
    let rho = norm(x);
    if !(rho < 1.0) {
        return Err(domain(format!("x must lie in the open unit ball, |x| = {rho}")));
    }
    check_unit(l)?;
    let alpha = if rho < 1e-14 {
        0.0
    } else {
        clamped_acos(dot(x, l) / rho)
    };
    Ok(BallPoint {
        n: x.len(),
        rho,
        alpha,
    })
}

/// Reduces `(x, l)` in the upper half-space to `(x_n, α)` with `α` the
/// angle between `l` and `e_n`.
pub fn canonicalize_halfspace(x: &[f64], l: &[f64]) -> Result<HalfSpacePoint> {
    if x.len() != l.len() {
        return Err(domain("x and l must have the same dimension"));
    }
    check_dimension(x.len())?;
    let n = x.len();
    let x_n = x[n - 1];
    if !(x_n > 0.0) {
        return Err(domain(format!("x must lie in the upper half-space, x_n = {x_n}")));
    }
    check_unit(l)?;
    Ok(HalfSpacePoint {
        n,
        x_n,
        alpha: clamped_acos(l[n - 1]),
    })
}

/// Deterministic stream of uniformly distributed points on `S^{n-1}`.
#[derive(Debug, Clone)]
pub struct SphereSampler {
    n: usize,
    rng: ChaCha8Rng,
}

impl SphereSampler {
    pub fn new(n: usize, seed: u64) -> Result<Self> {
        if n < 2 {
            return Err(domain(format!("sphere sampling needs n ≥ 2, got {n}")));
        }
        Ok(Self {
            n,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    /// Overwrites `out` (length `n`) with the next point.
    pub fn fill(&mut self, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.n);
        loop {
            for v in out.iter_mut() {
                *v = StandardNormal.sample(&mut self.rng);
            }
            let len = norm(out);
            if len > 1e-150 {
                out.iter_mut().for_each(|v| *v /= len);
                return;
            }
        }
    }
}

impl Iterator for SphereSampler {
    type Item = Vec<f64>;

    fn next(&mut self) -> Option<Vec<f64>> {
        let mut v = vec![0.0; self.n];
        self.fill(&mut v);
        Some(v)
    }
}

/// `count` uniform points on `S^{n-1}` from a seeded generator.
pub fn sample_sphere(n: usize, count: usize, seed: u64) -> Result<impl Iterator<Item = Vec<f64>>> {
    if count < 1 {
        return Err(domain("count must be at least 1"));
    }
    Ok(SphereSampler::new(n, seed)?.take(count))
}
