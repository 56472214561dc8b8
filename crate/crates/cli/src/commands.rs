//! One function per subcommand, each building a [`Report`].

use std::f64::consts::PI;

use rayon::prelude::*;

use khavinson::ball::{c_directional, sharp_constant_ball, ConstantResult, Diagnostics};
use khavinson::geometry::{BallConfig, HalfSpaceConfig, QNorm};
use khavinson::halfspace::{adjudicate_halfspace_forms, ch_directional, sharp_constant_halfspace, HalfSpaceConstant};
use khavinson::kernels::{
    infinity_caps_ball, infinity_caps_halfspace, sharpness_ratio_ball, sharpness_ratio_halfspace, CapSequence,
};
use khavinson::regime::{classify_regime, regime_intervals, Regime};
use khavinson::verification::{run_all, VerifyOptions};

use crate::report::{Field, Fields, Record, Report};
use crate::{CliError, GeometryArg, GlobalArgs, PointArgs};

/// Largest ρ the command line accepts; quadratures lose accuracy as the
/// Poisson kernel peaks sharpen towards the sphere.
pub const RHO_MAX: f64 = 0.999999;

/// Attainment tolerance for `sharpness`.
pub const SHARPNESS_TOLERANCE: f64 = 1e-4;

type Cmd = Result<Report, CliError>;

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

fn q_field(q: QNorm) -> Field {
    match q {
        QNorm::Finite(v) => Field::Num(v),
        QNorm::Infinity => Field::Text("inf".into()),
    }
}

fn check_n(n: usize) -> Result<(), CliError> {
    if n < 3 {
        return Err(invalid(format!("--n must be at least 3, got {n}")));
    }
    Ok(())
}

fn check_alpha(alpha: f64) -> Result<(), CliError> {
    if !(0.0..=PI).contains(&alpha) {
        return Err(invalid(format!("--alpha must lie in [0, π], got {alpha}")));
    }
    Ok(())
}

fn check_rho(rho: f64) -> Result<(), CliError> {
    if !(0.0..=RHO_MAX).contains(&rho) {
        return Err(invalid(format!("--rho must lie in [0, {RHO_MAX}], got {rho}")));
    }
    Ok(())
}

fn check_xn(x_n: f64) -> Result<(), CliError> {
    if !(x_n > 0.0 && x_n.is_finite()) {
        return Err(invalid(format!("--xn must be positive, got {x_n}")));
    }
    Ok(())
}

fn check_points(points: usize) -> Result<(), CliError> {
    if points < 2 {
        return Err(invalid(format!("--points must be at least 2, got {points}")));
    }
    Ok(())
}

/// A validated point: the geometry together with ρ or x_n.
#[derive(Debug, Clone, Copy)]
enum Where {
    Ball { rho: f64 },
    Half { x_n: f64 },
}

#[derive(Debug, Clone, Copy)]
struct Point {
    n: usize,
    q: QNorm,
    at: Where,
    alpha: Option<f64>,
}

/// Checks `p`; with `swept` set, the position coordinate comes from a sweep
/// and must not also be given as a flag.
fn validate(p: &PointArgs, swept: bool) -> Result<(QNorm, Option<Where>), CliError> {
    check_n(p.n)?;
    let q = QNorm::parse(&p.q, p.n)?;
    if let Some(a) = p.alpha {
        check_alpha(a)?;
    }
    let at = match (p.geometry, p.rho, p.xn) {
        (GeometryArg::Ball, _, Some(_)) => return Err(invalid("--xn applies to the half-space, use --rho")),
        (GeometryArg::Halfspace, Some(_), _) => return Err(invalid("--rho applies to the ball, use --xn")),
        (_, Some(_), _) | (_, _, Some(_)) if swept => {
            return Err(invalid("sweep-rho takes the range from --from and --to"))
        }
        (_, None, None) if swept => None,
        (GeometryArg::Ball, Some(rho), None) => {
            check_rho(rho)?;
            Some(Where::Ball { rho })
        }
        (GeometryArg::Halfspace, None, Some(x_n)) => {
            check_xn(x_n)?;
            Some(Where::Half { x_n })
        }
        (GeometryArg::Ball, None, None) => return Err(invalid("ball requires --rho")),
        (GeometryArg::Halfspace, None, None) => return Err(invalid("halfspace requires --xn")),
    };
    Ok((q, at))
}

fn point(p: &PointArgs) -> Result<Point, CliError> {
    let (q, at) = validate(p, false)?;
    Ok(Point {
        n: p.n,
        q,
        at: at.expect("position is present when not swept"),
        alpha: p.alpha,
    })
}

fn common_params(g: &GlobalArgs) -> Fields {
    vec![("order", Field::Int(g.order as i64)), ("tol", Field::Num(g.tol))]
}

fn point_inputs(pt: &Point, alpha: Option<f64>) -> Fields {
    let mut inputs = vec![("n", Field::Int(pt.n as i64)), ("q", q_field(pt.q))];
    match pt.at {
        Where::Ball { rho } => {
            inputs.insert(0, ("geometry", Field::Text("ball".into())));
            inputs.push(("rho", Field::Num(rho)));
        }
        Where::Half { x_n } => {
            inputs.insert(0, ("geometry", Field::Text("halfspace".into())));
            inputs.push(("xn", Field::Num(x_n)));
        }
    }
    inputs.push(("alpha", Field::opt_num(alpha)));
    inputs
}

fn diagnostics(d: &Diagnostics, direction: Option<f64>) -> Fields {
    vec![
        ("terms", Field::opt_int(d.terms)),
        ("nodes", Field::opt_int(d.nodes)),
        ("error_estimate", Field::Num(d.error_estimate)),
        ("direction_alpha", Field::opt_num(direction)),
    ]
}

fn ball_record(pt: &Point, alpha: Option<f64>, r: &ConstantResult) -> Record {
    Record {
        inputs: point_inputs(pt, alpha),
        value: Field::Num(r.value),
        method: r.method.name().into(),
        diagnostics: diagnostics(&r.diagnostics, r.direction_alpha),
    }
}

fn half_record(pt: &Point, alpha: Option<f64>, r: &HalfSpaceConstant) -> Record {
    let mut diagnostics = diagnostics(&r.diagnostics, r.direction_alpha);
    diagnostics.push(("scale_exponent", Field::Num(r.scale_exponent)));
    diagnostics.push(("accuracy_warning", Field::Bool(r.accuracy_warning)));
    Record {
        inputs: point_inputs(pt, alpha),
        value: Field::Num(r.value),
        method: r.method.name().into(),
        diagnostics,
    }
}

/// The constant at `pt`; directional when `alpha` is set.
fn evaluate(g: &GlobalArgs, pt: &Point, alpha: Option<f64>) -> Result<Record, CliError> {
    Ok(match (pt.at, alpha) {
        (Where::Ball { rho }, Some(a)) => {
            let cfg = BallConfig::new(pt.n, pt.q, rho, a)?;
            ball_record(pt, alpha, &c_directional(&cfg, g.order, g.tol)?)
        }
        (Where::Ball { rho }, None) => ball_record(pt, None, &sharp_constant_ball(pt.n, pt.q, rho)?),
        (Where::Half { x_n }, Some(a)) => {
            let cfg = HalfSpaceConfig::new(pt.n, pt.q, x_n, a)?;
            half_record(pt, alpha, &ch_directional(&cfg, g.order)?)
        }
        (Where::Half { x_n }, None) => half_record(pt, None, &sharp_constant_halfspace(pt.n, pt.q, x_n, g.order)?),
    })
}

fn linspace(from: f64, to: f64, points: usize) -> Vec<f64> {
    let step = (to - from) / (points - 1) as f64;
    (0..points)
        .map(|i| if i + 1 == points { to } else { from + step * i as f64 })
        .collect()
}

/// Evaluates in parallel; results keep the input order.
fn par_collect<T: Sync>(items: &[T], f: impl Fn(&T) -> Result<Record, CliError> + Sync + Send) -> Result<Vec<Record>, CliError> {
    items.par_iter().map(f).collect()
}

pub fn constant(g: &GlobalArgs, p: &PointArgs) -> Cmd {
    let pt = point(p)?;
    Ok(Report {
        command: "constant",
        params: common_params(g),
        results: vec![evaluate(g, &pt, pt.alpha)?],
        failures: vec![],
    })
}

pub fn sweep_alpha(g: &GlobalArgs, p: &PointArgs, points: usize) -> Cmd {
    if p.alpha.is_some() {
        return Err(invalid("sweep-alpha covers [0, π]; drop --alpha"));
    }
    check_points(points)?;
    let pt = point(p)?;
    let grid = linspace(0.0, PI, points);
    let mut params = common_params(g);
    params.push(("points", Field::Int(points as i64)));
    Ok(Report {
        command: "sweep-alpha",
        params,
        results: par_collect(&grid, |&a| evaluate(g, &pt, Some(a)))?,
        failures: vec![],
    })
}

pub fn sweep_rho(g: &GlobalArgs, p: &PointArgs, from: Option<f64>, to: Option<f64>, points: usize) -> Cmd {
    check_points(points)?;
    let (q, _) = validate(p, true)?;
    let (lo, hi) = match p.geometry {
        GeometryArg::Ball => (from.unwrap_or(0.0), to.unwrap_or(0.9)),
        GeometryArg::Halfspace => (from.unwrap_or(0.25), to.unwrap_or(4.0)),
    };
    if !(lo < hi) {
        return Err(invalid(format!("--from must be below --to, got {lo} and {hi}")));
    }
    let grid = linspace(lo, hi, points);
    let pts: Vec<Point> = grid
        .iter()
        .map(|&v| {
            let at = match p.geometry {
                GeometryArg::Ball => {
                    check_rho(v)?;
                    Where::Ball { rho: v }
                }
                GeometryArg::Halfspace => {
                    check_xn(v)?;
                    Where::Half { x_n: v }
                }
            };
            Ok(Point { n: p.n, q, at, alpha: p.alpha })
        })
        .collect::<Result<_, CliError>>()?;
    let mut params = common_params(g);
    params.push(("from", Field::Num(lo)));
    params.push(("to", Field::Num(hi)));
    params.push(("points", Field::Int(points as i64)));
    Ok(Report {
        command: "sweep-rho",
        params,
        results: par_collect(&pts, |pt| evaluate(g, pt, pt.alpha))?,
        failures: vec![],
    })
}

pub fn verify(g: &GlobalArgs, samples: usize) -> Cmd {
    if samples < 2 {
        return Err(invalid(format!("--samples must be at least 2, got {samples}")));
    }
    let opts = VerifyOptions {
        order: g.order,
        seed: g.seed,
        mc_samples: samples,
    };
    let outcomes = run_all(&opts);
    let mut failures = Vec::new();
    let mut results = Vec::new();
    for c in &outcomes {
        eprintln!("{}", c.summary_line());
        if !c.passed {
            let detail = if c.failures.is_empty() {
                format!("worst {:e} exceeds {:e}", c.worst, c.threshold)
            } else {
                c.failures.join("; ")
            };
            failures.push(format!("criterion {} ({}): {detail}", c.id, c.title));
        }
        results.push(Record {
            inputs: vec![("id", Field::Int(c.id as i64)), ("title", Field::Text(c.title.clone()))],
            value: Field::Num(c.worst),
            method: "Verification".into(),
            diagnostics: vec![
                ("passed", Field::Bool(c.passed)),
                ("threshold", Field::Num(c.threshold)),
                ("evaluations", Field::Int(c.evaluations as i64)),
                ("notes", Field::Text(c.notes.join("; "))),
            ],
        });
    }
    let mut params = vec![("order", Field::Int(g.order as i64)), ("seed", Field::Int(g.seed as i64))];
    params.push(("samples", Field::Int(samples as i64)));
    Ok(Report {
        command: "verify",
        params,
        results,
        failures,
    })
}

pub fn regimes(n: usize, qmax: f64) -> Cmd {
    check_n(n)?;
    if !(qmax > 1.0 && qmax.is_finite()) {
        return Err(invalid(format!("--qmax must be finite and above 1, got {qmax}")));
    }
    let results = regime_intervals(n, qmax)
        .iter()
        .map(|iv| {
            let k0 = match iv.regime {
                Regime::Radial { k0 } => k0,
                Regime::Gap { k0 } => Some(k0),
                Regime::Tangential => None,
            };
            Record {
                inputs: vec![
                    ("interval", Field::Text(iv.notation())),
                    ("lo", Field::Num(iv.lo)),
                    ("hi", Field::Num(iv.hi)),
                ],
                value: Field::Text(iv.regime.name().into()),
                method: "EndpointFormula".into(),
                diagnostics: vec![
                    ("lo_closed", Field::Bool(iv.lo_closed)),
                    ("hi_closed", Field::Bool(iv.hi_closed)),
                    ("k0", Field::opt_int(k0.map(|k| k as usize))),
                ],
            }
        })
        .collect();
    Ok(Report {
        command: "regimes",
        params: vec![("n", Field::Int(n as i64)), ("qmax", Field::Num(qmax))],
        results,
        failures: vec![],
    })
}

pub fn adjudicate(g: &GlobalArgs, n: usize, q: &str) -> Cmd {
    check_n(n)?;
    let q = QNorm::parse(q, n)?
        .as_finite()
        .ok_or_else(|| invalid("adjudication needs a finite q"))?;
    let a = adjudicate_halfspace_forms(n, q, g.order)?;
    let record = |direction: &str, alpha: f64, value: f64, matched: khavinson::halfspace::FormMatch| Record {
        inputs: vec![
            ("n", Field::Int(n as i64)),
            ("q", Field::Num(q)),
            ("direction", Field::Text(direction.into())),
            ("alpha", Field::Num(alpha)),
        ],
        value: Field::Num(value),
        method: "Quadrature".into(),
        diagnostics: vec![
            ("form_3f2", Field::Num(a.form_3f2)),
            ("form_2f1", Field::Num(a.form_2f1)),
            ("matches", Field::Text(match_name(matched).into())),
        ],
    };
    let results = vec![
        record("radial", 0.0, a.quadrature_radial, a.radial_match),
        record("tangential", PI / 2.0, a.quadrature_tangential, a.tangential_match),
    ];
    let failures = if a.resolved { vec![] } else { vec![a.verdict.clone()] };
    let mut params = common_params(g);
    params.push(("tolerance", Field::Num(a.tolerance)));
    params.push(("resolved", Field::Bool(a.resolved)));
    params.push(("verdict", Field::Text(a.verdict.clone())));
    Ok(Report {
        command: "adjudicate",
        params,
        results,
        failures,
    })
}

fn match_name(m: khavinson::halfspace::FormMatch) -> &'static str {
    use khavinson::halfspace::FormMatch::*;
    match m {
        ThreeFTwo => "3F2",
        TwoFOne => "2F1",
        Both => "both",
        Neither => "neither",
    }
}

/// The maximizing direction of the sharp constant at `pt`.
fn maximizing_alpha(g: &GlobalArgs, pt: &Point) -> Result<f64, CliError> {
    let fallback = match classify_regime(pt.n, pt.q) {
        Regime::Tangential => PI / 2.0,
        _ => 0.0,
    };
    let found = match pt.at {
        Where::Ball { rho } => sharp_constant_ball(pt.n, pt.q, rho)?.direction_alpha,
        Where::Half { x_n } => sharp_constant_halfspace(pt.n, pt.q, x_n, g.order)?.direction_alpha,
    };
    Ok(found.unwrap_or(fallback))
}

fn cap_records(pt: &Point, alpha: f64, caps: &CapSequence) -> Vec<Record> {
    caps.radii
        .iter()
        .zip(&caps.ratios)
        .map(|(&h, &ratio)| {
            let mut inputs = point_inputs(pt, Some(alpha));
            inputs.push(("cap_radius", Field::Num(h)));
            Record {
                inputs,
                value: Field::Num(ratio),
                method: "CapSequence".into(),
                diagnostics: vec![
                    ("supremum", Field::Num(caps.supremum)),
                    ("constant", Field::Num(caps.constant)),
                    ("monotone", Field::Bool(caps.monotone)),
                ],
            }
        })
        .collect()
}

pub fn sharpness(g: &GlobalArgs, p: &PointArgs) -> Cmd {
    let pt = point(p)?;
    let alpha = match pt.alpha {
        Some(a) => a,
        None => maximizing_alpha(g, &pt)?,
    };
    let mut params = common_params(g);
    params.push(("tolerance", Field::Num(SHARPNESS_TOLERANCE)));
    let mut failures = Vec::new();
    let results = match pt.q {
        QNorm::Infinity => {
            let caps = match pt.at {
                Where::Ball { rho } => infinity_caps_ball(pt.n, rho, alpha, g.order)?,
                Where::Half { x_n } => infinity_caps_halfspace(pt.n, x_n, alpha, g.order)?,
            };
            if !caps.monotone {
                failures.push(format!("cap ratios do not increase towards 1: {:?}", caps.ratios));
            }
            cap_records(&pt, alpha, &caps)
        }
        QNorm::Finite(_) => {
            let ratio = match pt.at {
                Where::Ball { rho } => sharpness_ratio_ball(&BallConfig::new(pt.n, pt.q, rho, alpha)?, g.order)?,
                Where::Half { x_n } => {
                    sharpness_ratio_halfspace(&HalfSpaceConfig::new(pt.n, pt.q, x_n, alpha)?, g.order)?
                }
            };
            let defect = (ratio - 1.0).abs();
            if !(defect <= SHARPNESS_TOLERANCE) {
                failures.push(format!("ratio {ratio} differs from 1 by {defect:e}"));
            }
            vec![Record {
                inputs: point_inputs(&pt, Some(alpha)),
                value: Field::Num(ratio),
                method: "ExtremalData".into(),
                diagnostics: vec![("defect", Field::Num(defect))],
            }]
        }
    };
    Ok(Report {
        command: "sharpness",
        params,
        results,
        failures,
    })
}
