//! Table functions: ordered `(x, y)` knots plus an interpolation method.
//!
//! Knots are kept as exact decimals; evaluation runs in `f64`.

use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::to_f64;

/// Relative sampling resolution used where no closed form exists
/// (cardinal splines may overshoot between knots).
pub const SAMPLING_RESOLUTION: f64 = 1e-3;

pub const DEFAULT_TENSION: Decimal = Decimal::from_parts(5, 0, 0, false, 1);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "method")]
pub enum Interpolation {
    /// Holds `y[i]` on `[x[i], x[i+1])`.
    StepAfter,
    Linear,
    /// Fritsch–Carlson monotone cubic Hermite.
    MonotoneCubic,
    /// Cardinal cubic Hermite spline; tension 0 is Catmull–Rom-like, 1 gives
    /// flat tangents.
    Cardinal {
        tension: Decimal,
    },
}

impl Interpolation {
    pub fn name(&self) -> &'static str {
        match self {
            Interpolation::StepAfter => "step_after",
            Interpolation::Linear => "linear",
            Interpolation::MonotoneCubic => "monotone_cubic",
            Interpolation::Cardinal { .. } => "cardinal",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Extrapolation {
    /// Out-of-domain inputs map to the nearer endpoint's value.
    #[default]
    Clamp,
    /// Continue the slope of the two outermost knots on that side.
    ExtendSlope,
    Reject,
}

impl Extrapolation {
    pub fn name(self) -> &'static str {
        match self {
            Extrapolation::Clamp => "clamp",
            Extrapolation::ExtendSlope => "extend_slope",
            Extrapolation::Reject => "reject",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FunctionError {
    #[error("DOMAIN_VIOLATION: input {x} outside function domain [{lo}, {hi}]")]
    DomainViolation { x: f64, lo: f64, hi: f64 },
    #[error("malformed table function: {0}")]
    Malformed(FunctionIssue),
}

/// Structural problems a table function can have.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum FunctionIssue {
    #[error("a table function needs at least two points")]
    TooFewPoints,
    #[error("x values must be strictly increasing (point {index})")]
    XNotIncreasing { index: usize },
    #[error("cardinal tension must lie in [0, 1]")]
    TensionOutOfRange,
}

impl FunctionIssue {
    pub fn code(self) -> &'static str {
        match self {
            FunctionIssue::TooFewPoints => "FUNCTION_TOO_SHORT",
            FunctionIssue::XNotIncreasing { .. } => "FUNCTION_X_ORDER",
            FunctionIssue::TensionOutOfRange => "FUNCTION_TENSION",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "shape")]
pub enum Monotonicity {
    /// Non-decreasing over the whole domain.
    Increasing,
    /// Non-increasing over the whole domain.
    Decreasing,
    /// Direction changes; lists 1-based segment indices running against the
    /// direction set by the first non-flat segment.
    NonMonotone { offending: Vec<usize> },
}

impl Monotonicity {
    pub fn is_monotone(&self) -> bool {
        !matches!(self, Monotonicity::NonMonotone { .. })
    }
}

/// Image bounds of an input interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImageBounds {
    pub lo: f64,
    pub hi: f64,
    /// Set when the bound comes from grid sampling rather than a closed form.
    pub approximate: bool,
}

/// One evaluation, recording whether extrapolation was needed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub y: f64,
    pub out_of_domain: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableFunction {
    pub points: Vec<(Decimal, Decimal)>,
    pub interpolation: Interpolation,
    #[serde(default)]
    pub extrapolation: Extrapolation,
}

impl TableFunction {
    pub fn new(
        points: Vec<(Decimal, Decimal)>,
        interpolation: Interpolation,
        extrapolation: Extrapolation,
    ) -> Result<Self, FunctionError> {
        let f = TableFunction { points, interpolation, extrapolation };
        match f.issues().into_iter().next() {
            Some(issue) => Err(FunctionError::Malformed(issue)),
            None => Ok(f),
        }
    }

    /// Builds a function from binary floats; each value is converted to the
    /// nearest decimal.
    pub fn from_f64(
        points: &[(f64, f64)],
        interpolation: Interpolation,
        extrapolation: Extrapolation,
    ) -> Result<Self, FunctionError> {
        let conv = |v: f64| Decimal::from_f64_retain(v).or_else(|| Decimal::try_from(v).ok()).unwrap_or_default();
        let points = points.iter().map(|&(x, y)| (conv(x), conv(y))).collect();
        Self::new(points, interpolation, extrapolation)
    }

    pub fn issues(&self) -> Vec<FunctionIssue> {
        let mut out = Vec::new();
        if self.points.len() < 2 {
            out.push(FunctionIssue::TooFewPoints);
        }
        if let Some(i) = self.points.windows(2).position(|w| w[1].0 <= w[0].0) {
            out.push(FunctionIssue::XNotIncreasing { index: i + 2 });
        }
        if let Interpolation::Cardinal { tension } = self.interpolation {
            if tension < Decimal::ZERO || tension > Decimal::ONE {
                out.push(FunctionIssue::TensionOutOfRange);
            }
        }
        out
    }

    pub fn knots(&self) -> Vec<(f64, f64)> {
        self.points.iter().map(|&(x, y)| (to_f64(x), to_f64(y))).collect()
    }

    /// `[x₁, xₙ]`.
    pub fn domain(&self) -> (f64, f64) {
        let first = self.points.first().map(|p| to_f64(p.0)).unwrap_or(f64::NAN);
        let last = self.points.last().map(|p| to_f64(p.0)).unwrap_or(f64::NAN);
        (first, last)
    }

    pub fn evaluate(&self, x: f64) -> Result<f64, FunctionError> {
        self.sample(x).map(|s| s.y)
    }

    pub fn sample(&self, x: f64) -> Result<Sample, FunctionError> {
        let curve = Curve::build(self)?;
        curve.sample(x, self.extrapolation)
    }

    pub fn monotonicity(&self) -> Monotonicity {
        let knots = self.knots();
        let classify_steps = |steps: &mut dyn Iterator<Item = (usize, f64)>| {
            let mut direction = 0.0f64;
            let mut offending = Vec::new();
            for (segment, dy) in steps {
                let sign = if dy > 1e-12 {
                    1.0
                } else if dy < -1e-12 {
                    -1.0
                } else {
                    0.0
                };
                if sign == 0.0 {
                    continue;
                }
                if direction == 0.0 {
                    direction = sign;
                } else if sign != direction && offending.last() != Some(&segment) {
                    offending.push(segment);
                }
            }
            if !offending.is_empty() {
                Monotonicity::NonMonotone { offending }
            } else if direction < 0.0 {
                Monotonicity::Decreasing
            } else {
                Monotonicity::Increasing
            }
        };
        match self.interpolation {
            Interpolation::Cardinal { .. } => {
                let Ok(curve) = Curve::build(self) else {
                    return Monotonicity::Increasing;
                };
                let (lo, hi) = self.domain();
                let samples = grid(lo, hi, (hi - lo) * SAMPLING_RESOLUTION);
                let values: Vec<(usize, f64)> =
                    samples.iter().map(|&x| (curve.segment(x) + 1, curve.inside(x))).collect();
                let mut steps = values.windows(2).map(|w| (w[0].0, w[1].1 - w[0].1));
                classify_steps(&mut steps)
            }
            _ => {
                let mut steps = knots.windows(2).enumerate().map(|(i, w)| (i + 1, w[1].1 - w[0].1));
                classify_steps(&mut steps)
            }
        }
    }

    /// Bounds of `{f(x) : x ∈ [a, b]}`.
    ///
    /// Exact for step-after, linear and monotone-cubic functions, whose
    /// extrema over an interval lie at its endpoints or at knots. Cardinal
    /// splines are grid-sampled and flagged approximate.
    pub fn propagate_interval(&self, a: f64, b: f64) -> Result<ImageBounds, FunctionError> {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        let curve = Curve::build(self)?;
        let mut candidates = vec![a, b];
        candidates.extend(curve.xs.iter().copied().filter(|&x| x > a && x <= b));
        let approximate = matches!(self.interpolation, Interpolation::Cardinal { .. }) && b > a;
        if approximate {
            let (lo, hi) = self.domain();
            let (ga, gb) = (a.max(lo), b.min(hi));
            if ga < gb {
                candidates.extend(grid(ga, gb, (hi - lo) * SAMPLING_RESOLUTION));
            }
        }
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for x in candidates {
            let y = curve.sample(x, self.extrapolation)?.y;
            lo = lo.min(y);
            hi = hi.max(y);
        }
        Ok(ImageBounds { lo, hi, approximate })
    }
}

/// Evenly spaced samples over `[lo, hi]` including both ends.
fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    if hi.is_nan() || lo.is_nan() || step.is_nan() || hi <= lo || step <= 0.0 {
        return vec![lo];
    }
    let n = ((hi - lo) / step).ceil() as usize;
    (0..=n).map(|i| if i == n { hi } else { lo + (hi - lo) * i as f64 / n as f64 }).collect()
}

/// Float view of a well-formed function with precomputed tangents.
struct Curve {
    xs: Vec<f64>,
    ys: Vec<f64>,
    method: Interpolation,
    tangents: Vec<f64>,
}

impl Curve {
    fn build(f: &TableFunction) -> Result<Self, FunctionError> {
        if let Some(issue) = f.issues().into_iter().next() {
            return Err(FunctionError::Malformed(issue));
        }
        let (xs, ys): (Vec<f64>, Vec<f64>) = f.knots().into_iter().unzip();
        let tangents = match f.interpolation {
            Interpolation::MonotoneCubic => fritsch_carlson_tangents(&xs, &ys),
            Interpolation::Cardinal { tension } => cardinal_tangents(&xs, &ys, to_f64(tension)),
            _ => Vec::new(),
        };
        Ok(Curve { xs, ys, method: f.interpolation, tangents })
    }

    /// Index `k` of the segment `[x[k], x[k+1])` holding `x`; the last
    /// segment also owns `x[n]`.
    fn segment(&self, x: f64) -> usize {
        let n = self.xs.len();
        self.xs.partition_point(|&v| v <= x).saturating_sub(1).min(n - 2)
    }

    fn inside(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x >= self.xs[n - 1] {
            return self.ys[n - 1];
        }
        let k = self.segment(x);
        let (x0, x1, y0, y1) = (self.xs[k], self.xs[k + 1], self.ys[k], self.ys[k + 1]);
        match self.method {
            Interpolation::StepAfter => y0,
            Interpolation::Linear => {
                if x == x0 {
                    y0
                } else {
                    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
                }
            }
            Interpolation::MonotoneCubic | Interpolation::Cardinal { .. } => {
                hermite(x0, x1, y0, y1, self.tangents[k], self.tangents[k + 1], x)
            }
        }
    }

    fn sample(&self, x: f64, policy: Extrapolation) -> Result<Sample, FunctionError> {
        let n = self.xs.len();
        let (lo, hi) = (self.xs[0], self.xs[n - 1]);
        if x >= lo && x <= hi {
            return Ok(Sample { y: self.inside(x), out_of_domain: false });
        }
        let y = match policy {
            Extrapolation::Reject => return Err(FunctionError::DomainViolation { x, lo, hi }),
            Extrapolation::Clamp => {
                if x < lo {
                    self.ys[0]
                } else {
                    self.ys[n - 1]
                }
            }
            Extrapolation::ExtendSlope => {
                if x < lo {
                    let slope = (self.ys[1] - self.ys[0]) / (self.xs[1] - self.xs[0]);
                    self.ys[0] + (x - lo) * slope
                } else {
                    let slope = (self.ys[n - 1] - self.ys[n - 2]) / (self.xs[n - 1] - self.xs[n - 2]);
                    self.ys[n - 1] + (x - hi) * slope
                }
            }
        };
        Ok(Sample { y, out_of_domain: true })
    }
}

fn hermite(x0: f64, x1: f64, y0: f64, y1: f64, m0: f64, m1: f64, x: f64) -> f64 {
    let h = x1 - x0;
    let t = (x - x0) / h;
    let t2 = t * t;
    let t3 = t2 * t;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + t;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    h00 * y0 + h10 * h * m0 + h01 * y1 + h11 * h * m1
}

/// Tangents of the Fritsch–Carlson monotone cubic.
///
/// Interior tangents start as the mean of adjacent secants (zero where the
/// secants change sign), end tangents as the one-sided secant. Each segment
/// then has `(α, β) = (mₖ/δₖ, mₖ₊₁/δₖ)` pulled back inside the circle of
/// radius 3.
fn fritsch_carlson_tangents(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let secants: Vec<f64> = (0..n - 1).map(|k| (ys[k + 1] - ys[k]) / (xs[k + 1] - xs[k])).collect();
    let mut m = vec![0.0; n];
    m[0] = secants[0];
    m[n - 1] = secants[n - 2];
    for k in 1..n - 1 {
        let (d0, d1) = (secants[k - 1], secants[k]);
        m[k] = if d0 * d1 <= 0.0 { 0.0 } else { (d0 + d1) / 2.0 };
    }
    for k in 0..n - 1 {
        let d = secants[k];
        if d == 0.0 {
            m[k] = 0.0;
            m[k + 1] = 0.0;
            continue;
        }
        let alpha = m[k] / d;
        let beta = m[k + 1] / d;
        let r2 = alpha * alpha + beta * beta;
        if r2 > 9.0 {
            let tau = 3.0 / r2.sqrt();
            m[k] = tau * alpha * d;
            m[k + 1] = tau * beta * d;
        }
    }
    m
}

/// Cardinal spline tangents `(1 − c)·(y[k+1] − y[k−1]) / (x[k+1] − x[k−1])`,
/// one-sided at the ends.
fn cardinal_tangents(xs: &[f64], ys: &[f64], tension: f64) -> Vec<f64> {
    let n = xs.len();
    let scale = 1.0 - tension;
    (0..n)
        .map(|k| {
            let (a, b) = (k.saturating_sub(1), (k + 1).min(n - 1));
            scale * (ys[b] - ys[a]) / (xs[b] - xs[a])
        })
        .collect()
}
