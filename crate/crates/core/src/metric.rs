//! Distances between cities.
//!
//! Every distance is produced on the scaled integer lattice the instance lives
//! on. For L¹, L∞ and the graphic metric the scaled distance is an integer, and
//! for L² the squared scaled distance is an integer, so comparisons in those
//! metrics are exact. Other exponents fall back to a relative tolerance.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::GraphicMetric;

/// Relative tolerance used to compare distances of exotic L^p norms.
pub const RELATIVE_TOLERANCE: f64 = 1e-9;

/// A city on the integer lattice. The true position is `(x / S, y / S)` where
/// `S` is the scale carried by the owning instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ScaledPoint {
    pub x: i64,
    pub y: i64,
}

impl ScaledPoint {
    pub const fn new(x: i64, y: i64) -> Self {
        Self { x, y }
    }
}

/// Exponent of an L^p norm, `1 <= p <= inf`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct PNorm(f64);

impl PNorm {
    pub const L1: PNorm = PNorm(1.0);
    pub const L2: PNorm = PNorm(2.0);
    pub const LINF: PNorm = PNorm(f64::INFINITY);

    pub fn new(p: f64) -> Result<Self> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidNorm(p));
        }
        Ok(PNorm(p))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_l1(self) -> bool {
        self.0 == 1.0
    }

    pub fn is_l2(self) -> bool {
        self.0 == 2.0
    }

    pub fn is_inf(self) -> bool {
        self.0.is_infinite()
    }

    /// Whether distances under this norm are compared without tolerance.
    pub fn is_exact(self) -> bool {
        self.is_l1() || self.is_l2() || self.is_inf()
    }
}

impl fmt::Display for PNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_inf() {
            write!(f, "linf")
        } else {
            write!(f, "l{}", self.0)
        }
    }
}

impl FromStr for PNorm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        let body = lower
            .strip_prefix("l^")
            .or_else(|| lower.strip_prefix('l'))
            .unwrap_or(&lower);
        match body {
            "inf" | "infinity" | "∞" => Ok(PNorm::LINF),
            _ => {
                let p: f64 = body
                    .parse()
                    .map_err(|_| Error::UnknownMetric(s.to_string()))?;
                PNorm::new(p)
            }
        }
    }
}

/// Which distance function governs an instance, without any materialized data.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MetricKind {
    Lp(PNorm),
    Graphic,
}

impl MetricKind {
    pub const L1: MetricKind = MetricKind::Lp(PNorm::L1);
    pub const L2: MetricKind = MetricKind::Lp(PNorm::L2);
    pub const LINF: MetricKind = MetricKind::Lp(PNorm::LINF);

    pub fn lp(p: f64) -> Result<Self> {
        PNorm::new(p).map(MetricKind::Lp)
    }

    pub fn is_exact(self) -> bool {
        match self {
            MetricKind::Lp(p) => p.is_exact(),
            MetricKind::Graphic => true,
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricKind::Lp(p) => p.fmt(f),
            MetricKind::Graphic => write!(f, "graphic"),
        }
    }
}

impl FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "graphic" | "graph" => Ok(MetricKind::Graphic),
            "euclidean" => Ok(MetricKind::L2),
            "rectilinear" | "manhattan" => Ok(MetricKind::L1),
            "max" | "chebyshev" => Ok(MetricKind::LINF),
            _ => s.parse::<PNorm>().map(MetricKind::Lp),
        }
    }
}

/// A materialized metric: an L^p norm, or the shortest-path metric of a
/// connected unit-distance graph.
#[derive(Clone, Debug)]
pub enum MetricSpec {
    Lp(PNorm),
    Graphic(Arc<GraphicMetric>),
}

impl MetricSpec {
    pub fn kind(&self) -> MetricKind {
        match self {
            MetricSpec::Lp(p) => MetricKind::Lp(*p),
            MetricSpec::Graphic(_) => MetricKind::Graphic,
        }
    }
}

/// One distance in scaled lattice units, with whatever exact forms the metric
/// admits for the pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DistanceValue {
    pub metric: MetricKind,
    pub scale: i64,
    /// Scaled distance, present when it is an integer that can be certified
    /// (always for L¹, L∞ and graphic; for any norm on axis-aligned pairs;
    /// for L² when the squared distance is a perfect square).
    pub exact: Option<i64>,
    /// Squared scaled distance, L² only.
    pub squared_exact: Option<i64>,
    /// The distance in true units, `value / S`.
    pub approx: f64,
}

impl DistanceValue {
    pub(crate) fn from_exact(metric: MetricKind, scale: i64, exact: i64) -> Self {
        Self {
            metric,
            scale,
            exact: Some(exact),
            squared_exact: None,
            approx: exact as f64 / scale as f64,
        }
    }

    /// The distance in scaled lattice units.
    pub fn scaled(&self) -> f64 {
        match self.exact {
            Some(e) => e as f64,
            None => self.approx * self.scale as f64,
        }
    }

    /// Whether the scaled distance equals the integer `value`, exactly when
    /// possible and within the relative tolerance otherwise.
    pub fn equals_scaled_integer(&self, value: i64) -> bool {
        if let Some(e) = self.exact {
            return e == value;
        }
        if let Some(sq) = self.squared_exact {
            return i128::from(sq) == i128::from(value) * i128::from(value);
        }
        approx_eq(self.scaled(), value as f64)
    }

    /// Whether the scaled distance is at least the integer `value`.
    pub fn at_least_scaled_integer(&self, value: i64) -> bool {
        if let Some(e) = self.exact {
            return e >= value;
        }
        if let Some(sq) = self.squared_exact {
            return value <= 0 || i128::from(sq) >= i128::from(value) * i128::from(value);
        }
        let d = self.scaled();
        d >= value as f64 || approx_eq(d, value as f64)
    }
}

fn approx_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= RELATIVE_TOLERANCE * a.abs().max(b.abs())
}

/// L^p distance between two scaled points.
pub fn lp_distance(p: PNorm, a: ScaledPoint, b: ScaledPoint, scale: i64) -> Result<DistanceValue> {
    if scale < 1 {
        return Err(Error::InvalidScale(scale));
    }
    Ok(lp_distance_unchecked(p, a, b, scale))
}

pub(crate) fn lp_distance_unchecked(p: PNorm, a: ScaledPoint, b: ScaledPoint, scale: i64) -> DistanceValue {
    let metric = MetricKind::Lp(p);
    let dx = (a.x - b.x).abs();
    let dy = (a.y - b.y).abs();
    let s = scale as f64;

    if p.is_l2() {
        let sq = dx * dx + dy * dy;
        let root = (sq as u64).isqrt() as i64;
        let exact = (root * root == sq).then_some(root);
        let approx = match exact {
            Some(e) => e as f64 / s,
            None => (sq as f64).sqrt() / s,
        };
        return DistanceValue {
            metric,
            scale,
            exact,
            squared_exact: Some(sq),
            approx,
        };
    }
    if p.is_l1() {
        return DistanceValue::from_exact(metric, scale, dx + dy);
    }
    if p.is_inf() {
        return DistanceValue::from_exact(metric, scale, dx.max(dy));
    }
    if dx == 0 || dy == 0 {
        return DistanceValue::from_exact(metric, scale, dx + dy);
    }
    let (hi, lo) = (dx.max(dy) as f64, dx.min(dy) as f64);
    let value = hi * (1.0 + (lo / hi).powf(p.value())).powf(1.0 / p.value());
    DistanceValue {
        metric,
        scale,
        exact: None,
        squared_exact: None,
        approx: value / s,
    }
}

/// Orders two distances of the same metric and scale.
///
/// L¹, L∞ and graphic compare scaled integers, L² compares squared scaled
/// integers, and any other p compares floating values where `Equal` means
/// within [`RELATIVE_TOLERANCE`].
pub fn compare(d1: &DistanceValue, d2: &DistanceValue, metric: MetricKind) -> Result<Ordering> {
    for d in [d1, d2] {
        if d.metric != metric {
            return Err(Error::MetricMismatch {
                left: d.metric,
                right: metric,
            });
        }
    }
    if d1.scale != d2.scale {
        return Err(Error::InvalidScale(d2.scale));
    }
    Ok(compare_unchecked(d1, d2))
}

pub(crate) fn compare_unchecked(d1: &DistanceValue, d2: &DistanceValue) -> Ordering {
    match d1.metric {
        MetricKind::Lp(p) if p.is_l2() => d1.squared_exact.cmp(&d2.squared_exact),
        MetricKind::Lp(p) if !p.is_exact() => {
            let (a, b) = (d1.scaled(), d2.scaled());
            if approx_eq(a, b) {
                Ordering::Equal
            } else {
                a.total_cmp(&b)
            }
        }
        _ => d1.exact.cmp(&d2.exact),
    }
}

/// Accumulated length of a path. `exact` is the scaled integer total and is
/// present only while every summed edge had an exact value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Length {
    pub scale: i64,
    pub exact: Option<i64>,
    pub approx: f64,
}

impl Length {
    pub fn zero(scale: i64) -> Self {
        Self {
            scale,
            exact: Some(0),
            approx: 0.0,
        }
    }

    pub fn add(&mut self, d: &DistanceValue) {
        self.exact = match (self.exact, d.exact) {
            (Some(a), Some(b)) => Some(a + b),
            _ => None,
        };
        self.approx = match self.exact {
            Some(e) => e as f64 / self.scale as f64,
            None => self.approx + d.approx,
        };
    }

    /// The length in true units when it is an exact integer.
    pub fn exact_true(&self) -> Option<i64> {
        self.exact
            .filter(|e| e % self.scale == 0)
            .map(|e| e / self.scale)
    }
}
