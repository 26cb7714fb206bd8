//! Criterion reports and the verdict rules applied to boundary trends.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::fmath;
use crate::geometry::DiscPoint;

/// Outcome of a criterion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Verdict {
    Finite,
    Vanishing,
    Divergent,
    Inconclusive,
}

impl Verdict {
    /// Finite or vanishing.
    pub fn is_bounded(self) -> bool {
        matches!(self, Verdict::Finite | Verdict::Vanishing)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Finite => "finite",
            Verdict::Vanishing => "vanishing",
            Verdict::Divergent => "divergent",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

impl core::fmt::Display for Verdict {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// JSON-safe floats: non-finite values are written as the strings `"+inf"`,
/// `"-inf"` and `"nan"`.
#[cfg(feature = "serde")]
pub mod extended_float {
    use serde::Serializer;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("+inf")
        } else {
            s.serialize_str("-inf")
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Parameter {
    pub name: String,
    #[cfg_attr(feature = "serde", serde(with = "extended_float"))]
    pub value: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct PointValue {
    pub re: f64,
    pub im: f64,
    #[cfg_attr(feature = "serde", serde(with = "extended_float"))]
    pub value: f64,
}

impl PointValue {
    pub fn new(z: DiscPoint, value: f64) -> Self {
        PointValue {
            re: z.re,
            im: z.im,
            value,
        }
    }

    pub fn point(&self) -> DiscPoint {
        DiscPoint {
            re: self.re,
            im: self.im,
        }
    }
}

/// Maximum of a quantity over one ladder ring.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RingValue {
    pub radius: f64,
    #[cfg_attr(feature = "serde", serde(with = "extended_float"))]
    pub value: f64,
}

/// Observed range of a ratio.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Band {
    pub name: String,
    #[cfg_attr(feature = "serde", serde(with = "extended_float"))]
    pub lo: f64,
    #[cfg_attr(feature = "serde", serde(with = "extended_float"))]
    pub hi: f64,
}

impl Band {
    /// Range of the finite, positive-or-zero entries of `values`.
    pub fn of(name: &str, values: impl IntoIterator<Item = f64>) -> Band {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values {
            if v.is_nan() {
                continue;
            }
            lo = lo.min(v);
            hi = hi.max(v);
        }
        Band {
            name: name.to_string(),
            lo,
            hi,
        }
    }

    /// `hi / lo`, the spread of the band.
    pub fn spread(&self) -> f64 {
        self.hi / self.lo
    }
}

/// Named index values, sample sets and verdict for one condition.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CriterionReport {
    pub name: String,
    pub parameters: Vec<Parameter>,
    #[cfg_attr(feature = "serde", serde(with = "extended_float"))]
    pub index_value: f64,
    pub per_point: Vec<PointValue>,
    pub ring_trend: Vec<RingValue>,
    pub verdict: Verdict,
    pub bands: Vec<Band>,
    pub notes: Vec<String>,
    pub sub_reports: Vec<CriterionReport>,
}

impl CriterionReport {
    pub fn new(name: &str) -> Self {
        CriterionReport {
            name: name.to_string(),
            parameters: Vec::new(),
            index_value: f64::NAN,
            per_point: Vec::new(),
            ring_trend: Vec::new(),
            verdict: Verdict::Inconclusive,
            bands: Vec::new(),
            notes: Vec::new(),
            sub_reports: Vec::new(),
        }
    }

    pub fn param(mut self, name: &str, value: f64) -> Self {
        self.parameters.push(Parameter {
            name: name.to_string(),
            value,
        });
        self
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn band(&self, name: &str) -> Option<&Band> {
        self.bands.iter().find(|b| b.name == name)
    }

    pub fn sub(&self, name: &str) -> Option<&CriterionReport> {
        self.sub_reports.iter().find(|r| r.name == name)
    }

    /// Parameter value by name.
    pub fn parameter(&self, name: &str) -> Option<f64> {
        self.parameters.iter().find(|p| p.name == name).map(|p| p.value)
    }

    /// Sets `index_value` to the max of `per_point`.
    pub fn set_index_from_points(&mut self) {
        self.index_value = max_value(self.per_point.iter().map(|p| p.value));
    }
}

/// Maximum treating NaN as contagious and an empty input as 0.
pub fn max_value(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut m = 0.0f64;
    for v in values {
        if v.is_nan() {
            return f64::NAN;
        }
        m = m.max(v);
    }
    m
}

/// Tail threshold of the vanishing rule, relative to the global maximum.
pub const VANISHING_RELATIVE: f64 = 1e-3;
/// Absolute floor of the vanishing threshold.
pub const VANISHING_FLOOR: f64 = 1e-12;
/// Minimum log-log slope magnitude read as a power-law trend.
pub const SLOPE_TOLERANCE: f64 = 0.05;

/// Least-squares slope of `ln v` against `ln(1 − ρ)`.
pub fn boundary_slope(trend: &[RingValue]) -> f64 {
    let n = trend.len() as f64;
    let xs = trend.iter().map(|r| fmath::ln(1.0 - r.radius));
    let ys = trend.iter().map(|r| fmath::ln(r.value));
    let (mx, my) = (xs.clone().sum::<f64>() / n, ys.clone().sum::<f64>() / n);
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs.zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    sxy / sxx
}

/// Verdict for per-ring maxima approaching the circle.
///
/// Any infinite ring value is divergent and an identically zero trend is
/// vanishing. Otherwise the trend vanishes when the last ring is below
/// `max(1e−3·max, 1e−12)` and the last three rings do not increase. Failing
/// that, the log-log slope over the last three rings against `1 − ρ` decides:
/// a slope of at least `+0.05` with decreasing values is a vanishing power law,
/// at most `−0.05` with increasing values is divergent, anything else finite.
pub fn classify_ring_trend(trend: &[RingValue]) -> Verdict {
    if trend.len() < 3 || trend.iter().any(|r| r.value.is_nan() || r.value < 0.0) {
        return Verdict::Inconclusive;
    }
    if trend.iter().any(|r| r.value == f64::INFINITY) {
        return Verdict::Divergent;
    }
    let max = max_value(trend.iter().map(|r| r.value));
    if max == 0.0 {
        return Verdict::Vanishing;
    }
    let tail = &trend[trend.len() - 3..];
    let last = tail[2].value;
    let non_increasing = tail.windows(2).all(|w| w[1].value <= w[0].value);
    let threshold = (VANISHING_RELATIVE * max).max(VANISHING_FLOOR);
    if last <= threshold && non_increasing {
        return Verdict::Vanishing;
    }
    if tail.iter().any(|r| r.value == 0.0) {
        return Verdict::Finite;
    }
    let slope = boundary_slope(tail);
    let decreasing = tail.windows(2).all(|w| w[1].value < w[0].value);
    let increasing = tail.windows(2).all(|w| w[1].value > w[0].value);
    if slope >= SLOPE_TOLERANCE && decreasing {
        Verdict::Vanishing
    } else if slope <= -SLOPE_TOLERANCE && increasing {
        Verdict::Divergent
    } else {
        Verdict::Finite
    }
}

/// Ratio of successive increments below which a cumulative sequence is read as
/// converging.
pub const INCREMENT_RATIO: f64 = 0.9;

/// Verdict for partial integrals (or partial sums) over a geometrically
/// refined sweep: the last increment must shrink by a factor below 0.9.
pub fn classify_cumulative(values: &[f64]) -> Verdict {
    if values.len() < 3 || values.iter().any(|v| v.is_nan()) {
        return Verdict::Inconclusive;
    }
    if values.iter().any(|v| v.is_infinite()) {
        return Verdict::Divergent;
    }
    let n = values.len();
    let d1 = values[n - 2] - values[n - 3];
    let d2 = values[n - 1] - values[n - 2];
    if d2 <= 0.0 && d1 <= 0.0 {
        return Verdict::Finite;
    }
    let scale = fmath::abs(values[n - 1]).max(f64::MIN_POSITIVE);
    if fmath::abs(d2) <= 1e-12 * scale {
        return Verdict::Finite;
    }
    if d1 <= 0.0 {
        return Verdict::Inconclusive;
    }
    if d2 / d1 < INCREMENT_RATIO {
        Verdict::Finite
    } else {
        Verdict::Divergent
    }
}

/// Relative change below which a refined value counts as converged.
pub const CONVERGED_CHANGE: f64 = 0.05;
/// Growth factor at or above which a refined value counts as divergent.
pub const DIVERGENT_GROWTH: f64 = 2.0;

/// Verdict comparing a value before and after a refinement sweep.
pub fn classify_sweep(first: f64, last: f64) -> Verdict {
    if first.is_nan() || last.is_nan() {
        return Verdict::Inconclusive;
    }
    if last.is_infinite() {
        return Verdict::Divergent;
    }
    let scale = fmath::abs(first).max(f64::MIN_POSITIVE);
    if fmath::abs(last - first) / scale < CONVERGED_CHANGE {
        Verdict::Finite
    } else if last >= DIVERGENT_GROWTH * first {
        Verdict::Divergent
    } else {
        Verdict::Inconclusive
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn trend(f: impl Fn(f64) -> f64) -> Vec<RingValue> {
        (0..7)
            .map(|j| {
                let radius = 1.0 - 0.5f64.powi(j) * 0.5;
                RingValue {
                    radius,
                    value: f(1.0 - radius),
                }
            })
            .collect()
    }

    #[test]
    fn power_laws() {
        assert_eq!(classify_ring_trend(&trend(|d| d.powf(0.1))), Verdict::Vanishing);
        assert_eq!(classify_ring_trend(&trend(|d| d.powf(-0.1))), Verdict::Divergent);
        assert_eq!(classify_ring_trend(&trend(|_| 1.0)), Verdict::Finite);
        assert_eq!(classify_ring_trend(&trend(|d| 3.0 + d)), Verdict::Finite);
        assert_eq!(classify_ring_trend(&trend(|d| d.powf(-2.0))), Verdict::Divergent);
    }

    #[test]
    fn threshold_rule_and_special_values() {
        let mut t = trend(|_| 0.0);
        assert_eq!(classify_ring_trend(&t), Verdict::Vanishing);
        t[0].value = 5.0;
        assert_eq!(classify_ring_trend(&t), Verdict::Vanishing);
        t[6].value = f64::INFINITY;
        assert_eq!(classify_ring_trend(&t), Verdict::Divergent);
        t[6].value = f64::NAN;
        assert_eq!(classify_ring_trend(&t), Verdict::Inconclusive);
        assert_eq!(classify_ring_trend(&t[..2]), Verdict::Inconclusive);
    }

    #[test]
    fn cumulative_rules() {
        assert_eq!(classify_cumulative(&[1.0, 1.5, 1.75]), Verdict::Finite);
        assert_eq!(classify_cumulative(&[1.0, 2.0, 3.0]), Verdict::Divergent);
        assert_eq!(classify_cumulative(&[1.0, 2.0, 4.0]), Verdict::Divergent);
        assert_eq!(classify_cumulative(&[2.0, 2.0, 2.0]), Verdict::Finite);
        assert_eq!(classify_cumulative(&[1.0, f64::INFINITY, 3.0]), Verdict::Divergent);
    }

    #[test]
    fn sweep_rules() {
        assert_eq!(classify_sweep(1.0, 1.04), Verdict::Finite);
        assert_eq!(classify_sweep(1.0, 2.5), Verdict::Divergent);
        assert_eq!(classify_sweep(1.0, 1.3), Verdict::Inconclusive);
    }

    #[test]
    fn band_and_index() {
        let b = Band::of("x", vec![2.0, f64::NAN, 0.5, 1.0]);
        assert_eq!((b.lo, b.hi, b.spread()), (0.5, 2.0, 4.0));
        let mut r = CriterionReport::new("r").param("p", 2.0);
        r.per_point = vec![PointValue::new(DiscPoint::ORIGIN, 3.0), PointValue::new(DiscPoint::ORIGIN, 1.0)];
        r.set_index_from_points();
        assert_eq!(r.index_value, 3.0);
        assert_eq!(r.parameter("p"), Some(2.0));
    }
}
