//! Normalized distance ν between a recurrence curve and a simulation curve.
//!
//! Both curves are scaled by t ← t/M and U ← U/γ, where M is the last
//! iteration and γ the maximum of the simulation curve. ν is the mean, over
//! the recurrence points, of the Euclidean distance to the linear spline
//! through the simulation points.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MetricError {
    #[error("curve needs at least two points, got {0}")]
    TooShort(usize),
    #[error("curve abscissae must be strictly increasing (index {0})")]
    NotIncreasing(usize),
    #[error("curve contains a non-finite value (index {0})")]
    NonFinite(usize),
    #[error("curves differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("degenerate flat-zero simulation curve")]
    FlatZero,
}

/// Points (t_i, u_i) with strictly increasing t.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    points: Vec<[f64; 2]>,
}

impl Curve {
    pub fn new(points: Vec<[f64; 2]>) -> Result<Self, MetricError> {
        if points.len() < 2 {
            return Err(MetricError::TooShort(points.len()));
        }
        for (k, p) in points.iter().enumerate() {
            if !p[0].is_finite() || !p[1].is_finite() {
                return Err(MetricError::NonFinite(k));
            }
            if k > 0 && p[0] <= points[k - 1][0] {
                return Err(MetricError::NotIncreasing(k));
            }
        }
        Ok(Self { points })
    }

    /// Curve over t = first_t, first_t + 1, …
    pub fn from_values(first_t: usize, values: &[f64]) -> Result<Self, MetricError> {
        Self::new(
            values
                .iter()
                .enumerate()
                .map(|(k, &u)| [(first_t + k) as f64, u])
                .collect(),
        )
    }

    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn scaled(&self, t_scale: f64, u_scale: f64) -> Curve {
        Curve {
            points: self
                .points
                .iter()
                .map(|p| [p[0] / t_scale, p[1] / u_scale])
                .collect(),
        }
    }
}

/// Scales both curves by the simulation curve's last abscissa M and
/// maximum ordinate γ.
pub fn normalize_pair(sim: &Curve, grr: &Curve) -> Result<(Curve, Curve), MetricError> {
    if sim.len() != grr.len() {
        return Err(MetricError::LengthMismatch(sim.len(), grr.len()));
    }
    let m = sim.points.last().map(|p| p[0]).unwrap_or(0.0);
    let gamma = sim
        .points
        .iter()
        .map(|p| p[1])
        .fold(f64::NEG_INFINITY, f64::max);
    if !(gamma > 0.0) || !(m > 0.0) {
        return Err(MetricError::FlatZero);
    }
    Ok((sim.scaled(m, gamma), grr.scaled(m, gamma)))
}

/// Distance from `p` to the segment a–b: orthogonal projection clamped to
/// the endpoints.
pub fn point_to_segment(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    let s = if len2 > 0.0 {
        (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    // Measure from the nearer endpoint so vertices give exactly zero.
    let (x, y) = if s <= 0.5 {
        (a[0] + s * d[0] - p[0], a[1] + s * d[1] - p[1])
    } else {
        let u = 1.0 - s;
        (b[0] - u * d[0] - p[0], b[1] - u * d[1] - p[1])
    };
    x.hypot(y)
}

/// Minimum distance from `p` to the linear spline through `c`.
pub fn point_to_polyline(p: [f64; 2], c: &Curve) -> f64 {
    c.points
        .windows(2)
        .map(|w| point_to_segment(p, w[0], w[1]))
        .fold(f64::INFINITY, f64::min)
}

/// ν: mean distance of the normalized recurrence points to the normalized
/// simulation polyline. Not symmetric in its arguments.
pub fn curve_error(sim: &Curve, grr: &Curve) -> Result<f64, MetricError> {
    let (s, g) = normalize_pair(sim, grr)?;
    let total: f64 = g.points.iter().map(|&p| point_to_polyline(p, &s)).sum();
    Ok(total / g.len() as f64)
}

/// ν over t = 1..=M for two value series indexed from t = 0 (the t = 0
/// entry is dropped).
pub fn series_error(sim: &[f64], grr: &[f64]) -> Result<f64, MetricError> {
    if sim.len() < 3 || grr.len() < 3 {
        return Err(MetricError::TooShort(sim.len().min(grr.len()).saturating_sub(1)));
    }
    curve_error(
        &Curve::from_values(1, &sim[1..])?,
        &Curve::from_values(1, &grr[1..])?,
    )
}
