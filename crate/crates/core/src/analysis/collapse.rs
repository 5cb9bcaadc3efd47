use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Points on the common grid used to compare rescaled curves.
pub const COLLAPSE_GRID: usize = 201;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Scaling {
    /// `(Δ - Δc) ln L`
    LogL,
    /// `(Δ - Δc) L^{1/ν}`
    PowerL { nu: f64 },
}

impl Scaling {
    fn factor(&self, size: f64) -> f64 {
        match *self {
            Scaling::LogL => size.ln(),
            Scaling::PowerL { nu } => size.powf(1.0 / nu),
        }
    }
}

/// One system size's `(Δ, S)` samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollapseCurve {
    pub size: f64,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollapseResult {
    /// Mean over the grid of the across-curve variance.
    pub residual: f64,
    pub overlap: (f64, f64),
}

/// Rescale, interpolate onto a common grid over the shared range, and return
/// the mean squared deviation of the curves from their pointwise mean.
pub fn data_collapse(curves: &[CollapseCurve], delta_c: f64, scaling: Scaling) -> Result<CollapseResult> {
    if curves.len() < 3 {
        return Err(Error::InsufficientOverlap(format!("need at least 3 system sizes, got {}", curves.len())));
    }
    if let Scaling::PowerL { nu } = scaling {
        if !(nu > 0.0) || !nu.is_finite() {
            return Err(Error::Domain(format!("ν = {nu} must be > 0")));
        }
    }
    let mut scaled = Vec::with_capacity(curves.len());
    for c in curves {
        if !(c.size > 1.0) {
            return Err(Error::Domain(format!("system size {} must exceed 1", c.size)));
        }
        if c.points.len() < 2 {
            return Err(Error::InsufficientOverlap(format!("size {} has fewer than 2 points", c.size)));
        }
        let f = scaling.factor(c.size);
        let mut pts: Vec<(f64, f64)> = c.points.iter().map(|&(d, s)| ((d - delta_c) * f, s)).collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        scaled.push(pts);
    }
    let lo = scaled.iter().map(|p| p[0].0).fold(f64::NEG_INFINITY, f64::max);
    let hi = scaled.iter().map(|p| p[p.len() - 1].0).fold(f64::INFINITY, f64::min);
    if !(hi > lo) {
        return Err(Error::InsufficientOverlap(format!("rescaled ranges do not overlap ({lo} >= {hi})")));
    }
    let mut total = 0.0;
    for k in 0..COLLAPSE_GRID {
        let x = lo + (hi - lo) * k as f64 / (COLLAPSE_GRID - 1) as f64;
        let ys: Vec<f64> = scaled.iter().map(|p| interpolate(p, x)).collect();
        let mean = ys.iter().sum::<f64>() / ys.len() as f64;
        total += ys.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / ys.len() as f64;
    }
    Ok(CollapseResult { residual: total / COLLAPSE_GRID as f64, overlap: (lo, hi) })
}

fn interpolate(pts: &[(f64, f64)], x: f64) -> f64 {
    let i = pts.partition_point(|p| p.0 < x).clamp(1, pts.len() - 1);
    let ((x0, y0), (x1, y1)) = (pts[i - 1], pts[i]);
    if x1 == x0 {
        return 0.5 * (y0 + y1);
    }
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}
