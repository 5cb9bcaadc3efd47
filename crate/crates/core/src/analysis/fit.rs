use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest abscissa accepted by [`fit_mutual_information`].
pub const MI_MAX_RATIO: f64 = 0.2;
const MAX_ITERATIONS: usize = 200;
const STEP_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub x: f64,
    pub y: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tag: Option<String>,
}

impl SeriesPoint {
    pub fn new(x: f64, y: f64) -> Self {
        SeriesPoint { x, y, tag: None }
    }

    pub fn tagged(x: f64, y: f64, tag: impl Into<String>) -> Self {
        SeriesPoint { x, y, tag: Some(tag.into()) }
    }
}

/// Build points from parallel `(x, y)` pairs.
pub fn series(pairs: impl IntoIterator<Item = (f64, f64)>) -> Vec<SeriesPoint> {
    pairs.into_iter().map(|(x, y)| SeriesPoint::new(x, y)).collect()
}

/// Points with `x >= min_x`.
pub fn window(data: &[SeriesPoint], min_x: f64) -> Vec<SeriesPoint> {
    data.iter().filter(|p| p.x >= min_x).cloned().collect()
}

/// Points whose abscissa is an odd integer.
pub fn odd_sizes_only(data: &[SeriesPoint]) -> Vec<SeriesPoint> {
    data.iter().filter(|p| p.x.fract() == 0.0 && (p.x as i64) % 2 == 1).cloned().collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitModel {
    /// `a + b ln x`
    LogLaw,
    /// `a + b x^{-c}`
    PowerLaw,
    /// `a + b ln[(2N/π) sin(πx/N)]`
    ChordLog,
    /// `A x^η`
    MiPower,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model: FitModel,
    pub params: BTreeMap<String, f64>,
    pub r_squared: f64,
    /// `y - model(x)`, in input order.
    pub residuals: Vec<f64>,
}

impl FitResult {
    pub fn param(&self, name: &str) -> f64 {
        self.params.get(name).copied().unwrap_or(f64::NAN)
    }

    fn build(model: FitModel, params: &[(&str, f64)], ys: &[f64], residuals: Vec<f64>) -> Self {
        FitResult {
            model,
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            r_squared: r_squared(ys, &residuals),
            residuals,
        }
    }
}

fn r_squared(ys: &[f64], residuals: &[f64]) -> f64 {
    let mean = ys.iter().sum::<f64>() / ys.len() as f64;
    let ss_tot: f64 = ys.iter().map(|y| (y - mean).powi(2)).sum();
    let ss_res: f64 = residuals.iter().map(|r| r * r).sum();
    // spread at rounding level counts as constant data
    let floor = 1e-24 * ys.iter().map(|y| y * y).sum::<f64>();
    if ss_tot <= floor {
        if ss_res <= floor {
            1.0
        } else {
            f64::NEG_INFINITY
        }
    } else {
        1.0 - ss_res / ss_tot
    }
}

fn check_points(data: &[SeriesPoint], min: usize) -> Result<()> {
    if data.len() < min {
        return Err(Error::RankDeficient(format!("need at least {min} points, got {}", data.len())));
    }
    if let Some(p) = data.iter().find(|p| !(p.x > 0.0) || !p.x.is_finite() || !p.y.is_finite()) {
        return Err(Error::Domain(format!("invalid data point ({}, {})", p.x, p.y)));
    }
    let mut xs: Vec<f64> = data.iter().map(|p| p.x).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    if xs.len() < min {
        return Err(Error::RankDeficient(format!("need at least {min} distinct x values, got {}", xs.len())));
    }
    Ok(())
}

/// Indices of `data` sorted by `(x, y)`, so results do not depend on input order.
fn sorted_order(data: &[SeriesPoint]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..data.len()).collect();
    idx.sort_by(|&i, &j| data[i].x.total_cmp(&data[j].x).then(data[i].y.total_cmp(&data[j].y)));
    idx
}

/// Ordinary least squares of `y` on `[1, f(x)]`; returns `(intercept, slope)`.
fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if !(sxx > 1e-300) {
        return Err(Error::RankDeficient("regressor has no spread".into()));
    }
    let slope = sxy / sxx;
    Ok((my - slope * mx, slope))
}

/// `y = a + b ln x`; also reports `c_eff = 3b`.
pub fn fit_log_law(data: &[SeriesPoint]) -> Result<FitResult> {
    check_points(data, 3)?;
    let order = sorted_order(data);
    let xs: Vec<f64> = order.iter().map(|&i| data[i].x.ln()).collect();
    let ys: Vec<f64> = order.iter().map(|&i| data[i].y).collect();
    let (a, b) = linear_fit(&xs, &ys)?;
    let residuals: Vec<f64> = data.iter().map(|p| p.y - (a + b * p.x.ln())).collect();
    let ys_in: Vec<f64> = data.iter().map(|p| p.y).collect();
    Ok(FitResult::build(FitModel::LogLaw, &[("a", a), ("b", b), ("c_eff", 3.0 * b)], &ys_in, residuals))
}

/// `y = a + b ln[(2N/π) sin(πx/N)]` for an open chain of `n_total` sites; also
/// reports `c_eff = 6b`.
pub fn fit_chord_log(data: &[SeriesPoint], n_total: f64) -> Result<FitResult> {
    check_points(data, 3)?;
    if let Some(p) = data.iter().find(|p| p.x >= n_total) {
        return Err(Error::Domain(format!("subsystem size {} not below chain length {n_total}", p.x)));
    }
    let chord = |x: f64| (2.0 * n_total / std::f64::consts::PI * (std::f64::consts::PI * x / n_total).sin()).ln();
    let order = sorted_order(data);
    let xs: Vec<f64> = order.iter().map(|&i| chord(data[i].x)).collect();
    let ys: Vec<f64> = order.iter().map(|&i| data[i].y).collect();
    let (a, b) = linear_fit(&xs, &ys)?;
    let residuals: Vec<f64> = data.iter().map(|p| p.y - (a + b * chord(p.x))).collect();
    let ys_in: Vec<f64> = data.iter().map(|p| p.y).collect();
    Ok(FitResult::build(FitModel::ChordLog, &[("a", a), ("b", b), ("c_eff", 6.0 * b)], &ys_in, residuals))
}

/// `y = a + b x^{-c}` by Levenberg-Marquardt-damped Gauss-Newton.
///
/// Starts from `c₀ = -1 - slope` of `ln|Δy/Δx|` against the log of the midpoints,
/// with `(a, b)` from the linear fit at fixed `c₀`.
pub fn fit_power_law(data: &[SeriesPoint]) -> Result<FitResult> {
    check_points(data, 4)?;
    let order = sorted_order(data);
    let xs: Vec<f64> = order.iter().map(|&i| data[i].x).collect();
    let ys: Vec<f64> = order.iter().map(|&i| data[i].y).collect();
    let n = xs.len();
    let tail: Vec<f64> = (n - 3..n).map(|i| ys[i] - ys[i - 1]).collect();
    if !(tail.iter().all(|d| *d > 0.0) || tail.iter().all(|d| *d < 0.0)) {
        return Err(Error::Domain("power-law fit needs data monotone in the tail".into()));
    }

    let (mut lx, mut ld) = (Vec::new(), Vec::new());
    for i in 1..n {
        let d = (ys[i] - ys[i - 1]) / (xs[i] - xs[i - 1]);
        if d != 0.0 && xs[i] > xs[i - 1] {
            lx.push((0.5 * (xs[i] + xs[i - 1])).ln());
            ld.push(d.abs().ln());
        }
    }
    let c0 = if lx.len() >= 2 { (-1.0 - linear_fit(&lx, &ld)?.1).max(1e-3) } else { 1.0 };
    let basis: Vec<f64> = xs.iter().map(|x| x.powf(-c0)).collect();
    let (a0, b0) = linear_fit(&basis, &ys)?;

    let model = |p: &[f64; 3], x: f64| p[0] + p[1] * x.powf(-p[2]);
    let sse = |p: &[f64; 3]| xs.iter().zip(&ys).map(|(x, y)| (y - model(p, *x)).powi(2)).sum::<f64>();
    let mut p = [a0, b0, c0];
    let mut cost = sse(&p);
    let mut lambda = 1e-3;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let j = DMatrix::from_fn(n, 3, |i, k| {
            let xc = xs[i].powf(-p[2]);
            match k {
                0 => 1.0,
                1 => xc,
                _ => -p[1] * xs[i].ln() * xc,
            }
        });
        let r = DVector::from_iterator(n, xs.iter().zip(&ys).map(|(x, y)| y - model(&p, *x)));
        let jtj = j.transpose() * &j;
        let g = j.transpose() * r;
        loop {
            let mut m = jtj.clone();
            for k in 0..3 {
                m[(k, k)] += lambda * jtj[(k, k)].max(1e-300);
            }
            let step = m.lu().solve(&g).unwrap_or_else(|| DVector::zeros(3));
            let trial = [p[0] + step[0], p[1] + step[1], p[2] + step[2]];
            let trial_cost = sse(&trial);
            let small = step.amax() < STEP_TOL * (1.0 + p.iter().fold(0.0f64, |m, v| m.max(v.abs())));
            if trial_cost.is_finite() && trial_cost <= cost {
                p = trial;
                cost = trial_cost;
                lambda = (lambda / 10.0).max(1e-12);
                converged = small;
                break;
            }
            lambda *= 10.0;
            if lambda > 1e16 || small {
                converged = true;
                break;
            }
        }
        if converged {
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence { iterations, last: p.to_vec() });
    }
    let residuals: Vec<f64> = data.iter().map(|q| q.y - model(&p, q.x)).collect();
    let ys_in: Vec<f64> = data.iter().map(|q| q.y).collect();
    Ok(FitResult::build(FitModel::PowerLaw, &[("a", p[0]), ("b", p[1]), ("c", p[2])], &ys_in, residuals))
}

/// `I = A x^η` by log-log regression over ratios `x ∈ (0, 0.2]`. Also reports
/// `c_eff = 3A/π²`, the central charge implied by the small-ratio expansion of
/// the chord-distance mutual information.
pub fn fit_mutual_information(data: &[SeriesPoint]) -> Result<FitResult> {
    check_points(data, 2)?;
    if let Some(p) = data.iter().find(|p| p.x > MI_MAX_RATIO) {
        return Err(Error::Regime(format!("ratio {} exceeds the small-argument bound {MI_MAX_RATIO}", p.x)));
    }
    if let Some(p) = data.iter().find(|p| !(p.y > 0.0)) {
        return Err(Error::Domain(format!("mutual information {} must be > 0 for a log-log fit", p.y)));
    }
    let order = sorted_order(data);
    let xs: Vec<f64> = order.iter().map(|&i| data[i].x.ln()).collect();
    let ys: Vec<f64> = order.iter().map(|&i| data[i].y.ln()).collect();
    let (ln_a, eta) = linear_fit(&xs, &ys)?;
    let a = ln_a.exp();
    let residuals: Vec<f64> = data.iter().map(|p| p.y - a * p.x.powf(eta)).collect();
    let ys_in: Vec<f64> = data.iter().map(|p| p.y).collect();
    let pi2 = std::f64::consts::PI.powi(2);
    Ok(FitResult::build(
        FitModel::MiPower,
        &[("eta", eta), ("prefactor", a), ("c_eff", 3.0 * a / pi2)],
        &ys_in,
        residuals,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_law_exact() {
        let d = series((4..12).map(|l| (l as f64, 0.04 * (l as f64).ln() + 0.0435)));
        let f = fit_log_law(&d).unwrap();
        assert!((f.param("b") - 0.04).abs() < 1e-12);
        assert!((f.param("a") - 0.0435).abs() < 1e-12);
        assert!((f.param("c_eff") - 0.12).abs() < 1e-12);
        assert!(f.r_squared > 1.0 - 1e-12 && f.r_squared <= 1.0);
        assert_eq!(f.residuals.len(), d.len());
    }

    #[test]
    fn constant_data() {
        let f = fit_log_law(&series([(2.0, 0.7), (3.0, 0.7), (5.0, 0.7)])).unwrap();
        assert!(f.param("b").abs() < 1e-15);
        assert_eq!(f.r_squared, 1.0);
    }

    #[test]
    fn rank_deficient() {
        assert!(matches!(fit_log_law(&series([(2.0, 1.0), (2.0, 1.1), (3.0, 1.0)])), Err(Error::RankDeficient(_))));
        assert!(matches!(fit_log_law(&series([(2.0, 1.0), (3.0, 1.1)])), Err(Error::RankDeficient(_))));
        assert!(fit_log_law(&series([(0.0, 1.0), (2.0, 1.0), (3.0, 1.0)])).is_err());
    }

    #[test]
    fn power_law_exact() {
        let d = series((4..30).map(|l| (l as f64, 0.1 + 0.5 * (l as f64).powf(-0.8))));
        let f = fit_power_law(&d).unwrap();
        assert!((f.param("a") - 0.1).abs() < 1e-6);
        assert!((f.param("b") - 0.5).abs() < 1e-6);
        assert!((f.param("c") - 0.8).abs() < 1e-6);
    }

    #[test]
    fn power_law_needs_monotone_tail() {
        let d = series([(4.0, 1.0), (5.0, 1.2), (6.0, 1.1), (7.0, 1.3)]);
        assert!(fit_power_law(&d).is_err());
    }

    #[test]
    fn mutual_information_regime() {
        let d = series([(0.1, 0.01), (0.3, 0.1)]);
        assert!(matches!(fit_mutual_information(&d), Err(Error::Regime(_))));
    }

    #[test]
    fn chord_log_exact() {
        let n = 14.0;
        let d = series((1..14).map(|l| {
            let x = l as f64;
            (x, 0.125 / 6.0 * (2.0 * n / std::f64::consts::PI * (std::f64::consts::PI * x / n).sin()).ln() + 0.3)
        }));
        let f = fit_chord_log(&d, n).unwrap();
        assert!((f.param("c_eff") - 0.125).abs() < 1e-12);
        assert!((f.param("a") - 0.3).abs() < 1e-12);
        assert!(odd_sizes_only(&d).iter().all(|p| p.x as i64 % 2 == 1));
        assert_eq!(odd_sizes_only(&d).len(), 7);
    }
}
