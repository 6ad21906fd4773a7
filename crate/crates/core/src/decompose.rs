//! Additive decomposition of an index series.
//!
//! The model is a sum of a piecewise-linear trend (slope changes allowed
//! at a fixed set of changepoints), yearly Fourier seasonality with a
//! 365.25-day period, and sum-to-zero day-of-week effects:
//!
//! ```text
//! y(t) ~ trend(t) + yearly(t) + weekly(t)
//! ```
//!
//! Fitting is a single deterministic ridge least-squares solve of the
//! normal equations — changepoint slope deltas carry one penalty weight,
//! Fourier and weekly coefficients another, the base intercept and slope
//! none — optionally followed by one refit that drops points whose
//! first-pass residual exceeds a MAD-based outlier gate. There is no
//! sampling and no randomness anywhere: the same input yields
//! bit-identical coefficients.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::Range;

use thiserror::Error;

#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use num_traits::Float;

use crate::date::Day;
use crate::linalg::solve_spd;

const DAYS_PER_YEAR: f64 = 365.25;
/// Minimum number of data days for a fit.
pub const MIN_FIT_DAYS: usize = 14;

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum FitError {
    #[error("need at least {need} data days, got {got}")]
    TooFewDays { got: usize, need: usize },
    #[error("days must be strictly increasing")]
    NonIncreasingDays,
    #[error("normal equations are singular even after regularization")]
    SingularSystem,
    #[error("invalid model spec: {0}")]
    InvalidSpec(&'static str),
}

/// Structure and regularization of the additive model.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ModelSpec {
    /// Number of candidate trend changepoints.
    pub n_changepoints: usize,
    /// Fraction of the training span eligible for changepoints.
    pub changepoint_range: f64,
    /// Yearly Fourier order (0 disables the yearly component).
    pub yearly_order: usize,
    /// Fit day-of-week effects.
    pub weekly: bool,
    /// Ridge weight on changepoint slope deltas.
    pub ridge_trend: f64,
    /// Ridge weight on Fourier and weekly coefficients.
    pub ridge_seasonal: f64,
    /// Outlier gate: points with first-pass |residual| > k * MAD are
    /// dropped for one refit. 0 disables the refit.
    pub outlier_mad_k: f64,
}

impl Default for ModelSpec {
    fn default() -> Self {
        ModelSpec {
            n_changepoints: 25,
            changepoint_range: 0.8,
            yearly_order: 10,
            weekly: true,
            ridge_trend: 0.05,
            ridge_seasonal: 1e-4,
            outlier_mad_k: 5.0,
        }
    }
}

impl ModelSpec {
    pub fn validate(&self) -> Result<(), FitError> {
        if !(self.changepoint_range > 0.0 && self.changepoint_range <= 1.0) {
            return Err(FitError::InvalidSpec("changepoint_range must be in (0, 1]"));
        }
        if !(self.ridge_trend >= 0.0 && self.ridge_trend.is_finite()) {
            return Err(FitError::InvalidSpec("ridge_trend must be finite and >= 0"));
        }
        if !(self.ridge_seasonal >= 0.0 && self.ridge_seasonal.is_finite()) {
            return Err(FitError::InvalidSpec("ridge_seasonal must be finite and >= 0"));
        }
        if !(self.outlier_mad_k >= 0.0 && self.outlier_mad_k.is_finite()) {
            return Err(FitError::InvalidSpec("outlier_mad_k must be finite and >= 0"));
        }
        Ok(())
    }
}

/// Column layout of a [`DesignMatrix`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnBlocks {
    pub intercept: usize,
    pub slope: usize,
    pub changepoints: Range<usize>,
    pub yearly: Range<usize>,
    pub weekly: Range<usize>,
}

/// Dense design matrix over a set of training days.
///
/// Columns, in order: intercept, scaled time, one hinge per changepoint,
/// cos/sin pairs for Fourier orders `1..=yearly_order`, and six
/// sum-to-zero day-of-week dummies (Sunday is encoded as -1 in each).
#[derive(Debug, Clone)]
pub struct DesignMatrix {
    pub n_rows: usize,
    pub n_cols: usize,
    data: Vec<f64>,
    /// Changepoint locations in scaled time (fractions of the span).
    pub changepoints: Vec<f64>,
    pub train_start: Day,
    pub train_end: Day,
    yearly_order: usize,
    weekly: bool,
}

impl DesignMatrix {
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn blocks(&self) -> ColumnBlocks {
        let cp_start = 2;
        let cp_end = cp_start + self.changepoints.len();
        let yearly_end = cp_end + 2 * self.yearly_order;
        let weekly_end = yearly_end + if self.weekly { 6 } else { 0 };
        ColumnBlocks {
            intercept: 0,
            slope: 1,
            changepoints: cp_start..cp_end,
            yearly: cp_end..yearly_end,
            weekly: yearly_end..weekly_end,
        }
    }
}

fn scaled_time(day: Day, start: Day, end: Day) -> f64 {
    day.days_since(start) as f64 / end.days_since(start) as f64
}

fn fill_weekly_dummies(day: Day, out: &mut [f64]) {
    let w = day.weekday();
    if w == 6 {
        out.fill(-1.0);
    } else {
        out.fill(0.0);
        out[w] = 1.0;
    }
}

/// Changepoint locations at uniform quantiles of the first
/// `changepoint_range` fraction of the training days, in scaled time.
fn select_changepoints(days: &[Day], spec: &ModelSpec) -> Vec<f64> {
    if spec.n_changepoints == 0 {
        return vec![];
    }
    let history = ((days.len() as f64) * spec.changepoint_range).floor() as usize;
    if history < 2 {
        return vec![];
    }
    let n = spec.n_changepoints.min(history - 1);
    let start = days[0];
    let end = days[days.len() - 1];
    let mut points = Vec::with_capacity(n);
    for j in 1..=n {
        let idx = ((j as f64) * ((history - 1) as f64) / (n as f64)).round() as usize;
        let t = scaled_time(days[idx], start, end);
        if t > 0.0 && points.last() != Some(&t) {
            points.push(t);
        }
    }
    points
}

/// Builds the design matrix for a strictly increasing day list.
pub fn build_design(days: &[Day], spec: &ModelSpec) -> Result<DesignMatrix, FitError> {
    spec.validate()?;
    if days.len() < MIN_FIT_DAYS {
        return Err(FitError::TooFewDays {
            got: days.len(),
            need: MIN_FIT_DAYS,
        });
    }
    if days.windows(2).any(|w| w[0] >= w[1]) {
        return Err(FitError::NonIncreasingDays);
    }
    let start = days[0];
    let end = days[days.len() - 1];
    let changepoints = select_changepoints(days, spec);
    let n_cols = 2 + changepoints.len() + 2 * spec.yearly_order + if spec.weekly { 6 } else { 0 };
    let mut data = Vec::with_capacity(days.len() * n_cols);
    for &day in days {
        let t = scaled_time(day, start, end);
        data.push(1.0);
        data.push(t);
        for &cp in &changepoints {
            data.push(if t > cp { t - cp } else { 0.0 });
        }
        let tau = day.days_since(start) as f64;
        for m in 1..=spec.yearly_order {
            let angle = 2.0 * PI * (m as f64) * tau / DAYS_PER_YEAR;
            data.push(angle.cos());
            data.push(angle.sin());
        }
        if spec.weekly {
            let base = data.len();
            data.resize(base + 6, 0.0);
            fill_weekly_dummies(day, &mut data[base..base + 6]);
        }
    }
    Ok(DesignMatrix {
        n_rows: days.len(),
        n_cols,
        data,
        changepoints,
        train_start: start,
        train_end: end,
        yearly_order: spec.yearly_order,
        weekly: spec.weekly,
    })
}

/// Fitted coefficients of the additive model.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ModelFit {
    pub spec: ModelSpec,
    pub train_start: Day,
    pub train_end: Day,
    /// Changepoint locations in scaled time.
    pub changepoints: Vec<f64>,
    pub intercept: f64,
    pub slope: f64,
    pub changepoint_deltas: Vec<f64>,
    /// Interleaved `[cos_1, sin_1, cos_2, sin_2, ...]`.
    pub yearly_coeffs: Vec<f64>,
    /// Six free day-of-week coefficients (Monday..Saturday).
    pub weekly_free: [f64; 6],
}

impl ModelFit {
    /// Day-of-week effects for all seven weekdays, Monday first. The
    /// seventh is the negated sum of the six free coefficients, so the
    /// seven values sum to zero exactly.
    pub fn weekly_effects(&self) -> [f64; 7] {
        let w = &self.weekly_free;
        let sum = ((((w[0] + w[1]) + w[2]) + w[3]) + w[4]) + w[5];
        [w[0], w[1], w[2], w[3], w[4], w[5], -sum]
    }

    /// Piecewise-linear trend. Beyond the training span the final
    /// segment's slope continues; no new changepoints appear.
    pub fn trend_at(&self, day: Day) -> f64 {
        let t = scaled_time(day, self.train_start, self.train_end);
        let mut value = self.intercept + self.slope * t;
        for (&cp, &delta) in self.changepoints.iter().zip(&self.changepoint_deltas) {
            if t > cp {
                value += delta * (t - cp);
            }
        }
        value
    }

    pub fn yearly_at(&self, day: Day) -> f64 {
        let tau = day.days_since(self.train_start) as f64;
        let mut value = 0.0;
        for (m, pair) in self.yearly_coeffs.chunks_exact(2).enumerate() {
            let angle = 2.0 * PI * ((m + 1) as f64) * tau / DAYS_PER_YEAR;
            value += pair[0] * angle.cos() + pair[1] * angle.sin();
        }
        value
    }

    pub fn weekly_at(&self, day: Day) -> f64 {
        if !self.spec.weekly {
            return 0.0;
        }
        self.weekly_effects()[day.weekday()]
    }

    /// Model value `trend + yearly + weekly` for each requested day.
    pub fn predict(&self, days: &[Day]) -> BTreeMap<Day, f64> {
        days.iter()
            .map(|&d| (d, (self.trend_at(d) + self.yearly_at(d)) + self.weekly_at(d)))
            .collect()
    }
}

/// Ridge penalty for each column of the design.
fn penalty_diagonal(design: &DesignMatrix, spec: &ModelSpec) -> Vec<f64> {
    let blocks = design.blocks();
    let mut diag = vec![0.0; design.n_cols];
    for j in blocks.changepoints {
        diag[j] = spec.ridge_trend;
    }
    for j in blocks.yearly.start..blocks.weekly.end {
        diag[j] = spec.ridge_seasonal;
    }
    diag
}

/// Solves the penalized normal equations over a row subset.
fn ridge_solve(
    design: &DesignMatrix,
    y: &[f64],
    spec: &ModelSpec,
    rows: &[usize],
) -> Result<Vec<f64>, FitError> {
    let p = design.n_cols;
    let mut a = vec![0.0; p * p];
    let mut b = vec![0.0; p];
    for &i in rows {
        let row = design.row(i);
        for j in 0..p {
            let xj = row[j];
            if xj == 0.0 {
                continue;
            }
            for k in j..p {
                a[j * p + k] += xj * row[k];
            }
            b[j] += xj * y[i];
        }
    }
    for j in 0..p {
        for k in 0..j {
            a[j * p + k] = a[k * p + j];
        }
    }
    let penalties = penalty_diagonal(design, spec);
    for j in 0..p {
        a[j * p + j] += penalties[j];
    }
    solve_spd(a, &b, p).ok_or(FitError::SingularSystem)
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_unstable_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

/// Fits the additive model to a gap-free map of observed days.
pub fn fit(series: &BTreeMap<Day, f64>, spec: &ModelSpec) -> Result<ModelFit, FitError> {
    let days: Vec<Day> = series.keys().copied().collect();
    let y: Vec<f64> = series.values().copied().collect();
    let design = build_design(&days, spec)?;

    let all_rows: Vec<usize> = (0..design.n_rows).collect();
    let mut coef = ridge_solve(&design, &y, spec, &all_rows)?;

    if spec.outlier_mad_k > 0.0 {
        let residuals: Vec<f64> = all_rows
            .iter()
            .map(|&i| {
                let row = design.row(i);
                y[i] - row.iter().zip(&coef).map(|(x, c)| x * c).sum::<f64>()
            })
            .collect();
        let center = median(&mut residuals.clone());
        let mut deviations: Vec<f64> = residuals.iter().map(|r| (r - center).abs()).collect();
        let mad = median(&mut deviations);
        let gate = spec.outlier_mad_k * mad;
        let kept: Vec<usize> = all_rows
            .iter()
            .copied()
            .filter(|&i| residuals[i].abs() <= gate)
            .collect();
        // refit only when something was dropped and enough rows remain
        // to keep the system well-posed
        if kept.len() < design.n_rows && kept.len() >= design.n_cols.max(MIN_FIT_DAYS) {
            coef = ridge_solve(&design, &y, spec, &kept)?;
        }
    }

    let blocks = design.blocks();
    let weekly_free = if spec.weekly {
        let w = &coef[blocks.weekly.clone()];
        [w[0], w[1], w[2], w[3], w[4], w[5]]
    } else {
        [0.0; 6]
    };
    Ok(ModelFit {
        spec: *spec,
        train_start: design.train_start,
        train_end: design.train_end,
        changepoints: design.changepoints.clone(),
        intercept: coef[blocks.intercept],
        slope: coef[blocks.slope],
        changepoint_deltas: coef[blocks.changepoints].to_vec(),
        yearly_coeffs: coef[blocks.yearly].to_vec(),
        weekly_free,
    })
}

/// Trend / yearly / weekly / residual maps over the fitted days.
///
/// The residual is defined as the observed value minus the other three
/// components, so `trend + yearly + weekly + residual` reconstructs the
/// observation exactly; [`Decomposition::reconstructed`] evaluates that
/// sum with the same association order used here.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub trend: BTreeMap<Day, f64>,
    pub yearly: BTreeMap<Day, f64>,
    pub weekly: BTreeMap<Day, f64>,
    pub residual: BTreeMap<Day, f64>,
}

impl Decomposition {
    pub fn days(&self) -> impl Iterator<Item = Day> + '_ {
        self.trend.keys().copied()
    }

    /// `((trend + yearly) + weekly) + residual` for one day.
    pub fn reconstructed(&self, day: Day) -> Option<f64> {
        let t = *self.trend.get(&day)?;
        let y = *self.yearly.get(&day)?;
        let w = *self.weekly.get(&day)?;
        let r = *self.residual.get(&day)?;
        Some(((t + y) + w) + r)
    }
}

/// Evaluates a fit's components over the observed days of `series`.
pub fn decompose_with(fit: &ModelFit, series: &BTreeMap<Day, f64>) -> Decomposition {
    let mut trend = BTreeMap::new();
    let mut yearly = BTreeMap::new();
    let mut weekly = BTreeMap::new();
    let mut residual = BTreeMap::new();
    for (&day, &observed) in series {
        let t = fit.trend_at(day);
        let y = fit.yearly_at(day);
        let w = fit.weekly_at(day);
        trend.insert(day, t);
        yearly.insert(day, y);
        weekly.insert(day, w);
        residual.insert(day, observed - ((t + y) + w));
    }
    Decomposition {
        trend,
        yearly,
        weekly,
        residual,
    }
}

/// Fit + in-sample component evaluation.
pub fn decompose(series: &BTreeMap<Day, f64>, spec: &ModelSpec) -> Result<Decomposition, FitError> {
    let fitted = fit(series, spec)?;
    Ok(decompose_with(&fitted, series))
}
