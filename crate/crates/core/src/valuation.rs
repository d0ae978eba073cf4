//! Valuation distributions, optimal myopic prices and review-data fitting.

use std::fmt;

use crate::error::{Error, Result};
use crate::optimizer::search::{golden_section_max, DEFAULT_TOLERANCE};

/// Distribution of a user's private valuation.
///
/// The normal family is used untruncated: `cdf` evaluates `Φ((x-μ)/σ)` on
/// `[0,1]`, so mass below 0 and above 1 shows up as `F(0) > 0` and `F(1) < 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ValuationModel {
    Uniform01,
    Normal { mu: f64, sigma: f64 },
}

impl ValuationModel {
    pub fn normal(mu: f64, sigma: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(Error::argument(format!(
                "normal mean must be finite, got {mu}"
            )));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::argument(format!(
                "normal standard deviation must be positive, got {sigma}"
            )));
        }
        Ok(ValuationModel::Normal { mu, sigma })
    }

    /// `Pr[v <= x]` for `x` in `[0,1]`.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain(x));
        }
        Ok(self.cdf_extended(x))
    }

    /// The same formula as [`cdf`](Self::cdf) evaluated on the whole real line.
    pub fn cdf_extended(&self, x: f64) -> f64 {
        match *self {
            ValuationModel::Uniform01 => x.clamp(0.0, 1.0),
            ValuationModel::Normal { mu, sigma } => standard_normal_cdf((x - mu) / sigma),
        }
    }

    pub fn density(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain(x));
        }
        Ok(match *self {
            ValuationModel::Uniform01 => 1.0,
            ValuationModel::Normal { mu, sigma } => {
                let z = (x - mu) / sigma;
                (-0.5 * z * z).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt())
            }
        })
    }

    /// Probability that an influenced user quoted `price` adopts: `1 - F(price)`.
    pub fn adoption_probability(&self, price: f64) -> Result<f64> {
        Ok(1.0 - self.cdf(price)?)
    }

    /// Expected revenue `p (1 - F(p))` from one influenced user.
    pub fn myopic_revenue(&self, price: f64) -> Result<f64> {
        Ok(price * self.adoption_probability(price)?)
    }

    /// Optimal myopic price: the maximizer of `p (1 - F(p))` over `[0,1]`.
    pub fn omp(&self) -> f64 {
        match *self {
            ValuationModel::Uniform01 => 0.5,
            ValuationModel::Normal { .. } => {
                let revenue = |p: f64| p * (1.0 - self.cdf_extended(p));
                let (x, fx) = golden_section_max(revenue, 0.0, 1.0, DEFAULT_TOLERANCE)
                    .expect("unit interval is a valid bracket");
                // the objective is unimodal, but a maximum pinned at the right
                // end is only approached from the inside
                if revenue(1.0) > fx {
                    1.0
                } else {
                    x
                }
            }
        }
    }
}

impl fmt::Display for ValuationModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValuationModel::Uniform01 => write!(f, "uniform"),
            ValuationModel::Normal { mu, sigma } => write!(f, "normal({mu}, {sigma})"),
        }
    }
}

/// Standard normal CDF via the complementary error function.
pub fn standard_normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

/// Valuation models for every node: one shared model or a per-node table.
#[derive(Debug, Clone, PartialEq)]
pub enum Valuations {
    Shared(ValuationModel),
    PerNode(Vec<ValuationModel>),
}

impl Valuations {
    pub fn model(&self, node: usize) -> &ValuationModel {
        match self {
            Valuations::Shared(m) => m,
            Valuations::PerNode(table) => &table[node],
        }
    }

    /// Checks that a per-node table covers exactly `node_count` nodes.
    pub fn check_len(&self, node_count: usize) -> Result<()> {
        match self {
            Valuations::PerNode(table) if table.len() != node_count => Err(Error::argument(
                format!("{} valuation models for {node_count} nodes", table.len()),
            )),
            _ => Ok(()),
        }
    }

    /// OMP of every node.
    pub fn omp_vector(&self, node_count: usize) -> Vec<f64> {
        match self {
            Valuations::Shared(m) => vec![m.omp(); node_count],
            Valuations::PerNode(table) => table.iter().map(ValuationModel::omp).collect(),
        }
    }
}

impl From<ValuationModel> for Valuations {
    fn from(model: ValuationModel) -> Self {
        Valuations::Shared(model)
    }
}

/// One review carrying both the paid price and an integer rating.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReviewSample {
    pub price: f64,
    pub rating: u8,
}

impl ReviewSample {
    pub fn new(price: f64, rating: u8) -> Result<Self> {
        if !(price > 0.0 && price.is_finite()) {
            return Err(Error::data(format!(
                "review price must be positive, got {price}"
            )));
        }
        if !(1..=5).contains(&rating) {
            return Err(Error::data(format!(
                "review rating must be in 1..=5, got {rating}"
            )));
        }
        Ok(ReviewSample { price, rating })
    }

    /// `price * (1 + rating / 5)`, before normalization.
    pub fn raw_valuation(&self) -> f64 {
        self.price * (1.0 + f64::from(self.rating) / 5.0)
    }
}

/// Turns reviews into valuations min-max normalized onto `[0,1]`.
pub fn transform_reviews(samples: &[ReviewSample]) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(Error::argument("no review samples"));
    }
    let raw: Vec<f64> = samples.iter().map(ReviewSample::raw_valuation).collect();
    let min = raw.iter().copied().fold(f64::INFINITY, f64::min);
    let max = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let range = max - min;
    if range <= 0.0 {
        return Err(Error::data(format!(
            "all {} raw valuations equal {min}; cannot normalize",
            raw.len()
        )));
    }
    Ok(raw.iter().map(|v| (v - min) / range).collect())
}

/// Result of fitting a normal model to valuations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitReport {
    pub mu_hat: f64,
    pub sigma_hat: f64,
    pub ks_statistic: f64,
    pub sample_count: usize,
}

impl FitReport {
    pub fn model(&self) -> ValuationModel {
        ValuationModel::Normal {
            mu: self.mu_hat,
            sigma: self.sigma_hat,
        }
    }
}

impl fmt::Display for FitReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use crate::graph::format_significant as sig;
        writeln!(f, "mu_hat={}", sig(self.mu_hat, 12))?;
        writeln!(f, "sigma_hat={}", sig(self.sigma_hat, 12))?;
        writeln!(f, "ks_statistic={}", sig(self.ks_statistic, 12))?;
        writeln!(f, "sample_count={}", self.sample_count)
    }
}

/// Maximum-likelihood normal fit (variance divisor `n`) plus its K-S statistic.
pub fn fit_normal(values: &[f64]) -> Result<FitReport> {
    if values.len() < 2 {
        return Err(Error::Fit(format!(
            "need at least 2 values, got {}",
            values.len()
        )));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Fit("values must be finite".into()));
    }
    let n = values.len() as f64;
    let mu_hat = values.iter().sum::<f64>() / n;
    let variance = values.iter().map(|v| (v - mu_hat).powi(2)).sum::<f64>() / n;
    if variance <= 0.0 {
        return Err(Error::Fit("zero variance".into()));
    }
    let sigma_hat = variance.sqrt();
    let ks = ks_statistic(
        values,
        &ValuationModel::Normal {
            mu: mu_hat,
            sigma: sigma_hat,
        },
    )?;
    Ok(FitReport {
        mu_hat,
        sigma_hat,
        ks_statistic: ks,
        sample_count: values.len(),
    })
}

/// Two-sided Kolmogorov-Smirnov distance between the empirical CDF of
/// `values` and the model CDF.
pub fn ks_statistic(values: &[f64], model: &ValuationModel) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::argument("K-S statistic of an empty sample"));
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::argument("K-S statistic of a sample containing NaN"));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let d = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = model.cdf_extended(x);
            let above = (i + 1) as f64 / n - f;
            let below = f - i as f64 / n;
            above.max(below)
        })
        .fold(0.0f64, f64::max);
    Ok(d.clamp(0.0, 1.0))
}
