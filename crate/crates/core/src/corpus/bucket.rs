//! Equal-width binning of numeric values.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum WidthRule {
    /// Bin width `2 * IQR * n^(-1/3)`.
    FreedmanDiaconis,
    /// This many bins spanning `[min, max]`.
    FixedCount(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BucketingConfig {
    pub enabled: bool,
    pub width_rule: WidthRule,
}

impl Default for BucketingConfig {
    fn default() -> Self {
        BucketingConfig {
            enabled: true,
            width_rule: WidthRule::FreedmanDiaconis,
        }
    }
}

impl BucketingConfig {
    pub fn disabled() -> Self {
        BucketingConfig {
            enabled: false,
            ..Default::default()
        }
    }
}

/// Quantile of sorted data by linear interpolation between closest ranks.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Fitted bins: `count` bins of `width`, starting at `min`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bins {
    pub min: f64,
    pub width: f64,
    pub count: usize,
}

impl Bins {
    pub fn fit(values: &[f64], rule: WidthRule) -> Result<Bins> {
        if let Some(&bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite(bad));
        }
        if values.is_empty() {
            return Err(Error::Config("cannot bucketize an empty value list".into()));
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let min = sorted[0];
        let max = sorted[sorted.len() - 1];
        let span = max - min;
        let single = Bins {
            min,
            width: 0.0,
            count: 1,
        };
        let width = match rule {
            WidthRule::FreedmanDiaconis => {
                let iqr = quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25);
                2.0 * iqr * (sorted.len() as f64).powf(-1.0 / 3.0)
            }
            WidthRule::FixedCount(0) => return Err(Error::Config("fixed bucket count must be at least 1".into())),
            WidthRule::FixedCount(n) => span / n as f64,
        };
        if width <= 0.0 || span <= 0.0 {
            return Ok(single);
        }
        let count = ((span / width).ceil() as usize).max(1);
        Ok(Bins { min, width, count })
    }

    pub fn index(&self, value: f64) -> usize {
        if self.count <= 1 || self.width <= 0.0 {
            return 0;
        }
        let i = ((value - self.min) / self.width).floor();
        if i <= 0.0 {
            0
        } else {
            (i as usize).min(self.count - 1)
        }
    }
}

pub fn bucket_label(index: usize) -> String {
    format!("bucket_{index}")
}

/// Maps each value to its bucket label, in input order.
pub fn bucketize(values: &[f64], cfg: &BucketingConfig) -> Result<Vec<String>> {
    let bins = Bins::fit(values, cfg.width_rule)?;
    Ok(values.iter().map(|&v| bucket_label(bins.index(v))).collect())
}
