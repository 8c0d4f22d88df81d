//! Sentiment-variance signal over externally scored posts.

use std::io::BufRead;

use serde::Serialize;

use crate::error::{Error, Result};

/// Lowest and highest admissible sentiment scores.
pub const SCORE_RANGE: (f64, f64) = (-4.0, 4.0);
/// Variance at or above which a topic reads as controversial.
pub const CONTROVERSIAL_MIN: f64 = 2.0;
/// Variance at or below which a topic reads as non-controversial.
pub const CALM_MAX: f64 = 1.5;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SentimentRecord {
    pub post_id: String,
    pub score: f64,
}

impl SentimentRecord {
    pub fn new(post_id: &str, score: f64) -> Result<Self> {
        if !(SCORE_RANGE.0..=SCORE_RANGE.1).contains(&score) {
            return Err(Error::Domain(format!("sentiment {score} of '{post_id}' outside [-4, 4]")));
        }
        Ok(SentimentRecord {
            post_id: post_id.to_string(),
            score,
        })
    }
}

/// Population variance of the scores.
pub fn sentiment_variance(records: &[SentimentRecord]) -> Result<f64> {
    variance(&records.iter().map(|r| r.score).collect::<Vec<_>>())
}

pub fn variance(scores: &[f64]) -> Result<f64> {
    if scores.len() < 2 {
        return Err(Error::Input("sentiment variance needs at least 2 records".into()));
    }
    let n = scores.len() as f64;
    let mean = scores.iter().sum::<f64>() / n;
    Ok(scores.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VarianceClass {
    Controversial,
    NonControversial,
    Indeterminate,
}

impl std::fmt::Display for VarianceClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            VarianceClass::Controversial => "controversial",
            VarianceClass::NonControversial => "non-controversial",
            VarianceClass::Indeterminate => "indeterminate",
        })
    }
}

pub fn classify_by_variance(v: f64) -> Result<VarianceClass> {
    if v.is_nan() || v < 0.0 {
        return Err(Error::Domain(format!("variance must be >= 0, got {v}")));
    }
    Ok(if v >= CONTROVERSIAL_MIN {
        VarianceClass::Controversial
    } else if v <= CALM_MAX {
        VarianceClass::NonControversial
    } else {
        VarianceClass::Indeterminate
    })
}

/// Reads CSV `post_id,score`. A first line that does not parse as a score is treated as
/// the header.
pub fn read_sentiment_csv<R: BufRead>(reader: R, source: &str) -> Result<Vec<SentimentRecord>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| Error::Parse {
            path: source.to_string(),
            line: i + 1,
            msg,
        };
        let (id, score) = line
            .rsplit_once(',')
            .ok_or_else(|| err("expected 'post_id,score'".into()))?;
        match score.trim().parse::<f64>() {
            Ok(s) => out.push(SentimentRecord::new(id.trim(), s).map_err(|e| err(e.to_string()))?),
            Err(_) if i == 0 => continue,
            Err(e) => return Err(err(e.to_string())),
        }
    }
    Ok(out)
}
