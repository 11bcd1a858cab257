use crate::episode::EpisodeRecord;
use crate::error::{BenchError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub episodes: usize,
    pub mean_return: f64,
    /// Sample standard deviation (n - 1) over `sqrt(n)`; zero for one episode.
    pub std_err: f64,
    pub completion_rate: f64,
    pub mean_steps: f64,
}

pub fn mean_and_std_err(values: &[f64]) -> Result<(f64, f64)> {
    if values.is_empty() {
        return Err(BenchError::Invalid("cannot summarize zero values".into()));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() == 1 {
        return Ok((mean, 0.0));
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok((mean, (var / n).sqrt()))
}

/// Failed and unfinished episodes count toward the mean like any other.
pub fn summarize(records: &[EpisodeRecord]) -> Result<Summary> {
    let returns: Vec<f64> = records.iter().map(|r| r.discounted_return).collect();
    let (mean_return, std_err) = mean_and_std_err(&returns)?;
    let n = records.len() as f64;
    Ok(Summary {
        episodes: records.len(),
        mean_return,
        std_err,
        completion_rate: records.iter().filter(|r| r.reached_terminal).count() as f64 / n,
        mean_steps: records.iter().map(|r| r.steps as f64).sum::<f64>() / n,
    })
}

/// Standard error of a difference of two independent means.
pub fn pooled_std_err(a: &Summary, b: &Summary) -> f64 {
    a.std_err.hypot(b.std_err)
}
