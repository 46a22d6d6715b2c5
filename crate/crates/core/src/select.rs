//! Choosing the number of communities with a BIC-style score.

use log::{debug, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::model::{Link, SignedNetwork};
use crate::optimizer::{fit, FitConfig, FitResult};
use crate::{Error, Result};

/// Outcome of [`select_m`]. `scores[k]` and `fits[k]` belong to `m_grid[k]`;
/// failed candidates have `None` in both.
#[derive(Debug, Clone)]
pub struct SelectionResult {
    pub m_grid: Vec<usize>,
    pub scores: Vec<Option<f64>>,
    pub chosen_m: usize,
    pub criterion: Criterion,
    pub fits: Vec<Option<FitResult>>,
}

impl SelectionResult {
    pub fn chosen_fit(&self) -> &FitResult {
        let k = self.m_grid.iter().position(|&m| m == self.chosen_m).expect("chosen m is in the grid");
        self.fits[k].as_ref().expect("chosen candidate did not fail")
    }
}

/// How model complexity is charged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    /// Every node's embedding is a free parameter:
    /// `2·negLL + (n(K1 + K2) + 2)·ln(#pairs)`.
    Embedding,
    /// Only the `m` community centers are free, plus the cost of coding the
    /// labels: `2·negLL + (m(K1 + K2) + 2)·ln(#pairs) + 2n·ln(m)`.
    #[default]
    Community,
}

impl std::str::FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "embedding" => Ok(Criterion::Embedding),
            "community" => Ok(Criterion::Community),
            other => Err(Error::InvalidConfig(format!("unknown criterion `{other}`"))),
        }
    }
}

impl std::fmt::Display for Criterion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Criterion::Embedding => "embedding",
            Criterion::Community => "community",
        })
    }
}

impl Criterion {
    /// Parameter count charged at `ln(#pairs)` each, with `K1 = K2 = m - 1`.
    pub fn degrees_of_freedom(self, n: usize, m: usize) -> f64 {
        let k = 2 * (m - 1);
        match self {
            Criterion::Embedding => (n * k + 2) as f64,
            Criterion::Community => (m * k + 2) as f64,
        }
    }

    pub fn score(self, neg_log_likelihood: f64, n: usize, m: usize) -> f64 {
        let pairs = (n * (n - 1) / 2) as f64;
        let base = 2.0 * neg_log_likelihood + self.degrees_of_freedom(n, m) * pairs.ln();
        match self {
            Criterion::Embedding => base,
            Criterion::Community => base + 2.0 * n as f64 * (m as f64).ln(),
        }
    }
}

/// [`select_m_with`] using the default [`Criterion`].
pub fn select_m(y: &SignedNetwork, m_grid: &[usize], template: &FitConfig, link: Link) -> Result<SelectionResult> {
    select_m_with(y, m_grid, template, link, Criterion::default())
}

/// Fits every candidate with `K1 = K2 = m - 1` (other settings from
/// `template`) and returns the one with the smallest score. Ties go to the
/// smaller `m`. Candidates whose fit fails are logged and skipped.
pub fn select_m_with(
    y: &SignedNetwork,
    m_grid: &[usize],
    template: &FitConfig,
    link: Link,
    criterion: Criterion,
) -> Result<SelectionResult> {
    if m_grid.is_empty() {
        return Err(Error::InvalidConfig("empty grid of community counts".into()));
    }
    if let Some(&m) = m_grid.iter().find(|&&m| m < 2) {
        return Err(Error::InvalidConfig(format!("community count must be at least 2, got {m}")));
    }
    if y.n() < 2 {
        return Err(Error::InvalidNetwork(format!("need at least 2 nodes, got {}", y.n())));
    }
    let n = y.n();
    let outcomes: Vec<Result<FitResult>> = m_grid
        .par_iter()
        .map(|&m| fit(y, &template.with_communities(m), link))
        .collect();

    let mut scores = Vec::with_capacity(m_grid.len());
    let mut fits = Vec::with_capacity(m_grid.len());
    let mut best: Option<(f64, usize)> = None;
    for (&m, outcome) in m_grid.iter().zip(outcomes) {
        match outcome {
            Ok(result) => {
                let score = criterion.score(result.final_objective(), n, m);
                debug!("m = {m}: negLL {:.6}, score {score:.6}", result.final_objective());
                let better = match best {
                    None => true,
                    Some((s, bm)) => score < s || (score == s && m < bm),
                };
                if score.is_finite() && better {
                    best = Some((score, m));
                }
                scores.push(Some(score));
                fits.push(Some(result));
            }
            Err(e) => {
                warn!("candidate m = {m} failed: {e}");
                scores.push(None);
                fits.push(None);
            }
        }
    }
    let (_, chosen_m) = best.ok_or_else(|| Error::AllCandidatesFailed(format!("grid {m_grid:?}")))?;
    Ok(SelectionResult {
        m_grid: m_grid.to_vec(),
        scores,
        chosen_m,
        criterion,
        fits,
    })
}
