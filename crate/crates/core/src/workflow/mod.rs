//! Iterative annotation rounds: sampling, duplicate assignment, convergence
//! of the agreement history, disagreement reports and cross-validation folds.

mod diff;
pub mod shuffle;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

pub use diff::{diff_report, render_diff, DiffError, DiffKind, DiffLayer, Disagreement};
pub use shuffle::{shuffle, SplitMix64};

/// Group ids used by [`assign_duplicates`].
pub const GROUPS: [&str; 2] = ["g1", "g2"];
pub const DEFAULT_DUPLICATE_FRACTION: f64 = 1.0 / 3.0;
pub const DEFAULT_WINDOW: usize = 3;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum WorkflowError {
    #[error("cannot sample {requested} documents from a pool of {available}")]
    PoolTooSmall { requested: usize, available: usize },
    #[error("fraction {0} outside [0, 1]")]
    InvalidFraction(f64),
    #[error("k = {k} needs 2 <= k <= {n} documents")]
    InvalidK { k: usize, n: usize },
    #[error("duplicate document id {0}")]
    DuplicateId(String),
    #[error("window must be at least 1")]
    InvalidWindow,
    #[error("threshold {1} for {0} outside [0, 1]")]
    InvalidThreshold(String, f64),
    #[error("agreement value {0} outside [0, 1]")]
    InvalidValue(f64),
    #[error("state file: {0}")]
    State(String),
}

/// Persistent state of the annotation rounds. A fresh state has
/// `round_index` 0; each sampled round increments it.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RoundState {
    pub round_index: u32,
    pub pool: Vec<String>,
    pub assignments: BTreeMap<String, BTreeSet<String>>,
    pub iaa_history: BTreeMap<String, Vec<f64>>,
}

impl RoundState {
    /// A state over `pool`, sorted and deduplicated.
    pub fn new(pool: impl IntoIterator<Item = String>) -> Self {
        let pool: BTreeSet<String> = pool.into_iter().collect();
        RoundState { pool: pool.into_iter().collect(), ..Default::default() }
    }

    pub fn from_json(s: &str) -> Result<Self, WorkflowError> {
        let state: RoundState = serde_json::from_str(s).map_err(|e| WorkflowError::State(e.to_string()))?;
        if let Some(id) = state.pool.iter().find(|id| state.assignments.contains_key(*id)) {
            return Err(WorkflowError::State(format!("{} is both pooled and assigned", id)));
        }
        Ok(state)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).unwrap_or_default();
        s.push('\n');
        s
    }

    /// Append an agreement value to a task's history.
    pub fn record_iaa(&mut self, task: &str, f: f64) -> Result<(), WorkflowError> {
        if !(0.0..=1.0).contains(&f) {
            return Err(WorkflowError::InvalidValue(f));
        }
        self.iaa_history.entry(task.to_string()).or_default().push(f);
        Ok(())
    }
}

/// Draw `n` documents without replacement. The pool keeps its order minus the
/// sample; the sample is in draw order.
pub fn sample_round(state: &RoundState, n: usize, seed: u64) -> Result<(RoundState, Vec<String>), WorkflowError> {
    if n > state.pool.len() {
        return Err(WorkflowError::PoolTooSmall { requested: n, available: state.pool.len() });
    }
    let mut drawn = state.pool.clone();
    shuffle(&mut drawn, seed);
    drawn.truncate(n);
    let taken: BTreeSet<&String> = drawn.iter().collect();
    let mut next = state.clone();
    next.pool.retain(|id| !taken.contains(id));
    next.round_index += 1;
    Ok((next, drawn))
}

/// Give `ceil(fraction * n)` documents to both groups and alternate the rest
/// between them, after a seeded shuffle.
pub fn assign_duplicates(
    docs: &[String],
    fraction: f64,
    seed: u64,
) -> Result<BTreeMap<String, BTreeSet<String>>, WorkflowError> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(WorkflowError::InvalidFraction(fraction));
    }
    let mut order = docs.to_vec();
    shuffle(&mut order, seed);
    // the epsilon keeps 1/3 of 9 at 3 rather than 4
    let shared = ((fraction * order.len() as f64) - 1e-9).ceil().max(0.0) as usize;
    let mut out = BTreeMap::new();
    for (i, doc) in order.into_iter().enumerate() {
        let groups: BTreeSet<String> = if i < shared {
            GROUPS.iter().map(|g| g.to_string()).collect()
        } else {
            [GROUPS[(i - shared) % 2].to_string()].into()
        };
        out.insert(doc, groups);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergencePolicy {
    pub window: usize,
    pub tau: BTreeMap<String, f64>,
}

impl Default for ConvergencePolicy {
    fn default() -> Self {
        ConvergencePolicy { window: DEFAULT_WINDOW, tau: BTreeMap::new() }
    }
}

impl ConvergencePolicy {
    pub fn new(window: usize, tau: BTreeMap<String, f64>) -> Result<Self, WorkflowError> {
        let policy = ConvergencePolicy { window, tau };
        policy.check()?;
        Ok(policy)
    }

    pub fn check(&self) -> Result<(), WorkflowError> {
        if self.window == 0 {
            return Err(WorkflowError::InvalidWindow);
        }
        if let Some((task, t)) = self.tau.iter().find(|(_, t)| !(0.0..=1.0).contains(*t)) {
            return Err(WorkflowError::InvalidThreshold(task.clone(), *t));
        }
        Ok(())
    }

    pub fn with_tau(mut self, task: &str, tau: f64) -> Self {
        self.tau.insert(task.to_string(), tau);
        self
    }
}

/// True when the last `window` values all reach the task's threshold. A task
/// without a threshold never converges.
pub fn check_convergence(history: &[f64], policy: &ConvergencePolicy, task: &str) -> bool {
    let Some(&tau) = policy.tau.get(task) else { return false };
    policy.window > 0
        && history.len() >= policy.window
        && history[history.len() - policy.window..].iter().all(|&f| f >= tau)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldManifest {
    pub k: usize,
    pub seed: u64,
    pub folds: Vec<Vec<String>>,
}

impl FoldManifest {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).unwrap_or_default();
        s.push('\n');
        s
    }
}

/// Sort, shuffle with `seed`, then deal round-robin into `k` folds. Each fold
/// is listed in sorted order.
pub fn kfold(doc_ids: &[String], k: usize, seed: u64) -> Result<FoldManifest, WorkflowError> {
    if k < 2 || doc_ids.len() < k {
        return Err(WorkflowError::InvalidK { k, n: doc_ids.len() });
    }
    let mut ids = doc_ids.to_vec();
    ids.sort();
    if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
        return Err(WorkflowError::DuplicateId(w[0].clone()));
    }
    shuffle(&mut ids, seed);
    let mut folds = vec![Vec::new(); k];
    for (i, id) in ids.into_iter().enumerate() {
        folds[i % k].push(id);
    }
    folds.iter_mut().for_each(|f| f.sort());
    Ok(FoldManifest { k, seed, folds })
}
