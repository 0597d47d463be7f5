use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::logistic::{plcc_rmse, LogisticParams};
use super::rank::{krocc, srocc};
use super::EvalError;
use crate::par;
use crate::regression::{grid_search, predict, train_svr, Hyperparams};

/// One labelled feature vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub content_id: String,
    pub features: Vec<f64>,
    pub dmos: f64,
}

#[derive(Debug, Clone)]
pub struct ProtocolConfig {
    pub trials: usize,
    pub seed: u64,
    pub grid: Vec<Hyperparams>,
}

/// Content ids assigned to each fold of one trial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<String>,
    pub val: Vec<String>,
    pub test: Vec<String>,
}

/// Shuffles the distinct contents with the RNG stream of `trial` and cuts
/// them 70/15/15. Validation and test each get `max(1, round(0.15 n))`
/// contents and training keeps the remainder.
pub fn split_contents(contents: &[String], seed: u64, trial: usize) -> Result<Split, EvalError> {
    let unique: BTreeSet<&String> = contents.iter().collect();
    let mut ids: Vec<String> = unique.into_iter().cloned().collect();
    let n = ids.len();
    if n < 3 {
        return Err(EvalError::TooFewContents(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    ids.shuffle(&mut rng);
    let held = ((0.15 * n as f64).round() as usize).max(1);
    let test = ids.split_off(n - held);
    let val = ids.split_off(n - 2 * held);
    Ok(Split { train: ids, val, test })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialResult {
    pub trial: usize,
    pub hyperparams: Hyperparams,
    pub val_srocc: Option<f64>,
    pub srocc: Option<f64>,
    pub krocc: Option<f64>,
    /// PLCC and RMSE need five test samples; `None` below that.
    pub plcc: Option<f64>,
    pub rmse: Option<f64>,
    pub logistic: Option<LogisticParams>,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub n_trials: usize,
    pub srocc: Option<f64>,
    pub krocc: Option<f64>,
    pub plcc: Option<f64>,
    pub rmse: Option<f64>,
    /// Coordinate-wise median of the per-trial logistic parameters.
    pub logistic: Option<LogisticParams>,
    pub trials: Vec<TrialResult>,
}

fn median(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let mut v: Vec<f64> = values.flatten().filter(|x| x.is_finite()).collect();
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[m] } else { 0.5 * (v[m - 1] + v[m]) })
}

fn gather(samples: &[Sample], ids: &[String]) -> (Vec<Vec<f64>>, Vec<f64>) {
    let keep: BTreeSet<&str> = ids.iter().map(String::as_str).collect();
    samples.iter().filter(|s| keep.contains(s.content_id.as_str())).map(|s| (s.features.clone(), s.dmos)).unzip()
}

fn run_trial(samples: &[Sample], contents: &[String], config: &ProtocolConfig, trial: usize) -> Result<TrialResult, EvalError> {
    let split = split_contents(contents, config.seed, trial)?;
    let (tx, ty) = gather(samples, &split.train);
    let (vx, vy) = gather(samples, &split.val);
    let (sx, sy) = gather(samples, &split.test);
    let grid = grid_search(&tx, &ty, &vx, &vy, &config.grid)?;
    let model = train_svr(&tx, &ty, grid.best)?;
    let pred = sx.iter().map(|x| predict(&model, x)).collect::<Result<Vec<_>, _>>()?;
    let linear = if pred.len() >= 5 { Some(plcc_rmse(&pred, &sy)?) } else { None };
    Ok(TrialResult {
        trial,
        hyperparams: grid.best,
        val_srocc: grid.srocc,
        srocc: srocc(&pred, &sy),
        krocc: krocc(&pred, &sy),
        plcc: linear.and_then(|l| l.plcc),
        rmse: linear.map(|l| l.rmse),
        logistic: linear.map(|l| l.logistic),
        converged: linear.is_none_or(|l| l.converged),
    })
}

/// Repeats split / grid search / train / test for `config.trials` trials
/// and reports per-metric medians.
pub fn run_protocol(samples: &[Sample], config: &ProtocolConfig) -> Result<EvalReport, EvalError> {
    if config.trials == 0 {
        return Err(EvalError::NoTrials);
    }
    let contents: Vec<String> = samples.iter().map(|s| s.content_id.clone()).collect();
    let distinct = contents.iter().collect::<BTreeSet<_>>().len();
    if distinct < 3 {
        return Err(EvalError::TooFewContents(distinct));
    }
    let trials = par::map_range(config.trials, |t| run_trial(samples, &contents, config, t))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    let logistic = {
        let with: Vec<LogisticParams> = trials.iter().filter_map(|t| t.logistic).collect();
        let m = |f: fn(&LogisticParams) -> f64| median(with.iter().map(|p| Some(f(p))));
        match (m(|p| p.b1), m(|p| p.b2), m(|p| p.b3), m(|p| p.b4.abs())) {
            (Some(b1), Some(b2), Some(b3), Some(b4)) => Some(LogisticParams { b1, b2, b3, b4 }),
            _ => None,
        }
    };
    Ok(EvalReport {
        n_trials: trials.len(),
        srocc: median(trials.iter().map(|t| t.srocc)),
        krocc: median(trials.iter().map(|t| t.krocc)),
        plcc: median(trials.iter().map(|t| t.plcc)),
        rmse: median(trials.iter().map(|t| t.rmse)),
        logistic,
        trials,
    })
}

impl EvalReport {
    /// `metric median` lines followed by one line per trial.
    pub fn to_text(&self) -> String {
        let fmt = |v: Option<f64>| v.map_or_else(|| "n/a".to_string(), |x| format!("{x:.4}"));
        let mut out = format!(
            "trials {}\nsrocc {}\nkrocc {}\nplcc {}\nrmse {}\n",
            self.n_trials,
            fmt(self.srocc),
            fmt(self.krocc),
            fmt(self.plcc),
            fmt(self.rmse)
        );
        for t in &self.trials {
            out.push_str(&format!(
                "trial {} C={} epsilon={} gamma={} srocc={} krocc={} plcc={} rmse={}\n",
                t.trial,
                t.hyperparams.c,
                t.hyperparams.epsilon,
                t.hyperparams.gamma,
                fmt(t.srocc),
                fmt(t.krocc),
                fmt(t.plcc),
                fmt(t.rmse)
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
