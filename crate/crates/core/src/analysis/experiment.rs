//! Batch experiments over randomly generated systems.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{AnalysisError, AnalysisResult};
use crate::construct::{sample_random_permutations, sample_random_words};
use crate::sim::{run_adversary, AdversaryParams, RunOutcome, SchedulerKind, Strategy};
use crate::util::{self, Execution, RNG_NAME};
use crate::verify::{verify_mc, Verdict, VerifyOptions, DEFAULT_STATE_CAP};
use crate::word::WordSystem;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Generator {
    /// i.i.d. uniform letters
    Words,
    /// uniform permutations of all chairs
    Perms,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SubsetChoice {
    /// every `n`-subset of the sampled words
    #[default]
    All,
    /// one uniformly chosen `n`-subset per system
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Verify exactly; fall back to one adversary run above the state cap.
    #[default]
    Exhaustive,
    /// One random-adversary run from a random start.
    Adversary,
}

fn default_c() -> f64 {
    6.0
}
fn default_scheduler() -> SchedulerKind {
    SchedulerKind::Pairwise
}
fn default_step_cap() -> u64 {
    100_000
}
fn default_state_cap() -> u64 {
    DEFAULT_STATE_CAP
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub generator: Generator,
    /// Words per system.
    #[serde(rename = "N")]
    pub big_n: usize,
    /// Active players.
    pub n: usize,
    pub m: u32,
    /// Word length for the words generator; `ceil(c n ln N)` when absent.
    #[serde(default)]
    pub len: Option<usize>,
    #[serde(default = "default_c")]
    pub c: f64,
    /// Number of sampled systems.
    pub systems: usize,
    #[serde(default = "default_scheduler")]
    pub scheduler: SchedulerKind,
    #[serde(default = "default_step_cap")]
    pub step_cap: u64,
    pub seed: u64,
    #[serde(default)]
    pub subsets: SubsetChoice,
    #[serde(default)]
    pub method: Method,
    #[serde(default = "default_state_cap")]
    pub state_cap: u64,
}

impl ExperimentConfig {
    /// Word length actually used.
    pub fn word_len(&self) -> usize {
        match (self.generator, self.len) {
            (Generator::Perms, _) => self.m as usize,
            (Generator::Words, Some(l)) => l,
            (Generator::Words, None) => {
                ((self.c * self.n as f64 * (self.big_n as f64).ln()).ceil() as usize).max(1)
            }
        }
    }

    fn validate(&self) -> AnalysisResult<()> {
        if self.n == 0 || self.n > self.big_n || self.big_n > 64 || self.m == 0 {
            return Err(AnalysisError::BadParameter(format!(
                "need 1 <= n <= N <= 64 and m >= 1 (n={} N={} m={})",
                self.n, self.big_n, self.m
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub system_seed: u64,
    pub subset: Vec<usize>,
    pub all_full: bool,
    pub method: Method,
    pub verdict: Option<Verdict>,
    pub outcome: Option<RunOutcome>,
    /// Longest schedule when verified, steps taken when simulated.
    pub length: Option<u64>,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentStats {
    pub config: ExperimentConfig,
    pub word_len: usize,
    pub rng: String,
    pub trials: usize,
    pub runs: usize,
    pub successes: usize,
    pub failures: usize,
    /// Systems on which every examined subset succeeded.
    pub systems_all_ok: usize,
    pub fullness_rate: f64,
    pub max_length: Option<u64>,
    /// Successful runs by termination length; `failures` holds the rest.
    pub length_histogram: BTreeMap<u64, u64>,
    pub records: Vec<TrialRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CsvRow {
    pub trial: usize,
    pub system_seed: u64,
    pub subset: String,
    pub all_full: bool,
    pub method: String,
    pub verdict: String,
    pub outcome: String,
    pub length: String,
    pub ok: bool,
}

/// Serde name of a unit variant.
fn label<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v)
        .ok()
        .and_then(|j| j.as_str().map(str::to_string))
        .unwrap_or_default()
}

impl ExperimentStats {
    pub fn csv_rows(&self) -> Vec<CsvRow> {
        self.records
            .iter()
            .map(|r| CsvRow {
                trial: r.trial,
                system_seed: r.system_seed,
                subset: r
                    .subset
                    .iter()
                    .map(|i| i.to_string())
                    .collect::<Vec<_>>()
                    .join("-"),
                all_full: r.all_full,
                method: label(&r.method),
                verdict: r.verdict.as_ref().map(label).unwrap_or_default(),
                outcome: r.outcome.as_ref().map(label).unwrap_or_default(),
                length: r.length.map(|l| l.to_string()).unwrap_or_default(),
                ok: r.ok,
            })
            .collect()
    }
}

fn sample(cfg: &ExperimentConfig, seed: u64) -> AnalysisResult<(WordSystem, bool)> {
    let r = match cfg.generator {
        Generator::Words => sample_random_words(cfg.big_n, cfg.n, cfg.m, cfg.word_len(), seed),
        Generator::Perms => sample_random_permutations(cfg.big_n, cfg.m, seed),
    }
    .map_err(|e| AnalysisError::BadParameter(e.to_string()))?;
    let full = r.all_full();
    Ok((r.system, full))
}

fn simulate(
    cfg: &ExperimentConfig,
    system: &WordSystem,
    subset: &[usize],
    rng: &mut impl Rng,
) -> AnalysisResult<(RunOutcome, u64)> {
    let init: Vec<BigUint> = subset
        .iter()
        .map(|&w| BigUint::from(rng.gen_range(0..system.word(w).len().to_u64().unwrap())))
        .collect();
    let params = AdversaryParams {
        kind: cfg.scheduler,
        strategy: Strategy::Random,
        step_cap: cfg.step_cap,
        seed: rng.gen(),
    };
    let t = run_adversary(system, subset, &init, &params)
        .map_err(|e| AnalysisError::BadParameter(e.to_string()))?;
    Ok((t.outcome, t.steps() as u64))
}

fn run_trial(cfg: &ExperimentConfig, trial: usize) -> AnalysisResult<Vec<TrialRecord>> {
    let mut rng = util::rng_stream(cfg.seed, trial as u64);
    let system_seed: u64 = rng.gen();
    let (system, all_full) = sample(cfg, system_seed)?;
    let subsets = match cfg.subsets {
        SubsetChoice::All => crate::construct::combinations(cfg.big_n, cfg.n),
        SubsetChoice::Random => {
            let mut s = rand::seq::index::sample(&mut rng, cfg.big_n, cfg.n).into_vec();
            s.sort_unstable();
            vec![s]
        }
    };
    let opts = VerifyOptions {
        state_cap: cfg.state_cap,
        relation: cfg.scheduler,
    };
    let mut out = Vec::with_capacity(subsets.len());
    for subset in subsets {
        let mut rec = TrialRecord {
            trial,
            system_seed,
            subset: subset.clone(),
            all_full,
            method: cfg.method,
            verdict: None,
            outcome: None,
            length: None,
            ok: false,
        };
        if cfg.method == Method::Exhaustive {
            let r = verify_mc(&system, &subset, &opts)
                .map_err(|e| AnalysisError::BadParameter(e.to_string()))?;
            if r.verdict != Verdict::CapExceeded {
                rec.ok = r.is_oblivious();
                rec.length = r.longest_schedule.and_then(|l| l.to_u64());
                rec.verdict = Some(r.verdict);
                out.push(rec);
                continue;
            }
            rec.method = Method::Adversary;
        }
        let (outcome, steps) = simulate(cfg, &system, &subset, &mut rng)?;
        rec.ok = outcome == RunOutcome::Safe;
        rec.outcome = Some(outcome);
        rec.length = Some(steps);
        out.push(rec);
    }
    Ok(out)
}

/// Sample `cfg.systems` systems and examine their `n`-subsets. Trial `t`
/// draws everything from stream `t` of the master seed.
pub fn random_experiment(
    cfg: &ExperimentConfig,
    exec: Execution,
) -> AnalysisResult<ExperimentStats> {
    cfg.validate()?;
    let per_trial = exec.map(cfg.systems, |t| run_trial(cfg, t));
    let mut records = Vec::new();
    let mut systems_all_ok = 0;
    let mut full = 0;
    for recs in per_trial {
        let recs = recs?;
        if recs.iter().all(|r| r.ok) {
            systems_all_ok += 1;
        }
        if recs.first().is_some_and(|r| r.all_full) {
            full += 1;
        }
        records.extend(recs);
    }
    let mut hist = BTreeMap::new();
    for r in records.iter().filter(|r| r.ok) {
        *hist.entry(r.length.unwrap_or(0)).or_insert(0) += 1;
    }
    let successes = records.iter().filter(|r| r.ok).count();
    Ok(ExperimentStats {
        config: cfg.clone(),
        word_len: cfg.word_len(),
        rng: RNG_NAME.into(),
        trials: cfg.systems,
        runs: records.len(),
        successes,
        failures: records.len() - successes,
        systems_all_ok,
        fullness_rate: if cfg.systems == 0 {
            0.0
        } else {
            full as f64 / cfg.systems as f64
        },
        max_length: records
            .iter()
            .filter(|r| r.ok)
            .filter_map(|r| r.length)
            .max(),
        length_histogram: hist,
        records,
    })
}
