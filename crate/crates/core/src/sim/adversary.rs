//! Adversary runs and replayable schedule traces.

use num_bigint::BigUint;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::config::Configuration;
use super::moves::{self, Move, PairChoice, SchedulerKind};
use super::{SimError, SimResult};
use crate::util::{self, big_dec_vec};
use crate::word::{Mode, SystemKind, WordSystem};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Uniform choice among the moves of the scheduler kind.
    Random,
    /// Canonical pair every step; of its three moves take the one leaving
    /// the most players in collision (ties resolved A, B, both).
    GreedyCanonical,
    /// Re-execute the moves of a recorded trace.
    Replay(ScheduleTrace),
}

impl Strategy {
    fn name(&self) -> &'static str {
        match self {
            Strategy::Random => "random",
            Strategy::GreedyCanonical => "greedy-canonical",
            Strategy::Replay(_) => "replay",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunOutcome {
    /// Reached a configuration without collisions.
    Safe,
    /// Stopped after `step_cap` moves while still in collision.
    StepCapReached,
    /// A linear-mode player was pushed past its last letter.
    EndOfWord,
    /// A replayed trace ran out of moves before reaching a safe configuration.
    TraceExhausted,
}

/// An initial configuration plus the moves applied to it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleTrace {
    pub system_digest: String,
    /// Word index of each player.
    pub subset: Vec<usize>,
    #[serde(with = "big_dec_vec")]
    pub init: Vec<BigUint>,
    pub mode: Mode,
    pub kind: SchedulerKind,
    pub strategy: String,
    pub seed: u64,
    pub rng: String,
    pub moves: Vec<Move>,
    pub final_digest: String,
    pub outcome: RunOutcome,
}

impl ScheduleTrace {
    pub fn steps(&self) -> usize {
        self.moves.len()
    }
}

#[derive(Clone, Debug)]
pub struct AdversaryParams {
    pub kind: SchedulerKind,
    pub strategy: Strategy,
    pub step_cap: u64,
    pub seed: u64,
}

fn mode_of(system: &WordSystem) -> Mode {
    match system.kind() {
        SystemKind::Mc => Mode::Cyclic,
        SystemKind::Renaming => Mode::Linear,
    }
}

/// Drive the players of `subset` from `init` until no collision remains or
/// `step_cap` moves have been made.
pub fn run_adversary(
    system: &WordSystem,
    subset: &[usize],
    init: &[BigUint],
    params: &AdversaryParams,
) -> SimResult<ScheduleTrace> {
    let mode = mode_of(system);
    if mode == Mode::Linear && init.iter().any(|p| p.bits() != 0) {
        return Err(SimError::RenamingStart);
    }
    let start = Configuration::new(system, subset.to_vec(), init.to_vec(), mode)?;
    let mut rng = util::rng(params.seed);
    let mut config = start.clone();
    let mut moves_done = Vec::new();
    let mut replay_moves = match &params.strategy {
        Strategy::Replay(t) => Some(t.moves.iter()),
        _ => None,
    };
    let outcome = loop {
        if config.is_safe() {
            break RunOutcome::Safe;
        }
        if moves_done.len() as u64 >= params.step_cap {
            break RunOutcome::StepCapReached;
        }
        let step = match &params.strategy {
            Strategy::Random => {
                let all = moves::enumerate_moves(config.chairs(), params.kind)?;
                let mv = all[rng.gen_range(0..all.len())].clone();
                match super::config::apply(system, &config, &mv) {
                    Ok(next) => (mv, next),
                    Err(SimError::EndOfWord { .. }) => {
                        moves_done.push(mv);
                        break RunOutcome::EndOfWord;
                    }
                    Err(e) => return Err(e),
                }
            }
            Strategy::GreedyCanonical => {
                let (i, j) = moves::canonical_pair(config.chairs()).expect("unsafe configuration");
                let mut best: Option<(usize, Move, Configuration)> = None;
                let mut fell_off = None;
                for c in [PairChoice::A, PairChoice::B, PairChoice::Both] {
                    let mv = Move::pair(i, j, c);
                    match super::config::apply(system, &config, &mv) {
                        Ok(next) => {
                            let hot = moves::colliding(next.chairs())
                                .iter()
                                .filter(|&&h| h)
                                .count();
                            if best.as_ref().is_none_or(|(b, _, _)| hot > *b) {
                                best = Some((hot, mv, next));
                            }
                        }
                        Err(SimError::EndOfWord { .. }) => {
                            fell_off.get_or_insert(mv);
                        }
                        Err(e) => return Err(e),
                    }
                }
                match (best, fell_off) {
                    (_, Some(mv)) => {
                        // pushing a player off its word is the strongest attack
                        moves_done.push(mv);
                        break RunOutcome::EndOfWord;
                    }
                    (Some((_, mv, next)), None) => (mv, next),
                    (None, None) => unreachable!("canonical pair always has a move"),
                }
            }
            Strategy::Replay(_) => {
                let Some(mv) = replay_moves.as_mut().unwrap().next() else {
                    break RunOutcome::TraceExhausted;
                };
                moves::check_move(config.chairs(), params.kind, mv)
                    .map_err(SimError::IllegalMove)?;
                match super::config::apply(system, &config, mv) {
                    Ok(next) => (mv.clone(), next),
                    Err(SimError::EndOfWord { .. }) => {
                        moves_done.push(mv.clone());
                        break RunOutcome::EndOfWord;
                    }
                    Err(e) => return Err(e),
                }
            }
        };
        moves_done.push(step.0);
        config = step.1;
    };
    Ok(ScheduleTrace {
        system_digest: system.digest(),
        subset: subset.to_vec(),
        init: start.positions().to_vec(),
        mode,
        kind: params.kind,
        strategy: params.strategy.name().to_string(),
        seed: params.seed,
        rng: util::RNG_NAME.to_string(),
        moves: moves_done,
        final_digest: config.digest(),
        outcome,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplayReport {
    pub valid: bool,
    /// Index of the first offending move; `moves.len()` when only the final
    /// digest disagrees.
    pub failure_step: Option<usize>,
    pub reason: Option<String>,
}

impl ReplayReport {
    fn fail(step: usize, reason: impl Into<String>) -> Self {
        ReplayReport {
            valid: false,
            failure_step: Some(step),
            reason: Some(reason.into()),
        }
    }
}

/// Re-execute a trace against `system`, checking every move and the final digest.
pub fn replay(system: &WordSystem, trace: &ScheduleTrace) -> ReplayReport {
    if system.digest() != trace.system_digest {
        return ReplayReport::fail(0, "system digest mismatch");
    }
    let mut config =
        match Configuration::new(system, trace.subset.clone(), trace.init.clone(), trace.mode) {
            Ok(c) => c,
            Err(e) => return ReplayReport::fail(0, e.to_string()),
        };
    for (step, mv) in trace.moves.iter().enumerate() {
        if let Err(why) = moves::check_move(config.chairs(), trace.kind, mv) {
            return ReplayReport::fail(step, why);
        }
        match super::config::apply(system, &config, mv) {
            Ok(next) => config = next,
            Err(SimError::EndOfWord { .. })
                if trace.outcome == RunOutcome::EndOfWord && step + 1 == trace.moves.len() =>
            {
                return ReplayReport {
                    valid: true,
                    failure_step: None,
                    reason: None,
                };
            }
            Err(e) => return ReplayReport::fail(step, e.to_string()),
        }
    }
    if config.digest() != trace.final_digest {
        return ReplayReport::fail(trace.moves.len(), "final configuration digest mismatch");
    }
    ReplayReport {
        valid: true,
        failure_step: None,
        reason: None,
    }
}
