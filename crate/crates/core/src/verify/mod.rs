//! Decision procedures over the configuration digraph.
//!
//! A word system is oblivious iff the digraph of its configurations under the
//! pairwise-immediate relation is acyclic. Every check here is an exhaustive
//! walk of that digraph, bounded by an explicit state cap.

mod engine;
mod probe;
mod search;

use std::time::Instant;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::construct::{RecursivePair, Side};
use crate::sim::{self, check_move, is_safe, Move, SchedulerKind, SimError};
use crate::util::{big_dec, big_dec_opt, big_dec_vec, big_dec_vec_opt};
use crate::word::{Chair, ChairSet, Mode, SystemKind, WordError, WordExpr, WordSystem};

use engine::{explore, Found, Options, Path, Roots, Space};

pub use engine::MAX_STATES;
pub use probe::{equivalence_probe, ProbeReport, DEFAULT_PROBE_CAP};
pub use search::{search_impossibility, SearchParams, SearchReport};

/// Default bound on the number of position tuples a single check may visit.
pub const DEFAULT_STATE_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("state space of {states} configurations exceeds the cap of {cap}")]
    CapExceeded { states: BigUint, cap: u64 },

    #[error("{0} players exceed the supported maximum of 64")]
    TooManyPlayers(usize),

    #[error("bad player subset: {0}")]
    BadSubset(String),

    #[error("expected a {expected:?} system")]
    WrongKind { expected: SystemKind },

    #[error("restriction needs {needed} chairs for {p} players, got {got}")]
    BadRestriction { p: usize, needed: usize, got: usize },

    #[error("search budget of {budget} tuples exhausted after {checked} of {total}")]
    BudgetExceeded {
        budget: u64,
        checked: u64,
        total: BigUint,
    },

    #[error("words are not oblivious")]
    NotOblivious,

    #[error(transparent)]
    Sim(#[from] SimError),

    #[error(transparent)]
    Word(#[from] WordError),
}

pub type VerifyResult<T> = Result<T, VerifyError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Oblivious,
    CycleFound,
    CapExceeded,
    /// Linear mode only: some schedule pushes a player past its last letter.
    EndOfWord,
    /// Renaming only: a reachable configuration seats a player above 2k-1.
    ChairBoundViolated,
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub state_cap: u64,
    pub relation: SchedulerKind,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            state_cap: DEFAULT_STATE_CAP,
            relation: SchedulerKind::Pairwise,
        }
    }
}

impl VerifyOptions {
    pub fn with_cap(state_cap: u64) -> Self {
        VerifyOptions {
            state_cap,
            ..Self::default()
        }
    }
}

/// A walk through configurations. `moves[i]` leads from `positions[i]` to
/// `positions[i + 1]`; an end-of-word witness carries one extra move that
/// has no resulting configuration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub positions: Vec<Vec<u64>>,
    pub chairs: Vec<Vec<Chair>>,
    pub moves: Vec<Move>,
}

impl Witness {
    fn from_path(space: &Space, path: &Path) -> Witness {
        let chairs: Vec<Vec<Chair>> = path.states.iter().map(|&s| space.chairs_of(s)).collect();
        let moves = path
            .masks
            .iter()
            .enumerate()
            .map(|(i, &m)| Move::from_mask(m, &chairs[i]))
            .collect();
        Witness {
            positions: path.states.iter().map(|&s| space.positions(s)).collect(),
            chairs,
            moves,
        }
    }

    /// Number of moves.
    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    /// Re-execute the walk on `system`, checking each move against `kind`
    /// and each recorded configuration.
    pub fn replay(
        &self,
        system: &WordSystem,
        subset: &[usize],
        mode: Mode,
        kind: SchedulerKind,
    ) -> Result<(), String> {
        let Some(first) = self.positions.first() else {
            return Err("empty witness".into());
        };
        let to_big = |p: &[u64]| p.iter().map(|&x| BigUint::from(x)).collect::<Vec<_>>();
        let mut config = sim::Configuration::new(system, subset.to_vec(), to_big(first), mode)
            .map_err(|e| e.to_string())?;
        for (i, mv) in self.moves.iter().enumerate() {
            check_move(config.chairs(), kind, mv).map_err(|e| format!("step {i}: {e}"))?;
            match sim::apply(system, &config, mv) {
                Ok(next) => {
                    let want = self
                        .positions
                        .get(i + 1)
                        .ok_or(format!("step {i}: missing configuration"))?;
                    if next.positions() != to_big(want).as_slice() {
                        return Err(format!("step {i}: configuration mismatch"));
                    }
                    config = next;
                }
                Err(SimError::EndOfWord { .. })
                    if i + 1 == self.moves.len() && self.positions.len() == i + 1 =>
                {
                    return Ok(());
                }
                Err(e) => return Err(format!("step {i}: {e}")),
            }
        }
        Ok(())
    }

    /// Replays and returns to its first configuration.
    pub fn is_cycle(
        &self,
        system: &WordSystem,
        subset: &[usize],
        mode: Mode,
        kind: SchedulerKind,
    ) -> bool {
        !self.moves.is_empty()
            && self.replay(system, subset, mode, kind).is_ok()
            && self.positions.first() == self.positions.last()
    }

    /// Replays and ends in a configuration without collisions.
    pub fn ends_safe(
        &self,
        system: &WordSystem,
        subset: &[usize],
        mode: Mode,
        kind: SchedulerKind,
    ) -> bool {
        self.replay(system, subset, mode, kind).is_ok()
            && self.positions.len() == self.moves.len() + 1
            && self.chairs.last().is_some_and(|c| is_safe(c))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    pub state_cap: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub verdict: Verdict,
    pub players: Vec<usize>,
    pub mode: Mode,
    pub relation: SchedulerKind,
    #[serde(with = "big_dec_vec")]
    pub word_lengths: Vec<BigUint>,
    #[serde(with = "big_dec")]
    pub state_space: BigUint,
    pub states_explored: u64,
    #[serde(with = "big_dec_opt")]
    pub longest_schedule: Option<BigUint>,
    #[serde(with = "big_dec_vec_opt")]
    pub per_player_max_moves: Option<Vec<BigUint>>,
    /// Cycle, end-of-word or chair-bound witness, depending on the verdict.
    pub witness: Option<Witness>,
    /// A schedule of maximal length, ending in a safe configuration.
    pub longest_path: Option<Witness>,
    pub caps: Caps,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timing_ms: Option<u64>,
}

impl VerifyReport {
    pub fn is_oblivious(&self) -> bool {
        self.verdict == Verdict::Oblivious
    }

    /// Acyclic and no player can traverse its whole word.
    pub fn is_terminal(&self) -> bool {
        match &self.per_player_max_moves {
            Some(pp) if self.is_oblivious() => {
                pp.iter().zip(&self.word_lengths).all(|(m, l)| m < l)
            }
            _ => false,
        }
    }
}

fn check_subset(system: &WordSystem, subset: &[usize]) -> VerifyResult<()> {
    if subset.is_empty() {
        return Err(VerifyError::BadSubset("no players selected".into()));
    }
    for (k, &w) in subset.iter().enumerate() {
        if w >= system.len() {
            return Err(VerifyError::BadSubset(format!("word {w} does not exist")));
        }
        if subset[..k].contains(&w) {
            return Err(VerifyError::BadSubset(format!("word {w} selected twice")));
        }
    }
    Ok(())
}

struct Run<'a> {
    system: &'a WordSystem,
    subset: &'a [usize],
    mode: Mode,
    opts: &'a VerifyOptions,
}

impl Run<'_> {
    fn report(&self, roots_start: bool, chair_bound: Option<Chair>) -> VerifyResult<VerifyReport> {
        let t0 = Instant::now();
        let lengths: Vec<BigUint> = self
            .subset
            .iter()
            .map(|&w| self.system.word(w).len().clone())
            .collect();
        let state_space: BigUint = lengths.iter().product();
        let mut report = VerifyReport {
            verdict: Verdict::CapExceeded,
            players: self.subset.to_vec(),
            mode: self.mode,
            relation: self.opts.relation,
            word_lengths: lengths,
            state_space,
            states_explored: 0,
            longest_schedule: None,
            per_player_max_moves: None,
            witness: None,
            longest_path: None,
            caps: Caps {
                state_cap: self.opts.state_cap,
            },
            timing_ms: None,
        };
        let space = match Space::new(self.system, self.subset, self.mode, self.opts.state_cap) {
            Ok(s) => s,
            Err(VerifyError::CapExceeded { .. }) => {
                report.timing_ms = Some(t0.elapsed().as_millis() as u64);
                return Ok(report);
            }
            Err(e) => return Err(e),
        };
        let opts = Options {
            kind: self.opts.relation,
            roots: if roots_start {
                Roots::Start(0)
            } else {
                Roots::All
            },
            track_players: true,
            chair_bound,
            longest_path: true,
        };
        let ex = explore(&space, &opts)?;
        report.states_explored = ex.states_explored;
        match ex.found {
            Found::Acyclic {
                longest,
                per_player,
                path,
            } => {
                report.verdict = Verdict::Oblivious;
                report.longest_schedule = Some(longest.into());
                report.per_player_max_moves =
                    Some(per_player.into_iter().map(BigUint::from).collect());
                report.longest_path = path.map(|p| Witness::from_path(&space, &p));
            }
            Found::Cycle(p) => {
                report.verdict = Verdict::CycleFound;
                report.witness = Some(Witness::from_path(&space, &p));
            }
            Found::EndOfWord(p) => {
                report.verdict = Verdict::EndOfWord;
                report.witness = Some(Witness::from_path(&space, &p));
            }
            Found::ChairBound(p) => {
                report.verdict = Verdict::ChairBoundViolated;
                report.witness = Some(Witness::from_path(&space, &p));
            }
        }
        report.timing_ms = Some(t0.elapsed().as_millis() as u64);
        Ok(report)
    }
}

/// Decide obliviousness of the words in `subset`, every position tuple being
/// an admissible start.
pub fn verify_mc(
    system: &WordSystem,
    subset: &[usize],
    opts: &VerifyOptions,
) -> VerifyResult<VerifyReport> {
    check_subset(system, subset)?;
    Run {
        system,
        subset,
        mode: Mode::Cyclic,
        opts,
    }
    .report(false, None)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LongestSchedule {
    #[serde(with = "big_dec")]
    pub total: BigUint,
    #[serde(with = "big_dec_vec")]
    pub per_player: Vec<BigUint>,
}

fn require_oblivious(report: VerifyReport) -> VerifyResult<VerifyReport> {
    match report.verdict {
        Verdict::Oblivious => Ok(report),
        Verdict::CapExceeded => Err(VerifyError::CapExceeded {
            states: report.state_space,
            cap: report.caps.state_cap,
        }),
        _ => Err(VerifyError::NotOblivious),
    }
}

/// Exact longest schedule over all starts, in total and per player.
pub fn longest_schedule(
    system: &WordSystem,
    subset: &[usize],
    opts: &VerifyOptions,
) -> VerifyResult<LongestSchedule> {
    let r = require_oblivious(verify_mc(system, subset, opts)?)?;
    Ok(LongestSchedule {
        total: r.longest_schedule.unwrap(),
        per_player: r.per_player_max_moves.unwrap(),
    })
}

/// Acyclic, and no schedule lets any player traverse its whole word.
pub fn check_terminal(
    system: &WordSystem,
    subset: &[usize],
    opts: &VerifyOptions,
) -> VerifyResult<bool> {
    let r = verify_mc(system, subset, opts)?;
    if r.verdict == Verdict::CapExceeded {
        return Err(VerifyError::CapExceeded {
            states: r.state_space,
            cap: r.caps.state_cap,
        });
    }
    Ok(r.is_terminal())
}

/// The first `p` words of one side of `pair`, restricted to `a`.
pub fn prop17_system(
    pair: &RecursivePair,
    side: Side,
    p: usize,
    a: &ChairSet,
) -> VerifyResult<WordSystem> {
    let base = pair.side(side);
    if p == 0 || p > base.len() || a.len() != 2 * p - 1 {
        return Err(VerifyError::BadRestriction {
            p,
            needed: 2 * p.max(1) - 1,
            got: a.len(),
        });
    }
    if a.iter().any(|c| c == 0 || c > base.m()) {
        let c = a.iter().find(|&c| c == 0 || c > base.m()).unwrap();
        return Err(WordError::BadChair {
            chair: c as i64,
            m: base.m(),
        }
        .into());
    }
    let words = base.words()[..p]
        .iter()
        .map(|w| WordExpr::restrict(w.clone(), a.clone()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(WordSystem::new(base.m(), SystemKind::Mc, words)?)
}

/// Terminality of the first `p` words of one side restricted to the chairs `a`.
pub fn check_prop17(
    pair: &RecursivePair,
    side: Side,
    p: usize,
    a: &ChairSet,
    opts: &VerifyOptions,
) -> VerifyResult<bool> {
    let sys = prop17_system(pair, side, p, a)?;
    let all: Vec<usize> = (0..p).collect();
    check_terminal(&sys, &all, opts)
}

/// Explore every schedule of the renaming words in `subset` from their first
/// letters. Oblivious iff all of them end safely with every player on a chair
/// at most `2k - 1`.
pub fn verify_renaming(
    system: &WordSystem,
    subset: &[usize],
    opts: &VerifyOptions,
) -> VerifyResult<VerifyReport> {
    if system.kind() != SystemKind::Renaming {
        return Err(VerifyError::WrongKind {
            expected: SystemKind::Renaming,
        });
    }
    check_subset(system, subset)?;
    let bound = (2 * subset.len() - 1) as Chair;
    Run {
        system,
        subset,
        mode: Mode::Linear,
        opts,
    }
    .report(true, Some(bound))
}
