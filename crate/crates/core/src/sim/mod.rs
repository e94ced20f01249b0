//! Executable semantics of the oblivious schedulers.
//!
//! The asynchronous and quiescent schedulers are not modelled: they have the
//! same power to prevent termination as the immediate scheduler, which is
//! modelled here together with its pairwise and canonical restrictions.

mod adversary;
mod config;
mod moves;

use num_bigint::BigUint;
use thiserror::Error;

use crate::word::WordError;

pub use adversary::{
    replay, run_adversary, AdversaryParams, ReplayReport, RunOutcome, ScheduleTrace, Strategy,
};
pub use config::{apply, successors, Configuration};
pub(crate) use moves::for_each_mask;
pub use moves::{
    canonical_pair, check_move, colliding, enumerate_moves, is_safe, Move, PairChoice,
    SchedulerKind, MAX_IMMEDIATE_COLLIDING,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("player {player} stepped past the end of its word")]
    EndOfWord { player: usize },

    #[error("illegal move: {0}")]
    IllegalMove(String),

    #[error("{0} colliding players exceed the immediate-scheduler limit")]
    TooManyColliding(usize),

    #[error("word {0} does not exist")]
    NoSuchWord(usize),

    #[error("position {position} of player {player} is outside its word")]
    BadPosition { player: usize, position: BigUint },

    #[error("{players} players but {positions} positions")]
    Shape { players: usize, positions: usize },

    #[error("renaming runs start every player on its first letter")]
    RenamingStart,

    #[error(transparent)]
    Word(#[from] WordError),
}

pub type SimResult<T> = Result<T, SimError>;
