use num_bigint::BigUint;
use num_traits::{One, Zero};
use sha2::{Digest, Sha256};

use super::moves::{self, Move, SchedulerKind};
use super::{SimError, SimResult};
use crate::word::{Chair, Mode, WordSystem};

/// Positions of the active players on their words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Configuration {
    words: Vec<usize>,
    positions: Vec<BigUint>,
    mode: Mode,
    chairs: Vec<Chair>,
}

impl Configuration {
    /// Player `i` walks word `words[i]` and stands at `positions[i]`. Cyclic
    /// positions are reduced modulo the word length; linear ones must be in range.
    pub fn new(
        system: &WordSystem,
        words: Vec<usize>,
        positions: Vec<BigUint>,
        mode: Mode,
    ) -> SimResult<Self> {
        if words.len() != positions.len() {
            return Err(SimError::Shape {
                players: words.len(),
                positions: positions.len(),
            });
        }
        let mut reduced = Vec::with_capacity(positions.len());
        let mut chairs = Vec::with_capacity(positions.len());
        for (player, (&w, p)) in words.iter().zip(positions).enumerate() {
            if w >= system.len() {
                return Err(SimError::NoSuchWord(w));
            }
            let word = system.word(w);
            let p = match mode {
                Mode::Cyclic => p % word.len(),
                Mode::Linear => {
                    if &p >= word.len() {
                        return Err(SimError::BadPosition {
                            player,
                            position: p,
                        });
                    }
                    p
                }
            };
            chairs.push(word.at(&p, Mode::Linear)?);
            reduced.push(p);
        }
        Ok(Configuration {
            words,
            positions: reduced,
            mode,
            chairs,
        })
    }

    /// Every player on the first letter of its word.
    pub fn at_start(system: &WordSystem, words: Vec<usize>, mode: Mode) -> SimResult<Self> {
        let zeros = vec![BigUint::zero(); words.len()];
        Self::new(system, words, zeros, mode)
    }

    pub fn words(&self) -> &[usize] {
        &self.words
    }

    pub fn positions(&self) -> &[BigUint] {
        &self.positions
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn chairs(&self) -> &[Chair] {
        &self.chairs
    }

    pub fn players(&self) -> usize {
        self.words.len()
    }

    /// No two players share a chair.
    pub fn is_safe(&self) -> bool {
        moves::is_safe(&self.chairs)
    }

    /// SHA-256 over mode, word indices and positions.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update(match self.mode {
            Mode::Cyclic => b"cyclic".as_slice(),
            Mode::Linear => b"linear".as_slice(),
        });
        for (w, p) in self.words.iter().zip(&self.positions) {
            h.update(format!(";{w}:{p}").as_bytes());
        }
        hex::encode(h.finalize())
    }

    fn advance(&self, system: &WordSystem, players: &[usize]) -> SimResult<Configuration> {
        let mut next = self.clone();
        for &p in players {
            let word = system.word(self.words[p]);
            let mut pos = &self.positions[p] + BigUint::one();
            if &pos == word.len() {
                match self.mode {
                    Mode::Cyclic => pos = BigUint::zero(),
                    Mode::Linear => return Err(SimError::EndOfWord { player: p }),
                }
            }
            next.chairs[p] = word.at(&pos, Mode::Linear)?;
            next.positions[p] = pos;
        }
        Ok(next)
    }
}

/// Every move of `kind` together with the configuration it leads to.
/// Safe configurations have none.
pub fn successors(
    system: &WordSystem,
    config: &Configuration,
    kind: SchedulerKind,
) -> SimResult<Vec<(Move, Configuration)>> {
    moves::enumerate_moves(config.chairs(), kind)?
        .into_iter()
        .map(|m| {
            let next = config.advance(system, &m.players())?;
            Ok((m, next))
        })
        .collect()
}

/// Apply `mv`, checking that every listed player is in a collision (and,
/// for pair moves, that the pair shares a chair).
pub fn apply(system: &WordSystem, config: &Configuration, mv: &Move) -> SimResult<Configuration> {
    moves::check_move(config.chairs(), SchedulerKind::Immediate, mv)
        .map_err(SimError::IllegalMove)?;
    config.advance(system, &mv.players())
}
