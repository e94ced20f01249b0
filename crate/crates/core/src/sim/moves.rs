//! Transition relations of the immediate, pairwise-immediate and canonical
//! schedulers, expressed over the current chair vector.

use serde::{Deserialize, Serialize};

use super::{SimError, SimResult};
use crate::word::Chair;

/// Largest number of colliding players for which the immediate relation
/// enumerates its subset moves.
pub const MAX_IMMEDIATE_COLLIDING: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchedulerKind {
    /// Any nonempty subset of the colliding players moves.
    Immediate,
    /// One colliding pair; either member or both move.
    Pairwise,
    /// Like `Pairwise`, restricted to the first colliding pair in
    /// lexicographic `(i, j)` order.
    Canonical,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PairChoice {
    A,
    B,
    Both,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Move {
    Pair { pair: [usize; 2], moved: PairChoice },
    Single { single: usize },
    Group { group: Vec<usize> },
}

impl Move {
    pub fn pair(a: usize, b: usize, moved: PairChoice) -> Move {
        Move::Pair {
            pair: [a, b],
            moved,
        }
    }

    /// Players advanced by this move, ascending.
    pub fn players(&self) -> Vec<usize> {
        let mut v = match self {
            Move::Pair {
                pair: [a, b],
                moved,
            } => match moved {
                PairChoice::A => vec![*a],
                PairChoice::B => vec![*b],
                PairChoice::Both => vec![*a, *b],
            },
            Move::Single { single } => vec![*single],
            Move::Group { group } => group.clone(),
        };
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Move advancing exactly the players in `mask`; two players sharing a
    /// chair are reported as a pair move.
    pub(crate) fn from_mask(mask: u64, chairs: &[Chair]) -> Move {
        let players: Vec<usize> = (0..64).filter(|i| mask >> i & 1 == 1).collect();
        match players.as_slice() {
            [p] => Move::Single { single: *p },
            [a, b] if chairs[*a] == chairs[*b] => Move::pair(*a, *b, PairChoice::Both),
            _ => Move::Group { group: players },
        }
    }
}

/// `colliding[i]` is true when another player shares player `i`'s chair.
pub fn colliding(chairs: &[Chair]) -> Vec<bool> {
    let n = chairs.len();
    let mut out = vec![false; n];
    for i in 0..n {
        for j in i + 1..n {
            if chairs[i] == chairs[j] {
                out[i] = true;
                out[j] = true;
            }
        }
    }
    out
}

pub fn is_safe(chairs: &[Chair]) -> bool {
    for i in 0..chairs.len() {
        for j in i + 1..chairs.len() {
            if chairs[i] == chairs[j] {
                return false;
            }
        }
    }
    true
}

/// First colliding pair in lexicographic order.
pub fn canonical_pair(chairs: &[Chair]) -> Option<(usize, usize)> {
    for i in 0..chairs.len() {
        for j in i + 1..chairs.len() {
            if chairs[i] == chairs[j] {
                return Some((i, j));
            }
        }
    }
    None
}

/// Every move of `kind` available in the configuration with these chairs.
///
/// Pairwise moves are listed pair by pair, so a single-player move reachable
/// through several pairs appears once per pair.
pub fn enumerate_moves(chairs: &[Chair], kind: SchedulerKind) -> SimResult<Vec<Move>> {
    let n = chairs.len();
    let mut out = Vec::new();
    match kind {
        SchedulerKind::Pairwise => {
            for i in 0..n {
                for j in i + 1..n {
                    if chairs[i] == chairs[j] {
                        for c in [PairChoice::A, PairChoice::B, PairChoice::Both] {
                            out.push(Move::pair(i, j, c));
                        }
                    }
                }
            }
        }
        SchedulerKind::Canonical => {
            if let Some((i, j)) = canonical_pair(chairs) {
                for c in [PairChoice::A, PairChoice::B, PairChoice::Both] {
                    out.push(Move::pair(i, j, c));
                }
            }
        }
        SchedulerKind::Immediate => {
            let hot: Vec<usize> = colliding(chairs)
                .iter()
                .enumerate()
                .filter(|(_, &c)| c)
                .map(|(i, _)| i)
                .collect();
            if hot.len() > MAX_IMMEDIATE_COLLIDING {
                return Err(SimError::TooManyColliding(hot.len()));
            }
            for sub in 1u64..(1u64 << hot.len()) {
                let group: Vec<usize> = hot
                    .iter()
                    .enumerate()
                    .filter(|(b, _)| sub >> b & 1 == 1)
                    .map(|(_, &p)| p)
                    .collect();
                out.push(if group.len() == 1 {
                    Move::Single { single: group[0] }
                } else {
                    Move::Group { group }
                });
            }
        }
    }
    Ok(out)
}

/// Allocation-free variant of [`enumerate_moves`] reporting each move as a
/// bitmask of advanced players. Duplicate masks are suppressed for the
/// pairwise relation. Requires `chairs.len() <= 64`.
pub(crate) fn for_each_mask(
    chairs: &[Chair],
    kind: SchedulerKind,
    mut f: impl FnMut(u64),
) -> SimResult<()> {
    let n = chairs.len();
    debug_assert!(n <= 64);
    match kind {
        SchedulerKind::Pairwise => {
            let mut singles = 0u64;
            for i in 0..n {
                for j in i + 1..n {
                    if chairs[i] == chairs[j] {
                        f((1 << i) | (1 << j));
                        singles |= (1 << i) | (1 << j);
                    }
                }
            }
            let mut s = singles;
            while s != 0 {
                let b = s & s.wrapping_neg();
                f(b);
                s ^= b;
            }
        }
        SchedulerKind::Canonical => {
            if let Some((i, j)) = canonical_pair(chairs) {
                f(1 << i);
                f(1 << j);
                f((1 << i) | (1 << j));
            }
        }
        SchedulerKind::Immediate => {
            let mut hot = 0u64;
            for i in 0..n {
                for j in i + 1..n {
                    if chairs[i] == chairs[j] {
                        hot |= (1 << i) | (1 << j);
                    }
                }
            }
            let count = hot.count_ones() as usize;
            if count > MAX_IMMEDIATE_COLLIDING {
                return Err(SimError::TooManyColliding(count));
            }
            // enumerate nonempty submasks of `hot`
            let mut sub = hot;
            while sub != 0 {
                f(sub);
                sub = (sub - 1) & hot;
            }
        }
    }
    Ok(())
}

/// Check that `mv` is a legal move of `kind` in the configuration with
/// these chairs.
pub fn check_move(chairs: &[Chair], kind: SchedulerKind, mv: &Move) -> Result<(), String> {
    let n = chairs.len();
    let hot = colliding(chairs);
    let players = mv.players();
    if players.is_empty() {
        return Err("move advances no player".into());
    }
    if let Some(&p) = players.iter().find(|&&p| p >= n) {
        return Err(format!("player {p} does not exist"));
    }
    if let Some(&p) = players.iter().find(|&&p| !hot[p]) {
        return Err(format!("player {p} is not in a collision"));
    }
    match (kind, mv) {
        (_, Move::Pair { pair: [a, b], .. }) => {
            if a == b || chairs[*a] != chairs[*b] {
                return Err(format!("players {a} and {b} do not share a chair"));
            }
            if kind == SchedulerKind::Canonical
                && canonical_pair(chairs) != Some((*a.min(b), *a.max(b)))
            {
                return Err(format!("({a}, {b}) is not the canonical pair"));
            }
            Ok(())
        }
        (SchedulerKind::Immediate, _) => Ok(()),
        (SchedulerKind::Pairwise, Move::Single { .. }) => Ok(()),
        (SchedulerKind::Pairwise, Move::Group { group }) => {
            if group.len() == 2 && chairs[group[0]] == chairs[group[1]] {
                Ok(())
            } else {
                Err("pairwise scheduler moves at most one colliding pair".into())
            }
        }
        (SchedulerKind::Canonical, _) => {
            let (i, j) = canonical_pair(chairs).expect("collision exists");
            if players.iter().all(|&p| p == i || p == j) {
                Ok(())
            } else {
                Err("move leaves the canonical pair".into())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_on_one_chair() {
        let chairs = [1, 1, 1];
        assert_eq!(
            enumerate_moves(&chairs, SchedulerKind::Immediate)
                .unwrap()
                .len(),
            7
        );
        assert_eq!(
            enumerate_moves(&chairs, SchedulerKind::Pairwise)
                .unwrap()
                .len(),
            9
        );
        assert_eq!(
            enumerate_moves(&chairs, SchedulerKind::Canonical)
                .unwrap()
                .len(),
            3
        );
    }

    #[test]
    fn safe_configurations_are_sinks() {
        for kind in [
            SchedulerKind::Immediate,
            SchedulerKind::Pairwise,
            SchedulerKind::Canonical,
        ] {
            assert!(enumerate_moves(&[1, 2, 3], kind).unwrap().is_empty());
            let mut any = false;
            for_each_mask(&[1, 2, 3], kind, |_| any = true).unwrap();
            assert!(!any);
        }
    }

    #[test]
    fn canonical_pair_is_lexicographic() {
        assert_eq!(canonical_pair(&[3, 1, 2, 1, 3]), Some((0, 4)));
        assert_eq!(canonical_pair(&[1, 2, 2, 1]), Some((0, 3)));
        assert_eq!(canonical_pair(&[1, 2]), None);
    }

    #[test]
    fn masks_match_enumerated_moves() {
        let chairs = [1, 2, 1, 2, 3, 1];
        for kind in [
            SchedulerKind::Immediate,
            SchedulerKind::Pairwise,
            SchedulerKind::Canonical,
        ] {
            let mut from_moves: Vec<u64> = enumerate_moves(&chairs, kind)
                .unwrap()
                .iter()
                .map(|m| m.players().iter().fold(0u64, |a, &p| a | 1 << p))
                .collect();
            from_moves.sort_unstable();
            from_moves.dedup();
            let mut masks = Vec::new();
            for_each_mask(&chairs, kind, |m| masks.push(m)).unwrap();
            masks.sort_unstable();
            assert_eq!(masks, from_moves, "{kind:?}");
        }
    }

    #[test]
    fn immediate_refuses_huge_collisions() {
        let chairs = [1; 21];
        assert_eq!(
            enumerate_moves(&chairs, SchedulerKind::Immediate).unwrap_err(),
            SimError::TooManyColliding(21)
        );
    }

    #[test]
    fn move_checks() {
        let chairs = [1, 1, 2];
        assert!(check_move(
            &chairs,
            SchedulerKind::Pairwise,
            &Move::pair(0, 1, PairChoice::Both)
        )
        .is_ok());
        assert!(check_move(
            &chairs,
            SchedulerKind::Pairwise,
            &Move::Single { single: 2 }
        )
        .is_err());
        assert!(check_move(
            &chairs,
            SchedulerKind::Pairwise,
            &Move::pair(0, 2, PairChoice::A)
        )
        .is_err());
        let chairs = [1, 2, 2, 1];
        assert!(check_move(
            &chairs,
            SchedulerKind::Canonical,
            &Move::pair(1, 2, PairChoice::A)
        )
        .is_err());
        assert!(check_move(
            &chairs,
            SchedulerKind::Canonical,
            &Move::pair(0, 3, PairChoice::B)
        )
        .is_ok());
        assert!(check_move(
            &chairs,
            SchedulerKind::Immediate,
            &Move::Group {
                group: vec![0, 1, 2]
            }
        )
        .is_ok());
    }

    #[test]
    fn moves_serialize_as_trace_entries() {
        let j = serde_json::to_string(&Move::pair(0, 1, PairChoice::Both)).unwrap();
        assert_eq!(j, r#"{"pair":[0,1],"moved":"both"}"#);
        let j = serde_json::to_string(&Move::Single { single: 2 }).unwrap();
        assert_eq!(j, r#"{"single":2}"#);
        let back: Move = serde_json::from_str(r#"{"pair":[1,2],"moved":"a"}"#).unwrap();
        assert_eq!(back, Move::pair(1, 2, PairChoice::A));
    }
}
