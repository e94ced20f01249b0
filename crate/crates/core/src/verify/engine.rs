//! Explicit-state exploration of the configuration digraph.
//!
//! States are position tuples packed as mixed-radix integers (player 0 is the
//! least significant digit). The digraph is never built: successors are
//! regenerated from the chair vector on demand, and one `u32` per state holds
//! both the DFS colour and, once finished, the longest schedule from it.

use std::collections::{HashMap, VecDeque};

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::sim::{for_each_mask, is_safe, SchedulerKind, SimResult};
use crate::word::{Chair, Mode, WordSystem};

use super::VerifyError;

const UNSEEN: u32 = 0;
const ON_STACK: u32 = 1;
/// Finished states store `longest + DONE`.
const DONE: u32 = 2;

/// Largest state space the `u32` bookkeeping can address.
pub const MAX_STATES: u64 = (u32::MAX - DONE - 1) as u64;

pub(crate) struct Space {
    words: Vec<Vec<Chair>>,
    lens: Vec<u64>,
    strides: Vec<u64>,
    total: u64,
    mode: Mode,
}

impl Space {
    pub fn new(
        system: &WordSystem,
        subset: &[usize],
        mode: Mode,
        cap: u64,
    ) -> Result<Space, VerifyError> {
        let cap = cap.min(MAX_STATES);
        if subset.len() > 64 {
            return Err(VerifyError::TooManyPlayers(subset.len()));
        }
        let product: BigUint = subset
            .iter()
            .map(|&w| system.word(w).len().clone())
            .product();
        if product > BigUint::from(cap) {
            return Err(VerifyError::CapExceeded {
                states: product,
                cap,
            });
        }
        let mut words = Vec::with_capacity(subset.len());
        for &w in subset {
            words.push(system.word(w).materialize(cap as usize)?);
        }
        let lens: Vec<u64> = words.iter().map(|w| w.len() as u64).collect();
        let mut strides = Vec::with_capacity(lens.len());
        let mut acc = 1u64;
        for &l in &lens {
            strides.push(acc);
            acc *= l;
        }
        Ok(Space {
            words,
            lens,
            strides,
            total: product.to_u64().unwrap(),
            mode,
        })
    }

    pub fn players(&self) -> usize {
        self.words.len()
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    #[inline]
    fn pos(&self, s: u64, i: usize) -> u64 {
        (s / self.strides[i]) % self.lens[i]
    }

    pub fn positions(&self, s: u64) -> Vec<u64> {
        (0..self.players()).map(|i| self.pos(s, i)).collect()
    }

    #[inline]
    pub fn chairs(&self, s: u64, out: &mut [Chair]) {
        for (i, c) in out.iter_mut().enumerate() {
            *c = self.words[i][self.pos(s, i) as usize];
        }
    }

    pub fn chairs_of(&self, s: u64) -> Vec<Chair> {
        let mut v = vec![0; self.players()];
        self.chairs(s, &mut v);
        v
    }

    /// Advance the players in `mask`; `None` if one of them leaves a linear word.
    #[inline]
    pub fn step(&self, s: u64, mask: u64) -> Option<u64> {
        let mut next = s;
        let mut m = mask;
        while m != 0 {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            let p = self.pos(s, i);
            if p + 1 == self.lens[i] {
                match self.mode {
                    Mode::Cyclic => next -= p * self.strides[i],
                    Mode::Linear => return None,
                }
            } else {
                next += self.strides[i];
            }
        }
        Some(next)
    }
}

pub(crate) enum Roots {
    /// Every state is an admissible start.
    All,
    Start(u64),
}

pub(crate) struct Options {
    pub kind: SchedulerKind,
    pub roots: Roots,
    pub track_players: bool,
    pub chair_bound: Option<Chair>,
    pub longest_path: bool,
}

/// A walk through the state space: `masks[i]` takes `states[i]` to
/// `states[i + 1]`. A trailing extra mask is a move with no successor state
/// (a player falling off a linear word).
#[derive(Clone, Debug, Default)]
pub(crate) struct Path {
    pub states: Vec<u64>,
    pub masks: Vec<u64>,
}

pub(crate) enum Found {
    Acyclic {
        longest: u64,
        per_player: Vec<u64>,
        path: Option<Path>,
    },
    Cycle(Path),
    EndOfWord(Path),
    ChairBound(Path),
}

pub(crate) struct Exploration {
    pub found: Found,
    pub states_explored: u64,
}

struct Frame {
    state: u64,
    start: usize,
    cursor: usize,
}

struct Explorer<'a> {
    space: &'a Space,
    opts: &'a Options,
    info: Vec<u32>,
    per_player: Vec<Vec<u32>>,
    frames: Vec<Frame>,
    succ: Vec<(u64, u64)>,
    chairs: Vec<Chair>,
    masks: Vec<u64>,
    explored: u64,
}

impl<'a> Explorer<'a> {
    fn stack_path(&self, last: u64) -> Path {
        let mut p = Path::default();
        for (k, f) in self.frames.iter().enumerate() {
            p.states.push(f.state);
            if k + 1 < self.frames.len() {
                p.masks.push(self.succ[f.cursor - 1].1);
            }
        }
        if let Some(f) = self.frames.last() {
            p.masks.push(self.succ[f.cursor - 1].1);
        }
        p.states.push(last);
        p
    }

    /// First visit of `s`. Returns a finding that ends the search.
    fn discover(&mut self, s: u64) -> SimResult<Option<Found>> {
        self.explored += 1;
        self.space.chairs(s, &mut self.chairs);
        if let Some(bound) = self.opts.chair_bound {
            if self.chairs.iter().any(|&c| c > bound) {
                return Ok(Some(Found::ChairBound(self.stack_path(s))));
            }
        }
        if is_safe(&self.chairs) {
            self.info[s as usize] = DONE;
            return Ok(None);
        }
        self.info[s as usize] = ON_STACK;
        self.masks.clear();
        let masks = &mut self.masks;
        for_each_mask(&self.chairs, self.opts.kind, |m| masks.push(m))?;
        let start = self.succ.len();
        for k in 0..self.masks.len() {
            let mask = self.masks[k];
            match self.space.step(s, mask) {
                Some(nx) => self.succ.push((nx, mask)),
                None => {
                    self.succ.truncate(start);
                    let mut p = if self.frames.is_empty() {
                        Path::default()
                    } else {
                        self.stack_path(s)
                    };
                    if p.states.is_empty() {
                        p.states.push(s);
                    }
                    p.masks.push(mask);
                    return Ok(Some(Found::EndOfWord(p)));
                }
            }
        }
        self.frames.push(Frame {
            state: s,
            start,
            cursor: start,
        });
        Ok(None)
    }

    fn finish(&mut self) {
        let f = self.frames.pop().unwrap();
        let mut best = 0u32;
        for &(nx, _) in &self.succ[f.start..] {
            best = best.max(self.info[nx as usize] - DONE + 1);
        }
        self.info[f.state as usize] = best + DONE;
        for (i, arr) in self.per_player.iter_mut().enumerate() {
            let mut b = 0u32;
            for &(nx, mask) in &self.succ[f.start..] {
                b = b.max(arr[nx as usize] + (mask >> i & 1) as u32);
            }
            arr[f.state as usize] = b;
        }
        self.succ.truncate(f.start);
    }

    fn run_from(&mut self, root: u64) -> SimResult<Option<Found>> {
        if self.info[root as usize] != UNSEEN {
            return Ok(None);
        }
        if let Some(f) = self.discover(root)? {
            return Ok(Some(f));
        }
        while let Some(top) = self.frames.last_mut() {
            if top.cursor < self.succ.len() {
                let (nx, _) = self.succ[top.cursor];
                top.cursor += 1;
                match self.info[nx as usize] {
                    UNSEEN => {
                        if let Some(f) = self.discover(nx)? {
                            return Ok(Some(f));
                        }
                    }
                    ON_STACK => {
                        return Ok(Some(Found::Cycle(shortest_cycle(
                            self.space,
                            self.opts.kind,
                            nx,
                        )?)));
                    }
                    _ => {}
                }
            } else {
                self.finish();
            }
        }
        Ok(None)
    }

    fn longest_from(&self, s: u64) -> u32 {
        self.info[s as usize] - DONE
    }

    fn longest_path(&mut self, from: u64) -> SimResult<Path> {
        let mut p = Path {
            states: vec![from],
            masks: vec![],
        };
        let mut cur = from;
        while self.longest_from(cur) > 0 {
            let want = self.longest_from(cur) - 1;
            self.space.chairs(cur, &mut self.chairs);
            self.masks.clear();
            let masks = &mut self.masks;
            for_each_mask(&self.chairs, self.opts.kind, |m| masks.push(m))?;
            let (nx, mask) = self
                .masks
                .iter()
                .filter_map(|&m| self.space.step(cur, m).map(|nx| (nx, m)))
                .find(|&(nx, _)| self.info[nx as usize] >= DONE && self.longest_from(nx) == want)
                .expect("longest-path successor exists");
            p.masks.push(mask);
            p.states.push(nx);
            cur = nx;
        }
        Ok(p)
    }
}

/// Shortest closed walk through `target`, found by BFS.
fn shortest_cycle(space: &Space, kind: SchedulerKind, target: u64) -> SimResult<Path> {
    let mut parent: HashMap<u64, (u64, u64)> = HashMap::new();
    let mut queue = VecDeque::from([target]);
    let mut chairs = vec![0; space.players()];
    while let Some(u) = queue.pop_front() {
        space.chairs(u, &mut chairs);
        let mut masks = Vec::new();
        for_each_mask(&chairs, kind, |m| masks.push(m))?;
        for m in masks {
            let Some(v) = space.step(u, m) else { continue };
            if v == target {
                let mut states = vec![target];
                let mut ms = vec![m];
                let mut cur = u;
                while cur != target {
                    let (prev, pm) = parent[&cur];
                    states.push(cur);
                    ms.push(pm);
                    cur = prev;
                }
                states.push(target);
                states.reverse();
                ms.reverse();
                return Ok(Path { states, masks: ms });
            }
            if let std::collections::hash_map::Entry::Vacant(e) = parent.entry(v) {
                e.insert((u, m));
                queue.push_back(v);
            }
        }
    }
    unreachable!("target lies on a cycle")
}

pub(crate) fn explore(space: &Space, opts: &Options) -> Result<Exploration, VerifyError> {
    let total = space.total() as usize;
    let n = space.players();
    let mut ex = Explorer {
        space,
        opts,
        info: vec![UNSEEN; total],
        per_player: if opts.track_players {
            (0..n).map(|_| vec![0u32; total]).collect()
        } else {
            Vec::new()
        },
        frames: Vec::new(),
        succ: Vec::new(),
        chairs: vec![0; n],
        masks: Vec::new(),
        explored: 0,
    };
    let found = match opts.roots {
        Roots::All => {
            let mut hit = None;
            for root in 0..space.total() {
                if let Some(f) = ex.run_from(root)? {
                    hit = Some(f);
                    break;
                }
            }
            hit
        }
        Roots::Start(s) => ex.run_from(s)?,
    };
    let found = match found {
        Some(f) => f,
        None => {
            let (best_root, longest) = match opts.roots {
                Roots::All => {
                    let mut best = (0u64, 0u32);
                    for (s, &v) in ex.info.iter().enumerate() {
                        if v - DONE > best.1 {
                            best = (s as u64, v - DONE);
                        }
                    }
                    best
                }
                Roots::Start(s) => (s, ex.longest_from(s)),
            };
            let per_player = ex
                .per_player
                .iter()
                .map(|arr| match opts.roots {
                    Roots::All => arr.iter().copied().max().unwrap_or(0) as u64,
                    Roots::Start(s) => arr[s as usize] as u64,
                })
                .collect();
            let path = if opts.longest_path {
                Some(ex.longest_path(best_root)?)
            } else {
                None
            };
            Found::Acyclic {
                longest: longest as u64,
                per_player,
                path,
            }
        }
    };
    Ok(Exploration {
        found,
        states_explored: ex.explored,
    })
}
