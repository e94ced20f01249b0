use serde::{Deserialize, Serialize};

use super::engine::{explore, Found, Options, Roots, Space};
use super::{check_subset, VerifyResult};
use crate::sim::SchedulerKind;
use crate::word::{Mode, WordSystem};

/// State cap of the equivalence probe.
pub const DEFAULT_PROBE_CAP: u64 = 100_000;

/// Cycle existence under each relation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub immediate: bool,
    pub pairwise: bool,
    pub canonical: bool,
    pub states: u64,
}

impl ProbeReport {
    pub fn agree(&self) -> bool {
        self.immediate == self.pairwise && self.pairwise == self.canonical
    }
}

/// Search the configuration digraph of `subset` three times, once per
/// scheduler relation, and report which of them admit a cycle.
pub fn equivalence_probe(
    system: &WordSystem,
    subset: &[usize],
    cap: u64,
) -> VerifyResult<ProbeReport> {
    check_subset(system, subset)?;
    let space = Space::new(system, subset, Mode::Cyclic, cap)?;
    let cyclic = |kind| -> VerifyResult<bool> {
        let opts = Options {
            kind,
            roots: Roots::All,
            track_players: false,
            chair_bound: None,
            longest_path: false,
        };
        Ok(matches!(explore(&space, &opts)?.found, Found::Cycle(_)))
    };
    Ok(ProbeReport {
        immediate: cyclic(SchedulerKind::Immediate)?,
        pairwise: cyclic(SchedulerKind::Pairwise)?,
        canonical: cyclic(SchedulerKind::Canonical)?,
        states: space.total(),
    })
}
