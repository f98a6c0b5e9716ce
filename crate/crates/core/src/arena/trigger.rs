use std::collections::BTreeSet;

use crate::config::TriggerRule;
use crate::world::Audience;

/// Indices of triggers whose watched cells held at least `min_occupancy`
/// people on each of the last `dwell_ticks` entries of `history`
/// (oldest first). A zero threshold is always armed.
pub fn evaluate_triggers(rules: &[TriggerRule], history: &[Audience]) -> BTreeSet<usize> {
    rules
        .iter()
        .enumerate()
        .filter(|(_, rule)| {
            if rule.min_occupancy == 0 {
                return true;
            }
            let dwell = rule.dwell_ticks as usize;
            history.len() >= dwell
                && history[history.len() - dwell..]
                    .iter()
                    .all(|occ| occ.total(&rule.watched_grids) >= rule.min_occupancy as u64)
        })
        .map(|(i, _)| i)
        .collect()
}
