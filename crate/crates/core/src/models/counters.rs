//! A fixed number of counters, each incremented modulo a bound.

use crate::error::Result;
use crate::search::{Model, SearchContext};
use crate::state::{Slot, StateId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountersModel {
    pub counters: usize,
    pub modulus: Slot,
}

impl Default for CountersModel {
    fn default() -> Self {
        CountersModel {
            counters: 4,
            modulus: 10,
        }
    }
}

impl CountersModel {
    /// `modulus ^ counters`, saturating.
    pub fn state_count(&self) -> u64 {
        (0..self.counters).fold(1u64, |acc, _| acc.saturating_mul(self.modulus as u64))
    }
}

impl Model for CountersModel {
    fn initial_state(&self, ctx: &SearchContext<'_>) -> Result<()> {
        ctx.insert(&vec![0; self.counters], true).map(drop)
    }

    fn next_states(&self, ctx: &SearchContext<'_>, s: StateId) -> Result<()> {
        for i in 0..self.counters {
            let v = ctx.get_partial(s, i, 1, true)?[0];
            ctx.delta(s, i, &[(v + 1) % self.modulus], true)?;
        }
        Ok(())
    }
}
