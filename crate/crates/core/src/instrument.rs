//! Per-thread call counters for the expensive solver steps.
//!
//! Estimators run single-threaded per call, so a thread-local counter read
//! before and after a call attributes solves to that call exactly, even
//! when other threads solve concurrently.

use std::cell::Cell;

thread_local! {
    static LAP_SOLVES: Cell<u64> = const { Cell::new(0) };
    static LS_SOLVES: Cell<u64> = const { Cell::new(0) };
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolveCounts {
    pub lap: u64,
    pub least_squares: u64,
}

impl SolveCounts {
    /// Counts accumulated since `earlier` was taken.
    pub fn since(self, earlier: SolveCounts) -> SolveCounts {
        SolveCounts { lap: self.lap - earlier.lap, least_squares: self.least_squares - earlier.least_squares }
    }
}

/// Current counters of the calling thread.
pub fn snapshot() -> SolveCounts {
    SolveCounts { lap: LAP_SOLVES.with(Cell::get), least_squares: LS_SOLVES.with(Cell::get) }
}

pub(crate) fn count_lap_solve() {
    LAP_SOLVES.with(|c| c.set(c.get() + 1));
}

pub(crate) fn count_ls_solve() {
    LS_SOLVES.with(|c| c.set(c.get() + 1));
}
