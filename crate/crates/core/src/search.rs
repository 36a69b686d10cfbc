//! Shared plumbing for the exact searches: time budgets, cooperative
//! cancellation, and run outcomes.

use std::fmt;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use crate::decomp::Decomposition;

/// Expansions between two clock/stop-flag polls.
pub const CHECK_INTERVAL: u64 = 1024;

/// Raised inside a search when its budget is exhausted or it was cancelled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Interrupted;

/// Wall-clock budget plus an optional shared stop flag.
#[derive(Debug, Clone)]
pub struct Budget {
    start: Instant,
    deadline: Option<Instant>,
    stop: Option<Arc<AtomicBool>>,
    expansions: u64,
}

impl Budget {
    pub fn new(timeout: Option<Duration>) -> Budget {
        let start = Instant::now();
        Budget {
            start,
            deadline: timeout.map(|t| start + t),
            stop: None,
            expansions: 0,
        }
    }

    pub fn unlimited() -> Budget {
        Budget::new(None)
    }

    pub fn with_stop(mut self, stop: Arc<AtomicBool>) -> Budget {
        self.stop = Some(stop);
        self
    }

    /// Counts one expansion; polls the clock and stop flag every
    /// [`CHECK_INTERVAL`] expansions.
    #[inline]
    pub fn tick(&mut self) -> Result<(), Interrupted> {
        self.expansions += 1;
        if self.expansions % CHECK_INTERVAL == 0 {
            self.poll()
        } else {
            Ok(())
        }
    }

    pub fn poll(&self) -> Result<(), Interrupted> {
        if self.stop.as_ref().is_some_and(|s| s.load(Ordering::Relaxed)) {
            return Err(Interrupted);
        }
        if self.deadline.is_some_and(|d| Instant::now() >= d) {
            return Err(Interrupted);
        }
        Ok(())
    }

    pub fn expansions(&self) -> u64 {
        self.expansions
    }

    pub fn elapsed(&self) -> Duration {
        self.start.elapsed()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Status {
    Yes(Decomposition),
    No,
    Timeout,
    /// A "no" from a method that is not exact under its current settings.
    Unknown,
}

impl Status {
    pub fn label(&self) -> &'static str {
        match self {
            Status::Yes(_) => "YES",
            Status::No => "NO",
            Status::Timeout => "TIMEOUT",
            Status::Unknown => "UNKNOWN",
        }
    }

    pub fn is_yes(&self) -> bool {
        matches!(self, Status::Yes(_))
    }

    pub fn is_definite(&self) -> bool {
        matches!(self, Status::Yes(_) | Status::No)
    }

    pub fn witness(&self) -> Option<&Decomposition> {
        match self {
            Status::Yes(d) => Some(d),
            _ => None,
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub status: Status,
    pub elapsed: Duration,
    pub nodes_expanded: u64,
}

impl RunOutcome {
    pub(crate) fn finish(status: Status, budget: &Budget) -> RunOutcome {
        RunOutcome {
            status,
            elapsed: budget.elapsed(),
            nodes_expanded: budget.expansions(),
        }
    }

    /// Process exit code for the command-line tools: 0 yes, 1 no, 2 timeout,
    /// 3 unknown.
    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Yes(_) => 0,
            Status::No => 1,
            Status::Timeout => 2,
            Status::Unknown => 3,
        }
    }
}

/// Iterates all subsets of `items` of size 1..=k, smallest size first, each
/// size in lexicographic order of positions. The callback returns `false` to
/// stop early.
pub(crate) fn for_each_combination<F>(n: usize, k: usize, mut f: F) -> Result<bool, Interrupted>
where
    F: FnMut(&[usize]) -> Result<bool, Interrupted>,
{
    for size in 1..=k.min(n) {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            if !f(&idx)? {
                return Ok(false);
            }
            // advance the rightmost position that still has room
            let mut i = size;
            while i > 0 && idx[i - 1] == n - size + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            idx[i - 1] += 1;
            for j in i..size {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combinations_in_order() {
        let mut seen = Vec::new();
        for_each_combination(4, 2, |c| {
            seen.push(c.to_vec());
            Ok(true)
        })
        .unwrap();
        assert_eq!(
            seen,
            vec![
                vec![0],
                vec![1],
                vec![2],
                vec![3],
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
        let mut count = 0;
        for_each_combination(6, 3, |_| {
            count += 1;
            Ok(true)
        })
        .unwrap();
        assert_eq!(count, 6 + 15 + 20);
    }

    #[test]
    fn budget_zero_interrupts() {
        let b = Budget::new(Some(Duration::ZERO));
        assert_eq!(b.poll(), Err(Interrupted));
        let stop = Arc::new(AtomicBool::new(true));
        assert_eq!(Budget::unlimited().with_stop(stop).poll(), Err(Interrupted));
        assert_eq!(Budget::unlimited().poll(), Ok(()));
    }
}
