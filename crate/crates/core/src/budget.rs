//! Cooperative step/wall-clock budgets for enumeration loops.
//!
//! Long-running searches take a `&Budget` and call [`Budget::tick`] at loop
//! granularity.  Exhaustion is an error value, never a panic, so callers can
//! distinguish "no" from "ran out of budget".

use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Instant;

/// Raised when a search exceeds its step allowance or deadline.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("budget exhausted: {context}")]
pub struct BudgetExhausted {
    /// What the search was doing and, where known, what it would have needed.
    pub context: String,
}

/// A shared cancellation token: an optional step allowance plus an optional
/// wall-clock deadline.  Cloning is not supported; pass by reference.
#[derive(Debug)]
pub struct Budget {
    max_steps: Option<u64>,
    deadline: Option<Instant>,
    used: AtomicU64,
}

impl Budget {
    /// A budget that never exhausts.
    pub fn unlimited() -> Budget {
        Budget {
            max_steps: None,
            deadline: None,
            used: AtomicU64::new(0),
        }
    }

    /// A budget of at most `max_steps` ticks.
    pub fn with_max_steps(max_steps: u64) -> Budget {
        Budget {
            max_steps: Some(max_steps),
            deadline: None,
            used: AtomicU64::new(0),
        }
    }

    /// Adds a wall-clock deadline, keeping any step allowance.
    pub fn with_deadline(mut self, deadline: Instant) -> Budget {
        self.deadline = Some(deadline);
        self
    }

    /// Steps consumed so far.
    pub fn used(&self) -> u64 {
        self.used.load(Ordering::Relaxed)
    }

    /// Steps still available, if a step allowance is set.
    pub fn remaining(&self) -> Option<u64> {
        self.max_steps.map(|m| m.saturating_sub(self.used()))
    }

    /// Charges `n` steps; errors once the allowance or deadline is exceeded.
    pub fn tick(&self, n: u64, context: &str) -> Result<(), BudgetExhausted> {
        let total = self.used.fetch_add(n, Ordering::Relaxed) + n;
        if let Some(max) = self.max_steps {
            if total > max {
                return Err(BudgetExhausted {
                    context: format!("{context} (step allowance {max})"),
                });
            }
        }
        if let Some(deadline) = self.deadline {
            // Deadline checks are comparatively expensive; poll sparsely.
            if total % 1024 < n && Instant::now() > deadline {
                return Err(BudgetExhausted {
                    context: format!("{context} (deadline passed)"),
                });
            }
        }
        Ok(())
    }
}

impl Default for Budget {
    fn default() -> Budget {
        Budget::unlimited()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_allowance_exhausts() {
        let b = Budget::with_max_steps(10);
        assert!(b.tick(10, "t").is_ok());
        assert!(b.tick(1, "t").is_err());
    }

    #[test]
    fn unlimited_never_exhausts() {
        let b = Budget::unlimited();
        for _ in 0..1000 {
            assert!(b.tick(1_000_000, "t").is_ok());
        }
    }
}
