use std::time::{Duration, Instant};

use crate::error::{Error, Result};

/// Resource limits for the expensive enumerations.
///
/// `max_items` bounds the number of simplexes or cells a single enumeration
/// may materialize; `deadline` is a wall-clock cutoff.
#[derive(Debug, Clone, Copy, Default)]
pub struct Budget {
    pub max_items: Option<usize>,
    pub deadline: Option<Instant>,
}

impl Budget {
    pub const UNLIMITED: Budget = Budget { max_items: None, deadline: None };

    pub fn new(max_items: Option<usize>, time_limit: Option<Duration>) -> Self {
        Budget { max_items, deadline: time_limit.map(|d| Instant::now() + d) }
    }

    /// Fails if `count` items exceed the item budget or the deadline passed.
    pub fn check(&self, count: usize, what: &str) -> Result<()> {
        if let Some(max) = self.max_items {
            if count > max {
                return Err(Error::Budget(format!("{what}: {count} items exceed the limit of {max}")));
            }
        }
        self.check_time(what)
    }

    /// Item check on every call, clock check every 256 items; for tight loops.
    pub fn tick(&self, count: usize, what: &str) -> Result<()> {
        if let Some(max) = self.max_items {
            if count > max {
                return Err(Error::Budget(format!("{what}: {count} items exceed the limit of {max}")));
            }
        }
        if count.is_multiple_of(256) {
            self.check_time(what)?;
        }
        Ok(())
    }

    pub fn check_time(&self, what: &str) -> Result<()> {
        match self.deadline {
            Some(d) if Instant::now() > d => Err(Error::Budget(format!("{what}: time limit reached"))),
            _ => Ok(()),
        }
    }
}
