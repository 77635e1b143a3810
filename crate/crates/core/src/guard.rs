//! Bound on the size of brute-force enumerations.

use thiserror::Error;

/// Environment variable that overrides [`SizeGuard::DEFAULT_LIMIT`].
pub const SIZE_GUARD_ENV: &str = "MONOIDK_SIZE_GUARD";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("refusing to enumerate {requested} elements of {what} (limit {limit}; raise {SIZE_GUARD_ENV})")]
pub struct SizeGuardError {
    pub what: String,
    pub requested: u128,
    pub limit: u128,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SizeGuard {
    limit: u128,
}

impl Default for SizeGuard {
    fn default() -> Self {
        SizeGuard { limit: Self::DEFAULT_LIMIT }
    }
}

impl SizeGuard {
    pub const DEFAULT_LIMIT: u128 = 1_000_000;

    pub fn new(limit: u128) -> Self {
        SizeGuard { limit }
    }

    /// Reads the limit from the environment, falling back to the default.
    /// An unparsable value is reported rather than ignored.
    pub fn from_env() -> Result<Self, String> {
        match std::env::var(SIZE_GUARD_ENV) {
            Ok(v) => v
                .trim()
                .parse::<u128>()
                .map(Self::new)
                .map_err(|e| format!("{SIZE_GUARD_ENV}={v:?}: {e}")),
            Err(_) => Ok(Self::default()),
        }
    }

    pub fn limit(&self) -> u128 {
        self.limit
    }

    pub fn check(&self, what: &str, requested: u128) -> Result<(), SizeGuardError> {
        if requested > self.limit {
            Err(SizeGuardError { what: what.to_string(), requested, limit: self.limit })
        } else {
            Ok(())
        }
    }
}
