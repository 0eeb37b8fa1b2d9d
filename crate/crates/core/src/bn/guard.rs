use crate::error::{Error, Result};

/// Environment variable that overrides the default guard.
pub const SIZE_GUARD_ENV: &str = "SEMRD_SIZE_GUARD";

/// Upper bound on the number of entries any brute-force table may hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SizeGuard(u64);

impl SizeGuard {
    pub const DEFAULT: SizeGuard = SizeGuard(1 << 24);
    pub const MAX: u64 = 1 << 28;

    pub fn new(limit: u64) -> Result<Self> {
        if limit == 0 || limit > Self::MAX {
            return Err(Error::InvalidArgument(format!(
                "size guard must be in [1, 2^28], got {limit}"
            )));
        }
        Ok(Self(limit))
    }

    /// Reads [`SIZE_GUARD_ENV`], falling back to the default when unset.
    pub fn from_env() -> Result<Self> {
        match std::env::var(SIZE_GUARD_ENV) {
            Ok(s) => {
                let limit = s
                    .trim()
                    .parse::<u64>()
                    .map_err(|_| Error::InvalidArgument(format!("{SIZE_GUARD_ENV}={s} is not an integer")))?;
                Self::new(limit)
            }
            Err(_) => Ok(Self::DEFAULT),
        }
    }

    pub fn limit(self) -> u64 {
        self.0
    }

    pub fn check(self, size: u128) -> Result<()> {
        if size > self.0 as u128 {
            Err(Error::SizeGuard { size, limit: self.0 })
        } else {
            Ok(())
        }
    }
}

impl Default for SizeGuard {
    fn default() -> Self {
        Self::DEFAULT
    }
}
