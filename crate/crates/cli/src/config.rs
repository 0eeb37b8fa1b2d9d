use std::fmt;

use semrd::bn::SizeGuard;
use semrd::par::Exec;
use semrd::rd::RdOptions;

use crate::args::{Cli, Command};

/// A bad flag value or argument combination; exits with status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// Validated settings for one invocation.
#[derive(Debug)]
pub struct RunConfig {
    pub command: Command,
    pub opts: RdOptions,
    pub guard: SizeGuard,
    pub exec: Exec,
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> anyhow::Result<Self> {
        let g = cli.global;
        if !(g.tol > 0.0 && g.tol.is_finite()) {
            return Err(usage(format!("--tol must be positive, got {}", g.tol)));
        }
        if !(g.target_tol > 0.0 && g.target_tol.is_finite()) {
            return Err(usage(format!("--target-tol must be positive, got {}", g.target_tol)));
        }
        if g.max_iters == 0 {
            return Err(usage("--max-iters must be positive"));
        }
        let guard = match g.size_guard {
            Some(limit) => SizeGuard::new(limit).map_err(|e| usage(e.to_string()))?,
            None => SizeGuard::from_env().map_err(|e| usage(e.to_string()))?,
        };
        let exec = if g.sequential { Exec::Sequential } else { Exec::Parallel };
        let opts = RdOptions {
            tol_nats: g.tol,
            max_iters: g.max_iters,
            target_tol: g.target_tol,
            exec,
            ..RdOptions::default()
        };
        Ok(Self {
            command: cli.command,
            opts,
            guard,
            exec,
        })
    }
}
