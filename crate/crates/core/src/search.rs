//! Limits for configuration-graph searches.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Any search that hits one of these limits reports `Unknown` instead of
/// `Reject`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    /// Distinct configurations visited.
    pub max_configs: usize,
    /// Query blocks in one protocol.
    pub max_blocks: usize,
    /// Symbols on the query tape or in a pending write word.
    pub max_tape: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            max_configs: 200_000,
            max_blocks: 64,
            max_tape: 32,
        }
    }
}

impl Bounds {
    pub fn validate(&self) -> Result<()> {
        if self.max_configs == 0 {
            return Err(Error::Bounds("max-configs must be positive".into()));
        }
        Ok(())
    }
}

impl fmt::Display for Bounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "max-configs={},max-blocks={},max-tape={}",
            self.max_configs, self.max_blocks, self.max_tape
        )
    }
}

/// Parses `max-configs=N,max-blocks=N,max-tape=N`; omitted keys keep their
/// defaults.
impl FromStr for Bounds {
    type Err = Error;

    fn from_str(s: &str) -> Result<Bounds> {
        let mut b = Bounds::default();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::Bounds(format!("expected key=value, got `{part}`")))?;
            let v: usize = v
                .parse()
                .map_err(|_| Error::Bounds(format!("`{v}` is not a count")))?;
            match k {
                "max-configs" => b.max_configs = v,
                "max-blocks" => b.max_blocks = v,
                "max-tape" => b.max_tape = v,
                _ => return Err(Error::Bounds(format!("unknown bound `{k}`"))),
            }
        }
        b.validate()?;
        Ok(b)
    }
}
