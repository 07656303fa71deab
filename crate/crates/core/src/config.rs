use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_LIMIT: usize = 4096;

/// Resource limits for every enumeration in the crate.
///
/// `max_size` bounds enumerated carriers and generated sets, `max_power`
/// bounds the number of tuples of a materialized power `A^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    pub max_size: usize,
    pub max_power: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_size: DEFAULT_LIMIT,
            max_power: DEFAULT_LIMIT,
        }
    }
}

impl Limits {
    pub fn new(max_size: usize, max_power: usize) -> Result<Self> {
        if max_size == 0 || max_power == 0 {
            return Err(Error::Precondition("limits must be positive".into()));
        }
        Ok(Limits {
            max_size,
            max_power,
        })
    }

    pub fn check_size(&self, what: &str, required: usize) -> Result<()> {
        if required > self.max_size {
            Err(Error::limit(what, required, self.max_size))
        } else {
            Ok(())
        }
    }

    /// Returns `base^n` if it fits the power limit.
    pub fn power_size(&self, base: usize, n: usize) -> Result<usize> {
        let mut acc: usize = 1;
        for _ in 0..n {
            acc = match acc.checked_mul(base) {
                Some(v) if v <= self.max_power => v,
                _ => {
                    return Err(Error::limit(
                        format!("power {base}^{n}"),
                        format!("{base}^{n}"),
                        self.max_power,
                    ))
                }
            };
        }
        if acc > self.max_power {
            return Err(Error::limit(
                format!("power {base}^{n}"),
                acc,
                self.max_power,
            ));
        }
        Ok(acc)
    }
}

/// Configuration of one CLI / suite run. Recorded in every report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub limits: Limits,
    pub seed: u64,
    pub report_version: u32,
}

pub const REPORT_VERSION: u32 = 1;

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            limits: Limits::default(),
            seed: 0,
            report_version: REPORT_VERSION,
        }
    }
}
