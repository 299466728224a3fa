use std::fmt;

use crate::{MelonError, Result};

/// Number of walkers `p` and half-length `n` (each path has `2n` steps).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MelonConfig {
    p: usize,
    n: usize,
}

impl MelonConfig {
    pub fn new(p: usize, n: usize) -> Result<Self> {
        if p == 0 {
            return Err(MelonError::InvalidConfig("p must be at least 1".into()));
        }
        Ok(MelonConfig { p, n })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Starting ordinate of the top path, which is also the least possible height.
    pub fn min_height(&self) -> i64 {
        2 * self.p as i64 - 2
    }

    pub fn max_height(&self) -> i64 {
        self.n as i64 + self.min_height()
    }

    pub fn min_depth(&self) -> i64 {
        -(self.n as i64)
    }
}

impl fmt::Display for MelonConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p={}, n={}", self.p, self.n)
    }
}

/// Strip constraint: height `< h` and depth `> -k`.
///
/// `k = n + 1` imposes no restriction on the depth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StripBound {
    pub h: i64,
    pub k: i64,
}

impl StripBound {
    pub fn new(h: i64, k: i64) -> Self {
        StripBound { h, k }
    }

    /// Height bound only.
    pub fn height(cfg: &MelonConfig, h: i64) -> Self {
        StripBound {
            h,
            k: cfg.n() as i64 + 1,
        }
    }

    pub fn width(&self) -> i64 {
        self.h + self.k
    }
}
