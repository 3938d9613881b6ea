//! Trace-driven set-associative LRU cache model.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("cache spec `{0}` must look like size,assoc,line")]
    Syntax(String),
    #[error("{field} = {value} is not a power of two")]
    NotPowerOfTwo { field: &'static str, value: u64 },
    #[error("size {size} is not divisible by assoc {assoc} × line {line}")]
    Indivisible { size: u64, assoc: u64, line: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheConfig {
    pub size: u64,
    pub assoc: u64,
    pub line: u64,
}

impl CacheConfig {
    pub fn new(size: u64, assoc: u64, line: u64) -> Result<Self, ConfigError> {
        for (field, value) in [("size", size), ("assoc", assoc), ("line", line)] {
            if !value.is_power_of_two() {
                return Err(ConfigError::NotPowerOfTwo { field, value });
            }
        }
        if !size.is_multiple_of(assoc * line) {
            return Err(ConfigError::Indivisible { size, assoc, line });
        }
        Ok(CacheConfig { size, assoc, line })
    }

    /// 8 KB, 2-way, 32-byte lines.
    pub fn l1_default() -> Self {
        CacheConfig {
            size: 8192,
            assoc: 2,
            line: 32,
        }
    }

    /// 64 KB, 4-way, 64-byte lines.
    pub fn l2_default() -> Self {
        CacheConfig {
            size: 65536,
            assoc: 4,
            line: 64,
        }
    }

    pub fn sets(&self) -> u64 {
        self.size / (self.assoc * self.line)
    }
}

impl FromStr for CacheConfig {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<u64> = s
            .split(',')
            .map(|p| p.trim().parse::<u64>())
            .collect::<Result<_, _>>()
            .map_err(|_| ConfigError::Syntax(s.to_string()))?;
        match parts[..] {
            [size, assoc, line] => CacheConfig::new(size, assoc, line),
            _ => Err(ConfigError::Syntax(s.to_string())),
        }
    }
}

impl fmt::Display for CacheConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.size, self.assoc, self.line)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheCounts {
    pub accesses: u64,
    pub hits: u64,
    pub misses: u64,
}

/// One cache level. Each set keeps its resident tags ordered from most to
/// least recently used.
#[derive(Debug, Clone)]
pub struct Cache {
    config: CacheConfig,
    sets: Vec<Vec<u64>>,
    counts: CacheCounts,
}

impl Cache {
    pub fn new(config: CacheConfig) -> Self {
        Cache {
            config,
            sets: vec![Vec::with_capacity(config.assoc as usize); config.sets() as usize],
            counts: CacheCounts::default(),
        }
    }

    /// Returns true on a hit.
    pub fn access(&mut self, addr: u64) -> bool {
        let block = addr / self.config.line;
        let set = &mut self.sets[(block % self.config.sets()) as usize];
        let tag = block / self.config.sets();
        self.counts.accesses += 1;
        if let Some(pos) = set.iter().position(|&t| t == tag) {
            let t = set.remove(pos);
            set.insert(0, t);
            self.counts.hits += 1;
            return true;
        }
        if set.len() == self.config.assoc as usize {
            set.pop();
        }
        set.insert(0, tag);
        self.counts.misses += 1;
        false
    }

    pub fn counts(&self) -> CacheCounts {
        self.counts
    }
}

/// Inclusive-lookup hierarchy: each level sees only the misses of the level above.
#[derive(Debug, Clone)]
pub struct Hierarchy {
    levels: Vec<Cache>,
}

impl Hierarchy {
    pub fn new(configs: &[CacheConfig]) -> Self {
        Hierarchy {
            levels: configs.iter().map(|&c| Cache::new(c)).collect(),
        }
    }

    pub fn access(&mut self, addr: u64) {
        for level in &mut self.levels {
            if level.access(addr) {
                break;
            }
        }
    }

    pub fn counts(&self) -> Vec<CacheCounts> {
        self.levels.iter().map(Cache::counts).collect()
    }
}
