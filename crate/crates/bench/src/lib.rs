//! Shared setup for the benchmarks: a warm in-memory cache.

use jacob_core::{CumulativeCache, EvalConfig};

/// A cache already extended to `t_max`.
pub fn warm_cache(t_max: f64) -> CumulativeCache {
    let cache = CumulativeCache::new(EvalConfig::default(), "bench");
    cache.ensure(t_max).expect("cache build");
    cache
}
