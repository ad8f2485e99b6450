//! Twin and quadruplet censuses with reciprocal sums, and Cunningham chain
//! searches.

use std::path::PathBuf;
use std::time::Duration;

use crate::apsieve::BoundRule;
use crate::arith::WideInt;
use crate::checkpoint::Checkpoint;
use crate::error::{Error, Result};
use crate::pattern::{ChainKind, Pattern};
use crate::primality::PrimeTester;
use crate::search::{chain_starts, smallest_chain, RunControl, Search, SearchConfig, DEFAULT_CHECKPOINT_INTERVAL};

pub use crate::kahan::{KahanBuckets, KahanSum, BUCKETS};

/// Count and reciprocal sum of the tuples below `x`.
#[derive(Clone, Debug, PartialEq)]
pub struct TupleCensus {
    pub x: WideInt,
    pub count: u128,
    /// Sum of `1/f_i` over every member of every tuple.
    pub recip_sum: f64,
    /// False when the run was halted before finishing.
    pub complete: bool,
}

/// Run settings shared by the census commands.
#[derive(Clone, Debug)]
pub struct CensusOptions {
    pub workers: usize,
    /// Overrides the default sieve bound.
    pub bound: Option<BoundRule>,
    pub wheel_limit: Option<WideInt>,
    pub checkpoint: Option<PathBuf>,
    pub checkpoint_interval: Duration,
    /// Resume from the checkpoint file if it exists.
    pub resume: bool,
    pub halt_after: Option<u128>,
    pub tester: PrimeTester,
}

impl Default for CensusOptions {
    fn default() -> Self {
        CensusOptions {
            workers: 1,
            bound: None,
            wheel_limit: None,
            checkpoint: None,
            checkpoint_interval: DEFAULT_CHECKPOINT_INTERVAL,
            resume: true,
            halt_after: None,
            tester: PrimeTester::default(),
        }
    }
}

fn census(pattern: Pattern, x: WideInt, n: WideInt, opts: &CensusOptions) -> Result<TupleCensus> {
    let mut cfg = SearchConfig::new(pattern, n)
        .workers(opts.workers)
        .collect_hits(false)
        .reciprocal_sums(true)
        .tester(opts.tester.clone());
    if let Some(b) = opts.bound {
        cfg = cfg.bound(b);
    }
    cfg.wheel_limit = opts.wheel_limit;
    cfg.checkpoint_interval = opts.checkpoint_interval;
    let search = Search::new(cfg)?;
    let resume = match &opts.checkpoint {
        Some(p) if opts.resume && p.exists() => Some(Checkpoint::load(p)?),
        _ => None,
    };
    let report = search.run(
        resume,
        &RunControl {
            checkpoint: opts.checkpoint.clone(),
            halt_after: opts.halt_after,
            on_hit: None,
        },
    )?;
    Ok(TupleCensus {
        x,
        count: report.count,
        recip_sum: report.sum.unwrap_or(0.0),
        complete: report.complete,
    })
}

/// Twin pairs `(p, p + 2)` with `p < x`.
pub fn twins(x: WideInt, opts: &CensusOptions) -> Result<TupleCensus> {
    if x.get() < 5 {
        return Err(Error::Domain("twin census needs X >= 5"));
    }
    census(Pattern::twin(), x, x.checked_add(WideInt::ONE)?, opts)
}

/// Quadruplets `(p, p + 2, p + 6, p + 8)` whose largest member is below `x`.
pub fn quads(x: WideInt, opts: &CensusOptions) -> Result<TupleCensus> {
    if x.get() < 10 {
        return Err(Error::Domain("quadruplet census needs X >= 10"));
    }
    census(Pattern::quadruplet(), x, x.checked_sub(WideInt::ONE)?, opts)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainReport {
    pub kind: ChainKind,
    pub length: usize,
    /// Chain starts up to the cap, increasing; the first is the smallest.
    pub starts: Vec<i128>,
}

impl ChainReport {
    pub fn smallest(&self) -> Option<i128> {
        self.starts.first().copied()
    }
}

/// Every chain start up to `cap`.
pub fn chain_search(kind: ChainKind, length: usize, cap: WideInt, workers: usize) -> Result<ChainReport> {
    Ok(ChainReport {
        kind,
        length,
        starts: chain_starts(kind, length, cap, workers)?,
    })
}

/// Least chain start up to `cap`, or `None`.
pub fn first_chain(kind: ChainKind, length: usize, cap: WideInt) -> Result<Option<i128>> {
    smallest_chain(kind, length, cap)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(v: u128) -> WideInt {
        WideInt::new(v).unwrap()
    }

    #[test]
    fn small_quadruplet_counts() {
        let o = CensusOptions::default();
        assert_eq!(quads(w(10), &o).unwrap().count, 0);
        assert_eq!(quads(w(14), &o).unwrap().count, 1);
        assert_eq!(quads(w(13), &o).unwrap().count, 0);
        // 5, 11, 101, 191, 821, 1481, 1871, 2081, 3251, 3461
        assert_eq!(quads(w(5050), &o).unwrap().count, 10);
    }

    #[test]
    fn twin_membership_uses_smaller_prime() {
        let o = CensusOptions::default();
        // (3,5) and (5,7) have p < 6; (11,13) needs X > 11.
        assert_eq!(twins(w(6), &o).unwrap().count, 2);
        assert_eq!(twins(w(11), &o).unwrap().count, 2);
        assert_eq!(twins(w(12), &o).unwrap().count, 3);
        let t = twins(w(100), &o).unwrap();
        let expect: f64 = [3u32, 5, 11, 17, 29, 41, 59, 71]
            .iter()
            .map(|&p| 1.0 / p as f64 + 1.0 / (p + 2) as f64)
            .sum();
        assert_eq!(t.count, 8);
        assert!((t.recip_sum - expect).abs() < 1e-15);
    }

    #[test]
    fn chain_report() {
        let r = chain_search(ChainKind::First, 6, w(100_000), 2).unwrap();
        assert_eq!(r.smallest(), Some(89));
        assert!(r.starts.windows(2).all(|p| p[0] < p[1]));
        assert_eq!(first_chain(ChainKind::First, 1, w(10)).unwrap(), Some(2));
    }
}
