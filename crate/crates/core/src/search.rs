//! End-to-end pattern search: wheel residues, sieving, prime tests, and the
//! tuples that involve small primes.
//!
//! The hits are split into three disjoint parts:
//!
//! * boundary: some `f_i(x) <= cut`, where `cut = max(B, largest wheel prime)`;
//!   every such member is itself a prime `<= cut`, so candidates come from
//!   solving `f_i(x) = q` for each prime `q <= cut`;
//! * negative `x` with every member above `cut`, by direct scan;
//! * `x >= 0` with every member above `cut`, through the wheel and sieve.

use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::mpsc;
use std::time::{Duration, Instant};
use std::{fmt, thread};

use sha2::{Digest, Sha256};

use crate::apsieve::{primes_up_to, BoundRule, EarlyAbort, SegmentSieve, SievePlan};
use crate::arith::WideInt;
use crate::checkpoint::{Checkpoint, StripeState};
use crate::error::{Error, Result};
use crate::kahan::{KahanBuckets, KahanSum, BUCKETS};
use crate::pattern::{is_prime_small, ChainKind, Pattern};
use crate::primality::{strong_test, PrimeTester};
use crate::wheel::Wheel;

pub const DEFAULT_CHECKPOINT_INTERVAL: Duration = Duration::from_secs(900);

/// A starting point `x` with every `f_i(x)` prime.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Hit {
    pub x: i128,
    pub values: Vec<u128>,
}

impl fmt::Display for Hit {
    /// `x f_1 ... f_k`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.x)?;
        for v in &self.values {
            write!(f, " {v}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub pattern: Pattern,
    /// Upper bound on every member of a reported tuple.
    pub n: WideInt,
    pub bound: BoundRule,
    /// Largest allowed wheel modulus; `n / B` when unset.
    pub wheel_limit: Option<WideInt>,
    pub workers: usize,
    pub excluded_wheel_primes: Vec<u64>,
    pub early_abort: Option<EarlyAbort>,
    pub checkpoint_interval: Duration,
    /// Keep every hit for the report (off for counting runs).
    pub collect_hits: bool,
    /// Accumulate the sum of reciprocals of all tuple members.
    pub reciprocal_sums: bool,
    pub tester: PrimeTester,
}

impl SearchConfig {
    /// Defaults: `B = sqrt(n)` for `k <= 3`, `B = n^(1/3)` otherwise; one worker.
    pub fn new(pattern: Pattern, n: WideInt) -> Self {
        let bound = if pattern.k() <= 3 {
            BoundRule::Sqrt
        } else {
            BoundRule::SpaceExponent(3.0)
        };
        SearchConfig {
            pattern,
            n,
            bound,
            wheel_limit: None,
            workers: 1,
            excluded_wheel_primes: Vec::new(),
            early_abort: None,
            checkpoint_interval: DEFAULT_CHECKPOINT_INTERVAL,
            collect_hits: true,
            reciprocal_sums: false,
            tester: PrimeTester::default(),
        }
    }

    pub fn bound(mut self, rule: BoundRule) -> Self {
        self.bound = rule;
        self
    }

    pub fn wheel_limit(mut self, limit: WideInt) -> Self {
        self.wheel_limit = Some(limit);
        self
    }

    pub fn workers(mut self, nu: usize) -> Self {
        self.workers = nu;
        self
    }

    pub fn exclude_wheel_prime(mut self, p: u64) -> Self {
        self.excluded_wheel_primes.push(p);
        self
    }

    pub fn early_abort(mut self, ea: Option<EarlyAbort>) -> Self {
        self.early_abort = ea;
        self
    }

    pub fn reciprocal_sums(mut self, on: bool) -> Self {
        self.reciprocal_sums = on;
        self
    }

    pub fn collect_hits(mut self, on: bool) -> Self {
        self.collect_hits = on;
        self
    }

    pub fn tester(mut self, tester: PrimeTester) -> Self {
        self.tester = tester;
        self
    }
}

/// Per-run controls that do not affect the result.
#[derive(Default)]
pub struct RunControl<'a> {
    pub checkpoint: Option<PathBuf>,
    /// Stop after this many residues per stripe in this run, checkpoint and
    /// return an incomplete report.
    pub halt_after: Option<u128>,
    /// Called for each hit from the sieve path as it is found (worker
    /// threads, residue order); boundary hits are reported first.
    pub on_hit: Option<&'a (dyn Fn(&Hit) + Sync)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    /// Sorted by `x`; empty unless hits are collected.
    pub hits: Vec<Hit>,
    pub count: u128,
    pub sum: Option<f64>,
    pub complete: bool,
}

/// A configured search, ready to run or resume.
#[derive(Debug)]
pub struct Search {
    cfg: SearchConfig,
    plan: SievePlan,
    wheel: Wheel,
    sieve: SegmentSieve,
    cut: u64,
    digest: String,
}

impl Search {
    pub fn new(cfg: SearchConfig) -> Result<Self> {
        let pattern = &cfg.pattern;
        pattern.ensure_admissible()?;
        if cfg.workers == 0 {
            return Err(Error::Domain("worker count must be at least 1"));
        }
        let at_one = pattern
            .values(1)
            .and_then(|v| v.into_iter().max())
            .ok_or(Error::Overflow)?;
        if (cfg.n.get() as i128) < at_one {
            return Err(Error::Domain("n must be at least max f_i(1)"));
        }
        for &p in &cfg.excluded_wheel_primes {
            if !is_prime_small(p) {
                return Err(Error::Contract(format!("excluded wheel prime {p} is not prime")));
            }
        }
        let plan = SievePlan::new(cfg.n, cfg.bound, cfg.wheel_limit)?;
        let wheel = Wheel::build(
            pattern,
            WideInt::new(plan.wheel_limit)?,
            &cfg.excluded_wheel_primes,
        )?;
        let wheel_primes = wheel.primes();
        let sieve_primes = plan.sieve_primes(&wheel_primes);
        let sieve = SegmentSieve::new(
            pattern,
            &wheel_primes,
            wheel.modulus(),
            cfg.n,
            &sieve_primes,
            cfg.early_abort,
        )?;
        let cut = plan.bound.max(*wheel_primes.last().expect("wheel has a prime"));
        let digest = config_digest(&cfg, &plan, &wheel_primes);
        log::debug!(
            "search {}: n={} B={} W={} residues={} sieve primes={}",
            pattern,
            cfg.n,
            plan.bound,
            wheel.modulus(),
            wheel.residue_count(),
            sieve_primes.len()
        );
        Ok(Search {
            cfg,
            plan,
            wheel,
            sieve,
            cut,
            digest,
        })
    }

    pub fn config(&self) -> &SearchConfig {
        &self.cfg
    }

    pub fn plan(&self) -> &SievePlan {
        &self.plan
    }

    pub fn wheel(&self) -> &Wheel {
        &self.wheel
    }

    /// Members at or below this value are handled by the boundary scan.
    pub fn cut(&self) -> u64 {
        self.cut
    }

    /// Hex SHA-256 of everything that determines the output.
    pub fn digest(&self) -> &str {
        &self.digest
    }

    pub fn fresh_checkpoint(&self) -> Checkpoint {
        let cursor = self.wheel.cursor();
        Checkpoint {
            digest: self.digest.clone(),
            notes: vec![
                format!("pattern {}", self.cfg.pattern),
                format!("n {}", self.cfg.n),
            ],
            stripes: (0..self.cfg.workers as u64)
                .map(|i| StripeState::fresh(i, cursor.clone(), self.cfg.reciprocal_sums))
                .collect(),
        }
    }

    /// Runs to completion without checkpoints.
    pub fn run_to_end(&self) -> Result<Report> {
        self.run(None, &RunControl::default())
    }

    /// Runs from `resume` (or from the start) until done or halted.
    pub fn run(&self, resume: Option<Checkpoint>, ctl: &RunControl) -> Result<Report> {
        let mut ckpt = match resume {
            Some(c) => {
                self.validate(&c)?;
                c
            }
            None => self.fresh_checkpoint(),
        };
        let boundary = self.boundary_hits()?;
        if let Some(cb) = ctl.on_hit {
            boundary.iter().for_each(cb);
        }

        let interval = ctl.checkpoint.as_ref().map(|_| self.cfg.checkpoint_interval);
        let mut halted = false;
        while !halted && !ckpt.stripes.iter().all(StripeState::done) {
            halted = self.epoch(&mut ckpt.stripes, interval, ctl)?;
            if let Some(path) = &ctl.checkpoint {
                ckpt.save(path)?;
                log::info!(
                    "checkpoint written: {} of {} residues",
                    ckpt.stripes.iter().map(|s| s.processed).sum::<u128>(),
                    self.wheel.residue_count()
                );
            }
        }
        let complete = ckpt.stripes.iter().all(StripeState::done);
        Ok(self.report(boundary, &ckpt.stripes, complete))
    }

    fn validate(&self, c: &Checkpoint) -> Result<()> {
        if c.digest != self.digest {
            return Err(Error::CheckpointMismatch {
                expected: self.digest.clone(),
                found: c.digest.clone(),
            });
        }
        if c.stripes.len() != self.cfg.workers {
            return Err(Error::CheckpointCorrupt {
                line: 0,
                reason: "stripe count differs from worker count".into(),
            });
        }
        for st in &c.stripes {
            let mut w = self.wheel.clone();
            w.seek(&st.cursor).map_err(|e| Error::CheckpointCorrupt {
                line: 0,
                reason: format!("stripe {}: {e}", st.index),
            })?;
            if st.buckets.is_some() && !self.cfg.reciprocal_sums {
                return Err(Error::CheckpointCorrupt {
                    line: 0,
                    reason: "bucket records in a run without sums".into(),
                });
            }
        }
        Ok(())
    }

    /// One round of all unfinished workers; returns true when halted by `halt_after`.
    fn epoch(
        &self,
        stripes: &mut [StripeState],
        interval: Option<Duration>,
        ctl: &RunControl,
    ) -> Result<bool> {
        let stop = AtomicBool::new(false);
        let started = Instant::now();
        let (tx, rx) = mpsc::channel::<()>();
        let results: Vec<Result<bool>> = thread::scope(|s| {
            let mut handles = Vec::new();
            for st in stripes.iter_mut().filter(|s| !s.done()) {
                let tx = tx.clone();
                let stop = &stop;
                handles.push(s.spawn(move || {
                    let r = self.work(st, stop, ctl);
                    let _ = tx.send(());
                    r
                }));
            }
            drop(tx);
            let mut pending = handles.len();
            if let Some(interval) = interval {
                while pending > 0 {
                    let left = interval.saturating_sub(started.elapsed());
                    match rx.recv_timeout(left) {
                        Ok(()) => pending -= 1,
                        Err(mpsc::RecvTimeoutError::Timeout) => break,
                        Err(mpsc::RecvTimeoutError::Disconnected) => break,
                    }
                }
                stop.store(true, Ordering::Relaxed);
            }
            handles
                .into_iter()
                .map(|h| h.join().expect("search worker panicked"))
                .collect()
        });
        let mut halted = false;
        for r in results {
            halted |= r?;
        }
        Ok(halted)
    }

    /// Processes this worker's residues until its stripe ends, `stop` is set
    /// (after at least one residue) or the halt budget is used up.
    fn work(&self, st: &mut StripeState, stop: &AtomicBool, ctl: &RunControl) -> Result<bool> {
        let mut wheel = self.wheel.clone();
        wheel.seek(&st.cursor)?;
        let nu = self.cfg.workers as u128;
        let idx = st.index as u128;
        let mut here = 0u128;
        let mut halted = false;
        loop {
            if here > 0 && stop.load(Ordering::Relaxed) {
                break;
            }
            if ctl.halt_after.is_some_and(|h| here >= h) {
                halted = true;
                break;
            }
            let pos = wheel.position();
            let Some(r) = wheel.next_residue() else { break };
            if pos % nu != idx {
                continue;
            }
            let slot = (st.processed % BUCKETS as u128) as usize;
            self.residue_hits(r, |hit| {
                st.count += 1;
                if self.cfg.collect_hits {
                    st.hits.push(hit.x);
                }
                if let Some(b) = st.buckets.as_mut() {
                    for &v in &hit.values {
                        b.add(slot, 1.0 / v as f64);
                    }
                }
                if let Some(cb) = ctl.on_hit {
                    cb(&hit);
                }
            })?;
            st.processed += 1;
            here += 1;
            if st.processed.is_multiple_of(1024) {
                log::info!(
                    "stripe {}: residue {} of {}, {} hits",
                    st.index,
                    wheel.position(),
                    wheel.residue_count(),
                    st.count
                );
            }
        }
        let pos = wheel.position();
        if pos + (idx + nu - pos % nu) % nu >= wheel.residue_count() {
            // Nothing of this stripe remains; run the odometer out.
            while wheel.next_residue().is_some() {}
        }
        st.cursor = wheel.cursor();
        Ok(halted && !st.done())
    }

    /// Sieves residue `r` and reports every survivor whose tuple is prime.
    pub fn residue_hits(&self, r: u128, mut emit: impl FnMut(Hit)) -> Result<()> {
        let seg = self.sieve.sieve(r)?;
        let s = seg.trial_bound;
        for j in seg.bits.iter_ones() {
            let x = seg.x_at(j);
            if let Some(values) = self.test_tuple(x, s)? {
                emit(Hit { x, values });
            }
        }
        Ok(())
    }

    /// Prime test of a sieve survivor; members at or below `cut` belong to the
    /// boundary scan and are skipped here.
    fn test_tuple(&self, x: i128, trial_bound: u64) -> Result<Option<Vec<u128>>> {
        let values = self.cfg.pattern.values(x).ok_or(Error::Overflow)?;
        let mut out = Vec::with_capacity(values.len());
        let s = trial_bound as u128;
        let sieved = |v: u128| s.checked_mul(s).is_none_or(|sq| sq >= v);
        for &v in &values {
            if v <= self.cut as i128 {
                return Ok(None);
            }
            let v = v as u128;
            if v & 1 == 0 {
                return Ok(None);
            }
            if !sieved(v) && !strong_test(v, 2) {
                return Ok(None);
            }
            out.push(v);
        }
        for &v in &out {
            if !sieved(v) && !self.cfg.tester.confirm(WideInt::new(v)?, trial_bound)? {
                return Ok(None);
            }
        }
        Ok(Some(out))
    }

    /// Hits outside the sieve path: boundary tuples and negative `x`.
    pub fn boundary_hits(&self) -> Result<Vec<Hit>> {
        let pattern = &self.cfg.pattern;
        let n = self.cfg.n;
        let cut = WideInt::from_u64(self.cut);
        let mut hits = if self.cut <= self.plan.bound {
            boundary_from_primes(pattern, self.plan.primes(), cut, n, &self.cfg.tester)?
        } else {
            boundary_from_primes(pattern, &primes_up_to(self.cut), cut, n, &self.cfg.tester)?
        };
        hits.extend(negative_hits(pattern, cut, n, &self.cfg.tester)?);
        hits.sort();
        Ok(hits)
    }

    fn report(&self, boundary: Vec<Hit>, stripes: &[StripeState], complete: bool) -> Report {
        let mut count = boundary.len() as u128;
        let mut sum = self.cfg.reciprocal_sums.then(|| {
            let mut acc = KahanSum::new();
            for h in &boundary {
                for &v in &h.values {
                    acc.add(1.0 / v as f64);
                }
            }
            acc
        });
        let mut buckets = KahanBuckets::default();
        for st in stripes {
            count += st.count;
            if let Some(b) = &st.buckets {
                buckets.merge(b);
            }
        }
        if let Some(acc) = sum.as_mut() {
            acc.merge(&buckets.total());
        }
        let mut hits = Vec::new();
        if self.cfg.collect_hits {
            hits = boundary;
            for st in stripes {
                for &x in &st.hits {
                    let values = self
                        .cfg
                        .pattern
                        .values(x)
                        .expect("recorded hit evaluates")
                        .into_iter()
                        .map(|v| v as u128)
                        .collect();
                    hits.push(Hit { x, values });
                }
            }
            hits.sort();
            hits.dedup();
        }
        Report {
            hits,
            count,
            sum: sum.map(|s| s.value()),
            complete,
        }
    }
}

fn config_digest(cfg: &SearchConfig, plan: &SievePlan, wheel_primes: &[u64]) -> String {
    let mut h = Sha256::new();
    let mut line = |s: String| {
        h.update(s.as_bytes());
        h.update(b"\n");
    };
    line(format!("pattern {}", cfg.pattern));
    line(format!("n {}", cfg.n));
    line(format!("bound {}", plan.bound));
    line(format!("wheel {wheel_primes:?}"));
    line(format!("workers {}", cfg.workers));
    line(format!(
        "early-abort {:?}",
        cfg.early_abort.map(|e| (e.density, e.check_every))
    ));
    line(format!("hits {} sums {}", cfg.collect_hits, cfg.reciprocal_sums));
    hex::encode(h.finalize())
}

fn all_prime(values: &[i128], tester: &PrimeTester) -> Result<bool> {
    for &v in values {
        if v < 2 || !tester.is_prime(WideInt::try_from(v)?, 1)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn to_hit(x: i128, values: Vec<i128>) -> Hit {
    Hit {
        x,
        values: values.into_iter().map(|v| v as u128).collect(),
    }
}

/// Prime tuples with `max f_i(x) <= n` and some member `<= cut`, using the
/// given primes (which must include every prime `<= cut`).
fn boundary_from_primes(
    pattern: &Pattern,
    primes: &[u64],
    cut: WideInt,
    n: WideInt,
    tester: &PrimeTester,
) -> Result<Vec<Hit>> {
    let lo = pattern.first_x();
    let hi = pattern.last_x_below(n.get() as i128);
    let cut = cut.get() as i128;
    let mut xs = Vec::new();
    for &q in primes.iter().take_while(|&&q| q as i128 <= cut) {
        for f in pattern.forms() {
            let d = q as i128 - f.b;
            let a = f.a as i128;
            if d.rem_euclid(a) == 0 {
                let x = d.div_euclid(a);
                if (lo..=hi).contains(&x) {
                    xs.push(x);
                }
            }
        }
    }
    xs.sort_unstable();
    xs.dedup();
    let mut hits = Vec::new();
    for x in xs {
        let values = pattern.values(x).ok_or(Error::Overflow)?;
        if all_prime(&values, tester)? {
            hits.push(to_hit(x, values));
        }
    }
    Ok(hits)
}

/// Negative `x` whose members all exceed `cut`.
fn negative_hits(pattern: &Pattern, cut: WideInt, n: WideInt, tester: &PrimeTester) -> Result<Vec<Hit>> {
    let hi = pattern.last_x_below(n.get() as i128).min(-1);
    let cut = cut.get() as i128;
    let mut hits = Vec::new();
    for x in pattern.first_x()..=hi {
        let values = pattern.values(x).ok_or(Error::Overflow)?;
        if values.iter().all(|&v| v > cut) && all_prime(&values, tester)? {
            hits.push(to_hit(x, values));
        }
    }
    Ok(hits)
}

/// All prime tuples with `max f_i(x) <= n` and `min f_i(x) <= cut`.
pub fn boundary_tuples(pattern: &Pattern, cut: WideInt, n: WideInt) -> Result<Vec<Hit>> {
    if cut.get() < 2 {
        return Err(Error::Domain("boundary cut must be at least 2"));
    }
    let c = u64::try_from(cut.get()).map_err(|_| Error::Overflow)?;
    boundary_from_primes(pattern, &primes_up_to(c), cut, n, &PrimeTester::default())
}

/// Every `x` with all `f_i(x)` prime and `max f_i(x) <= n`, increasing.
pub fn find_pattern_primes(cfg: SearchConfig) -> Result<Vec<Hit>> {
    Ok(Search::new(cfg.collect_hits(true))?.run_to_end()?.hits)
}

/// Starts of complete Cunningham chains of the given kind and length with
/// `x <= cap`, increasing.
pub fn chain_starts(kind: ChainKind, length: usize, cap: WideInt, workers: usize) -> Result<Vec<i128>> {
    let pattern = Pattern::chain(kind, length)?;
    let cap_x = cap.get() as i128;
    let hits = find_pattern_primes(
        SearchConfig::new(pattern.clone(), chain_bound(&pattern, cap_x)?).workers(workers),
    )?;
    Ok(hits.into_iter().map(|h| h.x).filter(|&x| x <= cap_x).collect())
}

/// `n` covering every chain starting at `x <= cap`.
fn chain_bound(pattern: &Pattern, cap: i128) -> Result<WideInt> {
    let top = pattern
        .values(cap.max(1))
        .and_then(|v| v.into_iter().max())
        .ok_or(Error::Overflow)?;
    WideInt::try_from(top.max(4))
}

/// Least start `x <= cap` of a complete chain, searching windows of growing size.
pub fn smallest_chain(kind: ChainKind, length: usize, cap: WideInt) -> Result<Option<i128>> {
    let pattern = Pattern::chain(kind, length)?;
    let cap = cap.get() as i128;
    let mut window: i128 = 1 << 12;
    loop {
        let upto = window.min(cap);
        let n = chain_bound(&pattern, upto)?;
        log::info!("chain search window x <= {upto}");
        let hits = find_pattern_primes(SearchConfig::new(pattern.clone(), n))?;
        if let Some(h) = hits.into_iter().find(|h| h.x <= upto) {
            return Ok(Some(h.x));
        }
        if upto >= cap {
            return Ok(None);
        }
        window = window.saturating_mul(8);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(v: u128) -> WideInt {
        WideInt::new(v).unwrap()
    }

    fn xs(hits: &[Hit]) -> Vec<i128> {
        hits.iter().map(|h| h.x).collect()
    }

    fn brute(pattern: &Pattern, n: i128) -> Vec<i128> {
        let is_p = |v: i128| v >= 2 && is_prime_small(v as u64);
        (pattern.first_x()..=pattern.last_x_below(n))
            .filter(|&x| pattern.values(x).unwrap().into_iter().all(is_p))
            .collect()
    }

    #[test]
    fn quadruplets_below_1000_with_wheel_210() {
        let cfg = SearchConfig::new(Pattern::quadruplet(), w(1000)).wheel_limit(w(210));
        let s = Search::new(cfg).unwrap();
        assert_eq!(s.wheel().modulus(), 210);
        let r = s.run_to_end().unwrap();
        assert_eq!(xs(&r.hits), [5, 11, 101, 191, 821]);
        assert_eq!(r.hits[4].to_string(), "821 821 823 827 829");
    }

    #[test]
    fn boundary_examples() {
        let q = Pattern::quadruplet();
        assert_eq!(xs(&boundary_tuples(&q, w(7), w(1000)).unwrap()), [5]);
        assert_eq!(xs(&boundary_tuples(&q, w(20), w(5000)).unwrap()), [5, 11]);
        assert!(boundary_tuples(&q, w(4), w(1000)).unwrap().is_empty());
        let twin = Pattern::twin();
        assert_eq!(xs(&boundary_tuples(&twin, w(5), w(100)).unwrap()), [3, 5]);
    }

    #[test]
    fn twins_below_100() {
        let hits = find_pattern_primes(SearchConfig::new(Pattern::twin(), w(100))).unwrap();
        assert_eq!(xs(&hits), [3, 5, 11, 17, 29, 41, 59, 71]);
    }

    #[test]
    fn quadruplet_5050_includes_1481() {
        let hits = find_pattern_primes(SearchConfig::new(Pattern::quadruplet(), w(5050))).unwrap();
        assert_eq!(xs(&hits), brute(&Pattern::quadruplet(), 5050));
        assert_eq!(xs(&hits)[..6], [5, 11, 101, 191, 821, 1481]);
    }

    #[test]
    fn negative_starts_are_found() {
        // x + 10, x + 12: the pair (3, 5) sits at x = -7.
        let p = Pattern::from_pairs(&[(1, 10), (1, 12)]).unwrap();
        let hits = find_pattern_primes(SearchConfig::new(p.clone(), w(2000))).unwrap();
        assert_eq!(xs(&hits), brute(&p, 2000));
        assert_eq!(hits[0].x, -7);
        let p = Pattern::from_pairs(&[(1, 100), (1, 102)]).unwrap();
        let hits = find_pattern_primes(SearchConfig::new(p.clone(), w(3000))).unwrap();
        assert_eq!(xs(&hits), brute(&p, 3000));
    }

    #[test]
    fn matches_brute_force_on_small_patterns() {
        let patterns = [
            Pattern::twin(),
            Pattern::from_pairs(&[(1, 0), (1, 2), (1, 6)]).unwrap(),
            Pattern::from_pairs(&[(1, 0), (1, 4), (1, 6)]).unwrap(),
            Pattern::quadruplet(),
            Pattern::chernick(),
            Pattern::chain(ChainKind::First, 3).unwrap(),
            Pattern::chain(ChainKind::Second, 3).unwrap(),
            Pattern::from_pairs(&[(3, 2), (5, -2)]).unwrap(),
        ];
        for p in patterns {
            for n in [20, 200, 5000, 30_000] {
                let hits = find_pattern_primes(SearchConfig::new(p.clone(), w(n))).unwrap();
                assert_eq!(xs(&hits), brute(&p, n as i128), "{p} n={n}");
            }
        }
    }

    #[test]
    fn excluded_primes_and_early_abort() {
        let p = Pattern::chain(ChainKind::First, 3).unwrap();
        let n = 200_000;
        let expect = brute(&p, n as i128);
        let cfg = SearchConfig::new(p, w(n))
            .bound(BoundRule::Explicit(40))
            .wheel_limit(w(2 * 3 * 5 * 7 * 11 * 17))
            .exclude_wheel_prime(13)
            .early_abort(Some(EarlyAbort {
                density: 64,
                check_every: 2,
            }))
            .workers(3);
        let s = Search::new(cfg).unwrap();
        assert_eq!(s.wheel().primes(), [2, 3, 5, 7, 11, 17]);
        assert_eq!(xs(&s.run_to_end().unwrap().hits), expect);
    }

    #[test]
    fn stripes_and_sums_are_reproducible() {
        let base = |nu| {
            SearchConfig::new(Pattern::twin(), w(300_000))
                .workers(nu)
                .reciprocal_sums(true)
        };
        let one = Search::new(base(1)).unwrap().run_to_end().unwrap();
        let four = Search::new(base(4)).unwrap().run_to_end().unwrap();
        assert_eq!(one.hits, four.hits);
        assert_eq!(one.count, four.count);
        let again = Search::new(base(4)).unwrap().run_to_end().unwrap();
        assert_eq!(four.sum.unwrap().to_bits(), again.sum.unwrap().to_bits());
        let direct: f64 = one.hits.iter().flat_map(|h| &h.values).map(|&v| 1.0 / v as f64).sum();
        assert!((one.sum.unwrap() - direct).abs() < 1e-12);
    }

    #[test]
    fn halt_and_resume() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("q.ckpt");
        let cfg = || {
            SearchConfig::new(Pattern::quadruplet(), w(3_000_000))
                .workers(3)
                .reciprocal_sums(true)
        };
        let full = Search::new(cfg()).unwrap().run_to_end().unwrap();

        let s = Search::new(cfg()).unwrap();
        let ctl = RunControl {
            checkpoint: Some(path.clone()),
            halt_after: Some(2),
            on_hit: None,
        };
        let part = s.run(None, &ctl).unwrap();
        assert!(!part.complete);
        let mut last = part;
        while !last.complete {
            let ck = Checkpoint::load(&path).unwrap();
            last = Search::new(cfg()).unwrap().run(Some(ck), &ctl).unwrap();
        }
        assert_eq!(last.hits, full.hits);
        assert_eq!(last.count, full.count);
        assert_eq!(last.sum.unwrap().to_bits(), full.sum.unwrap().to_bits());
    }

    #[test]
    fn resume_refuses_other_config() {
        let s = Search::new(SearchConfig::new(Pattern::twin(), w(10_000))).unwrap();
        let ck = s.fresh_checkpoint();
        let other = Search::new(SearchConfig::new(Pattern::twin(), w(10_001))).unwrap();
        assert!(matches!(
            other.run(Some(ck), &RunControl::default()),
            Err(Error::CheckpointMismatch { .. })
        ));
    }

    #[test]
    fn config_errors() {
        let bad = Pattern::from_pairs(&[(1, 0), (1, 2), (1, 4)]).unwrap();
        assert!(matches!(
            Search::new(SearchConfig::new(bad, w(100))),
            Err(Error::Inadmissible { prime: 3 })
        ));
        assert!(Search::new(SearchConfig::new(Pattern::chernick(), w(10))).is_err());
        assert!(Search::new(SearchConfig::new(Pattern::twin(), w(100)).workers(0)).is_err());
    }

    #[test]
    fn chains() {
        assert_eq!(smallest_chain(ChainKind::First, 6, w(10_000)).unwrap(), Some(89));
        assert_eq!(smallest_chain(ChainKind::First, 6, w(50)).unwrap(), None);
        let second = chain_starts(ChainKind::Second, 2, w(100), 1).unwrap();
        let p = Pattern::chain(ChainKind::Second, 2).unwrap();
        let expect: Vec<i128> = brute(&p, 199).into_iter().filter(|&x| x <= 100).collect();
        assert_eq!(second, expect);
        assert_eq!(&second[..4], [2, 3, 7, 19]);
    }
}
