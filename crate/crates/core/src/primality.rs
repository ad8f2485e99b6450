//! Prime decisions for sieve survivors: a base-2 strong probable-prime gate
//! followed by the Lukes–Patterson–Williams pseudosquares test.

use std::fmt::Write as _;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use crate::arith::{isqrt, perfect_power, powmod_u128, WideInt};
use crate::error::{Error, Result};
use crate::pattern::is_prime_small;
use crate::psq_table::EMBEDDED_PSEUDOSQUARES;

/// First 13 primes; strong tests to all of them decide primality below
/// [`STRONG_BASES_BOUND`].
pub const STRONG_BASES: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

/// Smallest strong pseudoprime to every base in [`STRONG_BASES`].
pub const STRONG_BASES_BOUND: u128 = 3_317_044_064_679_887_385_961_981;

/// Trial division below this is done directly by [`PrimeTester::is_prime`].
const SMALL_TRIAL: u64 = 1000;

pub(crate) fn strong_test(n: u128, base: u128) -> bool {
    debug_assert!(n & 1 == 1 && n >= 3);
    let base = base % n;
    if base == 0 {
        return true;
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    let mut y = powmod_u128(base, d, n);
    if y == 1 || y == n - 1 {
        return true;
    }
    for _ in 1..s {
        y = powmod_u128(y, 2, n);
        if y == n - 1 {
            return true;
        }
        if y == 1 {
            return false;
        }
    }
    false
}

/// Base-2 strong probable-prime test for odd `n >= 3`.
pub fn sprp_base2(n: WideInt) -> Result<bool> {
    let n = n.get();
    if n < 3 || n & 1 == 0 {
        return Err(Error::Domain("strong test needs an odd integer >= 3"));
    }
    Ok(strong_test(n, 2))
}

/// Strong tests to the first 13 prime bases; exact for odd `n` below
/// [`STRONG_BASES_BOUND`].
pub fn strong_bases_test(n: WideInt) -> Result<bool> {
    let n = n.get();
    if n < 3 || n & 1 == 0 {
        return Err(Error::Domain("strong test needs an odd integer >= 3"));
    }
    if n >= STRONG_BASES_BOUND {
        return Err(Error::Domain("above the deterministic range of the strong-base test"));
    }
    Ok(STRONG_BASES
        .iter()
        .all(|&b| b as u128 == n || strong_test(n, b as u128)))
}

/// Pseudosquares `L_p` indexed by odd primes `p`, strictly increasing in `L_p`.
///
/// When consecutive primes share a pseudosquare only the smallest such `p`
/// is kept: it certifies the same range with fewer bases.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PseudosquareTable {
    entries: Vec<(u64, u128)>,
}

impl PseudosquareTable {
    pub fn new(entries: Vec<(u64, u128)>) -> Result<Self> {
        for (i, &(p, l)) in entries.iter().enumerate() {
            if p < 3 || !is_prime_small(p) {
                return Err(Error::parse("pseudosquare table", format!("{p} is not an odd prime")));
            }
            if l % 8 != 1 {
                return Err(Error::parse("pseudosquare table", format!("{l} is not 1 mod 8")));
            }
            if i > 0 && (entries[i - 1].0 >= p || entries[i - 1].1 >= l) {
                return Err(Error::parse("pseudosquare table", "entries must increase"));
            }
        }
        Ok(PseudosquareTable { entries })
    }

    /// The table compiled into the crate.
    pub fn embedded() -> Arc<PseudosquareTable> {
        static TABLE: OnceLock<Arc<PseudosquareTable>> = OnceLock::new();
        TABLE
            .get_or_init(|| {
                Arc::new(PseudosquareTable {
                    entries: EMBEDDED_PSEUDOSQUARES
                        .iter()
                        .map(|&(p, l)| (p, l as u128))
                        .collect(),
                })
            })
            .clone()
    }

    pub fn entries(&self) -> &[(u64, u128)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Largest pseudosquare held.
    pub fn max_pseudosquare(&self) -> Option<u128> {
        self.entries.last().map(|e| e.1)
    }

    /// Entries with `L_p <= limit`.
    pub fn truncated(&self, limit: u128) -> PseudosquareTable {
        PseudosquareTable {
            entries: self.entries.iter().copied().filter(|e| e.1 <= limit).collect(),
        }
    }

    /// Least entry with `L_p * trial_bound > n`.
    pub fn select(&self, n: u128, trial_bound: u64) -> Option<(u64, u128)> {
        self.entries
            .iter()
            .copied()
            .find(|&(_, l)| l.checked_mul(trial_bound as u128).is_none_or(|v| v > n))
    }

    /// `PSQ v1` text: header line, then `p L_p` per line.
    pub fn to_text(&self) -> String {
        let mut out = String::from("PSQ v1\n");
        for (p, l) in &self.entries {
            let _ = writeln!(out, "{p} {l}");
        }
        out
    }
}

impl FromStr for PseudosquareTable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s.lines();
        match lines.next().map(str::trim) {
            Some("PSQ v1") => {}
            _ => return Err(Error::parse("pseudosquare table", "missing `PSQ v1` header")),
        }
        let mut entries = Vec::new();
        for (i, line) in lines.enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split_ascii_whitespace();
            let (Some(p), Some(l), None) = (fields.next(), fields.next(), fields.next()) else {
                return Err(Error::parse(
                    "pseudosquare table",
                    format!("line {}: expected `p L_p`", i + 2),
                ));
            };
            let p: u64 = p
                .parse()
                .map_err(|_| Error::parse("pseudosquare table", format!("line {}: bad prime", i + 2)))?;
            let l: WideInt = l.parse()?;
            entries.push((p, l.get()));
        }
        PseudosquareTable::new(entries)
    }
}

/// Odd primes used as quadratic-residue filters by the generator.
const GENERATOR_PRIMES: usize = 64;

/// Every pseudosquare `L_p <= limit` for odd primes `p`, by direct search over
/// integers `1 mod 8`.
pub fn compute_pseudosquares(limit: u128) -> PseudosquareTable {
    let limit = limit.min(u64::MAX as u128) as u64;
    let odd_primes: Vec<u64> = (3..)
        .filter(|&q| is_prime_small(q))
        .take(GENERATOR_PRIMES)
        .collect();
    let qr: Vec<Vec<bool>> = odd_primes
        .iter()
        .map(|&q| {
            let mut t = vec![false; q as usize];
            for v in 1..q {
                t[(v * v % q) as usize] = true;
            }
            t
        })
        .collect();
    let mut gen = Generator {
        odd_primes: &odd_primes,
        qr: &qr,
        next: 0,
        entries: Vec::new(),
    };

    // Block modulus: 8 times the odd primes through 23.
    const FILTERED: usize = 8;
    let block: u64 = 8 * odd_primes[..FILTERED].iter().product::<u64>();

    let mut v = 9u64;
    while v <= limit.min(block) && !gen.done() {
        gen.consider(v, 0);
        v += 8;
    }
    if limit <= block || gen.done() {
        return PseudosquareTable { entries: gen.entries };
    }
    debug_assert!(gen.next >= FILTERED, "small pseudosquares lie below one block");

    // Beyond one block every remaining L_p is a residue modulo every filter prime.
    let residues: Vec<u64> = (1..block)
        .step_by(8)
        .filter(|&r| (0..FILTERED).all(|i| qr[i][(r % odd_primes[i]) as usize]))
        .collect();
    let mut base = block;
    'outer: while !gen.done() {
        for &r in &residues {
            let Some(v) = base.checked_add(r) else { break 'outer };
            if v > limit {
                break 'outer;
            }
            gen.consider(v, FILTERED);
            if gen.done() {
                break 'outer;
            }
        }
        match base.checked_add(block) {
            Some(b) => base = b,
            None => break,
        }
    }
    PseudosquareTable { entries: gen.entries }
}

struct Generator<'a> {
    odd_primes: &'a [u64],
    qr: &'a [Vec<bool>],
    /// Index of the first odd prime whose pseudosquare is still unknown.
    next: usize,
    entries: Vec<(u64, u128)>,
}

impl Generator<'_> {
    fn done(&self) -> bool {
        self.next >= self.odd_primes.len()
    }

    /// `v` is `1 mod 8` and already known to be a residue for the first `skip` primes.
    #[inline]
    fn consider(&mut self, v: u64, skip: usize) {
        let mut c = skip;
        while c <= self.next {
            if !self.qr[c][(v % self.odd_primes[c]) as usize] {
                return;
            }
            c += 1;
        }
        let root = isqrt(v as u128) as u64;
        if root * root == v {
            return;
        }
        while c < self.odd_primes.len() && self.qr[c][(v % self.odd_primes[c]) as usize] {
            c += 1;
        }
        self.entries.push((self.odd_primes[self.next], v as u128));
        self.next = c;
    }
}

/// Lukes–Patterson–Williams test for odd `n > 1` with no prime factor up to
/// `trial_bound`.
pub fn pseudosquares_test(n: WideInt, trial_bound: u64, table: &PseudosquareTable) -> Result<bool> {
    let n = n.get();
    if n < 3 || n & 1 == 0 {
        return Err(Error::Domain("pseudosquares test needs an odd integer > 1"));
    }
    let trial_bound = trial_bound.max(1);
    let (p, _) = table
        .select(n, trial_bound)
        .ok_or(Error::PseudosquareCapacity {
            needed: n / trial_bound as u128,
        })?;
    if perfect_power(n).is_some() {
        return Ok(false);
    }
    let bases: Vec<u128> = (2..=p).filter(|&q| is_prime_small(q)).map(u128::from).collect();
    for &q in &bases {
        if n.is_multiple_of(q) {
            if n == q {
                return Ok(true);
            }
            if q <= trial_bound as u128 {
                return Err(Error::Contract(format!(
                    "{n} has the factor {q} below the trial bound {trial_bound}"
                )));
            }
            return Ok(false);
        }
    }
    let e = (n - 1) >> 1;
    let mut saw_minus_one = false;
    let mut two_minus_one = false;
    for &q in &bases {
        let y = powmod_u128(q, e, n);
        if y == n - 1 {
            saw_minus_one = true;
            if q == 2 {
                two_minus_one = true;
            }
        } else if y != 1 {
            return Ok(false);
        }
    }
    match n % 8 {
        5 => Ok(two_minus_one),
        1 if !saw_minus_one => extend_for_minus_one(n, p, table),
        _ => Ok(true),
    }
}

/// `n = 1 (mod 8)` with every base up to `p` a residue: try further prime
/// bases. A prime `n` must answer `-1` to some base `q` with `L_q > n`
/// (otherwise `n` would be a smaller pseudosquare); any other answer
/// besides `1` proves `n` composite. A `-1` at `q` satisfies the criterion
/// with `q` in place of `p`.
fn extend_for_minus_one(n: u128, p: u64, table: &PseudosquareTable) -> Result<bool> {
    let last = match table.entries.iter().find(|&&(_, l)| l > n) {
        Some(&(q, _)) => q,
        None => u64::MAX,
    };
    let e = (n - 1) >> 1;
    let mut q = p + 1;
    loop {
        while !is_prime_small(q) {
            q += 1;
        }
        if q > last {
            return Ok(false);
        }
        if last == u64::MAX && table.entries.last().is_none_or(|&(t, _)| q > t) {
            return Err(Error::PseudosquareCapacity { needed: n });
        }
        if n.is_multiple_of(q as u128) {
            return Ok(n == q as u128);
        }
        let y = powmod_u128(q as u128, e, n);
        if y == n - 1 {
            return Ok(true);
        }
        if y != 1 {
            return Ok(false);
        }
        q += 1;
    }
}

/// Exact prime decision with a fixed pseudosquare table.
///
/// Beyond the table's reach the tester falls back to strong tests to the
/// first 13 prime bases when `strong_fallback` is set and `n` lies in their
/// deterministic range; otherwise it reports a capacity error.
#[derive(Clone, Debug)]
pub struct PrimeTester {
    table: Arc<PseudosquareTable>,
    strong_fallback: bool,
}

impl Default for PrimeTester {
    fn default() -> Self {
        PrimeTester::new(PseudosquareTable::embedded(), true)
    }
}

impl PrimeTester {
    pub fn new(table: Arc<PseudosquareTable>, strong_fallback: bool) -> Self {
        PrimeTester {
            table,
            strong_fallback,
        }
    }

    pub fn table(&self) -> &PseudosquareTable {
        &self.table
    }

    /// Primality of any `n`; `known_trial_bound` records how far trial
    /// division is already guaranteed.
    pub fn is_prime(&self, n: WideInt, known_trial_bound: u64) -> Result<bool> {
        let v = n.get();
        if v < 2 {
            return Ok(false);
        }
        if v & 1 == 0 {
            return Ok(v == 2);
        }
        let mut bound = known_trial_bound.max(2);
        if bound < SMALL_TRIAL {
            let mut d = 3u64;
            while d <= SMALL_TRIAL && (d as u128) * (d as u128) <= v {
                if v.is_multiple_of(d as u128) {
                    return Ok(false);
                }
                d += 2;
            }
            if (d as u128) * (d as u128) > v {
                return Ok(true);
            }
            bound = SMALL_TRIAL;
        }
        if !strong_test(v, 2) {
            return Ok(false);
        }
        self.confirm(n, bound)
    }

    /// Certifies odd `n` that has no prime factor up to `trial_bound` and has
    /// already passed the base-2 strong test.
    pub fn confirm(&self, n: WideInt, trial_bound: u64) -> Result<bool> {
        let v = n.get();
        let s = trial_bound as u128;
        if s.checked_mul(s).is_none_or(|sq| sq >= v) {
            return Ok(v > 1);
        }
        match pseudosquares_test(n, trial_bound, &self.table) {
            Err(Error::PseudosquareCapacity { .. })
                if self.strong_fallback && v < STRONG_BASES_BOUND =>
            {
                strong_bases_test(n)
            }
            other => other,
        }
    }
}

/// Exact primality with the embedded table.
pub fn is_prime(n: WideInt, known_trial_bound: u64) -> Result<bool> {
    static TESTER: OnceLock<PrimeTester> = OnceLock::new();
    TESTER
        .get_or_init(PrimeTester::default)
        .is_prime(n, known_trial_bound)
}
