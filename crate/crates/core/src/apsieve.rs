//! Sieve of Eratosthenes over the progressions `f_i(r + j*W)`.

use crate::arith::{isqrt, modinv_u64, WideInt};
use crate::bits::BitSet;
use crate::error::{Error, Result};
use crate::pattern::Pattern;

/// Largest sieve bound accepted; sieve primes are handled as 32-bit values.
pub const MAX_SIEVE_BOUND: u64 = 1 << 32;

/// Longest segment allocated for one residue.
pub const MAX_SEGMENT_LEN: u128 = 1 << 36;

/// How the sieve bound `B` is chosen.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BoundRule {
    /// `B = 2^floor(log2(n) / c)` for `c > 2`.
    SpaceExponent(f64),
    /// `B = floor(sqrt(n))`: sieving alone decides primality.
    Sqrt,
    Explicit(u64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SievePlan {
    pub bound: u64,
    pub wheel_limit: u128,
    pub space_exponent: Option<f64>,
    primes: Vec<u64>,
}

impl SievePlan {
    /// `wheel_limit` defaults to `n / B`.
    pub fn new(n: WideInt, rule: BoundRule, wheel_limit: Option<WideInt>) -> Result<Self> {
        let n = n.get();
        if n < 4 {
            return Err(Error::Domain("search bound must be at least 4"));
        }
        let (bound, space_exponent) = match rule {
            BoundRule::SpaceExponent(c) => {
                if !(c > 2.0) || !c.is_finite() {
                    return Err(Error::Domain("space exponent must exceed 2"));
                }
                let log2 = log2_floor_aware(n);
                let e = (log2 / c).floor() as u32;
                (1u128 << e.min(127), Some(c))
            }
            BoundRule::Sqrt => (isqrt(n), None),
            BoundRule::Explicit(b) => (b as u128, None),
        };
        if bound < 2 {
            return Err(Error::SieveBound { bound });
        }
        if bound > MAX_SIEVE_BOUND as u128 {
            return Err(Error::SieveBound { bound });
        }
        let bound = bound as u64;
        let wheel_limit = match wheel_limit {
            Some(w) => w.get(),
            None => n / bound as u128,
        };
        Ok(SievePlan {
            bound,
            wheel_limit,
            space_exponent,
            primes: primes_up_to(bound),
        })
    }

    /// All primes up to `B`.
    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// Primes up to `B` that are not wheel primes, increasing.
    pub fn sieve_primes(&self, wheel_primes: &[u64]) -> Vec<u64> {
        self.primes
            .iter()
            .copied()
            .filter(|p| !wheel_primes.contains(p))
            .collect()
    }
}

/// `log2(n)` with exact integer answers at powers of two.
fn log2_floor_aware(n: u128) -> f64 {
    if n.is_power_of_two() {
        n.trailing_zeros() as f64
    } else {
        (n as f64).log2()
    }
}

/// Primes `<= limit` by an odd-only segmented sieve.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let mut primes = vec![2u64];
    let root = isqrt(limit as u128) as u64;
    // Base primes by a plain sieve.
    let mut small = vec![true; root as usize + 1];
    let mut base = Vec::new();
    for i in 2..=root as usize {
        if small[i] {
            if i > 2 {
                base.push(i as u64);
            }
            let mut j = i * i;
            while j <= root as usize {
                small[j] = false;
                j += i;
            }
        }
    }
    const SEG: u64 = 1 << 18;
    let mut lo = 3u64;
    while lo <= limit {
        let hi = lo.saturating_add(2 * SEG).min(limit.saturating_add(1));
        // index i represents lo + 2i
        let len = ((hi - lo) as usize).div_ceil(2);
        let mut seg = BitSet::new(len, true);
        for &p in &base {
            if p * p >= hi {
                break;
            }
            let mut start = (p * p).max(lo.div_ceil(p) * p);
            if start % 2 == 0 {
                start += p;
            }
            seg.clear_stride(((start - lo) / 2) as usize, p as usize);
        }
        primes.extend(seg.iter_ones().map(|i| lo + 2 * i as u64));
        lo = hi + hi.is_multiple_of(2) as u64;
    }
    primes
}

/// Early-abort policy: stop sieving once fewer than one live bit per
/// `density` positions remains, checked every `check_every` primes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EarlyAbort {
    pub density: u64,
    pub check_every: usize,
}

impl Default for EarlyAbort {
    fn default() -> Self {
        EarlyAbort {
            density: 4096,
            check_every: 64,
        }
    }
}

/// Bit vector for one residue class: bit `j` stands for `x = r + j*W`.
#[derive(Clone, Debug)]
pub struct SieveSegment {
    pub residue: u128,
    pub modulus: u128,
    pub bits: BitSet,
    /// Every prime up to this bound is known not to divide any live `f_i(x)`.
    pub trial_bound: u64,
    pub aborted: bool,
}

impl SieveSegment {
    /// `j_max`, or `None` for an empty segment.
    pub fn j_max(&self) -> Option<usize> {
        self.bits.len().checked_sub(1)
    }

    pub fn x_at(&self, j: usize) -> i128 {
        (self.residue + j as u128 * self.modulus) as i128
    }

    /// Live candidates `x`, increasing.
    pub fn survivors(&self) -> Vec<i128> {
        self.bits.iter_ones().map(|j| self.x_at(j)).collect()
    }

    pub fn live(&self) -> usize {
        self.bits.count_ones()
    }
}

#[derive(Clone, Debug)]
struct SievePrime {
    p: u64,
    w_inv: u64,
    /// Distinct residues `x mod p` at which some form is divisible by `p`.
    roots: Vec<u64>,
}

/// Per-search state shared by every residue: `W`, `n`, and each sieve
/// prime with `W^-1 mod p` and the roots of the forms.
#[derive(Clone, Debug)]
pub struct SegmentSieve {
    pattern: Pattern,
    modulus: u128,
    n: i128,
    primes: Vec<SievePrime>,
    /// Smallest prime neither in the wheel nor among the sieve primes.
    gap_prime: u64,
    early_abort: Option<EarlyAbort>,
}

impl SegmentSieve {
    pub fn new(
        pattern: &Pattern,
        wheel_primes: &[u64],
        modulus: u128,
        n: WideInt,
        sieve_primes: &[u64],
        early_abort: Option<EarlyAbort>,
    ) -> Result<Self> {
        let mut primes = Vec::with_capacity(sieve_primes.len());
        for &p in sieve_primes {
            if !(2..=MAX_SIEVE_BOUND).contains(&p) {
                return Err(Error::SieveBound { bound: p as u128 });
            }
            let w_inv = modinv_u64((modulus % p as u128) as u64, p).ok_or(Error::NotInvertible {
                value: modulus,
                modulus: p as u128,
            })?;
            let mut roots: Vec<u64> = pattern.forms().iter().filter_map(|f| f.root_mod(p)).collect();
            roots.sort_unstable();
            roots.dedup();
            primes.push(SievePrime { p, w_inv, roots });
        }
        if primes.windows(2).any(|w| w[0].p >= w[1].p) {
            return Err(Error::Contract("sieve primes must be increasing".into()));
        }
        let gap_prime = first_missing_prime(wheel_primes, sieve_primes);
        Ok(SegmentSieve {
            pattern: pattern.clone(),
            modulus,
            n: n.get() as i128,
            primes,
            gap_prime,
            early_abort,
        })
    }

    /// Trial bound once the first `applied` sieve primes have been used.
    fn trial_bound_after(&self, applied: usize) -> u64 {
        let next = self
            .primes
            .get(applied)
            .map_or(self.gap_prime, |sp| sp.p.min(self.gap_prime));
        next - 1
    }

    /// Trial bound after a complete sieve.
    pub fn full_trial_bound(&self) -> u64 {
        self.trial_bound_after(self.primes.len())
    }

    /// Number of positions `j` with `max_i f_i(r + j*W) <= n`.
    pub fn segment_len(&self, r: u128) -> Result<u128> {
        let mut len: Option<u128> = None;
        for f in self.pattern.forms() {
            let a = f.a as i128;
            let Some(start) = a.checked_mul(r as i128).and_then(|v| v.checked_add(f.b)) else {
                return Ok(0);
            };
            if start > self.n {
                return Ok(0);
            }
            let room = (self.n - start) as u128;
            let this = match (f.a).checked_mul(self.modulus) {
                Some(step) => room / step + 1,
                None => 1,
            };
            len = Some(len.map_or(this, |l| l.min(this)));
        }
        Ok(len.unwrap_or(0))
    }

    /// Sieves the segment for residue `r`.
    pub fn sieve(&self, r: u128) -> Result<SieveSegment> {
        let len = self.segment_len(r)?;
        if len > MAX_SEGMENT_LEN {
            return Err(Error::Contract(format!(
                "segment of {len} positions is too long; raise the wheel limit or lower n"
            )));
        }
        let len = len as usize;
        let mut bits = BitSet::new(len, true);
        let mut applied = 0;
        let mut aborted = false;
        if len > 0 {
            let r_small = (r < 1 << 64).then_some(r as u64);
            for (i, sp) in self.primes.iter().enumerate() {
                if let Some(ea) = self.early_abort {
                    if i > 0 && i % ea.check_every == 0 {
                        let live = bits.count_ones() as u64;
                        if live.saturating_mul(ea.density) < len as u64 {
                            aborted = true;
                            break;
                        }
                    }
                }
                let p = sp.p;
                let r_mod = match r_small {
                    Some(v) => v % p,
                    None => (r % p as u128) as u64,
                };
                for &root in &sp.roots {
                    let diff = (root + p - r_mod) % p;
                    let j0 = (diff * sp.w_inv) % p;
                    bits.clear_stride(j0 as usize, p as usize);
                }
                applied = i + 1;
            }
        }
        if !aborted {
            applied = self.primes.len();
        }
        Ok(SieveSegment {
            residue: r,
            modulus: self.modulus,
            bits,
            trial_bound: self.trial_bound_after(applied),
            aborted,
        })
    }
}

/// Smallest prime in neither list.
fn first_missing_prime(a: &[u64], b: &[u64]) -> u64 {
    let mut used: Vec<u64> = a.iter().chain(b).copied().collect();
    used.sort_unstable();
    used.dedup();
    let top = used.last().copied().unwrap_or(1);
    let all = primes_up_to(top);
    if let Some(i) = all.iter().zip(&used).position(|(p, u)| p != u) {
        return all[i];
    }
    if all.len() > used.len() {
        return all[used.len()];
    }
    let mut next = top + 1;
    while !crate::pattern::is_prime_small(next) {
        next += 1;
    }
    next
}

/// One-shot sieve of a single segment.
pub fn sieve_segment(
    pattern: &Pattern,
    r: u128,
    modulus: u128,
    n: WideInt,
    wheel_primes: &[u64],
    sieve_primes: &[u64],
) -> Result<SieveSegment> {
    SegmentSieve::new(pattern, wheel_primes, modulus, n, sieve_primes, None)?.sieve(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wide(v: u128) -> WideInt {
        WideInt::new(v).unwrap()
    }

    #[test]
    fn bound_rules() {
        let plan = SievePlan::new(wide(1 << 30), BoundRule::SpaceExponent(3.0), None).unwrap();
        assert_eq!(plan.bound, 1024);
        assert_eq!(plan.wheel_limit, 1 << 20);
        let sq = SievePlan::new(wide(10u128.pow(8)), BoundRule::Sqrt, None).unwrap();
        assert_eq!(sq.bound, 10_000);
        assert!(matches!(
            SievePlan::new(wide(4), BoundRule::SpaceExponent(3.0), None),
            Err(Error::SieveBound { bound: 1 })
        ));
        assert!(SievePlan::new(wide(100), BoundRule::SpaceExponent(2.0), None).is_err());
        assert!(SievePlan::new(wide(3), BoundRule::Sqrt, None).is_err());
    }

    #[test]
    fn worked_example_split() {
        let plan = SievePlan::new(wide(5050), BoundRule::Explicit(20), Some(wide(210))).unwrap();
        assert_eq!(plan.sieve_primes(&[2, 3, 5, 7]), vec![11, 13, 17, 19]);
    }

    #[test]
    fn prime_generation() {
        assert_eq!(primes_up_to(1), Vec::<u64>::new());
        assert_eq!(primes_up_to(2), vec![2]);
        assert_eq!(primes_up_to(30), vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert_eq!(primes_up_to(1_000_000).len(), 78_498);
        assert_eq!(primes_up_to(1 << 20).last(), Some(&1_048_573));
        let brute: Vec<u64> = (2..5000u64).filter(|&n| crate::pattern::is_prime_small(n)).collect();
        assert_eq!(primes_up_to(4999), brute);
    }

    #[test]
    fn worked_example_segment() {
        let q = Pattern::quadruplet();
        let seg = sieve_segment(&q, 11, 210, wide(5050), &[2, 3, 5, 7], &[11, 13, 17, 19]).unwrap();
        assert_eq!(seg.j_max(), Some(23));
        assert_eq!(seg.survivors(), vec![851, 1481, 3161]);
        assert_eq!(seg.trial_bound, 22);

        let after_11 = sieve_segment(&q, 11, 210, wide(5050), &[2, 3, 5, 7], &[11]).unwrap();
        let unsieved = sieve_segment(&q, 11, 210, wide(5050), &[2, 3, 5, 7], &[]).unwrap();
        let cleared: Vec<i128> = unsieved
            .survivors()
            .into_iter()
            .filter(|x| !after_11.survivors().contains(x))
            .collect();
        assert_eq!(cleared, vec![11, 641, 1061, 1901, 2321, 2951, 3371, 4211, 4631]);
        assert_eq!(unsieved.live(), 24);
        assert_eq!(&unsieved.survivors()[..3], &[11, 221, 431]);
    }

    #[test]
    fn length_uses_largest_form() {
        let p = Pattern::chernick();
        let s = SegmentSieve::new(&p, &[2, 3], 6, wide(1000), &[], None).unwrap();
        // 18x + 1 <= 1000 with x = 1 + 6j gives j <= 9
        assert_eq!(s.segment_len(1).unwrap(), 10);
        assert_eq!(s.segment_len(10_000).unwrap(), 0);
    }

    #[test]
    fn early_abort_records_depth() {
        let q = Pattern::quadruplet();
        let plan = SievePlan::new(wide(10u128.pow(9)), BoundRule::Explicit(1 << 14), Some(wide(210))).unwrap();
        let sp = plan.sieve_primes(&[2, 3, 5, 7]);
        let ea = EarlyAbort {
            density: 64,
            check_every: 8,
        };
        let s = SegmentSieve::new(&q, &[2, 3, 5, 7], 210, wide(10u128.pow(9)), &sp, Some(ea)).unwrap();
        let seg = s.sieve(11).unwrap();
        assert!(seg.aborted);
        assert!(seg.trial_bound < plan.bound);
        let applied: Vec<u64> = sp.iter().copied().filter(|&p| p <= seg.trial_bound).collect();
        for x in seg.survivors() {
            for v in q.values(x).unwrap() {
                for &p in &applied {
                    assert_ne!(v % p as i128, 0);
                }
            }
        }
    }
}
