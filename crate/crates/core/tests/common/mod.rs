//! Independent oracles for the integration tests. Nothing here calls into
//! the library.

#![allow(dead_code)]

/// `table[v]` is true iff `v` is prime, for `v <= limit`.
pub fn prime_table(limit: usize) -> Vec<bool> {
    let mut t = vec![true; limit + 1];
    t[0] = false;
    if limit >= 1 {
        t[1] = false;
    }
    let mut i = 2;
    while i * i <= limit {
        if t[i] {
            let mut j = i * i;
            while j <= limit {
                t[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    t
}

pub fn is_prime_td(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Every `x` with all `a*x + b` prime and at most `n`, by table lookup.
pub fn pattern_oracle(forms: &[(i64, i64)], n: i64, table: &[bool]) -> Vec<i64> {
    assert!(table.len() as i64 > n);
    let lo = forms
        .iter()
        .map(|&(a, b)| (2 - b).div_euclid(a) + i64::from((2 - b).rem_euclid(a) != 0))
        .max()
        .unwrap();
    let hi = forms.iter().map(|&(a, b)| (n - b).div_euclid(a)).min().unwrap();
    (lo..=hi)
        .filter(|&x| forms.iter().all(|&(a, b)| table[(a * x + b) as usize]))
        .collect()
}

/// `sum of floor(10^30 / v)`: reciprocal sums in fixed point.
pub fn fixed_recip_sum(values: impl IntoIterator<Item = u64>) -> u128 {
    const ONE: u128 = 1_000_000_000_000_000_000_000_000_000_000;
    values.into_iter().map(|v| ONE / v as u128).sum()
}

pub fn fixed_to_f64(v: u128) -> f64 {
    v as f64 / 1e30
}

/// Odd primes in `[3, limit]`, by a segmented sieve, passed to `f` in order.
pub fn for_each_odd_prime(limit: u64, mut f: impl FnMut(u64)) {
    let root = (limit as f64).sqrt() as u64 + 1;
    let small = prime_table(root as usize);
    let base: Vec<u64> = (3..=root).filter(|&i| small[i as usize]).collect();
    const SEG: u64 = 1 << 20;
    let mut lo = 3u64;
    let mut seg = vec![true; SEG as usize];
    while lo <= limit {
        let hi = (lo + 2 * SEG).min(limit + 1);
        let len = (hi - lo).div_ceil(2) as usize;
        seg[..len].iter_mut().for_each(|b| *b = true);
        for &p in &base {
            if p * p >= hi {
                break;
            }
            let mut start = (lo.div_ceil(p) * p).max(p * p);
            if start % 2 == 0 {
                start += p;
            }
            let mut i = ((start - lo) / 2) as usize;
            while i < len {
                seg[i] = false;
                i += p as usize;
            }
        }
        for (i, &b) in seg[..len].iter().enumerate() {
            let v = lo + 2 * i as u64;
            if b && v <= limit {
                f(v);
            }
        }
        lo += 2 * SEG;
    }
}

/// Primality of each input by trial division up to its square root, done
/// in one pass over the primes below `2^32`.
pub fn batch_trial_division(ns: &[u64]) -> Vec<bool> {
    let mut verdict: Vec<Option<bool>> = ns
        .iter()
        .map(|&n| {
            if n < 2 {
                Some(false)
            } else if n % 2 == 0 {
                Some(n == 2)
            } else {
                None
            }
        })
        .collect();
    // Open cases sorted by value so those with p^2 > n drop off the front.
    let mut open: Vec<(u64, usize)> = ns
        .iter()
        .enumerate()
        .filter(|(i, _)| verdict[*i].is_none())
        .map(|(i, &n)| (n, i))
        .collect();
    open.sort_unstable();
    let max = open.last().map_or(0, |e| e.0);
    let limit = ((max as f64).sqrt() as u64 + 1).min(u32::MAX as u64);
    let mut start = 0;
    let mut values: Vec<u64> = open.iter().map(|e| e.0).collect();
    for_each_odd_prime(limit, |p| {
        let sq = p * p;
        while start < open.len() && sq > values[start] {
            let (n, i) = open[start];
            verdict[i].get_or_insert(n >= 2);
            start += 1;
        }
        if start == open.len() {
            return;
        }
        // p | n  <=>  n * p^-1 mod 2^64 <= (2^64 - 1) / p
        let inv = inverse_mod_2_64(p);
        let bound = u64::MAX / p;
        let hit = values[start..]
            .iter()
            .fold(false, |acc, &n| acc | (n.wrapping_mul(inv) <= bound));
        if hit {
            let mut kept = Vec::with_capacity(open.len() - start);
            for &(n, i) in &open[start..] {
                if n.wrapping_mul(inv) <= bound {
                    verdict[i] = Some(n == p);
                } else {
                    kept.push((n, i));
                }
            }
            open = kept;
            values = open.iter().map(|e| e.0).collect();
            start = 0;
        }
    });
    for &(_, i) in &open[start..] {
        verdict[i].get_or_insert(true);
    }
    verdict.into_iter().map(|v| v.unwrap()).collect()
}

fn inverse_mod_2_64(p: u64) -> u64 {
    let mut x = p;
    for _ in 0..6 {
        x = x.wrapping_mul(2u64.wrapping_sub(p.wrapping_mul(x)));
    }
    x
}
