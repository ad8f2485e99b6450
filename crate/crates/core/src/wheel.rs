//! Wheel over pairwise-coprime prime moduli.
//!
//! The wheel enumerates every residue `r mod W` that is acceptable for each
//! modulus, as a mixed-radix odometer over the per-modulus acceptable lists
//! (least-significant modulus first, residues increasing). `r` is kept in CRT
//! form and updated by one precomputed addition per digit step, so a full
//! enumeration costs a constant number of additions per residue.

use std::fmt;
use std::str::FromStr;

use crate::arith::{modinv_u128, mulmod_u128, WideInt};
use crate::error::{Error, Result};
use crate::pattern::{is_prime_small, Pattern, ResidueMask};

#[derive(Clone, Debug)]
struct Digit {
    prime: u64,
    mask: ResidueMask,
    residues: Vec<u64>,
    /// `steps[i]` moves the CRT value from `residues[i]` to the next entry (cyclically).
    steps: Vec<u128>,
    crt: u128,
}

/// Odometer position: one index per modulus plus the count already yielded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WheelCursor {
    pub counter: Vec<usize>,
    pub position: u128,
    pub exhausted: bool,
}

impl fmt::Display for WheelCursor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.counter.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for WheelCursor {
    type Err = Error;

    /// Parses the counter vector only; `position` and `exhausted` travel separately.
    fn from_str(s: &str) -> Result<Self> {
        let counter = if s.is_empty() {
            Vec::new()
        } else {
            s.split(',')
                .map(|t| {
                    t.parse::<usize>()
                        .map_err(|_| Error::parse("wheel cursor", format!("bad counter {t:?}")))
                })
                .collect::<Result<Vec<_>>>()?
        };
        Ok(WheelCursor {
            counter,
            position: 0,
            exhausted: false,
        })
    }
}

#[derive(Clone, Debug)]
pub struct Wheel {
    digits: Vec<Digit>,
    /// Indices of digits with more than one acceptable residue.
    active: Vec<usize>,
    modulus: u128,
    count: u128,
    counter: Vec<usize>,
    current: u128,
    position: u128,
    exhausted: bool,
    digit_updates: u64,
}

impl Wheel {
    /// Wheel over the given masks; their moduli must be distinct primes whose
    /// product stays below 2^127.
    pub fn from_masks(masks: Vec<ResidueMask>) -> Result<Self> {
        if masks.is_empty() {
            return Err(Error::Domain("wheel needs at least one modulus"));
        }
        let mut modulus: u128 = 1;
        let mut count: u128 = 1;
        for (i, m) in masks.iter().enumerate() {
            if !is_prime_small(m.modulus) || masks[..i].iter().any(|o| o.modulus == m.modulus) {
                return Err(Error::Domain("wheel moduli must be distinct primes"));
            }
            modulus = WideInt::new(modulus)?
                .checked_mul(WideInt::from(m.modulus))?
                .get();
            count *= m.count() as u128;
        }
        let digits = masks
            .into_iter()
            .map(|mask| {
                let m = mask.modulus as u128;
                let cofactor = modulus / m;
                let crt = if modulus == m {
                    1 % modulus
                } else {
                    let inv = modinv_u128(cofactor % m, m).expect("moduli are coprime");
                    mulmod_u128(cofactor, inv, modulus)
                };
                let residues = mask.residues();
                let steps = (0..residues.len())
                    .map(|i| {
                        let next = residues[(i + 1) % residues.len()];
                        let delta = (next + mask.modulus - residues[i]) % mask.modulus;
                        mulmod_u128(delta as u128, crt, modulus)
                    })
                    .collect();
                Digit {
                    prime: mask.modulus,
                    mask,
                    residues,
                    steps,
                    crt,
                }
            })
            .collect::<Vec<_>>();
        let active = (0..digits.len())
            .filter(|&d| digits[d].residues.len() > 1)
            .collect();
        let mut wheel = Wheel {
            counter: vec![0; digits.len()],
            digits,
            active,
            modulus,
            count,
            current: 0,
            position: 0,
            exhausted: count == 0,
            digit_updates: 0,
        };
        wheel.current = wheel.crt_value();
        Ok(wheel)
    }

    /// Greedy wheel for `pattern`: primes 2, 3, 5, ... (skipping `excluded`)
    /// while the running product stays at most `limit`.
    pub fn build(pattern: &Pattern, limit: WideInt, excluded: &[u64]) -> Result<Self> {
        pattern.ensure_admissible()?;
        let limit = limit.get();
        let mut product: u128 = 1;
        let mut masks = Vec::new();
        let mut p = 2u64;
        loop {
            if !excluded.contains(&p) {
                match product.checked_mul(p as u128) {
                    Some(next) if next <= limit => {
                        product = next;
                        masks.push(pattern.acceptable_residues(p));
                    }
                    _ => break,
                }
            }
            p += 1;
            while !is_prime_small(p) {
                p += 1;
            }
        }
        if masks.is_empty() {
            return Err(Error::NoWheelPrime { limit });
        }
        Wheel::from_masks(masks)
    }

    /// `W`, the product of the moduli.
    pub fn modulus(&self) -> u128 {
        self.modulus
    }

    pub fn primes(&self) -> Vec<u64> {
        self.digits.iter().map(|d| d.prime).collect()
    }

    pub fn masks(&self) -> impl Iterator<Item = &ResidueMask> {
        self.digits.iter().map(|d| &d.mask)
    }

    /// Number of residues a full enumeration yields.
    pub fn residue_count(&self) -> u128 {
        self.count
    }

    /// Residues yielded so far.
    pub fn position(&self) -> u128 {
        self.position
    }

    /// Digit updates performed so far; bounded by a small multiple of `position`.
    pub fn digit_updates(&self) -> u64 {
        self.digit_updates
    }

    fn crt_value(&self) -> u128 {
        self.digits
            .iter()
            .zip(&self.counter)
            .fold(0u128, |acc, (d, &c)| {
                if d.residues.is_empty() {
                    return acc;
                }
                let term = mulmod_u128(d.residues[c] as u128, d.crt, self.modulus);
                add_mod(acc, term, self.modulus)
            })
    }

    /// Next acceptable residue, or `None` once all have been produced.
    pub fn next_residue(&mut self) -> Option<u128> {
        if self.exhausted {
            return None;
        }
        let r = self.current;
        self.position += 1;
        self.advance();
        Some(r)
    }

    fn advance(&mut self) {
        for &d in &self.active {
            let digit = &self.digits[d];
            let idx = self.counter[d];
            self.current = add_mod(self.current, digit.steps[idx], self.modulus);
            self.digit_updates += 1;
            if idx + 1 < digit.residues.len() {
                self.counter[d] = idx + 1;
                return;
            }
            self.counter[d] = 0;
        }
        self.exhausted = true;
    }

    pub fn cursor(&self) -> WheelCursor {
        WheelCursor {
            counter: self.counter.clone(),
            position: self.position,
            exhausted: self.exhausted,
        }
    }

    /// Restores a position previously taken with [`Wheel::cursor`].
    pub fn seek(&mut self, cursor: &WheelCursor) -> Result<()> {
        let bad = |reason: &str| Error::parse("wheel cursor", reason.to_string());
        if cursor.counter.len() != self.digits.len() {
            return Err(bad("counter length does not match the wheel"));
        }
        for (d, &c) in self.digits.iter().zip(&cursor.counter) {
            if c >= d.residues.len().max(1) {
                return Err(bad("counter digit out of range"));
            }
        }
        if cursor.position > self.count {
            return Err(bad("position beyond residue count"));
        }
        // The odometer value must agree with the yielded count.
        let mut expect = 0u128;
        let mut radix = 1u128;
        for (d, &c) in self.digits.iter().zip(&cursor.counter) {
            expect += c as u128 * radix;
            radix *= d.residues.len().max(1) as u128;
        }
        let consistent = if cursor.exhausted {
            cursor.position == self.count
        } else {
            cursor.position == expect && expect < self.count
        };
        if !consistent {
            return Err(bad("position disagrees with counter"));
        }
        self.counter = cursor.counter.clone();
        self.position = cursor.position;
        self.exhausted = cursor.exhausted;
        self.current = self.crt_value();
        Ok(())
    }

    /// Residues whose enumeration index is `idx (mod nu)`.
    pub fn stripe(self, nu: u64, idx: u64) -> Result<Stripe> {
        if nu == 0 || idx >= nu {
            return Err(Error::Domain("stripe index must satisfy 0 <= idx < nu"));
        }
        Ok(Stripe {
            wheel: self,
            nu,
            idx,
        })
    }
}

impl Iterator for Wheel {
    type Item = u128;
    fn next(&mut self) -> Option<u128> {
        self.next_residue()
    }
}

#[inline]
fn add_mod(a: u128, b: u128, m: u128) -> u128 {
    // a, b < m < 2^127
    let s = a + b;
    if s >= m {
        s - m
    } else {
        s
    }
}

/// One worker's share of a wheel enumeration.
#[derive(Clone, Debug)]
pub struct Stripe {
    wheel: Wheel,
    nu: u64,
    idx: u64,
}

impl Stripe {
    pub fn wheel(&self) -> &Wheel {
        &self.wheel
    }

    pub fn wheel_mut(&mut self) -> &mut Wheel {
        &mut self.wheel
    }

    /// Next `(enumeration index, residue)` belonging to this stripe.
    pub fn next_residue(&mut self) -> Option<(u128, u128)> {
        loop {
            let pos = self.wheel.position();
            let r = self.wheel.next_residue()?;
            if pos % self.nu as u128 == self.idx as u128 {
                return Some((pos, r));
            }
        }
    }
}

impl Iterator for Stripe {
    type Item = (u128, u128);
    fn next(&mut self) -> Option<Self::Item> {
        self.next_residue()
    }
}
