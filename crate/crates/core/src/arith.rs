//! Exact modular arithmetic for integers below 2^127.
//!
//! Moduli below 2^64 go through native 128-bit products (Montgomery form for
//! odd moduli inside [`powmod`]). Larger moduli use shift-add multiplication,
//! or 128-bit Montgomery reduction when the modulus is odd.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Exclusive upper bound for every [`WideInt`].
pub const WIDE_LIMIT: u128 = 1 << 127;

/// Non-negative integer strictly below 2^127.
///
/// Arithmetic is checked: anything that would leave the range returns
/// [`Error::Overflow`] instead of wrapping.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WideInt(u128);

impl WideInt {
    pub const ZERO: WideInt = WideInt(0);
    pub const ONE: WideInt = WideInt(1);
    pub const MAX: WideInt = WideInt(WIDE_LIMIT - 1);

    pub fn new(value: u128) -> Result<Self> {
        if value < WIDE_LIMIT {
            Ok(WideInt(value))
        } else {
            Err(Error::Overflow)
        }
    }

    pub const fn from_u64(value: u64) -> Self {
        WideInt(value as u128)
    }

    #[inline]
    pub const fn get(self) -> u128 {
        self.0
    }

    pub fn checked_add(self, rhs: WideInt) -> Result<WideInt> {
        WideInt::new(self.0 + rhs.0)
    }

    pub fn checked_sub(self, rhs: WideInt) -> Result<WideInt> {
        self.0
            .checked_sub(rhs.0)
            .map(WideInt)
            .ok_or(Error::Domain("subtraction below zero"))
    }

    pub fn checked_mul(self, rhs: WideInt) -> Result<WideInt> {
        self.0
            .checked_mul(rhs.0)
            .ok_or(Error::Overflow)
            .and_then(WideInt::new)
    }

    pub fn is_odd(self) -> bool {
        self.0 & 1 == 1
    }
}

impl From<u64> for WideInt {
    fn from(v: u64) -> Self {
        WideInt(v as u128)
    }
}

impl From<u32> for WideInt {
    fn from(v: u32) -> Self {
        WideInt(v as u128)
    }
}

impl TryFrom<u128> for WideInt {
    type Error = Error;
    fn try_from(v: u128) -> Result<Self> {
        WideInt::new(v)
    }
}

impl TryFrom<i128> for WideInt {
    type Error = Error;
    fn try_from(v: i128) -> Result<Self> {
        if v < 0 {
            Err(Error::Domain("negative value"))
        } else {
            Ok(WideInt(v as u128))
        }
    }
}

impl fmt::Display for WideInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl FromStr for WideInt {
    type Err = Error;

    /// Decimal digits, optionally with `_` separators, or `a^b` / `aeb`
    /// shorthand for powers (`10^17`, `1e8`).
    fn from_str(s: &str) -> Result<Self> {
        let s: String = s.trim().chars().filter(|c| *c != '_').collect();
        let bad = |reason: &str| Error::parse("integer", format!("{s:?}: {reason}"));
        let digits = |t: &str| -> Result<u128> {
            if t.is_empty() || !t.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad("expected decimal digits"));
            }
            t.parse::<u128>().map_err(|_| bad("too large"))
        };
        let value = if let Some((base, exp)) = s.split_once('^') {
            let exp = u32::try_from(digits(exp)?).map_err(|_| bad("exponent too large"))?;
            digits(base)?
                .checked_pow(exp)
                .ok_or_else(|| bad("too large"))?
        } else if let Some((mant, exp)) = s.split_once(['e', 'E']) {
            let exp = u32::try_from(digits(exp)?).map_err(|_| bad("exponent too large"))?;
            10u128
                .checked_pow(exp)
                .and_then(|p| p.checked_mul(digits(mant).ok()?))
                .ok_or_else(|| bad("too large"))?
        } else {
            digits(&s)?
        };
        WideInt::new(value).map_err(|_| bad("not below 2^127"))
    }
}

/// Returns `(a * b) mod m`.
pub fn mulmod(a: WideInt, b: WideInt, m: WideInt) -> Result<WideInt> {
    if m.0 == 0 {
        return Err(Error::Domain("modulus is zero"));
    }
    Ok(WideInt(mulmod_u128(a.0 % m.0, b.0 % m.0, m.0)))
}

/// Returns `a^e mod m` by square-and-multiply.
pub fn powmod(a: WideInt, e: WideInt, m: WideInt) -> Result<WideInt> {
    if m.0 == 0 {
        return Err(Error::Domain("modulus is zero"));
    }
    Ok(WideInt(powmod_u128(a.0, e.0, m.0)))
}

/// Returns the inverse of `a` modulo `m`.
pub fn modinv(a: WideInt, m: WideInt) -> Result<WideInt> {
    if m.0 < 2 {
        return Err(Error::Domain("modulus below 2"));
    }
    modinv_u128(a.0 % m.0, m.0)
        .map(WideInt)
        .ok_or(Error::NotInvertible {
            value: a.0,
            modulus: m.0,
        })
}

/// `(a * b) mod m` for `a, b < m < 2^127`.
#[inline]
pub(crate) fn mulmod_u128(a: u128, b: u128, m: u128) -> u128 {
    debug_assert!(a < m && b < m);
    if m <= 1 << 64 {
        return (a * b) % m;
    }
    // a, b < m < 2^127, so doubling never leaves u128.
    let mut acc = 0u128;
    let top = 128 - b.leading_zeros();
    for bit in (0..top).rev() {
        acc <<= 1;
        if acc >= m {
            acc -= m;
        }
        if (b >> bit) & 1 == 1 {
            acc += a;
            if acc >= m {
                acc -= m;
            }
        }
    }
    acc
}

pub(crate) fn powmod_u128(base: u128, exp: u128, m: u128) -> u128 {
    if m == 1 {
        return 0;
    }
    if m <= u64::MAX as u128 {
        let m64 = m as u64;
        let base = (base % m) as u64;
        return if m64 & 1 == 1 {
            Mont64::new(m64).pow(base, exp)
        } else {
            let mut result = 1u64;
            let mut b = base;
            let mut e = exp;
            while e > 0 {
                if e & 1 == 1 {
                    result = mulmod_u64(result, b, m64);
                }
                b = mulmod_u64(b, b, m64);
                e >>= 1;
            }
            result as u128
        };
    }
    let base = base % m;
    if m & 1 == 1 {
        return Mont128::new(m).pow(base, exp);
    }
    let mut result = 1u128;
    let mut b = base;
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            result = mulmod_u128(result, b, m);
        }
        b = mulmod_u128(b, b, m);
        e >>= 1;
    }
    result
}

#[inline]
pub(crate) fn mulmod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// Inverse of `a` modulo `m` (`m >= 2`), or `None` when they share a factor.
pub(crate) fn modinv_u128(a: u128, m: u128) -> Option<u128> {
    // Both fit in i128 because they are below 2^127.
    let (mut old_r, mut r) = ((a % m) as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u128)
}

pub(crate) fn modinv_u64(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = ((a % m) as i64, m as i64);
    if m > i64::MAX as u64 {
        return modinv_u128(a as u128, m as u128).map(|v| v as u64);
    }
    let (mut old_s, mut s) = (1i64, 0i64);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i64) as u64)
}

pub fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Full 256-bit product of two `u128` values as `(high, low)`.
#[inline]
pub(crate) fn mul_wide(a: u128, b: u128) -> (u128, u128) {
    const MASK: u128 = u64::MAX as u128;
    let (a0, a1) = (a & MASK, a >> 64);
    let (b0, b1) = (b & MASK, b >> 64);
    let p00 = a0 * b0;
    let p01 = a0 * b1;
    let p10 = a1 * b0;
    let p11 = a1 * b1;
    let mid = (p00 >> 64) + (p01 & MASK) + (p10 & MASK);
    let lo = (p00 & MASK) | (mid << 64);
    let hi = p11 + (p01 >> 64) + (p10 >> 64) + (mid >> 64);
    (hi, lo)
}

/// Montgomery arithmetic modulo an odd 64-bit modulus.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Mont64 {
    m: u64,
    m_inv: u64,
    r2: u64,
}

impl Mont64 {
    pub(crate) fn new(m: u64) -> Self {
        debug_assert!(m & 1 == 1);
        let mut inv = m;
        for _ in 0..5 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(m.wrapping_mul(inv)));
        }
        let r = ((1u128 << 64) % m as u128) as u64;
        let r2 = mulmod_u64(r, r, m);
        Mont64 { m, m_inv: inv, r2 }
    }

    #[inline]
    fn redc(&self, t: u128) -> u64 {
        let lo = t as u64;
        let hi = (t >> 64) as u64;
        let q = lo.wrapping_mul(self.m_inv);
        let qm_hi = ((q as u128 * self.m as u128) >> 64) as u64;
        if hi >= qm_hi {
            hi - qm_hi
        } else {
            hi.wrapping_sub(qm_hi).wrapping_add(self.m)
        }
    }

    #[inline]
    pub(crate) fn mul(&self, a: u64, b: u64) -> u64 {
        self.redc(a as u128 * b as u128)
    }

    #[inline]
    pub(crate) fn to_mont(&self, a: u64) -> u64 {
        self.mul(a % self.m, self.r2)
    }

    #[inline]
    pub(crate) fn from_mont(&self, a: u64) -> u64 {
        self.redc(a as u128)
    }

    pub(crate) fn pow(&self, base: u64, exp: u128) -> u128 {
        let mut result = self.to_mont(1);
        let mut b = self.to_mont(base);
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(result, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        self.from_mont(result) as u128
    }
}

/// Montgomery arithmetic modulo an odd modulus in `[2^64, 2^127)`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Mont128 {
    m: u128,
    m_inv: u128,
    r2: u128,
}

impl Mont128 {
    pub(crate) fn new(m: u128) -> Self {
        debug_assert!(m & 1 == 1);
        let mut inv = m;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u128.wrapping_sub(m.wrapping_mul(inv)));
        }
        let r = (u128::MAX % m + 1) % m;
        let r2 = mulmod_u128(r, r, m);
        Mont128 { m, m_inv: inv, r2 }
    }

    #[inline]
    fn redc(&self, hi: u128, lo: u128) -> u128 {
        let q = lo.wrapping_mul(self.m_inv);
        let (qm_hi, _) = mul_wide(q, self.m);
        if hi >= qm_hi {
            hi - qm_hi
        } else {
            hi.wrapping_sub(qm_hi).wrapping_add(self.m)
        }
    }

    #[inline]
    pub(crate) fn mul(&self, a: u128, b: u128) -> u128 {
        let (hi, lo) = mul_wide(a, b);
        self.redc(hi, lo)
    }

    pub(crate) fn to_mont(&self, a: u128) -> u128 {
        self.mul(a % self.m, self.r2)
    }

    pub(crate) fn from_mont(&self, a: u128) -> u128 {
        self.redc(0, a)
    }

    pub(crate) fn pow(&self, base: u128, exp: u128) -> u128 {
        let mut result = self.to_mont(1);
        let mut b = self.to_mont(base);
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(result, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        self.from_mont(result)
    }
}

/// Floor of the square root.
pub fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x.checked_mul(x).is_none_or(|sq| sq > n) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).is_some_and(|sq| sq <= n) {
        x += 1;
    }
    x
}

/// Floor of the `k`-th root, `k >= 1`.
pub fn iroot(n: u128, k: u32) -> u128 {
    assert!(k >= 1);
    if k == 1 || n < 2 {
        return n;
    }
    if k == 2 {
        return isqrt(n);
    }
    if k >= 128 {
        return 1;
    }
    let fits = |x: u128| x.checked_pow(k).is_some_and(|v| v <= n);
    let mut x = (n as f64).powf(1.0 / k as f64) as u128;
    while x > 0 && !fits(x) {
        x -= 1;
    }
    while fits(x + 1) {
        x += 1;
    }
    x
}

/// `Some((root, exp))` with `exp >= 2` prime when `n = root^exp`.
pub fn perfect_power(n: u128) -> Option<(u128, u32)> {
    if n < 4 {
        return None;
    }
    let bits = 128 - n.leading_zeros();
    let mut exp = 2u32;
    while exp < bits {
        if is_small_prime(exp) {
            let r = iroot(n, exp);
            if r > 1 && r.pow(exp) == n {
                return Some((r, exp));
            }
        }
        exp += 1;
    }
    None
}

fn is_small_prime(v: u32) -> bool {
    v >= 2 && (2..).take_while(|d| d * d <= v).all(|d| !v.is_multiple_of(d))
}

/// Jacobi symbol `(a / n)` for odd `n >= 1`.
pub fn jacobi(a: u128, n: u128) -> i32 {
    assert!(n & 1 == 1, "jacobi symbol needs an odd modulus");
    let mut a = a % n;
    let mut n = n;
    let mut sign = 1;
    while a != 0 {
        while a & 1 == 0 {
            a >>= 1;
            let r = n & 7;
            if r == 3 || r == 5 {
                sign = -sign;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a & 3 == 3 && n & 3 == 3 {
            sign = -sign;
        }
        a %= n;
    }
    if n == 1 {
        sign
    } else {
        0
    }
}
