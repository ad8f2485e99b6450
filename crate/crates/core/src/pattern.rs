//! Patterns of linear forms `a*x + b`, their admissibility and the residues
//! each prime leaves acceptable.

use std::fmt;
use std::str::FromStr;

use crate::arith::{gcd, modinv_u64, WIDE_LIMIT};
use crate::bits::BitSet;
use crate::error::{Error, Result};

/// One linear form `a*x + b` with `a >= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Form {
    pub a: u128,
    pub b: i128,
}

impl Form {
    pub const fn new(a: u128, b: i128) -> Self {
        Form { a, b }
    }

    /// `a*x + b`, or `None` if it leaves the signed 128-bit range.
    #[inline]
    pub fn eval(&self, x: i128) -> Option<i128> {
        (self.a as i128).checked_mul(x)?.checked_add(self.b)
    }

    /// The residue `x mod p` with `p | a*x + b`, or `None` when `p | a`.
    pub fn root_mod(&self, p: u64) -> Option<u64> {
        let a = (self.a % p as u128) as u64;
        if a == 0 {
            return None;
        }
        let b = self.b.rem_euclid(p as i128) as u64;
        let inv = modinv_u64(a, p).expect("p is prime and does not divide a");
        let neg_b = (p - b) % p;
        Some(((neg_b as u128 * inv as u128) % p as u128) as u64)
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.a == 1 {
            f.write_str("x")?;
        } else {
            write!(f, "{}x", self.a)?;
        }
        match self.b {
            0 => Ok(()),
            b if b > 0 => write!(f, "+{b}"),
            b => write!(f, "-{}", b.unsigned_abs()),
        }
    }
}

/// Which recurrence a Cunningham chain follows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ChainKind {
    /// `p -> 2p + 1`
    First,
    /// `p -> 2p - 1`
    Second,
}

impl FromStr for ChainKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "first" | "1" => Ok(ChainKind::First),
            "second" | "2" => Ok(ChainKind::Second),
            other => Err(Error::parse(
                "chain kind",
                format!("{other:?}: expected first or second"),
            )),
        }
    }
}

impl fmt::Display for ChainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChainKind::First => "first",
            ChainKind::Second => "second",
        })
    }
}

/// A validated list of distinct forms, each free of fixed divisors.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pattern {
    forms: Vec<Form>,
}

impl Pattern {
    pub fn new(forms: Vec<Form>) -> Result<Self> {
        if forms.is_empty() {
            return Err(Error::EmptyPattern);
        }
        for (index, form) in forms.iter().enumerate() {
            if form.a == 0 {
                return Err(Error::NonPositiveMultiplier { index });
            }
            if form.a >= WIDE_LIMIT {
                return Err(Error::Overflow);
            }
            let divisor = gcd(form.a, form.b.unsigned_abs());
            if divisor > 1 {
                return Err(Error::FixedDivisor { index, divisor });
            }
            if let Some(first) = forms[..index].iter().position(|f| f == form) {
                return Err(Error::DuplicateForm { index, first });
            }
        }
        Ok(Pattern { forms })
    }

    /// Builds from `(a, b)` pairs; a negative `a` is rejected.
    pub fn from_pairs(pairs: &[(i128, i128)]) -> Result<Self> {
        let forms = pairs
            .iter()
            .enumerate()
            .map(|(index, &(a, b))| {
                if a <= 0 {
                    Err(Error::NonPositiveMultiplier { index })
                } else {
                    Ok(Form::new(a as u128, b))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Pattern::new(forms)
    }

    pub fn twin() -> Self {
        Pattern::from_pairs(&[(1, 0), (1, 2)]).unwrap()
    }

    pub fn quadruplet() -> Self {
        Pattern::from_pairs(&[(1, 0), (1, 2), (1, 6), (1, 8)]).unwrap()
    }

    /// `(6x+1, 12x+1, 18x+1)`; a hit gives a Carmichael number as the product.
    pub fn chernick() -> Self {
        Pattern::from_pairs(&[(6, 1), (12, 1), (18, 1)]).unwrap()
    }

    /// Cunningham chain of `length` forms starting at `x`.
    pub fn chain(kind: ChainKind, length: usize) -> Result<Self> {
        if length == 0 {
            return Err(Error::EmptyPattern);
        }
        if length > 127 {
            return Err(Error::Overflow);
        }
        let forms = (0..length)
            .map(|i| {
                let a = 1u128 << i;
                let c = (a - 1) as i128;
                Form::new(
                    a,
                    match kind {
                        ChainKind::First => c,
                        ChainKind::Second => -c,
                    },
                )
            })
            .collect();
        Pattern::new(forms)
    }

    pub fn forms(&self) -> &[Form] {
        &self.forms
    }

    pub fn k(&self) -> usize {
        self.forms.len()
    }

    /// All `f_i(x)`, or `None` on 128-bit overflow.
    pub fn values(&self, x: i128) -> Option<Vec<i128>> {
        self.forms.iter().map(|f| f.eval(x)).collect()
    }

    /// True when every prime `p <= k` leaves some residue acceptable.
    pub fn admissible(&self) -> bool {
        self.first_obstruction().is_none()
    }

    /// The smallest prime `p <= k` with no acceptable residue, if any.
    pub fn first_obstruction(&self) -> Option<u64> {
        let k = self.k() as u64;
        (2..=k)
            .filter(|&p| is_prime_small(p))
            .find(|&p| self.acceptable_residues(p).count() == 0)
    }

    pub fn ensure_admissible(&self) -> Result<()> {
        match self.first_obstruction() {
            None => Ok(()),
            Some(prime) => Err(Error::Inadmissible { prime }),
        }
    }

    /// Residues `x mod p` where no form with `p ∤ a_i` is divisible by `p`.
    pub fn acceptable_residues(&self, p: u64) -> ResidueMask {
        let mut ones = BitSet::new(p as usize, true);
        for form in &self.forms {
            if let Some(root) = form.root_mod(p) {
                ones.clear(root as usize);
            }
        }
        ResidueMask { modulus: p, ones }
    }

    /// Smallest `x` with every `f_i(x) >= 2`.
    pub fn first_x(&self) -> i128 {
        self.forms
            .iter()
            .map(|f| div_ceil_i128(2 - f.b, f.a as i128))
            .max()
            .expect("pattern is non-empty")
    }

    /// Largest `x` with `max_i f_i(x) <= n`.
    pub fn last_x_below(&self, n: i128) -> i128 {
        self.forms
            .iter()
            .map(|f| (n - f.b).div_euclid(f.a as i128))
            .min()
            .expect("pattern is non-empty")
    }

    /// Largest `x` with `min_i f_i(x) <= cut`.
    pub fn last_x_touching(&self, cut: i128) -> i128 {
        self.forms
            .iter()
            .map(|f| (cut - f.b).div_euclid(f.a as i128))
            .max()
            .expect("pattern is non-empty")
    }
}

fn div_ceil_i128(num: i128, den: i128) -> i128 {
    -((-num).div_euclid(den))
}

pub(crate) fn is_prime_small(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, form) in self.forms.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{form}")?;
        }
        Ok(())
    }
}

impl FromStr for Pattern {
    type Err = Error;

    /// Comma-separated forms such as `x,x+2,x+6,x+8` or `6x+1, 12*x+1`.
    fn from_str(s: &str) -> Result<Self> {
        let cleaned: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let forms = cleaned
            .split(',')
            .enumerate()
            .map(|(i, term)| parse_form(term).map_err(|r| Error::parse("pattern", format!("form {i} ({term:?}): {r}"))))
            .collect::<Result<Vec<_>>>()?;
        Pattern::new(forms)
    }
}

fn parse_form(term: &str) -> std::result::Result<Form, String> {
    let (coef, rest) = term
        .split_once('x')
        .ok_or_else(|| "missing x".to_string())?;
    let coef = coef.strip_suffix('*').unwrap_or(coef);
    let a: u128 = if coef.is_empty() {
        1
    } else {
        parse_digits(coef)?
    };
    let b: i128 = if rest.is_empty() {
        0
    } else {
        let (neg, digits) = match rest.as_bytes()[0] {
            b'+' => (false, &rest[1..]),
            b'-' => (true, &rest[1..]),
            _ => return Err(format!("unexpected {rest:?} after x")),
        };
        let v = i128::try_from(parse_digits(digits)?).map_err(|_| "offset too large".to_string())?;
        if neg {
            -v
        } else {
            v
        }
    };
    if a == 0 {
        return Err("multiplier must be positive".into());
    }
    Ok(Form::new(a, b))
}

fn parse_digits(s: &str) -> std::result::Result<u128, String> {
    if s.is_empty() || !s.bytes().all(|c| c.is_ascii_digit()) {
        return Err(format!("expected digits, found {s:?}"));
    }
    s.parse::<u128>().map_err(|_| format!("{s:?} is too large"))
}

/// Acceptable residues modulo one prime: bit `x` is set iff `x` is acceptable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueMask {
    pub modulus: u64,
    pub ones: BitSet,
}

impl ResidueMask {
    pub fn count(&self) -> usize {
        self.ones.count_ones()
    }

    pub fn accepts(&self, x: u64) -> bool {
        self.ones.get((x % self.modulus) as usize)
    }

    /// Acceptable residues in increasing order.
    pub fn residues(&self) -> Vec<u64> {
        self.ones.iter_ones().map(|r| r as u64).collect()
    }
}
