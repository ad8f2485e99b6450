//! Search for primes in linear patterns: twin primes, prime k-tuples,
//! Cunningham chains and similar constellations.
//!
//! A search for pattern `f_i(x) = a_i*x + b_i` up to `n` walks the residues
//! `r mod W` acceptable for a wheel of small primes, sieves each progression
//! `r + j*W` by the remaining primes up to a bound `B`, and proves the
//! survivors prime with a base-2 strong test followed by the pseudosquares
//! test.
//!
//! ```
//! use prime_patterns::{find_pattern_primes, Pattern, SearchConfig, WideInt};
//!
//! let hits = find_pattern_primes(SearchConfig::new(Pattern::quadruplet(), WideInt::from(1000u64)))?;
//! let starts: Vec<i128> = hits.iter().map(|h| h.x).collect();
//! assert_eq!(starts, [5, 11, 101, 191, 821]);
//! # Ok::<(), prime_patterns::Error>(())
//! ```

pub mod apps;
pub mod apsieve;
pub mod arith;
pub mod bits;
pub mod checkpoint;
pub mod error;
pub mod kahan;
pub mod pattern;
pub mod primality;
mod psq_table;
pub mod search;
pub mod wheel;

pub use arith::WideInt;
pub use error::{Error, Result};
pub use pattern::{ChainKind, Pattern};
pub use search::{find_pattern_primes, Hit, Search, SearchConfig};
