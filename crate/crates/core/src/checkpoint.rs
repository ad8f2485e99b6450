//! Resumable search state as a versioned text file.
//!
//! ```text
//! prime-patterns checkpoint 1
//! digest <sha-256 of the search configuration>
//! stripes <nu>
//! stripe: <idx> position=<p> counter=<c0,c1,...> done=<0|1> processed=<m> count=<hits>
//! bucket: <idx> <slot> <sum bits> <compensation bits>
//! hits: <idx> <x> <x> ...
//! end
//! ```
//!
//! Floating-point values are stored as the decimal form of their bit
//! patterns, so a restored sum is bit-identical. Lines starting with `#` are
//! comments.

use std::fmt::{self, Write as _};
use std::fs;
use std::io::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::kahan::{KahanBuckets, KahanSum, BUCKETS};
use crate::wheel::WheelCursor;

pub const FORMAT_VERSION: u32 = 1;
const MAGIC: &str = "prime-patterns checkpoint";
const HITS_PER_LINE: usize = 32;

/// Progress of one worker.
#[derive(Clone, Debug, PartialEq)]
pub struct StripeState {
    pub index: u64,
    pub cursor: WheelCursor,
    /// Residues of this stripe already sieved and tested.
    pub processed: u128,
    pub count: u128,
    /// Starting points found so far, when hits are kept.
    pub hits: Vec<i128>,
    pub buckets: Option<KahanBuckets>,
}

impl StripeState {
    pub fn fresh(index: u64, cursor: WheelCursor, sums: bool) -> Self {
        StripeState {
            index,
            cursor,
            processed: 0,
            count: 0,
            hits: Vec::new(),
            buckets: sums.then(KahanBuckets::default),
        }
    }

    pub fn done(&self) -> bool {
        self.cursor.exhausted
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    pub digest: String,
    /// Extra lines written as comments, for humans only.
    pub notes: Vec<String>,
    pub stripes: Vec<StripeState>,
}

impl Checkpoint {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{MAGIC} {FORMAT_VERSION}");
        for note in &self.notes {
            let _ = writeln!(out, "# {note}");
        }
        let _ = writeln!(out, "digest {}", self.digest);
        let _ = writeln!(out, "stripes {}", self.stripes.len());
        for st in &self.stripes {
            let _ = writeln!(
                out,
                "stripe: {} position={} counter={} done={} processed={} count={}",
                st.index,
                st.cursor.position,
                st.cursor,
                st.cursor.exhausted as u8,
                st.processed,
                st.count
            );
            if let Some(b) = &st.buckets {
                for (slot, k) in b.nonzero() {
                    let (s, c) = k.parts();
                    let _ = writeln!(out, "bucket: {} {slot} {} {}", st.index, s.to_bits(), c.to_bits());
                }
            }
            for chunk in st.hits.chunks(HITS_PER_LINE) {
                let _ = write!(out, "hits: {}", st.index);
                for x in chunk {
                    let _ = write!(out, " {x}");
                }
                out.push('\n');
            }
        }
        out.push_str("end\n");
        out
    }

    /// Writes to a temporary sibling and renames it over `path`.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut tmp = path.as_os_str().to_owned();
        tmp.push(".tmp");
        let tmp = Path::new(&tmp);
        {
            let mut f = fs::File::create(tmp)?;
            f.write_all(self.to_text().as_bytes())?;
            f.sync_all()?;
        }
        fs::rename(tmp, path)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        fs::read_to_string(path)?.parse()
    }
}

impl fmt::Display for Checkpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

fn corrupt(line: usize, reason: impl Into<String>) -> Error {
    Error::CheckpointCorrupt {
        line,
        reason: reason.into(),
    }
}

fn num<T: FromStr>(line: usize, what: &str, s: &str) -> Result<T> {
    s.parse().map_err(|_| corrupt(line, format!("bad {what} {s:?}")))
}

fn field<'a>(line: usize, token: Option<&'a str>, key: &str) -> Result<&'a str> {
    token
        .and_then(|t| t.strip_prefix(key))
        .and_then(|t| t.strip_prefix('='))
        .ok_or_else(|| corrupt(line, format!("expected {key}=")))
}

impl FromStr for Checkpoint {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let mut notes = Vec::new();
        let mut next = |notes: &mut Vec<String>| -> Option<(usize, &str)> {
            for (no, l) in lines.by_ref() {
                match l.strip_prefix('#') {
                    Some(n) => notes.push(n.trim().to_string()),
                    None => return Some((no, l)),
                }
            }
            None
        };

        let (no, header) = next(&mut notes).ok_or_else(|| corrupt(1, "empty file"))?;
        let version = header
            .strip_prefix(MAGIC)
            .ok_or_else(|| corrupt(no, "not a checkpoint file"))?
            .trim();
        if version != FORMAT_VERSION.to_string() {
            return Err(corrupt(no, format!("unsupported format version {version:?}")));
        }
        let (no, line) = next(&mut notes).ok_or_else(|| corrupt(no, "missing digest"))?;
        let digest = line
            .strip_prefix("digest ")
            .ok_or_else(|| corrupt(no, "expected digest"))?
            .trim()
            .to_string();
        if digest.is_empty() || !digest.bytes().all(|b| b.is_ascii_hexdigit()) {
            return Err(corrupt(no, "digest must be hexadecimal"));
        }
        let (no, line) = next(&mut notes).ok_or_else(|| corrupt(no, "missing stripe count"))?;
        let nu: u64 = num(
            no,
            "stripe count",
            line.strip_prefix("stripes ").ok_or_else(|| corrupt(no, "expected stripes"))?,
        )?;
        if nu == 0 {
            return Err(corrupt(no, "stripe count must be positive"));
        }

        let mut stripes: Vec<StripeState> = Vec::new();
        let mut ended = false;
        while let Some((no, line)) = next(&mut notes) {
            if ended {
                return Err(corrupt(no, "content after end"));
            }
            if line == "end" {
                ended = true;
                continue;
            }
            let (tag, rest) = line
                .split_once(' ')
                .ok_or_else(|| corrupt(no, "unrecognised record"))?;
            let mut tok = rest.split_whitespace();
            let idx: u64 = num(no, "stripe index", tok.next().unwrap_or(""))?;
            match tag {
                "stripe:" => {
                    if idx != stripes.len() as u64 || idx >= nu {
                        return Err(corrupt(no, "stripe records out of order"));
                    }
                    let position = num(no, "position", field(no, tok.next(), "position")?)?;
                    let mut cursor: WheelCursor = field(no, tok.next(), "counter")?
                        .parse()
                        .map_err(|_| corrupt(no, "bad counter"))?;
                    cursor.position = position;
                    cursor.exhausted = match field(no, tok.next(), "done")? {
                        "0" => false,
                        "1" => true,
                        other => return Err(corrupt(no, format!("bad done flag {other:?}"))),
                    };
                    let processed = num(no, "processed", field(no, tok.next(), "processed")?)?;
                    let count = num(no, "count", field(no, tok.next(), "count")?)?;
                    if tok.next().is_some() {
                        return Err(corrupt(no, "trailing fields"));
                    }
                    stripes.push(StripeState {
                        index: idx,
                        cursor,
                        processed,
                        count,
                        hits: Vec::new(),
                        buckets: None,
                    });
                }
                "bucket:" | "hits:" => {
                    let st = stripes
                        .last_mut()
                        .filter(|s| s.index == idx)
                        .ok_or_else(|| corrupt(no, "record does not follow its stripe"))?;
                    if tag == "hits:" {
                        for t in tok {
                            st.hits.push(num(no, "hit", t)?);
                        }
                        continue;
                    }
                    let slot: usize = num(no, "bucket slot", tok.next().unwrap_or(""))?;
                    let sum: u64 = num(no, "sum bits", tok.next().unwrap_or(""))?;
                    let comp: u64 = num(no, "compensation bits", tok.next().unwrap_or(""))?;
                    if tok.next().is_some() {
                        return Err(corrupt(no, "trailing fields"));
                    }
                    if slot >= BUCKETS {
                        return Err(corrupt(no, "bucket slot out of range"));
                    }
                    let (sum, comp) = (f64::from_bits(sum), f64::from_bits(comp));
                    if !sum.is_finite() || !comp.is_finite() {
                        return Err(corrupt(no, "non-finite bucket"));
                    }
                    st.buckets
                        .get_or_insert_with(KahanBuckets::default)
                        .set_bucket(slot, KahanSum::from_parts(sum, comp));
                }
                _ => return Err(corrupt(no, format!("unknown record {tag:?}"))),
            }
        }
        if !ended {
            return Err(corrupt(text.lines().count(), "truncated: missing end"));
        }
        if stripes.len() as u64 != nu {
            return Err(corrupt(
                text.lines().count(),
                format!("expected {nu} stripes, found {}", stripes.len()),
            ));
        }
        Ok(Checkpoint {
            digest,
            notes,
            stripes,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Checkpoint {
        let mut buckets = KahanBuckets::default();
        buckets.add(3, 1.0 / 3.0);
        buckets.add(3, 1.0 / 7.0);
        buckets.add(9999, 1e-300);
        let cursor = WheelCursor {
            counter: vec![0, 2, 1],
            position: 7,
            exhausted: false,
        };
        Checkpoint {
            digest: "00ff".into(),
            notes: vec!["pattern x,x+2".into()],
            stripes: vec![
                StripeState {
                    index: 0,
                    cursor: cursor.clone(),
                    processed: 4,
                    count: 2,
                    hits: vec![-1, 5, 11],
                    buckets: Some(buckets),
                },
                StripeState::fresh(1, cursor, true),
            ],
        }
    }

    #[test]
    fn round_trip() {
        let c = sample();
        let back: Checkpoint = c.to_text().parse().unwrap();
        // Fresh stripes have all-zero buckets, which are not written out.
        assert_eq!(back.stripes[0], c.stripes[0]);
        assert_eq!(back.stripes[1].buckets, None);
        assert_eq!(back.digest, c.digest);
        assert_eq!(back.notes, c.notes);
    }

    #[test]
    fn save_and_load() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.ckpt");
        let c = sample();
        c.save(&path).unwrap();
        assert_eq!(Checkpoint::load(&path).unwrap().stripes[0], c.stripes[0]);
    }

    #[test]
    fn rejects_damage() {
        let text = sample().to_text();
        let truncated = &text[..text.len() - 4];
        assert!(matches!(
            truncated.parse::<Checkpoint>(),
            Err(Error::CheckpointCorrupt { .. })
        ));
        let bad_version = text.replacen("checkpoint 1", "checkpoint 9", 1);
        assert!(bad_version.parse::<Checkpoint>().is_err());
        let bad_field = text.replacen("processed=4", "processed=x", 1);
        assert!(bad_field.parse::<Checkpoint>().is_err());
        let missing_stripe = text.replacen("stripes 2", "stripes 3", 1);
        assert!(missing_stripe.parse::<Checkpoint>().is_err());
        assert!("".parse::<Checkpoint>().is_err());
    }
}
