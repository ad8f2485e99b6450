//! Runs every checked-in fuzz seed through the parser it targets.

use std::fs;
use std::path::PathBuf;

use prime_patterns::checkpoint::Checkpoint;
use prime_patterns::primality::PseudosquareTable;
use prime_patterns::{Pattern, WideInt};

fn seeds(target: &str) -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fuzz/corpus").join(target);
    let mut out: Vec<(String, String)> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let path = e.unwrap().path();
            let name = path.file_name().unwrap().to_string_lossy().into_owned();
            (name, fs::read_to_string(&path).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn pattern_seeds() {
    for (name, text) in seeds("parse_pattern") {
        let p: Pattern = text.parse().unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(p.to_string().parse::<Pattern>().unwrap(), p, "{name}");
        assert_eq!(p.admissible(), name != "inadmissible", "{name}");
    }
}

#[test]
fn checkpoint_seeds() {
    for (name, text) in seeds("parse_checkpoint") {
        let c: Checkpoint = text.parse().unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(c.to_text(), text, "{name}");
    }
}

#[test]
fn pseudosquare_seeds() {
    for (name, text) in seeds("parse_pseudosquare_table") {
        let t: PseudosquareTable = text.parse().unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(t.to_text(), text, "{name}");
    }
}

#[test]
fn wide_int_seeds() {
    for (name, text) in seeds("parse_wide_int") {
        let v: WideInt = text.parse().unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(v.to_string().parse::<WideInt>().unwrap(), v, "{name}");
    }
}

mod arbitrary_input {
    use super::*;
    use proptest::prelude::*;

    fn mutated(target: &'static str) -> impl Strategy<Value = String> {
        let base = seeds(target);
        (0..base.len(), prop::collection::vec((any::<prop::sample::Index>(), "[ -~\n]{0,3}"), 0..6))
            .prop_map(move |(i, edits)| {
                let mut s = base[i].1.clone();
                for (at, insert) in edits {
                    let mut cut = at.index(s.len() + 1);
                    while !s.is_char_boundary(cut) {
                        cut -= 1;
                    }
                    let end = (cut + insert.len()).min(s.len());
                    let end = (end..=s.len()).find(|&e| s.is_char_boundary(e)).unwrap();
                    s.replace_range(cut..end, &insert);
                }
                s
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(3000))]

        #[test]
        fn pattern_parser(s in prop_oneof![mutated("parse_pattern"), "[x0-9+*, -]{0,40}"]) {
            if let Ok(p) = s.parse::<Pattern>() {
                prop_assert_eq!(p.to_string().parse::<Pattern>().unwrap(), p.clone());
                let _ = p.first_obstruction();
            }
        }

        #[test]
        fn checkpoint_parser(s in mutated("parse_checkpoint")) {
            if let Ok(c) = s.parse::<Checkpoint>() {
                let again: Checkpoint = c.to_text().parse().unwrap();
                prop_assert_eq!(again.stripes, c.stripes);
            }
        }

        #[test]
        fn pseudosquare_parser(s in mutated("parse_pseudosquare_table")) {
            if let Ok(t) = s.parse::<PseudosquareTable>() {
                prop_assert_eq!(t.to_text().parse::<PseudosquareTable>().unwrap(), t);
            }
        }

        #[test]
        fn wide_int_parser(s in prop_oneof![mutated("parse_wide_int"), "[0-9e^_ -]{0,45}"]) {
            if let Ok(v) = s.parse::<WideInt>() {
                prop_assert_eq!(v.to_string().parse::<WideInt>().unwrap(), v);
            }
        }
    }
}
