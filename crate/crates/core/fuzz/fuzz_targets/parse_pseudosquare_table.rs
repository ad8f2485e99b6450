#![no_main]

use libfuzzer_sys::fuzz_target;
use prime_patterns::primality::PseudosquareTable;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(t) = text.parse::<PseudosquareTable>() {
        assert_eq!(t.to_text().parse::<PseudosquareTable>().expect("round trip"), t);
    }
});
