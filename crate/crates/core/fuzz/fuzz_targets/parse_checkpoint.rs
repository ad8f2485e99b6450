#![no_main]

use libfuzzer_sys::fuzz_target;
use prime_patterns::checkpoint::Checkpoint;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(c) = text.parse::<Checkpoint>() {
        let again: Checkpoint = c.to_text().parse().expect("written checkpoint parses");
        assert_eq!(again.stripes.len(), c.stripes.len());
        assert_eq!(again.digest, c.digest);
    }
});
