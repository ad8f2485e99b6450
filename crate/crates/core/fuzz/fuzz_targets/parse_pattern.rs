#![no_main]

use libfuzzer_sys::fuzz_target;
use prime_patterns::Pattern;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(p) = text.parse::<Pattern>() {
        // Accepted patterns print back to an equal pattern.
        let again: Pattern = p.to_string().parse().expect("display output parses");
        assert_eq!(again, p);
        let _ = p.first_obstruction();
    }
});
