#![no_main]

use libfuzzer_sys::fuzz_target;
use prime_patterns::WideInt;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(v) = text.parse::<WideInt>() {
        assert_eq!(v.to_string().parse::<WideInt>().expect("decimal parses"), v);
    }
});
