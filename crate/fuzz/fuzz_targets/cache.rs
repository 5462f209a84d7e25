#![no_main]

use libfuzzer_sys::fuzz_target;
use mpv_core::linalg::{parse_cache, write_cache};

fuzz_target!(|data: &str| {
    if let Ok((h, m)) = parse_cache(data) {
        let text = write_cache(&h, &m);
        let (h2, m2) = parse_cache(&text).expect("written cache must parse");
        assert_eq!(text, write_cache(&h2, &m2));
    }
});
