#![no_main]

use libfuzzer_sys::fuzz_target;
use mpv_core::lie::{parse_lie, parse_pairs};
use mpv_core::words::Level;

fuzz_target!(|data: &str| {
    let level = Level::new(4).unwrap();
    if let Ok(x) = parse_lie(data, level) {
        let again = parse_lie(&x.to_string(), level).expect("display output must parse");
        assert_eq!(x, again);
    }
    let _ = parse_pairs(data, 7);
});
