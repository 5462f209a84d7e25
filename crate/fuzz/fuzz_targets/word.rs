#![no_main]

use libfuzzer_sys::fuzz_target;
use mpv_core::words::Word;

fuzz_target!(|data: &str| {
    if let Ok(w) = data.parse::<Word>() {
        let again: Word = w.to_string().parse().expect("display output must parse");
        assert_eq!(w, again);
    }
});
