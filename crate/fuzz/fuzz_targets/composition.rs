#![no_main]

use libfuzzer_sys::fuzz_target;
use mpv_core::words::{composition_to_word, Composition};

fuzz_target!(|data: &str| {
    if let Ok(c) = data.parse::<Composition>() {
        let again: Composition = c.to_string().parse().expect("display output must parse");
        assert_eq!(c, again);
        if c.weight() <= 64 {
            let (_, w) = composition_to_word(&c);
            assert_eq!(w.weight() as u32, c.weight());
        }
    }
});
