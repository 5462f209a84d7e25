#![no_main]

use libfuzzer_sys::fuzz_target;
use mpv_core::relations::{relation_from_json, relation_to_json};

fuzz_target!(|data: &str| {
    if let Ok((row, weight, level)) = relation_from_json(data) {
        let text = serde_json::to_string(&relation_to_json(&row, weight, level)).unwrap();
        let (again, w2, l2) = relation_from_json(&text).expect("serialized row must parse");
        assert_eq!((row.terms, weight, level), (again.terms, w2, l2));
    }
});
