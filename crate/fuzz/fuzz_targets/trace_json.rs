#![no_main]

use knotforge::moves::{is_simplification, replay, MoveTrace};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(t) = MoveTrace::parse_json(text) else { return };
    if t.records.len() > 256 {
        return;
    }
    if let Ok(end) = replay(&t) {
        assert!(end.validate().is_empty());
        assert!(is_simplification(&t).is_ok());
    }
});
