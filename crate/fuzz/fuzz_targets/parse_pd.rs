#![no_main]

use knotforge::codes::{parse_pd, serialize_pd};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(d) = parse_pd(text) else { return };
    assert!(d.validate().is_empty());
    let printed = serialize_pd(&d);
    let again = parse_pd(&printed).expect("printed PD parses");
    assert_eq!(serialize_pd(&again), printed);
    let _ = d.census();
});
