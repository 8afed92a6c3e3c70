#![no_main]

use knotforge::codes::DiagramJson;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(d) = DiagramJson::parse(text) else { return };
    assert!(d.validate().is_empty());
    let printed = d.to_json().to_string_pretty();
    let again = DiagramJson::parse(&printed).expect("printed JSON parses");
    assert_eq!(again.to_json().to_string_pretty(), printed);
});
