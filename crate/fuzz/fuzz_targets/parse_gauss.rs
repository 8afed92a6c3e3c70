#![no_main]

use knotforge::codes::parse_gauss;
use knotforge::robot::{is_ascending, run_robot_gauss};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(code) = parse_gauss(text) else { return };
    let again = parse_gauss(&code.to_string()).expect("printed codes parse");
    assert_eq!(again, code);
    assert!(is_ascending(&run_robot_gauss(&code).output_code));
});
