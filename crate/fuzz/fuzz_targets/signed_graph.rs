#![no_main]

use knotforge::applications::parse_signed_graph;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(g) = parse_signed_graph(text) else { return };
    let again = parse_signed_graph(&g.to_string()).expect("printed graphs parse");
    assert!(again.same_shape(&g));
    let _ = g.faces();
});
