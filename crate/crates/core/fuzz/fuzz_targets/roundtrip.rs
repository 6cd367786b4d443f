#![no_main]

use libfuzzer_sys::fuzz_target;
use polweak::network::{parse_network, serialize_network};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(spec) = parse_network(text) else { return };
    let canonical = serialize_network(&spec);
    let again = parse_network(&canonical).expect("canonical form must parse");
    assert_eq!(serialize_network(&again), canonical);
});
