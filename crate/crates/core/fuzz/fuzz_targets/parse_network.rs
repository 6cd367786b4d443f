#![no_main]

use libfuzzer_sys::fuzz_target;
use polweak::network::parse_network;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Err(e) = parse_network(text) {
        // Line numbers point into the input or one past its end.
        assert!(e.line >= 1 && e.line <= text.lines().count() + 1);
        let _ = e.to_string();
    }
});
