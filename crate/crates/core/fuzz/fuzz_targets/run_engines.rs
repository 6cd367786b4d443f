#![no_main]

use libfuzzer_sys::fuzz_target;
use polweak::network::{parse_network, run_exact, run_weak};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(spec) = parse_network(text) else { return };
    // Term count doubles per PMD section.
    if spec.elements.len() > 10 {
        return;
    }
    let _ = run_exact(&spec);
    let _ = run_weak(&spec);
});
