#![no_main]

use libfuzzer_sys::fuzz_target;
use subspace_lab::config::parse_form_system;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = parse_form_system(text);
    }
});
