#![no_main]

use libfuzzer_sys::fuzz_target;
use subspace_lab::config::parse_vector_file;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = parse_vector_file(text);
    }
});
