#![no_main]

use libfuzzer_sys::fuzz_target;
use subspace_lab::gap::parse_partition_parameter;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = parse_partition_parameter(text);
    }
});
