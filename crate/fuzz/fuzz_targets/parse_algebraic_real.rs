#![no_main]

use libfuzzer_sys::fuzz_target;
use subspace_lab::arith::algebraic::parse_algebraic_real;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = parse_algebraic_real(text);
    }
});
