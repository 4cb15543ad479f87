#![no_main]

use std::sync::{Arc, OnceLock};

use libfuzzer_sys::fuzz_target;
use subspace_lab::arith::algebraic::parse_algebraic_real;
use subspace_lab::arith::field::{parse_nf_expression, NumberField};

fn field() -> &'static Arc<NumberField> {
    static FIELD: OnceLock<Arc<NumberField>> = OnceLock::new();
    FIELD.get_or_init(|| NumberField::new(parse_algebraic_real("poly=[-2,0,0,1]; interval=[1,2]").unwrap()))
}

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = parse_nf_expression(text, None);
        let _ = parse_nf_expression(text, Some(field()));
    }
});
