#![no_main]

use cel::syntax::{parse_formula_with, ParseOptions};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    for default_variant in [None, Some(cel::syntax::Variant::V11)] {
        let opts = ParseOptions { default_variant };
        if let Ok(f) = parse_formula_with(text, &opts) {
            let _ = cel::syntax::formula_info(&f);
            let _ = f.context_vocabulary();
        }
    }
});
