#![no_main]

use cel::syntax::{parse_formula, render_formula};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(f) = parse_formula(text) {
        let rendered = render_formula(&f);
        assert_eq!(parse_formula(&rendered).as_ref(), Ok(&f), "{rendered}");
        if f.size() <= 40 {
            if let Ok(trace) = cel::reduce::reduce_full(&f) {
                assert!(trace.result.is_el());
            }
        }
    }
});
