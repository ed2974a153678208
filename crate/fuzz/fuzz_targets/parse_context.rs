#![no_main]

use cel::syntax::parse_context;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(c) = parse_context(text) {
            assert_eq!(parse_context(&c.to_string()).as_ref(), Ok(&c));
        }
    }
});
