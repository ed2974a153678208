#![no_main]

use cel::kripke::ContextEnv;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(env) = serde_json::from_slice::<ContextEnv>(data) {
        let text = serde_json::to_string(&env).unwrap();
        assert_eq!(serde_json::from_str::<ContextEnv>(&text).unwrap(), env);
    }
});
