#![no_main]

use cel::kripke::{check_model, satisfies, ContextEnv, KripkeModel};
use cel::syntax::parse_formula;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(m) = serde_json::from_slice::<KripkeModel>(data) else {
        return;
    };
    let ok = check_model(&m).is_empty();
    let f = parse_formula("(K{i,1.2} p -> P{j,2.2} q)^ci").unwrap();
    for w in m.worlds.iter().take(4) {
        let r = satisfies(&m, w, &ContextEnv::fresh(), &f);
        assert!(ok || r.is_err());
    }
    let _ = m.to_dot(m.worlds.first().map(String::as_str));
});
