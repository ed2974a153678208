//! Runs the checked-in fuzz seeds through the same entry points as the
//! fuzz targets, so the assertions those targets make hold on stable too.

use std::fs;
use std::path::PathBuf;

use cel::dialogue::{render_transcript, replay, GameConfig, PlayScript, TranscriptStyle};
use cel::kripke::{check_model, satisfies, ContextEnv, KripkeModel};
use cel::syntax::{
    formula_info, parse_context, parse_formula, parse_formula_with, render_formula, ParseOptions,
    Variant,
};

fn seeds(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(target);
    let mut out: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let path = e.unwrap().path();
            let name = path.file_name().unwrap().to_string_lossy().into_owned();
            (name, fs::read(&path).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn parse_formula_seeds() {
    let mut parsed = 0;
    for (_, data) in seeds("parse_formula") {
        let text = String::from_utf8(data).unwrap();
        for default_variant in [None, Some(Variant::V11)] {
            if let Ok(f) = parse_formula_with(&text, &ParseOptions { default_variant }) {
                formula_info(&f);
                parsed += 1;
            }
        }
    }
    assert!(parsed > 0);
}

#[test]
fn parse_context_seeds() {
    for (name, data) in seeds("parse_context") {
        let text = String::from_utf8(data).unwrap();
        if let Ok(c) = parse_context(&text) {
            assert_eq!(parse_context(&c.to_string()).as_ref(), Ok(&c), "{name}");
        }
    }
}

#[test]
fn model_json_seeds() {
    let f = parse_formula("(K{i,1.2} p -> P{j,2.2} q)^ci").unwrap();
    let mut good = 0;
    for (name, data) in seeds("model_json") {
        let Ok(m) = serde_json::from_slice::<KripkeModel>(&data) else {
            continue;
        };
        let ok = check_model(&m).is_empty();
        good += usize::from(ok);
        for w in m.worlds.iter().take(4) {
            let r = satisfies(&m, w, &ContextEnv::fresh(), &f);
            assert!(ok || r.is_err(), "{name}");
        }
        m.to_dot(m.worlds.first().map(String::as_str));
    }
    assert!(good >= 2);
}

#[test]
fn env_json_seeds() {
    for (name, data) in seeds("env_json") {
        if let Ok(env) = serde_json::from_slice::<ContextEnv>(&data) {
            let text = serde_json::to_string(&env).unwrap();
            assert_eq!(
                serde_json::from_str::<ContextEnv>(&text).unwrap(),
                env,
                "{name}"
            );
        }
    }
}

#[test]
fn play_script_seeds() {
    let mut replayed = 0;
    for (name, data) in seeds("play_script") {
        let script: PlayScript = serde_json::from_slice(&data).unwrap();
        if let Ok(end) = replay(&script.moves, GameConfig::default()) {
            assert_eq!(end.moves(), script.moves, "{name}");
            replayed += 1;
        }
        render_transcript(&script.moves, TranscriptStyle::Markdown);
    }
    assert_eq!(replayed, 11);
}

#[test]
fn roundtrip_seeds() {
    for (name, data) in seeds("roundtrip") {
        let text = String::from_utf8(data).unwrap();
        if let Ok(f) = parse_formula(&text) {
            let rendered = render_formula(&f);
            assert_eq!(
                parse_formula(&rendered).as_ref(),
                Ok(&f),
                "{name}: {rendered}"
            );
            if f.size() <= 40 {
                if let Ok(trace) = cel::reduce::reduce_full(&f) {
                    assert!(trace.result.is_el());
                }
            }
        }
    }
}
