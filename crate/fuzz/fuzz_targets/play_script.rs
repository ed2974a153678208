#![no_main]

use cel::dialogue::{render_transcript, replay, GameConfig, PlayScript, TranscriptStyle};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(script) = serde_json::from_slice::<PlayScript>(data) else {
        return;
    };
    if script.moves.len() > 64 {
        return;
    }
    if let Ok(end) = replay(&script.moves, GameConfig::default()) {
        assert_eq!(end.moves(), script.moves);
        let _ = end.legal_moves();
    }
    let _ = render_transcript(&script.moves, TranscriptStyle::Markdown);
});
