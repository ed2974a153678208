use super::{Actor, Move, MoveKind};

/// Output style of [`render_transcript`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TranscriptStyle {
    Text,
    Markdown,
}

#[derive(Default)]
struct Row {
    /// `(index, "label: payload", attacked move)` per side.
    o: Option<(usize, String, Option<usize>)>,
    p: Option<(usize, String, Option<usize>)>,
}

fn rows(moves: &[Move]) -> Vec<Row> {
    let cell = |k: usize| {
        let m = &moves[k];
        let target = match m.kind {
            MoveKind::Attack { target } => Some(target),
            _ => None,
        };
        (k, format!("{}: {}", m.label, m.payload), target)
    };
    let mut keyed: Vec<(usize, Row)> = Vec::new();
    let mut answered = vec![false; moves.len()];
    for (k, m) in moves.iter().enumerate() {
        let mut row = Row::default();
        match m.kind {
            MoveKind::Thesis => {}
            MoveKind::Attack { .. } => {
                let defence = moves
                    .iter()
                    .enumerate()
                    .skip(k + 1)
                    .find(|(_, d)| d.kind == MoveKind::Defence { target: k });
                if let Some((d, dm)) = defence {
                    answered[d] = true;
                    place(&mut row, dm.actor, cell(d));
                }
            }
            MoveKind::Defence { .. } => {
                if answered[k] {
                    continue;
                }
            }
        }
        place(&mut row, m.actor, cell(k));
        keyed.push((k, row));
    }
    keyed.sort_by_key(|(k, _)| *k);
    keyed.into_iter().map(|(_, r)| r).collect()
}

fn place(row: &mut Row, actor: Actor, cell: (usize, String, Option<usize>)) {
    match actor {
        Actor::O => row.o = Some(cell),
        Actor::P => row.p = Some(cell),
    }
}

/// Lays a play out as a two-column table: O's moves on the left, P's on
/// the right, one row per attack with the defence beside it.
pub fn render_transcript(moves: &[Move], style: TranscriptStyle) -> String {
    let rows = rows(moves);
    let num = |c: &Option<(usize, String, Option<usize>)>| {
        c.as_ref()
            .map_or(String::new(), |(k, _, _)| format!("({k})"))
    };
    let text = |c: &Option<(usize, String, Option<usize>)>| {
        c.as_ref().map_or(String::new(), |(_, s, _)| s.clone())
    };
    let tgt = |c: &Option<(usize, String, Option<usize>)>| {
        c.as_ref()
            .and_then(|(_, _, t)| t.map(|t| t.to_string()))
            .unwrap_or_default()
    };
    let table: Vec<[String; 6]> = rows
        .iter()
        .map(|r| {
            [
                num(&r.o),
                text(&r.o),
                tgt(&r.o),
                tgt(&r.p),
                text(&r.p),
                num(&r.p),
            ]
        })
        .collect();
    match style {
        TranscriptStyle::Markdown => {
            let mut out = String::from("| # | O | ⇢ | ⇠ | P | # |\n|---|---|---|---|---|---|\n");
            for r in &table {
                let esc: Vec<String> = r.iter().map(|c| c.replace('|', "\\|")).collect();
                out.push_str(&format!("| {} |\n", esc.join(" | ")));
            }
            out
        }
        TranscriptStyle::Text => {
            let width = |k: usize| {
                table
                    .iter()
                    .map(|r| r[k].chars().count())
                    .max()
                    .unwrap_or(0)
            };
            let w: Vec<usize> = (0..6).map(width).collect();
            let pad = |s: &str, n: usize| format!("{s}{}", " ".repeat(n - s.chars().count()));
            let lpad = |s: &str, n: usize| format!("{}{s}", " ".repeat(n - s.chars().count()));
            let mut out = String::new();
            let o_width = w[0] + w[1] + w[2] + 2;
            out.push_str(&format!("{} || P\n", pad("O", o_width)));
            for r in &table {
                let line = format!(
                    "{} {} {} || {} {} {}",
                    lpad(&r[0], w[0]),
                    pad(&r[1], w[1]),
                    lpad(&r[2], w[2]),
                    pad(&r[3], w[3]),
                    pad(&r[4], w[4]),
                    r[5]
                );
                out.push_str(line.trim_end());
                out.push('\n');
            }
            out
        }
    }
}
