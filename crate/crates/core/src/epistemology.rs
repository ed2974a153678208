//! Epistemological positions as presets over the logic, and the suite of
//! known results run through both deciders.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::corpus::verdict_corpus;
use crate::dialogue::{has_winning_strategy_with, GameConfig, DEFAULT_BUDGET};
use crate::kripke::{ContextEnv, EnvError};
use crate::prove::prove_cel;
use crate::syntax::{
    agent_context, formula_info, parse_context, parse_formula, render_formula, ContextFormula,
    Formula, Variant,
};

/// An epistemological position: which knowledge operator it uses and how
/// it reads contexts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PositionPreset {
    /// Absolute knowledge; every context is trivially satisfied.
    Sceptic,
    /// Absolute knowledge; contexts carry the anti-sceptical standard
    /// `anti`, which must be strictly stronger than the sceptical `scep`.
    AntiSceptic {
        anti: ContextFormula,
        scep: ContextFormula,
    },
    /// Knowledge is settled in the subject's context.
    Contextualist,
    /// Both the standard and the continuation belong to the subject.
    Subjectivist,
}

impl PositionPreset {
    /// Anti-sceptic preset with the reserved atom `_anti` as its standard
    /// and the trivial sceptical standard.
    pub fn anti_sceptic_default() -> PositionPreset {
        PositionPreset::AntiSceptic {
            anti: parse_context("_anti").expect("reserved atom parses"),
            scep: ContextFormula::Top,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            PositionPreset::Sceptic => "sceptic",
            PositionPreset::AntiSceptic { .. } => "anti-sceptic",
            PositionPreset::Contextualist => "contextualist",
            PositionPreset::Subjectivist => "subjectivist",
        }
    }

    pub fn variant(&self) -> Variant {
        match self {
            PositionPreset::Sceptic | PositionPreset::AntiSceptic { .. } => Variant::V11,
            PositionPreset::Contextualist => Variant::V12,
            PositionPreset::Subjectivist => Variant::V22,
        }
    }

    /// Looks a preset up by name; the anti-sceptic gets its defaults.
    pub fn from_name(name: &str) -> Option<PositionPreset> {
        Some(match name {
            "sceptic" => PositionPreset::Sceptic,
            "anti-sceptic" => PositionPreset::anti_sceptic_default(),
            "contextualist" => PositionPreset::Contextualist,
            "subjectivist" => PositionPreset::Subjectivist,
            _ => return None,
        })
    }
}

impl fmt::Display for PositionPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum PresetError {
    #[error("anti-sceptical context `{anti}` does not imply sceptical context `{scep}`")]
    AntiDoesNotImplyScep {
        anti: ContextFormula,
        scep: ContextFormula,
    },
    #[error("sceptical context `{scep}` implies anti-sceptical context `{anti}`; the standards coincide")]
    ScepImpliesAnti {
        anti: ContextFormula,
        scep: ContextFormula,
    },
    #[error(transparent)]
    Env(#[from] EnvError),
}

/// Whether `a → b` holds under every valuation of their atoms.
fn context_implies(a: &ContextFormula, b: &ContextFormula) -> bool {
    let atoms: Vec<String> = a.atoms().union(&b.atoms()).cloned().collect();
    (0u64..1 << atoms.len()).all(|bits| {
        let value = |name: &str| {
            let k = atoms.iter().position(|x| x == name).expect("atom listed");
            bits >> k & 1 == 1
        };
        !a.holds(value) || b.holds(value)
    })
}

/// Checks the anti-sceptic constraint: `anti → scep` is valid and the
/// converse is not.
pub fn check_anti_sceptic(anti: &ContextFormula, scep: &ContextFormula) -> Result<(), PresetError> {
    if !context_implies(anti, scep) {
        return Err(PresetError::AntiDoesNotImplyScep {
            anti: anti.clone(),
            scep: scep.clone(),
        });
    }
    if context_implies(scep, anti) {
        return Err(PresetError::ScepImpliesAnti {
            anti: anti.clone(),
            scep: scep.clone(),
        });
    }
    Ok(())
}

/// Every context name the formula mentions or whose owner occurs in it.
fn contexts_of(f: &Formula) -> BTreeSet<String> {
    let info = formula_info(f);
    let mut out = f.context_vocabulary();
    out.extend(info.contexts);
    out.extend(info.agents.iter().map(|a| agent_context(a)));
    out
}

/// Reads `f` from the standpoint of `preset`: untagged operators get the
/// preset's variant, tagged ones are kept, and the returned environment
/// binds contexts as the position requires.
pub fn apply_preset(
    f: &Formula,
    preset: &PositionPreset,
) -> Result<(Formula, ContextEnv), PresetError> {
    let tagged = f.fill_untagged(preset.variant());
    let env = match preset {
        PositionPreset::Sceptic => ContextEnv::from_bindings(
            contexts_of(&tagged)
                .into_iter()
                .map(|c| (c, ContextFormula::Top)),
        )?,
        PositionPreset::AntiSceptic { anti, scep } => {
            check_anti_sceptic(anti, scep)?;
            ContextEnv::from_bindings(contexts_of(&tagged).into_iter().map(|c| (c, anti.clone())))?
        }
        PositionPreset::Contextualist | PositionPreset::Subjectivist => ContextEnv::fresh(),
    };
    Ok((tagged, env))
}

/// Outcome of one decider on one row.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteVerdict {
    Valid,
    Invalid,
    /// The decider could not reach a verdict; the message says why.
    Failed(String),
}

impl SuiteVerdict {
    fn from_bool(valid: bool) -> SuiteVerdict {
        if valid {
            SuiteVerdict::Valid
        } else {
            SuiteVerdict::Invalid
        }
    }
}

impl fmt::Display for SuiteVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SuiteVerdict::Valid => f.write_str("valid"),
            SuiteVerdict::Invalid => f.write_str("invalid"),
            SuiteVerdict::Failed(why) => write!(f, "failed ({why})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteRow {
    pub anchor: String,
    pub formula: String,
    /// Position whose preset was applied, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub position: Option<String>,
    pub expected: SuiteVerdict,
    pub tableau: SuiteVerdict,
    pub dialogue: SuiteVerdict,
    pub agree: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub rows: Vec<SuiteRow>,
}

impl SuiteReport {
    pub fn all_agree(&self) -> bool {
        self.rows.iter().all(|r| r.agree)
    }

    /// 0 when every row agrees with its expected verdict, 1 otherwise.
    pub fn summary_code(&self) -> i32 {
        i32::from(!self.all_agree())
    }

    pub fn mismatches(&self) -> impl Iterator<Item = &SuiteRow> {
        self.rows.iter().filter(|r| !r.agree)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Column-aligned plain text, one row per line plus a summary line.
    pub fn to_text(&self) -> String {
        let head = ["", "expected", "tableau", "dialogue", "row"];
        let cells: Vec<[String; 5]> = self
            .rows
            .iter()
            .map(|r| {
                let anchor = match &r.position {
                    Some(p) => format!("{} [{p}]", r.anchor),
                    None => r.anchor.clone(),
                };
                [
                    if r.agree { "ok" } else { "MISMATCH" }.to_string(),
                    r.expected.to_string(),
                    r.tableau.to_string(),
                    r.dialogue.to_string(),
                    format!("{anchor}: {}", r.formula),
                ]
            })
            .collect();
        let mut widths = head.map(str::len);
        for row in &cells {
            for (w, c) in widths.iter_mut().zip(row) {
                *w = (*w).max(c.len());
            }
        }
        let mut out = String::new();
        let mut line = |cols: [&str; 5]| {
            let mut s = String::new();
            for (k, c) in cols.iter().enumerate() {
                if k + 1 == cols.len() {
                    s.push_str(c);
                } else {
                    s.push_str(&format!("{c:<w$}  ", w = widths[k]));
                }
            }
            out.push_str(s.trim_end());
            out.push('\n');
        };
        line(head);
        for row in &cells {
            line([&row[0], &row[1], &row[2], &row[3], &row[4]]);
        }
        let bad = self.mismatches().count();
        out.push_str(&format!(
            "{} rows, {} agree, {} mismatch\n",
            self.rows.len(),
            self.rows.len() - bad,
            bad
        ));
        out
    }
}

fn run_row(
    anchor: String,
    formula: &Formula,
    env: ContextEnv,
    position: Option<&PositionPreset>,
    expected: bool,
) -> SuiteRow {
    let tableau = match prove_cel(formula, &env) {
        Ok(v) => SuiteVerdict::from_bool(v.is_valid()),
        Err(e) => SuiteVerdict::Failed(e.to_string()),
    };
    let config = GameConfig {
        env,
        ..GameConfig::default()
    };
    let dialogue = match has_winning_strategy_with(formula, config, DEFAULT_BUDGET) {
        Ok(o) => SuiteVerdict::from_bool(o.proponent_wins()),
        Err(e) => SuiteVerdict::Failed(e.to_string()),
    };
    let expected = SuiteVerdict::from_bool(expected);
    SuiteRow {
        anchor,
        formula: render_formula(formula),
        position: position.map(|p| p.name().to_string()),
        agree: tableau == expected && dialogue == expected,
        expected,
        tableau,
        dialogue,
    }
}

/// Position-specific rows: `(anchor, preset, formula, expected)`.
fn position_rows() -> Vec<(&'static str, PositionPreset, &'static str, bool)> {
    vec![
        (
            "scepticism makes relativization idle",
            PositionPreset::Sceptic,
            "(K{j} p)^ci <-> K{j} p",
            true,
        ),
        (
            "scepticism: relativized knowledge is factive",
            PositionPreset::Sceptic,
            "(K{j} p)^ci -> p",
            true,
        ),
        (
            "anti-scepticism: relativized knowledge need not be knowledge",
            PositionPreset::anti_sceptic_default(),
            "(K{j} p)^ci -> K{j} p",
            false,
        ),
        (
            "anti-scepticism: knowledge survives relativization",
            PositionPreset::anti_sceptic_default(),
            "K{j} p -> (K{j} p)^ci",
            true,
        ),
        (
            "contextualist introspection across contexts",
            PositionPreset::Contextualist,
            "(K{i} a)^ci -> (K{i} K{i} a)^cj",
            false,
        ),
        (
            "subjectivist introspection across contexts",
            PositionPreset::Subjectivist,
            "(K{i} a)^ci -> (K{i} K{i} a)^cj",
            true,
        ),
    ]
}

/// Runs the verdict corpus and the position rows through both the tableau
/// and the dialogue search. Rows are in a fixed order, so the report is
/// identical on every run.
pub fn run_paper_suite() -> SuiteReport {
    let mut rows: Vec<SuiteRow> = verdict_corpus()
        .into_iter()
        .map(|e| run_row(e.anchor, &e.formula, ContextEnv::fresh(), None, e.valid))
        .collect();
    for (anchor, preset, text, expected) in position_rows() {
        let parsed = parse_formula(text).expect("position row parses");
        let (formula, env) = apply_preset(&parsed, &preset).expect("built-in preset applies");
        rows.push(run_row(
            anchor.to_string(),
            &formula,
            env,
            Some(&preset),
            expected,
        ));
    }
    SuiteReport { rows }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn c(s: &str) -> ContextFormula {
        parse_context(s).unwrap()
    }

    #[test]
    fn sceptic_binds_everything_to_top_and_collapses() {
        let (g, env) = apply_preset(&f("(K{j} p)^ci"), &PositionPreset::Sceptic).unwrap();
        assert_eq!(g, f("(K{j,1.1} p)^ci"));
        assert_eq!(env.get("ci"), Some(&ContextFormula::Top));
        assert_eq!(env.get("cj"), Some(&ContextFormula::Top));
        let (g, env) =
            apply_preset(&f("(K{j} p)^ci <-> K{j} p"), &PositionPreset::Sceptic).unwrap();
        assert!(prove_cel(&g, &env).unwrap().is_valid());
    }

    #[test]
    fn contextualist_only_retags() {
        let (g, env) = apply_preset(&f("K{i} a"), &PositionPreset::Contextualist).unwrap();
        assert_eq!(g, Formula::know("i", Variant::V12, Formula::atom("a")));
        assert_eq!(env, ContextEnv::fresh());
    }

    #[test]
    fn explicit_tags_survive() {
        let (g, _) = apply_preset(&f("K{i,2.1} K{i} a"), &PositionPreset::Subjectivist).unwrap();
        assert_eq!(g, f("K{i,2.1} K{i,2.2} a"));
    }

    #[test]
    fn anti_sceptic_constraint() {
        assert!(check_anti_sceptic(&c("p & q"), &ContextFormula::Top).is_ok());
        assert!(check_anti_sceptic(&c("p & q"), &c("p")).is_ok());
        assert!(matches!(
            check_anti_sceptic(&ContextFormula::Top, &c("p & q")),
            Err(PresetError::AntiDoesNotImplyScep { .. })
        ));
        assert!(matches!(
            check_anti_sceptic(&c("p"), &c("p")),
            Err(PresetError::ScepImpliesAnti { .. })
        ));
        let reversed = PositionPreset::AntiSceptic {
            anti: ContextFormula::Top,
            scep: c("p & q"),
        };
        assert!(apply_preset(&f("(K{j} p)^ci"), &reversed).is_err());
        let (_, env) =
            apply_preset(&f("(K{j} p)^ci"), &PositionPreset::anti_sceptic_default()).unwrap();
        assert_eq!(env.get("ci"), Some(&c("_anti")));
    }

    #[test]
    fn anti_sceptic_body_may_not_mention_a_bound_context() {
        let preset = PositionPreset::AntiSceptic {
            anti: c("ci & p"),
            scep: c("p"),
        };
        assert!(matches!(
            apply_preset(&f("(K{j} p)^ci"), &preset),
            Err(PresetError::Env(_))
        ));
    }

    #[test]
    fn presets_keep_the_skeleton() {
        let src = f("(K{j} (p -> K{k,2.1} q) & ~P{j} p)^ci");
        let erase = |g: &Formula| g.map_tags(&|_| None);
        for name in ["sceptic", "anti-sceptic", "contextualist", "subjectivist"] {
            let preset = PositionPreset::from_name(name).unwrap();
            let (g, _) = apply_preset(&src, &preset).unwrap();
            assert_eq!(erase(&g), erase(&src), "{name}");
        }
    }

    #[test]
    fn suite_agrees_everywhere_and_is_deterministic() {
        let a = run_paper_suite();
        assert!(a.all_agree(), "{}", a.to_text());
        assert_eq!(a.summary_code(), 0);
        let normality: Vec<_> = a
            .rows
            .iter()
            .filter(|r| r.anchor.starts_with("normality"))
            .collect();
        assert_eq!(normality.len(), 4);
        assert!(normality.iter().all(|r| r.tableau == SuiteVerdict::Valid));
        let b = run_paper_suite();
        assert_eq!(a, b);
        assert_eq!(a.to_json(), b.to_json());
        assert!(a.to_text().ends_with("0 mismatch\n"));
    }
}
