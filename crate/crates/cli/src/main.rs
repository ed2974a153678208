use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use cel::dialogue::{
    has_winning_strategy_with, reference_plays, render_transcript, replay, Actor, DialogueOutcome,
    GameConfig, PlayScript, TranscriptStyle,
};
use cel::epistemology::{apply_preset, run_paper_suite, PositionPreset};
use cel::kripke::{find_countermodel_with, satisfies, ContextEnv, KripkeModel, SearchError};
use cel::kripke::{EnumError, DEFAULT_CEILING};
use cel::prove::{prove_cel, ProveError, Verdict};
use cel::reduce::reduce_full;
use cel::syntax::{
    formula_info, parse_context, parse_formula_with, ContextFormula, Formula, ParseOptions, Variant,
};

/// Contextual epistemic logic: parse, evaluate, reduce and decide formulas.
#[derive(Parser, Debug)]
#[command(name = "cel", version, about)]
struct Cli {
    /// Variant given to knowledge operators written without one.
    #[arg(long, global = true, default_value = "1.1", value_parser = parse_variant)]
    default_variant: Variant,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a formula and print its syntax tree.
    Parse { formula: String },
    /// Evaluate a formula at a world of a model.
    Eval {
        /// Model JSON file.
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        world: String,
        #[command(flatten)]
        env: EnvArgs,
        formula: String,
    },
    /// Rewrite all relativizations away and print every step.
    Reduce { formula: String },
    /// Decide validity with the tableau.
    Prove {
        #[command(flatten)]
        env: EnvArgs,
        formula: String,
    },
    /// Decide validity by searching the dialogue game.
    Dialogue {
        /// Positions the search may evaluate.
        #[arg(long, env = "CEL_BUDGET", default_value_t = cel::dialogue::DEFAULT_BUDGET,
              value_parser = positive)]
        budget: usize,
        /// How many worlds beyond the modal depth O may open.
        #[arg(long, default_value_t = 1)]
        slack: usize,
        /// Print the transcript as a Markdown table.
        #[arg(long)]
        markdown: bool,
        #[command(flatten)]
        env: EnvArgs,
        formula: String,
    },
    /// Check a recorded play move by move.
    Replay {
        /// Play-script JSON file.
        #[arg(required_unless_present_any = ["builtin", "list"], conflicts_with = "builtin")]
        script: Option<PathBuf>,
        /// Replay one of the bundled plays instead.
        #[arg(long)]
        builtin: Option<String>,
        /// List the bundled plays.
        #[arg(long, conflicts_with = "builtin")]
        list: bool,
        #[command(flatten)]
        env: EnvArgs,
    },
    /// Search every small model for one falsifying the formula.
    Oracle {
        #[arg(long, value_parser = positive)]
        max_worlds: usize,
        /// Upper bound on the number of models visited.
        #[arg(long, env = "CEL_BUDGET", default_value_t = DEFAULT_CEILING)]
        budget: u128,
        #[command(flatten)]
        env: EnvArgs,
        formula: String,
    },
    /// Run the table of known results through both deciders.
    Suite,
}

#[derive(Args, Debug, Clone, Default)]
struct EnvArgs {
    /// Context bindings: a JSON file, or inline JSON starting with `{`.
    #[arg(long)]
    env: Option<String>,
    /// Read the formula from the standpoint of an epistemological position.
    #[arg(long, value_parser = ["sceptic", "anti-sceptic", "contextualist", "subjectivist"],
          conflicts_with = "env")]
    preset: Option<String>,
    /// Anti-sceptical context standard (with `--preset anti-sceptic`).
    #[arg(long, requires = "preset", value_parser = parse_ctx)]
    anti: Option<ContextFormula>,
    /// Sceptical context standard (with `--preset anti-sceptic`).
    #[arg(long, requires = "preset", value_parser = parse_ctx)]
    scep: Option<ContextFormula>,
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    s.parse()
}

fn parse_ctx(s: &str) -> Result<ContextFormula, String> {
    parse_context(s).map_err(|e| e.to_string())
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

/// Exit statuses.
const OK: u8 = 0;
const NEGATIVE: u8 = 1;
const INPUT: u8 = 2;
const BUDGET: u8 = 3;

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl ToString) -> Failure {
        Failure {
            code: INPUT,
            message: message.to_string(),
        }
    }

    fn budget(message: impl ToString) -> Failure {
        Failure {
            code: BUDGET,
            message: message.to_string(),
        }
    }
}

type Outcome = Result<u8, Failure>;

fn read_source(arg: &str) -> Result<String, Failure> {
    if arg == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::input(format!("reading standard input: {e}")))?;
        Ok(s)
    } else {
        Ok(arg.to_string())
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("reading {}: {e}", path.display())))
}

fn load_json<T: serde::de::DeserializeOwned>(text: &str, what: &str) -> Result<T, Failure> {
    serde_json::from_str(text).map_err(|e| Failure::input(format!("invalid {what}: {e}")))
}

struct Ctx {
    variant: Variant,
    format: Format,
    out: io::StdoutLock<'static>,
}

impl Ctx {
    fn print(&mut self, text: &str) {
        let _ = self.out.write_all(text.as_bytes());
        if !text.ends_with('\n') {
            let _ = self.out.write_all(b"\n");
        }
    }

    fn print_json(&mut self, v: &impl serde::Serialize) {
        let text = serde_json::to_string_pretty(v).expect("output serializes");
        self.print(&text);
    }

    fn parse(&self, text: &str, tagged: bool) -> Result<Formula, Failure> {
        let text = read_source(text)?;
        let opts = ParseOptions {
            default_variant: tagged.then_some(self.variant),
        };
        parse_formula_with(text.trim(), &opts).map_err(Failure::input)
    }

    fn no_dot(&self, command: &str) -> Result<(), Failure> {
        if self.format == Format::Dot {
            return Err(Failure::input(format!(
                "`{command}` has no DOT output; use text or json"
            )));
        }
        Ok(())
    }

    /// Parses the formula and builds its environment, applying a preset
    /// when one is named.
    fn formula_and_env(&self, text: &str, env: &EnvArgs) -> Result<(Formula, ContextEnv), Failure> {
        match &env.preset {
            Some(name) => {
                let mut preset = PositionPreset::from_name(name).expect("clap checked the name");
                if let PositionPreset::AntiSceptic { anti, scep } = &mut preset {
                    if let Some(a) = &env.anti {
                        *anti = a.clone();
                    }
                    if let Some(s) = &env.scep {
                        *scep = s.clone();
                    }
                } else if env.anti.is_some() || env.scep.is_some() {
                    return Err(Failure::input(
                        "--anti and --scep only apply to the anti-sceptic preset",
                    ));
                }
                let f = self.parse(text, false)?;
                apply_preset(&f, &preset).map_err(Failure::input)
            }
            None => Ok((self.parse(text, true)?, load_env(env)?)),
        }
    }
}

fn load_env(args: &EnvArgs) -> Result<ContextEnv, Failure> {
    match &args.env {
        None => Ok(ContextEnv::fresh()),
        Some(s) if s.trim_start().starts_with('{') => load_json(s, "context environment"),
        Some(path) => load_json(&read_file(Path::new(path))?, "context environment"),
    }
}

fn ast(f: &Formula) -> Value {
    let un = |op: &str, a: &Formula| json!({ "op": op, "args": [ast(a)] });
    let bin = |op: &str, a: &Formula, b: &Formula| json!({ "op": op, "args": [ast(a), ast(b)] });
    let modal = |op: &str, j: &str, v: &Option<Variant>, a: &Formula| json!({ "op": op, "agent": j, "variant": v.map(|v| v.to_string()), "args": [ast(a)] });
    match f {
        Formula::Atom(p) => json!({ "op": "atom", "name": p }),
        Formula::Not(a) => un("not", a),
        Formula::And(a, b) => bin("and", a, b),
        Formula::Or(a, b) => bin("or", a, b),
        Formula::Imp(a, b) => bin("imp", a, b),
        Formula::Iff(a, b) => bin("iff", a, b),
        Formula::Know(j, v, a) => modal("know", j, v, a),
        Formula::Poss(j, v, a) => modal("poss", j, v, a),
        Formula::Rel(a, c) => json!({ "op": "rel", "context": c, "args": [ast(a)] }),
    }
}

fn ast_text(f: &Formula, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    let head = match f {
        Formula::Atom(p) => format!("Atom {p}"),
        Formula::Not(_) => "Not".into(),
        Formula::And(..) => "And".into(),
        Formula::Or(..) => "Or".into(),
        Formula::Imp(..) => "Imp".into(),
        Formula::Iff(..) => "Iff".into(),
        Formula::Know(j, v, _) | Formula::Poss(j, v, _) => {
            let op = if matches!(f, Formula::Know(..)) {
                "Know"
            } else {
                "Poss"
            };
            match v {
                Some(v) => format!("{op} {j} {v}"),
                None => format!("{op} {j}"),
            }
        }
        Formula::Rel(_, c) => format!("Rel {c}"),
    };
    out.push_str(&format!("{pad}{head}\n"));
    for c in f.children() {
        ast_text(c, depth + 1, out);
    }
}

fn cmd_parse(ctx: &mut Ctx, text: &str) -> Outcome {
    ctx.no_dot("parse")?;
    let f = ctx.parse(text, true)?;
    let info = formula_info(&f);
    match ctx.format {
        Format::Json => ctx.print_json(&json!({
            "formula": f,
            "ast": ast(&f),
            "info": info,
        })),
        _ => {
            let mut out = format!("{f}\n");
            ast_text(&f, 0, &mut out);
            ctx.print(&out);
        }
    }
    Ok(OK)
}

fn cmd_eval(ctx: &mut Ctx, model: &Path, world: &str, env: &EnvArgs, text: &str) -> Outcome {
    let (f, env) = ctx.formula_and_env(text, env)?;
    let m: KripkeModel = load_json(&read_file(model)?, "model")?;
    let value = satisfies(&m, world, &env, &f).map_err(Failure::input)?;
    match ctx.format {
        Format::Json => ctx.print_json(&json!({ "formula": f, "world": world, "value": value })),
        Format::Dot => {
            ctx.print(&m.to_dot(Some(world)));
        }
        Format::Text => ctx.print(if value { "true" } else { "false" }),
    }
    Ok(if value { OK } else { NEGATIVE })
}

fn cmd_reduce(ctx: &mut Ctx, text: &str) -> Outcome {
    ctx.no_dot("reduce")?;
    let f = ctx.parse(text, true)?;
    let trace = reduce_full(&f).map_err(Failure::budget)?;
    match ctx.format {
        Format::Json => ctx.print_json(&trace),
        _ => {
            let mut out = format!("input:  {}\n", trace.input);
            for (k, step) in trace.steps.iter().enumerate() {
                out.push_str(&format!(
                    "{:>3}. {}: {}\n     {}\n",
                    k + 1,
                    step.axiom,
                    step.instance(),
                    step.after
                ));
            }
            out.push_str(&format!("result: {}\n", trace.result));
            ctx.print(&out);
        }
    }
    Ok(OK)
}

fn prove_failure(e: ProveError) -> Failure {
    match e {
        ProveError::Reduction(b) => Failure::budget(b),
        other => Failure::input(other),
    }
}

fn cmd_prove(ctx: &mut Ctx, env: &EnvArgs, text: &str) -> Outcome {
    let (f, env) = ctx.formula_and_env(text, env)?;
    let verdict = prove_cel(&f, &env).map_err(prove_failure)?;
    let code = if verdict.is_valid() { OK } else { NEGATIVE };
    match (ctx.format, &verdict) {
        (Format::Json, v) => ctx.print_json(v),
        (Format::Dot, Verdict::Invalid { model, world }) => {
            ctx.print(&model.to_dot(Some(world)));
        }
        (Format::Dot, Verdict::Valid { .. }) => ctx.print("// valid: no counter-model"),
        (Format::Text, Verdict::Valid { proof }) => {
            ctx.print(&format!("valid\n{}", proof.to_text()));
        }
        (Format::Text, Verdict::Invalid { model, world }) => {
            let model = serde_json::to_string_pretty(model).expect("model serializes");
            ctx.print(&format!("invalid: false at world {world} of\n{model}"));
        }
    }
    Ok(code)
}

fn cmd_dialogue(
    ctx: &mut Ctx,
    budget: usize,
    slack: usize,
    markdown: bool,
    env: &EnvArgs,
    text: &str,
) -> Outcome {
    ctx.no_dot("dialogue")?;
    let (f, env) = ctx.formula_and_env(text, env)?;
    let config = GameConfig { env, slack };
    let outcome = has_winning_strategy_with(&f, config, budget).map_err(Failure::budget)?;
    let play = outcome.play();
    let winner = outcome.strategy().winner();
    match ctx.format {
        Format::Json => ctx.print_json(&json!({
            "thesis": f,
            "winner": winner,
            "positions": outcome.strategy().positions(),
            "play": play.moves(),
        })),
        _ => {
            let style = if markdown {
                TranscriptStyle::Markdown
            } else {
                TranscriptStyle::Text
            };
            let headline = match &outcome {
                DialogueOutcome::ProponentWins(_) => "P has a winning strategy; principal play:",
                DialogueOutcome::OpponentWins { .. } => "O has a winning strategy; refuting play:",
            };
            ctx.print(&format!(
                "{headline}\n{}{} wins the play",
                render_transcript(&play.moves(), style),
                winner
            ));
        }
    }
    Ok(if winner == Actor::P { OK } else { NEGATIVE })
}

fn cmd_replay(
    ctx: &mut Ctx,
    script: Option<&Path>,
    builtin: Option<&str>,
    list: bool,
    env: &EnvArgs,
) -> Outcome {
    ctx.no_dot("replay")?;
    if list {
        let names: Vec<(String, String)> = reference_plays()
            .into_iter()
            .map(|(n, p)| (n.to_string(), p.title))
            .collect();
        match ctx.format {
            Format::Json => ctx.print_json(&names),
            _ => {
                let out: String = names.iter().map(|(n, t)| format!("{n}\t{t}\n")).collect();
                ctx.print(&out);
            }
        }
        return Ok(OK);
    }
    if env.preset.is_some() {
        return Err(Failure::input("replay takes --env, not --preset"));
    }
    let play: PlayScript = match (script, builtin) {
        (Some(path), _) => load_json(&read_file(path)?, "play script")?,
        (None, Some(name)) => reference_plays()
            .into_iter()
            .find(|(n, _)| *n == name)
            .map(|(_, p)| p)
            .ok_or_else(|| Failure::input(format!("no bundled play named `{name}`")))?,
        (None, None) => unreachable!("clap requires a source"),
    };
    let config = GameConfig {
        env: load_env(env)?,
        ..GameConfig::default()
    };
    let end = replay(&play.moves, config).map_err(Failure::input)?;
    let reached = end.winner();
    let matches = play.winner.is_none() || play.winner == reached;
    match ctx.format {
        Format::Json => ctx.print_json(&json!({
            "title": play.title,
            "expected": play.winner,
            "winner": reached,
            "matches": matches,
        })),
        _ => {
            let result = match reached {
                Some(w) => format!("{w} wins the play"),
                None => "the play is not over".to_string(),
            };
            ctx.print(&format!(
                "{}\n{}{result}",
                play.title,
                render_transcript(&play.moves, TranscriptStyle::Text)
            ));
        }
    }
    Ok(if matches { OK } else { NEGATIVE })
}

fn cmd_oracle(
    ctx: &mut Ctx,
    max_worlds: usize,
    ceiling: u128,
    env: &EnvArgs,
    text: &str,
) -> Outcome {
    let (f, env) = ctx.formula_and_env(text, env)?;
    let found = match find_countermodel_with(&f, &env, max_worlds, ceiling) {
        Ok(found) => found,
        Err(SearchError::Enumeration(e @ EnumError::TooMany { .. })) => {
            return Err(Failure::budget(e))
        }
        Err(e) => return Err(Failure::input(e)),
    };
    match (ctx.format, &found) {
        (Format::Json, found) => ctx.print_json(found),
        (Format::Dot, Some(p)) => {
            ctx.print(&p.model.to_dot(Some(&p.world)));
        }
        (Format::Dot, None) => ctx.print("// no counter-model"),
        (Format::Text, None) => ctx.print(&format!(
            "no counter-model with at most {max_worlds} worlds"
        )),
        (Format::Text, Some(p)) => {
            let model = serde_json::to_string_pretty(&p.model).expect("model serializes");
            ctx.print(&format!("false at world {} of\n{model}", p.world));
        }
    }
    Ok(if found.is_some() { NEGATIVE } else { OK })
}

fn cmd_suite(ctx: &mut Ctx) -> Outcome {
    ctx.no_dot("suite")?;
    let report = run_paper_suite();
    match ctx.format {
        Format::Json => ctx.print(&report.to_json()),
        _ => ctx.print(&report.to_text()),
    }
    Ok(if report.all_agree() { OK } else { NEGATIVE })
}

fn run(cli: Cli) -> Outcome {
    let mut ctx = Ctx {
        variant: cli.default_variant,
        format: cli.format,
        out: io::stdout().lock(),
    };
    match &cli.command {
        Command::Parse { formula } => cmd_parse(&mut ctx, formula),
        Command::Eval {
            model,
            world,
            env,
            formula,
        } => cmd_eval(&mut ctx, model, world, env, formula),
        Command::Reduce { formula } => cmd_reduce(&mut ctx, formula),
        Command::Prove { env, formula } => cmd_prove(&mut ctx, env, formula),
        Command::Dialogue {
            budget,
            slack,
            markdown,
            env,
            formula,
        } => cmd_dialogue(&mut ctx, *budget, *slack, *markdown, env, formula),
        Command::Replay {
            script,
            builtin,
            list,
            env,
        } => cmd_replay(&mut ctx, script.as_deref(), builtin.as_deref(), *list, env),
        Command::Oracle {
            max_worlds,
            budget,
            env,
            formula,
        } => cmd_oracle(&mut ctx, *max_worlds, *budget, env, formula),
        Command::Suite => cmd_suite(&mut ctx),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { INPUT } else { OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
