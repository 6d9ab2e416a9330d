//! `pca`: evaluate terms, run dialogues and Kleene indices, check laws.

mod structure;

use std::cell::RefCell;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};

use pca_core::oracle::{apply_functional, apply_oracle, DialogueKit, Dialogue};
use pca_core::parse::{parse_element, parse_expr, resolve};
use pca_core::pca::{eval_term, eval_with, laws_check, sample_triples, strict_law_check, Trivial};
use pca_core::s19::compile::S19Compiler;
use pca_core::s19::S19Machine;
use pca_core::toolkit::sample_pool;
use pca_core::{Element, Eval, Fuel, Nat, NoValue, Pca, Term};

use structure::{dialogue_names, functional_by_name, oracle_by_name, render_term, select, Kind, Structure};

#[derive(Parser)]
#[command(name = "pca", version, about = "Partial combinatory algebra workbench")]
struct Cli {
    /// Structure: trivial, k1, strict:<sel>, strict123:<sel>, k1^<functional>,
    /// <sel>[<oracle>] or <sel>{<functional>}
    #[arg(long, global = true, default_value = "k1")]
    pca: String,
    #[arg(long, global = true, default_value_t = 100_000)]
    fuel: u64,
    /// Nesting bound for functional oracles and S8
    #[arg(long, global = true, default_value_t = 64)]
    depth: u32,
    /// Print dialogue transcripts and step counts
    #[arg(long, global = true)]
    trace: bool,
    #[arg(long, global = true, default_value_t = 100)]
    samples: usize,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a closed term
    Eval { term: String },
    /// Compile a lambda term by bracket abstraction and print its element
    Abstract { term: String },
    /// Kleene's first model
    #[command(subcommand)]
    K1(K1Command),
    /// Kleene's schemata relative to a functional
    #[command(subcommand)]
    S19(S19Command),
    /// Dialogues against a partial function
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Recursive dialogues against a type-2 functional
    #[command(subcommand)]
    Functional(FunctionalCommand),
    /// The strict structure over --pca
    #[command(subcommand)]
    Strict(StrictCommand),
    /// Check the pca laws on seeded samples
    Laws,
}

#[derive(Subcommand)]
enum K1Command {
    /// Apply one K1 term to another
    Run { f: String, x: String },
}

#[derive(Subcommand)]
enum S19Command {
    /// Evaluate {index}(args)
    Run {
        index: String,
        args: Vec<String>,
        #[arg(long, default_value = "at_zero")]
        functional: String,
    },
    /// Print the K1 dialogue program for an index
    Compile { index: String },
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Run the dialogue of base terms `a` and `b`
    Run {
        #[arg(long)]
        oracle: String,
        a: String,
        b: String,
    },
}

#[derive(Subcommand)]
enum FunctionalCommand {
    /// Run the recursive dialogue of base terms `a` and `b`
    Run {
        #[arg(long)]
        functional: String,
        a: String,
        b: String,
    },
}

#[derive(Subcommand)]
enum StrictCommand {
    /// Evaluate a closed term in the strict structure
    Eval { term: String },
}

/// Printed lines and the exit status.
struct Output {
    lines: Vec<String>,
    code: u8,
}

impl Output {
    fn error(msg: impl Into<String>) -> Output {
        Output {
            lines: vec![format!("ERROR {}", msg.into())],
            code: 2,
        }
    }

    fn outcome(p: &dyn Pca, e: &Eval) -> Output {
        match e {
            Ok(v) => Output {
                lines: vec![format!("VALUE {}", p.render(v))],
                code: 0,
            },
            Err(NoValue::Exhausted) => Output {
                lines: vec!["EXHAUSTED".into()],
                code: 1,
            },
            Err(NoValue::Divergent) => Output {
                lines: vec!["DIVERGENT".into()],
                code: 1,
            },
        }
    }

    fn with(mut self, more: impl IntoIterator<Item = String>) -> Output {
        self.lines.extend(more);
        self
    }
}

type Extra<'a> = &'a dyn Fn(&str) -> Option<Element>;

/// Parses and resolves `text` against the names of `s` plus `extra`.
fn term_in(s: &Structure, text: &str, extra: Extra<'_>) -> Result<Term, String> {
    let expr = parse_expr(text).map_err(|e| format!("parse error at {e}"))?;
    let failure = RefCell::new(None);
    let lookup = |name: &str| {
        if let Some(e) = extra(name) {
            return Some(e);
        }
        match s.lookup(name) {
            Ok(found) => found,
            Err(msg) => {
                failure.borrow_mut().get_or_insert(msg);
                None
            }
        }
    };
    let t = resolve(s.pca.as_ref(), &expr, &lookup);
    if let Some(msg) = failure.into_inner() {
        return Err(msg);
    }
    t.map_err(|e| e.to_string())
}

fn no_extra(_: &str) -> Option<Element> {
    None
}

fn closed(t: &Term) -> Result<(), String> {
    match t.free_vars().into_iter().next() {
        Some(x) => Err(format!("free variable `{x}`")),
        None => Ok(()),
    }
}

fn steps_line(budget: u64, fuel: &Fuel) -> String {
    format!("STEPS {}", budget - fuel.remaining())
}

fn evaluate(s: &Structure, text: &str, fuel: u64, trace: bool) -> Result<Output, String> {
    let t = term_in(s, text, &no_extra)?;
    closed(&t)?;
    let mut budget = Fuel::new(fuel);
    let result = eval_with(s.pca.as_ref(), &t, &mut budget).map_err(|e| e.to_string())?;
    let out = Output::outcome(s.pca.as_ref(), &result);
    Ok(if trace { out.with([steps_line(fuel, &budget)]) } else { out })
}

/// Reads `<a,b,…>` index literals (nested) or plain element literals.
fn parse_index(text: &str) -> Result<Nat, String> {
    fn go(chars: &[char], pos: &mut usize) -> Result<Nat, String> {
        while *pos < chars.len() && chars[*pos].is_whitespace() {
            *pos += 1;
        }
        if chars.get(*pos) == Some(&'<') {
            *pos += 1;
            let mut items = Vec::new();
            loop {
                items.push(go(chars, pos)?);
                while *pos < chars.len() && chars[*pos].is_whitespace() {
                    *pos += 1;
                }
                match chars.get(*pos) {
                    Some(',') => *pos += 1,
                    Some('>') => {
                        *pos += 1;
                        return Ok(Nat::encode_seq(&items));
                    }
                    other => {
                        return Err(format!(
                            "column {}: expected `,` or `>`, found {}",
                            *pos + 1,
                            other.map_or("end of input".to_string(), |c| format!("`{c}`"))
                        ))
                    }
                }
            }
        }
        let start = *pos;
        let mut level = 0i32;
        while *pos < chars.len() {
            match chars[*pos] {
                '(' => level += 1,
                ')' => level -= 1,
                ',' | '>' if level == 0 => break,
                _ => {}
            }
            *pos += 1;
        }
        let piece: String = chars[start..*pos].iter().collect();
        parse_element(piece.trim()).map_err(|e| format!("column {}: {}", start + e.column, e.message))
    }
    let chars: Vec<char> = text.chars().collect();
    let mut pos = 0;
    let n = go(&chars, &mut pos)?;
    if chars[pos..].iter().any(|c| !c.is_whitespace()) {
        return Err(format!("column {}: trailing input", pos + 1));
    }
    Ok(n)
}

fn base_dialogues(s: &Structure) -> Result<Arc<DialogueKit>, String> {
    let kit = s.kit()?;
    DialogueKit::new(kit).map_err(|e| e.to_string())
}

fn base_element(s: &Structure, dk: &DialogueKit, text: &str) -> Result<Element, String> {
    let extra = |name: &str| dialogue_names(dk, name);
    let t = term_in(s, text, &extra)?;
    closed(&t)?;
    match eval_term(s.pca.as_ref(), &t, 1 << 26).map_err(|e| e.to_string())?.into_result() {
        Ok(v) => Ok(v),
        Err(e) => Err(format!("`{text}` has no value in {} ({e:?})", s.pca.name())),
    }
}

fn transcript(p: &dyn Pca, d: &Dialogue) -> Vec<String> {
    d.trace_lines(&|e| p.render(e))
}

fn laws(s: &Structure, cli: &Cli) -> Result<Output, String> {
    let p = s.pca.as_ref();
    let small = |n: u64| (0..n).map(Nat::small).collect::<Vec<_>>();
    let pool: Vec<Element> = match &s.kind {
        Kind::Trivial => vec![Trivial::star()],
        Kind::K1 => {
            let kit = s.kit()?;
            let mut extra = small(4);
            extra.push(pca_core::k1::succ_code());
            sample_pool(&kit, &extra).map_err(|e| e.to_string())?
        }
        Kind::Strict(sp) => {
            let base = sp.base();
            let elems = [base.k.clone(), base.s.clone(), base.id.clone(), base.f.clone()];
            pca_core::strictify::sample_pool(sp, &elems).map_err(|e| e.to_string())?
        }
        Kind::Oracle(op) => op.dialogue_kit().sample_pool().map_err(|e| e.to_string())?,
        Kind::Functional(fp) => fp.dialogue_kit().sample_pool().map_err(|e| e.to_string())?,
        Kind::Kleene => {
            let mut pool = small(6);
            pool.extend([Nat::small(25), p.k(), p.s()]);
            pool
        }
    };
    let triples = sample_triples(&pool, cli.samples, cli.seed);
    let mut reports = vec![laws_check(p, &triples, cli.fuel)];
    if matches!(s.kind, Kind::Strict(_)) {
        reports.push(strict_law_check(p, &triples, cli.fuel));
    }
    let passed = reports.iter().all(|r| r.passed());
    let mut lines = vec![if passed { "PASS".to_string() } else { "FAIL".to_string() }];
    for r in &reports {
        for f in &r.failures {
            lines.push(format!(
                "FAIL [{}] {} {} {}: {}",
                f.law,
                p.render(&f.sample.0),
                p.render(&f.sample.1),
                p.render(&f.sample.2),
                f.detail
            ));
        }
    }
    lines.push(format!("checked {} samples on {}", triples.len(), p.name()));
    Ok(Output {
        lines,
        code: if passed { 0 } else { 1 },
    })
}

fn run(cli: &Cli) -> Result<Output, String> {
    let fuel = cli.fuel;
    match &cli.command {
        Command::Eval { term } => evaluate(&select(&cli.pca, cli.depth)?, term, fuel, cli.trace),
        Command::Strict(StrictCommand::Eval { term }) => {
            evaluate(&select(&format!("strict:{}", cli.pca), cli.depth)?, term, fuel, cli.trace)
        }
        Command::Abstract { term } => {
            let s = select(&cli.pca, cli.depth)?;
            let t = term_in(&s, term, &no_extra)?;
            closed(&t)?;
            let out = Output::outcome(s.pca.as_ref(), &eval_term(s.pca.as_ref(), &t, fuel).map_err(|e| e.to_string())?.into_result());
            Ok(out.with([format!("TERM {}", render_term(s.pca.as_ref(), &t))]))
        }
        Command::K1(K1Command::Run { f, x }) => {
            let s = select("k1", cli.depth)?;
            let text = format!("({f}) ({x})");
            evaluate(&s, &text, fuel, cli.trace)
        }
        Command::S19(S19Command::Run { index, args, functional }) => {
            let e = parse_index(index)?;
            let args = args
                .iter()
                .map(|a| parse_element(a).map_err(|err| format!("argument `{a}`: {err}")))
                .collect::<Result<Vec<_>, _>>()?;
            let machine = S19Machine::new(functional_by_name(functional)?, cli.depth);
            let mut budget = Fuel::new(fuel);
            let result = machine.apply(&e, &args, &mut budget);
            let out = Output::outcome(&pca_core::k1::K1, &result);
            Ok(if cli.trace { out.with([steps_line(fuel, &budget)]) } else { out })
        }
        Command::S19(S19Command::Compile { index }) => {
            let e = parse_index(index)?;
            let compiler = S19Compiler::new().map_err(|e| e.to_string())?;
            let program = compiler.compile(&e).map_err(|e| e.to_string())?;
            Ok(Output::outcome(&pca_core::k1::K1, &Ok(program)))
        }
        Command::Oracle(OracleCommand::Run { oracle, a, b }) => {
            let s = select(&cli.pca, cli.depth)?;
            let dk = base_dialogues(&s)?;
            let f = oracle_by_name(oracle)?;
            let (a, b) = (base_element(&s, &dk, a)?, base_element(&s, &dk, b)?);
            let mut budget = Fuel::new(fuel);
            let (result, dialogue) = apply_oracle(&dk, &f, &a, &b, &mut budget);
            let out = Output::outcome(s.pca.as_ref(), &result);
            Ok(if cli.trace {
                out.with(transcript(s.pca.as_ref(), &dialogue)).with([steps_line(fuel, &budget)])
            } else {
                out
            })
        }
        Command::Functional(FunctionalCommand::Run { functional, a, b }) => {
            let s = select(&cli.pca, cli.depth)?;
            let dk = base_dialogues(&s)?;
            let functional = functional_by_name(functional)?;
            let (a, b) = (base_element(&s, &dk, a)?, base_element(&s, &dk, b)?);
            let mut budget = Fuel::new(fuel);
            let run = apply_functional(&dk, &functional, &a, &b, &mut budget, cli.depth);
            let out = Output::outcome(s.pca.as_ref(), &run.outcome);
            Ok(if cli.trace {
                out.with(transcript(s.pca.as_ref(), &run.dialogue))
                    .with([format!("DEPTH {}", run.depth_used), steps_line(fuel, &budget)])
            } else {
                out
            })
        }
        Command::Laws => laws(&select(&cli.pca, cli.depth)?, cli),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            if matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = err.print();
                return ExitCode::SUCCESS;
            }
            if matches!(
                err.kind(),
                ErrorKind::MissingSubcommand | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand
            ) {
                println!("ERROR missing subcommand (see --help)");
                return ExitCode::from(2);
            }
            let msg = err.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ");
            println!("ERROR {first}");
            return ExitCode::from(2);
        }
    };
    let out = run(&cli).unwrap_or_else(Output::error);
    for line in &out.lines {
        println!("{line}");
    }
    ExitCode::from(out.code)
}

