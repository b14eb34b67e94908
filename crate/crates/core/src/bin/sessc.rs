use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use sessc::check::{check_pi_process, check_session_process, SessionContext};
use sessc::correspond::{self, GenConfig};
use sessc::encode::{encode_process, encode_session_type};
use sessc::parse::{parse_pi_process, parse_pi_type, parse_session_process, parse_session_type, parse_type};
use sessc::semantics::{canonical_pi, canonical_session, hook_equiv, run_pi, run_session};
use sessc::syntax::{PiProcess, SessionProcess};
use sessc::types;

const DEFAULT_SEED: u64 = 0;

#[derive(Parser)]
#[command(name = "sessc", version, about = "Session pi-calculus to linear pi-calculus workbench")]
struct Cli {
    /// Print a JSON verdict object instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a process file (.spi session, .pi linear) and print it back.
    Parse { file: PathBuf },
    /// Type-check a session process and print the derivation.
    Check {
        file: PathBuf,
        /// Context entry `name:type`, repeatable.
        #[arg(long = "ctx")]
        ctx: Vec<String>,
    },
    /// Type-check a π process; a .spi file is encoded first.
    CheckPi {
        file: PathBuf,
        #[arg(long = "ctx")]
        ctx: Vec<String>,
    },
    /// Encode a session process.
    Encode {
        file: PathBuf,
        #[arg(long = "ctx")]
        ctx: Vec<String>,
    },
    /// Encode a session type.
    EncodeType { ty: String },
    /// Decide duality of two session types.
    Dual { left: String, right: String },
    /// Decide duality of two π types.
    DualPi { left: String, right: String },
    /// Decide subtyping of two types (`--pi` for π types).
    Sub {
        left: String,
        right: String,
        #[arg(long)]
        pi: bool,
    },
    /// Decide equivalence of two types (`--pi` for π types).
    Equiv {
        left: String,
        right: String,
        #[arg(long)]
        pi: bool,
    },
    /// Complement of a session type (`--pi` for π types).
    Complement {
        ty: String,
        #[arg(long)]
        pi: bool,
    },
    /// Reduce a process, taking the first available step each time.
    Run {
        file: PathBuf,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        /// Run the encoding of a .spi file.
        #[arg(long)]
        encode: bool,
    },
    /// Check the typing and operational correspondence on one session process.
    Correspond {
        file: PathBuf,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(long = "ctx")]
        ctx: Vec<String>,
    },
    /// Run the type and process property suites on generated corpora.
    Fuzz {
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 3)]
        depth: usize,
    },
}

/// What a command produced: whether the property holds, text, and JSON.
struct Outcome {
    ok: bool,
    text: String,
    data: serde_json::Value,
}

fn outcome(ok: bool, text: impl Into<String>, data: serde_json::Value) -> Outcome {
    Outcome { ok, text: text.into(), data }
}

fn verdict(ok: bool) -> Outcome {
    outcome(ok, ok.to_string(), json!(ok))
}

#[derive(Debug)]
struct Usage(String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Usage> {
    std::fs::read_to_string(path).map_err(|e| Usage(format!("{}: {e}", path.display())))
}

fn is_pi(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "pi")
}

fn session_file(path: &Path) -> Result<SessionProcess, Usage> {
    if is_pi(path) {
        return Err(Usage(format!("{}: expected a session process (.spi)", path.display())));
    }
    Ok(parse_session_process(&read(path)?)?)
}

fn context(entries: &[String]) -> Result<SessionContext, Usage> {
    entries
        .iter()
        .map(|e| {
            let (name, ty) = e.split_once(':').ok_or_else(|| Usage(format!("context entry `{e}` is not name:type")))?;
            Ok((name.trim().to_string(), parse_type(ty)?))
        })
        .collect()
}

fn run(cmd: Command) -> Result<Outcome, Usage> {
    Ok(match cmd {
        Command::Parse { file } => {
            let src = read(&file)?;
            let text = if is_pi(&file) { parse_pi_process(&src)?.to_string() } else { parse_session_process(&src)?.to_string() };
            outcome(true, text.clone(), json!(text))
        }
        Command::Check { file, ctx } => {
            let p = session_file(&file)?;
            match check_session_process(&context(&ctx)?, &p) {
                Ok(d) => outcome(true, d.to_string().trim_end(), json!({ "derivation": d.to_string(), "rules": d.rules() })),
                Err(e) => outcome(false, e.to_string(), json!({ "error": e.to_string(), "rule": e.rule })),
            }
        }
        Command::CheckPi { file, ctx } => {
            let c = context(&ctx)?;
            let (pctx, q) = if is_pi(&file) {
                (sessc::encode::encode_context(&c), parse_pi_process(&read(&file)?)?)
            } else {
                let p = session_file(&file)?;
                (sessc::encode::encode_context(&c), encode_process(&c, &p))
            };
            match check_pi_process(&pctx, &q) {
                Ok(d) => outcome(true, d.to_string().trim_end(), json!({ "derivation": d.to_string(), "rules": d.rules() })),
                Err(e) => outcome(false, e.to_string(), json!({ "error": e.to_string(), "rule": e.rule })),
            }
        }
        Command::Encode { file, ctx } => {
            let q = encode_process(&context(&ctx)?, &session_file(&file)?).to_string();
            outcome(true, q.clone(), json!(q))
        }
        Command::EncodeType { ty } => {
            let t = encode_session_type(&parse_session_type(&ty)?).to_string();
            outcome(true, t.clone(), json!(t))
        }
        Command::Dual { left, right } => verdict(types::dual_session(&parse_session_type(&left)?, &parse_session_type(&right)?)),
        Command::DualPi { left, right } => verdict(types::dual_pi(&parse_pi_type(&left)?, &parse_pi_type(&right)?)),
        Command::Sub { left, right, pi: false } => verdict(types::subtype_type(&parse_type(&left)?, &parse_type(&right)?)),
        Command::Sub { left, right, pi: true } => verdict(types::subtype_pi(&parse_pi_type(&left)?, &parse_pi_type(&right)?)),
        Command::Equiv { left, right, pi: false } => verdict(types::equiv_type(&parse_type(&left)?, &parse_type(&right)?)),
        Command::Equiv { left, right, pi: true } => verdict(types::equiv_pi(&parse_pi_type(&left)?, &parse_pi_type(&right)?)),
        Command::Complement { ty, pi: false } => {
            let t = types::complement_session(&parse_session_type(&ty)?).to_string();
            outcome(true, t.clone(), json!(t))
        }
        Command::Complement { ty, pi: true } => match types::complement_pi(&parse_pi_type(&ty)?) {
            Ok(t) => outcome(true, t.to_string(), json!(t.to_string())),
            Err(e) => outcome(false, e.to_string(), json!({ "error": e.to_string() })),
        },
        Command::Run { file, steps, encode } => {
            if is_pi(&file) || encode {
                let q = if is_pi(&file) {
                    parse_pi_process(&read(&file)?)?
                } else {
                    encode_process(&SessionContext::new(), &session_file(&file)?)
                };
                run_pi_trace(&q, steps)
            } else {
                run_session_trace(&session_file(&file)?, steps)
            }
        }
        Command::Correspond { file, depth, ctx } => {
            let p = session_file(&file)?;
            let results = correspond::correspond(&context(&ctx)?, &p, depth);
            let ok = results.iter().all(|r| r.passed);
            let text = results.iter().map(|r| r.to_string()).collect::<Vec<_>>().join("\n");
            outcome(ok, text, json!(results))
        }
        Command::Fuzz { n, seed, depth } => {
            let seed = match seed {
                Some(s) => s,
                None => std::env::var("SESSC_SEED").ok().map(|s| s.parse::<u64>()).transpose()?.unwrap_or(DEFAULT_SEED),
            };
            let cfg = GenConfig { seed, ..GenConfig::default() };
            let t = correspond::type_suite(&cfg, n);
            let p = correspond::term_suite(&cfg, n, depth);
            let ok = t.passed() && p.passed();
            let text = format!("types n={n} seed={seed}\n{t}processes n={n} seed={seed} depth={depth}\n{p}");
            outcome(ok, text.trim_end(), json!({ "seed": seed, "types": t, "processes": p }))
        }
    })
}

fn run_session_trace(p: &SessionProcess, steps: usize) -> Outcome {
    let t = run_session(p, steps);
    let start = canonical_session(p);
    let back: Vec<usize> = t.steps.iter().enumerate().filter(|(_, s)| canonical_session(&s.result) == start).map(|(i, _)| i + 1).collect();
    let mut text = t.to_string();
    for k in &back {
        text.push_str(&format!("step {k} ≡ start\n"));
    }
    let data = json!({
        "start": p.to_string(),
        "steps": t.steps.iter().map(|s| json!({ "rule": s.rule, "at": s.location, "result": s.result.to_string() })).collect::<Vec<_>>(),
        "returns_to_start": back,
    });
    outcome(true, text.trim_end(), data)
}

fn run_pi_trace(q: &PiProcess, steps: usize) -> Outcome {
    let t = match run_pi(q, steps) {
        Ok(t) => t,
        Err(e) => return outcome(false, e.to_string(), json!({ "error": e.to_string() })),
    };
    let start = canonical_pi(q);
    let mut text = t.to_string();
    let mut back = Vec::new();
    let mut hook = Vec::new();
    for (i, s) in t.steps.iter().enumerate() {
        if canonical_pi(&s.result) == start {
            back.push(i + 1);
            text.push_str(&format!("step {} ≡ start\n", i + 1));
        } else if hook_equiv(&s.result, q) {
            hook.push(i + 1);
            text.push_str(&format!("step {} ↪ start\n", i + 1));
        }
    }
    let data = json!({
        "start": q.to_string(),
        "steps": t.steps.iter().map(|s| json!({ "rule": s.rule, "at": s.location, "result": s.result.to_string() })).collect::<Vec<_>>(),
        "returns_to_start": back,
        "hooks_to_start": hook,
    });
    outcome(true, text.trim_end(), data)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.json;
    match run(cli.command) {
        Ok(o) => {
            if json {
                println!("{}", json!({ "ok": o.ok, "result": o.data }));
            } else {
                println!("{}", o.text);
            }
            ExitCode::from(if o.ok { 0 } else { 1 })
        }
        Err(Usage(msg)) => {
            if json {
                println!("{}", json!({ "ok": false, "error": msg }));
            }
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
