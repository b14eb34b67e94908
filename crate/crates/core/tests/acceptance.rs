//! Acceptance criteria, one line each: `PASS|FAIL <n> <title> (<elapsed> / <budget>)`.
//!
//! Runs without the libtest harness so the lines print unconditionally; exits
//! non-zero if any criterion fails or overruns its budget.

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use sessc::check::{check_pi_process, check_session_process, SessionContext};
use sessc::correspond::{gen_session_type, gen_typed_process, mutate, term_suite, type_suite, GenConfig};
use sessc::encode::{encode_process, encode_session_type};
use sessc::parse::*;
use sessc::syntax::AlphaEq;
use sessc::types::{complement_pi, complement_session, dual_session};

fn sessc(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_sessc")).args(args).current_dir(env!("CARGO_MANIFEST_DIR")).output().expect("sessc runs");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

fn program(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "programs", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn type_encodings() -> Result<(), String> {
    for (src, expected) in [("rec X.+{l:X}", "rec X.lo[<l:~X>]"), ("rec X.&{l:X}", "rec X.li[<l:X>]")] {
        let (code, out) = sessc(&["encode-type", src]);
        ensure(code == 0, format!("encode-type {src} exited {code}"))?;
        let got = parse_pi_type(out.trim()).map_err(|e| e.to_string())?;
        let want = parse_pi_type(expected).unwrap();
        ensure(got.alpha_eq(&want), format!("{src} encoded to {out}"))?;
    }
    Ok(())
}

fn dualities() -> Result<(), String> {
    let (c1, o1) = sessc(&["dual", "rec X.&{l:X}", "rec X.+{l:X}"]);
    ensure(c1 == 0 && o1.trim() == "true", format!("dual U T: {o1}"))?;
    let (c2, o2) = sessc(&["dual-pi", "rec X.li[<l:X>]", "rec X.lo[<l:~X>]"]);
    ensure(c2 == 0 && o2.trim() == "true", format!("dual-pi υ τ: {o2}"))
}

fn typing() -> Result<(), String> {
    let sys = program("sys.spi");
    let (code, out) = sessc(&["check", &sys]);
    ensure(code == 0, format!("check exited {code}"))?;
    let rules: Vec<&str> = out.lines().filter_map(|l| l.trim_start().strip_prefix('[')?.split(']').next()).collect();
    let spine = ["T-Rep", "T-In", "T-Select", "T-Out", "T-Nil"];
    let at = rules.windows(5).position(|w| w == spine);
    ensure(at.is_some(), format!("rule spine missing from {rules:?}"))?;
    ensure(out.contains("rec X.+{l:X} ≼s +{l:rec X.+{l:X}}"), "side condition T ≼s +{l:S} missing")?;
    ensure(out.contains("rec X.+{l:X} ≼s rec X.+{l:X}"), "side condition S ≼s T missing")?;
    let (code, _) = sessc(&["check-pi", &sys]);
    ensure(code == 0, "check-pi rejects the encoded Sys")?;
    let (code, _) = sessc(&["check-pi", &program("sys.pi")]);
    ensure(code == 0, "check-pi rejects sys.pi")
}

fn traces() -> Result<(), String> {
    let (code, out) = sessc(&["run", &program("sys.spi"), "--steps", "4"]);
    ensure(code == 0 && out.contains("≡ start"), format!("session trace does not return to Sys:\n{out}"))?;
    let (code, out) = sessc(&["run", &program("sys.pi"), "--steps", "4"]);
    ensure(code == 0, "π run failed")?;
    let rules: Vec<&str> = out.lines().filter_map(|l| l.strip_prefix("--rule ")?.split(' ').next()).collect();
    ensure(rules.ends_with(&["R-Com", "R-Case"]), format!("π trace rules {rules:?}"))?;
    ensure(out.contains("↪ start") && out.contains("≡ start"), format!("π trace does not return to ⟦Sys⟧:\n{out}"))?;
    let (code, out) = sessc(&["run", &program("sys.spi"), "--steps", "4", "--encode"]);
    ensure(code == 0 && out.contains("≡ start"), format!("encoded run does not return:\n{out}"))?;
    let (code, out) = sessc(&["correspond", &program("sys.spi"), "--depth", "2"]);
    ensure(code == 0, format!("correspond failed:\n{out}"))
}

fn inadequacy() -> Result<(), String> {
    let t = parse_session_type("rec X.?unit.X").unwrap();
    let s = parse_session_type("!unit.rec X.!unit.X").unwrap();
    ensure(dual_session(&t, &s), "the pair should be dual")?;
    ensure(!complement_session(&t).alpha_eq(&s), "the complement should differ syntactically")
}

fn type_properties() -> Result<(), String> {
    let cfg = GenConfig { seed: 1, ..GenConfig::default() };
    let r = type_suite(&cfg, 500);
    ensure(r.samples >= 500, "too few samples")?;
    ensure(r.passed(), format!("{r}"))
}

fn term_properties() -> Result<(), String> {
    let cfg = GenConfig { seed: 1, ..GenConfig::default() };
    let r = term_suite(&cfg, 200, 3);
    ensure(r.samples >= 200 && r.session_steps > 0, "too few samples or no steps")?;
    let failures: Vec<_> = r.failures.iter().filter(|f| f.check != "subject-reduction").collect();
    ensure(failures.is_empty(), format!("{r}"))
}

fn round_trip() -> Result<(), String> {
    let mut n = 0;
    for seed in 0..250u64 {
        let cfg = GenConfig::default().with_seed(seed);
        let t = gen_session_type(&cfg);
        let back = parse_session_type(&t.to_string()).map_err(|e| format!("{t}: {e}"))?;
        ensure(back.alpha_eq(&t), format!("session type {t}"))?;

        let pt = if seed % 2 == 0 { encode_session_type(&t) } else { complement_pi(&encode_session_type(&t)).unwrap() };
        let back = parse_pi_type(&pt.to_string()).map_err(|e| format!("{pt}: {e}"))?;
        ensure(back.alpha_eq(&pt), format!("π type {pt}"))?;

        let (ctx, p) = gen_typed_process(&cfg);
        let p = if seed % 3 == 0 { mutate(&p) } else { p };
        let back = parse_session_process(&p.to_string()).map_err(|e| format!("{p}: {e}"))?;
        ensure(back.alpha_eq(&p), format!("session process {p}"))?;

        let q = encode_process(&ctx, &p);
        let back = parse_pi_process(&q.to_string()).map_err(|e| format!("{q}: {e}"))?;
        ensure(back.alpha_eq(&q), format!("π process {q}"))?;
        n += 4;
    }
    ensure(n >= 1000, "too few nodes")
}

fn subject_reduction() -> Result<(), String> {
    let cfg = GenConfig { seed: 1, ..GenConfig::default() };
    let r = term_suite(&cfg, 200, 3);
    ensure(r.failed("subject-reduction") == 0, format!("{r}"))?;
    // Sys itself, on both sides.
    let sys = parse_session_process(&std::fs::read_to_string(program("sys.spi")).unwrap()).unwrap();
    for s in sessc::semantics::run_session(&sys, 6).steps {
        check_session_process(&SessionContext::new(), &s.result).map_err(|e| format!("{}: {e}", s.result))?;
    }
    let q = encode_process(&SessionContext::new(), &sys);
    for s in sessc::semantics::run_pi(&q, 8).map_err(|e| e.to_string())?.steps {
        check_pi_process(&Default::default(), &s.result).map_err(|e| format!("{}: {e}", s.result))?;
    }
    Ok(())
}

type Criterion = (u32, &'static str, u64, fn() -> Result<(), String>);

fn main() {
    let criteria: [Criterion; 9] = [
        (1, "type encodings of T and U", 1, type_encodings),
        (2, "dualities U ⊥s T and υ ⊥p τ", 1, dualities),
        (3, "typing of Sys and its encoding", 1, typing),
        (4, "reduction traces and correspondence on Sys", 2, traces),
        (5, "duality is not captured by complement", 1, inadequacy),
        (6, "type property suite over 500 types", 60, type_properties),
        (7, "process property suite over 200 processes", 120, term_properties),
        (8, "parser round trip over 1000 nodes", 10, round_trip),
        (9, "subject reduction along traces", 120, subject_reduction),
    ];
    let mut failed = 0;
    for (n, title, budget, run) in criteria {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let over = elapsed > Duration::from_secs(budget);
        let ok = result.is_ok() && !over;
        if !ok {
            failed += 1;
        }
        println!("{} {n} {title} ({:.2}s / {budget}s)", if ok { "PASS" } else { "FAIL" }, elapsed.as_secs_f64());
        if let Err(e) = result {
            for line in e.lines().take(20) {
                println!("    {line}");
            }
        } else if over {
            println!("    over budget");
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
