//! Executable metatheory: generators and checks of the encoding's properties.
//!
//! Every check is a pure function of its input, so corpora are checked with
//! [`crate::par::map`] and every failure replays from its seed.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::Serialize;

use crate::check::{check_pi_process, check_pi_value, check_session_process, check_session_value, SessionContext};
use crate::encode::{encode_context, encode_process, encode_session_type, encode_type};
use crate::par;
use crate::semantics::{canonical_pi, canonical_session, step_pi, step_session};
use crate::syntax::*;
use crate::types::*;

pub mod gen;

pub use gen::{gen_session_type, gen_typed_process, gen_value_judgment, mutate, GenConfig};

/// π steps searched per session step: one communication, at most one case
/// reduction, and slack for an unrelated step.
pub const PI_BUDGET: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub check: String,
    pub seed: u64,
    pub passed: bool,
    pub counterexample: Option<String>,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} seed={}", if self.passed { "PASS" } else { "FAIL" }, self.check, self.seed)?;
        if let Some(c) = &self.counterexample {
            for line in c.lines() {
                write!(f, "\n  {line}")?;
            }
        }
        Ok(())
    }
}

/// Outcome of exploring the session traces of one process.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Exploration {
    pub session_steps: usize,
    pub pi_states: usize,
    /// Session steps with no matching π reduction.
    pub unmatched: Vec<String>,
    /// Reachable states rejected by their checker.
    pub subject_reduction: Vec<String>,
}

fn hook_to(q: &PiProcess, target: &str) -> bool {
    canonical_pi(q) == target
        || step_pi(q).map(|s| s.iter().any(|s| s.rule == "R-Case" && canonical_pi(&s.result) == target)).unwrap_or(false)
}

/// Searches up to [`PI_BUDGET`] π steps from `start` for a process `Q` with
/// `Q ↪ target`. Every visited state is also type-checked under `pctx`.
fn pi_search(start: &PiProcess, target: &PiProcess, pctx: &crate::check::PiContext, ex: &mut Exploration) -> Result<bool, String> {
    let target = canonical_pi(target);
    let mut seen = BTreeSet::from([canonical_pi(start)]);
    let mut frontier = VecDeque::from([(start.clone(), 0usize)]);
    while let Some((q, d)) = frontier.pop_front() {
        if d == PI_BUDGET {
            continue;
        }
        for s in step_pi(&q).map_err(|e| e.to_string())? {
            if !seen.insert(canonical_pi(&s.result)) {
                continue;
            }
            ex.pi_states += 1;
            if let Err(e) = check_pi_process(pctx, &s.result) {
                ex.subject_reduction.push(format!("π residual rejected: {}\n{e}", s.result));
            }
            if hook_to(&s.result, &target) {
                return Ok(true);
            }
            frontier.push_back((s.result, d + 1));
        }
    }
    Ok(false)
}

/// Soundness of the encoding along every session trace of length at most
/// `depth`: each step `P → P'` is matched by `⟦P⟧ →+ Q ↪ ⟦P'⟧`. Residuals on
/// both sides are checked for subject reduction on the way.
pub fn explore(ctx: &SessionContext, p: &SessionProcess, depth: usize) -> Exploration {
    let pctx = encode_context(ctx);
    let mut ex = Exploration::default();
    let mut seen = BTreeSet::new();
    let mut stack = vec![(p.clone(), 0usize)];
    while let Some((cur, d)) = stack.pop() {
        if d >= depth || !seen.insert((canonical_session(&cur), d)) {
            continue;
        }
        let enc = encode_process(ctx, &cur);
        for s in step_session(&cur) {
            ex.session_steps += 1;
            if let Err(e) = check_session_process(ctx, &s.result) {
                ex.subject_reduction.push(format!("session residual rejected: {}\n{e}", s.result));
            }
            let target = encode_process(ctx, &s.result);
            match pi_search(&enc, &target, &pctx, &mut ex) {
                Ok(true) => {}
                Ok(false) => ex.unmatched.push(format!("{cur}\n--rule {} at {}\n{}", s.rule, s.location, s.result)),
                Err(e) => ex.unmatched.push(format!("{cur}\n{e}")),
            }
            stack.push((s.result, d + 1));
        }
    }
    ex
}

pub fn check_soundness(ctx: &SessionContext, p: &SessionProcess, depth: usize) -> Vec<String> {
    explore(ctx, p, depth).unmatched
}

/// Completeness for single steps: every π step of `⟦P⟧` reaches, up to `↪`,
/// the encoding of some session step of `P`.
pub fn check_completeness(ctx: &SessionContext, p: &SessionProcess) -> Vec<String> {
    let targets: Vec<String> = step_session(p).iter().map(|s| canonical_pi(&encode_process(ctx, &s.result))).collect();
    let enc = encode_process(ctx, p);
    match step_pi(&enc) {
        Err(e) => vec![format!("{enc}\n{e}")],
        Ok(steps) => steps
            .into_iter()
            .filter(|q| !targets.iter().any(|t| hook_to(&q.result, t)))
            .map(|q| format!("{enc}\n--rule {} at {}\n{}", q.rule, q.location, q.result))
            .collect(),
    }
}

/// Verdicts of `Γ ⊢ P` and `⟦Γ⟧ ⊢ ⟦P⟧`.
pub fn check_typing_theorem(ctx: &SessionContext, p: &SessionProcess) -> (bool, bool) {
    let session = check_session_process(ctx, p).is_ok();
    let pi = check_pi_process(&encode_context(ctx), &encode_process(ctx, p)).is_ok();
    (session, pi)
}

/// Verdicts of `Γ ⊢ v : T` and `⟦Γ⟧ ⊢ ⟦v⟧ : ⟦T⟧`.
pub fn check_value_lemma(ctx: &SessionContext, v: &SessionValue, t: &Type) -> (bool, bool) {
    let pv = match v {
        SessionValue::Var(x) => PiValue::Var(x.clone()),
        SessionValue::Unit => PiValue::Unit,
    };
    (check_session_value(ctx, v, t).is_ok(), check_pi_value(&encode_context(ctx), &pv, &encode_type(t)).is_ok())
}

/// Algebraic properties of one closed guarded session type and its encoding.
pub fn type_properties(t: &SessionType) -> Vec<(&'static str, bool)> {
    let c = complement_session(t);
    let cc = complement_session(&c);
    let u = unf_s(t);
    let et = encode_session_type(t);
    let mut out = vec![
        ("complement-is-dual", dual_session(t, &c)),
        ("dual-symmetric", dual_session(&c, t)),
        ("dual-idempotent", !(dual_session(t, &c) && dual_session(&c, &cc)) || equiv_session(t, &cc)),
        ("double-complement", equiv_session(&cc, t)),
        ("unfold-equivalent", equiv_session(t, &u) && !matches!(u, SessionType::Rec(..))),
        ("subtype-reflexive", subtype_session(t, t)),
        ("subtype-transitive", !(subtype_session(t, &u) && subtype_session(&u, &cc)) || subtype_session(t, &cc)),
        ("encode-unfold-complement", equiv_pi(&et, &encode_session_type(&u)) && equiv_pi(&et, &encode_session_type(&cc))),
        ("encode-dual-unfold", dual_pi(&encode_session_type(&u), &encode_session_type(&unf_s(&c)))),
    ];
    match complement_pi(&et) {
        Ok(pc) => {
            let pcc = complement_pi(&pc);
            out.push(("pi-complement-is-dual", dual_pi(&et, &pc)));
            match pcc {
                Ok(pcc) => {
                    out.push(("pi-dual-idempotent", !(dual_pi(&et, &pc) && dual_pi(&pc, &pcc)) || equiv_pi(&et, &pcc)));
                    out.push(("pi-double-complement", equiv_pi(&pcc, &et)));
                }
                Err(_) => out.push(("pi-double-complement", false)),
            }
        }
        Err(_) => out.push(("pi-complement-is-dual", false)),
    }
    out
}

/// Per-check pass/fail tallies over a corpus, with the failing instances.
#[derive(Clone, Debug, Default, Serialize)]
pub struct SuiteReport {
    pub samples: usize,
    pub tallies: BTreeMap<String, (usize, usize)>,
    pub failures: Vec<CheckResult>,
    pub session_steps: usize,
    pub pi_states: usize,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn failed(&self, check: &str) -> usize {
        self.tallies.get(check).map_or(0, |t| t.1)
    }

    fn absorb(&mut self, seed: u64, results: Vec<(&'static str, Result<(), String>)>) {
        self.samples += 1;
        for (check, r) in results {
            let tally = self.tallies.entry(check.to_string()).or_default();
            match r {
                Ok(()) => tally.0 += 1,
                Err(c) => {
                    tally.1 += 1;
                    self.failures.push(CheckResult { check: check.to_string(), seed, passed: false, counterexample: Some(c) });
                }
            }
        }
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (check, (ok, bad)) in &self.tallies {
            writeln!(f, "{} {check} passed={ok} failed={bad}", if *bad == 0 { "PASS" } else { "FAIL" })?;
        }
        for r in &self.failures {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

fn seeds(cfg: &GenConfig, n: usize) -> Vec<u64> {
    (0..n as u64).map(|i| cfg.seed.wrapping_add(i)).collect()
}

fn verdict(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

pub fn type_sample(cfg: &GenConfig, seed: u64) -> Vec<(&'static str, Result<(), String>)> {
    let t = gen_session_type(&cfg.with_seed(seed));
    type_properties(&t).into_iter().map(|(name, ok)| (name, verdict(ok, || t.to_string()))).collect()
}

/// Type properties over `n` generated types, seeds `cfg.seed..cfg.seed+n`.
pub fn type_suite(cfg: &GenConfig, n: usize) -> SuiteReport {
    type_suite_with(cfg, n, |s, f| par::map(s, f))
}

pub fn type_suite_with(
    cfg: &GenConfig,
    n: usize,
    map: impl Fn(&[u64], &(dyn Fn(&u64) -> Vec<(&'static str, Result<(), String>)> + Sync)) -> Vec<Vec<(&'static str, Result<(), String>)>>,
) -> SuiteReport {
    let seeds = seeds(cfg, n);
    let results = map(&seeds, &|&s| type_sample(cfg, s));
    let mut report = SuiteReport::default();
    for (s, r) in seeds.into_iter().zip(results) {
        report.absorb(s, r);
    }
    report
}

pub struct TermSample {
    pub results: Vec<(&'static str, Result<(), String>)>,
    pub session_steps: usize,
    pub pi_states: usize,
}

/// All process-level checks on the process generated from `seed`.
pub fn term_sample(cfg: &GenConfig, seed: u64, depth: usize) -> TermSample {
    let c = cfg.with_seed(seed);
    let (ctx, p) = gen_typed_process(&c);
    let show = |p: &SessionProcess| format!("{p}");
    let typed = check_session_process(&ctx, &p);
    let (s1, p1) = check_typing_theorem(&ctx, &p);
    let m = mutate(&p);
    let (s2, p2) = check_typing_theorem(&ctx, &m);
    let (vctx, v, t) = gen_value_judgment(&c);
    let (s3, p3) = check_value_lemma(&vctx, &v, &t);
    let ex = explore(&ctx, &p, depth);
    let incomplete = check_completeness(&ctx, &p);
    TermSample {
        results: vec![
            ("generated-well-typed", typed.map(|_| ()).map_err(|e| format!("{p}\n{e}"))),
            ("typing-preserved", verdict(s1 == p1, || format!("{p}\nsession={s1} pi={p1}"))),
            ("typing-preserved-mutant", verdict(s2 == p2, || format!("{m}\nsession={s2} pi={p2}"))),
            ("mutant-rejected", verdict(!s2, || show(&m))),
            ("value-typing-preserved", verdict(s3 == p3, || format!("{v} : {t}\nsession={s3} pi={p3}"))),
            ("soundness", verdict(ex.unmatched.is_empty(), || ex.unmatched.join("\n"))),
            ("completeness", verdict(incomplete.is_empty(), || incomplete.join("\n"))),
            ("subject-reduction", verdict(ex.subject_reduction.is_empty(), || ex.subject_reduction.join("\n"))),
        ],
        session_steps: ex.session_steps,
        pi_states: ex.pi_states,
    }
}

/// Process properties over `n` generated processes, traces to `depth`.
pub fn term_suite(cfg: &GenConfig, n: usize, depth: usize) -> SuiteReport {
    term_suite_with(cfg, n, depth, |s, f| par::map(s, f))
}

pub fn term_suite_with(
    cfg: &GenConfig,
    n: usize,
    depth: usize,
    map: impl Fn(&[u64], &(dyn Fn(&u64) -> TermSample + Sync)) -> Vec<TermSample>,
) -> SuiteReport {
    let seeds = seeds(cfg, n);
    let results = map(&seeds, &|&s| term_sample(cfg, s, depth));
    let mut report = SuiteReport::default();
    for (s, r) in seeds.into_iter().zip(results) {
        report.session_steps += r.session_steps;
        report.pi_states += r.pi_states;
        report.absorb(s, r.results);
    }
    report
}

/// Typing and operational correspondence checks on one program.
pub fn correspond(ctx: &SessionContext, p: &SessionProcess, depth: usize) -> Vec<CheckResult> {
    let (s, pi) = check_typing_theorem(ctx, p);
    let ex = explore(ctx, p, depth);
    let incomplete = check_completeness(ctx, p);
    let mk = |check: &str, passed: bool, c: String| CheckResult {
        check: check.to_string(),
        seed: 0,
        passed,
        counterexample: if passed { None } else { Some(c) },
    };
    vec![
        mk("typing-preserved", s == pi, format!("session={s} pi={pi}")),
        mk("soundness", ex.unmatched.is_empty(), ex.unmatched.join("\n")),
        mk("completeness", incomplete.is_empty(), incomplete.join("\n")),
        mk("subject-reduction", ex.subject_reduction.is_empty(), ex.subject_reduction.join("\n")),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_session_process;

    const SYS: &str = "type T = rec X.+{l:X}
        type U = rec X.&{l:X}
        (newc a: #T) (newc b: #U) (new v w: T)
          ( a!v.0 | b!w.0 | *(a?(x:T). sel x l. a!x.0) | *(b?(x:U). bra x {l: b!x.0}) )";

    #[test]
    fn sys_corresponds() {
        let p = parse_session_process(SYS).unwrap();
        for r in correspond(&SessionContext::new(), &p, 3) {
            assert!(r.passed, "{r}");
        }
    }

    #[test]
    fn nil_is_vacuous() {
        let ex = explore(&SessionContext::new(), &SessionProcess::Nil, 3);
        assert_eq!(ex.session_steps, 0);
        assert!(check_completeness(&SessionContext::new(), &SessionProcess::Nil).is_empty());
    }

    #[test]
    fn typing_theorem_examples() {
        let p = parse_session_process(SYS).unwrap();
        assert_eq!(check_typing_theorem(&SessionContext::new(), &p), (true, true));
        let ctx = SessionContext::from([("x".to_string(), Type::Session(SessionType::send(Type::Unit, SessionType::End)))]);
        assert_eq!(check_typing_theorem(&ctx, &SessionProcess::Nil), (false, false));
    }

    #[test]
    fn small_corpora() {
        let t = type_suite(&GenConfig::default(), 100);
        assert!(t.passed(), "{t}");
        let p = term_suite(&GenConfig::default(), 40, 2);
        assert!(p.passed(), "{p}");
        assert!(p.session_steps > 0);
    }
}
