//! Reduction of π processes.

use std::collections::{BTreeSet, HashMap};

use super::{fresh_for, Origin, Pool, Step, Trace};
use crate::syntax::*;

pub type PiStep = Step<PiProcess>;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("runtime error at `{location}`: {message}")]
pub struct RuntimeError {
    pub location: String,
    pub message: String,
}

type Binder = (String, PiType);

fn wrap_all(binders: Vec<Binder>, threads: Vec<PiProcess>) -> PiProcess {
    binders.into_iter().rev().fold(PiProcess::par_all(threads), |acc, (name, annot)| PiProcess::Res { name, annot, body: Box::new(acc) })
}

fn flatten(p: &PiProcess, used: &mut BTreeSet<String>, binders: &mut Vec<Binder>, threads: &mut Vec<PiProcess>) {
    match p {
        PiProcess::Nil => {}
        PiProcess::Par(a, b) => {
            flatten(a, used, binders, threads);
            flatten(b, used, binders, threads);
        }
        PiProcess::Res { name, annot, body } => {
            let n2 = fresh_for(name, used);
            binders.push((n2.clone(), annot.clone()));
            flatten(&body.rename(&HashMap::from([(name.clone(), n2)])), used, binders, threads);
        }
        _ => threads.push(p.clone()),
    }
}

fn pool(p: &PiProcess) -> Pool<Binder, PiProcess> {
    let mut used = p.free_names();
    let (mut binders, mut top) = (Vec::new(), Vec::new());
    flatten(p, &mut used, &mut binders, &mut top);
    let copies = top
        .iter()
        .map(|t| match t {
            PiProcess::Repl(body) => {
                let (mut bs, mut ts) = (Vec::new(), Vec::new());
                flatten(body, &mut used, &mut bs, &mut ts);
                Some((bs, ts))
            }
            _ => None,
        })
        .collect();
    Pool { binders, top, copies }
}

fn err(location: impl Into<String>, message: impl Into<String>) -> RuntimeError {
    RuntimeError { location: location.into(), message: message.into() }
}

/// All single reductions of `p`: case reductions, then communications with the
/// leftmost redex first. An arity mismatch between a communicating pair is
/// reported as an error.
pub fn step_pi(p: &PiProcess) -> Result<Vec<PiStep>, RuntimeError> {
    let pl = pool(p);
    let cands = pl.candidates();
    let mut found: Vec<(Vec<Origin>, PiStep)> = Vec::new();
    for &(oa, ta) in &cands {
        if let PiProcess::Case { scrutinee, arms } = ta {
            if let PiValue::Variant(l, v) = scrutinee {
                let location = format!("case {scrutinee}");
                let (x, body) = arms.get(l).ok_or_else(|| err(&location, format!("no arm for label {l}")))?;
                let res = body.subst_values(&HashMap::from([(x.clone(), (**v).clone())])).map_err(|m| err(&location, m))?;
                let (binders, threads) = pl.assemble(&[(oa, res)]);
                found.push((vec![oa], Step { rule: "R-Case", location, result: wrap_all(binders, threads) }));
            }
            continue;
        }
        let PiProcess::Output { subject: s, payloads, cont } = ta else { continue };
        for &(ob, tb) in &cands {
            let PiProcess::Input { subject: t, binders: xs, cont: k } = tb else { continue };
            if s != t || !Pool::<Binder, PiProcess>::compatible(oa, ob) {
                continue;
            }
            if payloads.len() != xs.len() {
                return Err(err(s, format!("arity mismatch: {} sent, {} expected", payloads.len(), xs.len())));
            }
            let map: HashMap<String, PiValue> = xs.iter().cloned().zip(payloads.iter().cloned()).collect();
            let res = k.subst_values(&map).map_err(|m| err(s, m))?;
            let (mut binders, threads) = pl.assemble(&[(oa, (**cont).clone()), (ob, res)]);
            for (name, annot) in &mut binders {
                if name == s && matches!(annot, PiType::LinConn(_)) {
                    *annot = PiType::NoCap;
                }
            }
            found.push((vec![oa, ob], Step { rule: "R-Com", location: s.clone(), result: wrap_all(binders, threads) }));
        }
    }
    // Case reductions first, then communications left to right.
    found.sort_by_key(|(os, s)| (s.rule != "R-Case", os.iter().min().copied(), os.iter().max().copied()));
    Ok(found.into_iter().map(|(_, s)| s).collect())
}

/// Follows the first available step up to `max` times.
pub fn run_pi(p: &PiProcess, max: usize) -> Result<Trace<PiProcess>, RuntimeError> {
    let mut steps = Vec::new();
    let mut cur = p.clone();
    while steps.len() < max {
        match step_pi(&cur)?.into_iter().next() {
            Some(s) => {
                cur = s.result.clone();
                steps.push(s);
            }
            None => break,
        }
    }
    Ok(Trace { start: p.clone(), steps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_pi_process;
    use crate::semantics::{hook_equiv, struct_equiv_pi};

    fn pp(src: &str) -> PiProcess {
        parse_pi_process(src).unwrap()
    }

    const PI_SYS: &str = "type tau = rec X.lo[<l:~X>]
        type ups = rec X.li[<l:X>]
        (new a: #[tau]) (new b: #[ups]) (new z: l#[<l:ups>])
          ( a!(z).0 | b!(z).0
          | *(a?(x). (new c: l#[<l:ups>]) x!(l(c)). a!(c).0)
          | *(b?(x). x?(y). case y of {l(c) => b!(c).0}) )";

    #[test]
    fn case_on_literal() {
        let s = step_pi(&pp("case l(()) of {l(x) => 0}")).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].rule, "R-Case");
        assert_eq!(s[0].result, PiProcess::Nil);
    }

    #[test]
    fn channel_communication() {
        let s = step_pi(&pp("(new c: #[unit]) (c!(()).0 | c?(z).0)")).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].result, pp("(new c: #[unit]) (0 | 0)"));
    }

    #[test]
    fn arity_mismatch_is_an_error() {
        assert!(step_pi(&pp("(new c: #[unit]) (c!((), ()).0 | c?(z).0)")).is_err());
    }

    #[test]
    fn sys_cycle_closes() {
        let sys = pp(PI_SYS);
        let t = run_pi(&sys, 4).unwrap();
        let rules: Vec<_> = t.steps.iter().map(|s| s.rule).collect();
        assert_eq!(rules, ["R-Com", "R-Com", "R-Com", "R-Case"]);
        assert!(struct_equiv_pi(&t.steps[3].result, &sys), "{}", t.steps[3].result);
        assert!(hook_equiv(&t.steps[2].result, &sys));
        assert!(!struct_equiv_pi(&t.steps[2].result, &sys));
    }
}
