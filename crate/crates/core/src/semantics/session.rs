//! Reduction of session processes.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use super::{fresh_for, Origin, Pool, Step, Trace};
use crate::syntax::*;
use crate::types::unf_s;

pub type SessionStep = Step<SessionProcess>;

/// A top-level restriction of a flattened session process.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Binder {
    Sess { x: String, y: String, annot: SessionType },
    Chan { name: String, annot: Type },
}

impl Binder {
    fn wrap(self, body: SessionProcess) -> SessionProcess {
        match self {
            Binder::Sess { x, y, annot } => SessionProcess::SessRes { x, y, annot, body: Box::new(body) },
            Binder::Chan { name, annot } => SessionProcess::ChanRes { name, annot, body: Box::new(body) },
        }
    }

    fn co_vars(&self, a: &str, b: &str) -> bool {
        matches!(self, Binder::Sess { x, y, .. } if (x == a && y == b) || (x == b && y == a))
    }

    fn binds_session(&self, a: &str) -> bool {
        matches!(self, Binder::Sess { x, y, .. } if x == a || y == a)
    }
}

/// A process with one hole: restrictions around a parallel composition of
/// `siblings` and the hole.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvaluationContext {
    pub binders: Vec<Binder>,
    pub siblings: Vec<SessionProcess>,
}

impl EvaluationContext {
    pub fn fill(&self, p: SessionProcess) -> SessionProcess {
        let mut threads = self.siblings.clone();
        threads.push(p);
        wrap_all(self.binders.clone(), threads)
    }
}

impl fmt::Display for EvaluationContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.binders {
            match b {
                Binder::Sess { x, y, annot } => write!(f, "(new {x} {y}:{annot}) ")?,
                Binder::Chan { name, annot } => write!(f, "(newc {name}:{annot}) ")?,
            }
        }
        write!(f, "(")?;
        for s in &self.siblings {
            write!(f, "{s} | ")?;
        }
        write!(f, "[·])")
    }
}

fn wrap_all(binders: Vec<Binder>, threads: Vec<SessionProcess>) -> SessionProcess {
    binders.into_iter().rev().fold(SessionProcess::par_all(threads), |acc, b| b.wrap(acc))
}

fn flatten(p: &SessionProcess, used: &mut BTreeSet<String>, binders: &mut Vec<Binder>, threads: &mut Vec<SessionProcess>) {
    match p {
        SessionProcess::Nil => {}
        SessionProcess::Par(a, b) => {
            flatten(a, used, binders, threads);
            flatten(b, used, binders, threads);
        }
        SessionProcess::SessRes { x, y, annot, body } => {
            let (x2, y2) = (fresh_for(x, used), fresh_for(y, used));
            let map = HashMap::from([(x.clone(), x2.clone()), (y.clone(), y2.clone())]);
            binders.push(Binder::Sess { x: x2, y: y2, annot: annot.clone() });
            flatten(&body.rename(&map), used, binders, threads);
        }
        SessionProcess::ChanRes { name, annot, body } => {
            let n2 = fresh_for(name, used);
            let map = HashMap::from([(name.clone(), n2.clone())]);
            binders.push(Binder::Chan { name: n2, annot: annot.clone() });
            flatten(&body.rename(&map), used, binders, threads);
        }
        _ => threads.push(p.clone()),
    }
}

fn pool(p: &SessionProcess) -> Pool<Binder, SessionProcess> {
    let mut used = p.free_names();
    let (mut binders, mut top) = (Vec::new(), Vec::new());
    flatten(p, &mut used, &mut binders, &mut top);
    let copies = top
        .iter()
        .map(|t| match t {
            SessionProcess::Repl(body) => {
                let (mut bs, mut ts) = (Vec::new(), Vec::new());
                flatten(body, &mut used, &mut bs, &mut ts);
                Some((bs, ts))
            }
            _ => None,
        })
        .collect();
    Pool { binders, top, copies }
}

fn advance(annot: &SessionType, label: Option<&Label>) -> SessionType {
    match (unf_s(annot), label) {
        (SessionType::Send(_, k) | SessionType::Recv(_, k), None) => *k,
        (SessionType::Select(arms) | SessionType::Branch(arms), Some(l)) => arms.get(l).cloned().unwrap_or_else(|| annot.clone()),
        _ => annot.clone(),
    }
}

struct Redex {
    rule: &'static str,
    location: String,
    parts: [(Origin, SessionProcess); 2],
    residuals: [SessionProcess; 2],
    advance: Option<(String, Option<Label>)>,
}

fn redexes(pl: &Pool<Binder, SessionProcess>) -> Vec<Redex> {
    let all_binders: Vec<&Binder> = pl.binders.iter().chain(pl.copies.iter().flatten().flat_map(|(bs, _)| bs.iter())).collect();
    let co_vars = |a: &str, b: &str| all_binders.iter().any(|bd| bd.co_vars(a, b));
    let session_bound = |a: &str| all_binders.iter().any(|bd| bd.binds_session(a));
    let cands = pl.candidates();
    let mut out = Vec::new();
    for &(oa, ta) in &cands {
        for &(ob, tb) in &cands {
            if !Pool::<Binder, SessionProcess>::compatible(oa, ob) {
                continue;
            }
            let parts = [(oa, ta.clone()), (ob, tb.clone())];
            match (ta, tb) {
                (SessionProcess::Output { subject: s, payload, cont }, SessionProcess::Input { subject: t, binder, cont: k, .. }) => {
                    let residuals = [(**cont).clone(), k.subst_value(binder, payload)];
                    if s != t && co_vars(s, t) {
                        out.push(Redex {
                            rule: "R-Com",
                            location: format!("{s}, {t}"),
                            parts,
                            residuals,
                            advance: Some((s.clone(), None)),
                        });
                    } else if s == t && !session_bound(s) {
                        out.push(Redex { rule: "R-Chan", location: s.clone(), parts, residuals, advance: None });
                    }
                }
                (SessionProcess::Selection { subject: s, label, cont }, SessionProcess::Branching { subject: t, arms })
                    if s != t && co_vars(s, t) =>
                {
                    if let Some(arm) = arms.get(label) {
                        let residuals = [(**cont).clone(), arm.clone()];
                        out.push(Redex {
                            rule: "R-Sel",
                            location: format!("{s}, {t}"),
                            parts,
                            residuals,
                            advance: Some((s.clone(), Some(label.clone()))),
                        });
                    }
                }
                _ => {}
            }
        }
    }
    out.sort_by_key(|r| (r.parts[0].0.min(r.parts[1].0), r.parts[0].0.max(r.parts[1].0)));
    out
}

/// All single reductions of `p`, leftmost redex first.
pub fn step_session(p: &SessionProcess) -> Vec<SessionStep> {
    let pl = pool(p);
    redexes(&pl)
        .into_iter()
        .map(|r| {
            let [(oa, _), (ob, _)] = r.parts;
            let [ra, rb] = r.residuals;
            let (mut binders, threads) = pl.assemble(&[(oa, ra), (ob, rb)]);
            if let Some((name, label)) = &r.advance {
                for b in &mut binders {
                    if let Binder::Sess { x, y, annot } = b {
                        if x == name || y == name {
                            *annot = advance(annot, label.as_ref());
                        }
                    }
                }
            }
            Step { rule: r.rule, location: r.location, result: wrap_all(binders, threads) }
        })
        .collect()
}

/// Every split of `p` into an evaluation context and a communication redex.
pub fn decompose(p: &SessionProcess) -> Vec<(EvaluationContext, SessionProcess)> {
    let pl = pool(p);
    redexes(&pl)
        .into_iter()
        .map(|r| {
            let [(oa, a), (ob, b)] = r.parts;
            let (binders, mut threads) = pl.assemble(&[(oa, SessionProcess::Nil), (ob, SessionProcess::Nil)]);
            threads.retain(|t| *t != SessionProcess::Nil);
            (EvaluationContext { binders, siblings: threads }, SessionProcess::par(a, b))
        })
        .collect()
}

/// Follows the first available step up to `max` times.
pub fn run_session(p: &SessionProcess, max: usize) -> Trace<SessionProcess> {
    let mut steps = Vec::new();
    let mut cur = p.clone();
    while steps.len() < max {
        match step_session(&cur).into_iter().next() {
            Some(s) => {
                cur = s.result.clone();
                steps.push(s);
            }
            None => break,
        }
    }
    Trace { start: p.clone(), steps }
}
