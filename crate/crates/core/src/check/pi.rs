//! Linear type checking of π processes.
//!
//! The context is threaded: each subprocess returns what it left unused, linear
//! capabilities disappear when used, and `l#[..]` splits into `li`/`lo` halves.

use crate::check::{show_context, Derivation, PiContext, TypeError};
use crate::syntax::*;
use crate::types::{equiv_pi, unf_p};

pub fn is_linear(t: &PiType) -> bool {
    match unf_p(t) {
        Ok(PiType::LinIn(_) | PiType::LinOut(_) | PiType::LinConn(_)) => true,
        Ok(PiType::Variant(bs)) => bs.values().any(is_linear),
        _ => false,
    }
}

fn location(p: &PiProcess) -> String {
    let s = p.to_string();
    if s.chars().count() > 80 {
        format!("{}...", s.chars().take(77).collect::<String>())
    } else {
        s
    }
}

fn err(rule: &'static str, p: &PiProcess, message: impl Into<String>) -> TypeError {
    TypeError { rule, message: message.into(), location: location(p) }
}

fn unfolded(t: &PiType, rule: &'static str, p: &PiProcess) -> Result<PiType, TypeError> {
    unf_p(t).map_err(|e| err(rule, p, e.to_string()))
}

// Gives up the part of `ctx` needed to type `v` at `want`.
fn provide(ctx: &mut PiContext, v: &PiValue, want: &PiType, rule: &'static str, p: &PiProcess) -> Result<(), TypeError> {
    match v {
        PiValue::Unit => match unfolded(want, rule, p)? {
            PiType::Unit => Ok(()),
            other => Err(err(rule, p, format!("`()` given where {other} is expected"))),
        },
        PiValue::Variant(l, inner) => match unfolded(want, rule, p)? {
            PiType::Variant(bs) => match bs.get(l) {
                Some(t) => provide(ctx, inner, t, rule, p),
                None => Err(err(rule, p, format!("label `{l}` is not in {want}"))),
            },
            other => Err(err(rule, p, format!("variant value `{v}` given where {other} is expected"))),
        },
        PiValue::Var(x) => {
            let have = ctx.get(x).cloned().ok_or_else(|| err(rule, p, format!("unbound or used-up name `{x}`")))?;
            if equiv_pi(&have, want) {
                if is_linear(&have) {
                    ctx.remove(x);
                }
                return Ok(());
            }
            // a linear connection can hand out one half
            if let PiType::LinConn(ts) = unfolded(&have, rule, p)? {
                match unfolded(want, rule, p)? {
                    PiType::LinIn(ws) if equiv_pi(&PiType::LinIn(ts.clone()), &PiType::LinIn(ws.clone())) => {
                        ctx.insert(x.clone(), PiType::LinOut(ts));
                        return Ok(());
                    }
                    PiType::LinOut(ws) if equiv_pi(&PiType::LinOut(ts.clone()), &PiType::LinOut(ws.clone())) => {
                        ctx.insert(x.clone(), PiType::LinIn(ts));
                        return Ok(());
                    }
                    _ => {}
                }
            }
            Err(err(rule, p, format!("`{x}`:{have} given where {want} is expected")))
        }
    }
}

/// `Γ ⊢ v : T` with every entry of `Γ` not used by `v` unrestricted.
pub fn check_pi_value(ctx: &PiContext, v: &PiValue, t: &PiType) -> Result<(), TypeError> {
    let here = PiProcess::Nil;
    let mut c = ctx.clone();
    provide(&mut c, v, t, "T-Val", &here)?;
    match c.iter().find(|(_, t)| is_linear(t)) {
        Some((x, t)) => Err(err("T-Val", &here, format!("unused linear `{x}`:{t}"))),
        None => Ok(()),
    }
}

pub fn check_pi_process(ctx: &PiContext, p: &PiProcess) -> Result<Derivation, TypeError> {
    let mut c = ctx.clone();
    let d = check(&mut c, p)?;
    if let Some((x, t)) = c.iter().find(|(_, t)| is_linear(t)) {
        return Err(err("T-Nil", p, format!("linear `{x}`:{t} is not used up")));
    }
    Ok(d)
}

// Introduces binders for the duration of `body`; each must be used up at the end.
fn scoped(
    ctx: &mut PiContext,
    binders: &[(String, PiType)],
    rule: &'static str,
    p: &PiProcess,
    body: impl FnOnce(&mut PiContext) -> Result<Derivation, TypeError>,
) -> Result<Derivation, TypeError> {
    let mut saved = Vec::new();
    for (i, (x, t)) in binders.iter().enumerate() {
        if binders[..i].iter().any(|(y, _)| y == x) {
            return Err(err(rule, p, format!("`{x}` is bound twice")));
        }
        let old = ctx.insert(x.clone(), t.clone());
        if let Some(o) = &old {
            if is_linear(o) {
                return Err(err(rule, p, format!("binding `{x}` would discard its linear type {o}")));
            }
        }
        saved.push((x.clone(), old));
    }
    let d = body(ctx)?;
    for (x, old) in saved {
        if let Some(t) = ctx.get(&x) {
            if is_linear(t) {
                return Err(err(rule, p, format!("linear `{x}`:{t} is not used up")));
            }
        }
        match old {
            Some(o) => ctx.insert(x, o),
            None => ctx.remove(&x),
        };
    }
    Ok(d)
}

fn check(ctx: &mut PiContext, p: &PiProcess) -> Result<Derivation, TypeError> {
    use PiProcess::*;
    let j = format!("{} ⊢ {}", show_context(ctx), p);
    let leaf = |rule, side, premises| Derivation { rule, judgment: j.clone(), side, premises };
    match p {
        Nil => Ok(leaf("T-Nil", vec![], vec![])),
        Par(a, b) => {
            let da = check(ctx, a)?;
            let db = check(ctx, b)?;
            Ok(leaf("T-Par", vec![], vec![da, db]))
        }
        Res { name, annot, body } => {
            if !annot.well_formed() {
                return Err(err("T-Res", p, format!("annotation {annot} is not closed and guarded")));
            }
            let d = scoped(ctx, &[(name.clone(), annot.clone())], "T-Res", p, |c| check(c, body))?;
            Ok(leaf("T-Res", vec![], vec![d]))
        }
        Repl(body) => {
            let mut un: PiContext = ctx.iter().filter(|(_, t)| !is_linear(t)).map(|(k, v)| (k.clone(), v.clone())).collect();
            let before = un.clone();
            let d = check(&mut un, body)?;
            if un != before {
                return Err(err("T-Rep", p, "replicated process uses a linear capability"));
            }
            Ok(leaf("T-Rep", vec![], vec![d]))
        }
        Output { subject, payloads, cont } => {
            let t = ctx.get(subject).cloned().ok_or_else(|| err("T-Out", p, format!("unbound or used-up name `{subject}`")))?;
            let (args, side) = match unfolded(&t, "T-Out", p)? {
                PiType::LinOut(ts) => {
                    ctx.remove(subject);
                    (ts, vec![])
                }
                PiType::LinConn(ts) => {
                    ctx.insert(subject.clone(), PiType::LinIn(ts.clone()));
                    (ts, vec![])
                }
                PiType::Conn(ts) => (ts, vec![format!("un({subject}:{t})")]),
                _ => return Err(err("T-Out", p, format!("`{subject}`:{t} has no output capability"))),
            };
            if args.len() != payloads.len() {
                return Err(err("T-Out", p, format!("arity mismatch: {} expects {} values", t, args.len())));
            }
            for (v, want) in payloads.iter().zip(&args) {
                provide(ctx, v, want, "T-Out", p)?;
            }
            let d = check(ctx, cont)?;
            Ok(leaf("T-Out", side, vec![d]))
        }
        Input { subject, binders, cont } => {
            let t = ctx.get(subject).cloned().ok_or_else(|| err("T-In", p, format!("unbound or used-up name `{subject}`")))?;
            let (args, side) = match unfolded(&t, "T-In", p)? {
                PiType::LinIn(ts) => {
                    ctx.remove(subject);
                    (ts, vec![])
                }
                PiType::LinConn(ts) => {
                    ctx.insert(subject.clone(), PiType::LinOut(ts.clone()));
                    (ts, vec![])
                }
                PiType::Conn(ts) => (ts, vec![format!("un({subject}:{t})")]),
                _ => return Err(err("T-In", p, format!("`{subject}`:{t} has no input capability"))),
            };
            if args.len() != binders.len() {
                return Err(err("T-In", p, format!("arity mismatch: {} carries {} values", t, args.len())));
            }
            let bs: Vec<(String, PiType)> = binders.iter().cloned().zip(args).collect();
            let d = scoped(ctx, &bs, "T-In", p, |c| check(c, cont))?;
            Ok(leaf("T-In", side, vec![d]))
        }
        Case { scrutinee, arms } => match scrutinee {
            PiValue::Var(y) => {
                let t = ctx.get(y).cloned().ok_or_else(|| err("T-Case", p, format!("unbound or used-up name `{y}`")))?;
                let PiType::Variant(vs) = unfolded(&t, "T-Case", p)? else {
                    return Err(err("T-Case", p, format!("`{y}`:{t} is not a variant")));
                };
                if !vs.same_labels(arms) {
                    return Err(err("T-Case", p, format!("case labels differ from those of {t}")));
                }
                if is_linear(&t) {
                    ctx.remove(y);
                }
                let mut premises = Vec::new();
                let mut after: Option<PiContext> = None;
                for (ty, (x, q)) in vs.values().zip(arms.values()) {
                    let mut c = ctx.clone();
                    premises.push(scoped(&mut c, &[(x.clone(), ty.clone())], "T-Case", p, |c| check(c, q))?);
                    match &after {
                        None => after = Some(c),
                        Some(prev) if same_context(prev, &c) => {}
                        Some(_) => return Err(err("T-Case", p, "case arms use different resources")),
                    }
                }
                if let Some(c) = after {
                    *ctx = c;
                }
                Ok(leaf("T-Case", vec![], premises))
            }
            PiValue::Variant(l, v) => {
                let Some((x, q)) = arms.get(l) else {
                    return Err(err("T-Case", p, format!("no arm for label `{l}`")));
                };
                let q = q.subst_values(&std::collections::HashMap::from([(x.clone(), (**v).clone())])).map_err(|e| err("T-Case", p, e))?;
                let d = check(ctx, &q)?;
                Ok(leaf("T-Case", vec![format!("{l} selected")], vec![d]))
            }
            PiValue::Unit => Err(err("T-Case", p, "case on `()`")),
        },
    }
}

fn same_context(a: &PiContext, b: &PiContext) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|((x, s), (y, t))| x == y && equiv_pi(s, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_pi_process;

    fn check_closed(src: &str) -> Result<Derivation, TypeError> {
        check_pi_process(&PiContext::new(), &parse_pi_process(src).unwrap())
    }

    #[test]
    fn linear_channel_used_once_each_way() {
        assert!(check_closed("(new c: l#[unit]) (c!(()).0 | c?(z).0)").is_ok());
        assert!(check_closed("(new c: l#[unit]) (c!(()).0 | c!(()).0 | c?(z).0)").is_err());
        assert!(check_closed("(new c: l#[unit]) c!(()).0").is_err());
    }

    #[test]
    fn continuation_passing() {
        let src = "(new z: l#[<l:empty[]>]) ((new c: empty[]) z!(l(c)).0 | z?(y). case y of {l(c) => 0})";
        assert!(check_closed(src).is_ok(), "{:?}", check_closed(src));
    }

    #[test]
    fn replication_cannot_use_linear() {
        assert!(check_closed("(new c: l#[]) (*(c!().0) | c?().0)").is_err());
        assert!(check_closed("(new a: #[unit]) (*(a?(x).0) | a!(()).0)").is_ok());
    }

    #[test]
    fn case_arms_must_agree() {
        let src = "(new c: l#[]) (new z: l#[<l:unit, r:unit>]) (z!(l(())).0 | z?(y). case y of {l(u) => c!().0, r(u) => 0} | c?().0)";
        assert_eq!(check_closed(src).unwrap_err().rule, "T-Case");
    }

    #[test]
    fn value_typing() {
        let mut ctx = PiContext::new();
        ctx.insert("c".into(), PiType::LinConn(vec![]));
        assert!(check_pi_value(&ctx, &PiValue::Var("c".into()), &PiType::LinOut(vec![])).is_err());
        ctx.insert("c".into(), PiType::LinOut(vec![]));
        assert!(check_pi_value(&ctx, &PiValue::Var("c".into()), &PiType::LinOut(vec![])).is_ok());
    }
}
