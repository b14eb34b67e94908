//! Linear type checking of session processes.
//!
//! The context handed to a subprocess is exactly what it may use: `0` requires
//! every remaining entry to be unrestricted, and `|` splits linear entries by free names.

use crate::check::{show_context, Derivation, SessionContext, TypeError};
use crate::syntax::*;
use crate::types::{complement_session, equiv_type, subtype_session, subtype_type, unf_s, unf_t};

/// A type is linear when it is a session type whose unfolding is not `end`.
pub fn is_linear(t: &Type) -> bool {
    match unf_t(t) {
        Type::Session(s) => unf_s(&s) != SessionType::End,
        _ => false,
    }
}

fn session_of(t: &Type) -> Option<SessionType> {
    match unf_t(t) {
        Type::Session(s) => Some(unf_s(&s)),
        _ => None,
    }
}

fn location(p: &SessionProcess) -> String {
    let s = p.to_string();
    if s.chars().count() > 80 {
        format!("{}...", s.chars().take(77).collect::<String>())
    } else {
        s
    }
}

fn err(rule: &'static str, p: &SessionProcess, message: impl Into<String>) -> TypeError {
    TypeError { rule, message: message.into(), location: location(p) }
}

fn judgment(ctx: &SessionContext, p: &SessionProcess) -> String {
    format!("{} ⊢ {}", show_context(ctx), p)
}

fn bind(ctx: &mut SessionContext, name: &str, t: Type, rule: &'static str, p: &SessionProcess) -> Result<(), TypeError> {
    if let Some(old) = ctx.get(name) {
        if is_linear(old) {
            return Err(err(rule, p, format!("binding `{name}` would discard its linear type {old}")));
        }
    }
    ctx.insert(name.to_string(), t);
    Ok(())
}

fn relation(u: &Type, t: &Type) -> String {
    match (u, t) {
        (Type::Session(_), _) | (_, Type::Session(_)) => format!("{u} ≼s {t}"),
        _ => format!("{u} ≤ {t}"),
    }
}

/// `Γ ⊢ v : T` with all other entries of `Γ` unrestricted.
pub fn check_session_value(ctx: &SessionContext, v: &SessionValue, t: &Type) -> Result<(), TypeError> {
    let here = SessionProcess::Nil;
    let rest_unrestricted = |skip: Option<&str>| {
        ctx.iter()
            .filter(|(k, _)| Some(k.as_str()) != skip)
            .find(|(_, ty)| is_linear(ty))
            .map_or(Ok(()), |(k, ty)| Err(err("T-Var", &here, format!("unused linear `{k}`:{ty}"))))
    };
    match v {
        SessionValue::Unit => {
            if unf_t(t) != Type::Unit {
                return Err(err("T-Unit", &here, format!("`()` is not of type {t}")));
            }
            rest_unrestricted(None)
        }
        SessionValue::Var(x) => {
            let u = ctx.get(x).ok_or_else(|| err("T-Var", &here, format!("unbound name `{x}`")))?;
            if !subtype_type(u, t) {
                return Err(err("T-Var", &here, format!("`{x}`:{u} is not a subtype of {t}")));
            }
            rest_unrestricted(Some(x))
        }
    }
}

pub fn check_session_process(ctx: &SessionContext, p: &SessionProcess) -> Result<Derivation, TypeError> {
    check(ctx.clone(), p)
}

fn check(mut ctx: SessionContext, p: &SessionProcess) -> Result<Derivation, TypeError> {
    use SessionProcess::*;
    let j = judgment(&ctx, p);
    match p {
        Nil => {
            if let Some((x, t)) = ctx.iter().find(|(_, t)| is_linear(t)) {
                return Err(err("T-Nil", p, format!("linear `{x}`:{t} is not used up")));
            }
            Ok(Derivation { rule: "T-Nil", judgment: j, side: vec![], premises: vec![] })
        }
        Par(a, b) => {
            let (fa, fb) = (a.free_names(), b.free_names());
            let (mut left, mut right) = (SessionContext::new(), SessionContext::new());
            for (x, t) in &ctx {
                if !is_linear(t) {
                    left.insert(x.clone(), t.clone());
                    right.insert(x.clone(), t.clone());
                } else if fa.contains(x) && fb.contains(x) {
                    return Err(err("T-Par", p, format!("linear `{x}`:{t} is used on both sides")));
                } else if fb.contains(x) {
                    right.insert(x.clone(), t.clone());
                } else {
                    left.insert(x.clone(), t.clone());
                }
            }
            let da = check(left, a)?;
            let db = check(right, b)?;
            Ok(Derivation { rule: "T-Par", judgment: j, side: vec![], premises: vec![da, db] })
        }
        SessRes { x, y, annot, body } => {
            if x == y {
                return Err(err("T-Res", p, "co-variables must be distinct"));
            }
            if !annot.well_formed() {
                return Err(err("T-Res", p, format!("annotation {annot} is not closed and guarded")));
            }
            let co = complement_session(annot);
            bind(&mut ctx, x, Type::Session(annot.clone()), "T-Res", p)?;
            bind(&mut ctx, y, Type::Session(co.clone()), "T-Res", p)?;
            let d = check(ctx, body)?;
            Ok(Derivation { rule: "T-Res", judgment: j, side: vec![format!("{annot} ⊥s {co}")], premises: vec![d] })
        }
        ChanRes { name, annot, body } => {
            if !annot.well_formed() || !matches!(unf_t(annot), Type::Chan(_)) {
                return Err(err("T-ResC", p, format!("{annot} is not a channel type")));
            }
            bind(&mut ctx, name, annot.clone(), "T-ResC", p)?;
            let d = check(ctx, body)?;
            Ok(Derivation { rule: "T-ResC", judgment: j, side: vec![], premises: vec![d] })
        }
        Repl(body) => {
            if let Some((x, t)) = ctx.iter().find(|(_, t)| is_linear(t)) {
                return Err(err("T-Rep", p, format!("replicated process sees linear `{x}`:{t}")));
            }
            let d = check(ctx, body)?;
            Ok(Derivation { rule: "T-Rep", judgment: j, side: vec![], premises: vec![d] })
        }
        Input { subject, binder, annot, cont } => {
            let t = ctx.get(subject).cloned().ok_or_else(|| err("T-In", p, format!("unbound name `{subject}`")))?;
            let mut side = Vec::new();
            let carried = match (session_of(&t), unf_t(&t)) {
                (Some(SessionType::Recv(carried, k)), _) => {
                    ctx.insert(subject.clone(), Type::from(*k));
                    *carried
                }
                (_, Type::Chan(carried)) => {
                    side.push(format!("un({subject}:{t})"));
                    *carried
                }
                _ => return Err(err("T-In", p, format!("`{subject}`:{t} cannot receive"))),
            };
            if !annot.well_formed() || !equiv_type(annot, &carried) {
                return Err(err("T-In", p, format!("binder annotation {annot} differs from the carried type {carried}")));
            }
            bind(&mut ctx, binder, annot.clone(), "T-In", p)?;
            let d = check(ctx, cont)?;
            Ok(Derivation { rule: "T-In", judgment: j, side, premises: vec![d] })
        }
        Output { subject, payload, cont } => {
            let t = ctx.get(subject).cloned().ok_or_else(|| err("T-Out", p, format!("unbound name `{subject}`")))?;
            let (carried, next) = match (session_of(&t), unf_t(&t)) {
                (Some(SessionType::Send(carried, k)), _) => (*carried, Some(Type::from(*k))),
                (_, Type::Chan(carried)) => (*carried, None),
                _ => return Err(err("T-Out", p, format!("`{subject}`:{t} cannot send"))),
            };
            let mut side = Vec::new();
            match payload {
                SessionValue::Unit => {
                    if unf_t(&carried) != Type::Unit {
                        return Err(err("T-Out", p, format!("`()` sent where {carried} is expected")));
                    }
                }
                SessionValue::Var(w) => {
                    if w == subject && next.is_some() {
                        return Err(err("T-Out", p, format!("`{w}` is sent over itself")));
                    }
                    let u = ctx.get(w).cloned().ok_or_else(|| err("T-Out", p, format!("unbound name `{w}`")))?;
                    if !subtype_type(&u, &carried) {
                        return Err(err("T-Out", p, format!("`{w}`:{u} is not a subtype of {carried}")));
                    }
                    side.push(relation(&u, &carried));
                    if is_linear(&u) {
                        ctx.remove(w);
                    }
                }
            }
            if let Some(k) = next {
                ctx.insert(subject.clone(), k);
            }
            let d = check(ctx, cont)?;
            Ok(Derivation { rule: "T-Out", judgment: j, side, premises: vec![d] })
        }
        Selection { subject, label, cont } => {
            let t = ctx.get(subject).cloned().ok_or_else(|| err("T-Select", p, format!("unbound name `{subject}`")))?;
            let Some(SessionType::Select(arms)) = session_of(&t) else {
                return Err(err("T-Select", p, format!("`{subject}`:{t} offers no selection")));
            };
            let Some(s) = arms.get(label) else {
                return Err(err("T-Select", p, format!("label `{label}` is not offered by {t}")));
            };
            let target = SessionType::Select(Branches::single(label.clone(), s.clone()));
            let Type::Session(ts) = unf_t(&t) else { unreachable!("session_of succeeded") };
            debug_assert!(subtype_session(&ts, &target));
            let side = vec![format!("{t} ≼s {target}")];
            ctx.insert(subject.clone(), Type::from(s.clone()));
            let d = check(ctx, cont)?;
            Ok(Derivation { rule: "T-Select", judgment: j, side, premises: vec![d] })
        }
        Branching { subject, arms } => {
            let t = ctx.get(subject).cloned().ok_or_else(|| err("T-Branch", p, format!("unbound name `{subject}`")))?;
            let Some(SessionType::Branch(tarms)) = session_of(&t) else {
                return Err(err("T-Branch", p, format!("`{subject}`:{t} offers no branching")));
            };
            if !tarms.same_labels(arms) {
                return Err(err("T-Branch", p, format!("branch labels differ from those of {t}")));
            }
            let side = vec![format!("{t} ≼s {}", SessionType::Branch(tarms.clone()))];
            let mut premises = Vec::new();
            for ((_, s), q) in tarms.iter().zip(arms.values()) {
                let mut c = ctx.clone();
                c.insert(subject.clone(), Type::from(s.clone()));
                premises.push(check(c, q)?);
            }
            Ok(Derivation { rule: "T-Branch", judgment: j, side, premises })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_session_process, parse_type};

    fn ok(src: &str) -> Derivation {
        check_session_process(&SessionContext::new(), &parse_session_process(src).unwrap()).unwrap()
    }

    fn bad(src: &str) -> TypeError {
        check_session_process(&SessionContext::new(), &parse_session_process(src).unwrap()).unwrap_err()
    }

    const SYS: &str = "type T = rec X.+{l:X}
        type U = rec X.&{l:X}
        (newc a: #T) (newc b: #U) (new v w: T)
          ( a!v.0 | b!w.0 | *(a?(x:T). sel x l. a!x.0) | *(b?(x:U). bra x {l: b!x.0}) )";

    #[test]
    fn sys_is_well_typed() {
        let d = ok(SYS);
        let rules = d.rules();
        let spine = ["T-Rep", "T-In", "T-Select", "T-Out", "T-Nil"];
        let pos = rules.iter().position(|r| *r == "T-Rep").unwrap();
        assert_eq!(&rules[pos..pos + 5], &spine);
        let sides = d.side_conditions().join("\n");
        assert!(sides.contains("rec X.+{l:X} ≼s +{l:rec X.+{l:X}}"), "{sides}");
        assert!(sides.contains("rec X.+{l:X} ≼s rec X.+{l:X}"), "{sides}");
    }

    #[test]
    fn simple_sessions() {
        ok("(new x y: !unit.end) (x!().0 | y?(z:unit).0)");
        ok("(new x y: +{l:end, r:!unit.end}) (sel x r. x!().0 | bra y {l: 0, r: y?(z:unit).0})");
    }

    #[test]
    fn linearity_violations() {
        assert_eq!(bad("(new x y: !unit.end) (x!().0 | x!().0 | y?(z:unit).0)").rule, "T-Par");
        assert_eq!(bad("(new x y: !unit.end) 0").rule, "T-Nil");
        assert_eq!(bad("(new x y: !unit.end) (x!().0 | y!().0)").rule, "T-Out");
        assert_eq!(bad("(new x y: !unit.end) *(x!().0 | y?(z:unit).0)").rule, "T-Rep");
    }

    #[test]
    fn annotation_must_match() {
        assert_eq!(bad("(new x y: !unit.end) (x!().0 | y?(z:end).0)").rule, "T-In");
    }

    #[test]
    fn value_typing() {
        let mut ctx = SessionContext::new();
        ctx.insert("x".into(), parse_type("rec X.+{l:X}").unwrap());
        let t = parse_type("+{l:rec X.+{l:X}}").unwrap();
        assert!(check_session_value(&ctx, &SessionValue::Var("x".into()), &t).is_ok());
        assert!(check_session_value(&ctx, &SessionValue::Unit, &Type::Unit).is_err());
    }
}
