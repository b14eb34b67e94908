//! Encoding of session types and processes into linear π types and processes.
//!
//! Session communication becomes continuation passing: every output or selection
//! sends a fresh channel on which the rest of the session continues, selection
//! sends a variant value, and branching inputs a variant and cases on it.

use std::collections::{BTreeSet, HashMap};

use crate::check::{PiContext, SessionContext};
use crate::syntax::*;
use crate::types::{complement_pi, complement_session, unf_p, unf_s, unf_t};

/// `⟦S⟧`. The continuation of an output is `⌊⟦S⟧⌋`, the π complement of the
/// encoding, which is equivalent to `⟦⌊S⌋⟧` but never re-encodes the carried
/// copies that a session complement introduces.
pub fn encode_session_type(t: &SessionType) -> PiType {
    let co = |s: &SessionType| complement_pi(&encode_session_type(s)).expect("encoded session types have complements");
    match t {
        SessionType::End => PiType::NoCap,
        SessionType::Send(c, k) => PiType::LinOut(vec![encode_type(c), co(k)]),
        SessionType::Recv(c, k) => PiType::LinIn(vec![encode_type(c), encode_session_type(k)]),
        SessionType::Select(bs) => PiType::LinOut(vec![PiType::Variant(bs.map(co))]),
        SessionType::Branch(bs) => PiType::LinIn(vec![PiType::Variant(bs.map(encode_session_type))]),
        SessionType::Var(v) => PiType::Var(v.clone()),
        SessionType::Rec(x, body) => PiType::Rec(x.clone(), Box::new(encode_session_type(body))),
    }
}

pub fn encode_type(t: &Type) -> PiType {
    match t {
        Type::Session(s) => encode_session_type(s),
        Type::Chan(c) => PiType::Conn(vec![encode_type(c)]),
        Type::Unit => PiType::Unit,
        Type::Var(x) => PiType::var(x),
        Type::Rec(x, body) => PiType::Rec(x.clone(), Box::new(encode_type(body))),
    }
}

/// Annotation for the channel that carries a session of type `s`: both halves of
/// its encoded capability, or no capability once the session has ended.
pub fn restriction_annotation(s: &SessionType) -> PiType {
    match unf_p(&encode_session_type(s)) {
        Ok(PiType::LinIn(ts) | PiType::LinOut(ts)) => PiType::LinConn(ts),
        _ => PiType::NoCap,
    }
}

pub fn encode_context(ctx: &SessionContext) -> PiContext {
    ctx.iter().map(|(x, t)| (x.clone(), encode_type(t))).collect()
}

/// Deterministic supply of continuation channel names.
pub struct NameSupply {
    avoid: BTreeSet<String>,
    next: usize,
}

impl NameSupply {
    pub fn new(avoid: BTreeSet<String>) -> Self {
        NameSupply { avoid, next: 0 }
    }

    pub fn fresh(&mut self, prefix: &str) -> String {
        loop {
            let n = format!("{prefix}{}", self.next);
            self.next += 1;
            if self.avoid.insert(n.clone()) {
                return n;
            }
        }
    }
}

struct Encoder {
    names: NameSupply,
}

// Per-scope state: current session types of source names, and the renaming `f`
// of session names to the π channels that currently stand for them.
#[derive(Clone)]
struct Scope {
    types: HashMap<String, Type>,
    f: HashMap<String, String>,
}

impl Scope {
    fn session_of(&self, x: &str) -> Option<SessionType> {
        match unf_t(self.types.get(x)?) {
            Type::Session(s) => Some(unf_s(&s)),
            _ => None,
        }
    }

    fn name(&self, x: &str) -> String {
        self.f.get(x).cloned().unwrap_or_else(|| x.to_string())
    }

    fn value(&self, v: &SessionValue) -> PiValue {
        match v {
            SessionValue::Var(x) => PiValue::Var(self.name(x)),
            SessionValue::Unit => PiValue::Unit,
        }
    }

    fn is_session(&self, x: &str) -> bool {
        self.f.contains_key(x)
    }

    fn bind(&mut self, x: &str, t: &Type) {
        self.types.insert(x.to_string(), t.clone());
        if matches!(unf_t(t), Type::Session(_)) {
            self.f.insert(x.to_string(), x.to_string());
        } else {
            self.f.remove(x);
        }
    }

    fn continue_on(&self, x: &str, c: &str, next: Option<SessionType>) -> Scope {
        let mut s = self.clone();
        s.f.insert(x.to_string(), c.to_string());
        match next {
            Some(t) => s.types.insert(x.to_string(), Type::from(t)),
            None => s.types.remove(x),
        };
        s
    }
}

impl Encoder {
    fn enc(&mut self, p: &SessionProcess, sc: &Scope) -> PiProcess {
        use SessionProcess::*;
        match p {
            Nil => PiProcess::Nil,
            Par(a, b) => PiProcess::par(self.enc(a, sc), self.enc(b, sc)),
            Repl(q) => PiProcess::Repl(Box::new(self.enc(q, sc))),
            ChanRes { name, annot, body } => {
                let mut inner = sc.clone();
                inner.bind(name, annot);
                PiProcess::Res { name: name.clone(), annot: encode_type(annot), body: Box::new(self.enc(body, &inner)) }
            }
            SessRes { x, y, annot, body } => {
                let c = self.names.fresh("c");
                let mut inner = sc.clone();
                inner.bind(x, &Type::Session(annot.clone()));
                inner.bind(y, &Type::Session(complement_session(annot)));
                inner.f.insert(x.clone(), c.clone());
                inner.f.insert(y.clone(), c.clone());
                PiProcess::Res { name: c, annot: restriction_annotation(annot), body: Box::new(self.enc(body, &inner)) }
            }
            Output { subject, payload, cont } if sc.is_session(subject) => {
                let next = match sc.session_of(subject) {
                    Some(SessionType::Send(_, k)) => Some(*k),
                    _ => None,
                };
                let annot = next.as_ref().map_or(PiType::NoCap, restriction_annotation);
                let c = self.names.fresh("c");
                let out = PiProcess::Output {
                    subject: sc.name(subject),
                    payloads: vec![sc.value(payload), PiValue::Var(c.clone())],
                    cont: Box::new(self.enc(cont, &sc.continue_on(subject, &c, next))),
                };
                PiProcess::Res { name: c, annot, body: Box::new(out) }
            }
            Output { subject, payload, cont } => {
                PiProcess::Output { subject: sc.name(subject), payloads: vec![sc.value(payload)], cont: Box::new(self.enc(cont, sc)) }
            }
            Input { subject, binder, annot, cont } if sc.is_session(subject) => {
                let next = match sc.session_of(subject) {
                    Some(SessionType::Recv(_, k)) => Some(*k),
                    _ => None,
                };
                let c = self.names.fresh("c");
                let mut inner = sc.continue_on(subject, &c, next);
                inner.bind(binder, annot);
                PiProcess::Input { subject: sc.name(subject), binders: vec![binder.clone(), c], cont: Box::new(self.enc(cont, &inner)) }
            }
            Input { subject, binder, annot, cont } => {
                let mut inner = sc.clone();
                inner.bind(binder, annot);
                PiProcess::Input { subject: sc.name(subject), binders: vec![binder.clone()], cont: Box::new(self.enc(cont, &inner)) }
            }
            Selection { subject, label, cont } => {
                let next = match sc.session_of(subject) {
                    Some(SessionType::Select(arms)) => arms.get(label).cloned(),
                    _ => None,
                };
                let annot = next.as_ref().map_or(PiType::NoCap, restriction_annotation);
                let c = self.names.fresh("c");
                let out = PiProcess::Output {
                    subject: sc.name(subject),
                    payloads: vec![PiValue::Variant(label.clone(), Box::new(PiValue::Var(c.clone())))],
                    cont: Box::new(self.enc(cont, &sc.continue_on(subject, &c, next))),
                };
                PiProcess::Res { name: c, annot, body: Box::new(out) }
            }
            Branching { subject, arms } => {
                let tarms = match sc.session_of(subject) {
                    Some(SessionType::Branch(t)) => Some(t),
                    _ => None,
                };
                let y = self.names.fresh("y");
                let c = self.names.fresh("c");
                let cases = arms
                    .iter()
                    .map(|(l, q)| {
                        let next = tarms.as_ref().and_then(|t| t.get(l).cloned());
                        (l.clone(), (c.clone(), self.enc(q, &sc.continue_on(subject, &c, next))))
                    })
                    .collect();
                PiProcess::Input {
                    subject: sc.name(subject),
                    binders: vec![y.clone()],
                    cont: Box::new(PiProcess::Case { scrutinee: PiValue::Var(y), arms: Branches::new(cases) }),
                }
            }
        }
    }
}

/// `⟦P⟧_f` where `f` starts as the identity on the session names of `ctx`.
///
/// Continuation channels are named `c0`, `c1`, ... and branch scrutinees `y0`, ...,
/// skipping every name already used in `P` or `ctx`.
pub fn encode_process(ctx: &SessionContext, p: &SessionProcess) -> PiProcess {
    let mut avoid = p.all_names();
    avoid.extend(ctx.keys().cloned());
    let mut sc = Scope { types: HashMap::new(), f: HashMap::new() };
    for (x, t) in ctx {
        sc.bind(x, t);
    }
    Encoder { names: NameSupply::new(avoid) }.enc(p, &sc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::check::{check_pi_process, check_session_process};
    use crate::parse::{parse_pi_process, parse_pi_type, parse_session_process, parse_session_type};

    fn enc_ty(src: &str) -> PiType {
        encode_session_type(&parse_session_type(src).unwrap())
    }

    #[test]
    fn type_examples() {
        assert_eq!(enc_ty("end"), PiType::NoCap);
        assert!(enc_ty("rec X.+{l:X}").alpha_eq(&parse_pi_type("rec X.lo[<l:~X>]").unwrap()));
        assert!(enc_ty("rec X.&{l:X}").alpha_eq(&parse_pi_type("rec X.li[<l:X>]").unwrap()));
        assert_eq!(enc_ty("!unit.end"), parse_pi_type("lo[unit, empty[]]").unwrap());
        assert_eq!(enc_ty("?unit.!unit.end"), parse_pi_type("li[unit, lo[unit, empty[]]]").unwrap());
    }

    const SYS: &str = "type T = rec X.+{l:X}
        type U = rec X.&{l:X}
        (newc a: #T) (newc b: #U) (new v w: T)
          ( a!v.0 | b!w.0 | *(a?(x:T). sel x l. a!x.0) | *(b?(x:U). bra x {l: b!x.0}) )";

    #[test]
    fn sys_encoding_shape() {
        let p = parse_session_process(SYS).unwrap();
        let q = encode_process(&SessionContext::new(), &p);
        let expected = parse_pi_process(
            "type tau = rec X.lo[<l:~X>]
             type ups = rec X.li[<l:X>]
             (new a: #[tau]) (new b: #[ups]) (new z: l#[<l:ups>])
               ( a!(z).0 | b!(z).0
               | *(a?(x). (new c: l#[<l:ups>]) x!(l(c)). a!(c).0)
               | *(b?(x). x?(y). case y of {l(c) => b!(c).0}) )",
        )
        .unwrap();
        assert!(q.alpha_eq(&expected), "{q}");
        check_pi_process(&PiContext::new(), &q).unwrap();
    }

    #[test]
    fn encoded_sessions_typecheck() {
        for src in [
            "(new x y: !unit.end) (x!().0 | y?(z:unit).0)",
            "(new x y: +{l:end, r:!unit.end}) (sel x r. x!().0 | bra y {l: 0, r: y?(z:unit).0})",
            "(new x y: !(!unit.end).end) (new u w: !unit.end) (x!u.w?(k:unit).0 | y?(z:!unit.end).z!().0)",
        ] {
            let p = parse_session_process(src).unwrap();
            check_session_process(&SessionContext::new(), &p).unwrap();
            let q = encode_process(&SessionContext::new(), &p);
            assert!(check_pi_process(&PiContext::new(), &q).is_ok(), "{q}: {:?}", check_pi_process(&PiContext::new(), &q));
        }
    }
}
