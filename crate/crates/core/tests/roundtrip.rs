//! `parse(pretty(n))` is alpha-equivalent to `n`, on ASTs built by proptest
//! strategies independent of the crate's own generators.

use std::collections::BTreeMap;

use proptest::prelude::*;
use sessc::parse::*;
use sessc::syntax::*;

const VARS: [&str; 2] = ["X", "Y"];
const NAMES: [&str; 4] = ["a", "b", "x", "y"];

fn label() -> impl Strategy<Value = Label> {
    (0..3usize).prop_map(|i| Label::new(format!("l{i}")))
}

fn arms<T: Clone + std::fmt::Debug>(inner: impl Strategy<Value = T>) -> impl Strategy<Value = Branches<T>> {
    prop::collection::vec((label(), inner), 1..3).prop_map(|v| {
        let dedup: BTreeMap<Label, T> = v.into_iter().collect();
        Branches::new(dedup.into_iter().collect())
    })
}

fn raw_session() -> impl Strategy<Value = SessionType> {
    let leaf = prop_oneof![Just(SessionType::End), prop::sample::select(&VARS[..]).prop_map(SessionType::var)];
    leaf.prop_recursive(4, 24, 3, |inner| {
        let carried = prop_oneof![Just(Type::Unit), Just(Type::Chan(Box::new(Type::Unit))), inner.clone().prop_map(Type::from),];
        prop_oneof![
            (carried.clone(), inner.clone()).prop_map(|(c, k)| SessionType::send(c, k)),
            (carried, inner.clone()).prop_map(|(c, k)| SessionType::recv(c, k)),
            arms(inner.clone()).prop_map(SessionType::Select),
            arms(inner.clone()).prop_map(SessionType::Branch),
            (prop::sample::select(&VARS[..]), inner).prop_map(|(x, b)| SessionType::rec(x, b)),
        ]
    })
}

// Closes a raw type: unbound or unguarded variables become `end`, and a
// recursion body that is not a communication gains a leading send.
fn close_session(t: &SessionType, bound: &[String], guarded: bool) -> SessionType {
    let close_t = |c: &Type| match c {
        Type::Session(s) => Type::from(close_session(s, bound, true)),
        Type::Var(x) if bound.contains(x) => c.clone(),
        Type::Var(_) => Type::Unit,
        other => other.clone(),
    };
    match t {
        SessionType::End => SessionType::End,
        SessionType::Var(v) if guarded && bound.contains(&v.name) => t.clone(),
        SessionType::Var(_) => SessionType::End,
        SessionType::Send(c, k) => SessionType::Send(Box::new(close_t(c)), Box::new(close_session(k, bound, true))),
        SessionType::Recv(c, k) => SessionType::Recv(Box::new(close_t(c)), Box::new(close_session(k, bound, true))),
        SessionType::Select(bs) => SessionType::Select(bs.map(|b| close_session(b, bound, true))),
        SessionType::Branch(bs) => SessionType::Branch(bs.map(|b| close_session(b, bound, true))),
        SessionType::Rec(x, body) => {
            let mut inner = bound.to_vec();
            inner.push(x.clone());
            let body = match body.as_ref() {
                SessionType::End | SessionType::Var(_) | SessionType::Rec(..) => SessionType::send(Type::Unit, (**body).clone()),
                _ => (**body).clone(),
            };
            SessionType::Rec(x.clone(), Box::new(close_session(&body, &inner, false)))
        }
    }
}

fn session_type() -> impl Strategy<Value = SessionType> {
    raw_session().prop_map(|t| close_session(&t, &[], false))
}

fn raw_pi() -> impl Strategy<Value = PiType> {
    let leaf = prop_oneof![
        Just(PiType::NoCap),
        Just(PiType::Unit),
        prop::sample::select(&VARS[..]).prop_map(PiType::var),
        prop::sample::select(&VARS[..]).prop_map(PiType::dual_var),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        let list = prop::collection::vec(inner.clone(), 0..3);
        prop_oneof![
            list.clone().prop_map(PiType::LinIn),
            list.clone().prop_map(PiType::LinOut),
            list.clone().prop_map(PiType::LinConn),
            list.prop_map(PiType::Conn),
            arms(inner.clone()).prop_map(PiType::Variant),
            (prop::sample::select(&VARS[..]), prop::collection::vec(inner, 0..3)).prop_map(|(x, ts)| PiType::rec(x, PiType::LinOut(ts))),
        ]
    })
}

fn close_pi(t: &PiType, bound: &[String]) -> PiType {
    let list = |ts: &Vec<PiType>| ts.iter().map(|t| close_pi(t, bound)).collect();
    match t {
        PiType::Var(v) if bound.contains(&v.name) => t.clone(),
        PiType::Var(_) => PiType::NoCap,
        PiType::LinIn(ts) => PiType::LinIn(list(ts)),
        PiType::LinOut(ts) => PiType::LinOut(list(ts)),
        PiType::LinConn(ts) => PiType::LinConn(list(ts)),
        PiType::Conn(ts) => PiType::Conn(list(ts)),
        PiType::Variant(bs) => PiType::Variant(bs.map(|b| close_pi(b, bound))),
        PiType::Rec(x, body) => {
            let mut inner = bound.to_vec();
            inner.push(x.clone());
            PiType::Rec(x.clone(), Box::new(close_pi(body, &inner)))
        }
        other => other.clone(),
    }
}

fn pi_type() -> impl Strategy<Value = PiType> {
    raw_pi().prop_map(|t| close_pi(&t, &[])).prop_filter("well formed", |t| t.well_formed())
}

fn name() -> impl Strategy<Value = String> {
    prop::sample::select(&NAMES[..]).prop_map(String::from)
}

fn session_process() -> impl Strategy<Value = SessionProcess> {
    let leaf = Just(SessionProcess::Nil);
    leaf.prop_recursive(4, 20, 2, |inner| {
        let value = prop_oneof![Just(SessionValue::Unit), name().prop_map(SessionValue::Var)];
        prop_oneof![
            (name(), value, inner.clone()).prop_map(|(s, v, k)| SessionProcess::Output { subject: s, payload: v, cont: Box::new(k) }),
            (name(), name(), session_type(), inner.clone()).prop_map(|(s, b, t, k)| SessionProcess::Input {
                subject: s,
                binder: b,
                annot: Type::Session(t),
                cont: Box::new(k)
            }),
            (name(), label(), inner.clone()).prop_map(|(s, l, k)| SessionProcess::Selection { subject: s, label: l, cont: Box::new(k) }),
            (name(), arms(inner.clone())).prop_map(|(s, a)| SessionProcess::Branching { subject: s, arms: a }),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| SessionProcess::par(a, b)),
            (name(), name(), session_type(), inner.clone()).prop_map(|(x, y, t, b)| SessionProcess::SessRes {
                x,
                y,
                annot: t,
                body: Box::new(b)
            }),
            (name(), inner.clone()).prop_map(|(a, b)| SessionProcess::ChanRes {
                name: a,
                annot: Type::Chan(Box::new(Type::Unit)),
                body: Box::new(b)
            }),
            inner.prop_map(|p| SessionProcess::Repl(Box::new(p))),
        ]
    })
}

fn pi_value() -> impl Strategy<Value = PiValue> {
    let leaf = prop_oneof![Just(PiValue::Unit), name().prop_map(PiValue::Var)];
    leaf.prop_recursive(2, 4, 1, |inner| (label(), inner).prop_map(|(l, v)| PiValue::Variant(l, Box::new(v))))
}

fn pi_process() -> impl Strategy<Value = PiProcess> {
    let leaf = Just(PiProcess::Nil);
    leaf.prop_recursive(4, 20, 2, |inner| {
        prop_oneof![
            (name(), prop::collection::vec(pi_value(), 0..3), inner.clone()).prop_map(|(s, vs, k)| PiProcess::Output {
                subject: s,
                payloads: vs,
                cont: Box::new(k)
            }),
            (name(), prop::collection::vec(name(), 0..3), inner.clone()).prop_map(|(s, bs, k)| PiProcess::Input {
                subject: s,
                binders: bs,
                cont: Box::new(k)
            }),
            (pi_value(), arms((name(), inner.clone()))).prop_map(|(v, a)| PiProcess::Case { scrutinee: v, arms: a }),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| PiProcess::par(a, b)),
            (name(), pi_type(), inner.clone()).prop_map(|(n, t, b)| PiProcess::Res { name: n, annot: t, body: Box::new(b) }),
            inner.prop_map(|p| PiProcess::Repl(Box::new(p))),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn session_types(t in session_type()) {
        prop_assert!(t.well_formed(), "{t}");
        let back = parse_session_type(&t.to_string()).unwrap();
        prop_assert!(back.alpha_eq(&t), "{t} ~> {back}");
    }

    #[test]
    fn pi_types(t in pi_type()) {
        let back = parse_pi_type(&t.to_string()).unwrap();
        prop_assert!(back.alpha_eq(&t), "{t} ~> {back}");
    }

    #[test]
    fn session_processes(p in session_process()) {
        let back = parse_session_process(&p.to_string()).unwrap();
        prop_assert!(back.alpha_eq(&p), "{p} ~> {back}");
    }

    #[test]
    fn pi_processes(p in pi_process()) {
        let back = parse_pi_process(&p.to_string()).unwrap();
        prop_assert!(back.alpha_eq(&p), "{p} ~> {back}");
    }
}

#[test]
fn parse_errors_carry_spans() {
    let e = parse_session_type("!unit.?").unwrap_err();
    assert_eq!(e.span.line, 1);
    assert!(e.span.column > 1);
    assert!(parse_session_type("rec X.X").is_err());
    assert!(parse_session_type("rec X.!unit.Y").is_err());
    assert!(parse_session_process("bra x {l: 0, l: 0}").is_err());
}
