//! Printing in the concrete syntax accepted by `parse`.

use std::fmt::{self, Display, Formatter, Write};

use crate::syntax::*;

fn list<T: Display>(f: &mut Formatter<'_>, items: &[T]) -> fmt::Result {
    for (i, t) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{t}")?;
    }
    Ok(())
}

fn arms<T>(f: &mut Formatter<'_>, bs: &Branches<T>, mut arm: impl FnMut(&mut Formatter<'_>, &Label, &T) -> fmt::Result) -> fmt::Result {
    for (i, (l, t)) in bs.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        arm(f, l, t)?;
    }
    Ok(())
}

impl Display for Label {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Display for TypeVar {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        if self.dualised {
            f.write_char('~')?;
        }
        f.write_str(&self.name)
    }
}

/// Carried types print bare only when they are a single token.
struct Carried<'a>(&'a Type);

impl Display for Carried<'_> {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self.0 {
            Type::Unit | Type::Var(_) | Type::Session(SessionType::End) | Type::Session(SessionType::Var(_)) => {
                write!(f, "{}", self.0)
            }
            Type::Chan(_) => write!(f, "{}", self.0),
            other => write!(f, "({other})"),
        }
    }
}

impl Display for SessionType {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            SessionType::End => f.write_str("end"),
            SessionType::Send(t, s) => write!(f, "!{}.{s}", Carried(t)),
            SessionType::Recv(t, s) => write!(f, "?{}.{s}", Carried(t)),
            SessionType::Select(bs) => {
                f.write_str("+{")?;
                arms(f, bs, |f, l, s| write!(f, "{l}:{s}"))?;
                f.write_char('}')
            }
            SessionType::Branch(bs) => {
                f.write_str("&{")?;
                arms(f, bs, |f, l, s| write!(f, "{l}:{s}"))?;
                f.write_char('}')
            }
            SessionType::Var(v) => write!(f, "{v}"),
            SessionType::Rec(x, body) => write!(f, "rec {x}.{body}"),
        }
    }
}

impl Display for Type {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Type::Session(s) => write!(f, "{s}"),
            Type::Chan(t) => write!(f, "#{}", Carried(t)),
            Type::Unit => f.write_str("unit"),
            Type::Var(x) => f.write_str(x),
            Type::Rec(x, body) => write!(f, "rec {x}.{body}"),
        }
    }
}

impl Display for PiType {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            PiType::NoCap => f.write_str("empty[]"),
            PiType::Conn(ts) => {
                f.write_str("#[")?;
                list(f, ts)?;
                f.write_char(']')
            }
            PiType::LinIn(ts) => {
                f.write_str("li[")?;
                list(f, ts)?;
                f.write_char(']')
            }
            PiType::LinOut(ts) => {
                f.write_str("lo[")?;
                list(f, ts)?;
                f.write_char(']')
            }
            PiType::LinConn(ts) => {
                f.write_str("l#[")?;
                list(f, ts)?;
                f.write_char(']')
            }
            PiType::Variant(bs) => {
                f.write_char('<')?;
                arms(f, bs, |f, l, t| write!(f, "{l}:{t}"))?;
                f.write_char('>')
            }
            PiType::Unit => f.write_str("unit"),
            PiType::Var(v) => write!(f, "{v}"),
            PiType::Rec(x, body) => write!(f, "rec {x}.{body}"),
        }
    }
}

impl Display for SessionValue {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            SessionValue::Var(x) => f.write_str(x),
            SessionValue::Unit => f.write_str("()"),
        }
    }
}

impl Display for PiValue {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            PiValue::Var(x) => f.write_str(x),
            PiValue::Unit => f.write_str("()"),
            PiValue::Variant(l, v) => write!(f, "{l}({v})"),
        }
    }
}

// A process "ends open" when its rightmost part is a restriction whose scope
// would swallow a following `| Q`.
fn s_ends_open(p: &SessionProcess) -> bool {
    use SessionProcess::*;
    match p {
        SessRes { .. } | ChanRes { .. } => true,
        Output { cont, .. } | Input { cont, .. } | Selection { cont, .. } => s_ends_open(cont),
        _ => false,
    }
}

fn p_ends_open(p: &PiProcess) -> bool {
    use PiProcess::*;
    match p {
        Res { .. } => true,
        Output { cont, .. } | Input { cont, .. } => p_ends_open(cont),
        _ => false,
    }
}

/// A session process in prefix position: parallel compositions are parenthesised.
struct SPrefix<'a>(&'a SessionProcess);

impl Display for SPrefix<'_> {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self.0 {
            SessionProcess::Par(..) => write!(f, "({})", self.0),
            p => write!(f, "{p}"),
        }
    }
}

struct PPrefix<'a>(&'a PiProcess);

impl Display for PPrefix<'_> {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self.0 {
            PiProcess::Par(..) => write!(f, "({})", self.0),
            p => write!(f, "{p}"),
        }
    }
}

impl Display for SessionProcess {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        use SessionProcess::*;
        match self {
            Output { subject, payload, cont } => write!(f, "{subject}!{payload}.{}", SPrefix(cont)),
            Input { subject, binder, annot, cont } => write!(f, "{subject}?({binder}:{annot}).{}", SPrefix(cont)),
            Selection { subject, label, cont } => write!(f, "sel {subject} {label}.{}", SPrefix(cont)),
            Branching { subject, arms: bs } => {
                write!(f, "bra {subject} {{")?;
                arms(f, bs, |f, l, p| write!(f, "{l}: {p}"))?;
                f.write_char('}')
            }
            Par(a, b) => {
                if matches!(a.as_ref(), Par(..)) || s_ends_open(a) {
                    write!(f, "({a}) | {b}")
                } else {
                    write!(f, "{a} | {b}")
                }
            }
            SessRes { x, y, annot, body } => write!(f, "(new {x} {y}:{annot}) {body}"),
            ChanRes { name, annot, body } => write!(f, "(newc {name}:{annot}) {body}"),
            Repl(p) => write!(f, "*({p})"),
            Nil => f.write_char('0'),
        }
    }
}

impl Display for PiProcess {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        use PiProcess::*;
        match self {
            Output { subject, payloads, cont } => {
                write!(f, "{subject}!(")?;
                list(f, payloads)?;
                write!(f, ").{}", PPrefix(cont))
            }
            Input { subject, binders, cont } => {
                write!(f, "{subject}?(")?;
                list(f, binders)?;
                write!(f, ").{}", PPrefix(cont))
            }
            Case { scrutinee, arms: bs } => {
                write!(f, "case {scrutinee} of {{")?;
                arms(f, bs, |f, l, (x, p)| write!(f, "{l}({x}) => {p}"))?;
                f.write_char('}')
            }
            Par(a, b) => {
                if matches!(a.as_ref(), Par(..)) || p_ends_open(a) {
                    write!(f, "({a}) | {b}")
                } else {
                    write!(f, "{a} | {b}")
                }
            }
            Res { name, annot, body } => write!(f, "(new {name}:{annot}) {body}"),
            Repl(p) => write!(f, "*({p})"),
            Nil => f.write_char('0'),
        }
    }
}

/// Concrete syntax of any AST node.
pub fn pretty<T: Display>(node: &T) -> String {
    node.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::*;

    #[test]
    fn printer_examples() {
        let t = SessionType::rec("X", SessionType::select(vec![("l", SessionType::var("X"))]));
        assert_eq!(pretty(&t), "rec X.+{l:X}");
        assert_eq!(pretty(&SessionProcess::Nil), "0");
        assert_eq!(pretty(&SessionType::End), "end");
        let tau = PiType::rec("X", PiType::LinOut(vec![PiType::variant(vec![("l", PiType::dual_var("X"))])]));
        assert_eq!(pretty(&tau), "rec X.lo[<l:~X>]");
    }

    #[test]
    fn compound_carried_types_are_parenthesised() {
        let inner = SessionType::rec("X", SessionType::send(Type::Unit, SessionType::var("X")));
        let t = SessionType::send(Type::Session(inner.clone()), SessionType::End);
        assert_eq!(pretty(&t), "!(rec X.!unit.X).end");
        assert_eq!(parse_session_type(&pretty(&t)).unwrap(), t);
        let c = Type::chan(Type::Session(inner));
        assert_eq!(pretty(&c), "#(rec X.!unit.X)");
    }

    #[test]
    fn open_restrictions_are_parenthesised_on_the_left() {
        let p = SessionProcess::par(
            SessionProcess::Output {
                subject: "a".into(),
                payload: SessionValue::Unit,
                cont: Box::new(SessionProcess::ChanRes { name: "b".into(), annot: Type::Unit, body: Box::new(SessionProcess::Nil) }),
            },
            SessionProcess::Nil,
        );
        let text = pretty(&p);
        assert_eq!(parse_session_process(&text).unwrap(), p, "{text}");
    }

    #[test]
    fn pi_round_trip_example() {
        let src = "(new c:l#[unit]) c!(()).0 | c?(z).case l(z) of {l(w) => 0}";
        let p = parse_pi_process(src).unwrap();
        assert_eq!(parse_pi_process(&pretty(&p)).unwrap(), p);
    }
}
