//! Abstract syntax for the session π-calculus and the linear π-calculus.
//!
//! Both calculi share the conventions below:
//!
//! * labelled arms (select, branch, variant, case) are kept sorted by label,
//!   so two stored forms compare equal regardless of the order they were
//!   written in;
//! * recursive types use named binders, and a type variable may occur
//!   dualised (`~X`) in session and linear positions;
//! * `alpha_eq` compares terms up to renaming of bound names.

use std::collections::{BTreeSet, HashMap};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label(pub String);

impl Label {
    pub fn new(name: impl Into<String>) -> Self {
        Label(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TypeVar {
    pub name: String,
    pub dualised: bool,
}

impl TypeVar {
    pub fn plain(name: impl Into<String>) -> Self {
        TypeVar { name: name.into(), dualised: false }
    }

    pub fn dual(name: impl Into<String>) -> Self {
        TypeVar { name: name.into(), dualised: true }
    }

    /// `X` becomes `~X` and `~X` becomes `X`.
    pub fn flip(&self) -> Self {
        TypeVar { name: self.name.clone(), dualised: !self.dualised }
    }
}

/// Label-indexed arms, stored label-sorted.
///
/// Duplicates survive construction so that `well_formed` can reject them.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Branches<T>(Vec<(Label, T)>);

impl<T> Branches<T> {
    pub fn new(mut arms: Vec<(Label, T)>) -> Self {
        arms.sort_by(|a, b| a.0.cmp(&b.0));
        Branches(arms)
    }

    pub fn single(label: Label, value: T) -> Self {
        Branches(vec![(label, value)])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Label, &T)> {
        self.0.iter().map(|(l, t)| (l, t))
    }

    pub fn values(&self) -> impl Iterator<Item = &T> {
        self.0.iter().map(|(_, t)| t)
    }

    pub fn labels(&self) -> impl Iterator<Item = &Label> {
        self.0.iter().map(|(l, _)| l)
    }

    pub fn label_set(&self) -> BTreeSet<&Label> {
        self.labels().collect()
    }

    pub fn get(&self, label: &Label) -> Option<&T> {
        self.0.iter().find(|(l, _)| l == label).map(|(_, t)| t)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn has_duplicates(&self) -> bool {
        self.0.windows(2).any(|w| w[0].0 == w[1].0)
    }

    pub fn same_labels<U>(&self, other: &Branches<U>) -> bool {
        self.len() == other.len() && self.labels().zip(other.labels()).all(|(a, b)| a == b)
    }

    pub fn map<U>(&self, mut f: impl FnMut(&T) -> U) -> Branches<U> {
        Branches(self.0.iter().map(|(l, t)| (l.clone(), f(t))).collect())
    }

    pub fn try_map<U, E>(&self, mut f: impl FnMut(&T) -> Result<U, E>) -> Result<Branches<U>, E> {
        let mut out = Vec::with_capacity(self.0.len());
        for (l, t) in &self.0 {
            out.push((l.clone(), f(t)?));
        }
        Ok(Branches(out))
    }

    pub fn into_vec(self) -> Vec<(Label, T)> {
        self.0
    }
}

// ---------------------------------------------------------------------------
// Session calculus
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SessionType {
    End,
    Send(Box<Type>, Box<SessionType>),
    Recv(Box<Type>, Box<SessionType>),
    Select(Branches<SessionType>),
    Branch(Branches<SessionType>),
    Var(TypeVar),
    Rec(String, Box<SessionType>),
}

/// Types of values exchanged by session processes.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Type {
    Session(SessionType),
    Chan(Box<Type>),
    Unit,
    /// Plain type variable. Dualised occurrences only exist inside `Session`.
    Var(String),
    Rec(String, Box<Type>),
}

impl SessionType {
    pub fn send(carried: Type, cont: SessionType) -> Self {
        SessionType::Send(Box::new(carried), Box::new(cont))
    }

    pub fn recv(carried: Type, cont: SessionType) -> Self {
        SessionType::Recv(Box::new(carried), Box::new(cont))
    }

    pub fn var(name: &str) -> Self {
        SessionType::Var(TypeVar::plain(name))
    }

    pub fn dual_var(name: &str) -> Self {
        SessionType::Var(TypeVar::dual(name))
    }

    pub fn rec(name: &str, body: SessionType) -> Self {
        SessionType::Rec(name.to_string(), Box::new(body))
    }

    pub fn select(arms: Vec<(&str, SessionType)>) -> Self {
        SessionType::Select(Branches::new(arms.into_iter().map(|(l, s)| (Label::new(l), s)).collect()))
    }

    pub fn branch(arms: Vec<(&str, SessionType)>) -> Self {
        SessionType::Branch(Branches::new(arms.into_iter().map(|(l, s)| (Label::new(l), s)).collect()))
    }
}

impl Type {
    pub fn chan(t: Type) -> Self {
        Type::Chan(Box::new(t))
    }
}

impl From<SessionType> for Type {
    /// A plain session variable in value position is stored as `Type::Var`,
    /// so that both readings of `X` share one representation.
    fn from(s: SessionType) -> Self {
        match s {
            SessionType::Var(TypeVar { name, dualised: false }) => Type::Var(name),
            s => Type::Session(s),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SessionValue {
    Var(String),
    Unit,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SessionProcess {
    Output { subject: String, payload: SessionValue, cont: Box<SessionProcess> },
    Input { subject: String, binder: String, annot: Type, cont: Box<SessionProcess> },
    Selection { subject: String, label: Label, cont: Box<SessionProcess> },
    Branching { subject: String, arms: Branches<SessionProcess> },
    Par(Box<SessionProcess>, Box<SessionProcess>),
    SessRes { x: String, y: String, annot: SessionType, body: Box<SessionProcess> },
    ChanRes { name: String, annot: Type, body: Box<SessionProcess> },
    Repl(Box<SessionProcess>),
    Nil,
}

impl SessionProcess {
    pub fn par(a: SessionProcess, b: SessionProcess) -> Self {
        SessionProcess::Par(Box::new(a), Box::new(b))
    }

    /// Right-nested parallel composition; `Nil` for an empty list.
    pub fn par_all(mut items: Vec<SessionProcess>) -> Self {
        let Some(mut acc) = items.pop() else {
            return SessionProcess::Nil;
        };
        while let Some(p) = items.pop() {
            acc = SessionProcess::par(p, acc);
        }
        acc
    }

    /// Number of process constructors.
    pub fn size(&self) -> usize {
        use SessionProcess::*;
        1 + match self {
            Output { cont, .. } | Input { cont, .. } | Selection { cont, .. } => cont.size(),
            Branching { arms, .. } => arms.values().map(|p| p.size()).sum(),
            Par(a, b) => a.size() + b.size(),
            SessRes { body, .. } | ChanRes { body, .. } => body.size(),
            Repl(p) => p.size(),
            Nil => 0,
        }
    }

    pub fn free_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        use SessionProcess::*;
        let mut note = |n: &String, bound: &Vec<String>| {
            if !bound.contains(n) {
                out.insert(n.clone());
            }
        };
        match self {
            Output { subject, payload, cont } => {
                note(subject, bound);
                if let SessionValue::Var(v) = payload {
                    note(v, bound);
                }
                cont.collect_free(bound, out);
            }
            Input { subject, binder, cont, .. } => {
                note(subject, bound);
                bound.push(binder.clone());
                cont.collect_free(bound, out);
                bound.pop();
            }
            Selection { subject, cont, .. } => {
                note(subject, bound);
                cont.collect_free(bound, out);
            }
            Branching { subject, arms } => {
                note(subject, bound);
                for p in arms.values() {
                    p.collect_free(bound, out);
                }
            }
            Par(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            SessRes { x, y, body, .. } => {
                bound.push(x.clone());
                bound.push(y.clone());
                body.collect_free(bound, out);
                bound.pop();
                bound.pop();
            }
            ChanRes { name, body, .. } => {
                bound.push(name.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
            Repl(p) => p.collect_free(bound, out),
            Nil => {}
        }
    }

    /// Every name occurring in the process, free or bound.
    pub fn all_names(&self) -> BTreeSet<String> {
        use SessionProcess::*;
        let mut out = BTreeSet::new();
        let mut stack = vec![self];
        while let Some(p) = stack.pop() {
            match p {
                Output { subject, payload, cont } => {
                    out.insert(subject.clone());
                    if let SessionValue::Var(v) = payload {
                        out.insert(v.clone());
                    }
                    stack.push(cont);
                }
                Input { subject, binder, cont, .. } => {
                    out.insert(subject.clone());
                    out.insert(binder.clone());
                    stack.push(cont);
                }
                Selection { subject, cont, .. } => {
                    out.insert(subject.clone());
                    stack.push(cont);
                }
                Branching { subject, arms } => {
                    out.insert(subject.clone());
                    stack.extend(arms.values());
                }
                Par(a, b) => {
                    stack.push(a);
                    stack.push(b);
                }
                SessRes { x, y, body, .. } => {
                    out.insert(x.clone());
                    out.insert(y.clone());
                    stack.push(body);
                }
                ChanRes { name, body, .. } => {
                    out.insert(name.clone());
                    stack.push(body);
                }
                Repl(p) => stack.push(p),
                Nil => {}
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Linear π-calculus
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PiType {
    NoCap,
    Conn(Vec<PiType>),
    LinIn(Vec<PiType>),
    LinOut(Vec<PiType>),
    LinConn(Vec<PiType>),
    Variant(Branches<PiType>),
    Unit,
    Var(TypeVar),
    Rec(String, Box<PiType>),
}

impl PiType {
    pub fn var(name: &str) -> Self {
        PiType::Var(TypeVar::plain(name))
    }

    pub fn dual_var(name: &str) -> Self {
        PiType::Var(TypeVar::dual(name))
    }

    pub fn rec(name: &str, body: PiType) -> Self {
        PiType::Rec(name.to_string(), Box::new(body))
    }

    pub fn variant(arms: Vec<(&str, PiType)>) -> Self {
        PiType::Variant(Branches::new(arms.into_iter().map(|(l, t)| (Label::new(l), t)).collect()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PiValue {
    Var(String),
    Unit,
    Variant(Label, Box<PiValue>),
}

impl PiValue {
    fn names(&self, out: &mut Vec<String>) {
        match self {
            PiValue::Var(v) => out.push(v.clone()),
            PiValue::Unit => {}
            PiValue::Variant(_, v) => v.names(out),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PiProcess {
    Output { subject: String, payloads: Vec<PiValue>, cont: Box<PiProcess> },
    Input { subject: String, binders: Vec<String>, cont: Box<PiProcess> },
    Case { scrutinee: PiValue, arms: Branches<(String, PiProcess)> },
    Par(Box<PiProcess>, Box<PiProcess>),
    Res { name: String, annot: PiType, body: Box<PiProcess> },
    Repl(Box<PiProcess>),
    Nil,
}

impl PiProcess {
    pub fn par(a: PiProcess, b: PiProcess) -> Self {
        PiProcess::Par(Box::new(a), Box::new(b))
    }

    pub fn par_all(mut items: Vec<PiProcess>) -> Self {
        let Some(mut acc) = items.pop() else {
            return PiProcess::Nil;
        };
        while let Some(p) = items.pop() {
            acc = PiProcess::par(p, acc);
        }
        acc
    }

    pub fn size(&self) -> usize {
        use PiProcess::*;
        1 + match self {
            Output { cont, .. } | Input { cont, .. } => cont.size(),
            Case { arms, .. } => arms.values().map(|(_, p)| p.size()).sum(),
            Par(a, b) => a.size() + b.size(),
            Res { body, .. } => body.size(),
            Repl(p) => p.size(),
            Nil => 0,
        }
    }

    pub fn free_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        use PiProcess::*;
        let note = |names: Vec<String>, bound: &Vec<String>, out: &mut BTreeSet<String>| {
            for n in names {
                if !bound.contains(&n) {
                    out.insert(n);
                }
            }
        };
        match self {
            Output { subject, payloads, cont } => {
                let mut names = vec![subject.clone()];
                payloads.iter().for_each(|v| v.names(&mut names));
                note(names, bound, out);
                cont.collect_free(bound, out);
            }
            Input { subject, binders, cont } => {
                note(vec![subject.clone()], bound, out);
                bound.extend(binders.iter().cloned());
                cont.collect_free(bound, out);
                bound.truncate(bound.len() - binders.len());
            }
            Case { scrutinee, arms } => {
                let mut names = Vec::new();
                scrutinee.names(&mut names);
                note(names, bound, out);
                for (binder, p) in arms.values() {
                    bound.push(binder.clone());
                    p.collect_free(bound, out);
                    bound.pop();
                }
            }
            Par(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Res { name, body, .. } => {
                bound.push(name.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
            Repl(p) => p.collect_free(bound, out),
            Nil => {}
        }
    }

    pub fn all_names(&self) -> BTreeSet<String> {
        use PiProcess::*;
        let mut out = BTreeSet::new();
        let mut stack = vec![self];
        while let Some(p) = stack.pop() {
            match p {
                Output { subject, payloads, cont } => {
                    out.insert(subject.clone());
                    let mut names = Vec::new();
                    payloads.iter().for_each(|v| v.names(&mut names));
                    out.extend(names);
                    stack.push(cont);
                }
                Input { subject, binders, cont } => {
                    out.insert(subject.clone());
                    out.extend(binders.iter().cloned());
                    stack.push(cont);
                }
                Case { scrutinee, arms } => {
                    let mut names = Vec::new();
                    scrutinee.names(&mut names);
                    out.extend(names);
                    for (b, p) in arms.values() {
                        out.insert(b.clone());
                        stack.push(p);
                    }
                }
                Par(a, b) => {
                    stack.push(a);
                    stack.push(b);
                }
                Res { name, body, .. } => {
                    out.insert(name.clone());
                    stack.push(body);
                }
                Repl(p) => stack.push(p),
                Nil => {}
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Free type variables, guardedness, well-formedness
// ---------------------------------------------------------------------------

/// Names of type variables not bound by an enclosing `rec`.
pub trait TypeSyntax {
    fn free_type_vars(&self) -> BTreeSet<String>;
    fn is_guarded(&self) -> bool;
    fn well_formed(&self) -> bool;
}

fn fv_session(t: &SessionType, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
    match t {
        SessionType::End => {}
        SessionType::Send(c, k) | SessionType::Recv(c, k) => {
            fv_type(c, bound, out);
            fv_session(k, bound, out);
        }
        SessionType::Select(bs) | SessionType::Branch(bs) => bs.values().for_each(|s| fv_session(s, bound, out)),
        SessionType::Var(v) => {
            if !bound.contains(&v.name) {
                out.insert(v.name.clone());
            }
        }
        SessionType::Rec(x, body) => {
            bound.push(x.clone());
            fv_session(body, bound, out);
            bound.pop();
        }
    }
}

fn fv_type(t: &Type, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
    match t {
        Type::Session(s) => fv_session(s, bound, out),
        Type::Chan(c) => fv_type(c, bound, out),
        Type::Unit => {}
        Type::Var(x) => {
            if !bound.contains(x) {
                out.insert(x.clone());
            }
        }
        Type::Rec(x, body) => {
            bound.push(x.clone());
            fv_type(body, bound, out);
            bound.pop();
        }
    }
}

fn fv_pi(t: &PiType, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
    match t {
        PiType::NoCap | PiType::Unit => {}
        PiType::Conn(ts) | PiType::LinIn(ts) | PiType::LinOut(ts) | PiType::LinConn(ts) => ts.iter().for_each(|t| fv_pi(t, bound, out)),
        PiType::Variant(bs) => bs.values().for_each(|t| fv_pi(t, bound, out)),
        PiType::Var(v) => {
            if !bound.contains(&v.name) {
                out.insert(v.name.clone());
            }
        }
        PiType::Rec(x, body) => {
            bound.push(x.clone());
            fv_pi(body, bound, out);
            bound.pop();
        }
    }
}

// `x` is guarded in `t` iff every free occurrence sits under a non-`rec` constructor.
fn guarded_in_session(t: &SessionType, x: &str) -> bool {
    match t {
        SessionType::Var(v) => v.name != x,
        SessionType::Rec(y, body) => y == x || guarded_in_session(body, x),
        _ => true,
    }
}

fn guarded_in_type(t: &Type, x: &str) -> bool {
    match t {
        Type::Var(v) => v != x,
        Type::Rec(y, body) => y == x || guarded_in_type(body, x),
        Type::Session(s) => guarded_in_session(s, x),
        _ => true,
    }
}

fn guarded_in_pi(t: &PiType, x: &str) -> bool {
    match t {
        PiType::Var(v) => v.name != x,
        PiType::Rec(y, body) => y == x || guarded_in_pi(body, x),
        _ => true,
    }
}

fn all_recs_guarded_session(t: &SessionType) -> bool {
    match t {
        SessionType::End | SessionType::Var(_) => true,
        SessionType::Send(c, k) | SessionType::Recv(c, k) => all_recs_guarded_type(c) && all_recs_guarded_session(k),
        SessionType::Select(bs) | SessionType::Branch(bs) => bs.values().all(all_recs_guarded_session),
        SessionType::Rec(x, body) => guarded_in_session(body, x) && all_recs_guarded_session(body),
    }
}

fn all_recs_guarded_type(t: &Type) -> bool {
    match t {
        Type::Session(s) => all_recs_guarded_session(s),
        Type::Chan(c) => all_recs_guarded_type(c),
        Type::Unit | Type::Var(_) => true,
        Type::Rec(x, body) => guarded_in_type(body, x) && all_recs_guarded_type(body),
    }
}

fn all_recs_guarded_pi(t: &PiType) -> bool {
    match t {
        PiType::NoCap | PiType::Unit | PiType::Var(_) => true,
        PiType::Conn(ts) | PiType::LinIn(ts) | PiType::LinOut(ts) | PiType::LinConn(ts) => ts.iter().all(all_recs_guarded_pi),
        PiType::Variant(bs) => bs.values().all(all_recs_guarded_pi),
        PiType::Rec(x, body) => guarded_in_pi(body, x) && all_recs_guarded_pi(body),
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Kind {
    Session,
    Value,
}

// Labels distinct and non-empty; variables used at a kind their binder provides.
fn shape_ok_session(t: &SessionType, scope: &mut Vec<(String, Kind)>) -> bool {
    match t {
        SessionType::End => true,
        SessionType::Send(c, k) | SessionType::Recv(c, k) => shape_ok_type(c, scope) && shape_ok_session(k, scope),
        SessionType::Select(bs) | SessionType::Branch(bs) => {
            !bs.is_empty() && !bs.has_duplicates() && bs.values().all(|s| shape_ok_session(s, scope))
        }
        SessionType::Var(v) => matches!(lookup_kind(scope, &v.name), Some(Kind::Session)),
        SessionType::Rec(x, body) => {
            scope.push((x.clone(), Kind::Session));
            let ok = shape_ok_session(body, scope);
            scope.pop();
            ok
        }
    }
}

fn shape_ok_type(t: &Type, scope: &mut Vec<(String, Kind)>) -> bool {
    match t {
        Type::Session(s) => shape_ok_session(s, scope),
        Type::Chan(c) => shape_ok_type(c, scope),
        Type::Unit => true,
        Type::Var(x) => lookup_kind(scope, x).is_some(),
        Type::Rec(x, body) => {
            scope.push((x.clone(), Kind::Value));
            let ok = shape_ok_type(body, scope);
            scope.pop();
            ok
        }
    }
}

fn lookup_kind(scope: &[(String, Kind)], x: &str) -> Option<Kind> {
    scope.iter().rev().find(|(n, _)| n == x).map(|(_, k)| *k)
}

fn shape_ok_pi(t: &PiType) -> bool {
    match t {
        PiType::NoCap | PiType::Unit | PiType::Var(_) => true,
        PiType::Conn(ts) | PiType::LinIn(ts) | PiType::LinOut(ts) | PiType::LinConn(ts) => ts.iter().all(shape_ok_pi),
        PiType::Variant(bs) => !bs.is_empty() && !bs.has_duplicates() && bs.values().all(shape_ok_pi),
        PiType::Rec(_, body) => shape_ok_pi(body),
    }
}

impl TypeSyntax for SessionType {
    fn free_type_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        fv_session(self, &mut Vec::new(), &mut out);
        out
    }

    fn is_guarded(&self) -> bool {
        all_recs_guarded_session(self)
    }

    fn well_formed(&self) -> bool {
        self.free_type_vars().is_empty() && self.is_guarded() && shape_ok_session(self, &mut Vec::new())
    }
}

impl TypeSyntax for Type {
    fn free_type_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        fv_type(self, &mut Vec::new(), &mut out);
        out
    }

    fn is_guarded(&self) -> bool {
        all_recs_guarded_type(self)
    }

    fn well_formed(&self) -> bool {
        self.free_type_vars().is_empty() && self.is_guarded() && shape_ok_type(self, &mut Vec::new())
    }
}

impl TypeSyntax for PiType {
    fn free_type_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        fv_pi(self, &mut Vec::new(), &mut out);
        out
    }

    fn is_guarded(&self) -> bool {
        all_recs_guarded_pi(self)
    }

    fn well_formed(&self) -> bool {
        self.free_type_vars().is_empty() && self.is_guarded() && shape_ok_pi(self)
    }
}

// ---------------------------------------------------------------------------
// Alpha equivalence
// ---------------------------------------------------------------------------

/// Renames binders to positional names so that alpha-equivalent terms become equal.
#[derive(Default)]
struct Namer {
    scope: Vec<(String, String)>,
}

impl Namer {
    fn bind(&mut self, name: &str) -> String {
        let fresh = format!("%{}", self.scope.len());
        self.scope.push((name.to_string(), fresh.clone()));
        fresh
    }

    fn unbind(&mut self, n: usize) {
        self.scope.truncate(self.scope.len() - n);
    }

    fn get(&self, name: &str) -> String {
        self.scope.iter().rev().find(|(n, _)| n == name).map(|(_, f)| f.clone()).unwrap_or_else(|| name.to_string())
    }
}

fn norm_session(t: &SessionType, nm: &mut Namer) -> SessionType {
    match t {
        SessionType::End => SessionType::End,
        SessionType::Send(c, k) => SessionType::Send(Box::new(norm_type(c, nm)), Box::new(norm_session(k, nm))),
        SessionType::Recv(c, k) => SessionType::Recv(Box::new(norm_type(c, nm)), Box::new(norm_session(k, nm))),
        SessionType::Select(bs) => SessionType::Select(bs.map(|s| norm_session(s, nm))),
        SessionType::Branch(bs) => SessionType::Branch(bs.map(|s| norm_session(s, nm))),
        SessionType::Var(v) => SessionType::Var(TypeVar { name: nm.get(&v.name), dualised: v.dualised }),
        SessionType::Rec(x, body) => {
            let fresh = nm.bind(x);
            let b = norm_session(body, nm);
            nm.unbind(1);
            SessionType::Rec(fresh, Box::new(b))
        }
    }
}

fn norm_type(t: &Type, nm: &mut Namer) -> Type {
    match t {
        Type::Session(SessionType::Var(v)) if !v.dualised => Type::Var(nm.get(&v.name)),
        Type::Rec(x, body) if matches!(body.as_ref(), Type::Session(_)) => {
            let Type::Session(s) = body.as_ref() else { unreachable!() };
            Type::Session(norm_session(&SessionType::Rec(x.clone(), Box::new(s.clone())), nm))
        }
        Type::Session(s) => Type::Session(norm_session(s, nm)),
        Type::Chan(c) => Type::Chan(Box::new(norm_type(c, nm))),
        Type::Unit => Type::Unit,
        Type::Var(x) => Type::Var(nm.get(x)),
        Type::Rec(x, body) => {
            let fresh = nm.bind(x);
            let b = norm_type(body, nm);
            nm.unbind(1);
            Type::Rec(fresh, Box::new(b))
        }
    }
}

fn norm_pi(t: &PiType, nm: &mut Namer) -> PiType {
    let list = |ts: &Vec<PiType>, nm: &mut Namer| ts.iter().map(|t| norm_pi(t, nm)).collect::<Vec<_>>();
    match t {
        PiType::NoCap => PiType::NoCap,
        PiType::Unit => PiType::Unit,
        PiType::Conn(ts) => PiType::Conn(list(ts, nm)),
        PiType::LinIn(ts) => PiType::LinIn(list(ts, nm)),
        PiType::LinOut(ts) => PiType::LinOut(list(ts, nm)),
        PiType::LinConn(ts) => PiType::LinConn(list(ts, nm)),
        PiType::Variant(bs) => PiType::Variant(bs.map(|t| norm_pi(t, nm))),
        PiType::Var(v) => PiType::Var(TypeVar { name: nm.get(&v.name), dualised: v.dualised }),
        PiType::Rec(x, body) => {
            let fresh = nm.bind(x);
            let b = norm_pi(body, nm);
            nm.unbind(1);
            PiType::Rec(fresh, Box::new(b))
        }
    }
}

fn norm_sproc(p: &SessionProcess, nm: &mut Namer) -> SessionProcess {
    use SessionProcess::*;
    let val = |v: &SessionValue, nm: &Namer| match v {
        SessionValue::Var(x) => SessionValue::Var(nm.get(x)),
        SessionValue::Unit => SessionValue::Unit,
    };
    match p {
        Output { subject, payload, cont } => {
            Output { subject: nm.get(subject), payload: val(payload, nm), cont: Box::new(norm_sproc(cont, nm)) }
        }
        Input { subject, binder, annot, cont } => {
            let subject = nm.get(subject);
            let annot = annot.alpha_normal();
            let binder = nm.bind(binder);
            let cont = Box::new(norm_sproc(cont, nm));
            nm.unbind(1);
            Input { subject, binder, annot, cont }
        }
        Selection { subject, label, cont } => {
            Selection { subject: nm.get(subject), label: label.clone(), cont: Box::new(norm_sproc(cont, nm)) }
        }
        Branching { subject, arms } => Branching { subject: nm.get(subject), arms: arms.map(|p| norm_sproc(p, nm)) },
        Par(a, b) => Par(Box::new(norm_sproc(a, nm)), Box::new(norm_sproc(b, nm))),
        SessRes { x, y, annot, body } => {
            let x = nm.bind(x);
            let y = nm.bind(y);
            let body = Box::new(norm_sproc(body, nm));
            nm.unbind(2);
            SessRes { x, y, annot: annot.alpha_normal(), body }
        }
        ChanRes { name, annot, body } => {
            let name = nm.bind(name);
            let body = Box::new(norm_sproc(body, nm));
            nm.unbind(1);
            ChanRes { name, annot: annot.alpha_normal(), body }
        }
        Repl(p) => Repl(Box::new(norm_sproc(p, nm))),
        Nil => Nil,
    }
}

fn norm_pval(v: &PiValue, nm: &Namer) -> PiValue {
    match v {
        PiValue::Var(x) => PiValue::Var(nm.get(x)),
        PiValue::Unit => PiValue::Unit,
        PiValue::Variant(l, v) => PiValue::Variant(l.clone(), Box::new(norm_pval(v, nm))),
    }
}

fn norm_pproc(p: &PiProcess, nm: &mut Namer) -> PiProcess {
    use PiProcess::*;
    match p {
        Output { subject, payloads, cont } => Output {
            subject: nm.get(subject),
            payloads: payloads.iter().map(|v| norm_pval(v, nm)).collect(),
            cont: Box::new(norm_pproc(cont, nm)),
        },
        Input { subject, binders, cont } => {
            let subject = nm.get(subject);
            let binders: Vec<String> = binders.iter().map(|b| nm.bind(b)).collect();
            let cont = Box::new(norm_pproc(cont, nm));
            nm.unbind(binders.len());
            Input { subject, binders, cont }
        }
        Case { scrutinee, arms } => {
            let scrutinee = norm_pval(scrutinee, nm);
            let arms = arms.map(|(b, p)| {
                let b = nm.bind(b);
                let p = norm_pproc(p, nm);
                nm.unbind(1);
                (b, p)
            });
            Case { scrutinee, arms }
        }
        Par(a, b) => Par(Box::new(norm_pproc(a, nm)), Box::new(norm_pproc(b, nm))),
        Res { name, annot, body } => {
            let name = nm.bind(name);
            let body = Box::new(norm_pproc(body, nm));
            nm.unbind(1);
            Res { name, annot: annot.alpha_normal(), body }
        }
        Repl(p) => Repl(Box::new(norm_pproc(p, nm))),
        Nil => Nil,
    }
}

/// Equality up to consistent renaming of bound names.
pub trait AlphaEq: Sized {
    /// A representative of the alpha class: binders renamed positionally.
    fn alpha_normal(&self) -> Self;

    fn alpha_eq(&self, other: &Self) -> bool
    where
        Self: PartialEq,
    {
        self.alpha_normal() == other.alpha_normal()
    }
}

impl AlphaEq for SessionType {
    fn alpha_normal(&self) -> Self {
        norm_session(self, &mut Namer::default())
    }
}

impl AlphaEq for Type {
    fn alpha_normal(&self) -> Self {
        norm_type(self, &mut Namer::default())
    }
}

impl AlphaEq for PiType {
    fn alpha_normal(&self) -> Self {
        norm_pi(self, &mut Namer::default())
    }
}

impl AlphaEq for SessionProcess {
    fn alpha_normal(&self) -> Self {
        norm_sproc(self, &mut Namer::default())
    }
}

impl AlphaEq for PiProcess {
    fn alpha_normal(&self) -> Self {
        norm_pproc(self, &mut Namer::default())
    }
}

pub fn alpha_eq<T: AlphaEq + PartialEq>(a: &T, b: &T) -> bool {
    a.alpha_eq(b)
}

// ---------------------------------------------------------------------------
// Name substitution on processes
// ---------------------------------------------------------------------------

/// Produces names that are not in `avoid`, derived from a base name.
pub fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    let stem = base.trim_end_matches(|c: char| c.is_ascii_digit() || c == '_');
    let stem = if stem.is_empty() { "n" } else { stem };
    (0..).map(|i| format!("{stem}_{i}")).find(|n| !avoid.contains(n)).expect("unbounded supply")
}

impl SessionProcess {
    /// Capture-avoiding substitution of names: every free `from` becomes `to`.
    pub fn rename(&self, map: &HashMap<String, String>) -> SessionProcess {
        if map.is_empty() {
            return self.clone();
        }
        let mut avoid: BTreeSet<String> = map.values().cloned().collect();
        avoid.extend(self.all_names());
        rename_sproc(self, map, &avoid)
    }

    /// Substitutes a value for a free name. Units may only land in payload positions;
    /// a unit reaching a subject position leaves the subject untouched.
    pub fn subst_value(&self, from: &str, to: &SessionValue) -> SessionProcess {
        match to {
            SessionValue::Var(v) => self.rename(&HashMap::from([(from.to_string(), v.clone())])),
            SessionValue::Unit => subst_unit_sproc(self, from),
        }
    }
}

fn rename_sproc(p: &SessionProcess, map: &HashMap<String, String>, avoid: &BTreeSet<String>) -> SessionProcess {
    use SessionProcess::*;
    let get = |n: &String| map.get(n).cloned().unwrap_or_else(|| n.clone());
    let targets: BTreeSet<&String> = map.values().collect();
    // Enters a binder: drop it from the map, and rename it if it would capture a target.
    let enter = |binder: &String, map: &HashMap<String, String>, avoid: &BTreeSet<String>| {
        let mut inner = map.clone();
        inner.remove(binder);
        if targets.contains(binder) {
            let fresh = fresh_name(binder, avoid);
            inner.insert(binder.clone(), fresh.clone());
            (fresh, inner)
        } else {
            (binder.clone(), inner)
        }
    };
    match p {
        Output { subject, payload, cont } => Output {
            subject: get(subject),
            payload: match payload {
                SessionValue::Var(v) => SessionValue::Var(get(v)),
                SessionValue::Unit => SessionValue::Unit,
            },
            cont: Box::new(rename_sproc(cont, map, avoid)),
        },
        Input { subject, binder, annot, cont } => {
            let (b, inner) = enter(binder, map, avoid);
            Input { subject: get(subject), binder: b, annot: annot.clone(), cont: Box::new(rename_sproc(cont, &inner, avoid)) }
        }
        Selection { subject, label, cont } => {
            Selection { subject: get(subject), label: label.clone(), cont: Box::new(rename_sproc(cont, map, avoid)) }
        }
        Branching { subject, arms } => Branching { subject: get(subject), arms: arms.map(|q| rename_sproc(q, map, avoid)) },
        Par(a, b) => Par(Box::new(rename_sproc(a, map, avoid)), Box::new(rename_sproc(b, map, avoid))),
        SessRes { x, y, annot, body } => {
            let (x2, m1) = enter(x, map, avoid);
            let (y2, m2) = enter(y, &m1, avoid);
            SessRes { x: x2, y: y2, annot: annot.clone(), body: Box::new(rename_sproc(body, &m2, avoid)) }
        }
        ChanRes { name, annot, body } => {
            let (n2, inner) = enter(name, map, avoid);
            ChanRes { name: n2, annot: annot.clone(), body: Box::new(rename_sproc(body, &inner, avoid)) }
        }
        Repl(q) => Repl(Box::new(rename_sproc(q, map, avoid))),
        Nil => Nil,
    }
}

fn subst_unit_sproc(p: &SessionProcess, from: &str) -> SessionProcess {
    use SessionProcess::*;
    match p {
        Output { subject, payload, cont } => Output {
            subject: subject.clone(),
            payload: match payload {
                SessionValue::Var(v) if v == from => SessionValue::Unit,
                other => other.clone(),
            },
            cont: Box::new(subst_unit_sproc(cont, from)),
        },
        Input { binder, .. } if binder == from => p.clone(),
        Input { subject, binder, annot, cont } => {
            Input { subject: subject.clone(), binder: binder.clone(), annot: annot.clone(), cont: Box::new(subst_unit_sproc(cont, from)) }
        }
        Selection { subject, label, cont } => {
            Selection { subject: subject.clone(), label: label.clone(), cont: Box::new(subst_unit_sproc(cont, from)) }
        }
        Branching { subject, arms } => Branching { subject: subject.clone(), arms: arms.map(|q| subst_unit_sproc(q, from)) },
        Par(a, b) => Par(Box::new(subst_unit_sproc(a, from)), Box::new(subst_unit_sproc(b, from))),
        SessRes { x, y, .. } if x == from || y == from => p.clone(),
        SessRes { x, y, annot, body } => {
            SessRes { x: x.clone(), y: y.clone(), annot: annot.clone(), body: Box::new(subst_unit_sproc(body, from)) }
        }
        ChanRes { name, .. } if name == from => p.clone(),
        ChanRes { name, annot, body } => ChanRes { name: name.clone(), annot: annot.clone(), body: Box::new(subst_unit_sproc(body, from)) },
        Repl(q) => Repl(Box::new(subst_unit_sproc(q, from))),
        Nil => Nil,
    }
}

impl PiProcess {
    pub fn rename(&self, map: &HashMap<String, String>) -> PiProcess {
        let values: HashMap<String, PiValue> = map.iter().map(|(k, v)| (k.clone(), PiValue::Var(v.clone()))).collect();
        self.subst_values(&values).expect("name-for-name substitution cannot misplace a value")
    }

    /// Simultaneous capture-avoiding substitution of values for free names.
    ///
    /// Fails when a non-name value would land in a subject position.
    pub fn subst_values(&self, map: &HashMap<String, PiValue>) -> Result<PiProcess, String> {
        if map.is_empty() {
            return Ok(self.clone());
        }
        let mut avoid = self.all_names();
        for v in map.values() {
            let mut names = Vec::new();
            v.names(&mut names);
            avoid.extend(names);
        }
        subst_pproc(self, map, &avoid)
    }
}

fn subst_pval(v: &PiValue, map: &HashMap<String, PiValue>) -> PiValue {
    match v {
        PiValue::Var(x) => map.get(x).cloned().unwrap_or_else(|| v.clone()),
        PiValue::Unit => PiValue::Unit,
        PiValue::Variant(l, inner) => PiValue::Variant(l.clone(), Box::new(subst_pval(inner, map))),
    }
}

fn subst_pproc(p: &PiProcess, map: &HashMap<String, PiValue>, avoid: &BTreeSet<String>) -> Result<PiProcess, String> {
    use PiProcess::*;
    let subject = |s: &String| -> Result<String, String> {
        match map.get(s) {
            None => Ok(s.clone()),
            Some(PiValue::Var(v)) => Ok(v.clone()),
            Some(other) => Err(format!("value {other:?} substituted into subject position {s}")),
        }
    };
    let mut targets = Vec::new();
    map.values().for_each(|v| v.names(&mut targets));
    let enter = |binder: &String, map: &HashMap<String, PiValue>| {
        let mut inner = map.clone();
        inner.remove(binder);
        if targets.contains(binder) {
            let fresh = fresh_name(binder, avoid);
            inner.insert(binder.clone(), PiValue::Var(fresh.clone()));
            (fresh, inner)
        } else {
            (binder.clone(), inner)
        }
    };
    Ok(match p {
        Output { subject: s, payloads, cont } => Output {
            subject: subject(s)?,
            payloads: payloads.iter().map(|v| subst_pval(v, map)).collect(),
            cont: Box::new(subst_pproc(cont, map, avoid)?),
        },
        Input { subject: s, binders, cont } => {
            let mut inner = map.clone();
            let mut bs = Vec::new();
            for b in binders {
                let (b2, m2) = enter(b, &inner);
                inner = m2;
                bs.push(b2);
            }
            Input { subject: subject(s)?, binders: bs, cont: Box::new(subst_pproc(cont, &inner, avoid)?) }
        }
        Case { scrutinee, arms } => Case {
            scrutinee: subst_pval(scrutinee, map),
            arms: arms.try_map(|(b, q)| {
                let (b2, inner) = enter(b, map);
                Ok::<_, String>((b2, subst_pproc(q, &inner, avoid)?))
            })?,
        },
        Par(a, b) => Par(Box::new(subst_pproc(a, map, avoid)?), Box::new(subst_pproc(b, map, avoid)?)),
        Res { name, annot, body } => {
            let (n2, inner) = enter(name, map);
            Res { name: n2, annot: annot.clone(), body: Box::new(subst_pproc(body, &inner, avoid)?) }
        }
        Repl(q) => Repl(Box::new(subst_pproc(q, map, avoid)?)),
        Nil => Nil,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t_select() -> SessionType {
        SessionType::rec("X", SessionType::select(vec![("l", SessionType::var("X"))]))
    }

    #[test]
    fn free_type_vars_examples() {
        assert!(SessionType::End.free_type_vars().is_empty());
        assert!(t_select().free_type_vars().is_empty());
        let open = SessionType::send(Type::Unit, SessionType::var("X"));
        assert_eq!(open.free_type_vars(), BTreeSet::from(["X".to_string()]));
        let dual = SessionType::dual_var("Y");
        assert_eq!(dual.free_type_vars(), BTreeSet::from(["Y".to_string()]));
    }

    #[test]
    fn guardedness_examples() {
        assert!(!SessionType::rec("X", SessionType::var("X")).is_guarded());
        assert!(SessionType::rec("X", SessionType::send(Type::Unit, SessionType::var("X"))).is_guarded());
        let nested = SessionType::rec("X", SessionType::rec("Y", SessionType::var("X")));
        assert!(!nested.is_guarded());
        // the inner binder guards nothing for the outer one, but shadowing does
        let shadow = SessionType::rec("X", SessionType::rec("X", SessionType::send(Type::Unit, SessionType::var("X"))));
        assert!(shadow.is_guarded());
    }

    #[test]
    fn well_formed_examples() {
        assert!(t_select().well_formed());
        assert!(!SessionType::select(vec![("l", SessionType::var("X"))]).well_formed());
        let dup = SessionType::branch(vec![("l", SessionType::End), ("l", SessionType::End)]);
        assert!(!dup.well_formed());
        assert!(!SessionType::Branch(Branches::new(vec![])).well_formed());
    }

    #[test]
    fn session_var_must_name_a_session_binder() {
        // rec X.#(!unit.X) uses a value-kind binder in continuation position
        let t = Type::Rec("X".into(), Box::new(Type::chan(SessionType::send(Type::Unit, SessionType::var("X")).into())));
        assert!(!t.well_formed());
        let ok = Type::Rec("X".into(), Box::new(Type::chan(Type::Var("X".into()))));
        assert!(ok.well_formed());
    }

    #[test]
    fn alpha_eq_examples() {
        let a = SessionType::rec("X", SessionType::branch(vec![("l", SessionType::var("X"))]));
        let b = SessionType::rec("Y", SessionType::branch(vec![("l", SessionType::var("Y"))]));
        assert!(a.alpha_eq(&b));
        assert!(!a.alpha_eq(&t_select()));
        let p = SessionProcess::SessRes { x: "x".into(), y: "y".into(), annot: SessionType::End, body: Box::new(SessionProcess::Nil) };
        let q = SessionProcess::SessRes { x: "u".into(), y: "w".into(), annot: SessionType::End, body: Box::new(SessionProcess::Nil) };
        assert!(p.alpha_eq(&q));
    }

    #[test]
    fn branches_are_label_sorted() {
        let a = SessionType::select(vec![("m", SessionType::End), ("l", SessionType::End)]);
        let b = SessionType::select(vec![("l", SessionType::End), ("m", SessionType::End)]);
        assert_eq!(a, b);
    }

    #[test]
    fn dualising_twice_is_identity() {
        let v = TypeVar::plain("X");
        assert_eq!(v.flip().flip(), v);
    }

    #[test]
    fn rename_avoids_capture() {
        // (a?(b:unit). c!b.0){b/c}: the binder must move out of the way
        let p = SessionProcess::Input {
            subject: "a".into(),
            binder: "b".into(),
            annot: Type::Unit,
            cont: Box::new(SessionProcess::Output {
                subject: "c".into(),
                payload: SessionValue::Var("b".into()),
                cont: Box::new(SessionProcess::Nil),
            }),
        };
        let q = p.rename(&HashMap::from([("c".to_string(), "b".to_string())]));
        let SessionProcess::Input { binder, cont, .. } = &q else { panic!() };
        assert_ne!(binder, "b");
        let SessionProcess::Output { subject, payload, .. } = cont.as_ref() else { panic!() };
        assert_eq!(subject, "b");
        assert_eq!(payload, &SessionValue::Var(binder.clone()));
    }

    #[test]
    fn pi_subst_rejects_value_in_subject() {
        let p = PiProcess::Output { subject: "x".into(), payloads: vec![], cont: Box::new(PiProcess::Nil) };
        let map = HashMap::from([("x".to_string(), PiValue::Unit)]);
        assert!(p.subst_values(&map).is_err());
    }
}
