//! Unfolding, substitution, complement, and the coinductive relations
//! (subtyping, equivalence, duality) for session types and linear π types.

use std::collections::{BTreeSet, HashSet};

use crate::syntax::*;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("type is not closed and guarded: {0}")]
    IllFormed(String),
    #[error("complement is undefined for {0}")]
    NoComplement(String),
}

// ---------------------------------------------------------------------------
// Standard substitution. The replacement is assumed closed, so no capture.
// ---------------------------------------------------------------------------

/// `t{s/X}`: plain `X` becomes `s`, `~X` becomes the complement of `s`.
pub fn subst_session(t: &SessionType, x: &str, s: &SessionType) -> SessionType {
    let mut comp = None;
    subst_s(t, x, s, &mut comp)
}

fn subst_s(t: &SessionType, x: &str, s: &SessionType, comp: &mut Option<SessionType>) -> SessionType {
    match t {
        SessionType::End => SessionType::End,
        SessionType::Send(c, k) => SessionType::Send(Box::new(subst_t(c, x, s, comp)), Box::new(subst_s(k, x, s, comp))),
        SessionType::Recv(c, k) => SessionType::Recv(Box::new(subst_t(c, x, s, comp)), Box::new(subst_s(k, x, s, comp))),
        SessionType::Select(bs) => SessionType::Select(bs.map(|b| subst_s(b, x, s, comp))),
        SessionType::Branch(bs) => SessionType::Branch(bs.map(|b| subst_s(b, x, s, comp))),
        SessionType::Var(v) if v.name == x => {
            if v.dualised {
                comp.get_or_insert_with(|| complement_session(s)).clone()
            } else {
                s.clone()
            }
        }
        SessionType::Var(_) => t.clone(),
        SessionType::Rec(y, _) if y == x => t.clone(),
        SessionType::Rec(y, body) => SessionType::Rec(y.clone(), Box::new(subst_s(body, x, s, comp))),
    }
}

fn subst_t(t: &Type, x: &str, s: &SessionType, comp: &mut Option<SessionType>) -> Type {
    match t {
        Type::Session(st) => Type::from(subst_s(st, x, s, comp)),
        Type::Chan(c) => Type::Chan(Box::new(subst_t(c, x, s, comp))),
        Type::Unit => Type::Unit,
        Type::Var(v) if v == x => Type::from(s.clone()),
        Type::Var(_) => t.clone(),
        Type::Rec(y, _) if y == x => t.clone(),
        Type::Rec(y, body) => Type::Rec(y.clone(), Box::new(subst_t(body, x, s, comp))),
    }
}

/// Substitution of a value type for a value-kind binder.
pub fn subst_type(t: &Type, x: &str, r: &Type) -> Type {
    match t {
        Type::Session(st) => Type::from(subst_type_in_session(st, x, r)),
        Type::Chan(c) => Type::Chan(Box::new(subst_type(c, x, r))),
        Type::Unit => Type::Unit,
        Type::Var(v) if v == x => r.clone(),
        Type::Var(_) => t.clone(),
        Type::Rec(y, _) if y == x => t.clone(),
        Type::Rec(y, body) => Type::Rec(y.clone(), Box::new(subst_type(body, x, r))),
    }
}

fn subst_type_in_session(t: &SessionType, x: &str, r: &Type) -> SessionType {
    match t {
        SessionType::Send(c, k) => SessionType::Send(Box::new(subst_type(c, x, r)), Box::new(subst_type_in_session(k, x, r))),
        SessionType::Recv(c, k) => SessionType::Recv(Box::new(subst_type(c, x, r)), Box::new(subst_type_in_session(k, x, r))),
        SessionType::Select(bs) => SessionType::Select(bs.map(|b| subst_type_in_session(b, x, r))),
        SessionType::Branch(bs) => SessionType::Branch(bs.map(|b| subst_type_in_session(b, x, r))),
        SessionType::Rec(y, _) if y == x => t.clone(),
        SessionType::Rec(y, body) => SessionType::Rec(y.clone(), Box::new(subst_type_in_session(body, x, r))),
        SessionType::End | SessionType::Var(_) => t.clone(),
    }
}

/// `t{s/X}` on linear types; `~X` becomes the complement of `s`, which may be undefined.
pub fn subst_pi(t: &PiType, x: &str, s: &PiType) -> Result<PiType, AlgebraError> {
    let mut comp = None;
    subst_p(t, x, s, &mut comp)
}

fn subst_p(t: &PiType, x: &str, s: &PiType, comp: &mut Option<PiType>) -> Result<PiType, AlgebraError> {
    let list = |ts: &Vec<PiType>, comp: &mut Option<PiType>| ts.iter().map(|t| subst_p(t, x, s, comp)).collect::<Result<Vec<_>, _>>();
    Ok(match t {
        PiType::NoCap | PiType::Unit => t.clone(),
        PiType::Conn(ts) => PiType::Conn(list(ts, comp)?),
        PiType::LinIn(ts) => PiType::LinIn(list(ts, comp)?),
        PiType::LinOut(ts) => PiType::LinOut(list(ts, comp)?),
        PiType::LinConn(ts) => PiType::LinConn(list(ts, comp)?),
        PiType::Variant(bs) => PiType::Variant(bs.try_map(|b| subst_p(b, x, s, comp))?),
        PiType::Var(v) if v.name == x => {
            if v.dualised {
                if comp.is_none() {
                    *comp = Some(complement_pi(s)?);
                }
                comp.clone().expect("just set")
            } else {
                s.clone()
            }
        }
        PiType::Var(_) => t.clone(),
        PiType::Rec(y, _) if y == x => t.clone(),
        PiType::Rec(y, body) => PiType::Rec(y.clone(), Box::new(subst_p(body, x, s, comp)?)),
    })
}

// ---------------------------------------------------------------------------
// Carried substitution: only inside carried positions.
// ---------------------------------------------------------------------------

pub fn carried_subst_session(t: &SessionType, x: &str, s: &SessionType) -> SessionType {
    match t {
        SessionType::Send(c, k) => SessionType::Send(Box::new(subst_t(c, x, s, &mut None)), Box::new(carried_subst_session(k, x, s))),
        SessionType::Recv(c, k) => SessionType::Recv(Box::new(subst_t(c, x, s, &mut None)), Box::new(carried_subst_session(k, x, s))),
        SessionType::Select(bs) => SessionType::Select(bs.map(|b| carried_subst_session(b, x, s))),
        SessionType::Branch(bs) => SessionType::Branch(bs.map(|b| carried_subst_session(b, x, s))),
        SessionType::Rec(y, _) if y == x => t.clone(),
        SessionType::Rec(y, body) => SessionType::Rec(y.clone(), Box::new(carried_subst_session(body, x, s))),
        SessionType::End | SessionType::Var(_) => t.clone(),
    }
}

pub fn carried_subst_pi(t: &PiType, x: &str, s: &PiType) -> Result<PiType, AlgebraError> {
    let payload = |ts: &Vec<PiType>| ts.iter().map(|t| subst_pi(t, x, s)).collect::<Result<Vec<_>, _>>();
    Ok(match t {
        PiType::Conn(ts) => PiType::Conn(payload(ts)?),
        PiType::LinIn(ts) => PiType::LinIn(payload(ts)?),
        PiType::LinOut(ts) => PiType::LinOut(payload(ts)?),
        PiType::LinConn(ts) => PiType::LinConn(payload(ts)?),
        PiType::Variant(bs) => PiType::Variant(bs.try_map(|b| carried_subst_pi(b, x, s))?),
        PiType::Rec(y, _) if y == x => t.clone(),
        PiType::Rec(y, body) => PiType::Rec(y.clone(), Box::new(carried_subst_pi(body, x, s)?)),
        PiType::NoCap | PiType::Unit | PiType::Var(_) => t.clone(),
    })
}

// ---------------------------------------------------------------------------
// Unfolding
// ---------------------------------------------------------------------------

fn leading_recs_s(t: &SessionType) -> usize {
    match t {
        SessionType::Rec(_, b) => 1 + leading_recs_s(b),
        _ => 0,
    }
}

/// Unfolds without checking well-formedness. An unguarded type is returned with
/// `Rec` still on top once the guardedness bound is exhausted.
pub(crate) fn unf_s(t: &SessionType) -> SessionType {
    let mut cur = t.clone();
    for _ in 0..=leading_recs_s(t) {
        match &cur {
            SessionType::Rec(x, body) => cur = subst_session(body, x, &cur),
            _ => return cur,
        }
    }
    cur
}

pub(crate) fn unf_t(t: &Type) -> Type {
    let mut cur = t.clone();
    for _ in 0..64 {
        match &cur {
            Type::Rec(x, body) => cur = subst_type(body, x, &cur),
            Type::Session(s @ SessionType::Rec(..)) => return Type::from(unf_s(s)),
            _ => return cur,
        }
    }
    cur
}

fn leading_recs_p(t: &PiType) -> usize {
    match t {
        PiType::Rec(_, b) => 1 + leading_recs_p(b),
        _ => 0,
    }
}

pub(crate) fn unf_p(t: &PiType) -> Result<PiType, AlgebraError> {
    let mut cur = t.clone();
    for _ in 0..=leading_recs_p(t) {
        match &cur {
            PiType::Rec(x, body) => cur = subst_pi(body, x, &cur)?,
            _ => return Ok(cur),
        }
    }
    Ok(cur)
}

pub fn unfold_session(t: &SessionType) -> Result<SessionType, AlgebraError> {
    if !t.well_formed() {
        return Err(AlgebraError::IllFormed(t.to_string()));
    }
    Ok(unf_s(t))
}

pub fn unfold_pi(t: &PiType) -> Result<PiType, AlgebraError> {
    if !t.well_formed() {
        return Err(AlgebraError::IllFormed(t.to_string()));
    }
    unf_p(t)
}

// ---------------------------------------------------------------------------
// Binder uniquification
// ---------------------------------------------------------------------------

// Renames binders so that no two binders share a name and no binder shadows a free
// variable. Binders already unique keep their names.
struct Uniq {
    used: BTreeSet<String>,
    scope: Vec<(String, String)>,
}

impl Uniq {
    fn new(free: BTreeSet<String>) -> Self {
        Uniq { used: free, scope: Vec::new() }
    }

    fn bind(&mut self, x: &str) -> String {
        let name = if self.used.contains(x) { fresh_name(x, &self.used) } else { x.to_string() };
        self.used.insert(name.clone());
        self.scope.push((x.to_string(), name.clone()));
        name
    }

    fn unbind(&mut self) {
        self.scope.pop();
    }

    fn get(&self, x: &str) -> String {
        self.scope.iter().rev().find(|(n, _)| n == x).map(|(_, m)| m.clone()).unwrap_or_else(|| x.to_string())
    }

    fn session(&mut self, t: &SessionType) -> SessionType {
        match t {
            SessionType::End => SessionType::End,
            SessionType::Send(c, k) => SessionType::Send(Box::new(self.ty(c)), Box::new(self.session(k))),
            SessionType::Recv(c, k) => SessionType::Recv(Box::new(self.ty(c)), Box::new(self.session(k))),
            SessionType::Select(bs) => SessionType::Select(bs.map(|b| self.session(b))),
            SessionType::Branch(bs) => SessionType::Branch(bs.map(|b| self.session(b))),
            SessionType::Var(v) => SessionType::Var(TypeVar { name: self.get(&v.name), dualised: v.dualised }),
            SessionType::Rec(x, body) => {
                let y = self.bind(x);
                let b = self.session(body);
                self.unbind();
                SessionType::Rec(y, Box::new(b))
            }
        }
    }

    fn ty(&mut self, t: &Type) -> Type {
        match t {
            Type::Session(s) => Type::Session(self.session(s)),
            Type::Chan(c) => Type::Chan(Box::new(self.ty(c))),
            Type::Unit => Type::Unit,
            Type::Var(v) => Type::Var(self.get(v)),
            Type::Rec(x, body) => {
                let y = self.bind(x);
                let b = self.ty(body);
                self.unbind();
                Type::Rec(y, Box::new(b))
            }
        }
    }

    fn pi(&mut self, t: &PiType) -> PiType {
        let list = |ts: &Vec<PiType>, u: &mut Self| ts.iter().map(|t| u.pi(t)).collect::<Vec<_>>();
        match t {
            PiType::NoCap | PiType::Unit => t.clone(),
            PiType::Conn(ts) => PiType::Conn(list(ts, self)),
            PiType::LinIn(ts) => PiType::LinIn(list(ts, self)),
            PiType::LinOut(ts) => PiType::LinOut(list(ts, self)),
            PiType::LinConn(ts) => PiType::LinConn(list(ts, self)),
            PiType::Variant(bs) => PiType::Variant(bs.map(|b| self.pi(b))),
            PiType::Var(v) => PiType::Var(TypeVar { name: self.get(&v.name), dualised: v.dualised }),
            PiType::Rec(x, body) => {
                let y = self.bind(x);
                let b = self.pi(body);
                self.unbind();
                PiType::Rec(y, Box::new(b))
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Complement
// ---------------------------------------------------------------------------
//
// `⌊rec X.S⌋ = rec X.⌊S⌊rec X.S⫽X⌋⌋` is computed in one pass. Inside the result,
// `X` names the complement of the original recursive type, so:
//   * a continuation `X` stays `X`;
//   * a continuation `~X` (the complement of the complement) becomes the original;
//   * a carried `X` becomes the original, a carried `~X` becomes `X`;
//   * variables free in the whole input are swapped at continuation positions only.
// The "original" for a binder is itself written in the result's scope, i.e. with the
// carried rules applied for every enclosing binder.

struct Frames<T> {
    frames: Vec<(String, T)>,
}

impl<T: Clone> Frames<T> {
    fn find(&self, x: &str) -> Option<&T> {
        self.frames.iter().rev().find(|(n, _)| n == x).map(|(_, t)| t)
    }
}

pub fn complement_session(t: &SessionType) -> SessionType {
    let t = Uniq::new(t.free_type_vars()).session(t);
    comp_s(&t, &mut Frames { frames: Vec::new() })
}

fn comp_s(t: &SessionType, fr: &mut Frames<SessionType>) -> SessionType {
    match t {
        SessionType::End => SessionType::End,
        SessionType::Send(c, k) => SessionType::Recv(Box::new(carry_t(c, fr)), Box::new(comp_s(k, fr))),
        SessionType::Recv(c, k) => SessionType::Send(Box::new(carry_t(c, fr)), Box::new(comp_s(k, fr))),
        SessionType::Select(bs) => SessionType::Branch(bs.map(|b| comp_s(b, fr))),
        SessionType::Branch(bs) => SessionType::Select(bs.map(|b| comp_s(b, fr))),
        SessionType::Var(v) => match fr.find(&v.name) {
            Some(orig) if v.dualised => orig.clone(),
            Some(_) => t.clone(),
            None => SessionType::Var(v.flip()),
        },
        SessionType::Rec(x, body) => {
            let original = SessionType::Rec(x.clone(), Box::new(carry_s(body, fr)));
            fr.frames.push((x.clone(), original));
            let b = comp_s(body, fr);
            fr.frames.pop();
            SessionType::Rec(x.clone(), Box::new(b))
        }
    }
}

// A subterm copied verbatim into the complement, re-expressed in the result's scope.
fn carry_s(t: &SessionType, fr: &Frames<SessionType>) -> SessionType {
    match t {
        SessionType::End => SessionType::End,
        SessionType::Send(c, k) => SessionType::Send(Box::new(carry_t(c, fr)), Box::new(carry_s(k, fr))),
        SessionType::Recv(c, k) => SessionType::Recv(Box::new(carry_t(c, fr)), Box::new(carry_s(k, fr))),
        SessionType::Select(bs) => SessionType::Select(bs.map(|b| carry_s(b, fr))),
        SessionType::Branch(bs) => SessionType::Branch(bs.map(|b| carry_s(b, fr))),
        SessionType::Var(v) => match fr.find(&v.name) {
            Some(_) if v.dualised => SessionType::Var(TypeVar::plain(v.name.clone())),
            Some(orig) => orig.clone(),
            None => t.clone(),
        },
        SessionType::Rec(x, body) => SessionType::Rec(x.clone(), Box::new(carry_s(body, fr))),
    }
}

fn carry_t(t: &Type, fr: &Frames<SessionType>) -> Type {
    match t {
        Type::Session(s) => Type::from(carry_s(s, fr)),
        Type::Chan(c) => Type::Chan(Box::new(carry_t(c, fr))),
        Type::Unit => Type::Unit,
        Type::Var(v) => match fr.find(v) {
            Some(orig) => Type::from(orig.clone()),
            None => t.clone(),
        },
        Type::Rec(x, body) => Type::Rec(x.clone(), Box::new(carry_t(body, fr))),
    }
}

/// Complement of a linear type; undefined on connections, variants, and `unit`.
pub fn complement_pi(t: &PiType) -> Result<PiType, AlgebraError> {
    let t = Uniq::new(t.free_type_vars()).pi(t);
    comp_p(&t, &mut Frames { frames: Vec::new() })
}

fn comp_p(t: &PiType, fr: &mut Frames<PiType>) -> Result<PiType, AlgebraError> {
    let payload = |ts: &Vec<PiType>, fr: &Frames<PiType>| ts.iter().map(|t| carry_p(t, fr)).collect::<Vec<_>>();
    Ok(match t {
        PiType::NoCap => PiType::NoCap,
        PiType::LinIn(ts) => PiType::LinOut(payload(ts, fr)),
        PiType::LinOut(ts) => PiType::LinIn(payload(ts, fr)),
        PiType::Var(v) => match fr.find(&v.name) {
            Some(orig) if v.dualised => orig.clone(),
            Some(_) => t.clone(),
            None => PiType::Var(v.flip()),
        },
        PiType::Rec(x, body) => {
            let original = PiType::Rec(x.clone(), Box::new(carry_p(body, fr)));
            fr.frames.push((x.clone(), original));
            let b = comp_p(body, fr);
            fr.frames.pop();
            PiType::Rec(x.clone(), Box::new(b?))
        }
        PiType::Conn(_) | PiType::LinConn(_) | PiType::Variant(_) | PiType::Unit => return Err(AlgebraError::NoComplement(t.to_string())),
    })
}

fn carry_p(t: &PiType, fr: &Frames<PiType>) -> PiType {
    let list = |ts: &Vec<PiType>| ts.iter().map(|t| carry_p(t, fr)).collect::<Vec<_>>();
    match t {
        PiType::NoCap | PiType::Unit => t.clone(),
        PiType::Conn(ts) => PiType::Conn(list(ts)),
        PiType::LinIn(ts) => PiType::LinIn(list(ts)),
        PiType::LinOut(ts) => PiType::LinOut(list(ts)),
        PiType::LinConn(ts) => PiType::LinConn(list(ts)),
        PiType::Variant(bs) => PiType::Variant(bs.map(|b| carry_p(b, fr))),
        PiType::Var(v) => match fr.find(&v.name) {
            Some(_) if v.dualised => PiType::Var(TypeVar::plain(v.name.clone())),
            Some(orig) => orig.clone(),
            None => t.clone(),
        },
        PiType::Rec(x, body) => PiType::Rec(x.clone(), Box::new(carry_p(body, fr))),
    }
}

// ---------------------------------------------------------------------------
// Coinductive engine
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Rel {
    Sub,
    Dual,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Node {
    S(SessionType),
    T(Type),
    P(PiType),
}

/// The candidate relation: pairs assumed to hold, keyed modulo alpha.
///
/// Every clause is a conjunction, so the first failure fails the whole query and
/// the assumed set never has to be rolled back. A completed successful run leaves
/// a simulation (or duality relation) containing the queried pair.
#[derive(Default)]
pub struct PairCache {
    assumed: HashSet<(Rel, Node, Node)>,
}

impl PairCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.assumed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assumed.is_empty()
    }

    // Returns true when the pair was already assumed.
    fn assume(&mut self, rel: Rel, a: Node, b: Node) -> bool {
        !self.assumed.insert((rel, a, b))
    }

    pub fn sub_session(&mut self, t: &SessionType, s: &SessionType) -> bool {
        let (t, s) = (unf_s(t), unf_s(s));
        if self.assume(Rel::Sub, Node::S(t.alpha_normal()), Node::S(s.alpha_normal())) {
            return true;
        }
        use SessionType::*;
        match (&t, &s) {
            (End, End) => true,
            (Recv(tm, t1), Recv(sm, s1)) => self.sub_type(tm, sm) && self.sub_session(t1, s1),
            (Send(tm, t1), Send(sm, s1)) => self.sub_type(sm, tm) && self.sub_session(t1, s1),
            (Branch(ti), Branch(sj)) => ti.iter().all(|(l, tl)| sj.get(l).is_some_and(|sl| self.sub_session(tl, sl))),
            (Select(ti), Select(sj)) => sj.iter().all(|(l, sl)| ti.get(l).is_some_and(|tl| self.sub_session(tl, sl))),
            _ => false,
        }
    }

    pub fn sub_type(&mut self, t: &Type, s: &Type) -> bool {
        let (t, s) = (unf_t(t), unf_t(s));
        match (&t, &s) {
            (Type::Session(a), Type::Session(b)) => self.sub_session(a, b),
            (Type::Unit, Type::Unit) => true,
            (Type::Chan(a), Type::Chan(b)) => {
                if self.assume(Rel::Sub, Node::T(t.alpha_normal()), Node::T(s.alpha_normal())) {
                    return true;
                }
                self.sub_type(a, b) && self.sub_type(b, a)
            }
            _ => false,
        }
    }

    pub fn equiv_type(&mut self, t: &Type, s: &Type) -> bool {
        self.sub_type(t, s) && self.sub_type(s, t)
    }

    pub fn dual_session(&mut self, t: &SessionType, s: &SessionType) -> bool {
        let (t, s) = (unf_s(t), unf_s(s));
        if self.assume(Rel::Dual, Node::S(t.alpha_normal()), Node::S(s.alpha_normal())) {
            return true;
        }
        use SessionType::*;
        match (&t, &s) {
            (End, End) => true,
            (Recv(tm, t1), Send(sm, s1)) | (Send(tm, t1), Recv(sm, s1)) => self.equiv_type(tm, sm) && self.dual_session(t1, s1),
            (Branch(ti), Select(si)) | (Select(ti), Branch(si)) => {
                ti.same_labels(si) && ti.values().zip(si.values()).all(|(a, b)| self.dual_session(a, b))
            }
            _ => false,
        }
    }

    pub fn sub_pi(&mut self, t: &PiType, s: &PiType) -> bool {
        let (Ok(t), Ok(s)) = (unf_p(t), unf_p(s)) else {
            return false;
        };
        if self.assume(Rel::Sub, Node::P(t.alpha_normal()), Node::P(s.alpha_normal())) {
            return true;
        }
        use PiType::*;
        let pointwise = |c: &mut Self, a: &[PiType], b: &[PiType]| a.len() == b.len() && a.iter().zip(b).all(|(x, y)| c.sub_pi(x, y));
        match (&t, &s) {
            (NoCap, NoCap) | (Unit, Unit) => true,
            (LinIn(a), LinIn(b)) | (LinOut(a), LinOut(b)) | (LinConn(a), LinConn(b)) => pointwise(self, a, b),
            (Conn(a), Conn(b)) => pointwise(self, a, b) && pointwise(self, b, a),
            (Variant(a), Variant(b)) => a.same_labels(b) && a.values().zip(b.values()).all(|(x, y)| self.sub_pi(x, y)),
            _ => false,
        }
    }

    pub fn equiv_pi(&mut self, t: &PiType, s: &PiType) -> bool {
        self.sub_pi(t, s) && self.sub_pi(s, t)
    }

    pub fn dual_pi(&mut self, t: &PiType, s: &PiType) -> bool {
        let (Ok(t), Ok(s)) = (unf_p(t), unf_p(s)) else {
            return false;
        };
        if self.assume(Rel::Dual, Node::P(t.alpha_normal()), Node::P(s.alpha_normal())) {
            return true;
        }
        use PiType::*;
        match (&t, &s) {
            (NoCap, NoCap) => true,
            (LinIn(a), LinOut(b)) | (LinOut(a), LinIn(b)) => a.len() == b.len() && a.iter().zip(b).all(|(x, y)| self.equiv_pi(x, y)),
            _ => false,
        }
    }
}

pub fn subtype_session(t: &SessionType, s: &SessionType) -> bool {
    PairCache::new().sub_session(t, s)
}

pub fn equiv_session(t: &SessionType, s: &SessionType) -> bool {
    let mut c = PairCache::new();
    c.sub_session(t, s) && c.sub_session(s, t)
}

pub fn dual_session(t: &SessionType, s: &SessionType) -> bool {
    PairCache::new().dual_session(t, s)
}

pub fn subtype_type(t: &Type, s: &Type) -> bool {
    PairCache::new().sub_type(t, s)
}

pub fn equiv_type(t: &Type, s: &Type) -> bool {
    PairCache::new().equiv_type(t, s)
}

pub fn subtype_pi(t: &PiType, s: &PiType) -> bool {
    PairCache::new().sub_pi(t, s)
}

pub fn equiv_pi(t: &PiType, s: &PiType) -> bool {
    PairCache::new().equiv_pi(t, s)
}

pub fn dual_pi(t: &PiType, s: &PiType) -> bool {
    PairCache::new().dual_pi(t, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_pi_type, parse_session_type};

    fn s(src: &str) -> SessionType {
        parse_session_type(src).unwrap()
    }

    fn p(src: &str) -> PiType {
        parse_pi_type(src).unwrap()
    }

    fn open(src: &str) -> SessionType {
        // open types cannot go through the checked parser; wrap and strip a binder
        let SessionType::Rec(_, body) = s(&format!("rec X.rec Y.+{{w:{src}, z:X, v:Y}}")) else { unreachable!() };
        let SessionType::Rec(_, body) = *body else { unreachable!() };
        let SessionType::Select(bs) = *body else { unreachable!() };
        bs.get(&Label::new("w")).unwrap().clone()
    }

    #[test]
    fn unfold_examples() {
        assert_eq!(unfold_session(&s("rec X.+{l:X}")).unwrap(), s("+{l: rec X.+{l:X}}"));
        assert_eq!(unfold_session(&SessionType::End).unwrap(), SessionType::End);
        assert!(unfold_session(&open("X")).is_err());
    }

    #[test]
    fn subst_examples() {
        assert_eq!(subst_session(&open("+{l:X}"), "X", &SessionType::End), s("+{l:end}"));
        assert_eq!(subst_session(&open("?unit.~X"), "X", &s("!unit.end")), s("?unit.?unit.end"));
        assert_eq!(subst_session(&open("Y"), "X", &SessionType::End), open("Y"));
    }

    #[test]
    fn carried_subst_examples() {
        assert_eq!(carried_subst_session(&open("!X.X"), "X", &SessionType::End), open("!end.X"));
        assert_eq!(carried_subst_session(&open("+{l:X}"), "X", &SessionType::End), open("+{l:X}"));
        assert_eq!(carried_subst_session(&open("?(!X.end).X"), "X", &SessionType::End), open("?(!end.end).X"));
    }

    #[test]
    fn complement_examples() {
        assert_eq!(complement_session(&SessionType::End), SessionType::End);
        assert_eq!(complement_session(&s("!unit.end")), s("?unit.end"));
        let t = s("rec X.+{l:X}");
        assert!(dual_session(&complement_session(&t), &t));
        assert_eq!(complement_pi(&PiType::NoCap).unwrap(), PiType::NoCap);
        assert_eq!(complement_pi(&p("li[unit]")).unwrap(), p("lo[unit]"));
        let tau = p("rec X.lo[<l:~X>]");
        assert!(dual_pi(&complement_pi(&tau).unwrap(), &tau));
        assert!(complement_pi(&p("<l:unit>")).is_err());
        assert!(complement_pi(&p("#[unit]")).is_err());
        assert!(complement_pi(&PiType::Unit).is_err());
    }

    #[test]
    fn complement_of_recursion_with_carried_self_reference() {
        // carried X denotes the original type, which the complement must keep
        let t = s("rec X.!X.?(~X).X");
        let c = complement_session(&t);
        assert!(dual_session(&t, &c), "{c}");
        assert!(equiv_session(&complement_session(&c), &t));
    }

    #[test]
    fn subtyping_examples() {
        assert!(subtype_session(&s("rec X.+{l:X}"), &s("+{l: rec X.+{l:X}}")));
        // fewer branches is the subtype
        assert!(subtype_session(&s("&{l:end}"), &s("&{l:end, m:end}")));
        assert!(!subtype_session(&s("&{l:end, m:end}"), &s("&{l:end}")));
        assert!(subtype_session(&s("+{l:end, m:end}"), &s("+{l:end}")));
        assert!(!subtype_session(&s("!unit.end"), &s("?unit.end")));
    }

    #[test]
    fn equivalence_examples() {
        assert!(equiv_session(&s("rec X.!unit.X"), &s("!unit.rec X.!unit.X")));
        assert!(equiv_session(&SessionType::End, &SessionType::End));
        assert!(!equiv_session(&s("+{l:end}"), &s("+{l:end, m:end}")));
    }

    #[test]
    fn duality_examples() {
        assert!(dual_session(&s("rec X.&{l:X}"), &s("rec X.+{l:X}")));
        assert!(dual_session(&s("rec X.?unit.X"), &s("!unit.rec X.!unit.X")));
        assert!(!dual_session(&SessionType::End, &s("!unit.end")));
    }

    #[test]
    fn inadequacy_witness() {
        let t = s("rec X.?unit.X");
        let u = s("!unit.rec X.!unit.X");
        assert!(dual_session(&t, &u));
        assert!(!complement_session(&t).alpha_eq(&u));
    }

    #[test]
    fn pi_relation_examples() {
        assert!(equiv_pi(&p("rec X.li[<l:X>]"), &p("li[<l: rec X.li[<l:X>]>]")));
        assert!(subtype_pi(&PiType::NoCap, &PiType::NoCap));
        assert!(!subtype_pi(&p("li[unit]"), &p("lo[unit]")));
        assert!(dual_pi(&p("rec X.li[<l:X>]"), &p("rec X.lo[<l:~X>]")));
        assert!(dual_pi(&PiType::NoCap, &PiType::NoCap));
        assert!(!dual_pi(&p("li[unit]"), &p("li[unit]")));
    }

    #[test]
    fn pi_complement_of_tau_is_upsilon() {
        let tau = p("rec X.lo[<l:~X>]");
        assert!(complement_pi(&tau).unwrap().alpha_eq(&p("rec X.li[<l:X>]")));
    }

    // Independent oracle: the two-pair simulation {(A, B), (A, unf B)} closes for
    // A = rec X.!unit.X and B = !unit.A, written out by hand.
    #[test]
    fn equivalence_relation_is_small() {
        let a = s("rec X.!unit.X");
        let b = s("!unit.rec X.!unit.X");
        let mut cache = PairCache::new();
        assert!(cache.sub_session(&a, &b));
        // (A,B) plus the unit pair; the continuation pair (A, A) is alpha-equal to the first after unfolding
        assert!(cache.len() <= 3, "{}", cache.len());
    }
}
