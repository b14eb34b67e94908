//! Seeded generators: closed guarded session types, well-typed processes built
//! by running the typing rules backwards, linearity-breaking mutants, and value
//! judgments.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::check::SessionContext;
use crate::syntax::*;
use crate::types::{complement_session, equiv_session, equiv_type, unf_s, unf_t};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GenConfig {
    pub seed: u64,
    pub max_type_depth: usize,
    pub max_process_size: usize,
    /// Size of the label alphabet `l0, l1, ...`.
    pub labels: usize,
    /// Most arms in one select or branch type.
    pub max_width: usize,
    /// Most session restrictions at the top of a generated process.
    pub sessions: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig { seed: 0, max_type_depth: 4, max_process_size: 12, labels: 3, max_width: 2, sessions: 2 }
    }
}

impl GenConfig {
    pub fn with_seed(&self, seed: u64) -> Self {
        GenConfig { seed, ..self.clone() }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.max_process_size == 0 || self.labels == 0 || self.max_width == 0 {
            return Err("process size, label alphabet and branch width must be at least 1".into());
        }
        Ok(())
    }
}

pub struct Gen {
    cfg: GenConfig,
    rng: ChaCha8Rng,
    counter: usize,
    fuel: usize,
}

impl Gen {
    pub fn new(cfg: &GenConfig) -> Self {
        Gen { cfg: cfg.clone(), rng: ChaCha8Rng::seed_from_u64(cfg.seed), counter: 0, fuel: 0 }
    }

    fn fresh(&mut self, stem: &str) -> String {
        self.counter += 1;
        format!("{stem}{}", self.counter)
    }

    fn labels(&mut self) -> Vec<Label> {
        let width = self.rng.random_range(1..=self.cfg.max_width.min(self.cfg.labels));
        let mut all: Vec<usize> = (0..self.cfg.labels).collect();
        let mut out = Vec::new();
        for _ in 0..width {
            let i = self.rng.random_range(0..all.len());
            out.push(Label::new(format!("l{}", all.remove(i))));
        }
        out
    }

    pub fn session_type(&mut self, depth: usize) -> SessionType {
        self.session(depth, &[], false, 0)
    }

    fn session(&mut self, depth: usize, vars: &[String], guarded: bool, level: usize) -> SessionType {
        let var_ok = guarded && !vars.is_empty();
        if depth == 0 {
            return if var_ok && self.rng.random_bool(0.5) {
                SessionType::Var(TypeVar::plain(vars[self.rng.random_range(0..vars.len())].clone()))
            } else {
                SessionType::End
            };
        }
        if self.rng.random_bool(0.35 / (1.0 + level as f64)) {
            let x = self.fresh("X");
            let mut inner = vars.to_vec();
            inner.push(x.clone());
            let body = self.communication(depth, &inner, level + 1);
            return SessionType::Rec(x, Box::new(body));
        }
        match self.rng.random_range(0..10) {
            0 => SessionType::End,
            1 | 2 if var_ok => SessionType::Var(TypeVar::plain(vars[self.rng.random_range(0..vars.len())].clone())),
            _ => self.communication(depth, vars, level),
        }
    }

    fn communication(&mut self, depth: usize, vars: &[String], level: usize) -> SessionType {
        let d = depth.saturating_sub(1);
        match self.rng.random_range(0..4) {
            0 => SessionType::Send(Box::new(self.carried(d, vars, level)), Box::new(self.session(d, vars, true, level))),
            1 => SessionType::Recv(Box::new(self.carried(d, vars, level)), Box::new(self.session(d, vars, true, level))),
            k => {
                let arms = self.labels().into_iter().map(|l| (l, self.session(d, vars, true, level))).collect();
                if k == 2 {
                    SessionType::Select(Branches::new(arms))
                } else {
                    SessionType::Branch(Branches::new(arms))
                }
            }
        }
    }

    fn carried(&mut self, depth: usize, vars: &[String], level: usize) -> Type {
        match self.rng.random_range(0..8) {
            0..=2 => Type::Unit,
            3 => Type::Chan(Box::new(Type::Unit)),
            _ => Type::from(self.session(depth, vars, true, level)),
        }
    }

    /// A value type for value judgments: unit, a channel, or a session type.
    pub fn value_type(&mut self, depth: usize) -> Type {
        match self.rng.random_range(0..4) {
            0 => Type::Unit,
            1 => Type::Chan(Box::new(Type::Unit)),
            _ => Type::Session(self.session_type(depth)),
        }
    }

    fn pick<T: Clone>(&mut self, items: &[T]) -> T {
        items[self.rng.random_range(0..items.len())].clone()
    }

    /// A process consuming every linear obligation in `delta` under the
    /// unrestricted names `gamma`.
    fn process(&mut self, delta: Vec<(String, SessionType)>, gamma: &[(String, Type)]) -> SessionProcess {
        let mut delta: Vec<(String, SessionType)> = delta.into_iter().filter(|(_, s)| unf_s(s) != SessionType::End).collect();
        if delta.is_empty() {
            return self.idle(gamma);
        }
        if self.fuel == 0 {
            let parked = delta.into_iter().map(|(x, s)| self.park(x, s)).collect();
            return SessionProcess::par_all(parked);
        }
        if delta.len() >= 2 && self.rng.random_bool(0.35) {
            let mut left = Vec::new();
            let mut right = Vec::new();
            for e in delta {
                if self.rng.random_bool(0.5) {
                    left.push(e)
                } else {
                    right.push(e)
                }
            }
            return SessionProcess::par(self.process(left, gamma), self.process(right, gamma));
        }
        self.fuel -= 1;
        let i = self.rng.random_range(0..delta.len());
        let (x, s) = delta.remove(i);
        if matches!(s, SessionType::Rec(..)) && self.rng.random_bool(0.15) {
            let server = self.server(x, s);
            return SessionProcess::par(server, self.process(delta, gamma));
        }
        match unf_s(&s) {
            SessionType::Send(t, k) => {
                delta.push((x.clone(), *k));
                self.send(x, &t, delta, gamma)
            }
            SessionType::Recv(t, k) => {
                let z = self.fresh("z");
                let mut g = gamma.to_vec();
                match unf_t(&t) {
                    Type::Session(zs) => delta.push((z.clone(), zs)),
                    other => g.push((z.clone(), other)),
                }
                delta.push((x.clone(), *k));
                let cont = self.process(delta, &g);
                SessionProcess::Input { subject: x, binder: z, annot: *t, cont: Box::new(cont) }
            }
            SessionType::Select(arms) => {
                let (l, next) = self.pick(&arms.into_vec());
                delta.push((x.clone(), next));
                SessionProcess::Selection { subject: x, label: l, cont: Box::new(self.process(delta, gamma)) }
            }
            SessionType::Branch(arms) => {
                let arms = arms
                    .into_vec()
                    .into_iter()
                    .map(|(l, next)| {
                        let mut d = delta.clone();
                        d.push((x.clone(), next));
                        (l, self.process(d, gamma))
                    })
                    .collect();
                SessionProcess::Branching { subject: x, arms: Branches::new(arms) }
            }
            _ => self.park(x, s),
        }
    }

    fn send(&mut self, x: String, t: &Type, mut delta: Vec<(String, SessionType)>, gamma: &[(String, Type)]) -> SessionProcess {
        let out =
            |payload: SessionValue, cont: SessionProcess| SessionProcess::Output { subject: x.clone(), payload, cont: Box::new(cont) };
        match unf_t(t) {
            Type::Unit => {
                let cont = self.process(delta, gamma);
                out(SessionValue::Unit, cont)
            }
            Type::Session(s) => {
                let candidates: Vec<usize> = (0..delta.len()).filter(|&j| delta[j].0 != x && equiv_session(&delta[j].1, &s)).collect();
                if !candidates.is_empty() && self.rng.random_bool(0.5) {
                    let j = self.pick(&candidates);
                    let (z, _) = delta.remove(j);
                    let cont = self.process(delta, gamma);
                    return out(SessionValue::Var(z), cont);
                }
                let (u, w) = (self.fresh("x"), self.fresh("y"));
                let fuel = self.fuel;
                let cont = self.process(delta, gamma);
                self.fuel = fuel;
                let peer = self.process(vec![(w.clone(), complement_session(&s))], gamma);
                SessionProcess::SessRes {
                    x: u.clone(),
                    y: w,
                    annot: s,
                    body: Box::new(SessionProcess::par(out(SessionValue::Var(u), cont), peer)),
                }
            }
            other => {
                let known: Vec<String> = gamma.iter().filter(|(_, g)| equiv_type(g, &other)).map(|(n, _)| n.clone()).collect();
                if !known.is_empty() && self.rng.random_bool(0.7) {
                    let a = self.pick(&known);
                    let cont = self.process(delta, gamma);
                    return out(SessionValue::Var(a), cont);
                }
                let a = self.fresh("a");
                let mut g = gamma.to_vec();
                g.push((a.clone(), other.clone()));
                let cont = self.process(delta, &g);
                SessionProcess::ChanRes { name: a.clone(), annot: other, body: Box::new(out(SessionValue::Var(a), cont)) }
            }
        }
    }

    /// A process with no linear obligations.
    fn idle(&mut self, gamma: &[(String, Type)]) -> SessionProcess {
        if self.fuel == 0 {
            return SessionProcess::Nil;
        }
        let units: Vec<String> =
            gamma.iter().filter(|(_, t)| matches!(unf_t(t), Type::Chan(c) if *c == Type::Unit)).map(|(n, _)| n.clone()).collect();
        match self.rng.random_range(0..6) {
            0 if self.cfg.max_type_depth > 0 => {
                self.fuel -= 1;
                let s = self.session_type(self.cfg.max_type_depth.min(2));
                let (x, y) = (self.fresh("x"), self.fresh("y"));
                let fuel = self.fuel;
                let left = self.process(vec![(x.clone(), s.clone())], gamma);
                self.fuel = fuel;
                let body = SessionProcess::par(left, self.process(vec![(y.clone(), complement_session(&s))], gamma));
                SessionProcess::SessRes { x, y, annot: s, body: Box::new(body) }
            }
            1 if !units.is_empty() => {
                self.fuel -= 1;
                let a = self.pick(&units);
                let z = self.fresh("z");
                SessionProcess::par(
                    SessionProcess::Output { subject: a.clone(), payload: SessionValue::Unit, cont: Box::new(SessionProcess::Nil) },
                    SessionProcess::Input { subject: a, binder: z, annot: Type::Unit, cont: Box::new(SessionProcess::Nil) },
                )
            }
            _ => SessionProcess::Nil,
        }
    }

    /// Consumes `x:s` by sending it on a fresh unrestricted channel nobody reads.
    fn park(&mut self, x: String, s: SessionType) -> SessionProcess {
        let a = self.fresh("a");
        let t = Type::Session(s);
        SessionProcess::ChanRes {
            name: a.clone(),
            annot: Type::Chan(Box::new(t)),
            body: Box::new(SessionProcess::Output { subject: a, payload: SessionValue::Var(x), cont: Box::new(SessionProcess::Nil) }),
        }
    }

    /// Hands `x:s` to a replicated server that performs one action and, if the
    /// session is back at `s`, hands it to itself again.
    fn server(&mut self, x: String, s: SessionType) -> SessionProcess {
        let a = self.fresh("a");
        let z = self.fresh("z");
        let step = |g: &mut Gen, next: SessionType| -> SessionProcess {
            if equiv_session(&next, &s) {
                SessionProcess::Output { subject: a.clone(), payload: SessionValue::Var(z.clone()), cont: Box::new(SessionProcess::Nil) }
            } else {
                g.park(z.clone(), next)
            }
        };
        let body = match unf_s(&s) {
            SessionType::Select(arms) => {
                let (l, next) = self.pick(&arms.into_vec());
                let cont = step(self, next);
                SessionProcess::Selection { subject: z.clone(), label: l, cont: Box::new(cont) }
            }
            SessionType::Branch(arms) => {
                let arms = arms.into_vec().into_iter().map(|(l, next)| (l, step(self, next))).collect();
                SessionProcess::Branching { subject: z.clone(), arms: Branches::new(arms) }
            }
            _ => self.park(z.clone(), s.clone()),
        };
        let chan = Type::Chan(Box::new(Type::Session(s.clone())));
        SessionProcess::ChanRes {
            name: a.clone(),
            annot: chan,
            body: Box::new(SessionProcess::par(
                SessionProcess::Output { subject: a.clone(), payload: SessionValue::Var(x), cont: Box::new(SessionProcess::Nil) },
                SessionProcess::Repl(Box::new(SessionProcess::Input {
                    subject: a,
                    binder: z,
                    annot: Type::Session(s),
                    cont: Box::new(body),
                })),
            )),
        }
    }
}

/// The unrestricted names every generated process may use.
pub fn base_context() -> SessionContext {
    SessionContext::from([("k".to_string(), Type::Chan(Box::new(Type::Unit)))])
}

pub fn gen_session_type(cfg: &GenConfig) -> SessionType {
    Gen::new(cfg).session_type(cfg.max_type_depth)
}

/// A closed-up-to-`k` process accepted by the session checker, resampled until
/// its size is within `cfg.max_process_size`.
pub fn gen_typed_process(cfg: &GenConfig) -> (SessionContext, SessionProcess) {
    let ctx = base_context();
    if cfg.sessions == 0 {
        return (ctx, SessionProcess::Nil);
    }
    let gamma: Vec<(String, Type)> = ctx.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
    let mut g = Gen::new(cfg);
    let mut best: Option<SessionProcess> = None;
    for _ in 0..64 {
        g.counter = 0;
        g.fuel = g.rng.random_range(1..=cfg.max_process_size.div_ceil(3));
        let n = g.rng.random_range(1..=cfg.sessions);
        let mut delta = Vec::new();
        let mut binders = Vec::new();
        for _ in 0..n {
            let s = g.session_type(cfg.max_type_depth.min(2));
            let (x, y) = (g.fresh("x"), g.fresh("y"));
            delta.push((x.clone(), s.clone()));
            delta.push((y.clone(), complement_session(&s)));
            binders.push((x, y, s));
        }
        // Endpoints of one session usually start in different threads.
        let body = if g.rng.random_bool(0.85) {
            let (left, right): (Vec<_>, Vec<_>) = delta.into_iter().enumerate().partition(|(i, _)| i % 2 == 0);
            let fuel = g.fuel;
            let left = g.process(left.into_iter().map(|(_, e)| e).collect(), &gamma);
            g.fuel = fuel;
            let right = g.process(right.into_iter().map(|(_, e)| e).collect(), &gamma);
            SessionProcess::par(left, right)
        } else {
            g.process(delta, &gamma)
        };
        let p = binders.into_iter().rev().fold(body, |acc, (x, y, annot)| SessionProcess::SessRes { x, y, annot, body: Box::new(acc) });
        if p.size() <= cfg.max_process_size {
            return (ctx, p);
        }
        if best.as_ref().is_none_or(|b| p.size() < b.size()) {
            best = Some(p);
        }
    }
    (ctx, best.expect("at least one sample"))
}

/// Breaks linearity: a second use of the first session endpoint, run in
/// parallel with its scope, or a fresh session whose endpoint is used twice.
pub fn mutate(p: &SessionProcess) -> SessionProcess {
    fn go(p: &SessionProcess) -> Option<SessionProcess> {
        use SessionProcess::*;
        let extra = |x: &str| Output { subject: x.to_string(), payload: SessionValue::Unit, cont: Box::new(Nil) };
        match p {
            SessRes { x, y, annot, body } => Some(SessRes {
                x: x.clone(),
                y: y.clone(),
                annot: annot.clone(),
                body: Box::new(SessionProcess::par((**body).clone(), extra(x))),
            }),
            Par(a, b) => match go(a) {
                Some(a2) => Some(Par(Box::new(a2), b.clone())),
                None => go(b).map(|b2| Par(a.clone(), Box::new(b2))),
            },
            ChanRes { name, annot, body } => go(body).map(|b| ChanRes { name: name.clone(), annot: annot.clone(), body: Box::new(b) }),
            _ => None,
        }
    }
    go(p).unwrap_or_else(|| {
        let avoid = p.all_names();
        let x = fresh_name("m", &avoid);
        let y = fresh_name("n", &avoid);
        let use_x = || SessionProcess::Output { subject: x.clone(), payload: SessionValue::Unit, cont: Box::new(SessionProcess::Nil) };
        SessionProcess::SessRes {
            x: x.clone(),
            y: y.clone(),
            annot: SessionType::send(Type::Unit, SessionType::End),
            body: Box::new(SessionProcess::par_all(vec![
                p.clone(),
                use_x(),
                use_x(),
                SessionProcess::Input { subject: y, binder: "v".into(), annot: Type::Unit, cont: Box::new(SessionProcess::Nil) },
            ])),
        }
    })
}

/// A value judgment `Γ ⊢ v : T`, accepted or not. Types are drawn from one pool
/// so that distinct types differ in kind or shape, never by width alone.
pub fn gen_value_judgment(cfg: &GenConfig) -> (SessionContext, SessionValue, Type) {
    let mut g = Gen::new(cfg);
    let depth = cfg.max_type_depth.min(2);
    let pool: Vec<Type> = (0..3).map(|_| g.value_type(depth)).collect();
    let n = g.rng.random_range(0..=2);
    let mut ctx = SessionContext::new();
    for i in 0..n {
        let t = g.pick(&pool);
        ctx.insert(format!("v{i}"), t);
    }
    let v = if n > 0 && g.rng.random_bool(0.8) { SessionValue::Var(format!("v{}", g.rng.random_range(0..n))) } else { SessionValue::Unit };
    let t = match &v {
        SessionValue::Var(x) if g.rng.random_bool(0.6) => ctx[x].clone(),
        _ => g.pick(&pool),
    };
    (ctx, v, t)
}
