//! Small-step reduction for both calculi, structural congruence, and `↪`.
//!
//! A process is flattened into a configuration: top-level restrictions (renamed
//! apart) and a list of threads, each a prefix or a replication. A replicated
//! thread contributes one fresh copy of its body per step search, which keeps the
//! step set finite.

use std::collections::BTreeSet;
use std::fmt;

use crate::syntax::*;

pub mod congruence;
pub mod pi;
pub mod session;

pub use congruence::{canonical_pi, canonical_session, hook_equiv, struct_equiv_pi, struct_equiv_session};
pub use pi::{run_pi, step_pi, PiStep, RuntimeError};
pub use session::{decompose, run_session, step_session, EvaluationContext, SessionStep};

/// One reduction: the rule applied, where, and the resulting process.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step<P> {
    pub rule: &'static str,
    pub location: String,
    pub result: P,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace<P> {
    pub start: P,
    pub steps: Vec<Step<P>>,
}

impl<P: fmt::Display> fmt::Display for Trace<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.start)?;
        for s in &self.steps {
            writeln!(f, "--rule {} at {}", s.rule, s.location)?;
            writeln!(f, "{}", s.result)?;
        }
        Ok(())
    }
}

/// Where a redex participant comes from: a top-level thread, or a thread of the
/// fresh copy of the replication at that top-level index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) enum Origin {
    Top(usize),
    Copy(usize, usize),
}

/// Binders and threads of a flattened process, plus one copy per replication.
pub(crate) struct Pool<B, T> {
    pub binders: Vec<B>,
    pub top: Vec<T>,
    pub copies: Vec<Option<(Vec<B>, Vec<T>)>>,
}

impl<B: Clone, T: Clone> Pool<B, T> {
    pub fn candidates(&self) -> Vec<(Origin, &T)> {
        let mut out: Vec<(Origin, &T)> = self.top.iter().enumerate().map(|(i, t)| (Origin::Top(i), t)).collect();
        for (r, c) in self.copies.iter().enumerate() {
            if let Some((_, ts)) = c {
                out.extend(ts.iter().enumerate().map(|(k, t)| (Origin::Copy(r, k), t)));
            }
        }
        out
    }

    /// Copies of one replication only meet threads of the same copy.
    pub fn compatible(a: Origin, b: Origin) -> bool {
        match (a, b) {
            (Origin::Copy(r1, k1), Origin::Copy(r2, k2)) => r1 != r2 || k1 != k2,
            (x, y) => x != y,
        }
    }

    /// Binders and threads after replacing the participants of a step. A used
    /// replica is placed just before its replication.
    pub fn assemble(&self, replaced: &[(Origin, T)]) -> (Vec<B>, Vec<T>) {
        let find = |o: Origin| replaced.iter().find(|(r, _)| *r == o).map(|(_, t)| t.clone());
        let mut binders = self.binders.clone();
        let mut threads = Vec::new();
        for (i, t) in self.top.iter().enumerate() {
            let copy_used = replaced.iter().any(|(o, _)| matches!(o, Origin::Copy(r, _) if *r == i));
            if copy_used {
                let (bs, ts) = self.copies[i].as_ref().expect("copy exists for a used replication");
                binders.extend(bs.iter().cloned());
                for (k, u) in ts.iter().enumerate() {
                    threads.push(find(Origin::Copy(i, k)).unwrap_or_else(|| u.clone()));
                }
            }
            threads.push(find(Origin::Top(i)).unwrap_or_else(|| t.clone()));
        }
        (binders, threads)
    }
}

pub(crate) fn fresh_for(x: &str, used: &mut BTreeSet<String>) -> String {
    let n = if used.contains(x) { fresh_name(x, used) } else { x.to_string() };
    used.insert(n.clone());
    n
}
