//! Type checkers for both calculi, producing printable derivations.

use std::collections::BTreeMap;
use std::fmt::{self, Display, Formatter};

use crate::syntax::{PiType, Type};

pub mod pi;
pub mod session;

pub use pi::{check_pi_process, check_pi_value};
pub use session::{check_session_process, check_session_value};

/// Typing context of a session process: names to value types.
pub type SessionContext = BTreeMap<String, Type>;

/// Typing context of a π process.
pub type PiContext = BTreeMap<String, PiType>;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{rule}: {message} (in `{location}`)")]
pub struct TypeError {
    pub rule: &'static str,
    pub message: String,
    /// The offending subterm, printed.
    pub location: String,
}

/// A derivation tree: rule name, concluded judgment, side conditions, premises.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub rule: &'static str,
    pub judgment: String,
    pub side: Vec<String>,
    pub premises: Vec<Derivation>,
}

impl Derivation {
    /// Rule names in pre-order.
    pub fn rules(&self) -> Vec<&'static str> {
        let mut out = vec![self.rule];
        for p in &self.premises {
            out.extend(p.rules());
        }
        out
    }

    /// All side conditions in pre-order.
    pub fn side_conditions(&self) -> Vec<&str> {
        let mut out: Vec<&str> = self.side.iter().map(String::as_str).collect();
        for p in &self.premises {
            out.extend(p.side_conditions());
        }
        out
    }

    fn write(&self, f: &mut Formatter<'_>, depth: usize) -> fmt::Result {
        let pad = "  ".repeat(depth);
        write!(f, "{pad}[{}] {}", self.rule, self.judgment)?;
        for s in &self.side {
            write!(f, "    {s}")?;
        }
        writeln!(f)?;
        for p in &self.premises {
            p.write(f, depth + 1)?;
        }
        Ok(())
    }
}

impl Display for Derivation {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        self.write(f, 0)
    }
}

pub(crate) fn show_context<T: Display>(ctx: &BTreeMap<String, T>) -> String {
    if ctx.is_empty() {
        return "∅".to_string();
    }
    ctx.iter().map(|(k, v)| format!("{k}:{v}")).collect::<Vec<_>>().join(", ")
}
