pub mod check;
pub mod correspond;
pub mod encode;
pub mod par;
pub mod parse;
pub mod pretty;
pub mod semantics;
pub mod syntax;
pub mod types;
