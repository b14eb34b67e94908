//! Concrete syntax for both calculi.
//!
//! Session types: `end`, `!T.S`, `?T.S`, `+{l:S, ...}`, `&{l:S, ...}`, `rec X.S`, `X`, `~X`;
//! value types add `#T` and `unit`.
//! Linear types: `empty[]`, `#[T, ...]`, `li[..]`, `lo[..]`, `l#[..]`, `<l:T, ...>`, `unit`,
//! `rec X.T`, `X`, `~X`.
//! Session processes: `x!v.P`, `x?(y:T).P`, `sel x l.P`, `bra x {l: P, ...}`, `P | Q`,
//! `(new x y:S) P`, `(newc a:T) P`, `*P`, `0`.
//! π processes: `x!(v, ...).P`, `x?(y, ...).P`, `case v of {l(x) => P, ...}`, `(new a:T) P`.
//!
//! Prefixes and `*` bind tighter than `|`, which is right-associative. A restriction's
//! scope extends as far right as possible. `--` starts a line comment. Files may open
//! with `type NAME = T` aliases.

use std::collections::HashMap;
use std::fmt;

use crate::syntax::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{span}: {message}{}", expected_suffix(.expected))]
pub struct ParseError {
    pub span: SourceSpan,
    pub message: String,
    pub expected: Vec<String>,
}

fn expected_suffix(expected: &[String]) -> String {
    if expected.is_empty() {
        String::new()
    } else {
        format!(" (expected one of: {})", expected.join(", "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(String),
    Sym(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) | Tok::Num(s) => write!(f, "`{s}`"),
            Tok::Sym(s) => write!(f, "`{s}`"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

const SYMBOLS: &[&str] = &["=>", "!", "?", ".", "+", "&", "{", "}", ":", ",", "~", "#", "(", ")", "[", "]", "<", ">", "|", "*", "=", ";"];

fn lex(src: &str) -> Result<Vec<(Tok, SourceSpan)>, ParseError> {
    let mut out = Vec::new();
    let bytes = src.as_bytes();
    let (mut i, mut line, mut line_start) = (0, 1, 0);
    let span = |s: usize, e: usize, line: usize, line_start: usize| SourceSpan { start: s, end: e, line, column: s - line_start + 1 };
    'outer: while i < bytes.len() {
        let c = src[i..].chars().next().expect("in bounds");
        if c == '\n' {
            i += 1;
            line += 1;
            line_start = i;
            continue;
        }
        if c.is_whitespace() {
            i += c.len_utf8();
            continue;
        }
        if src[i..].starts_with("--") {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let s = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_' || bytes[i] == b'\'') {
                i += 1;
            }
            out.push((Tok::Ident(src[s..i].to_string()), span(s, i, line, line_start)));
            continue;
        }
        if c.is_ascii_digit() {
            let s = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            out.push((Tok::Num(src[s..i].to_string()), span(s, i, line, line_start)));
            continue;
        }
        for sym in SYMBOLS {
            if src[i..].starts_with(sym) {
                out.push((Tok::Sym(sym), span(i, i + sym.len(), line, line_start)));
                i += sym.len();
                continue 'outer;
            }
        }
        return Err(ParseError {
            span: span(i, i + c.len_utf8(), line, line_start),
            message: format!("unexpected character `{c}`"),
            expected: vec![],
        });
    }
    out.push((Tok::Eof, span(src.len(), src.len(), line, line_start)));
    Ok(out)
}

const TYPE_KEYWORDS: &[&str] = &["end", "unit", "rec", "empty", "li", "lo"];
const PROCESS_KEYWORDS: &[&str] = &["sel", "bra", "new", "newc", "case", "of", "type"];

struct Parser {
    toks: Vec<(Tok, SourceSpan)>,
    pos: usize,
    rec_scope: Vec<String>,
    session_aliases: HashMap<String, Type>,
    pi_aliases: HashMap<String, PiType>,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn new(src: &str) -> PResult<Self> {
        Ok(Parser { toks: lex(src)?, pos: 0, rec_scope: Vec::new(), session_aliases: HashMap::new(), pi_aliases: HashMap::new() })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].0
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].1
    }

    fn span_from(&self, start: SourceSpan) -> SourceSpan {
        let last = self.toks[self.pos.saturating_sub(1)].1;
        SourceSpan { end: last.end.max(start.start), ..start }
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, expected: &[&str]) -> PResult<T> {
        Err(ParseError {
            span: self.span(),
            message: format!("unexpected {}", self.peek()),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        })
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(t) if *t == s)
    }

    fn is_kw(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Ident(t) if t == k)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> PResult<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.fail(&[&format!("`{s}`")])
        }
    }

    fn expect_kw(&mut self, k: &str) -> PResult<()> {
        if self.is_kw(k) {
            self.bump();
            Ok(())
        } else {
            self.fail(&[&format!("`{k}`")])
        }
    }

    fn ident(&mut self, what: &str) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => self.fail(&[what]),
        }
    }

    fn name(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) if !PROCESS_KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(s)
            }
            _ => self.fail(&["name"]),
        }
    }

    fn type_var(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) if !TYPE_KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(s)
            }
            _ => self.fail(&["type variable"]),
        }
    }

    fn finish(&self) -> PResult<()> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            self.fail(&["end of input"])
        }
    }

    fn with_rec<T>(&mut self, x: String, f: impl FnOnce(&mut Self) -> PResult<T>) -> PResult<T> {
        self.rec_scope.push(x);
        let r = f(self);
        self.rec_scope.pop();
        r
    }

    fn arms<T>(&mut self, close: &str, mut arm: impl FnMut(&mut Self) -> PResult<(Label, T)>) -> PResult<Vec<(Label, T)>> {
        let mut out = Vec::new();
        if self.eat_sym(close) {
            return Ok(out);
        }
        loop {
            out.push(arm(self)?);
            if self.eat_sym(close) {
                return Ok(out);
            }
            if !self.eat_sym(",") {
                return self.fail(&["`,`", &format!("`{close}`")]);
            }
        }
    }

    // ----- session types -----

    fn value_type(&mut self) -> PResult<Type> {
        match self.peek().clone() {
            Tok::Ident(k) if k == "unit" => {
                self.bump();
                Ok(Type::Unit)
            }
            Tok::Sym("#") => {
                self.bump();
                Ok(Type::chan(self.value_type()?))
            }
            Tok::Sym("(") => {
                self.bump();
                let t = self.value_type()?;
                self.expect_sym(")")?;
                Ok(t)
            }
            Tok::Ident(k) if k == "rec" => {
                self.bump();
                let x = self.type_var()?;
                self.expect_sym(".")?;
                let body = self.with_rec(x.clone(), |p| p.value_type())?;
                Ok(match body {
                    Type::Session(s) => Type::Session(SessionType::Rec(x, Box::new(s))),
                    Type::Var(v) if v == x => Type::Session(SessionType::Rec(x, Box::new(SessionType::Var(TypeVar::plain(v))))),
                    other => Type::Rec(x, Box::new(other)),
                })
            }
            Tok::Ident(k) if !TYPE_KEYWORDS.contains(&k.as_str()) => {
                self.bump();
                if self.rec_scope.contains(&k) {
                    Ok(Type::Var(k))
                } else if let Some(t) = self.session_aliases.get(&k) {
                    Ok(t.clone())
                } else {
                    Ok(Type::Var(k))
                }
            }
            Tok::Sym("~") | Tok::Sym("!") | Tok::Sym("?") | Tok::Sym("+") | Tok::Sym("&") => Ok(Type::from(self.session_type()?)),
            Tok::Ident(k) if k == "end" => Ok(Type::from(self.session_type()?)),
            _ => self.fail(&["type"]),
        }
    }

    fn session_type(&mut self) -> PResult<SessionType> {
        match self.peek().clone() {
            Tok::Ident(k) if k == "end" => {
                self.bump();
                Ok(SessionType::End)
            }
            Tok::Sym(s @ ("!" | "?")) => {
                self.bump();
                let carried = self.value_type()?;
                self.expect_sym(".")?;
                let cont = self.session_type()?;
                Ok(if s == "!" { SessionType::send(carried, cont) } else { SessionType::recv(carried, cont) })
            }
            Tok::Sym(s @ ("+" | "&")) => {
                self.bump();
                self.expect_sym("{")?;
                let arms = self.arms("}", |p| {
                    let l = p.ident("label")?;
                    p.expect_sym(":")?;
                    Ok((Label(l), p.session_type()?))
                })?;
                let bs = Branches::new(arms);
                Ok(if s == "+" { SessionType::Select(bs) } else { SessionType::Branch(bs) })
            }
            Tok::Ident(k) if k == "rec" => {
                self.bump();
                let x = self.type_var()?;
                self.expect_sym(".")?;
                let body = self.with_rec(x.clone(), |p| p.session_type())?;
                Ok(SessionType::Rec(x, Box::new(body)))
            }
            Tok::Sym("~") => {
                self.bump();
                Ok(SessionType::Var(TypeVar::dual(self.type_var()?)))
            }
            Tok::Sym("(") => {
                self.bump();
                let s = self.session_type()?;
                self.expect_sym(")")?;
                Ok(s)
            }
            Tok::Ident(k) if !TYPE_KEYWORDS.contains(&k.as_str()) => {
                let start = self.span();
                self.bump();
                if self.rec_scope.contains(&k) {
                    return Ok(SessionType::var(&k));
                }
                match self.session_aliases.get(&k) {
                    Some(Type::Session(s)) => Ok(s.clone()),
                    Some(_) => Err(ParseError {
                        span: self.span_from(start),
                        message: format!("alias `{k}` is not a session type"),
                        expected: vec![],
                    }),
                    None => Ok(SessionType::var(&k)),
                }
            }
            _ => self.fail(&["session type"]),
        }
    }

    // ----- linear types -----

    fn pi_list(&mut self) -> PResult<Vec<PiType>> {
        self.expect_sym("[")?;
        let mut out = Vec::new();
        if self.eat_sym("]") {
            return Ok(out);
        }
        loop {
            out.push(self.pi_type()?);
            if self.eat_sym("]") {
                return Ok(out);
            }
            if !self.eat_sym(",") {
                return self.fail(&["`,`", "`]`"]);
            }
        }
    }

    fn pi_type(&mut self) -> PResult<PiType> {
        let next_is = |p: &Self, s: &str| matches!(p.peek_at(1), Tok::Sym(t) if *t == s);
        match self.peek().clone() {
            Tok::Ident(k) if k == "empty" && next_is(self, "[") => {
                self.bump();
                self.expect_sym("[")?;
                self.expect_sym("]")?;
                Ok(PiType::NoCap)
            }
            Tok::Ident(k) if k == "li" && next_is(self, "[") => {
                self.bump();
                Ok(PiType::LinIn(self.pi_list()?))
            }
            Tok::Ident(k) if k == "lo" && next_is(self, "[") => {
                self.bump();
                Ok(PiType::LinOut(self.pi_list()?))
            }
            Tok::Ident(k) if k == "l" && next_is(self, "#") => {
                self.bump();
                self.bump();
                Ok(PiType::LinConn(self.pi_list()?))
            }
            Tok::Sym("#") => {
                self.bump();
                Ok(PiType::Conn(self.pi_list()?))
            }
            Tok::Sym("<") => {
                self.bump();
                let arms = self.arms(">", |p| {
                    let l = p.ident("label")?;
                    p.expect_sym(":")?;
                    Ok((Label(l), p.pi_type()?))
                })?;
                Ok(PiType::Variant(Branches::new(arms)))
            }
            Tok::Ident(k) if k == "unit" => {
                self.bump();
                Ok(PiType::Unit)
            }
            Tok::Ident(k) if k == "rec" => {
                self.bump();
                let x = self.type_var()?;
                self.expect_sym(".")?;
                let body = self.with_rec(x.clone(), |p| p.pi_type())?;
                Ok(PiType::Rec(x, Box::new(body)))
            }
            Tok::Sym("~") => {
                self.bump();
                Ok(PiType::Var(TypeVar::dual(self.type_var()?)))
            }
            Tok::Sym("(") => {
                self.bump();
                let t = self.pi_type()?;
                self.expect_sym(")")?;
                Ok(t)
            }
            Tok::Ident(k) if !TYPE_KEYWORDS.contains(&k.as_str()) => {
                self.bump();
                if !self.rec_scope.contains(&k) {
                    if let Some(t) = self.pi_aliases.get(&k) {
                        return Ok(t.clone());
                    }
                }
                Ok(PiType::var(&k))
            }
            _ => self.fail(&["linear type"]),
        }
    }

    // ----- validation -----

    fn check_type<T: TypeSyntax>(&self, t: &T, span: SourceSpan) -> PResult<()> {
        let fv = t.free_type_vars();
        let message = if let Some(x) = fv.iter().next() {
            format!("unbound type variable `{x}`")
        } else if !t.is_guarded() {
            "unguarded recursion".to_string()
        } else if !t.well_formed() {
            "duplicate or missing labels, or a type variable used at the wrong kind".to_string()
        } else {
            return Ok(());
        };
        Err(ParseError { span, message, expected: vec![] })
    }

    fn checked_session_type(&mut self) -> PResult<SessionType> {
        let start = self.span();
        let t = self.session_type()?;
        self.check_type(&t, self.span_from(start))?;
        Ok(t)
    }

    fn checked_value_type(&mut self) -> PResult<Type> {
        let start = self.span();
        let t = self.value_type()?;
        self.check_type(&t, self.span_from(start))?;
        Ok(t)
    }

    fn checked_pi_type(&mut self) -> PResult<PiType> {
        let start = self.span();
        let t = self.pi_type()?;
        self.check_type(&t, self.span_from(start))?;
        Ok(t)
    }

    fn no_duplicate_arms<T>(&self, arms: &Branches<T>, start: SourceSpan) -> PResult<()> {
        if arms.has_duplicates() {
            Err(ParseError { span: self.span_from(start), message: "duplicate label".into(), expected: vec![] })
        } else {
            Ok(())
        }
    }

    // ----- session processes -----

    fn sproc(&mut self) -> PResult<SessionProcess> {
        let left = self.sprefix()?;
        if self.eat_sym("|") {
            Ok(SessionProcess::par(left, self.sproc()?))
        } else {
            Ok(left)
        }
    }

    fn sprefix(&mut self) -> PResult<SessionProcess> {
        let start = self.span();
        match self.peek().clone() {
            Tok::Num(n) if n == "0" => {
                self.bump();
                Ok(SessionProcess::Nil)
            }
            Tok::Sym("*") => {
                self.bump();
                Ok(SessionProcess::Repl(Box::new(self.sprefix()?)))
            }
            Tok::Sym("(") => {
                self.bump();
                if self.is_kw("new") {
                    self.bump();
                    let x = self.name()?;
                    let y = self.name()?;
                    self.expect_sym(":")?;
                    let annot = self.checked_session_type()?;
                    self.expect_sym(")")?;
                    Ok(SessionProcess::SessRes { x, y, annot, body: Box::new(self.sproc()?) })
                } else if self.is_kw("newc") {
                    self.bump();
                    let name = self.name()?;
                    self.expect_sym(":")?;
                    let annot = self.checked_value_type()?;
                    self.expect_sym(")")?;
                    Ok(SessionProcess::ChanRes { name, annot, body: Box::new(self.sproc()?) })
                } else {
                    let p = self.sproc()?;
                    self.expect_sym(")")?;
                    Ok(p)
                }
            }
            Tok::Ident(k) if k == "sel" => {
                self.bump();
                let subject = self.name()?;
                let label = Label(self.ident("label")?);
                self.expect_sym(".")?;
                Ok(SessionProcess::Selection { subject, label, cont: Box::new(self.sprefix()?) })
            }
            Tok::Ident(k) if k == "bra" => {
                self.bump();
                let subject = self.name()?;
                self.expect_sym("{")?;
                let arms = self.arms("}", |p| {
                    let l = p.ident("label")?;
                    p.expect_sym(":")?;
                    Ok((Label(l), p.sproc()?))
                })?;
                let arms = Branches::new(arms);
                self.no_duplicate_arms(&arms, start)?;
                Ok(SessionProcess::Branching { subject, arms })
            }
            Tok::Ident(_) => {
                let subject = self.name()?;
                if self.eat_sym("!") {
                    let payload = if self.eat_sym("(") {
                        self.expect_sym(")")?;
                        SessionValue::Unit
                    } else {
                        SessionValue::Var(self.name()?)
                    };
                    self.expect_sym(".")?;
                    Ok(SessionProcess::Output { subject, payload, cont: Box::new(self.sprefix()?) })
                } else if self.eat_sym("?") {
                    self.expect_sym("(")?;
                    let binder = self.name()?;
                    self.expect_sym(":")?;
                    let annot = self.checked_value_type()?;
                    self.expect_sym(")")?;
                    self.expect_sym(".")?;
                    Ok(SessionProcess::Input { subject, binder, annot, cont: Box::new(self.sprefix()?) })
                } else {
                    self.fail(&["`!`", "`?`"])
                }
            }
            _ => self.fail(&["process"]),
        }
    }

    // ----- π processes -----

    fn pvalue(&mut self) -> PResult<PiValue> {
        if self.eat_sym("(") {
            self.expect_sym(")")?;
            return Ok(PiValue::Unit);
        }
        let x = self.name()?;
        if self.eat_sym("(") {
            let v = self.pvalue()?;
            self.expect_sym(")")?;
            Ok(PiValue::Variant(Label(x), Box::new(v)))
        } else {
            Ok(PiValue::Var(x))
        }
    }

    fn pproc(&mut self) -> PResult<PiProcess> {
        let left = self.pprefix()?;
        if self.eat_sym("|") {
            Ok(PiProcess::par(left, self.pproc()?))
        } else {
            Ok(left)
        }
    }

    fn pprefix(&mut self) -> PResult<PiProcess> {
        let start = self.span();
        match self.peek().clone() {
            Tok::Num(n) if n == "0" => {
                self.bump();
                Ok(PiProcess::Nil)
            }
            Tok::Sym("*") => {
                self.bump();
                Ok(PiProcess::Repl(Box::new(self.pprefix()?)))
            }
            Tok::Sym("(") => {
                self.bump();
                if self.is_kw("new") {
                    self.bump();
                    let name = self.name()?;
                    self.expect_sym(":")?;
                    let annot = self.checked_pi_type()?;
                    self.expect_sym(")")?;
                    Ok(PiProcess::Res { name, annot, body: Box::new(self.pproc()?) })
                } else {
                    let p = self.pproc()?;
                    self.expect_sym(")")?;
                    Ok(p)
                }
            }
            Tok::Ident(k) if k == "case" => {
                self.bump();
                let scrutinee = self.pvalue()?;
                self.expect_kw("of")?;
                self.expect_sym("{")?;
                let arms = self.arms("}", |p| {
                    let l = p.ident("label")?;
                    p.expect_sym("(")?;
                    let b = p.name()?;
                    p.expect_sym(")")?;
                    p.expect_sym("=>")?;
                    Ok((Label(l), (b, p.pproc()?)))
                })?;
                let arms = Branches::new(arms);
                self.no_duplicate_arms(&arms, start)?;
                Ok(PiProcess::Case { scrutinee, arms })
            }
            Tok::Ident(_) => {
                let subject = self.name()?;
                if self.eat_sym("!") {
                    self.expect_sym("(")?;
                    let mut payloads = Vec::new();
                    if !self.eat_sym(")") {
                        loop {
                            payloads.push(self.pvalue()?);
                            if self.eat_sym(")") {
                                break;
                            }
                            if !self.eat_sym(",") {
                                return self.fail(&["`,`", "`)`"]);
                            }
                        }
                    }
                    self.expect_sym(".")?;
                    Ok(PiProcess::Output { subject, payloads, cont: Box::new(self.pprefix()?) })
                } else if self.eat_sym("?") {
                    self.expect_sym("(")?;
                    let mut binders = Vec::new();
                    if !self.eat_sym(")") {
                        loop {
                            binders.push(self.name()?);
                            if self.eat_sym(")") {
                                break;
                            }
                            if !self.eat_sym(",") {
                                return self.fail(&["`,`", "`)`"]);
                            }
                        }
                    }
                    self.expect_sym(".")?;
                    Ok(PiProcess::Input { subject, binders, cont: Box::new(self.pprefix()?) })
                } else {
                    self.fail(&["`!`", "`?`"])
                }
            }
            _ => self.fail(&["process"]),
        }
    }

    // ----- aliases -----

    fn aliases(&mut self, pi: bool) -> PResult<()> {
        while self.is_kw("type") {
            self.bump();
            let start = self.span();
            let name = self.type_var()?;
            if self.session_aliases.contains_key(&name) || self.pi_aliases.contains_key(&name) {
                return Err(ParseError { span: self.span_from(start), message: format!("alias `{name}` defined twice"), expected: vec![] });
            }
            self.expect_sym("=")?;
            if pi {
                let t = self.checked_pi_type()?;
                self.pi_aliases.insert(name, t);
            } else {
                let t = self.checked_value_type()?;
                self.session_aliases.insert(name, t);
            }
            self.eat_sym(";");
        }
        Ok(())
    }
}

fn run<T>(src: &str, f: impl FnOnce(&mut Parser) -> PResult<T>) -> PResult<T> {
    let mut p = Parser::new(src)?;
    let out = f(&mut p)?;
    p.finish()?;
    Ok(out)
}

pub fn parse_session_type(src: &str) -> Result<SessionType, ParseError> {
    run(src, |p| p.checked_session_type())
}

/// Parses a value type: a session type, `#T`, `unit`, or a recursive value type.
pub fn parse_type(src: &str) -> Result<Type, ParseError> {
    run(src, |p| p.checked_value_type())
}

pub fn parse_pi_type(src: &str) -> Result<PiType, ParseError> {
    run(src, |p| p.checked_pi_type())
}

/// Parses a session process, optionally preceded by `type NAME = T` aliases.
pub fn parse_session_process(src: &str) -> Result<SessionProcess, ParseError> {
    run(src, |p| {
        p.aliases(false)?;
        p.sproc()
    })
}

/// Parses a π process, optionally preceded by `type NAME = T` aliases.
pub fn parse_pi_process(src: &str) -> Result<PiProcess, ParseError> {
    run(src, |p| {
        p.aliases(true)?;
        p.pproc()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn session_type_examples() {
        assert_eq!(
            parse_session_type("rec X.+{l:X}").unwrap(),
            SessionType::rec("X", SessionType::select(vec![("l", SessionType::var("X"))]))
        );
        assert_eq!(parse_session_type("end").unwrap(), SessionType::End);
        assert_eq!(
            parse_session_type("!unit.?unit.end").unwrap(),
            SessionType::send(Type::Unit, SessionType::recv(Type::Unit, SessionType::End))
        );
    }

    #[test]
    fn session_process_examples() {
        let t = parse_session_type("rec X.+{l:X}").unwrap();
        let p = parse_session_process("*(a?(x: rec X.+{l:X}). sel x l. a!x. 0)").unwrap();
        let expected = SessionProcess::Repl(Box::new(SessionProcess::Input {
            subject: "a".into(),
            binder: "x".into(),
            annot: Type::Session(t),
            cont: Box::new(SessionProcess::Selection {
                subject: "x".into(),
                label: Label::new("l"),
                cont: Box::new(SessionProcess::Output {
                    subject: "a".into(),
                    payload: SessionValue::Var("x".into()),
                    cont: Box::new(SessionProcess::Nil),
                }),
            }),
        }));
        assert_eq!(p, expected);
        assert_eq!(parse_session_process("0").unwrap(), SessionProcess::Nil);
        assert_eq!(
            parse_session_process("(new x y: end) 0").unwrap(),
            SessionProcess::SessRes { x: "x".into(), y: "y".into(), annot: SessionType::End, body: Box::new(SessionProcess::Nil) }
        );
    }

    #[test]
    fn pi_type_examples() {
        assert_eq!(
            parse_pi_type("rec X. lo[<l: ~X>]").unwrap(),
            PiType::rec("X", PiType::LinOut(vec![PiType::variant(vec![("l", PiType::dual_var("X"))])]))
        );
        assert_eq!(parse_pi_type("empty[]").unwrap(), PiType::NoCap);
        assert_eq!(parse_pi_type("li[unit, empty[]]").unwrap(), PiType::LinIn(vec![PiType::Unit, PiType::NoCap]));
        assert_eq!(parse_pi_type("l#[unit]").unwrap(), PiType::LinConn(vec![PiType::Unit]));
    }

    #[test]
    fn pi_process_examples() {
        let p = parse_pi_process("x?(y). case y of { l(c) => b!(c).0 }").unwrap();
        let expected = PiProcess::Input {
            subject: "x".into(),
            binders: vec!["y".into()],
            cont: Box::new(PiProcess::Case {
                scrutinee: PiValue::Var("y".into()),
                arms: Branches::single(
                    Label::new("l"),
                    (
                        "c".into(),
                        PiProcess::Output { subject: "b".into(), payloads: vec![PiValue::Var("c".into())], cont: Box::new(PiProcess::Nil) },
                    ),
                ),
            }),
        };
        assert_eq!(p, expected);
        let q = parse_pi_process("(new c: l#[unit]) c!(()).0 | c?(z).0").unwrap();
        let PiProcess::Res { name, annot, body } = q else { panic!("expected restriction") };
        assert_eq!(name, "c");
        assert_eq!(annot, PiType::LinConn(vec![PiType::Unit]));
        assert!(matches!(*body, PiProcess::Par(..)));
    }

    #[test]
    fn rejects_bad_types() {
        assert!(parse_session_type("+{l:end, l:end}").is_err());
        assert!(parse_session_type("rec X.X").is_err());
        assert!(parse_session_type("!unit.X").is_err());
        assert!(parse_pi_type("<l:unit, l:unit>").is_err());
        assert!(parse_session_process("bra x {l: 0, l: 0}").is_err());
        assert!(parse_session_process("a?(x: Y).0").is_err());
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_session_type("!unit.\n  ?").unwrap_err();
        assert_eq!(e.span.line, 2);
        assert_eq!(e.span.column, 4);
        assert!(!e.expected.is_empty());
    }

    #[test]
    fn aliases_expand() {
        let src = "type T = rec X.+{l:X}\n-- a comment\n(newc a: #T) a?(x:T).0";
        let p = parse_session_process(src).unwrap();
        let SessionProcess::ChanRes { annot, .. } = p else { panic!() };
        assert_eq!(annot, Type::chan(Type::Session(parse_session_type("rec X.+{l:X}").unwrap())));
    }

    #[test]
    fn prefix_binds_tighter_than_par() {
        let p = parse_session_process("a!().0 | b!().0 | 0").unwrap();
        let SessionProcess::Par(l, r) = p else { panic!() };
        assert!(matches!(*l, SessionProcess::Output { .. }));
        assert!(matches!(*r, SessionProcess::Par(..)));
    }
}
