//! Text formats for decision tables, policies, requests and formulas, and
//! the XACML-style combining algorithm for the knowledge meet.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{standard_registry, GeneratorWord, OpRegistry};
use crate::lattice::{knowledge_lattice, Decision};
use crate::nf_compiler::{compile, is_identifier, Basis, DecisionTable, Formula, TableError};
use crate::policy::{AttrValue, PolicyNode, Request, Target};

/// Width below which policies and formulas are emitted on one line.
pub const LINE_WIDTH: usize = 80;

/// A syntax or validation error at a 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    fn at(pos: Pos, message: impl Into<String>) -> Self {
        ParseError {
            line: pos.line,
            column: pos.column,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Pos {
    line: usize,
    column: usize,
}

// ---------------------------------------------------------------------------
// XACML adapter

/// Decisions as named in XACML-style policy sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum XacmlDecision {
    Permit,
    Deny,
    Conflict,
    NotApplicable,
}

impl XacmlDecision {
    pub const ALL: [XacmlDecision; 4] = [
        XacmlDecision::NotApplicable,
        XacmlDecision::Deny,
        XacmlDecision::Permit,
        XacmlDecision::Conflict,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            XacmlDecision::Permit => "Permit",
            XacmlDecision::Deny => "Deny",
            XacmlDecision::Conflict => "Conflict",
            XacmlDecision::NotApplicable => "NotApplicable",
        }
    }
}

impl From<Decision> for XacmlDecision {
    fn from(d: Decision) -> Self {
        match d {
            Decision::Bottom => XacmlDecision::NotApplicable,
            Decision::Deny => XacmlDecision::Deny,
            Decision::Allow => XacmlDecision::Permit,
            Decision::Conflict => XacmlDecision::Conflict,
        }
    }
}

impl From<XacmlDecision> for Decision {
    fn from(d: XacmlDecision) -> Self {
        match d {
            XacmlDecision::NotApplicable => Decision::Bottom,
            XacmlDecision::Deny => Decision::Deny,
            XacmlDecision::Permit => Decision::Allow,
            XacmlDecision::Conflict => Decision::Conflict,
        }
    }
}

impl fmt::Display for XacmlDecision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for XacmlDecision {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        XacmlDecision::ALL
            .into_iter()
            .find(|d| d.as_str() == s)
            .ok_or_else(|| format!("unknown XACML decision `{s}`"))
    }
}

/// The combining algorithm as a sequential scan over child decisions.
pub fn combine_kand(children: &[XacmlDecision]) -> XacmlDecision {
    let mut at_least_one_deny = false;
    let mut at_least_one_permit = false;
    for &decision in children {
        match decision {
            XacmlDecision::NotApplicable => return XacmlDecision::NotApplicable,
            XacmlDecision::Permit => at_least_one_permit = true,
            XacmlDecision::Deny => at_least_one_deny = true,
            XacmlDecision::Conflict => continue,
        }
    }
    if at_least_one_deny && at_least_one_permit {
        return XacmlDecision::NotApplicable;
    }
    if at_least_one_deny {
        return XacmlDecision::Deny;
    }
    if at_least_one_permit {
        return XacmlDecision::Permit;
    }
    XacmlDecision::Conflict
}

/// Left fold of the knowledge meet starting from ⊤.
pub fn combine_kand_fold(children: &[XacmlDecision]) -> XacmlDecision {
    let k = knowledge_lattice();
    let out = children
        .iter()
        .fold(Decision::Conflict.index(), |acc, &d| k.meet(acc, Decision::from(d).index()));
    Decision::ALL[out].into()
}

// ---------------------------------------------------------------------------
// Decision tables

struct Word<'a> {
    text: &'a str,
    column: usize,
}

fn split_words(line: &str) -> Vec<Word<'_>> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for (i, c) in line.char_indices().chain(std::iter::once((line.len(), ' '))) {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Word {
                    text: &line[s..i],
                    column: line[..s].chars().count() + 1,
                });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    out
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let code = l.split('#').next().unwrap_or("");
        (!code.trim().is_empty()).then_some((i + 1, code))
    })
}

fn decision_token(w: &Word<'_>, line: usize) -> Result<Decision, ParseError> {
    w.text.parse().map_err(|_| {
        ParseError::at(
            Pos { line, column: w.column },
            format!("unknown decision `{}` (expected bot, 0, 1 or top)", w.text),
        )
    })
}

/// Parses the line format: a header `a b c -> out` followed by rows
/// `1 0 bot -> top`. Blank lines and `#` comments are ignored.
pub fn parse_table(text: &str) -> Result<DecisionTable, ParseError> {
    let mut lines = content_lines(text);
    let (hline, header) = lines.next().ok_or_else(|| ParseError::at(Pos { line: 1, column: 1 }, "missing header line"))?;
    let words = split_words(header);
    let arrow = words
        .iter()
        .position(|w| w.text == "->")
        .ok_or_else(|| ParseError::at(Pos { line: hline, column: 1 }, "header needs `->` before the output name"))?;
    if arrow + 2 != words.len() {
        let col = words.get(arrow + 2).or(words.get(arrow)).map_or(1, |w| w.column);
        return Err(ParseError::at(Pos { line: hline, column: col }, "header needs exactly one output name after `->`"));
    }
    for w in &words {
        if w.text != "->" && !is_identifier(w.text) {
            return Err(ParseError::at(Pos { line: hline, column: w.column }, format!("invalid name `{}`", w.text)));
        }
    }
    let vars: Vec<String> = words[..arrow].iter().map(|w| w.text.to_string()).collect();
    let mut table = DecisionTable::new(vars, words[arrow + 1].text)
        .map_err(|e| ParseError::at(Pos { line: hline, column: 1 }, e.to_string()))?;
    let n = table.arity();
    let mut seen = HashSet::new();
    for (line, row) in lines {
        let words = split_words(row);
        let arrow = words
            .iter()
            .position(|w| w.text == "->")
            .ok_or_else(|| ParseError::at(Pos { line, column: 1 }, "row needs `->` before the output"))?;
        if arrow != n {
            return Err(ParseError::at(
                Pos { line, column: words[arrow].column },
                TableError::ArityMismatch { expected: n, found: arrow }.to_string(),
            ));
        }
        if words.len() != arrow + 2 {
            let col = words.get(arrow + 2).map_or(words[arrow].column, |w| w.column);
            return Err(ParseError::at(Pos { line, column: col }, "row needs exactly one output after `->`"));
        }
        let inputs = words[..arrow]
            .iter()
            .map(|w| decision_token(w, line))
            .collect::<Result<Vec<_>, _>>()?;
        let out = decision_token(&words[arrow + 1], line)?;
        if !seen.insert(inputs.clone()) {
            return Err(ParseError::at(
                Pos { line, column: words[0].column },
                TableError::DuplicateRow(inputs.iter().map(|d| d.token()).collect::<Vec<_>>().join(",")).to_string(),
            ));
        }
        table
            .insert(inputs, out)
            .map_err(|e| ParseError::at(Pos { line, column: 1 }, e.to_string()))?;
    }
    Ok(table)
}

/// Canonical text: header, then non-⊥ rows in canonical order.
pub fn emit_table(table: &DecisionTable) -> String {
    let mut out = format!("{} -> {}\n", table.variables().join(" "), table.output_name());
    for (inputs, d) in table.rows() {
        let ins: Vec<&str> = inputs.iter().map(|d| d.token()).collect();
        out.push_str(&format!("{} -> {}\n", ins.join(" "), d));
    }
    out
}

// ---------------------------------------------------------------------------
// S-expressions

#[derive(Debug, Clone)]
enum Sexp {
    Atom(String, Pos),
    Str(String, Pos),
    List(Vec<Sexp>, Pos),
}

impl Sexp {
    fn pos(&self) -> Pos {
        match self {
            Sexp::Atom(_, p) | Sexp::Str(_, p) | Sexp::List(_, p) => *p,
        }
    }

    fn text(&self) -> Option<&str> {
        match self {
            Sexp::Atom(s, _) | Sexp::Str(s, _) => Some(s),
            Sexp::List(..) => None,
        }
    }
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    pos: Pos,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            chars: text.chars().peekable(),
            pos: Pos { line: 1, column: 1 },
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.pos.line += 1;
            self.pos.column = 1;
        } else {
            self.pos.column += 1;
        }
        Some(c)
    }

    fn skip_space(&mut self) {
        while let Some(&c) = self.chars.peek() {
            if c == '#' {
                while self.chars.peek().is_some_and(|&c| c != '\n') {
                    self.bump();
                }
            } else if c.is_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn expr(&mut self) -> Result<Sexp, ParseError> {
        self.skip_space();
        let start = self.pos;
        match self.chars.peek().copied() {
            None => Err(ParseError::at(start, "unexpected end of input")),
            Some(')') => Err(ParseError::at(start, "unexpected `)`")),
            Some('(') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_space();
                    match self.chars.peek() {
                        None => return Err(ParseError::at(self.pos, "unexpected end of input: unclosed `(`")),
                        Some(')') => {
                            self.bump();
                            return Ok(Sexp::List(items, start));
                        }
                        Some(_) => items.push(self.expr()?),
                    }
                }
            }
            Some('"') => {
                self.bump();
                let mut s = String::new();
                loop {
                    match self.bump() {
                        None => return Err(ParseError::at(self.pos, "unexpected end of input: unterminated string")),
                        Some('"') => return Ok(Sexp::Str(s, start)),
                        Some('\\') => match self.bump() {
                            Some(c @ ('"' | '\\')) => s.push(c),
                            Some('n') => s.push('\n'),
                            _ => return Err(ParseError::at(self.pos, "invalid escape in string")),
                        },
                        Some(c) => s.push(c),
                    }
                }
            }
            Some(_) => {
                let mut s = String::new();
                while let Some(&c) = self.chars.peek() {
                    if c.is_whitespace() || matches!(c, '(' | ')' | '"' | '#') {
                        break;
                    }
                    s.push(c);
                    self.bump();
                }
                Ok(Sexp::Atom(s, start))
            }
        }
    }
}

fn parse_single(text: &str) -> Result<Sexp, ParseError> {
    let mut lx = Lexer::new(text);
    let e = lx.expr()?;
    lx.skip_space();
    if lx.chars.peek().is_some() {
        return Err(ParseError::at(lx.pos, "trailing input after expression"));
    }
    Ok(e)
}

fn is_plain_atom(s: &str) -> bool {
    !s.is_empty() && !s.chars().any(|c| c.is_whitespace() || matches!(c, '(' | ')' | '"' | '#' | '\\'))
}

fn quote(s: &str) -> String {
    let mut out = String::from("\"");
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn atom_or_quote(s: &str) -> String {
    if is_plain_atom(s) {
        s.to_string()
    } else {
        quote(s)
    }
}

/// Expects `(head arg...)` with exactly `n` arguments.
fn form(e: &Sexp, n: usize) -> Result<(&str, &[Sexp]), ParseError> {
    let Sexp::List(items, pos) = e else {
        return Err(ParseError::at(e.pos(), "expected a parenthesized form"));
    };
    let head = match items.first() {
        Some(Sexp::Atom(h, _)) => h.as_str(),
        Some(other) => return Err(ParseError::at(other.pos(), "expected a form name")),
        None => return Err(ParseError::at(*pos, "empty form")),
    };
    let args = &items[1..];
    if args.len() != n {
        return Err(ParseError::at(*pos, format!("`{head}` takes {n} argument(s), found {}", args.len())));
    }
    Ok((head, args))
}

fn head_of(e: &Sexp) -> Option<&str> {
    match e {
        Sexp::List(items, _) => match items.first() {
            Some(Sexp::Atom(h, _)) => Some(h),
            _ => None,
        },
        _ => None,
    }
}

fn word_of(e: &Sexp, registry: &OpRegistry) -> Result<GeneratorWord, ParseError> {
    let text = e.text().ok_or_else(|| ParseError::at(e.pos(), "expected a generator word such as \"conf,cyc\""))?;
    let word: GeneratorWord = text.parse().map_err(|err: crate::algebra::AlgebraError| ParseError::at(e.pos(), err.to_string()))?;
    for name in word.names() {
        registry
            .require_arity(name, 1)
            .map_err(|err| ParseError::at(e.pos(), err.to_string()))?;
    }
    Ok(word)
}

fn name_of(e: &Sexp) -> Result<&str, ParseError> {
    match e {
        Sexp::Atom(s, _) => Ok(s),
        _ => Err(ParseError::at(e.pos(), "expected a name")),
    }
}

// ---------------------------------------------------------------------------
// Policies

fn target_of(e: &Sexp) -> Result<Target, ParseError> {
    let Sexp::List(items, pos) = e else {
        return Err(ParseError::at(e.pos(), "expected (target ...)"));
    };
    if head_of(e) != Some("target") {
        return Err(ParseError::at(*pos, "expected (target ...)"));
    }
    let mut tests = Vec::new();
    for t in &items[1..] {
        let pair = match t {
            Sexp::List(kv, _) if kv.len() == 2 => (kv[0].text(), kv[1].text()),
            _ => (None, None),
        };
        match pair {
            (Some(k), Some(v)) => tests.push((k.to_string(), v.to_string())),
            _ => return Err(ParseError::at(t.pos(), "expected an attribute test (name value)")),
        }
    }
    Target::new(tests).map_err(|err| ParseError::at(*pos, err.to_string()))
}

fn policy_of(e: &Sexp, registry: &OpRegistry) -> Result<PolicyNode, ParseError> {
    let head = head_of(e).ok_or_else(|| ParseError::at(e.pos(), "expected a policy form"))?;
    match head {
        "atomic" => {
            let (_, a) = form(e, 2)?;
            let target = target_of(&a[0])?;
            let d: Decision = name_of(&a[1])?
                .parse()
                .map_err(|_| ParseError::at(a[1].pos(), "expected decision 0 or 1"))?;
            PolicyNode::atomic(target, d).map_err(|err| ParseError::at(a[1].pos(), err.to_string()))
        }
        "scope" => {
            let (_, a) = form(e, 2)?;
            Ok(PolicyNode::scoped(target_of(&a[0])?, policy_of(&a[1], registry)?))
        }
        "u" => {
            let (_, a) = form(e, 2)?;
            Ok(PolicyNode::unary(word_of(&a[0], registry)?, policy_of(&a[1], registry)?))
        }
        "op" => {
            let (_, a) = form(e, 3)?;
            let name = name_of(&a[0])?;
            registry
                .require_arity(name, 2)
                .map_err(|err| ParseError::at(a[0].pos(), err.to_string()))?;
            Ok(PolicyNode::binary(name, policy_of(&a[1], registry)?, policy_of(&a[2], registry)?))
        }
        "ref" => {
            let (_, a) = form(e, 1)?;
            let name = name_of(&a[0])?;
            if !is_identifier(name) {
                return Err(ParseError::at(a[0].pos(), format!("invalid reference name `{name}`")));
            }
            Ok(PolicyNode::reference(name))
        }
        other => Err(ParseError::at(
            e.pos(),
            format!("unknown policy form `{other}` (expected atomic, scope, u, op or ref)"),
        )),
    }
}

/// Parses a policy, checking operator names against `registry`.
pub fn parse_policy_with(text: &str, registry: &OpRegistry) -> Result<PolicyNode, ParseError> {
    policy_of(&parse_single(text)?, registry)
}

/// Parses a policy against the standard operator registry.
pub fn parse_policy(text: &str) -> Result<PolicyNode, ParseError> {
    parse_policy_with(text, &standard_registry())
}

fn emit_target(t: &Target) -> String {
    let mut s = String::from("(target");
    for (k, v) in t.tests() {
        s.push_str(&format!(" ({} {})", atom_or_quote(k), atom_or_quote(v)));
    }
    s.push(')');
    s
}

fn flat_policy(p: &PolicyNode) -> String {
    match p {
        PolicyNode::Atomic(t, d) => format!("(atomic {} {})", emit_target(t), d),
        PolicyNode::Scoped(t, c) => format!("(scope {} {})", emit_target(t), flat_policy(c)),
        PolicyNode::Unary(w, c) => format!("(u {} {})", quote(&w.to_string()), flat_policy(c)),
        PolicyNode::Binary(op, l, r) => format!("(op {} {} {})", op, flat_policy(l), flat_policy(r)),
        PolicyNode::Ref(n) => format!("(ref {n})"),
    }
}

fn pretty_policy(p: &PolicyNode, indent: usize, out: &mut String) {
    let flat = flat_policy(p);
    if indent + flat.len() <= LINE_WIDTH {
        out.push_str(&flat);
        return;
    }
    let pad = " ".repeat(indent + 2);
    let (head, children): (String, Vec<&PolicyNode>) = match p {
        PolicyNode::Atomic(..) | PolicyNode::Ref(_) => {
            out.push_str(&flat);
            return;
        }
        PolicyNode::Scoped(t, c) => (format!("(scope {}", emit_target(t)), vec![c]),
        PolicyNode::Unary(w, c) => (format!("(u {}", quote(&w.to_string())), vec![c]),
        PolicyNode::Binary(op, l, r) => (format!("(op {op}"), vec![l, r]),
    };
    out.push_str(&head);
    for c in children {
        out.push('\n');
        out.push_str(&pad);
        pretty_policy(c, indent + 2, out);
    }
    out.push(')');
}

/// Canonical text, one line when it fits in [`LINE_WIDTH`] columns and
/// indented by two spaces per level otherwise. Ends with a newline.
pub fn emit_policy(policy: &PolicyNode) -> String {
    let mut out = String::new();
    pretty_policy(policy, 0, &mut out);
    out.push('\n');
    out
}

// ---------------------------------------------------------------------------
// Requests

/// One `name=value` pair per line; `name=!` flags a retrieval error.
pub fn parse_request(text: &str) -> Result<Request, ParseError> {
    let mut q = Request::new();
    for (line, content) in content_lines(text) {
        let col = content.len() - content.trim_start().len() + 1;
        let pos = Pos { line, column: col };
        let (name, value) = content
            .split_once('=')
            .ok_or_else(|| ParseError::at(pos, "expected name=value"))?;
        add_attr(&mut q, name.trim(), value.trim(), pos)?;
    }
    Ok(q)
}

fn add_attr(q: &mut Request, name: &str, value: &str, pos: Pos) -> Result<(), ParseError> {
    let v = if value == "!" {
        AttrValue::Error
    } else {
        AttrValue::Value(value.to_string())
    };
    q.insert(name, v).map_err(|e| ParseError::at(pos, e.to_string()))
}

pub fn emit_request(request: &Request) -> String {
    request
        .iter()
        .map(|(k, v)| match v {
            AttrValue::Value(s) => format!("{k}={s}\n"),
            AttrValue::Error => format!("{k}=!\n"),
        })
        .collect()
}

/// Parses a serve-protocol line `NAME | a=b;c=d`.
pub fn parse_serve_line(line: &str) -> Result<(String, Request), ParseError> {
    let (name, attrs) = line
        .split_once('|')
        .ok_or_else(|| ParseError::at(Pos { line: 1, column: 1 }, "expected `POLICY | attr=value;...`"))?;
    let name = name.trim();
    if name.is_empty() {
        return Err(ParseError::at(Pos { line: 1, column: 1 }, "missing policy name"));
    }
    let mut q = Request::new();
    let mut offset = name.len() + 2;
    let attrs_start = line.find('|').map_or(0, |i| i + 1);
    offset = offset.max(attrs_start);
    for part in attrs.split(';') {
        let pos = Pos { line: 1, column: offset + 1 };
        offset += part.len() + 1;
        if part.trim().is_empty() {
            continue;
        }
        let (k, v) = part.split_once('=').ok_or_else(|| ParseError::at(pos, "expected name=value"))?;
        add_attr(&mut q, k.trim(), v.trim(), pos)?;
    }
    Ok((name.to_string(), q))
}

// ---------------------------------------------------------------------------
// Formulas

fn formula_of(e: &Sexp, names: &[String], registry: &OpRegistry) -> Result<Formula, ParseError> {
    let head = head_of(e).ok_or_else(|| ParseError::at(e.pos(), "expected a formula form"))?;
    match head {
        "join" | "meet" => {
            let Sexp::List(items, _) = e else { unreachable!() };
            let children = items[1..]
                .iter()
                .map(|c| formula_of(c, names, registry))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(if head == "join" {
                Formula::Join(children)
            } else {
                Formula::Meet(children)
            })
        }
        "u" => {
            let (_, a) = form(e, 2)?;
            Ok(Formula::Apply(word_of(&a[0], registry)?, Box::new(formula_of(&a[1], names, registry)?)))
        }
        "var" => {
            let (_, a) = form(e, 1)?;
            let name = name_of(&a[0])?;
            names
                .iter()
                .position(|n| n == name)
                .map(Formula::Var)
                .ok_or_else(|| ParseError::at(a[0].pos(), format!("unknown variable `{name}`")))
        }
        "const" => {
            let (_, a) = form(e, 1)?;
            name_of(&a[0])?
                .parse()
                .map(Formula::Const)
                .map_err(|_| ParseError::at(a[0].pos(), "expected bot, 0, 1 or top"))
        }
        other => Err(ParseError::at(
            e.pos(),
            format!("unknown formula form `{other}` (expected join, meet, u, var or const)"),
        )),
    }
}

/// Parses a formula whose variables are named by `names`.
pub fn parse_formula(text: &str, names: &[String]) -> Result<Formula, ParseError> {
    formula_of(&parse_single(text)?, names, &standard_registry())
}

fn var_name(names: &[String], i: usize) -> String {
    names.get(i).cloned().unwrap_or_else(|| format!("x{i}"))
}

fn flat_formula(f: &Formula, names: &[String]) -> String {
    match f {
        Formula::Var(i) => format!("(var {})", var_name(names, *i)),
        Formula::Const(d) => format!("(const {d})"),
        Formula::Apply(w, c) => format!("(u {} {})", quote(&w.to_string()), flat_formula(c, names)),
        Formula::Meet(cs) | Formula::Join(cs) => {
            let head = if matches!(f, Formula::Meet(_)) { "meet" } else { "join" };
            let mut s = format!("({head}");
            for c in cs {
                s.push(' ');
                s.push_str(&flat_formula(c, names));
            }
            s.push(')');
            s
        }
    }
}

fn pretty_formula(f: &Formula, names: &[String], indent: usize, out: &mut String) {
    let flat = flat_formula(f, names);
    match f {
        Formula::Meet(cs) | Formula::Join(cs) if indent + flat.len() > LINE_WIDTH => {
            let head = if matches!(f, Formula::Meet(_)) { "meet" } else { "join" };
            out.push('(');
            out.push_str(head);
            for c in cs {
                out.push('\n');
                out.push_str(&" ".repeat(indent + 2));
                pretty_formula(c, names, indent + 2, out);
            }
            out.push(')');
        }
        _ => out.push_str(&flat),
    }
}

/// Canonical formula text; variables without a name print as `x<i>`.
pub fn emit_formula(formula: &Formula, names: &[String]) -> String {
    let mut out = String::new();
    pretty_formula(formula, names, 0, &mut out);
    out.push('\n');
    out
}

// ---------------------------------------------------------------------------
// Formulas as policies

/// How a formula maps onto policy operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PolicyEncoding {
    /// Express joins through `conf` and `kand` only: A ⊕ B = conf(conf A ⊗ conf B).
    pub strict_basis: bool,
}

fn chain(op: &str, mut parts: Vec<PolicyNode>) -> PolicyNode {
    let first = parts.remove(0);
    parts.into_iter().fold(first, |acc, p| PolicyNode::binary(op, acc, p))
}

fn conf(p: PolicyNode) -> PolicyNode {
    PolicyNode::unary(GeneratorWord(vec!["conf".into()]), p)
}

fn bottom_policy() -> PolicyNode {
    PolicyNode::binary("kand", PolicyNode::decide(Decision::Deny), PolicyNode::decide(Decision::Allow))
}

fn join_policy(parts: Vec<PolicyNode>, enc: PolicyEncoding) -> PolicyNode {
    if parts.is_empty() {
        return bottom_policy();
    }
    if enc.strict_basis {
        let first = parts[0].clone();
        parts
            .into_iter()
            .skip(1)
            .fold(first, |acc, p| conf(PolicyNode::binary("kand", conf(acc), conf(p))))
    } else {
        chain("kor", parts)
    }
}

/// Rewrites a formula as a policy whose variables are sub-policy
/// references named by `names`.
pub fn formula_to_policy(formula: &Formula, names: &[String], enc: PolicyEncoding) -> PolicyNode {
    match formula {
        Formula::Var(i) => PolicyNode::reference(var_name(names, *i)),
        Formula::Const(Decision::Bottom) => bottom_policy(),
        Formula::Const(Decision::Conflict) => conf(bottom_policy()),
        Formula::Const(d) => PolicyNode::decide(*d),
        Formula::Apply(w, c) => PolicyNode::unary(w.clone(), formula_to_policy(c, names, enc)),
        Formula::Meet(cs) if cs.is_empty() => conf(bottom_policy()),
        Formula::Meet(cs) => chain("kand", cs.iter().map(|c| formula_to_policy(c, names, enc)).collect()),
        Formula::Join(cs) => join_policy(cs.iter().map(|c| formula_to_policy(c, names, enc)).collect(), enc),
    }
}

/// Compiles a table and wires the result over references to its input
/// columns.
pub fn compile_to_policy(table: &DecisionTable, basis: Basis, enc: PolicyEncoding) -> PolicyNode {
    formula_to_policy(&compile(table, basis), table.variables(), enc)
}
