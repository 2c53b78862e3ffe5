//! A Turtle subset parser.
//!
//! Supported: `@prefix`/`@base` (and the `PREFIX`/`BASE` spellings), prefixed
//! names, `<IRI>` references, the `a` keyword, `;` and `,` lists, labelled
//! blank nodes (`_:x`), single-line string literals with language tags or
//! datatypes, numeric and boolean literals, and `#` comments.
//!
//! Blank-node property lists, collections and long (triple-quoted) strings
//! are rejected with an error rather than skipped.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

pub const RDF: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub const RDFS: &str = "http://www.w3.org/2000/01/rdf-schema#";
pub const OWL: &str = "http://www.w3.org/2002/07/owl#";
pub const XSD: &str = "http://www.w3.org/2001/XMLSchema#";
pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Resource {
    Iri(String),
    Blank(String),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub lexical: String,
    pub datatype: Option<String>,
    pub lang: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    Resource(Resource),
    Literal(Literal),
}

impl Node {
    pub fn iri(iri: impl Into<String>) -> Node {
        Node::Resource(Resource::Iri(iri.into()))
    }

    pub fn as_iri(&self) -> Option<&str> {
        match self {
            Node::Resource(Resource::Iri(i)) => Some(i),
            _ => None,
        }
    }
}

/// Subjects and predicates are identifiers by construction; only objects can
/// be literals.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub subject: Resource,
    pub predicate: String,
    pub object: Node,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TurtleErrorKind {
    Syntax(String),
    UndeclaredPrefix(String),
    UnterminatedLiteral,
    Unsupported(&'static str),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct TurtleError {
    pub line: usize,
    pub column: usize,
    pub kind: TurtleErrorKind,
}

impl fmt::Display for TurtleErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TurtleErrorKind::Syntax(m) => write!(f, "syntax error: {m}"),
            TurtleErrorKind::UndeclaredPrefix(p) => write!(f, "undeclared prefix `{p}:`"),
            TurtleErrorKind::UnterminatedLiteral => f.write_str("unterminated string literal"),
            TurtleErrorKind::Unsupported(what) => write!(f, "unsupported construct: {what}"),
        }
    }
}

pub fn parse_turtle(text: &str) -> Result<BTreeSet<Triple>, TurtleError> {
    let mut p = Parser::new(text);
    p.document()?;
    Ok(p.triples)
}

/// Canonical line-per-triple serialization (sorted, N-Triples syntax).
pub fn to_ntriples(triples: &BTreeSet<Triple>) -> String {
    let mut out = String::new();
    for t in triples {
        out.push_str(&resource_nt(&t.subject));
        out.push(' ');
        out.push('<');
        out.push_str(&t.predicate);
        out.push_str("> ");
        match &t.object {
            Node::Resource(r) => out.push_str(&resource_nt(r)),
            Node::Literal(l) => out.push_str(&literal_nt(l)),
        }
        out.push_str(" .\n");
    }
    out
}

fn resource_nt(r: &Resource) -> String {
    match r {
        Resource::Iri(i) => format!("<{i}>"),
        Resource::Blank(b) => format!("_:{b}"),
    }
}

pub(crate) fn escape_literal(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out
}

fn literal_nt(l: &Literal) -> String {
    let mut s = format!("\"{}\"", escape_literal(&l.lexical));
    if let Some(lang) = &l.lang {
        s.push('@');
        s.push_str(lang);
    } else if let Some(dt) = &l.datatype {
        s.push_str("^^<");
        s.push_str(dt);
        s.push('>');
    }
    s
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    col: usize,
    prefixes: HashMap<String, String>,
    base: Option<String>,
    triples: BTreeSet<Triple>,
}

type PResult<T> = Result<T, TurtleError>;

impl Parser {
    fn new(text: &str) -> Self {
        Parser {
            chars: text.chars().collect(),
            pos: 0,
            line: 1,
            col: 1,
            prefixes: HashMap::new(),
            base: None,
            triples: BTreeSet::new(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, offset: usize) -> Option<char> {
        self.chars.get(self.pos + offset).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.get(self.pos).copied()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn err_at(&self, line: usize, column: usize, kind: TurtleErrorKind) -> TurtleError {
        TurtleError { line, column, kind }
    }

    fn err(&self, kind: TurtleErrorKind) -> TurtleError {
        self.err_at(self.line, self.col, kind)
    }

    fn syntax(&self, msg: impl Into<String>) -> TurtleError {
        self.err(TurtleErrorKind::Syntax(msg.into()))
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '#' {
                while let Some(c) = self.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
            } else {
                break;
            }
        }
    }

    fn expect(&mut self, want: char) -> PResult<()> {
        self.skip_ws();
        match self.peek() {
            Some(c) if c == want => {
                self.bump();
                Ok(())
            }
            Some(c) => Err(self.syntax(format!("expected `{want}`, found `{c}`"))),
            None => Err(self.syntax(format!("expected `{want}`, found end of input"))),
        }
    }

    fn document(&mut self) -> PResult<()> {
        loop {
            self.skip_ws();
            let Some(c) = self.peek() else { return Ok(()) };
            if c == '@' {
                self.at_directive()?;
            } else if self.starts_keyword("PREFIX") || self.starts_keyword("BASE") {
                self.sparql_directive()?;
            } else {
                self.statement()?;
            }
        }
    }

    fn starts_keyword(&self, kw: &str) -> bool {
        let n = kw.len();
        let word: String = self.chars[self.pos..].iter().take(n).collect();
        word.eq_ignore_ascii_case(kw)
            && self.chars.get(self.pos + n).map_or(false, |c| c.is_whitespace())
    }

    fn at_directive(&mut self) -> PResult<()> {
        let (line, col) = (self.line, self.col);
        self.bump();
        let mut word = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_alphabetic() {
                word.push(c);
                self.bump();
            } else {
                break;
            }
        }
        match word.as_str() {
            "prefix" => self.prefix_body()?,
            "base" => self.base_body()?,
            other => {
                return Err(self.err_at(
                    line,
                    col,
                    TurtleErrorKind::Syntax(format!("unknown directive `@{other}`")),
                ))
            }
        }
        self.expect('.')
    }

    fn sparql_directive(&mut self) -> PResult<()> {
        if self.starts_keyword("PREFIX") {
            for _ in 0..6 {
                self.bump();
            }
            self.prefix_body()
        } else {
            for _ in 0..4 {
                self.bump();
            }
            self.base_body()
        }
    }

    fn prefix_body(&mut self) -> PResult<()> {
        self.skip_ws();
        let mut name = String::new();
        while let Some(c) = self.peek() {
            if c == ':' {
                break;
            }
            if c.is_alphanumeric() || c == '_' || c == '-' || c == '.' {
                name.push(c);
                self.bump();
            } else {
                return Err(self.syntax(format!("invalid character `{c}` in prefix name")));
            }
        }
        if self.peek() != Some(':') {
            return Err(self.syntax("expected `:` after prefix name"));
        }
        self.bump();
        self.skip_ws();
        let iri = self.iri_ref()?;
        self.prefixes.insert(name, iri);
        Ok(())
    }

    fn base_body(&mut self) -> PResult<()> {
        self.skip_ws();
        let iri = self.iri_ref()?;
        self.base = Some(iri);
        Ok(())
    }

    fn statement(&mut self) -> PResult<()> {
        let subject = self.subject()?;
        self.predicate_object_list(&subject)?;
        self.expect('.')
    }

    fn predicate_object_list(&mut self, subject: &Resource) -> PResult<()> {
        loop {
            let predicate = self.verb()?;
            self.object_list(subject, &predicate)?;
            self.skip_ws();
            if self.peek() != Some(';') {
                return Ok(());
            }
            while self.peek() == Some(';') {
                self.bump();
                self.skip_ws();
            }
            // A trailing `;` before the final `.` is allowed.
            if matches!(self.peek(), Some('.') | Some(']') | None) {
                return Ok(());
            }
        }
    }

    fn object_list(&mut self, subject: &Resource, predicate: &str) -> PResult<()> {
        loop {
            let object = self.object()?;
            self.triples.insert(Triple {
                subject: subject.clone(),
                predicate: predicate.to_string(),
                object,
            });
            self.skip_ws();
            if self.peek() == Some(',') {
                self.bump();
            } else {
                return Ok(());
            }
        }
    }

    fn unsupported_check(&self) -> PResult<()> {
        match self.peek() {
            Some('[') => Err(self.err(TurtleErrorKind::Unsupported("blank node property list"))),
            Some('(') => Err(self.err(TurtleErrorKind::Unsupported("collection"))),
            _ => Ok(()),
        }
    }

    fn subject(&mut self) -> PResult<Resource> {
        self.skip_ws();
        self.unsupported_check()?;
        match self.peek() {
            Some('<') => Ok(Resource::Iri(self.iri_ref()?)),
            Some('_') if self.peek_at(1) == Some(':') => self.blank(),
            Some('"') | Some('\'') => Err(self.syntax("a literal cannot be a subject")),
            Some(c) if c.is_ascii_digit() || c == '+' || c == '-' => {
                Err(self.syntax("a literal cannot be a subject"))
            }
            Some(_) => {
                let (line, col) = (self.line, self.col);
                match self.name_token()? {
                    NameToken::Iri(i) => Ok(Resource::Iri(i)),
                    NameToken::Keyword(k) => Err(self.err_at(
                        line,
                        col,
                        TurtleErrorKind::Syntax(format!("unexpected `{k}` in subject position")),
                    )),
                }
            }
            None => Err(self.syntax("expected a subject, found end of input")),
        }
    }

    fn verb(&mut self) -> PResult<String> {
        self.skip_ws();
        match self.peek() {
            Some('<') => self.iri_ref(),
            Some('"') | Some('\'') | Some('[') | Some('(') => {
                Err(self.syntax("predicates must be IRIs"))
            }
            Some('_') if self.peek_at(1) == Some(':') => {
                Err(self.syntax("predicates must be IRIs, not blank nodes"))
            }
            Some(c) if c.is_ascii_digit() => Err(self.syntax("predicates must be IRIs")),
            Some('.') | Some(';') | Some(',') => Err(self.syntax("expected a predicate")),
            Some(_) => {
                let (line, col) = (self.line, self.col);
                match self.name_token()? {
                    NameToken::Iri(i) => Ok(i),
                    NameToken::Keyword(k) if k == "a" => Ok(RDF_TYPE.to_string()),
                    NameToken::Keyword(k) => Err(self.err_at(
                        line,
                        col,
                        TurtleErrorKind::Syntax(format!("unexpected `{k}` in predicate position")),
                    )),
                }
            }
            None => Err(self.syntax("expected a predicate, found end of input")),
        }
    }

    fn object(&mut self) -> PResult<Node> {
        self.skip_ws();
        self.unsupported_check()?;
        match self.peek() {
            Some('<') => Ok(Node::iri(self.iri_ref()?)),
            Some('_') if self.peek_at(1) == Some(':') => Ok(Node::Resource(self.blank()?)),
            Some('"') | Some('\'') => self.string_literal(),
            Some(c) if c.is_ascii_digit() || c == '+' || c == '-' => self.numeric_literal(),
            Some('.') if self.peek_at(1).map_or(false, |c| c.is_ascii_digit()) => {
                self.numeric_literal()
            }
            Some('.') | Some(';') | Some(',') => Err(self.syntax("expected an object")),
            Some(_) => {
                let (line, col) = (self.line, self.col);
                match self.name_token()? {
                    NameToken::Iri(i) => Ok(Node::iri(i)),
                    NameToken::Keyword(k) if k == "true" || k == "false" => Ok(Node::Literal(Literal {
                        lexical: k,
                        datatype: Some(format!("{XSD}boolean")),
                        lang: None,
                    })),
                    NameToken::Keyword(k) => Err(self.err_at(
                        line,
                        col,
                        TurtleErrorKind::Syntax(format!("unexpected `{k}` in object position")),
                    )),
                }
            }
            None => Err(self.syntax("expected an object, found end of input")),
        }
    }

    fn blank(&mut self) -> PResult<Resource> {
        self.bump();
        self.bump();
        let mut label = String::new();
        while let Some(c) = self.peek() {
            if c.is_alphanumeric() || c == '_' || c == '-' {
                label.push(c);
                self.bump();
            } else {
                break;
            }
        }
        if label.is_empty() {
            return Err(self.syntax("empty blank node label"));
        }
        Ok(Resource::Blank(label))
    }

    fn iri_ref(&mut self) -> PResult<String> {
        if self.peek() != Some('<') {
            return Err(self.syntax("expected `<`"));
        }
        let (line, col) = (self.line, self.col);
        self.bump();
        let mut iri = String::new();
        loop {
            match self.peek() {
                Some('>') => {
                    self.bump();
                    break;
                }
                Some(c) if c.is_whitespace() || matches!(c, '<' | '"' | '{' | '}' | '|' | '^' | '`' | '\\') => {
                    return Err(self.syntax(format!("invalid character `{}` in IRI", c.escape_default())));
                }
                Some(c) => {
                    iri.push(c);
                    self.bump();
                }
                None => {
                    return Err(self.err_at(line, col, TurtleErrorKind::Syntax("unterminated IRI".into())))
                }
            }
        }
        Ok(self.resolve(&iri))
    }

    fn resolve(&self, iri: &str) -> String {
        let has_scheme = iri
            .find(':')
            .map_or(false, |i| i > 0 && iri[..i].chars().all(|c| c.is_ascii_alphanumeric() || "+-.".contains(c)));
        let Some(base) = self.base.as_deref() else { return iri.to_string() };
        if has_scheme {
            return iri.to_string();
        }
        if iri.is_empty() {
            return base.to_string();
        }
        if iri.starts_with('#') {
            let stem = base.split('#').next().unwrap_or(base);
            return format!("{stem}{iri}");
        }
        if iri.starts_with('/') {
            if let Some(scheme_end) = base.find("://") {
                let after = &base[scheme_end + 3..];
                let auth_end = after.find('/').map_or(base.len(), |i| scheme_end + 3 + i);
                return format!("{}{iri}", &base[..auth_end]);
            }
        }
        let stem = match base.rfind('/') {
            Some(i) => &base[..=i],
            None => base,
        };
        format!("{stem}{iri}")
    }

    fn name_token(&mut self) -> PResult<NameToken> {
        let (line, col) = (self.line, self.col);
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_alphanumeric() || matches!(c, '_' | '-' | '.' | ':' | '%') {
                self.bump();
            } else {
                break;
            }
        }
        // A trailing dot terminates the statement, it is not part of the name.
        while self.pos > start && self.chars[self.pos - 1] == '.' {
            self.pos -= 1;
            self.col -= 1;
        }
        let token: String = self.chars[start..self.pos].iter().collect();
        if token.is_empty() {
            let c = self.peek().unwrap_or(' ');
            return Err(self.syntax(format!("unexpected character `{c}`")));
        }
        let Some(colon) = token.find(':') else {
            return Ok(NameToken::Keyword(token));
        };
        let (prefix, local) = (&token[..colon], &token[colon + 1..]);
        match self.prefixes.get(prefix) {
            Some(ns) => Ok(NameToken::Iri(format!("{ns}{local}"))),
            None => Err(self.err_at(line, col, TurtleErrorKind::UndeclaredPrefix(prefix.to_string()))),
        }
    }

    fn string_literal(&mut self) -> PResult<Node> {
        let (line, col) = (self.line, self.col);
        let quote = self.bump().unwrap_or('"');
        if self.peek() == Some(quote) && self.peek_at(1) == Some(quote) {
            return Err(self.err_at(line, col, TurtleErrorKind::Unsupported("multiline literal")));
        }
        let mut lexical = String::new();
        loop {
            match self.peek() {
                None | Some('\n') | Some('\r') => {
                    return Err(self.err_at(line, col, TurtleErrorKind::UnterminatedLiteral))
                }
                Some(c) if c == quote => {
                    self.bump();
                    break;
                }
                Some('\\') => {
                    self.bump();
                    lexical.push(self.escape()?);
                }
                Some(c) => {
                    lexical.push(c);
                    self.bump();
                }
            }
        }
        let mut lit = Literal { lexical, datatype: None, lang: None };
        match self.peek() {
            Some('@') => {
                self.bump();
                let mut tag = String::new();
                while let Some(c) = self.peek() {
                    if c.is_ascii_alphanumeric() || c == '-' {
                        tag.push(c);
                        self.bump();
                    } else {
                        break;
                    }
                }
                if tag.is_empty() || !tag.starts_with(|c: char| c.is_ascii_alphabetic()) {
                    return Err(self.syntax("malformed language tag"));
                }
                lit.lang = Some(tag.to_ascii_lowercase());
            }
            Some('^') => {
                self.bump();
                if self.peek() != Some('^') {
                    return Err(self.syntax("expected `^^` before datatype"));
                }
                self.bump();
                let dt = if self.peek() == Some('<') {
                    self.iri_ref()?
                } else {
                    match self.name_token()? {
                        NameToken::Iri(i) => i,
                        NameToken::Keyword(k) => {
                            return Err(self.syntax(format!("datatype must be an IRI, found `{k}`")))
                        }
                    }
                };
                lit.datatype = Some(dt);
            }
            _ => {}
        }
        Ok(Node::Literal(lit))
    }

    fn escape(&mut self) -> PResult<char> {
        let c = self.bump().ok_or_else(|| self.err(TurtleErrorKind::UnterminatedLiteral))?;
        Ok(match c {
            't' => '\t',
            'b' => '\u{8}',
            'n' => '\n',
            'r' => '\r',
            'f' => '\u{c}',
            '"' => '"',
            '\'' => '\'',
            '\\' => '\\',
            'u' | 'U' => {
                let n = if c == 'u' { 4 } else { 8 };
                let mut hex = String::new();
                for _ in 0..n {
                    match self.bump() {
                        Some(h) if h.is_ascii_hexdigit() => hex.push(h),
                        _ => return Err(self.syntax("malformed unicode escape")),
                    }
                }
                u32::from_str_radix(&hex, 16)
                    .ok()
                    .and_then(char::from_u32)
                    .ok_or_else(|| self.syntax("invalid unicode code point"))?
            }
            other => return Err(self.syntax(format!("invalid escape `\\{other}`"))),
        })
    }

    fn numeric_literal(&mut self) -> PResult<Node> {
        let mut s = String::new();
        if let Some(c @ ('+' | '-')) = self.peek() {
            s.push(c);
            self.bump();
        }
        let mut digits = 0;
        while let Some(c) = self.peek().filter(|c| c.is_ascii_digit()) {
            s.push(c);
            self.bump();
            digits += 1;
        }
        let mut kind = "integer";
        if self.peek() == Some('.') && self.peek_at(1).map_or(false, |c| c.is_ascii_digit()) {
            kind = "decimal";
            s.push('.');
            self.bump();
            while let Some(c) = self.peek().filter(|c| c.is_ascii_digit()) {
                s.push(c);
                self.bump();
                digits += 1;
            }
        }
        if digits == 0 {
            return Err(self.syntax("malformed number"));
        }
        if let Some(e @ ('e' | 'E')) = self.peek() {
            kind = "double";
            s.push(e);
            self.bump();
            if let Some(c @ ('+' | '-')) = self.peek() {
                s.push(c);
                self.bump();
            }
            let mut exp_digits = 0;
            while let Some(c) = self.peek().filter(|c| c.is_ascii_digit()) {
                s.push(c);
                self.bump();
                exp_digits += 1;
            }
            if exp_digits == 0 {
                return Err(self.syntax("malformed exponent"));
            }
        }
        if let Some(c) = self.peek().filter(|c| c.is_alphabetic() || *c == '_') {
            return Err(self.syntax(format!("unexpected `{c}` after number")));
        }
        Ok(Node::Literal(Literal {
            lexical: s,
            datatype: Some(format!("{XSD}{kind}")),
            lang: None,
        }))
    }
}

enum NameToken {
    Iri(String),
    Keyword(String),
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one(text: &str) -> Triple {
        let t = parse_turtle(text).unwrap();
        assert_eq!(t.len(), 1, "{t:?}");
        t.into_iter().next().unwrap()
    }

    #[test]
    fn minimal_document() {
        let t = one("@prefix ex: <http://x/> . ex:a a ex:B .");
        assert_eq!(t.subject, Resource::Iri("http://x/a".into()));
        assert_eq!(t.predicate, RDF_TYPE);
        assert_eq!(t.object, Node::iri("http://x/B"));
    }

    #[test]
    fn undeclared_prefix_names_the_prefix() {
        let err = parse_turtle("@prefix ex: <http://x/> .\nfoo:a a ex:B .").unwrap_err();
        assert_eq!(err.kind, TurtleErrorKind::UndeclaredPrefix("foo".into()));
        assert_eq!((err.line, err.column), (2, 1));
    }

    #[test]
    fn label_literal_is_verbatim() {
        let doc = r#"
@prefix brick: <https://brickschema.org/schema/Brick#> .
@prefix owl: <http://www.w3.org/2002/07/owl#> .
@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .
brick:Zone_Air_Temperature_Setpoint a owl:Class ;
    rdfs:label "Zone Air Temperature Setpoint"@en .
"#;
        let t = parse_turtle(doc).unwrap();
        assert_eq!(t.len(), 2);
        let label = t.iter().find(|t| t.predicate.ends_with("label")).unwrap();
        assert_eq!(
            label.object,
            Node::Literal(Literal {
                lexical: "Zone Air Temperature Setpoint".into(),
                datatype: None,
                lang: Some("en".into()),
            })
        );
    }

    #[test]
    fn lists_and_literals() {
        let doc = r#"@prefix ex: <http://x/> .
@prefix xsd: <http://www.w3.org/2001/XMLSchema#> .
ex:s ex:p ex:o1, ex:o2 ; ex:q 42, -1.5, 2e3, true ;
  ex:r "a\"b\n"^^xsd:string ; .
"#;
        let t = parse_turtle(doc).unwrap();
        assert_eq!(t.len(), 7);
        assert!(t.iter().any(|t| matches!(&t.object, Node::Literal(l) if l.lexical == "a\"b\n")));
        assert!(t.iter().any(|t| matches!(&t.object, Node::Literal(l) if l.lexical == "-1.5" && l.datatype.as_deref() == Some("http://www.w3.org/2001/XMLSchema#decimal"))));
    }

    #[test]
    fn base_resolution() {
        let doc = "@base <http://x/dir/doc> .\n<a> <#p> </root> .";
        let t = one(doc);
        assert_eq!(t.subject, Resource::Iri("http://x/dir/a".into()));
        assert_eq!(t.predicate, "http://x/dir/doc#p");
        assert_eq!(t.object, Node::iri("http://x/root"));
    }

    #[test]
    fn sparql_style_prefix() {
        let t = one("PREFIX ex: <http://x/>\nex:a ex:b ex:c .");
        assert_eq!(t.object, Node::iri("http://x/c"));
    }

    #[test]
    fn local_names_may_contain_dots() {
        let t = one("@prefix ex: <http://x/> . ex:a.b ex:p ex:c.");
        assert_eq!(t.subject, Resource::Iri("http://x/a.b".into()));
        assert_eq!(t.object, Node::iri("http://x/c"));
    }

    #[test]
    fn rejected_constructs() {
        let cases = [
            ("@prefix ex: <http://x/> . ex:a ex:p [ ex:q ex:r ] .", TurtleErrorKind::Unsupported("blank node property list")),
            ("@prefix ex: <http://x/> . ex:a ex:p ( ex:b ) .", TurtleErrorKind::Unsupported("collection")),
            ("@prefix ex: <http://x/> . ex:a ex:p \"\"\"x\"\"\" .", TurtleErrorKind::Unsupported("multiline literal")),
            ("@prefix ex: <http://x/> . ex:a ex:p \"open\n .", TurtleErrorKind::UnterminatedLiteral),
        ];
        for (doc, kind) in cases {
            assert_eq!(parse_turtle(doc).unwrap_err().kind, kind, "{doc}");
        }
    }

    #[test]
    fn ntriples_roundtrip() {
        let doc = r#"@prefix ex: <http://x/> .
ex:s ex:p "tab\there"@en-gb, "3"^^ex:int, _:b1 .
_:b1 ex:q ex:o .
"#;
        let t = parse_turtle(doc).unwrap();
        let again = parse_turtle(&to_ntriples(&t)).unwrap();
        assert_eq!(t, again);
    }
}
