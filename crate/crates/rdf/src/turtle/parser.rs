//! Recursive-descent reader for the supported Turtle subset.
//!
//! Accepted: `@prefix`/`PREFIX` directives, `<IRI>` refs (resolved against an
//! optional base), prefixed names, the `a` keyword, `;` and `,` lists,
//! `[ ... ]` property lists, `_:label` nodes, quoted strings with `@lang` or
//! `^^datatype`, and `#` comments. Blank nodes are relabelled `b0, b1, ...`
//! in order of first appearance.

use std::collections::HashMap;

use url::Url;

use crate::error::{Position, TermError, TurtleError, TurtleErrorKind};
use crate::graph::Graph;
use crate::prefix::PrefixMap;
use crate::term::{has_scheme, is_iri_char, BlankNode, Iri, Literal, Term};
use crate::triple::Triple;
use crate::vocab::RDF_TYPE;

const MAX_NESTING: usize = 128;

/// Parses a Turtle document into a graph plus the prefixes in scope at its end.
pub fn parse_turtle(document: &str, base: Option<&Iri>) -> Result<(Graph, PrefixMap), TurtleError> {
    let base = match base {
        Some(b) => Some(Url::parse(b.as_str()).map_err(|_| TurtleError {
            position: Position { line: 1, column: 1 },
            kind: TurtleErrorKind::NonAbsoluteIri(b.to_string()),
        })?),
        None => None,
    };
    let mut parser = Parser {
        src: document,
        pos: 0,
        base,
        prefixes: PrefixMap::new(),
        graph: Graph::new(),
        blank_labels: HashMap::new(),
        next_blank: 0,
        depth: 0,
    };
    parser.document()?;
    Ok((parser.graph, parser.prefixes))
}

/// Byte-level entry point: invalid UTF-8 is reported at the first bad byte.
pub fn parse_turtle_bytes(bytes: &[u8], base: Option<&Iri>) -> Result<(Graph, PrefixMap), TurtleError> {
    match std::str::from_utf8(bytes) {
        Ok(text) => parse_turtle(text, base),
        Err(e) => {
            let valid = std::str::from_utf8(&bytes[..e.valid_up_to()]).unwrap_or_default();
            Err(TurtleError {
                position: position_at(valid, valid.len()),
                kind: TurtleErrorKind::InvalidUtf8,
            })
        }
    }
}

fn position_at(src: &str, offset: usize) -> Position {
    let before = &src[..offset];
    let line = before.matches('\n').count() + 1;
    let line_start = before.rfind('\n').map_or(0, |i| i + 1);
    Position {
        line,
        column: before[line_start..].chars().count() + 1,
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    base: Option<Url>,
    prefixes: PrefixMap,
    graph: Graph,
    blank_labels: HashMap<String, BlankNode>,
    next_blank: usize,
    depth: usize,
}

type PResult<T> = Result<T, TurtleError>;

impl<'a> Parser<'a> {
    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn peek_second(&self) -> Option<char> {
        self.rest().chars().nth(1)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn error_at(&self, offset: usize, kind: TurtleErrorKind) -> TurtleError {
        TurtleError {
            position: position_at(self.src, offset),
            kind,
        }
    }

    fn unexpected(&self, expected: &str) -> TurtleError {
        self.error_at(
            self.pos,
            TurtleErrorKind::Syntax {
                expected: expected.to_owned(),
                found: self.describe_token(),
            },
        )
    }

    fn describe_token(&self) -> String {
        let rest = self.rest();
        match rest.chars().next() {
            None => "end of input".to_owned(),
            Some(c) if c.is_alphanumeric() || c == '_' => {
                let word: String = rest
                    .chars()
                    .take_while(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | ':'))
                    .take(40)
                    .collect();
                format!("{word:?}")
            }
            Some(c) => format!("{c:?}"),
        }
    }

    fn skip_ws(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('#') => {
                    let rest = self.rest();
                    self.pos += rest.find('\n').unwrap_or(rest.len());
                }
                _ => break,
            }
        }
    }

    fn expect(&mut self, c: char, what: &str) -> PResult<()> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(what))
        }
    }

    fn document(&mut self) -> PResult<()> {
        loop {
            self.skip_ws();
            if self.peek().is_none() {
                return Ok(());
            }
            self.statement()?;
        }
    }

    fn statement(&mut self) -> PResult<()> {
        if self.rest().starts_with("@prefix") {
            self.pos += "@prefix".len();
            self.prefix_body()?;
            return self.expect('.', "'.' after @prefix directive");
        }
        if self.at_sparql_prefix() {
            self.pos += "PREFIX".len();
            return self.prefix_body();
        }
        self.triples()?;
        self.expect('.', "'.' at end of statement")
    }

    fn at_sparql_prefix(&self) -> bool {
        let rest = self.rest();
        rest.get(..6).is_some_and(|kw| kw.eq_ignore_ascii_case("prefix"))
            && rest[6..].chars().next().is_some_and(char::is_whitespace)
    }

    fn prefix_body(&mut self) -> PResult<()> {
        self.skip_ws();
        let start = self.pos;
        let label = self.prefix_label();
        if self.peek() != Some(':') {
            self.pos = start;
            return Err(self.unexpected("prefix label followed by ':'"));
        }
        self.bump();
        self.skip_ws();
        let ns = self.iri_ref()?;
        self.prefixes
            .insert(label, ns)
            .map_err(|e| self.error_at(start, TurtleErrorKind::InvalidTerm(e)))
    }

    fn prefix_label(&mut self) -> String {
        let rest = self.rest();
        let mut chars = rest.char_indices();
        let len = match chars.next() {
            Some((_, c)) if c.is_ascii_alphabetic() => chars
                .find(|(_, c)| !(c.is_ascii_alphanumeric() || *c == '_' || *c == '-'))
                .map_or(rest.len(), |(i, _)| i),
            _ => 0,
        };
        self.pos += len;
        rest[..len].to_owned()
    }

    fn triples(&mut self) -> PResult<()> {
        self.skip_ws();
        if self.peek() == Some('[') {
            let subject = self.blank_property_list()?;
            self.skip_ws();
            if self.peek() != Some('.') {
                self.predicate_object_list(&subject)?;
            }
            return Ok(());
        }
        let subject = self.subject()?;
        self.predicate_object_list(&subject)
    }

    fn subject(&mut self) -> PResult<Term> {
        self.skip_ws();
        match self.peek() {
            Some('<') => Ok(Term::Iri(self.iri_ref()?)),
            Some('_') if self.peek_second() == Some(':') => self.labelled_blank(),
            Some(c) if c == ':' || c.is_ascii_alphabetic() => {
                let start = self.pos;
                match self.prefixed_name()? {
                    Some(iri) => Ok(Term::Iri(iri)),
                    None => {
                        self.pos = start;
                        Err(self.unexpected("subject"))
                    }
                }
            }
            _ => Err(self.unexpected("subject")),
        }
    }

    fn predicate_object_list(&mut self, subject: &Term) -> PResult<()> {
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
            if matches!(self.peek(), Some('.') | Some(']') | None) {
                return Ok(());
            }
        }
    }

    fn verb(&mut self) -> PResult<Iri> {
        self.skip_ws();
        let start = self.pos;
        if self.peek() == Some('a') {
            let after = self.peek_second();
            if after.is_none_or(|c| c.is_whitespace() || matches!(c, '<' | '[' | '"' | '_' | '#')) {
                self.bump();
                return Ok(Iri::new(RDF_TYPE).expect("rdf:type"));
            }
        }
        match self.peek() {
            Some('<') => self.iri_ref(),
            Some(c) if c == ':' || c.is_ascii_alphabetic() => match self.prefixed_name()? {
                Some(iri) => Ok(iri),
                None => {
                    self.pos = start;
                    Err(self.unexpected("predicate"))
                }
            },
            _ => Err(self.unexpected("predicate")),
        }
    }

    fn object_list(&mut self, subject: &Term, predicate: &Iri) -> PResult<()> {
        loop {
            let object = self.object()?;
            let triple = Triple::new(subject.clone(), predicate.clone(), object)
                .map_err(|e| self.error_at(self.pos, TurtleErrorKind::InvalidTerm(e)))?;
            self.graph.insert(triple);
            self.skip_ws();
            if self.peek() != Some(',') {
                return Ok(());
            }
            self.bump();
        }
    }

    fn object(&mut self) -> PResult<Term> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            Some('<') => Ok(Term::Iri(self.iri_ref()?)),
            Some('[') => self.blank_property_list(),
            Some('_') if self.peek_second() == Some(':') => self.labelled_blank(),
            Some('"') | Some('\'') => self.literal(),
            Some(c) if c == ':' || c.is_ascii_alphabetic() => match self.prefixed_name()? {
                Some(iri) => Ok(Term::Iri(iri)),
                None => {
                    self.pos = start;
                    Err(self.unexpected("object"))
                }
            },
            _ => Err(self.unexpected("object")),
        }
    }

    fn fresh_blank(&mut self) -> BlankNode {
        let node = BlankNode::new(format!("b{}", self.next_blank)).expect("generated label");
        self.next_blank += 1;
        node
    }

    fn labelled_blank(&mut self) -> PResult<Term> {
        self.pos += 2;
        let rest = self.rest();
        let len = rest
            .char_indices()
            .find(|(_, c)| !(c.is_ascii_alphanumeric() || *c == '_'))
            .map_or(rest.len(), |(i, _)| i);
        if len == 0 {
            return Err(self.unexpected("blank node label"));
        }
        let label = rest[..len].to_owned();
        self.pos += len;
        if let Some(node) = self.blank_labels.get(&label) {
            return Ok(Term::BlankNode(node.clone()));
        }
        let node = self.fresh_blank();
        self.blank_labels.insert(label, node.clone());
        Ok(Term::BlankNode(node))
    }

    fn blank_property_list(&mut self) -> PResult<Term> {
        let open = self.pos;
        self.bump(); // '['
        let node = Term::BlankNode(self.fresh_blank());
        self.skip_ws();
        if self.peek() == Some(']') {
            self.bump();
            return Ok(node);
        }
        self.depth += 1;
        if self.depth > MAX_NESTING {
            return Err(self.error_at(
                open,
                TurtleErrorKind::Syntax {
                    expected: format!("at most {MAX_NESTING} nested '['"),
                    found: "'['".to_owned(),
                },
            ));
        }
        self.predicate_object_list(&node)?;
        self.depth -= 1;
        self.expect(']', "']' closing blank node")?;
        Ok(node)
    }

    fn iri_ref(&mut self) -> PResult<Iri> {
        let start = self.pos;
        if self.peek() != Some('<') {
            return Err(self.unexpected("'<'"));
        }
        self.bump();
        let rest = self.rest();
        let Some(end) = rest.find('>') else {
            self.pos = start;
            return Err(self.unexpected("IRI closed by '>'"));
        };
        let raw = &rest[..end];
        if let Some((i, _)) = raw.char_indices().find(|(_, c)| !is_iri_char(*c)) {
            self.pos += i;
            return Err(self.unexpected("IRI character"));
        }
        self.pos += end + 1;
        self.resolve(raw, start)
    }

    fn resolve(&self, raw: &str, at: usize) -> PResult<Iri> {
        let absolute = if has_scheme(raw) {
            raw.to_owned()
        } else {
            match &self.base {
                Some(base) => base
                    .join(raw)
                    .map(String::from)
                    .map_err(|_| self.error_at(at, TurtleErrorKind::NonAbsoluteIri(raw.to_owned())))?,
                None => return Err(self.error_at(at, TurtleErrorKind::NonAbsoluteIri(raw.to_owned()))),
            }
        };
        Iri::new(absolute).map_err(|e| match e {
            TermError::RelativeIri(iri) => self.error_at(at, TurtleErrorKind::NonAbsoluteIri(iri)),
            other => self.error_at(at, TurtleErrorKind::InvalidTerm(other)),
        })
    }

    /// Reads `label:local`. Returns `None` (without consuming) if no `:` follows the label.
    fn prefixed_name(&mut self) -> PResult<Option<Iri>> {
        let start = self.pos;
        let label = self.prefix_label();
        if self.peek() != Some(':') {
            self.pos = start;
            return Ok(None);
        }
        self.bump();
        let rest = self.rest();
        let mut len = match rest.chars().next() {
            Some(c) if c.is_ascii_alphanumeric() || c == '_' => rest
                .char_indices()
                .find(|(_, c)| !(c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.')))
                .map_or(rest.len(), |(i, _)| i),
            _ => 0,
        };
        while len > 0 && rest.as_bytes()[len - 1] == b'.' {
            len -= 1;
        }
        let local = &rest[..len];
        self.pos += len;
        let Some(expanded) = self.prefixes.expand(&label, local) else {
            return Err(self.error_at(start, TurtleErrorKind::UndefinedPrefix(label)));
        };
        Iri::new(expanded)
            .map(Some)
            .map_err(|e| self.error_at(start, TurtleErrorKind::InvalidTerm(e)))
    }

    fn literal(&mut self) -> PResult<Term> {
        let start = self.pos;
        let quote = self.bump().expect("quote");
        let mut lexical = String::new();
        loop {
            match self.bump() {
                None | Some('\n') | Some('\r') => {
                    self.pos = start;
                    return Err(self.unexpected("closed string literal"));
                }
                Some(c) if c == quote => break,
                Some('\\') => {
                    let esc_at = self.pos - 1;
                    let c = match self.bump() {
                        Some('t') => '\t',
                        Some('b') => '\u{8}',
                        Some('n') => '\n',
                        Some('r') => '\r',
                        Some('f') => '\u{c}',
                        Some('"') => '"',
                        Some('\'') => '\'',
                        Some('\\') => '\\',
                        Some('u') => self.hex_escape(4, esc_at)?,
                        Some('U') => self.hex_escape(8, esc_at)?,
                        _ => {
                            self.pos = esc_at;
                            return Err(self.unexpected("valid string escape"));
                        }
                    };
                    lexical.push(c);
                }
                Some(c) => lexical.push(c),
            }
        }
        match self.peek() {
            Some('@') => {
                let tag_at = self.pos;
                self.bump();
                let rest = self.rest();
                let len = rest
                    .char_indices()
                    .find(|(_, c)| !(c.is_ascii_alphanumeric() || *c == '-'))
                    .map_or(rest.len(), |(i, _)| i);
                let tag = rest[..len].to_owned();
                self.pos += len;
                Literal::lang(lexical, tag)
                    .map(Term::Literal)
                    .map_err(|e| self.error_at(tag_at, TurtleErrorKind::InvalidTerm(e)))
            }
            Some('^') if self.peek_second() == Some('^') => {
                self.pos += 2;
                let dt_at = self.pos;
                let datatype = match self.peek() {
                    Some('<') => self.iri_ref()?,
                    _ => match self.prefixed_name()? {
                        Some(iri) => iri,
                        None => return Err(self.unexpected("datatype IRI")),
                    },
                };
                Literal::typed(lexical, datatype)
                    .map(Term::Literal)
                    .map_err(|e| self.error_at(dt_at, TurtleErrorKind::InvalidTerm(e)))
            }
            _ => Ok(Term::Literal(Literal::string(lexical))),
        }
    }

    fn hex_escape(&mut self, digits: usize, esc_at: usize) -> PResult<char> {
        let rest = self.rest();
        let hex = rest.get(..digits).filter(|h| h.chars().all(|c| c.is_ascii_hexdigit()));
        let decoded = hex
            .and_then(|h| u32::from_str_radix(h, 16).ok())
            .and_then(char::from_u32);
        match decoded {
            Some(c) => {
                self.pos += digits;
                Ok(c)
            }
            None => {
                self.pos = esc_at;
                Err(self.unexpected("valid unicode escape"))
            }
        }
    }
}
