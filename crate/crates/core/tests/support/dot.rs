//! Recursive-descent checker for the Graphviz DOT language:
//!
//! ```text
//! graph     : [strict] (graph | digraph) [ID] '{' stmt_list '}'
//! stmt_list : [stmt [';'] stmt_list]
//! stmt      : node_stmt | edge_stmt | attr_stmt | ID '=' ID | subgraph
//! attr_stmt : (graph | node | edge) attr_list
//! attr_list : '[' [a_list] ']' [attr_list]
//! a_list    : ID '=' ID [';' | ','] [a_list]
//! edge_stmt : (node_id | subgraph) edgeRHS [attr_list]
//! edgeRHS   : edgeop (node_id | subgraph) [edgeRHS]
//! node_stmt : node_id [attr_list]
//! node_id   : ID [':' ID [':' ID]]
//! subgraph  : [subgraph [ID]] '{' stmt_list '}'
//! ```

use std::collections::BTreeSet;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Id(String),
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Eq,
    Semi,
    Comma,
    Colon,
    Arrow,
    Dash,
}

#[derive(Debug, Default)]
pub struct DotSummary {
    pub directed: bool,
    pub nodes: BTreeSet<String>,
    pub edges: Vec<(String, String)>,
}

fn lex(text: &str) -> Result<Vec<Tok>, String> {
    let cs: Vec<char> = text.chars().collect();
    let mut i = 0;
    let mut out = Vec::new();
    while i < cs.len() {
        let c = cs[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '/' if cs.get(i + 1) == Some(&'/') => {
                while i < cs.len() && cs[i] != '\n' {
                    i += 1;
                }
            }
            '/' if cs.get(i + 1) == Some(&'*') => {
                i += 2;
                while i + 1 < cs.len() && !(cs[i] == '*' && cs[i + 1] == '/') {
                    i += 1;
                }
                if i + 1 >= cs.len() {
                    return Err("unterminated comment".into());
                }
                i += 2;
            }
            '{' => (out.push(Tok::LBrace), i += 1).1,
            '}' => (out.push(Tok::RBrace), i += 1).1,
            '[' => (out.push(Tok::LBracket), i += 1).1,
            ']' => (out.push(Tok::RBracket), i += 1).1,
            '=' => (out.push(Tok::Eq), i += 1).1,
            ';' => (out.push(Tok::Semi), i += 1).1,
            ',' => (out.push(Tok::Comma), i += 1).1,
            ':' => (out.push(Tok::Colon), i += 1).1,
            '-' if cs.get(i + 1) == Some(&'>') => (out.push(Tok::Arrow), i += 2).1,
            '-' if cs.get(i + 1) == Some(&'-') => (out.push(Tok::Dash), i += 2).1,
            '"' => {
                let mut s = String::new();
                i += 1;
                loop {
                    match cs.get(i) {
                        None => return Err("unterminated string".into()),
                        Some('"') => break,
                        Some('\\') if cs.get(i + 1) == Some(&'"') => {
                            s.push('"');
                            i += 2;
                        }
                        Some(&ch) => {
                            s.push(ch);
                            i += 1;
                        }
                    }
                }
                i += 1;
                out.push(Tok::Id(s));
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i < cs.len() && (cs[i].is_alphanumeric() || cs[i] == '_') {
                    i += 1;
                }
                out.push(Tok::Id(cs[start..i].iter().collect()));
            }
            c if c.is_ascii_digit() || c == '.' || c == '-' => {
                let start = i;
                if c == '-' {
                    i += 1;
                }
                let mut seen_dot = false;
                let mut digits = 0;
                while i < cs.len() && (cs[i].is_ascii_digit() || (cs[i] == '.' && !seen_dot)) {
                    if cs[i] == '.' {
                        seen_dot = true;
                    } else {
                        digits += 1;
                    }
                    i += 1;
                }
                if digits == 0 {
                    return Err(format!("bad numeral at {start}"));
                }
                out.push(Tok::Id(cs[start..i].iter().collect()));
            }
            other => return Err(format!("unexpected character {other:?}")),
        }
    }
    Ok(out)
}

struct P {
    toks: Vec<Tok>,
    pos: usize,
    summary: DotSummary,
}

fn is_kw(t: &Tok, kw: &str) -> bool {
    matches!(t, Tok::Id(s) if s.eq_ignore_ascii_case(kw))
}

impl P {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok) -> Result<(), String> {
        if self.eat(&t) {
            Ok(())
        } else {
            Err(format!("expected {t:?} at token {}, found {:?}", self.pos, self.peek()))
        }
    }

    fn id(&mut self) -> Result<String, String> {
        match self.peek() {
            Some(Tok::Id(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            other => Err(format!("expected ID at token {}, found {other:?}", self.pos)),
        }
    }

    fn graph(&mut self) -> Result<(), String> {
        if self.peek().is_some_and(|t| is_kw(t, "strict")) {
            self.pos += 1;
        }
        match self.peek() {
            Some(t) if is_kw(t, "digraph") => self.summary.directed = true,
            Some(t) if is_kw(t, "graph") => self.summary.directed = false,
            other => return Err(format!("expected graph or digraph, found {other:?}")),
        }
        self.pos += 1;
        if matches!(self.peek(), Some(Tok::Id(_))) {
            self.pos += 1;
        }
        self.expect(Tok::LBrace)?;
        self.stmt_list()?;
        self.expect(Tok::RBrace)?;
        if self.pos != self.toks.len() {
            return Err("trailing tokens after graph".into());
        }
        Ok(())
    }

    fn stmt_list(&mut self) -> Result<(), String> {
        while !matches!(self.peek(), Some(Tok::RBrace) | None) {
            self.stmt()?;
            self.eat(&Tok::Semi);
        }
        Ok(())
    }

    fn attr_list(&mut self) -> Result<(), String> {
        while self.eat(&Tok::LBracket) {
            while !self.eat(&Tok::RBracket) {
                self.id()?;
                self.expect(Tok::Eq)?;
                self.id()?;
                if !self.eat(&Tok::Semi) {
                    self.eat(&Tok::Comma);
                }
            }
        }
        Ok(())
    }

    fn subgraph(&mut self) -> Result<(), String> {
        if self.peek().is_some_and(|t| is_kw(t, "subgraph")) {
            self.pos += 1;
            if matches!(self.peek(), Some(Tok::Id(_))) {
                self.pos += 1;
            }
        }
        self.expect(Tok::LBrace)?;
        self.stmt_list()?;
        self.expect(Tok::RBrace)
    }

    fn node_id(&mut self) -> Result<String, String> {
        let id = self.id()?;
        if self.eat(&Tok::Colon) {
            self.id()?;
            if self.eat(&Tok::Colon) {
                self.id()?;
            }
        }
        Ok(id)
    }

    fn stmt(&mut self) -> Result<(), String> {
        let t = self.peek().cloned().ok_or("unexpected end")?;
        if ["graph", "node", "edge"].iter().any(|k| is_kw(&t, k)) {
            self.pos += 1;
            if !matches!(self.peek(), Some(Tok::LBracket)) {
                return Err("attribute statement without attributes".into());
            }
            return self.attr_list();
        }
        if t == Tok::LBrace || is_kw(&t, "subgraph") {
            self.subgraph()?;
            return self.edge_rhs(None);
        }
        let first = self.node_id()?;
        if self.eat(&Tok::Eq) {
            self.id()?;
            return Ok(());
        }
        if matches!(self.peek(), Some(Tok::Arrow) | Some(Tok::Dash)) {
            return self.edge_rhs(Some(first));
        }
        self.summary.nodes.insert(first);
        self.attr_list()
    }

    fn edge_rhs(&mut self, mut from: Option<String>) -> Result<(), String> {
        while let Some(op) = self.peek().cloned() {
            let ok = match op {
                Tok::Arrow => self.summary.directed,
                Tok::Dash => !self.summary.directed,
                _ => break,
            };
            if !ok {
                return Err("edge operator does not match graph kind".into());
            }
            self.pos += 1;
            let to = if matches!(self.peek(), Some(Tok::LBrace)) || self.peek().is_some_and(|t| is_kw(t, "subgraph")) {
                self.subgraph()?;
                None
            } else {
                Some(self.node_id()?)
            };
            if let (Some(a), Some(b)) = (&from, &to) {
                self.summary.edges.push((a.clone(), b.clone()));
            }
            from = to;
        }
        self.attr_list()
    }
}

/// Parses `text` as DOT and returns the declared nodes and edges.
pub fn check_dot(text: &str) -> Result<DotSummary, String> {
    let toks = lex(text)?;
    let mut p = P { toks, pos: 0, summary: DotSummary::default() };
    p.graph()?;
    Ok(p.summary)
}
