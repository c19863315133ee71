//! Block grammar: `kind id { key: value ... }`.

use rust_decimal::Decimal;
use serde::Serialize;

use super::lexer::{Tok, Token};
use super::{ParseError, SourceSpan};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockKind {
    Objective,
    Requirement,
    Softgoal,
    Belief,
    Function,
    Link,
    Utility,
    Weights,
    Scenario,
}

impl BlockKind {
    pub fn keyword(self) -> &'static str {
        match self {
            BlockKind::Objective => "objective",
            BlockKind::Requirement => "requirement",
            BlockKind::Softgoal => "softgoal",
            BlockKind::Belief => "belief",
            BlockKind::Function => "function",
            BlockKind::Link => "link",
            BlockKind::Utility => "utility",
            BlockKind::Weights => "weights",
            BlockKind::Scenario => "scenario",
        }
    }

    fn from_keyword(s: &str) -> Option<Self> {
        Some(match s {
            "objective" => BlockKind::Objective,
            "requirement" => BlockKind::Requirement,
            "softgoal" => BlockKind::Softgoal,
            "belief" => BlockKind::Belief,
            "function" => BlockKind::Function,
            "link" => BlockKind::Link,
            "utility" => BlockKind::Utility,
            "weights" => BlockKind::Weights,
            "scenario" => BlockKind::Scenario,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "type", content = "value")]
pub enum ValueKind {
    Str(String),
    Num(Decimal),
    Word(String),
    /// `point ± halfwidth`
    Estimate(Decimal, Decimal),
    /// `name(args)`, e.g. `cardinal(0.5)`.
    Call(String, Vec<Value>),
    List(Vec<Value>),
    Tuple(Vec<Value>),
    /// `key = value` inside a list.
    Pair(String, Box<Value>),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Value {
    pub kind: ValueKind,
    pub span: SourceSpan,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Entry {
    pub key: String,
    pub span: SourceSpan,
    pub value: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Block {
    pub kind: BlockKind,
    pub id: Option<String>,
    pub span: SourceSpan,
    pub entries: Vec<Entry>,
}

/// Parsed source before semantic lowering.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Document {
    pub blocks: Vec<Block>,
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    end: SourceSpan,
    errors: Vec<ParseError>,
}

type PResult<T> = Result<T, ParseError>;

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&'a Token> {
        self.tokens.get(self.pos)
    }

    fn peek_tok(&self) -> Option<&'a Tok> {
        self.peek().map(|t| &t.tok)
    }

    fn next(&mut self) -> Option<&'a Token> {
        let t = self.tokens.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn here(&self) -> SourceSpan {
        self.peek().map(|t| t.span).unwrap_or(self.end)
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        let found = self.peek().map(|t| t.tok.describe()).unwrap_or_else(|| "end of input".into());
        ParseError::new("PARSE_UNEXPECTED", self.here(), expected, found)
    }

    fn expect(&mut self, want: Tok, expected: &str) -> PResult<SourceSpan> {
        match self.peek() {
            Some(t) if t.tok == want => {
                self.pos += 1;
                Ok(t.span)
            }
            _ => Err(self.unexpected(expected)),
        }
    }

    fn document(&mut self) -> Document {
        let mut doc = Document::default();
        while let Some(t) = self.peek() {
            let kind = match &t.tok {
                Tok::Word(w) => BlockKind::from_keyword(w),
                _ => None,
            };
            let Some(kind) = kind else {
                let msg = match &t.tok {
                    Tok::Word(_) => ParseError::new(
                        "PARSE_UNKNOWN_BLOCK",
                        t.span,
                        "a block keyword (objective, requirement, softgoal, belief, function, link, utility, weights, scenario)",
                        t.tok.describe(),
                    ),
                    _ => self.unexpected("a block keyword"),
                };
                self.errors.push(msg);
                self.pos += 1;
                self.skip_block_body();
                continue;
            };
            self.pos += 1;
            match self.block(kind, t.span) {
                Ok(b) => doc.blocks.push(b),
                Err(e) => {
                    self.errors.push(e);
                    self.skip_block_body();
                }
            }
        }
        doc
    }

    /// Recovery: skip to just after the `}` closing the current block, or to
    /// the next block keyword at depth zero.
    fn skip_block_body(&mut self) {
        let mut depth = 0usize;
        let mut entered = false;
        while let Some(t) = self.peek() {
            match &t.tok {
                Tok::LBrace => {
                    depth += 1;
                    entered = true;
                }
                Tok::RBrace => {
                    self.pos += 1;
                    if depth <= 1 {
                        return;
                    }
                    depth -= 1;
                    continue;
                }
                Tok::Word(w) if depth == 0 && !entered && BlockKind::from_keyword(w).is_some() => return,
                _ => {}
            }
            self.pos += 1;
        }
    }

    fn block(&mut self, kind: BlockKind, kw_span: SourceSpan) -> PResult<Block> {
        let id = if kind == BlockKind::Weights {
            None
        } else {
            match self.peek_tok() {
                Some(Tok::Word(w)) => {
                    self.pos += 1;
                    Some(w.clone())
                }
                Some(Tok::Str(s)) => {
                    self.pos += 1;
                    Some(s.clone())
                }
                Some(Tok::Num(_, raw)) => {
                    self.pos += 1;
                    Some(raw.clone())
                }
                _ => return Err(self.unexpected(&format!("an id after '{}'", kind.keyword()))),
            }
        };
        self.expect(Tok::LBrace, "'{'")?;
        let mut entries = Vec::new();
        loop {
            match self.peek_tok() {
                Some(Tok::RBrace) => {
                    self.pos += 1;
                    break;
                }
                None => return Err(self.unexpected("'}'")),
                _ => entries.push(self.entry()?),
            }
        }
        Ok(Block { kind, id, span: kw_span, entries })
    }

    fn entry(&mut self) -> PResult<Entry> {
        let (key, span) = match self.peek() {
            Some(Token { tok: Tok::Word(w), span }) => (w.clone(), *span),
            Some(Token { tok: Tok::Str(s), span }) => (s.clone(), *span),
            _ => return Err(self.unexpected("a field name")),
        };
        self.pos += 1;
        match self.peek_tok() {
            Some(Tok::Colon) | Some(Tok::Equals) => self.pos += 1,
            _ => return Err(self.unexpected("':' or '='")),
        }
        let value = self.value()?;
        Ok(Entry { key, span, value })
    }

    fn value(&mut self) -> PResult<Value> {
        let atom = self.atom()?;
        if self.peek_tok() == Some(&Tok::PlusMinus) {
            let ValueKind::Num(point) = atom.kind else {
                return Err(ParseError::new("PARSE_BAD_VALUE", self.here(), "'±' after a number", "'±'"));
            };
            self.pos += 1;
            match self.next() {
                Some(Token { tok: Tok::Num(h, _), span }) => {
                    let span = atom.span.through(*span);
                    return Ok(Value { kind: ValueKind::Estimate(point, *h), span });
                }
                _ => {
                    self.pos -= 1;
                    return Err(self.unexpected("a halfwidth number after '±'"));
                }
            }
        }
        Ok(atom)
    }

    fn atom(&mut self) -> PResult<Value> {
        let Some(t) = self.peek() else {
            return Err(self.unexpected("a value"));
        };
        let start = t.span;
        match &t.tok {
            Tok::Str(s) => {
                self.pos += 1;
                Ok(Value { kind: ValueKind::Str(s.clone()), span: start })
            }
            Tok::Num(n, _) => {
                self.pos += 1;
                Ok(Value { kind: ValueKind::Num(*n), span: start })
            }
            Tok::Word(w) => {
                self.pos += 1;
                if self.peek_tok() == Some(&Tok::LParen) {
                    self.pos += 1;
                    let (args, end) = self.sequence(Tok::RParen, "')'")?;
                    return Ok(Value { kind: ValueKind::Call(w.clone(), args), span: start.through(end) });
                }
                Ok(Value { kind: ValueKind::Word(w.clone()), span: start })
            }
            Tok::LBracket => {
                self.pos += 1;
                let mut items = Vec::new();
                loop {
                    if let Some(Token { tok: Tok::RBracket, span }) = self.peek() {
                        self.pos += 1;
                        return Ok(Value { kind: ValueKind::List(items), span: start.through(*span) });
                    }
                    items.push(self.list_item()?);
                    match self.peek_tok() {
                        Some(Tok::Comma) => self.pos += 1,
                        Some(Tok::RBracket) => {}
                        _ => return Err(self.unexpected("',' or ']'")),
                    }
                }
            }
            Tok::LParen => {
                self.pos += 1;
                let (items, end) = self.sequence(Tok::RParen, "')'")?;
                Ok(Value { kind: ValueKind::Tuple(items), span: start.through(end) })
            }
            _ => Err(self.unexpected("a value")),
        }
    }

    fn list_item(&mut self) -> PResult<Value> {
        if let (Some(Token { tok: Tok::Word(w) | Tok::Str(w), span }), Some(Tok::Equals)) =
            (self.peek(), self.tokens.get(self.pos + 1).map(|t| &t.tok))
        {
            self.pos += 2;
            let v = self.value()?;
            let full = span.through(v.span);
            return Ok(Value { kind: ValueKind::Pair(w.clone(), Box::new(v)), span: full });
        }
        self.value()
    }

    /// Comma-separated values up to `close`.
    fn sequence(&mut self, close: Tok, expected: &str) -> PResult<(Vec<Value>, SourceSpan)> {
        let mut items = Vec::new();
        loop {
            if let Some(t) = self.peek() {
                if t.tok == close {
                    self.pos += 1;
                    return Ok((items, t.span));
                }
            }
            items.push(self.value()?);
            match self.peek_tok() {
                Some(Tok::Comma) => self.pos += 1,
                Some(t) if *t == close => {}
                _ => return Err(self.unexpected(&format!("',' or {expected}"))),
            }
        }
    }
}

pub(crate) fn parse_document(tokens: &[Token], end: SourceSpan) -> (Document, Vec<ParseError>) {
    let mut p = Parser { tokens, pos: 0, end, errors: Vec::new() };
    let doc = p.document();
    (doc, p.errors)
}
