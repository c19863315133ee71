use rust_decimal::Decimal;

use super::{ParseError, SourceSpan};

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Tok {
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    LParen,
    RParen,
    Comma,
    Colon,
    Equals,
    PlusMinus,
    Str(String),
    /// Parsed value plus the source lexeme.
    Num(Decimal, String),
    Word(String),
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::LBrace => "'{'".into(),
            Tok::RBrace => "'}'".into(),
            Tok::LBracket => "'['".into(),
            Tok::RBracket => "']'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Comma => "','".into(),
            Tok::Colon => "':'".into(),
            Tok::Equals => "'='".into(),
            Tok::PlusMinus => "'±'".into(),
            Tok::Str(s) => format!("string \"{s}\""),
            Tok::Num(_, raw) => format!("number {raw}"),
            Tok::Word(w) => format!("'{w}'"),
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
}

pub(crate) fn is_word_char(c: char) -> bool {
    !c.is_whitespace() && !matches!(c, '{' | '}' | '[' | ']' | '(' | ')' | ',' | ':' | '=' | '#' | '"' | '±')
}

/// `[+-]?digits(.digits)?`
pub(crate) fn looks_numeric(s: &str) -> bool {
    let body = s.strip_prefix(['+', '-']).unwrap_or(s);
    let (int, frac) = match body.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (body, None),
    };
    let digits = |p: &str| !p.is_empty() && p.bytes().all(|b| b.is_ascii_digit());
    digits(int) && frac.is_none_or(digits)
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl Cursor<'_> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }
}

/// Splits source text into tokens. Lexing continues past errors so the
/// parser can report as much as possible.
pub(crate) fn lex(text: &str) -> (Vec<Token>, Vec<ParseError>) {
    let mut cur = Cursor { chars: text.chars().peekable(), line: 1, column: 1 };
    let mut tokens = Vec::new();
    let mut errors = Vec::new();
    while let Some(c) = cur.peek() {
        let (line, column) = (cur.line, cur.column);
        let span = |len: usize| SourceSpan { line, column, length: len };
        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        if c == '#' {
            while cur.peek().is_some_and(|c| c != '\n') {
                cur.bump();
            }
            continue;
        }
        let single = match c {
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            ':' => Some(Tok::Colon),
            '=' => Some(Tok::Equals),
            '±' => Some(Tok::PlusMinus),
            _ => None,
        };
        if let Some(tok) = single {
            cur.bump();
            tokens.push(Token { tok, span: span(1) });
            continue;
        }
        if c == '"' {
            cur.bump();
            let mut s = String::new();
            let mut len = 1;
            let mut closed = false;
            while let Some(c) = cur.bump() {
                len += 1;
                match c {
                    '"' => {
                        closed = true;
                        break;
                    }
                    '\\' => {
                        let Some(e) = cur.bump() else { break };
                        len += 1;
                        match e {
                            'n' => s.push('\n'),
                            't' => s.push('\t'),
                            'r' => s.push('\r'),
                            '"' => s.push('"'),
                            '\\' => s.push('\\'),
                            other => {
                                errors.push(ParseError::new(
                                    "PARSE_BAD_ESCAPE",
                                    SourceSpan {
                                        line: cur.line,
                                        column: cur.column.saturating_sub(2).max(1),
                                        length: 2,
                                    },
                                    "one of \\n \\t \\r \\\" \\\\",
                                    format!("\\{other}"),
                                ));
                                s.push(other);
                            }
                        }
                    }
                    c => s.push(c),
                }
            }
            if !closed {
                errors.push(ParseError::new("PARSE_UNTERMINATED_STRING", span(len), "closing '\"'", "end of input"));
            }
            tokens.push(Token { tok: Tok::Str(s), span: span(len) });
            continue;
        }
        let mut word = String::new();
        while let Some(c) = cur.peek().filter(|&c| is_word_char(c)) {
            word.push(c);
            cur.bump();
        }
        let len = word.chars().count();
        let tok = if word == "+-" {
            Tok::PlusMinus
        } else if looks_numeric(&word) {
            let parsed = word.strip_prefix('+').unwrap_or(&word).parse::<Decimal>();
            match parsed {
                Ok(d) => Tok::Num(d, word),
                Err(_) => {
                    errors.push(ParseError::new("PARSE_BAD_NUMBER", span(len), "a number of at most 28 digits", &word));
                    Tok::Num(Decimal::ZERO, word)
                }
            }
        } else {
            Tok::Word(word)
        };
        tokens.push(Token { tok, span: span(len) });
    }
    (tokens, errors)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(text: &str) -> Vec<Tok> {
        let (tokens, errors) = lex(text);
        assert!(errors.is_empty(), "{errors:?}");
        tokens.into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn numbers_words_and_estimates() {
        let t = toks("amount: 2 ± 0.5 # note\nunit: \"%\"");
        assert_eq!(t[0], Tok::Word("amount".into()));
        assert_eq!(t[2], Tok::Num(Decimal::from(2), "2".into()));
        assert_eq!(t[3], Tok::PlusMinus);
        assert_eq!(t[4], Tok::Num(Decimal::new(5, 1), "0.5".into()));
        assert_eq!(t[7], Tok::Str("%".into()));
        assert_eq!(t.len(), 8);
    }

    #[test]
    fn numeric_shapes() {
        assert!(looks_numeric("-12.50") && looks_numeric("+3") && looks_numeric("0"));
        assert!(!looks_numeric("1.") && !looks_numeric(".5") && !looks_numeric("1e3") && !looks_numeric("obj1"));
    }

    #[test]
    fn spans_count_characters() {
        let (tokens, _) = lex("a\n  ± bb");
        let spans: Vec<(usize, usize, usize)> =
            tokens.iter().map(|t| (t.span.line, t.span.column, t.span.length)).collect();
        assert_eq!(spans, [(1, 1, 1), (2, 3, 1), (2, 5, 2)]);
    }

    #[test]
    fn unterminated_string_is_reported() {
        let (_, errors) = lex("focus: \"open");
        assert_eq!(errors.len(), 1);
        assert_eq!(errors[0].span.column, 8);
    }
}
