//! Lossless tokenizer shared by the three modeling languages.

use std::fmt;

use thiserror::Error;

use crate::span::SourceSpan;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Ident,
    Keyword,
    StringLit,
    IntLit,
    Punct,
    Comment,
    Eof,
}

pub const KEYWORDS: &[&str] = &[
    "namespace",
    "import",
    "as",
    "structure",
    "list",
    "element",
    "functional",
    "infrastructure",
    "microservice",
    "interface",
    "operation",
    "not-implemented",
    "in",
    "out",
    "inout",
    "sync",
    "async",
    "initialized",
    "by",
    "contract",
    "provides",
    "requires",
    "technology",
    "service",
    "container",
    "protocol",
    "message-format",
    "load-balancer",
    "circuit-breaker",
    "artifact",
    "contracts",
    "endpoint",
    "format",
    "for",
    "environment",
    "instances",
    "deploys",
    "service-discovery",
    "api-gateway",
    "registers",
];

pub fn is_keyword(word: &str) -> bool {
    KEYWORDS.contains(&word)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    /// Exact source text of the token (string literals keep their quotes).
    pub text: String,
    pub span: SourceSpan,
    /// Byte offset of the token in the source.
    pub offset: usize,
}

impl Token {
    pub fn is(&self, kind: TokenKind, text: &str) -> bool {
        self.kind == kind && self.text == text
    }

    pub fn is_keyword(&self, text: &str) -> bool {
        self.is(TokenKind::Keyword, text)
    }

    pub fn is_punct(&self, text: &str) -> bool {
        self.is(TokenKind::Punct, text)
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            TokenKind::Eof => f.write_str("end of file"),
            TokenKind::Ident => write!(f, "identifier `{}`", self.text),
            TokenKind::Keyword => write!(f, "keyword `{}`", self.text),
            TokenKind::StringLit => write!(f, "string {}", self.text),
            TokenKind::IntLit => write!(f, "integer `{}`", self.text),
            TokenKind::Punct => write!(f, "`{}`", self.text),
            TokenKind::Comment => f.write_str("comment"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{span}: {message}")]
pub struct LexError {
    pub message: String,
    pub span: SourceSpan,
}

struct Cursor<'s> {
    src: &'s str,
    file: &'s str,
    pos: usize,
    line: u32,
    col: u32,
}

impl<'s> Cursor<'s> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.src[self.pos..].chars();
        it.next();
        it.next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn here(&self) -> (u32, u32) {
        (self.line, self.col)
    }

    fn span_from(&self, start: (u32, u32)) -> SourceSpan {
        SourceSpan::new(self.file, start, self.here())
    }
}

fn ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Tokenizes `source`, skipping over malformed input. Every returned token
/// is well formed; each problem is reported once in the error list. The
/// stream always ends with an `Eof` token.
pub fn lex(source: &str, file: &str) -> (Vec<Token>, Vec<LexError>) {
    let mut cur = Cursor {
        src: source,
        file,
        pos: 0,
        line: 1,
        col: 1,
    };
    let mut tokens = Vec::new();
    let mut errors = Vec::new();

    while let Some(c) = cur.peek() {
        let start = cur.here();
        let offset = cur.pos;
        let kind = if c.is_whitespace() {
            cur.bump();
            continue;
        } else if c == '/' && cur.peek2() == Some('/') {
            while cur.peek().is_some_and(|c| c != '\n') {
                cur.bump();
            }
            TokenKind::Comment
        } else if c == '/' && cur.peek2() == Some('*') {
            cur.bump();
            cur.bump();
            let mut closed = false;
            while let Some(c) = cur.bump() {
                if c == '*' && cur.peek() == Some('/') {
                    cur.bump();
                    closed = true;
                    break;
                }
            }
            if !closed {
                errors.push(LexError {
                    message: "unterminated block comment".into(),
                    span: cur.span_from(start),
                });
                continue;
            }
            TokenKind::Comment
        } else if c == '"' {
            cur.bump();
            let mut closed = false;
            while let Some(c) = cur.peek() {
                match c {
                    '\n' => break,
                    '"' => {
                        cur.bump();
                        closed = true;
                        break;
                    }
                    '\\' => {
                        cur.bump();
                        if cur.peek().is_some_and(|c| c != '\n') {
                            cur.bump();
                        }
                    }
                    _ => {
                        cur.bump();
                    }
                }
            }
            if !closed {
                errors.push(LexError {
                    message: "unterminated string literal".into(),
                    span: cur.span_from(start),
                });
                continue;
            }
            TokenKind::StringLit
        } else if c.is_ascii_digit() {
            while cur.peek().is_some_and(|c| c.is_ascii_digit()) {
                cur.bump();
            }
            TokenKind::IntLit
        } else if c.is_ascii_alphabetic() || c == '_' {
            cur.bump();
            loop {
                match cur.peek() {
                    Some(c) if ident_char(c) => {
                        cur.bump();
                    }
                    Some('-') if cur.peek2().is_some_and(ident_char) => {
                        cur.bump();
                    }
                    _ => break,
                }
            }
            if is_keyword(&source[offset..cur.pos]) {
                TokenKind::Keyword
            } else {
                TokenKind::Ident
            }
        } else if c == '.' && cur.peek2() == Some('.') {
            cur.bump();
            cur.bump();
            TokenKind::Punct
        } else if "{}():,.".contains(c) {
            cur.bump();
            TokenKind::Punct
        } else {
            cur.bump();
            errors.push(LexError {
                message: format!("illegal character `{}`", c.escape_debug()),
                span: cur.span_from(start),
            });
            continue;
        };
        tokens.push(Token {
            kind,
            text: source[offset..cur.pos].to_string(),
            span: cur.span_from(start),
            offset,
        });
    }
    let here = cur.here();
    tokens.push(Token {
        kind: TokenKind::Eof,
        text: String::new(),
        span: SourceSpan::new(file, here, here),
        offset: source.len(),
    });
    (tokens, errors)
}

/// Tokenizes `source`, failing on the first malformed token.
pub fn tokenize(source: &str, file: &str) -> Result<Vec<Token>, LexError> {
    let (tokens, mut errors) = lex(source, file);
    if errors.is_empty() {
        Ok(tokens)
    } else {
        Err(errors.remove(0))
    }
}

/// Decodes the body of a string literal token (quotes included).
pub fn unescape(literal: &str) -> String {
    let body = literal
        .strip_prefix('"')
        .and_then(|s| s.strip_suffix('"'))
        .unwrap_or(literal);
    let mut out = String::with_capacity(body.len());
    let mut chars = body.chars();
    while let Some(c) = chars.next() {
        if c == '\\' {
            match chars.next() {
                Some('n') => out.push('\n'),
                Some('t') => out.push('\t'),
                Some(other) => out.push(other),
                None => {}
            }
        } else {
            out.push(c);
        }
    }
    out
}

/// Inverse of [`unescape`]: a quoted literal for `value`.
pub fn escape(value: &str) -> String {
    let mut out = String::with_capacity(value.len() + 2);
    out.push('"');
    for c in value.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use TokenKind::*;

    fn kinds(src: &str) -> Vec<TokenKind> {
        tokenize(src, "t.msas")
            .unwrap()
            .iter()
            .map(|t| t.kind)
            .collect()
    }

    /// Checks that the tokens cover the source exactly, with only whitespace
    /// in between.
    fn reconstructs(src: &str, tokens: &[Token]) -> bool {
        let mut pos = 0;
        for t in tokens {
            if !src[pos..t.offset].chars().all(char::is_whitespace) {
                return false;
            }
            if src[t.offset..t.offset + t.text.len()] != t.text {
                return false;
            }
            pos = t.offset + t.text.len();
        }
        pos == src.len()
    }

    #[test]
    fn single_keyword() {
        let toks = tokenize("microservice", "t.msas").unwrap();
        assert_eq!(toks.len(), 2);
        assert_eq!(toks[0].kind, Keyword);
        assert_eq!(toks[1].kind, Eof);
    }

    #[test]
    fn parameter_tokens() {
        // Hand tokenization: in/sync keywords, `order` identifier, colon,
        // then `shop` `.` `Order`.
        assert_eq!(
            kinds("in sync order : shop.Order"),
            [Keyword, Keyword, Ident, Punct, Ident, Punct, Ident, Eof]
        );
    }

    #[test]
    fn unterminated_string_reports_column_one() {
        let err = tokenize("\"unterminated", "t.msao").unwrap_err();
        assert_eq!(err.span.start(), (1, 1));
        assert!(err.message.contains("unterminated string"));
    }

    #[test]
    fn unterminated_comment_and_illegal_char() {
        let (_, errs) = lex("a /* never closed", "t.msad");
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].span.start(), (1, 3));
        let (toks, errs) = lex("a $ b", "t.msad");
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].span.start(), (1, 3));
        assert_eq!(toks.len(), 3);
    }

    #[test]
    fn hyphenated_words_and_ranges() {
        let toks = tokenize("not-implemented java-spring 1..5 a-", "t.msao");
        assert!(toks.is_err(), "trailing hyphen is illegal");
        let toks = tokenize("not-implemented java-spring 1..5", "t.msao").unwrap();
        let got: Vec<_> = toks.iter().map(|t| (t.kind, t.text.as_str())).collect();
        assert_eq!(
            got,
            [
                (Keyword, "not-implemented"),
                (Ident, "java-spring"),
                (IntLit, "1"),
                (Punct, ".."),
                (IntLit, "5"),
                (Eof, ""),
            ]
        );
    }

    #[test]
    fn comments_are_tokens_with_spans() {
        let src = "// head\nnamespace a /* x\ny */ structure";
        let toks = tokenize(src, "t.msad").unwrap();
        assert_eq!(toks[0].kind, Comment);
        assert_eq!(toks[2].span.start(), (2, 11));
        assert_eq!(toks[3].kind, Comment);
        assert_eq!(toks[3].span.end(), (3, 5));
        assert_eq!(toks[4].span.start(), (3, 6));
        assert!(reconstructs(src, &toks));
    }

    #[test]
    fn string_escapes_round_trip() {
        for s in ["plain", "with \"quotes\"", "back\\slash", "tab\tnl\n"] {
            assert_eq!(unescape(&escape(s)), s);
            let toks = tokenize(&escape(s), "t.msao").unwrap();
            assert_eq!(toks[0].kind, StringLit);
        }
    }

    proptest! {
        #[test]
        fn lexing_is_lossless(src in "[a-z{}():,. \\n\"0-9/*-]{0,60}") {
            let (tokens, errors) = lex(&src, "p.msad");
            if errors.is_empty() {
                prop_assert!(reconstructs(&src, &tokens));
            }
        }

        #[test]
        fn lexing_never_panics(src in "\\PC{0,80}") {
            let (tokens, _) = lex(&src, "p.msad");
            prop_assert_eq!(tokens.last().map(|t| t.kind), Some(Eof));
        }
    }
}
