//! Concrete syntax of the three viewpoint languages.

pub mod ast;
mod format;
mod lexer;
mod parser;

pub use ast::{ParseUnit, Viewpoint};
pub use format::format;
pub use lexer::{
    escape, is_keyword, lex, tokenize, unescape, LexError, Token, TokenKind, KEYWORDS,
};
pub use parser::{
    parse_data, parse_file, parse_operation, parse_service, parse_source, parse_tokens,
};
