//! Source locations.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Deref;

/// A region of a source file. Lines and columns are 1-based; `end_col` is
/// the column just past the last character of the region.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct SourceSpan {
    pub file: String,
    pub start_line: u32,
    pub start_col: u32,
    pub end_line: u32,
    pub end_col: u32,
}

impl SourceSpan {
    pub fn new(file: impl Into<String>, start: (u32, u32), end: (u32, u32)) -> Self {
        SourceSpan {
            file: file.into(),
            start_line: start.0,
            start_col: start.1,
            end_line: end.0,
            end_col: end.1,
        }
    }

    /// A zero-width span at the start of `file`.
    pub fn file_start(file: impl Into<String>) -> Self {
        Self::new(file, (1, 1), (1, 1))
    }

    /// Smallest span covering both `self` and `other`. Both must lie in the
    /// same file.
    pub fn to(&self, other: &SourceSpan) -> SourceSpan {
        SourceSpan {
            file: self.file.clone(),
            start_line: self.start_line,
            start_col: self.start_col,
            end_line: other.end_line,
            end_col: other.end_col,
        }
    }

    pub fn start(&self) -> (u32, u32) {
        (self.start_line, self.start_col)
    }

    pub fn end(&self) -> (u32, u32) {
        (self.end_line, self.end_col)
    }

    /// Ordering key used for diagnostics: file, then start position.
    pub fn sort_key(&self) -> (&str, u32, u32) {
        (&self.file, self.start_line, self.start_col)
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.start_line, self.start_col)
    }
}

impl PartialOrd for SourceSpan {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SourceSpan {
    fn cmp(&self, other: &Self) -> Ordering {
        (&self.file, self.start(), self.end()).cmp(&(&other.file, other.start(), other.end()))
    }
}

/// Location attached to a syntax or model node.
///
/// Node locations never take part in equality: two trees that differ only in
/// where they were written compare equal. Use [`NodeSpan::get`] when the
/// location itself matters.
#[derive(Debug, Clone, Default)]
pub struct NodeSpan(SourceSpan);

impl NodeSpan {
    pub fn new(span: SourceSpan) -> Self {
        NodeSpan(span)
    }

    pub fn get(&self) -> &SourceSpan {
        &self.0
    }
}

impl Deref for NodeSpan {
    type Target = SourceSpan;

    fn deref(&self) -> &SourceSpan {
        &self.0
    }
}

impl From<SourceSpan> for NodeSpan {
    fn from(span: SourceSpan) -> Self {
        NodeSpan(span)
    }
}

impl PartialEq for NodeSpan {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl Eq for NodeSpan {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn node_spans_are_ignored_by_equality() {
        let a = NodeSpan::new(SourceSpan::new("a.msad", (1, 1), (1, 4)));
        let b = NodeSpan::new(SourceSpan::new("b.msad", (9, 2), (9, 8)));
        assert_eq!(a, b);
        assert_ne!(a.get(), b.get());
    }

    #[test]
    fn span_union_and_display() {
        let a = SourceSpan::new("x.msas", (2, 3), (2, 7));
        let b = SourceSpan::new("x.msas", (4, 1), (4, 2));
        let u = a.to(&b);
        assert_eq!(u.start(), (2, 3));
        assert_eq!(u.end(), (4, 2));
        assert_eq!(u.to_string(), "x.msas:2:3");
    }
}
