use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Returns true if `s` is a valid identifier: a letter or underscore followed
/// by letters, digits and underscores, optionally joined by single interior
/// hyphens (`java-spring`).
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    let mut prev_hyphen = false;
    for c in chars {
        if c == '-' {
            if prev_hyphen {
                return false;
            }
            prev_hyphen = true;
        } else if c.is_ascii_alphanumeric() || c == '_' {
            prev_hyphen = false;
        } else {
            return false;
        }
    }
    !prev_hyphen
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid qualified name `{0}`")]
pub struct InvalidName(pub String);

/// A dot-separated, non-empty sequence of identifiers. Namespaces are plain
/// prefixes of qualified names.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QualifiedName {
    segments: Vec<String>,
}

impl QualifiedName {
    pub fn new<I, S>(segments: I) -> Result<Self, InvalidName>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let segments: Vec<String> = segments.into_iter().map(Into::into).collect();
        if segments.is_empty() || !segments.iter().all(|s| is_identifier(s)) {
            return Err(InvalidName(segments.join(".")));
        }
        Ok(QualifiedName { segments })
    }

    pub fn single(segment: impl Into<String>) -> Result<Self, InvalidName> {
        Self::new([segment.into()])
    }

    pub fn segments(&self) -> &[String] {
        &self.segments
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn first(&self) -> &str {
        &self.segments[0]
    }

    pub fn last(&self) -> &str {
        self.segments.last().expect("qualified names are non-empty")
    }

    /// `self` extended by one segment. `segment` must be an identifier.
    pub fn child(&self, segment: &str) -> QualifiedName {
        debug_assert!(is_identifier(segment), "{segment}");
        let mut segments = self.segments.clone();
        segments.push(segment.to_string());
        QualifiedName { segments }
    }

    /// `self` followed by all segments of `rest`.
    pub fn join(&self, rest: &QualifiedName) -> QualifiedName {
        let mut segments = self.segments.clone();
        segments.extend(rest.segments.iter().cloned());
        QualifiedName { segments }
    }

    /// Everything but the last segment, if any remains.
    pub fn parent(&self) -> Option<QualifiedName> {
        (self.segments.len() > 1).then(|| QualifiedName {
            segments: self.segments[..self.segments.len() - 1].to_vec(),
        })
    }

    /// Segments after the first, if any remain.
    pub fn tail(&self) -> Option<QualifiedName> {
        (self.segments.len() > 1).then(|| QualifiedName {
            segments: self.segments[1..].to_vec(),
        })
    }

    pub fn starts_with(&self, prefix: &QualifiedName) -> bool {
        self.segments.starts_with(&prefix.segments)
    }

    fn rendered_chars(&self) -> impl Iterator<Item = char> + '_ {
        self.segments
            .iter()
            .enumerate()
            .flat_map(|(i, s)| (i > 0).then_some('.').into_iter().chain(s.chars()))
    }
}

impl fmt::Display for QualifiedName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.segments.join("."))
    }
}

impl fmt::Debug for QualifiedName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{self}`")
    }
}

impl FromStr for QualifiedName {
    type Err = InvalidName;

    fn from_str(s: &str) -> Result<Self, InvalidName> {
        QualifiedName::new(s.split('.')).map_err(|_| InvalidName(s.to_string()))
    }
}

// Ordered by rendering so that sorted output reads lexicographically.
impl Ord for QualifiedName {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rendered_chars().cmp(other.rendered_chars())
    }
}

impl PartialOrd for QualifiedName {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Serialize for QualifiedName {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for QualifiedName {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identifiers() {
        for ok in [
            "a",
            "_x",
            "Order",
            "java-spring",
            "a1-b2-c3",
            "circuit_breaker",
        ] {
            assert!(is_identifier(ok), "{ok}");
        }
        for bad in ["", "1a", "-a", "a-", "a--b", "a.b", "a b", "ä"] {
            assert!(!is_identifier(bad), "{bad}");
        }
    }

    #[test]
    fn parse_and_navigate() {
        let q: QualifiedName = "shop.CheckoutService.Orders.placeOrder".parse().unwrap();
        assert_eq!(q.len(), 4);
        assert_eq!(q.first(), "shop");
        assert_eq!(q.last(), "placeOrder");
        assert_eq!(
            q.parent().unwrap().to_string(),
            "shop.CheckoutService.Orders"
        );
        assert_eq!(
            q.tail().unwrap().to_string(),
            "CheckoutService.Orders.placeOrder"
        );
        assert!("a..b".parse::<QualifiedName>().is_err());
        assert!("".parse::<QualifiedName>().is_err());
        assert!(QualifiedName::new(Vec::<String>::new()).is_err());
    }

    #[test]
    fn ordering_matches_rendering() {
        let a: QualifiedName = "a-b.c".parse().unwrap();
        let b: QualifiedName = "a.c".parse().unwrap();
        assert_eq!(a.cmp(&b), a.to_string().cmp(&b.to_string()));
    }

    fn segment() -> impl Strategy<Value = String> {
        "[A-Za-z_][A-Za-z0-9_]{0,6}(-[A-Za-z0-9_]{1,3})?"
    }

    proptest! {
        #[test]
        fn render_parse_round_trip(segs in prop::collection::vec(segment(), 1..5)) {
            let q = QualifiedName::new(segs.clone()).unwrap();
            let back: QualifiedName = q.to_string().parse().unwrap();
            prop_assert_eq!(back.segments(), &segs[..]);
        }

        #[test]
        fn order_agrees_with_strings(
            a in prop::collection::vec(segment(), 1..4),
            b in prop::collection::vec(segment(), 1..4),
        ) {
            let qa = QualifiedName::new(a).unwrap();
            let qb = QualifiedName::new(b).unwrap();
            prop_assert_eq!(qa.cmp(&qb), qa.to_string().cmp(&qb.to_string()));
        }
    }
}
