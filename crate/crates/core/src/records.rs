//! Interaction records and topics.

use std::collections::BTreeSet;
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One social-media post event.
///
/// Constructed through [`InteractionRecord::new`], which lowercases user ids and
/// hashtags, strips a leading `#` and drops self-endorsements.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct InteractionRecord {
    pub author: String,
    pub endorsed: Option<String>,
    pub hashtags: BTreeSet<String>,
    pub urls: BTreeSet<String>,
    #[serde(rename = "ts")]
    pub timestamp: i64,
    /// Free text of the post. Only used to build hashtag profiles.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
}

pub fn normalize_user(id: &str) -> String {
    id.trim().to_lowercase()
}

pub fn normalize_tag(tag: &str) -> String {
    tag.trim().trim_start_matches('#').to_lowercase()
}

impl InteractionRecord {
    pub fn new<'a>(
        author: &str,
        endorsed: Option<&str>,
        hashtags: impl IntoIterator<Item = &'a str>,
        urls: impl IntoIterator<Item = &'a str>,
        timestamp: i64,
    ) -> Result<Self> {
        let author = normalize_user(author);
        if author.is_empty() {
            return Err(Error::Input("record with empty author".into()));
        }
        let endorsed = endorsed
            .map(normalize_user)
            .filter(|e| !e.is_empty() && *e != author);
        Ok(InteractionRecord {
            author,
            endorsed,
            hashtags: hashtags
                .into_iter()
                .map(normalize_tag)
                .filter(|t| !t.is_empty())
                .collect(),
            urls: urls
                .into_iter()
                .map(|u| u.trim().to_string())
                .filter(|u| !u.is_empty())
                .collect(),
            timestamp,
            text: None,
        })
    }

    pub fn with_text(mut self, text: &str) -> Self {
        self.text = Some(text.to_string());
        self
    }

    fn normalized(self) -> Result<Self> {
        let text = self.text.clone();
        let mut r = InteractionRecord::new(
            &self.author,
            self.endorsed.as_deref(),
            self.hashtags.iter().map(String::as_str),
            self.urls.iter().map(String::as_str),
            self.timestamp,
        )?;
        r.text = text;
        Ok(r)
    }
}

/// Parses JSON-lines records, normalizing and dropping exact duplicates.
/// Blank lines are skipped. Output order is the first-seen order.
pub fn read_records<R: BufRead>(reader: R, source: &str) -> Result<Vec<InteractionRecord>> {
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parse_err = |msg: String| Error::Parse {
            path: source.to_string(),
            line: i + 1,
            msg,
        };
        let raw: InteractionRecord =
            serde_json::from_str(&line).map_err(|e| parse_err(e.to_string()))?;
        let rec = raw.normalized().map_err(|e| parse_err(e.to_string()))?;
        if seen.insert(rec.clone()) {
            out.push(rec);
        }
    }
    Ok(out)
}

/// A seed hashtag and its related tags.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Topic {
    seed: String,
    members: Vec<String>,
}

impl Topic {
    /// Topic holding only `seed`.
    pub fn single(seed: &str) -> Self {
        let seed = normalize_tag(seed);
        Topic {
            members: vec![seed.clone()],
            seed,
        }
    }

    /// Topic with `seed` first followed by `others` in order, deduplicated.
    pub fn new<'a>(seed: &str, others: impl IntoIterator<Item = &'a str>) -> Self {
        let mut t = Topic::single(seed);
        for o in others {
            let o = normalize_tag(o);
            if !o.is_empty() && !t.members.contains(&o) {
                t.members.push(o);
            }
        }
        t
    }

    pub fn seed(&self) -> &str {
        &self.seed
    }

    pub fn members(&self) -> &[String] {
        &self.members
    }

    pub fn contains(&self, tag: &str) -> bool {
        self.members.iter().any(|m| m == tag)
    }

    /// Users who posted at least one record tagged with a topic hashtag.
    pub fn active_users(&self, records: &[InteractionRecord]) -> BTreeSet<String> {
        records
            .iter()
            .filter(|r| r.hashtags.iter().any(|h| self.contains(h)))
            .map(|r| r.author.clone())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_drops_self_endorsement() {
        let r = InteractionRecord::new("Alice", Some("alice"), ["#Foo"], [], 1).unwrap();
        assert_eq!(r.author, "alice");
        assert_eq!(r.endorsed, None);
        assert!(r.hashtags.contains("foo"));
    }

    #[test]
    fn empty_author_rejected() {
        assert!(InteractionRecord::new("  ", None, [], [], 0).is_err());
    }

    #[test]
    fn jsonl_dedups_and_reports_line() {
        let data = r##"{"author":"A","endorsed":"b","hashtags":["#X"],"urls":[],"ts":5}
{"author":"a","endorsed":"B","hashtags":["x"],"urls":[],"ts":5}

{"author":"c","endorsed":null,"hashtags":[],"urls":["http://e.com"],"ts":6}
"##;
        let recs = read_records(data.as_bytes(), "mem").unwrap();
        assert_eq!(recs.len(), 2);
        let bad = read_records("{\"author\":1}".as_bytes(), "mem").unwrap_err();
        assert!(bad.to_string().starts_with("mem:1:"));
    }

    #[test]
    fn topic_keeps_seed_first_and_dedups() {
        let t = Topic::new("#Seed", ["a", "SEED", "a", "#b"]);
        assert_eq!(t.members(), &["seed", "a", "b"]);
        assert_eq!(t.seed(), "seed");
    }
}
