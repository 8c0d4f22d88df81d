//! Conversation-graph builders: retweet, follow and shared-content graphs.
//!
//! Vertex indices follow ascending user-id order, so every builder is independent of
//! the order of its input records.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use crate::error::{Error, Result};
use crate::graph::{ConversationGraph, GraphBuilder};
use crate::records::{normalize_user, InteractionRecord, Topic};

/// Default per-hashtag retweet threshold.
pub const DEFAULT_TAU: u64 = 2;

fn unordered(a: &str, b: &str) -> (String, String) {
    if a < b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

/// Retweet graph of a topic.
///
/// For every topic hashtag separately, retweets between each unordered user pair are
/// counted in both directions; a pair becomes an edge when that count reaches `tau` for
/// at least one hashtag. Stored arcs run retweeter -> original author, weighted by the
/// number of retweet events carrying a hashtag on which the pair qualified.
pub fn build_retweet_graph(
    records: &[InteractionRecord],
    topic: &Topic,
    tau: u64,
) -> Result<ConversationGraph> {
    if tau < 1 {
        return Err(Error::Domain(format!("tau must be >= 1, got {tau}")));
    }
    let mut per_tag: HashMap<(&str, (String, String)), u64> = HashMap::new();
    for r in records {
        let Some(endorsed) = r.endorsed.as_deref() else { continue };
        for h in r.hashtags.iter().filter(|h| topic.contains(h)) {
            *per_tag.entry((h.as_str(), unordered(&r.author, endorsed))).or_insert(0) += 1;
        }
    }
    let qualified: HashSet<(&str, (String, String))> = per_tag
        .into_iter()
        .filter(|&(_, c)| c >= tau)
        .map(|(k, _)| k)
        .collect();

    let mut arcs: BTreeMap<(String, String), u64> = BTreeMap::new();
    for r in records {
        let Some(endorsed) = r.endorsed.as_deref() else { continue };
        let pair = unordered(&r.author, endorsed);
        let hit = r
            .hashtags
            .iter()
            .any(|h| topic.contains(h) && qualified.contains(&(h.as_str(), pair.clone())));
        if hit {
            *arcs.entry((r.author.clone(), endorsed.to_string())).or_insert(0) += 1;
        }
    }
    Ok(assemble(true, arcs))
}

fn assemble(directed: bool, edges: BTreeMap<(String, String), u64>) -> ConversationGraph {
    let vertices: BTreeSet<&str> = edges
        .keys()
        .flat_map(|(a, b)| [a.as_str(), b.as_str()])
        .collect();
    let mut b = GraphBuilder::new(directed);
    for v in vertices {
        b.add_vertex(v);
    }
    for ((s, d), w) in &edges {
        b.add_edge(s, d, *w);
    }
    b.build()
}

/// Follow graph restricted to `active_users`: `{u,v}` is an edge iff either follows the
/// other. The weight counts the follow relations (1 or 2).
pub fn build_follow_graph(
    follow_edges: &[(String, String)],
    active_users: &BTreeSet<String>,
) -> ConversationGraph {
    let mut edges: BTreeMap<(String, String), u64> = BTreeMap::new();
    let mut seen = HashSet::new();
    for (a, b) in follow_edges {
        let (a, b) = (normalize_user(a), normalize_user(b));
        if a == b || !active_users.contains(&a) || !active_users.contains(&b) {
            continue;
        }
        if seen.insert((a.clone(), b.clone())) {
            *edges.entry(unordered(&a, &b)).or_insert(0) += 1;
        }
    }
    assemble(false, edges)
}

/// Sharing criterion of a content graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ContentMode {
    /// A hashtag outside the topic.
    SharedHashtag,
    SharedUrl,
    /// Registrable domain of a linked URL.
    SharedDomain,
}

impl std::str::FromStr for ContentMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "shared-hashtag" | "hashtag" => Ok(ContentMode::SharedHashtag),
            "shared-url" | "url" => Ok(ContentMode::SharedUrl),
            "shared-domain" | "domain" => Ok(ContentMode::SharedDomain),
            other => Err(Error::Input(format!("unknown content mode '{other}'"))),
        }
    }
}

/// Content graph and the number of records skipped for unparseable URLs.
#[derive(Debug, Clone)]
pub struct ContentGraph {
    pub graph: ConversationGraph,
    pub skipped_records: usize,
}

fn parse_url(raw: &str) -> Option<url::Url> {
    let parsed = if raw.contains("://") {
        url::Url::parse(raw)
    } else {
        url::Url::parse(&format!("http://{raw}"))
    };
    parsed.ok().filter(|u| u.host_str().is_some())
}

/// Registrable domain approximation: the last two host labels, or three when the
/// second-level label is a generic one under a two-letter country code (`bbc.co.uk`).
pub fn registrable_domain(host: &str) -> String {
    let host = host.trim_end_matches('.').to_lowercase();
    if host.parse::<std::net::IpAddr>().is_ok() {
        return host;
    }
    let labels: Vec<&str> = host.split('.').filter(|l| !l.is_empty()).collect();
    let take = match labels.as_slice() {
        [.., sld, tld]
            if labels.len() >= 3
                && tld.len() == 2
                && matches!(*sld, "co" | "com" | "net" | "org" | "gov" | "ac" | "edu") =>
        {
            3
        }
        _ => 2,
    };
    labels[labels.len().saturating_sub(take)..].join(".")
}

/// Content graph over records carrying at least one topic hashtag: `{u,v}` is an edge
/// iff both users posted an identical item of the selected kind. The weight is the
/// number of distinct shared items.
pub fn build_content_graph(
    records: &[InteractionRecord],
    topic: &Topic,
    mode: ContentMode,
) -> ContentGraph {
    let mut holders: BTreeMap<String, BTreeSet<&str>> = BTreeMap::new();
    let mut skipped = 0;
    for r in records.iter().filter(|r| r.hashtags.iter().any(|h| topic.contains(h))) {
        let items: Option<Vec<String>> = match mode {
            ContentMode::SharedHashtag => Some(
                r.hashtags
                    .iter()
                    .filter(|h| !topic.contains(h))
                    .cloned()
                    .collect(),
            ),
            ContentMode::SharedUrl => r
                .urls
                .iter()
                .map(|u| parse_url(u).map(|p| p.to_string()))
                .collect(),
            ContentMode::SharedDomain => r
                .urls
                .iter()
                .map(|u| parse_url(u).map(|p| registrable_domain(p.host_str().unwrap_or(""))))
                .collect(),
        };
        match items {
            Some(items) => {
                for it in items {
                    holders.entry(it).or_default().insert(&r.author);
                }
            }
            None => skipped += 1,
        }
    }
    let mut edges: BTreeMap<(String, String), u64> = BTreeMap::new();
    for users in holders.values() {
        let users: Vec<&str> = users.iter().copied().collect();
        for (i, a) in users.iter().enumerate() {
            for b in &users[i + 1..] {
                *edges.entry((a.to_string(), b.to_string())).or_insert(0) += 1;
            }
        }
    }
    ContentGraph {
        graph: assemble(false, edges),
        skipped_records: skipped,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rt(author: &str, endorsed: &str, tags: &[&str]) -> InteractionRecord {
        InteractionRecord::new(author, Some(endorsed), tags.iter().copied(), [], 0).unwrap()
    }

    fn post(author: &str, tags: &[&str], urls: &[&str]) -> InteractionRecord {
        InteractionRecord::new(author, None, tags.iter().copied(), urls.iter().copied(), 0).unwrap()
    }

    #[test]
    fn single_retweet_below_threshold() {
        let g = build_retweet_graph(&[rt("u", "v", &["a"])], &Topic::single("a"), 2).unwrap();
        assert_eq!(g.edge_count(), 0);
        assert!(g.is_empty());
    }

    #[test]
    fn two_retweets_make_an_edge() {
        let recs = [rt("u", "v", &["a"]), rt("u", "v", &["a"])];
        let g = build_retweet_graph(&recs, &Topic::single("a"), 2).unwrap();
        assert_eq!(g.edge_count(), 1);
        let (u, v) = (g.index_of("u").unwrap(), g.index_of("v").unwrap());
        assert_eq!(g.arc_weight(u, v), 2);
        assert_eq!(g.arc_weight(v, u), 0);
        assert!(g.is_directed());
    }

    #[test]
    fn threshold_is_per_hashtag_before_union() {
        let recs = [rt("u", "v", &["a"]), rt("u", "v", &["b"])];
        let g = build_retweet_graph(&recs, &Topic::new("a", ["b"]), 2).unwrap();
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn retweets_pool_both_directions() {
        let recs = [rt("u", "v", &["a"]), rt("v", "u", &["a"])];
        let g = build_retweet_graph(&recs, &Topic::single("a"), 2).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.edges().len(), 2);
    }

    #[test]
    fn tau_zero_is_domain_error() {
        assert!(build_retweet_graph(&[], &Topic::single("a"), 0).is_err());
        assert!(build_retweet_graph(&[], &Topic::single("a"), 1).unwrap().is_empty());
    }

    fn follows(pairs: &[(&str, &str)]) -> Vec<(String, String)> {
        pairs.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
    }

    fn users(u: &[&str]) -> BTreeSet<String> {
        u.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn follow_graph_rules() {
        let g = build_follow_graph(&follows(&[("a", "b")]), &users(&["a", "b"]));
        assert_eq!(g.edge_count(), 1);
        let g = build_follow_graph(&follows(&[("a", "b")]), &users(&["a"]));
        assert!(g.is_empty());
        let g = build_follow_graph(&follows(&[("a", "b"), ("b", "a")]), &users(&["a", "b"]));
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.edge_weight(0, 1), 2);
    }

    #[test]
    fn content_graph_shared_hashtag_excludes_topic() {
        let t = Topic::single("seed");
        let g = build_content_graph(&[post("u", &["seed", "x"], &[]), post("v", &["seed", "x"], &[])], &t, ContentMode::SharedHashtag);
        assert_eq!(g.graph.edge_count(), 1);
        let g = build_content_graph(&[post("u", &["seed"], &[]), post("v", &["seed"], &[])], &t, ContentMode::SharedHashtag);
        assert_eq!(g.graph.edge_count(), 0);
    }

    #[test]
    fn content_graph_url_versus_domain() {
        let t = Topic::single("seed");
        let recs = [post("u", &["seed"], &["cnn.com/p1"]), post("v", &["seed"], &["https://edition.cnn.com/p2"])];
        assert_eq!(build_content_graph(&recs, &t, ContentMode::SharedDomain).graph.edge_count(), 1);
        assert_eq!(build_content_graph(&recs, &t, ContentMode::SharedUrl).graph.edge_count(), 0);
    }

    #[test]
    fn unparseable_url_skips_record() {
        let t = Topic::single("seed");
        let recs = [post("u", &["seed"], &["http://"]), post("v", &["seed"], &["e.com"])];
        let cg = build_content_graph(&recs, &t, ContentMode::SharedUrl);
        assert_eq!(cg.skipped_records, 1);
    }

    #[test]
    fn registrable_domains() {
        assert_eq!(registrable_domain("www.cnn.com"), "cnn.com");
        assert_eq!(registrable_domain("news.bbc.co.uk"), "bbc.co.uk");
        assert_eq!(registrable_domain("localhost"), "localhost");
    }
}
