//! Topic expansion from a seed hashtag by document-frequency normalised co-occurrence
//! similarity.
//!
//! `sim(s, t) = (alpha·cos(W_s, W_t) + (1 − alpha)·cos(H_s, H_t)) / (1 + ln df(t))`
//! where `W_x`/`H_x` count the words/hashtags co-occurring with tag `x`.

use std::collections::BTreeMap;
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::records::{normalize_tag, InteractionRecord, Topic};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HashtagProfile {
    pub tag: String,
    /// Number of background posts containing the tag.
    pub df: u64,
    #[serde(rename = "words")]
    pub word_vec: BTreeMap<String, u64>,
    #[serde(rename = "tags")]
    pub tag_vec: BTreeMap<String, u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpansionConfig {
    /// Weight of word co-occurrence against hashtag co-occurrence.
    pub alpha: f64,
    pub k: usize,
}

impl Default for ExpansionConfig {
    fn default() -> Self {
        ExpansionConfig { alpha: 0.3, k: 20 }
    }
}

/// Cosine similarity of two sparse count vectors; 0 when either is all-zero.
pub fn cosine(a: &BTreeMap<String, u64>, b: &BTreeMap<String, u64>) -> f64 {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let dot: f64 = small
        .iter()
        .filter_map(|(k, &x)| large.get(k).map(|&y| x as f64 * y as f64))
        .sum();
    let na = a.values().map(|&x| (x as f64).powi(2)).sum::<f64>().sqrt();
    let nb = b.values().map(|&x| (x as f64).powi(2)).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        (dot / (na * nb)).min(1.0)
    }
}

pub fn hashtag_similarity(seed: &HashtagProfile, cand: &HashtagProfile, alpha: f64) -> Result<f64> {
    if cand.df < 1 {
        return Err(Error::Domain(format!("document frequency of '{}' must be >= 1", cand.tag)));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Domain(format!("alpha must be in [0,1], got {alpha}")));
    }
    let mix = alpha * cosine(&seed.word_vec, &cand.word_vec)
        + (1.0 - alpha) * cosine(&seed.tag_vec, &cand.tag_vec);
    Ok(mix / (1.0 + (cand.df as f64).ln()))
}

/// Seed plus its `k` most similar tags with nonzero similarity; ties go to the
/// lexicographically smaller tag.
pub fn expand_topic(seed_tag: &str, profiles: &[HashtagProfile], cfg: &ExpansionConfig) -> Result<Topic> {
    let seed_tag = normalize_tag(seed_tag);
    let seed = profiles
        .iter()
        .find(|p| p.tag == seed_tag)
        .ok_or_else(|| Error::Input(format!("unknown seed '{seed_tag}'")))?;
    let mut scored = Vec::new();
    for cand in profiles.iter().filter(|p| p.tag != seed_tag) {
        let s = hashtag_similarity(seed, cand, cfg.alpha)?;
        if s > 0.0 {
            scored.push((s, cand.tag.as_str()));
        }
    }
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(b.1)));
    scored.truncate(cfg.k);
    Ok(Topic::new(&seed_tag, scored.into_iter().map(|(_, t)| t)))
}

fn words(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split(|c: char| !(c.is_alphanumeric() || c == '#' || c == '_'))
        .filter(|w| !w.is_empty() && !w.starts_with('#'))
        .map(str::to_lowercase)
}

/// Profiles for every hashtag seen in `records`. Document frequency is the number of
/// records carrying the tag; words come from the optional record text.
pub fn build_profiles(records: &[InteractionRecord]) -> Vec<HashtagProfile> {
    let mut profiles: BTreeMap<&str, HashtagProfile> = BTreeMap::new();
    for r in records {
        let text_words: Vec<String> = r.text.as_deref().map(|t| words(t).collect()).unwrap_or_default();
        for h in &r.hashtags {
            let p = profiles.entry(h).or_insert_with(|| HashtagProfile {
                tag: h.clone(),
                df: 0,
                word_vec: BTreeMap::new(),
                tag_vec: BTreeMap::new(),
            });
            p.df += 1;
            for w in &text_words {
                *p.word_vec.entry(w.clone()).or_insert(0) += 1;
            }
            for other in r.hashtags.iter().filter(|o| *o != h) {
                *p.tag_vec.entry(other.clone()).or_insert(0) += 1;
            }
        }
    }
    profiles.into_values().collect()
}

/// Reads JSON-lines profiles `{"tag", "df", "words", "tags"}`.
pub fn read_profiles<R: BufRead>(reader: R, source: &str) -> Result<Vec<HashtagProfile>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let err = |msg: String| Error::Parse {
            path: source.to_string(),
            line: i + 1,
            msg,
        };
        let mut p: HashtagProfile = serde_json::from_str(&line).map_err(|e| err(e.to_string()))?;
        if p.df < 1 {
            return Err(err(format!("df of '{}' must be >= 1", p.tag)));
        }
        p.tag = normalize_tag(&p.tag);
        p.tag_vec.remove(&p.tag);
        out.push(p);
    }
    Ok(out)
}

pub fn write_profiles<W: std::io::Write>(profiles: &[HashtagProfile], mut w: W) -> Result<()> {
    for p in profiles {
        serde_json::to_writer(&mut w, p)?;
        writeln!(w)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vec_of(pairs: &[(&str, u64)]) -> BTreeMap<String, u64> {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    fn profile(tag: &str, df: u64, words: &[(&str, u64)], tags: &[(&str, u64)]) -> HashtagProfile {
        HashtagProfile {
            tag: tag.into(),
            df,
            word_vec: vec_of(words),
            tag_vec: vec_of(tags),
        }
    }

    #[test]
    fn identical_vectors_with_unit_df() {
        let s = profile("s", 5, &[("a", 2), ("b", 1)], &[("x", 3)]);
        let c = profile("c", 1, &[("a", 2), ("b", 1)], &[("x", 3)]);
        assert!((hashtag_similarity(&s, &c, 0.3).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn orthogonal_vectors() {
        let s = profile("s", 5, &[("a", 2)], &[("x", 3)]);
        let c = profile("c", 3, &[("b", 2)], &[("y", 3)]);
        assert_eq!(hashtag_similarity(&s, &c, 0.3).unwrap(), 0.0);
    }

    #[test]
    fn hand_evaluated_mix() {
        // cos(W) = 0.5: (1,0)·(1,√3)/2 ; cos(H) = 0.8: (1,0)·(4,3)/5
        let s = profile("s", 1, &[("a", 1)], &[("x", 1)]);
        let mut c = profile("c", 10, &[], &[("x", 4), ("y", 3)]);
        c.word_vec = vec_of(&[("a", 1000), ("b", 1732)]);
        let cw = cosine(&s.word_vec, &c.word_vec);
        assert!((cw - 0.5).abs() < 1e-3);
        let expected = (0.3 * cw + 0.7 * 0.8) / (1.0 + 10f64.ln());
        let got = hashtag_similarity(&s, &c, 0.3).unwrap();
        assert!((got - expected).abs() < 1e-12);
        let exact = (0.3 * 0.5 + 0.7 * 0.8) / (1.0 + 10f64.ln());
        assert!((exact - 0.2150).abs() < 5e-5);
    }

    #[test]
    fn zero_df_is_domain_error() {
        let s = profile("s", 1, &[], &[]);
        assert!(hashtag_similarity(&s, &profile("c", 0, &[], &[]), 0.3).is_err());
    }

    fn ranked_profiles() -> Vec<HashtagProfile> {
        // all df = 1; tag cosine to the seed decides the order
        vec![
            profile("seed", 1, &[], &[("z", 1)]),
            profile("a", 1, &[], &[("z", 9), ("q", 1)]),
            profile("b", 1, &[], &[("z", 1), ("q", 1)]),
            profile("c", 1, &[], &[("z", 1), ("q", 9)]),
            profile("d", 1, &[], &[("q", 1)]),
        ]
    }

    #[test]
    fn expansion_top_k() {
        let cfg = ExpansionConfig { alpha: 0.3, k: 2 };
        let t = expand_topic("#seed", &ranked_profiles(), &cfg).unwrap();
        assert_eq!(t.members(), &["seed", "a", "b"]);
        let t = expand_topic("seed", &ranked_profiles(), &ExpansionConfig { alpha: 0.3, k: 50 }).unwrap();
        assert_eq!(t.members(), &["seed", "a", "b", "c"]);
    }

    #[test]
    fn expansion_zero_similarity_and_unknown_seed() {
        let ps = vec![profile("seed", 1, &[], &[("z", 1)]), profile("d", 1, &[], &[("q", 1)])];
        let t = expand_topic("seed", &ps, &ExpansionConfig::default()).unwrap();
        assert_eq!(t.members(), &["seed"]);
        assert!(expand_topic("nope", &ps, &ExpansionConfig::default()).unwrap_err().to_string().contains("unknown seed"));
    }

    #[test]
    fn ties_break_lexicographically() {
        let ps = vec![
            profile("seed", 1, &[], &[("z", 1)]),
            profile("y", 1, &[], &[("z", 1)]),
            profile("x", 1, &[], &[("z", 1)]),
        ];
        let t = expand_topic("seed", &ps, &ExpansionConfig { alpha: 0.3, k: 1 }).unwrap();
        assert_eq!(t.members(), &["seed", "x"]);
    }

    #[test]
    fn profiles_from_records() {
        let r1 = InteractionRecord::new("u", None, ["a", "b"], [], 0).unwrap().with_text("Hello world #a #b");
        let r2 = InteractionRecord::new("v", None, ["a"], [], 0).unwrap().with_text("hello");
        let ps = build_profiles(&[r1, r2]);
        let a = ps.iter().find(|p| p.tag == "a").unwrap();
        assert_eq!(a.df, 2);
        assert_eq!(a.word_vec["hello"], 2);
        assert_eq!(a.tag_vec, vec_of(&[("b", 1)]));
        let mut buf = Vec::new();
        write_profiles(&ps, &mut buf).unwrap();
        assert_eq!(read_profiles(buf.as_slice(), "mem").unwrap(), ps);
    }
}
