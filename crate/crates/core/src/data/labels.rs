//! Hashtag label inventory with frequency filtering.

use std::collections::{BTreeMap, HashMap};

use crate::data::preprocess::CleanedPost;
use crate::error::{Error, Result};

pub const DEFAULT_MIN_COUNT: usize = 500;
pub const DEFAULT_MAX_COUNT: usize = 19_000;

/// A cleaned post with its labels resolved to indices of a [`LabelSet`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledExample {
    pub text: String,
    pub labels: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelSet {
    names: Vec<String>,
    counts: Vec<usize>,
    index: HashMap<String, usize>,
}

impl LabelSet {
    /// Keeps tags whose training post count lies in `[min_count, max_count]`.
    /// Indices follow lexicographic tag order.
    pub fn filter(train: &[CleanedPost], min_count: usize, max_count: usize) -> Result<Self> {
        if min_count > max_count {
            return Err(Error::Config(format!(
                "min count {min_count} exceeds max count {max_count}"
            )));
        }
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for post in train {
            for tag in &post.hashtags {
                *counts.entry(tag.as_str()).or_default() += 1;
            }
        }
        let kept: Vec<(String, usize)> = counts
            .into_iter()
            .filter(|&(_, c)| (min_count..=max_count).contains(&c))
            .map(|(t, c)| (t.to_string(), c))
            .collect();
        if kept.is_empty() {
            return Err(Error::Config(format!(
                "no hashtag has between {min_count} and {max_count} training posts"
            )));
        }
        let (names, counts) = kept.into_iter().unzip();
        Ok(LabelSet::with_counts(names, counts))
    }

    /// A label set from names alone (e.g. read back from a checkpoint).
    pub fn from_names(names: Vec<String>) -> Result<Self> {
        let counts = vec![0; names.len()];
        let set = LabelSet::with_counts(names, counts);
        if set.index.len() != set.names.len() {
            return Err(Error::Data("duplicate label names".into()));
        }
        Ok(set)
    }

    fn with_counts(names: Vec<String>, counts: Vec<usize>) -> Self {
        let index = names.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
        LabelSet { names, counts, index }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Training post counts; zero when the set was built from names only.
    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn index_of(&self, tag: &str) -> Option<usize> {
        self.index.get(tag).copied()
    }

    /// Maps tags to indices, dropping unknown tags and then posts left with
    /// no label. Returns the kept examples and the number dropped.
    pub fn assign<'a>(&self, posts: impl IntoIterator<Item = &'a CleanedPost>) -> (Vec<LabeledExample>, usize) {
        let mut kept = Vec::new();
        let mut dropped = 0;
        for post in posts {
            let labels: Vec<usize> = post.hashtags.iter().filter_map(|t| self.index_of(t)).collect();
            if labels.is_empty() {
                dropped += 1;
            } else {
                kept.push(LabeledExample {
                    text: post.text.clone(),
                    labels,
                });
            }
        }
        (kept, dropped)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn post(tags: &[&str]) -> CleanedPost {
        CleanedPost {
            text: "x".into(),
            hashtags: tags.iter().map(|t| t.to_string()).collect(),
        }
    }

    fn corpus(tag_counts: &[(&str, usize)]) -> Vec<CleanedPost> {
        tag_counts.iter()
            .flat_map(|&(tag, n)| std::iter::repeat_with(move || post(&[tag])).take(n))
            .collect()
    }

    #[test]
    fn default_thresholds_are_inclusive() {
        let train = corpus(&[("rare", 499), ("edge", 500), ("mid", 1000), ("top", 19_000), ("spam", 20_000)]);
        let set = LabelSet::filter(&train, DEFAULT_MIN_COUNT, DEFAULT_MAX_COUNT).unwrap();
        assert_eq!(set.names(), &["edge", "mid", "top"]);
        assert_eq!(set.counts(), &[500, 1000, 19_000]);
        assert_eq!(set.index_of("rare"), None);
        assert_eq!(set.index_of("spam"), None);
    }

    #[test]
    fn identity_thresholds_keep_everything() {
        let train = vec![post(&["a"]), post(&["b", "c"]), post(&["c"])];
        let set = LabelSet::filter(&train, 1, usize::MAX).unwrap();
        assert_eq!(set.len(), 3);
    }

    #[test]
    fn empty_result_is_config_error() {
        let train = vec![post(&["a"])];
        assert!(matches!(LabelSet::filter(&train, 2, 10), Err(Error::Config(_))));
    }

    #[test]
    fn assign_drops_unlabeled_posts() {
        let train = corpus(&[("a", 2), ("b", 1)]);
        let set = LabelSet::filter(&train, 2, 10).unwrap();
        let posts = vec![post(&["a", "b"]), post(&["b"]), post(&["zzz", "a"])];
        let (kept, dropped) = set.assign(&posts);
        assert_eq!(dropped, 1);
        assert_eq!(kept.len(), 2);
        assert!(kept.iter().all(|e| e.labels == vec![0]));
    }
}
