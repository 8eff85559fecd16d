//! Regex cleaning of raw posts.
//!
//! Rules, applied in this order to the lower-cased text:
//! 1. HTML tags `<[^>]+>` are removed.
//! 2. URLs (`http://`, `https://` or `www.` followed by non-space) become `!url`.
//! 3. Hashtags `#\w+` are extracted as labels and removed.
//! 4. Mentions `@\w+` become `!user`.
//! 5. Whitespace runs collapse to one space; ends are trimmed.
//!
//! HTML goes first so that tag attributes never turn into `!url` tokens, and
//! URLs precede hashtags so that `#fragment` parts of links are not labels.

use regex::Regex;

pub const USER_TOKEN: &str = "!user";
pub const URL_TOKEN: &str = "!url";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawPost {
    pub text: String,
    /// `None` when the source has no retweet flag; the text is then checked
    /// for a leading `rt @`.
    pub is_retweet: Option<bool>,
    pub language_tag: String,
}

impl RawPost {
    pub fn plain(text: impl Into<String>, language_tag: impl Into<String>) -> Self {
        RawPost {
            text: text.into(),
            is_retweet: None,
            language_tag: language_tag.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CleanedPost {
    pub text: String,
    /// Lower-cased tags without `#`, deduplicated, in order of appearance.
    pub hashtags: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rejection {
    Retweet,
    Language,
    NoHashtag,
    EmptyAfterClean,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RejectionCounts {
    pub retweet: usize,
    pub language: usize,
    pub no_hashtag: usize,
    pub empty_after_clean: usize,
}

impl RejectionCounts {
    pub fn record(&mut self, r: Rejection) {
        match r {
            Rejection::Retweet => self.retweet += 1,
            Rejection::Language => self.language += 1,
            Rejection::NoHashtag => self.no_hashtag += 1,
            Rejection::EmptyAfterClean => self.empty_after_clean += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.retweet + self.language + self.no_hashtag + self.empty_after_clean
    }
}

pub struct Preprocessor {
    target_language: String,
    html: Regex,
    url: Regex,
    hashtag: Regex,
    mention: Regex,
    space: Regex,
}

impl Preprocessor {
    pub fn new(target_language: &str) -> Self {
        Preprocessor {
            target_language: target_language.to_lowercase(),
            html: Regex::new(r"<[^>]+>").unwrap(),
            url: Regex::new(r"(?:https?://|www\.)\S+").unwrap(),
            hashtag: Regex::new(r"#\w+").unwrap(),
            mention: Regex::new(r"@\w+").unwrap(),
            space: Regex::new(r"\s+").unwrap(),
        }
    }

    /// The text transformation without any rejection logic.
    pub fn clean(&self, text: &str) -> CleanedPost {
        let lower = text.to_lowercase();
        let no_html = self.html.replace_all(&lower, " ");
        let no_url = self.url.replace_all(&no_html, URL_TOKEN);
        let mut hashtags: Vec<String> = Vec::new();
        for m in self.hashtag.find_iter(&no_url) {
            let tag = &m.as_str()[1..];
            if !hashtags.iter().any(|h| h == tag) {
                hashtags.push(tag.to_string());
            }
        }
        let no_tags = self.hashtag.replace_all(&no_url, " ");
        let no_mentions = self.mention.replace_all(&no_tags, USER_TOKEN);
        let text = self.space.replace_all(&no_mentions, " ").trim().to_string();
        CleanedPost { text, hashtags }
    }

    pub fn preprocess(&self, raw: &RawPost) -> Result<CleanedPost, Rejection> {
        let retweet = match raw.is_retweet {
            Some(flag) => flag,
            None => raw.text.trim_start().to_lowercase().starts_with("rt @"),
        };
        if retweet {
            return Err(Rejection::Retweet);
        }
        if raw.language_tag.to_lowercase() != self.target_language {
            return Err(Rejection::Language);
        }
        let cleaned = self.clean(&raw.text);
        if cleaned.hashtags.is_empty() {
            return Err(Rejection::NoHashtag);
        }
        if cleaned.text.is_empty() {
            return Err(Rejection::EmptyAfterClean);
        }
        Ok(cleaned)
    }
}

impl Default for Preprocessor {
    fn default() -> Self {
        Preprocessor::new("en")
    }
}
