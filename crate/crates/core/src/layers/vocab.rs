//! Symbol tables for the two front-ends: characters and whitespace tokens.

use std::collections::HashMap;

use crate::error::{Error, Result};

pub const PAD: usize = 0;
/// Out-of-table index, shared by the character and word tables.
pub const UNK: usize = 1;
pub const RESERVED: usize = 2;

/// A symbol-index sequence ready for embedding lookup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncodedSequence {
    indices: Vec<usize>,
}

impl EncodedSequence {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::Data("empty symbol sequence".into()));
        }
        Ok(EncodedSequence { indices })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn reversed(&self) -> EncodedSequence {
        EncodedSequence {
            indices: self.indices.iter().rev().copied().collect(),
        }
    }

    pub fn check_bounds(&self, table_size: usize) -> Result<()> {
        for (position, &index) in self.indices.iter().enumerate() {
            if index >= table_size {
                return Err(Error::Index {
                    index,
                    size: table_size,
                    position,
                });
            }
        }
        Ok(())
    }
}

/// Character table. Indices are assigned in order of first occurrence in the
/// training text, after the two reserved slots.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    char_to_index: HashMap<char, usize>,
    index_to_char: Vec<char>,
}

impl Alphabet {
    pub fn build<'a>(texts: impl IntoIterator<Item = &'a str>) -> Self {
        let mut alphabet = Alphabet {
            char_to_index: HashMap::new(),
            index_to_char: Vec::new(),
        };
        for text in texts {
            for c in text.chars() {
                alphabet.insert(c);
            }
        }
        alphabet
    }

    /// Rebuilds a table from its non-reserved characters in index order.
    pub fn from_chars(chars: impl IntoIterator<Item = char>) -> Result<Self> {
        let mut alphabet = Alphabet {
            char_to_index: HashMap::new(),
            index_to_char: Vec::new(),
        };
        for c in chars {
            if alphabet.char_to_index.contains_key(&c) {
                return Err(Error::Data(format!("duplicate alphabet entry {c:?}")));
            }
            alphabet.insert(c);
        }
        Ok(alphabet)
    }

    fn insert(&mut self, c: char) {
        if !self.char_to_index.contains_key(&c) {
            self.char_to_index.insert(c, self.index_to_char.len() + RESERVED);
            self.index_to_char.push(c);
        }
    }

    /// Table size including the reserved PAD and UNK rows.
    pub fn size(&self) -> usize {
        self.index_to_char.len() + RESERVED
    }

    pub fn index_of(&self, c: char) -> usize {
        self.char_to_index.get(&c).copied().unwrap_or(UNK)
    }

    pub fn char_at(&self, index: usize) -> Option<char> {
        index
            .checked_sub(RESERVED)
            .and_then(|i| self.index_to_char.get(i).copied())
    }

    /// Characters in index order, reserved slots excluded.
    pub fn chars(&self) -> &[char] {
        &self.index_to_char
    }

    pub fn encode(&self, text: &str) -> Result<EncodedSequence> {
        EncodedSequence::new(text.chars().map(|c| self.index_of(c)).collect())
    }
}

/// Word table over the `V` most frequent whitespace tokens.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WordVocab {
    word_to_index: HashMap<String, usize>,
    index_to_word: Vec<String>,
}

/// Result of a vocabulary build: the table plus whether fewer than `V`
/// distinct tokens existed.
#[derive(Clone, Debug)]
pub struct VocabBuild {
    pub vocab: WordVocab,
    pub truncated_request: bool,
}

impl WordVocab {
    pub fn build<'a>(texts: impl IntoIterator<Item = &'a str>, max_words: usize) -> VocabBuild {
        let mut counts: HashMap<&str, usize> = HashMap::new();
        for text in texts {
            for token in text.split_whitespace() {
                *counts.entry(token).or_default() += 1;
            }
        }
        let mut ranked: Vec<(&str, usize)> = counts.into_iter().collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        let truncated_request = ranked.len() < max_words;
        ranked.truncate(max_words);
        let vocab = WordVocab::from_words(ranked.into_iter().map(|(w, _)| w.to_string()))
            .expect("counted tokens are distinct");
        VocabBuild {
            vocab,
            truncated_request,
        }
    }

    pub fn from_words(words: impl IntoIterator<Item = String>) -> Result<Self> {
        let mut vocab = WordVocab {
            word_to_index: HashMap::new(),
            index_to_word: Vec::new(),
        };
        for w in words {
            if w.is_empty() || w.chars().any(char::is_whitespace) {
                return Err(Error::Data(format!("invalid vocabulary token {w:?}")));
            }
            if vocab.word_to_index.contains_key(&w) {
                return Err(Error::Data(format!("duplicate vocabulary token {w:?}")));
            }
            vocab
                .word_to_index
                .insert(w.clone(), vocab.index_to_word.len() + RESERVED);
            vocab.index_to_word.push(w);
        }
        Ok(vocab)
    }

    /// Table size including PAD and UNK.
    pub fn size(&self) -> usize {
        self.index_to_word.len() + RESERVED
    }

    pub fn index_of(&self, token: &str) -> usize {
        self.word_to_index.get(token).copied().unwrap_or(UNK)
    }

    pub fn contains(&self, token: &str) -> bool {
        self.word_to_index.contains_key(token)
    }

    /// Words in index order, reserved slots excluded.
    pub fn words(&self) -> &[String] {
        &self.index_to_word
    }

    pub fn encode(&self, text: &str) -> Result<EncodedSequence> {
        EncodedSequence::new(text.split_whitespace().map(|t| self.index_of(t)).collect())
    }

    pub fn oov_count(&self, text: &str) -> usize {
        text.split_whitespace().filter(|t| !self.contains(t)).count()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelKind {
    Character,
    Word,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Character => "character",
            ModelKind::Word => "word",
        }
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "character" | "char" => Ok(ModelKind::Character),
            "word" => Ok(ModelKind::Word),
            other => Err(Error::Config(format!("unknown model kind {other:?}"))),
        }
    }
}

/// Either front-end's table behind one interface.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SymbolTable {
    Chars(Alphabet),
    Words(WordVocab),
}

impl SymbolTable {
    pub fn kind(&self) -> ModelKind {
        match self {
            SymbolTable::Chars(_) => ModelKind::Character,
            SymbolTable::Words(_) => ModelKind::Word,
        }
    }

    pub fn size(&self) -> usize {
        match self {
            SymbolTable::Chars(a) => a.size(),
            SymbolTable::Words(v) => v.size(),
        }
    }

    pub fn encode(&self, text: &str) -> Result<EncodedSequence> {
        match self {
            SymbolTable::Chars(a) => a.encode(text),
            SymbolTable::Words(v) => v.encode(text),
        }
    }
}
