//! Embedding lookup, the GRU cell, and the bidirectional encoder for both
//! the character and the word front-end.

pub mod encoder;
pub mod gru;
pub mod vocab;

pub use encoder::{backward, encode, encode_batch, forward, lookup, EncoderCache, EncoderParams, SequenceBatch};
pub use gru::{gru_step, GruParams, GruStep};
pub use vocab::{Alphabet, EncodedSequence, ModelKind, SymbolTable, VocabBuild, WordVocab, PAD, RESERVED, UNK};
