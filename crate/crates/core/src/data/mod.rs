//! Raw-post ingestion, cleaning, label filtering, table induction, splits
//! and batching.

pub mod dataset;
pub mod labels;
pub mod preprocess;

pub use dataset::{
    batch_from_ids, make_batches, read_labeled, read_raw_posts, select_oov_testsets, split_dataset, write_atomic,
    write_labeled, Batch, DatasetSplit, EncodedDataset, EncodedExample, OovSelection, RawFormat,
};
pub use labels::{LabelSet, LabeledExample, DEFAULT_MAX_COUNT, DEFAULT_MIN_COUNT};
pub use preprocess::{CleanedPost, Preprocessor, RawPost, Rejection, RejectionCounts, URL_TOKEN, USER_TOKEN};

use crate::layers::{Alphabet, ModelKind, SymbolTable, WordVocab};

pub const DEFAULT_VOCAB_SIZE: usize = 20_000;

/// Builds the symbol table for `kind` from training texts only. For the word
/// model the second value reports whether fewer than `vocab_size` distinct
/// tokens existed.
pub fn build_symbol_table<'a>(
    kind: ModelKind,
    train_texts: impl IntoIterator<Item = &'a str>,
    vocab_size: usize,
) -> (SymbolTable, bool) {
    match kind {
        ModelKind::Character => (SymbolTable::Chars(Alphabet::build(train_texts)), false),
        ModelKind::Word => {
            let b = WordVocab::build(train_texts, vocab_size);
            (SymbolTable::Words(b.vocab), b.truncated_request)
        }
    }
}
