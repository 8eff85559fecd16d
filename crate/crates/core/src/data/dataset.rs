//! Dataset files, splitting, OOV-stratified test subsets and mini-batches.
//!
//! Raw input: UTF-8, one post per line, either `language<TAB>retweet(0|1)<TAB>text`
//! or the text alone (plain mode: target language, no retweet flag).
//!
//! Labeled output: `tag1,tag2<TAB>clean text`, one example per line.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::data::labels::{LabelSet, LabeledExample};
use crate::data::preprocess::{CleanedPost, RawPost};
use crate::error::{Error, Result};
use crate::layers::{EncodedSequence, SequenceBatch, SymbolTable, WordVocab};
use crate::objective::TargetMatrix;
use crate::tensor::SeededRng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RawFormat {
    Tsv,
    Plain,
}

impl std::str::FromStr for RawFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tsv" => Ok(RawFormat::Tsv),
            "plain" => Ok(RawFormat::Plain),
            other => Err(Error::Config(format!("unknown input format {other:?}"))),
        }
    }
}

fn open_lines(path: &Path) -> Result<impl Iterator<Item = (usize, std::io::Result<String>)>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(BufReader::new(file).lines().enumerate().map(|(i, l)| (i + 1, l)))
}

fn parse_error(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        line,
        message: message.into(),
    }
}

/// Parses one raw input line. Blank lines yield `None`.
pub fn parse_raw_line(line: &str, format: RawFormat, default_language: &str) -> std::result::Result<Option<RawPost>, String> {
    let line = line.strip_suffix('\r').unwrap_or(line);
    if line.trim().is_empty() {
        return Ok(None);
    }
    match format {
        RawFormat::Plain => Ok(Some(RawPost::plain(line, default_language))),
        RawFormat::Tsv => {
            let mut fields = line.splitn(3, '\t');
            let (Some(lang), Some(flag), Some(text)) = (fields.next(), fields.next(), fields.next()) else {
                return Err("expected 3 tab-separated fields: language, retweet flag, text".into());
            };
            let is_retweet = match flag.trim() {
                "0" => false,
                "1" => true,
                other => return Err(format!("retweet flag must be 0 or 1, got {other:?}")),
            };
            if text.trim().is_empty() {
                return Err("empty text field".into());
            }
            Ok(Some(RawPost {
                text: text.to_string(),
                is_retweet: Some(is_retweet),
                language_tag: lang.trim().to_string(),
            }))
        }
    }
}

pub fn read_raw_posts(path: &Path, format: RawFormat, default_language: &str) -> Result<Vec<RawPost>> {
    let mut posts = Vec::new();
    for (n, line) in open_lines(path)? {
        let line = line.map_err(|e| parse_error(path, n, e.to_string()))?;
        match parse_raw_line(&line, format, default_language) {
            Ok(Some(p)) => posts.push(p),
            Ok(None) => {}
            Err(msg) => return Err(parse_error(path, n, msg)),
        }
    }
    Ok(posts)
}

/// Formats one labeled line (without the newline).
pub fn format_labeled(tags: &[String], text: &str) -> String {
    format!("{}\t{}", tags.join(","), text)
}

pub fn write_labeled(path: &Path, posts: &[CleanedPost]) -> Result<()> {
    let mut out = String::new();
    for p in posts {
        out.push_str(&format_labeled(&p.hashtags, &p.text));
        out.push('\n');
    }
    write_atomic(path, out.as_bytes())
}

/// Reads a labeled file back into cleaned posts (tag strings, not indices).
pub fn read_labeled(path: &Path) -> Result<Vec<CleanedPost>> {
    let mut posts = Vec::new();
    for (n, line) in open_lines(path)? {
        let line = line.map_err(|e| parse_error(path, n, e.to_string()))?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.trim().is_empty() {
            continue;
        }
        let Some((tags, text)) = line.split_once('\t') else {
            return Err(parse_error(path, n, "expected `tags<TAB>text`"));
        };
        let hashtags: Vec<String> = tags
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(String::from)
            .collect();
        if hashtags.is_empty() {
            return Err(parse_error(path, n, "no labels"));
        }
        if text.trim().is_empty() {
            return Err(parse_error(path, n, "empty text"));
        }
        posts.push(CleanedPost {
            text: text.to_string(),
            hashtags,
        });
    }
    Ok(posts)
}

/// Writes via a temporary sibling file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::Config(format!("not a file path: {}", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(file_name);
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    {
        let mut f = fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
        f.write_all(bytes).map_err(|e| Error::io(&tmp, e))?;
        f.sync_all().map_err(|e| Error::io(&tmp, e))?;
    }
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DatasetSplit<T> {
    pub train: Vec<T>,
    pub validation: Vec<T>,
    pub test: Vec<T>,
}

/// Seeded shuffle, then the first `test` items form the test split, the next
/// `validation` items the validation split, and the rest the training split.
pub fn split_dataset<T>(mut items: Vec<T>, validation: usize, test: usize, seed: u64) -> Result<DatasetSplit<T>> {
    if validation + test >= items.len() {
        return Err(Error::Data(format!(
            "{} posts cannot fill validation ({validation}) and test ({test}) splits with training data left over",
            items.len()
        )));
    }
    SeededRng::new(seed).shuffle(&mut items);
    let rest = items.split_off(test);
    let test_split = items;
    let mut validation_split = rest;
    let train = validation_split.split_off(validation);
    Ok(DatasetSplit {
        train,
        validation: validation_split,
        test: test_split,
    })
}

/// Indices into a test split of the `k` posts with the most and the fewest
/// out-of-vocabulary tokens.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OovSelection {
    pub rare: Vec<usize>,
    pub frequent: Vec<usize>,
    pub oov_counts: Vec<usize>,
}

pub fn select_oov_testsets(test: &[LabeledExample], vocab: &WordVocab, k: usize) -> Result<OovSelection> {
    if test.len() < 2 * k {
        return Err(Error::Data(format!(
            "test split has {} examples, need at least {} for two sets of {k}",
            test.len(),
            2 * k
        )));
    }
    let oov_counts: Vec<usize> = test.iter().map(|e| vocab.oov_count(&e.text)).collect();
    let mut order: Vec<usize> = (0..test.len()).collect();
    // stable sorts keep example order among equal counts
    order.sort_by(|&a, &b| oov_counts[b].cmp(&oov_counts[a]));
    let rare = order[..k].to_vec();
    order.sort_by(|&a, &b| oov_counts[a].cmp(&oov_counts[b]));
    let frequent = order[..k].to_vec();
    Ok(OovSelection {
        rare,
        frequent,
        oov_counts,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncodedExample {
    pub sequence: EncodedSequence,
    pub labels: Vec<usize>,
}

/// Examples encoded against one symbol table and label inventory.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncodedDataset {
    pub examples: Vec<EncodedExample>,
    pub table_size: usize,
    pub num_labels: usize,
    /// Examples removed upstream because none of their tags was in the label set.
    pub dropped: usize,
}

impl EncodedDataset {
    pub fn encode(examples: &[LabeledExample], table: &SymbolTable, num_labels: usize, dropped: usize) -> Result<Self> {
        let examples = examples
            .iter()
            .map(|e| {
                if e.labels.is_empty() {
                    return Err(Error::Data(format!("example {:?} has no labels", e.text)));
                }
                if let Some(&bad) = e.labels.iter().find(|&&l| l >= num_labels) {
                    return Err(Error::Data(format!("label index {bad} outside {num_labels} labels")));
                }
                Ok(EncodedExample {
                    sequence: table.encode(&e.text)?,
                    labels: e.labels.clone(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(EncodedDataset {
            examples,
            table_size: table.size(),
            num_labels,
            dropped,
        })
    }

    /// Assigns labels from `labels` and encodes, dropping posts whose tags
    /// are all outside the set.
    pub fn from_posts(posts: &[CleanedPost], table: &SymbolTable, labels: &LabelSet) -> Result<Self> {
        let (examples, dropped) = labels.assign(posts);
        EncodedDataset::encode(&examples, table, labels.len(), dropped)
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn subset(&self, indices: &[usize]) -> EncodedDataset {
        EncodedDataset {
            examples: indices.iter().map(|&i| self.examples[i].clone()).collect(),
            table_size: self.table_size,
            num_labels: self.num_labels,
            dropped: 0,
        }
    }
}

/// One padded mini-batch.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Batch {
    /// Positions of the batch rows in the source dataset.
    pub ids: Vec<usize>,
    pub sequences: SequenceBatch,
    pub targets: TargetMatrix,
}

pub fn batch_from_ids(data: &EncodedDataset, ids: &[usize]) -> Result<Batch> {
    let sequences = SequenceBatch::from_sequences(ids.iter().map(|&i| &data.examples[i].sequence))?;
    let label_sets: Vec<&[usize]> = ids.iter().map(|&i| data.examples[i].labels.as_slice()).collect();
    let targets = TargetMatrix::from_label_sets(&label_sets, data.num_labels)?;
    Ok(Batch {
        ids: ids.to_vec(),
        sequences,
        targets,
    })
}

/// Splits the dataset into batches of at most `batch_size` rows. With an
/// RNG the order is a fresh seeded permutation; without, dataset order.
/// The last batch may be short.
pub fn make_batches(data: &EncodedDataset, batch_size: usize, rng: Option<&mut SeededRng>) -> Result<Vec<Batch>> {
    if batch_size == 0 {
        return Err(Error::Config("batch size must be positive".into()));
    }
    let mut order: Vec<usize> = (0..data.len()).collect();
    if let Some(rng) = rng {
        rng.shuffle(&mut order);
    }
    order.chunks(batch_size).map(|ids| batch_from_ids(data, ids)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layers::Alphabet;

    fn labeled(text: &str, labels: &[usize]) -> LabeledExample {
        LabeledExample {
            text: text.into(),
            labels: labels.to_vec(),
        }
    }

    fn toy_dataset(texts: &[&str]) -> EncodedDataset {
        let table = SymbolTable::Chars(Alphabet::build(texts.iter().copied()));
        let ex: Vec<_> = texts.iter().enumerate().map(|(i, t)| labeled(t, &[i % 3])).collect();
        EncodedDataset::encode(&ex, &table, 3, 0).unwrap()
    }

    #[test]
    fn raw_line_parsing() {
        let p = parse_raw_line("en\t0\thello\tworld #x", RawFormat::Tsv, "en").unwrap().unwrap();
        assert_eq!(p.text, "hello\tworld #x");
        assert_eq!(p.is_retweet, Some(false));
        assert!(parse_raw_line("en\t2\thi", RawFormat::Tsv, "en").is_err());
        assert!(parse_raw_line("en\thi", RawFormat::Tsv, "en").is_err());
        assert_eq!(parse_raw_line("   ", RawFormat::Tsv, "en").unwrap(), None);
        let p = parse_raw_line("just text #x", RawFormat::Plain, "en").unwrap().unwrap();
        assert_eq!(p.is_retweet, None);
        assert_eq!(p.language_tag, "en");
    }

    #[test]
    fn parse_error_names_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("raw.tsv");
        fs::write(&path, "en\t0\tok #a\nen\tx\tbad\n").unwrap();
        let err = read_raw_posts(&path, RawFormat::Tsv, "en").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn labeled_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("train.tsv");
        let posts = vec![
            CleanedPost {
                text: "so hot !url".into(),
                hashtags: vec!["summer".into(), "sun".into()],
            },
            CleanedPost {
                text: "yum 🍳".into(),
                hashtags: vec!["food".into()],
            },
        ];
        write_labeled(&path, &posts).unwrap();
        assert_eq!(read_labeled(&path).unwrap(), posts);
    }

    #[test]
    fn split_sizes_and_disjointness() {
        let items: Vec<usize> = (0..20).collect();
        let s = split_dataset(items, 3, 5, 9).unwrap();
        assert_eq!((s.train.len(), s.validation.len(), s.test.len()), (12, 3, 5));
        let mut all: Vec<usize> = s.train.iter().chain(&s.validation).chain(&s.test).copied().collect();
        all.sort();
        assert_eq!(all, (0..20).collect::<Vec<_>>());
        assert_eq!(split_dataset((0..20).collect(), 3, 5, 9).unwrap(), s);
        assert!(split_dataset((0..5).collect::<Vec<usize>>(), 2, 3, 0).is_err());
    }

    #[test]
    fn oov_selection_toy() {
        let vocab = WordVocab::build(["a b c"], 10).vocab;
        let test = vec![labeled("a b", &[0]), labeled("x y", &[0]), labeled("p q r s t", &[0])];
        let sel = select_oov_testsets(&test, &vocab, 1).unwrap();
        assert_eq!(sel.oov_counts, vec![0, 2, 5]);
        assert_eq!(sel.rare, vec![2]);
        assert_eq!(sel.frequent, vec![0]);
        assert!(select_oov_testsets(&test, &vocab, 2).is_err());
    }

    #[test]
    fn oov_ties_follow_example_order() {
        let vocab = WordVocab::build(["a"], 10).vocab;
        let test = vec![
            labeled("z", &[0]),
            labeled("a", &[0]),
            labeled("y", &[0]),
            labeled("a", &[0]),
        ];
        let sel = select_oov_testsets(&test, &vocab, 2).unwrap();
        assert_eq!(sel.rare, vec![0, 2]);
        assert_eq!(sel.frequent, vec![1, 3]);
    }

    #[test]
    fn batch_padding_and_mask() {
        let data = toy_dataset(&["abc", "abcde"]);
        let batches = make_batches(&data, 2, None).unwrap();
        assert_eq!(batches.len(), 1);
        let b = &batches[0];
        assert_eq!((b.sequences.batch_size(), b.sequences.max_len()), (2, 5));
        let mask = b.sequences.mask();
        assert_eq!(mask.as_slice().iter().filter(|&&v| v == 0.0).count(), 2);
        assert_eq!(b.targets.gold(1), vec![1]);
    }

    #[test]
    fn seeded_batches_partition_the_data() {
        let texts: Vec<String> = (0..11).map(|i| format!("t{i}")).collect();
        let refs: Vec<&str> = texts.iter().map(String::as_str).collect();
        let data = toy_dataset(&refs);
        let a = make_batches(&data, 4, Some(&mut SeededRng::new(3))).unwrap();
        let b = make_batches(&data, 4, Some(&mut SeededRng::new(3))).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 3);
        let mut ids: Vec<usize> = a.iter().flat_map(|b| b.ids.clone()).collect();
        ids.sort();
        assert_eq!(ids, (0..11).collect::<Vec<_>>());
    }

    #[test]
    fn unlabeled_example_is_rejected() {
        let table = SymbolTable::Chars(Alphabet::build(["ab"]));
        assert!(EncodedDataset::encode(&[labeled("ab", &[])], &table, 2, 0).is_err());
    }

    #[test]
    fn unseen_test_symbols_map_to_unk() {
        let table = SymbolTable::Chars(Alphabet::build(["ab"]));
        let d = EncodedDataset::encode(&[labeled("a😀", &[0])], &table, 2, 0).unwrap();
        assert_eq!(d.examples[0].sequence.indices(), &[2, crate::layers::UNK]);
    }
}
