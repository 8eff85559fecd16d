//! Self-describing model checkpoints.
//!
//! A checkpoint is a UTF-8 text header followed by a binary payload:
//!
//! ```text
//! tweet2vec-checkpoint 1
//! kind character
//! d_c 150
//! d_h 500
//! d_t 500
//! symbols 2831
//! labels 2039
//! prng chacha8
//! seed 7
//! config batch_size 64
//! ...
//! symbol U+0061           (character model: one code point per line)
//! symbol hello            (word model: one token per line)
//! label nba
//! tensor embedding 2831 150
//! ...
//! payload 15597556
//! end
//! <payload bytes>
//! ```
//!
//! `symbols` counts embedding rows, PAD and UNK included; `symbol` lines list
//! the remaining entries in index order. Tensors appear in
//! [`ModelParams::tensors`] order: embedding, the forward GRU (`w_r u_r b_r
//! w_z u_z b_z w_h u_h b_h`), the backward GRU, `w_f`, `w_b`, `b_combine`,
//! `w_out`, `b_out`. The payload is their row-major values as little-endian
//! IEEE-754 binary32.

use std::fmt::Write as _;
use std::path::Path;

use crate::data::write_atomic;
use crate::error::{Error, Result};
use crate::layers::{Alphabet, ModelKind, SymbolTable, WordVocab};
use crate::model::{ModelDims, ModelParams, Tweet2Vec};
use crate::tensor::PRNG_ID;

pub const MAGIC: &str = "tweet2vec-checkpoint";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    pub model: Tweet2Vec,
    pub prng: String,
    pub seed: u64,
    /// Training settings echoed into the header, in insertion order.
    pub config: Vec<(String, String)>,
}

impl Checkpoint {
    pub fn new(model: Tweet2Vec, seed: u64, config: Vec<(String, String)>) -> Self {
        Checkpoint {
            model,
            prng: PRNG_ID.to_string(),
            seed,
            config,
        }
    }

    pub fn dims(&self) -> ModelDims {
        self.model.params.dims()
    }

    pub fn config_value(&self, key: &str) -> Option<&str> {
        self.config.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        self.model.validate()?;
        let dims = self.dims();
        let mut h = String::new();
        let _ = writeln!(h, "{MAGIC} {FORMAT_VERSION}");
        let _ = writeln!(h, "kind {}", self.model.kind().as_str());
        let _ = writeln!(h, "d_c {}", dims.d_c);
        let _ = writeln!(h, "d_h {}", dims.d_h);
        let _ = writeln!(h, "d_t {}", dims.d_t);
        let _ = writeln!(h, "symbols {}", dims.table_size);
        let _ = writeln!(h, "labels {}", dims.labels);
        let _ = writeln!(h, "prng {}", token(&self.prng)?);
        let _ = writeln!(h, "seed {}", self.seed);
        for (k, v) in &self.config {
            if v.contains('\n') {
                return Err(Error::Checkpoint(format!("config value for {k:?} spans lines")));
            }
            let _ = writeln!(h, "config {} {v}", token(k)?);
        }
        match &self.model.table {
            SymbolTable::Chars(a) => {
                for c in a.chars() {
                    let _ = writeln!(h, "symbol U+{:04X}", *c as u32);
                }
            }
            SymbolTable::Words(v) => {
                for w in v.words() {
                    let _ = writeln!(h, "symbol {}", token(w)?);
                }
            }
        }
        for l in &self.model.labels {
            let _ = writeln!(h, "label {}", token(l)?);
        }
        let tensors = self.model.params.tensors();
        let mut scalars = 0;
        for t in &tensors {
            let _ = writeln!(h, "tensor {} {} {}", t.name, t.shape.0, t.shape.1);
            scalars += t.data.len();
        }
        let _ = writeln!(h, "payload {}", scalars * 4);
        h.push_str("end\n");

        let mut bytes = h.into_bytes();
        bytes.reserve(scalars * 4);
        for t in &tensors {
            for &v in t.data {
                bytes.extend_from_slice(&(v as f32).to_le_bytes());
            }
        }
        Ok(bytes)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut reader = HeaderReader { bytes, pos: 0, line: 0 };
        let first = reader.next_line()?;
        let version = first
            .strip_prefix(MAGIC)
            .and_then(|r| r.strip_prefix(' '))
            .ok_or_else(|| bad(1, "not a tweet2vec checkpoint"))?;
        if version != FORMAT_VERSION.to_string() {
            return Err(bad(1, &format!("unsupported format version {version}")));
        }
        let kind: ModelKind = reader.field("kind")?.parse()?;
        let d_c = reader.number("d_c")?;
        let d_h = reader.number("d_h")?;
        let d_t = reader.number("d_t")?;
        let symbols = reader.number("symbols")?;
        let labels = reader.number("labels")?;
        let prng = reader.field("prng")?.to_string();
        let seed = reader.number("seed")? as u64;
        let dims = ModelDims {
            table_size: symbols,
            d_c,
            d_h,
            d_t,
            labels,
        };

        let mut config = Vec::new();
        let mut symbol_lines = Vec::new();
        let mut label_names = Vec::new();
        let mut tensor_lines = Vec::new();
        let payload_len;
        loop {
            let line = reader.next_line()?;
            let (key, rest) = line.split_once(' ').unwrap_or((line, ""));
            match key {
                "config" => {
                    let (k, v) = rest.split_once(' ').unwrap_or((rest, ""));
                    config.push((k.to_string(), v.to_string()));
                }
                "symbol" => symbol_lines.push(rest.to_string()),
                "label" => label_names.push(rest.to_string()),
                "tensor" => tensor_lines.push((reader.line, rest.to_string())),
                "payload" => {
                    payload_len = parse_usize(rest, reader.line)?;
                    break;
                }
                _ => return Err(bad(reader.line, &format!("unexpected header line {line:?}"))),
            }
        }
        if reader.next_line()? != "end" {
            return Err(bad(reader.line, "expected end of header"));
        }

        let table = match kind {
            ModelKind::Character => SymbolTable::Chars(Alphabet::from_chars(
                symbol_lines
                    .iter()
                    .map(|s| parse_code_point(s))
                    .collect::<Result<Vec<_>>>()?,
            )?),
            ModelKind::Word => SymbolTable::Words(WordVocab::from_words(symbol_lines)?),
        };
        if table.size() != symbols {
            return Err(Error::Checkpoint(format!(
                "header declares {symbols} symbols but lists {}",
                table.size()
            )));
        }
        if label_names.len() != labels {
            return Err(Error::Checkpoint(format!(
                "header declares {labels} labels but lists {}",
                label_names.len()
            )));
        }

        let mut params = ModelParams::zeros(dims);
        let expected: Vec<(String, (usize, usize))> = params
            .tensors()
            .iter()
            .map(|t| (t.name.clone(), t.shape))
            .collect();
        if tensor_lines.len() != expected.len() {
            return Err(Error::Checkpoint(format!(
                "expected {} tensors, found {}",
                expected.len(),
                tensor_lines.len()
            )));
        }
        for ((line_no, line), (name, shape)) in tensor_lines.iter().zip(&expected) {
            let want = format!("{name} {} {}", shape.0, shape.1);
            if *line != want {
                return Err(bad(*line_no, &format!("expected tensor {want:?}, found {line:?}")));
            }
        }

        let payload = &bytes[reader.pos..];
        let scalars = params.num_scalars();
        if payload_len != scalars * 4 || payload.len() != payload_len {
            return Err(Error::Checkpoint(format!(
                "payload holds {} bytes, expected {}",
                payload.len(),
                scalars * 4
            )));
        }
        let mut values = payload
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64);
        for slot in params.tensors_mut().into_iter().flatten() {
            *slot = values.next().expect("payload length checked");
        }

        let model = Tweet2Vec {
            table,
            labels: label_names,
            params,
        };
        model.validate()?;
        Ok(Checkpoint {
            model,
            prng,
            seed,
            config,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_atomic(path, &self.to_bytes()?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Checkpoint::from_bytes(&bytes).map_err(|e| match e {
            Error::Checkpoint(m) => Error::Checkpoint(format!("{}: {m}", path.display())),
            other => other,
        })
    }
}

fn token(s: &str) -> Result<&str> {
    if s.is_empty() || s.chars().any(char::is_whitespace) {
        return Err(Error::Checkpoint(format!("{s:?} cannot be stored as a header token")));
    }
    Ok(s)
}

fn bad(line: usize, message: &str) -> Error {
    Error::Checkpoint(format!("header line {line}: {message}"))
}

fn parse_usize(s: &str, line: usize) -> Result<usize> {
    s.parse().map_err(|_| bad(line, &format!("expected a number, found {s:?}")))
}

fn parse_code_point(s: &str) -> Result<char> {
    s.strip_prefix("U+")
        .and_then(|hex| u32::from_str_radix(hex, 16).ok())
        .and_then(char::from_u32)
        .ok_or_else(|| Error::Checkpoint(format!("invalid code point {s:?}")))
}

struct HeaderReader<'a> {
    bytes: &'a [u8],
    pos: usize,
    line: usize,
}

impl<'a> HeaderReader<'a> {
    fn next_line(&mut self) -> Result<&'a str> {
        let rest = &self.bytes[self.pos..];
        let end = rest
            .iter()
            .position(|&b| b == b'\n')
            .ok_or_else(|| bad(self.line + 1, "truncated header"))?;
        self.pos += end + 1;
        self.line += 1;
        std::str::from_utf8(&rest[..end]).map_err(|_| bad(self.line, "header is not UTF-8"))
    }

    fn field(&mut self, key: &str) -> Result<&'a str> {
        let line = self.next_line()?;
        line.strip_prefix(key)
            .and_then(|r| r.strip_prefix(' '))
            .ok_or_else(|| bad(self.line, &format!("expected {key:?}, found {line:?}")))
    }

    fn number(&mut self, key: &str) -> Result<usize> {
        let v = self.field(key)?;
        parse_usize(v, self.line)
    }
}
