//! Full model: encoder plus softmax head, the joint loss/gradient, and the
//! closed-form parameter count.

use crate::error::{Error, Result};
use crate::layers::{self, EncodedSequence, EncoderCache, EncoderParams, ModelKind, SequenceBatch, SymbolTable};
use crate::objective::{self, LossValue, SoftmaxParams, TargetMatrix};
use crate::tensor::{Matrix, SeededRng, TensorView};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModelDims {
    /// Rows of the embedding table, reserved rows included.
    pub table_size: usize,
    pub d_c: usize,
    pub d_h: usize,
    pub d_t: usize,
    pub labels: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams {
    pub encoder: EncoderParams,
    pub softmax: SoftmaxParams,
}

/// How the L2 penalty is applied.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Regularization {
    pub lambda: f64,
    pub include_biases: bool,
}

impl ModelParams {
    pub fn zeros(dims: ModelDims) -> Self {
        ModelParams {
            encoder: EncoderParams::zeros(dims.table_size, dims.d_c, dims.d_h, dims.d_t),
            softmax: SoftmaxParams::zeros(dims.labels, dims.d_t),
        }
    }

    /// Gaussian weights with standard deviation `sigma`, zero biases. Draw
    /// order follows [`ModelParams::tensors`].
    pub fn init(dims: ModelDims, sigma: f64, rng: &mut SeededRng) -> Result<Self> {
        let params = ModelParams {
            encoder: EncoderParams::init(dims.table_size, dims.d_c, dims.d_h, dims.d_t, sigma, rng)?,
            softmax: SoftmaxParams::init(dims.labels, dims.d_t, sigma, rng)?,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn dims(&self) -> ModelDims {
        ModelDims {
            table_size: self.encoder.table_size(),
            d_c: self.encoder.input_dim(),
            d_h: self.encoder.hidden_dim(),
            d_t: self.encoder.output_dim(),
            labels: self.softmax.num_labels(),
        }
    }

    pub fn zeros_like(&self) -> Self {
        ModelParams::zeros(self.dims())
    }

    pub fn validate(&self) -> Result<()> {
        self.encoder.validate()?;
        self.softmax.validate()?;
        if self.softmax.input_dim() != self.encoder.output_dim() {
            return Err(Error::Shape {
                op: "softmax input",
                left: self.softmax.w_out.shape(),
                right: (self.softmax.num_labels(), self.encoder.output_dim()),
            });
        }
        if self.encoder.output_dim() != self.encoder.hidden_dim() {
            return Err(Error::Config("d_t must equal d_h".into()));
        }
        Ok(())
    }

    /// Every learnable tensor in storage order: encoder tensors, then
    /// `w_out`, `b_out`.
    pub fn tensors(&self) -> Vec<TensorView<'_>> {
        let mut out = self.encoder.tensors();
        out.extend(self.softmax.tensors());
        out
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out = self.encoder.tensors_mut();
        out.extend(self.softmax.tensors_mut());
        out
    }

    pub fn num_scalars(&self) -> usize {
        self.tensors().iter().map(|t| t.data.len()).sum()
    }

    pub fn squared_norm(&self, include_biases: bool) -> f64 {
        self.tensors()
            .iter()
            .filter(|t| include_biases || !t.is_bias)
            .flat_map(|t| t.data.iter())
            .map(|v| v * v)
            .sum()
    }

    pub fn is_finite(&self) -> bool {
        self.tensors().iter().all(|t| t.data.iter().all(|v| v.is_finite()))
    }

    /// `self += scale · other`.
    pub fn add_scaled(&mut self, other: &ModelParams, scale: f64) -> Result<()> {
        let src = other.tensors();
        let mut dst = self.tensors_mut();
        if src.len() != dst.len() {
            return Err(Error::State("parameter sets differ in layout".into()));
        }
        for (d, s) in dst.iter_mut().zip(&src) {
            if d.len() != s.data.len() {
                return Err(Error::Shape {
                    op: "add_scaled",
                    left: (d.len(), 1),
                    right: (s.data.len(), 1),
                });
            }
            for (x, y) in d.iter_mut().zip(s.data) {
                *x += scale * y;
            }
        }
        Ok(())
    }

    /// Adds the penalty gradient `2λΘ` (biases skipped if excluded).
    pub fn add_l2_grad(&mut self, theta: &ModelParams, reg: Regularization) {
        let src = theta.tensors();
        for (g, t) in self.tensors_mut().into_iter().zip(&src) {
            if reg.include_biases || !t.is_bias {
                objective::add_l2_grad(g, t.data, reg.lambda);
            }
        }
    }
}

/// Activations of one batched forward pass.
#[derive(Clone, Debug)]
pub struct ForwardPass {
    pub embeddings: Matrix,
    pub posteriors: Matrix,
    pub cache: EncoderCache,
}

pub fn forward(params: &ModelParams, batch: &SequenceBatch) -> Result<ForwardPass> {
    let (embeddings, cache) = layers::forward(&params.encoder, batch)?;
    let posteriors = objective::posteriors(&params.softmax, &embeddings)?;
    Ok(ForwardPass {
        embeddings,
        posteriors,
        cache,
    })
}

pub fn loss(
    params: &ModelParams,
    batch: &SequenceBatch,
    targets: &TargetMatrix,
    reg: Regularization,
) -> Result<LossValue> {
    let pass = forward(params, batch)?;
    objective::loss(
        &pass.posteriors,
        targets,
        params.squared_norm(reg.include_biases),
        reg.lambda,
    )
}

/// Objective value and its gradient with respect to every parameter.
pub fn loss_and_grad(
    params: &ModelParams,
    batch: &SequenceBatch,
    targets: &TargetMatrix,
    reg: Regularization,
) -> Result<(LossValue, ModelParams)> {
    let pass = forward(params, batch)?;
    let value = objective::loss(
        &pass.posteriors,
        targets,
        params.squared_norm(reg.include_biases),
        reg.lambda,
    )?;
    let head = objective::loss_grad(&params.softmax, &pass.embeddings, &pass.posteriors, targets)?;
    let encoder = layers::backward(&params.encoder, &pass.cache, &head.d_embeddings)?;
    let mut grads = ModelParams {
        encoder,
        softmax: head.params,
    };
    grads.add_l2_grad(params, reg);
    Ok((value, grads))
}

/// Trained model bundled with its symbol and label tables.
#[derive(Clone, Debug, PartialEq)]
pub struct Tweet2Vec {
    pub table: SymbolTable,
    pub labels: Vec<String>,
    pub params: ModelParams,
}

impl Tweet2Vec {
    pub fn kind(&self) -> ModelKind {
        self.table.kind()
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.table.size() != self.params.encoder.table_size() {
            return Err(Error::Config(format!(
                "symbol table has {} entries but the embedding has {} rows",
                self.table.size(),
                self.params.encoder.table_size()
            )));
        }
        if self.labels.len() != self.params.softmax.num_labels() {
            return Err(Error::Config(format!(
                "label table has {} entries but the softmax has {} rows",
                self.labels.len(),
                self.params.softmax.num_labels()
            )));
        }
        Ok(())
    }

    pub fn encode_text(&self, text: &str) -> Result<EncodedSequence> {
        self.table.encode(text)
    }

    /// Post embeddings for a batch of texts, one row each.
    pub fn embed(&self, texts: &[&str]) -> Result<Matrix> {
        let seqs = texts
            .iter()
            .map(|t| self.encode_text(t))
            .collect::<Result<Vec<_>>>()?;
        layers::encode_batch(&self.params.encoder, &SequenceBatch::from_sequences(&seqs)?)
    }

    pub fn posteriors(&self, texts: &[&str]) -> Result<Matrix> {
        objective::posteriors(&self.params.softmax, &self.embed(texts)?)
    }
}

/// Which embedding row count [`count_params`] uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CountMode {
    /// Rows actually allocated: symbols plus PAD and UNK.
    Actual,
    /// Characters only for the character model; words plus one UNK row for
    /// the word model.
    Raw,
}

pub fn embedding_rows(kind: ModelKind, symbols: usize, mode: CountMode) -> usize {
    match (mode, kind) {
        (CountMode::Actual, _) => symbols + layers::RESERVED,
        (CountMode::Raw, ModelKind::Character) => symbols,
        (CountMode::Raw, ModelKind::Word) => symbols + 1,
    }
}

/// `rows·d_c + 2·3·(d_h·d_c + d_h² + d_h) + 2·d_t·d_h + d_t + L·d_t + L`.
pub fn count_params(embedding_rows: usize, d_c: usize, d_h: usize, d_t: usize, labels: usize) -> u64 {
    let (rows, d_c, d_h, d_t, labels) = (
        embedding_rows as u64,
        d_c as u64,
        d_h as u64,
        d_t as u64,
        labels as u64,
    );
    rows * d_c + 2 * 3 * (d_h * d_c + d_h * d_h + d_h) + 2 * d_t * d_h + d_t + labels * d_t + labels
}
