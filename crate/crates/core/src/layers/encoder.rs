//! Bidirectional GRU encoder with a linear combine layer.
//!
//! The forward GRU reads the sequence left to right, the backward GRU reads
//! it right to left, and the two final states are mixed into the post
//! embedding `e = W_f h_fwd + W_b h_bwd + b`. Both GRUs start from a zero
//! state.
//!
//! Batches are right-padded. A padded step leaves the state untouched, so a
//! padded row encodes exactly as the unpadded sequence would.

use crate::error::{Error, Result};
use crate::layers::gru::{step_backward, step_forward, gru_step, GruParams, GruStep};
use crate::layers::vocab::{EncodedSequence, PAD};
use crate::tensor::{gaussian_init, Matrix, SeededRng, TensorView};

#[derive(Clone, Debug, PartialEq)]
pub struct EncoderParams {
    /// One row per symbol, `table_size × d_c`.
    pub embedding: Matrix,
    pub forward: GruParams,
    pub backward: GruParams,
    pub w_f: Matrix,
    pub w_b: Matrix,
    pub b_combine: Vec<f64>,
}

impl EncoderParams {
    pub fn zeros(table_size: usize, d_c: usize, d_h: usize, d_t: usize) -> Self {
        EncoderParams {
            embedding: Matrix::zeros(table_size, d_c),
            forward: GruParams::zeros(d_c, d_h),
            backward: GruParams::zeros(d_c, d_h),
            w_f: Matrix::zeros(d_t, d_h),
            w_b: Matrix::zeros(d_t, d_h),
            b_combine: vec![0.0; d_t],
        }
    }

    pub fn init(
        table_size: usize,
        d_c: usize,
        d_h: usize,
        d_t: usize,
        sigma: f64,
        rng: &mut SeededRng,
    ) -> Result<Self> {
        if d_t != d_h {
            return Err(Error::Config(format!(
                "embedding size d_t ({d_t}) must equal hidden size d_h ({d_h})"
            )));
        }
        Ok(EncoderParams {
            embedding: gaussian_init(table_size, d_c, sigma, rng)?,
            forward: GruParams::init(d_c, d_h, sigma, rng)?,
            backward: GruParams::init(d_c, d_h, sigma, rng)?,
            w_f: gaussian_init(d_t, d_h, sigma, rng)?,
            w_b: gaussian_init(d_t, d_h, sigma, rng)?,
            b_combine: vec![0.0; d_t],
        })
    }

    pub fn table_size(&self) -> usize {
        self.embedding.rows()
    }

    pub fn input_dim(&self) -> usize {
        self.embedding.cols()
    }

    pub fn hidden_dim(&self) -> usize {
        self.forward.hidden_dim()
    }

    pub fn output_dim(&self) -> usize {
        self.w_f.rows()
    }

    pub fn validate(&self) -> Result<()> {
        self.forward.validate()?;
        self.backward.validate()?;
        let d_c = self.input_dim();
        let d_h = self.hidden_dim();
        let d_t = self.output_dim();
        for gru in [&self.forward, &self.backward] {
            if gru.input_dim() != d_c || gru.hidden_dim() != d_h {
                return Err(Error::Shape {
                    op: "encoder gru",
                    left: (gru.hidden_dim(), gru.input_dim()),
                    right: (d_h, d_c),
                });
            }
        }
        for w in [&self.w_f, &self.w_b] {
            if w.shape() != (d_t, d_h) {
                return Err(Error::Shape {
                    op: "combine weights",
                    left: w.shape(),
                    right: (d_t, d_h),
                });
            }
        }
        if self.b_combine.len() != d_t {
            return Err(Error::Shape {
                op: "combine bias",
                left: (self.b_combine.len(), 1),
                right: (d_t, 1),
            });
        }
        Ok(())
    }

    /// Learnable tensors in storage order: embedding, forward GRU, backward
    /// GRU, `W_f`, `W_b`, combine bias.
    pub fn tensors(&self) -> Vec<TensorView<'_>> {
        let mut out = vec![TensorView {
            name: "embedding".into(),
            shape: self.embedding.shape(),
            data: self.embedding.as_slice(),
            is_bias: false,
        }];
        for (prefix, gru) in [("forward", &self.forward), ("backward", &self.backward)] {
            for ((name, data), shape) in gru.tensors().into_iter().zip(gru.shapes()) {
                out.push(TensorView {
                    name: format!("{prefix}.{name}"),
                    shape,
                    data,
                    is_bias: name.starts_with("b_"),
                });
            }
        }
        out.push(TensorView {
            name: "w_f".into(),
            shape: self.w_f.shape(),
            data: self.w_f.as_slice(),
            is_bias: false,
        });
        out.push(TensorView {
            name: "w_b".into(),
            shape: self.w_b.shape(),
            data: self.w_b.as_slice(),
            is_bias: false,
        });
        out.push(TensorView {
            name: "b_combine".into(),
            shape: (self.b_combine.len(), 1),
            data: &self.b_combine,
            is_bias: true,
        });
        out
    }

    /// Mutable slices in the same order as [`EncoderParams::tensors`].
    pub fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out: Vec<&mut [f64]> = vec![self.embedding.as_mut_slice()];
        out.extend(self.forward.tensors_mut());
        out.extend(self.backward.tensors_mut());
        out.push(self.w_f.as_mut_slice());
        out.push(self.w_b.as_mut_slice());
        out.push(&mut self.b_combine);
        out
    }
}

/// Right-padded index matrix (`B × T`) with per-row lengths.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SequenceBatch {
    tokens: Vec<usize>,
    lengths: Vec<usize>,
    max_len: usize,
}

impl SequenceBatch {
    pub fn from_sequences<'a>(seqs: impl IntoIterator<Item = &'a EncodedSequence>) -> Result<Self> {
        let seqs: Vec<&EncodedSequence> = seqs.into_iter().collect();
        if seqs.is_empty() {
            return Err(Error::Data("empty batch".into()));
        }
        let max_len = seqs.iter().map(|s| s.len()).max().unwrap_or(0);
        let mut tokens = vec![PAD; seqs.len() * max_len];
        let mut lengths = Vec::with_capacity(seqs.len());
        for (b, s) in seqs.iter().enumerate() {
            tokens[b * max_len..b * max_len + s.len()].copy_from_slice(s.indices());
            lengths.push(s.len());
        }
        Ok(SequenceBatch {
            tokens,
            lengths,
            max_len,
        })
    }

    pub fn batch_size(&self) -> usize {
        self.lengths.len()
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn lengths(&self) -> &[usize] {
        &self.lengths
    }

    #[inline]
    pub fn token(&self, b: usize, t: usize) -> usize {
        self.tokens[b * self.max_len + t]
    }

    /// Row `b` of the index matrix, padding included.
    pub fn row(&self, b: usize) -> &[usize] {
        &self.tokens[b * self.max_len..(b + 1) * self.max_len]
    }

    #[inline]
    pub fn is_real(&self, b: usize, t: usize) -> bool {
        t < self.lengths[b]
    }

    /// 1.0 at real positions, 0.0 at padding.
    pub fn mask(&self) -> Matrix {
        let mut m = Matrix::zeros(self.batch_size(), self.max_len);
        for b in 0..self.batch_size() {
            for t in 0..self.lengths[b] {
                m.set(b, t, 1.0);
            }
        }
        m
    }

    fn check_bounds(&self, table_size: usize) -> Result<()> {
        for b in 0..self.batch_size() {
            for t in 0..self.lengths[b] {
                let index = self.token(b, t);
                if index >= table_size {
                    return Err(Error::Index {
                        index,
                        size: table_size,
                        position: t,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Per-step activations from a batched forward pass.
#[derive(Clone, Debug, Default)]
pub struct EncoderCache {
    batch: Option<SequenceBatch>,
    /// `forward_steps[b][t]` processed position `t`.
    forward_steps: Vec<Vec<GruStep>>,
    /// `backward_steps[b][k]` processed position `len_b - 1 - k`.
    backward_steps: Vec<Vec<GruStep>>,
    h_forward: Matrix,
    h_backward: Matrix,
}

impl EncoderCache {
    pub fn is_empty(&self) -> bool {
        self.batch.is_none()
    }

    /// Final forward-direction states, `B × d_h`.
    pub fn forward_states(&self) -> &Matrix {
        &self.h_forward
    }

    /// Final backward-direction states, `B × d_h`.
    pub fn backward_states(&self) -> &Matrix {
        &self.h_backward
    }
}

pub fn lookup(embedding: &Matrix, seq: &EncodedSequence) -> Result<Vec<Vec<f64>>> {
    seq.check_bounds(embedding.rows())?;
    Ok(seq
        .indices()
        .iter()
        .map(|&i| embedding.row(i).to_vec())
        .collect())
}

fn combine(p: &EncoderParams, h_f: &[f64], h_b: &[f64], out: &mut [f64]) {
    out.copy_from_slice(&p.b_combine);
    p.w_f.matvec_acc(h_f, out);
    p.w_b.matvec_acc(h_b, out);
}

/// Encodes one sequence by stepping each direction in turn.
pub fn encode(p: &EncoderParams, seq: &EncodedSequence) -> Result<Vec<f64>> {
    let xs = lookup(&p.embedding, seq)?;
    let d_h = p.hidden_dim();
    let mut h_f = vec![0.0; d_h];
    for x in &xs {
        h_f = gru_step(&p.forward, x, &h_f)?;
    }
    let mut h_b = vec![0.0; d_h];
    for x in xs.iter().rev() {
        h_b = gru_step(&p.backward, x, &h_b)?;
    }
    let mut e = vec![0.0; p.output_dim()];
    combine(p, &h_f, &h_b, &mut e);
    Ok(e)
}

pub fn encode_batch(p: &EncoderParams, batch: &SequenceBatch) -> Result<Matrix> {
    forward(p, batch).map(|(e, _)| e)
}

/// Batched forward pass returning `B × d_t` embeddings and the activation
/// cache needed by [`backward`].
pub fn forward(p: &EncoderParams, batch: &SequenceBatch) -> Result<(Matrix, EncoderCache)> {
    batch.check_bounds(p.table_size())?;
    let n = batch.batch_size();
    let d_h = p.hidden_dim();
    let mut h_f = Matrix::zeros(n, d_h);
    let mut h_b = Matrix::zeros(n, d_h);
    let mut forward_steps: Vec<Vec<GruStep>> =
        batch.lengths().iter().map(|&l| Vec::with_capacity(l)).collect();
    let mut backward_steps = forward_steps.clone();

    for t in 0..batch.max_len() {
        for b in 0..n {
            if !batch.is_real(b, t) {
                continue;
            }
            let x = p.embedding.row(batch.token(b, t));
            let step = step_forward(&p.forward, x, h_f.row(b));
            h_f.row_mut(b).copy_from_slice(&step.hidden);
            forward_steps[b].push(step);
        }
    }
    for t in (0..batch.max_len()).rev() {
        for b in 0..n {
            if !batch.is_real(b, t) {
                continue;
            }
            let x = p.embedding.row(batch.token(b, t));
            let step = step_forward(&p.backward, x, h_b.row(b));
            h_b.row_mut(b).copy_from_slice(&step.hidden);
            backward_steps[b].push(step);
        }
    }

    let mut e = Matrix::zeros(n, p.output_dim());
    for b in 0..n {
        combine(p, h_f.row(b), h_b.row(b), e.row_mut(b));
    }
    let cache = EncoderCache {
        batch: Some(batch.clone()),
        forward_steps,
        backward_steps,
        h_forward: h_f,
        h_backward: h_b,
    };
    Ok((e, cache))
}

/// Backpropagation through time. `d_e` is the gradient of the loss with
/// respect to the batch embeddings (`B × d_t`); the result holds gradients for
/// every encoder parameter. Embedding rows not referenced by the batch get
/// exactly zero. Examples are reduced in batch order.
pub fn backward(p: &EncoderParams, cache: &EncoderCache, d_e: &Matrix) -> Result<EncoderParams> {
    let batch = cache
        .batch
        .as_ref()
        .ok_or_else(|| Error::State("backward called without a recorded forward pass".into()))?;
    if d_e.shape() != (batch.batch_size(), p.output_dim()) {
        return Err(Error::Shape {
            op: "encoder backward",
            left: d_e.shape(),
            right: (batch.batch_size(), p.output_dim()),
        });
    }
    let d_h = p.hidden_dim();
    let d_c = p.input_dim();
    let mut grads = EncoderParams::zeros(p.table_size(), d_c, d_h, p.output_dim());
    let zeros = vec![0.0; d_h];
    let mut dx = vec![0.0; d_c];
    let mut dh_prev = vec![0.0; d_h];

    for b in 0..batch.batch_size() {
        let de = d_e.row(b);
        grads.w_f.outer_acc(de, cache.h_forward.row(b));
        grads.w_b.outer_acc(de, cache.h_backward.row(b));
        grads.b_combine.iter_mut().zip(de).for_each(|(g, d)| *g += d);

        let len = batch.lengths()[b];
        let directions = [
            (&p.forward, &mut grads.forward, &cache.forward_steps[b], &p.w_f, false),
            (&p.backward, &mut grads.backward, &cache.backward_steps[b], &p.w_b, true),
        ];
        for (gru, gru_grads, steps, w_out, reversed) in directions {
            let mut dh = vec![0.0; d_h];
            w_out.matvec_t_acc(de, &mut dh);
            for k in (0..len).rev() {
                let pos = if reversed { len - 1 - k } else { k };
                let token = batch.token(b, pos);
                let h_prev = if k == 0 { &zeros } else { &steps[k - 1].hidden };
                dx.iter_mut().for_each(|v| *v = 0.0);
                step_backward(
                    gru,
                    p.embedding.row(token),
                    h_prev,
                    &steps[k],
                    &dh,
                    gru_grads,
                    &mut dx,
                    &mut dh_prev,
                );
                grads
                    .embedding
                    .row_mut(token)
                    .iter_mut()
                    .zip(&dx)
                    .for_each(|(g, d)| *g += d);
                std::mem::swap(&mut dh, &mut dh_prev);
            }
        }
    }
    Ok(grads)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(v: &[usize]) -> EncodedSequence {
        EncodedSequence::new(v.to_vec()).unwrap()
    }

    fn random_encoder(seed: u64, table: usize, d_c: usize, d_h: usize) -> EncoderParams {
        let mut rng = SeededRng::new(seed);
        let mut p = EncoderParams::init(table, d_c, d_h, d_h, 0.5, &mut rng).unwrap();
        for gru in [&mut p.forward, &mut p.backward] {
            for b in [&mut gru.b_r, &mut gru.b_z, &mut gru.b_h] {
                b.iter_mut().for_each(|v| *v = rng.normal(0.3));
            }
        }
        p.b_combine.iter_mut().for_each(|v| *v = rng.normal(0.3));
        p
    }

    /// Unrolls both directions with explicit gate arithmetic.
    fn unrolled_oracle(p: &EncoderParams, s: &[usize]) -> Vec<f64> {
        fn run(g: &GruParams, emb: &Matrix, order: &[usize]) -> Vec<f64> {
            let d_h = g.hidden_dim();
            let sig = |v: f64| 1.0 / (1.0 + (-v).exp());
            let mut h = vec![0.0; d_h];
            for &sym in order {
                let x = emb.row(sym);
                let lin = |w: &Matrix, u: &Matrix, b: &[f64], hv: &[f64], i: usize| {
                    let mut a = b[i];
                    for j in 0..x.len() {
                        a += w.get(i, j) * x[j];
                    }
                    for j in 0..d_h {
                        a += u.get(i, j) * hv[j];
                    }
                    a
                };
                let r: Vec<f64> = (0..d_h).map(|i| sig(lin(&g.w_r, &g.u_r, &g.b_r, &h, i))).collect();
                let z: Vec<f64> = (0..d_h).map(|i| sig(lin(&g.w_z, &g.u_z, &g.b_z, &h, i))).collect();
                let rh: Vec<f64> = (0..d_h).map(|i| r[i] * h[i]).collect();
                let c: Vec<f64> = (0..d_h).map(|i| lin(&g.w_h, &g.u_h, &g.b_h, &rh, i).tanh()).collect();
                h = (0..d_h).map(|i| (1.0 - z[i]) * h[i] + z[i] * c[i]).collect();
            }
            h
        }
        let fwd = run(&p.forward, &p.embedding, s);
        let rev: Vec<usize> = s.iter().rev().copied().collect();
        let bwd = run(&p.backward, &p.embedding, &rev);
        (0..p.output_dim())
            .map(|i| {
                let mut v = p.b_combine[i];
                for j in 0..p.hidden_dim() {
                    v += p.w_f.get(i, j) * fwd[j] + p.w_b.get(i, j) * bwd[j];
                }
                v
            })
            .collect()
    }

    #[test]
    fn lookup_returns_rows() {
        let p = random_encoder(3, 6, 2, 3);
        let out = lookup(&p.embedding, &seq(&[4, 2, 4])).unwrap();
        assert_eq!(out.len(), 3);
        assert_eq!(out[0], p.embedding.row(4));
        assert_eq!(out[1], p.embedding.row(2));
        assert_eq!(out[0], out[2]);
        assert!(matches!(
            lookup(&p.embedding, &seq(&[2, 6])),
            Err(Error::Index { index: 6, position: 1, .. })
        ));
    }

    #[test]
    fn zero_network_outputs_bias() {
        let mut p = EncoderParams::zeros(5, 2, 3, 3);
        p.b_combine = vec![0.25, -1.0, 3.0];
        for s in [&[2usize][..], &[3, 4, 2, 2]] {
            assert_eq!(encode(&p, &seq(s)).unwrap(), p.b_combine);
        }
    }

    #[test]
    fn length_one_symmetric_params() {
        let mut p = random_encoder(11, 6, 3, 4);
        p.backward = p.forward.clone();
        p.w_b = p.w_f.clone();
        let e = encode(&p, &seq(&[3])).unwrap();
        let h = gru_step(&p.forward, p.embedding.row(3), &[0.0; 4]).unwrap();
        for i in 0..4 {
            let mut want = p.b_combine[i];
            for j in 0..4 {
                want += 2.0 * p.w_f.get(i, j) * h[j];
            }
            assert!((e[i] - want).abs() < 1e-12);
        }
    }

    #[test]
    fn five_symbols_match_unrolled_oracle() {
        // seed 2024, |table|=7, d_c=3, d_h=d_t=4
        let p = random_encoder(2024, 7, 3, 4);
        let s = [2, 5, 6, 2, 3];
        let got = encode(&p, &seq(&s)).unwrap();
        let want = unrolled_oracle(&p, &s);
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-12, "{g} vs {w}");
        }
    }

    #[test]
    fn padded_batch_matches_individual() {
        let p = random_encoder(5, 8, 3, 4);
        let seqs = [seq(&[2, 3, 4]), seq(&[7, 6, 5, 4, 3]), seq(&[2]), seq(&[2, 3, 4])];
        let batch = SequenceBatch::from_sequences(&seqs).unwrap();
        assert_eq!(batch.max_len(), 5);
        let e = encode_batch(&p, &batch).unwrap();
        for (b, s) in seqs.iter().enumerate() {
            let single = encode(&p, s).unwrap();
            for (x, y) in e.row(b).iter().zip(&single) {
                assert!((x - y).abs() < 1e-12);
            }
        }
        assert_eq!(e.row(0), e.row(3));
        let one = encode_batch(&p, &SequenceBatch::from_sequences([&seqs[1]]).unwrap()).unwrap();
        assert_eq!(one.row(0), e.row(1));
    }

    #[test]
    fn mask_marks_padding() {
        let batch = SequenceBatch::from_sequences(&[seq(&[2, 3, 4]), seq(&[2, 3, 4, 5, 6])]).unwrap();
        let m = batch.mask();
        assert_eq!(m.shape(), (2, 5));
        assert_eq!(m.row(0), &[1.0, 1.0, 1.0, 0.0, 0.0]);
        assert_eq!(m.row(1), &[1.0; 5]);
        assert_eq!(batch.row(0), &[2, 3, 4, PAD, PAD]);
    }

    #[test]
    fn backward_needs_forward() {
        let p = random_encoder(1, 5, 2, 3);
        let err = backward(&p, &EncoderCache::default(), &Matrix::zeros(1, 3)).unwrap_err();
        assert!(matches!(err, Error::State(_)));
    }

    #[test]
    fn zero_upstream_gives_zero_gradients() {
        let p = random_encoder(9, 6, 3, 4);
        let batch = SequenceBatch::from_sequences(&[seq(&[2, 3]), seq(&[4, 5, 2])]).unwrap();
        let (_, cache) = forward(&p, &batch).unwrap();
        let g = backward(&p, &cache, &Matrix::zeros(2, 4)).unwrap();
        assert!(g.tensors().iter().all(|t| t.data.iter().all(|&v| v == 0.0)));
    }

    #[test]
    fn untouched_embedding_rows_have_zero_gradient() {
        let p = random_encoder(9, 8, 3, 4);
        let batch = SequenceBatch::from_sequences(&[seq(&[2, 3]), seq(&[4, 5, 2])]).unwrap();
        let (_, cache) = forward(&p, &batch).unwrap();
        let mut d_e = Matrix::zeros(2, 4);
        d_e.as_mut_slice().iter_mut().enumerate().for_each(|(i, v)| *v = 0.1 * i as f64 - 0.3);
        let g = backward(&p, &cache, &d_e).unwrap();
        for row in [0usize, 1, 6, 7] {
            assert!(g.embedding.row(row).iter().all(|&v| v == 0.0), "row {row}");
        }
        assert!(g.embedding.row(2).iter().any(|&v| v != 0.0));
    }

    /// Central differences of `sum(d_e ⊙ encode_batch)` against the analytic
    /// backward pass; d_h=4, d_c=3, one length-6 sequence plus a shorter one.
    #[test]
    fn backward_matches_finite_differences() {
        let p = random_encoder(77, 6, 3, 4);
        let seqs = [seq(&[2, 3, 4, 5, 2, 3]), seq(&[5, 4])];
        let batch = SequenceBatch::from_sequences(&seqs).unwrap();
        let mut rng = SeededRng::new(78);
        let mut d_e = Matrix::zeros(2, 4);
        d_e.as_mut_slice().iter_mut().for_each(|v| *v = rng.normal(1.0));
        let objective = |q: &EncoderParams| -> f64 {
            let e = encode_batch(q, &batch).unwrap();
            e.as_slice().iter().zip(d_e.as_slice()).map(|(a, b)| a * b).sum()
        };
        let (_, cache) = forward(&p, &batch).unwrap();
        let grads = backward(&p, &cache, &d_e).unwrap();
        let analytic: Vec<Vec<f64>> = grads.tensors().iter().map(|t| t.data.to_vec()).collect();
        let eps = 1e-5;
        let mut q = p.clone();
        let n_tensors = analytic.len();
        for ti in 0..n_tensors {
            for i in 0..analytic[ti].len() {
                let orig = q.tensors_mut()[ti][i];
                q.tensors_mut()[ti][i] = orig + eps;
                let plus = objective(&q);
                q.tensors_mut()[ti][i] = orig - eps;
                let minus = objective(&q);
                q.tensors_mut()[ti][i] = orig;
                let numeric = (plus - minus) / (2.0 * eps);
                let a = analytic[ti][i];
                let abs = (a - numeric).abs();
                let rel = abs / a.abs().max(numeric.abs()).max(f64::MIN_POSITIVE);
                assert!(abs < 1e-8 || rel < 1e-6, "tensor {ti} entry {i}: {a} vs {numeric}");
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn reversal_with_swapped_directions_is_invariant(
                seed in 0u64..500,
                s in proptest::collection::vec(2usize..9, 1..7),
            ) {
                let p = random_encoder(seed, 9, 3, 4);
                let mut swapped = p.clone();
                std::mem::swap(&mut swapped.forward, &mut swapped.backward);
                std::mem::swap(&mut swapped.w_f, &mut swapped.w_b);
                let rev: Vec<usize> = s.iter().rev().copied().collect();
                let a = encode(&p, &seq(&s)).unwrap();
                let b = encode(&swapped, &seq(&rev)).unwrap();
                for (x, y) in a.iter().zip(&b) {
                    prop_assert!((x - y).abs() < 1e-12);
                }
            }

            #[test]
            fn trailing_padding_does_not_matter(
                seed in 0u64..500,
                s in proptest::collection::vec(2usize..9, 1..6),
                extra in 1usize..6,
            ) {
                let p = random_encoder(seed, 9, 3, 4);
                let long = seq(&vec![3; s.len() + extra]);
                let short = seq(&s);
                let alone = encode_batch(&p, &SequenceBatch::from_sequences([&short]).unwrap()).unwrap();
                let padded = encode_batch(&p, &SequenceBatch::from_sequences([&short, &long]).unwrap()).unwrap();
                prop_assert_eq!(alone.row(0), padded.row(0));
            }
        }
    }
}
