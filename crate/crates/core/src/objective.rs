//! Softmax posterior over hashtags and the L2-regularized multi-hot
//! cross-entropy objective, with analytic gradients.

use crate::error::{Error, Result};
use crate::tensor::{dot, gaussian_init, Matrix, SeededRng, TensorView};

/// Floor applied inside `log` at gold positions.
pub const LOG_FLOOR: f64 = 1e-30;

#[derive(Clone, Debug, PartialEq)]
pub struct SoftmaxParams {
    /// `L × d_t`; row `j` scores label `j`.
    pub w_out: Matrix,
    pub b_out: Vec<f64>,
}

impl SoftmaxParams {
    pub fn zeros(labels: usize, d_t: usize) -> Self {
        SoftmaxParams {
            w_out: Matrix::zeros(labels, d_t),
            b_out: vec![0.0; labels],
        }
    }

    pub fn init(labels: usize, d_t: usize, sigma: f64, rng: &mut SeededRng) -> Result<Self> {
        if labels < 2 {
            return Err(Error::Config(format!("need at least 2 labels, got {labels}")));
        }
        Ok(SoftmaxParams {
            w_out: gaussian_init(labels, d_t, sigma, rng)?,
            b_out: vec![0.0; labels],
        })
    }

    pub fn num_labels(&self) -> usize {
        self.w_out.rows()
    }

    pub fn input_dim(&self) -> usize {
        self.w_out.cols()
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_labels() < 2 {
            return Err(Error::Config(format!(
                "need at least 2 labels, got {}",
                self.num_labels()
            )));
        }
        if self.b_out.len() != self.num_labels() {
            return Err(Error::Shape {
                op: "softmax bias",
                left: (self.b_out.len(), 1),
                right: (self.num_labels(), 1),
            });
        }
        Ok(())
    }

    pub fn tensors(&self) -> Vec<TensorView<'_>> {
        vec![
            TensorView {
                name: "w_out".into(),
                shape: self.w_out.shape(),
                data: self.w_out.as_slice(),
                is_bias: false,
            },
            TensorView {
                name: "b_out".into(),
                shape: (self.b_out.len(), 1),
                data: &self.b_out,
                is_bias: true,
            },
        ]
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        vec![self.w_out.as_mut_slice(), &mut self.b_out]
    }
}

/// Binary `B × L` ground-truth matrix; every row has at least one gold label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TargetMatrix {
    rows: usize,
    cols: usize,
    data: Vec<u8>,
}

impl TargetMatrix {
    pub fn from_label_sets<S: AsRef<[usize]>>(sets: &[S], labels: usize) -> Result<Self> {
        let mut data = vec![0u8; sets.len() * labels];
        for (i, set) in sets.iter().enumerate() {
            let set = set.as_ref();
            if set.is_empty() {
                return Err(Error::Data(format!("example {i} has no gold label")));
            }
            for &j in set {
                if j >= labels {
                    return Err(Error::Index {
                        index: j,
                        size: labels,
                        position: i,
                    });
                }
                data[i * labels + j] = 1;
            }
        }
        Ok(TargetMatrix {
            rows: sets.len(),
            cols: labels,
            data,
        })
    }

    pub fn from_dense(rows: usize, cols: usize, data: Vec<u8>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape {
                op: "targets",
                left: (rows, cols),
                right: (data.len(), 1),
            });
        }
        if data.iter().any(|&v| v > 1) {
            return Err(Error::Data("targets must be 0/1".into()));
        }
        for i in 0..rows {
            if data[i * cols..(i + 1) * cols].iter().all(|&v| v == 0) {
                return Err(Error::Data(format!("example {i} has no gold label")));
            }
        }
        Ok(TargetMatrix { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[u8] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn gold(&self, i: usize) -> Vec<usize> {
        self.row(i)
            .iter()
            .enumerate()
            .filter(|(_, &v)| v == 1)
            .map(|(j, _)| j)
            .collect()
    }
}

pub fn logits(sp: &SoftmaxParams, embeddings: &Matrix) -> Result<Matrix> {
    if embeddings.cols() != sp.input_dim() {
        return Err(Error::Shape {
            op: "softmax logits",
            left: embeddings.shape(),
            right: sp.w_out.shape(),
        });
    }
    let labels = sp.num_labels();
    let mut out = Matrix::zeros(embeddings.rows(), labels);
    for i in 0..embeddings.rows() {
        let e = embeddings.row(i);
        for (j, o) in out.row_mut(i).iter_mut().enumerate() {
            *o = dot(sp.w_out.row(j), e) + sp.b_out[j];
        }
    }
    Ok(out)
}

/// Row-wise softmax with max subtraction.
pub fn softmax_rows(logits: &Matrix) -> Result<Matrix> {
    if !logits.is_finite() {
        return Err(Error::Numeric("non-finite logits".into()));
    }
    let mut out = logits.clone();
    for i in 0..out.rows() {
        let row = out.row_mut(i);
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut sum = 0.0;
        for v in row.iter_mut() {
            *v = (*v - max).exp();
            sum += *v;
        }
        row.iter_mut().for_each(|v| *v /= sum);
    }
    Ok(out)
}

pub fn posteriors(sp: &SoftmaxParams, embeddings: &Matrix) -> Result<Matrix> {
    softmax_rows(&logits(sp, embeddings)?)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LossValue {
    /// Batch-mean cross-entropy.
    pub data: f64,
    /// `λ‖Θ‖²`.
    pub penalty: f64,
    pub total: f64,
    /// Gold positions whose probability fell below [`LOG_FLOOR`].
    pub saturated: usize,
}

/// `J = (1/B) Σ_i Σ_j −t_ij log p_ij + λ‖Θ‖²`. `squared_norm` is `‖Θ‖²`
/// computed by the caller over whichever parameters are regularized.
pub fn loss(p: &Matrix, t: &TargetMatrix, squared_norm: f64, lambda: f64) -> Result<LossValue> {
    if p.shape() != (t.rows(), t.cols()) {
        return Err(Error::Shape {
            op: "loss",
            left: p.shape(),
            right: (t.rows(), t.cols()),
        });
    }
    let mut sum = 0.0;
    let mut saturated = 0;
    for i in 0..p.rows() {
        for (j, &gold) in t.row(i).iter().enumerate() {
            if gold == 1 {
                let pij = p.get(i, j);
                if pij < LOG_FLOOR {
                    saturated += 1;
                }
                sum -= pij.max(LOG_FLOOR).ln();
            }
        }
    }
    let data = sum / p.rows() as f64;
    let penalty = lambda * squared_norm;
    Ok(LossValue {
        data,
        penalty,
        total: data + penalty,
        saturated,
    })
}

/// Gradients of the data term only; the `2λΘ` penalty gradient is added by
/// [`add_l2_grad`].
#[derive(Clone, Debug)]
pub struct SoftmaxGrads {
    pub d_logits: Matrix,
    pub params: SoftmaxParams,
    pub d_embeddings: Matrix,
}

/// `∂J/∂logit_ij = (1/B)((Σ_k t_ik) p_ij − t_ij)`, then chained into the
/// softmax weights and the embeddings.
pub fn loss_grad(
    sp: &SoftmaxParams,
    embeddings: &Matrix,
    p: &Matrix,
    t: &TargetMatrix,
) -> Result<SoftmaxGrads> {
    if p.shape() != (t.rows(), t.cols()) || embeddings.rows() != p.rows() {
        return Err(Error::Shape {
            op: "loss_grad",
            left: p.shape(),
            right: (t.rows(), t.cols()),
        });
    }
    let batch = p.rows() as f64;
    let mut d_logits = Matrix::zeros(p.rows(), p.cols());
    for i in 0..p.rows() {
        let gold_count = t.row(i).iter().map(|&v| v as f64).sum::<f64>();
        for j in 0..p.cols() {
            let g = (gold_count * p.get(i, j) - t.row(i)[j] as f64) / batch;
            d_logits.set(i, j, g);
        }
    }
    let mut params = SoftmaxParams::zeros(sp.num_labels(), sp.input_dim());
    let mut d_embeddings = Matrix::zeros(embeddings.rows(), embeddings.cols());
    for i in 0..p.rows() {
        let dl = d_logits.row(i);
        params.w_out.outer_acc(dl, embeddings.row(i));
        params.b_out.iter_mut().zip(dl).for_each(|(g, d)| *g += d);
        sp.w_out.matvec_t_acc(dl, d_embeddings.row_mut(i));
    }
    Ok(SoftmaxGrads {
        d_logits,
        params,
        d_embeddings,
    })
}

/// `grad += 2λθ`.
pub fn add_l2_grad(grad: &mut [f64], theta: &[f64], lambda: f64) {
    for (g, w) in grad.iter_mut().zip(theta) {
        *g += 2.0 * lambda * w;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> Matrix {
        Matrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn zero_params_give_uniform_rows() {
        let sp = SoftmaxParams::zeros(4, 3);
        let p = posteriors(&sp, &m(&[&[1.0, -2.0, 0.5], &[0.0, 0.0, 9.0]])).unwrap();
        assert!(p.as_slice().iter().all(|&v| (v - 0.25).abs() < 1e-15));
    }

    #[test]
    fn closed_form_three_logits() {
        let p = softmax_rows(&m(&[&[1.0, 2.0, 3.0]])).unwrap();
        let z = 1f64.exp() + 2f64.exp() + 3f64.exp();
        let want = [1f64.exp() / z, 2f64.exp() / z, 3f64.exp() / z];
        for (g, w) in p.row(0).iter().zip(want) {
            assert!((g - w).abs() < 1e-15);
        }
        // rounded reference values
        assert!((p.get(0, 0) - 0.09003).abs() < 5e-6);
        assert!((p.get(0, 1) - 0.24473).abs() < 5e-6);
        assert!((p.get(0, 2) - 0.66524).abs() < 5e-6);
    }

    #[test]
    fn shift_invariance() {
        let a = softmax_rows(&m(&[&[0.3, -1.2, 2.5, 0.0]])).unwrap();
        let b = softmax_rows(&m(&[&[100.3, 98.8, 102.5, 100.0]])).unwrap();
        for (x, y) in a.as_slice().iter().zip(b.as_slice()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn non_finite_logits_rejected() {
        assert!(matches!(
            softmax_rows(&m(&[&[f64::NAN, 1.0]])),
            Err(Error::Numeric(_))
        ));
    }

    #[test]
    fn perfect_and_uniform_losses() {
        let t = TargetMatrix::from_label_sets(&[vec![1]], 3).unwrap();
        let perfect = m(&[&[0.0, 1.0, 0.0]]);
        assert_eq!(loss(&perfect, &t, 5.0, 0.0).unwrap().total, 0.0);

        let l = 7;
        let t = TargetMatrix::from_label_sets(&[vec![0], vec![3], vec![6]], l).unwrap();
        let uni = Matrix::from_vec(3, l, vec![1.0 / l as f64; 3 * l]).unwrap();
        let j = loss(&uni, &t, 0.0, 0.0).unwrap().total;
        assert!((j - (l as f64).ln()).abs() < 1e-12);
    }

    #[test]
    fn hand_built_batch_matches_direct_sum() {
        let p = m(&[&[0.2, 0.5, 0.3], &[0.6, 0.1, 0.3]]);
        let t = TargetMatrix::from_label_sets(&[vec![1], vec![0, 2]], 3).unwrap();
        let theta = [0.5, -1.0, 2.0, 0.25];
        let sq: f64 = theta.iter().map(|v| v * v).sum();
        let got = loss(&p, &t, sq, 0.001).unwrap();
        let want = (-(0.5f64.ln()) - 0.6f64.ln() - 0.3f64.ln()) / 2.0 + 0.001 * (0.25 + 1.0 + 4.0 + 0.0625);
        assert!((got.total - want).abs() < 1e-12);
        assert!(got.total >= got.penalty);
    }

    #[test]
    fn zero_gold_probability_is_clamped_and_counted() {
        let p = m(&[&[1.0, 0.0]]);
        let t = TargetMatrix::from_label_sets(&[vec![1]], 2).unwrap();
        let v = loss(&p, &t, 0.0, 0.0).unwrap();
        assert_eq!(v.saturated, 1);
        assert!((v.total - 30.0 * 10f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn targets_validation() {
        assert!(TargetMatrix::from_label_sets(&[vec![], vec![1]], 3).is_err());
        assert!(TargetMatrix::from_label_sets(&[vec![3]], 3).is_err());
        assert!(TargetMatrix::from_dense(1, 2, vec![0, 2]).is_err());
        assert!(TargetMatrix::from_dense(1, 2, vec![0, 0]).is_err());
        let t = TargetMatrix::from_dense(2, 3, vec![1, 0, 1, 0, 1, 0]).unwrap();
        assert_eq!(t.gold(0), vec![0, 2]);
    }

    #[test]
    fn single_label_gradient_is_p_minus_t_over_b() {
        let sp = SoftmaxParams::init(4, 3, 0.7, &mut SeededRng::new(3)).unwrap();
        let e = m(&[&[0.1, 0.2, -0.3], &[1.0, -1.0, 0.5]]);
        let p = posteriors(&sp, &e).unwrap();
        let t = TargetMatrix::from_label_sets(&[vec![2], vec![0]], 4).unwrap();
        let g = loss_grad(&sp, &e, &p, &t).unwrap();
        for i in 0..2 {
            for j in 0..4 {
                let want = (p.get(i, j) - t.row(i)[j] as f64) / 2.0;
                assert!((g.d_logits.get(i, j) - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn multi_label_gradient_matches_finite_differences() {
        let mut sp = SoftmaxParams::init(5, 3, 0.7, &mut SeededRng::new(4)).unwrap();
        sp.b_out = vec![0.1, -0.2, 0.3, 0.0, 0.5];
        let e = m(&[&[0.4, -0.6, 0.9], &[-1.1, 0.2, 0.3]]);
        let t = TargetMatrix::from_label_sets(&[vec![1, 3], vec![4]], 5).unwrap();
        let j = |sp: &SoftmaxParams, e: &Matrix| {
            loss(&posteriors(sp, e).unwrap(), &t, 0.0, 0.0).unwrap().total
        };
        let g = loss_grad(&sp, &e, &posteriors(&sp, &e).unwrap(), &t).unwrap();
        let eps = 1e-5;
        let check = |a: f64, n: f64| {
            let abs = (a - n).abs();
            assert!(abs < 1e-8 || abs / a.abs().max(n.abs()) < 1e-6, "{a} vs {n}");
        };
        for k in 0..sp.w_out.as_slice().len() {
            let mut plus = sp.clone();
            plus.w_out.as_mut_slice()[k] += eps;
            let mut minus = sp.clone();
            minus.w_out.as_mut_slice()[k] -= eps;
            check(g.params.w_out.as_slice()[k], (j(&plus, &e) - j(&minus, &e)) / (2.0 * eps));
        }
        for k in 0..5 {
            let mut plus = sp.clone();
            plus.b_out[k] += eps;
            let mut minus = sp.clone();
            minus.b_out[k] -= eps;
            check(g.params.b_out[k], (j(&plus, &e) - j(&minus, &e)) / (2.0 * eps));
        }
        for k in 0..e.as_slice().len() {
            let mut plus = e.clone();
            plus.as_mut_slice()[k] += eps;
            let mut minus = e.clone();
            minus.as_mut_slice()[k] -= eps;
            check(g.d_embeddings.as_slice()[k], (j(&sp, &plus) - j(&sp, &minus)) / (2.0 * eps));
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn rows_normalized_and_open(logit in proptest::collection::vec(-15.0f64..15.0, 12)) {
                let p = softmax_rows(&Matrix::from_vec(3, 4, logit).unwrap()).unwrap();
                for i in 0..3 {
                    let s: f64 = p.row(i).iter().sum();
                    prop_assert!((s - 1.0).abs() < 1e-9);
                    prop_assert!(p.row(i).iter().all(|&v| v > 0.0 && v < 1.0));
                }
            }

            #[test]
            fn loss_bounded_below_by_penalty(logit in proptest::collection::vec(-5.0f64..5.0, 8),
                                             sq in 0.0f64..10.0, gold in 0usize..4) {
                let p = softmax_rows(&Matrix::from_vec(2, 4, logit).unwrap()).unwrap();
                let t = TargetMatrix::from_label_sets(&[vec![gold], vec![(gold + 1) % 4]], 4).unwrap();
                let v = loss(&p, &t, sq, 0.01).unwrap();
                prop_assert!(v.total >= v.penalty);
                prop_assert!(v.total > v.penalty);
            }
        }
    }
}
