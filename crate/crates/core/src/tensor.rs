//! Dense row-major `f64` matrices and the seeded random stream used for
//! initialization and shuffling.
//!
//! Vectors are plain `[f64]` slices; the matrix-vector kernels here are the
//! ones the recurrent layers call in their inner loops.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ElementwiseOp {
    Add,
    Sub,
    Hadamard,
    Sigmoid,
    Tanh,
}

#[inline]
pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape {
                op: "from_vec",
                left: (rows, cols),
                right: (data.len(), 1),
            });
        }
        Ok(Matrix { rows, cols, data })
    }

    /// Builds a matrix from nested rows; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::Shape {
                    op: "from_rows",
                    left: (i, r.len()),
                    right: (0, cols),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn column(data: Vec<f64>) -> Self {
        Matrix {
            rows: data.len(),
            cols: 1,
            data,
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.data[c * self.rows + r] = self.data[r * self.cols + c];
            }
        }
        out
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        matmul(self, other)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn squared_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    /// `out += self · x`.
    #[inline]
    pub fn matvec_acc(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.cols);
        debug_assert_eq!(out.len(), self.rows);
        for (r, o) in out.iter_mut().enumerate() {
            *o += dot(self.row(r), x);
        }
    }

    /// `out += selfᵀ · y`.
    #[inline]
    pub fn matvec_t_acc(&self, y: &[f64], out: &mut [f64]) {
        debug_assert_eq!(y.len(), self.rows);
        debug_assert_eq!(out.len(), self.cols);
        for (r, &yr) in y.iter().enumerate() {
            if yr == 0.0 {
                continue;
            }
            for (o, w) in out.iter_mut().zip(self.row(r)) {
                *o += w * yr;
            }
        }
    }

    /// `self += y · xᵀ`.
    #[inline]
    pub fn outer_acc(&mut self, y: &[f64], x: &[f64]) {
        debug_assert_eq!(y.len(), self.rows);
        debug_assert_eq!(x.len(), self.cols);
        for (r, &yr) in y.iter().enumerate() {
            if yr == 0.0 {
                continue;
            }
            let cols = self.cols;
            for (g, xc) in self.data[r * cols..(r + 1) * cols].iter_mut().zip(x) {
                *g += yr * xc;
            }
        }
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn matmul(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if a.cols != b.rows {
        return Err(Error::Shape {
            op: "matmul",
            left: a.shape(),
            right: b.shape(),
        });
    }
    let mut out = Matrix::zeros(a.rows, b.cols);
    for i in 0..a.rows {
        for k in 0..a.cols {
            let aik = a.data[i * a.cols + k];
            if aik == 0.0 {
                continue;
            }
            let brow = &b.data[k * b.cols..(k + 1) * b.cols];
            for (o, bkj) in out.data[i * b.cols..(i + 1) * b.cols].iter_mut().zip(brow) {
                *o += aik * bkj;
            }
        }
    }
    Ok(out)
}

pub fn elementwise(op: ElementwiseOp, a: &Matrix, b: Option<&Matrix>) -> Result<Matrix> {
    let binary = |f: fn(f64, f64) -> f64| -> Result<Matrix> {
        let b = b.ok_or_else(|| Error::State(format!("{op:?} needs a second operand")))?;
        if a.shape() != b.shape() {
            return Err(Error::Shape {
                op: "elementwise",
                left: a.shape(),
                right: b.shape(),
            });
        }
        Ok(Matrix {
            rows: a.rows,
            cols: a.cols,
            data: a.data.iter().zip(&b.data).map(|(x, y)| f(*x, *y)).collect(),
        })
    };
    let unary = |f: fn(f64) -> f64| Matrix {
        rows: a.rows,
        cols: a.cols,
        data: a.data.iter().map(|x| f(*x)).collect(),
    };
    match op {
        ElementwiseOp::Add => binary(|x, y| x + y),
        ElementwiseOp::Sub => binary(|x, y| x - y),
        ElementwiseOp::Hadamard => binary(|x, y| x * y),
        ElementwiseOp::Sigmoid => Ok(unary(sigmoid)),
        ElementwiseOp::Tanh => Ok(unary(f64::tanh)),
    }
}

/// Read-only view of one learnable tensor, in a parameter set's fixed order.
#[derive(Clone, Debug)]
pub struct TensorView<'a> {
    pub name: String,
    pub shape: (usize, usize),
    pub data: &'a [f64],
    pub is_bias: bool,
}

/// Name of the generator recorded in checkpoint headers.
pub const PRNG_ID: &str = "chacha8";

/// Deterministic random stream: ChaCha8 keyed by a 64-bit seed
/// (`rand_chacha::ChaCha8Rng::seed_from_u64`). Gaussian draws use the
/// ziggurat sampler from `rand_distr`, which is platform independent.
#[derive(Clone, Debug)]
pub struct SeededRng {
    seed: u64,
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        SeededRng {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn normal(&mut self, sigma: f64) -> f64 {
        let n = Normal::new(0.0, sigma).expect("sigma must be finite and positive");
        n.sample(&mut self.inner)
    }

    /// Uniform in `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.inner.random_range(lo..hi)
    }

    /// Uniform index in `0..n`.
    pub fn index(&mut self, n: usize) -> usize {
        self.inner.random_range(0..n)
    }

    /// Fisher-Yates shuffle driven by this stream.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.inner.random_range(0..=i);
            items.swap(i, j);
        }
    }
}

pub fn gaussian_init(rows: usize, cols: usize, sigma: f64, rng: &mut SeededRng) -> Result<Matrix> {
    if rows == 0 || cols == 0 {
        return Err(Error::Shape {
            op: "gaussian_init",
            left: (rows, cols),
            right: (1, 1),
        });
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::Config(format!("init sigma must be positive, got {sigma}")));
    }
    let n = Normal::new(0.0, sigma).map_err(|e| Error::Config(e.to_string()))?;
    let data = (0..rows * cols).map(|_| n.sample(&mut rng.inner)).collect();
    Ok(Matrix { rows, cols, data })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> Matrix {
        Matrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn matmul_identity_and_zero() {
        let a = m(&[&[1.0, 2.0], &[3.0, 4.0]]);
        assert_eq!(matmul(&Matrix::identity(2), &a).unwrap(), a);
        let z = matmul(&Matrix::zeros(2, 2), &m(&[&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]])).unwrap();
        assert_eq!(z, Matrix::zeros(2, 3));
    }

    #[test]
    fn matmul_hand_computed() {
        let a = m(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let b = m(&[&[5.0], &[6.0]]);
        // 1*5+2*6, 3*5+4*6
        assert_eq!(matmul(&a, &b).unwrap(), m(&[&[17.0], &[39.0]]));
    }

    #[test]
    fn matmul_shape_error_names_shapes() {
        let err = matmul(&Matrix::zeros(2, 3), &Matrix::zeros(2, 3)).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("(2, 3)"), "{msg}");
    }

    #[test]
    fn elementwise_basics() {
        let z = Matrix::zeros(2, 3);
        let s = elementwise(ElementwiseOp::Sigmoid, &z, None).unwrap();
        assert!(s.as_slice().iter().all(|&v| v == 0.5));
        let t = elementwise(ElementwiseOp::Tanh, &z, None).unwrap();
        assert_eq!(t, z);
        let h = elementwise(
            ElementwiseOp::Hadamard,
            &m(&[&[1.0, 2.0]]),
            Some(&m(&[&[3.0, 4.0]])),
        )
        .unwrap();
        assert_eq!(h, m(&[&[3.0, 8.0]]));
        assert!(elementwise(ElementwiseOp::Add, &z, Some(&Matrix::zeros(3, 2))).is_err());
        assert!(elementwise(ElementwiseOp::Sub, &z, None).is_err());
    }

    #[test]
    fn gaussian_init_statistics() {
        let mut rng = SeededRng::new(7);
        let g = gaussian_init(1000, 1000, 0.1, &mut rng).unwrap();
        let n = g.as_slice().len() as f64;
        let mean = g.as_slice().iter().sum::<f64>() / n;
        let var = g.as_slice().iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!(mean.abs() < 0.0005, "mean {mean}");
        let std = var.sqrt();
        assert!((0.099..=0.101).contains(&std), "std {std}");
    }

    #[test]
    fn gaussian_init_is_deterministic() {
        let a = gaussian_init(5, 7, 0.1, &mut SeededRng::new(42)).unwrap();
        let b = gaussian_init(5, 7, 0.1, &mut SeededRng::new(42)).unwrap();
        let bits = |m: &Matrix| m.as_slice().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a), bits(&b));
    }

    #[test]
    fn gaussian_init_rejects_bad_dims() {
        let mut rng = SeededRng::new(0);
        assert!(matches!(
            gaussian_init(0, 3, 0.1, &mut rng),
            Err(Error::Shape { .. })
        ));
        assert!(gaussian_init(2, 3, 0.0, &mut rng).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_matrix(rows: usize, cols: usize) -> impl Strategy<Value = Matrix> {
            proptest::collection::vec(-2.0f64..2.0, rows * cols)
                .prop_map(move |d| Matrix::from_vec(rows, cols, d).unwrap())
        }

        proptest! {
            #[test]
            fn matmul_is_associative(a in arb_matrix(3, 4), b in arb_matrix(4, 2), c in arb_matrix(2, 5)) {
                let left = matmul(&matmul(&a, &b).unwrap(), &c).unwrap();
                let right = matmul(&a, &matmul(&b, &c).unwrap()).unwrap();
                for (l, r) in left.as_slice().iter().zip(right.as_slice()) {
                    prop_assert!((l - r).abs() <= 1e-9 * (1.0 + l.abs().max(r.abs())));
                }
            }

            #[test]
            fn transpose_distributes_over_add(a in arb_matrix(3, 4), b in arb_matrix(3, 4)) {
                let lhs = elementwise(ElementwiseOp::Add, &a, Some(&b)).unwrap().transpose();
                let rhs = elementwise(ElementwiseOp::Add, &a.transpose(), Some(&b.transpose())).unwrap();
                prop_assert_eq!(lhs, rhs);
            }

            #[test]
            fn right_identity(a in arb_matrix(4, 3)) {
                prop_assert_eq!(matmul(&a, &Matrix::identity(3)).unwrap(), a);
            }

            #[test]
            fn activations_stay_in_open_range(a in arb_matrix(2, 6)) {
                let s = elementwise(ElementwiseOp::Sigmoid, &a, None).unwrap();
                let t = elementwise(ElementwiseOp::Tanh, &a, None).unwrap();
                prop_assert!(s.as_slice().iter().all(|&v| v > 0.0 && v < 1.0));
                prop_assert!(t.as_slice().iter().all(|&v| v > -1.0 && v < 1.0));
            }
        }
    }
}
