//! Gated recurrent unit: one step forward, and the matching reverse-mode step.

use crate::error::{Error, Result};
use crate::tensor::{gaussian_init, sigmoid, Matrix, SeededRng};

/// Input weights are `d_h × d_c`, recurrent weights `d_h × d_h`, biases `d_h`.
#[derive(Clone, Debug, PartialEq)]
pub struct GruParams {
    pub w_r: Matrix,
    pub u_r: Matrix,
    pub b_r: Vec<f64>,
    pub w_z: Matrix,
    pub u_z: Matrix,
    pub b_z: Vec<f64>,
    pub w_h: Matrix,
    pub u_h: Matrix,
    pub b_h: Vec<f64>,
}

/// Activations of one step, kept for backpropagation.
#[derive(Clone, Debug, Default)]
pub struct GruStep {
    pub reset: Vec<f64>,
    pub update: Vec<f64>,
    pub candidate: Vec<f64>,
    pub hidden: Vec<f64>,
}

impl GruParams {
    pub fn zeros(input_dim: usize, hidden_dim: usize) -> Self {
        let w = || Matrix::zeros(hidden_dim, input_dim);
        let u = || Matrix::zeros(hidden_dim, hidden_dim);
        let b = || vec![0.0; hidden_dim];
        GruParams {
            w_r: w(),
            u_r: u(),
            b_r: b(),
            w_z: w(),
            u_z: u(),
            b_z: b(),
            w_h: w(),
            u_h: u(),
            b_h: b(),
        }
    }

    /// Gaussian weights, zero biases. Draw order: r, z, h gate; input then
    /// recurrent matrix within each gate.
    pub fn init(input_dim: usize, hidden_dim: usize, sigma: f64, rng: &mut SeededRng) -> Result<Self> {
        let mut p = GruParams::zeros(input_dim, hidden_dim);
        p.w_r = gaussian_init(hidden_dim, input_dim, sigma, rng)?;
        p.u_r = gaussian_init(hidden_dim, hidden_dim, sigma, rng)?;
        p.w_z = gaussian_init(hidden_dim, input_dim, sigma, rng)?;
        p.u_z = gaussian_init(hidden_dim, hidden_dim, sigma, rng)?;
        p.w_h = gaussian_init(hidden_dim, input_dim, sigma, rng)?;
        p.u_h = gaussian_init(hidden_dim, hidden_dim, sigma, rng)?;
        Ok(p)
    }

    pub fn input_dim(&self) -> usize {
        self.w_r.cols()
    }

    pub fn hidden_dim(&self) -> usize {
        self.w_r.rows()
    }

    pub fn validate(&self) -> Result<()> {
        let (d_h, d_c) = (self.hidden_dim(), self.input_dim());
        for (w, u) in [(&self.w_r, &self.u_r), (&self.w_z, &self.u_z), (&self.w_h, &self.u_h)] {
            if w.shape() != (d_h, d_c) {
                return Err(Error::Shape {
                    op: "gru input weights",
                    left: w.shape(),
                    right: (d_h, d_c),
                });
            }
            if u.shape() != (d_h, d_h) {
                return Err(Error::Shape {
                    op: "gru recurrent weights",
                    left: u.shape(),
                    right: (d_h, d_h),
                });
            }
        }
        for b in [&self.b_r, &self.b_z, &self.b_h] {
            if b.len() != d_h {
                return Err(Error::Shape {
                    op: "gru bias",
                    left: (b.len(), 1),
                    right: (d_h, 1),
                });
            }
        }
        Ok(())
    }

    pub(crate) fn tensors(&self) -> [(&'static str, &[f64]); 9] {
        [
            ("w_r", self.w_r.as_slice()),
            ("u_r", self.u_r.as_slice()),
            ("b_r", &self.b_r),
            ("w_z", self.w_z.as_slice()),
            ("u_z", self.u_z.as_slice()),
            ("b_z", &self.b_z),
            ("w_h", self.w_h.as_slice()),
            ("u_h", self.u_h.as_slice()),
            ("b_h", &self.b_h),
        ]
    }

    pub(crate) fn tensors_mut(&mut self) -> [&mut [f64]; 9] {
        [
            self.w_r.as_mut_slice(),
            self.u_r.as_mut_slice(),
            &mut self.b_r,
            self.w_z.as_mut_slice(),
            self.u_z.as_mut_slice(),
            &mut self.b_z,
            self.w_h.as_mut_slice(),
            self.u_h.as_mut_slice(),
            &mut self.b_h,
        ]
    }

    pub(crate) fn shapes(&self) -> [(usize, usize); 9] {
        let (d_h, d_c) = (self.hidden_dim(), self.input_dim());
        [
            (d_h, d_c),
            (d_h, d_h),
            (d_h, 1),
            (d_h, d_c),
            (d_h, d_h),
            (d_h, 1),
            (d_h, d_c),
            (d_h, d_h),
            (d_h, 1),
        ]
    }
}

/// One GRU update `h_t` from input `x_t` and previous state `h_prev`.
pub fn gru_step(p: &GruParams, x: &[f64], h_prev: &[f64]) -> Result<Vec<f64>> {
    if x.len() != p.input_dim() {
        return Err(Error::Shape {
            op: "gru_step input",
            left: (x.len(), 1),
            right: (p.input_dim(), 1),
        });
    }
    if h_prev.len() != p.hidden_dim() {
        return Err(Error::Shape {
            op: "gru_step state",
            left: (h_prev.len(), 1),
            right: (p.hidden_dim(), 1),
        });
    }
    Ok(step_forward(p, x, h_prev).hidden)
}

pub(crate) fn step_forward(p: &GruParams, x: &[f64], h_prev: &[f64]) -> GruStep {
    let mut reset = p.b_r.clone();
    p.w_r.matvec_acc(x, &mut reset);
    p.u_r.matvec_acc(h_prev, &mut reset);
    reset.iter_mut().for_each(|v| *v = sigmoid(*v));

    let mut update = p.b_z.clone();
    p.w_z.matvec_acc(x, &mut update);
    p.u_z.matvec_acc(h_prev, &mut update);
    update.iter_mut().for_each(|v| *v = sigmoid(*v));

    let gated: Vec<f64> = reset.iter().zip(h_prev).map(|(r, h)| r * h).collect();
    let mut candidate = p.b_h.clone();
    p.w_h.matvec_acc(x, &mut candidate);
    p.u_h.matvec_acc(&gated, &mut candidate);
    candidate.iter_mut().for_each(|v| *v = v.tanh());

    let hidden = update
        .iter()
        .zip(h_prev)
        .zip(&candidate)
        .map(|((z, h), c)| (1.0 - z) * h + z * c)
        .collect();

    GruStep {
        reset,
        update,
        candidate,
        hidden,
    }
}

/// Reverse-mode step. Accumulates parameter gradients into `grads` and the
/// input gradient into `dx`; overwrites `dh_prev` with the gradient flowing to
/// the previous state.
pub(crate) fn step_backward(
    p: &GruParams,
    x: &[f64],
    h_prev: &[f64],
    step: &GruStep,
    dh: &[f64],
    grads: &mut GruParams,
    dx: &mut [f64],
    dh_prev: &mut [f64],
) {
    let d_h = p.hidden_dim();
    let mut da_h = vec![0.0; d_h];
    let mut da_z = vec![0.0; d_h];
    for i in 0..d_h {
        let z = step.update[i];
        let c = step.candidate[i];
        dh_prev[i] = dh[i] * (1.0 - z);
        da_h[i] = dh[i] * z * (1.0 - c * c);
        da_z[i] = dh[i] * (c - h_prev[i]) * z * (1.0 - z);
    }

    // candidate: a_h = W_h x + U_h (r ⊙ h_prev) + b_h
    let gated: Vec<f64> = step.reset.iter().zip(h_prev).map(|(r, h)| r * h).collect();
    grads.w_h.outer_acc(&da_h, x);
    grads.u_h.outer_acc(&da_h, &gated);
    grads.b_h.iter_mut().zip(&da_h).for_each(|(g, d)| *g += d);
    p.w_h.matvec_t_acc(&da_h, dx);
    let mut d_gated = vec![0.0; d_h];
    p.u_h.matvec_t_acc(&da_h, &mut d_gated);

    let mut da_r = vec![0.0; d_h];
    for i in 0..d_h {
        let r = step.reset[i];
        dh_prev[i] += d_gated[i] * r;
        da_r[i] = d_gated[i] * h_prev[i] * r * (1.0 - r);
    }

    grads.w_z.outer_acc(&da_z, x);
    grads.u_z.outer_acc(&da_z, h_prev);
    grads.b_z.iter_mut().zip(&da_z).for_each(|(g, d)| *g += d);
    p.w_z.matvec_t_acc(&da_z, dx);
    p.u_z.matvec_t_acc(&da_z, dh_prev);

    grads.w_r.outer_acc(&da_r, x);
    grads.u_r.outer_acc(&da_r, h_prev);
    grads.b_r.iter_mut().zip(&da_r).for_each(|(g, d)| *g += d);
    p.w_r.matvec_t_acc(&da_r, dx);
    p.u_r.matvec_t_acc(&da_r, dh_prev);
}
