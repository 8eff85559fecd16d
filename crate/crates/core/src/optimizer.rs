//! Mini-batch gradient descent with Nesterov momentum, the validation-driven
//! learning-rate halving schedule, and the training loop.

use std::fmt;

use crate::data::{make_batches, EncodedDataset};
use crate::error::{Error, Result};
use crate::eval::evaluate;
use crate::model::{self, ModelDims, ModelParams, Regularization};
use crate::tensor::SeededRng;

#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub eta0: f64,
    pub mu0: f64,
    pub lambda: f64,
    pub init_sigma: f64,
    /// Minimum validation precision@1 gain, in percentage points, that keeps
    /// the learning rate unchanged.
    pub halving_threshold: f64,
    /// Applies the halving schedule; when false the rate stays at `eta0`.
    pub halve_on_plateau: bool,
    pub patience: usize,
    pub max_epochs: usize,
    pub seed: u64,
    pub regularize_biases: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            batch_size: 64,
            eta0: 0.01,
            mu0: 0.9,
            lambda: 0.001,
            init_sigma: 0.1,
            halving_threshold: 0.01,
            halve_on_plateau: true,
            patience: 5,
            max_epochs: 30,
            seed: 0,
            regularize_biases: true,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Config(what.to_string()));
        if self.batch_size == 0 {
            return bad("batch size must be positive");
        }
        if !(self.eta0 > 0.0 && self.eta0.is_finite()) {
            return bad("initial learning rate must be positive");
        }
        if !(0.0..1.0).contains(&self.mu0) {
            return bad("momentum must lie in [0, 1)");
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return bad("lambda must be non-negative");
        }
        if !(self.init_sigma > 0.0 && self.init_sigma.is_finite()) {
            return bad("init sigma must be positive");
        }
        if !(self.halving_threshold >= 0.0 && self.halving_threshold.is_finite()) {
            return bad("halving threshold must be non-negative");
        }
        if self.patience == 0 || self.max_epochs == 0 {
            return bad("patience and max epochs must be positive");
        }
        Ok(())
    }

    pub fn regularization(&self) -> Regularization {
        Regularization {
            lambda: self.lambda,
            include_biases: self.regularize_biases,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizerState {
    /// One buffer per parameter tensor, laid out like the parameters.
    pub velocity: ModelParams,
    pub learning_rate: f64,
    pub momentum: f64,
    pub epoch: usize,
    /// Best validation precision@1 so far, in percent.
    pub best_val_p1: Option<f64>,
    /// Previous epoch's validation precision@1, in percent.
    pub prev_val_p1: Option<f64>,
    pub halvings: usize,
    pub halving_threshold: f64,
    pub halve_on_plateau: bool,
}

impl OptimizerState {
    pub fn new(params: &ModelParams, config: &TrainConfig) -> Self {
        OptimizerState {
            velocity: params.zeros_like(),
            learning_rate: config.eta0,
            momentum: config.mu0,
            epoch: 0,
            best_val_p1: None,
            prev_val_p1: None,
            halvings: 0,
            halving_threshold: config.halving_threshold,
            halve_on_plateau: config.halve_on_plateau,
        }
    }

    /// The point `θ + μv` at which the next gradient is evaluated.
    pub fn lookahead(&self, params: &ModelParams) -> Result<ModelParams> {
        let mut ahead = params.clone();
        ahead.add_scaled(&self.velocity, self.momentum)?;
        Ok(ahead)
    }
}

/// `v ← μv − η∇J(θ + μv)`, then `θ ← θ + v`. `grads` must have been taken at
/// [`OptimizerState::lookahead`].
pub fn nesterov_step(params: &mut ModelParams, grads: &ModelParams, state: &mut OptimizerState) -> Result<()> {
    let (mu, eta) = (state.momentum, state.learning_rate);
    let g = grads.tensors();
    let mut v = state.velocity.tensors_mut();
    let mut p = params.tensors_mut();
    if g.len() != v.len() || g.len() != p.len() {
        return Err(Error::State("gradient layout differs from parameters".into()));
    }
    for ((pt, vt), gt) in p.iter_mut().zip(v.iter_mut()).zip(&g) {
        if pt.len() != gt.data.len() || vt.len() != gt.data.len() {
            return Err(Error::Shape {
                op: "nesterov_step",
                left: (pt.len(), 1),
                right: (gt.data.len(), 1),
            });
        }
        for ((w, vel), &grad) in pt.iter_mut().zip(vt.iter_mut()).zip(gt.data) {
            *vel = mu * *vel - eta * grad;
            *w += *vel;
        }
    }
    Ok(())
}

/// Halves the learning rate when validation precision@1 (in percent) rose by
/// less than the threshold since the previous epoch. The first call only
/// records the value.
pub fn lr_schedule(state: &mut OptimizerState, current_val_p1: f64) {
    if let (Some(prev), true) = (state.prev_val_p1, state.halve_on_plateau) {
        if current_val_p1 - prev < state.halving_threshold {
            state.learning_rate /= 2.0;
            state.halvings += 1;
        }
    }
    state.prev_val_p1 = Some(current_val_p1);
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    /// Validation precision@1 as a fraction.
    pub val_p1: f64,
    /// Rate used during this epoch.
    pub learning_rate: f64,
    pub improved: bool,
}

impl fmt::Display for EpochRecord {
    /// Tab-separated `key=value` fields.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "epoch={}\ttrain_loss={}\tval_p1={}\tlearning_rate={}\timproved={}",
            self.epoch, self.train_loss, self.val_p1, self.learning_rate, self.improved as u8
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    Patience,
    MaxEpochs,
}

#[derive(Clone, Debug)]
pub struct TrainOutcome {
    pub best: ModelParams,
    pub best_epoch: usize,
    pub last: ModelParams,
    pub log: Vec<EpochRecord>,
    pub stop: StopReason,
    pub state: OptimizerState,
}

/// Initializes parameters from `config.seed` and trains. The same RNG stream
/// then drives the per-epoch shuffles.
pub fn train(
    dims: ModelDims,
    train_set: &EncodedDataset,
    validation: &EncodedDataset,
    config: &TrainConfig,
    on_epoch: impl FnMut(&EpochRecord, Option<&ModelParams>) -> Result<()>,
) -> Result<TrainOutcome> {
    config.validate()?;
    let mut rng = SeededRng::new(config.seed);
    let params = ModelParams::init(dims, config.init_sigma, &mut rng)?;
    train_from(params, &mut rng, train_set, validation, config, on_epoch)
}

/// Runs epochs until validation precision@1 has not improved for
/// `config.patience` epochs or `config.max_epochs` is reached. `on_epoch`
/// sees each record, plus the parameters whenever they are a new best.
pub fn train_from(
    mut params: ModelParams,
    rng: &mut SeededRng,
    train_set: &EncodedDataset,
    validation: &EncodedDataset,
    config: &TrainConfig,
    mut on_epoch: impl FnMut(&EpochRecord, Option<&ModelParams>) -> Result<()>,
) -> Result<TrainOutcome> {
    config.validate()?;
    if train_set.is_empty() || validation.is_empty() {
        return Err(Error::Data("training and validation sets must be nonempty".into()));
    }
    let dims = params.dims();
    for (name, set) in [("training", train_set), ("validation", validation)] {
        if set.table_size != dims.table_size || set.num_labels != dims.labels {
            return Err(Error::Config(format!("{name} set does not match the model's tables")));
        }
    }
    let reg = config.regularization();
    let mut state = OptimizerState::new(&params, config);
    let mut best = params.clone();
    let mut best_epoch = 0;
    let mut since_best = 0;
    let mut log = Vec::new();
    let mut stop = StopReason::MaxEpochs;

    for epoch in 1..=config.max_epochs {
        state.epoch = epoch;
        let rate = state.learning_rate;
        let mut loss_sum = 0.0;
        for (bi, batch) in make_batches(train_set, config.batch_size, Some(rng))?.iter().enumerate() {
            let ahead = state.lookahead(&params)?;
            let (value, grads) = model::loss_and_grad(&ahead, &batch.sequences, &batch.targets, reg)
                .map_err(|e| match e {
                    Error::Numeric(_) => Error::Divergence {
                        epoch,
                        batch: bi,
                        learning_rate: state.learning_rate,
                        loss: f64::NAN,
                    },
                    other => other,
                })?;
            if !value.total.is_finite() {
                return Err(Error::Divergence {
                    epoch,
                    batch: bi,
                    learning_rate: state.learning_rate,
                    loss: value.total,
                });
            }
            nesterov_step(&mut params, &grads, &mut state)?;
            if !params.is_finite() {
                return Err(Error::Divergence {
                    epoch,
                    batch: bi,
                    learning_rate: state.learning_rate,
                    loss: value.total,
                });
            }
            loss_sum += value.total * batch.ids.len() as f64;
        }

        let val_p1 = evaluate(&params, validation, config.batch_size)?.precision_at_1;
        let percent = 100.0 * val_p1;
        let improved = state.best_val_p1.is_none_or(|b| percent > b);
        lr_schedule(&mut state, percent);
        if improved {
            state.best_val_p1 = Some(percent);
            best = params.clone();
            best_epoch = epoch;
            since_best = 0;
        } else {
            since_best += 1;
        }
        let record = EpochRecord {
            epoch,
            train_loss: loss_sum / train_set.len() as f64,
            val_p1,
            learning_rate: rate,
            improved,
        };
        on_epoch(&record, improved.then_some(&params))?;
        log.push(record);
        if since_best >= config.patience {
            stop = StopReason::Patience;
            break;
        }
    }

    Ok(TrainOutcome {
        best,
        best_epoch,
        last: params,
        log,
        stop,
        state,
    })
}
