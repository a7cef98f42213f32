//! The feed-forward fallback network, written out from scratch.
//!
//! Architecture: input of `n * k` values (the vectorized sentence), one
//! hidden layer of rectified units, and a two-way softmax readout where
//! class `0` is positive and class `1` is negative. Training minimizes
//! cross-entropy with hand-derived backpropagation and the Adam update;
//! batch gradients are sums over the batch. All randomness (weight
//! initialization, per-epoch shuffling) comes from a counter-based generator
//! seeded by the model's seed, so the same seed always yields bitwise
//! identical parameters.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::sentence::Polarity;

const BETA1: f64 = 0.9;
const BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;
const PROB_FLOOR: f64 = 1e-12;

/// One set of network-shaped tensors: used for parameters, gradients and
/// Adam moments alike.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Tensors {
    /// Hidden weights, `hidden × input` row-major.
    pub w1: Vec<f64>,
    /// Hidden biases.
    pub b1: Vec<f64>,
    /// Output weights, `2 × hidden` row-major.
    pub w2: Vec<f64>,
    /// Output biases.
    pub b2: Vec<f64>,
}

impl Tensors {
    fn zeros(input: usize, hidden: usize) -> Self {
        Tensors {
            w1: vec![0.0; hidden * input],
            b1: vec![0.0; hidden],
            w2: vec![0.0; 2 * hidden],
            b2: vec![0.0; 2],
        }
    }

    fn fields(&self) -> [&Vec<f64>; 4] {
        [&self.w1, &self.b1, &self.w2, &self.b2]
    }

    fn fields_mut(&mut self) -> [&mut Vec<f64>; 4] {
        [&mut self.w1, &mut self.b1, &mut self.w2, &mut self.b2]
    }
}

/// Numerically stable two-way softmax.
fn softmax2(z: [f64; 2]) -> [f64; 2] {
    let m = z[0].max(z[1]);
    let e0 = (z[0] - m).exp();
    let e1 = (z[1] - m).exp();
    let sum = e0 + e1;
    [e0 / sum, e1 / sum]
}

/// Cross-entropy of a two-way probability vector against the true class,
/// with the probability floored at `1e-12` so the loss stays finite.
pub fn cross_entropy(probs: &[f64; 2], label: usize) -> f64 {
    -probs[label].max(PROB_FLOOR).ln()
}

/// Knobs for [`FallbackModel::train`].
#[derive(Debug, Clone, PartialEq)]
pub struct TrainOptions {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    /// Stop after this many epochs without a new best validation loss.
    /// Requires validation data; `None` disables early stopping.
    pub patience: Option<usize>,
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions {
            epochs: 200,
            batch_size: 32,
            learning_rate: 1e-3,
            patience: None,
        }
    }
}

/// Per-epoch loss curves recorded during training.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainHistory {
    /// Mean per-example training loss after each epoch.
    pub train: Vec<f64>,
    /// Mean per-example validation loss after each epoch (when validation
    /// data was supplied).
    pub val: Vec<f64>,
}

/// Rejected training inputs.
#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum TrainError {
    #[error("training set is empty")]
    Empty,
    #[error("{inputs} input vectors but {labels} labels")]
    LengthMismatch { inputs: usize, labels: usize },
    #[error("input {index} has {found} values, expected {expected}")]
    DimMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("label {label} at index {index} is not 0 or 1")]
    BadLabel { index: usize, label: usize },
}

/// The trainable fallback classifier.
#[derive(Debug, Clone, PartialEq)]
pub struct FallbackModel {
    pub(crate) n: usize,
    pub(crate) k: usize,
    pub(crate) hidden: usize,
    pub(crate) seed: u64,
    /// Number of Adam updates applied so far.
    pub(crate) step: u64,
    pub(crate) params: Tensors,
    pub(crate) moment1: Tensors,
    pub(crate) moment2: Tensors,
}

impl FallbackModel {
    /// Default capacity: words per sentence.
    pub const DEFAULT_MAX_WORDS: usize = 50;
    /// Default embedding dimensionality.
    pub const DEFAULT_DIM: usize = 300;
    /// Default hidden-layer width.
    pub const DEFAULT_HIDDEN: usize = 128;

    /// Builds a model with seeded uniform `±1/√fan_in` weights and zero
    /// biases. `n` is the word capacity, `k` the embedding dimensionality,
    /// `hidden` the hidden-layer width.
    pub fn new(n: usize, k: usize, hidden: usize, seed: u64) -> Self {
        assert!(n >= 1 && k >= 1 && hidden >= 1, "degenerate model shape");
        let input = n * k;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut params = Tensors::zeros(input, hidden);
        let bound1 = 1.0 / (input as f64).sqrt();
        for w in params.w1.iter_mut() {
            *w = rng.random_range(-bound1..bound1);
        }
        let bound2 = 1.0 / (hidden as f64).sqrt();
        for w in params.w2.iter_mut() {
            *w = rng.random_range(-bound2..bound2);
        }
        FallbackModel {
            n,
            k,
            hidden,
            seed,
            step: 0,
            params,
            moment1: Tensors::zeros(input, hidden),
            moment2: Tensors::zeros(input, hidden),
        }
    }

    /// Builds a model with every parameter zero: the forward pass yields an
    /// even `[0.5, 0.5]` split and prediction falls back to positive.
    pub fn zeroed(n: usize, k: usize, hidden: usize) -> Self {
        assert!(n >= 1 && k >= 1 && hidden >= 1, "degenerate model shape");
        let input = n * k;
        FallbackModel {
            n,
            k,
            hidden,
            seed: 0,
            step: 0,
            params: Tensors::zeros(input, hidden),
            moment1: Tensors::zeros(input, hidden),
            moment2: Tensors::zeros(input, hidden),
        }
    }

    /// Word capacity of the input layer.
    pub fn max_words(&self) -> usize {
        self.n
    }

    /// Embedding dimensionality expected per word.
    pub fn dim(&self) -> usize {
        self.k
    }

    /// Hidden-layer width.
    pub fn hidden(&self) -> usize {
        self.hidden
    }

    /// Seed the parameters were initialized from.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Length of the expected input vector.
    pub fn input_len(&self) -> usize {
        self.n * self.k
    }

    fn forward_full(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>, [f64; 2]) {
        assert_eq!(x.len(), self.input_len(), "input length mismatch");
        let input = self.input_len();
        let mut z1 = vec![0.0; self.hidden];
        for j in 0..self.hidden {
            let row = &self.params.w1[j * input..(j + 1) * input];
            let mut sum = self.params.b1[j];
            for (w, xv) in row.iter().zip(x) {
                sum += w * xv;
            }
            z1[j] = sum;
        }
        let a1: Vec<f64> = z1.iter().map(|&z| z.max(0.0)).collect();
        let mut z2 = [self.params.b2[0], self.params.b2[1]];
        for c in 0..2 {
            let row = &self.params.w2[c * self.hidden..(c + 1) * self.hidden];
            for (w, av) in row.iter().zip(&a1) {
                z2[c] += w * av;
            }
        }
        (z1, a1, z2)
    }

    /// Class probabilities `[positive, negative]` for an input vector.
    pub fn forward(&self, x: &[f64]) -> [f64; 2] {
        let (_, _, z2) = self.forward_full(x);
        softmax2(z2)
    }

    /// Predicted polarity: positive when its probability is at least that of
    /// negative (ties break positive). By construction this never returns
    /// [`Polarity::Unclassified`].
    pub fn predict(&self, x: &[f64]) -> Polarity {
        let p = self.forward(x);
        if p[0] >= p[1] {
            Polarity::Positive
        } else {
            Polarity::Negative
        }
    }

    /// Mean per-example cross-entropy over a dataset.
    pub fn mean_loss(&self, xs: &[Vec<f64>], ys: &[usize]) -> f64 {
        assert_eq!(xs.len(), ys.len(), "inputs and labels must align");
        assert!(!xs.is_empty(), "mean loss of an empty set");
        let total: f64 = xs
            .iter()
            .zip(ys)
            .map(|(x, &y)| cross_entropy(&self.forward(x), y))
            .sum();
        total / xs.len() as f64
    }

    /// Flattened copy of the trainable parameters, in input-to-hidden
    /// weights, hidden biases, hidden-to-output weights, output biases
    /// order.
    pub fn parameters(&self) -> Vec<f64> {
        self.params
            .fields()
            .iter()
            .flat_map(|f| f.iter().copied())
            .collect()
    }

    /// Overwrites the trainable parameters from a flat slice laid out as
    /// [`FallbackModel::parameters`] returns it.
    ///
    /// # Panics
    ///
    /// Panics when `flat` has the wrong length.
    pub fn set_parameters(&mut self, flat: &[f64]) {
        let mut offset = 0;
        for field in self.params.fields_mut() {
            let len = field.len();
            field.copy_from_slice(&flat[offset..offset + len]);
            offset += len;
        }
        assert_eq!(offset, flat.len(), "parameter slice length mismatch");
    }

    /// Loss gradient summed over the whole dataset, flattened in the same
    /// order as [`FallbackModel::parameters`].
    pub fn gradient(&self, inputs: &[Vec<f64>], labels: &[usize]) -> Result<Vec<f64>, TrainError> {
        self.check_dataset(inputs, labels)?;
        let indices: Vec<usize> = (0..inputs.len()).collect();
        let grads = self.batch_gradient(inputs, labels, &indices);
        Ok(grads
            .fields()
            .iter()
            .flat_map(|f| f.iter().copied())
            .collect())
    }

    /// Gradient of the cross-entropy loss for one example, by
    /// backpropagation.
    fn grad_single(&self, x: &[f64], label: usize, out: &mut Tensors) {
        let input = self.input_len();
        let (z1, a1, z2) = self.forward_full(x);
        let p = softmax2(z2);
        // dL/dz2 = p - onehot(label)
        let mut dz2 = [p[0], p[1]];
        dz2[label] -= 1.0;
        for c in 0..2 {
            out.b2[c] += dz2[c];
            let row = &mut out.w2[c * self.hidden..(c + 1) * self.hidden];
            for (g, av) in row.iter_mut().zip(&a1) {
                *g += dz2[c] * av;
            }
        }
        for j in 0..self.hidden {
            if z1[j] <= 0.0 {
                continue; // rectifier gate closed: no gradient flows back
            }
            let da1 = self.params.w2[j] * dz2[0] + self.params.w2[self.hidden + j] * dz2[1];
            out.b1[j] += da1;
            let row = &mut out.w1[j * input..(j + 1) * input];
            for (g, xv) in row.iter_mut().zip(x) {
                *g += da1 * xv;
            }
        }
    }

    /// Summed gradient over the examples selected by `indices`.
    fn batch_gradient(&self, xs: &[Vec<f64>], ys: &[usize], indices: &[usize]) -> Tensors {
        let mut out = Tensors::zeros(self.input_len(), self.hidden);
        for &i in indices {
            self.grad_single(&xs[i], ys[i], &mut out);
        }
        out
    }

    /// One bias-corrected Adam update with the given gradient.
    fn adam_step(&mut self, grads: &Tensors, learning_rate: f64) {
        self.step += 1;
        let t = self.step as f64;
        let c1 = 1.0 - BETA1.powf(t);
        let c2 = 1.0 - BETA2.powf(t);
        let ps = self.params.fields_mut();
        let gs = grads.fields();
        let ms = self.moment1.fields_mut();
        let vs = self.moment2.fields_mut();
        for (((p, g), m), v) in ps.into_iter().zip(gs).zip(ms).zip(vs) {
            for (((p, &g), m), v) in p.iter_mut().zip(g.iter()).zip(m.iter_mut()).zip(v.iter_mut())
            {
                *m = BETA1 * *m + (1.0 - BETA1) * g;
                *v = BETA2 * *v + (1.0 - BETA2) * g * g;
                let m_hat = *m / c1;
                let v_hat = *v / c2;
                *p -= learning_rate * m_hat / (v_hat.sqrt() + ADAM_EPS);
            }
        }
    }

    fn check_dataset(&self, xs: &[Vec<f64>], ys: &[usize]) -> Result<(), TrainError> {
        if xs.len() != ys.len() {
            return Err(TrainError::LengthMismatch {
                inputs: xs.len(),
                labels: ys.len(),
            });
        }
        let expected = self.input_len();
        for (index, x) in xs.iter().enumerate() {
            if x.len() != expected {
                return Err(TrainError::DimMismatch {
                    index,
                    expected,
                    found: x.len(),
                });
            }
        }
        for (index, &label) in ys.iter().enumerate() {
            if label > 1 {
                return Err(TrainError::BadLabel { index, label });
            }
        }
        Ok(())
    }

    /// Trains on `(xs, ys)` with mini-batch Adam, recording per-epoch mean
    /// losses. With `validation` supplied the validation curve is recorded
    /// too, and [`TrainOptions::patience`] can stop training once the
    /// validation loss stops improving. Zero epochs leave the model
    /// untouched and the history empty.
    pub fn train(
        &mut self,
        xs: &[Vec<f64>],
        ys: &[usize],
        validation: Option<(&[Vec<f64>], &[usize])>,
        opts: &TrainOptions,
    ) -> Result<TrainHistory, TrainError> {
        if xs.is_empty() {
            return Err(TrainError::Empty);
        }
        self.check_dataset(xs, ys)?;
        if let Some((vx, vy)) = validation {
            self.check_dataset(vx, vy)?;
        }
        let batch = opts.batch_size.max(1);
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut order: Vec<usize> = (0..xs.len()).collect();
        let mut history = TrainHistory::default();
        let mut best = f64::INFINITY;
        let mut stale = 0usize;
        for _ in 0..opts.epochs {
            order.shuffle(&mut rng);
            for chunk in order.chunks(batch) {
                let grads = self.batch_gradient(xs, ys, chunk);
                self.adam_step(&grads, opts.learning_rate);
            }
            history.train.push(self.mean_loss(xs, ys));
            if let Some((vx, vy)) = validation {
                let val_loss = self.mean_loss(vx, vy);
                history.val.push(val_loss);
                if let Some(patience) = opts.patience {
                    if val_loss < best {
                        best = val_loss;
                        stale = 0;
                    } else {
                        stale += 1;
                        if stale >= patience {
                            break;
                        }
                    }
                }
            }
        }
        Ok(history)
    }
}
