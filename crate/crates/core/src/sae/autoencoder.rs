use ndarray::{s, Array1, Array2, ArrayView2, Axis};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{DenseLayer, Optimizer, SaeConfig};
use crate::error::{Error, Result};

/// A chain of dense layers whose output has the input's dimension.
///
/// Widths never increase up to the bottleneck (the narrowest output) and
/// never decrease after it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Autoencoder {
    layers: Vec<DenseLayer>,
}

/// Gradient of the loss with respect to one layer's parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerGradient {
    pub weights: Array2<f64>,
    pub biases: Array1<f64>,
}

impl Autoencoder {
    pub fn new(layers: Vec<DenseLayer>) -> Result<Self> {
        let first = layers.first().ok_or(Error::Empty("autoencoder layers"))?;
        for pair in layers.windows(2) {
            if pair[0].out_dim() != pair[1].in_dim() {
                return Err(Error::Shape {
                    expected: pair[0].out_dim(),
                    actual: pair[1].in_dim(),
                    context: "consecutive layer widths",
                });
            }
        }
        let last = layers.last().unwrap();
        if last.out_dim() != first.in_dim() {
            return Err(Error::Shape {
                expected: first.in_dim(),
                actual: last.out_dim(),
                context: "autoencoder output vs input width",
            });
        }
        let ae = Self { layers };
        let b = ae.bottleneck_index();
        let widths: Vec<usize> = ae.layers.iter().map(DenseLayer::out_dim).collect();
        let funnel = std::iter::once(ae.input_dim()).chain(widths[..=b].iter().copied()).collect::<Vec<_>>();
        if funnel.windows(2).any(|w| w[1] > w[0]) || widths[b..].windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Config(format!(
                "layer widths {widths:?} do not narrow to a bottleneck and widen back"
            )));
        }
        Ok(ae)
    }

    pub fn layers(&self) -> &[DenseLayer] {
        &self.layers
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].in_dim()
    }

    /// Index of the layer with the narrowest output (first one on ties).
    pub fn bottleneck_index(&self) -> usize {
        let mut best = 0;
        for (i, l) in self.layers.iter().enumerate() {
            if l.out_dim() < self.layers[best].out_dim() {
                best = i;
            }
        }
        best
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(DenseLayer::param_count).sum()
    }

    /// Forward pass of a single vector through every layer.
    pub fn reconstruct(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_width(x.len())?;
        let input = ArrayView2::from_shape((1, x.len()), x).expect("row vector");
        Ok(self.forward_batch(input).into_raw_vec_and_offset().0)
    }

    /// Output of the first `n_layers` layers for every row of `batch`.
    pub fn forward_prefix(&self, batch: ArrayView2<'_, f64>, n_layers: usize) -> Array2<f64> {
        let mut a = batch.to_owned();
        for layer in &self.layers[..n_layers] {
            a = layer.forward(a.view());
        }
        a
    }

    pub fn forward_batch(&self, batch: ArrayView2<'_, f64>) -> Array2<f64> {
        self.forward_prefix(batch, self.layers.len())
    }

    fn check_width(&self, width: usize) -> Result<()> {
        if width != self.input_dim() {
            return Err(Error::Shape {
                expected: self.input_dim(),
                actual: width,
                context: "autoencoder input width",
            });
        }
        Ok(())
    }

    /// Mean squared error over every element of `batch` against `targets`.
    pub fn loss(&self, batch: ArrayView2<'_, f64>, targets: ArrayView2<'_, f64>) -> f64 {
        let out = self.forward_batch(batch);
        mse(&out, targets)
    }

    /// Loss and its gradient with respect to every layer, by backpropagation.
    pub fn loss_and_gradients(
        &self,
        batch: ArrayView2<'_, f64>,
        targets: ArrayView2<'_, f64>,
    ) -> (f64, Vec<LayerGradient>) {
        let mut inputs = Vec::with_capacity(self.layers.len());
        let mut pre = Vec::with_capacity(self.layers.len());
        let mut a = batch.to_owned();
        for layer in &self.layers {
            let z = layer.pre_activation(a.view());
            let act = layer.activation;
            let next = z.mapv(|v| act.apply(v));
            inputs.push(a);
            pre.push(z);
            a = next;
        }
        let loss = mse(&a, targets);

        let scale = 2.0 / a.len() as f64;
        let mut delta = (&a - &targets) * scale;
        let mut grads = Vec::with_capacity(self.layers.len());
        for (i, layer) in self.layers.iter().enumerate().rev() {
            let act = layer.activation;
            // `a` holds this layer's output; fold the activation derivative in.
            ndarray::Zip::from(&mut delta)
                .and(&pre[i])
                .and(&a)
                .for_each(|d, &z, &out| *d *= act.derivative(z, out));
            let weights = delta.t().dot(&inputs[i]);
            let biases = delta.sum_axis(Axis(0));
            let prev_delta = delta.dot(&layer.weights);
            grads.push(LayerGradient { weights, biases });
            a = std::mem::take(&mut inputs[i]);
            delta = prev_delta;
        }
        grads.reverse();
        (loss, grads)
    }

    /// Mini-batch SGD on `inputs → targets`. Returns the loss over the full
    /// data set after each epoch.
    pub(crate) fn fit(
        &mut self,
        inputs: ArrayView2<'_, f64>,
        targets: ArrayView2<'_, f64>,
        cfg: &SaeConfig,
        stream: u64,
    ) -> Result<Vec<f64>> {
        cfg.validate()?;
        let n = inputs.nrows();
        if n == 0 {
            return Err(Error::Empty("autoencoder training data"));
        }
        self.check_width(inputs.ncols())?;
        let out_dim = self.layers.last().unwrap().out_dim();
        if targets.ncols() != out_dim || targets.nrows() != n {
            return Err(Error::Shape {
                expected: out_dim,
                actual: targets.ncols(),
                context: "autoencoder target width",
            });
        }

        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(stream);
        let mut order: Vec<usize> = (0..n).collect();
        let mut history = Vec::with_capacity(cfg.epochs);
        let mut adam = AdamState::new(&self.layers);
        for epoch in 0..cfg.epochs {
            order.shuffle(&mut rng);
            for chunk in order.chunks(cfg.batch_size) {
                let xb = inputs.select(Axis(0), chunk);
                let tb = targets.select(Axis(0), chunk);
                let (_, grads) = self.loss_and_gradients(xb.view(), tb.view());
                match cfg.optimizer {
                    Optimizer::Sgd => {
                        for (layer, g) in self.layers.iter_mut().zip(&grads) {
                            layer.weights.scaled_add(-cfg.learning_rate, &g.weights);
                            layer.biases.scaled_add(-cfg.learning_rate, &g.biases);
                        }
                    }
                    Optimizer::Adam => adam.step(&mut self.layers, &grads, cfg.learning_rate),
                }
            }
            let loss = self.loss(inputs, targets);
            if !loss.is_finite() {
                return Err(Error::Diverged { epoch, loss });
            }
            history.push(loss);
        }
        Ok(history)
    }
}

/// First and second moment estimates, one pair per layer parameter block.
struct AdamState {
    moments: Vec<(LayerGradient, LayerGradient)>,
    t: i32,
}

impl AdamState {
    const BETA1: f64 = 0.9;
    const BETA2: f64 = 0.999;
    const EPS: f64 = 1e-8;

    fn new(layers: &[DenseLayer]) -> Self {
        let zeros = |l: &DenseLayer| LayerGradient {
            weights: Array2::zeros(l.weights.raw_dim()),
            biases: Array1::zeros(l.biases.raw_dim()),
        };
        Self {
            moments: layers.iter().map(|l| (zeros(l), zeros(l))).collect(),
            t: 0,
        }
    }

    fn step(&mut self, layers: &mut [DenseLayer], grads: &[LayerGradient], lr: f64) {
        self.t += 1;
        let c1 = 1.0 - Self::BETA1.powi(self.t);
        let c2 = 1.0 - Self::BETA2.powi(self.t);
        let update = |p: &mut f64, m: &mut f64, v: &mut f64, g: f64| {
            *m = Self::BETA1 * *m + (1.0 - Self::BETA1) * g;
            *v = Self::BETA2 * *v + (1.0 - Self::BETA2) * g * g;
            *p -= lr * (*m / c1) / ((*v / c2).sqrt() + Self::EPS);
        };
        for ((layer, g), (m, v)) in layers.iter_mut().zip(grads).zip(&mut self.moments) {
            ndarray::Zip::from(&mut layer.weights)
                .and(&mut m.weights)
                .and(&mut v.weights)
                .and(&g.weights)
                .for_each(|p, m, v, &g| update(p, m, v, g));
            ndarray::Zip::from(&mut layer.biases)
                .and(&mut m.biases)
                .and(&mut v.biases)
                .and(&g.biases)
                .for_each(|p, m, v, &g| update(p, m, v, g));
        }
    }
}

fn mse(out: &Array2<f64>, targets: ArrayView2<'_, f64>) -> f64 {
    let n = out.len().max(1) as f64;
    ndarray::Zip::from(out)
        .and(&targets)
        .fold(0.0, |acc, &o, &t| acc + (o - t) * (o - t))
        / n
}

/// Rows of `data` stacked into a matrix; every row must have `width` entries.
pub(crate) fn to_matrix(data: &[Vec<f64>], width: usize) -> Result<Array2<f64>> {
    let mut m = Array2::zeros((data.len(), width));
    for (i, row) in data.iter().enumerate() {
        if row.len() != width {
            return Err(Error::Shape {
                expected: width,
                actual: row.len(),
                context: "training vector width",
            });
        }
        m.slice_mut(s![i, ..]).assign(&ndarray::aview1(row));
    }
    Ok(m)
}

/// Trains `ae` to reconstruct `data`, returning the per-epoch mean squared
/// reconstruction error.
pub fn train_autoencoder(ae: &mut Autoencoder, data: &[Vec<f64>], cfg: &SaeConfig) -> Result<Vec<f64>> {
    if data.is_empty() {
        return Err(Error::Empty("autoencoder training data"));
    }
    let m = to_matrix(data, ae.input_dim())?;
    ae.fit(m.view(), m.view(), cfg, 0)
}
