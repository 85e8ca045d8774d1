use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Trainable parameters of a fully connected layer: one weight per
/// input/output pair plus one bias per output.
pub const fn layer_param_count(in_dim: usize, out_dim: usize) -> usize {
    out_dim * (in_dim + 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Activation {
    Relu,
    Sigmoid,
    Identity,
}

impl Activation {
    #[inline]
    pub fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Relu => z.max(0.0),
            Activation::Sigmoid => 1.0 / (1.0 + (-z).exp()),
            Activation::Identity => z,
        }
    }

    /// Derivative expressed through the pre-activation `z` and output `a`.
    #[inline]
    pub fn derivative(self, z: f64, a: f64) -> f64 {
        match self {
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Sigmoid => a * (1.0 - a),
            Activation::Identity => 1.0,
        }
    }
}

/// Fully connected layer computing `act(W x + b)`; `weights` is
/// `out_dim × in_dim`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseLayer {
    pub weights: Array2<f64>,
    pub biases: Array1<f64>,
    pub activation: Activation,
}

impl DenseLayer {
    /// Fan-in scaled uniform initialization in `[-1/sqrt(in), 1/sqrt(in)]`.
    pub fn init<R: Rng + ?Sized>(in_dim: usize, out_dim: usize, activation: Activation, rng: &mut R) -> Self {
        let bound = 1.0 / (in_dim as f64).sqrt();
        let weights = Array2::from_shape_simple_fn((out_dim, in_dim), || rng.random_range(-bound..=bound));
        let biases = Array1::from_shape_simple_fn(out_dim, || rng.random_range(-bound..=bound));
        Self {
            weights,
            biases,
            activation,
        }
    }

    pub fn zeros(in_dim: usize, out_dim: usize, activation: Activation) -> Self {
        Self {
            weights: Array2::zeros((out_dim, in_dim)),
            biases: Array1::zeros(out_dim),
            activation,
        }
    }

    pub fn in_dim(&self) -> usize {
        self.weights.ncols()
    }

    pub fn out_dim(&self) -> usize {
        self.weights.nrows()
    }

    pub fn param_count(&self) -> usize {
        layer_param_count(self.in_dim(), self.out_dim())
    }

    pub fn is_finite(&self) -> bool {
        self.weights.iter().chain(self.biases.iter()).all(|v| v.is_finite())
    }

    /// Pre-activations for a batch (`batch × in_dim` → `batch × out_dim`).
    pub(crate) fn pre_activation(&self, input: ArrayView2<'_, f64>) -> Array2<f64> {
        let mut z = input.dot(&self.weights.t());
        z += &self.biases.view().insert_axis(Axis(0));
        z
    }

    pub(crate) fn forward(&self, input: ArrayView2<'_, f64>) -> Array2<f64> {
        let act = self.activation;
        self.pre_activation(input).mapv_into(|z| act.apply(z))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn param_counts() {
        assert_eq!(layer_param_count(172, 86), 14878);
        assert_eq!(layer_param_count(1, 1), 2);
        assert_eq!(layer_param_count(3, 4), 16);
        assert_eq!(DenseLayer::zeros(3, 4, Activation::Relu).param_count(), 16);
    }

    #[test]
    fn sigmoid_of_zero_is_half() {
        assert_eq!(Activation::Sigmoid.apply(0.0), 0.5);
        assert_eq!(Activation::Relu.apply(-2.0), 0.0);
        assert_eq!(Activation::Identity.apply(-2.0), -2.0);
    }
}
