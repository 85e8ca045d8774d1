//! Gradient boosting over oblivious (symmetric) decision trees with a
//! multiclass softmax objective and Newton leaf values.
//!
//! The running score after `i` trees is `F_i = F_{i-1} + lr * H_i(x)` and the
//! prediction is `T(F)` for a monotone link `T`.

mod binning;
mod ensemble;
mod loss;
mod tree;

pub use binning::{build_bins, BinnedMatrix, BinningScheme};
pub use ensemble::{fit_ensemble, GbtConfig, GbtEnsemble, Link};
pub use loss::{argmax, cross_entropy, softmax, softmax_grad_hess};
pub use tree::{fit_oblivious_tree, ObliviousTree, Split};
