//! Greedy layer-wise stacked autoencoder used to synthesize fingerprints.
//!
//! Three autoencoders share weights:
//!
//! ```text
//! AE1: d ─L1→ d ─L2→ h ─L3→ d            trained on fingerprints
//! AE3: h ─L1→ h ─L2→ q ─L3→ h            trained on AE1-L2 codes
//! AE2: d ─[AE1-L2]→ h ─[AE3-L2]→ q ─[fresh]→ q ─[AE3-L3]→ h ─[AE1-L3]→ d
//! ```
//!
//! AE2 reads the AE1-L1 representation of a fingerprint and is fine-tuned
//! to reproduce the fingerprint; `AE2(AE1-L1(x))` is the synthetic sample.

mod autoencoder;
mod layer;
mod stacked;

pub use autoencoder::{train_autoencoder, Autoencoder, LayerGradient};
pub use layer::{layer_param_count, Activation, DenseLayer};
pub use stacked::{augment, fine_tune, greedy_pretrain, Optimizer, SaeConfig, StackedAutoencoder, WidthConfig};
