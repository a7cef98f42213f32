//! Fallback classifier for sentences the rules cannot decide.
//!
//! The fallback is a small feed-forward network over concatenated word
//! embeddings: a sentence is turned into a fixed-length vector by stacking
//! the embeddings of its first words ([`EmbeddingTable::vectorize`]), passed
//! through one rectified hidden layer, and read out as a two-way softmax.
//! Everything — forward pass, backpropagation, the Adam optimizer — is
//! written out explicitly so training is deterministic and auditable, and a
//! trained model round-trips bit-exactly through a checksummed binary file.

mod embedding;
mod network;
mod store;

pub use embedding::{EmbeddingError, EmbeddingLoad, EmbeddingTable};
pub use network::{FallbackModel, TrainError, TrainHistory, TrainOptions};
pub use store::ModelIoError;
