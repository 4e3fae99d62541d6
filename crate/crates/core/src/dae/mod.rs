//! Over-complete seven-layer dense autoencoder, trained from scratch.

mod model;
mod train;

pub use model::{
    init_model, loss, Architecture, DaeModel, Dense, ForwardCache, Gradients, BOTTLENECK_WIDTH,
};
pub use train::{train, train_with, TrainParams, TrainReport};
