//! Variance-based adaptive learning rates for stochastic gradient descent.
//!
//! The crate provides:
//!
//! - [`quad`]: the idealized noisy quadratic loss, its closed-form expected
//!   loss, and the oracle (greedy-optimal) local and global learning rates.
//! - [`optim`]: vSGD-l/g/b (adaptive per-dimension, global, and per-block
//!   rates driven by gradient-variance estimates), plain SGD with cooling
//!   schedules, and the AdaGrad, Amari, Almeida, and SMD baselines.
//! - [`nn`]: small feed-forward tanh networks with exact backprop gradients,
//!   nonnegative diagonal Gauss-Newton curvature estimates ("bbprop"), and
//!   exact Hessian-vector products.
//! - [`data`]: MNIST (IDX) and CIFAR-10 binary loaders, mean-centering, and
//!   synthetic dataset generators for dataset-free runs.
//! - [`harness`]: experiment configs, multi-seed training loops, grid search,
//!   Welch-test comparison, quadratic-world demos, slow-start sweeps, and CSV
//!   trace emission.
//!
//! Everything is deterministic: a `(config, seed)` pair fully determines every
//! emitted number (wall-clock fields excepted). See the `examples/` directory
//! for one runnable program per capability; the `vsgd` binary exposes the same
//! entry points as subcommands.

pub mod data;
pub mod ema;
pub mod harness;
pub mod linalg;
pub mod nn;
pub mod optim;
pub mod quad;
pub mod rng;

pub use ema::ema_update;
pub use linalg::DenseMatrix;
pub use quad::NoisyQuadratic;
pub use rng::SeededRng;
