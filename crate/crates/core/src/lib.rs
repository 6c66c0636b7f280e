//! Implicit-bias laboratory for diagonal AdaGrad on separable linear classification.
//!
//! The crate runs AdaGrad and plain gradient descent on an exponentially tailed
//! loss over linearly separable data, estimates the limit of AdaGrad's diagonal
//! preconditioner `h∞`, and solves the two quadratic programs whose minimizers
//! give the asymptotic directions of the iterates:
//!
//! * gradient descent: `argmin ‖w‖²` subject to `⟨w, z_n⟩ ≥ 1` (hard-margin SVM);
//! * AdaGrad: `argmin ‖h∞^{-1/2} ⊙ w‖²` over the same feasible set.
//!
//! Around those solvers sit checkers for the convergence properties of the
//! iterates (loss descent, summable gradients, preconditioner convergence,
//! margin onset, projection bounds of the induced form), closed-form oracles
//! for the planar worked examples, and a config-driven experiment runner.
//!
//! Modules:
//!
//! * [`model`]: datasets, loss models, assumption checks.
//! * [`optim`]: AdaGrad / GD engines, trajectories, induced-form quantities.
//! * [`maxmargin`]: hard-margin and diagonally weighted margin QP solvers.
//! * [`analysis`]: direction diagnostics, property checkers, example oracles.
//! * [`experiment`]: JSON-configured experiments, figure data and sweeps.

pub mod analysis;
pub mod error;
pub mod experiment;
pub mod maxmargin;
pub mod model;
pub mod optim;
pub mod vector;

pub use error::{Error, Result};
pub use model::{Dataset, Hyperparams, LossKind, LossModel};
pub use optim::{Optimizer, OptimizerState, RunOptions, Trajectory};
