//! Numerical toolkit for second-order Sobolev inequalities on manifolds with
//! nonnegative Ricci curvature.
//!
//! * [`sharp`]: sharp Euclidean constants and the Euclidean comparison function `G`.
//! * [`volume`]: radial volume profiles and the `F`-side comparison machinery.
//! * [`munn`]: Munn-Perelman recursion values, constants and homotopy thresholds.
//! * [`rigidity`]: the `(n, C)` decision procedure and its report format.

pub mod error;
pub mod kv;
pub mod munn;
pub mod numerics;
pub mod rigidity;
pub mod sharp;
pub mod volume;

pub use error::{Error, Result};
pub use numerics::{LogScaledReal, QuadratureResult};
pub use sharp::Dimension;
