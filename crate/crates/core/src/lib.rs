//! Metric structures on `Z/pZ`, exact Gromov–Hausdorff distances between
//! finite metric spaces, and numerical experiments on sequences of rings.

pub mod caps;
pub mod cli;
pub mod error;
pub mod gh;
pub mod limits;
pub mod metric;
pub mod nets;
pub mod rational;
pub mod report;
pub mod rings;

pub use caps::SizeCaps;
pub use error::{Error, Result};
pub use rational::Rational;
