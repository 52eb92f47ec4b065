//! Numerical laboratory for the Hardy-Orlicz space `H^log` on the circle.
//!
//! Functions live on uniform grids of the circle (`3 * 2^N` cells, so that both the
//! standard dyadic arcs and the arcs shifted by one third are unions of cells) or of a
//! bounded interval.

pub mod atomic;
pub mod dyadic;
pub mod error;
pub mod fourier;
pub mod grid;
pub mod harness;
pub mod maximal;
pub mod orlicz;
pub mod paraproduct;
pub mod quad;

pub use dyadic::{Arc, HaarCoefficients, Shift};
pub use error::{Error, Result};
pub use grid::{Domain, GridFunction};
pub use orlicz::OrliczSpec;
