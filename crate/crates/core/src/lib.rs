//! Fourier, Wigner and Weyl transforms on the affine group, the similitude
//! group SIM(2) and the affine Poincare group, discretized as integral
//! operators on quadrature grids, together with the truncated-norm sweeps of
//! the singular symbols whose Weyl transforms are unbounded.

pub mod checks;
pub mod counterexamples;
pub mod error;
pub mod grid;
pub mod group;
pub mod kernel;
pub mod quad;
pub mod repr;
pub mod schatten;
pub mod setup;
pub mod transforms;
pub mod wigner;

pub use error::{Error, Result};
pub use grid::Grid;
pub use group::{GroupElement, GroupTag};
pub use kernel::{KernelMatrix, OperatorField, SymbolField, WignerField};
pub use repr::{GridFunction, RepLabel};
pub use setup::{Bump, HarmonicResolution, HarmonicSetup};
