//! Numerical laboratory for triangular operators on `L²(0, ω)`.
//!
//! The crate discretizes four operator families on a uniform midpoint grid:
//! multiplication operators, Volterra integral operators (including the
//! Riemann–Liouville fractional integrals `J^β`), convolution operators with
//! the `E_β` kernel, and difference-kernel operators `d/dx ∫₀ˣ s(x−t) f(t) dt`.
//! On top of the dense matrices it provides spectral analytics
//! ([`spectral`]), resolvent-growth profiling ([`resolvent`]) and symbol
//! analysis for difference kernels ([`symbol`]).
//!
//! ```
//! use triangulab_core::{grid::Grid, operators::build_fractional};
//!
//! let grid = Grid::new(1.0, 64).unwrap();
//! let j_half = build_fractional(&grid, 0.5).unwrap();
//! assert!(j_half.is_lower_triangular());
//! ```

pub mod error;
pub mod grid;
pub mod linalg;
pub mod operators;
pub mod quad;
pub mod resolvent;
pub mod specfun;
pub mod spectral;
pub mod symbol;

pub use error::{Error, Result};
pub use grid::{Grid, GridFunction, Sign};
pub use operators::{KernelSpec, OperatorMatrix, Provenance, SplitPair};
pub use resolvent::{LevinsonVerdict, ResolventProfile};
pub use specfun::EbetaSpec;
pub use spectral::SpectralReport;
pub use symbol::{DeltaSide, SymbolTrace, WitnessVerdict};

/// Complex scalar used throughout.
pub type C64 = nalgebra::Complex<f64>;

/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;

/// Dense complex column vector.
pub type CVector = nalgebra::DVector<C64>;
