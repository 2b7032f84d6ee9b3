//! Fast Chebyshev Transform.
//!
//! Recovers the Chebyshev coefficients of a smooth function on `[-1, 1]^D`
//! from samples on a handful of randomly under-resolved tensor grids (an
//! *L-grid*). Each grid is reduced with a fast DCT-II quadrature, and the
//! aliasing of high-degree Chebyshev polynomials on coarse grids turns the
//! quadrature outputs into a sparse linear system `F f = A c` that is solved
//! in the least-squares sense with conjugate gradients.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, caching, timing
//! and the command-line driver live in the `fct` companion crate.
//!
//! Module map:
//!
//! * [`multiindex`] — multi-index sets bounded in the 1-, 2- or max-norm.
//! * [`chebgrid`] — Chebyshev points, tensor grids, expansions, test families.
//! * [`aliasing`] — the aliasing kernel and sparse aliasing matrices.
//! * [`lgrid`] — randomized sampling rates and stacked system construction.
//! * [`condition`] — singular value / condition number estimation.
//! * [`transform`] — forward DCT-II quadrature on arbitrary-size grids.
//! * [`solver`] — operator application and normal-equations CG.
//! * [`pipeline`] — the end-to-end transform, the DCT and RLSI baselines, metrics.

#![no_std]
// NaN must fail range checks, and index loops read better in numeric code.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod aliasing;
pub mod chebgrid;
pub mod clock;
pub mod condition;
mod error;
mod fft;
pub mod lgrid;
pub mod multiindex;
pub mod pipeline;
pub mod rng;
pub mod solver;
pub mod transform;

pub use error::{FctError, Phase, Result};

pub use aliasing::{assemble_block, AliasTerm, AliasingMatrix};
pub use chebgrid::{
    ChebExpansion, ExpansionFunction, GridSpec, OscillatoryFunction, RungeFunction, SampleVector,
    TargetFunction,
};
pub use clock::{Clock, NoClock};
pub use condition::{estimate_condition, ConditionEstimate, ConditionOptions};
pub use lgrid::{
    build_system, BuildMode, BuildOptions, CompressedSystem, LGridSpec, StackedSystem,
};
pub use multiindex::{IndexSet, MultiIndex, Norm};
pub use pipeline::{FctConfig, FctOutcome};
pub use rng::RngStream;
pub use solver::{solve_normal_cg, CgOptions, CgReport, LinearOperator};
pub use transform::SpectralVector;
