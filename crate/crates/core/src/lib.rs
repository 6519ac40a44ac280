//! Numerical laboratory for square-root functions on the complement of
//! Cantor-type sets and the two-sheeted structure of their pluripolar hulls.
//!
//! * [`cantor`]: interval systems, block enumeration and the certified
//!   interval-selection construction.
//! * [`product`] and [`monodromy`]: the rational products `g_n`, their square
//!   roots `f_n`, tail bounds, window factorizations and branch tracking.
//! * [`harmonic`] and [`grid`]: harmonic measure by walk-on-spheres with a
//!   finite-difference oracle.
//! * [`witness`]: plurisubharmonic witness functions built from rational
//!   approximants.
//! * [`hull`]: sheet functions, two-constant checks, covers, Hausdorff
//!   distances and cluster-set probes.
//! * [`verify`]: the acceptance criteria, shared by the test suite and the CLI.

pub mod cantor;
pub mod domain;
pub mod error;
pub mod export;
pub mod grid;
pub mod harmonic;
pub mod hull;
pub mod monodromy;
pub mod product;
pub mod rng;
pub mod verify;
pub mod witness;

pub use cantor::{construct, CantorState, ConstructionParams, Interval};
pub use domain::{Disc, SlitDiskDomain};
pub use error::{Error, Result};
