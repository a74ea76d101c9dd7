//! Constant mean curvature spacelike graphs in anti-de Sitter space.
//!
//! The crate covers the closed-form geometry of the quadric model
//! ([`quadric`], [`exact`]), admissible asymptotic boundary data and the
//! invisible domain they bound ([`boundary`], [`hull`], [`cosmo`]), a
//! discretization of spacelike graphs over geodesic discs of H^2 ([`mesh`],
//! [`geometry`], [`fem`]) and the CMC solvers built on it ([`solver`],
//! [`foliation`]). [`cli`] and [`io`] back the `adscmc` binary.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod boundary;
pub mod cli;
pub mod cosmo;
pub mod error;
pub mod exact;
pub mod fem;
pub mod foliation;
pub mod geometry;
pub mod hull;
pub mod io;
pub mod mesh;
pub mod quadric;
pub mod sampling;
pub mod solver;
pub mod sparse;

pub use error::{AdsError, Result};
