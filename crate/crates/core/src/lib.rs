//! Differential invariants of spacelike surfaces in Minkowski 4-space, with
//! constructions and numerical verification of marginally trapped meridian
//! surfaces of parabolic type.

// `!(x <= tol)` is deliberate throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod export;
pub mod expr;
pub mod jet;
pub mod meridian;
pub mod minkowski;
pub mod surface;
pub mod verification;

pub use error::{Error, Result};
pub use jet::{jet_apply, ElementaryFn, Jet2, Jet2Vec4};
pub use minkowski::{causal_character, from_null_frame, inner, to_null_frame, CausalCharacter, NullFrameCoords, Vec4M};
pub use surface::{classify_point, is_marginally_trapped, jet_eval_surface, point_data, ParamInterval, PointData, SurfacePatch};
