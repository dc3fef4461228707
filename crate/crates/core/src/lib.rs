//! Exact computations with root data, affine Weyl groups, torsion points of
//! dual tori, Chevalley lifts and finite reductive group orders.
//!
//! Linear algebra and polynomials are generic over exact integer scalars
//! (see [`linalg::Int`]); the engine itself runs on `i64` with `BigInt`
//! for group orders.

pub mod affine;
pub mod centralizer;
pub mod chevalley;
pub mod error;
pub mod fdeg;
pub mod linalg;
pub mod rootcore;
pub mod verify;

pub use error::{Error, Result};
pub use rootcore::{CartanType, Family, Isogeny, RootDatum, RootSystem, WeylElement};

/// Engine version reported in every certificate and report.
pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");
