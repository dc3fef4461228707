//! Finite root systems, Weyl groups, root data and fundamental groups.

pub mod cartan;
pub mod datum;
pub mod system;
pub mod weyl;

pub use cartan::{CartanType, Family};
pub use datum::{FundamentalGroup, Isogeny, RootDatum};
pub use system::{ComponentType, RootSystem, Vector};
pub use weyl::WeylElement;
