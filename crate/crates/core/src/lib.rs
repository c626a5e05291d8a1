//! Finite-scale effective constructions on equivalence structures and
//! preorders, driven by ultimately periodic approximations so that every
//! limit is exactly decidable.

pub mod blocks;
pub mod ceersim;
pub mod cli;
pub mod coceer;
pub mod eqrel;
pub mod error;
pub mod gen;
pub mod num;
pub mod oracle;
pub mod pi01;
pub mod preorder;
pub mod seq;
pub mod suite;

pub use error::{Error, Result};
pub use num::{cantor_pair, cantor_unpair, Natural, StagePair};

/// Element type for ω.
pub type Nat = u64;
/// Ultimately periodic sequence over [`Nat`].
pub type UpSeq = seq::UltimatelyPeriodic<Nat>;
/// Two-argument approximation table over [`Nat`].
pub type ApproxTable = seq::ApproxTable<Nat>;
