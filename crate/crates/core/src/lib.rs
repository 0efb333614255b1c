//! Arithmetic distribution algebras of level `m` over the p-adic integers.

pub mod action;
pub mod cli;
pub mod coalgebra;
pub mod dagger;
pub mod diffops;
pub mod dist;
pub mod error;
pub mod flag;
pub mod group;
pub mod linalg;
pub mod padic;
pub mod verify;

pub use dist::{DistElement, PbwKey, SymbolElement};
pub use error::{Error, Result};
pub use group::{ChevalleyDatum, GroupKind};
pub use padic::{Level, LevelContext, MultiIndex, Prime, Rational, ValuedRational};
