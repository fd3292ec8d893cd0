//! Exact rational algebra of cyclic global functors truncated to a finite
//! divisor-closed set of levels: `Out^op_cyc`-modules, the rationalized
//! representation ring `RU_Q` and its quotient by transfers, and Hom/Ext
//! groups into the regular module computed directly and via inverse limits.

pub mod battery;
pub mod error;
pub mod format;
pub mod hom_ext;
pub mod linalg;
pub mod modp;
pub mod normal_basis;
pub mod outcyc;
pub mod poly;
pub mod rational;
pub mod rep_ring;
pub mod resolution;
pub mod site;
pub mod sparse;

pub use error::{Error, Result};
pub use linalg::QMatrix;
pub use outcyc::{ModuleMorphism, OutCycModule};
pub use rational::Rat;
pub use site::SupportSet;
