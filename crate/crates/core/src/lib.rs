//! Ergonomic risk analysis core: REBA posture scoring over per-frame joint
//! angles, and the aggregated structures behind linked visual-analysis views.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the CLI and
//! the HTTP service live in the `ergo` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod aggregate;
pub mod filter;
pub mod frame;
pub mod joint;
pub mod reba;
pub mod selection;

pub use frame::{AngleRange, Coupling, Dataset, FrameRecord, Modifier, ModifierFlags, Violation};
pub use joint::{BodyPart, BodySide, JointId, Side};
pub use reba::{ActionLevel, RebaConfig, ScoredDataset, TableId};
