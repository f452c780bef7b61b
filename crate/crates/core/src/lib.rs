//! Layered performance models for multinode quantum computers (MNQCs) whose
//! nodes are joined by microwave-to-optical (M2O) interconnects.
//!
//! The crate follows the network stack bottom-up:
//!
//! - [`densmat`]: dense density matrices and Kraus channels.
//! - [`physical`]: heralded entanglement generation across two M2O converters.
//! - [`distillation`]: nested DEJMPS purification with decoherence and timing.
//! - [`internode`]: teleported CX gates and their effective link channel.
//! - [`bench`]: benchmark circuits, routing on the two-node device, noisy
//!   execution and gate-algorithm performance scans.
//! - [`roofline`], [`qcpa`], [`dqpe`]: analytic performance models.

pub mod bench;
pub mod densmat;
pub mod error;
pub mod internode;
pub mod distillation;
pub mod dqpe;
pub mod physical;
pub mod qcpa;
pub mod roofline;

pub use error::{MnqcError, Result};
