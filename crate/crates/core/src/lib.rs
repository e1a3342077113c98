//! Reconstructs email/meeting conversation threads from message headers,
//! scores interlocutor + temporal + semantic proximity between messages of
//! distinct threads, and links threads into collaborative conversations of
//! document production, with an evaluation harness against human
//! gold-standard judgments.

pub mod config;
pub mod corpus;
pub mod ect;
pub mod error;
pub mod eval;
pub mod linker;
pub mod manifest;
pub mod pipeline;
pub mod proximity;
pub mod semantic;

pub use error::{CcdpError, Result};
